//! Random tiny KBs, queries and interpretations for property tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::interp::Interpretation;
use crate::kb::{Assertion, Atom, Concept, ConceptInclusion, Query, Term, Weight, WeightedKB};

#[derive(Debug, Clone, Copy)]
pub struct RandomKbParams {
    pub max_individuals: usize,
    pub max_concepts: usize,
    pub max_roles: usize,
    pub max_axioms: usize,
    /// Maximum nesting depth of generated concepts.
    pub depth: usize,
    /// Restrict concepts to ⊤, ⊥, names, ⊓ and ∃.
    pub el_only: bool,
}

impl Default for RandomKbParams {
    fn default() -> Self {
        RandomKbParams { max_individuals: 3, max_concepts: 3, max_roles: 2, max_axioms: 4, depth: 2, el_only: false }
    }
}

/// The vocabulary a random KB draws from.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    pub individuals: Vec<String>,
    pub concepts: Vec<String>,
    pub roles: Vec<String>,
}

impl Vocabulary {
    pub fn random(p: &RandomKbParams, rng: &mut impl Rng) -> Self {
        let take = |names: &[&str], max: usize, min: usize, rng: &mut dyn rand::RngCore| {
            let n = rng.gen_range(min..=max.max(min)).min(names.len());
            names[..n].iter().map(|s| s.to_string()).collect::<Vec<_>>()
        };
        Vocabulary {
            individuals: take(&["a", "b", "c", "d"], p.max_individuals, 1, rng),
            concepts: take(&["A", "B", "C", "D"], p.max_concepts, 1, rng),
            roles: take(&["r", "s", "t"], p.max_roles, 0, rng),
        }
    }
}

pub fn random_weight(rng: &mut impl Rng) -> Weight {
    match rng.gen_range(0..3) {
        0 => Weight::Finite(1),
        1 => Weight::Finite(2),
        _ => Weight::Infinite,
    }
}

pub fn random_concept(v: &Vocabulary, depth: usize, el_only: bool, rng: &mut dyn rand::RngCore) -> Concept {
    let leaf = |rng: &mut dyn rand::RngCore| -> Concept {
        match rng.gen_range(0..10) {
            0 => Concept::Top,
            1 if !el_only => Concept::Nominal(v.individuals.choose(rng).expect("individuals").clone()),
            _ => Concept::name(v.concepts.choose(rng).expect("concepts").clone()),
        }
    };
    if depth == 0 || rng.gen_bool(0.4) {
        return leaf(rng);
    }
    let kinds: &[u8] = match (el_only, v.roles.is_empty()) {
        (true, true) => &[0],
        (true, false) => &[0, 1],
        (false, true) => &[0, 2, 3],
        (false, false) => &[0, 1, 2, 3, 4],
    };
    let sub = |rng: &mut dyn rand::RngCore| random_concept(v, depth - 1, el_only, rng);
    match kinds.choose(rng).expect("non-empty") {
        0 => Concept::and(sub(rng), sub(rng)),
        1 => Concept::exists(v.roles.choose(rng).expect("roles").clone(), sub(rng)),
        2 => Concept::or(sub(rng), sub(rng)),
        3 => Concept::not(sub(rng)),
        _ => Concept::forall(v.roles.choose(rng).expect("roles").clone(), sub(rng)),
    }
}

pub fn random_assertion(v: &Vocabulary, rng: &mut impl Rng) -> Assertion {
    let ind = |rng: &mut dyn rand::RngCore| v.individuals.choose(rng).expect("individuals").clone();
    if v.roles.is_empty() || rng.gen_bool(0.6) {
        Assertion::concept(v.concepts.choose(rng).expect("concepts").clone(), ind(rng))
    } else {
        Assertion::role(v.roles.choose(rng).expect("roles").clone(), ind(rng), ind(rng))
    }
}

/// A random KB over a random vocabulary. Disjointness axioms and clashing
/// assertions on one individual are favored so that positive optimal costs
/// are common. Every individual of the vocabulary occurs in the result.
pub fn random_wkb(p: &RandomKbParams, rng: &mut impl Rng) -> WeightedKB {
    let v = Vocabulary::random(p, rng);
    random_wkb_over(&v, p, rng)
}

/// [`random_wkb`] driven by a seeded standard generator.
pub fn random_wkb_from_seed(p: &RandomKbParams, seed: u64) -> WeightedKB {
    use rand::SeedableRng;
    random_wkb(p, &mut rand::rngs::StdRng::seed_from_u64(seed))
}

/// Up to `max_axioms` inclusions and up to `max_axioms` assertions, plus one
/// assertion per individual of the vocabulary not mentioned otherwise.
pub fn random_wkb_over(v: &Vocabulary, p: &RandomKbParams, rng: &mut impl Rng) -> WeightedKB {
    let mut kb = WeightedKB::new();
    let add_assertion = |kb: &mut WeightedKB, alpha: Assertion, w: Weight| {
        if !kb.abox.iter().any(|(a, _)| *a == alpha) {
            kb.abox.push((alpha, w));
        }
    };
    let max = p.max_axioms.max(1);
    for _ in 0..rng.gen_range(0..=max) {
        let tau = if v.concepts.len() >= 2 && rng.gen_bool(0.5) {
            let pair: Vec<&String> = v.concepts.choose_multiple(rng, 2).collect();
            if rng.gen_bool(0.7) {
                let a = v.individuals.choose(rng).expect("individuals");
                add_assertion(&mut kb, Assertion::concept(pair[0].clone(), a.clone()), finite_leaning_weight(rng));
                add_assertion(&mut kb, Assertion::concept(pair[1].clone(), a.clone()), finite_leaning_weight(rng));
            }
            ConceptInclusion::new(Concept::and(Concept::name(pair[0]), Concept::name(pair[1])), Concept::Bot)
        } else {
            ConceptInclusion::new(random_concept(v, p.depth, p.el_only, rng), random_concept(v, p.depth, p.el_only, rng))
        };
        if !kb.tbox.iter().any(|(t, _)| *t == tau) {
            kb.tbox.push((tau, random_weight(rng)));
        }
    }
    while kb.abox.len() < max && rng.gen_bool(0.6) {
        let alpha = random_assertion(v, rng);
        add_assertion(&mut kb, alpha, finite_leaning_weight(rng));
    }
    for a in &v.individuals {
        if !kb.individuals().contains(a) {
            let alpha = Assertion::concept(v.concepts.choose(rng).expect("concepts").clone(), a.clone());
            add_assertion(&mut kb, alpha, finite_leaning_weight(rng));
        }
    }
    kb
}

fn finite_leaning_weight(rng: &mut impl Rng) -> Weight {
    if rng.gen_bool(0.2) {
        Weight::Infinite
    } else {
        Weight::Finite(rng.gen_range(1..=2))
    }
}

/// A KB meeting the repair hypotheses: infinite TBox weights, finite ABox
/// weights, and a TBox made of disjointness and simple inclusions.
pub fn random_repair_kb(p: &RandomKbParams, rng: &mut impl Rng) -> WeightedKB {
    let v = Vocabulary::random(p, rng);
    let mut kb = WeightedKB::new();
    for _ in 0..rng.gen_range(1..=2) {
        let pair: Vec<&String> = v.concepts.choose_multiple(rng, 2).collect();
        let tau = if pair.len() == 2 && rng.gen_bool(0.6) {
            ConceptInclusion::new(Concept::and(Concept::name(pair[0]), Concept::name(pair[1])), Concept::Bot)
        } else {
            ConceptInclusion::new(random_concept(&v, 1, true, rng), random_concept(&v, 1, true, rng))
        };
        if !kb.tbox.iter().any(|(t, _)| *t == tau) {
            kb.tbox.push((tau, Weight::Infinite));
        }
    }
    for _ in 0..rng.gen_range(2..=4) {
        let alpha = random_assertion(&v, rng);
        if !kb.abox.iter().any(|(a, _)| *a == alpha) {
            kb.abox.push((alpha, Weight::Finite(rng.gen_range(1..=3))));
        }
    }
    kb
}

fn vocab_of(kb: &WeightedKB) -> (Vec<String>, Vec<String>, Vec<String>) {
    let mut concepts = kb.concept_names();
    if concepts.is_empty() {
        concepts.push("A".into());
    }
    (kb.individuals(), concepts, kb.role_names())
}

/// A Boolean instance query over the KB's names; `None` when the KB has no
/// individuals.
pub fn random_iq(kb: &WeightedKB, rng: &mut impl Rng) -> Option<Query> {
    let (inds, concepts, roles) = vocab_of(kb);
    if inds.is_empty() {
        return None;
    }
    let ind = |rng: &mut dyn rand::RngCore| Term::ind(inds.choose(rng).expect("individuals").clone());
    let atom = if roles.is_empty() || rng.gen_bool(0.6) {
        Atom::concept(concepts.choose(rng).expect("concepts").clone(), ind(rng))
    } else {
        Atom::role(roles.choose(rng).expect("roles").clone(), ind(rng), ind(rng))
    };
    Query::boolean(vec![atom]).ok()
}

/// A BCQ with one or two existential variables and up to three atoms.
pub fn random_bcq(kb: &WeightedKB, rng: &mut impl Rng) -> Option<Query> {
    let (inds, concepts, roles) = vocab_of(kb);
    if inds.is_empty() {
        return None;
    }
    let vars = ["y", "z"];
    let nvars = rng.gen_range(1..=2);
    let term = |rng: &mut dyn rand::RngCore| {
        if rng.gen_bool(0.3) {
            Term::ind(inds.choose(rng).expect("individuals").clone())
        } else {
            Term::var(vars[rng.gen_range(0..nvars)])
        }
    };
    let mut atoms = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let a = if roles.is_empty() || rng.gen_bool(0.5) {
            Atom::concept(concepts.choose(rng).expect("concepts").clone(), term(rng))
        } else {
            Atom::role(roles.choose(rng).expect("roles").clone(), term(rng), term(rng))
        };
        atoms.push(a);
    }
    Query::boolean(atoms).ok()
}

/// Random extensions over `named` plus `anon` anonymous elements.
pub fn random_interpretation(
    named: &[String],
    concepts: &[String],
    roles: &[String],
    anon: usize,
    density: f64,
    rng: &mut impl Rng,
) -> Interpretation {
    let mut i = Interpretation::new(named.to_vec(), if named.is_empty() { anon.max(1) } else { anon })
        .expect("distinct names and non-empty domain");
    let d = i.domain_size();
    for c in concepts {
        for e in 0..d {
            i.set_concept(c, e, rng.gen_bool(density));
        }
    }
    for r in roles {
        for x in 0..d {
            for y in 0..d {
                i.set_role(r, x, y, rng.gen_bool(density / 2.0));
            }
        }
    }
    i
}
