//! Explicit finite interpretations and their evaluation: concept extensions,
//! violation sets, cost, and conjunctive-query matching.

mod set;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{
    cost_add, cost_scale, violation_concept, Assertion, Atom, Concept, ConceptInclusion, ExtendedCost, Query,
    Term, Weight, WeightedKB,
};

pub use set::ElementSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("nominal refers to `{0}`, which is not a named element")]
    UnknownNominalIndividual(String),
    #[error("individual `{0}` is not a named element")]
    UnknownIndividual(String),
    #[error("the domain must not be empty")]
    EmptyDomain,
    #[error("individual `{0}` is named twice")]
    DuplicateNamed(String),
    #[error("element {element} is outside the domain of size {size}")]
    ElementOutOfRange { element: usize, size: usize },
    #[error("malformed witness: {0}")]
    Json(String),
}

/// A binary relation stored as successor rows.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Relation {
    succ: Vec<ElementSet>,
}

impl Relation {
    pub fn insert(&mut self, d: usize, e: usize) -> bool {
        if d >= self.succ.len() {
            self.succ.resize(d + 1, ElementSet::empty());
        }
        self.succ[d].insert(e)
    }

    pub fn remove(&mut self, d: usize, e: usize) -> bool {
        self.succ.get_mut(d).is_some_and(|row| row.remove(e))
    }

    pub fn contains(&self, d: usize, e: usize) -> bool {
        self.succ.get(d).is_some_and(|row| row.contains(e))
    }

    pub fn successors(&self, d: usize) -> ElementSet {
        self.succ.get(d).cloned().unwrap_or_default()
    }

    fn row(&self, d: usize) -> Option<&ElementSet> {
        self.succ.get(d)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(d, row)| row.iter().map(move |e| (d, e)))
    }

    pub fn is_empty(&self) -> bool {
        self.succ.iter().all(ElementSet::is_empty)
    }
}

/// A finite interpretation. Elements `0..named.len()` are the named
/// individuals in order; the remaining `anon_count` elements are anonymous.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    named: Vec<String>,
    anon_count: usize,
    concepts: BTreeMap<String, ElementSet>,
    roles: BTreeMap<String, Relation>,
}

/// A query homomorphism: each term is mapped to a domain element.
pub type Match = BTreeMap<Term, usize>;

impl Interpretation {
    pub fn new(named: Vec<String>, anon_count: usize) -> Result<Self, InterpError> {
        if named.is_empty() && anon_count == 0 {
            return Err(InterpError::EmptyDomain);
        }
        let mut seen = BTreeSet::new();
        for a in &named {
            if !seen.insert(a) {
                return Err(InterpError::DuplicateNamed(a.clone()));
            }
        }
        Ok(Interpretation { named, anon_count, concepts: BTreeMap::new(), roles: BTreeMap::new() })
    }

    /// An interpretation over `ind(kb)` plus `anon_count` anonymous elements,
    /// with all extensions empty.
    pub fn for_kb(kb: &WeightedKB, anon_count: usize) -> Self {
        let named = kb.individuals();
        let anon_count = if named.is_empty() { anon_count.max(1) } else { anon_count };
        Self::new(named, anon_count).expect("individuals are distinct and the domain is non-empty")
    }

    pub fn named(&self) -> &[String] {
        &self.named
    }

    pub fn anon_count(&self) -> usize {
        self.anon_count
    }

    pub fn domain_size(&self) -> usize {
        self.named.len() + self.anon_count
    }

    pub fn domain(&self) -> ElementSet {
        ElementSet::full(self.domain_size())
    }

    /// The element denoting individual `a`.
    pub fn element_of(&self, a: &str) -> Option<usize> {
        self.named.iter().position(|n| n == a)
    }

    fn require(&self, a: &str) -> Result<usize, InterpError> {
        self.element_of(a).ok_or_else(|| InterpError::UnknownIndividual(a.to_string()))
    }

    fn check_range(&self, e: usize) -> Result<(), InterpError> {
        if e < self.domain_size() {
            Ok(())
        } else {
            Err(InterpError::ElementOutOfRange { element: e, size: self.domain_size() })
        }
    }

    /// Human-readable label of an element: its name, or `_n` for anonymous ones.
    pub fn label(&self, e: usize) -> String {
        match self.named.get(e) {
            Some(a) => a.clone(),
            None => format!("_{e}"),
        }
    }

    pub fn add_concept(&mut self, name: &str, e: usize) -> Result<(), InterpError> {
        self.check_range(e)?;
        self.concepts.entry(name.to_string()).or_default().insert(e);
        Ok(())
    }

    pub fn add_role(&mut self, name: &str, d: usize, e: usize) -> Result<(), InterpError> {
        self.check_range(d)?;
        self.check_range(e)?;
        self.roles.entry(name.to_string()).or_default().insert(d, e);
        Ok(())
    }

    /// Sets membership without range checks; used by enumerators that own the
    /// domain layout.
    pub fn set_concept(&mut self, name: &str, e: usize, value: bool) {
        debug_assert!(e < self.domain_size());
        if let Some(ext) = self.concepts.get_mut(name) {
            ext.set(e, value);
        } else if value {
            self.concepts.insert(name.to_string(), ElementSet::singleton(e));
        }
    }

    pub fn set_role(&mut self, name: &str, d: usize, e: usize, value: bool) {
        debug_assert!(d < self.domain_size() && e < self.domain_size());
        let rel = self.roles.entry(name.to_string()).or_default();
        if value {
            rel.insert(d, e);
        } else {
            rel.remove(d, e);
        }
    }

    /// Extension of a concept name; names never set are empty.
    pub fn concept(&self, name: &str) -> ElementSet {
        self.concepts.get(name).cloned().unwrap_or_default()
    }

    pub fn role(&self, name: &str) -> Option<&Relation> {
        self.roles.get(name)
    }

    pub fn has_role(&self, name: &str, d: usize, e: usize) -> bool {
        self.roles.get(name).is_some_and(|r| r.contains(d, e))
    }

    pub fn successors(&self, name: &str, d: usize) -> ElementSet {
        self.roles.get(name).map(|r| r.successors(d)).unwrap_or_default()
    }

    /// Concept names with a non-empty extension, sorted.
    pub fn concept_names(&self) -> impl Iterator<Item = (&str, &ElementSet)> {
        self.concepts.iter().filter(|(_, s)| !s.is_empty()).map(|(n, s)| (n.as_str(), s))
    }

    /// Role names with a non-empty extension, sorted.
    pub fn role_names(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.roles.iter().filter(|(_, r)| !r.is_empty()).map(|(n, r)| (n.as_str(), r))
    }

    /// Canonical form: drops empty extensions so that structurally equal
    /// interpretations compare equal.
    pub fn normalized(mut self) -> Self {
        self.concepts.retain(|_, s| !s.is_empty());
        self.roles.retain(|_, r| !r.is_empty());
        for s in self.concepts.values_mut() {
            *s = s.iter().collect();
        }
        for r in self.roles.values_mut() {
            *r = {
                let mut out = Relation::default();
                for (d, e) in r.pairs() {
                    out.insert(d, e);
                }
                out
            };
        }
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(WitnessJson::from(self)).expect("witness serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, InterpError> {
        let w: WitnessJson = serde_json::from_value(value.clone()).map_err(|e| InterpError::Json(e.to_string()))?;
        w.try_into()
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = (0..self.domain_size()).map(|e| self.label(e)).collect();
        write!(f, "domain {{{}}}", labels.join(", "))?;
        for (name, ext) in self.concept_names() {
            let xs: Vec<String> = ext.iter().map(|e| self.label(e)).collect();
            write!(f, "; {name} = {{{}}}", xs.join(", "))?;
        }
        for (name, rel) in self.role_names() {
            let xs: Vec<String> = rel.pairs().map(|(d, e)| format!("({},{})", self.label(d), self.label(e))).collect();
            write!(f, "; {name} = {{{}}}", xs.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WitnessJson {
    domain: usize,
    named: Vec<String>,
    concepts: BTreeMap<String, Vec<usize>>,
    roles: BTreeMap<String, Vec<[usize; 2]>>,
}

impl From<&Interpretation> for WitnessJson {
    fn from(i: &Interpretation) -> Self {
        WitnessJson {
            domain: i.domain_size(),
            named: i.named.clone(),
            concepts: i.concept_names().map(|(n, s)| (n.to_string(), s.iter().collect())).collect(),
            roles: i.role_names().map(|(n, r)| (n.to_string(), r.pairs().map(|(d, e)| [d, e]).collect())).collect(),
        }
    }
}

impl TryFrom<WitnessJson> for Interpretation {
    type Error = InterpError;

    fn try_from(w: WitnessJson) -> Result<Self, InterpError> {
        if w.domain < w.named.len() {
            return Err(InterpError::Json(format!("domain {} is smaller than the named part", w.domain)));
        }
        let anon = w.domain - w.named.len();
        let mut i = Interpretation::new(w.named, anon)?;
        for (name, ids) in &w.concepts {
            for &e in ids {
                i.add_concept(name, e)?;
            }
        }
        for (name, pairs) in &w.roles {
            for &[d, e] in pairs {
                i.add_role(name, d, e)?;
            }
        }
        Ok(i)
    }
}

/// The extension `C^I`, computed bottom-up.
pub fn concept_extension(i: &Interpretation, c: &Concept) -> Result<ElementSet, InterpError> {
    let n = i.domain_size();
    Ok(match c {
        Concept::Name(a) => i.concept(a),
        Concept::Nominal(a) => {
            let e = i.element_of(a).ok_or_else(|| InterpError::UnknownNominalIndividual(a.clone()))?;
            ElementSet::singleton(e)
        }
        Concept::Top => ElementSet::full(n),
        Concept::Bot => ElementSet::empty(),
        Concept::And(a, b) => concept_extension(i, a)?.intersection(&concept_extension(i, b)?),
        Concept::Or(a, b) => concept_extension(i, a)?.union(&concept_extension(i, b)?),
        Concept::Not(a) => concept_extension(i, a)?.complement(n),
        Concept::Exists(r, d) => exists_extension(i, r, &concept_extension(i, d)?),
        Concept::Forall(r, d) => {
            let not_d = concept_extension(i, d)?.complement(n);
            exists_extension(i, r, &not_d).complement(n)
        }
    })
}

fn exists_extension(i: &Interpretation, r: &str, target: &ElementSet) -> ElementSet {
    let Some(rel) = i.role(r) else {
        return ElementSet::empty();
    };
    (0..i.domain_size()).filter(|&d| rel.row(d).is_some_and(|row| row.intersects(target))).collect()
}

pub fn satisfies_assertion(i: &Interpretation, alpha: &Assertion) -> Result<bool, InterpError> {
    Ok(match alpha {
        Assertion::Concept { concept, individual } => i.concept(concept).contains(i.require(individual)?),
        Assertion::Role { role, subject, object } => i.has_role(role, i.require(subject)?, i.require(object)?),
    })
}

pub fn satisfies_inclusion(i: &Interpretation, tau: &ConceptInclusion) -> Result<bool, InterpError> {
    Ok(violations_of_inclusion(i, tau)?.is_empty())
}

/// vio_τ(I) = (lhs ⊓ ¬rhs)^I.
pub fn violations_of_inclusion(i: &Interpretation, tau: &ConceptInclusion) -> Result<ElementSet, InterpError> {
    concept_extension(i, &violation_concept(tau))
}

/// The unsatisfied assertions, in ABox order.
pub fn violations_of_abox(i: &Interpretation, abox: &[(Assertion, Weight)]) -> Result<Vec<Assertion>, InterpError> {
    let mut out = Vec::new();
    for (alpha, _) in abox {
        if !satisfies_assertion(i, alpha)? {
            out.push(alpha.clone());
        }
    }
    Ok(out)
}

pub fn cost_of(i: &Interpretation, kb: &WeightedKB) -> Result<ExtendedCost, InterpError> {
    for a in kb.individuals() {
        i.require(&a)?;
    }
    let mut total = ExtendedCost::zero();
    for (tau, w) in &kb.tbox {
        let n = violations_of_inclusion(i, tau)?.len() as u64;
        total = cost_add(&total, &cost_scale(*w, n));
    }
    for (alpha, w) in &kb.abox {
        if !satisfies_assertion(i, alpha)? {
            total = cost_add(&total, &cost_scale(*w, 1));
        }
    }
    Ok(total)
}

/// Searches for a homomorphism of `q` into `i` extending `binding`.
/// Atoms are processed most-constrained first; candidates in increasing
/// element order, so the result is deterministic.
pub fn find_match(i: &Interpretation, q: &Query, binding: &Match) -> Result<Option<Match>, InterpError> {
    let mut m = binding.clone();
    for t in q.atoms.iter().flat_map(|a| a.terms()) {
        if let Term::Ind(a) = t {
            let e = i.require(a)?;
            match m.get(t) {
                Some(&bound) if bound != e => return Ok(None),
                _ => {
                    m.insert(t.clone(), e);
                }
            }
        }
    }
    let mut done = vec![false; q.atoms.len()];
    Ok(if search_match(i, &q.atoms, &mut done, &mut m) { Some(m) } else { None })
}

fn search_match(i: &Interpretation, atoms: &[Atom], done: &mut [bool], m: &mut Match) -> bool {
    let unbound = |t: &Term| !m.contains_key(t);
    let next = (0..atoms.len())
        .filter(|&j| !done[j])
        .min_by_key(|&j| atoms[j].terms().into_iter().filter(|t| unbound(t)).count());
    let Some(j) = next else {
        return true;
    };
    done[j] = true;
    let found = match &atoms[j] {
        Atom::Concept(name, t) => {
            let ext = i.concept(name);
            match m.get(t) {
                Some(&e) => ext.contains(e) && search_match(i, atoms, done, m),
                None => try_values(i, atoms, done, m, &[t], ext.iter().map(|e| vec![e])),
            }
        }
        Atom::Role(name, s, o) => {
            let pairs: Vec<(usize, usize)> = match i.role(name) {
                None => Vec::new(),
                Some(rel) => match (m.get(s).copied(), m.get(o).copied()) {
                    (Some(d), Some(e)) => {
                        if rel.contains(d, e) {
                            vec![(d, e)]
                        } else {
                            Vec::new()
                        }
                    }
                    (Some(d), None) => rel.successors(d).iter().map(|e| (d, e)).collect(),
                    (None, Some(e)) => rel.pairs().filter(|&(_, x)| x == e).collect(),
                    (None, None) => rel.pairs().filter(|&(d, e)| s != o || d == e).collect(),
                },
            };
            if m.contains_key(s) && m.contains_key(o) {
                !pairs.is_empty() && search_match(i, atoms, done, m)
            } else if m.contains_key(s) {
                try_values(i, atoms, done, m, &[o], pairs.iter().map(|&(_, e)| vec![e]))
            } else if m.contains_key(o) || s == o {
                try_values(i, atoms, done, m, &[s], pairs.iter().map(|&(d, _)| vec![d]))
            } else {
                try_values(i, atoms, done, m, &[s, o], pairs.iter().map(|&(d, e)| vec![d, e]))
            }
        }
    };
    if !found {
        done[j] = false;
    }
    found
}

fn try_values(
    i: &Interpretation,
    atoms: &[Atom],
    done: &mut [bool],
    m: &mut Match,
    terms: &[&Term],
    candidates: impl Iterator<Item = Vec<usize>>,
) -> bool {
    for values in candidates {
        for (t, v) in terms.iter().zip(&values) {
            m.insert((*t).clone(), *v);
        }
        if search_match(i, atoms, done, m) {
            return true;
        }
        for t in terms {
            m.remove(*t);
        }
    }
    false
}

/// I ⊨ q for a Boolean query.
pub fn satisfies_bcq(i: &Interpretation, q: &Query) -> Result<bool, InterpError> {
    Ok(find_match(i, q, &Match::new())?.is_some())
}
