//! Syntax of weighted ALCO knowledge bases: concepts, inclusions, assertions,
//! weights and conjunctive queries.

mod cost;
mod query;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

pub use cost::{cost_add, cost_scale, ExtendedCost, Weight};
pub use query::{Atom, Query, QueryError, Term};
pub use validate::{is_identifier, validate, Diagnostic, Location};

/// The three disjoint namespaces of a signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    ConceptName,
    RoleName,
    IndividualName,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolKind::ConceptName => "concept name",
            SymbolKind::RoleName => "role name",
            SymbolKind::IndividualName => "individual name",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub kind: SymbolKind,
    pub text: String,
}

/// An ALCO concept. Equality is structural: `A ⊓ B` and `B ⊓ A` differ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Name(String),
    Nominal(String),
    Top,
    Bot,
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    Not(Box<Concept>),
    Exists(String, Box<Concept>),
    Forall(String, Box<Concept>),
}

impl Concept {
    pub fn name(n: impl Into<String>) -> Self {
        Concept::Name(n.into())
    }

    pub fn nominal(a: impl Into<String>) -> Self {
        Concept::Nominal(a.into())
    }

    pub fn and(a: Concept, b: Concept) -> Self {
        Concept::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Concept, b: Concept) -> Self {
        Concept::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    pub fn exists(r: impl Into<String>, c: Concept) -> Self {
        Concept::Exists(r.into(), Box::new(c))
    }

    pub fn forall(r: impl Into<String>, c: Concept) -> Self {
        Concept::Forall(r.into(), Box::new(c))
    }

    /// Immediate subconcepts.
    pub fn children(&self) -> Vec<&Concept> {
        match self {
            Concept::Name(_) | Concept::Nominal(_) | Concept::Top | Concept::Bot => Vec::new(),
            Concept::And(a, b) | Concept::Or(a, b) => vec![a, b],
            Concept::Not(c) | Concept::Exists(_, c) | Concept::Forall(_, c) => vec![c],
        }
    }

    /// Calls `f` on every node, children before parents.
    pub fn visit_postorder<'a>(&'a self, f: &mut impl FnMut(&'a Concept)) {
        for child in self.children() {
            child.visit_postorder(f);
        }
        f(self);
    }

    pub fn is_el_bot(&self) -> bool {
        match self {
            Concept::Name(_) | Concept::Top | Concept::Bot => true,
            Concept::And(a, b) => a.is_el_bot() && b.is_el_bot(),
            Concept::Exists(_, c) => c.is_el_bot(),
            Concept::Nominal(_) | Concept::Or(..) | Concept::Not(_) | Concept::Forall(..) => false,
        }
    }

    pub(crate) fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        self.visit_postorder(&mut |c| match c {
            Concept::Name(n) => {
                out.insert(Symbol { kind: SymbolKind::ConceptName, text: n.clone() });
            }
            Concept::Nominal(a) => {
                out.insert(Symbol { kind: SymbolKind::IndividualName, text: a.clone() });
            }
            Concept::Exists(r, _) | Concept::Forall(r, _) => {
                out.insert(Symbol { kind: SymbolKind::RoleName, text: r.clone() });
            }
            _ => {}
        });
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::serialize_concept(self))
    }
}

/// `lhs ⊑ rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConceptInclusion {
    pub lhs: Concept,
    pub rhs: Concept,
}

impl ConceptInclusion {
    pub fn new(lhs: Concept, rhs: Concept) -> Self {
        ConceptInclusion { lhs, rhs }
    }
}

impl fmt::Display for ConceptInclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} SubClassOf {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Assertion {
    Concept { concept: String, individual: String },
    Role { role: String, subject: String, object: String },
}

impl Assertion {
    pub fn concept(concept: impl Into<String>, individual: impl Into<String>) -> Self {
        Assertion::Concept { concept: concept.into(), individual: individual.into() }
    }

    pub fn role(role: impl Into<String>, subject: impl Into<String>, object: impl Into<String>) -> Self {
        Assertion::Role { role: role.into(), subject: subject.into(), object: object.into() }
    }

    pub fn individuals(&self) -> Vec<&str> {
        match self {
            Assertion::Concept { individual, .. } => vec![individual],
            Assertion::Role { subject, object, .. } => vec![subject, object],
        }
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assertion::Concept { concept, individual } => write!(f, "{concept}({individual})"),
            Assertion::Role { role, subject, object } => write!(f, "{role}({subject},{object})"),
        }
    }
}

/// Description-logic fragment of a TBox.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fragment {
    ElBot,
    Alco,
}

/// A weighted knowledge base: every inclusion and assertion carries a weight.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct WeightedKB {
    pub tbox: Vec<(ConceptInclusion, Weight)>,
    pub abox: Vec<(Assertion, Weight)>,
}

impl WeightedKB {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_inclusion(mut self, lhs: Concept, rhs: Concept, w: Weight) -> Self {
        self.tbox.push((ConceptInclusion::new(lhs, rhs), w));
        self
    }

    pub fn with_assertion(mut self, a: Assertion, w: Weight) -> Self {
        self.abox.push((a, w));
        self
    }

    pub fn is_empty(&self) -> bool {
        self.tbox.is_empty() && self.abox.is_empty()
    }

    /// All symbols used, per namespace.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for (tau, _) in &self.tbox {
            tau.lhs.collect_symbols(&mut out);
            tau.rhs.collect_symbols(&mut out);
        }
        for (alpha, _) in &self.abox {
            match alpha {
                Assertion::Concept { concept, individual } => {
                    out.insert(Symbol { kind: SymbolKind::ConceptName, text: concept.clone() });
                    out.insert(Symbol { kind: SymbolKind::IndividualName, text: individual.clone() });
                }
                Assertion::Role { role, subject, object } => {
                    out.insert(Symbol { kind: SymbolKind::RoleName, text: role.clone() });
                    out.insert(Symbol { kind: SymbolKind::IndividualName, text: subject.clone() });
                    out.insert(Symbol { kind: SymbolKind::IndividualName, text: object.clone() });
                }
            }
        }
        out
    }

    /// ind(K), in order of first occurrence (the ABox first, then TBox nominals).
    pub fn individuals(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut push = |a: &str| {
            if seen.insert(a.to_string()) {
                out.push(a.to_string());
            }
        };
        for (alpha, _) in &self.abox {
            for a in alpha.individuals() {
                push(a);
            }
        }
        for (tau, _) in &self.tbox {
            for c in [&tau.lhs, &tau.rhs] {
                c.visit_postorder(&mut |n| {
                    if let Concept::Nominal(a) = n {
                        push(a);
                    }
                });
            }
        }
        out
    }

    pub fn concept_names(&self) -> Vec<String> {
        self.names_of(SymbolKind::ConceptName)
    }

    pub fn role_names(&self) -> Vec<String> {
        self.names_of(SymbolKind::RoleName)
    }

    fn names_of(&self, kind: SymbolKind) -> Vec<String> {
        self.symbols().into_iter().filter(|s| s.kind == kind).map(|s| s.text).collect()
    }

    /// Sum of all finite weights, saturating.
    pub fn total_finite_weight(&self) -> u128 {
        self.tbox
            .iter()
            .map(|(_, w)| *w)
            .chain(self.abox.iter().map(|(_, w)| *w))
            .filter_map(Weight::finite)
            .fold(0u128, |acc, w| acc.saturating_add(w as u128))
    }
}

/// EL⊥ iff no ∀, ¬, ⊔ or nominal occurs.
pub fn fragment_of(tbox: &[(ConceptInclusion, Weight)]) -> Fragment {
    let el = tbox.iter().all(|(tau, _)| tau.lhs.is_el_bot() && tau.rhs.is_el_bot());
    if el {
        Fragment::ElBot
    } else {
        Fragment::Alco
    }
}

/// sub(T): every concept occurring in an inclusion, closed under subtrees.
pub fn subconcepts(tbox: &[(ConceptInclusion, Weight)]) -> BTreeSet<Concept> {
    let mut out = BTreeSet::new();
    for (tau, _) in tbox {
        for c in [&tau.lhs, &tau.rhs] {
            c.visit_postorder(&mut |n| {
                out.insert(n.clone());
            });
        }
    }
    out
}

/// V_τ = lhs ⊓ ¬rhs; its extension is exactly the violation set of τ.
pub fn violation_concept(tau: &ConceptInclusion) -> Concept {
    Concept::and(tau.lhs.clone(), Concept::not(tau.rhs.clone()))
}

/// K_∞: the infinite-weight part of the KB.
pub fn k_infty(kb: &WeightedKB) -> WeightedKB {
    WeightedKB {
        tbox: kb.tbox.iter().filter(|(_, w)| w.is_infinite()).cloned().collect(),
        abox: kb.abox.iter().filter(|(_, w)| w.is_infinite()).cloned().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::visa_fixture;

    #[test]
    fn fragments() {
        let el = WeightedKB::new().with_inclusion(
            Concept::and(Concept::name("A"), Concept::exists("R", Concept::name("B"))),
            Concept::Bot,
            Weight::Finite(1),
        );
        assert_eq!(fragment_of(&el.tbox), Fragment::ElBot);
        assert_eq!(fragment_of(&visa_fixture().tbox), Fragment::Alco);
        assert_eq!(fragment_of(&[]), Fragment::ElBot);
    }

    #[test]
    fn subconcepts_of_simple_tbox() {
        let kb = WeightedKB::new().with_inclusion(
            Concept::name("A"),
            Concept::exists("R", Concept::name("B")),
            Weight::Infinite,
        );
        let expected: BTreeSet<_> =
            [Concept::name("A"), Concept::exists("R", Concept::name("B")), Concept::name("B")]
                .into_iter()
                .collect();
        assert_eq!(subconcepts(&kb.tbox), expected);
        assert!(subconcepts(&[]).is_empty());
    }

    #[test]
    fn subconcepts_of_visa_tbox() {
        assert_eq!(subconcepts(&visa_fixture().tbox).len(), 11);
    }

    #[test]
    fn violation_concepts() {
        let tau = ConceptInclusion::new(Concept::name("A"), Concept::name("B"));
        assert_eq!(
            violation_concept(&tau),
            Concept::and(Concept::name("A"), Concept::not(Concept::name("B")))
        );
        let kb = visa_fixture();
        assert_eq!(
            violation_concept(&kb.tbox[2].0),
            Concept::and(
                Concept::forall("hasNat", Concept::not(Concept::nominal("c"))),
                Concept::not(Concept::name("Visa"))
            )
        );
    }

    #[test]
    fn infinite_part() {
        let kb = visa_fixture();
        let inf = k_infty(&kb);
        assert_eq!(inf.tbox, kb.tbox[..2].to_vec());
        assert!(inf.abox.is_empty());

        let finite = WeightedKB::new().with_assertion(Assertion::concept("A", "a"), Weight::Finite(3));
        assert!(k_infty(&finite).is_empty());

        let all_inf = WeightedKB::new()
            .with_assertion(Assertion::concept("A", "a"), Weight::Infinite)
            .with_inclusion(Concept::name("A"), Concept::Bot, Weight::Infinite);
        assert_eq!(k_infty(&all_inf), all_inf);
    }

    #[test]
    fn individuals_in_first_occurrence_order() {
        let kb = visa_fixture();
        assert_eq!(kb.individuals(), vec!["p", "b", "c"]);
        assert_eq!(kb.concept_names(), vec!["NoVisa", "Visa"]);
        assert_eq!(kb.role_names(), vec!["hasNat"]);
    }
}
