use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Assertion, Symbol, SymbolKind, Weight, WeightedKB};

/// Where a diagnostic points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Location {
    /// Index into `WeightedKB::tbox`.
    Inclusion(usize),
    /// Index into `WeightedKB::abox`.
    Assertion(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Inclusion(i) => write!(f, "tbox[{i}]"),
            Location::Assertion(i) => write!(f, "abox[{i}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub location: Location,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// `[A-Za-z][A-Za-z0-9_]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Checks identifiers, namespace disjointness, positive weights and duplicates.
/// An empty result means the KB is valid.
pub fn validate(kb: &WeightedKB) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    // first location at which each symbol is used
    let mut uses: BTreeMap<String, BTreeMap<SymbolKind, Location>> = BTreeMap::new();

    let mut record = |sym: Symbol, loc: Location| {
        uses.entry(sym.text).or_default().entry(sym.kind).or_insert(loc);
    };
    let mut seen_tbox = BTreeSet::new();
    for (i, (tau, w)) in kb.tbox.iter().enumerate() {
        let loc = Location::Inclusion(i);
        check_weight(*w, loc, &mut out);
        if !seen_tbox.insert(tau) {
            out.push(Diagnostic { location: loc, message: "duplicate concept inclusion".into() });
        }
        let mut syms = BTreeSet::new();
        tau.lhs.collect_symbols(&mut syms);
        tau.rhs.collect_symbols(&mut syms);
        for s in syms {
            record(s, loc);
        }
    }
    let mut seen_abox = BTreeSet::new();
    for (i, (alpha, w)) in kb.abox.iter().enumerate() {
        let loc = Location::Assertion(i);
        check_weight(*w, loc, &mut out);
        if !seen_abox.insert(alpha) {
            out.push(Diagnostic { location: loc, message: "duplicate assertion".into() });
        }
        match alpha {
            Assertion::Concept { concept, individual } => {
                record(Symbol { kind: SymbolKind::ConceptName, text: concept.clone() }, loc);
                record(Symbol { kind: SymbolKind::IndividualName, text: individual.clone() }, loc);
            }
            Assertion::Role { role, subject, object } => {
                record(Symbol { kind: SymbolKind::RoleName, text: role.clone() }, loc);
                record(Symbol { kind: SymbolKind::IndividualName, text: subject.clone() }, loc);
                record(Symbol { kind: SymbolKind::IndividualName, text: object.clone() }, loc);
            }
        }
    }

    for (text, kinds) in &uses {
        let first = *kinds.values().min().expect("non-empty");
        if !is_identifier(text) {
            out.push(Diagnostic { location: first, message: format!("`{text}` is not a valid identifier") });
        }
        if kinds.len() > 1 {
            let (kind, loc) = kinds.iter().max_by_key(|(_, l)| **l).expect("non-empty");
            let names: Vec<String> = kinds.keys().map(|k| k.to_string()).collect();
            out.push(Diagnostic {
                location: *loc,
                message: format!("`{text}` is used as {} (here as {kind})", names.join(" and ")),
            });
        }
    }
    out.sort_by_key(|d| d.location);
    out
}

fn check_weight(w: Weight, loc: Location, out: &mut Vec<Diagnostic>) {
    if w == Weight::Finite(0) {
        out.push(Diagnostic { location: loc, message: "weight must be positive".into() });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::visa_fixture;
    use crate::kb::Concept;

    #[test]
    fn visa_fixture_is_valid() {
        assert_eq!(validate(&visa_fixture()), vec![]);
    }

    #[test]
    fn zero_weight() {
        let kb = WeightedKB::new().with_assertion(Assertion::concept("A", "a"), Weight::Finite(0));
        let diags = validate(&kb);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].message, "weight must be positive");
        assert_eq!(diags[0].location, Location::Assertion(0));
    }

    #[test]
    fn namespace_clash() {
        let kb = WeightedKB::new()
            .with_assertion(Assertion::concept("Visa", "p"), Weight::Finite(1))
            .with_assertion(Assertion::role("Visa", "p", "q"), Weight::Finite(1));
        let diags = validate(&kb);
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert!(diags[0].message.contains("concept name and role name"));
        assert_eq!(diags[0].location, Location::Assertion(1));
    }

    #[test]
    fn duplicates_and_identifiers() {
        let kb = WeightedKB::new()
            .with_inclusion(Concept::name("A"), Concept::Bot, Weight::Finite(1))
            .with_inclusion(Concept::name("A"), Concept::Bot, Weight::Infinite)
            .with_assertion(Assertion::concept("9A", "a"), Weight::Finite(1));
        let diags = validate(&kb);
        assert_eq!(diags.len(), 2, "{diags:?}");
        assert_eq!(diags[0].location, Location::Inclusion(1));
        assert!(diags[1].message.contains("not a valid identifier"));
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("hasNat"));
        assert!(is_identifier("x_1"));
        assert!(!is_identifier("_y0"));
        assert!(!is_identifier("1a"));
        assert!(!is_identifier(""));
    }
}
