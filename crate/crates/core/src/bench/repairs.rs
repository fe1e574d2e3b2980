//! ≤ω-repairs: maximum-weight ABox subsets consistent with the TBox, and
//! AR / brave entailment over them.

use super::BenchError;
use crate::kb::{Assertion, ExtendedCost, Query, Weight, WeightedKB};
use crate::reason::{Reasoner, Semantics};

/// The classical KB ⟨T, A'⟩ with every weight infinite.
pub fn hard_kb(kb: &WeightedKB, subset: &[Assertion]) -> WeightedKB {
    WeightedKB {
        tbox: kb.tbox.iter().map(|(t, _)| (t.clone(), Weight::Infinite)).collect(),
        abox: subset.iter().map(|a| (a.clone(), Weight::Infinite)).collect(),
    }
}

fn consistent(r: &mut Reasoner, kb: &WeightedKB, subset: &[Assertion]) -> Result<bool, BenchError> {
    let v = r.bcs(&hard_kb(kb, subset), &ExtendedCost::zero())?;
    if !v.answer && !v.complete {
        return Err(BenchError::Inconclusive("consistency check".into()));
    }
    Ok(v.answer)
}

fn check_hypotheses(r: &mut Reasoner, kb: &WeightedKB) -> Result<(), BenchError> {
    if kb.tbox.iter().any(|(_, w)| !w.is_infinite()) {
        return Err(BenchError::HypothesisViolation("every TBox weight must be infinite".into()));
    }
    if kb.abox.iter().any(|(_, w)| w.is_infinite()) {
        return Err(BenchError::HypothesisViolation("every ABox weight must be finite".into()));
    }
    if kb.abox.len() > 20 {
        return Err(BenchError::HypothesisViolation("ABox too large for subset enumeration".into()));
    }
    if !consistent(r, kb, &[])? {
        return Err(BenchError::HypothesisViolation("the TBox is unsatisfiable".into()));
    }
    Ok(())
}

pub fn enumerate_w_repairs(kb: &WeightedKB) -> Result<Vec<Vec<Assertion>>, BenchError> {
    enumerate_w_repairs_with(&mut Reasoner::default(), kb)
}

/// All consistent ABox subsets of maximum total weight, each in ABox order.
pub fn enumerate_w_repairs_with(r: &mut Reasoner, kb: &WeightedKB) -> Result<Vec<Vec<Assertion>>, BenchError> {
    check_hypotheses(r, kb)?;
    let n = kb.abox.len();
    let weight = |mask: u32| -> u128 {
        (0..n).filter(|i| mask >> i & 1 == 1).map(|i| kb.abox[i].1.finite().unwrap_or(0) as u128).sum()
    };
    let mut masks: Vec<u32> = (0u32..1 << n).collect();
    masks.sort_by_key(|&m| std::cmp::Reverse(weight(m)));
    let mut best = None;
    let mut out = Vec::new();
    for m in masks {
        let w = weight(m);
        if best.is_some_and(|b| w < b) {
            break;
        }
        let subset: Vec<Assertion> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| kb.abox[i].0.clone()).collect();
        if consistent(r, kb, &subset)? {
            best = Some(w);
            out.push(subset);
        }
    }
    out.sort();
    Ok(out)
}

fn classically_entails(r: &mut Reasoner, kb: &WeightedKB, subset: &[Assertion], q: &Query) -> Result<bool, BenchError> {
    let v = r.entails(&hard_kb(kb, subset), q, &Semantics::CertainBounded(ExtendedCost::zero()));
    match v {
        Ok(v) => Ok(v.answer),
        // a query individual missing from the repair cannot be forced
        Err(crate::reason::ReasonError::UnknownQueryIndividual(_)) => Ok(false),
        Err(e) => Err(e.into()),
    }
}

/// q holds in every model of every ≤ω-repair.
pub fn ar_entails(kb: &WeightedKB, q: &Query) -> Result<bool, BenchError> {
    let mut r = Reasoner::default();
    for rep in enumerate_w_repairs_with(&mut r, kb)? {
        if !classically_entails(&mut r, kb, &rep, q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// q holds in every model of some ≤ω-repair.
pub fn brave_entails(kb: &WeightedKB, q: &Query) -> Result<bool, BenchError> {
    let mut r = Reasoner::default();
    for rep in enumerate_w_repairs_with(&mut r, kb)? {
        if classically_entails(&mut r, kb, &rep, q)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::Concept;

    fn disjoint_ab(wa: u64, wb: u64) -> WeightedKB {
        WeightedKB::new()
            .with_inclusion(Concept::and(Concept::name("A"), Concept::name("B")), Concept::Bot, Weight::Infinite)
            .with_assertion(Assertion::concept("A", "a"), Weight::Finite(wa))
            .with_assertion(Assertion::concept("B", "a"), Weight::Finite(wb))
    }

    #[test]
    fn heavier_assertion_wins() {
        assert_eq!(enumerate_w_repairs(&disjoint_ab(1, 2)).unwrap(), vec![vec![Assertion::concept("B", "a")]]);
    }

    #[test]
    fn ties_give_two_repairs() {
        assert_eq!(enumerate_w_repairs(&disjoint_ab(1, 1)).unwrap().len(), 2);
    }

    #[test]
    fn consistent_kb_is_its_own_repair() {
        let kb = WeightedKB::new()
            .with_assertion(Assertion::concept("A", "a"), Weight::Finite(1))
            .with_assertion(Assertion::role("r", "a", "b"), Weight::Finite(3));
        let all: Vec<Assertion> = kb.abox.iter().map(|(a, _)| a.clone()).collect();
        assert_eq!(enumerate_w_repairs(&kb).unwrap(), vec![all]);
    }

    #[test]
    fn hypotheses_are_checked() {
        let soft_tbox = disjoint_ab(1, 1).with_inclusion(Concept::name("A"), Concept::name("C"), Weight::Finite(1));
        assert!(matches!(enumerate_w_repairs(&soft_tbox), Err(BenchError::HypothesisViolation(_))));
        let hard_abox = disjoint_ab(1, 1).with_assertion(Assertion::concept("C", "a"), Weight::Infinite);
        assert!(matches!(enumerate_w_repairs(&hard_abox), Err(BenchError::HypothesisViolation(_))));
        let unsat = WeightedKB::new().with_inclusion(Concept::Top, Concept::Bot, Weight::Infinite);
        assert!(matches!(enumerate_w_repairs(&unsat), Err(BenchError::HypothesisViolation(_))));
    }

    #[test]
    fn ar_and_brave() {
        let kb = disjoint_ab(1, 1);
        let qa = Query::boolean(vec![crate::kb::Atom::concept("A", crate::kb::Term::ind("a"))]).unwrap();
        assert!(!ar_entails(&kb, &qa).unwrap());
        assert!(brave_entails(&kb, &qa).unwrap());
        assert!(ar_entails(&disjoint_ab(3, 1), &qa).unwrap());
    }
}
