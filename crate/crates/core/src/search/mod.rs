//! Bounded-domain model search: find an interpretation within a cost bound
//! that satisfies or avoids a Boolean query. Also the S-filtration and the
//! domain-bound policy.
//!
//! The search grounds the KB over the named individuals plus up to
//! `anon_limit` anonymous elements and hands the result to a CDCL solver with
//! weighted budget constraints. Before that, a named-only relaxation is tried:
//! when even the relaxation has no model, no interpretation of any size does,
//! so the negative answer is complete regardless of the bound.

mod encode;
mod solver;

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::interp::{
    concept_extension, cost_of, satisfies_assertion, satisfies_bcq, violations_of_inclusion, InterpError,
    Interpretation,
};
use crate::kb::{subconcepts, Assertion, Atom, ExtendedCost, Query, Term, Weight, WeightedKB};
use encode::{Constraint, Encoder, Objective};

/// Default number of anonymous elements searched when the theoretical
/// bound is larger.
pub const DEFAULT_ANON_CAP: usize = 12;

/// Environment variable overriding [`DEFAULT_ANON_CAP`].
pub const ANON_BOUND_ENV: &str = "WKB_ANON_BOUND";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DomainBound {
    pub anon_limit: usize,
    /// Whether `anon_limit` reaches the bound that makes "not found" final.
    pub theoretical_complete: bool,
}

impl DomainBound {
    pub fn new(anon_limit: usize, theoretical_complete: bool) -> Self {
        DomainBound { anon_limit, theoretical_complete }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Bcs,
    Possible,
    Certain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryConstraint {
    None,
    MustSatisfy(Query),
    MustAvoid(Query),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Interpretation),
    NoneWithinBound { complete: bool },
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn witness(&self) -> Option<&Interpretation> {
        match self {
            SearchOutcome::Found(i) => Some(i),
            SearchOutcome::NoneWithinBound { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("node budget of {0} decisions exhausted")]
    BudgetExhausted(u64),
    #[error("query constraints must be Boolean")]
    NotBoolean,
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// The anonymous-element cap: `WKB_ANON_BOUND` if set and valid, else
/// [`DEFAULT_ANON_CAP`].
pub fn default_anon_cap() -> usize {
    std::env::var(ANON_BOUND_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_ANON_CAP)
}

/// Number of anonymous elements that suffices for BCS and possible
/// entailment (one per S-type), capped at `cap`. Certain entailment has no
/// computable bound here, so it gets the cap and is never complete.
pub fn completeness_bound(kb: &WeightedKB, problem: Problem, cap: usize) -> DomainBound {
    if problem == Problem::Certain {
        return DomainBound::new(cap, false);
    }
    let s = subconcepts(&kb.tbox).len();
    match 1usize.checked_shl(s as u32).filter(|_| s < usize::BITS as usize) {
        Some(types) if types <= cap => DomainBound::new(types, true),
        _ => DomainBound::new(cap, false),
    }
}

pub type TraceSink = Arc<Mutex<Box<dyn Write + Send>>>;

#[derive(Clone)]
pub struct SearchOptions {
    /// Maximum number of solver decisions per search call.
    pub node_budget: Option<u64>,
    /// Budget-based propagation; when off, costs are only checked on
    /// complete assignments.
    pub prune: bool,
    /// Try the named-only relaxation first.
    pub relaxation: bool,
    /// Receives one `depth|decision|running_cost` line per decision.
    pub trace: Option<TraceSink>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { node_budget: None, prune: true, relaxation: true, trace: None }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub conflicts: u64,
    pub searches: u64,
}

/// Runs searches and accumulates statistics.
#[derive(Default)]
pub struct Searcher {
    pub options: SearchOptions,
    pub stats: SearchStats,
}

impl Searcher {
    pub fn new(options: SearchOptions) -> Self {
        Searcher { options, stats: SearchStats::default() }
    }

    /// An interpretation with cost ≤ k respecting `constraint`.
    pub fn find(
        &mut self,
        kb: &WeightedKB,
        k: &ExtendedCost,
        constraint: &QueryConstraint,
        bound: DomainBound,
    ) -> Result<SearchOutcome, SearchError> {
        let objective = match k.to_u128_saturating() {
            Some(b) => Objective::Bounded(b),
            None => Objective::Unbounded,
        };
        self.run(kb, &objective, constraint, bound)
    }

    /// An interpretation of finite cost, i.e. a model of the infinite-weight part.
    pub fn find_finite(
        &mut self,
        kb: &WeightedKB,
        constraint: &QueryConstraint,
        bound: DomainBound,
    ) -> Result<SearchOutcome, SearchError> {
        self.run(kb, &Objective::Finite, constraint, bound)
    }

    /// An interpretation violating each soft inclusion `i` at most `caps[i]`
    /// times (`None` marks infinite-weight inclusions, which must hold) and
    /// satisfying every assertion flagged in `hard_abox`.
    pub fn find_with_caps(
        &mut self,
        kb: &WeightedKB,
        caps: &[Option<u64>],
        hard_abox: &[bool],
        constraint: &QueryConstraint,
        bound: DomainBound,
    ) -> Result<SearchOutcome, SearchError> {
        assert_eq!(caps.len(), kb.tbox.len());
        assert_eq!(hard_abox.len(), kb.abox.len());
        let objective = Objective::Configured { caps: caps.to_vec(), hard_abox: hard_abox.to_vec() };
        self.run(kb, &objective, constraint, bound)
    }

    fn run(
        &mut self,
        kb: &WeightedKB,
        objective: &Objective,
        constraint: &QueryConstraint,
        bound: DomainBound,
    ) -> Result<SearchOutcome, SearchError> {
        self.stats.searches += 1;
        let (c, query) = match constraint {
            QueryConstraint::None => (Constraint::None, None),
            QueryConstraint::MustSatisfy(q) => (Constraint::Satisfy(q), Some(q)),
            QueryConstraint::MustAvoid(q) => (Constraint::Avoid(q), Some(q)),
        };
        if query.is_some_and(|q| !q.is_boolean()) {
            return Err(SearchError::NotBoolean);
        }
        let mut spent = 0;
        if self.options.relaxation && !kb.individuals().is_empty() {
            let mut enc = Encoder::new(kb, query, 0, true, self.options.prune)?;
            enc.add_kb(kb, objective);
            enc.add_constraint(&c);
            match self.solve(&mut enc, &mut spent)? {
                false => return Ok(SearchOutcome::NoneWithinBound { complete: true }),
                true => {
                    let i = enc.extract();
                    if accepts(&i, kb, objective, constraint)? {
                        return Ok(SearchOutcome::Found(i));
                    }
                }
            }
        }
        let mut enc = Encoder::new(kb, query, bound.anon_limit, false, self.options.prune)?;
        enc.add_kb(kb, objective);
        enc.add_constraint(&c);
        if self.solve(&mut enc, &mut spent)? {
            let i = enc.extract();
            if !accepts(&i, kb, objective, constraint)? {
                return Err(SearchError::Internal(format!("extracted model fails re-validation: {i}")));
            }
            debug_assert!(i.anon_count() <= bound.anon_limit.max(usize::from(enc.named_count() == 0)));
            Ok(SearchOutcome::Found(i))
        } else {
            Ok(SearchOutcome::NoneWithinBound { complete: bound.theoretical_complete })
        }
    }

    fn solve(&mut self, enc: &mut Encoder, spent: &mut u64) -> Result<bool, SearchError> {
        let remaining = self.options.node_budget.map(|n| n.saturating_sub(*spent));
        let result = match &self.options.trace {
            Some(sink) => {
                let mut guard = sink.lock().unwrap_or_else(|e| e.into_inner());
                enc.solver.solve(remaining, Some(&mut **guard))
            }
            None => enc.solver.solve(remaining, None),
        };
        let st = enc.solver.stats;
        *spent += st.decisions;
        self.stats.nodes += st.decisions;
        self.stats.conflicts += st.conflicts;
        result.map_err(|_| SearchError::BudgetExhausted(self.options.node_budget.unwrap_or(0)))
    }
}

/// Re-checks a candidate with the interpretation evaluator only.
fn accepts(
    i: &Interpretation,
    kb: &WeightedKB,
    objective: &Objective,
    constraint: &QueryConstraint,
) -> Result<bool, InterpError> {
    let cost_ok = match objective {
        Objective::Bounded(b) => cost_of(i, kb)? <= ExtendedCost::from(*b),
        Objective::Finite => cost_of(i, kb)?.is_finite(),
        Objective::Unbounded => true,
        Objective::Configured { caps, hard_abox } => {
            let mut ok = true;
            for ((tau, _), cap) in kb.tbox.iter().zip(caps) {
                ok &= violations_of_inclusion(i, tau)?.len() as u64 <= cap.unwrap_or(0);
            }
            for ((alpha, _), hard) in kb.abox.iter().zip(hard_abox) {
                ok &= !hard || satisfies_assertion(i, alpha)?;
            }
            ok
        }
    };
    Ok(cost_ok
        && match constraint {
            QueryConstraint::None => true,
            QueryConstraint::MustSatisfy(q) => satisfies_bcq(i, q)?,
            QueryConstraint::MustAvoid(q) => !satisfies_bcq(i, q)?,
        })
}

/// One-shot search with default options.
pub fn find_interpretation(
    kb: &WeightedKB,
    k: &ExtendedCost,
    constraint: &QueryConstraint,
    bound: DomainBound,
) -> Result<SearchOutcome, SearchError> {
    Searcher::default().find(kb, k, constraint, bound)
}

/// Fresh individual names for the existential variables of `q`, in variable
/// order: `_y0, _y1, …`, skipping names already used in `kb`.
pub fn extend_with_query(kb: &WeightedKB, q: &Query) -> (WeightedKB, Vec<String>) {
    let used = kb.individuals();
    let mut fresh = Vec::new();
    let mut i = 0;
    while fresh.len() < q.existential_vars().len() {
        let name = format!("_y{i}");
        if !used.contains(&name) && !q.individuals().contains(&name) {
            fresh.push(name);
        }
        i += 1;
    }
    (kb.clone(), fresh)
}

/// K^v: the KB with every atom of the ground query `q` asserted with
/// infinite weight (replacing the weight of an identical assertion).
pub fn with_query_facts(kb: &WeightedKB, q: &Query) -> WeightedKB {
    let mut out = kb.clone();
    for atom in &q.atoms {
        let ind = |t: &Term| match t {
            Term::Ind(a) => a.clone(),
            Term::Var(v) => panic!("query atom still mentions variable {v}"),
        };
        let alpha = match atom {
            Atom::Concept(c, t) => Assertion::concept(c.clone(), ind(t)),
            Atom::Role(r, s, o) => Assertion::role(r.clone(), ind(s), ind(o)),
        };
        match out.abox.iter_mut().find(|(a, _)| *a == alpha) {
            Some(entry) => entry.1 = Weight::Infinite,
            None => out.abox.push((alpha, Weight::Infinite)),
        }
    }
    out
}

/// The S-filtration with S = sub(T): anonymous elements with the same S-type
/// are merged; named elements stay apart. Concept memberships and role edges
/// are lifted to classes existentially.
pub fn filtrate(i: &Interpretation, tbox: &[(crate::kb::ConceptInclusion, Weight)]) -> Result<Interpretation, InterpError> {
    let s: Vec<_> = subconcepts(tbox).into_iter().collect();
    let exts = s.iter().map(|c| concept_extension(i, c)).collect::<Result<Vec<_>, _>>()?;
    let n = i.named().len();
    let mut classes: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut class_of = Vec::with_capacity(i.domain_size());
    for e in 0..i.domain_size() {
        if e < n {
            class_of.push(e);
            continue;
        }
        let ty: Vec<bool> = exts.iter().map(|x| x.contains(e)).collect();
        let next = n + classes.len();
        class_of.push(*classes.entry(ty).or_insert(next));
    }
    let mut j = Interpretation::new(i.named().to_vec(), classes.len())?;
    let (concepts, roles): (Vec<(String, Vec<usize>)>, Vec<(String, Vec<(usize, usize)>)>) = (
        i.concept_names().map(|(a, x)| (a.to_string(), x.iter().collect())).collect(),
        i.role_names().map(|(r, rel)| (r.to_string(), rel.pairs().collect())).collect(),
    );
    for (a, members) in concepts {
        for e in members {
            j.set_concept(&a, class_of[e], true);
        }
    }
    for (r, pairs) in roles {
        for (d, e) in pairs {
            j.set_role(&r, class_of[d], class_of[e], true);
        }
    }
    Ok(j.normalized())
}

/// Sizes of the S-type classes of the anonymous elements, for diagnostics.
pub fn anonymous_types(i: &Interpretation, tbox: &[(crate::kb::ConceptInclusion, Weight)]) -> Result<BTreeMap<Vec<bool>, usize>, InterpError> {
    let s: Vec<_> = subconcepts(tbox).into_iter().collect();
    let exts = s.iter().map(|c| concept_extension(i, c)).collect::<Result<Vec<_>, _>>()?;
    let mut out = BTreeMap::new();
    for e in i.named().len()..i.domain_size() {
        *out.entry(exts.iter().map(|x| x.contains(e)).collect()).or_insert(0) += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::visa_fixture;
    use crate::kb::{Concept, ConceptInclusion};

    fn iq(c: &str, a: &str) -> Query {
        Query::boolean(vec![Atom::concept(c, Term::ind(a))]).unwrap()
    }

    fn bound(kb: &WeightedKB) -> DomainBound {
        completeness_bound(kb, Problem::Bcs, DEFAULT_ANON_CAP)
    }

    #[test]
    fn bounds() {
        let kb = WeightedKB::new()
            .with_inclusion(Concept::name("A"), Concept::exists("R", Concept::name("B")), Weight::Infinite);
        assert_eq!(completeness_bound(&kb, Problem::Bcs, 12), DomainBound::new(8, true));
        assert_eq!(completeness_bound(&WeightedKB::new(), Problem::Possible, 12), DomainBound::new(1, true));
        assert_eq!(completeness_bound(&kb, Problem::Certain, 5), DomainBound::new(5, false));
        assert_eq!(completeness_bound(&visa_fixture(), Problem::Bcs, 12), DomainBound::new(12, false));
    }

    #[test]
    fn visa_searches() {
        let kb = visa_fixture();
        let b = bound(&kb);
        let one = find_interpretation(&kb, &ExtendedCost::fin(1), &QueryConstraint::None, b).unwrap();
        let i = one.witness().expect("cost-1 model");
        assert_eq!(cost_of(i, &kb).unwrap(), ExtendedCost::fin(1));
        assert_eq!(
            find_interpretation(&kb, &ExtendedCost::zero(), &QueryConstraint::None, b).unwrap(),
            SearchOutcome::NoneWithinBound { complete: true }
        );
        let visa_p = QueryConstraint::MustSatisfy(iq("Visa", "p"));
        let two = find_interpretation(&kb, &ExtendedCost::fin(2), &visa_p, b).unwrap();
        assert!(satisfies_bcq(two.witness().unwrap(), &iq("Visa", "p")).unwrap());
        assert!(!find_interpretation(&kb, &ExtendedCost::fin(1), &visa_p, b).unwrap().is_found());
    }

    #[test]
    fn conjunction_needs_cost_three() {
        let kb = visa_fixture();
        let q = Query::boolean(vec![
            Atom::role("hasNat", Term::ind("p"), Term::ind("c")),
            Atom::concept("Visa", Term::ind("p")),
        ])
        .unwrap();
        let c = QueryConstraint::MustSatisfy(q);
        assert!(!find_interpretation(&kb, &ExtendedCost::fin(2), &c, bound(&kb)).unwrap().is_found());
        assert!(find_interpretation(&kb, &ExtendedCost::fin(3), &c, bound(&kb)).unwrap().is_found());
    }

    #[test]
    fn anonymous_elements_are_used_when_needed() {
        // a needs an R-successor in B, but B(a) costs infinity and no other
        // individual exists
        let kb = WeightedKB::new()
            .with_inclusion(Concept::name("A"), Concept::exists("R", Concept::name("B")), Weight::Infinite)
            .with_inclusion(Concept::nominal("a"), Concept::not(Concept::name("B")), Weight::Infinite)
            .with_assertion(Assertion::concept("A", "a"), Weight::Infinite);
        let out = find_interpretation(&kb, &ExtendedCost::zero(), &QueryConstraint::None, bound(&kb)).unwrap();
        let i = out.witness().unwrap();
        assert_eq!(i.anon_count(), 1);
        let zero = DomainBound::new(0, false);
        assert_eq!(
            find_interpretation(&kb, &ExtendedCost::zero(), &QueryConstraint::None, zero).unwrap(),
            SearchOutcome::NoneWithinBound { complete: false }
        );
    }

    #[test]
    fn must_avoid() {
        let kb = WeightedKB::new()
            .with_inclusion(Concept::Top, Concept::exists("R", Concept::Top), Weight::Infinite)
            .with_assertion(Assertion::concept("A", "a"), Weight::Finite(1));
        let q = Query::boolean(vec![Atom::role("R", Term::var("x"), Term::var("x"))]).unwrap();
        // without self-loops every element needs another successor
        let out = find_interpretation(&kb, &ExtendedCost::zero(), &QueryConstraint::MustAvoid(q.clone()), bound(&kb))
            .unwrap();
        let i = out.witness().unwrap();
        assert!(!satisfies_bcq(i, &q).unwrap());
        assert!(i.domain_size() >= 2);
    }

    #[test]
    fn pruning_flag_gives_same_verdicts() {
        let kb = visa_fixture();
        for k in 0..4u64 {
            let mut a = Searcher::default();
            let mut b = Searcher::new(SearchOptions { prune: false, relaxation: false, ..Default::default() });
            let x = a.find(&kb, &ExtendedCost::fin(k), &QueryConstraint::None, DomainBound::new(2, false)).unwrap();
            let y = b.find(&kb, &ExtendedCost::fin(k), &QueryConstraint::None, DomainBound::new(2, false)).unwrap();
            assert_eq!(x.is_found(), y.is_found(), "k = {k}");
        }
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let kb = visa_fixture();
        let mut s = Searcher::new(SearchOptions { node_budget: Some(0), relaxation: false, ..Default::default() });
        let r = s.find(&kb, &ExtendedCost::fin(1), &QueryConstraint::None, DomainBound::new(3, false));
        assert_eq!(r, Err(SearchError::BudgetExhausted(0)));
    }

    #[test]
    fn trace_lines() {
        let buf: Arc<Mutex<Vec<u8>>> = Arc::default();
        struct Tee(Arc<Mutex<Vec<u8>>>);
        impl Write for Tee {
            fn write(&mut self, b: &[u8]) -> std::io::Result<usize> {
                self.0.lock().unwrap().extend_from_slice(b);
                Ok(b.len())
            }
            fn flush(&mut self) -> std::io::Result<()> {
                Ok(())
            }
        }
        let sink: TraceSink = Arc::new(Mutex::new(Box::new(Tee(buf.clone()))));
        let mut s = Searcher::new(SearchOptions { trace: Some(sink), relaxation: false, ..Default::default() });
        s.find(&visa_fixture(), &ExtendedCost::fin(1), &QueryConstraint::None, DomainBound::new(1, false)).unwrap();
        let text = String::from_utf8(buf.lock().unwrap().clone()).unwrap();
        assert!(!text.is_empty());
        for line in text.lines() {
            let parts: Vec<&str> = line.split('|').collect();
            assert_eq!(parts.len(), 3, "{line}");
            parts[0].parse::<u32>().unwrap();
            parts[2].parse::<u128>().unwrap();
        }
    }

    #[test]
    fn fresh_names() {
        let kb = visa_fixture();
        let q = Query::boolean(vec![Atom::role("hasNat", Term::ind("p"), Term::var("y"))]).unwrap();
        let (same, fresh) = extend_with_query(&kb, &q);
        assert_eq!(same, kb);
        assert_eq!(fresh, vec!["_y0"]);
        let ground = Query::boolean(vec![Atom::concept("Visa", Term::ind("p"))]).unwrap();
        assert!(extend_with_query(&kb, &ground).1.is_empty());
        let kv = with_query_facts(&kb, &ground);
        assert_eq!(kv.abox.last().unwrap(), &(Assertion::concept("Visa", "p"), Weight::Infinite));
    }

    #[test]
    fn filtration_merges_same_types() {
        let tbox = vec![(ConceptInclusion::new(Concept::name("A"), Concept::name("B")), Weight::Finite(1))];
        let mut i = Interpretation::new(vec!["a".into()], 5).unwrap();
        for e in 1..6 {
            i.add_concept("A", e).unwrap();
        }
        i.add_concept("B", 1).unwrap();
        let j = filtrate(&i, &tbox).unwrap();
        assert_eq!(j.anon_count(), 2);
        let empty = filtrate(&i, &[]).unwrap();
        assert_eq!(empty.anon_count(), 1);
        assert_eq!(anonymous_types(&i, &tbox).unwrap().len(), 2);
    }
}
