//! Decision procedures: bounded-cost satisfiability, optimal cost, the four
//! entailment semantics, answer enumeration, and a second engine based on
//! k-configurations for cross-checking.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::configs::{enumerate_configurations, ConfigError};
use crate::interp::{cost_of, Interpretation};
use crate::kb::{ExtendedCost, Query, QueryError, Weight, WeightedKB};
use crate::search::{
    completeness_bound, default_anon_cap, extend_with_query, with_query_facts, DomainBound, Problem,
    QueryConstraint, SearchError, SearchOptions, SearchOutcome, SearchStats, Searcher,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Semantics {
    CertainBounded(ExtendedCost),
    PossibleBounded(ExtendedCost),
    CertainOpt,
    PossibleOpt,
}

impl Semantics {
    pub fn is_certain(&self) -> bool {
        matches!(self, Semantics::CertainBounded(_) | Semantics::CertainOpt)
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Semantics::CertainBounded(k) => write!(f, "certain-{k}"),
            Semantics::PossibleBounded(k) => write!(f, "possible-{k}"),
            Semantics::CertainOpt => f.write_str("certain-opt"),
            Semantics::PossibleOpt => f.write_str("possible-opt"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub answer: bool,
    /// False when a negative sub-result was only established within the
    /// domain bound.
    pub complete: bool,
    /// An interpretation certifying the answer (possible-yes, certain-no, BCS-yes).
    pub witness: Option<Interpretation>,
    /// The optimal cost used by the opt semantics.
    pub opt_used: Option<ExtendedCost>,
}

impl Verdict {
    fn from_outcome(out: SearchOutcome, found_means: bool) -> Self {
        match out {
            SearchOutcome::Found(i) => {
                Verdict { answer: found_means, complete: true, witness: Some(i), opt_used: None }
            }
            SearchOutcome::NoneWithinBound { complete } => {
                Verdict { answer: !found_means, complete, witness: None, opt_used: None }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonError {
    #[error("query individual `{0}` does not occur in the KB")]
    UnknownQueryIndividual(String),
    #[error("expected a Boolean query")]
    NotBoolean,
    #[error("the configuration engine needs a finite k")]
    InfiniteK,
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OptStrategy {
    #[default]
    BinarySearch,
    LinearScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    Search,
    Configurations,
}

/// Holds search options, the domain-bound policy and a cache of optimal costs.
pub struct Reasoner {
    pub searcher: Searcher,
    pub anon_cap: usize,
    /// When set, every search uses exactly this bound.
    pub bound: Option<DomainBound>,
    pub opt_strategy: OptStrategy,
    opt_cache: HashMap<WeightedKB, (ExtendedCost, bool)>,
}

impl Default for Reasoner {
    fn default() -> Self {
        Reasoner::new(SearchOptions::default())
    }
}

impl Reasoner {
    pub fn new(options: SearchOptions) -> Self {
        Reasoner {
            searcher: Searcher::new(options),
            anon_cap: default_anon_cap(),
            bound: None,
            opt_strategy: OptStrategy::default(),
            opt_cache: HashMap::new(),
        }
    }

    /// A reasoner searching exactly `anon_limit` anonymous elements.
    pub fn with_bound(bound: DomainBound) -> Self {
        let mut r = Reasoner::default();
        r.bound = Some(bound);
        r
    }

    pub fn stats(&self) -> SearchStats {
        self.searcher.stats
    }

    fn bound_for(&self, kb: &WeightedKB, problem: Problem) -> DomainBound {
        self.bound.unwrap_or_else(|| completeness_bound(kb, problem, self.anon_cap))
    }

    pub fn bcs(&mut self, kb: &WeightedKB, k: &ExtendedCost) -> Result<Verdict, ReasonError> {
        if !k.is_finite() {
            let witness = Interpretation::for_kb(kb, 0);
            return Ok(Verdict { answer: true, complete: true, witness: Some(witness), opt_used: None });
        }
        let b = self.bound_for(kb, Problem::Bcs);
        let out = self.searcher.find(kb, k, &QueryConstraint::None, b)?;
        Ok(Verdict::from_outcome(out, true))
    }

    /// The least k with a model of cost ≤ k, and whether that is final.
    pub fn optimal_cost(&mut self, kb: &WeightedKB) -> Result<(ExtendedCost, bool), ReasonError> {
        if let Some(hit) = self.opt_cache.get(kb) {
            return Ok(hit.clone());
        }
        let b = self.bound_for(kb, Problem::Bcs);
        let seed = match self.searcher.find_finite(kb, &QueryConstraint::None, b)? {
            SearchOutcome::NoneWithinBound { complete } => {
                let r = (ExtendedCost::Inf, complete);
                self.opt_cache.insert(kb.clone(), r.clone());
                return Ok(r);
            }
            SearchOutcome::Found(i) => cost_of(&i, kb).map_err(SearchError::from)?,
        };
        let upper = seed.to_u128_saturating().expect("model of the hard part has finite cost");
        let r = match self.opt_strategy {
            OptStrategy::BinarySearch => self.opt_binary(kb, upper)?,
            OptStrategy::LinearScan => self.opt_linear(kb, upper)?,
        };
        self.opt_cache.insert(kb.clone(), r.clone());
        Ok(r)
    }

    fn opt_binary(&mut self, kb: &WeightedKB, upper: u128) -> Result<(ExtendedCost, bool), ReasonError> {
        let (mut lo, mut hi) = (0u128, upper);
        let mut complete = true;
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            let v = self.bcs(kb, &ExtendedCost::from(mid))?;
            match v.witness {
                Some(i) if v.answer => {
                    let c = cost_of(&i, kb).map_err(SearchError::from)?;
                    hi = c.to_u128_saturating().expect("finite").min(mid);
                }
                _ => {
                    complete &= v.complete;
                    lo = mid + 1;
                }
            }
        }
        Ok((ExtendedCost::from(hi), complete))
    }

    fn opt_linear(&mut self, kb: &WeightedKB, upper: u128) -> Result<(ExtendedCost, bool), ReasonError> {
        let mut complete = true;
        for k in 0..upper {
            let v = self.bcs(kb, &ExtendedCost::from(k))?;
            if v.answer {
                return Ok((ExtendedCost::from(k), complete));
            }
            complete &= v.complete;
        }
        Ok((ExtendedCost::from(upper), complete))
    }

    fn check_query(kb: &WeightedKB, q: &Query) -> Result<(), ReasonError> {
        if !q.is_boolean() {
            return Err(ReasonError::NotBoolean);
        }
        q.check()?;
        let inds = kb.individuals();
        for a in q.individuals() {
            if !inds.contains(&a) {
                return Err(ReasonError::UnknownQueryIndividual(a));
            }
        }
        Ok(())
    }

    pub fn entails(&mut self, kb: &WeightedKB, q: &Query, sem: &Semantics) -> Result<Verdict, ReasonError> {
        self.entails_with(kb, q, sem, Engine::Search)
    }

    pub fn entails_with(
        &mut self,
        kb: &WeightedKB,
        q: &Query,
        sem: &Semantics,
        engine: Engine,
    ) -> Result<Verdict, ReasonError> {
        Self::check_query(kb, q)?;
        let (k, opt_complete, opt_used) = match sem {
            Semantics::CertainBounded(k) | Semantics::PossibleBounded(k) => (k.clone(), true, None),
            Semantics::CertainOpt | Semantics::PossibleOpt => {
                let (opt, complete) = match engine {
                    Engine::Search => self.optimal_cost(kb)?,
                    Engine::Configurations => self.optimal_cost_via_configurations(kb)?,
                };
                (opt.clone(), complete, Some(opt))
            }
        };
        let mut v = match (sem.is_certain(), engine) {
            (true, Engine::Search) => self.certain(kb, q, &k)?,
            (false, Engine::Search) => self.possible(kb, q, &k)?,
            (true, Engine::Configurations) => self.certain_via_configurations(kb, q, &k)?,
            (false, Engine::Configurations) => self.possible_via_configurations(kb, q, &k)?,
        };
        v.complete &= opt_complete;
        v.opt_used = opt_used;
        Ok(v)
    }

    /// No interpretation of cost ≤ k avoids q.
    fn certain(&mut self, kb: &WeightedKB, q: &Query, k: &ExtendedCost) -> Result<Verdict, ReasonError> {
        let b = self.bound_for(kb, Problem::Certain);
        let out = self.searcher.find(kb, k, &QueryConstraint::MustAvoid(q.clone()), b)?;
        let mut v = Verdict::from_outcome(out, false);
        if !v.complete {
            // vacuous truth is final when no interpretation of cost ≤ k exists at all
            let sat = self.bcs(kb, k)?;
            if !sat.answer && sat.complete {
                v.complete = true;
            }
        }
        Ok(v)
    }

    /// Some interpretation of cost ≤ k satisfies q. For finite k the
    /// existential variables are guessed: each maps to an individual or to
    /// a fresh one, and the grounded atoms become infinite-weight assertions.
    fn possible(&mut self, kb: &WeightedKB, q: &Query, k: &ExtendedCost) -> Result<Verdict, ReasonError> {
        if !k.is_finite() {
            let b = self.bound_for(kb, Problem::Possible);
            let out = self.searcher.find(kb, k, &QueryConstraint::MustSatisfy(q.clone()), b)?;
            return Ok(Verdict::from_outcome(out, true));
        }
        let (_, fresh) = extend_with_query(kb, q);
        let vars = q.existential_vars();
        let mut complete = true;
        for v in valuations(&kb.individuals(), &fresh, vars.len(), true) {
            let used = v.iter().filter(|a| fresh.contains(a)).collect::<std::collections::BTreeSet<_>>().len();
            let grounded = q.ground(|x| vars.iter().position(|y| y == x).map(|i| v[i].clone()));
            let kv = with_query_facts(kb, &grounded);
            let b = match self.bound {
                Some(b) if used > b.anon_limit => continue,
                Some(b) => DomainBound::new(b.anon_limit - used, b.theoretical_complete),
                None => completeness_bound(&kv, Problem::Possible, self.anon_cap),
            };
            match self.searcher.find(&kv, k, &QueryConstraint::None, b)? {
                SearchOutcome::Found(i) => {
                    return Ok(Verdict { answer: true, complete: true, witness: Some(i), opt_used: None })
                }
                SearchOutcome::NoneWithinBound { complete: c } => complete &= c,
            }
        }
        Ok(Verdict { answer: false, complete, witness: None, opt_used: None })
    }

    /// Verdicts for every tuple over ind(K)^n, in declaration order of the
    /// individuals; a Boolean query yields one entry with the empty tuple.
    pub fn answer_table(
        &mut self,
        kb: &WeightedKB,
        q: &Query,
        sem: &Semantics,
        engine: Engine,
    ) -> Result<Vec<(Vec<String>, Verdict)>, ReasonError> {
        q.check()?;
        let inds = kb.individuals();
        let mut out = Vec::new();
        for tuple in tuples(&inds, q.answer_vars.len()) {
            let bcq = q.instantiate(&tuple)?;
            let v = self.entails_with(kb, &bcq, sem, engine)?;
            out.push((tuple, v));
        }
        Ok(out)
    }

    fn caps_of(kb: &WeightedKB, gamma: &crate::configs::KConfiguration) -> (Vec<Option<u64>>, Vec<bool>) {
        let caps = kb
            .tbox
            .iter()
            .zip(&gamma.tbox_allowance)
            .map(|((_, w), &g)| if w.is_infinite() { None } else { Some(g) })
            .collect();
        let hard = kb
            .abox
            .iter()
            .zip(&gamma.abox_flags)
            .map(|((_, w), &f)| *w == Weight::Infinite || !f)
            .collect();
        (caps, hard)
    }

    /// Searches each k-configuration in turn; stops at the first model.
    fn over_configurations(
        &mut self,
        kb: &WeightedKB,
        k: &ExtendedCost,
        constraint: &QueryConstraint,
        problem: Problem,
    ) -> Result<SearchOutcome, ReasonError> {
        let k = k.to_u128_saturating().ok_or(ReasonError::InfiniteK)?;
        let b = self.bound_for(kb, problem);
        let mut complete = true;
        for gamma in enumerate_configurations(kb, k) {
            let (caps, hard) = Self::caps_of(kb, &gamma);
            match self.searcher.find_with_caps(kb, &caps, &hard, constraint, b)? {
                found @ SearchOutcome::Found(_) => return Ok(found),
                SearchOutcome::NoneWithinBound { complete: c } => complete &= c,
            }
        }
        Ok(SearchOutcome::NoneWithinBound { complete })
    }

    pub fn bcs_via_configurations(&mut self, kb: &WeightedKB, k: &ExtendedCost) -> Result<Verdict, ReasonError> {
        if !k.is_finite() {
            return self.bcs(kb, k);
        }
        let out = self.over_configurations(kb, k, &QueryConstraint::None, Problem::Bcs)?;
        Ok(Verdict::from_outcome(out, true))
    }

    /// Certain entailment as "every model of every K_γ satisfies q".
    pub fn entails_via_configurations(
        &mut self,
        kb: &WeightedKB,
        q: &Query,
        k: &ExtendedCost,
    ) -> Result<Verdict, ReasonError> {
        Self::check_query(kb, q)?;
        self.certain_via_configurations(kb, q, k)
    }

    fn certain_via_configurations(
        &mut self,
        kb: &WeightedKB,
        q: &Query,
        k: &ExtendedCost,
    ) -> Result<Verdict, ReasonError> {
        if !k.is_finite() {
            return self.certain(kb, q, k);
        }
        let out = self.over_configurations(kb, k, &QueryConstraint::MustAvoid(q.clone()), Problem::Certain)?;
        Ok(Verdict::from_outcome(out, false))
    }

    fn possible_via_configurations(
        &mut self,
        kb: &WeightedKB,
        q: &Query,
        k: &ExtendedCost,
    ) -> Result<Verdict, ReasonError> {
        if !k.is_finite() {
            return self.possible(kb, q, k);
        }
        let out = self.over_configurations(kb, k, &QueryConstraint::MustSatisfy(q.clone()), Problem::Possible)?;
        Ok(Verdict::from_outcome(out, true))
    }

    /// Optimal cost by scanning k = 0, 1, … with the configuration engine,
    /// up to the cost of some model of the hard part.
    pub fn optimal_cost_via_configurations(&mut self, kb: &WeightedKB) -> Result<(ExtendedCost, bool), ReasonError> {
        let b = self.bound_for(kb, Problem::Bcs);
        let upper = match self.searcher.find_finite(kb, &QueryConstraint::None, b)? {
            SearchOutcome::NoneWithinBound { complete } => return Ok((ExtendedCost::Inf, complete)),
            SearchOutcome::Found(i) => cost_of(&i, kb).map_err(SearchError::from)?,
        };
        let upper = upper.to_u128_saturating().expect("finite");
        let mut complete = true;
        for k in 0..upper {
            let v = self.bcs_via_configurations(kb, &ExtendedCost::from(k))?;
            if v.answer {
                return Ok((ExtendedCost::from(k), complete));
            }
            complete &= v.complete;
        }
        Ok((ExtendedCost::from(upper), complete))
    }
}

/// Valuations of `n` variables into `individuals ∪ fresh`. With `canonical`,
/// fresh names are introduced in order (the first fresh value used is
/// `fresh[0]`, the next new one `fresh[1]`, …), which removes renamings.
pub fn valuations(individuals: &[String], fresh: &[String], n: usize, canonical: bool) -> Vec<Vec<String>> {
    let pool: Vec<&String> = individuals.iter().chain(fresh).collect();
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(n);
    fn rec(
        pool: &[&String],
        nind: usize,
        n: usize,
        canonical: bool,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<String>>,
    ) {
        if cur.len() == n {
            out.push(cur.iter().map(|&i| pool[i].clone()).collect());
            return;
        }
        let fresh_used = cur.iter().filter(|&&i| i >= nind).map(|&i| i - nind + 1).max().unwrap_or(0);
        for i in 0..pool.len() {
            if canonical && i >= nind && i - nind > fresh_used {
                break;
            }
            cur.push(i);
            rec(pool, nind, n, canonical, cur, out);
            cur.pop();
        }
    }
    rec(&pool, individuals.len(), n, canonical, &mut cur, &mut out);
    out
}

fn tuples(inds: &[String], n: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t: Vec<String>| {
                inds.iter().map(move |a| {
                    let mut t = t.clone();
                    t.push(a.clone());
                    t
                })
            })
            .collect();
    }
    out
}

pub fn bcs(kb: &WeightedKB, k: &ExtendedCost) -> Result<Verdict, ReasonError> {
    Reasoner::default().bcs(kb, k)
}

pub fn optimal_cost(kb: &WeightedKB) -> Result<(ExtendedCost, bool), ReasonError> {
    Reasoner::default().optimal_cost(kb)
}

pub fn entails(kb: &WeightedKB, q: &Query, sem: &Semantics) -> Result<Verdict, ReasonError> {
    Reasoner::default().entails(kb, q, sem)
}

pub fn entails_via_configurations(kb: &WeightedKB, q: &Query, k: &ExtendedCost) -> Result<Verdict, ReasonError> {
    Reasoner::default().entails_via_configurations(kb, q, k)
}

/// The tuples over ind(K) whose instantiation is entailed.
pub fn answers(kb: &WeightedKB, q: &Query, sem: &Semantics) -> Result<Vec<(Vec<String>, Verdict)>, ReasonError> {
    let table = Reasoner::default().answer_table(kb, q, sem, Engine::Search)?;
    Ok(table.into_iter().filter(|(_, v)| v.answer).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::visa_fixture;
    use crate::interp::satisfies_bcq;
    use crate::kb::{Assertion, Atom, Concept, Term};
    use crate::text::parse_query;

    fn q(text: &str) -> Query {
        parse_query(text).unwrap()
    }

    fn fin(k: u64) -> ExtendedCost {
        ExtendedCost::fin(k)
    }

    #[test]
    fn visa_bcs_and_opt() {
        let kb = visa_fixture();
        let mut r = Reasoner::default();
        assert!(r.bcs(&kb, &fin(1)).unwrap().answer);
        let no = r.bcs(&kb, &fin(0)).unwrap();
        assert!(!no.answer && no.complete);
        assert!(r.bcs(&kb, &ExtendedCost::Inf).unwrap().answer);
        assert_eq!(r.optimal_cost(&kb).unwrap(), (fin(1), true));
        let mut linear = Reasoner::default();
        linear.opt_strategy = OptStrategy::LinearScan;
        assert_eq!(linear.optimal_cost(&kb).unwrap(), (fin(1), true));
    }

    #[test]
    fn visa_entailments() {
        let kb = visa_fixture();
        let mut r = Reasoner::default();
        let cases = [
            ("q() := NoVisa(p)", Semantics::CertainOpt, true),
            ("q() := Visa(p)", Semantics::PossibleOpt, false),
            ("q() := hasNat(p,b)", Semantics::PossibleOpt, true),
            ("q() := hasNat(p,c)", Semantics::PossibleOpt, true),
            ("q() := NoVisa(p)", Semantics::CertainBounded(fin(2)), false),
            ("q() := Visa(p)", Semantics::PossibleBounded(fin(2)), true),
            ("q() := hasNat(p,c), Visa(p)", Semantics::PossibleBounded(fin(2)), false),
            ("q() := hasNat(p,c), Visa(p)", Semantics::PossibleBounded(fin(3)), true),
            ("q() := NoVisa(p)", Semantics::CertainBounded(fin(1)), true),
        ];
        for (text, sem, expected) in cases {
            let v = r.entails(&kb, &q(text), &sem).unwrap();
            assert_eq!(v.answer, expected, "{text} under {sem}");
            assert!(v.complete, "{text} under {sem}");
            if let Some(w) = &v.witness {
                assert_eq!(satisfies_bcq(w, &q(text)).unwrap(), !sem.is_certain());
            }
        }
    }

    #[test]
    fn existential_possible_query() {
        let kb = visa_fixture();
        let v = entails(&kb, &q("q() := hasNat(p, ?y), Visa(?y)"), &Semantics::PossibleBounded(fin(1))).unwrap();
        assert!(v.answer);
    }

    #[test]
    fn configurations_engine_agrees() {
        let kb = visa_fixture();
        let mut r = Reasoner::default();
        let v = r.entails_via_configurations(&kb, &q("q() := NoVisa(p)"), &fin(1)).unwrap();
        assert!(v.answer);
        let v = r.entails_via_configurations(&kb, &q("q() := NoVisa(p)"), &fin(2)).unwrap();
        assert!(!v.answer);
        assert_eq!(r.optimal_cost_via_configurations(&kb).unwrap(), (fin(1), true));
    }

    #[test]
    fn unknown_query_individual() {
        let err = entails(&visa_fixture(), &q("q() := Visa(zed)"), &Semantics::CertainOpt).unwrap_err();
        assert_eq!(err, ReasonError::UnknownQueryIndividual("zed".into()));
    }

    #[test]
    fn answer_tuples() {
        let kb = visa_fixture();
        let tuples = |sem: Semantics, text: &str| -> Vec<Vec<String>> {
            answers(&kb, &q(text), &sem).unwrap().into_iter().map(|(t, _)| t).collect()
        };
        assert_eq!(tuples(Semantics::CertainOpt, "q(x) := NoVisa(x)"), vec![vec!["p".to_string()]]);
        // τ3 leaves b and c free to hold a visa in an optimal interpretation
        assert_eq!(
            tuples(Semantics::PossibleOpt, "q(x) := Visa(x)"),
            vec![vec!["b".to_string()], vec!["c".to_string()]]
        );
        let table = Reasoner::default()
            .answer_table(&kb, &q("q() := NoVisa(p)"), &Semantics::CertainOpt, Engine::Search)
            .unwrap();
        assert_eq!(table.len(), 1);
        assert!(table[0].0.is_empty() && table[0].1.answer);
    }

    #[test]
    fn opt_of_special_kbs() {
        assert_eq!(optimal_cost(&WeightedKB::new()).unwrap(), (fin(0), true));
        let bot = WeightedKB::new().with_inclusion(Concept::Top, Concept::Bot, Weight::Infinite);
        assert_eq!(optimal_cost(&bot).unwrap(), (ExtendedCost::Inf, true));
        let consistent = WeightedKB::new()
            .with_inclusion(Concept::name("A"), Concept::name("B"), Weight::Finite(3))
            .with_assertion(Assertion::concept("A", "a"), Weight::Finite(1));
        assert_eq!(optimal_cost(&consistent).unwrap(), (fin(0), true));
    }

    #[test]
    fn fresh_concept_is_certain_only_below_opt() {
        let kb = visa_fixture();
        let fresh = Query::boolean(vec![Atom::concept("B", Term::ind("b"))]).unwrap();
        for k in 0..4 {
            let v = entails(&kb, &fresh, &Semantics::CertainBounded(fin(k))).unwrap();
            assert_eq!(v.answer, k < 1, "k = {k}");
        }
    }

    #[test]
    fn valuation_counts() {
        let inds: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let fresh: Vec<String> = ["_y0", "_y1"].iter().map(|s| s.to_string()).collect();
        assert_eq!(valuations(&inds, &fresh, 2, false).len(), 25);
        // canonical: the first variable takes an individual (then 4 options) or _y0 (then 5)
        assert_eq!(valuations(&inds, &fresh, 2, true).len(), 17);
    }
}
