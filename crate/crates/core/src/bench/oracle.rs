//! Brute-force enumeration of interpretations and the definitional oracle
//! built on it.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::BenchError;
use crate::interp::{cost_of, satisfies_bcq, Interpretation};
use crate::kb::{ExtendedCost, Query, WeightedKB};
use crate::reason::Semantics;

/// Concept and role names an enumeration ranges over.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: Vec<String>,
    pub roles: Vec<String>,
}

impl Signature {
    /// Names of the KB and of the queries, sorted.
    pub fn of(kb: &WeightedKB, queries: &[Query]) -> Self {
        let mut concepts: BTreeSet<String> = kb.concept_names().into_iter().collect();
        let mut roles: BTreeSet<String> = kb.role_names().into_iter().collect();
        for q in queries {
            concepts.extend(q.concept_names());
            roles.extend(q.role_names());
        }
        Signature { concepts: concepts.into_iter().collect(), roles: roles.into_iter().collect() }
    }

    fn bits(&self, d: usize) -> usize {
        self.concepts.len() * d + self.roles.len() * d * d
    }
}

/// Number of raw assignments over `named` plus 0..=anon_limit anonymous
/// elements, before isomorphism reduction.
pub fn raw_count(named: usize, sig: &Signature, anon_limit: usize) -> BigUint {
    let start = usize::from(named == 0);
    (start..=anon_limit.max(start))
        .map(|a| BigUint::one() << sig.bits(named + a))
        .fold(BigUint::zero(), |acc, x| acc + x)
}

/// Every interpretation over `named` and up to `anon_limit` anonymous
/// elements, each isomorphism class (under permutations of the anonymous
/// elements) exactly once. With no named individuals the domain has at
/// least one anonymous element.
pub fn enumerate_interpretations(
    named: &[String],
    sig: &Signature,
    anon_limit: usize,
    budget: u64,
) -> Result<Interpretations, BenchError> {
    let count = raw_count(named.len(), sig, anon_limit);
    if count > BigUint::from(budget) {
        return Err(BenchError::BudgetExceeded(count));
    }
    let first = usize::from(named.is_empty());
    let mut it = Interpretations {
        named: named.to_vec(),
        sig: sig.clone(),
        anon: first,
        anon_limit: anon_limit.max(first),
        mask: 0,
        end: 0,
        perms: Vec::new(),
        skeleton: None,
    };
    it.start_size()?;
    Ok(it)
}

pub struct Interpretations {
    named: Vec<String>,
    sig: Signature,
    anon: usize,
    anon_limit: usize,
    mask: u64,
    end: u64,
    /// Non-identity permutations of the anonymous elements, as element maps.
    perms: Vec<Vec<usize>>,
    skeleton: Option<Interpretation>,
}

impl Interpretations {
    fn start_size(&mut self) -> Result<(), BenchError> {
        let d = self.named.len() + self.anon;
        self.mask = 0;
        self.end = 1u64 << self.sig.bits(d);
        self.perms = anon_permutations(self.named.len(), self.anon);
        self.skeleton = Some(Interpretation::new(self.named.clone(), self.anon)?);
        Ok(())
    }

    fn layout_bit(&self, d: usize, bit: usize, perm: &[usize]) -> usize {
        let nc = self.sig.concepts.len() * d;
        if bit < nc {
            let (c, e) = (bit / d, bit % d);
            c * d + perm[e]
        } else {
            let b = bit - nc;
            let (r, rest) = (b / (d * d), b % (d * d));
            let (x, y) = (rest / d, rest % d);
            nc + r * d * d + perm[x] * d + perm[y]
        }
    }

    fn is_canonical(&self, d: usize, bits: usize) -> bool {
        self.perms.iter().all(|perm| {
            let mut image = 0u64;
            for bit in 0..bits {
                if self.mask >> bit & 1 == 1 {
                    image |= 1 << self.layout_bit(d, bit, perm);
                }
            }
            image >= self.mask
        })
    }

    fn build(&mut self, d: usize) -> Interpretation {
        let i = self.skeleton.as_mut().expect("started");
        let nc = self.sig.concepts.len();
        for (c, name) in self.sig.concepts.iter().enumerate() {
            for e in 0..d {
                i.set_concept(name, e, self.mask >> (c * d + e) & 1 == 1);
            }
        }
        for (r, name) in self.sig.roles.iter().enumerate() {
            for x in 0..d {
                for y in 0..d {
                    let bit = nc * d + r * d * d + x * d + y;
                    i.set_role(name, x, y, self.mask >> bit & 1 == 1);
                }
            }
        }
        i.clone()
    }
}

impl Iterator for Interpretations {
    type Item = Interpretation;

    fn next(&mut self) -> Option<Interpretation> {
        loop {
            if self.mask >= self.end {
                if self.anon >= self.anon_limit {
                    return None;
                }
                self.anon += 1;
                self.start_size().ok()?;
                continue;
            }
            let d = self.named.len() + self.anon;
            let bits = self.sig.bits(d);
            let keep = self.is_canonical(d, bits);
            let out = keep.then(|| self.build(d));
            self.mask += 1;
            if let Some(i) = out {
                return Some(i);
            }
        }
    }
}

fn anon_permutations(named: usize, anon: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut tail: Vec<usize> = (named..named + anon).collect();
    permute(&mut tail, 0, &mut |p| {
        if p.iter().enumerate().any(|(i, &x)| x != named + i) {
            let mut full: Vec<usize> = (0..named).collect();
            full.extend_from_slice(p);
            out.push(full);
        }
    });
    out
}

fn permute(xs: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, f);
        xs.swap(k, i);
    }
}

pub const DEFAULT_ORACLE_BUDGET: u64 = 1 << 20;

/// The (cost, satisfied-queries) profile of every interpretation within the
/// bound; answers BCS, optimal cost and entailment by direct quantification.
#[derive(Debug, Clone)]
pub struct OracleTable {
    queries: Vec<Query>,
    profiles: BTreeSet<(ExtendedCost, u64)>,
}

impl OracleTable {
    pub fn build(kb: &WeightedKB, queries: &[Query], anon_limit: usize, budget: u64) -> Result<Self, BenchError> {
        assert!(queries.len() <= 64, "at most 64 queries per table");
        let named = kb.individuals();
        for q in queries {
            if !q.is_boolean() {
                return Err(BenchError::NotBoolean);
            }
            if let Some(a) = q.individuals().into_iter().find(|a| !named.contains(a)) {
                return Err(BenchError::UnknownQueryIndividual(a));
            }
        }
        let sig = Signature::of(kb, queries);
        let mut profiles = BTreeSet::new();
        for i in enumerate_interpretations(&named, &sig, anon_limit, budget)? {
            let cost = cost_of(&i, kb)?;
            let mut mask = 0u64;
            for (n, q) in queries.iter().enumerate() {
                if satisfies_bcq(&i, q)? {
                    mask |= 1 << n;
                }
            }
            profiles.insert((cost, mask));
        }
        Ok(OracleTable { queries: queries.to_vec(), profiles })
    }

    pub fn queries(&self) -> &[Query] {
        &self.queries
    }

    pub fn bcs(&self, k: &ExtendedCost) -> bool {
        self.profiles.iter().any(|(c, _)| c <= k)
    }

    pub fn opt(&self) -> ExtendedCost {
        self.profiles.iter().map(|(c, _)| c.clone()).min().unwrap_or(ExtendedCost::Inf)
    }

    /// Entailment of the `n`-th query; opt semantics at an infinite optimum
    /// range over all interpretations.
    pub fn entails(&self, n: usize, sem: &Semantics) -> bool {
        let bit = 1u64 << n;
        let opt = self.opt();
        let holds = |mask: &u64| mask & bit != 0;
        match sem {
            Semantics::CertainBounded(k) => self.profiles.iter().filter(|(c, _)| c <= k).all(|(_, m)| holds(m)),
            Semantics::PossibleBounded(k) => self.profiles.iter().filter(|(c, _)| c <= k).any(|(_, m)| holds(m)),
            Semantics::CertainOpt => self.profiles.iter().filter(|(c, _)| *c == opt).all(|(_, m)| holds(m)),
            Semantics::PossibleOpt => self.profiles.iter().filter(|(c, _)| *c == opt).any(|(_, m)| holds(m)),
        }
    }

    /// Whether the `n`-th query holds in every / some model (cost 0).
    pub fn classically_entailed(&self, n: usize) -> bool {
        self.entails(n, &Semantics::CertainBounded(ExtendedCost::zero()))
    }

    pub fn classically_satisfiable(&self, n: usize) -> bool {
        self.entails(n, &Semantics::PossibleBounded(ExtendedCost::zero()))
    }
}

pub fn oracle_bcs(kb: &WeightedKB, k: &ExtendedCost, anon_limit: usize) -> Result<bool, BenchError> {
    Ok(OracleTable::build(kb, &[], anon_limit, DEFAULT_ORACLE_BUDGET)?.bcs(k))
}

pub fn oracle_opt(kb: &WeightedKB, anon_limit: usize) -> Result<ExtendedCost, BenchError> {
    Ok(OracleTable::build(kb, &[], anon_limit, DEFAULT_ORACLE_BUDGET)?.opt())
}

pub fn oracle_entails(kb: &WeightedKB, q: &Query, sem: &Semantics, anon_limit: usize) -> Result<bool, BenchError> {
    let table = OracleTable::build(kb, std::slice::from_ref(q), anon_limit, DEFAULT_ORACLE_BUDGET)?;
    Ok(table.entails(0, sem))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::visa_fixture;
    use crate::text::parse_query;

    fn sig(c: &[&str], r: &[&str]) -> Signature {
        Signature {
            concepts: c.iter().map(|s| s.to_string()).collect(),
            roles: r.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn count(named: &[&str], s: &Signature, anon: usize) -> usize {
        let named: Vec<String> = named.iter().map(|s| s.to_string()).collect();
        enumerate_interpretations(&named, s, anon, 1 << 20).unwrap().count()
    }

    #[test]
    fn small_counts() {
        assert_eq!(count(&["a"], &sig(&["A"], &[]), 0), 2);
        assert_eq!(count(&["a"], &sig(&[], &[]), 1), 2);
        assert_eq!(count(&["a"], &sig(&["A"], &["r"]), 0), 4);
    }

    #[test]
    fn isomorphic_anonymous_elements_collapse() {
        // two anonymous elements, one concept: {}, {e}, {e, e'} up to swapping
        assert_eq!(count(&[], &sig(&["A"], &[]), 2) - count(&[], &sig(&["A"], &[]), 1), 3);
        // unlabeled digraphs with loops on 2 nodes: 10
        assert_eq!(count(&[], &sig(&[], &["r"]), 2) - count(&[], &sig(&[], &["r"]), 1), 10);
    }

    #[test]
    fn budget_reports_exact_count() {
        let named = vec!["a".to_string(), "b".to_string()];
        let err = enumerate_interpretations(&named, &sig(&["A"], &["r"]), 1, 10).err().unwrap();
        // 2^(2+4) + 2^(3+9)
        assert_eq!(err, BenchError::BudgetExceeded(BigUint::from(64u32 + 4096)));
    }

    #[test]
    fn visa_oracle() {
        let kb = visa_fixture();
        let qs: Vec<Query> = ["q() := NoVisa(p)", "q() := Visa(p)", "q() := hasNat(p,c), Visa(p)"]
            .iter()
            .map(|t| parse_query(t).unwrap())
            .collect();
        let t = OracleTable::build(&kb, &qs, 0, 1 << 20).unwrap();
        assert_eq!(t.opt(), ExtendedCost::fin(1));
        assert!(!t.bcs(&ExtendedCost::zero()));
        assert!(t.entails(0, &Semantics::CertainOpt));
        assert!(!t.entails(1, &Semantics::PossibleOpt));
        assert!(!t.entails(2, &Semantics::PossibleBounded(ExtendedCost::fin(2))));
        assert!(t.entails(2, &Semantics::PossibleBounded(ExtendedCost::fin(3))));
        assert_eq!(oracle_opt(&WeightedKB::new(), 1).unwrap(), ExtendedCost::zero());
    }
}
