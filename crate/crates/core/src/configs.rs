//! k-configurations: distributions of a cost budget over inclusions (any
//! number of violations) and assertions (violated or not), and the hard KB
//! with violation caps that a configuration induces.

use thiserror::Error;

use crate::interp::{cost_of, satisfies_assertion, violations_of_inclusion, InterpError, Interpretation};
use crate::kb::{Assertion, ConceptInclusion, ExtendedCost, Weight, WeightedKB};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("configuration covers {got} of {expected} {what}")]
    MissingEntry { what: &'static str, expected: usize, got: usize },
    #[error("the interpretation has infinite cost")]
    InfiniteCost,
    #[error(transparent)]
    Interp(#[from] InterpError),
}

/// Allowances aligned with the KB: `tbox_allowance[i]` bounds the violations
/// of `kb.tbox[i]`, `abox_flags[j]` says whether `kb.abox[j]` may be violated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KConfiguration {
    pub tbox_allowance: Vec<u64>,
    pub abox_flags: Vec<bool>,
    pub budget: u128,
}

impl KConfiguration {
    pub fn zero(kb: &WeightedKB, budget: u128) -> Self {
        KConfiguration { tbox_allowance: vec![0; kb.tbox.len()], abox_flags: vec![false; kb.abox.len()], budget }
    }

    /// Σ γ(χ)·ω_χ, infinite when an infinite-weight item gets a positive allowance.
    pub fn weighted_sum(&self, kb: &WeightedKB) -> ExtendedCost {
        let tbox = self.tbox_allowance.iter().zip(&kb.tbox).map(|(&g, (_, w))| (g, *w));
        let abox = self.abox_flags.iter().zip(&kb.abox).map(|(&f, (_, w))| (u64::from(f), *w));
        tbox.chain(abox).fold(ExtendedCost::zero(), |acc, (g, w)| acc + crate::kb::cost_scale(w, g))
    }

    fn check_shape(&self, kb: &WeightedKB) -> Result<(), ConfigError> {
        if self.tbox_allowance.len() != kb.tbox.len() {
            return Err(ConfigError::MissingEntry {
                what: "inclusions",
                expected: kb.tbox.len(),
                got: self.tbox_allowance.len(),
            });
        }
        if self.abox_flags.len() != kb.abox.len() {
            return Err(ConfigError::MissingEntry {
                what: "assertions",
                expected: kb.abox.len(),
                got: self.abox_flags.len(),
            });
        }
        Ok(())
    }
}

/// The hard KB K_γ: `hard` holds every inclusion and assertion that must be
/// satisfied outright (all with infinite weight); `caps` bounds the number
/// of violations of each finite-weight inclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfiguredKB {
    pub hard: WeightedKB,
    pub caps: Vec<(ConceptInclusion, u64)>,
}

pub fn is_valid_configuration(kb: &WeightedKB, gamma: &KConfiguration, k: u128) -> Result<bool, ConfigError> {
    gamma.check_shape(kb)?;
    Ok(gamma.weighted_sum(kb) <= ExtendedCost::from(k))
}

/// Every valid k-configuration, once each, in lexicographic order of the
/// allowance vector (inclusions first, then assertions, as declared).
pub fn enumerate_configurations(kb: &WeightedKB, k: u128) -> Configurations {
    let weights: Vec<Option<u64>> =
        kb.tbox.iter().map(|(_, w)| *w).chain(kb.abox.iter().map(|(_, w)| *w)).map(Weight::finite).collect();
    let caps = weights
        .iter()
        .enumerate()
        .map(|(i, w)| match w {
            None => 0,
            Some(w) => {
                let most = k / *w as u128;
                if i >= kb.tbox.len() {
                    most.min(1)
                } else {
                    most
                }
            }
        })
        .collect();
    Configurations {
        tbox_len: kb.tbox.len(),
        weights: weights.into_iter().map(|w| w.unwrap_or(0) as u128).collect(),
        caps,
        budget: k,
        current: None,
        done: false,
    }
}

pub struct Configurations {
    tbox_len: usize,
    weights: Vec<u128>,
    caps: Vec<u128>,
    budget: u128,
    current: Option<Vec<u128>>,
    done: bool,
}

impl Configurations {
    fn emit(&self, v: &[u128]) -> KConfiguration {
        KConfiguration {
            tbox_allowance: v[..self.tbox_len].iter().map(|&g| g as u64).collect(),
            abox_flags: v[self.tbox_len..].iter().map(|&g| g == 1).collect(),
            budget: self.budget,
        }
    }
}

impl Iterator for Configurations {
    type Item = KConfiguration;

    fn next(&mut self) -> Option<KConfiguration> {
        if self.done {
            return None;
        }
        let Some(v) = self.current.as_mut() else {
            let zero = vec![0; self.weights.len()];
            let out = self.emit(&zero);
            self.current = Some(zero);
            return Some(out);
        };
        let n = v.len();
        let prefix_cost = |v: &[u128], i: usize| -> u128 { (0..i).map(|j| v[j] * self.weights[j]).sum() };
        for i in (0..n).rev() {
            let next = v[i] + 1;
            if next <= self.caps[i] && prefix_cost(v, i) + next * self.weights[i] <= self.budget {
                v[i] = next;
                v[i + 1..].iter_mut().for_each(|x| *x = 0);
                let snapshot = v.clone();
                return Some(self.emit(&snapshot));
            }
        }
        self.done = true;
        None
    }
}

pub fn config_kb(kb: &WeightedKB, gamma: &KConfiguration) -> Result<ConfiguredKB, ConfigError> {
    gamma.check_shape(kb)?;
    let mut hard = WeightedKB::new();
    let mut caps = Vec::new();
    for ((tau, w), &g) in kb.tbox.iter().zip(&gamma.tbox_allowance) {
        if w.is_infinite() {
            hard.tbox.push((tau.clone(), Weight::Infinite));
        } else {
            caps.push((tau.clone(), g));
        }
    }
    for ((alpha, w), &flag) in kb.abox.iter().zip(&gamma.abox_flags) {
        if w.is_infinite() || !flag {
            hard.abox.push((alpha.clone(), Weight::Infinite));
        }
    }
    Ok(ConfiguredKB { hard, caps })
}

/// |vio_τ(I)| ≤ γ(τ) for every inclusion, and every assertion with γ = 0 holds.
pub fn interpretation_satisfies_config(
    i: &Interpretation,
    kb: &WeightedKB,
    gamma: &KConfiguration,
) -> Result<bool, ConfigError> {
    gamma.check_shape(kb)?;
    for ((tau, _), &g) in kb.tbox.iter().zip(&gamma.tbox_allowance) {
        if violations_of_inclusion(i, tau)?.len() as u64 > g {
            return Ok(false);
        }
    }
    for ((alpha, _), &flag) in kb.abox.iter().zip(&gamma.abox_flags) {
        if !flag && !satisfies_assertion(i, alpha)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// I ⊨ K_γ: the hard part holds and every cap is respected.
pub fn satisfies_configured_kb(i: &Interpretation, ckb: &ConfiguredKB) -> Result<bool, ConfigError> {
    if !cost_of(i, &ckb.hard)?.is_zero() {
        return Ok(false);
    }
    for (tau, cap) in &ckb.caps {
        if violations_of_inclusion(i, tau)?.len() as u64 > *cap {
            return Ok(false);
        }
    }
    Ok(true)
}

/// γ(τ) = |vio_τ(I)|, γ(α) = [I ⊭ α], with budget equal to the cost of I.
pub fn minimal_configuration_of(
    i: &Interpretation,
    kb: &WeightedKB,
) -> Result<(KConfiguration, ExtendedCost), ConfigError> {
    let cost = cost_of(i, kb)?;
    let budget = cost.to_u128_saturating().ok_or(ConfigError::InfiniteCost)?;
    let mut gamma = KConfiguration::zero(kb, budget);
    for (g, (tau, _)) in gamma.tbox_allowance.iter_mut().zip(&kb.tbox) {
        *g = violations_of_inclusion(i, tau)?.len() as u64;
    }
    for (f, (alpha, _)) in gamma.abox_flags.iter_mut().zip(&kb.abox) {
        *f = !satisfies_assertion(i, alpha)?;
    }
    Ok((gamma, cost))
}

/// The allowance of a single assertion, for readable tests and output.
pub fn abox_flag(kb: &WeightedKB, gamma: &KConfiguration, alpha: &Assertion) -> Option<bool> {
    kb.abox.iter().position(|(a, _)| a == alpha).map(|j| gamma.abox_flags[j])
}
