use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Weight attached to an axiom or assertion.
///
/// `Finite(0)` is representable so that hand-built KBs can be diagnosed by
/// [`validate`](super::validate); the parser never produces it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Weight {
    Finite(u64),
    Infinite,
}

impl Weight {
    pub fn is_infinite(self) -> bool {
        matches!(self, Weight::Infinite)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Weight::Finite(w) => Some(w),
            Weight::Infinite => None,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(w) => write!(f, "{w}"),
            Weight::Infinite => f.write_str("inf"),
        }
    }
}

/// A cost in ℕ ∪ {∞}. Finite values never overflow.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtendedCost {
    Fin(BigUint),
    Inf,
}

impl ExtendedCost {
    pub fn zero() -> Self {
        ExtendedCost::Fin(BigUint::zero())
    }

    pub fn fin(n: u64) -> Self {
        ExtendedCost::Fin(BigUint::from(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedCost::Fin(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtendedCost::Fin(n) if n.is_zero())
    }

    pub fn as_big(&self) -> Option<&BigUint> {
        match self {
            ExtendedCost::Fin(n) => Some(n),
            ExtendedCost::Inf => None,
        }
    }

    /// The finite value as `u128`, saturating at `u128::MAX`.
    pub fn to_u128_saturating(&self) -> Option<u128> {
        self.as_big().map(|n| n.to_u128().unwrap_or(u128::MAX))
    }
}

impl Default for ExtendedCost {
    fn default() -> Self {
        ExtendedCost::zero()
    }
}

impl From<u64> for ExtendedCost {
    fn from(n: u64) -> Self {
        ExtendedCost::fin(n)
    }
}

impl From<u128> for ExtendedCost {
    fn from(n: u128) -> Self {
        ExtendedCost::Fin(BigUint::from(n))
    }
}

impl PartialOrd for ExtendedCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedCost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedCost::Fin(a), ExtendedCost::Fin(b)) => a.cmp(b),
            (ExtendedCost::Fin(_), ExtendedCost::Inf) => Ordering::Less,
            (ExtendedCost::Inf, ExtendedCost::Fin(_)) => Ordering::Greater,
            (ExtendedCost::Inf, ExtendedCost::Inf) => Ordering::Equal,
        }
    }
}

impl Add for ExtendedCost {
    type Output = ExtendedCost;

    fn add(self, rhs: ExtendedCost) -> ExtendedCost {
        cost_add(&self, &rhs)
    }
}

impl fmt::Display for ExtendedCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedCost::Fin(n) => write!(f, "{n}"),
            ExtendedCost::Inf => f.write_str("inf"),
        }
    }
}

/// Accepts `inf` or a decimal numeral of any length.
impl std::str::FromStr for ExtendedCost {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "inf" {
            return Ok(ExtendedCost::Inf);
        }
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("`{s}` is neither `inf` nor a non-negative integer"));
        }
        Ok(ExtendedCost::Fin(s.parse().expect("digits")))
    }
}

impl Serialize for ExtendedCost {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedCost::Fin(n) => match n.to_u64() {
                Some(small) => serializer.serialize_u64(small),
                None => serializer.serialize_str(&n.to_string()),
            },
            ExtendedCost::Inf => serializer.serialize_str("inf"),
        }
    }
}

/// Saturating addition: anything plus `Inf` is `Inf`.
pub fn cost_add(a: &ExtendedCost, b: &ExtendedCost) -> ExtendedCost {
    match (a, b) {
        (ExtendedCost::Fin(x), ExtendedCost::Fin(y)) => ExtendedCost::Fin(x + y),
        _ => ExtendedCost::Inf,
    }
}

/// `w * n`, where an infinite weight times zero violations contributes nothing.
pub fn cost_scale(w: Weight, n: u64) -> ExtendedCost {
    match w {
        _ if n == 0 => ExtendedCost::zero(),
        Weight::Finite(w) => ExtendedCost::Fin(BigUint::from(w) * BigUint::from(n)),
        Weight::Infinite => ExtendedCost::Inf,
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn parse_costs() {
        use super::ExtendedCost;
        assert_eq!("inf".parse::<ExtendedCost>(), Ok(ExtendedCost::Inf));
        assert_eq!("12".parse::<ExtendedCost>(), Ok(ExtendedCost::fin(12)));
        let huge: ExtendedCost = "340282366920938463463374607431768211456".parse().unwrap();
        assert_eq!(huge.to_u128_saturating(), Some(u128::MAX));
        assert!("-1".parse::<ExtendedCost>().is_err());
        assert!("".parse::<ExtendedCost>().is_err());
    }

    use super::*;

    #[test]
    fn scaling_infinite_weight() {
        assert_eq!(cost_scale(Weight::Infinite, 0), ExtendedCost::zero());
        assert_eq!(cost_scale(Weight::Infinite, 2), ExtendedCost::Inf);
        assert_eq!(cost_scale(Weight::Finite(7), 0), ExtendedCost::zero());
        assert_eq!(cost_scale(Weight::Finite(7), 3), ExtendedCost::fin(21));
    }

    #[test]
    fn addition_saturates() {
        assert_eq!(cost_add(&ExtendedCost::fin(1), &ExtendedCost::fin(2)), ExtendedCost::fin(3));
        assert_eq!(cost_add(&ExtendedCost::fin(1), &ExtendedCost::Inf), ExtendedCost::Inf);
        assert_eq!(ExtendedCost::Inf + ExtendedCost::Inf, ExtendedCost::Inf);
    }

    #[test]
    fn no_silent_overflow() {
        let big = cost_scale(Weight::Finite(u64::MAX), u64::MAX);
        let sum = cost_add(&big, &big);
        let expected = BigUint::from(u64::MAX) * BigUint::from(u64::MAX) * 2u32;
        assert_eq!(sum, ExtendedCost::Fin(expected));
        assert!(sum < ExtendedCost::Inf);
    }

    #[test]
    fn ordering() {
        assert!(ExtendedCost::fin(3) < ExtendedCost::fin(4));
        assert!(ExtendedCost::fin(u64::MAX) < ExtendedCost::Inf);
        assert_eq!(ExtendedCost::fin(5).to_u128_saturating(), Some(5));
        assert_eq!(ExtendedCost::Inf.to_u128_saturating(), None);
    }
}
