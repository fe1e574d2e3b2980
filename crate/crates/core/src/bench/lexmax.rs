//! 2+2 formulas, the lexicographic-maximum reduction, and assignment
//! enumeration as its ground truth.

use std::fmt;

use rand::Rng;

use super::BenchError;
use crate::kb::{Assertion, Atom, Concept, Query, Term, Weight, WeightedKB};

/// A clause position: a variable `x_i` (1-based) or a truth constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Var(usize),
    True,
    False,
}

/// Clauses `(p1, p2, n1, n2)` read as `p1 ∨ p2 ∨ ¬n1 ∨ ¬n2`. A constant in a
/// negative position is the value of the literal itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoTwoFormula {
    n: usize,
    clauses: Vec<[Slot; 4]>,
}

impl TwoTwoFormula {
    pub fn new(n: usize, clauses: Vec<[Slot; 4]>) -> Result<Self, BenchError> {
        for c in &clauses {
            for s in c {
                if let Slot::Var(i) = *s {
                    if i == 0 || i > n {
                        return Err(BenchError::InvalidFormula(format!("variable {i} outside 1..={n}")));
                    }
                }
            }
        }
        Ok(TwoTwoFormula { n, clauses })
    }

    pub fn variable_count(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[[Slot; 4]] {
        &self.clauses
    }

    /// `nu[i - 1]` is the value of `x_i`.
    pub fn satisfied_by(&self, nu: &[bool]) -> bool {
        let value = |s: Slot| match s {
            Slot::Var(i) => nu[i - 1],
            Slot::True => true,
            Slot::False => false,
        };
        self.clauses.iter().all(|[p1, p2, n1, n2]| {
            let neg = |s: Slot| match s {
                Slot::Var(i) => !nu[i - 1],
                constant => value(constant),
            };
            value(*p1) || value(*p2) || neg(*n1) || neg(*n2)
        })
    }

    /// The lexicographically greatest model w.r.t. `(x_1, …, x_n)` with
    /// true above false.
    pub fn lexmax_model(&self) -> Option<Vec<bool>> {
        assert!(self.n < 64);
        (0u64..1 << self.n).rev().map(|bits| self.assignment(bits)).find(|nu| self.satisfied_by(nu))
    }

    fn assignment(&self, bits: u64) -> Vec<bool> {
        (0..self.n).map(|i| bits >> (self.n - 1 - i) & 1 == 1).collect()
    }

    pub fn is_satisfiable(&self) -> bool {
        self.lexmax_model().is_some()
    }

    /// Parses `n m` then one line of four slot tokens per clause (variable
    /// index, `T` or `F`); `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line, message: &str| BenchError::Parse { line, message: message.to_string() };
        let (line, header) = lines.next().ok_or_else(|| err(1, "missing `n m` header"))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(line, "header must be two numbers")))
            .collect::<Result<_, _>>()?;
        let [n, m] = nums[..] else { return Err(err(line, "header must be two numbers")) };
        let mut clauses = Vec::new();
        for (line, l) in lines {
            let slots: Vec<Slot> = l
                .split_whitespace()
                .map(|t| match t {
                    "T" => Ok(Slot::True),
                    "F" => Ok(Slot::False),
                    _ => t.parse().map(Slot::Var).map_err(|_| err(line, "slot must be an index, T or F")),
                })
                .collect::<Result<_, _>>()?;
            let clause: [Slot; 4] = slots.try_into().map_err(|_| err(line, "a clause has exactly four slots"))?;
            clauses.push(clause);
        }
        if clauses.len() != m {
            return Err(err(line, &format!("header announces {m} clauses, found {}", clauses.len())));
        }
        TwoTwoFormula::new(n, clauses)
    }

    /// Positive slots lean towards `F` so that the all-true assignment is
    /// often excluded.
    pub fn random(n: usize, m: usize, rng: &mut impl Rng) -> Self {
        let var = |rng: &mut dyn rand::RngCore| Slot::Var(rng.gen_range(1..=n));
        let positive = |rng: &mut dyn rand::RngCore| match rng.gen_range(0..20) {
            0..=6 => Slot::False,
            7 => Slot::True,
            _ => var(rng),
        };
        let negative = |rng: &mut dyn rand::RngCore| match rng.gen_range(0..20) {
            0 => Slot::True,
            1..=2 => Slot::False,
            _ => var(rng),
        };
        let clauses = (0..m).map(|_| [positive(rng), positive(rng), negative(rng), negative(rng)]).collect();
        TwoTwoFormula { n, clauses }
    }

    /// Draws until the formula is satisfiable.
    pub fn random_satisfiable(n: usize, m: usize, rng: &mut impl Rng) -> Self {
        loop {
            let f = Self::random(n, m, rng);
            if f.is_satisfiable() {
                return f;
            }
        }
    }
}

impl fmt::Display for TwoTwoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.clauses.len())?;
        for c in &self.clauses {
            let toks: Vec<String> = c
                .iter()
                .map(|s| match s {
                    Slot::Var(i) => i.to_string(),
                    Slot::True => "T".into(),
                    Slot::False => "F".into(),
                })
                .collect();
            writeln!(f, "{}", toks.join(" "))?;
        }
        Ok(())
    }
}

/// `u = max(2n, m) + 1`.
pub fn priority_base(n: usize, m: usize) -> u64 {
    (2 * n).max(m) as u64 + 1
}

/// Weight of priority level `i` (1-based): `u^(n+2-i)`.
pub fn level_weight(n: usize, m: usize, level: usize) -> u64 {
    priority_base(n, m).pow((n + 2 - level) as u32)
}

pub const TPRIME: &str = "TPrime";

/// The lexicographic-maximum reduction. `TPrime(x_k)` is entailed under
/// opt-certain and opt-possible semantics iff the lexmax model sets `x_k`.
pub fn gen_lexmax(phi: &TwoTwoFormula, k: usize) -> Result<(WeightedKB, Query), BenchError> {
    if k == 0 || k > phi.n {
        return Err(BenchError::InvalidFormula(format!("k = {k} outside 1..={}", phi.n)));
    }
    if !phi.is_satisfiable() {
        return Err(BenchError::UnsatisfiableInput);
    }
    let (n, m) = (phi.n, phi.clauses.len());
    let inf = Weight::Infinite;
    let w = |level| Weight::Finite(level_weight(n, m, level));
    let x = |i: usize| format!("x{i}");
    let (f, t) = (Concept::name("F"), Concept::name("T"));
    let mut kb = WeightedKB::new()
        .with_inclusion(Concept::and(f.clone(), t.clone()), Concept::Bot, inf)
        .with_inclusion(Concept::and(f.clone(), Concept::name(TPRIME)), Concept::Bot, inf);
    let clause_violated = [("P1", &f), ("P2", &f), ("N1", &t), ("N2", &t)]
        .into_iter()
        .map(|(r, c)| Concept::exists(r, c.clone()))
        .reduce(Concept::and)
        .expect("four conjuncts");
    kb = kb.with_inclusion(Concept::exists("S", clause_violated), Concept::Bot, inf);

    for (j, clause) in phi.clauses.iter().enumerate() {
        let c = format!("c{}", j + 1);
        kb = kb.with_assertion(Assertion::role("S", "phi", c.clone()), w(2));
        for (pos, slot) in clause.iter().enumerate() {
            let positive = pos < 2;
            let role = if positive { format!("P{}", pos + 1) } else { format!("N{}", pos - 1) };
            let target = match (*slot, positive) {
                (Slot::Var(i), _) => x(i),
                (Slot::True, true) | (Slot::False, false) => "t".to_string(),
                (Slot::False, true) | (Slot::True, false) => "f".to_string(),
            };
            kb = kb.with_assertion(Assertion::role(role, c.clone(), target), inf);
        }
    }
    for i in 1..=n {
        kb = kb
            .with_assertion(Assertion::concept("F", x(i)), w(1))
            .with_assertion(Assertion::concept("T", x(i)), w(1))
            .with_assertion(Assertion::concept(TPRIME, x(i)), w(i + 2));
    }
    kb = kb.with_assertion(Assertion::concept("F", "f"), inf).with_assertion(Assertion::concept("T", "t"), inf);
    let q = Query::boolean(vec![Atom::concept(TPRIME, Term::ind(x(k)))]).expect("one atom");
    Ok((kb, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{fragment_of, Fragment};

    fn example() -> TwoTwoFormula {
        TwoTwoFormula::new(2, vec![[Slot::Var(1), Slot::True, Slot::Var(2), Slot::False]]).unwrap()
    }

    #[test]
    fn weights_of_the_small_instance() {
        let ws: Vec<u64> = (1..=4).map(|l| level_weight(2, 1, l)).collect();
        assert_eq!(ws, vec![125, 25, 5, 1]);
        let (kb, _) = gen_lexmax(&example(), 1).unwrap();
        let weight_of = |a: Assertion| kb.abox.iter().find(|(b, _)| *b == a).unwrap().1;
        assert_eq!(weight_of(Assertion::concept("T", "x1")), Weight::Finite(125));
        assert_eq!(weight_of(Assertion::role("S", "phi", "c1")), Weight::Finite(25));
        assert_eq!(weight_of(Assertion::concept(TPRIME, "x1")), Weight::Finite(5));
        assert_eq!(weight_of(Assertion::concept(TPRIME, "x2")), Weight::Finite(1));
        assert_eq!(fragment_of(&kb.tbox), Fragment::ElBot);
    }

    #[test]
    fn lexmax_enumeration() {
        assert_eq!(example().lexmax_model(), Some(vec![true, true]));
        let only_x1_false = TwoTwoFormula::new(2, vec![[Slot::False, Slot::False, Slot::Var(1), Slot::False]]).unwrap();
        assert_eq!(only_x1_false.lexmax_model(), Some(vec![false, true]));
        let unsat = TwoTwoFormula::new(1, vec![
            [Slot::Var(1), Slot::False, Slot::False, Slot::False],
            [Slot::False, Slot::False, Slot::Var(1), Slot::False],
        ])
        .unwrap();
        assert!(!unsat.is_satisfiable());
        assert_eq!(gen_lexmax(&unsat, 1).unwrap_err(), BenchError::UnsatisfiableInput);
    }

    #[test]
    fn formula_text_round_trip() {
        let f = TwoTwoFormula::new(3, vec![[Slot::Var(1), Slot::True, Slot::Var(3), Slot::False]; 2]).unwrap();
        assert_eq!(TwoTwoFormula::parse(&f.to_string()).unwrap(), f);
        assert!(TwoTwoFormula::parse("2 1\n1 2 3\n").is_err());
        assert!(TwoTwoFormula::parse("2 1\n1 2 3 T\n").is_err());
    }
}
