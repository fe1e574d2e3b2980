//! Propositional grounding of a weighted KB over a bounded domain.
//!
//! Elements `0..n` are the named individuals; elements `n..n+L` are optional
//! anonymous elements guarded by activation literals `dom(e)`. Every concept
//! literal `C(e)` implies `dom(e)`, so inactive elements belong to nothing.

use std::collections::HashMap;

use super::solver::{Lit, Solver};
use crate::interp::{InterpError, Interpretation};
use crate::kb::{Assertion, Atom, Concept, ConceptInclusion, Query, Term, Weight, WeightedKB};

/// What the KB weights mean for one search.
#[derive(Debug, Clone)]
pub(crate) enum Objective {
    /// cost ≤ bound
    Bounded(u128),
    /// cost < ∞
    Finite,
    /// no restriction
    Unbounded,
    /// per-inclusion violation caps (`None` = hard) and per-assertion hardness
    Configured { caps: Vec<Option<u64>>, hard_abox: Vec<bool> },
}

#[derive(Debug, Clone)]
pub(crate) enum Constraint<'q> {
    None,
    Satisfy(&'q Query),
    Avoid(&'q Query),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Gate {
    And,
    Or,
}

pub(crate) struct Encoder {
    pub solver: Solver,
    named: Vec<String>,
    size: usize,
    relaxed: bool,
    dom: Vec<Lit>,
    concept_names: Vec<String>,
    role_names: Vec<String>,
    concept_vars: HashMap<(usize, usize), Lit>,
    role_vars: HashMap<(usize, usize, usize), Lit>,
    interned: HashMap<Concept, usize>,
    memo: HashMap<(usize, usize), Lit>,
    gates: HashMap<(Gate, Vec<Lit>), Lit>,
    witnesses: HashMap<(usize, usize), Lit>,
}

/// The value of `c` at every anonymous element, when it is fixed.
fn anonymous_value(c: &Concept) -> Option<bool> {
    match c {
        Concept::Nominal(_) | Concept::Bot => Some(false),
        Concept::Top => Some(true),
        Concept::Not(a) => anonymous_value(a).map(|v| !v),
        Concept::And(a, b) => match (anonymous_value(a), anonymous_value(b)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        },
        Concept::Or(a, b) => match (anonymous_value(a), anonymous_value(b)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        },
        Concept::Name(_) | Concept::Exists(..) | Concept::Forall(..) => None,
    }
}

impl Encoder {
    /// `relaxed` builds the named-only over-approximation: each existential
    /// restriction at a named element may be witnessed by an unconstrained
    /// "somewhere anonymous" literal, and anonymous violations are free.
    pub fn new(
        kb: &WeightedKB,
        extra: Option<&Query>,
        anon: usize,
        relaxed: bool,
        prune: bool,
    ) -> Result<Self, InterpError> {
        let named = kb.individuals();
        let anon = if relaxed { 0 } else if named.is_empty() { anon.max(1) } else { anon };
        let size = named.len() + anon;
        let mut concept_names = kb.concept_names();
        let mut role_names = kb.role_names();
        if let Some(q) = extra {
            for a in q.individuals() {
                if !named.contains(&a) {
                    return Err(InterpError::UnknownIndividual(a));
                }
            }
            for c in q.concept_names() {
                if !concept_names.contains(&c) {
                    concept_names.push(c);
                }
            }
            for r in q.role_names() {
                if !role_names.contains(&r) {
                    role_names.push(r);
                }
            }
        }
        let mut solver = Solver::new();
        solver.prune = prune;
        let mut dom = vec![Lit::TRUE; named.len()];
        for e in named.len()..size {
            let d = Lit::pos(solver.new_var(format!("dom(_{e})")));
            if e > named.len() {
                // canonical order: an element is used only if its predecessor is
                solver.add_clause(&[!d, dom[e - 1]]);
            } else if named.is_empty() {
                solver.add_clause(&[d]);
            }
            dom.push(d);
        }
        let mut enc = Encoder {
            solver,
            named,
            size,
            relaxed,
            dom,
            concept_names,
            role_names,
            concept_vars: HashMap::new(),
            role_vars: HashMap::new(),
            interned: HashMap::new(),
            memo: HashMap::new(),
            gates: HashMap::new(),
            witnesses: HashMap::new(),
        };
        for c in 0..enc.concept_names.len() {
            for e in 0..size {
                enc.concept_var(c, e);
            }
        }
        for r in 0..enc.role_names.len() {
            for d in 0..size {
                for e in 0..size {
                    enc.role_var(r, d, e);
                }
            }
        }
        Ok(enc)
    }

    pub fn named_count(&self) -> usize {
        self.named.len()
    }

    fn label(&self, e: usize) -> String {
        match self.named.get(e) {
            Some(a) => a.clone(),
            None => format!("_{e}"),
        }
    }

    fn concept_var(&mut self, c: usize, e: usize) -> Lit {
        if let Some(&l) = self.concept_vars.get(&(c, e)) {
            return l;
        }
        let name = format!("{}({})", self.concept_names[c], self.label(e));
        let l = Lit::pos(self.solver.new_var(name));
        let d = self.dom[e];
        self.solver.add_clause(&[!l, d]);
        self.concept_vars.insert((c, e), l);
        l
    }

    fn role_var(&mut self, r: usize, d: usize, e: usize) -> Lit {
        if let Some(&l) = self.role_vars.get(&(r, d, e)) {
            return l;
        }
        let name = format!("{}({},{})", self.role_names[r], self.label(d), self.label(e));
        let l = Lit::pos(self.solver.new_var(name));
        let (dd, de) = (self.dom[d], self.dom[e]);
        self.solver.add_clause(&[!l, dd]);
        self.solver.add_clause(&[!l, de]);
        self.role_vars.insert((r, d, e), l);
        l
    }

    fn concept_lit(&mut self, name: &str, e: usize) -> Lit {
        match self.concept_names.iter().position(|c| c == name) {
            Some(c) => self.concept_var(c, e),
            None => Lit::FALSE,
        }
    }

    fn role_lit(&mut self, name: &str, d: usize, e: usize) -> Lit {
        match self.role_names.iter().position(|r| r == name) {
            Some(r) => self.role_var(r, d, e),
            None => Lit::FALSE,
        }
    }

    fn gate(&mut self, kind: Gate, inputs: Vec<Lit>) -> Lit {
        let (absorb, unit) = match kind {
            Gate::And => (Lit::FALSE, Lit::TRUE),
            Gate::Or => (Lit::TRUE, Lit::FALSE),
        };
        let mut xs: Vec<Lit> = Vec::with_capacity(inputs.len());
        for l in inputs {
            if l == absorb {
                return absorb;
            }
            if l != unit {
                xs.push(l);
            }
        }
        xs.sort();
        xs.dedup();
        if xs.windows(2).any(|w| w[0] == !w[1]) {
            return absorb;
        }
        match xs.len() {
            0 => return unit,
            1 => return xs[0],
            _ => {}
        }
        if let Some(&g) = self.gates.get(&(kind, xs.clone())) {
            return g;
        }
        let g = Lit::pos(self.solver.new_var(format!("aux{}", self.solver.num_vars())));
        match kind {
            Gate::And => {
                for &x in &xs {
                    self.solver.add_clause(&[!g, x]);
                }
                let mut big: Vec<Lit> = xs.iter().map(|&x| !x).collect();
                big.push(g);
                self.solver.add_clause(&big);
            }
            Gate::Or => {
                for &x in &xs {
                    self.solver.add_clause(&[g, !x]);
                }
                let mut big = xs.clone();
                big.push(!g);
                self.solver.add_clause(&big);
            }
        }
        self.gates.insert((kind, xs), g);
        g
    }

    fn and2(&mut self, a: Lit, b: Lit) -> Lit {
        self.gate(Gate::And, vec![a, b])
    }

    /// The literal for `e ∈ C`.
    pub fn eval(&mut self, c: &Concept, e: usize) -> Lit {
        let next = self.interned.len();
        let id = *self.interned.entry(c.clone()).or_insert(next);
        if let Some(&l) = self.memo.get(&(id, e)) {
            return l;
        }
        let l = match c {
            Concept::Name(a) => self.concept_lit(a, e),
            Concept::Nominal(a) => {
                if self.named.get(e) == Some(a) {
                    Lit::TRUE
                } else {
                    Lit::FALSE
                }
            }
            Concept::Top => self.dom[e],
            Concept::Bot => Lit::FALSE,
            Concept::And(a, b) => {
                let (x, y) = (self.eval(a, e), self.eval(b, e));
                self.and2(x, y)
            }
            Concept::Or(a, b) => {
                let (x, y) = (self.eval(a, e), self.eval(b, e));
                self.gate(Gate::Or, vec![x, y])
            }
            Concept::Not(a) => {
                let x = self.eval(a, e);
                let d = self.dom[e];
                self.and2(d, !x)
            }
            Concept::Exists(r, d) => {
                let mut alts = Vec::with_capacity(self.size + 1);
                for f in 0..self.size {
                    let edge = self.role_lit(r, e, f);
                    if edge == Lit::FALSE {
                        continue;
                    }
                    let target = self.eval(d, f);
                    alts.push(self.and2(edge, target));
                }
                if self.relaxed && anonymous_value(d) != Some(false) {
                    let key = (id, e);
                    let w = match self.witnesses.get(&key) {
                        Some(&w) => w,
                        None => {
                            let w = Lit::pos(self.solver.new_var(format!("anon-witness({c},{})", self.label(e))));
                            self.witnesses.insert(key, w);
                            w
                        }
                    };
                    alts.push(w);
                }
                self.gate(Gate::Or, alts)
            }
            Concept::Forall(r, d) => {
                let dual = Concept::exists(r.clone(), Concept::not((**d).clone()));
                let x = self.eval(&dual, e);
                let de = self.dom[e];
                self.and2(de, !x)
            }
        };
        self.memo.insert((id, e), l);
        l
    }

    fn violation(&mut self, tau: &ConceptInclusion, e: usize) -> Lit {
        let l = self.eval(&tau.lhs, e);
        let r = self.eval(&tau.rhs, e);
        self.and2(l, !r)
    }

    fn assertion(&mut self, alpha: &Assertion) -> Lit {
        let pos = |a: &str| self.named.iter().position(|n| n == a).expect("KB individual is named");
        match alpha {
            Assertion::Concept { concept, individual } => {
                let e = pos(individual);
                self.concept_lit(concept, e)
            }
            Assertion::Role { role, subject, object } => {
                let (d, e) = (pos(subject), pos(object));
                self.role_lit(role, d, e)
            }
        }
    }

    /// Elements whose violations count: every element, or only the named ones
    /// in the relaxation.
    fn costed_elements(&self) -> usize {
        if self.relaxed {
            self.named.len()
        } else {
            self.size
        }
    }

    pub fn add_kb(&mut self, kb: &WeightedKB, objective: &Objective) {
        let n = self.costed_elements();
        let mut softs: Vec<(Lit, u64)> = Vec::new();
        for (i, (tau, w)) in kb.tbox.iter().enumerate() {
            let hard = match (objective, w) {
                (Objective::Unbounded, _) => continue,
                (Objective::Configured { caps, .. }, _) => caps[i].is_none(),
                (_, Weight::Infinite) => true,
                (Objective::Finite, Weight::Finite(_)) => continue,
                (Objective::Bounded(_), Weight::Finite(_)) => false,
            };
            let vios: Vec<Lit> = (0..n).map(|e| self.violation(tau, e)).collect();
            if hard {
                for v in vios {
                    self.solver.add_clause(&[!v]);
                }
            } else if let Objective::Configured { caps, .. } = objective {
                let cap = caps[i].expect("soft inclusion has a cap");
                let items = vios.into_iter().map(|v| (!v, 1)).collect();
                self.solver.add_budget(items, cap as u128);
            } else {
                let w = w.finite().expect("finite weight");
                softs.extend(vios.into_iter().map(|v| (!v, w)));
            }
        }
        for (i, (alpha, w)) in kb.abox.iter().enumerate() {
            let hard = match (objective, w) {
                (Objective::Unbounded, _) => continue,
                (Objective::Configured { hard_abox, .. }, _) => {
                    if hard_abox[i] {
                        true
                    } else {
                        continue;
                    }
                }
                (_, Weight::Infinite) => true,
                (Objective::Finite, Weight::Finite(_)) => continue,
                (Objective::Bounded(_), Weight::Finite(_)) => false,
            };
            let l = self.assertion(alpha);
            if hard {
                self.solver.add_clause(&[l]);
            } else {
                softs.push((l, w.finite().expect("finite weight")));
            }
        }
        if let Objective::Bounded(bound) = objective {
            self.solver.add_budget(softs, *bound);
        }
    }

    /// All matches of the atoms as conjunction literals, skipping those that
    /// are constantly false. In the relaxation only named targets are used.
    fn match_lits(&mut self, q: &Query) -> Vec<Lit> {
        let vars = q.variables();
        let range = self.costed_elements();
        let mut out = Vec::new();
        let mut assignment = vec![0usize; vars.len()];
        if range == 0 && !vars.is_empty() {
            return out;
        }
        loop {
            let value = |t: &Term, named: &[String]| match t {
                Term::Var(v) => assignment[vars.iter().position(|x| x == v).expect("variable")],
                Term::Ind(a) => named.iter().position(|n| n == a).expect("query individual is named"),
            };
            let mut conj = Vec::with_capacity(q.atoms.len());
            for atom in &q.atoms {
                let l = match atom {
                    Atom::Concept(name, t) => {
                        let e = value(t, &self.named);
                        self.concept_lit(name, e)
                    }
                    Atom::Role(name, s, o) => {
                        let (d, e) = (value(s, &self.named), value(o, &self.named));
                        self.role_lit(name, d, e)
                    }
                };
                conj.push(l);
                if l == Lit::FALSE {
                    break;
                }
            }
            let m = self.gate(Gate::And, conj);
            if m != Lit::FALSE {
                out.push(m);
            }
            // next assignment
            let mut i = 0;
            loop {
                if i == vars.len() {
                    return out;
                }
                assignment[i] += 1;
                if assignment[i] < range {
                    break;
                }
                assignment[i] = 0;
                i += 1;
            }
        }
    }

    pub fn add_constraint(&mut self, c: &Constraint) {
        match c {
            Constraint::None => {}
            Constraint::Satisfy(q) => {
                if self.relaxed && !q.variables().is_empty() {
                    return;
                }
                let ms = self.match_lits(q);
                self.solver.add_clause(&ms);
            }
            Constraint::Avoid(q) => {
                for m in self.match_lits(q) {
                    self.solver.add_clause(&[!m]);
                }
            }
        }
    }

    /// Reads the interpretation off a satisfying assignment. Inactive
    /// anonymous elements are dropped.
    pub fn extract(&self) -> Interpretation {
        let n = self.named.len();
        let active: Vec<usize> = (0..self.size).filter(|&e| self.solver.model_value(self.dom[e])).collect();
        let index: HashMap<usize, usize> = active.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut i = Interpretation::new(self.named.clone(), active.len() - n).expect("non-empty domain");
        for (&(c, e), &l) in &self.concept_vars {
            if self.solver.model_value(l) {
                i.set_concept(&self.concept_names[c], index[&e], true);
            }
        }
        for (&(r, d, e), &l) in &self.role_vars {
            if self.solver.model_value(l) {
                i.set_role(&self.role_names[r], index[&d], index[&e], true);
            }
        }
        i.normalized()
    }
}
