//! A small CDCL solver over clauses and weighted "budget" constraints
//! `Σ w·[s is false] ≤ bound`. Budgets take part in propagation and conflict
//! analysis through lazily computed explanation clauses.

use std::io::Write;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub(crate) struct Lit(u32);

impl Lit {
    pub const TRUE: Lit = Lit(0);
    pub const FALSE: Lit = Lit(1);

    pub fn pos(v: usize) -> Lit {
        Lit((v as u32) << 1)
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Reason {
    Decision,
    Clause(usize),
    Budget(usize),
}

struct Budget {
    bound: u128,
    /// (soft literal, weight), heaviest first
    softs: Vec<(Lit, u64)>,
    falsified: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Exhausted;

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct SolverStats {
    pub decisions: u64,
    pub conflicts: u64,
}

pub(crate) struct Solver {
    names: Vec<String>,
    value: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Reason>,
    trail_pos: Vec<usize>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    budgets: Vec<Budget>,
    /// budgets in which `!lit` is a soft literal, indexed by `lit`
    budget_occ: Vec<Vec<(usize, u64)>>,
    activity: Vec<f64>,
    var_inc: f64,
    heap: Heap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    unsat: bool,
    pub prune: bool,
    pub stats: SolverStats,
}

impl Solver {
    pub fn new() -> Self {
        let mut s = Solver {
            names: Vec::new(),
            value: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail_pos: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            clauses: Vec::new(),
            watches: Vec::new(),
            budgets: Vec::new(),
            budget_occ: Vec::new(),
            activity: Vec::new(),
            var_inc: 1.0,
            heap: Heap::default(),
            phase: Vec::new(),
            seen: Vec::new(),
            unsat: false,
            prune: true,
            stats: SolverStats::default(),
        };
        let t = s.new_var("true");
        s.assign(Lit::pos(t), Reason::Decision);
        s
    }

    pub fn num_vars(&self) -> usize {
        self.value.len()
    }

    pub fn new_var(&mut self, name: impl Into<String>) -> usize {
        let v = self.value.len();
        self.names.push(name.into());
        self.value.push(0);
        self.level.push(0);
        self.reason.push(Reason::Decision);
        self.trail_pos.push(0);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.budget_occ.push(Vec::new());
        self.budget_occ.push(Vec::new());
        self.activity.push(0.0);
        self.phase.push(false);
        self.seen.push(false);
        if v > 0 {
            self.heap.insert(v, &self.activity);
        }
        v
    }

    pub fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[l.var()];
        if l.is_neg() {
            -v
        } else {
            v
        }
    }

    pub fn model_value(&self, l: Lit) -> bool {
        self.lit_value(l) > 0
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn assign(&mut self, l: Lit, reason: Reason) {
        let v = l.var();
        debug_assert_eq!(self.value[v], 0);
        self.value[v] = if l.is_neg() { -1 } else { 1 };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail_pos[v] = self.trail.len();
        self.trail.push(l);
    }

    /// Adds a clause at level 0. Returns false once the formula is known unsat.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        debug_assert!(self.trail_lim.is_empty());
        if self.unsat {
            return false;
        }
        let mut c: Vec<Lit> = Vec::with_capacity(lits.len());
        for &l in lits {
            match self.lit_value(l) {
                1 => return true,
                -1 => continue,
                _ => {
                    if c.contains(&!l) {
                        return true;
                    }
                    if !c.contains(&l) {
                        c.push(l);
                    }
                }
            }
        }
        match c.len() {
            0 => {
                self.unsat = true;
                false
            }
            1 => {
                self.assign(c[0], Reason::Decision);
                if self.propagate().is_some() {
                    self.unsat = true;
                }
                !self.unsat
            }
            _ => {
                self.attach(c);
                true
            }
        }
    }

    fn attach(&mut self, c: Vec<Lit>) -> usize {
        let idx = self.clauses.len();
        self.watches[c[0].index()].push(idx);
        self.watches[c[1].index()].push(idx);
        self.clauses.push(c);
        idx
    }

    /// Adds the constraint `Σ w·[s false] ≤ bound` over `softs`.
    pub fn add_budget(&mut self, softs: Vec<(Lit, u64)>, bound: u128) -> bool {
        if self.unsat {
            return false;
        }
        let mut bound = bound;
        let mut kept = Vec::new();
        for (s, w) in softs {
            if w == 0 || s == Lit::TRUE {
                continue;
            }
            if s == Lit::FALSE {
                match bound.checked_sub(w as u128) {
                    Some(b) => bound = b,
                    None => {
                        self.unsat = true;
                        return false;
                    }
                }
                continue;
            }
            kept.push((s, w));
        }
        kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let b = self.budgets.len();
        let mut falsified = 0u128;
        for &(s, w) in &kept {
            self.budget_occ[(!s).index()].push((b, w));
            if self.lit_value(s) < 0 {
                falsified += w as u128;
            }
        }
        self.budgets.push(Budget { bound, softs: kept, falsified });
        if falsified > bound {
            self.unsat = true;
            return false;
        }
        if self.prune && self.propagate_budget(b).is_some() || self.propagate().is_some() {
            self.unsat = true;
        }
        !self.unsat
    }

    /// Forces every unassigned soft that no longer fits the remaining slack.
    fn propagate_budget(&mut self, b: usize) -> Option<Conflict> {
        let budget = &self.budgets[b];
        if budget.falsified > budget.bound {
            return Some(Conflict::Budget(b));
        }
        let slack = budget.bound - budget.falsified;
        let mut forced = Vec::new();
        for &(s, w) in &budget.softs {
            if (w as u128) <= slack {
                break;
            }
            if self.lit_value(s) == 0 {
                forced.push(s);
            }
        }
        for s in forced {
            if self.lit_value(s) == 0 {
                self.assign(s, Reason::Budget(b));
            }
        }
        None
    }

    fn propagate(&mut self) -> Option<Conflict> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            for i in 0..self.budget_occ[p.index()].len() {
                let (b, w) = self.budget_occ[p.index()][i];
                self.budgets[b].falsified += w as u128;
            }
            if self.prune {
                for i in 0..self.budget_occ[p.index()].len() {
                    let b = self.budget_occ[p.index()][i].0;
                    if let Some(c) = self.propagate_budget(b) {
                        return Some(c);
                    }
                }
            }
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.index()]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if self.value[first.var()] != 0 && (self.value[first.var()] > 0) != first.is_neg() {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let lv = self.value[l.var()];
                    if lv == 0 || (lv > 0) != l.is_neg() {
                        clause.swap(1, k);
                        self.watches[clause[1].index()].push(ci);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                match self.lit_value(first) {
                    0 => {
                        self.assign(first, Reason::Clause(ci));
                        i += 1;
                    }
                    _ => {
                        conflict = Some(Conflict::Clause(ci));
                        break;
                    }
                }
            }
            self.watches[false_lit.index()].extend(ws);
            // keep the watch list intact even when we stop early
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn backtrack(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let start = self.trail_lim[lvl as usize];
        for i in (start..self.trail.len()).rev() {
            let p = self.trail[i];
            let v = p.var();
            if i < self.qhead {
                for &(b, w) in &self.budget_occ[p.index()] {
                    self.budgets[b].falsified -= w as u128;
                }
            }
            self.phase[v] = !p.is_neg();
            self.value[v] = 0;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = self.qhead.min(start);
    }

    /// Clause explaining a conflict or propagation; for propagations the
    /// implied literal comes first.
    fn explain(&self, c: Conflict) -> Vec<Lit> {
        match c {
            Conflict::Clause(ci) => self.clauses[ci].clone(),
            Conflict::Budget(b) => {
                let budget = &self.budgets[b];
                let mut out = Vec::new();
                let mut sum = 0u128;
                for &(s, w) in &budget.softs {
                    if self.lit_value(s) < 0 {
                        out.push(s);
                        sum += w as u128;
                        if sum > budget.bound {
                            break;
                        }
                    }
                }
                debug_assert!(sum > budget.bound);
                out
            }
        }
    }

    fn reason_clause(&self, v: usize) -> Vec<Lit> {
        match self.reason[v] {
            Reason::Clause(ci) => {
                let mut c = self.clauses[ci].clone();
                if let Some(p) = c.iter().position(|l| l.var() == v) {
                    c.swap(0, p);
                }
                c
            }
            Reason::Budget(b) => {
                let budget = &self.budgets[b];
                let pos = self.trail_pos[v];
                let implied = budget.softs.iter().find(|(s, _)| s.var() == v).expect("implied soft");
                let mut out = vec![implied.0];
                let mut sum = implied.1 as u128;
                for &(s, w) in &budget.softs {
                    if s.var() != v && self.lit_value(s) < 0 && self.trail_pos[s.var()] < pos {
                        out.push(s);
                        sum += w as u128;
                        if sum > budget.bound {
                            break;
                        }
                    }
                }
                debug_assert!(sum > budget.bound);
                out
            }
            Reason::Decision => unreachable!("decision has no reason"),
        }
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    /// Returns the learned clause (asserting literal first) and the backjump level.
    fn analyze(&mut self, conflict: Vec<Lit>) -> (Vec<Lit>, u32) {
        let cur = self.decision_level();
        let mut learnt = vec![Lit::TRUE];
        let mut path = 0;
        let mut clause = conflict;
        let mut skip_first = false;
        let mut idx = self.trail.len();
        let p = loop {
            for (j, &l) in clause.iter().enumerate() {
                if skip_first && j == 0 {
                    continue;
                }
                let v = l.var();
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                self.seen[v] = true;
                self.bump(v);
                if self.level[v] == cur {
                    path += 1;
                } else {
                    learnt.push(l);
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let p = self.trail[idx];
            self.seen[p.var()] = false;
            path -= 1;
            if path == 0 {
                break p;
            }
            clause = self.reason_clause(p.var());
            skip_first = true;
        };
        learnt[0] = !p;
        for l in &learnt[1..] {
            self.seen[l.var()] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for j in 2..learnt.len() {
                if self.level[learnt[j].var()] > self.level[learnt[best].var()] {
                    best = j;
                }
            }
            learnt.swap(1, best);
            back = self.level[learnt[1].var()];
        }
        self.var_inc /= 0.95;
        (learnt, back)
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.value[v] == 0 {
                let l = Lit::pos(v);
                return Some(if self.phase[v] { l } else { !l });
            }
        }
        None
    }

    fn check_budgets(&self) -> Option<Conflict> {
        (0..self.budgets.len())
            .find(|&b| self.budgets[b].falsified > self.budgets[b].bound)
            .map(Conflict::Budget)
    }

    fn running_cost(&self) -> u128 {
        self.budgets.first().map_or(0, |b| b.falsified)
    }

    /// Searches for a model. `Ok(true)` means satisfiable (read values with
    /// `model_value`), `Ok(false)` unsatisfiable.
    pub fn solve(&mut self, node_budget: Option<u64>, mut trace: Option<&mut dyn Write>) -> Result<bool, Exhausted> {
        if self.unsat {
            return Ok(false);
        }
        if self.propagate().is_some() {
            self.unsat = true;
            return Ok(false);
        }
        let mut restart_idx = 1u64;
        let mut conflicts_left = luby(restart_idx) * 64;
        loop {
            let mut conflict = self.propagate();
            if conflict.is_none() && !self.prune && self.trail.len() == self.num_vars() {
                conflict = self.check_budgets();
            }
            if let Some(c) = conflict {
                self.stats.conflicts += 1;
                let clause = self.explain(c);
                let max_level = clause.iter().map(|l| self.level[l.var()]).max().unwrap_or(0);
                if max_level == 0 {
                    self.unsat = true;
                    return Ok(false);
                }
                self.backtrack(max_level);
                let (learnt, back) = self.analyze(clause);
                self.backtrack(back);
                if learnt.len() == 1 {
                    self.assign(learnt[0], Reason::Decision);
                } else {
                    let ci = self.attach(learnt.clone());
                    self.assign(learnt[0], Reason::Clause(ci));
                }
                conflicts_left = conflicts_left.saturating_sub(1);
                continue;
            }
            if conflicts_left == 0 {
                restart_idx += 1;
                conflicts_left = luby(restart_idx) * 64;
                self.backtrack(0);
                continue;
            }
            match self.pick_branch() {
                None => return Ok(true),
                Some(l) => {
                    if node_budget.is_some_and(|n| self.stats.decisions >= n) {
                        self.backtrack(0);
                        return Err(Exhausted);
                    }
                    self.stats.decisions += 1;
                    self.trail_lim.push(self.trail.len());
                    self.assign(l, Reason::Decision);
                    if let Some(out) = trace.as_deref_mut() {
                        let sign = if l.is_neg() { '-' } else { '+' };
                        let _ = writeln!(
                            out,
                            "{}|{sign}{}|{}",
                            self.decision_level(),
                            self.names[l.var()],
                            self.running_cost()
                        );
                    }
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Conflict {
    Clause(usize),
    Budget(usize),
}

fn luby(mut i: u64) -> u64 {
    // i ≥ 1
    loop {
        let mut k = 1u32;
        while (1u64 << k) - 1 < i {
            k += 1;
        }
        if (1u64 << k) - 1 == i {
            return 1u64 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}

/// Max-heap of variables keyed by activity.
#[derive(Default)]
struct Heap {
    items: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl Heap {
    fn insert(&mut self, v: usize, act: &[f64]) {
        if v >= self.pos.len() {
            self.pos.resize(v + 1, None);
        }
        if self.pos[v].is_some() {
            return;
        }
        self.items.push(v);
        self.pos[v] = Some(self.items.len() - 1);
        self.up(self.items.len() - 1, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if let Some(Some(i)) = self.pos.get(v) {
            self.up(*i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        if self.items.is_empty() {
            return None;
        }
        let top = self.items.swap_remove(0);
        self.pos[top] = None;
        if !self.items.is_empty() {
            self.pos[self.items[0]] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }

    fn less(a: usize, b: usize, act: &[f64]) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if Self::less(self.items[i], self.items[parent], act) {
                self.items.swap(i, parent);
                self.pos[self.items[i]] = Some(i);
                self.pos[self.items[parent]] = Some(parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.items.len() && Self::less(self.items[l], self.items[best], act) {
                best = l;
            }
            if r < self.items.len() && Self::less(self.items[r], self.items[best], act) {
                best = r;
            }
            if best == i {
                break;
            }
            self.items.swap(i, best);
            self.pos[self.items[i]] = Some(i);
            self.pos[self.items[best]] = Some(best);
            i = best;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(s: &mut Solver, n: usize) -> Vec<Lit> {
        (0..n).map(|i| Lit::pos(s.new_var(format!("x{i}")))).collect()
    }

    /// Pigeonhole: n+1 pigeons, n holes.
    #[test]
    fn pigeonhole_is_unsat() {
        let n = 5;
        let mut s = Solver::new();
        let x: Vec<Vec<Lit>> = (0..=n).map(|_| lits(&mut s, n)).collect();
        for p in &x {
            s.add_clause(p);
        }
        for h in 0..n {
            for a in 0..=n {
                for b in a + 1..=n {
                    s.add_clause(&[!x[a][h], !x[b][h]]);
                }
            }
        }
        assert_eq!(s.solve(None, None), Ok(false));
    }

    #[test]
    fn satisfiable_model_is_a_model() {
        let mut s = Solver::new();
        let x = lits(&mut s, 4);
        let clauses = vec![vec![x[0], x[1]], vec![!x[0], x[2]], vec![!x[2], !x[1]], vec![x[3], !x[0]]];
        for c in &clauses {
            s.add_clause(c);
        }
        assert_eq!(s.solve(None, None), Ok(true));
        for c in &clauses {
            assert!(c.iter().any(|l| s.model_value(*l)));
        }
    }

    #[test]
    fn budget_limits_falsified_weight() {
        // at least two of the three softs must be false, each weighs 2
        for (bound, sat) in [(3u128, false), (4, true)] {
            let mut s = Solver::new();
            let x = lits(&mut s, 3);
            s.add_clause(&[!x[0], !x[1]]);
            s.add_clause(&[!x[1], !x[2]]);
            s.add_clause(&[!x[0], !x[2]]);
            s.add_budget(x.iter().map(|&l| (l, 2)).collect(), bound);
            assert_eq!(s.solve(None, None), Ok(sat), "bound {bound}");
        }
    }

    #[test]
    fn budget_without_pruning_agrees() {
        for prune in [true, false] {
            let mut s = Solver::new();
            s.prune = prune;
            let x = lits(&mut s, 6);
            for i in 0..5 {
                s.add_clause(&[!x[i], !x[i + 1]]);
            }
            // a path on 6 vertices has independent sets of size 3 only
            s.add_budget(x.iter().map(|&l| (l, 1)).collect(), 3);
            assert_eq!(s.solve(None, None), Ok(true));
            let mut t = Solver::new();
            t.prune = prune;
            let y = lits(&mut t, 6);
            for i in 0..5 {
                t.add_clause(&[!y[i], !y[i + 1]]);
            }
            t.add_budget(y.iter().map(|&l| (l, 1)).collect(), 2);
            assert_eq!(t.solve(None, None), Ok(false));
        }
    }

    #[test]
    fn node_budget_is_reported() {
        let n = 7;
        let mut s = Solver::new();
        let x: Vec<Vec<Lit>> = (0..=n).map(|_| lits(&mut s, n)).collect();
        for p in &x {
            s.add_clause(p);
        }
        for h in 0..n {
            for a in 0..=n {
                for b in a + 1..=n {
                    s.add_clause(&[!x[a][h], !x[b][h]]);
                }
            }
        }
        assert_eq!(s.solve(Some(3), None), Err(Exhausted));
    }

    #[test]
    fn luby_sequence() {
        let seq: Vec<u64> = (1..=15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }
}
