//! Graphs, the 3-colorability and maximum-independent-set reductions, and
//! combinatorial solvers for both.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use super::BenchError;
use crate::kb::{Assertion, Atom, Concept, Query, Term, Weight, WeightedKB};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Edges are stored as `(u, v)` with `u < v`, in the given order.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, BenchError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(BenchError::InvalidGraph(format!("self-loop on {u}")));
            }
            if u >= n || v >= n {
                return Err(BenchError::InvalidGraph(format!("edge {u}-{v} out of range for {n} vertices")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(BenchError::InvalidGraph(format!("duplicate edge {}-{}", e.0, e.1)));
            }
            out.push(e);
        }
        Ok(Graph { n, edges: out })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::new(n, edges).expect("complete graph is simple")
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|v| (v - 1, v))).expect("path is simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn adjacency(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.n];
        for &(u, v) in &self.edges {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        adj
    }

    /// Parses `n` followed by one `u v` line per edge; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line, message: &str| BenchError::Parse { line, message: message.to_string() };
        let (line, first) = lines.next().ok_or_else(|| err(1, "missing vertex count"))?;
        let n = first.parse().map_err(|_| err(line, "vertex count must be a number"))?;
        let mut edges = Vec::new();
        for (line, l) in lines {
            let nums: Vec<&str> = l.split_whitespace().collect();
            match nums.as_slice() {
                [u, v] => {
                    let u = u.parse().map_err(|_| err(line, "vertex must be a number"))?;
                    let v = v.parse().map_err(|_| err(line, "vertex must be a number"))?;
                    edges.push((u, v));
                }
                _ => return Err(err(line, "expected `u v`")),
            }
        }
        Graph::new(n, edges)
    }

    pub fn random(n: usize, p: f64, rng: &mut impl Rng) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Graph { n, edges }
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for (u, v) in &self.edges {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

/// One representative per isomorphism class of graphs on `n` vertices
/// (n ≤ 7); graphs with isolated vertices stand for the smaller ones.
pub fn all_graphs_up_to_isomorphism(n: usize) -> Vec<Graph> {
    assert!(n <= 7, "exhaustive generation is limited to 7 vertices");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut index = vec![vec![0usize; n]; n];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        index[u][v] = i;
        index[v][u] = i;
    }
    let mut perms = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    heap_permutations(&mut p, n, &mut perms);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let canon = perms
            .iter()
            .map(|perm| {
                let mut image = 0u64;
                for (i, &(u, v)) in pairs.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        image |= 1 << index[perm[u]][perm[v]];
                    }
                }
                image
            })
            .min()
            .unwrap_or(mask);
        if seen.insert(canon) {
            let edges = pairs.iter().enumerate().filter(|(i, _)| canon >> i & 1 == 1).map(|(_, &e)| e);
            out.push(Graph::new(n, edges).expect("generated graph is simple"));
        }
    }
    out
}

fn heap_permutations(p: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(p, k - 1, out);
        if k % 2 == 0 {
            p.swap(i, k - 1);
        } else {
            p.swap(0, k - 1);
        }
    }
}

/// Backtracking 3-coloring, vertices in index order.
pub fn three_coloring(g: &Graph) -> Option<Vec<u8>> {
    let adj = g.adjacency();
    let mut colors = vec![u8::MAX; g.n];
    fn go(v: usize, adj: &[u64], colors: &mut Vec<u8>) -> bool {
        if v == colors.len() {
            return true;
        }
        for c in 0..3u8 {
            let clash = (0..v).any(|u| adj[v] >> u & 1 == 1 && colors[u] == c);
            if !clash {
                colors[v] = c;
                if go(v + 1, adj, colors) {
                    return true;
                }
            }
        }
        colors[v] = u8::MAX;
        false
    }
    go(0, &adj, &mut colors).then_some(colors)
}

pub fn is_three_colorable(g: &Graph) -> bool {
    three_coloring(g).is_some()
}

/// All maximum independent sets as vertex bitmasks, by subset enumeration.
pub fn maximum_independent_sets(g: &Graph) -> Vec<u64> {
    assert!(g.n < 64);
    let adj = g.adjacency();
    let independent = |s: u64| (0..g.n).all(|v| s >> v & 1 == 0 || adj[v] & s == 0);
    let all: Vec<u64> = (0u64..1 << g.n).filter(|&s| independent(s)).collect();
    let best = all.iter().map(|s| s.count_ones()).max().unwrap_or(0);
    all.into_iter().filter(|s| s.count_ones() == best).collect()
}

pub fn in_every_maximum_independent_set(g: &Graph, w: usize) -> bool {
    maximum_independent_sets(g).iter().all(|s| s >> w & 1 == 1)
}

pub fn vertex_name(v: usize) -> String {
    format!("v{v}")
}

/// The 3-colorability reduction: the KB is 3-satisfiable iff `g` is
/// 3-colorable. Returns the KB and the bound 3.
pub fn gen_3col(g: &Graph) -> (WeightedKB, u64) {
    let inf = Weight::Infinite;
    let mut kb = WeightedKB::new();
    for i in 1..=3 {
        let ci = Concept::exists("R", Concept::name(format!("C{i}")));
        let lhs = Concept::and(ci.clone(), Concept::exists("E", ci));
        kb = kb.with_inclusion(lhs, Concept::name("B"), inf);
    }
    kb = kb
        .with_inclusion(Concept::name("A"), Concept::exists("R", Concept::name("B")), inf)
        .with_inclusion(Concept::name("B"), Concept::Bot, Weight::Finite(1));
    for v in 0..g.n {
        kb = kb.with_assertion(Assertion::concept("A", vertex_name(v)), inf);
    }
    for &(u, v) in &g.edges {
        kb = kb.with_assertion(Assertion::role("E", vertex_name(u), vertex_name(v)), inf);
    }
    for i in 1..=3 {
        kb = kb.with_assertion(Assertion::concept(format!("C{i}"), format!("c{i}")), inf);
    }
    for i in 1..=3 {
        kb = kb.with_assertion(Assertion::concept("B", format!("c{i}")), inf);
    }
    (kb, 3)
}

/// The maximum-independent-set reduction for vertex `w`: `Goal(w)` is
/// entailed under opt-certain semantics iff `w` is in every maximum
/// independent set, and `NoGoal(w)` under opt-possible semantics iff some
/// maximum independent set excludes `w`.
pub fn gen_independent_set(g: &Graph, w: usize) -> Result<WeightedKB, BenchError> {
    if w >= g.n {
        return Err(BenchError::InvalidGraph(format!("vertex {w} out of range for {} vertices", g.n)));
    }
    let inf = Weight::Infinite;
    let mut kb = WeightedKB::new();
    for i in 1..=2 {
        let in_i = Concept::name(format!("In{i}"));
        kb = kb.with_inclusion(Concept::and(in_i.clone(), Concept::exists("Edge", in_i)), Concept::Bot, inf);
    }
    for i in 1..=2 {
        let lhs = Concept::and(Concept::name(format!("In{i}")), Concept::name("Distinguish"));
        kb = kb.with_inclusion(lhs, Concept::name("Goal"), inf);
    }
    kb = kb.with_inclusion(Concept::and(Concept::name("Goal"), Concept::name("NoGoal")), Concept::Bot, inf);
    for v in 0..g.n {
        for i in 1..=2 {
            kb = kb.with_assertion(Assertion::concept(format!("In{i}"), vertex_name(v)), Weight::Finite(1));
        }
    }
    for &(u, v) in &g.edges {
        kb = kb.with_assertion(Assertion::role("Edge", vertex_name(u), vertex_name(v)), inf);
    }
    kb = kb
        .with_assertion(Assertion::concept("Distinguish", vertex_name(w)), inf)
        .with_assertion(Assertion::concept("NoGoal", vertex_name(w)), Weight::Finite(1));
    Ok(kb)
}

pub fn goal_query(w: usize) -> Query {
    Query::boolean(vec![Atom::concept("Goal", Term::ind(vertex_name(w)))]).expect("one atom")
}

pub fn no_goal_query(w: usize) -> Query {
    Query::boolean(vec![Atom::concept("NoGoal", Term::ind(vertex_name(w)))]).expect("one atom")
}
