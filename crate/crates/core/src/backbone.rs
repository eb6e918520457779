//! The degree-4-bounded spanning Eulerian subgraph `H` of `2G` and its Euler
//! orientation.
//!
//! `H` is a degree-3-bounded 1-tree `τ` (bounds `b ≡ 2`) plus a parity
//! matching that fixes the odd degrees of `τ`. Its weight is at most 1.5
//! times an optimal tour, negative weights included.

use std::fmt;


use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Instance, Vertex};
use crate::onetree::{min_bounded_one_tree, OneTree};
use crate::parity::{solve_parity_bmatching, ParityEdge, ParitySpec};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeSource {
    Tree,
    Matching,
}

impl fmt::Display for EdgeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeSource::Tree => "tree",
            EdgeSource::Matching => "matching",
        })
    }
}

/// One edge instance of `H`. A pair used twice appears as two edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackboneEdge {
    pub id: usize,
    pub u: Vertex,
    pub v: Vertex,
    pub weight: Rational,
    pub source: EdgeSource,
}

impl BackboneEdge {
    pub fn other(&self, x: Vertex) -> Vertex {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn pair(&self) -> (Vertex, Vertex) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerianBackbone {
    n: usize,
    edges: Vec<BackboneEdge>,
}

impl EulerianBackbone {
    /// Builds `H` from an edge list with ids in list order, then checks its
    /// invariants.
    pub fn from_edges(inst: &Instance, edges: &[(Vertex, Vertex, EdgeSource)]) -> Result<Self> {
        let n = inst.n();
        let mut list = Vec::with_capacity(edges.len());
        for (id, &(u, v, source)) in edges.iter().enumerate() {
            if u == v || u >= n || v >= n {
                return Err(Error::Domain(format!("bad backbone edge ({u},{v})")));
            }
            list.push(BackboneEdge { id, u, v, weight: inst.weight(u, v).clone(), source });
        }
        let h = EulerianBackbone { n, edges: list };
        h.validate()?;
        Ok(h)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[BackboneEdge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &BackboneEdge {
        &self.edges[id]
    }

    pub fn weight(&self) -> Rational {
        self.edges.iter().map(|e| &e.weight).sum()
    }

    pub fn source_weight(&self, source: EdgeSource) -> Rational {
        self.edges.iter().filter(|e| e.source == source).map(|e| &e.weight).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.edges {
            d[e.u] += 1;
            d[e.v] += 1;
        }
        d
    }

    /// Spanning, connected, every degree even and at most 4, each pair used
    /// at most twice.
    pub fn validate(&self) -> Result<()> {
        for (v, d) in self.degrees().into_iter().enumerate() {
            if d == 0 || d % 2 == 1 || d > 4 {
                return Err(Error::invariant(format!("backbone vertex {v} has degree {d}")));
            }
        }
        let mut pairs: Vec<_> = self.edges.iter().map(|e| e.pair()).collect();
        pairs.sort_unstable();
        if let Some(w) = pairs.windows(3).find(|w| w[0] == w[2]) {
            return Err(Error::invariant(format!("backbone uses pair {:?} more than twice", w[0])));
        }
        if !connected(self.n, self.edges.iter().map(|e| (e.u, e.v))) {
            return Err(Error::invariant("backbone is not connected"));
        }
        Ok(())
    }
}

fn connected(n: usize, edges: impl Iterator<Item = (Vertex, Vertex)>) -> bool {
    let mut adj = vec![Vec::new(); n];
    for (u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// A random backbone-shaped graph: edge-disjoint cycles (length 2 means a
/// doubled pair) glued at vertices, with every degree 2 or 4. Used to drive
/// the later stages with more branching than real backbones of small
/// instances have. The first cycle's edges are labelled `Tree`, the rest
/// `Matching`.
pub fn random_backbone(inst: &Instance, seed: u64) -> Result<EulerianBackbone> {
    let n = inst.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut deg = vec![0usize; n];
    let mut uses = std::collections::BTreeMap::<(Vertex, Vertex), usize>::new();
    let mut edges: Vec<(Vertex, Vertex, EdgeSource)> = Vec::new();
    let mut add_cycle = |cycle: &[Vertex], source: EdgeSource, deg: &mut Vec<usize>| {
        let k = cycle.len();
        let pairs: Vec<(Vertex, Vertex)> = (0..k).map(|i| (cycle[i], cycle[(i + 1) % k])).collect();
        let mut extra = std::collections::BTreeMap::<(Vertex, Vertex), usize>::new();
        for &(a, b) in &pairs {
            *extra.entry((a.min(b), a.max(b))).or_default() += 1;
        }
        if extra.iter().any(|(p, c)| uses.get(p).copied().unwrap_or(0) + c > 2) {
            return false;
        }
        for (p, c) in extra {
            *uses.entry(p).or_default() += c;
        }
        for (a, b) in pairs {
            deg[a] += 1;
            deg[b] += 1;
            edges.push((a, b, source));
        }
        true
    };
    let mut fresh: Vec<Vertex> = (0..n).collect();
    fresh.shuffle(&mut rng);
    let first = rng.gen_range(2..=n.min(5));
    let cycle: Vec<Vertex> = fresh.drain(..first).collect();
    add_cycle(&cycle, EdgeSource::Tree, &mut deg);
    while !fresh.is_empty() {
        let anchors: Vec<Vertex> = (0..n).filter(|&v| deg[v] == 2).collect();
        let anchor = *anchors.choose(&mut rng).ok_or_else(|| Error::invariant("no vertex left to attach at"))?;
        let t = rng.gen_range(1..=fresh.len().min(4));
        let mut cycle = vec![anchor];
        cycle.extend(fresh.drain(..t));
        add_cycle(&cycle, EdgeSource::Matching, &mut deg);
    }
    for _ in 0..rng.gen_range(0..=n / 2) {
        let mut free: Vec<Vertex> = (0..n).filter(|&v| deg[v] == 2).collect();
        if free.len() < 2 {
            break;
        }
        free.shuffle(&mut rng);
        let k = rng.gen_range(2..=free.len().min(4));
        add_cycle(&free[..k], EdgeSource::Matching, &mut deg);
    }
    EulerianBackbone::from_edges(inst, &edges)
}

/// `H = τ ⊎ x` with `τ` the bicriteria 1-tree for `b ≡ 2` and `x` the
/// cheapest parity matching that is odd exactly at the odd vertices of `τ`.
pub fn build_backbone(inst: &Instance) -> Result<EulerianBackbone> {
    Ok(build_backbone_parts(inst)?.0)
}

/// As [`build_backbone`], also returning `τ`.
pub fn build_backbone_parts(inst: &Instance) -> Result<(EulerianBackbone, OneTree)> {
    let n = inst.n();
    if n < 3 {
        return Err(Error::Domain(format!("backbone needs n >= 3, got {n}")));
    }
    let tau = min_bounded_one_tree(inst, &vec![2; n])?;
    let odd: Vec<Vertex> = (0..n).filter(|&v| tau.degree[v] % 2 == 1).collect();
    let candidates: Vec<ParityEdge> =
        inst.pairs().map(|(u, v)| ParityEdge { u, v, weight: inst.weight(u, v).clone() }).collect();
    let spec = ParitySpec::new(n, candidates, &odd, &[])?.fill_even();
    let x = solve_parity_bmatching(&spec)?
        .ok_or_else(|| Error::invariant("parity matching for the backbone is infeasible"))?;
    let mut edges: Vec<(Vertex, Vertex, EdgeSource)> = tau.edges.iter().map(|&(u, v)| (u, v, EdgeSource::Tree)).collect();
    for e in x.support() {
        let pe = &spec.edges()[e];
        edges.push((pe.u, pe.v, EdgeSource::Matching));
    }
    Ok((EulerianBackbone::from_edges(inst, &edges)?, tau))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    /// Id of the backbone edge.
    pub id: usize,
    pub tail: Vertex,
    pub head: Vertex,
}

/// A closed Euler tour of `H` as consecutive arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcSequence {
    pub arcs: Vec<Arc>,
    pub indeg: Vec<usize>,
    pub outdeg: Vec<usize>,
}

impl ArcSequence {
    /// Arc of each backbone edge, indexed by edge id.
    pub fn by_id(&self) -> Vec<Arc> {
        let mut out = self.arcs.clone();
        out.sort_unstable_by_key(|a| a.id);
        out
    }

    /// `(|δ⁺(S)|, |δ⁻(S)|)` for the vertex set given as a membership mask.
    pub fn cut_balance(&self, inside: &[bool]) -> (usize, usize) {
        let out = self.arcs.iter().filter(|a| inside[a.tail] && !inside[a.head]).count();
        let into = self.arcs.iter().filter(|a| !inside[a.tail] && inside[a.head]).count();
        (out, into)
    }

    /// Consecutive arcs chain head to tail and the walk closes.
    pub fn validate(&self, h: &EulerianBackbone) -> Result<()> {
        let m = self.arcs.len();
        if m != h.edges().len() {
            return Err(Error::invariant("Euler tour does not use every backbone edge"));
        }
        let mut used = vec![false; m];
        for (i, a) in self.arcs.iter().enumerate() {
            let e = h.edge(a.id);
            if used[a.id] || (e.u, e.v) != (a.tail, a.head) && (e.v, e.u) != (a.tail, a.head) {
                return Err(Error::invariant(format!("bad arc for backbone edge {}", a.id)));
            }
            used[a.id] = true;
            if a.head != self.arcs[(i + 1) % m].tail {
                return Err(Error::invariant(format!("Euler tour breaks after arc {i}")));
            }
        }
        if self.indeg != self.outdeg {
            return Err(Error::invariant("Euler orientation is unbalanced"));
        }
        Ok(())
    }
}

/// Hierholzer's method from vertex 0, taking the smallest unused incident
/// edge id. After one copy of a doubled pair is traversed its twin is taken
/// next, so the two copies get opposite directions and no vertex sends both
/// copies out.
pub fn euler_orient(h: &EulerianBackbone) -> Result<ArcSequence> {
    let n = h.n();
    let degrees = h.degrees();
    if let Some(v) = degrees.iter().position(|d| d % 2 == 1) {
        return Err(Error::invariant(format!("vertex {v} has odd degree")));
    }
    if !connected(n, h.edges().iter().map(|e| (e.u, e.v))) {
        return Err(Error::invariant("backbone is not connected"));
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in h.edges() {
        adj[e.u].push(e.id);
        adj[e.v].push(e.id);
    }
    let twin = |id: usize| {
        let p = h.edge(id).pair();
        h.edges().iter().find(|e| e.id != id && e.pair() == p).map(|e| e.id)
    };
    let mut used = vec![false; h.edges().len()];
    let mut next = vec![0usize; n];
    // (vertex, edge used to reach it)
    let mut stack: Vec<(Vertex, Option<usize>)> = vec![(0, None)];
    let mut forced: Option<usize> = None;
    let mut circuit: Vec<(Vertex, Option<usize>)> = Vec::with_capacity(h.edges().len() + 1);
    while let Some(&(v, _)) = stack.last() {
        let pick = forced.take().or_else(|| {
            while next[v] < adj[v].len() && used[adj[v][next[v]]] {
                next[v] += 1;
            }
            adj[v].get(next[v]).copied()
        });
        match pick {
            Some(id) => {
                used[id] = true;
                stack.push((h.edge(id).other(v), Some(id)));
                forced = twin(id).filter(|&t| !used[t]);
            }
            None => circuit.push(stack.pop().unwrap()),
        }
    }
    circuit.reverse();
    let mut arcs = Vec::with_capacity(h.edges().len());
    let mut indeg = vec![0; n];
    let mut outdeg = vec![0; n];
    for w in circuit.windows(2) {
        let (tail, head) = (w[0].0, w[1].0);
        let id = w[1].1.expect("every non-initial stack entry has an edge");
        outdeg[tail] += 1;
        indeg[head] += 1;
        arcs.push(Arc { id, tail, head });
    }
    let seq = ArcSequence { arcs, indeg, outdeg };
    seq.validate(h)?;
    Ok(seq)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::instance::fixtures::*;
    use crate::instance::{gen_euclidean_power, gen_uniform_beta};
    use crate::oracles::exact_tsp;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    use EdgeSource::{Matching, Tree};

    /// Two 4-cycles 0-1-2-3 and 1-4-5-2 sharing the doubled edge {1,2}.
    pub(crate) fn fixture_e(inst: &Instance) -> EulerianBackbone {
        EulerianBackbone::from_edges(
            inst,
            &[
                (0, 1, Tree),
                (1, 2, Tree),
                (2, 3, Tree),
                (0, 3, Tree),
                (1, 4, Tree),
                (4, 5, Matching),
                (2, 5, Matching),
                (1, 2, Matching),
            ],
        )
        .unwrap()
    }

    pub(crate) fn fixture_e_instance() -> Instance {
        // c(2,4) < c(2,5)
        from_pairs("fixture-e", 6, &[((2, 4), 1), ((2, 5), 2)], 2)
    }

    fn path(seq: &ArcSequence) -> Vec<Vertex> {
        let mut p: Vec<Vertex> = seq.arcs.iter().map(|a| a.tail).collect();
        p.push(seq.arcs[0].tail);
        p
    }

    #[test]
    fn triangle_backbone_is_the_triangle() {
        let inst = from_pairs("k3", 3, &[((0, 1), 1), ((1, 2), 1), ((0, 2), 3)], 0);
        let h = build_backbone(&inst).unwrap();
        assert_eq!(h.edges().len(), 3);
        assert_eq!(h.weight(), int(5));
        assert_eq!(h.source_weight(Matching), int(0));
        assert_eq!(path(&euler_orient(&h).unwrap()), vec![0, 1, 2, 0]);
    }

    #[test]
    fn k4_backbones() {
        for (inst, opt) in [(k4_all_one(), 4), (k4_hub(), 22)] {
            let h = build_backbone(&inst).unwrap();
            assert_eq!(exact_tsp(&inst).unwrap().weight, int(opt));
            assert!(h.weight() <= rat(3 * opt, 2));
            h.validate().unwrap();
        }
    }

    #[test]
    fn bow_tie_tour() {
        let inst = from_pairs("bow", 5, &[], 1);
        let h = EulerianBackbone::from_edges(
            &inst,
            &[(0, 1, Tree), (1, 2, Tree), (0, 2, Tree), (0, 3, Tree), (3, 4, Tree), (0, 4, Tree)],
        )
        .unwrap();
        let seq = euler_orient(&h).unwrap();
        assert_eq!(path(&seq), vec![0, 1, 2, 0, 3, 4, 0]);
        assert_eq!((seq.indeg[0], seq.outdeg[0]), (2, 2));
    }

    #[test]
    fn fixture_e_tour() {
        let inst = fixture_e_instance();
        let seq = euler_orient(&fixture_e(&inst)).unwrap();
        assert_eq!(seq.arcs.len(), 8);
        assert_eq!(path(&seq), vec![0, 1, 2, 1, 4, 5, 2, 3, 0]);
        for v in [1, 2] {
            assert_eq!((seq.indeg[v], seq.outdeg[v]), (2, 2));
        }
    }

    #[test]
    fn malformed_backbones_are_rejected() {
        let inst = from_pairs("p", 4, &[], 1);
        let bad = EulerianBackbone { n: 4, edges: vec![] };
        assert!(matches!(euler_orient(&bad), Err(Error::Invariant(_))));
        assert!(EulerianBackbone::from_edges(&inst, &[(0, 1, Tree), (1, 2, Tree), (0, 2, Tree)]).is_err());
        assert!(EulerianBackbone::from_edges(&inst, &[(0, 1, Tree), (0, 1, Tree), (2, 3, Tree), (2, 3, Tree)]).is_err());
    }

    #[test]
    fn negative_weights_are_accepted() {
        let inst = Instance::from_fn("neg", 6, |u, v| int((u as i64 * 7 + v as i64 * 3) % 5 - 2)).unwrap();
        let h = build_backbone(&inst).unwrap();
        assert!(h.weight() <= exact_tsp(&inst).unwrap().weight * rat(3, 2));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn backbone_properties(n in 3usize..10, seed in any::<u64>(), euclid in any::<bool>()) {
            let inst = if euclid {
                gen_euclidean_power(n, &int(1), seed).unwrap()
            } else {
                gen_uniform_beta(n, &rat(2, 1), seed).unwrap()
            };
            let (h, tau) = build_backbone_parts(&inst).unwrap();
            h.validate().unwrap();
            prop_assert!(h.edges().len() >= n && h.edges().len() <= 2 * n);
            prop_assert_eq!(h.weight(), &tau.weight + h.source_weight(Matching));
            prop_assert!(h.weight() <= exact_tsp(&inst).unwrap().weight * rat(3, 2));
            let seq = euler_orient(&h).unwrap();
            for mask in 1u32..(1 << n) {
                let inside: Vec<bool> = (0..n).map(|v| mask & (1 << v) != 0).collect();
                let (o, i) = seq.cut_balance(&inside);
                prop_assert_eq!(o, i);
            }
        }
    }

    #[test]
    fn zero_weight_sum() {
        let inst = from_pairs("z", 4, &[], 0);
        assert!(build_backbone(&inst).unwrap().weight().is_zero());
    }
}
