//! Bi-directed graphs, Rule 1, and the cactus construction that turns an
//! Euler-oriented backbone into a Hamiltonian tour.
//!
//! Tails carry `+` and heads `-`. Rule 1 at a vertex `v` with out-arcs
//! `(v,w)` and `(v,w')` replaces them by the double-headed arc `{w⁻,w'⁻}`.
//! The new arc records what it replaced, so it can be reversed later
//! without any global history.

mod blocks;
mod certificate;
mod format;
mod grow;
mod orient;

use std::collections::BTreeMap;
use std::fmt;

use crate::backbone::{ArcSequence, EulerianBackbone};
use crate::error::{Error, Result};
use crate::instance::{Instance, Vertex};
use crate::rational::Rational;

pub use blocks::{biconnected_blocks, is_cactus};
pub use certificate::{
    approximation_factor, run_alg_beta, run_pipeline, run_pipeline_on, verify_certificate, Audit, Families, Pipeline, TourCertificate, TourEdge,
    VerifyReport, Violation,
};
pub use format::{parse_certificate, parse_tour, write_certificate, write_tour};
pub use grow::{grow_cactus, grow_cactus_observed, Block, Cactus};
pub use orient::{finalize_tour, orient_blocks, Decision, KPrime, Tour};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ends {
    Directed { tail: Vertex, head: Vertex },
    /// `{a⁻, b⁻}`. There are no arcs `{u⁺, v⁺}`.
    DoubleHead(Vertex, Vertex),
}

impl Ends {
    pub fn endpoints(&self) -> (Vertex, Vertex) {
        match *self {
            Ends::Directed { tail, head } => (tail, head),
            Ends::DoubleHead(a, b) => (a, b),
        }
    }

    pub fn pair(&self) -> (Vertex, Vertex) {
        let (a, b) = self.endpoints();
        (a.min(b), a.max(b))
    }
}

impl fmt::Display for Ends {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ends::Directed { tail, head } => write!(f, "({tail},{head})"),
            Ends::DoubleHead(a, b) => write!(f, "{{{a}-,{b}-}}"),
        }
    }
}

/// Record kept on an arc created by Rule 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Join {
    pub vertex: Vertex,
    /// The two replaced out-arcs, smaller id first.
    pub replaced: Box<[BiArc; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiArc {
    pub id: usize,
    pub ends: Ends,
    pub weight: Rational,
    pub join: Option<Join>,
}

impl BiArc {
    pub fn endpoints(&self) -> (Vertex, Vertex) {
        self.ends.endpoints()
    }

    pub fn touches(&self, v: Vertex) -> bool {
        let (a, b) = self.endpoints();
        a == v || b == v
    }

    pub fn other(&self, v: Vertex) -> Vertex {
        let (a, b) = self.endpoints();
        if a == v {
            b
        } else {
            a
        }
    }

    /// Ids of the replaced arcs when this arc came from Rule 1.
    pub fn provenance(&self) -> Option<(Vertex, [usize; 2])> {
        self.join.as_ref().map(|j| (j.vertex, [j.replaced[0].id, j.replaced[1].id]))
    }
}

/// A bi-directed multigraph. Arc ids below `base` belong to the graph it was
/// built from; the arc made by Rule 1 at `v` gets id `base + v`, which is
/// independent of the order the rule is applied in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiDigraph {
    n: usize,
    base: usize,
    arcs: BTreeMap<usize, BiArc>,
}

impl BiDigraph {
    /// A graph of directed arcs; ids must be below `base`.
    pub fn new(n: usize, base: usize, arcs: Vec<BiArc>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for a in arcs {
            let (u, v) = a.endpoints();
            if a.id >= base || u >= n || v >= n || u == v || a.join.is_some() {
                return Err(Error::Domain(format!("bad arc {} {}", a.id, a.ends)));
            }
            if map.insert(a.id, a).is_some() {
                return Err(Error::Domain("duplicate arc id".into()));
            }
        }
        Ok(BiDigraph { n, base, arcs: map })
    }

    /// `H` with each edge directed as in the Euler tour; arc ids are edge ids.
    pub fn from_euler(h: &EulerianBackbone, tour: &ArcSequence) -> Result<Self> {
        let arcs = tour
            .by_id()
            .into_iter()
            .map(|a| BiArc {
                id: a.id,
                ends: Ends::Directed { tail: a.tail, head: a.head },
                weight: h.edge(a.id).weight.clone(),
                join: None,
            })
            .collect();
        BiDigraph::new(h.n(), h.edges().len(), arcs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn arcs(&self) -> impl Iterator<Item = &BiArc> {
        self.arcs.values()
    }

    pub fn arc(&self, id: usize) -> Option<&BiArc> {
        self.arcs.get(&id)
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Id Rule 1 at `v` assigns.
    pub fn join_id(&self, v: Vertex) -> usize {
        self.base + v
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.arcs
            .values()
            .map(|a| {
                let (x, y) = a.endpoints();
                (x == v) as usize + (y == v) as usize
            })
            .sum()
    }

    pub fn out_arcs(&self, v: Vertex) -> Vec<usize> {
        self.arcs
            .values()
            .filter(|a| matches!(a.ends, Ends::Directed { tail, .. } if tail == v))
            .map(|a| a.id)
            .collect()
    }

    pub fn in_degree(&self, v: Vertex) -> usize {
        self.arcs
            .values()
            .map(|a| match a.ends {
                Ends::Directed { head, .. } => (head == v) as usize,
                Ends::DoubleHead(x, y) => (x == v) as usize + (y == v) as usize,
            })
            .sum()
    }

    /// Applies Rule 1 at `v` and returns the id of the new arc.
    pub fn apply_rule1(&mut self, inst: &Instance, v: Vertex) -> Result<usize> {
        let out = self.out_arcs(v);
        if out.len() != 2 {
            return Err(Error::Domain(format!("Rule 1 needs out-degree 2 at vertex {v}, found {}", out.len())));
        }
        let id = self.join_id(v);
        if self.arcs.contains_key(&id) {
            return Err(Error::invariant(format!("Rule 1 was already applied at vertex {v}")));
        }
        let a = self.arcs[&out[0]].clone();
        let b = self.arcs[&out[1]].clone();
        let (w, w2) = (a.other(v), b.other(v));
        if w == w2 {
            return Err(Error::Domain(format!("both out-arcs of vertex {v} end at {w}")));
        }
        self.arcs.remove(&a.id);
        self.arcs.remove(&b.id);
        self.arcs.insert(
            id,
            BiArc {
                id,
                ends: Ends::DoubleHead(w, w2),
                weight: inst.weight(w, w2).clone(),
                join: Some(Join { vertex: v, replaced: Box::new([a, b]) }),
            },
        );
        Ok(id)
    }

    /// Removes the Rule-1 arc `id` and restores the two arcs it replaced.
    pub fn reverse_rule1(&mut self, id: usize) -> Result<[usize; 2]> {
        let arc = self.arcs.get(&id).ok_or_else(|| Error::Domain(format!("no arc {id}")))?;
        if arc.join.is_none() {
            return Err(Error::Domain(format!("arc {id} was not created by Rule 1")));
        }
        let arc = self.arcs.remove(&id).unwrap();
        let join = arc.join.unwrap();
        let [a, b] = *join.replaced;
        let ids = [a.id, b.id];
        self.arcs.insert(a.id, a);
        self.arcs.insert(b.id, b);
        Ok(ids)
    }

    /// Rule 1 at every degree-4 vertex, in ascending vertex order. Returns
    /// the vertices joined.
    pub fn contract_to_cycles(&mut self, inst: &Instance) -> Result<Vec<Vertex>> {
        let order: Vec<Vertex> = (0..self.n).collect();
        self.contract_in_order(inst, &order)
    }

    /// Rule 1 at the degree-4 vertices, visited in `order`.
    pub fn contract_in_order(&mut self, inst: &Instance, order: &[Vertex]) -> Result<Vec<Vertex>> {
        let mut joined = Vec::new();
        for &v in order {
            match self.degree(v) {
                2 => {}
                4 => {
                    self.apply_rule1(inst, v)?;
                    joined.push(v);
                }
                d => return Err(Error::invariant(format!("vertex {v} has degree {d}, expected 2 or 4"))),
            }
        }
        if let Some(v) = (0..self.n).find(|&v| self.degree(v) != 2) {
            return Err(Error::invariant(format!("vertex {v} still has degree {} after contraction", self.degree(v))));
        }
        Ok(joined)
    }

    /// Disjoint cycles of a graph where every vertex has degree 2, ordered by
    /// smallest vertex.
    pub fn cycles(&self) -> Result<Vec<Cycle>> {
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for a in self.arcs.values() {
            let (x, y) = a.endpoints();
            incident[x].push(a.id);
            incident[y].push(a.id);
        }
        if let Some(v) = incident.iter().position(|l| l.len() != 2) {
            return Err(Error::invariant(format!("vertex {v} does not have degree 2")));
        }
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut vertices = vec![s];
            let mut arcs = Vec::new();
            seen[s] = true;
            let mut v = s;
            let mut via = incident[s][0];
            loop {
                arcs.push(via);
                let w = self.arcs[&via].other(v);
                if w == s {
                    break;
                }
                seen[w] = true;
                vertices.push(w);
                via = if incident[w][0] == via { incident[w][1] } else { incident[w][0] };
                v = w;
            }
            out.push(Cycle { vertices, arcs });
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    /// In walk order from the smallest vertex.
    pub vertices: Vec<Vertex>,
    pub arcs: Vec<usize>,
}

/// One line of `--trace` output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Rule1 { stage: &'static str, vertex: Vertex, replaced: [usize; 2], arc: usize, ends: Ends },
    EntrySite { arc: usize, ends: Ends, vertex: Vertex, block: usize },
    Reverse { arc: usize, restored: [usize; 2] },
    ExitPoint { vertex: Vertex, block: usize },
    Orient { block: usize, start: Vertex, cheap: usize, expensive: usize },
    OrientRoot { block: usize, start: Vertex, first: usize },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Rule1 { stage, vertex, replaced, arc, ends } => write!(
                f,
                "rule1 stage={stage} vertex={vertex} replaced={},{} arc={arc} ends={ends}",
                replaced[0], replaced[1]
            ),
            TraceEvent::EntrySite { arc, ends, vertex, block } => {
                write!(f, "entry-site arc={arc} ends={ends} vertex={vertex} block={block}")
            }
            TraceEvent::Reverse { arc, restored } => {
                write!(f, "reverse arc={arc} restored={},{}", restored[0], restored[1])
            }
            TraceEvent::ExitPoint { vertex, block } => write!(f, "exit-point vertex={vertex} block={block}"),
            TraceEvent::Orient { block, start, cheap, expensive } => {
                write!(f, "orient block={block} start={start} cheap={cheap} expensive={expensive}")
            }
            TraceEvent::OrientRoot { block, start, first } => {
                write!(f, "orient-root block={block} start={start} first={first}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backbone::tests::{fixture_e, fixture_e_instance};
    use crate::backbone::{build_backbone, euler_orient};
    use crate::instance::gen_uniform_beta;
    use crate::rational::{int, rat};
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    pub(crate) fn fixture_e_digraph() -> (Instance, BiDigraph, ArcSequence) {
        let inst = fixture_e_instance();
        let h = fixture_e(&inst);
        let seq = euler_orient(&h).unwrap();
        let d = BiDigraph::from_euler(&h, &seq).unwrap();
        (inst, d, seq)
    }

    fn directed(id: usize, tail: Vertex, head: Vertex) -> BiArc {
        BiArc { id, ends: Ends::Directed { tail, head }, weight: int(1), join: None }
    }

    #[test]
    fn rule1_joins_two_out_arcs() {
        let inst = crate::instance::fixtures::from_pairs("k4", 4, &[((1, 2), 3)], 1);
        let mut d = BiDigraph::new(4, 10, vec![directed(0, 0, 1), directed(1, 0, 2), directed(2, 3, 0)]).unwrap();
        let before = d.clone();
        let id = d.apply_rule1(&inst, 0).unwrap();
        assert_eq!(id, 10);
        let arc = d.arc(id).unwrap();
        assert_eq!(arc.ends, Ends::DoubleHead(1, 2));
        assert_eq!(arc.weight, int(3));
        assert_eq!(arc.provenance(), Some((0, [0, 1])));
        assert_eq!(d.degree(0), 1);
        assert_eq!(d.reverse_rule1(id).unwrap(), [0, 1]);
        assert_eq!(d, before);
        assert!(d.apply_rule1(&inst, 3).is_err());
        assert!(d.reverse_rule1(2).is_err());
    }

    #[test]
    fn fixture_e_contraction() {
        let (inst, mut d, _) = fixture_e_digraph();
        d.apply_rule1(&inst, 1).unwrap();
        assert_eq!(d.arc(d.join_id(1)).unwrap().ends, Ends::DoubleHead(2, 4));
        d.apply_rule1(&inst, 2).unwrap();
        let j2 = d.join_id(2);
        assert_eq!(d.arc(j2).unwrap().ends, Ends::DoubleHead(3, 1));
        let cycles = d.cycles().unwrap();
        let sets: Vec<Vec<Vertex>> = cycles
            .iter()
            .map(|c| {
                let mut v = c.vertices.clone();
                v.sort();
                v
            })
            .collect();
        assert_eq!(sets, vec![vec![0, 1, 3], vec![2, 4, 5]]);
        let restored = d.reverse_rule1(j2).unwrap();
        let pairs: Vec<_> = restored.iter().map(|&id| d.arc(id).unwrap().ends).collect();
        assert_eq!(
            pairs,
            vec![Ends::Directed { tail: 2, head: 3 }, Ends::Directed { tail: 2, head: 1 }]
        );
    }

    #[test]
    fn bow_tie_contracts_to_one_cycle() {
        let inst = crate::instance::fixtures::from_pairs("bow", 5, &[], 1);
        let arcs = [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)];
        let mut d = BiDigraph::new(5, 6, arcs.iter().enumerate().map(|(i, &(t, h))| directed(i, t, h)).collect()).unwrap();
        assert_eq!(d.contract_to_cycles(&inst).unwrap(), vec![0]);
        assert_eq!(d.arc(6).unwrap().ends, Ends::DoubleHead(1, 3));
        let cycles = d.cycles().unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].arcs.len(), 5);
    }

    #[test]
    fn triangle_is_unchanged() {
        let inst = crate::instance::fixtures::from_pairs("k3", 3, &[], 1);
        let mut d = BiDigraph::new(3, 3, vec![directed(0, 0, 1), directed(1, 1, 2), directed(2, 2, 0)]).unwrap();
        let before = d.clone();
        assert!(d.contract_to_cycles(&inst).unwrap().is_empty());
        assert_eq!(d, before);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]
        #[test]
        fn contraction_ignores_order(n in 4usize..10, seed in any::<u64>()) {
            let inst = gen_uniform_beta(n, &rat(3, 2), seed).unwrap();
            let h = build_backbone(&inst).unwrap();
            let seq = euler_orient(&h).unwrap();
            let d = BiDigraph::from_euler(&h, &seq).unwrap();
            let mut reference = d.clone();
            reference.contract_to_cycles(&inst).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..5 {
                let mut order: Vec<Vertex> = (0..n).collect();
                order.shuffle(&mut rng);
                let mut other = d.clone();
                other.contract_in_order(&inst, &order).unwrap();
                prop_assert_eq!(&other, &reference);
            }
            let mut undo = reference.clone();
            let joins: Vec<usize> = undo.arcs().filter(|a| a.join.is_some()).map(|a| a.id).collect();
            for id in joins {
                undo.reverse_rule1(id).unwrap();
            }
            prop_assert_eq!(undo, d);
        }
    }
}
