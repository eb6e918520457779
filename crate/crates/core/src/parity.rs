//! Parity-constrained b-matching.
//!
//! A [`ParitySpec`] asks for an integral edge vector `x` with
//! `l_e <= x_e <= m_e`, `a_v <= deg_x(v) <= b_v`, `deg_x(v)` odd on `S_odd`
//! and even on `S_even`, minimising `c·x`. Only the configuration
//! `l = 0, m = 1, a = 0, b = 2` is solved; it reduces to minimum-weight
//! perfect matching through a small gadget.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matching::{min_weight_perfect_matching, MatchingGraph, PerfectMatching};
use crate::rational::{half, sum, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityEdge {
    pub u: usize,
    pub v: usize,
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParitySpec {
    n: usize,
    edges: Vec<ParityEdge>,
    parity: Vec<Option<Parity>>,
    lower: Vec<u32>,
    upper: Vec<u32>,
    deg_lower: Vec<u32>,
    deg_upper: Vec<u32>,
}

impl ParitySpec {
    /// A spec with the supported bounds `l = 0, m = 1, a = 0, b = 2`.
    /// Fails when the parity sets overlap or name unknown vertices.
    pub fn new(n: usize, edges: Vec<ParityEdge>, s_odd: &[usize], s_even: &[usize]) -> Result<Self> {
        for e in &edges {
            if e.u == e.v || e.u >= n || e.v >= n {
                return Err(Error::Domain(format!("bad candidate edge ({},{})", e.u, e.v)));
            }
        }
        let mut parity = vec![None; n];
        for (set, p) in [(s_odd, Parity::Odd), (s_even, Parity::Even)] {
            for &v in set {
                if v >= n {
                    return Err(Error::Domain(format!("parity vertex {v} outside 0..{n}")));
                }
                match parity[v] {
                    Some(q) if q != p => {
                        return Err(Error::Domain(format!("vertex {v} is in both S_odd and S_even")))
                    }
                    _ => parity[v] = Some(p),
                }
            }
        }
        let m = edges.len();
        Ok(ParitySpec {
            n,
            edges,
            parity,
            lower: vec![0; m],
            upper: vec![1; m],
            deg_lower: vec![0; n],
            deg_upper: vec![2; n],
        })
    }

    /// Places every vertex outside both parity sets into `S_even`.
    pub fn fill_even(mut self) -> Self {
        for p in &mut self.parity {
            p.get_or_insert(Parity::Even);
        }
        self
    }

    pub fn with_edge_bounds(mut self, lower: Vec<u32>, upper: Vec<u32>) -> Result<Self> {
        if lower.len() != self.edges.len() || upper.len() != self.edges.len() {
            return Err(Error::Domain("edge bound vectors have the wrong length".into()));
        }
        self.lower = lower;
        self.upper = upper;
        Ok(self)
    }

    pub fn with_degree_bounds(mut self, lower: Vec<u32>, upper: Vec<u32>) -> Result<Self> {
        if lower.len() != self.n || upper.len() != self.n {
            return Err(Error::Domain("degree bound vectors have the wrong length".into()));
        }
        self.deg_lower = lower;
        self.deg_upper = upper;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[ParityEdge] {
        &self.edges
    }

    pub fn parity(&self, v: usize) -> Option<Parity> {
        self.parity[v]
    }

    pub fn edge_bounds(&self, e: usize) -> (u32, u32) {
        (self.lower[e], self.upper[e])
    }

    pub fn degree_bounds(&self, v: usize) -> (u32, u32) {
        (self.deg_lower[v], self.deg_upper[v])
    }

    pub fn s_odd(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.parity[v] == Some(Parity::Odd)).collect()
    }

    pub fn s_even(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.parity[v] == Some(Parity::Even)).collect()
    }

    fn check_supported(&self) -> Result<()> {
        if self.lower.iter().any(|&l| l != 0) || self.upper.iter().any(|&m| m != 1) {
            return Err(Error::Unsupported("edge multiplicity bounds other than [0,1]".into()));
        }
        if self.deg_lower.iter().any(|&a| a != 0) || self.deg_upper.iter().any(|&b| b != 2) {
            return Err(Error::Unsupported("degree bounds other than [0,2]".into()));
        }
        if let Some(v) = self.parity.iter().position(|p| p.is_none()) {
            return Err(Error::Unsupported(format!("vertex {v} is in neither parity set")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityVector {
    pub x: Vec<u32>,
    pub weight: Rational,
}

impl MultiplicityVector {
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.x.iter().enumerate().filter(|(_, &m)| m > 0).map(|(e, _)| e)
    }
}

/// Checks multiplicity bounds, degree bounds, parities and the weight.
pub fn certify(spec: &ParitySpec, x: &MultiplicityVector) -> Result<()> {
    if x.x.len() != spec.edges.len() {
        return Err(Error::invariant("multiplicity vector has the wrong length"));
    }
    let mut deg = vec![0u32; spec.n];
    let mut weight = Rational::zero();
    for (e, &m) in x.x.iter().enumerate() {
        if m < spec.lower[e] || m > spec.upper[e] {
            return Err(Error::invariant(format!("x[{e}] = {m} outside its bounds")));
        }
        let edge = &spec.edges[e];
        deg[edge.u] += m;
        deg[edge.v] += m;
        weight += &edge.weight * Rational::from_integer(m.into());
    }
    for v in 0..spec.n {
        if deg[v] < spec.deg_lower[v] || deg[v] > spec.deg_upper[v] {
            return Err(Error::invariant(format!("degree of {v} is {} outside its bounds", deg[v])));
        }
        match spec.parity[v] {
            Some(Parity::Odd) if deg[v].is_multiple_of(2) => {
                return Err(Error::invariant(format!("vertex {v} must have odd degree, has {}", deg[v])))
            }
            Some(Parity::Even) if deg[v] % 2 == 1 => {
                return Err(Error::invariant(format!("vertex {v} must have even degree, has {}", deg[v])))
            }
            _ => {}
        }
    }
    if weight != x.weight {
        return Err(Error::invariant("reported weight differs from c·x"));
    }
    Ok(())
}

/// Node roles in the gadget graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetNode {
    /// `copy`-th terminal copy of a base vertex.
    Copy { vertex: usize, copy: usize },
    /// The end of candidate edge `edge` attached to base vertex `vertex`.
    EdgeEnd { edge: usize, vertex: usize },
}

/// Role of a gadget edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetEdge {
    /// Joins the two copies of an even vertex (degree 0).
    Absorber { vertex: usize },
    /// Joins both ends of a candidate edge (edge unused).
    Skip { edge: usize },
    /// Joins an edge end to a copy of its vertex (edge used there).
    Attach { edge: usize, vertex: usize, copy: usize },
}

#[derive(Debug, Clone)]
pub struct Gadget {
    pub graph: MatchingGraph,
    pub nodes: Vec<GadgetNode>,
    pub roles: Vec<GadgetEdge>,
}

impl Gadget {
    /// Maps a perfect matching of the gadget back to a multiplicity vector.
    pub fn decode(&self, spec: &ParitySpec, m: &PerfectMatching) -> MultiplicityVector {
        let mut x = vec![0u32; spec.edges.len()];
        for &id in &m.edges {
            if let GadgetEdge::Attach { edge, .. } = self.roles[id] {
                x[edge] = 1;
            }
        }
        let weight = sum(
            x.iter()
                .enumerate()
                .filter(|(_, &m)| m == 1)
                .map(|(e, _)| &spec.edges[e].weight),
        );
        MultiplicityVector { x, weight }
    }
}

/// Builds the matching gadget for a spec in the supported configuration.
pub fn build_gadget(spec: &ParitySpec) -> Result<Gadget> {
    spec.check_supported()?;
    let mut nodes = Vec::new();
    let mut copies: Vec<Vec<usize>> = vec![Vec::new(); spec.n];
    for v in 0..spec.n {
        let k = if spec.parity[v] == Some(Parity::Odd) { 1 } else { 2 };
        for copy in 0..k {
            copies[v].push(nodes.len());
            nodes.push(GadgetNode::Copy { vertex: v, copy });
        }
    }
    let mut ends = Vec::with_capacity(spec.edges.len());
    for (e, edge) in spec.edges.iter().enumerate() {
        let a = nodes.len();
        nodes.push(GadgetNode::EdgeEnd { edge: e, vertex: edge.u });
        let b = nodes.len();
        nodes.push(GadgetNode::EdgeEnd { edge: e, vertex: edge.v });
        ends.push((a, b));
    }
    let mut graph = MatchingGraph::new(nodes.len());
    let mut roles = Vec::new();
    for v in 0..spec.n {
        if copies[v].len() == 2 {
            graph.add_edge(copies[v][0], copies[v][1], Rational::zero())?;
            roles.push(GadgetEdge::Absorber { vertex: v });
        }
    }
    for (e, edge) in spec.edges.iter().enumerate() {
        let (a, b) = ends[e];
        graph.add_edge(a, b, Rational::zero())?;
        roles.push(GadgetEdge::Skip { edge: e });
        let halfw = &edge.weight * half();
        for (end, vertex) in [(a, edge.u), (b, edge.v)] {
            for (copy, &c) in copies[vertex].iter().enumerate() {
                graph.add_edge(end, c, halfw.clone())?;
                roles.push(GadgetEdge::Attach { edge: e, vertex, copy });
            }
        }
    }
    Ok(Gadget { graph, nodes, roles })
}

/// Minimum-weight feasible `x`, or `None` when the system is infeasible.
pub fn solve_parity_bmatching(spec: &ParitySpec) -> Result<Option<MultiplicityVector>> {
    let gadget = build_gadget(spec)?;
    let Some(m) = min_weight_perfect_matching(&gadget.graph) else {
        return Ok(None);
    };
    let x = gadget.decode(spec, &m);
    if x.weight != m.weight {
        return Err(Error::invariant("gadget matching weight differs from decoded weight"));
    }
    certify(spec, &x)?;
    Ok(Some(x))
}
