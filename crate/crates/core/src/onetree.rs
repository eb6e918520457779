//! Degree-bounded 1-trees.
//!
//! A 1-tree with root `r` is a spanning tree on `V - r` plus two edges at
//! `r`. [`min_bounded_one_tree`] returns a 1-tree whose degrees exceed the
//! bounds `b` by at most one and whose weight is at most that of every
//! 1-tree respecting `b`, by iterative LP rounding per root.
//!
//! The LP for root `r` over edge variables `0 <= x_e`:
//!
//! ```text
//! x(δ(r)) = 2            x(E(G - r)) = n - 2
//! x_e <= 1  (e ∈ δ(r))   x(E[S]) <= |S| - 1  (S ⊆ V - r, added lazily)
//! x(δ(v)) <= b_v         (v ∈ W, the still-active degree bounds)
//! ```
//!
//! Each round removes edges with `x_e = 0` and drops the bound of every
//! active vertex with at most `b_v + 1` support edges. Once no bound is
//! left, the greedy 1-tree through the edges at value one finishes.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::flow::{min_cut, Capacity};
use crate::instance::{Instance, Vertex};
use crate::lp::{LpOutcome, LpProblem, LpRow, LpSession, Sense};
use crate::rational::{half, int, Rational};

/// An undirected edge with `u < v`.
pub type Edge = (Vertex, Vertex);

fn norm((u, v): Edge) -> Edge {
    (u.min(v), u.max(v))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneTree {
    pub root: Vertex,
    /// Sorted, each with `u < v`.
    pub edges: Vec<Edge>,
    pub degree: Vec<usize>,
    pub weight: Rational,
}

impl OneTree {
    fn from_edges(inst: &Instance, root: Vertex, mut edges: Vec<Edge>) -> Self {
        edges.sort_unstable();
        let mut degree = vec![0; inst.n()];
        let mut weight = Rational::zero();
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
            weight += inst.weight(u, v);
        }
        OneTree { root, edges, degree, weight }
    }

    pub fn max_degree(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0)
    }

    /// Checks the 1-tree shape: `n` edges, two at the root, and a spanning
    /// tree on the rest.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.edges.len() != n {
            return Err(Error::invariant(format!("1-tree has {} edges, expected {n}", self.edges.len())));
        }
        if self.degree[self.root] != 2 {
            return Err(Error::invariant("1-tree root does not have degree 2"));
        }
        let mut uf = UnionFind::new(n);
        for &(u, v) in &self.edges {
            if u == self.root || v == self.root {
                continue;
            }
            if !uf.union(u, v) {
                return Err(Error::invariant("1-tree contains a cycle avoiding the root"));
            }
        }
        Ok(())
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Cheapest 1-tree with root `root` containing every forced edge and no
/// forbidden edge: Kruskal on `V - root` after the forced edges, plus the
/// cheapest admissible root edges. Ties go to the smaller edge.
pub fn min_one_tree_restricted(inst: &Instance, root: Vertex, forced: &[Edge], forbidden: &[Edge]) -> Option<OneTree> {
    let n = inst.n();
    if root >= n {
        return None;
    }
    let forced: BTreeSet<Edge> = forced.iter().map(|&e| norm(e)).collect();
    let forbidden: BTreeSet<Edge> = forbidden.iter().map(|&e| norm(e)).collect();
    if forced.iter().any(|e| forbidden.contains(e) || e.0 == e.1 || e.1 >= n) {
        return None;
    }
    let mut chosen = Vec::with_capacity(n);
    let mut uf = UnionFind::new(n);
    let mut root_edges = 0;
    for &(u, v) in &forced {
        if u == root || v == root {
            root_edges += 1;
        } else if !uf.union(u, v) {
            return None;
        }
        chosen.push((u, v));
    }
    if root_edges > 2 {
        return None;
    }
    let mut candidates: Vec<Edge> = inst
        .pairs()
        .filter(|&(u, v)| u != root && v != root && !forced.contains(&(u, v)) && !forbidden.contains(&(u, v)))
        .collect();
    candidates.sort_by(|a, b| inst.weight(a.0, a.1).cmp(inst.weight(b.0, b.1)).then(a.cmp(b)));
    let mut tree_edges = forced.iter().filter(|&&(u, v)| u != root && v != root).count();
    for (u, v) in candidates {
        if tree_edges == n - 2 {
            break;
        }
        if uf.union(u, v) {
            chosen.push((u, v));
            tree_edges += 1;
        }
    }
    if tree_edges != n - 2 {
        return None;
    }
    let mut root_cands: Vec<Edge> = (0..n)
        .filter(|&w| w != root)
        .map(|w| norm((root, w)))
        .filter(|e| !forced.contains(e) && !forbidden.contains(e))
        .collect();
    root_cands.sort_by(|a, b| inst.weight(a.0, a.1).cmp(inst.weight(b.0, b.1)).then(a.cmp(b)));
    for e in root_cands.into_iter().take(2 - root_edges) {
        chosen.push(e);
        root_edges += 1;
    }
    if root_edges != 2 {
        return None;
    }
    Some(OneTree::from_edges(inst, root, chosen))
}

/// Per-root outcome of the LP rounding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootResult {
    pub root: Vertex,
    /// Optimal value of the first (tightest) LP.
    pub lp_value: Rational,
    pub tree: OneTree,
    pub rounds: usize,
    pub cuts: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedOneTree {
    pub tree: OneTree,
    /// One entry per root; `None` where the root was skipped or infeasible.
    pub roots: Vec<Option<RootResult>>,
}

fn check_bounds(inst: &Instance, b: &[usize]) -> Result<()> {
    if b.len() != inst.n() {
        return Err(Error::Domain(format!("degree bound vector has length {}, expected {}", b.len(), inst.n())));
    }
    if let Some(v) = b.iter().position(|&x| x == 0) {
        return Err(Error::Domain(format!("degree bound of vertex {v} must be >= 1")));
    }
    Ok(())
}

/// Degree-(b+1)-bounded 1-tree costing at most any degree-b-bounded one.
pub fn min_bounded_one_tree(inst: &Instance, b: &[usize]) -> Result<OneTree> {
    Ok(min_bounded_one_tree_detailed(inst, b)?.tree)
}

/// As [`min_bounded_one_tree`], also reporting every root's LP value.
pub fn min_bounded_one_tree_detailed(inst: &Instance, b: &[usize]) -> Result<BoundedOneTree> {
    check_bounds(inst, b)?;
    let mut roots = Vec::with_capacity(inst.n());
    let mut shared = Shared::default();
    for r in 0..inst.n() {
        roots.push(round_root(inst, b, r, &mut shared)?);
    }
    let best = roots
        .iter()
        .flatten()
        .min_by(|x, y| x.tree.weight.cmp(&y.tree.weight).then(x.root.cmp(&y.root)))
        .ok_or_else(|| Error::Infeasible("no root admits a fractional degree-bounded 1-tree".into()))?;
    let tree = best.tree.clone();
    Ok(BoundedOneTree { tree, roots })
}

/// Optimal value of the root's LP with all degree bounds active, or `None`
/// if that LP is infeasible (or `b[root] < 2`).
pub fn root_lp_value(inst: &Instance, b: &[usize], root: Vertex) -> Result<Option<Rational>> {
    check_bounds(inst, b)?;
    if b[root] < 2 {
        return Ok(None);
    }
    let edges: Vec<Edge> = inst.pairs().collect();
    let active: Vec<bool> = (0..inst.n()).map(|v| v != root).collect();
    let mut pool = BTreeSet::new();
    let initial = initial_columns(inst, root, &edges);
    Ok(solve_with_cuts(inst, b, root, &edges, Some(&initial), &active, &mut pool)?.map(|(_, v)| v))
}

/// State carried from one root to the next.
#[derive(Default)]
struct Shared {
    /// Rank cuts tight at the previous root's first optimum. Those avoiding
    /// the next root seed its LP.
    cuts: BTreeSet<Vec<Vertex>>,
    /// First optimum over all pairs. With `b ≡ 2` every root's LP describes
    /// the subtour polytope, so one optimum serves every root.
    first: Option<(Vec<Rational>, Rational)>,
}

/// Iterative rounding at one root. `None` when the root is skipped
/// (`b[root] < 2`) or its LP is infeasible.
fn round_root(inst: &Instance, b: &[usize], root: Vertex, shared: &mut Shared) -> Result<Option<RootResult>> {
    let n = inst.n();
    if b[root] < 2 {
        return Ok(None);
    }
    let mut support: Vec<Edge> = inst.pairs().collect();
    let mut removed: Vec<Edge> = Vec::new();
    let mut active: Vec<bool> = (0..n).map(|v| v != root).collect();
    let mut pool: BTreeSet<Vec<Vertex>> =
        shared.cuts.iter().filter(|s| s.binary_search(&root).is_err()).cloned().collect();
    let subtour = b.iter().all(|&d| d == 2);
    let seeded = pool.len();
    let mut lp_value = None;
    let mut rounds = 0;
    loop {
        rounds += 1;
        let reused = if rounds == 1 && subtour { shared.first.clone() } else { None };
        let solved = match reused {
            Some(first) => Some(first),
            None => {
                let initial = (rounds == 1).then(|| initial_columns(inst, root, &support));
                solve_with_cuts(inst, b, root, &support, initial.as_deref(), &active, &mut pool)?
            }
        };
        let Some((x, value)) = solved else {
            if lp_value.is_none() {
                return Ok(None);
            }
            return Err(Error::invariant(format!("LP at root {root} became infeasible while rounding")));
        };
        if lp_value.is_none() {
            if shared.first.is_none() || !subtour {
                shared.cuts = pool.iter().filter(|set| is_tight(&support, &x, set)).cloned().collect();
                shared.first = Some((x.clone(), value.clone()));
            }
            lp_value = Some(value);
        }
        let ones: Vec<Edge> = support.iter().zip(&x).filter(|(_, v)| v.is_one()).map(|(e, _)| *e).collect();
        let zeros: Vec<Edge> = support.iter().zip(&x).filter(|(_, v)| v.is_zero()).map(|(e, _)| *e).collect();
        let mut support_degree = vec![0usize; n];
        for (&(u, v), val) in support.iter().zip(&x) {
            if val.is_positive() {
                support_degree[u] += 1;
                support_degree[v] += 1;
            }
        }
        let dropped: Vec<Vertex> = (0..n).filter(|&v| active[v] && support_degree[v] <= b[v] + 1).collect();
        if zeros.is_empty() && dropped.is_empty() {
            return Err(Error::invariant(format!("no rounding progress at root {root}")));
        }
        for &v in &dropped {
            active[v] = false;
        }
        removed.extend(zeros.iter().copied());
        support.retain(|e| !zeros.contains(e));
        if !active.iter().any(|&a| a) {
            let cuts = pool.len() - seeded;
            let tree = min_one_tree_restricted(inst, root, &ones, &removed)
                .ok_or_else(|| Error::invariant(format!("no 1-tree through the LP support at root {root}")))?;
            return Ok(Some(RootResult {
                root,
                lp_value: lp_value.unwrap(),
                tree,
                rounds,
                cuts,
            }));
        }
    }
}

/// Number of cheapest edges per vertex in the first restricted LP.
const NEAREST: usize = 5;

/// Edges the first LP at `root` starts with: every root edge, the cycle
/// `0, 1, ..., n-1` (feasible whenever all bounds are at least 2), and the
/// cheapest few edges at each vertex.
fn initial_columns(inst: &Instance, root: Vertex, edges: &[Edge]) -> Vec<bool> {
    let n = inst.n();
    let mut keep: BTreeSet<Edge> = (0..n).map(|i| norm((i, (i + 1) % n))).collect();
    for v in 0..n {
        let mut near: Vec<Vertex> = (0..n).filter(|&w| w != v).collect();
        near.sort_by(|&a, &c| inst.weight(v, a).cmp(inst.weight(v, c)).then(a.cmp(&c)));
        keep.extend(near.into_iter().take(NEAREST).map(|w| norm((v, w))));
    }
    edges.iter().map(|&(u, v)| u == root || v == root || keep.contains(&(u, v))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum RowKind {
    RootDegree,
    RestCount,
    RootEdge(Edge),
    Degree(Vertex),
    Rank(Vec<Vertex>),
}

impl RowKind {
    fn coeff(&self, root: Vertex, (u, v): Edge) -> bool {
        let at_root = u == root || v == root;
        match self {
            RowKind::RootDegree => at_root,
            RowKind::RestCount => !at_root,
            RowKind::RootEdge(e) => *e == (u, v),
            RowKind::Degree(w) => u == *w || v == *w,
            RowKind::Rank(set) => set.binary_search(&u).is_ok() && set.binary_search(&v).is_ok(),
        }
    }
}

/// Solves the LP over `edges` with lazily separated rank cuts and, when
/// `initial` leaves edges out, lazily priced columns. New cuts go into
/// `pool`, which persists across rounding rounds. The returned vector is
/// indexed like `edges`.
fn solve_with_cuts(
    inst: &Instance,
    b: &[usize],
    root: Vertex,
    edges: &[Edge],
    initial: Option<&[bool]>,
    active: &[bool],
    pool: &mut BTreeSet<Vec<Vertex>>,
) -> Result<Option<(Vec<Rational>, Rational)>> {
    let n = inst.n();
    let mut kinds = vec![RowKind::RootDegree, RowKind::RestCount];
    kinds.extend(edges.iter().filter(|&&(u, v)| u == root || v == root).map(|&e| RowKind::RootEdge(e)));
    kinds.extend((0..n).filter(|&v| active[v]).map(RowKind::Degree));
    kinds.extend(pool.iter().map(|set| RowKind::Rank(set.clone())));
    let rhs = |k: &RowKind| match k {
        RowKind::RootDegree => int(2),
        RowKind::RestCount => int(n as i64 - 2),
        RowKind::RootEdge(_) => int(1),
        RowKind::Degree(v) => int(b[*v] as i64),
        RowKind::Rank(set) => int(set.len() as i64 - 1),
    };
    let sense = |k: &RowKind| match k {
        RowKind::RootDegree | RowKind::RestCount => Sense::Eq,
        _ => Sense::Le,
    };
    // LP variable -> index into `edges`
    let mut vars: Vec<usize> = (0..edges.len()).filter(|&j| initial.is_none_or(|m| m[j])).collect();
    let mut included: Vec<bool> = (0..edges.len()).map(|j| initial.is_none_or(|m| m[j])).collect();
    let rows = kinds
        .iter()
        .map(|k| LpRow {
            coeffs: vars
                .iter()
                .enumerate()
                .filter(|(_, &j)| k.coeff(root, edges[j]))
                .map(|(var, _)| (var, int(1)))
                .collect(),
            sense: sense(k),
            rhs: rhs(k),
        })
        .collect();
    let cost = vars.iter().map(|&j| inst.weight(edges[j].0, edges[j].1).clone()).collect();
    let mut lp = LpSession::new(LpProblem { num_vars: vars.len(), cost, rows })?;
    let column = |kinds: &[RowKind], j: usize| -> (Rational, Vec<(usize, Rational)>) {
        let e = edges[j];
        let entries = kinds.iter().enumerate().filter(|(_, k)| k.coeff(root, e)).map(|(i, _)| (i, int(1))).collect();
        (inst.weight(e.0, e.1).clone(), entries)
    };
    loop {
        let (x, value) = match lp.solve()? {
            LpOutcome::Optimal { x, value } => (x, value),
            LpOutcome::Infeasible => {
                let missing: Vec<usize> = (0..edges.len()).filter(|&j| !included[j]).collect();
                if missing.is_empty() {
                    return Ok(None);
                }
                lp.add_columns(missing.iter().map(|&j| column(&kinds, j)).collect())?;
                for j in missing {
                    included[j] = true;
                    vars.push(j);
                }
                continue;
            }
            LpOutcome::Unbounded => return Err(Error::invariant("bounded 1-tree LP reported unbounded")),
        };
        let priced: Vec<usize> = (0..edges.len())
            .filter(|&j| !included[j])
            .filter(|&j| {
                let (c, a) = column(&kinds, j);
                // no basis to price against: take the column
                lp.reduced_cost(&c, &a).is_none_or(|d| d.is_negative())
            })
            .collect();
        if !priced.is_empty() {
            lp.add_columns(priced.iter().map(|&j| column(&kinds, j)).collect())?;
            for j in priced {
                included[j] = true;
                vars.push(j);
            }
            continue;
        }
        let mut full = vec![Rational::zero(); edges.len()];
        for (var, &j) in vars.iter().enumerate() {
            full[j] = x[var].clone();
        }
        // keep the LP small: rank rows with slack go back to the pool
        let ranks = kinds.iter().filter(|k| matches!(k, RowKind::Rank(_))).count();
        if ranks > vars.len() {
            let slack: Vec<usize> = (0..kinds.len())
                .filter(|&i| matches!(&kinds[i], RowKind::Rank(set) if !is_tight(edges, &full, set)))
                .collect();
            if !slack.is_empty() {
                lp.remove_rows(&slack)?;
                let mut drop = vec![false; kinds.len()];
                for &i in &slack {
                    drop[i] = true;
                }
                let mut i = 0;
                kinds.retain(|_| {
                    i += 1;
                    !drop[i - 1]
                });
            }
        }
        let present: BTreeSet<&Vec<Vertex>> = kinds
            .iter()
            .filter_map(|k| match k {
                RowKind::Rank(set) => Some(set),
                _ => None,
            })
            .collect();
        let mut violated: Vec<Vec<Vertex>> = pool
            .iter()
            .filter(|set| !present.contains(set) && inner_load(edges, &full, set) > int(set.len() as i64 - 1))
            .cloned()
            .collect();
        if violated.is_empty() {
            violated = separate(n, root, edges, &full).into_iter().filter(|s| !pool.contains(s)).collect();
        }
        if violated.is_empty() {
            return Ok(Some((full, value)));
        }
        let mut new_rows = Vec::new();
        for set in violated {
            let kind = RowKind::Rank(set.clone());
            let coeffs: Vec<(usize, Rational)> = vars
                .iter()
                .enumerate()
                .filter(|(_, &j)| kind.coeff(root, edges[j]))
                .map(|(var, _)| (var, int(1)))
                .collect();
            new_rows.push(LpRow { coeffs, sense: Sense::Le, rhs: int(set.len() as i64 - 1) });
            kinds.push(kind);
            pool.insert(set);
        }
        lp.add_rows(new_rows)?;
    }
}

fn inner_load(edges: &[Edge], x: &[Rational], set: &[Vertex]) -> Rational {
    let inside = |v: Vertex| set.binary_search(&v).is_ok();
    edges.iter().zip(x).filter(|(&(u, v), _)| inside(u) && inside(v)).map(|(_, xv)| xv).sum()
}

fn is_tight(edges: &[Edge], x: &[Rational], set: &[Vertex]) -> bool {
    inner_load(edges, x, set) == int(set.len() as i64 - 1)
}

/// Violated rank constraints `x(E[S]) > |S| - 1` with `S ⊆ V - root`.
///
/// `|S| - x(E[S]) = Σ_{v∈S} (1 - d(v)/2) + x(δ(S))/2` with `d` the
/// fractional degree inside `G - root`, so minimising it over sets that
/// contain a given `k` is a minimum cut. Returns sorted vertex sets, one per
/// distinct violated cut found.
pub(crate) fn separate(n: usize, root: Vertex, edges: &[Edge], x: &[Rational]) -> Vec<Vec<Vertex>> {
    let nodes: Vec<Vertex> = (0..n).filter(|&v| v != root).collect();
    let k = nodes.len();
    let pos = |v: Vertex| nodes.iter().position(|&w| w == v).unwrap();
    let (s, t) = (k, k + 1);
    let mut deg = vec![Rational::zero(); k];
    let mut arcs: Vec<(usize, usize, Capacity)> = Vec::new();
    for (&(u, v), val) in edges.iter().zip(x) {
        if u == root || v == root || val.is_zero() {
            continue;
        }
        let (a, c) = (pos(u), pos(v));
        deg[a] += val;
        deg[c] += val;
        let h = val * half();
        arcs.push((a, c, Some(h.clone())));
        arcs.push((c, a, Some(h)));
    }
    let mut offset = Rational::zero();
    for i in 0..k {
        let a = Rational::one() - &deg[i] * half();
        if a.is_positive() {
            arcs.push((i, t, Some(a)));
        } else if a.is_negative() {
            offset += -&a;
            arcs.push((s, i, Some(-a)));
        }
    }
    let mut found: BTreeSet<Vec<Vertex>> = BTreeSet::new();
    for forced in 0..k {
        let mut with = arcs.clone();
        with.push((s, forced, None));
        let (cut, side) = min_cut(k + 2, &with, s, t);
        if cut - &offset < Rational::one() {
            let set: Vec<Vertex> = (0..k).filter(|&i| side[i]).map(|i| nodes[i]).collect();
            found.insert(set);
        }
    }
    found.into_iter().collect()
}
