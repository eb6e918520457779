//! Exhaustive reference solvers for small inputs.
//!
//! Each oracle refuses inputs beyond a hard size guard instead of running
//! for hours. Weights are rescaled to `i128` when that is lossless, with an
//! exact rational fallback otherwise.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::instance::{Instance, Vertex};
use crate::matching::MatchingGraph;
use crate::parity::{Parity, ParitySpec};
use crate::rational::{scaled_i128, Rational, Scalar};

pub const MAX_EXACT_TSP: usize = 20;
pub const MAX_ONE_TREE: usize = 9;
pub const MAX_PARITY_EDGES: usize = 22;
pub const MAX_PERFECT_MATCHING: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactTour {
    /// Starts at vertex 0.
    pub order: Vec<Vertex>,
    pub weight: Rational,
}

/// Optimal tour by Held–Karp over subsets of `1..n`. Memory is
/// `2^(n-1) · (n-1)` scalars, about 160 MB at the `n = 20` limit. Among
/// optimal tours the lexicographically smallest order is returned.
pub fn exact_tsp(inst: &Instance) -> Result<ExactTour> {
    let n = inst.n();
    if n > MAX_EXACT_TSP {
        return Err(Error::Capacity { what: "exact_tsp vertex count", got: n, limit: MAX_EXACT_TSP });
    }
    let flat: Vec<&Rational> = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).map(|(u, v)| inst.weight(u, v)).collect();
    let order = match scaled_i128(flat.iter().copied(), n + 1) {
        Some((w, _)) => held_karp(n, &w),
        None => held_karp(n, &flat.iter().map(|r| (*r).clone()).collect::<Vec<_>>()),
    };
    let weight = inst.tour_weight(&order);
    Ok(ExactTour { order, weight })
}

fn held_karp<T: Scalar>(n: usize, w: &[T]) -> Vec<Vertex> {
    let m = n - 1; // vertices 1..n are bits 0..m
    let full = 1usize << m;
    let wt = |u: usize, v: usize| &w[u * n + v];
    // dp[S * m + j]: cheapest path from 0 through exactly S ending at j+1 ∈ S.
    let mut dp: Vec<Option<T>> = vec![None; full * m];
    for j in 0..m {
        dp[(1 << j) * m + j] = Some(wt(0, j + 1).clone());
    }
    for s in 1..full {
        for j in 0..m {
            if s & (1 << j) == 0 {
                continue;
            }
            let Some(cur) = dp[s * m + j].clone() else { continue };
            for k in 0..m {
                if s & (1 << k) != 0 {
                    continue;
                }
                let t = s | (1 << k);
                let cand = cur.clone() + wt(j + 1, k + 1).clone();
                let slot = &mut dp[t * m + k];
                if slot.as_ref().is_none_or(|old| cand < *old) {
                    *slot = Some(cand);
                }
            }
        }
    }
    let total = |j: usize| dp[(full - 1) * m + j].clone().unwrap() + wt(j + 1, 0).clone();
    let opt = (0..m).map(total).min().unwrap();
    // Walk forward: from `cur` with unvisited set U, moving to k costs
    // w(cur,k) and the rest is the reversed path dp[U][k].
    let mut order = vec![0];
    let mut unvisited = full - 1;
    let mut spent = T::zero();
    let mut cur = 0usize;
    while unvisited != 0 {
        let next = (0..m)
            .filter(|&k| unvisited & (1 << k) != 0)
            .find(|&k| {
                let rest = dp[unvisited * m + k].clone().unwrap();
                spent.clone() + wt(cur, k + 1).clone() + rest == opt
            })
            .expect("an optimal continuation exists");
        spent = spent + wt(cur, next + 1).clone();
        unvisited &= !(1 << next);
        cur = next + 1;
        order.push(cur);
    }
    order
}

/// Minimum weight of a 1-tree with every degree at most `b[v]`, over all
/// roots. `None` if no such 1-tree exists.
pub fn exhaustive_one_tree(inst: &Instance, b: &[usize]) -> Result<Option<Rational>> {
    let mut best: Option<Rational> = None;
    for root in 0..inst.n() {
        if let Some(w) = exhaustive_one_tree_rooted(inst, b, root)? {
            if best.as_ref().is_none_or(|old| w < *old) {
                best = Some(w);
            }
        }
    }
    Ok(best)
}

/// As [`exhaustive_one_tree`] with the root fixed.
pub fn exhaustive_one_tree_rooted(inst: &Instance, b: &[usize], root: Vertex) -> Result<Option<Rational>> {
    let n = inst.n();
    if n > MAX_ONE_TREE {
        return Err(Error::Capacity { what: "exhaustive_one_tree vertex count", got: n, limit: MAX_ONE_TREE });
    }
    if b.len() != n {
        return Err(Error::Domain("degree bound vector has the wrong length".into()));
    }
    if b[root] < 2 {
        return Ok(None);
    }
    let rest: Vec<Vertex> = (0..n).filter(|&v| v != root).collect();
    let flat: Vec<&Rational> = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).map(|(u, v)| inst.weight(u, v)).collect();
    let best = match scaled_i128(flat.iter().copied(), n + 1) {
        Some((w, lcm)) => rooted_trees(n, &w, b, root, &rest).map(|v| Rational::new(v.into(), lcm)),
        None => rooted_trees(n, &flat.iter().map(|r| (*r).clone()).collect::<Vec<_>>(), b, root, &rest),
    };
    Ok(best)
}

/// Enumerates spanning trees of `rest` through Prüfer sequences and adds the
/// two cheapest admissible root edges to each.
fn rooted_trees<T: Scalar>(n: usize, w: &[T], b: &[usize], root: Vertex, rest: &[Vertex]) -> Option<T> {
    let k = rest.len();
    let wt = |u: usize, v: usize| &w[u * n + v];
    let mut best: Option<T> = None;
    let mut consider = |deg: &[usize], tree_weight: T| {
        // each non-root vertex takes at most one root edge
        let mut cands: Vec<&T> = (0..k)
            .filter(|&i| deg[i] < b[rest[i]])
            .map(|i| wt(root, rest[i]))
            .collect();
        if cands.len() < 2 {
            return;
        }
        cands.sort();
        let total = tree_weight + cands[0].clone() + cands[1].clone();
        if best.as_ref().is_none_or(|old| total < *old) {
            best = Some(total);
        }
    };
    if k == 2 {
        consider(&[1, 1], wt(rest[0], rest[1]).clone());
        return best;
    }
    let len = k - 2;
    let mut seq = vec![0usize; len];
    let mut deg = vec![0usize; k];
    loop {
        // decode
        deg.iter_mut().for_each(|d| *d = 1);
        for &s in &seq {
            deg[s] += 1;
        }
        let tree_deg = deg.clone();
        let mut weight = T::zero();
        let mut ok = true;
        for &s in &seq {
            let leaf = (0..k).find(|&i| deg[i] == 1).unwrap();
            weight = weight + wt(rest[leaf], rest[s]).clone();
            deg[leaf] = 0;
            deg[s] -= 1;
        }
        let last: Vec<usize> = (0..k).filter(|&i| deg[i] == 1).collect();
        weight = weight + wt(rest[last[0]], rest[last[1]]).clone();
        for i in 0..k {
            if tree_deg[i] > b[rest[i]] {
                ok = false;
            }
        }
        if ok {
            consider(&tree_deg, weight);
        }
        // next sequence
        let mut i = 0;
        loop {
            if i == len {
                return best;
            }
            seq[i] += 1;
            if seq[i] < k {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

/// Minimum `c·x` over 0/1 vectors satisfying `spec`, by Gray-code
/// enumeration of all edge subsets. Honours its degree bounds;
/// multiplicity bounds must be `[0,1]`.
pub fn exhaustive_parity_bmatching(spec: &ParitySpec) -> Result<Option<Rational>> {
    let m = spec.edges().len();
    if m > MAX_PARITY_EDGES {
        return Err(Error::Capacity { what: "exhaustive_parity_bmatching edge count", got: m, limit: MAX_PARITY_EDGES });
    }
    if (0..m).any(|e| spec.edge_bounds(e) != (0, 1)) {
        return Err(Error::Unsupported("exhaustive search needs multiplicity bounds [0,1]".into()));
    }
    let weights: Vec<&Rational> = spec.edges().iter().map(|e| &e.weight).collect();
    Ok(match scaled_i128(weights.iter().copied(), m + 1) {
        Some((w, lcm)) => gray_search(spec, &w).map(|v| Rational::new(v.into(), lcm)),
        None => gray_search(spec, &weights.iter().map(|r| (*r).clone()).collect::<Vec<_>>()),
    })
}

fn gray_search<T: Scalar>(spec: &ParitySpec, w: &[T]) -> Option<T> {
    let n = spec.n();
    let m = w.len();
    let bad = |v: usize, d: u32| -> bool {
        let (lo, hi) = spec.degree_bounds(v);
        let parity_bad = match spec.parity(v) {
            Some(Parity::Odd) => d.is_multiple_of(2),
            Some(Parity::Even) => d % 2 == 1,
            None => false,
        };
        d < lo || d > hi || parity_bad
    };
    let mut deg = vec![0u32; n];
    let mut violated = (0..n).filter(|&v| bad(v, 0)).count();
    let mut chosen = vec![false; m];
    let mut weight = T::zero();
    let mut best = if violated == 0 { Some(T::zero()) } else { None };
    for step in 1u64..(1u64 << m) {
        let e = step.trailing_zeros() as usize;
        let edge = &spec.edges()[e];
        for v in [edge.u, edge.v] {
            if bad(v, deg[v]) {
                violated -= 1;
            }
        }
        if chosen[e] {
            deg[edge.u] -= 1;
            deg[edge.v] -= 1;
            weight = weight - w[e].clone();
        } else {
            deg[edge.u] += 1;
            deg[edge.v] += 1;
            weight = weight + w[e].clone();
        }
        chosen[e] = !chosen[e];
        for v in [edge.u, edge.v] {
            if bad(v, deg[v]) {
                violated += 1;
            }
        }
        if violated == 0 && best.as_ref().is_none_or(|b| weight < *b) {
            best = Some(weight.clone());
        }
    }
    best
}

/// Minimum-weight perfect matching by recursion on the lowest unmatched
/// vertex. `None` if the graph has none (in particular for odd order).
pub fn exhaustive_perfect_matching(g: &MatchingGraph) -> Result<Option<Rational>> {
    let n = g.n();
    if n > MAX_PERFECT_MATCHING {
        return Err(Error::Capacity { what: "exhaustive_perfect_matching vertex count", got: n, limit: MAX_PERFECT_MATCHING });
    }
    if n % 2 == 1 {
        return Ok(None);
    }
    let mut adj: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); n];
    for e in g.edges() {
        adj[e.u].push((e.v, &e.weight));
        adj[e.v].push((e.u, &e.weight));
    }
    fn rec(adj: &[Vec<(usize, &Rational)>], used: &mut [bool]) -> Option<Rational> {
        let Some(u) = used.iter().position(|&x| !x) else {
            return Some(Rational::zero());
        };
        used[u] = true;
        let mut best: Option<Rational> = None;
        for &(v, w) in &adj[u] {
            if used[v] {
                continue;
            }
            used[v] = true;
            if let Some(rest) = rec(adj, used) {
                let total = rest + w;
                if best.as_ref().is_none_or(|b| total < *b) {
                    best = Some(total);
                }
            }
            used[v] = false;
        }
        used[u] = false;
        best
    }
    Ok(rec(&adj, &mut vec![false; n]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::*;
    use crate::instance::gen_uniform_beta;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn all_permutations_min(inst: &Instance) -> Rational {
        let n = inst.n();
        let mut rest: Vec<usize> = (1..n).collect();
        let mut best: Option<Rational> = None;
        permute(&mut rest, 0, &mut |p| {
            let mut order = vec![0];
            order.extend_from_slice(p);
            let w = inst.tour_weight(&order);
            if best.as_ref().is_none_or(|b| w < *b) {
                best = Some(w);
            }
        });
        best.unwrap()
    }

    fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, f);
            v.swap(k, i);
        }
    }

    #[test]
    fn tsp_fixtures() {
        assert_eq!(exact_tsp(&k4_all_one()).unwrap().weight, int(4));
        let c = exact_tsp(&fixture_c()).unwrap();
        assert_eq!(c.weight, int(10));
        assert_eq!(c.order, vec![0, 1, 2, 3]);
        assert_eq!(exact_tsp(&fixture_b()).unwrap().weight, int(5));
        assert_eq!(exact_tsp(&k4_hub()).unwrap().weight, int(22));
    }

    #[test]
    fn tsp_guards() {
        let big = gen_uniform_beta(21, &int(1), 0).unwrap();
        assert!(matches!(exact_tsp(&big), Err(Error::Capacity { .. })));
    }

    #[test]
    fn one_tree_fixtures() {
        assert_eq!(exhaustive_one_tree(&k4_all_one(), &[2; 4]).unwrap(), Some(int(4)));
        assert_eq!(exhaustive_one_tree(&k4_hub(), &[2; 4]).unwrap(), Some(int(22)));
        assert_eq!(exhaustive_one_tree(&k4_hub(), &[1; 4]).unwrap(), None);
        assert_eq!(exhaustive_one_tree_rooted(&k4_hub(), &[9; 4], 1).unwrap(), Some(int(13)));
        let big = gen_uniform_beta(10, &int(1), 0).unwrap();
        assert!(exhaustive_one_tree(&big, &[2; 10]).is_err());
    }

    #[test]
    fn perfect_matching_fixtures() {
        let mut g = MatchingGraph::new(4);
        for (u, v, w) in [(0, 1, 1), (2, 3, 2), (0, 2, 3), (1, 3, 4), (0, 3, 5), (1, 2, 6)] {
            g.add_edge(u, v, int(w)).unwrap();
        }
        assert_eq!(exhaustive_perfect_matching(&g).unwrap(), Some(int(3)));
        let mut single = MatchingGraph::new(2);
        single.add_edge(0, 1, int(7)).unwrap();
        assert_eq!(exhaustive_perfect_matching(&single).unwrap(), Some(int(7)));
        let mut path = MatchingGraph::new(3);
        path.add_edge(0, 1, int(1)).unwrap();
        path.add_edge(1, 2, int(1)).unwrap();
        assert_eq!(exhaustive_perfect_matching(&path).unwrap(), None);
        assert!(exhaustive_perfect_matching(&MatchingGraph::new(14)).is_err());
    }

    #[test]
    fn parity_guard() {
        let edges = (0..23)
            .map(|i| crate::parity::ParityEdge { u: i % 3, v: (i + 1) % 3, weight: int(1) })
            .collect();
        let spec = ParitySpec::new(3, edges, &[], &[0, 1, 2]).unwrap();
        assert!(matches!(exhaustive_parity_bmatching(&spec), Err(Error::Capacity { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn held_karp_matches_permutations(n in 3usize..8, num in 2i64..7, seed in 0u64..1000) {
            let inst = gen_uniform_beta(n, &rat(num, 2), seed).unwrap();
            let t = exact_tsp(&inst).unwrap();
            prop_assert_eq!(&t.weight, &all_permutations_min(&inst));
            prop_assert_eq!(inst.tour_weight(&t.order), t.weight);
        }

        #[test]
        fn one_tree_monotone_in_b(n in 4usize..7, seed in 0u64..1000, bits in any::<u32>()) {
            let inst = gen_uniform_beta(n, &int(2), seed).unwrap();
            let b: Vec<usize> = (0..n).map(|i| 1 + ((bits >> (2 * i)) & 1) as usize).collect();
            let looser: Vec<usize> = b.iter().map(|x| x + 1).collect();
            let tight = exhaustive_one_tree(&inst, &b).unwrap();
            let loose = exhaustive_one_tree(&inst, &looser).unwrap().unwrap();
            if let Some(t) = tight {
                prop_assert!(loose <= t);
            }
        }
    }
}
