//! Exact maximum flow / minimum cut (Edmonds–Karp on a dense matrix).

use std::collections::VecDeque;

use num_traits::{Signed, Zero};

use crate::rational::Rational;

/// Arc capacity; `None` is infinite.
pub(crate) type Capacity = Option<Rational>;

/// Minimum `s`–`t` cut. Returns its capacity and the source side (the
/// vertices reachable from `s` in the final residual graph). Infinite arcs
/// are replaced by one more than the total finite capacity, so a finite
/// answer is exact whenever some finite cut exists.
pub(crate) fn min_cut(n: usize, arcs: &[(usize, usize, Capacity)], s: usize, t: usize) -> (Rational, Vec<bool>) {
    let big: Rational = arcs.iter().filter_map(|(_, _, c)| c.as_ref()).sum::<Rational>() + Rational::from_integer(1.into());
    let mut cap = vec![vec![Rational::zero(); n]; n];
    for (u, v, c) in arcs {
        cap[*u][*v] += c.clone().unwrap_or_else(|| big.clone());
    }
    let mut flow = Rational::zero();
    loop {
        let mut parent = vec![usize::MAX; n];
        parent[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for v in 0..n {
                if parent[v] == usize::MAX && cap[u][v].is_positive() {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[t] == usize::MAX {
            let side = parent.iter().map(|&p| p != usize::MAX).collect();
            return (flow, side);
        }
        let mut bottleneck: Option<Rational> = None;
        let mut v = t;
        while v != s {
            let u = parent[v];
            if bottleneck.as_ref().is_none_or(|b| cap[u][v] < *b) {
                bottleneck = Some(cap[u][v].clone());
            }
            v = u;
        }
        let b = bottleneck.unwrap();
        let mut v = t;
        while v != s {
            let u = parent[v];
            cap[u][v] -= &b;
            cap[v][u] += &b;
            v = u;
        }
        flow += b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn classic_network() {
        // s=0, t=3
        let arcs = vec![
            (0, 1, Some(int(3))),
            (0, 2, Some(int(2))),
            (1, 2, Some(rat(1, 2))),
            (1, 3, Some(int(2))),
            (2, 3, Some(int(3))),
        ];
        let (v, side) = min_cut(4, &arcs, 0, 3);
        // the cut {0,1} | {2,3} has capacity 2 + 1/2 + 2
        assert_eq!(v, rat(9, 2));
        assert!(side[0] && !side[3]);
    }

    #[test]
    fn infinite_arcs_never_cut() {
        let arcs = vec![(0, 1, None), (1, 2, Some(int(4))), (0, 2, Some(int(1)))];
        let (v, side) = min_cut(3, &arcs, 0, 2);
        assert_eq!(v, int(5));
        assert_eq!(side, vec![true, true, false]);
    }
}
