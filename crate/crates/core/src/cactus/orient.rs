use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::{Instance, Vertex};
use crate::rational::Rational;

use super::grow::Cactus;
use super::{BiArc, BiDigraph, Ends, TraceEvent};

/// One pass of the orientation loop: the block hanging at `exit` starts
/// along `cheap`, and `expensive` is the other block edge at `exit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub exit: Vertex,
    pub cheap: usize,
    pub expensive: usize,
}

/// `K′`: every block of `K` oriented as a directed cycle. Arc ids are those
/// of `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KPrime {
    pub graph: BiDigraph,
    /// `P′`: `K′` arc id to the backbone edges it stands for.
    pub p_prime: BTreeMap<usize, Vec<usize>>,
    pub decisions: Vec<Decision>,
}

/// Orients the root block from its smallest vertex towards the smaller
/// neighbour, and every other block from its exit point along the cheaper
/// of its two block edges there (ties to the smaller id).
pub fn orient_blocks(k: &Cactus, trace: &mut Vec<TraceEvent>) -> Result<KPrime> {
    let n = k.graph.n();
    let mut arcs = Vec::new();
    let mut p_prime = BTreeMap::new();
    let mut decisions = Vec::new();
    for (b, block) in k.blocks.iter().enumerate() {
        let at = |v: Vertex| -> Vec<&BiArc> {
            block.arcs.iter().map(|&id| k.graph.arc(id).unwrap()).filter(|a| a.touches(v)).collect()
        };
        let (start, first) = match block.exit {
            None if b == k.root_block() => {
                let s = *k.block_vertices(b).iter().next().ok_or_else(|| Error::invariant("empty block"))?;
                let first = at(s)
                    .into_iter()
                    .min_by_key(|a| (a.other(s), a.id))
                    .ok_or_else(|| Error::invariant("root block has no arc at its smallest vertex"))?
                    .id;
                trace.push(TraceEvent::OrientRoot { block: b, start: s, first });
                (s, first)
            }
            None => return Err(Error::invariant(format!("block {b} has no exit point"))),
            Some(v) => {
                let here = at(v);
                if here.len() != 2 {
                    return Err(Error::invariant(format!("exit point {v} has {} arcs in block {b}", here.len())));
                }
                let (e, e2) = if here[1].weight < here[0].weight { (here[1], here[0]) } else { (here[0], here[1]) };
                decisions.push(Decision { exit: v, cheap: e.id, expensive: e2.id });
                trace.push(TraceEvent::Orient { block: b, start: v, cheap: e.id, expensive: e2.id });
                (v, e.id)
            }
        };
        let mut cur = start;
        let mut via = first;
        loop {
            let arc = k.graph.arc(via).unwrap();
            let next = arc.other(cur);
            arcs.push(BiArc {
                id: via,
                ends: Ends::Directed { tail: cur, head: next },
                weight: arc.weight.clone(),
                join: None,
            });
            let class = match arc.provenance() {
                Some((_, ids)) => ids.to_vec(),
                None => vec![via],
            };
            p_prime.insert(via, class);
            if next == start {
                break;
            }
            via = at(next)
                .into_iter()
                .find(|a| a.id != via)
                .ok_or_else(|| Error::invariant(format!("block {b} is not a cycle")))?
                .id;
            cur = next;
        }
    }
    let graph = BiDigraph::new(n, k.graph.base() + n, arcs)?;
    Ok(KPrime { graph, p_prime, decisions })
}

/// `K″` as a Hamiltonian tour with its partition families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour {
    pub graph: BiDigraph,
    /// Vertex order from 0.
    pub order: Vec<Vertex>,
    pub weight: Rational,
    /// `P″`: tour arc id to `K′` arc ids.
    pub p_second: BTreeMap<usize, Vec<usize>>,
    /// `P`: tour arc id to backbone edge ids.
    pub p: BTreeMap<usize, Vec<usize>>,
}

/// Rule 1 at every degree-4 vertex of `K′`; the result must be one cycle
/// through all vertices.
pub fn finalize_tour(inst: &Instance, kp: &KPrime, trace: &mut Vec<TraceEvent>) -> Result<Tour> {
    let mut graph = kp.graph.clone();
    let joined = graph.contract_to_cycles(inst)?;
    for v in joined {
        let arc = graph.arc(graph.join_id(v)).unwrap();
        let (_, replaced) = arc.provenance().unwrap();
        trace.push(TraceEvent::Rule1 { stage: "finalize", vertex: v, replaced, arc: arc.id, ends: arc.ends });
    }
    let cycles = graph.cycles()?;
    if cycles.len() != 1 {
        return Err(Error::invariant(format!("K'' has {} cycles", cycles.len())));
    }
    let mut p_second = BTreeMap::new();
    let mut p = BTreeMap::new();
    for arc in graph.arcs() {
        let class = match arc.provenance() {
            Some((_, ids)) => ids.to_vec(),
            None => vec![arc.id],
        };
        let mut h: Vec<usize> = class.iter().flat_map(|g| kp.p_prime[g].iter().copied()).collect();
        h.sort_unstable();
        p.insert(arc.id, h);
        p_second.insert(arc.id, class);
    }
    let weight = graph.arcs().map(|a| &a.weight).sum();
    let order = cycles.into_iter().next().unwrap().vertices;
    Ok(Tour { graph, order, weight, p_second, p })
}

#[cfg(test)]
mod tests {
    use super::super::grow::grow_cactus;
    use super::super::tests::fixture_e_digraph;
    use super::*;
    use crate::rational::int;

    #[test]
    fn fixture_e_orientation_and_tour() {
        let (inst, mut d, seq) = fixture_e_digraph();
        d.contract_to_cycles(&inst).unwrap();
        let k = grow_cactus(d, &seq).unwrap();
        let mut trace = Vec::new();
        let kp = orient_blocks(&k, &mut trace).unwrap();
        // block (2,4,5): {2,4} is the Rule-1 arc at vertex 1, {2,5} is edge 6
        assert_eq!(kp.decisions, vec![Decision { exit: 2, cheap: 8 + 1, expensive: 6 }]);
        let directed: Vec<(Vertex, Vertex)> = kp.graph.arcs().map(|a| a.endpoints()).collect();
        for arc in [(2, 3), (3, 0), (0, 1), (1, 2), (2, 4), (4, 5), (5, 2)] {
            assert!(directed.contains(&arc), "missing {arc:?}");
        }
        assert_eq!(kp.p_prime[&9], vec![1, 4]);
        let tour = finalize_tour(&inst, &kp, &mut trace).unwrap();
        let mut pairs: Vec<(Vertex, Vertex)> = tour
            .graph
            .arcs()
            .map(|a| {
                let (u, v) = a.endpoints();
                (u.min(v), u.max(v))
            })
            .collect();
        pairs.sort();
        assert_eq!(pairs, vec![(0, 1), (0, 3), (1, 2), (2, 5), (3, 4), (4, 5)]);
        let joined = tour.graph.arc(tour.graph.join_id(2)).unwrap();
        assert_eq!(joined.ends, Ends::DoubleHead(3, 4));
        assert_eq!(tour.p[&joined.id].len(), 3);
        assert_eq!(tour.weight, int(2 * 6));
    }
}
