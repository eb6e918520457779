use std::collections::{BTreeMap, BTreeSet};

use crate::backbone::ArcSequence;
use crate::error::{Error, Result};
use crate::instance::Vertex;

use super::blocks::{biconnected_blocks, is_cactus};
use super::{BiDigraph, Cycle, TraceEvent};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    /// Sorted arc ids.
    pub arcs: Vec<usize>,
    /// `None` only for the block containing `Ĉ`.
    pub exit: Option<Vertex>,
}

/// The cactus `K` grown inside the contracted backbone. Block 0 contains
/// `V(Ĉ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cactus {
    pub graph: BiDigraph,
    pub blocks: Vec<Block>,
    pub in_k: Vec<bool>,
    /// Rule-1 arcs reversed, in order.
    pub entry_sites: Vec<usize>,
}

impl Cactus {
    pub fn root_block(&self) -> usize {
        0
    }

    pub fn block_vertices(&self, b: usize) -> BTreeSet<Vertex> {
        self.blocks[b]
            .arcs
            .iter()
            .flat_map(|&id| {
                let (u, v) = self.graph.arc(id).unwrap().endpoints();
                [u, v]
            })
            .collect()
    }

    fn k_arcs(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.blocks.iter().flat_map(|b| b.arcs.iter().copied()).collect();
        all.sort_unstable();
        all
    }

    /// Recomputes the block decomposition of `K` and checks it against the
    /// tracked blocks: `K` is a cactus, and each block other than the root
    /// has exactly one exit point, lying on it.
    pub fn check(&self) -> Result<()> {
        let ids = self.k_arcs();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invariant("an arc lies in two blocks"));
        }
        let mut edges = Vec::with_capacity(ids.len());
        for &id in &ids {
            let arc = self.graph.arc(id).ok_or_else(|| Error::invariant(format!("block arc {id} is missing")))?;
            let (u, v) = arc.endpoints();
            if !self.in_k[u] || !self.in_k[v] {
                return Err(Error::invariant(format!("arc {id} leaves V(K)")));
            }
            edges.push((u, v));
        }
        if !is_cactus(self.graph.n(), &edges) {
            return Err(Error::invariant("K is not a cactus"));
        }
        let found: BTreeSet<Vec<usize>> = biconnected_blocks(self.graph.n(), &edges)
            .into_iter()
            .map(|b| b.into_iter().map(|i| ids[i]).collect())
            .collect();
        let tracked: BTreeSet<Vec<usize>> = self.blocks.iter().map(|b| b.arcs.clone()).collect();
        if found != tracked {
            return Err(Error::invariant("tracked blocks differ from the block decomposition"));
        }
        for (i, b) in self.blocks.iter().enumerate() {
            match (i == self.root_block(), b.exit) {
                (true, None) => {}
                (false, Some(v)) if self.block_vertices(i).contains(&v) => {}
                _ => return Err(Error::invariant(format!("block {i} does not have exactly one exit point"))),
            }
        }
        Ok(())
    }
}

/// Grows `K` from the cycle through vertex 0 until it spans every vertex.
pub fn grow_cactus(h_prime: BiDigraph, h_arcs: &ArcSequence) -> Result<Cactus> {
    grow_cactus_observed(h_prime, h_arcs, &mut Vec::new(), |_| Ok(()))
}

/// As [`grow_cactus`], recording trace events and handing every
/// intermediate `K` to `observe`.
pub fn grow_cactus_observed(
    h_prime: BiDigraph,
    h_arcs: &ArcSequence,
    trace: &mut Vec<TraceEvent>,
    mut observe: impl FnMut(&Cactus) -> Result<()>,
) -> Result<Cactus> {
    let n = h_prime.n();
    let cycles: Vec<Cycle> = h_prime.cycles()?;
    let mut cycle_of = vec![0; n];
    for (i, c) in cycles.iter().enumerate() {
        for &v in &c.vertices {
            cycle_of[v] = i;
        }
    }
    let root = &cycles[cycle_of[0]];
    let mut in_k = vec![false; n];
    for &v in &root.vertices {
        in_k[v] = true;
    }
    let mut root_arcs = root.arcs.clone();
    root_arcs.sort_unstable();
    let mut block_of: BTreeMap<usize, usize> = root_arcs.iter().map(|&a| (a, 0)).collect();
    let mut k = Cactus {
        graph: h_prime,
        blocks: vec![Block { arcs: root_arcs, exit: None }],
        in_k,
        entry_sites: Vec::new(),
    };
    observe(&k)?;
    let original = h_arcs.by_id();
    while k.in_k.iter().any(|&x| !x) {
        let site = original.iter().find_map(|a| {
            if k.in_k[a.tail] || !k.in_k[a.head] {
                return None;
            }
            let j = k.graph.join_id(a.tail);
            let arc = k.graph.arc(j)?;
            let block = *block_of.get(&j)?;
            Some((j, arc.ends, a.tail, block))
        });
        let (j, ends, v, block) = site.ok_or_else(|| Error::invariant("K has no entry site but does not span"))?;
        trace.push(TraceEvent::EntrySite { arc: j, ends, vertex: v, block });
        let restored = k.graph.reverse_rule1(j)?;
        trace.push(TraceEvent::Reverse { arc: j, restored });
        k.entry_sites.push(j);
        block_of.remove(&j);
        let arcs = &mut k.blocks[block].arcs;
        arcs.retain(|&a| a != j);
        arcs.extend(restored);
        arcs.sort_unstable();
        for a in restored {
            block_of.insert(a, block);
        }
        let cycle = &cycles[cycle_of[v]];
        let new_block = k.blocks.len();
        let mut arcs = cycle.arcs.clone();
        arcs.sort_unstable();
        for &a in &arcs {
            block_of.insert(a, new_block);
        }
        for &w in &cycle.vertices {
            k.in_k[w] = true;
        }
        k.blocks.push(Block { arcs, exit: Some(v) });
        trace.push(TraceEvent::ExitPoint { vertex: v, block: new_block });
        observe(&k)?;
    }
    Ok(k)
}
