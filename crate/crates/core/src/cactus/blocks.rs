//! Block decomposition of undirected multigraphs.

use std::collections::BTreeSet;

use crate::instance::Vertex;

/// Biconnected components of the multigraph on `n` vertices, as sorted lists
/// of edge indices; parallel edges are told apart by index. Bridges come out
/// as single-edge blocks. Blocks are sorted.
pub fn biconnected_blocks(n: usize, edges: &[(Vertex, Vertex)]) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<(Vertex, usize)>> = vec![Vec::new(); n];
    for (i, &(u, v)) in edges.iter().enumerate() {
        adj[u].push((v, i));
        adj[v].push((u, i));
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut edge_stack: Vec<usize> = Vec::new();
    let mut blocks = Vec::new();
    for s in 0..n {
        if disc[s] != usize::MAX || adj[s].is_empty() {
            continue;
        }
        disc[s] = time;
        low[s] = time;
        time += 1;
        // (vertex, edge used to enter it, next adjacency position)
        let mut stack: Vec<(Vertex, Option<usize>, usize)> = vec![(s, None, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, parent_edge, pos) = *top;
            if pos < adj[v].len() {
                top.2 += 1;
                let (w, e) = adj[v][pos];
                if Some(e) == parent_edge {
                    continue;
                }
                if disc[w] == usize::MAX {
                    edge_stack.push(e);
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, Some(e), 0));
                } else if disc[w] < disc[v] {
                    edge_stack.push(e);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let (Some(&(u, _, _)), Some(e)) = (stack.last(), parent_edge) {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= disc[u] {
                        let mut block = Vec::new();
                        while let Some(f) = edge_stack.pop() {
                            block.push(f);
                            if f == e {
                                break;
                            }
                        }
                        block.sort_unstable();
                        blocks.push(block);
                    }
                }
            }
        }
    }
    blocks.sort();
    blocks
}

/// Connected on the vertices it touches, and every block is a cycle of
/// length at least two, so the graph is 2-edge-connected and no edge lies
/// on two cycles.
pub fn is_cactus(n: usize, edges: &[(Vertex, Vertex)]) -> bool {
    if edges.is_empty() {
        return false;
    }
    let touched: BTreeSet<Vertex> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    let blocks = biconnected_blocks(n, edges);
    let mut seen = BTreeSet::new();
    let mut stack = vec![edges[0].0];
    seen.insert(edges[0].0);
    while let Some(u) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == u && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    if seen != touched {
        return false;
    }
    blocks.iter().all(|block| {
        let mut deg = std::collections::BTreeMap::new();
        for &i in block {
            *deg.entry(edges[i].0).or_insert(0) += 1;
            *deg.entry(edges[i].1).or_insert(0) += 1;
        }
        block.len() >= 2 && deg.values().all(|&d| d == 2) && deg.len() == block.len()
    })
}
