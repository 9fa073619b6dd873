use alloc::vec::Vec;
use core::cmp::Reverse;

use super::bfs::{expand_into, induced_visited_edges};
use super::scratch::ScratchSpace;
use crate::error::{Error, Result};
use crate::graph::{normalize_nodes, Graph, Method, NodeId, Subgraph};

/// Seed-anchored dense subgraph by greedy peeling.
///
/// The candidate pool is the `pool_hops` neighborhood of the seeds. Non-seed
/// nodes are peeled in order of minimum current degree (ties by id) and the
/// densest intermediate set (edges / nodes) is kept, preferring the smaller
/// set on ties. If that set exceeds `max_nodes`, peeling continues until it
/// fits or only seeds remain.
pub fn dense_subgraph(g: &Graph, seeds: &[NodeId], pool_hops: usize, max_nodes: usize) -> Result<Subgraph> {
    let mut scratch = ScratchSpace::new(g.node_count());
    dense_subgraph_with(g, &mut scratch, seeds, pool_hops, max_nodes)
}

pub fn dense_subgraph_with(
    g: &Graph,
    s: &mut ScratchSpace,
    seeds: &[NodeId],
    pool_hops: usize,
    max_nodes: usize,
) -> Result<Subgraph> {
    let seeds = normalize_nodes(g, seeds)?;
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    if g.is_directed() {
        return Err(Error::invalid("graph", "dense subgraphs need an undirected graph"));
    }
    s.ensure(g.node_count());
    let pool = expand_into(g, s, &seeds, pool_hops, usize::MAX, usize::MAX);
    let pool_edges = induced_visited_edges(g, s, &pool);
    let n = pool.len();
    for (i, &u) in pool.iter().enumerate() {
        s.local[u as usize] = i as u32;
    }

    // Local CSR over the pool.
    s.loc_offsets.clear();
    s.loc_offsets.resize(n + 1, 0);
    for e in &pool_edges {
        s.loc_offsets[s.local[e.src as usize] as usize + 1] += 1;
        s.loc_offsets[s.local[e.dst as usize] as usize + 1] += 1;
    }
    for i in 0..n {
        s.loc_offsets[i + 1] += s.loc_offsets[i];
    }
    s.local_deg.clear();
    s.local_deg.extend(s.loc_offsets.windows(2).map(|w| w[1] - w[0]));
    s.loc_adj.clear();
    s.loc_adj.resize(2 * pool_edges.len(), 0);
    {
        // Reuse `order` as the fill cursor before it records the peel order.
        s.order.clear();
        s.order.extend(s.loc_offsets[..n].iter().map(|&o| o as u32));
        for e in &pool_edges {
            let (a, b) = (s.local[e.src as usize] as usize, s.local[e.dst as usize] as usize);
            s.loc_adj[s.order[a] as usize] = b as u32;
            s.order[a] += 1;
            s.loc_adj[s.order[b] as usize] = a as u32;
            s.order[b] += 1;
        }
    }

    s.removed.clear();
    s.removed.resize(n, false);
    s.peel_heap.clear();
    for (i, &u) in pool.iter().enumerate() {
        if seeds.binary_search(&u).is_err() {
            s.peel_heap.push(Reverse((s.local_deg[i], i as u32)));
        }
    }

    let mut edges = pool_edges.len() as u64;
    let mut size = n as u64;
    let (mut best_edges, mut best_size, mut best_step) = (edges, size, 0usize);
    s.order.clear();
    while let Some(Reverse((deg, i))) = s.peel_heap.pop() {
        let i = i as usize;
        if s.removed[i] || deg != s.local_deg[i] {
            continue;
        }
        s.removed[i] = true;
        s.order.push(i as u32);
        edges -= deg as u64;
        size -= 1;
        for k in s.loc_offsets[i]..s.loc_offsets[i + 1] {
            let j = s.loc_adj[k] as usize;
            if !s.removed[j] {
                s.local_deg[j] -= 1;
                if seeds.binary_search(&pool[j]).is_err() {
                    s.peel_heap.push(Reverse((s.local_deg[j], j as u32)));
                }
            }
        }
        // edges/size >= best_edges/best_size, compared exactly.
        if edges * best_size >= best_edges * size {
            best_edges = edges;
            best_size = size;
            best_step = s.order.len();
        }
    }

    let mut keep_removed = best_step;
    while n - keep_removed > max_nodes && keep_removed < s.order.len() {
        keep_removed += 1;
    }
    s.removed.iter_mut().for_each(|r| *r = false);
    for &i in &s.order[..keep_removed] {
        s.removed[i as usize] = true;
    }
    let nodes: Vec<NodeId> = pool.iter().enumerate().filter(|(i, _)| !s.removed[*i]).map(|(_, &u)| u).collect();
    let kept = pool_edges
        .into_iter()
        .filter(|e| !s.removed[s.local[e.src as usize] as usize] && !s.removed[s.local[e.dst as usize] as usize])
        .collect();
    Ok(Subgraph::from_parts(nodes, kept, seeds, Method::Dense))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, Edge};
    use alloc::vec;

    fn triangle_pendant() -> Graph {
        build_graph(&[Edge::new(0, 1), Edge::new(1, 2), Edge::new(0, 2), Edge::new(2, 3)], 4, false).unwrap()
    }

    #[test]
    fn triangle_beats_pendant() {
        let s = dense_subgraph(&triangle_pendant(), &[0], 2, usize::MAX).unwrap();
        assert_eq!(s.nodes, vec![0, 1, 2]);
        assert_eq!(s.density(), 1.0);
        assert_eq!(s.provenance.method, Method::Dense);
    }

    #[test]
    fn isolated_seed() {
        let g = build_graph(&[Edge::new(0, 1)], 3, false).unwrap();
        let s = dense_subgraph(&g, &[2], 3, 10).unwrap();
        assert_eq!(s.nodes, vec![2]);
        assert_eq!(s.density(), 0.0);
    }

    #[test]
    fn max_nodes_truncates_but_keeps_seeds() {
        let s = dense_subgraph(&triangle_pendant(), &[3], 2, 2).unwrap();
        assert_eq!(s.nodes.len(), 2);
        assert!(s.contains(3));
        let s = dense_subgraph(&triangle_pendant(), &[0, 3], 2, 1).unwrap();
        assert_eq!(s.nodes, vec![0, 3]);
    }

    #[test]
    fn empty_seeds() {
        assert_eq!(dense_subgraph(&triangle_pendant(), &[], 1, 1), Err(Error::EmptySeeds));
    }
}
