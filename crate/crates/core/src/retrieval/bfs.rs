use alloc::vec::Vec;

use super::memo::{is_hub, BatchMemo};
use super::scratch::ScratchSpace;
use crate::error::{Error, Result};
use crate::graph::{normalize_nodes, Graph, Method, NodeId, SubEdge, Subgraph};

/// Hop-bounded expansion around `seeds`.
///
/// Frontier nodes are expanded in discovery order; each keeps at most
/// `fanout_cap` of its lowest-id unvisited neighbors, and expansion stops
/// once `max_nodes` nodes are collected. Seeds are always kept.
pub fn bfs_expand(g: &Graph, seeds: &[NodeId], hops: usize, fanout_cap: usize, max_nodes: usize) -> Result<Subgraph> {
    let mut scratch = ScratchSpace::new(g.node_count());
    bfs_expand_with(g, &mut scratch, seeds, hops, fanout_cap, max_nodes)
}

pub fn bfs_expand_with(
    g: &Graph,
    s: &mut ScratchSpace,
    seeds: &[NodeId],
    hops: usize,
    fanout_cap: usize,
    max_nodes: usize,
) -> Result<Subgraph> {
    bfs_expand_memo(g, s, None, seeds, hops, fanout_cap, max_nodes)
}

pub(crate) fn bfs_expand_memo(
    g: &Graph,
    s: &mut ScratchSpace,
    memo: Option<&mut BatchMemo>,
    seeds: &[NodeId],
    hops: usize,
    fanout_cap: usize,
    max_nodes: usize,
) -> Result<Subgraph> {
    let seeds = normalize_nodes(g, seeds)?;
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    s.ensure(g.node_count());
    let nodes = expand_into(g, s, &seeds, hops, fanout_cap, max_nodes);
    let edges = match memo {
        Some(memo) if !g.is_directed() => induced_edges_shared(g, s, memo, &nodes),
        _ => induced_visited_edges(g, s, &nodes),
    };
    Ok(Subgraph::from_parts(nodes, edges, seeds, Method::Bfs))
}

/// Collects the expansion into a sorted node list and leaves every returned
/// node stamped in the current epoch.
pub(crate) fn expand_into(
    g: &Graph,
    s: &mut ScratchSpace,
    seeds: &[NodeId],
    hops: usize,
    fanout_cap: usize,
    max_nodes: usize,
) -> Vec<NodeId> {
    s.begin();
    s.collected.clear();
    s.frontier.clear();
    for &u in seeds {
        s.visit(u);
        s.collected.push(u);
        s.frontier.push(u);
    }
    'levels: for _ in 0..hops {
        s.next.clear();
        for fi in 0..s.frontier.len() {
            let u = s.frontier[fi];
            let mut taken = 0;
            for &v in g.adj(u) {
                if taken == fanout_cap {
                    break;
                }
                if s.visited(v) {
                    continue;
                }
                if s.collected.len() >= max_nodes {
                    break 'levels;
                }
                s.visit(v);
                s.collected.push(v);
                s.next.push(v);
                taken += 1;
            }
        }
        core::mem::swap(&mut s.frontier, &mut s.next);
        if s.frontier.is_empty() {
            break;
        }
    }
    let mut nodes = s.collected.clone();
    nodes.sort_unstable();
    nodes
}

/// Edges of `g` among `nodes`, all of which must be stamped in the current epoch.
pub(crate) fn induced_visited_edges(g: &Graph, s: &ScratchSpace, nodes: &[NodeId]) -> Vec<SubEdge> {
    let mut edges = Vec::new();
    for &u in nodes {
        let w = g.adj_weights(u);
        for (i, &v) in g.adj(u).iter().enumerate() {
            if (g.is_directed() || u < v) && s.visited(v) {
                edges.push(SubEdge { src: u, dst: v, weight: w.map_or(1.0, |w| w[i]) });
            }
        }
    }
    edges
}

/// [`induced_visited_edges`] for undirected graphs without scanning the
/// full adjacency of hubs: a hub-hub edge comes from the cached hub row of
/// its lower endpoint, every other edge from the low-degree endpoint's list.
pub(crate) fn induced_edges_shared(g: &Graph, s: &ScratchSpace, memo: &mut BatchMemo, nodes: &[NodeId]) -> Vec<SubEdge> {
    let mut edges = Vec::new();
    for &u in nodes {
        if is_hub(g, u) {
            for &(v, weight) in memo.hub_row(g, u) {
                if u < v && s.visited(v) {
                    edges.push(SubEdge { src: u, dst: v, weight });
                }
            }
        } else {
            let w = g.adj_weights(u);
            for (i, &v) in g.adj(u).iter().enumerate() {
                if s.visited(v) && (u < v || is_hub(g, v)) {
                    edges.push(SubEdge { src: u.min(v), dst: u.max(v), weight: w.map_or(1.0, |w| w[i]) });
                }
            }
        }
    }
    edges.sort_unstable_by_key(|e| (e.src, e.dst));
    edges
}
