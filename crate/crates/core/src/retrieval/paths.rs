use alloc::vec::Vec;

use super::scratch::{DistEntry, ScratchSpace, NONE};
use crate::error::{Error, Result};
use crate::graph::{normalize_nodes, Graph, NodeId};

/// Multi-source shortest-path forest.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPaths {
    /// Distance to the nearest source; `f64::INFINITY` when unreachable.
    pub dist: Vec<f64>,
    pub nearest: Vec<Option<NodeId>>,
    pub parent: Vec<Option<NodeId>>,
}

impl ShortestPaths {
    /// Nodes from the nearest source to `target`, or `None` if unreachable.
    pub fn path_to(&self, target: NodeId) -> Option<Vec<NodeId>> {
        if !self.dist.get(target as usize)?.is_finite() {
            return None;
        }
        let mut path = alloc::vec![target];
        let mut u = target;
        while let Some(p) = self.parent[u as usize] {
            path.push(p);
            u = p;
        }
        path.reverse();
        Some(path)
    }
}

/// Weighted distances from the closest of `sources` to every node.
///
/// Dijkstra semantics: nodes settle in `(distance, id)` order and a node's
/// parent is the first settled neighbor that reached it with its final
/// distance. Graphs with one positive uniform weight take a BFS path that
/// yields identical distances and parents.
pub fn multi_source_distances(g: &Graph, sources: &[NodeId]) -> Result<ShortestPaths> {
    let sources = normalize_nodes(g, sources)?;
    if sources.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let mut s = ScratchSpace::new(g.node_count());
    search(g, &mut s, &sources, &[]);
    let n = g.node_count();
    let mut out = ShortestPaths {
        dist: alloc::vec![f64::INFINITY; n],
        nearest: alloc::vec![None; n],
        parent: alloc::vec![None; n],
    };
    for u in 0..n {
        if s.visited(u as NodeId) {
            out.dist[u] = s.dist[u];
            out.nearest[u] = Some(s.nearest[u]);
            out.parent[u] = (s.parent[u] != NONE).then_some(s.parent[u]);
        }
    }
    Ok(out)
}

/// Runs the search in a fresh epoch. `sources` must be sorted and unique.
///
/// With a non-empty sorted `targets` the search stops once every target is
/// settled; distances and parent chains of settled nodes are final, other
/// stamped nodes may hold tentative values. On unit-weight graphs levels are
/// completed before stopping, so every stamped node is final. Returns true
/// if the search ran out of nodes.
pub(crate) fn search(g: &Graph, s: &mut ScratchSpace, sources: &[NodeId], targets: &[NodeId]) -> bool {
    s.ensure(g.node_count());
    s.begin();
    let mut remaining = targets.len();
    for &src in sources {
        s.visit(src);
        s.dist[src as usize] = 0.0;
        s.parent[src as usize] = NONE;
        s.nearest[src as usize] = src;
        if targets.binary_search(&src).is_ok() {
            remaining -= 1;
        }
    }
    if !targets.is_empty() && remaining == 0 {
        return false;
    }
    match g.uniform_weight() {
        Some(w) if w > 0.0 => bfs_levels(g, s, sources, targets, remaining, w),
        _ => dijkstra(g, s, sources, targets, remaining),
    }
}

/// Returns true if the frontier ran dry before all targets were found.
fn bfs_levels(
    g: &Graph,
    s: &mut ScratchSpace,
    sources: &[NodeId],
    targets: &[NodeId],
    mut remaining: usize,
    w: f64,
) -> bool {
    s.frontier.clear();
    s.frontier.extend_from_slice(sources);
    while !s.frontier.is_empty() {
        s.next.clear();
        for fi in 0..s.frontier.len() {
            let u = s.frontier[fi];
            let du = s.dist[u as usize] + w;
            let nu = s.nearest[u as usize];
            for &v in g.adj(u) {
                let vi = v as usize;
                if !s.visited(v) {
                    s.visit(v);
                    s.dist[vi] = du;
                    s.parent[vi] = u;
                    s.nearest[vi] = nu;
                    s.next.push(v);
                    if !targets.is_empty() && targets.binary_search(&v).is_ok() {
                        remaining -= 1;
                    }
                } else if s.dist[vi] == du && u < s.parent[vi] {
                    // Same level: the lowest-id predecessor is the one
                    // Dijkstra would settle first.
                    s.parent[vi] = u;
                    s.nearest[vi] = nu;
                }
            }
        }
        if !targets.is_empty() && remaining == 0 {
            return false;
        }
        core::mem::swap(&mut s.frontier, &mut s.next);
    }
    true
}

fn dijkstra(g: &Graph, s: &mut ScratchSpace, sources: &[NodeId], targets: &[NodeId], mut remaining: usize) -> bool {
    s.heap.clear();
    for &src in sources {
        s.heap.push(DistEntry { dist: 0.0, node: src });
    }
    while let Some(DistEntry { dist: d, node: u }) = s.heap.pop() {
        if d > s.dist[u as usize] {
            continue;
        }
        if d > 0.0 || sources.binary_search(&u).is_err() {
            // Sources were counted up front.
            if !targets.is_empty() && targets.binary_search(&u).is_ok() {
                remaining -= 1;
                if remaining == 0 {
                    return false;
                }
            }
        }
        let nu = s.nearest[u as usize];
        let weights = g.adj_weights(u);
        for (i, &v) in g.adj(u).iter().enumerate() {
            let nd = d + weights.map_or(1.0, |w| w[i]);
            let vi = v as usize;
            if !s.visited(v) || nd < s.dist[vi] {
                s.visit(v);
                s.dist[vi] = nd;
                s.parent[vi] = u;
                s.nearest[vi] = nu;
                s.heap.push(DistEntry { dist: nd, node: v });
            }
        }
    }
    true
}
