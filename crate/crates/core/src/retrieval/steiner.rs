use alloc::vec::Vec;

use super::memo::BatchMemo;
use super::paths::search;
use super::scratch::{ScratchSpace, NONE};
use crate::error::{Error, Result};
use crate::graph::{normalize_nodes, Graph, Method, NodeId, SubEdge, Subgraph};

/// Approximate minimum Steiner tree over `terminals` (within twice optimal).
///
/// Builds the metric closure over the terminals, takes its MST, expands each
/// closure edge into a real shortest path, takes the MST of the union of
/// those paths, and prunes non-terminal leaves.
pub fn steiner_subgraph(g: &Graph, terminals: &[NodeId]) -> Result<Subgraph> {
    let mut scratch = ScratchSpace::new(g.node_count());
    steiner_subgraph_with(g, &mut scratch, terminals)
}

pub fn steiner_subgraph_with(g: &Graph, s: &mut ScratchSpace, terminals: &[NodeId]) -> Result<Subgraph> {
    steiner_subgraph_memo(g, s, None, terminals)
}

pub(crate) fn steiner_subgraph_memo(
    g: &Graph,
    s: &mut ScratchSpace,
    mut memo: Option<&mut BatchMemo>,
    terminals: &[NodeId],
) -> Result<Subgraph> {
    let terminals = normalize_nodes(g, terminals)?;
    if terminals.is_empty() {
        return Err(Error::EmptySeeds);
    }
    if g.is_directed() {
        return Err(Error::invalid("graph", "Steiner trees need an undirected graph"));
    }
    let t = terminals.len();
    if t == 1 {
        return Ok(Subgraph::from_parts(terminals.clone(), Vec::new(), terminals, Method::Steiner));
    }

    // Metric closure, one early-stopping search per terminal. Search i only
    // needs terminals after i since distances are symmetric.
    s.closure.clear();
    s.closure.resize(t * t, 0.0);
    s.paths.clear();
    s.path_ranges.clear();
    s.path_ranges.resize(t * t, (0, 0));
    let n = g.node_count();
    for i in 0..t - 1 {
        let source = terminals[i];
        let targets = &terminals[i + 1..];
        match memo.as_deref_mut().and_then(|m| m.region(n, source)) {
            Some(r) => {
                if !r.answers(targets) {
                    r.fill(g, source, targets, &mut s.frontier, &mut s.next);
                }
                let w = g.uniform_weight().expect("regions are planned for uniform weights");
                close_row(s, &terminals, i, |_, u| r.dist(u, w), |_, u| r.parent(u))?;
            }
            None => {
                search(g, s, &terminals[i..=i], targets);
                close_row(s, &terminals, i, |s, u| s.visited(u).then(|| s.dist[u as usize]), |s, u| s.parent[u as usize])?;
            }
        }
    }

    // MST of the closure.
    s.pairs.clear();
    for i in 0..t {
        for j in i + 1..t {
            s.pairs.push((s.closure[i * t + j], i, j));
        }
    }
    s.pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    s.dsu.reset(t);
    s.tree_edges.clear();
    for pi in 0..s.pairs.len() {
        let (_, i, j) = s.pairs[pi];
        if !s.dsu.union(i, j) {
            continue;
        }
        let (start, end) = s.path_ranges[i * t + j];
        for k in start..end - 1 {
            let (a, b) = (s.paths[k], s.paths[k + 1]);
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            let weight = g.edge_weight(a, b).expect("shortest path uses graph edges");
            s.tree_edges.push(SubEdge { src: a, dst: b, weight });
        }
    }

    // MST of the union of expanded paths.
    s.tree_edges.sort_by_key(|e| (e.src, e.dst));
    s.tree_edges.dedup_by_key(|e| (e.src, e.dst));
    s.tree_nodes.clear();
    for e in &s.tree_edges {
        s.tree_nodes.push(e.src);
        s.tree_nodes.push(e.dst);
    }
    s.tree_nodes.sort_unstable();
    s.tree_nodes.dedup();
    s.tree_edges
        .sort_by(|a, b| a.weight.total_cmp(&b.weight).then(a.src.cmp(&b.src)).then(a.dst.cmp(&b.dst)));
    let local = |nodes: &[NodeId], u: NodeId| nodes.binary_search(&u).expect("endpoint collected");
    let m = s.tree_nodes.len();
    s.dsu.reset(m);
    s.alive.clear();
    s.local_deg.clear();
    s.local_deg.resize(m, 0);
    for ei in 0..s.tree_edges.len() {
        let e = s.tree_edges[ei];
        let (a, b) = (local(&s.tree_nodes, e.src), local(&s.tree_nodes, e.dst));
        let keep = s.dsu.union(a, b);
        s.alive.push(keep);
        if keep {
            s.local_deg[a] += 1;
            s.local_deg[b] += 1;
        }
    }

    // Prune non-terminal leaves until none remain.
    loop {
        let mut changed = false;
        for ei in 0..s.tree_edges.len() {
            if !s.alive[ei] {
                continue;
            }
            let e = s.tree_edges[ei];
            let (a, b) = (local(&s.tree_nodes, e.src), local(&s.tree_nodes, e.dst));
            let leaf_a = s.local_deg[a] == 1 && terminals.binary_search(&e.src).is_err();
            let leaf_b = s.local_deg[b] == 1 && terminals.binary_search(&e.dst).is_err();
            if leaf_a || leaf_b {
                s.alive[ei] = false;
                s.local_deg[a] -= 1;
                s.local_deg[b] -= 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let nodes: Vec<NodeId> =
        s.tree_nodes.iter().zip(&s.local_deg).filter(|(_, &d)| d > 0).map(|(&u, _)| u).collect();
    let mut edges: Vec<SubEdge> =
        s.tree_edges.iter().zip(&s.alive).filter(|(_, &a)| a).map(|(e, _)| *e).collect();
    edges.sort_by_key(|e| (e.src, e.dst));
    Ok(Subgraph::from_parts(nodes, edges, terminals, Method::Steiner))
}

/// Fills closure row `i` from a finished search given as distance and
/// parent lookups.
fn close_row(
    s: &mut ScratchSpace,
    terminals: &[NodeId],
    i: usize,
    dist: impl Fn(&ScratchSpace, NodeId) -> Option<f64>,
    parent: impl Fn(&ScratchSpace, NodeId) -> NodeId,
) -> Result<()> {
    let t = terminals.len();
    for j in i + 1..t {
        let tj = terminals[j];
        let Some(d) = dist(s, tj) else {
            return Err(Error::Disconnected { a: terminals[i], b: tj });
        };
        s.closure[i * t + j] = d;
        let start = s.paths.len();
        let mut u = tj;
        while u != NONE {
            s.paths.push(u);
            u = parent(s, u);
        }
        s.path_ranges[i * t + j] = (start, s.paths.len());
    }
    Ok(())
}
