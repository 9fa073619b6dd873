//! Unbatched reference implementations for benchmarking.
//!
//! These compute exactly what the kernels compute, tie-breaks included, but
//! the way a general-purpose graph library would: adjacency in nested hash
//! maps, fresh hash sets and maps on every call, neighbor lists sorted on
//! every visit, no scratch reuse.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use rgl_core::graph::{Provenance, SubEdge};
use rgl_core::{Error, Graph, Method, NodeId, Subgraph};

type Result<T> = std::result::Result<T, Error>;

/// Dict-of-dicts adjacency.
#[derive(Debug, Clone)]
pub struct NaiveGraph {
    node_count: usize,
    directed: bool,
    adj: HashMap<NodeId, HashMap<NodeId, f64>>,
}

impl NaiveGraph {
    pub fn from_graph(g: &Graph) -> Self {
        let mut adj: HashMap<NodeId, HashMap<NodeId, f64>> = HashMap::with_capacity(g.node_count());
        for u in 0..g.node_count() as NodeId {
            let w = g.adj_weights(u);
            let row = adj.entry(u).or_default();
            for (i, &v) in g.adj(u).iter().enumerate() {
                row.insert(v, w.map_or(1.0, |w| w[i]));
            }
        }
        NaiveGraph { node_count: g.node_count(), directed: g.is_directed(), adj }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    fn sorted_neighbors(&self, u: NodeId) -> Vec<(NodeId, f64)> {
        let mut out: Vec<(NodeId, f64)> = self.adj.get(&u).map(|m| m.iter().map(|(&v, &w)| (v, w)).collect()).unwrap_or_default();
        out.sort_by_key(|&(v, _)| v);
        out
    }

    fn weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        self.adj.get(&u).and_then(|m| m.get(&v)).copied()
    }

    fn normalize(&self, nodes: &[NodeId]) -> Result<Vec<NodeId>> {
        let set: HashSet<NodeId> = nodes.iter().copied().collect();
        let mut out: Vec<NodeId> = set.into_iter().collect();
        out.sort();
        if let Some(&u) = out.iter().find(|&&u| u as usize >= self.node_count) {
            return Err(Error::NodeOutOfRange { node: u, node_count: self.node_count });
        }
        Ok(out)
    }

    fn induced_edges(&self, nodes: &[NodeId]) -> Vec<SubEdge> {
        let members: HashSet<NodeId> = nodes.iter().copied().collect();
        let mut edges = Vec::new();
        for &u in nodes {
            for (v, weight) in self.sorted_neighbors(u) {
                if (self.directed || u < v) && members.contains(&v) {
                    edges.push(SubEdge { src: u, dst: v, weight });
                }
            }
        }
        edges
    }
}

fn subgraph(nodes: Vec<NodeId>, edges: Vec<SubEdge>, seeds: Vec<NodeId>, method: Method) -> Subgraph {
    let scores = nodes.iter().map(|u| if seeds.contains(u) { 1.0 } else { 0.0 }).collect();
    Subgraph { nodes, edges, provenance: Provenance { seeds, method, scores } }
}

/// Same contract as `bfs_expand`.
pub fn naive_bfs(g: &NaiveGraph, seeds: &[NodeId], hops: usize, fanout_cap: usize, max_nodes: usize) -> Result<Subgraph> {
    let seeds = g.normalize(seeds)?;
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let mut visited: HashSet<NodeId> = seeds.iter().copied().collect();
    let mut collected = seeds.clone();
    let mut frontier = seeds.clone();
    'levels: for _ in 0..hops {
        let mut next = Vec::new();
        for &u in &frontier {
            let mut taken = 0;
            for (v, _) in g.sorted_neighbors(u) {
                if taken == fanout_cap {
                    break;
                }
                if visited.contains(&v) {
                    continue;
                }
                if collected.len() >= max_nodes {
                    break 'levels;
                }
                visited.insert(v);
                collected.push(v);
                next.push(v);
                taken += 1;
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    collected.sort();
    let edges = g.induced_edges(&collected);
    Ok(subgraph(collected, edges, seeds, Method::Bfs))
}

#[derive(PartialEq)]
struct Entry(f64, NodeId);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Single-source Dijkstra that stops once every node in `targets` has
/// settled. Nodes settle in (distance, id) order and a parent changes only
/// on strict improvement.
fn dijkstra(g: &NaiveGraph, src: NodeId, targets: &[NodeId]) -> (HashMap<NodeId, f64>, HashMap<NodeId, NodeId>) {
    let mut pending: HashSet<NodeId> = targets.iter().copied().collect();
    let mut dist = HashMap::new();
    let mut parent = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(src, 0.0);
    heap.push(Entry(0.0, src));
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[&u] {
            continue;
        }
        pending.remove(&u);
        if pending.is_empty() {
            break;
        }
        for (v, w) in g.sorted_neighbors(u) {
            let nd = d + w;
            if dist.get(&v).is_none_or(|&old| nd < old) {
                dist.insert(v, nd);
                parent.insert(v, u);
                heap.push(Entry(nd, v));
            }
        }
    }
    (dist, parent)
}

#[derive(Default)]
struct UnionFind(HashMap<usize, usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let p = *self.0.get(&x).unwrap_or(&x);
        if p == x {
            return x;
        }
        let root = self.find(p);
        self.0.insert(x, root);
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0.insert(ra.max(rb), ra.min(rb));
        true
    }
}

/// Same contract as `steiner_subgraph`.
pub fn naive_steiner(g: &NaiveGraph, terminals: &[NodeId]) -> Result<Subgraph> {
    let terminals = g.normalize(terminals)?;
    if terminals.is_empty() {
        return Err(Error::EmptySeeds);
    }
    if g.directed {
        return Err(Error::InvalidParameter { name: "graph", reason: "Steiner trees need an undirected graph".into() });
    }
    if terminals.len() == 1 {
        return Ok(subgraph(terminals.clone(), Vec::new(), terminals, Method::Steiner));
    }

    let t = terminals.len();
    let mut closure: Vec<(f64, usize, usize)> = Vec::new();
    let mut paths: HashMap<(usize, usize), Vec<NodeId>> = HashMap::new();
    for i in 0..t - 1 {
        let (dist, parent) = dijkstra(g, terminals[i], &terminals[i + 1..]);
        for (j, &tj) in terminals.iter().enumerate().skip(i + 1) {
            let Some(&d) = dist.get(&tj) else {
                return Err(Error::Disconnected { a: terminals[i], b: tj });
            };
            closure.push((d, i, j));
            let mut path = vec![tj];
            let mut u = tj;
            while let Some(&p) = parent.get(&u) {
                path.push(p);
                u = p;
            }
            paths.insert((i, j), path);
        }
    }
    closure.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut uf = UnionFind::default();
    let mut union_edges: HashMap<(NodeId, NodeId), f64> = HashMap::new();
    for &(_, i, j) in &closure {
        if !uf.union(i, j) {
            continue;
        }
        for w in paths[&(i, j)].windows(2) {
            let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
            union_edges.insert((a, b), g.weight(a, b).expect("path edge exists"));
        }
    }

    let mut sorted: Vec<SubEdge> = union_edges.into_iter().map(|((src, dst), weight)| SubEdge { src, dst, weight }).collect();
    sorted.sort_by(|a, b| a.weight.total_cmp(&b.weight).then(a.src.cmp(&b.src)).then(a.dst.cmp(&b.dst)));
    let mut uf = UnionFind::default();
    let mut tree: Vec<SubEdge> = sorted.into_iter().filter(|e| uf.union(e.src as usize, e.dst as usize)).collect();

    // Strip non-terminal leaves until none remain.
    let keep: HashSet<NodeId> = terminals.iter().copied().collect();
    loop {
        let mut degree: HashMap<NodeId, usize> = HashMap::new();
        for e in &tree {
            *degree.entry(e.src).or_default() += 1;
            *degree.entry(e.dst).or_default() += 1;
        }
        let leaf = |u: NodeId| degree[&u] == 1 && !keep.contains(&u);
        let before = tree.len();
        tree.retain(|e| !leaf(e.src) && !leaf(e.dst));
        if tree.len() == before {
            break;
        }
    }

    let mut nodes: Vec<NodeId> = tree.iter().flat_map(|e| [e.src, e.dst]).collect::<HashSet<_>>().into_iter().collect();
    nodes.sort();
    tree.sort_by_key(|e| (e.src, e.dst));
    Ok(subgraph(nodes, tree, terminals, Method::Steiner))
}
