//! Immutable attributed graphs in compressed sparse row form.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Dense node identifier in `0..node_count`.
pub type NodeId = u32;

/// An input edge. A missing weight means 1.0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: Option<f64>,
}

impl Edge {
    pub fn new(src: NodeId, dst: NodeId) -> Self {
        Edge { src, dst, weight: None }
    }

    pub fn weighted(src: NodeId, dst: NodeId, weight: f64) -> Self {
        Edge { src, dst, weight: Some(weight) }
    }
}

/// CSR adjacency. Undirected graphs store every edge in both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    node_count: usize,
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    weights: Option<Vec<f64>>,
    directed: bool,
}

/// Builds a validated CSR graph.
///
/// Duplicate edges collapse to the first occurrence (for undirected graphs
/// `(u, v)` and `(v, u)` are the same edge). Self-loops are rejected. If any
/// edge carries a weight the graph is weighted and unweighted edges get 1.0.
pub fn build_graph(edges: &[Edge], node_count: usize, directed: bool) -> Result<Graph> {
    if node_count == 0 && !edges.is_empty() {
        return Err(Error::EdgesWithoutNodes);
    }
    if node_count > NodeId::MAX as usize {
        return Err(Error::invalid("node_count", "exceeds the node id range"));
    }
    let weighted = edges.iter().any(|e| e.weight.is_some());
    let mut keyed: Vec<(NodeId, NodeId, f64)> = Vec::with_capacity(edges.len());
    for e in edges {
        for &endpoint in &[e.src, e.dst] {
            if endpoint as usize >= node_count {
                return Err(Error::NodeOutOfRange { node: endpoint, node_count });
            }
        }
        if e.src == e.dst {
            return Err(Error::SelfLoop(e.src));
        }
        let w = e.weight.unwrap_or(1.0);
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidWeight { src: e.src, dst: e.dst, weight: w });
        }
        let (a, b) = if directed || e.src < e.dst { (e.src, e.dst) } else { (e.dst, e.src) };
        keyed.push((a, b, w));
    }
    // Stable sort keeps the first occurrence of each key at the front of its run.
    keyed.sort_by_key(|&(a, b, _)| (a, b));
    keyed.dedup_by_key(|&mut (a, b, _)| (a, b));

    let mut arcs: Vec<(NodeId, NodeId, f64)> = Vec::with_capacity(if directed { keyed.len() } else { 2 * keyed.len() });
    for &(a, b, w) in &keyed {
        arcs.push((a, b, w));
        if !directed {
            arcs.push((b, a, w));
        }
    }
    arcs.sort_by_key(|&(a, b, _)| (a, b));

    let mut offsets = vec![0usize; node_count + 1];
    for &(a, _, _) in &arcs {
        offsets[a as usize + 1] += 1;
    }
    for i in 0..node_count {
        offsets[i + 1] += offsets[i];
    }
    let neighbors = arcs.iter().map(|&(_, b, _)| b).collect();
    let weights = weighted.then(|| arcs.iter().map(|&(_, _, w)| w).collect());
    Ok(Graph { node_count, offsets, neighbors, weights, directed })
}

impl Graph {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Number of logical edges (each undirected edge counted once).
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.neighbors.len()
        } else {
            self.neighbors.len() / 2
        }
    }

    /// Number of stored arcs, i.e. the length of the neighbor array.
    pub fn arc_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn contains(&self, u: NodeId) -> bool {
        (u as usize) < self.node_count
    }

    pub(crate) fn check_node(&self, u: NodeId) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: u, node_count: self.node_count })
        }
    }

    /// Sorted adjacency of `u`.
    pub fn neighbors(&self, u: NodeId) -> Result<&[NodeId]> {
        self.check_node(u)?;
        Ok(self.adj(u))
    }

    /// Unchecked adjacency lookup; panics when `u` is out of range.
    #[inline]
    pub fn adj(&self, u: NodeId) -> &[NodeId] {
        let u = u as usize;
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Weights aligned with [`Graph::adj`], or `None` for unweighted graphs.
    #[inline]
    pub fn adj_weights(&self, u: NodeId) -> Option<&[f64]> {
        let u = u as usize;
        self.weights.as_ref().map(|w| &w[self.offsets[u]..self.offsets[u + 1]])
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> usize {
        let u = u as usize;
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count as NodeId).map(|u| self.degree(u)).collect()
    }

    /// Weight of arc `(u, v)` if present.
    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        if !self.contains(u) || !self.contains(v) {
            return None;
        }
        let adj = self.adj(u);
        let i = adj.binary_search(&v).ok()?;
        Some(self.adj_weights(u).map_or(1.0, |w| w[i]))
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edge_weight(u, v).is_some()
    }

    /// If every arc has the same weight, returns it. Unweighted graphs give 1.0.
    pub fn uniform_weight(&self) -> Option<f64> {
        match &self.weights {
            None => Some(1.0),
            Some(w) => match w.first() {
                None => Some(1.0),
                Some(&first) => w.iter().all(|&x| x == first).then_some(first),
            },
        }
    }

    /// Logical edges: for undirected graphs each edge once with `src < dst`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.node_count as NodeId).flat_map(move |u| {
            let adj = self.adj(u);
            let w = self.adj_weights(u);
            adj.iter().enumerate().filter_map(move |(i, &v)| {
                (self.directed || u < v).then(|| (u, v, w.map_or(1.0, |w| w[i])))
            })
        })
    }

    /// Checks every CSR invariant.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGraph(msg));
        if self.offsets.len() != self.node_count + 1 {
            return bad(format!("offsets has length {}", self.offsets.len()));
        }
        if self.offsets[0] != 0 || self.offsets[self.node_count] != self.neighbors.len() {
            return bad("offsets do not span the neighbor array".into());
        }
        if let Some(w) = &self.weights {
            if w.len() != self.neighbors.len() {
                return bad("weights not aligned with neighbors".into());
            }
            if let Some(x) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return bad(format!("invalid weight {x}"));
            }
        }
        for u in 0..self.node_count {
            if self.offsets[u] > self.offsets[u + 1] {
                return bad(format!("offsets decrease at node {u}"));
            }
            let adj = self.adj(u as NodeId);
            for (i, &v) in adj.iter().enumerate() {
                if v as usize >= self.node_count {
                    return bad(format!("neighbor {v} of node {u} out of range"));
                }
                if v as usize == u {
                    return bad(format!("self-loop on node {u}"));
                }
                if i > 0 && adj[i - 1] >= v {
                    return bad(format!("adjacency of node {u} not strictly ascending"));
                }
                if !self.directed {
                    let back = self.edge_weight(v, u as NodeId);
                    let fwd = self.adj_weights(u as NodeId).map_or(1.0, |w| w[i]);
                    if back != Some(fwd) {
                        return bad(format!("edge ({u}, {v}) lacks a symmetric twin"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Per-node attributes. Each present array has one entry per node; an entry
/// of `None` marks a node without that attribute.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodeAttributes {
    node_count: usize,
    texts: Option<Vec<Option<String>>>,
    features: Option<Vec<Option<Vec<f64>>>>,
    feature_dim: Option<usize>,
    labels: Option<Vec<Option<i64>>>,
}

impl NodeAttributes {
    pub fn empty(node_count: usize) -> Self {
        NodeAttributes { node_count, ..Default::default() }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.node_count {
            return Err(Error::DimensionMismatch { expected: self.node_count, got: len });
        }
        Ok(())
    }

    pub fn with_texts(mut self, texts: Vec<Option<String>>) -> Result<Self> {
        self.check_len(texts.len())?;
        self.texts = Some(texts);
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<Option<i64>>) -> Result<Self> {
        self.check_len(labels.len())?;
        self.labels = Some(labels);
        Ok(self)
    }

    /// Attaches feature vectors; every present vector must share one dimension.
    pub fn with_features(mut self, features: Vec<Option<Vec<f64>>>) -> Result<Self> {
        self.check_len(features.len())?;
        let mut dim = None;
        for (row, f) in features.iter().enumerate() {
            if let Some(f) = f {
                match dim {
                    None => dim = Some(f.len()),
                    Some(d) if d != f.len() => return Err(Error::DimensionMismatch { expected: d, got: f.len() }),
                    Some(_) => {}
                }
                if let Some(col) = f.iter().position(|x| !x.is_finite()) {
                    return Err(Error::NonFinite { row, col });
                }
            }
        }
        if dim == Some(0) {
            return Err(Error::invalid("features", "feature vectors must have dimension >= 1"));
        }
        self.feature_dim = dim;
        self.features = Some(features);
        Ok(self)
    }

    pub fn text(&self, u: NodeId) -> Option<&str> {
        self.texts.as_ref()?.get(u as usize)?.as_deref()
    }

    pub fn feature(&self, u: NodeId) -> Option<&[f64]> {
        self.features.as_ref()?.get(u as usize)?.as_deref()
    }

    pub fn label(&self, u: NodeId) -> Option<i64> {
        *self.labels.as_ref()?.get(u as usize)?
    }

    pub fn texts(&self) -> Option<&[Option<String>]> {
        self.texts.as_deref()
    }

    pub fn features(&self) -> Option<&[Option<Vec<f64>>]> {
        self.features.as_deref()
    }

    pub fn labels(&self) -> Option<&[Option<i64>]> {
        self.labels.as_deref()
    }

    pub fn feature_dim(&self) -> Option<usize> {
        self.feature_dim
    }

    /// Row-major `node_count × dim` matrix with zeros for missing rows.
    pub fn dense_features(&self) -> Option<(Vec<f64>, usize)> {
        let dim = self.feature_dim?;
        let feats = self.features.as_ref()?;
        let mut out = vec![0.0; feats.len() * dim];
        for (i, f) in feats.iter().enumerate() {
            if let Some(f) = f {
                out[i * dim..(i + 1) * dim].copy_from_slice(f);
            }
        }
        Some((out, dim))
    }
}

/// How a subgraph was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Induced,
    Bfs,
    Steiner,
    Dense,
    Knn,
    SelfNode,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Induced => "induced",
            Method::Bfs => "bfs",
            Method::Steiner => "steiner",
            Method::Dense => "dense",
            Method::Knn => "knn",
            Method::SelfNode => "self_node",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub seeds: Vec<NodeId>,
    pub method: Method,
    /// Relevance per entry of [`Subgraph::nodes`].
    pub scores: Vec<f64>,
}

/// A node/edge subset of a parent graph.
///
/// `nodes` is sorted and unique; for undirected parents each edge appears
/// once with `src < dst`, and edges are sorted by `(src, dst)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgraph {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<SubEdge>,
    pub provenance: Provenance,
}

impl Subgraph {
    /// Builds a subgraph whose seeds score 1.0 and every other node 0.0.
    pub(crate) fn from_parts(nodes: Vec<NodeId>, edges: Vec<SubEdge>, seeds: Vec<NodeId>, method: Method) -> Self {
        let scores = nodes.iter().map(|u| if seeds.binary_search(u).is_ok() { 1.0 } else { 0.0 }).collect();
        Subgraph { nodes, edges, provenance: Provenance { seeds, method, scores } }
    }

    pub fn contains(&self, u: NodeId) -> bool {
        self.nodes.binary_search(&u).is_ok()
    }

    pub fn score_of(&self, u: NodeId) -> Option<f64> {
        self.nodes.binary_search(&u).ok().map(|i| self.provenance.scores[i])
    }

    /// Overwrites the relevance of the given nodes, leaving others untouched.
    pub fn set_scores(&mut self, scored: impl IntoIterator<Item = (NodeId, f64)>) {
        for (u, s) in scored {
            if let Ok(i) = self.nodes.binary_search(&u) {
                self.provenance.scores[i] = s;
            }
        }
    }

    /// Edge count over node count; 0 for an empty node set.
    pub fn density(&self) -> f64 {
        if self.nodes.is_empty() {
            0.0
        } else {
            self.edges.len() as f64 / self.nodes.len() as f64
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Checks the subgraph invariants against its parent graph.
    pub fn validate(&self, parent: &Graph) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGraph(msg));
        if self.nodes.windows(2).any(|w| w[0] >= w[1]) {
            return bad("subgraph nodes not sorted and unique".into());
        }
        if let Some(&u) = self.nodes.iter().find(|&&u| !parent.contains(u)) {
            return bad(format!("subgraph node {u} outside parent"));
        }
        for e in &self.edges {
            if !self.contains(e.src) || !self.contains(e.dst) {
                return bad(format!("edge ({}, {}) leaves the node set", e.src, e.dst));
            }
            if parent.edge_weight(e.src, e.dst) != Some(e.weight) {
                return bad(format!("edge ({}, {}) not in parent", e.src, e.dst));
            }
        }
        if let Some(&s) = self.provenance.seeds.iter().find(|&&s| !self.contains(s)) {
            return bad(format!("seed {s} missing from subgraph"));
        }
        if self.provenance.scores.len() != self.nodes.len() {
            return bad("scores not aligned with nodes".into());
        }
        Ok(())
    }

    /// True when the edges form a spanning tree of `nodes`.
    pub fn is_tree(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 || self.edges.len() != n - 1 {
            return false;
        }
        let mut dsu = Dsu::new(n);
        for e in &self.edges {
            let (Ok(a), Ok(b)) = (self.nodes.binary_search(&e.src), self.nodes.binary_search(&e.dst)) else {
                return false;
            };
            if !dsu.union(a, b) {
                return false;
            }
        }
        true
    }
}

/// Sorts, deduplicates and range-checks a node set.
pub(crate) fn normalize_nodes(g: &Graph, nodes: &[NodeId]) -> Result<Vec<NodeId>> {
    let mut out = nodes.to_vec();
    out.sort_unstable();
    out.dedup();
    if let Some(&u) = out.last() {
        g.check_node(u)?;
    }
    Ok(out)
}

/// The subgraph containing exactly the edges of `g` with both endpoints in `nodes`.
pub fn induced_subgraph(g: &Graph, nodes: &[NodeId]) -> Result<Subgraph> {
    let nodes = normalize_nodes(g, nodes)?;
    let mut edges = Vec::new();
    for &u in &nodes {
        let w = g.adj_weights(u);
        for (i, &v) in g.adj(u).iter().enumerate() {
            if (g.is_directed() || u < v) && nodes.binary_search(&v).is_ok() {
                edges.push(SubEdge { src: u, dst: v, weight: w.map_or(1.0, |w| w[i]) });
            }
        }
    }
    Ok(Subgraph::from_parts(nodes, edges, Vec::new(), Method::Induced))
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone, Default)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        let mut d = Dsu::default();
        d.reset(n);
        d
    }

    pub(crate) fn reset(&mut self, n: usize) {
        self.parent.clear();
        self.parent.extend(0..n);
        self.size.clear();
        self.size.resize(n, 1);
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            core::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }

    pub(crate) fn capacity(&self) -> usize {
        self.parent.capacity() + self.size.capacity()
    }
}
