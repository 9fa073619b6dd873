//! Seeded synthetic graph generators.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{build_graph, Edge, Graph, NodeAttributes, NodeId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticKind {
    /// Each pair connected independently with probability `p`.
    ErdosRenyi { p: f64 },
    /// Barabási–Albert growth with `m` edges per new node.
    PreferentialAttachment { m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticGraphSpec {
    pub kind: SyntheticKind,
    pub n: usize,
    pub seed: u64,
}

impl SyntheticGraphSpec {
    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Self {
        SyntheticGraphSpec { kind: SyntheticKind::ErdosRenyi { p }, n, seed }
    }

    pub fn preferential_attachment(n: usize, m: usize, seed: u64) -> Self {
        SyntheticGraphSpec { kind: SyntheticKind::PreferentialAttachment { m }, n, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("n", "synthetic graphs need at least 2 nodes"));
        }
        match self.kind {
            SyntheticKind::ErdosRenyi { p } if !(p > 0.0 && p <= 1.0) => Err(Error::invalid("p", "must lie in (0, 1]")),
            SyntheticKind::PreferentialAttachment { m: 0 } => Err(Error::invalid("m", "must be at least 1")),
            _ => Ok(()),
        }
    }

    /// Short tag such as `pa-n100000-m5-s7`.
    pub fn tag(&self) -> String {
        match self.kind {
            SyntheticKind::ErdosRenyi { p } => format!("er-n{}-p{}-s{}", self.n, p, self.seed),
            SyntheticKind::PreferentialAttachment { m } => format!("pa-n{}-m{}-s{}", self.n, m, self.seed),
        }
    }
}

/// Generates an undirected graph. Output depends only on the spec.
pub fn gen_graph(spec: &SyntheticGraphSpec) -> Result<Graph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let edges = match spec.kind {
        SyntheticKind::ErdosRenyi { p } => erdos_renyi_edges(spec.n, p, &mut rng),
        SyntheticKind::PreferentialAttachment { m } => preferential_edges(spec.n, m, &mut rng),
    };
    build_graph(&edges, spec.n, false)
}

fn erdos_renyi_edges(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let mut edges = Vec::new();
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                edges.push(Edge::new(w as NodeId, v as NodeId));
            }
        }
        return edges;
    }
    // Geometric skipping over the pairs (w < v).
    let log_q = libm::log(1.0 - p);
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let r: f64 = rng.random();
        w += 1 + libm::floor(libm::log(1.0 - r) / log_q) as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push(Edge::new(w as NodeId, v as NodeId));
        }
    }
    edges
}

fn preferential_edges(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let mut edges = Vec::with_capacity(n * m);
    // Every endpoint occurrence; sampling from it is degree-proportional.
    let mut endpoints: Vec<NodeId> = Vec::with_capacity(2 * n * m);
    let mut chosen: Vec<NodeId> = Vec::with_capacity(m);
    for v in 1..n {
        chosen.clear();
        if v <= m {
            chosen.extend(0..v as NodeId);
        } else {
            while chosen.len() < m {
                let t = endpoints[rng.random_range(0..endpoints.len())];
                if !chosen.contains(&t) {
                    chosen.push(t);
                }
            }
        }
        for &t in &chosen {
            edges.push(Edge::new(t, v as NodeId));
            endpoints.push(t);
            endpoints.push(v as NodeId);
        }
    }
    edges
}

/// Number of connected components (edges treated as undirected).
pub fn component_count(g: &Graph) -> usize {
    let n = g.node_count();
    let mut dsu = crate::graph::Dsu::new(n);
    let mut count = n;
    for (u, v, _) in g.edges() {
        if dsu.union(u as usize, v as usize) {
            count -= 1;
        }
    }
    count
}

pub fn is_connected(g: &Graph) -> bool {
    component_count(g) <= 1
}

/// Planted-partition graph with community-correlated features and texts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommunitySpec {
    pub n: usize,
    pub communities: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub dim: usize,
    /// Half-width of the uniform noise added to each community centroid.
    pub noise: f64,
    pub seed: u64,
}

impl Default for CommunitySpec {
    fn default() -> Self {
        CommunitySpec { n: 200, communities: 4, p_in: 0.1, p_out: 0.005, dim: 16, noise: 0.3, seed: 0 }
    }
}

/// Node `u` belongs to community `u % communities`; labels record it.
pub fn community_graph(spec: &CommunitySpec) -> Result<(Graph, NodeAttributes)> {
    if spec.n < 2 || spec.communities == 0 || spec.dim == 0 {
        return Err(Error::invalid("community spec", "need n >= 2, communities >= 1, dim >= 1"));
    }
    for p in [spec.p_in, spec.p_out] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("community spec", "probabilities must lie in [0, 1]"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let c = spec.communities;
    let mut edges = Vec::new();
    for v in 1..spec.n {
        for w in 0..v {
            let p = if v % c == w % c { spec.p_in } else { spec.p_out };
            if rng.random::<f64>() < p {
                edges.push(Edge::new(w as NodeId, v as NodeId));
            }
        }
    }
    let graph = build_graph(&edges, spec.n, false)?;

    let centroids: Vec<Vec<f64>> =
        (0..c).map(|_| (0..spec.dim).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let mut features = Vec::with_capacity(spec.n);
    let mut texts = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for u in 0..spec.n {
        let k = u % c;
        let f: Vec<f64> = centroids[k].iter().map(|x| x + spec.noise * rng.random_range(-1.0..1.0)).collect();
        features.push(Some(f));
        let mut words = vec![format!("paper{u}")];
        for _ in 0..8 {
            words.push(format!("topic{k}term{}", rng.random_range(0..12)));
        }
        for _ in 0..2 {
            words.push(format!("common{}", rng.random_range(0..30)));
        }
        texts.push(Some(words.join(" ")));
        labels.push(Some(k as i64));
    }
    let attrs =
        NodeAttributes::empty(spec.n).with_features(features)?.with_texts(texts)?.with_labels(labels)?;
    Ok((graph, attrs))
}
