use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeAttributes, NodeId};
use crate::index::EmbeddingIndex;
use crate::retrieval::{ppr_scores, retrieve_with, NodeFilter, RetrievalConfig, RetrievalMethod, ScratchSpace};

/// Parameters shared by the retrieval-based completion methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RglParams {
    /// Nearest neighbors (by the observed modality) used as seeds.
    pub k: usize,
    pub hops: usize,
    pub fanout_cap: usize,
    pub max_nodes: usize,
}

impl Default for RglParams {
    fn default() -> Self {
        RglParams { k: 5, hops: 1, fanout_cap: 8, max_nodes: 32 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompletionMethod {
    Fill0,
    NeighMean,
    Ppr { alpha: f64, iters: usize },
    KnnFeat { k: usize },
    KnnNeigh { k: usize },
    RglBfs(RglParams),
    RglDense(RglParams),
    RglSteiner(RglParams),
}

impl CompletionMethod {
    pub const TAGS: [&'static str; 8] =
        ["fill0", "neigh_mean", "ppr", "knn_feat", "knn_neigh", "rgl_bfs", "rgl_dense", "rgl_steiner"];

    pub fn tag(&self) -> &'static str {
        match self {
            CompletionMethod::Fill0 => "fill0",
            CompletionMethod::NeighMean => "neigh_mean",
            CompletionMethod::Ppr { .. } => "ppr",
            CompletionMethod::KnnFeat { .. } => "knn_feat",
            CompletionMethod::KnnNeigh { .. } => "knn_neigh",
            CompletionMethod::RglBfs(_) => "rgl_bfs",
            CompletionMethod::RglDense(_) => "rgl_dense",
            CompletionMethod::RglSteiner(_) => "rgl_steiner",
        }
    }

    /// The method for `tag` with default parameters.
    pub fn from_tag(tag: &str) -> Option<Self> {
        let rgl = RglParams::default();
        Some(match tag {
            "fill0" => CompletionMethod::Fill0,
            "neigh_mean" => CompletionMethod::NeighMean,
            "ppr" => CompletionMethod::Ppr { alpha: 0.15, iters: 50 },
            "knn_feat" => CompletionMethod::KnnFeat { k: rgl.k },
            "knn_neigh" => CompletionMethod::KnnNeigh { k: rgl.k },
            "rgl_bfs" => CompletionMethod::RglBfs(rgl),
            "rgl_dense" => CompletionMethod::RglDense(rgl),
            "rgl_steiner" => CompletionMethod::RglSteiner(rgl),
            _ => return None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CompletionMethod::Ppr { alpha, iters } => {
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(Error::invalid("ppr.alpha", "must lie in (0, 1]"));
                }
                if iters == 0 {
                    return Err(Error::invalid("ppr.iters", "must be at least 1"));
                }
            }
            CompletionMethod::KnnFeat { k } | CompletionMethod::KnnNeigh { k } if k == 0 => {
                return Err(Error::invalid("k", "must be at least 1"));
            }
            CompletionMethod::RglBfs(p) | CompletionMethod::RglDense(p) | CompletionMethod::RglSteiner(p) => {
                if p.k == 0 {
                    return Err(Error::invalid("k", "must be at least 1"));
                }
                self.retrieval_config().expect("rgl method").validate()?;
            }
            _ => {}
        }
        Ok(())
    }

    fn retrieval_config(&self) -> Option<RetrievalConfig> {
        let (method, p) = match *self {
            CompletionMethod::RglBfs(p) => (RetrievalMethod::Bfs, p),
            CompletionMethod::RglDense(p) => (RetrievalMethod::Dense, p),
            CompletionMethod::RglSteiner(p) => (RetrievalMethod::Steiner, p),
            _ => return None,
        };
        Some(RetrievalConfig {
            method,
            hops: p.hops,
            fanout_cap: p.fanout_cap,
            max_nodes: p.max_nodes,
            filter: NodeFilter::None,
            ..RetrievalConfig::default()
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    /// One row per node; unmasked rows are the observed features (zeros if absent).
    pub features: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

fn mean_of(attrs: &NodeAttributes, observed: &[bool], nodes: impl Iterator<Item = NodeId>, dim: usize) -> Option<Vec<f64>> {
    let mut acc = vec![0.0; dim];
    let mut count = 0usize;
    for v in nodes.filter(|&v| observed[v as usize]) {
        let f = attrs.feature(v).expect("observed nodes have features");
        acc.iter_mut().zip(f).for_each(|(a, x)| *a += x);
        count += 1;
    }
    (count > 0).then(|| {
        acc.iter_mut().for_each(|a| *a /= count as f64);
        acc
    })
}

/// Fills in the features of masked nodes.
///
/// `attrs` carries the masked features and `observed_modality` indexes a
/// second, fully observed modality used by the kNN-based methods. Every
/// completed row is a (weighted) mean of observed rows, or zero when no
/// observed node is available (reported in `warnings`).
pub fn complete_features(
    g: &Graph,
    attrs: &NodeAttributes,
    mask: &[bool],
    method: &CompletionMethod,
    observed_modality: &EmbeddingIndex,
) -> Result<Completion> {
    method.validate()?;
    let n = g.node_count();
    if mask.len() != n || attrs.node_count() != n {
        return Err(Error::DimensionMismatch { expected: n, got: mask.len().min(attrs.node_count()) });
    }
    let dim = attrs.feature_dim().ok_or_else(|| Error::invalid("attrs", "no feature vectors to complete"))?;
    let observed: Vec<bool> = (0..n).map(|u| !mask[u] && attrs.feature(u as NodeId).is_some()).collect();
    let needs_index = matches!(
        method,
        CompletionMethod::KnnFeat { .. }
            | CompletionMethod::KnnNeigh { .. }
            | CompletionMethod::RglBfs(_)
            | CompletionMethod::RglDense(_)
            | CompletionMethod::RglSteiner(_)
    );
    if needs_index && observed_modality.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: observed_modality.len() });
    }
    let unobserved: Vec<NodeId> = (0..n as NodeId).filter(|&u| !observed[u as usize]).collect();
    let retrieval = method.retrieval_config();
    let mut scratch = ScratchSpace::new(if retrieval.is_some() { n } else { 0 });
    let mut warnings = Vec::new();

    let mut features = Vec::with_capacity(n);
    for u in 0..n as NodeId {
        if !mask[u as usize] {
            features.push(attrs.feature(u).map_or_else(|| vec![0.0; dim], <[f64]>::to_vec));
            continue;
        }
        let knn = |k: usize| -> Result<Vec<NodeId>> {
            let hits = observed_modality.knn_query(observed_modality.row(u as usize), k, Some(&unobserved))?;
            Ok(hits.into_iter().map(|h| h.node).collect())
        };
        let row = match method {
            CompletionMethod::Fill0 => Some(vec![0.0; dim]),
            CompletionMethod::NeighMean => mean_of(attrs, &observed, g.adj(u).iter().copied(), dim),
            CompletionMethod::Ppr { alpha, iters } => {
                let scores = ppr_scores(g, &[u], *alpha, *iters)?;
                let mut acc = vec![0.0; dim];
                let mut total = 0.0;
                for (v, &s) in scores.iter().enumerate() {
                    if observed[v] && s > 0.0 {
                        let f = attrs.feature(v as NodeId).expect("observed nodes have features");
                        acc.iter_mut().zip(f).for_each(|(a, x)| *a += s * x);
                        total += s;
                    }
                }
                (total > 0.0).then(|| {
                    acc.iter_mut().for_each(|a| *a /= total);
                    acc
                })
            }
            CompletionMethod::KnnFeat { k } => mean_of(attrs, &observed, knn(*k)?.into_iter(), dim),
            CompletionMethod::KnnNeigh { k } => {
                let mut neigh: Vec<NodeId> = knn(*k)?.iter().flat_map(|&h| g.adj(h).iter().copied()).collect();
                neigh.sort_unstable();
                neigh.dedup();
                mean_of(attrs, &observed, neigh.into_iter(), dim)
            }
            CompletionMethod::RglBfs(p) | CompletionMethod::RglDense(p) | CompletionMethod::RglSteiner(p) => {
                let seeds = knn(p.k)?;
                let cfg = retrieval.as_ref().expect("rgl method");
                let nodes = match retrieve_with(g, &mut scratch, &seeds, cfg) {
                    Ok(sub) => sub.nodes,
                    Err(e) => {
                        warnings.push(format!("node {u}: {} retrieval failed ({e}); using seeds only", method.tag()));
                        seeds
                    }
                };
                mean_of(attrs, &observed, nodes.into_iter(), dim)
            }
        };
        features.push(row.unwrap_or_else(|| {
            warnings.push(format!("node {u}: no observed node available for {}; filled with zeros", method.tag()));
            vec![0.0; dim]
        }));
    }
    Ok(Completion { features, warnings })
}
