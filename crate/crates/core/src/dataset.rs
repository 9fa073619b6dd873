//! Datasets, splits and feature masking.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{build_graph, Edge, Graph, NodeAttributes, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Splits {
    pub train: Vec<NodeId>,
    pub valid: Vec<NodeId>,
    pub test: Vec<NodeId>,
}

impl Splits {
    /// Seeded shuffle of all nodes cut into train/valid/test by fractions.
    pub fn random(node_count: usize, train: f64, valid: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&train) || !(0.0..=1.0).contains(&valid) || train + valid > 1.0 {
            return Err(Error::invalid("splits", "fractions must be in [0, 1] and sum to at most 1"));
        }
        let mut ids: Vec<NodeId> = (0..node_count as NodeId).collect();
        ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let n_train = libm::round(train * node_count as f64) as usize;
        let n_valid = (libm::round(valid * node_count as f64) as usize).min(node_count - n_train);
        let mut s = Splits {
            train: ids[..n_train].to_vec(),
            valid: ids[n_train..n_train + n_valid].to_vec(),
            test: ids[n_train + n_valid..].to_vec(),
        };
        s.train.sort_unstable();
        s.valid.sort_unstable();
        s.test.sort_unstable();
        Ok(s)
    }

    /// Splits must be pairwise disjoint and inside `0..node_count`.
    pub fn validate(&self, node_count: usize) -> Result<()> {
        let mut seen = vec![false; node_count];
        for &u in self.train.iter().chain(&self.valid).chain(&self.test) {
            let slot = seen
                .get_mut(u as usize)
                .ok_or(Error::NodeOutOfRange { node: u, node_count })?;
            if *slot {
                return Err(Error::invalid("splits", alloc::format!("node {u} appears in more than one split")));
            }
            *slot = true;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub graph: Graph,
    pub attrs: NodeAttributes,
    pub splits: Splits,
}

impl Dataset {
    pub fn new(name: impl Into<String>, graph: Graph, attrs: NodeAttributes, splits: Splits) -> Result<Self> {
        if attrs.node_count() != graph.node_count() {
            return Err(Error::DimensionMismatch { expected: graph.node_count(), got: attrs.node_count() });
        }
        splits.validate(graph.node_count())?;
        Ok(Dataset { name: name.into(), graph, attrs, splits })
    }
}

/// A six-node fixture with texts and two-dimensional features.
pub fn toy_dataset() -> Dataset {
    let edges = [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5)];
    let edges: Vec<Edge> = edges.iter().map(|&(u, v)| Edge::new(u, v)).collect();
    let graph = build_graph(&edges, 6, false).expect("toy graph is valid");
    let texts = [
        "Graph neural networks for citation analysis",
        "Retrieval augmented generation with knowledge graphs",
        "Steiner trees connect query terminals cheaply",
        "Dense subgraphs reveal tightly knit communities",
        "Token budgets limit prompt context length",
        "Language models summarize retrieved evidence",
    ];
    let features = [[1.0, 0.0], [0.9, 0.1], [0.7, 0.3], [0.3, 0.7], [0.1, 0.9], [0.0, 1.0]];
    let attrs = NodeAttributes::empty(6)
        .with_texts(texts.iter().map(|t| Some(String::from(*t))).collect())
        .and_then(|a| a.with_features(features.iter().map(|f| Some(f.to_vec())).collect()))
        .and_then(|a| a.with_labels(vec![Some(0), Some(0), Some(0), Some(1), Some(1), Some(1)]))
        .expect("toy attributes are valid");
    let splits = Splits { train: vec![0, 1, 3, 4], valid: vec![2], test: vec![5] };
    Dataset::new("toy", graph, attrs, splits).expect("toy splits are valid")
}

/// Masked copy of the feature attribute plus the per-node mask.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedFeatures {
    pub attrs: NodeAttributes,
    pub mask: Vec<bool>,
}

/// Zeroes the features of exactly `round(missing_rate * n_with_features)`
/// nodes chosen by a seeded shuffle. Pure in `(attrs, missing_rate, seed)`.
pub fn mask_features(attrs: &NodeAttributes, missing_rate: f64, seed: u64) -> Result<MaskedFeatures> {
    if !(0.0..=1.0).contains(&missing_rate) {
        return Err(Error::invalid("missing_rate", "must lie in [0, 1]"));
    }
    let n = attrs.node_count();
    let mut mask = vec![false; n];
    let Some(features) = attrs.features() else {
        return Ok(MaskedFeatures { attrs: attrs.clone(), mask });
    };
    let mut candidates: Vec<usize> = (0..n).filter(|&u| features[u].is_some()).collect();
    let count = libm::round(missing_rate * candidates.len() as f64) as usize;
    candidates.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut masked = features.to_vec();
    for &u in &candidates[..count] {
        mask[u] = true;
        if let Some(f) = masked[u].as_mut() {
            f.iter_mut().for_each(|x| *x = 0.0);
        }
    }
    Ok(MaskedFeatures { attrs: attrs.clone().with_features(masked)?, mask })
}
