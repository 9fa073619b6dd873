//! Graph retrieval: subgraph construction around seed nodes.

mod bfs;
mod dense;
mod memo;
mod paths;
mod ppr;
mod scratch;
mod steiner;

use alloc::vec::Vec;
use core::fmt;

pub use bfs::{bfs_expand, bfs_expand_with};
pub use dense::{dense_subgraph, dense_subgraph_with};
pub use paths::{multi_source_distances, ShortestPaths};
pub use ppr::ppr_scores;
pub use scratch::ScratchSpace;
pub use steiner::{steiner_subgraph, steiner_subgraph_with};

use crate::error::{Error, Result};
use memo::BatchMemo;
use crate::graph::{Graph, NodeId, Subgraph};
use crate::index::RetrievalHit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RetrievalMethod {
    Bfs,
    Steiner,
    Dense,
}

impl RetrievalMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            RetrievalMethod::Bfs => "bfs",
            RetrievalMethod::Steiner => "steiner",
            RetrievalMethod::Dense => "dense",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bfs" => Some(RetrievalMethod::Bfs),
            "steiner" => Some(RetrievalMethod::Steiner),
            "dense" => Some(RetrievalMethod::Dense),
            _ => None,
        }
    }
}

impl fmt::Display for RetrievalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Candidate trimming applied to node-retrieval hits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeFilter {
    None,
    TopK(usize),
    Threshold(f64),
}

/// Keeps a prefix (top-k) or the hits scoring at least the threshold.
/// Input order is preserved.
pub fn filter_nodes(candidates: &[RetrievalHit], filter: NodeFilter) -> Vec<RetrievalHit> {
    match filter {
        NodeFilter::None => candidates.to_vec(),
        NodeFilter::TopK(k) => candidates.iter().take(k).copied().collect(),
        NodeFilter::Threshold(t) => candidates.iter().filter(|h| h.score >= t).copied().collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalConfig {
    pub method: RetrievalMethod,
    /// BFS depth, and the candidate-pool depth for dense retrieval.
    pub hops: usize,
    pub fanout_cap: usize,
    pub max_nodes: usize,
    pub filter: NodeFilter,
    pub ppr_alpha: f64,
    pub ppr_iters: usize,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        RetrievalConfig {
            method: RetrievalMethod::Bfs,
            hops: 2,
            fanout_cap: 16,
            max_nodes: 64,
            filter: NodeFilter::None,
            ppr_alpha: 0.15,
            ppr_iters: 50,
        }
    }
}

impl RetrievalConfig {
    pub fn with_method(mut self, method: RetrievalMethod) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.hops == 0 {
            return Err(Error::invalid("retrieval.hops", "must be at least 1"));
        }
        if self.fanout_cap == 0 {
            return Err(Error::invalid("retrieval.fanout_cap", "must be at least 1"));
        }
        if self.max_nodes == 0 {
            return Err(Error::invalid("retrieval.max_nodes", "must be at least 1"));
        }
        if let NodeFilter::Threshold(t) = self.filter {
            if t.is_nan() {
                return Err(Error::invalid("retrieval.filter.threshold", "must not be NaN"));
            }
        }
        if !(self.ppr_alpha > 0.0 && self.ppr_alpha <= 1.0) {
            return Err(Error::invalid("retrieval.ppr.alpha", "must lie in (0, 1]"));
        }
        if self.ppr_iters == 0 {
            return Err(Error::invalid("retrieval.ppr.iters", "must be at least 1"));
        }
        Ok(())
    }
}

/// Runs the configured method for one seed set.
pub fn retrieve_with(g: &Graph, s: &mut ScratchSpace, seeds: &[NodeId], cfg: &RetrievalConfig) -> Result<Subgraph> {
    retrieve_memo(g, s, None, seeds, cfg)
}

fn retrieve_memo(
    g: &Graph,
    s: &mut ScratchSpace,
    memo: Option<&mut BatchMemo>,
    seeds: &[NodeId],
    cfg: &RetrievalConfig,
) -> Result<Subgraph> {
    let out = match cfg.method {
        RetrievalMethod::Bfs => bfs::bfs_expand_memo(g, s, memo, seeds, cfg.hops, cfg.fanout_cap, cfg.max_nodes),
        RetrievalMethod::Steiner => steiner::steiner_subgraph_memo(g, s, memo, seeds),
        RetrievalMethod::Dense => dense_subgraph_with(g, s, seeds, cfg.hops, cfg.max_nodes),
    };
    s.settle();
    out
}

/// A failed query inside a batch.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("query {index}: {error}")]
pub struct QueryError {
    pub index: usize,
    pub error: Error,
}

/// Runs one retrieval per seed set with a single reused scratch space.
/// A failing query does not stop the others.
pub fn batch_retrieve(
    g: &Graph,
    seed_sets: &[Vec<NodeId>],
    cfg: &RetrievalConfig,
) -> Result<Vec<core::result::Result<Subgraph, QueryError>>> {
    let mut scratch = ScratchSpace::new(g.node_count());
    batch_retrieve_with(g, &mut scratch, seed_sets, cfg, 0)
}

/// Batch retrieval on a caller-owned scratch space. `index_offset` is added
/// to the query index of reported errors.
pub fn batch_retrieve_with(
    g: &Graph,
    scratch: &mut ScratchSpace,
    seed_sets: &[Vec<NodeId>],
    cfg: &RetrievalConfig,
    index_offset: usize,
) -> Result<Vec<core::result::Result<Subgraph, QueryError>>> {
    let mut out = Vec::with_capacity(seed_sets.len());
    batch_retrieve_for_each(g, scratch, seed_sets, cfg, |i, r| {
        out.push(r.map_err(|error| QueryError { index: i + index_offset, error }));
    })?;
    Ok(out)
}

/// Streaming batch retrieval: `sink` receives each query index with its
/// result, in order, as soon as it is ready. Adjacency rows of hubs and the
/// search regions of recurring Steiner terminals are shared across the
/// batch; results equal those of [`retrieve_with`].
pub fn batch_retrieve_for_each(
    g: &Graph,
    scratch: &mut ScratchSpace,
    seed_sets: &[Vec<NodeId>],
    cfg: &RetrievalConfig,
    mut sink: impl FnMut(usize, Result<Subgraph>),
) -> Result<()> {
    cfg.validate()?;
    let mut memo = BatchMemo::plan(g, seed_sets, cfg);
    memo.borrow_regions(scratch);
    for (i, seeds) in seed_sets.iter().enumerate() {
        sink(i, retrieve_memo(g, scratch, Some(&mut memo), seeds, cfg));
    }
    memo.return_regions(scratch);
    Ok(())
}
