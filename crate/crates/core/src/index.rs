//! Exact similarity search over node embeddings.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Cosine,
    Dot,
}

/// A scored node returned by similarity search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrievalHit {
    pub node: NodeId,
    pub score: f64,
}

impl RetrievalHit {
    /// Ranking order: higher score first, then lower node id.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        other.score.total_cmp(&self.score).then(self.node.cmp(&other.node))
    }
}

// Max-heap entry whose top is the worst-ranked hit kept so far.
#[derive(Debug, Clone, Copy)]
struct Worst(RetrievalHit);

impl PartialEq for Worst {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Worst {}
impl PartialOrd for Worst {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Worst {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.rank_cmp(&other.0)
    }
}

/// Reusable buffers for repeated queries.
#[derive(Debug, Default)]
pub struct KnnScratch {
    heap: BinaryHeap<Worst>,
    exclude: Vec<NodeId>,
}

/// Dense row-major embedding matrix with cached row norms.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingIndex {
    data: Vec<f64>,
    dim: usize,
    norms: Vec<f64>,
    metric: Metric,
}

pub fn build_index(data: Vec<f64>, dim: usize, metric: Metric) -> Result<EmbeddingIndex> {
    EmbeddingIndex::new(data, dim, metric)
}

#[inline]
/// Starts from `+0.0` so an all-zero product never yields `-0.0`, which
/// would rank below `0.0` under `total_cmp`.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |s, (x, y)| s + x * y)
}

impl EmbeddingIndex {
    pub fn new(data: Vec<f64>, dim: usize, metric: Metric) -> Result<Self> {
        if dim == 0 || data.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: data.len() % dim });
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row: i / dim, col: i % dim });
        }
        let norms = data.chunks_exact(dim).map(|r| libm::sqrt(dot(r, r))).collect();
        Ok(EmbeddingIndex { data, dim, norms, metric })
    }

    pub fn from_rows(rows: &[Vec<f64>], metric: Metric) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
        }
        Self::new(rows.concat(), dim, metric)
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.norms[i] == 0.0
    }

    /// Similarity between `query` (with precomputed norm) and row `i`.
    /// Cosine against a zero vector is 0.
    #[inline]
    fn score(&self, query: &[f64], query_norm: f64, i: usize) -> f64 {
        let d = dot(query, self.row(i));
        match self.metric {
            Metric::Dot => d,
            Metric::Cosine => {
                if query_norm == 0.0 || self.norms[i] == 0.0 {
                    0.0
                } else {
                    d / (query_norm * self.norms[i])
                }
            }
        }
    }

    /// Similarity between an arbitrary vector and row `i`.
    pub fn similarity(&self, query: &[f64], i: usize) -> Result<f64> {
        self.check_query(query)?;
        Ok(self.score(query, libm::sqrt(dot(query, query)), i))
    }

    fn check_query(&self, query: &[f64]) -> Result<()> {
        if query.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: query.len() });
        }
        if let Some(col) = query.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row: 0, col });
        }
        Ok(())
    }

    /// Exact top-`k` rows by similarity, best first, ties by ascending id.
    pub fn knn_query(&self, query: &[f64], k: usize, exclude: Option<&[NodeId]>) -> Result<Vec<RetrievalHit>> {
        self.knn_query_with(&mut KnnScratch::default(), query, k, exclude)
    }

    pub fn knn_query_with(
        &self,
        scratch: &mut KnnScratch,
        query: &[f64],
        k: usize,
        exclude: Option<&[NodeId]>,
    ) -> Result<Vec<RetrievalHit>> {
        if k == 0 {
            return Err(Error::invalid("k", "must be at least 1"));
        }
        self.check_query(query)?;
        let query_norm = libm::sqrt(dot(query, query));

        scratch.exclude.clear();
        if let Some(ex) = exclude {
            scratch.exclude.extend_from_slice(ex);
            scratch.exclude.sort_unstable();
            scratch.exclude.dedup();
        }
        let heap = &mut scratch.heap;
        heap.clear();
        let mut skip = scratch.exclude.iter().copied().peekable();
        for i in 0..self.len() {
            while skip.peek().is_some_and(|&s| (s as usize) < i) {
                skip.next();
            }
            if skip.peek() == Some(&(i as NodeId)) {
                continue;
            }
            let hit = RetrievalHit { node: i as NodeId, score: self.score(query, query_norm, i) };
            if heap.len() < k {
                heap.push(Worst(hit));
            } else if let Some(mut top) = heap.peek_mut() {
                if hit.rank_cmp(&top.0) == Ordering::Less {
                    *top = Worst(hit);
                }
            }
        }
        let mut hits: Vec<RetrievalHit> = heap.drain().map(|w| w.0).collect();
        hits.sort_by(RetrievalHit::rank_cmp);
        Ok(hits)
    }

    /// Runs [`EmbeddingIndex::knn_query`] for every query row, reusing buffers.
    /// `excludes`, when given, is aligned with `queries`.
    pub fn batch_knn(
        &self,
        queries: &[Vec<f64>],
        k: usize,
        excludes: Option<&[Vec<NodeId>]>,
    ) -> Result<Vec<Vec<RetrievalHit>>> {
        if let Some(ex) = excludes {
            if ex.len() != queries.len() {
                return Err(Error::DimensionMismatch { expected: queries.len(), got: ex.len() });
            }
        }
        let mut scratch = KnnScratch::default();
        queries
            .iter()
            .enumerate()
            .map(|(i, q)| self.knn_query_with(&mut scratch, q, k, excludes.map(|e| e[i].as_slice())))
            .collect()
    }
}
