//! Multi-threaded batch drivers.
//!
//! Inputs are cut into contiguous chunks, one per worker; each worker owns
//! its scratch buffers and results are concatenated in input order, so the
//! output never depends on the worker count.

use std::thread;

use rgl_core::generation::Generator;
use rgl_core::index::KnnScratch;
use rgl_core::pipeline::{Answer, BatchAnswerError, Query, RagPipeline};
use rgl_core::retrieval::{batch_retrieve_with, QueryError};
use rgl_core::{EmbeddingIndex, Error, Graph, NodeId, RetrievalConfig, RetrievalHit, ScratchSpace, Subgraph};

/// Runs `work(offset, chunk)` on up to `workers` threads and concatenates
/// the per-chunk outputs in order. One worker runs inline.
pub fn chunked<T: Sync, R: Send>(items: &[T], workers: usize, work: impl Fn(usize, &[T]) -> Vec<R> + Sync) -> Vec<R> {
    let workers = workers.max(1).min(items.len().max(1));
    if workers == 1 {
        return work(0, items);
    }
    let size = items.len().div_ceil(workers);
    thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(size)
            .enumerate()
            .map(|(c, chunk)| {
                let work = &work;
                s.spawn(move || work(c * size, chunk))
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("batch worker panicked")).collect()
    })
}

/// Threads available to this process.
pub fn default_workers() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}

/// Parallel [`EmbeddingIndex::batch_knn`].
pub fn batch_knn(
    index: &EmbeddingIndex,
    queries: &[Vec<f64>],
    k: usize,
    excludes: Option<&[Vec<NodeId>]>,
    workers: usize,
) -> Result<Vec<Vec<RetrievalHit>>, Error> {
    if let Some(ex) = excludes {
        if ex.len() != queries.len() {
            return Err(Error::DimensionMismatch { expected: queries.len(), got: ex.len() });
        }
    }
    let per_query = chunked(queries, workers, |offset, chunk| {
        let mut scratch = KnnScratch::default();
        chunk
            .iter()
            .enumerate()
            .map(|(i, q)| index.knn_query_with(&mut scratch, q, k, excludes.map(|e| e[offset + i].as_slice())))
            .collect()
    });
    per_query.into_iter().collect()
}

/// Parallel [`rgl_core::retrieval::batch_retrieve`]; failed queries carry
/// their global index.
pub fn batch_retrieve(
    g: &Graph,
    seed_sets: &[Vec<NodeId>],
    cfg: &RetrievalConfig,
    workers: usize,
) -> Result<Vec<Result<Subgraph, QueryError>>, Error> {
    cfg.validate()?;
    Ok(chunked(seed_sets, workers, |offset, chunk| {
        let mut scratch = ScratchSpace::new(g.node_count());
        batch_retrieve_with(g, &mut scratch, chunk, cfg, offset).expect("config validated")
    }))
}

/// Parallel [`RagPipeline::answer_batch`].
pub fn answer_batch<G: Generator>(
    p: &RagPipeline<G>,
    queries: &[Query],
    k: usize,
    workers: usize,
) -> Vec<Result<Answer, BatchAnswerError>> {
    chunked(queries, workers, |offset, chunk| p.answer_batch_with(&mut p.scratch(), chunk, k, offset))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunking_preserves_order() {
        let items: Vec<usize> = (0..37).collect();
        for workers in [1, 2, 3, 8, 64] {
            let out = chunked(&items, workers, |offset, chunk| chunk.iter().enumerate().map(|(i, &x)| (offset + i, x)).collect());
            assert!(out.iter().all(|&(i, x)| i == x));
            assert_eq!(out.len(), 37);
        }
        assert!(chunked(&[] as &[u8], 4, |_, c| c.to_vec()).is_empty());
    }
}
