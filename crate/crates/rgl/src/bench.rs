//! Naive-versus-optimized retrieval timing.
//!
//! For every query count `q` the first `q` seed sets of one seeded stream
//! are retrieved by each (method, implementation) pair: untimed warm-up
//! passes, then `repetitions` timed passes. The first warm-up outputs of the
//! two implementations are compared, so every timed pass does identical
//! work. Timed passes drop each result as soon as it is produced. Optimized
//! passes reuse one scratch space per worker; naive passes allocate per
//! query.

use std::hint::black_box;
use std::io::{self, Write};
use std::thread;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rgl_core::retrieval::{batch_retrieve_for_each, bfs_expand_with};
use rgl_core::synth::{gen_graph, SyntheticGraphSpec};
use rgl_core::{Error, Graph, NodeId, RetrievalConfig, RetrievalMethod, ScratchSpace, Subgraph};

use crate::config::{BenchMethod, BenchSection};
use crate::naive::{naive_bfs, naive_steiner, NaiveGraph};

pub const CSV_HEADER: &str = "graph,method,impl,queries,repetition,retrieval_seconds,learning_seconds,failures";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Impl {
    Naive,
    Optimized,
    /// Optimized kernels on several workers; reported apart from `Optimized`.
    Parallel(usize),
}

impl Impl {
    pub fn label(self) -> &'static str {
        match self {
            Impl::Naive => "naive",
            Impl::Optimized => "optimized",
            Impl::Parallel(_) => "optimized_parallel",
        }
    }
}

impl BenchMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            BenchMethod::Bfs => "bfs",
            BenchMethod::Steiner => "steiner",
        }
    }
}

/// Timings of one (method, implementation, query count) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub graph: String,
    pub method: BenchMethod,
    pub implementation: Impl,
    pub queries: usize,
    /// Wall-clock seconds of each timed repetition.
    pub samples: Vec<f64>,
    /// Median of `samples`.
    pub retrieval_seconds: f64,
    pub learning_seconds: f64,
    pub failures: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("query counts must be non-empty and positive")]
    NoQueries,
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("{method} query {index}: naive and optimized results differ")]
    Mismatch { method: &'static str, index: usize },
    #[error(transparent)]
    Core(#[from] Error),
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// `count` seed sets: a uniformly drawn query node plus up to
/// `seeds_per_query - 1` distinct nodes within `seed_radius` hops of it.
pub fn sample_seed_sets(g: &Graph, count: usize, cfg: &BenchSection) -> Vec<Vec<NodeId>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut scratch = ScratchSpace::new(g.node_count());
    (0..count)
        .map(|_| {
            let u = rng.random_range(0..g.node_count()) as NodeId;
            let ball = bfs_expand_with(g, &mut scratch, &[u], cfg.seed_radius, usize::MAX, usize::MAX)
                .expect("query node is in range")
                .nodes;
            let others: Vec<NodeId> = ball.into_iter().filter(|&v| v != u).collect();
            let take = (cfg.seeds_per_query - 1).min(others.len());
            let mut seeds = vec![u];
            seeds.extend(sample(&mut rng, others.len(), take).into_iter().map(|i| others[i]));
            seeds
        })
        .collect()
}

fn retrieval_config(method: BenchMethod, cfg: &BenchSection) -> RetrievalConfig {
    let method = match method {
        BenchMethod::Bfs => RetrievalMethod::Bfs,
        BenchMethod::Steiner => RetrievalMethod::Steiner,
    };
    RetrievalConfig { method, hops: cfg.hops, fanout_cap: cfg.fanout_cap, max_nodes: cfg.max_nodes, ..RetrievalConfig::default() }
}

type Outputs = Vec<Result<Subgraph, Error>>;

/// Returns `r` when `keep` is set; otherwise drops it at once, so a timed
/// pass never holds more than one result.
fn keep_or_drop(keep: bool, r: Result<Subgraph, Error>) -> Option<Result<Subgraph, Error>> {
    if keep {
        Some(r)
    } else {
        drop(black_box(r));
        None
    }
}

fn naive_pass(ng: &NaiveGraph, sets: &[Vec<NodeId>], method: BenchMethod, cfg: &BenchSection, keep: bool) -> Outputs {
    sets.iter()
        .filter_map(|seeds| {
            let r = match method {
                BenchMethod::Bfs => naive_bfs(ng, seeds, cfg.hops, cfg.fanout_cap, cfg.max_nodes),
                BenchMethod::Steiner => naive_steiner(ng, seeds),
            };
            keep_or_drop(keep, r)
        })
        .collect()
}

/// Batched kernels: one scratch space per worker, reused across its chunk.
/// One pass over `sets` split into contiguous chunks, one per scratch
/// space. The spaces persist across passes, as a long-lived worker's would.
fn optimized_pass(g: &Graph, sets: &[Vec<NodeId>], rcfg: &RetrievalConfig, scratches: &mut [ScratchSpace], keep: bool) -> Outputs {
    let run = |chunk: &[Vec<NodeId>], scratch: &mut ScratchSpace| {
        let mut out = Vec::new();
        batch_retrieve_for_each(g, scratch, chunk, rcfg, |_, r| out.extend(keep_or_drop(keep, r))).expect("config validated");
        out
    };
    if scratches.len() <= 1 || sets.len() <= 1 {
        return run(sets, &mut scratches[0]);
    }
    let size = sets.len().div_ceil(scratches.len());
    thread::scope(|s| {
        let handles: Vec<_> =
            sets.chunks(size).zip(scratches.iter_mut()).map(|(chunk, scratch)| s.spawn(move || run(chunk, scratch))).collect();
        handles.into_iter().flat_map(|h| h.join().expect("bench worker panicked")).collect()
    })
}

/// Untimed passes repeat until this much time has passed, so each
/// implementation starts its timed passes with warm caches and allocator.
const WARM_UP_SECONDS: f64 = 0.25;
const MAX_WARM_UP_PASSES: usize = 500;

/// Warm-up passes (the first keeps its outputs), then `reps` timed passes.
fn time_passes(reps: usize, mut pass: impl FnMut(bool) -> Outputs) -> (Outputs, Vec<f64>) {
    let warm_start = Instant::now();
    let warm = pass(true);
    let mut passes = 1;
    while passes < MAX_WARM_UP_PASSES && warm_start.elapsed().as_secs_f64() < WARM_UP_SECONDS {
        drop(pass(false));
        passes += 1;
    }
    let samples = (0..reps)
        .map(|_| {
            let start = Instant::now();
            let out = pass(false);
            let secs = start.elapsed().as_secs_f64();
            debug_assert!(out.is_empty());
            secs
        })
        .collect();
    (warm, samples)
}

/// Benchmarks an existing graph; `tag` fills the `graph` column.
pub fn run_bench_on(g: &Graph, tag: &str, query_counts: &[usize], cfg: &BenchSection) -> Result<Vec<BenchRecord>, BenchError> {
    if query_counts.is_empty() || query_counts.contains(&0) {
        return Err(BenchError::NoQueries);
    }
    if g.node_count() == 0 {
        return Err(BenchError::EmptyGraph);
    }
    let all_sets = sample_seed_sets(g, *query_counts.iter().max().expect("non-empty"), cfg);
    let ng = NaiveGraph::from_graph(g);
    let mut records = Vec::new();
    for &method in &cfg.methods {
        let rcfg = retrieval_config(method, cfg);
        rcfg.validate()?;
        for &q in query_counts {
            let sets = &all_sets[..q];
            log::info!("bench {tag} {} q={q}", method.as_str());
            let record = |implementation, samples: Vec<f64>, out: &Outputs| BenchRecord {
                graph: tag.to_string(),
                method,
                implementation,
                queries: q,
                retrieval_seconds: median(&samples),
                samples,
                learning_seconds: cfg.learning_seconds,
                failures: out.iter().filter(|r| r.is_err()).count(),
            };

            let (naive_out, samples) = time_passes(cfg.repetitions, |keep| naive_pass(&ng, sets, method, cfg, keep));
            records.push(record(Impl::Naive, samples, &naive_out));
            let mut scratches = vec![ScratchSpace::new(g.node_count())];
            let (opt_out, samples) = time_passes(cfg.repetitions, |keep| optimized_pass(g, sets, &rcfg, &mut scratches, keep));
            if let Some(index) = naive_out.iter().zip(&opt_out).position(|(a, b)| a != b) {
                return Err(BenchError::Mismatch { method: method.as_str(), index });
            }
            records.push(record(Impl::Optimized, samples, &opt_out));
            if cfg.workers > 1 {
                let mut scratches: Vec<ScratchSpace> = (0..cfg.workers).map(|_| ScratchSpace::new(g.node_count())).collect();
                let (par_out, samples) =
                    time_passes(cfg.repetitions, |keep| optimized_pass(g, sets, &rcfg, &mut scratches, keep));
                if let Some(index) = opt_out.iter().zip(&par_out).position(|(a, b)| a != b) {
                    return Err(BenchError::Mismatch { method: method.as_str(), index });
                }
                records.push(record(Impl::Parallel(cfg.workers), samples, &par_out));
            }
        }
    }
    Ok(records)
}

/// Generates the synthetic graph and benchmarks it.
pub fn run_bench(spec: &SyntheticGraphSpec, query_counts: &[usize], cfg: &BenchSection) -> Result<Vec<BenchRecord>, BenchError> {
    let g = gen_graph(spec)?;
    run_bench_on(&g, &spec.tag(), query_counts, cfg)
}

/// One row per timed repetition (numbered from 1) plus a `median` row per
/// record.
pub fn write_csv(records: &[BenchRecord], mut w: impl Write) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        let reps = r.samples.iter().enumerate().map(|(i, &s)| ((i + 1).to_string(), s));
        for (rep, secs) in reps.chain([("median".to_string(), r.retrieval_seconds)]) {
            writeln!(
                w,
                "{},{},{},{},{},{:.9},{},{}",
                r.graph,
                r.method.as_str(),
                r.implementation.label(),
                r.queries,
                rep,
                secs,
                r.learning_seconds,
                r.failures
            )?;
        }
    }
    Ok(())
}
