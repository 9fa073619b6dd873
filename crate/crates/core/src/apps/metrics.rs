use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::embed::tokenize;
use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Precision, recall and their harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    fn from_counts(overlap: usize, candidate_total: usize, reference_total: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(overlap, candidate_total);
        let recall = ratio(overlap, reference_total);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        Prf { precision, recall, f1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RougeScores {
    pub rouge1: Prf,
    pub rouge2: Prf,
    pub rouge_l: Prf,
}

fn ngram_counts(tokens: &[String], n: usize) -> BTreeMap<&[String], usize> {
    let mut counts = BTreeMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

fn rouge_n(cand: &[String], reference: &[String], n: usize) -> Prf {
    let c = ngram_counts(cand, n);
    let r = ngram_counts(reference, n);
    let overlap = c.iter().map(|(g, &k)| k.min(r.get(g).copied().unwrap_or(0))).sum();
    Prf::from_counts(overlap, c.values().sum(), r.values().sum())
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { cur[j].max(prev[j + 1]) };
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// ROUGE-1, ROUGE-2 (clipped n-gram overlap) and ROUGE-L (longest common
/// subsequence) over lowercased alphanumeric tokens.
pub fn rouge(candidate: &str, reference: &str) -> RougeScores {
    let c = tokenize(candidate);
    let r = tokenize(reference);
    RougeScores {
        rouge1: rouge_n(&c, &r, 1),
        rouge2: rouge_n(&c, &r, 2),
        rouge_l: Prf::from_counts(lcs_len(&c, &r), c.len(), r.len()),
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    Ok(())
}

/// Fraction of `relevant` found in the first `k` ranked items.
pub fn recall_at_k(ranked: &[NodeId], relevant: &[NodeId], k: usize) -> Result<f64> {
    check_k(k)?;
    let mut rel = relevant.to_vec();
    rel.sort_unstable();
    rel.dedup();
    if rel.is_empty() {
        return Ok(0.0);
    }
    let hits = ranked.iter().take(k).filter(|u| rel.binary_search(u).is_ok()).count();
    Ok(hits as f64 / rel.len() as f64)
}

/// Binary-relevance NDCG with ideal DCG over `min(k, |relevant|)` positions.
pub fn ndcg_at_k(ranked: &[NodeId], relevant: &[NodeId], k: usize) -> Result<f64> {
    check_k(k)?;
    let mut rel = relevant.to_vec();
    rel.sort_unstable();
    rel.dedup();
    let gain = |i: usize| 1.0 / libm::log2(i as f64 + 2.0);
    let dcg: f64 = ranked.iter().take(k).enumerate().filter(|(_, u)| rel.binary_search(u).is_ok()).map(|(i, _)| gain(i)).sum();
    let ideal: f64 = (0..k.min(rel.len())).map(gain).sum();
    Ok(if ideal == 0.0 { 0.0 } else { dcg / ideal })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMetric {
    /// Mean squared coordinate error per row.
    Mse,
    /// One minus cosine similarity; a zero vector has similarity 0.
    Cosine,
}

/// Reconstruction error averaged over masked rows. Returns 0 when nothing is masked.
pub fn reconstruction_error(completed: &[Vec<f64>], truth: &[Vec<f64>], mask: &[bool], metric: ErrorMetric) -> Result<f64> {
    if completed.len() != truth.len() || mask.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: completed.len().min(mask.len()) });
    }
    let mut total = 0.0;
    let mut rows = 0usize;
    for ((c, t), _) in completed.iter().zip(truth).zip(mask).filter(|(_, &m)| m) {
        if c.len() != t.len() || t.is_empty() {
            return Err(Error::DimensionMismatch { expected: t.len(), got: c.len() });
        }
        total += match metric {
            ErrorMetric::Mse => c.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / t.len() as f64,
            ErrorMetric::Cosine => {
                let dot: f64 = c.iter().zip(t).map(|(a, b)| a * b).sum();
                let nc = libm::sqrt(c.iter().map(|x| x * x).sum());
                let nt = libm::sqrt(t.iter().map(|x| x * x).sum());
                1.0 - if nc == 0.0 || nt == 0.0 { 0.0 } else { dot / (nc * nt) }
            }
        };
        rows += 1;
    }
    Ok(if rows == 0 { 0.0 } else { total / rows as f64 })
}
