use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{normalize_nodes, Graph, NodeId};

/// Personalized PageRank by power iteration.
///
/// Iterates `p <- alpha * r + (1 - alpha) * W^T p` from `p = r`, where `r` is
/// uniform over the seeds and `W` is row-stochastic over out-neighbors in
/// proportion to edge weight. Mass at nodes without outgoing weight returns
/// to `r`.
pub fn ppr_scores(g: &Graph, seeds: &[NodeId], alpha: f64, iters: usize) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid("ppr.alpha", "must lie in (0, 1]"));
    }
    if iters == 0 {
        return Err(Error::invalid("ppr.iters", "must be at least 1"));
    }
    let seeds = normalize_nodes(g, seeds)?;
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let n = g.node_count();
    let restart = 1.0 / seeds.len() as f64;
    let out_weight: Vec<f64> = (0..n as NodeId)
        .map(|u| g.adj_weights(u).map_or(g.degree(u) as f64, |w| w.iter().sum()))
        .collect();

    let mut p = vec![0.0; n];
    for &s in &seeds {
        p[s as usize] = restart;
    }
    let mut next = vec![0.0; n];
    for _ in 0..iters {
        next.iter_mut().for_each(|x| *x = 0.0);
        let mut dangling = 0.0;
        for u in 0..n {
            let mass = p[u];
            if mass == 0.0 {
                continue;
            }
            if out_weight[u] <= 0.0 {
                dangling += mass;
                continue;
            }
            let share = mass / out_weight[u];
            let weights = g.adj_weights(u as NodeId);
            for (i, &v) in g.adj(u as NodeId).iter().enumerate() {
                next[v as usize] += share * weights.map_or(1.0, |w| w[i]);
            }
        }
        let damp = 1.0 - alpha;
        next.iter_mut().for_each(|x| *x *= damp);
        let back = (alpha + damp * dangling) * restart;
        for &s in &seeds {
            next[s as usize] += back;
        }
        core::mem::swap(&mut p, &mut next);
    }
    Ok(p)
}
