mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use rgl_core::index::RetrievalHit;
use rgl_core::retrieval::{
    batch_retrieve, bfs_expand, dense_subgraph, filter_nodes, multi_source_distances, ppr_scores, retrieve_with,
    steiner_subgraph, NodeFilter,
};
use rgl_core::synth::{gen_graph, SyntheticGraphSpec};
use rgl_core::{build_graph, Edge, Error, NodeId, RetrievalConfig, RetrievalMethod, ScratchSpace};

#[test]
fn bfs_matches_textbook_closure() {
    let mut r = rng(11);
    for case in 0..50 {
        let n = 50;
        let edges = random_edges(&mut r, n, 0.06, None);
        let g = to_graph(n, &edges, false);
        let seeds = sample_distinct(&mut r, n, 1 + case % 3);
        let sub = bfs_expand(&g, &seeds, 2, usize::MAX, usize::MAX).unwrap();
        let want: Vec<NodeId> = bfs_closure(n, &edges, &seeds, 2).into_iter().collect();
        assert_eq!(sub.nodes, want);
        sub.validate(&g).unwrap();
        let induced = rgl_core::induced_subgraph(&g, &sub.nodes).unwrap();
        assert_eq!(sub.edges, induced.edges);
    }
}

#[test]
fn bfs_hops_zero_returns_seeds() {
    let g = to_graph(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)], false);
    assert_eq!(bfs_expand(&g, &[2, 0], 0, 8, 8).unwrap().nodes, [0, 2]);
}

#[test]
fn distances_match_floyd_warshall() {
    let mut r = rng(12);
    for _ in 0..40 {
        let n = 30;
        let edges = random_edges(&mut r, n, 0.1, Some(9));
        let g = to_graph(n, &edges, true);
        let fw = floyd_warshall(n, &edges);
        let sources = { let k = r.random_range(1..4); sample_distinct(&mut r, n, k) };
        let sp = multi_source_distances(&g, &sources).unwrap();
        for u in 0..n {
            let want = sources.iter().map(|&s| fw[s as usize][u]).fold(f64::INFINITY, f64::min);
            assert_eq!(sp.dist[u], want, "node {u}");
            if let Some(path) = sp.path_to(u as NodeId) {
                // Path endpoints and length agree with the distance.
                assert!(sources.contains(&path[0]));
                assert_eq!(*path.last().unwrap(), u as NodeId);
                let len: f64 = path.windows(2).map(|w| g.edge_weight(w[0], w[1]).unwrap()).sum();
                assert_eq!(len, want);
            } else {
                assert!(want.is_infinite());
            }
        }
    }
}

#[test]
fn unweighted_distances_use_hop_counts() {
    let g = to_graph(5, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)], false);
    let sp = multi_source_distances(&g, &[0]).unwrap();
    assert_eq!(sp.dist[..4], [0.0, 1.0, 2.0, 3.0]);
    assert!(sp.dist[4].is_infinite());
    assert_eq!(multi_source_distances(&g, &[]).unwrap_err(), Error::EmptySeeds);
}

#[test]
fn steiner_within_twice_optimum() {
    let mut r = rng(13);
    for _ in 0..60 {
        let n = r.random_range(5..=12);
        let weighted = r.random_bool(0.5);
        let edges = random_connected_edges(&mut r, n, 0.25, weighted.then_some(5));
        let g = to_graph(n, &edges, weighted);
        let terminals = { let k = r.random_range(1..=4); sample_distinct(&mut r, n, k) };
        let sub = steiner_subgraph(&g, &terminals).unwrap();
        sub.validate(&g).unwrap();
        assert!(sub.is_tree());
        assert!(terminals.iter().all(|&t| sub.contains(t)));
        let opt = exact_steiner_weight(n, &edges, &terminals).unwrap();
        let w = sub.total_weight();
        assert!(w >= opt - 1e-9 && w <= 2.0 * opt + 1e-9, "weight {w}, optimum {opt}");
    }
}

#[test]
fn steiner_rejects_split_terminals() {
    let g = to_graph(5, &[(0, 1, 1.0), (2, 3, 1.0)], false);
    assert_eq!(steiner_subgraph(&g, &[1, 0, 3]).unwrap_err(), Error::Disconnected { a: 0, b: 3 });
}

#[test]
fn dense_meets_half_of_seeded_optimum() {
    let mut r = rng(14);
    for _ in 0..60 {
        let n = r.random_range(4..=14);
        let edges = { let p = r.random_range(0.15..0.6); random_edges(&mut r, n, p, None) };
        let g = to_graph(n, &edges, false);
        let seeds = sample_distinct(&mut r, n, 2);
        let sub = dense_subgraph(&g, &seeds, n, usize::MAX).unwrap();
        sub.validate(&g).unwrap();
        let pool = bfs_closure(n, &edges, &seeds, n);
        let best = max_seed_density(n, &edges, &seeds, &pool);
        assert!(sub.density() >= 0.5 * best - 1e-12, "density {} vs optimum {best}", sub.density());
        let induced = rgl_core::induced_subgraph(&g, &sub.nodes).unwrap();
        assert_eq!(sub.edges, induced.edges);
    }
}

#[test]
fn dense_triangle_with_pendant() {
    let edges = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (2, 3, 1.0)];
    let g = to_graph(4, &edges, false);
    let sub = dense_subgraph(&g, &[0], 2, 16).unwrap();
    assert_eq!(sub.nodes, [0, 1, 2]);
    assert_eq!(sub.density(), 1.0);
    let pool: BTreeSet<NodeId> = (0..4).collect();
    assert_eq!(max_seed_density(4, &edges, &[0], &pool), 1.0);
}

#[test]
fn ppr_matches_linear_solve() {
    let p3 = [(0, 1, 1.0), (1, 2, 1.0)];
    let g = to_graph(3, &p3, false);
    let got = ppr_scores(&g, &[0], 0.15, 100).unwrap();
    let want = ppr_fixed_point(3, &p3, &[0], 0.15);
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() < 1e-6, "{got:?} vs {want:?}");
    }

    let mut r = rng(15);
    for _ in 0..30 {
        let n = r.random_range(2..=30);
        let weighted = r.random_bool(0.5);
        let edges = random_edges(&mut r, n, 0.15, weighted.then_some(4));
        let g = to_graph(n, &edges, weighted);
        let seeds = { let k = r.random_range(1..=3); sample_distinct(&mut r, n, k) };
        let alpha = r.random_range(0.1..0.9);
        let got = ppr_scores(&g, &seeds, alpha, 400).unwrap();
        let want = ppr_fixed_point(n, &edges, &seeds, alpha);
        assert!((got.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}

#[test]
fn ppr_seed_dominates_on_cycle() {
    let n = 9;
    let edges: Vec<WEdge> = (0..n).map(|i| (i as NodeId, ((i + 1) % n) as NodeId, 1.0)).collect();
    let g = to_graph(n, &edges, false);
    let p = ppr_scores(&g, &[4], 0.2, 200).unwrap();
    assert!(p.iter().all(|&x| x <= p[4]));
    // Reflection symmetry around the seed.
    assert!((p[3] - p[5]).abs() < 1e-12);
}

proptest! {
    #[test]
    fn filter_matches_comprehension(mut scores in prop::collection::vec(-1.0f64..1.0, 0..40), k in 0usize..50, t in -1.2f64..1.2) {
        scores.sort_by(|a, b| b.total_cmp(a));
        let hits: Vec<RetrievalHit> = scores.iter().enumerate().map(|(i, &score)| RetrievalHit { node: i as NodeId, score }).collect();
        let top = filter_nodes(&hits, NodeFilter::TopK(k));
        prop_assert_eq!(&top[..], &hits[..k.min(hits.len())]);
        if k >= 1 && !hits.is_empty() {
            prop_assert!(!top.is_empty());
        }
        let kept: Vec<RetrievalHit> = hits.iter().filter(|h| h.score >= t).copied().collect();
        prop_assert_eq!(filter_nodes(&hits, NodeFilter::Threshold(t)), kept);
    }

    #[test]
    fn bfs_respects_caps(seed in any::<u64>(), hops in 0usize..4, fanout in 1usize..4, max_nodes in 1usize..20) {
        let mut r = rng(seed);
        let n = 40;
        let edges = random_edges(&mut r, n, 0.08, None);
        let g = to_graph(n, &edges, false);
        let seeds = sample_distinct(&mut r, n, 3);
        let sub = bfs_expand(&g, &seeds, hops, fanout, max_nodes).unwrap();
        sub.validate(&g).unwrap();
        prop_assert!(seeds.iter().all(|&s| sub.contains(s)));
        prop_assert!(sub.nodes.len() <= max_nodes.max(seeds.len()));
        let closure = bfs_closure(n, &edges, &seeds, hops);
        prop_assert!(sub.nodes.iter().all(|u| closure.contains(u)));
    }

    #[test]
    fn steiner_spans_terminals(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=30);
        let edges = random_connected_edges(&mut r, n, 0.1, Some(3));
        let g = to_graph(n, &edges, true);
        let terminals = { let k = r.random_range(1..=6); sample_distinct(&mut r, n, k) };
        let sub = steiner_subgraph(&g, &terminals).unwrap();
        sub.validate(&g).unwrap();
        prop_assert!(sub.is_tree());
        let pairs: Vec<(NodeId, NodeId)> = sub.edges.iter().map(|e| (e.src, e.dst)).collect();
        prop_assert!(is_spanning_tree(&sub.nodes, &pairs));
        // Leaves are terminals after pruning.
        for &u in &sub.nodes {
            let deg = sub.edges.iter().filter(|e| e.src == u || e.dst == u).count();
            prop_assert!(deg != 1 || terminals.contains(&u));
        }
    }

    #[test]
    fn ppr_is_distribution(seed in any::<u64>(), alpha in 0.05f64..=1.0, iters in 1usize..60) {
        let mut r = rng(seed);
        let n = r.random_range(1..=25);
        let edges = random_edges(&mut r, n, 0.2, None);
        let g = to_graph(n, &edges, false);
        let seeds = sample_distinct(&mut r, n, 2);
        let p = ppr_scores(&g, &seeds, alpha, iters).unwrap();
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

fn seed_sets(r: &mut impl Rng, n: usize, count: usize) -> Vec<Vec<NodeId>> {
    (0..count).map(|_| { let k = r.random_range(1..=4); sample_distinct(r, n, k) }).collect()
}

#[test]
fn batch_equals_sequential_for_every_method() {
    let g = gen_graph(&SyntheticGraphSpec::preferential_attachment(1000, 2, 3)).unwrap();
    let mut r = rng(16);
    let sets = seed_sets(&mut r, 1000, 200);
    for method in [RetrievalMethod::Bfs, RetrievalMethod::Steiner, RetrievalMethod::Dense] {
        let cfg = RetrievalConfig { hops: 1, max_nodes: 40, ..RetrievalConfig::default().with_method(method) };
        let batch = batch_retrieve(&g, &sets, &cfg).unwrap();
        assert_eq!(batch.len(), sets.len());
        for (i, (got, seeds)) in batch.iter().zip(&sets).enumerate() {
            let mut fresh = ScratchSpace::new(g.node_count());
            let want = retrieve_with(&g, &mut fresh, seeds, &cfg);
            assert_eq!(got.as_ref().map_err(|e| &e.error), want.as_ref(), "{method} query {i}");
        }
    }
    assert!(batch_retrieve(&g, &[], &RetrievalConfig::default()).unwrap().is_empty());
}

fn pooled_sets(r: &mut impl Rng, pool: &[NodeId], count: usize) -> Vec<Vec<NodeId>> {
    (0..count)
        .map(|_| {
            let k = r.random_range(1..=4);
            sample_distinct(r, pool.len(), k).into_iter().map(|i| pool[i as usize]).collect()
        })
        .collect()
}

#[test]
fn shared_batch_work_leaves_results_unchanged() {
    // A hub-heavy component plus a detached path, with seeds drawn from a
    // small pool so terminals recur and some pairs are disconnected.
    let base = gen_graph(&SyntheticGraphSpec::preferential_attachment(3000, 4, 5)).unwrap();
    let mut edges: Vec<Edge> = base.edges().map(|(u, v, _)| Edge::new(u, v)).collect();
    for u in 3000..3010 {
        edges.push(Edge::new(u, u + 1));
    }
    let g = build_graph(&edges, 3012, false).unwrap();
    assert!((0..3000).any(|u| g.adj(u).len() >= 64));
    let mut r = rng(18);
    for round in 0..4 {
        let mut pool = sample_distinct(&mut r, 3000, 12);
        pool.extend([3000, 3005, 3011]);
        let sets = pooled_sets(&mut r, &pool, 300);
        for method in [RetrievalMethod::Bfs, RetrievalMethod::Steiner] {
            let cfg = RetrievalConfig { hops: 2, max_nodes: 400, ..RetrievalConfig::default().with_method(method) };
            let batch = batch_retrieve(&g, &sets, &cfg).unwrap();
            let mut fresh = ScratchSpace::new(g.node_count());
            for (i, (got, seeds)) in batch.iter().zip(&sets).enumerate() {
                let want = retrieve_with(&g, &mut fresh, seeds, &cfg);
                assert_eq!(got.as_ref().map_err(|e| &e.error), want.as_ref(), "{method} round {round} query {i}");
            }
        }
    }
}

#[test]
fn batch_errors_are_tagged_and_isolated() {
    let g = build_graph(&[Edge::new(0, 1), Edge::new(2, 3)], 4, false).unwrap();
    let cfg = RetrievalConfig::default().with_method(RetrievalMethod::Steiner);
    let out = batch_retrieve(&g, &[vec![0, 1], vec![0, 2], vec![], vec![2, 3]], &cfg).unwrap();
    assert!(out[0].is_ok() && out[3].is_ok());
    assert_eq!(out[1].as_ref().unwrap_err().index, 1);
    assert_eq!(out[2].as_ref().unwrap_err().error, Error::EmptySeeds);
}

#[test]
fn scratch_stops_growing_after_warm_up() {
    let g = gen_graph(&SyntheticGraphSpec::preferential_attachment(5000, 3, 9)).unwrap();
    let mut r = rng(17);
    let sets = seed_sets(&mut r, 5000, 10_000);
    for method in [RetrievalMethod::Bfs, RetrievalMethod::Steiner, RetrievalMethod::Dense] {
        let cfg = RetrievalConfig { hops: 1, max_nodes: 32, ..RetrievalConfig::default().with_method(method) };
        let mut s = ScratchSpace::new(g.node_count());
        for seeds in &sets {
            let _ = retrieve_with(&g, &mut s, seeds, &cfg);
        }
        let warmed = s.growth_events();
        let epoch = s.epoch();
        for seeds in &sets {
            let _ = retrieve_with(&g, &mut s, seeds, &cfg);
        }
        assert_eq!(s.growth_events(), warmed, "{method}: buffers grew after warm-up");
        assert!(s.epoch() > epoch);
    }
}
