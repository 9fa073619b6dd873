mod common;

use common::*;
use rand::Rng;
use rgl_core::apps::{abstract_context, abstract_generation_run, AbstractQuery, ContextMode};
use rgl_core::compose::{compose, identity, Filter, Knn, Retrieve, Serialize, StageFn};
use rgl_core::embed::HashingEmbedder;
use rgl_core::generation::MockClient;
use rgl_core::pipeline::{Query, RagPipeline};
use rgl_core::prompt::{NodeOrder, PromptForge};
use rgl_core::retrieval::{filter_nodes, retrieve_with, NodeFilter};
use rgl_core::synth::{community_graph, CommunitySpec};
use rgl_core::{EmbeddingIndex, Metric, NodeId, RetrievalConfig, RetrievalMethod, ScratchSpace};

fn pipeline(method: RetrievalMethod, filter: NodeFilter) -> RagPipeline<MockClient> {
    let (g, attrs) = community_graph(&CommunitySpec { n: 120, ..CommunitySpec::default() }).unwrap();
    let (data, dim) = attrs.dense_features().unwrap();
    let index = EmbeddingIndex::new(data, dim, Metric::Cosine).unwrap();
    let cfg = RetrievalConfig { hops: 1, max_nodes: 24, filter, ..RetrievalConfig::default().with_method(method) };
    RagPipeline::new(g, attrs, index, cfg, PromptForge::default(), MockClient::default(), 400).unwrap()
}

fn queries(p: &RagPipeline<MockClient>, count: usize, seed: u64) -> Vec<Query> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let base = p.index().row(r.random_range(0..p.index().len())).to_vec();
            let vector = base.iter().map(|x| x + r.random_range(-0.3..0.3)).collect();
            Query { text: format!("question {i}"), vector }
        })
        .collect()
}

const METHODS: [RetrievalMethod; 3] = [RetrievalMethod::Bfs, RetrievalMethod::Steiner, RetrievalMethod::Dense];

#[test]
fn subgraph_equals_direct_kernel_call() {
    for method in METHODS {
        let p = pipeline(method, NodeFilter::TopK(3));
        for q in queries(&p, 20, 1) {
            let a = p.answer(&q.text, &q.vector, 5).unwrap();
            let hits = filter_nodes(&p.index().knn_query(&q.vector, 5, None).unwrap(), NodeFilter::TopK(3));
            assert_eq!(a.hits, hits);
            let seeds: Vec<NodeId> = hits.iter().map(|h| h.node).collect();
            let mut s = ScratchSpace::new(p.graph().node_count());
            let direct = retrieve_with(p.graph(), &mut s, &seeds, p.retrieval()).unwrap();
            assert_eq!(a.subgraph.nodes, direct.nodes);
            assert_eq!(a.subgraph.edges, direct.edges);
            a.subgraph.validate(p.graph()).unwrap();
        }
    }
}

#[test]
fn batch_equals_map_of_single() {
    for method in METHODS {
        let p = pipeline(method, NodeFilter::None);
        let qs = queries(&p, 100, 2);
        let batch = p.answer_batch(&qs, 3);
        assert_eq!(batch.len(), qs.len());
        for (q, got) in qs.iter().zip(&batch) {
            let want = p.answer(&q.text, &q.vector, 3).map_err(|e| e.to_string());
            assert_eq!(got.as_ref().map_err(|e| e.error.to_string()), want.as_ref().map_err(|e| e.clone()));
        }
        assert!(p.answer_batch(&[], 3).is_empty());
    }
}

#[test]
fn composed_stages_equal_nested_calls() {
    let p = pipeline(RetrievalMethod::Bfs, NodeFilter::None);
    let cfg = p.retrieval().clone();
    let filter = NodeFilter::Threshold(0.5);
    let chain = rgl_core::compose!(
        Knn { index: p.index(), k: 6 },
        Filter(filter),
        Retrieve { graph: p.graph(), config: cfg.clone() },
        Serialize { attrs: p.attrs(), forge: p.forge(), budget: 400, order: NodeOrder::ScoreDesc },
    );
    for q in queries(&p, 30, 3) {
        let hits = filter_nodes(&p.index().knn_query(&q.vector, 6, None).unwrap(), filter);
        let nested = Retrieve { graph: p.graph(), config: cfg.clone() }
            .apply(hits.clone())
            .and_then(|sub| p.forge().serialize_subgraph(&sub, p.attrs(), 400, NodeOrder::ScoreDesc));
        assert_eq!(chain.apply(q.vector.clone()), nested);
        let fb = compose(Filter(filter), Retrieve { graph: p.graph(), config: cfg.clone() });
        assert_eq!(fb.apply(p.index().knn_query(&q.vector, 6, None).unwrap()), Retrieve { graph: p.graph(), config: cfg.clone() }.apply(hits.clone()));
        assert_eq!(compose(identity(), Filter(filter)).apply(hits.clone()), Filter(filter).apply(hits));
    }
}

#[test]
fn rgl_context_includes_knn_seed_texts() {
    for mode in [ContextMode::RglBfs, ContextMode::RglDense, ContextMode::RglSteiner] {
        let p = pipeline(RetrievalMethod::Bfs, NodeFilter::None);
        for node in [0, 17, 55] {
            let knn = abstract_context(&p, node, ContextMode::Knn, 3).unwrap();
            let rgl = abstract_context(&p, node, mode, 3).unwrap();
            let kb = p.serialize(&knn).unwrap();
            let rb = p.serialize(&rgl).unwrap();
            assert!(knn.nodes.iter().all(|u| rgl.contains(*u)));
            // Seeds render first, so once the budget admits as many lines as
            // there are kNN hits, every kNN text is present.
            assert!(rb.included_nodes.len() >= knn.nodes.len());
            assert!(kb.included_nodes.iter().all(|u| rb.included_nodes.contains(u)));
            for u in &kb.included_nodes {
                assert!(rb.prompt.contains(p.attrs().text(*u).unwrap()));
            }
        }
    }
}

#[test]
fn abstract_run_is_stable() {
    let p = pipeline(RetrievalMethod::Bfs, NodeFilter::None);
    let qs: Vec<AbstractQuery> = (0..10)
        .map(|u| AbstractQuery { node: u, query: format!("Summarize paper {u}"), reference: Some(format!("paper{u} about topics")) })
        .collect();
    for mode in [ContextMode::SelfNode, ContextMode::Knn, ContextMode::RglBfs] {
        let a = abstract_generation_run(&p, &qs, mode, 3).unwrap();
        assert_eq!(a.rows.len(), 10);
        assert_eq!(a, abstract_generation_run(&p, &qs, mode, 3).unwrap());
    }
}

#[test]
fn hashing_embedder_feeds_the_index() {
    let e = HashingEmbedder::new(32);
    let texts = ["graph retrieval", "dense subgraph peeling", "graph retrieval systems"];
    let rows: Vec<Vec<f64>> = texts.iter().map(|t| e.embed(t)).collect();
    let idx = EmbeddingIndex::from_rows(&rows, Metric::Cosine).unwrap();
    let hits = idx.knn_query(&e.embed("graph retrieval"), 2, None).unwrap();
    assert_eq!(hits[0].node, 0);
    assert_eq!(hits[1].node, 2);
}
