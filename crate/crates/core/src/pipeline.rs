//! The end-to-end pipeline object: node retrieval, filtering, graph
//! retrieval, serialization and generation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::generation::{GenerationRequest, GenerationResult, Generator};
use crate::graph::{Graph, NodeAttributes, NodeId, Subgraph};
use crate::index::{EmbeddingIndex, KnnScratch, RetrievalHit};
use crate::prompt::{NodeOrder, PromptBundle, PromptForge};
use crate::retrieval::{filter_nodes, retrieve_with, RetrievalConfig, ScratchSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    NodeRetrieval,
    Filter,
    GraphRetrieval,
    Tokenization,
    Generation,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::NodeRetrieval => "node retrieval",
            Stage::Filter => "filter",
            Stage::GraphRetrieval => "graph retrieval",
            Stage::Tokenization => "tokenization",
            Stage::Generation => "generation",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{stage} stage: {error}")]
pub struct PipelineError {
    pub stage: Stage,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("query {index}: {error}")]
pub struct BatchAnswerError {
    pub index: usize,
    pub error: PipelineError,
}

fn at(stage: Stage) -> impl FnOnce(Error) -> PipelineError {
    move |error| PipelineError { stage, error }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationParams {
    pub max_output_tokens: usize,
    pub temperature: f64,
    pub model: String,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams { max_output_tokens: 256, temperature: 0.0, model: "mock".into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub text: String,
    pub vector: Vec<f64>,
}

/// Every intermediate of one pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct Answer {
    /// Node-retrieval hits after filtering; these seed graph retrieval.
    pub hits: Vec<RetrievalHit>,
    pub subgraph: Subgraph,
    pub bundle: PromptBundle,
    pub prompt: String,
    pub result: GenerationResult,
    pub warnings: Vec<String>,
}

/// Per-worker buffers for pipeline runs.
#[derive(Debug, Default)]
pub struct PipelineScratch {
    knn: KnnScratch,
    graph: ScratchSpace,
}

impl PipelineScratch {
    pub fn new(node_count: usize) -> Self {
        PipelineScratch { knn: KnnScratch::default(), graph: ScratchSpace::new(node_count) }
    }
}

/// Immutable pipeline over one graph.
#[derive(Debug)]
pub struct RagPipeline<G> {
    graph: Graph,
    attrs: NodeAttributes,
    index: EmbeddingIndex,
    retrieval: RetrievalConfig,
    forge: PromptForge,
    client: G,
    budget: usize,
    order: NodeOrder,
    generation: GenerationParams,
}

impl<G: Generator> RagPipeline<G> {
    pub fn new(
        graph: Graph,
        attrs: NodeAttributes,
        index: EmbeddingIndex,
        retrieval: RetrievalConfig,
        forge: PromptForge,
        client: G,
        budget: usize,
    ) -> Result<Self> {
        if index.len() != graph.node_count() {
            return Err(Error::DimensionMismatch { expected: graph.node_count(), got: index.len() });
        }
        if attrs.node_count() != graph.node_count() {
            return Err(Error::DimensionMismatch { expected: graph.node_count(), got: attrs.node_count() });
        }
        retrieval.validate()?;
        if budget < forge.skeleton_tokens() {
            return Err(Error::BudgetTooSmall { budget, skeleton: forge.skeleton_tokens() });
        }
        Ok(RagPipeline {
            graph,
            attrs,
            index,
            retrieval,
            forge,
            client,
            budget,
            order: NodeOrder::ScoreDesc,
            generation: GenerationParams::default(),
        })
    }

    pub fn with_order(mut self, order: NodeOrder) -> Self {
        self.order = order;
        self
    }

    pub fn with_generation(mut self, params: GenerationParams) -> Self {
        self.generation = params;
        self
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }
    pub fn attrs(&self) -> &NodeAttributes {
        &self.attrs
    }
    pub fn index(&self) -> &EmbeddingIndex {
        &self.index
    }
    pub fn retrieval(&self) -> &RetrievalConfig {
        &self.retrieval
    }
    pub fn forge(&self) -> &PromptForge {
        &self.forge
    }
    pub fn client(&self) -> &G {
        &self.client
    }
    pub fn budget(&self) -> usize {
        self.budget
    }
    pub fn order(&self) -> NodeOrder {
        self.order
    }

    pub fn scratch(&self) -> PipelineScratch {
        PipelineScratch::new(self.graph.node_count())
    }

    pub fn answer(&self, query_text: &str, query_vec: &[f64], k: usize) -> core::result::Result<Answer, PipelineError> {
        self.answer_with(&mut self.scratch(), query_text, query_vec, k)
    }

    pub fn answer_with(
        &self,
        scratch: &mut PipelineScratch,
        query_text: &str,
        query_vec: &[f64],
        k: usize,
    ) -> core::result::Result<Answer, PipelineError> {
        let mut warnings = Vec::new();
        let hits = self.node_retrieval(scratch, query_vec, k, None, &mut warnings)?;
        let hits = filter_nodes(&hits, self.retrieval.filter);
        let subgraph = self.graph_retrieval(scratch, &hits, &self.retrieval)?;
        let bundle = self.serialize(&subgraph)?;
        let (prompt, result) = self.generate(&bundle, query_text)?;
        Ok(Answer { hits, subgraph, bundle, prompt, result, warnings })
    }

    /// Element-wise equal to calling [`RagPipeline::answer`] per query.
    pub fn answer_batch(&self, queries: &[Query], k: usize) -> Vec<core::result::Result<Answer, BatchAnswerError>> {
        self.answer_batch_with(&mut self.scratch(), queries, k, 0)
    }

    pub fn answer_batch_with(
        &self,
        scratch: &mut PipelineScratch,
        queries: &[Query],
        k: usize,
        index_offset: usize,
    ) -> Vec<core::result::Result<Answer, BatchAnswerError>> {
        queries
            .iter()
            .enumerate()
            .map(|(i, q)| {
                self.answer_with(scratch, &q.text, &q.vector, k)
                    .map_err(|error| BatchAnswerError { index: i + index_offset, error })
            })
            .collect()
    }

    /// Exact kNN with `k` clamped to the number of candidate nodes.
    pub fn node_retrieval(
        &self,
        scratch: &mut PipelineScratch,
        query_vec: &[f64],
        k: usize,
        exclude: Option<&[NodeId]>,
        warnings: &mut Vec<String>,
    ) -> core::result::Result<Vec<RetrievalHit>, PipelineError> {
        let n = self.index.len();
        let k_eff = if k > n {
            warnings.push(format!("k = {k} exceeds node count; clamped to {n}"));
            n
        } else {
            k
        };
        self.index.knn_query_with(&mut scratch.knn, query_vec, k_eff, exclude).map_err(at(Stage::NodeRetrieval))
    }

    /// Runs `cfg.method` seeded by `hits`; seed relevance comes from hit scores.
    pub fn graph_retrieval(
        &self,
        scratch: &mut PipelineScratch,
        hits: &[RetrievalHit],
        cfg: &RetrievalConfig,
    ) -> core::result::Result<Subgraph, PipelineError> {
        let seeds: Vec<NodeId> = hits.iter().map(|h| h.node).collect();
        let mut sub = retrieve_with(&self.graph, &mut scratch.graph, &seeds, cfg).map_err(at(Stage::GraphRetrieval))?;
        sub.set_scores(hits.iter().map(|h| (h.node, h.score)));
        Ok(sub)
    }

    pub fn serialize(&self, sub: &Subgraph) -> core::result::Result<PromptBundle, PipelineError> {
        self.forge.serialize_subgraph(sub, &self.attrs, self.budget, self.order).map_err(at(Stage::Tokenization))
    }

    pub fn generate(
        &self,
        bundle: &PromptBundle,
        query_text: &str,
    ) -> core::result::Result<(String, GenerationResult), PipelineError> {
        let prompt = self.forge.build_prompt(bundle, query_text).map_err(at(Stage::Tokenization))?;
        let req = GenerationRequest {
            prompt,
            max_output_tokens: self.generation.max_output_tokens,
            temperature: self.generation.temperature,
            model: self.generation.model.clone(),
        };
        let result = self.client.generate(&req).map_err(|e| PipelineError { stage: Stage::Generation, error: e.into() })?;
        Ok((req.prompt, result))
    }
}
