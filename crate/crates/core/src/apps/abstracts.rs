use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::generation::Generator;
use crate::graph::{induced_subgraph, Method, NodeId, Subgraph};
use crate::pipeline::{PipelineError, RagPipeline, Stage};
use crate::prompt::PromptBundle;
use crate::retrieval::{RetrievalConfig, RetrievalMethod};

use super::metrics::{rouge, RougeScores};

/// Which context the generator sees for a query node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextMode {
    /// Only the node's own text.
    SelfNode,
    /// The texts of its nearest neighbors by embedding.
    Knn,
    RglBfs,
    RglDense,
    RglSteiner,
}

impl ContextMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ContextMode::SelfNode => "self_node",
            ContextMode::Knn => "knn",
            ContextMode::RglBfs => "rgl_bfs",
            ContextMode::RglDense => "rgl_dense",
            ContextMode::RglSteiner => "rgl_steiner",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "self_node" => ContextMode::SelfNode,
            "knn" => ContextMode::Knn,
            "rgl_bfs" => ContextMode::RglBfs,
            "rgl_dense" => ContextMode::RglDense,
            "rgl_steiner" => ContextMode::RglSteiner,
            _ => return None,
        })
    }

    fn retrieval_method(self) -> Option<RetrievalMethod> {
        match self {
            ContextMode::RglBfs => Some(RetrievalMethod::Bfs),
            ContextMode::RglDense => Some(RetrievalMethod::Dense),
            ContextMode::RglSteiner => Some(RetrievalMethod::Steiner),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbstractQuery {
    pub node: NodeId,
    /// Instruction handed to the generator, e.g. the node's title.
    pub query: String,
    /// Held-out target text; queries without one are skipped.
    pub reference: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbstractRow {
    pub node: NodeId,
    pub bundle: PromptBundle,
    pub generated: String,
    pub rouge: RougeScores,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AbstractReport {
    pub rows: Vec<AbstractRow>,
    /// Skipped queries with the reason.
    pub skipped: Vec<(NodeId, String)>,
}

impl AbstractReport {
    /// Mean ROUGE over generated rows; zeros when there are none.
    pub fn mean_rouge(&self) -> RougeScores {
        let mut acc = RougeScores::default();
        if self.rows.is_empty() {
            return acc;
        }
        let n = self.rows.len() as f64;
        for r in &self.rows {
            for (a, b) in [
                (&mut acc.rouge1, &r.rouge.rouge1),
                (&mut acc.rouge2, &r.rouge.rouge2),
                (&mut acc.rouge_l, &r.rouge.rouge_l),
            ] {
                a.precision += b.precision / n;
                a.recall += b.recall / n;
                a.f1 += b.f1 / n;
            }
        }
        acc
    }
}

/// The context subgraph for one query node; never contains `node` unless
/// the mode is [`ContextMode::SelfNode`].
pub fn abstract_context<G: Generator>(
    p: &RagPipeline<G>,
    node: NodeId,
    mode: ContextMode,
    k: usize,
) -> core::result::Result<Subgraph, PipelineError> {
    let g = p.graph();
    g.check_node(node).map_err(|error| PipelineError { stage: Stage::NodeRetrieval, error })?;
    if mode == ContextMode::SelfNode {
        return Ok(Subgraph::from_parts(vec![node], Vec::new(), vec![node], Method::SelfNode));
    }
    let mut scratch = p.scratch();
    let mut warnings = Vec::new();
    let k = k.min(g.node_count().saturating_sub(1));
    if k == 0 {
        return Err(PipelineError {
            stage: Stage::NodeRetrieval,
            error: Error::invalid("k", "no other node to retrieve"),
        });
    }
    let query = p.index().row(node as usize).to_vec();
    let hits = p.node_retrieval(&mut scratch, &query, k, Some(&[node]), &mut warnings)?;
    let mut sub = match mode.retrieval_method() {
        None => {
            let seeds: Vec<NodeId> = hits.iter().map(|h| h.node).collect();
            let mut sub = induced_subgraph(g, &seeds).map_err(|error| PipelineError { stage: Stage::GraphRetrieval, error })?;
            sub.provenance.method = Method::Knn;
            sub.provenance.seeds = sub.nodes.clone();
            sub
        }
        Some(method) => {
            let cfg = RetrievalConfig { method, ..p.retrieval().clone() };
            p.graph_retrieval(&mut scratch, &hits, &cfg)?
        }
    };
    sub.set_scores(hits.iter().map(|h| (h.node, h.score)));
    if sub.contains(node) {
        // Graph expansion can walk back to the query node; its own text is not context.
        let keep: Vec<NodeId> = sub.nodes.iter().copied().filter(|&u| u != node).collect();
        let scores: Vec<(NodeId, f64)> = keep.iter().map(|&u| (u, sub.score_of(u).unwrap_or(0.0))).collect();
        let mut pruned = induced_subgraph(g, &keep).map_err(|error| PipelineError { stage: Stage::GraphRetrieval, error })?;
        pruned.provenance.method = sub.provenance.method;
        pruned.provenance.seeds = sub.provenance.seeds.iter().copied().filter(|&u| u != node).collect();
        pruned.set_scores(scores);
        sub = pruned;
    }
    Ok(sub)
}

/// Generates one text per query and scores it against the reference.
pub fn abstract_generation_run<G: Generator>(
    p: &RagPipeline<G>,
    queries: &[AbstractQuery],
    mode: ContextMode,
    k: usize,
) -> Result<AbstractReport> {
    let mut report = AbstractReport::default();
    for q in queries {
        let Some(reference) = q.reference.as_deref().filter(|r| !r.trim().is_empty()) else {
            report.skipped.push((q.node, String::from("missing reference text")));
            continue;
        };
        let run = abstract_context(p, q.node, mode, k).and_then(|sub| {
            let bundle = p.serialize(&sub)?;
            let (_, result) = p.generate(&bundle, &q.query)?;
            Ok((bundle, result))
        });
        match run {
            Ok((bundle, result)) => {
                let scores = rouge(&result.text, reference);
                report.rows.push(AbstractRow { node: q.node, bundle, generated: result.text, rouge: scores });
            }
            Err(PipelineError { stage: Stage::Generation, error }) => return Err(error),
            Err(e) => report.skipped.push((q.node, format!("{e}"))),
        }
    }
    Ok(report)
}
