//! Token-budgeted serialization of retrieved subgraphs.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{NodeAttributes, NodeId, Subgraph};

pub const DEFAULT_CHARS_PER_TOKEN: usize = 4;
const MISSING_TEXT: &str = "(no text)";

/// `ceil(byte_length / chars_per_token)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenEstimator {
    chars_per_token: usize,
}

impl Default for TokenEstimator {
    fn default() -> Self {
        TokenEstimator { chars_per_token: DEFAULT_CHARS_PER_TOKEN }
    }
}

impl TokenEstimator {
    pub fn new(chars_per_token: usize) -> Result<Self> {
        if chars_per_token == 0 {
            return Err(Error::invalid("chars_per_token", "must be at least 1"));
        }
        Ok(TokenEstimator { chars_per_token })
    }

    pub fn chars_per_token(&self) -> usize {
        self.chars_per_token
    }

    pub fn estimate(&self, text: &str) -> usize {
        self.estimate_bytes(text.len())
    }

    fn estimate_bytes(&self, bytes: usize) -> usize {
        bytes.div_ceil(self.chars_per_token)
    }
}

/// Token estimate with the default divisor.
pub fn estimate_tokens(text: &str) -> usize {
    TokenEstimator::default().estimate(text)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    preamble: String,
    per_node_format: String,
    edge_section_format: Option<String>,
    query_slot: String,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        PromptTemplate {
            preamble: "Use the following context retrieved from a graph. Each line describes one node.\n".into(),
            per_node_format: "[node {id} | relevance {score}] {text}".into(),
            edge_section_format: None,
            query_slot: "\nQuestion: {query}\nAnswer:".into(),
        }
    }
}

/// Placeholder names in `{name}` form, in order of appearance.
fn placeholders(s: &str) -> impl Iterator<Item = &str> {
    s.match_indices('{').filter_map(move |(i, _)| {
        let rest = &s[i + 1..];
        let end = rest.find('}')?;
        let name = &rest[..end];
        (!name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')).then_some(name)
    })
}

fn check_placeholders(field: &'static str, s: &str, allowed: &[&str]) -> Result<()> {
    match placeholders(s).find(|p| !allowed.contains(p)) {
        Some(p) => Err(Error::UnresolvedPlaceholder { field, placeholder: format!("{{{p}}}") }),
        None => Ok(()),
    }
}

impl PromptTemplate {
    pub fn new(
        preamble: impl Into<String>,
        per_node_format: impl Into<String>,
        edge_section_format: Option<String>,
        query_slot: impl Into<String>,
    ) -> Result<Self> {
        let t = PromptTemplate {
            preamble: preamble.into(),
            per_node_format: per_node_format.into(),
            edge_section_format,
            query_slot: query_slot.into(),
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        check_placeholders("preamble", &self.preamble, &[])?;
        check_placeholders("per_node_format", &self.per_node_format, &["id", "score", "text"])?;
        if let Some(e) = &self.edge_section_format {
            check_placeholders("edge_section_format", e, &["src", "dst", "weight"])?;
        }
        check_placeholders("query_slot", &self.query_slot, &["query"])?;
        if !placeholders(&self.query_slot).any(|p| p == "query") {
            return Err(Error::UnresolvedPlaceholder { field: "query_slot", placeholder: "{query}".into() });
        }
        Ok(())
    }

    pub fn preamble(&self) -> &str {
        &self.preamble
    }
    pub fn per_node_format(&self) -> &str {
        &self.per_node_format
    }
    pub fn edge_section_format(&self) -> Option<&str> {
        self.edge_section_format.as_deref()
    }
    pub fn query_slot(&self) -> &str {
        &self.query_slot
    }

    fn render_node(&self, id: NodeId, score: f64, text: &str) -> String {
        let mut line = self
            .per_node_format
            .replace("{id}", &id.to_string())
            .replace("{score}", &format!("{score:.4}"))
            .replace("{text}", text);
        line.push('\n');
        line
    }

    fn render_edge(fmt: &str, src: NodeId, dst: NodeId, weight: f64) -> String {
        let mut line = fmt
            .replace("{src}", &src.to_string())
            .replace("{dst}", &dst.to_string())
            .replace("{weight}", &format!("{weight:.4}"));
        line.push('\n');
        line
    }

    /// The query slot with `{query}` removed; reserved in every budget.
    fn slot_skeleton_len(&self) -> usize {
        self.query_slot.len() - "{query}".len() * self.query_slot.matches("{query}").count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeOrder {
    ScoreDesc,
    BfsFromSeeds,
    NodeId,
}

impl NodeOrder {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "score_desc" => Some(NodeOrder::ScoreDesc),
            "bfs_from_seeds" => Some(NodeOrder::BfsFromSeeds),
            "node_id" => Some(NodeOrder::NodeId),
            _ => None,
        }
    }
}

/// Serialized context ready to be combined with a query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBundle {
    /// Preamble plus rendered node (and optional edge) lines.
    pub prompt: String,
    pub included_nodes: Vec<NodeId>,
    pub token_estimate: usize,
    /// True iff some subgraph node was left out for budget.
    pub truncated: bool,
}

/// Template plus token estimator.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PromptForge {
    template: PromptTemplate,
    estimator: TokenEstimator,
}

impl PromptForge {
    pub fn new(template: PromptTemplate, estimator: TokenEstimator) -> Result<Self> {
        template.validate()?;
        Ok(PromptForge { template, estimator })
    }

    pub fn template(&self) -> &PromptTemplate {
        &self.template
    }

    pub fn estimator(&self) -> TokenEstimator {
        self.estimator
    }

    /// Tokens needed by the preamble and the query slot without a query.
    pub fn skeleton_tokens(&self) -> usize {
        self.estimator.estimate_bytes(self.template.preamble.len() + self.template.slot_skeleton_len())
    }

    /// Renders nodes in `order` (seeds first) until the next one would push
    /// the estimate of context plus query-slot skeleton past `budget`.
    pub fn serialize_subgraph(
        &self,
        sub: &Subgraph,
        attrs: &NodeAttributes,
        budget: usize,
        order: NodeOrder,
    ) -> Result<PromptBundle> {
        let skeleton = self.skeleton_tokens();
        if budget < skeleton {
            return Err(Error::BudgetTooSmall { budget, skeleton });
        }
        let reserved = self.template.slot_skeleton_len();
        let fits = |len: usize| self.estimator.estimate_bytes(len + reserved) <= budget;

        let mut prompt = self.template.preamble.clone();
        let mut included = Vec::new();
        let ordered = serialization_order(sub, order);
        let mut truncated = false;
        for &u in &ordered {
            let score = sub.score_of(u).unwrap_or(0.0);
            let line = self.template.render_node(u, score, attrs.text(u).unwrap_or(MISSING_TEXT));
            if !fits(prompt.len() + line.len()) {
                truncated = true;
                break;
            }
            prompt.push_str(&line);
            included.push(u);
        }

        if let Some(fmt) = &self.template.edge_section_format {
            let mut in_prompt = included.clone();
            in_prompt.sort_unstable();
            for e in &sub.edges {
                if in_prompt.binary_search(&e.src).is_err() || in_prompt.binary_search(&e.dst).is_err() {
                    continue;
                }
                let line = PromptTemplate::render_edge(fmt, e.src, e.dst, e.weight);
                if !fits(prompt.len() + line.len()) {
                    break;
                }
                prompt.push_str(&line);
            }
        }

        let token_estimate = self.estimator.estimate(&prompt);
        Ok(PromptBundle { prompt, included_nodes: included, token_estimate, truncated })
    }

    /// Appends the rendered query slot to the bundle's context.
    pub fn build_prompt(&self, bundle: &PromptBundle, query: &str) -> Result<String> {
        if query.is_empty() {
            return Err(Error::invalid("query", "must not be empty"));
        }
        self.template.validate()?;
        let mut out = bundle.prompt.clone();
        out.push_str(&self.template.query_slot.replace("{query}", query));
        Ok(out)
    }
}

/// Seeds first, then the remaining nodes, each group in `order`.
fn serialization_order(sub: &Subgraph, order: NodeOrder) -> Vec<NodeId> {
    let mut out: Vec<NodeId> = match order {
        NodeOrder::NodeId => sub.nodes.clone(),
        NodeOrder::ScoreDesc => {
            let mut idx: Vec<usize> = (0..sub.nodes.len()).collect();
            let scores = &sub.provenance.scores;
            idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(sub.nodes[a].cmp(&sub.nodes[b])));
            idx.into_iter().map(|i| sub.nodes[i]).collect()
        }
        NodeOrder::BfsFromSeeds => bfs_order(sub),
    };
    let seeds = &sub.provenance.seeds;
    // Stable partition: seeds keep their relative order.
    out.sort_by_key(|u| seeds.binary_search(u).is_err());
    out
}

fn bfs_order(sub: &Subgraph) -> Vec<NodeId> {
    let n = sub.nodes.len();
    let pos = |u: NodeId| sub.nodes.binary_search(&u).ok();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &sub.edges {
        if let (Some(a), Some(b)) = (pos(e.src), pos(e.dst)) {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    adj.iter_mut().for_each(|a| a.sort_unstable());
    let mut seen = vec![false; n];
    let mut out = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    for &s in &sub.provenance.seeds {
        if let Some(i) = pos(s) {
            if !seen[i] {
                seen[i] = true;
                queue.push_back(i);
            }
        }
    }
    let mut start = 0;
    loop {
        while let Some(i) = queue.pop_front() {
            out.push(sub.nodes[i]);
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        // Nodes unreachable from the seeds follow in id order.
        while start < n && seen[start] {
            start += 1;
        }
        if start == n {
            break;
        }
        seen[start] = true;
        queue.push_back(start);
    }
    out
}
