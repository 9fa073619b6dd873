//! JSON run configuration.
//!
//! Every section is optional and every key has a default. Unknown keys and
//! bad values are rejected with the dotted path of the offending key, e.g.
//! `retrieval.method: unknown variant ...`.

use std::path::{Path, PathBuf};
use std::time::Duration;

use rgl_core::generation::RetryPolicy;
use rgl_core::pipeline::GenerationParams;
use rgl_core::prompt::{NodeOrder, PromptForge, PromptTemplate, TokenEstimator, DEFAULT_CHARS_PER_TOKEN};
use rgl_core::retrieval::NodeFilter;
use rgl_core::{Metric, RetrievalConfig, RetrievalMethod};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config key `{key}`: {msg}")]
    Key { key: String, msg: String },
}

impl ConfigError {
    fn key(key: &str, msg: impl Into<String>) -> Self {
        ConfigError::Key { key: key.to_string(), msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub graph: GraphSection,
    pub index: IndexSection,
    pub retrieval: RetrievalSection,
    pub prompt: PromptSection,
    pub generation: GenerationSection,
    pub bench: BenchSection,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraphSection {
    pub directed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    Cosine,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IndexSection {
    pub metric: MetricName,
    /// Node-retrieval depth per query.
    pub k: usize,
}

impl Default for IndexSection {
    fn default() -> Self {
        IndexSection { metric: MetricName::Cosine, k: 5 }
    }
}

impl IndexSection {
    pub fn metric(&self) -> Metric {
        match self.metric {
            MetricName::Cosine => Metric::Cosine,
            MetricName::Dot => Metric::Dot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Bfs,
    Steiner,
    Dense,
}

impl From<MethodName> for RetrievalMethod {
    fn from(m: MethodName) -> Self {
        match m {
            MethodName::Bfs => RetrievalMethod::Bfs,
            MethodName::Steiner => RetrievalMethod::Steiner,
            MethodName::Dense => RetrievalMethod::Dense,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    None,
    TopK,
    Threshold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterSection {
    pub kind: FilterKind,
    pub k: usize,
    pub threshold: f64,
}

impl Default for FilterSection {
    fn default() -> Self {
        FilterSection { kind: FilterKind::None, k: 5, threshold: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PprSection {
    pub alpha: f64,
    pub iters: usize,
}

impl Default for PprSection {
    fn default() -> Self {
        let d = RetrievalConfig::default();
        PprSection { alpha: d.ppr_alpha, iters: d.ppr_iters }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RetrievalSection {
    pub method: MethodName,
    pub hops: usize,
    pub fanout_cap: usize,
    pub max_nodes: usize,
    pub filter: FilterSection,
    pub ppr: PprSection,
}

impl Default for RetrievalSection {
    fn default() -> Self {
        let d = RetrievalConfig::default();
        RetrievalSection {
            method: MethodName::Bfs,
            hops: d.hops,
            fanout_cap: d.fanout_cap,
            max_nodes: d.max_nodes,
            filter: FilterSection::default(),
            ppr: PprSection::default(),
        }
    }
}

impl RetrievalSection {
    pub fn to_config(&self) -> Result<RetrievalConfig, ConfigError> {
        let filter = match self.filter.kind {
            FilterKind::None => NodeFilter::None,
            FilterKind::TopK => NodeFilter::TopK(self.filter.k),
            FilterKind::Threshold => NodeFilter::Threshold(self.filter.threshold),
        };
        let cfg = RetrievalConfig {
            method: self.method.into(),
            hops: self.hops,
            fanout_cap: self.fanout_cap,
            max_nodes: self.max_nodes,
            filter,
            ppr_alpha: self.ppr.alpha,
            ppr_iters: self.ppr.iters,
        };
        cfg.validate().map_err(|e| match e {
            rgl_core::Error::InvalidParameter { name, reason } => ConfigError::key(name, reason),
            other => ConfigError::key("retrieval", other.to_string()),
        })?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderName {
    ScoreDesc,
    BfsFromSeeds,
    NodeId,
}

impl From<OrderName> for NodeOrder {
    fn from(o: OrderName) -> Self {
        match o {
            OrderName::ScoreDesc => NodeOrder::ScoreDesc,
            OrderName::BfsFromSeeds => NodeOrder::BfsFromSeeds,
            OrderName::NodeId => NodeOrder::NodeId,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PromptSection {
    pub budget: usize,
    pub chars_per_token: usize,
    pub order: OrderName,
    /// Template fields; unset ones keep the built-in default.
    pub preamble: Option<String>,
    pub per_node_format: Option<String>,
    pub edge_section_format: Option<String>,
    pub query_slot: Option<String>,
}

impl Default for PromptSection {
    fn default() -> Self {
        PromptSection {
            budget: 1024,
            chars_per_token: DEFAULT_CHARS_PER_TOKEN,
            order: OrderName::ScoreDesc,
            preamble: None,
            per_node_format: None,
            edge_section_format: None,
            query_slot: None,
        }
    }
}

impl PromptSection {
    pub fn forge(&self) -> Result<PromptForge, ConfigError> {
        let base = PromptTemplate::default();
        let template = PromptTemplate::new(
            self.preamble.as_deref().unwrap_or(base.preamble()),
            self.per_node_format.as_deref().unwrap_or(base.per_node_format()),
            self.edge_section_format.clone().or_else(|| base.edge_section_format().map(String::from)),
            self.query_slot.as_deref().unwrap_or(base.query_slot()),
        )
        .map_err(|e| match e {
            rgl_core::Error::UnresolvedPlaceholder { field, .. } => ConfigError::key(&format!("prompt.{field}"), e.to_string()),
            other => ConfigError::key("prompt", other.to_string()),
        })?;
        let est = TokenEstimator::new(self.chars_per_token)
            .map_err(|e| ConfigError::key("prompt.chars_per_token", e.to_string()))?;
        let forge = PromptForge::new(template, est).map_err(|e| ConfigError::key("prompt", e.to_string()))?;
        if self.budget < forge.skeleton_tokens() {
            return Err(ConfigError::key(
                "prompt.budget",
                format!("{} is below the template skeleton of {} tokens", self.budget, forge.skeleton_tokens()),
            ));
        }
        Ok(forge)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RetrySection {
    pub max_attempts: usize,
    pub backoff_ms: u64,
}

impl Default for RetrySection {
    fn default() -> Self {
        let d = RetryPolicy::default();
        RetrySection { max_attempts: d.max_attempts, backoff_ms: d.backoff_base.as_millis() as u64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerationSection {
    /// Chat-completion URL. Without one, only `--mock` runs are possible.
    pub endpoint: Option<String>,
    pub model: String,
    pub timeout_secs: f64,
    pub retry: RetrySection,
    /// Environment variable holding the bearer token.
    pub api_key_env: Option<String>,
    pub concurrency: usize,
    pub max_output_tokens: usize,
    pub temperature: f64,
}

impl Default for GenerationSection {
    fn default() -> Self {
        let d = GenerationParams::default();
        GenerationSection {
            endpoint: None,
            model: d.model,
            timeout_secs: 60.0,
            retry: RetrySection::default(),
            api_key_env: None,
            concurrency: 4,
            max_output_tokens: d.max_output_tokens,
            temperature: d.temperature,
        }
    }
}

impl GenerationSection {
    pub fn params(&self) -> GenerationParams {
        GenerationParams {
            max_output_tokens: self.max_output_tokens,
            temperature: self.temperature,
            model: self.model.clone(),
        }
    }

    pub fn retry_policy(&self) -> RetryPolicy {
        RetryPolicy { max_attempts: self.retry.max_attempts, backoff_base: Duration::from_millis(self.retry.backoff_ms) }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !(self.timeout_secs.is_finite() && self.timeout_secs > 0.0) {
            return Err(ConfigError::key("generation.timeout_secs", "must be a positive number"));
        }
        if self.retry.max_attempts == 0 {
            return Err(ConfigError::key("generation.retry.max_attempts", "must be at least 1"));
        }
        if self.concurrency == 0 {
            return Err(ConfigError::key("generation.concurrency", "must be at least 1"));
        }
        if self.max_output_tokens == 0 {
            return Err(ConfigError::key("generation.max_output_tokens", "must be at least 1"));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(ConfigError::key("generation.temperature", "must be finite and non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchMethod {
    Bfs,
    Steiner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchSection {
    pub seed: u64,
    pub repetitions: usize,
    pub methods: Vec<BenchMethod>,
    /// Terminals per Steiner query and seeds per BFS query.
    pub seeds_per_query: usize,
    /// Extra seeds are drawn within this many hops of the query node.
    pub seed_radius: usize,
    pub hops: usize,
    pub fanout_cap: usize,
    pub max_nodes: usize,
    /// Fixed stand-in for model training time, reported per record.
    pub learning_seconds: f64,
    /// Workers for the optimized kernels; 1 keeps timing single-threaded.
    pub workers: usize,
}

impl Default for BenchSection {
    fn default() -> Self {
        BenchSection {
            seed: 0,
            repetitions: 5,
            methods: vec![BenchMethod::Bfs, BenchMethod::Steiner],
            seeds_per_query: 3,
            seed_radius: 2,
            hops: 2,
            fanout_cap: 16,
            max_nodes: 64,
            learning_seconds: 0.0,
            workers: 1,
        }
    }
}

impl BenchSection {
    fn validate(&self) -> Result<(), ConfigError> {
        if self.repetitions == 0 {
            return Err(ConfigError::key("bench.repetitions", "must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(ConfigError::key("bench.methods", "must name at least one method"));
        }
        if self.seeds_per_query == 0 {
            return Err(ConfigError::key("bench.seeds_per_query", "must be at least 1"));
        }
        if self.hops == 0 || self.fanout_cap == 0 || self.max_nodes == 0 {
            return Err(ConfigError::key("bench", "hops, fanout_cap and max_nodes must be at least 1"));
        }
        if !(self.learning_seconds.is_finite() && self.learning_seconds >= 0.0) {
            return Err(ConfigError::key("bench.learning_seconds", "must be finite and non-negative"));
        }
        if self.workers == 0 {
            return Err(ConfigError::key("bench.workers", "must be at least 1"));
        }
        Ok(())
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Config = serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            ConfigError::Key { key: if key == "." { "<root>".into() } else { key }, msg: e.into_inner().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Checks every value that can be checked without data.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.index.k == 0 {
            return Err(ConfigError::key("index.k", "must be at least 1"));
        }
        self.retrieval.to_config()?;
        self.prompt.forge()?;
        self.generation.validate()?;
        self.bench.validate()
    }
}
