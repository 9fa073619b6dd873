//! The `rgl` command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 generation or network error. Logs go to stderr as `key=value` lines;
//! data goes to `--out` files or stdout.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rgl_core::apps::{complete_features, reconstruction_error, CompletionMethod, ErrorMetric};
use rgl_core::dataset::{mask_features, Dataset};
use rgl_core::embed::HashingEmbedder;
use rgl_core::generation::{Generator, MockClient};
use rgl_core::pipeline::{Query, RagPipeline, Stage};
use rgl_core::retrieval::filter_nodes;
use rgl_core::{EmbeddingIndex, Metric, NodeId, Subgraph};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::bench::{run_bench, write_csv, Impl};
use crate::config::{Config, ConfigError, MethodName};
use crate::datasets::{load_dataset, parse_synthetic, DatasetError};
use crate::http::{HttpClient, HttpOptions};
use crate::io::{load_graph, save_graph, DataError, ExternalId, IdMap};
use crate::parallel;
use crate::report::{summarize, write_eval_csv, EvalRow};

/// Dimension of the hashed bag-of-words space used when a dataset has texts
/// but no features.
pub const TEXT_EMBED_DIM: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "rgl", version, about = "Retrieval-augmented generation over graphs")]
struct Cli {
    /// Raise log verbosity (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Only log errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    /// Worker threads for batch stages [default: available cores].
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load an edge list (and node records), validate, save a bundle.
    Build(BuildArgs),
    /// Batch subgraph retrieval; one JSON line per query.
    Retrieve(RetrieveArgs),
    /// Mask features, complete them, report reconstruction error.
    Complete(CompleteArgs),
    /// Full pipeline: retrieval, prompt construction, generation.
    Generate(GenerateArgs),
    /// Time naive against optimized retrieval on a synthetic graph.
    Bench(BenchArgs),
}

#[derive(Debug, clap::Args)]
struct BuildArgs {
    /// Edge list: `src<TAB>dst[<TAB>weight]` per line.
    #[arg(long)]
    graph: PathBuf,
    /// Node records, one JSON object per line.
    #[arg(long)]
    nodes: Option<PathBuf>,
    /// Bundle directory to write.
    #[arg(long)]
    out: PathBuf,
    /// Treat edges as directed (config: graph.directed).
    #[arg(long)]
    directed: bool,
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct RetrieveArgs {
    /// Bundle directory or dataset name (toy, er:..., pa:..., community:...).
    #[arg(long)]
    bundle: String,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Query file, one JSON object per line.
    #[arg(long)]
    queries: PathBuf,
    /// Output JSON-lines file.
    #[arg(long)]
    out: PathBuf,
    /// Retrieval method (config: retrieval.method).
    #[arg(long, value_enum)]
    method: Option<MethodName>,
    /// Seeds taken from node retrieval (config: index.k).
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Debug, clap::Args)]
struct CompleteArgs {
    #[arg(long)]
    bundle: String,
    /// One of fill0, neigh_mean, ppr, knn_feat, knn_neigh, rgl_bfs, rgl_dense, rgl_steiner.
    #[arg(long)]
    method: String,
    /// Fraction of featured nodes to mask.
    #[arg(long, default_value_t = 0.4)]
    missing_rate: f64,
    /// Masking seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Neighbors used by the kNN and rgl_* methods.
    #[arg(long)]
    k: Option<usize>,
    /// Output CSV (node,method,metric,value).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, clap::Args)]
struct GenerateArgs {
    #[arg(long)]
    bundle: String,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    queries: PathBuf,
    /// Use the deterministic offline client instead of HTTP.
    #[arg(long)]
    mock: bool,
    /// Output JSON-lines file [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Retrieval method (config: retrieval.method).
    #[arg(long, value_enum)]
    method: Option<MethodName>,
    /// Seeds taken from node retrieval (config: index.k).
    #[arg(long)]
    k: Option<usize>,
    /// Prompt token budget (config: prompt.budget).
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Debug, clap::Args)]
struct BenchArgs {
    /// Synthetic graph: er:<n>:<p>[:<seed>] or pa:<n>:<m>[:<seed>].
    #[arg(long)]
    spec: String,
    /// Comma-separated query counts.
    #[arg(long, value_delimiter = ',', required = true)]
    query_counts: Vec<usize>,
    /// Output CSV.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Timed repetitions per cell (config: bench.repetitions).
    #[arg(long)]
    repetitions: Option<usize>,
    /// Query sampling seed (config: bench.seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Workers for an extra parallel run (config: bench.workers).
    #[arg(long)]
    workers: Option<usize>,
    /// Fixed learning-time column (config: bench.learning_seconds).
    #[arg(long)]
    learning_seconds: Option<f64>,
}

/// A failed command with its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    Generation(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Generation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Generation(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<DataError> for Failure {
    fn from(e: DataError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<DatasetError> for Failure {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::Unknown(_) | DatasetError::Spec { .. } => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

fn data_err(e: impl std::fmt::Display) -> Failure {
    Failure::Data(e.to_string())
}

type CmdResult = Result<(), Failure>;

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    init_logging(&cli);
    let workers = cli.threads.map_or_else(parallel::default_workers, usize::from);
    let out = match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Retrieve(a) => cmd_retrieve(a, workers),
        Command::Complete(a) => cmd_complete(a),
        Command::Generate(a) => cmd_generate(a, workers),
        Command::Bench(a) => cmd_bench(a),
    };
    match out {
        Ok(()) => 0,
        Err(f) => {
            log::error!("{}", f.message());
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn init_logging(cli: &Cli) {
    let level = if cli.quiet {
        log::LevelFilter::Error
    } else {
        match cli.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            _ => log::LevelFilter::Debug,
        }
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .format(|buf, r| writeln!(buf, "level={} target={} msg={:?}", r.level(), r.target(), r.args().to_string()))
        .try_init();
    log::set_max_level(level);
}

fn load_config(path: Option<&Path>) -> Result<Config, Failure> {
    Ok(match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn finish(mut w: impl Write, path: &Path) -> CmdResult {
    w.flush().map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn cmd_build(a: BuildArgs) -> CmdResult {
    let cfg = load_config(a.config.as_deref())?;
    let loaded = load_graph(&a.graph, a.nodes.as_deref(), a.directed || cfg.graph.directed)?;
    save_graph(&a.out, &loaded.graph, &loaded.attrs, &loaded.ids, None)?;
    log::info!("wrote bundle {} with {} nodes", a.out.display(), loaded.graph.node_count());
    println!("nodes={} edges={} directed={}", loaded.graph.node_count(), loaded.graph.edge_count(), loaded.graph.is_directed());
    Ok(())
}

/// How query texts map into the index space.
enum Space {
    Features,
    Text(HashingEmbedder),
}

/// Indexes node features, or hashed texts when features are absent.
fn build_index(d: &Dataset, metric: Metric) -> Result<(EmbeddingIndex, Space), Failure> {
    if let Some((data, dim)) = d.attrs.dense_features() {
        return Ok((EmbeddingIndex::new(data, dim, metric).map_err(data_err)?, Space::Features));
    }
    let texts = d.attrs.texts().ok_or_else(|| Failure::Data("dataset has neither features nor texts to index".into()))?;
    let e = HashingEmbedder::new(TEXT_EMBED_DIM);
    let rows: Vec<Vec<f64>> = texts.iter().map(|t| e.embed(t.as_deref().unwrap_or(""))).collect();
    Ok((EmbeddingIndex::from_rows(&rows, metric).map_err(data_err)?, Space::Text(e)))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QueryRecord {
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    vector: Option<Vec<f64>>,
    /// Use this node's indexed row as the query vector.
    #[serde(default)]
    node: Option<ExternalId>,
    /// Explicit seeds; skips node retrieval.
    #[serde(default)]
    seeds: Option<Vec<ExternalId>>,
}

fn read_queries(path: &Path) -> Result<Vec<(usize, QueryRecord)>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(line).map_err(|e| Failure::Data(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push((i + 1, rec));
    }
    Ok(out)
}

fn dense_id(ids: &IdMap, id: &ExternalId, path: &Path, line: usize) -> Result<NodeId, Failure> {
    ids.dense(id).ok_or_else(|| Failure::Data(format!("{}:{line}: unknown node id {id}", path.display())))
}

fn query_vector(q: &QueryRecord, index: &EmbeddingIndex, space: &Space, ids: &IdMap, path: &Path, line: usize) -> Result<Vec<f64>, Failure> {
    if let Some(v) = &q.vector {
        return Ok(v.clone());
    }
    if let Some(node) = &q.node {
        return Ok(index.row(dense_id(ids, node, path, line)? as usize).to_vec());
    }
    match (space, &q.text) {
        (Space::Text(e), Some(t)) => Ok(e.embed(t)),
        _ => Err(Failure::Data(format!(
            "{}:{line}: query needs `vector`, `node`{}",
            path.display(),
            if matches!(space, Space::Text(_)) { " or `text`" } else { "" }
        ))),
    }
}

fn clamp_k(k: usize, n: usize) -> usize {
    if k > n {
        log::warn!("k = {k} exceeds node count; clamped to {n}");
    }
    k.min(n)
}

fn subgraph_json(sub: &Subgraph) -> (Value, Value, Value) {
    let edges: Vec<Value> = sub.edges.iter().map(|e| json!([e.src, e.dst, e.weight])).collect();
    (json!(sub.nodes), Value::Array(edges), json!(sub.provenance.scores))
}

fn query_label(q: &QueryRecord, i: usize) -> Value {
    q.text.as_ref().map_or_else(|| json!(i), |t| json!(t))
}

fn cmd_retrieve(a: RetrieveArgs, workers: usize) -> CmdResult {
    let mut cfg = load_config(a.config.as_deref())?;
    if let Some(m) = a.method {
        cfg.retrieval.method = m;
    }
    if let Some(k) = a.k {
        cfg.index.k = k;
        cfg.validate()?;
    }
    let rcfg = cfg.retrieval.to_config()?;
    let loaded = load_dataset(&a.bundle)?;
    let d = &loaded.dataset;
    let (index, space) = build_index(d, cfg.index.metric())?;
    let queries = read_queries(&a.queries)?;

    // Seeds per query: explicit, or node retrieval plus filtering.
    let mut vectors = Vec::new();
    let mut needs_knn = Vec::new();
    for (qi, (line, q)) in queries.iter().enumerate() {
        if q.seeds.is_none() {
            vectors.push(query_vector(q, &index, &space, &loaded.ids, &a.queries, *line)?);
            needs_knn.push(qi);
        }
    }
    let k = clamp_k(cfg.index.k, index.len());
    let hits = parallel::batch_knn(&index, &vectors, k, None, workers).map_err(data_err)?;
    let mut seed_sets: Vec<Vec<NodeId>> = Vec::with_capacity(queries.len());
    let mut scored = vec![Vec::new(); queries.len()];
    let mut knn_iter = needs_knn.iter().zip(hits);
    for (qi, (line, q)) in queries.iter().enumerate() {
        match &q.seeds {
            Some(seeds) => {
                seed_sets.push(seeds.iter().map(|s| dense_id(&loaded.ids, s, &a.queries, *line)).collect::<Result<_, _>>()?);
            }
            None => {
                let (_, h) = knn_iter.next().expect("one kNN result per vector query");
                let h = filter_nodes(&h, rcfg.filter);
                seed_sets.push(h.iter().map(|x| x.node).collect());
                scored[qi] = h.iter().map(|x| (x.node, x.score)).collect();
            }
        }
    }

    let results = parallel::batch_retrieve(&d.graph, &seed_sets, &rcfg, workers).map_err(data_err)?;
    let mut w = create(&a.out)?;
    let mut failures = 0;
    for (qi, ((_, q), r)) in queries.iter().zip(results).enumerate() {
        let rec = match r {
            Ok(mut sub) => {
                sub.set_scores(scored[qi].iter().copied());
                let (nodes, edges, scores) = subgraph_json(&sub);
                json!({"query": query_label(q, qi), "method": rcfg.method.as_str(), "nodes": nodes, "edges": edges, "scores": scores})
            }
            Err(e) => {
                failures += 1;
                log::warn!("query {qi}: {}", e.error);
                json!({"query": query_label(q, qi), "method": rcfg.method.as_str(), "error": e.error.to_string()})
            }
        };
        writeln!(w, "{rec}").map_err(data_err)?;
    }
    finish(w, &a.out)?;
    log::info!("retrieved {} queries, {failures} failed", queries.len());
    Ok(())
}

fn needs_observed_modality(m: &CompletionMethod) -> bool {
    matches!(
        m,
        CompletionMethod::KnnFeat { .. }
            | CompletionMethod::KnnNeigh { .. }
            | CompletionMethod::RglBfs(_)
            | CompletionMethod::RglDense(_)
            | CompletionMethod::RglSteiner(_)
    )
}

fn cmd_complete(a: CompleteArgs) -> CmdResult {
    let mut method = CompletionMethod::from_tag(&a.method).ok_or_else(|| {
        Failure::Usage(format!("unknown completion method {:?}; expected one of {}", a.method, CompletionMethod::TAGS.join(", ")))
    })?;
    if let Some(k) = a.k {
        match &mut method {
            CompletionMethod::KnnFeat { k: mk } | CompletionMethod::KnnNeigh { k: mk } => *mk = k,
            CompletionMethod::RglBfs(p) | CompletionMethod::RglDense(p) | CompletionMethod::RglSteiner(p) => p.k = k,
            _ => log::warn!("--k has no effect on {}", method.tag()),
        }
    }
    method.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    if !(0.0..=1.0).contains(&a.missing_rate) {
        return Err(Failure::Usage(format!("--missing-rate {} must lie in [0, 1]", a.missing_rate)));
    }

    let loaded = load_dataset(&a.bundle)?;
    let d = &loaded.dataset;
    let features = d.attrs.features().ok_or_else(|| Failure::Data("dataset has no node features to complete".into()))?;
    let dim = d.attrs.feature_dim().unwrap_or(0);
    let truth: Vec<Vec<f64>> = features.iter().map(|f| f.clone().unwrap_or_else(|| vec![0.0; dim])).collect();
    let masked = mask_features(&d.attrs, a.missing_rate, a.seed).map_err(|e| Failure::Usage(e.to_string()))?;

    let observed = match d.attrs.texts() {
        Some(texts) => {
            let e = HashingEmbedder::new(TEXT_EMBED_DIM);
            let rows: Vec<Vec<f64>> = texts.iter().map(|t| e.embed(t.as_deref().unwrap_or(""))).collect();
            EmbeddingIndex::from_rows(&rows, Metric::Cosine).map_err(data_err)?
        }
        None if needs_observed_modality(&method) => {
            return Err(Failure::Data(format!("{} needs node texts as the observed modality", method.tag())));
        }
        // Never queried by the remaining methods.
        None => EmbeddingIndex::from_rows(&truth, Metric::Cosine).map_err(data_err)?,
    };
    let c = complete_features(&d.graph, &masked.attrs, &masked.mask, &method, &observed).map_err(data_err)?;
    for w in &c.warnings {
        log::warn!("{w}");
    }

    let mut rows = Vec::new();
    for u in (0..truth.len()).filter(|&u| masked.mask[u]) {
        for (name, metric) in [("mse", ErrorMetric::Mse), ("cosine", ErrorMetric::Cosine)] {
            let value = reconstruction_error(&c.features[u..=u], &truth[u..=u], &[true], metric).map_err(data_err)?;
            let node = loaded.ids.external(u as NodeId).map_or_else(|| u.to_string(), |id| match id {
                ExternalId::Int(i) => i.to_string(),
                ExternalId::Str(s) => s.clone(),
            });
            rows.push(EvalRow { node, method: method.tag().into(), metric: name.into(), value });
        }
    }
    let mut w = create(&a.out)?;
    write_eval_csv(&rows, &mut w).map_err(data_err)?;
    finish(w, &a.out)?;
    for s in summarize(&rows) {
        println!("method={} metric={} mean={}", s.method, s.metric, s.value);
    }
    Ok(())
}

fn cmd_generate(a: GenerateArgs, workers: usize) -> CmdResult {
    let mut cfg = load_config(a.config.as_deref())?;
    if let Some(m) = a.method {
        cfg.retrieval.method = m;
    }
    if let Some(k) = a.k {
        cfg.index.k = k;
    }
    if let Some(b) = a.budget {
        cfg.prompt.budget = b;
    }
    cfg.validate()?;
    let forge = cfg.prompt.forge()?;
    if a.mock {
        let client = MockClient::new(forge.estimator());
        generate_with(&a, &cfg, client, workers)
    } else {
        let opts = HttpOptions::from_config(&cfg.generation, forge.estimator()).map_err(|e| Failure::Usage(e.to_string()))?;
        generate_with(&a, &cfg, HttpClient::new(opts), workers)
    }
}

fn generate_with<G: Generator>(a: &GenerateArgs, cfg: &Config, client: G, workers: usize) -> CmdResult {
    let loaded = load_dataset(&a.bundle)?;
    let d = loaded.dataset.clone();
    let (index, space) = build_index(&d, cfg.index.metric())?;
    let raw = read_queries(&a.queries)?;
    let mut queries = Vec::with_capacity(raw.len());
    for (line, q) in &raw {
        if q.seeds.is_some() {
            return Err(Failure::Data(format!("{}:{line}: `seeds` is only valid for retrieve", a.queries.display())));
        }
        let text = q.text.clone().ok_or_else(|| Failure::Data(format!("{}:{line}: query needs `text`", a.queries.display())))?;
        let vector = query_vector(q, &index, &space, &loaded.ids, &a.queries, *line)?;
        queries.push(Query { text, vector });
    }
    let p = RagPipeline::new(d.graph, d.attrs, index, cfg.retrieval.to_config()?, cfg.prompt.forge()?, client, cfg.prompt.budget)
        .map_err(data_err)?
        .with_order(cfg.prompt.order.into())
        .with_generation(cfg.generation.params());
    let answers = parallel::answer_batch(&p, &queries, cfg.index.k, workers);

    let mut sink: Box<dyn Write> = match &a.out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let (mut gen_failures, mut other_failures) = (0, 0);
    for (q, r) in queries.iter().zip(answers) {
        let rec = match r {
            Ok(ans) => {
                for w in &ans.warnings {
                    log::warn!("{w}");
                }
                let (nodes, edges, scores) = subgraph_json(&ans.subgraph);
                json!({
                    "query": q.text,
                    "method": p.retrieval().method.as_str(),
                    "nodes": nodes,
                    "edges": edges,
                    "scores": scores,
                    "included_nodes": ans.bundle.included_nodes,
                    "truncated": ans.bundle.truncated,
                    "token_estimate": ans.bundle.token_estimate,
                    "prompt": ans.prompt,
                    "output": ans.result.text,
                    "client": ans.result.client,
                    "usage": {"prompt_tokens": ans.result.usage.prompt_tokens, "output_tokens": ans.result.usage.output_tokens},
                })
            }
            Err(e) => {
                if e.error.stage == Stage::Generation {
                    gen_failures += 1;
                } else {
                    other_failures += 1;
                }
                log::warn!("{e}");
                json!({"query": q.text, "stage": e.error.stage.as_str(), "error": e.error.error.to_string()})
            }
        };
        writeln!(sink, "{rec}").map_err(data_err)?;
    }
    sink.flush().map_err(data_err)?;
    if gen_failures > 0 {
        return Err(Failure::Generation(format!("{gen_failures} of {} queries failed in generation", queries.len())));
    }
    if other_failures > 0 {
        return Err(Failure::Data(format!("{other_failures} of {} queries failed before generation", queries.len())));
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    let mut cfg = load_config(a.config.as_deref())?;
    if let Some(r) = a.repetitions {
        cfg.bench.repetitions = r;
    }
    if let Some(s) = a.seed {
        cfg.bench.seed = s;
    }
    if let Some(w) = a.workers {
        cfg.bench.workers = w;
    }
    if let Some(l) = a.learning_seconds {
        cfg.bench.learning_seconds = l;
    }
    cfg.validate()?;
    let spec = parse_synthetic(&a.spec)?;
    if a.query_counts.contains(&0) {
        return Err(Failure::Usage("--query-counts must be positive".into()));
    }
    let records = run_bench(&spec, &a.query_counts, &cfg.bench).map_err(data_err)?;
    let mut w = create(&a.out)?;
    write_csv(&records, &mut w).map_err(data_err)?;
    finish(w, &a.out)?;
    for r in records.iter().filter(|r| r.implementation != Impl::Naive) {
        let naive = records
            .iter()
            .find(|n| n.implementation == Impl::Naive && n.method == r.method && n.queries == r.queries)
            .expect("every cell has a naive record");
        println!(
            "method={} impl={} queries={} naive_s={:.6} s={:.6} speedup={:.2}",
            r.method.as_str(),
            r.implementation.label(),
            r.queries,
            naive.retrieval_seconds,
            r.retrieval_seconds,
            naive.retrieval_seconds / r.retrieval_seconds.max(f64::MIN_POSITIVE)
        );
    }
    Ok(())
}
