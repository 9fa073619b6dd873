//! Edge lists, node records and saved graph bundles.
//!
//! * Edge list: UTF-8 TSV, `src<TAB>dst[<TAB>weight]` per line, `#` comments.
//! * Node records: JSON lines `{"id", "text"?, "feat"?, "label"?}`.
//! * Bundle: a directory holding `graph.tsv`, `nodes.jsonl`, `meta.json` and
//!   optionally `splits.json`, all keyed by dense node id.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rgl_core::dataset::{Dataset, Splits};
use rgl_core::{build_graph, Edge, Graph, NodeAttributes, NodeId};
use serde::{Deserialize, Serialize};

/// File names inside a bundle directory.
pub const GRAPH_FILE: &str = "graph.tsv";
pub const NODES_FILE: &str = "nodes.jsonl";
pub const META_FILE: &str = "meta.json";
pub const SPLITS_FILE: &str = "splits.json";

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{path}:{line}: node id {id} does not appear in the node records")]
    Dangling { path: PathBuf, line: usize, id: ExternalId },
    #[error("{path}:{line}: duplicate record for node id {id}")]
    Duplicate { path: PathBuf, line: usize, id: ExternalId },
    #[error("{path}:{line}: feature dimension {got} differs from {expected} on earlier rows")]
    Dimension { path: PathBuf, line: usize, expected: usize, got: usize },
    #[error("{path}: {msg}")]
    Invalid { path: PathBuf, msg: String },
    #[error(transparent)]
    Core(#[from] rgl_core::Error),
}

pub type Result<T, E = DataError> = std::result::Result<T, E>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DataError + '_ {
    move |source| DataError::Io { path: path.to_path_buf(), source }
}

/// A node id as it appears in input files.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExternalId {
    Int(i64),
    Str(String),
}

impl ExternalId {
    fn parse(token: &str) -> Self {
        token.parse().map(ExternalId::Int).unwrap_or_else(|_| ExternalId::Str(token.to_string()))
    }
}

impl fmt::Display for ExternalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExternalId::Int(i) => write!(f, "{i}"),
            ExternalId::Str(s) => write!(f, "{s:?}"),
        }
    }
}

/// Bijection between external ids and dense node ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IdMap {
    external: Vec<ExternalId>,
    dense: HashMap<ExternalId, NodeId>,
}

impl IdMap {
    /// Integer-only id sets are numbered in ascending order; anything else
    /// keeps first-appearance order.
    pub fn from_appearance(ids: Vec<ExternalId>) -> Self {
        let mut seen = HashMap::new();
        let mut unique = Vec::new();
        for id in ids {
            if !seen.contains_key(&id) {
                seen.insert(id.clone(), ());
                unique.push(id);
            }
        }
        if unique.iter().all(|id| matches!(id, ExternalId::Int(_))) {
            unique.sort();
        }
        Self::from_ordered(unique)
    }

    /// Uses the given order as-is; ids must be unique.
    pub fn from_ordered(external: Vec<ExternalId>) -> Self {
        let dense = external.iter().enumerate().map(|(i, id)| (id.clone(), i as NodeId)).collect();
        IdMap { external, dense }
    }

    /// `0..n` mapped to itself.
    pub fn identity(n: usize) -> Self {
        Self::from_ordered((0..n as i64).map(ExternalId::Int).collect())
    }

    pub fn len(&self) -> usize {
        self.external.len()
    }

    pub fn is_empty(&self) -> bool {
        self.external.is_empty()
    }

    pub fn dense(&self, id: &ExternalId) -> Option<NodeId> {
        self.dense.get(id).copied()
    }

    pub fn external(&self, u: NodeId) -> Option<&ExternalId> {
        self.external.get(u as usize)
    }

    pub fn externals(&self) -> &[ExternalId] {
        &self.external
    }
}

/// One parsed edge-list row, before id mapping.
#[derive(Debug, Clone, PartialEq)]
struct RawEdge {
    src: ExternalId,
    dst: ExternalId,
    weight: Option<f64>,
    line: usize,
}

fn parse_edge_rows(path: &Path, text: &str) -> Result<Vec<RawEdge>> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
        let bad = |msg: String| DataError::Parse { path: path.to_path_buf(), line, msg };
        if !(2..=3).contains(&fields.len()) || fields[..2].iter().any(|f| f.is_empty()) {
            return Err(bad(format!("expected `src<TAB>dst[<TAB>weight]`, got {} field(s)", fields.len())));
        }
        let weight = match fields.get(2) {
            None => None,
            Some(w) => {
                let w: f64 = w.parse().map_err(|_| bad(format!("weight {w:?} is not a number")))?;
                if !w.is_finite() || w < 0.0 {
                    return Err(bad(format!("weight {w} must be finite and non-negative")));
                }
                Some(w)
            }
        };
        rows.push(RawEdge { src: ExternalId::parse(fields[0]), dst: ExternalId::parse(fields[1]), weight, line });
    }
    Ok(rows)
}

fn to_edges(path: &Path, rows: &[RawEdge], ids: &IdMap) -> Result<Vec<Edge>> {
    rows.iter()
        .map(|r| {
            let map = |id: &ExternalId| {
                ids.dense(id).ok_or_else(|| DataError::Dangling { path: path.to_path_buf(), line: r.line, id: id.clone() })
            };
            let (src, dst) = (map(&r.src)?, map(&r.dst)?);
            if src == dst {
                return Err(DataError::Parse { path: path.to_path_buf(), line: r.line, msg: format!("self-loop on {}", r.src) });
            }
            Ok(Edge { src, dst, weight: r.weight })
        })
        .collect()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

/// Parses edge-list text; node ids come from the edges themselves.
pub fn parse_edge_list(path: &Path, text: &str, directed: bool) -> Result<(Graph, IdMap)> {
    let rows = parse_edge_rows(path, text)?;
    let ids = IdMap::from_appearance(rows.iter().flat_map(|r| [r.src.clone(), r.dst.clone()]).collect());
    let edges = to_edges(path, &rows, &ids)?;
    Ok((build_graph(&edges, ids.len(), directed)?, ids))
}

pub fn load_edge_list(path: &Path, directed: bool) -> Result<(Graph, IdMap)> {
    parse_edge_list(path, &read(path)?, directed)
}

#[derive(Debug, Deserialize)]
struct NodeRecord {
    id: ExternalId,
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    feat: Option<Vec<f64>>,
    #[serde(default)]
    label: Option<i64>,
}

#[derive(Debug, Default)]
struct ParsedRecords {
    ids: Vec<ExternalId>,
    lines: Vec<usize>,
    records: Vec<NodeRecord>,
}

fn parse_records(path: &Path, text: &str) -> Result<ParsedRecords> {
    let mut out = ParsedRecords::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let rec: NodeRecord =
            serde_json::from_str(raw).map_err(|e| DataError::Parse { path: path.to_path_buf(), line, msg: e.to_string() })?;
        out.ids.push(rec.id.clone());
        out.lines.push(line);
        out.records.push(rec);
    }
    Ok(out)
}

fn attributes_from(path: &Path, parsed: ParsedRecords, ids: &IdMap) -> Result<NodeAttributes> {
    let n = ids.len();
    let mut texts = vec![None; n];
    let mut feats = vec![None; n];
    let mut labels = vec![None; n];
    let mut seen = vec![false; n];
    let mut dim: Option<usize> = None;
    let (mut any_text, mut any_feat, mut any_label) = (false, false, false);
    for (rec, line) in parsed.records.into_iter().zip(parsed.lines) {
        let u = ids.dense(&rec.id).ok_or_else(|| DataError::Dangling { path: path.to_path_buf(), line, id: rec.id.clone() })?
            as usize;
        if std::mem::replace(&mut seen[u], true) {
            return Err(DataError::Duplicate { path: path.to_path_buf(), line, id: rec.id });
        }
        if let Some(f) = &rec.feat {
            match dim {
                Some(d) if d != f.len() => {
                    return Err(DataError::Dimension { path: path.to_path_buf(), line, expected: d, got: f.len() })
                }
                _ => dim = Some(f.len()),
            }
            if f.iter().any(|x| !x.is_finite()) {
                return Err(DataError::Parse { path: path.to_path_buf(), line, msg: "non-finite feature value".into() });
            }
        }
        any_text |= rec.text.is_some();
        any_feat |= rec.feat.is_some();
        any_label |= rec.label.is_some();
        texts[u] = rec.text;
        feats[u] = rec.feat;
        labels[u] = rec.label;
    }
    let mut attrs = NodeAttributes::empty(n);
    if any_text {
        attrs = attrs.with_texts(texts)?;
    }
    if any_feat {
        attrs = attrs.with_features(feats)?;
    }
    if any_label {
        attrs = attrs.with_labels(labels)?;
    }
    Ok(attrs)
}

/// Reads node records for an already-loaded graph. Records naming an id
/// outside `ids` are errors; nodes without a record get no attributes.
pub fn load_node_records(path: &Path, ids: &IdMap) -> Result<NodeAttributes> {
    let parsed = parse_records(path, &read(path)?)?;
    attributes_from(path, parsed, ids)
}

/// A graph with its attributes and id mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub attrs: NodeAttributes,
    pub ids: IdMap,
}

/// Loads an edge list plus optional node records. With records, the record
/// ids define the node set (so isolated nodes survive) and every edge
/// endpoint must have a record.
pub fn load_graph(edges: &Path, nodes: Option<&Path>, directed: bool) -> Result<LoadedGraph> {
    let edge_text = read(edges)?;
    let Some(nodes) = nodes else {
        let (graph, ids) = parse_edge_list(edges, &edge_text, directed)?;
        let attrs = NodeAttributes::empty(graph.node_count());
        return Ok(LoadedGraph { graph, attrs, ids });
    };
    let parsed = parse_records(nodes, &read(nodes)?)?;
    let ids = IdMap::from_appearance(parsed.ids.clone());
    let rows = parse_edge_rows(edges, &edge_text)?;
    let graph = build_graph(&to_edges(edges, &rows, &ids)?, ids.len(), directed)?;
    let attrs = attributes_from(nodes, parsed, &ids)?;
    Ok(LoadedGraph { graph, attrs, ids })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Meta {
    node_count: usize,
    edge_count: usize,
    directed: bool,
    weighted: bool,
    ids: Vec<ExternalId>,
}

#[derive(Serialize)]
struct OutRecord<'a> {
    id: NodeId,
    #[serde(skip_serializing_if = "Option::is_none")]
    text: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    feat: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<i64>,
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(io_err(path))
}

/// Writes a bundle directory (created if missing). Output depends only on
/// the arguments, so re-saving a loaded bundle reproduces it byte for byte.
pub fn save_graph(dir: &Path, graph: &Graph, attrs: &NodeAttributes, ids: &IdMap, splits: Option<&Splits>) -> Result<()> {
    if attrs.node_count() != graph.node_count() || ids.len() != graph.node_count() {
        return Err(DataError::Invalid {
            path: dir.to_path_buf(),
            msg: format!(
                "graph has {} nodes but attributes cover {} and the id map {}",
                graph.node_count(),
                attrs.node_count(),
                ids.len()
            ),
        });
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let mut tsv = String::from("# src\tdst");
    tsv.push_str(if graph.is_weighted() { "\tweight\n" } else { "\n" });
    for (u, v, w) in graph.edges() {
        if graph.is_weighted() {
            tsv.push_str(&format!("{u}\t{v}\t{w:?}\n"));
        } else {
            tsv.push_str(&format!("{u}\t{v}\n"));
        }
    }
    write(&dir.join(GRAPH_FILE), &tsv)?;

    let mut jsonl = String::new();
    for u in 0..graph.node_count() as NodeId {
        let rec = OutRecord { id: u, text: attrs.text(u), feat: attrs.feature(u), label: attrs.label(u) };
        jsonl.push_str(&serde_json::to_string(&rec).expect("records serialize"));
        jsonl.push('\n');
    }
    write(&dir.join(NODES_FILE), &jsonl)?;

    let meta = Meta {
        node_count: graph.node_count(),
        edge_count: graph.edge_count(),
        directed: graph.is_directed(),
        weighted: graph.is_weighted(),
        ids: ids.externals().to_vec(),
    };
    write(&dir.join(META_FILE), &(serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n"))?;

    let splits_path = dir.join(SPLITS_FILE);
    match splits {
        Some(s) => write(&splits_path, &(serde_json::to_string_pretty(&SplitsFile::from(s)).expect("splits serialize") + "\n"))?,
        None if splits_path.exists() => fs::remove_file(&splits_path).map_err(io_err(&splits_path))?,
        None => {}
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplitsFile {
    train: Vec<NodeId>,
    valid: Vec<NodeId>,
    test: Vec<NodeId>,
}

impl From<&Splits> for SplitsFile {
    fn from(s: &Splits) -> Self {
        SplitsFile { train: s.train.clone(), valid: s.valid.clone(), test: s.test.clone() }
    }
}

/// Everything stored in a bundle directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub graph: Graph,
    pub attrs: NodeAttributes,
    pub ids: IdMap,
    pub splits: Option<Splits>,
}

impl Bundle {
    /// Splits default to everything-in-test when the bundle carries none.
    pub fn into_dataset(self, name: &str) -> Result<Dataset> {
        let n = self.graph.node_count();
        let splits = self.splits.unwrap_or_else(|| Splits { test: (0..n as NodeId).collect(), ..Splits::default() });
        Ok(Dataset::new(name, self.graph, self.attrs, splits)?)
    }
}

pub fn load_bundle(dir: &Path) -> Result<Bundle> {
    let meta_path = dir.join(META_FILE);
    let meta: Meta = serde_json::from_str(&read(&meta_path)?)
        .map_err(|e| DataError::Invalid { path: meta_path.clone(), msg: e.to_string() })?;
    if meta.ids.len() != meta.node_count {
        return Err(DataError::Invalid { path: meta_path, msg: "id mapping length differs from node_count".into() });
    }
    let dense = IdMap::identity(meta.node_count);
    let graph_path = dir.join(GRAPH_FILE);
    let rows = parse_edge_rows(&graph_path, &read(&graph_path)?)?;
    let graph = build_graph(&to_edges(&graph_path, &rows, &dense)?, meta.node_count, meta.directed)?;
    if graph.edge_count() != meta.edge_count {
        return Err(DataError::Invalid {
            path: graph_path,
            msg: format!("meta lists {} edges, file holds {}", meta.edge_count, graph.edge_count()),
        });
    }
    let attrs = load_node_records(&dir.join(NODES_FILE), &dense)?;
    let splits_path = dir.join(SPLITS_FILE);
    let splits = if splits_path.exists() {
        let f: SplitsFile = serde_json::from_str(&read(&splits_path)?)
            .map_err(|e| DataError::Invalid { path: splits_path.clone(), msg: e.to_string() })?;
        let s = Splits { train: f.train, valid: f.valid, test: f.test };
        s.validate(meta.node_count).map_err(|e| DataError::Invalid { path: splits_path, msg: e.to_string() })?;
        Some(s)
    } else {
        None
    };
    Ok(Bundle { graph, attrs, ids: IdMap::from_ordered(meta.ids), splits })
}
