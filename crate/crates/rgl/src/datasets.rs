//! Dataset names: built-in fixtures, synthetic generators, bundle paths.
//!
//! | name                         | dataset                                    |
//! |------------------------------|--------------------------------------------|
//! | `toy`                        | six-node fixture with texts and features   |
//! | `er:<n>:<p>[:<seed>]`        | Erdős–Rényi graph, no attributes           |
//! | `pa:<n>:<m>[:<seed>]`        | preferential attachment, no attributes     |
//! | `community:<n>[:<seed>]`     | planted communities with texts, features   |
//! | any directory                | a saved bundle                             |

use std::path::Path;

use rgl_core::dataset::{toy_dataset, Dataset, Splits};
use rgl_core::synth::{community_graph, gen_graph, CommunitySpec, SyntheticGraphSpec};
use rgl_core::NodeAttributes;

use crate::io::{load_bundle, DataError, IdMap};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("unrecognized dataset {0:?}: expected toy, er:<n>:<p>[:<seed>], pa:<n>:<m>[:<seed>], community:<n>[:<seed>] or a bundle directory")]
    Unknown(String),
    #[error("bad dataset spec {spec:?}: {msg}")]
    Spec { spec: String, msg: String },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Core(#[from] rgl_core::Error),
}

fn field<T: std::str::FromStr>(spec: &str, parts: &[&str], i: usize, what: &str) -> Result<Option<T>, DatasetError> {
    parts
        .get(i)
        .map(|s| s.parse().map_err(|_| DatasetError::Spec { spec: spec.into(), msg: format!("{what} {s:?} is not valid") }))
        .transpose()
}

fn required<T: std::str::FromStr>(spec: &str, parts: &[&str], i: usize, what: &str) -> Result<T, DatasetError> {
    field(spec, parts, i, what)?.ok_or_else(|| DatasetError::Spec { spec: spec.into(), msg: format!("missing {what}") })
}

/// Parses `er:<n>:<p>[:<seed>]` or `pa:<n>:<m>[:<seed>]`.
pub fn parse_synthetic(spec: &str) -> Result<SyntheticGraphSpec, DatasetError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() > 4 {
        return Err(DatasetError::Spec { spec: spec.into(), msg: "too many fields".into() });
    }
    let n = || required::<usize>(spec, &parts, 1, "n");
    let seed = || Ok::<_, DatasetError>(field::<u64>(spec, &parts, 3, "seed")?.unwrap_or(0));
    let out = match parts[0] {
        "er" => SyntheticGraphSpec::erdos_renyi(n()?, required(spec, &parts, 2, "p")?, seed()?),
        "pa" => SyntheticGraphSpec::preferential_attachment(n()?, required(spec, &parts, 2, "m")?, seed()?),
        _ => return Err(DatasetError::Unknown(spec.into())),
    };
    out.validate().map_err(|e| DatasetError::Spec { spec: spec.into(), msg: e.to_string() })?;
    Ok(out)
}

/// A dataset plus the external-id mapping its nodes came with.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub dataset: Dataset,
    pub ids: IdMap,
}

pub fn load_dataset(name_or_path: &str) -> Result<Loaded, DatasetError> {
    let path = Path::new(name_or_path);
    if path.is_dir() {
        let bundle = load_bundle(path)?;
        let ids = bundle.ids.clone();
        let name = path.file_name().map_or_else(|| name_or_path.to_string(), |s| s.to_string_lossy().into_owned());
        return Ok(Loaded { dataset: bundle.into_dataset(&name)?, ids });
    }
    let dataset = match name_or_path.split(':').next() {
        Some("toy") if name_or_path == "toy" => toy_dataset(),
        Some("er" | "pa") => {
            let spec = parse_synthetic(name_or_path)?;
            let graph = gen_graph(&spec)?;
            let n = graph.node_count();
            Dataset::new(spec.tag(), graph, NodeAttributes::empty(n), Splits::random(n, 0.8, 0.1, spec.seed)?)?
        }
        Some("community") => {
            let parts: Vec<&str> = name_or_path.split(':').collect();
            if parts.len() > 3 {
                return Err(DatasetError::Spec { spec: name_or_path.into(), msg: "too many fields".into() });
            }
            let spec = CommunitySpec {
                n: required(name_or_path, &parts, 1, "n")?,
                seed: field(name_or_path, &parts, 2, "seed")?.unwrap_or(0),
                ..CommunitySpec::default()
            };
            let (graph, attrs) = community_graph(&spec)?;
            let splits = Splits::random(spec.n, 0.8, 0.1, spec.seed)?;
            Dataset::new(format!("community-n{}-s{}", spec.n, spec.seed), graph, attrs, splits)?
        }
        _ => return Err(DatasetError::Unknown(name_or_path.into())),
    };
    let ids = IdMap::identity(dataset.graph.node_count());
    Ok(Loaded { dataset, ids })
}
