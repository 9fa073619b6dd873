//! Retrieval-augmented generation on graphs.
//!
//! The crate covers the five pipeline stages: indexing, node retrieval over
//! embeddings, graph retrieval (BFS expansion, Steiner trees, dense
//! subgraphs), token-budgeted serialization, and generation through a
//! pluggable client. Everything here is `no_std` with `alloc`; file formats,
//! HTTP, threads and timing live in the `rgl` companion crate.

#![no_std]
#![deny(rust_2018_idioms)]

extern crate alloc;

pub mod apps;
pub mod compose;
pub mod dataset;
pub mod embed;
mod error;
pub mod generation;
pub mod graph;
pub mod index;
pub mod pipeline;
pub mod prompt;
pub mod retrieval;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{build_graph, induced_subgraph, Edge, Graph, Method, NodeAttributes, NodeId, Subgraph};
pub use index::{EmbeddingIndex, Metric, RetrievalHit};
pub use retrieval::{RetrievalConfig, RetrievalMethod, ScratchSpace};
