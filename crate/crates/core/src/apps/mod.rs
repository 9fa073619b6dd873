//! Application recipes built on the pipeline: feature completion, abstract
//! generation, and the evaluation metrics they report.

pub mod abstracts;
pub mod completion;
pub mod metrics;

pub use abstracts::{abstract_context, abstract_generation_run, AbstractQuery, AbstractReport, AbstractRow, ContextMode};
pub use completion::{complete_features, Completion, CompletionMethod, RglParams};
pub use metrics::{ndcg_at_k, recall_at_k, reconstruction_error, rouge, ErrorMetric, Prf, RougeScores};
