//! Functional API: pipeline stages as composable functions.
//!
//! A stage maps one input type to one output type. [`compose`] only accepts
//! stages whose types line up, so a contract mismatch is rejected when the
//! composition is written rather than when it runs.

use alloc::vec::Vec;
use core::marker::PhantomData;

use crate::error::Result;
use crate::graph::{Graph, NodeAttributes, NodeId, Subgraph};
use crate::index::{EmbeddingIndex, RetrievalHit};
use crate::prompt::{NodeOrder, PromptBundle, PromptForge};
use crate::retrieval::{filter_nodes, retrieve_with, NodeFilter, RetrievalConfig, ScratchSpace};

pub trait StageFn<I> {
    type Output;

    fn apply(&self, input: I) -> Result<Self::Output>;
}

impl<I, O, F> StageFn<I> for F
where
    F: Fn(I) -> Result<O>,
{
    type Output = O;

    fn apply(&self, input: I) -> Result<O> {
        self(input)
    }
}

/// Passes its input through unchanged.
pub struct Identity<T>(PhantomData<fn(T) -> T>);

pub fn identity<T>() -> Identity<T> {
    Identity(PhantomData)
}

impl<T> StageFn<T> for Identity<T> {
    type Output = T;

    fn apply(&self, input: T) -> Result<T> {
        Ok(input)
    }
}

/// `second` applied to the output of `first`.
pub struct Chain<A, B> {
    first: A,
    second: B,
}

pub fn compose<I, A, B>(first: A, second: B) -> Chain<A, B>
where
    A: StageFn<I>,
    B: StageFn<A::Output>,
{
    Chain { first, second }
}

impl<I, A, B> StageFn<I> for Chain<A, B>
where
    A: StageFn<I>,
    B: StageFn<A::Output>,
{
    type Output = B::Output;

    fn apply(&self, input: I) -> Result<B::Output> {
        self.second.apply(self.first.apply(input)?)
    }
}

/// Left-to-right composition of any number of stages.
#[macro_export]
macro_rules! compose {
    ($only:expr $(,)?) => { $only };
    ($first:expr, $($rest:expr),+ $(,)?) => {
        $crate::compose::compose($first, $crate::compose!($($rest),+))
    };
}

/// Query vector to exact top-k hits.
pub struct Knn<'a> {
    pub index: &'a EmbeddingIndex,
    pub k: usize,
}

impl StageFn<Vec<f64>> for Knn<'_> {
    type Output = Vec<RetrievalHit>;

    fn apply(&self, query: Vec<f64>) -> Result<Vec<RetrievalHit>> {
        self.index.knn_query(&query, self.k.min(self.index.len()), None)
    }
}

/// Dynamic node filtering over ranked hits.
pub struct Filter(pub NodeFilter);

impl StageFn<Vec<RetrievalHit>> for Filter {
    type Output = Vec<RetrievalHit>;

    fn apply(&self, hits: Vec<RetrievalHit>) -> Result<Vec<RetrievalHit>> {
        Ok(filter_nodes(&hits, self.0))
    }
}

/// Hits to a subgraph using the configured method; hit scores become seed relevance.
pub struct Retrieve<'a> {
    pub graph: &'a Graph,
    pub config: RetrievalConfig,
}

impl StageFn<Vec<RetrievalHit>> for Retrieve<'_> {
    type Output = Subgraph;

    fn apply(&self, hits: Vec<RetrievalHit>) -> Result<Subgraph> {
        self.config.validate()?;
        let seeds: Vec<NodeId> = hits.iter().map(|h| h.node).collect();
        let mut s = ScratchSpace::new(self.graph.node_count());
        let mut sub = retrieve_with(self.graph, &mut s, &seeds, &self.config)?;
        sub.set_scores(hits.iter().map(|h| (h.node, h.score)));
        Ok(sub)
    }
}

/// Subgraph to a budgeted prompt bundle.
pub struct Serialize<'a> {
    pub attrs: &'a NodeAttributes,
    pub forge: &'a PromptForge,
    pub budget: usize,
    pub order: NodeOrder,
}

impl StageFn<Subgraph> for Serialize<'_> {
    type Output = PromptBundle;

    fn apply(&self, sub: Subgraph) -> Result<PromptBundle> {
        self.forge.serialize_subgraph(&sub, self.attrs, self.budget, self.order)
    }
}
