//! Work shared between the queries of one batch call.
//!
//! Two kinds of lookups live for the duration of a batch: the hub-to-hub
//! adjacency rows of high-degree nodes, used when collecting induced edges,
//! and the explored regions of Steiner searches whose source terminal recurs
//! in the batch. Outputs are identical with or without a memo; only the
//! amount of adjacency scanning changes.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::scratch::{ScratchSpace, NONE};
use super::{RetrievalConfig, RetrievalMethod};
use crate::graph::{Graph, NodeId};

/// Nodes with at least this many neighbors get a cached hub-only row.
pub(crate) const HUB_DEGREE: usize = 64;

/// Upper bound on the memory held by per-source search regions.
const REGION_BUDGET_BYTES: usize = 32 << 20;

/// Bytes per node of a search region.
const REGION_BYTES_PER_NODE: usize = 12;

/// Setup cost of a fresh search region: one adjacency scan per this many
/// graph nodes, mostly page faults on first touch.
const NODES_PER_SETUP_SCAN: usize = 2;

/// The last unit-weight search from one recurring source terminal, packed
/// as `[epoch, level, parent]` per node. Levels are completed before the
/// search stops, so every node stamped with the current epoch is final.
/// Buffers are recycled through [`ScratchSpace`] between batches.
#[derive(Debug)]
pub(crate) struct Region {
    cells: Vec<[u32; 3]>,
    epoch: u32,
    filled: bool,
    /// The last search ran out of nodes: anything unstamped is unreachable.
    exhausted: bool,
}

impl Region {
    fn new(n: usize) -> Self {
        Region { cells: alloc::vec![[0; 3]; n], epoch: 0, filled: false, exhausted: false }
    }

    /// Forgets the previous owner and covers `n` nodes.
    fn reset(mut self, n: usize) -> Self {
        if self.cells.len() < n {
            self.cells.resize(n, [0; 3]);
        }
        self.filled = false;
        self
    }

    pub(crate) fn capacity(&self) -> usize {
        self.cells.capacity()
    }

    #[inline]
    fn cell(&self, u: NodeId) -> Option<&[u32; 3]> {
        let c = &self.cells[u as usize];
        (self.filled && c[0] == self.epoch).then_some(c)
    }

    /// True if every target is settled here, or provably unreachable.
    pub(crate) fn answers(&self, targets: &[NodeId]) -> bool {
        self.filled && (self.exhausted || targets.iter().all(|&t| self.cell(t).is_some()))
    }

    /// Distance from the source, summed edge by edge as the search would.
    pub(crate) fn dist(&self, u: NodeId, w: f64) -> Option<f64> {
        self.cell(u).map(|c| (0..c[1]).fold(0.0, |d, _| d + w))
    }

    pub(crate) fn parent(&self, u: NodeId) -> NodeId {
        self.cells[u as usize][2]
    }

    /// Level-synchronous search from `source` until the level holding the
    /// last of the sorted `targets` is complete. Ties between predecessors
    /// go to the lowest id, as in the scratch-space search.
    pub(crate) fn fill(
        &mut self,
        g: &Graph,
        source: NodeId,
        targets: &[NodeId],
        frontier: &mut Vec<NodeId>,
        next: &mut Vec<NodeId>,
    ) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.cells.iter_mut().for_each(|c| c[0] = 0);
            self.epoch = 1;
        }
        let e = self.epoch;
        self.cells[source as usize] = [e, 0, NONE];
        let mut remaining = targets.len();
        frontier.clear();
        frontier.push(source);
        let mut level = 0;
        while !frontier.is_empty() {
            level += 1;
            next.clear();
            for &u in frontier.iter() {
                for &v in g.adj(u) {
                    let c = &mut self.cells[v as usize];
                    if c[0] != e {
                        *c = [e, level, u];
                        next.push(v);
                        if targets.binary_search(&v).is_ok() {
                            remaining -= 1;
                        }
                    } else if c[1] == level && u < c[2] {
                        c[2] = u;
                    }
                }
            }
            if remaining == 0 {
                self.exhausted = false;
                self.filled = true;
                return;
            }
            core::mem::swap(frontier, next);
        }
        self.exhausted = true;
        self.filled = true;
    }
}

/// Per-batch caches; see the module docs.
#[derive(Default)]
pub(crate) struct BatchMemo {
    rows: BTreeMap<NodeId, (usize, usize)>,
    row_data: Vec<(NodeId, f64)>,
    slots: BTreeMap<NodeId, usize>,
    regions: Vec<Option<Region>>,
    spare: Vec<Region>,
}

/// True when Steiner searches on `g` run level by level.
pub(crate) fn unit_searches(g: &Graph) -> bool {
    !g.is_directed() && matches!(g.uniform_weight(), Some(w) if w > 0.0)
}

#[inline]
pub(crate) fn is_hub(g: &Graph, u: NodeId) -> bool {
    g.adj(u).len() >= HUB_DEGREE
}

impl BatchMemo {
    /// Reserves search regions for the Steiner source terminals whose
    /// repeated searches are estimated to cost more adjacency scanning than
    /// a fresh region costs to set up, largest savings first.
    pub(crate) fn plan(g: &Graph, seed_sets: &[Vec<NodeId>], cfg: &RetrievalConfig) -> Self {
        let mut memo = BatchMemo::default();
        let n = g.node_count();
        if cfg.method != RetrievalMethod::Steiner || !unit_searches(g) || n == 0 {
            return memo;
        }
        let mut terms = Vec::new();
        let mut for_each_search = |f: &mut dyn FnMut(NodeId, &[NodeId])| {
            for seeds in seed_sets {
                terms.clear();
                terms.extend(seeds.iter().copied().filter(|&u| (u as usize) < n));
                terms.sort_unstable();
                terms.dedup();
                for i in 0..terms.len().saturating_sub(1) {
                    f(terms[i], &terms[i + 1..]);
                }
            }
        };
        let mut counts: BTreeMap<NodeId, usize> = BTreeMap::new();
        for_each_search(&mut |u, _| *counts.entry(u).or_default() += 1);
        counts.retain(|_, c| *c >= 2);

        // Scan estimate per search: the source's own list when every target
        // is a neighbor, otherwise the lists of all its neighbors too.
        let mut costs: BTreeMap<NodeId, (usize, usize, usize)> = BTreeMap::new();
        for_each_search(&mut |u, targets| {
            if !counts.contains_key(&u) {
                return;
            }
            let adj = g.adj(u);
            let (total, max, two_hop) = costs.entry(u).or_insert((0, 0, usize::MAX));
            let cost = if targets.iter().all(|t| adj.binary_search(t).is_ok()) {
                adj.len()
            } else {
                if *two_hop == usize::MAX {
                    *two_hop = adj.len() + adj.iter().map(|&v| g.adj(v).len()).sum::<usize>();
                }
                *two_hop
            };
            *total += cost;
            *max = (*max).max(cost);
        });
        let setup = n / NODES_PER_SETUP_SCAN;
        let mut ranked: Vec<(usize, NodeId)> = costs
            .into_iter()
            .map(|(u, (total, max, _))| (total - max, u))
            .filter(|&(saved, _)| saved >= setup)
            .collect();
        ranked.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let max_slots = REGION_BUDGET_BYTES / (REGION_BYTES_PER_NODE * n);
        for (slot, &(_, u)) in ranked.iter().take(max_slots).enumerate() {
            memo.slots.insert(u, slot);
        }
        memo.regions.resize_with(memo.slots.len(), || None);
        memo
    }

    /// Takes recycled region buffers from `s`.
    pub(crate) fn borrow_regions(&mut self, s: &mut ScratchSpace) {
        self.spare = core::mem::take(&mut s.regions);
    }

    /// Hands every region buffer back to `s` for the next batch.
    pub(crate) fn return_regions(self, s: &mut ScratchSpace) {
        let mut all = self.spare;
        all.extend(self.regions.into_iter().flatten());
        s.regions = all;
    }

    /// The search region reserved for `source`, set up on first use.
    pub(crate) fn region(&mut self, n: usize, source: NodeId) -> Option<&mut Region> {
        let slot = *self.slots.get(&source)?;
        let spare = &mut self.spare;
        Some(self.regions[slot].get_or_insert_with(|| spare.pop().map_or_else(|| Region::new(n), |r| r.reset(n))))
    }

    /// Neighbors of hub `u` that are hubs themselves, ascending, with weights.
    pub(crate) fn hub_row(&mut self, g: &Graph, u: NodeId) -> &[(NodeId, f64)] {
        let (start, end) = match self.rows.get(&u) {
            Some(&r) => r,
            None => {
                let start = self.row_data.len();
                let w = g.adj_weights(u);
                for (i, &v) in g.adj(u).iter().enumerate() {
                    if is_hub(g, v) {
                        self.row_data.push((v, w.map_or(1.0, |w| w[i])));
                    }
                }
                let r = (start, self.row_data.len());
                self.rows.insert(u, r);
                r
            }
        };
        &self.row_data[start..end]
    }
}
