use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use super::memo::Region;
use crate::graph::{Dsu, NodeId, SubEdge};

pub(crate) const NONE: NodeId = NodeId::MAX;

/// Min-heap entry ordered by `(dist, node)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DistEntry {
    pub dist: f64,
    pub node: NodeId,
}

impl PartialEq for DistEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for DistEntry {}
impl PartialOrd for DistEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for DistEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed so that BinaryHeap pops the smallest distance first.
        other.dist.total_cmp(&self.dist).then(other.node.cmp(&self.node))
    }
}

/// Per-worker buffers reused across retrieval queries.
///
/// Node-indexed arrays are only meaningful where `stamp[u] == epoch`; starting
/// a new traversal bumps the epoch instead of clearing them.
#[derive(Debug, Default)]
pub struct ScratchSpace {
    pub(crate) stamp: Vec<u32>,
    pub(crate) epoch: u32,
    pub(crate) dist: Vec<f64>,
    pub(crate) parent: Vec<NodeId>,
    pub(crate) nearest: Vec<NodeId>,
    pub(crate) local: Vec<u32>,

    pub(crate) frontier: Vec<NodeId>,
    pub(crate) next: Vec<NodeId>,
    pub(crate) collected: Vec<NodeId>,
    pub(crate) heap: BinaryHeap<DistEntry>,

    // Steiner buffers.
    pub(crate) closure: Vec<f64>,
    pub(crate) paths: Vec<NodeId>,
    pub(crate) path_ranges: Vec<(usize, usize)>,
    pub(crate) pairs: Vec<(f64, usize, usize)>,
    pub(crate) tree_edges: Vec<SubEdge>,
    pub(crate) tree_nodes: Vec<NodeId>,
    pub(crate) dsu: Dsu,
    pub(crate) alive: Vec<bool>,
    pub(crate) local_deg: Vec<usize>,

    // Peeling buffers.
    pub(crate) loc_offsets: Vec<usize>,
    pub(crate) loc_adj: Vec<u32>,
    pub(crate) removed: Vec<bool>,
    pub(crate) order: Vec<u32>,
    pub(crate) peel_heap: BinaryHeap<Reverse<(usize, u32)>>,

    // Steiner search regions kept between batches.
    pub(crate) regions: Vec<Region>,

    footprint: usize,
    growth_events: usize,
}

impl ScratchSpace {
    pub fn new(node_count: usize) -> Self {
        let mut s = ScratchSpace::default();
        s.ensure(node_count);
        s.footprint = s.capacity_footprint();
        s
    }

    /// Grows the node-indexed arrays to cover `node_count` nodes. Fresh
    /// arrays are zeroed, so untouched pages cost nothing up front.
    pub fn ensure(&mut self, node_count: usize) {
        fn grow<T: Clone + Default>(v: &mut Vec<T>, n: usize) {
            if v.is_empty() {
                *v = alloc::vec![T::default(); n];
            } else {
                v.resize(n, T::default());
            }
        }
        if self.stamp.len() < node_count {
            grow(&mut self.stamp, node_count);
            grow(&mut self.dist, node_count);
            grow(&mut self.parent, node_count);
            grow(&mut self.nearest, node_count);
            grow(&mut self.local, node_count);
        }
    }

    /// Starts a new traversal epoch.
    pub(crate) fn begin(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }

    #[inline]
    pub(crate) fn visited(&self, u: NodeId) -> bool {
        self.stamp[u as usize] == self.epoch
    }

    #[inline]
    pub(crate) fn visit(&mut self, u: NodeId) {
        self.stamp[u as usize] = self.epoch;
    }

    pub fn epoch(&self) -> u32 {
        self.epoch
    }

    fn capacity_footprint(&self) -> usize {
        self.stamp.capacity()
            + self.dist.capacity()
            + self.parent.capacity()
            + self.nearest.capacity()
            + self.local.capacity()
            + self.frontier.capacity()
            + self.next.capacity()
            + self.collected.capacity()
            + self.heap.capacity()
            + self.closure.capacity()
            + self.paths.capacity()
            + self.path_ranges.capacity()
            + self.pairs.capacity()
            + self.tree_edges.capacity()
            + self.tree_nodes.capacity()
            + self.dsu.capacity()
            + self.alive.capacity()
            + self.local_deg.capacity()
            + self.loc_offsets.capacity()
            + self.loc_adj.capacity()
            + self.removed.capacity()
            + self.order.capacity()
            + self.peel_heap.capacity()
            + self.regions.iter().map(Region::capacity).sum::<usize>()
    }

    /// Records whether the last query grew any buffer.
    pub(crate) fn settle(&mut self) {
        let now = self.capacity_footprint();
        if now > self.footprint {
            self.growth_events += 1;
            self.footprint = now;
        }
    }

    /// Number of queries that had to grow a buffer since construction.
    pub fn growth_events(&self) -> usize {
        self.growth_events
    }
}
