//! Independent reference implementations used as test oracles.
//!
//! Everything here works from plain edge lists and dense matrices, never from
//! the library's CSR or scratch machinery.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rgl_core::{build_graph, Edge, Graph, NodeId};

pub type WEdge = (NodeId, NodeId, f64);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Undirected G(n, p) edge list with optional integer weights in 1..=max_w.
pub fn random_edges(rng: &mut impl Rng, n: usize, p: f64, max_w: Option<u32>) -> Vec<WEdge> {
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                let w = max_w.map_or(1.0, |m| rng.random_range(1..=m) as f64);
                out.push((u as NodeId, v as NodeId, w));
            }
        }
    }
    out
}

/// A random spanning tree plus G(n, p) extra edges; always connected.
pub fn random_connected_edges(rng: &mut impl Rng, n: usize, p: f64, max_w: Option<u32>) -> Vec<WEdge> {
    let mut set: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
    let weight = |rng: &mut dyn rand::RngCore| max_w.map_or(1.0, |m| rng.random_range(1..=m) as f64);
    for v in 1..n {
        let u = rng.random_range(0..v);
        let w = weight(rng);
        set.insert((u as NodeId, v as NodeId), w);
    }
    for (u, v, _) in random_edges(rng, n, p, None) {
        let w = weight(rng);
        set.entry((u, v)).or_insert(w);
    }
    set.into_iter().map(|((u, v), w)| (u, v, w)).collect()
}

pub fn to_graph(n: usize, edges: &[WEdge], weighted: bool) -> Graph {
    let list: Vec<Edge> = edges
        .iter()
        .map(|&(u, v, w)| if weighted { Edge::weighted(u, v, w) } else { Edge::new(u, v) })
        .collect();
    build_graph(&list, n, false).unwrap()
}

pub fn sample_distinct(rng: &mut impl Rng, n: usize, k: usize) -> Vec<NodeId> {
    rand::seq::index::sample(rng, n, k.min(n)).into_iter().map(|i| i as NodeId).collect()
}

pub fn adjacency_sets(n: usize, edges: &[WEdge]) -> Vec<BTreeSet<NodeId>> {
    let mut adj = vec![BTreeSet::new(); n];
    for &(u, v, _) in edges {
        adj[u as usize].insert(v);
        adj[v as usize].insert(u);
    }
    adj
}

/// Queue-based BFS closure up to `hops` from all seeds.
pub fn bfs_closure(n: usize, edges: &[WEdge], seeds: &[NodeId], hops: usize) -> BTreeSet<NodeId> {
    let adj = adjacency_sets(n, edges);
    let mut depth = vec![usize::MAX; n];
    let mut q = VecDeque::new();
    for &s in seeds {
        if depth[s as usize] == usize::MAX {
            depth[s as usize] = 0;
            q.push_back(s);
        }
    }
    while let Some(u) = q.pop_front() {
        if depth[u as usize] == hops {
            continue;
        }
        for &v in &adj[u as usize] {
            if depth[v as usize] == usize::MAX {
                depth[v as usize] = depth[u as usize] + 1;
                q.push_back(v);
            }
        }
    }
    (0..n as NodeId).filter(|&u| depth[u as usize] != usize::MAX).collect()
}

/// All-pairs shortest path lengths.
pub fn floyd_warshall(n: usize, edges: &[WEdge]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(u, v, w) in edges {
        let (u, v) = (u as usize, v as usize);
        d[u][v] = d[u][v].min(w);
        d[v][u] = d[v][u].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Minimum spanning forest weight of the subgraph induced by `mask`, or
/// `None` if that subgraph is disconnected.
fn induced_mst_weight(n: usize, sorted_edges: &[WEdge], mask: u32) -> Option<f64> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let members = mask.count_ones() as usize;
    let mut joined = 0;
    let mut total = 0.0;
    for &(u, v, w) in sorted_edges {
        if mask >> u & 1 == 0 || mask >> v & 1 == 0 {
            continue;
        }
        let (a, b) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
        if a != b {
            parent[a] = b;
            total += w;
            joined += 1;
        }
    }
    (joined + 1 == members).then_some(total)
}

/// Exact minimum Steiner tree weight by enumerating every node superset of
/// the terminals (a minimum Steiner tree is an MST of its own node set).
pub fn exact_steiner_weight(n: usize, edges: &[WEdge], terminals: &[NodeId]) -> Option<f64> {
    assert!(n <= 20);
    let mut sorted = edges.to_vec();
    sorted.sort_by(|a, b| a.2.total_cmp(&b.2));
    let term_mask: u32 = terminals.iter().fold(0, |m, &t| m | 1 << t);
    let others: Vec<u32> = (0..n as u32).filter(|&u| term_mask >> u & 1 == 0).collect();
    let mut best: Option<f64> = None;
    for sub in 0u32..1 << others.len() {
        let mut mask = term_mask;
        for (i, &u) in others.iter().enumerate() {
            if sub >> i & 1 == 1 {
                mask |= 1 << u;
            }
        }
        if let Some(w) = induced_mst_weight(n, &sorted, mask) {
            best = Some(best.map_or(w, |b: f64| b.min(w)));
        }
    }
    best
}

/// Maximum edges/nodes over all subsets of `pool` that contain every seed.
pub fn max_seed_density(n: usize, edges: &[WEdge], seeds: &[NodeId], pool: &BTreeSet<NodeId>) -> f64 {
    assert!(n <= 24);
    let mut adj = vec![0u32; n];
    for &(u, v, _) in edges {
        adj[u as usize] |= 1 << v;
        adj[v as usize] |= 1 << u;
    }
    let seed_mask: u32 = seeds.iter().fold(0, |m, &s| m | 1 << s);
    let free: Vec<NodeId> = pool.iter().copied().filter(|&u| seed_mask >> u & 1 == 0).collect();
    let mut best = 0.0f64;
    for sub in 0u32..1 << free.len() {
        let mut mask = seed_mask;
        for (i, &u) in free.iter().enumerate() {
            if sub >> i & 1 == 1 {
                mask |= 1 << u;
            }
        }
        let mut twice_edges = 0;
        for u in 0..n {
            if mask >> u & 1 == 1 {
                twice_edges += (adj[u] & mask).count_ones();
            }
        }
        best = best.max(twice_edges as f64 / 2.0 / mask.count_ones() as f64);
    }
    best
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Personalized PageRank fixed point of the dangling-to-restart chain:
/// `p = alpha r + (1 - alpha) (W^T p + (d . p) r)`.
pub fn ppr_fixed_point(n: usize, edges: &[WEdge], seeds: &[NodeId], alpha: f64) -> Vec<f64> {
    let mut out_w = vec![0.0; n];
    for &(u, v, w) in edges {
        out_w[u as usize] += w;
        out_w[v as usize] += w;
    }
    let seeds: BTreeSet<NodeId> = seeds.iter().copied().collect();
    let mut r = vec![0.0; n];
    for &s in &seeds {
        r[s as usize] = 1.0 / seeds.len() as f64;
    }
    // M[v][u] = transition probability u -> v including dangling redirection.
    let mut m = vec![vec![0.0; n]; n];
    for &(u, v, w) in edges {
        let (u, v) = (u as usize, v as usize);
        if out_w[u] > 0.0 {
            m[v][u] += w / out_w[u];
        }
        if out_w[v] > 0.0 {
            m[u][v] += w / out_w[v];
        }
    }
    for u in 0..n {
        if out_w[u] <= 0.0 {
            for v in 0..n {
                m[v][u] += r[v];
            }
        }
    }
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 } - (1.0 - alpha) * m[i][j]).collect())
        .collect();
    solve(a, r.iter().map(|x| alpha * x).collect())
}

/// Full-sort top-k: score descending, node id ascending.
pub fn brute_knn(rows: &[Vec<f64>], query: &[f64], k: usize, cosine: bool, exclude: &[NodeId]) -> Vec<(NodeId, f64)> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0, |s, (x, y)| s + x * y);
    let qn = dot(query, query).sqrt();
    let mut all: Vec<(NodeId, f64)> = rows
        .iter()
        .enumerate()
        .filter(|(i, _)| !exclude.contains(&(*i as NodeId)))
        .map(|(i, row)| {
            let d = dot(query, row);
            let s = if !cosine {
                d
            } else {
                let rn = dot(row, row).sqrt();
                if qn == 0.0 || rn == 0.0 {
                    0.0
                } else {
                    d / (qn * rn)
                }
            };
            (i as NodeId, s)
        })
        .collect();
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// True when `edges` (on `nodes`) form a tree.
pub fn is_spanning_tree(nodes: &[NodeId], edges: &[(NodeId, NodeId)]) -> bool {
    if nodes.is_empty() || edges.len() + 1 != nodes.len() {
        return false;
    }
    let idx: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    for (u, v) in edges {
        let (Some(&a), Some(&b)) = (idx.get(u), idx.get(v)) else { return false };
        let (a, b) = (find(&mut parent, a), find(&mut parent, b));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// A hand-counted ROUGE case: token counts, clipped n-gram overlaps and LCS length.
pub struct RougeCase {
    pub candidate: &'static str,
    pub reference: &'static str,
    pub cand_len: usize,
    pub ref_len: usize,
    pub unigram_overlap: usize,
    pub cand_bigrams: usize,
    pub ref_bigrams: usize,
    pub bigram_overlap: usize,
    pub lcs: usize,
}

const fn case(
    candidate: &'static str,
    reference: &'static str,
    [cand_len, ref_len, unigram_overlap]: [usize; 3],
    [cand_bigrams, ref_bigrams, bigram_overlap]: [usize; 3],
    lcs: usize,
) -> RougeCase {
    RougeCase { candidate, reference, cand_len, ref_len, unigram_overlap, cand_bigrams, ref_bigrams, bigram_overlap, lcs }
}

pub const ROUGE_CASES: [RougeCase; 20] = [
    case("the cat sat on the mat", "the cat sat on the mat", [6, 6, 6], [5, 5, 5], 6),
    case("a b c", "d e f", [3, 3, 0], [2, 2, 0], 0),
    case("the cat sat", "the cat on the mat", [3, 5, 2], [2, 4, 1], 2),
    case("", "anything here", [0, 2, 0], [0, 1, 0], 0),
    case("the the the", "the cat", [3, 2, 1], [2, 1, 0], 1),
    case("police killed the gunman", "the gunman killed police", [4, 4, 4], [3, 3, 1], 2),
    case("police kill the gunman", "police killed the gunman", [4, 4, 3], [3, 3, 1], 3),
    case("the gunman kill police", "police killed the gunman", [4, 4, 3], [3, 3, 1], 2),
    case("The Cat!", "the cat", [2, 2, 2], [1, 1, 1], 2),
    case("a a a a", "a a", [4, 2, 2], [3, 1, 1], 2),
    case("a b a b", "b a b a", [4, 4, 4], [3, 3, 2], 3),
    case("x", "x y", [1, 2, 1], [0, 1, 0], 1),
    case("one two three four five", "five four three two one", [5, 5, 5], [4, 4, 0], 1),
    case("data-driven graph retrieval", "graph data retrieval driven", [4, 4, 4], [3, 3, 0], 2),
    case("123 456", "123 789 456", [2, 3, 2], [1, 2, 0], 2),
    case("graph graph retrieval", "graph retrieval retrieval", [3, 3, 2], [2, 2, 1], 2),
    case("", "", [0, 0, 0], [0, 0, 0], 0),
    case("Über café", "über CAFÉ", [2, 2, 2], [1, 1, 1], 2),
    case("the quick brown fox jumps", "quick brown dogs jump", [5, 4, 2], [4, 3, 1], 2),
    case("a b c d e f", "a c e", [6, 3, 3], [5, 2, 0], 3),
];

/// (precision, recall, f1) from counts; zero denominators give 0.
pub fn prf(overlap: usize, cand: usize, reference: usize) -> (f64, f64, f64) {
    let p = if cand == 0 { 0.0 } else { overlap as f64 / cand as f64 };
    let r = if reference == 0 { 0.0 } else { overlap as f64 / reference as f64 };
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}
