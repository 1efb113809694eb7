//! Undirected simple graphs, edge orientations, generators and derived graphs.
//!
//! Node ids are dense integers `0..n`. Adjacency is stored in CSR form with
//! neighbor lists sorted ascending; every adjacency slot also records the id of
//! the underlying edge and the position of the reverse slot, which the
//! simulator uses to route messages.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Immutable undirected simple graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "GraphData", try_from = "GraphData")]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    adj: Vec<NodeId>,
    adj_edge: Vec<usize>,
    mirror: Vec<usize>,
    edges: Vec<(NodeId, NodeId)>,
}

/// Serialized form: `{ "n": .., "m": .., "edges": [[u, v], ..] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphData {
    pub n: usize,
    #[serde(default)]
    pub m: Option<usize>,
    pub edges: Vec<(NodeId, NodeId)>,
}

impl From<Graph> for GraphData {
    fn from(g: Graph) -> Self {
        GraphData {
            n: g.n,
            m: Some(g.edges.len()),
            edges: g.edges,
        }
    }
}

impl TryFrom<GraphData> for Graph {
    type Error = Error;
    fn try_from(d: GraphData) -> Result<Self> {
        Graph::build(d.n, &d.edges)
    }
}

impl Graph {
    /// Builds a canonical graph; duplicate edges (in either direction) are merged.
    pub fn build(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            for id in [u, v] {
                if id >= n {
                    return Err(Error::NodeOutOfRange { id, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self::from_sorted_edges(n, set.into_iter().collect()))
    }

    /// `edges` must be sorted, deduplicated, in range and with `u < v`.
    fn from_sorted_edges(n: usize, edges: Vec<(NodeId, NodeId)>) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = *offsets.last().unwrap();
        let mut adj = vec![0; total];
        let mut adj_edge = vec![0; total];
        let mut fill = offsets[..n].to_vec();
        // Edges are sorted by (u, v): for each node, neighbors smaller than it
        // arrive in increasing order (as v-endpoints) before larger ones (as
        // u-endpoints), so every list comes out sorted.
        let mut by_high: Vec<Vec<(NodeId, usize)>> = vec![Vec::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            by_high[v].push((u, e));
        }
        for v in 0..n {
            for &(u, e) in &by_high[v] {
                adj[fill[v]] = u;
                adj_edge[fill[v]] = e;
                fill[v] += 1;
            }
        }
        for (e, &(u, v)) in edges.iter().enumerate() {
            adj[fill[u]] = v;
            adj_edge[fill[u]] = e;
            fill[u] += 1;
        }
        let mut g = Graph {
            n,
            offsets,
            adj,
            adj_edge,
            mirror: vec![0; total],
            edges,
        };
        for v in 0..n {
            for slot in g.offsets[v]..g.offsets[v + 1] {
                let u = g.adj[slot];
                let back = g.neighbors(u).binary_search(&v).expect("symmetric adjacency");
                g.mirror[slot] = g.offsets[u] + back;
            }
        }
        g
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_edges(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Edge ids aligned with [`Graph::neighbors`].
    pub fn incident_edges(&self, v: NodeId) -> &[usize] {
        &self.adj_edge[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.n && self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn edge_index(&self, u: NodeId, v: NodeId) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    /// Position of `v` inside the neighbor list of `neighbors(v)[slot]`.
    pub fn mirror_slot(&self, v: NodeId, slot: usize) -> usize {
        let global = self.mirror[self.offsets[v] + slot];
        let u = self.adj[self.offsets[v] + slot];
        global - self.offsets[u]
    }

    /// Global adjacency slots of `v`; `2m` slots overall.
    pub(crate) fn slot_range(&self, v: NodeId) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    /// Global slot of the reverse direction of global slot `slot`.
    pub(crate) fn mirror_of(&self, slot: usize) -> usize {
        self.mirror[slot]
    }

    /// Same node set, keeping only the edges accepted by `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, NodeId, NodeId) -> bool) -> Graph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(e, &(u, v))| keep(e, u, v))
            .map(|(_, &uv)| uv)
            .collect();
        Graph::from_sorted_edges(self.n, edges)
    }

    /// Subgraph induced by `nodes`, with ids remapped to `0..nodes.len()` in
    /// ascending order of the original ids.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> (Graph, IdMap) {
        let map = IdMap::new(self.n, nodes);
        let mut edges = Vec::new();
        for (i, &orig) in map.to_orig.iter().enumerate() {
            for &u in self.neighbors(orig) {
                if let Some(j) = map.to_sub[u] {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        edges.sort_unstable();
        (Graph::from_sorted_edges(map.to_orig.len(), edges), map)
    }

    /// Debug check of every structural invariant.
    pub fn check_invariants(&self) -> bool {
        let mut count = 0;
        for v in 0..self.n {
            let nb = self.neighbors(v);
            if nb.windows(2).any(|w| w[0] >= w[1]) || nb.contains(&v) {
                return false;
            }
            for (slot, &u) in nb.iter().enumerate() {
                if !self.has_edge(u, v) || self.neighbors(u)[self.mirror_slot(v, slot)] != v {
                    return false;
                }
                let e = self.incident_edges(v)[slot];
                if self.edges[e] != (u.min(v), u.max(v)) {
                    return false;
                }
            }
            count += nb.len();
        }
        count == 2 * self.edges.len()
    }

    /// Edge-list text: first line `n m`, then one `u v` per line.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    pub fn from_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidParameter("empty edge list".into()))?;
        let (n, m) = parse_pair(header)?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            edges.push(parse_pair(line)?);
        }
        if edges.len() != m {
            return Err(Error::InvalidParameter(format!(
                "edge list header announces {m} edges, found {}",
                edges.len()
            )));
        }
        Graph::build(n, &edges)
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(str::parse::<usize>);
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(Error::InvalidParameter(format!("malformed line {line:?}"))),
    }
}

/// Bidirectional id map between a graph and one of its induced subgraphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdMap {
    pub to_sub: Vec<Option<NodeId>>,
    pub to_orig: Vec<NodeId>,
}

impl IdMap {
    fn new(n: usize, nodes: &[NodeId]) -> Self {
        let mut to_orig: Vec<NodeId> = nodes.to_vec();
        to_orig.sort_unstable();
        to_orig.dedup();
        let mut to_sub = vec![None; n];
        for (i, &v) in to_orig.iter().enumerate() {
            to_sub[v] = Some(i);
        }
        IdMap { to_sub, to_orig }
    }

    /// Picks the entries of a per-node vector that belong to the subgraph.
    pub fn restrict<T: Clone>(&self, values: &[T]) -> Vec<T> {
        self.to_orig.iter().map(|&v| values[v].clone()).collect()
    }
}

/// Direction of every edge of a graph. `low_to_high[e]` is true when edge
/// `e = (u, v)`, `u < v`, points from `u` to `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    low_to_high: Vec<bool>,
    out_degree: Vec<usize>,
}

impl Orientation {
    /// Orients each edge `(u, v)` (with `u < v`) from `u` to `v` iff `forward(u, v)`.
    pub fn from_fn(g: &Graph, mut forward: impl FnMut(NodeId, NodeId) -> bool) -> Self {
        let mut out_degree = vec![0; g.n()];
        let low_to_high: Vec<bool> = g
            .edges()
            .iter()
            .map(|&(u, v)| {
                let f = forward(u, v);
                out_degree[if f { u } else { v }] += 1;
                f
            })
            .collect();
        Orientation {
            low_to_high,
            out_degree,
        }
    }

    /// Every edge from the lower to the higher id.
    pub fn by_id(g: &Graph) -> Self {
        Self::from_fn(g, |_, _| true)
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_degree[v]
    }

    pub fn out_degrees(&self) -> &[usize] {
        &self.out_degree
    }

    pub fn edge_count(&self) -> usize {
        self.low_to_high.len()
    }

    /// Tail of edge `e` of `g`.
    pub fn tail(&self, g: &Graph, e: usize) -> NodeId {
        let (u, v) = g.edges()[e];
        if self.low_to_high[e] {
            u
        } else {
            v
        }
    }

    /// Whether the edge at adjacency `slot` of `v` points away from `v`.
    pub fn points_out(&self, g: &Graph, v: NodeId, slot: usize) -> bool {
        let e = g.incident_edges(v)[slot];
        self.tail(g, e) == v
    }

    /// Out-neighbors of `v`.
    pub fn out_neighbors<'a>(&'a self, g: &'a Graph, v: NodeId) -> impl Iterator<Item = NodeId> + 'a {
        g.neighbors(v)
            .iter()
            .enumerate()
            .filter(move |&(slot, _)| self.points_out(g, v, slot))
            .map(|(_, &u)| u)
    }

    /// Restriction to a subgraph `sub` over the same node set.
    pub fn restrict_to(&self, g: &Graph, sub: &Graph) -> Orientation {
        Orientation::from_fn(sub, |u, v| {
            let e = g.edge_index(u, v).expect("subgraph edge present in parent");
            self.low_to_high[e]
        })
    }

    /// True iff the orientation matches `g` and has no directed cycle.
    pub fn is_acyclic(&self, g: &Graph) -> bool {
        if self.low_to_high.len() != g.edge_count() {
            return false;
        }
        let mut indeg = vec![0usize; g.n()];
        for e in 0..g.edge_count() {
            let (u, v) = g.edges()[e];
            let head = if self.low_to_high[e] { v } else { u };
            indeg[head] += 1;
        }
        let mut stack: Vec<NodeId> = (0..g.n()).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for u in self.out_neighbors(g, v) {
                indeg[u] -= 1;
                if indeg[u] == 0 {
                    stack.push(u);
                }
            }
        }
        seen == g.n()
    }
}

/// Acyclic orientation from minimum-degree peeling (ties to the lowest id).
/// Each edge points from the endpoint peeled first, so out-degrees equal the
/// residual degree at removal. Returns the orientation and the degeneracy.
///
/// Centralized preprocessing; not executed on the simulator.
pub fn orient_by_degeneracy(g: &Graph) -> (Orientation, usize) {
    let order = degeneracy_order(g);
    let mut rank = vec![0; g.n()];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    let o = Orientation::from_fn(g, |u, v| rank[u] < rank[v]);
    let degeneracy = o.out_degrees().iter().copied().max().unwrap_or(0);
    (o, degeneracy)
}

/// Peeling order: repeatedly remove a minimum residual-degree node, lowest id first.
pub fn degeneracy_order(g: &Graph) -> Vec<NodeId> {
    let n = g.n();
    let mut deg = g.degrees();
    let mut buckets: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); g.max_degree() + 1];
    for v in 0..n {
        buckets[deg[v]].insert(v);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut low = 0;
    for _ in 0..n {
        while buckets[low].is_empty() {
            low += 1;
        }
        let v = buckets[low].pop_first().unwrap();
        removed[v] = true;
        order.push(v);
        for &u in g.neighbors(v) {
            if !removed[u] {
                buckets[deg[u]].remove(&u);
                deg[u] -= 1;
                buckets[deg[u]].insert(u);
            }
        }
        low = low.saturating_sub(1);
    }
    order
}

/// Line graph together with the edge each line node stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineGraphMapping {
    pub line_graph: Graph,
    pub edge_of_node: Vec<(NodeId, NodeId)>,
    pub node_degree_sum: Vec<usize>,
}

/// Line-graph node `i` is edge `i` of `g` (edges in lexicographic order).
pub fn line_graph(g: &Graph) -> LineGraphMapping {
    let mut pairs = Vec::new();
    for v in 0..g.n() {
        let inc = g.incident_edges(v);
        for i in 0..inc.len() {
            for j in i + 1..inc.len() {
                let (a, b) = (inc[i].min(inc[j]), inc[i].max(inc[j]));
                pairs.push((a, b));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    let edge_of_node = g.edges().to_vec();
    let node_degree_sum = edge_of_node
        .iter()
        .map(|&(u, v)| g.degree(u) + g.degree(v))
        .collect();
    LineGraphMapping {
        line_graph: Graph::from_sorted_edges(g.edge_count(), pairs),
        edge_of_node,
        node_degree_sum,
    }
}

/// Deterministic generator families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GraphKind {
    Ring,
    Star,
    Complete,
    Path,
    /// Erdős–Rényi `G(n, p)`.
    Gnp { p: f64, seed: u64 },
    /// Random intervals on `[0, 1)`, adjacent iff overlapping.
    Interval { seed: u64 },
    /// Random recursive tree.
    Tree { seed: u64 },
}

/// Seeded stream of uniform draws used by every randomized generator.
///
/// ChaCha8 seeded with `seed_from_u64`; a draw is the top 53 bits of
/// `next_u64()` scaled by `2^-53`, giving a uniform double in `[0, 1)`.
/// Both steps are fixed, so instances replay bit-exactly on every platform.
pub struct DrawStream(ChaCha8Rng);

impl DrawStream {
    pub fn new(seed: u64) -> Self {
        DrawStream(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)`.
    pub fn below(&mut self, bound: usize) -> usize {
        ((self.next_f64() * bound as f64) as usize).min(bound.saturating_sub(1))
    }
}

pub fn generate(kind: GraphKind, n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParameter("generator needs n >= 1".into()));
    }
    let mut edges = Vec::new();
    match kind {
        GraphKind::Ring => {
            if n == 2 {
                edges.push((0, 1));
            } else if n >= 3 {
                edges.extend((0..n).map(|i| (i, (i + 1) % n)));
            }
        }
        GraphKind::Star => edges.extend((1..n).map(|i| (0, i))),
        GraphKind::Complete => {
            for i in 0..n {
                edges.extend((i + 1..n).map(|j| (i, j)));
            }
        }
        GraphKind::Path => edges.extend((1..n).map(|i| (i - 1, i))),
        GraphKind::Gnp { p, seed } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("gnp probability {p} outside [0, 1]")));
            }
            let mut rng = DrawStream::new(seed);
            for i in 0..n {
                for j in i + 1..n {
                    if rng.next_f64() < p {
                        edges.push((i, j));
                    }
                }
            }
        }
        GraphKind::Interval { seed } => {
            let mut rng = DrawStream::new(seed);
            // Mean length 4/n keeps the expected degree around 8.
            let spans: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    let start = rng.next_f64();
                    let len = rng.next_f64() * 8.0 / n as f64;
                    (start, start + len)
                })
                .collect();
            for i in 0..n {
                for j in i + 1..n {
                    let (a, b) = (spans[i], spans[j]);
                    if a.0 < b.1 && b.0 < a.1 {
                        edges.push((i, j));
                    }
                }
            }
        }
        GraphKind::Tree { seed } => {
            let mut rng = DrawStream::new(seed);
            for i in 1..n {
                edges.push((rng.below(i), i));
            }
        }
    }
    Graph::build(n, &edges)
}
