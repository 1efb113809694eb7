//! List coloring of graphs with bounded neighborhood independence `θ`, and
//! edge list coloring through line graphs.

use serde::{Deserialize, Serialize};

use crate::coloring::{Color, ColorSpacePartition, ListAssignment, PartialColoring, ProperColoring};
use crate::degplus1::{deg_plus_one_with, sqrt_rounds, DegPlusOneOutcome, FrameworkParams, Inner};
use crate::engine::{Executor, Inbox, NodeCtx, NodeProgram, RunMetrics, Step};
use crate::error::{Error, Result};
use crate::graph::{line_graph, Graph, NodeId};
use crate::primitives::{announce_colors, defective_with_buckets, linial_coloring, low_degree_list_color};

/// `δ_0 = Δ`, `δ_φ = ⌈δ_(φ-1)/2⌉` down to 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseSchedule {
    pub deltas: Vec<usize>,
    /// Number of defective classes iterated per phase.
    pub q: usize,
}

impl PhaseSchedule {
    pub fn new(delta: usize, q: usize) -> Self {
        let mut deltas = vec![delta.max(1)];
        while let Some(&d) = deltas.last().filter(|&&d| d > 1) {
            deltas.push(d.div_ceil(2));
        }
        PhaseSchedule { deltas, q }
    }
}

/// Same-class neighbor counts against the bound from the defect and the
/// bound `max(θ, deg(v)/p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodReport {
    pub max_defect: usize,
    pub defect_bound_holds: bool,
    pub relative_bound_holds: bool,
    /// First violations of the relative bound as `(node, class, count)`.
    pub witnesses: Vec<(NodeId, usize, usize)>,
}

/// For every node and class: `|N(v) ∩ class| ≤ θ(d+1)` where `d` is the
/// largest defect, and `|N(v) ∩ class|·p ≤ max(θp, deg(v))`.
pub fn per_class_neighborhood_bound(g: &Graph, theta: usize, bucket: &[usize], p: usize) -> NeighborhoodReport {
    let max_defect = (0..g.n())
        .map(|v| g.neighbors(v).iter().filter(|&&u| bucket[u] == bucket[v]).count())
        .max()
        .unwrap_or(0);
    let mut report = NeighborhoodReport {
        max_defect,
        defect_bound_holds: true,
        relative_bound_holds: true,
        witnesses: Vec::new(),
    };
    let mut counts: Vec<usize> = Vec::new();
    for v in 0..g.n() {
        counts.clear();
        for &u in g.neighbors(v) {
            if counts.len() <= bucket[u] {
                counts.resize(bucket[u] + 1, 0);
            }
            counts[bucket[u]] += 1;
        }
        for (x, &c) in counts.iter().enumerate() {
            if c > theta * (max_defect + 1) {
                report.defect_bound_holds = false;
            }
            if c * p > (theta * p).max(g.degree(v)) {
                report.relative_bound_holds = false;
                if report.witnesses.len() < 10 {
                    report.witnesses.push((v, x, c));
                }
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakReductionOutcome {
    pub partition: ColorSpacePartition,
    /// `None` is ⊥.
    pub subspace_index: Vec<Option<usize>>,
    /// `L_v ∩ C_(i_v)`, empty for unassigned nodes.
    pub new_lists: Vec<Vec<Color>>,
    /// Neighbors with the same subspace, 0 for unassigned nodes.
    pub new_degree: Vec<usize>,
    /// Phase in which each node was assigned.
    pub phase: Vec<Option<usize>>,
    pub schedule: PhaseSchedule,
    pub neighborhood: NeighborhoodReport,
}

impl WeakReductionOutcome {
    /// Assigned nodes violating `|S(v)|·p ≤ θ(δ_φ·p + deg(v))`, where `S(v)`
    /// are the neighbors sharing `v`'s subspace and `φ` is `v`'s phase.
    pub fn assignment_bound_violations(&self, g: &Graph, theta: usize) -> Vec<NodeId> {
        let p = self.partition.parts;
        (0..g.n())
            .filter(|&v| match self.phase[v] {
                Some(phi) => {
                    let delta = self.schedule.deltas[phi];
                    self.new_degree[v] * p > theta * (delta * p + g.degree(v))
                }
                None => false,
            })
            .collect()
    }
}

struct WeakAssign {
    deltas: Vec<usize>,
    q: usize,
    p: usize,
}

struct WeakInput {
    class: usize,
    eligible: bool,
    list_len: usize,
    counts: Vec<usize>,
}

struct WeakState {
    class: usize,
    eligible: bool,
    list_len: usize,
    counts: Vec<usize>,
    taken: Vec<usize>,
}

impl WeakAssign {
    fn choose(&self, s: &WeakState, deg: usize, delta: usize) -> Option<usize> {
        let p = self.p;
        let lhs = (delta * p + deg) * s.list_len;
        let mut best: Option<usize> = None;
        for i in 0..p {
            if s.taken[i] <= delta && lhs <= 3 * s.counts[i] * deg * p && best.is_none_or(|b| s.counts[i] > s.counts[b]) {
                best = Some(i);
            }
        }
        best
    }
}

impl NodeProgram for WeakAssign {
    type Input = WeakInput;
    type State = WeakState;
    type Msg = usize;
    type Output = (Option<usize>, Option<usize>);

    fn init(&self, _: &NodeCtx<'_>, input: &WeakInput) -> WeakState {
        WeakState {
            class: input.class,
            eligible: input.eligible,
            list_len: input.list_len,
            counts: input.counts.clone(),
            taken: vec![0; self.p],
        }
    }

    fn step(&self, ctx: &NodeCtx<'_>, s: &mut WeakState, round: usize, inbox: &Inbox<'_, usize>) -> Step<usize, Self::Output> {
        for (_, &i) in inbox.iter() {
            s.taken[i] += 1;
        }
        if !s.eligible {
            return Step::finish((None, None));
        }
        // Round t serves class (t-1) mod q of phase (t-1) div q.
        let slot = round - 1;
        let phase = slot / self.q;
        if phase >= self.deltas.len() {
            return Step::finish((None, None));
        }
        if slot % self.q != s.class {
            return Step::silent();
        }
        match self.choose(s, ctx.degree(), self.deltas[phase]) {
            Some(i) => Step::broadcast(i).with_output((Some(i), Some(phase))),
            None if phase + 1 == self.deltas.len() => Step::finish((None, None)),
            None => Step::silent(),
        }
    }
}

/// Weak `(η, 3θ, 2θη)`-list color space reduction: every node of degree
/// above `θp` picks a subspace.
pub fn weak_reduction<T: crate::Scalar>(
    exec: &Executor,
    g: &Graph,
    theta: usize,
    lists: &ListAssignment,
    eta: T,
) -> Result<(WeakReductionOutcome, RunMetrics)> {
    let (base, mut metrics) = linial_coloring(exec, g)?;
    let (out, m) = weak_reduction_with_base(exec, g, theta, lists, eta, &base)?;
    metrics.then(m);
    Ok((out, metrics))
}

/// [`weak_reduction`] reusing a proper coloring of `g`.
pub fn weak_reduction_with_base<T: crate::Scalar>(
    exec: &Executor,
    g: &Graph,
    theta: usize,
    lists: &ListAssignment,
    eta: T,
    base: &ProperColoring,
) -> Result<(WeakReductionOutcome, RunMetrics)> {
    if theta == 0 {
        return Err(Error::InvalidParameter("theta must be >= 1".into()));
    }
    let partition = ColorSpacePartition::new(lists.space(), eta)?;
    let p = partition.parts;
    let q = 3 * p;
    let (bucket, mut metrics) = defective_with_buckets(exec, g, q, base)?;
    let neighborhood = per_class_neighborhood_bound(g, theta, &bucket, p);
    let schedule = PhaseSchedule::new(g.max_degree(), q);
    let inputs: Vec<WeakInput> = (0..g.n())
        .map(|v| WeakInput {
            class: bucket[v],
            eligible: g.degree(v) > theta * p,
            list_len: lists.list(v).len(),
            counts: partition.counts(lists.list(v)),
        })
        .collect();
    let program = WeakAssign {
        deltas: schedule.deltas.clone(),
        q,
        p,
    };
    let (out, m) = exec.run("assign", &program, g, &inputs)?;
    metrics.then(m);
    let subspace_index: Vec<Option<usize>> = out.iter().map(|o| o.0).collect();
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) > theta * p && subspace_index[v].is_none()) {
        return Err(Error::Internal(format!(
            "node {v} of degree {} > θp = {} got no subspace",
            g.degree(v),
            theta * p
        )));
    }
    let new_lists = (0..g.n())
        .map(|v| match subspace_index[v] {
            Some(i) => {
                let part = partition.part(i);
                lists.list(v).iter().copied().filter(|&c| part.contains(c)).collect()
            }
            None => Vec::new(),
        })
        .collect();
    let new_degree = (0..g.n())
        .map(|v| match subspace_index[v] {
            Some(i) => g.neighbors(v).iter().filter(|&&u| subspace_index[u] == Some(i)).count(),
            None => 0,
        })
        .collect();
    Ok((
        WeakReductionOutcome {
            partition,
            subspace_index,
            new_lists,
            new_degree,
            phase: out.iter().map(|o| o.1).collect(),
            schedule,
            neighborhood,
        },
        metrics,
    ))
}

/// Partial list coloring: every node with `|L_v| > (3θ)^(r-1)·deg(v)` is
/// colored. `base` must be a proper coloring of `g`.
pub fn bni_recursive_list_color(
    exec: &Executor,
    g: &Graph,
    theta: usize,
    lists: &ListAssignment,
    r: u32,
    base: &ProperColoring,
) -> Result<(PartialColoring, RunMetrics)> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be >= 1".into()));
    }
    let n = g.n();
    let c = lists.space().size();
    if r <= 2 {
        // A guaranteed node has deg(v) < |L_v| ≤ C.
        return low_degree_list_color(exec, g, c.min(g.max_degree()), lists, base);
    }
    let eta = (c as f64).powf(1.0 / r as f64);
    let low_limit = 2.0 * theta as f64 * eta;
    let (weak, mut metrics) = weak_reduction_with_base(exec, g, theta, lists, eta.max(1.0), base)?;
    let high: Vec<bool> = (0..n).map(|v| g.degree(v) as f64 > low_limit).collect();
    let mut coloring: PartialColoring = vec![None; n];
    let mut parallel = RunMetrics::default();
    for i in 0..weak.partition.parts {
        let nodes: Vec<usize> = (0..n).filter(|&v| high[v] && weak.subspace_index[v] == Some(i)).collect();
        if nodes.is_empty() {
            continue;
        }
        let (sub, map) = g.induced_subgraph(&nodes);
        let sub_lists = ListAssignment::new(weak.partition.part(i), map.restrict(&weak.new_lists))?;
        let (sub_color, m) = bni_recursive_list_color(exec, &sub, theta, &sub_lists, r - 1, &base.restrict(&map))?;
        parallel.alongside(m);
        for (j, &v) in map.to_orig.iter().enumerate() {
            coloring[v] = sub_color[j];
        }
    }
    metrics.then(parallel);
    let mut residual = lists.lists().to_vec();
    metrics.then(announce_colors(exec, g, &coloring, &mut residual)?);
    let low: Vec<usize> = (0..n).filter(|&v| !high[v]).collect();
    let (sub, map) = g.induced_subgraph(&low);
    let sub_lists = ListAssignment::new(lists.space(), map.restrict(&residual))?;
    let (sub_color, m) = low_degree_list_color(exec, &sub, low_limit.ceil() as usize, &sub_lists, &base.restrict(&map))?;
    metrics.then(m);
    for (j, &v) in map.to_orig.iter().enumerate() {
        coloring[v] = sub_color[j];
    }
    Ok((coloring, metrics))
}

/// `r = max(1, ⌈√(log₂θ · log₂Δ)⌉)` with slack `(3θ)^(r-1)`.
pub fn bni_params(theta: usize, delta: usize) -> FrameworkParams<f64> {
    let r = sqrt_rounds((theta as f64).log2() * (delta as f64).log2());
    let inner = Inner::Bni { theta, r };
    FrameworkParams {
        slack: inner.required_slack(),
        inner,
    }
}

fn bni_total(exec: &Executor, g: &Graph, theta: usize, lists: &ListAssignment) -> Result<(DegPlusOneOutcome, RunMetrics)> {
    if theta == 0 {
        return Err(Error::InvalidParameter("theta must be >= 1".into()));
    }
    let (base, mut metrics) = linial_coloring(exec, g)?;
    let (out, m) = deg_plus_one_with(exec, g, lists, &base, |d| Ok(bni_params(theta, d)))?;
    metrics.then(m);
    Ok((out, metrics))
}

/// Total list coloring for lists of size at least `deg(v) + 1` from a space
/// of at most `(Δ+1)³` colors on graphs of neighborhood independence `θ`.
pub fn bni_deg_plus_one(
    exec: &Executor,
    g: &Graph,
    theta: usize,
    lists: &ListAssignment,
) -> Result<(DegPlusOneOutcome, RunMetrics)> {
    let limit = (g.max_degree() as u128 + 1).pow(3);
    if lists.space().size() as u128 > limit {
        return Err(Error::Precondition(format!(
            "color space of {} exceeds (Δ+1)³ = {limit}",
            lists.space().size()
        )));
    }
    bni_total(exec, g, theta, lists)
}

/// Colors the edges of `g` from per-edge lists (indexed like `g.edges()`) of
/// size at least `deg(u) + deg(v) - 1`; runs on the line graph with `θ = 2`.
pub fn edge_list_color(exec: &Executor, g: &Graph, edge_lists: &ListAssignment) -> Result<(Vec<Color>, RunMetrics)> {
    if edge_lists.len() != g.edge_count() {
        return Err(Error::Precondition(format!(
            "{} edge lists for {} edges",
            edge_lists.len(),
            g.edge_count()
        )));
    }
    let lg = line_graph(g);
    for (e, &(u, v)) in lg.edge_of_node.iter().enumerate() {
        if edge_lists.list(e).len() + 1 < lg.node_degree_sum[e] {
            return Err(Error::Precondition(format!(
                "edge ({u}, {v}) has {} colors, needs {}",
                edge_lists.list(e).len(),
                lg.node_degree_sum[e] - 1
            )));
        }
    }
    let (out, metrics) = bni_total(exec, &lg.line_graph, 2, edge_lists)?;
    let colors = out
        .coloring
        .into_iter()
        .enumerate()
        .map(|(e, c)| c.ok_or_else(|| Error::Internal(format!("edge {e} left uncolored"))))
        .collect::<Result<Vec<Color>>>()?;
    Ok((colors, metrics))
}
