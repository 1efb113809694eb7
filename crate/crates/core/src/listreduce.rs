//! Oriented list color space reduction and the recursive partial list coloring
//! built on it.
//!
//! One reduction splits the color space into chunks and sends every node to
//! one chunk while re-orienting the edges, so that the ratio of list size to
//! out-degree drops by at most a factor `2 + ε`. Repeating it `r` times with
//! `η = ⌈C^(1/r)⌉` leaves every node with a single candidate color.

use serde::{Deserialize, Serialize};

use crate::coloring::{Color, ColorSpace, ColorSpacePartition, ListAssignment, PartialColoring, ProperColoring};
use crate::engine::{Executor, Inbox, NodeCtx, NodeProgram, RunMetrics, Step};
use crate::error::{Error, Result};
use crate::graph::{Graph, Orientation};
use crate::hpartition::generalized_h_partition;
use crate::primitives::{defective_per_node, linial_coloring};
use crate::scalar::{ceil_root, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionOutcome {
    pub partition: ColorSpacePartition,
    pub subspace_index: Vec<usize>,
    pub new_orientation: Orientation,
    pub new_lists: ListAssignment,
    /// Out-neighbors under the new orientation whose new list meets ours.
    pub new_beta: Vec<usize>,
    /// Depth of the H-partition used.
    pub depth: usize,
}

/// Result of one reduction over possibly many disjoint instances.
struct ReductionStep {
    partition: Vec<ColorSpacePartition>,
    x: Vec<usize>,
    orientation: Orientation,
    metrics: RunMetrics,
    depth: usize,
}

/// `k = ⌈(2+δ)·p/δ⌉` buckets, i.e. relative defect `δ/((2+δ)p)`.
fn bucket_count<T: Scalar>(delta: T, parts: usize) -> usize {
    ((T::two() + delta) * T::from_count(parts) / delta).ceil_count().max(1)
}

struct Assign<T> {
    gamma: T,
    depth: usize,
}

struct AssignInput {
    level: usize,
    bucket: usize,
    buckets: usize,
    beta: usize,
    counts: Vec<usize>,
}

struct AssignState {
    slot: usize,
    level: usize,
    bucket: usize,
    beta: usize,
    counts: Vec<usize>,
    list_len: usize,
    /// Neighbor slots π' orients away from this node.
    out: Vec<bool>,
    same_bucket: usize,
    b: Vec<usize>,
}

impl<T: Scalar> Assign<T> {
    /// Feasible parts maximizing `ℓ_x`, lowest index first.
    fn choose(&self, s: &AssignState) -> Option<usize> {
        let rhs_unit = self.gamma * T::from_count(s.beta);
        let mut best: Option<usize> = None;
        for x in 0..s.counts.len() {
            let lhs = T::from_count((s.b[x] + s.same_bucket) * s.list_len);
            if lhs <= rhs_unit * T::from_count(s.counts[x]) && best.is_none_or(|y| s.counts[x] > s.counts[y]) {
                best = Some(x);
            }
        }
        best
    }
}

impl<T: Scalar> NodeProgram for Assign<T> {
    type Input = AssignInput;
    type State = AssignState;
    /// Round 1: `(level, bucket)`; afterwards the chosen part in the second slot.
    type Msg = (usize, usize);
    type Output = std::result::Result<usize, String>;

    fn init(&self, ctx: &NodeCtx<'_>, input: &AssignInput) -> AssignState {
        AssignState {
            slot: (self.depth - input.level) * input.buckets + input.bucket,
            level: input.level,
            bucket: input.bucket,
            beta: input.beta,
            list_len: input.counts.iter().sum(),
            b: vec![0; input.counts.len()],
            counts: input.counts.clone(),
            out: vec![false; ctx.degree()],
            same_bucket: 0,
        }
    }

    fn step(&self, ctx: &NodeCtx<'_>, s: &mut AssignState, round: usize, inbox: &Inbox<'_, (usize, usize)>) -> Step<(usize, usize), Self::Output> {
        if round == 1 {
            return Step::broadcast((s.level, s.bucket));
        }
        if round == 2 {
            for (slot, &(level, bucket)) in inbox.iter() {
                s.out[slot] = level > s.level || (level == s.level && bucket < s.bucket);
                if level == s.level && bucket == s.bucket {
                    s.same_bucket += 1;
                }
            }
        } else {
            for (slot, &(_, x)) in inbox.iter() {
                if s.out[slot] {
                    s.b[x] += 1;
                }
            }
        }
        if round != s.slot + 2 {
            return Step::silent();
        }
        match self.choose(s) {
            Some(x) => Step::broadcast((0, x)).with_output(Ok(x)),
            None => Step::finish(Err(format!(
                "node {} (level {}, bucket {}, beta {}, list {}, b {:?}, same-bucket {}) has no feasible part",
                ctx.id, s.level, s.bucket, s.beta, s.list_len, s.b, s.same_bucket
            ))),
        }
    }
}

/// One reduction on `g`, where every connected instance has its own color
/// space in `spaces` (adjacent nodes share their space).
fn reduce_step<T: Scalar>(
    exec: &Executor,
    g: &Graph,
    o: &Orientation,
    lists: &[Vec<Color>],
    spaces: &[ColorSpace],
    eta: usize,
    epsilon: T,
    base: &ProperColoring,
) -> Result<ReductionStep> {
    let n = g.n();
    let delta = epsilon / T::two();
    let partition: Vec<ColorSpacePartition> = spaces
        .iter()
        .map(|&sp| ColorSpacePartition::new(sp, T::from_count(eta.min(sp.size()).max(1))))
        .collect::<Result<_>>()?;

    let (hp, mut metrics) = generalized_h_partition(exec, g, o, delta)?;
    let level_graph = g.filter_edges(|_, u, v| hp.level[u] == hp.level[v]);
    let ks: Vec<usize> = partition.iter().map(|p| bucket_count(delta, p.parts)).collect();
    let (bucket, m) = defective_per_node(exec, &level_graph, &ks, base)?;
    metrics.then(m);

    let inputs: Vec<AssignInput> = (0..n)
        .map(|v| AssignInput {
            level: hp.level[v],
            bucket: bucket[v],
            buckets: ks[v],
            beta: o.out_degree(v),
            counts: partition[v].counts(&lists[v]),
        })
        .collect();
    let program = Assign {
        gamma: T::two() + epsilon,
        depth: hp.h,
    };
    let (chosen, m) = exec.run("assign", &program, g, &inputs)?;
    metrics.then(m);
    let x = chosen
        .into_iter()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(Error::Internal)?;

    // π' on F; the edges it leaves open (same level, same bucket) go from the
    // lower to the higher id.
    let orientation = Orientation::from_fn(g, |u, v| {
        let (lu, lv) = (hp.level[u], hp.level[v]);
        if lu != lv {
            lu < lv
        } else if bucket[u] != bucket[v] {
            bucket[u] > bucket[v]
        } else {
            true
        }
    });
    Ok(ReductionStep {
        partition,
        x,
        orientation,
        metrics,
        depth: hp.h,
    })
}

fn restrict_list(list: &[Color], part: ColorSpace) -> Vec<Color> {
    list.iter().copied().filter(|&c| part.contains(c)).collect()
}

fn intersects(a: &[Color], b: &[Color]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => return true,
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    false
}

/// Out-neighbors whose list meets the node's list.
pub fn intersecting_out_degree(g: &Graph, o: &Orientation, lists: &[Vec<Color>]) -> Vec<usize> {
    (0..g.n())
        .map(|v| o.out_neighbors(g, v).filter(|&u| intersects(&lists[u], &lists[v])).count())
        .collect()
}

/// Oriented `(η, 2+ε)`-list color space reduction.
pub fn oriented_reduction<T: Scalar>(
    exec: &Executor,
    g: &Graph,
    o: &Orientation,
    lists: &ListAssignment,
    eta: usize,
    epsilon: T,
) -> Result<(ReductionOutcome, RunMetrics)> {
    let (base, mut metrics) = linial_coloring(exec, g)?;
    let (out, m) = oriented_reduction_with_base(exec, g, o, lists, eta, epsilon, &base)?;
    metrics.then(m);
    Ok((out, metrics))
}

/// [`oriented_reduction`] reusing a proper coloring of `g`.
pub fn oriented_reduction_with_base<T: Scalar>(
    exec: &Executor,
    g: &Graph,
    o: &Orientation,
    lists: &ListAssignment,
    eta: usize,
    epsilon: T,
    base: &ProperColoring,
) -> Result<(ReductionOutcome, RunMetrics)> {
    check_params(epsilon)?;
    let space = lists.space();
    if eta < 1 || eta > space.size() {
        return Err(Error::InvalidParameter(format!(
            "eta = {eta} outside [1, {}]",
            space.size()
        )));
    }
    let spaces = vec![space; g.n()];
    let step = reduce_step(exec, g, o, lists.lists(), &spaces, eta, epsilon, base)?;
    let partition = step.partition[0];
    let new_lists: Vec<Vec<Color>> = (0..g.n())
        .map(|v| restrict_list(lists.list(v), partition.part(step.x[v])))
        .collect();
    let new_beta = intersecting_out_degree(g, &step.orientation, &new_lists);
    Ok((
        ReductionOutcome {
            partition,
            subspace_index: step.x,
            new_orientation: step.orientation,
            new_lists: ListAssignment::new(space, new_lists)?,
            new_beta,
            depth: step.depth,
        },
        step.metrics,
    ))
}

fn check_params<T: Scalar>(epsilon: T) -> Result<()> {
    if !(epsilon > T::zero() && epsilon <= T::one()) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} outside (0, 1]")));
    }
    Ok(())
}

/// Keeps a candidate unless an out-neighbor holds the same one.
struct KeepCandidate;

impl NodeProgram for KeepCandidate {
    /// Candidate and, per neighbor slot, whether the edge points away.
    type Input = (Option<Color>, Vec<bool>);
    type State = (Option<Color>, Vec<bool>);
    type Msg = Color;
    type Output = Option<Color>;

    fn init(&self, _: &NodeCtx<'_>, input: &Self::Input) -> Self::State {
        input.clone()
    }

    fn step(&self, _: &NodeCtx<'_>, (cand, out): &mut Self::State, round: usize, inbox: &Inbox<'_, Color>) -> Step<Color, Option<Color>> {
        if round == 1 {
            return match cand {
                Some(c) => Step::broadcast(*c),
                None => Step::finish(None),
            };
        }
        let clash = inbox.iter().any(|(slot, &c)| out[slot] && Some(c) == *cand);
        Step::finish(if clash { None } else { *cand })
    }
}

/// Per-step space sizes: `η = ⌈C^(1/r)⌉`.
pub fn recursion_eta(c: usize, r: u32) -> usize {
    ceil_root(c as u64, r.max(1)) as usize
}

/// Partial list coloring: every node with `|L_v| > (2+ε)^r·β(v)` is colored.
pub fn recursive_list_color<T: Scalar>(
    exec: &Executor,
    g: &Graph,
    o: &Orientation,
    lists: &ListAssignment,
    epsilon: T,
    r: u32,
) -> Result<(PartialColoring, RunMetrics)> {
    let (base, mut metrics) = linial_coloring(exec, g)?;
    let (out, m) = recursive_list_color_with_base(exec, g, o, lists, epsilon, r, &base)?;
    metrics.then(m);
    Ok((out, metrics))
}

/// [`recursive_list_color`] reusing a proper coloring of `g`.
pub fn recursive_list_color_with_base<T: Scalar>(
    exec: &Executor,
    g: &Graph,
    o: &Orientation,
    lists: &ListAssignment,
    epsilon: T,
    r: u32,
    base: &ProperColoring,
) -> Result<(PartialColoring, RunMetrics)> {
    check_params(epsilon)?;
    if r == 0 {
        return Err(Error::InvalidParameter("r must be >= 1".into()));
    }
    let n = g.n();
    let eta = recursion_eta(lists.space().size(), r);
    let mut graph = g.clone();
    let mut orient = o.clone();
    let mut cur: Vec<Vec<Color>> = lists.lists().to_vec();
    let mut spaces = vec![lists.space(); n];
    let mut metrics = RunMetrics::default();
    for _ in 0..r {
        if spaces.iter().all(|s| s.size() == 1) {
            break;
        }
        let step = reduce_step(exec, &graph, &orient, &cur, &spaces, eta, epsilon, base)?;
        metrics.then(step.metrics);
        for v in 0..n {
            spaces[v] = step.partition[v].part(step.x[v]);
            cur[v] = restrict_list(&cur[v], spaces[v]);
        }
        let x = &step.x;
        let next = graph.filter_edges(|_, u, v| x[u] == x[v]);
        orient = step.orientation.restrict_to(&graph, &next);
        graph = next;
    }
    if let Some(v) = (0..n).find(|&v| spaces[v].size() > 1) {
        return Err(Error::Internal(format!(
            "node {v} still holds a space of {} colors after {r} reductions",
            spaces[v].size()
        )));
    }
    let inputs: Vec<(Option<Color>, Vec<bool>)> = (0..n)
        .map(|v| {
            let out = (0..graph.degree(v)).map(|slot| orient.points_out(&graph, v, slot)).collect();
            (cur[v].first().copied(), out)
        })
        .collect();
    let (colors, m) = exec.run("final", &KeepCandidate, &graph, &inputs)?;
    metrics.then(m);
    Ok((colors, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, orient_by_degeneracy, GraphKind};

    fn definition_holds(lists: &ListAssignment, o: &Orientation, out: &ReductionOutcome, gamma: f64) -> bool {
        (0..lists.len()).all(|v| {
            let lhs = (out.new_beta[v] * lists.list(v).len()) as f64;
            lhs <= gamma * (out.new_lists.list(v).len() * o.out_degree(v)) as f64
        })
    }

    #[test]
    fn single_node() {
        let g = Graph::empty(1);
        let o = Orientation::by_id(&g);
        let lists = ListAssignment::full(1, ColorSpace::first(10));
        let (out, _) = oriented_reduction(&Executor::local(), &g, &o, &lists, 2, 1.0).unwrap();
        assert_eq!(out.subspace_index, vec![0]);
        assert_eq!(out.new_lists.list(0).len(), 5);
        assert_eq!(out.new_beta, vec![0]);
    }

    #[test]
    fn single_edge() {
        let g = generate(GraphKind::Path, 2).unwrap();
        let o = Orientation::by_id(&g);
        let lists = ListAssignment::full(2, ColorSpace::first(4));
        let (out, _) = oriented_reduction(&Executor::local(), &g, &o, &lists, 2, 1.0).unwrap();
        assert!(definition_holds(&lists, &o, &out, 3.0));
    }

    #[test]
    fn k5_full_lists() {
        let g = generate(GraphKind::Complete, 5).unwrap();
        let o = Orientation::by_id(&g);
        let lists = ListAssignment::full(5, ColorSpace::first(25));
        let (out, _) = oriented_reduction(&Executor::local(), &g, &o, &lists, 5, 1.0).unwrap();
        assert_eq!(out.partition.parts, 5);
        assert!((0..5).all(|v| out.new_lists.list(v).len() == 5));
        assert!(definition_holds(&lists, &o, &out, 3.0));
    }

    #[test]
    fn isolated_nodes_all_colored() {
        let g = Graph::empty(4);
        let o = Orientation::by_id(&g);
        let lists = ListAssignment::new(ColorSpace::first(8), vec![vec![1], vec![2, 7], vec![0, 3, 5], vec![6]]).unwrap();
        let (c, _) = recursive_list_color(&Executor::local(), &g, &o, &lists, 1.0, 1).unwrap();
        assert!(c.iter().enumerate().all(|(v, x)| x.is_some_and(|x| lists.contains(v, x))));
    }

    #[test]
    fn path_guarantee_set() {
        let g = generate(GraphKind::Path, 3).unwrap();
        let o = Orientation::by_id(&g);
        let lists = ListAssignment::new(
            ColorSpace::first(27),
            vec![(0..9).collect(), (5..14).collect(), (9..18).collect()],
        )
        .unwrap();
        let (c, _) = recursive_list_color(&Executor::local(), &g, &o, &lists, 1.0, 3).unwrap();
        assert!(c[2].is_some());
        assert!(g.edges().iter().all(|&(u, v)| c[u].is_none() || c[u] != c[v]));
    }

    #[test]
    fn gnp_lists_above_threshold() {
        let g = generate(GraphKind::Gnp { p: 0.05, seed: 2 }, 100).unwrap();
        let (o, _) = orient_by_degeneracy(&g);
        let delta = g.max_degree();
        let c = delta.pow(3).max(27);
        let lists: Vec<Vec<Color>> = (0..100)
            .map(|v| {
                let size = 27 * o.out_degree(v) + 1;
                (0..size as Color).map(|i| (i + 13 * v as Color) % c as Color).collect()
            })
            .collect();
        let lists = ListAssignment::new(ColorSpace::first(c), lists).unwrap();
        let (col, _) = recursive_list_color(&Executor::local(), &g, &o, &lists, 1.0, 3).unwrap();
        assert!(col.iter().enumerate().all(|(v, x)| x.is_some_and(|x| lists.contains(v, x))));
        assert!(g.edges().iter().all(|&(u, v)| col[u] != col[v]));
    }

    #[test]
    fn bucket_counts() {
        assert_eq!(bucket_count(0.5, 2), 10);
        assert_eq!(bucket_count(num_rational::Ratio::new(1i64, 4), 3), 27);
    }
}
