//! Baseline subroutines: Linial color reduction, relative defective coloring
//! and greedy list coloring of low-degree nodes.

use crate::coloring::{Color, DefectiveColoring, ListAssignment, PartialColoring, ProperColoring};
use crate::engine::{Executor, Inbox, NodeCtx, NodeProgram, RunMetrics, Step};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{ceil_root, Scalar};

/// Every Linial palette satisfies `palette ≤ LINIAL_K · max(Δ, 2)²`.
pub const LINIAL_K: u64 = 8;

pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= x {
        if x.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn next_prime(x: u64) -> u64 {
    (x.max(2)..).find(|&q| is_prime(q)).unwrap()
}

/// One color reduction step: polynomials of degree `d` over `GF(q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinialStep {
    pub q: u64,
    pub d: u32,
}

/// Steps taking an `m`-coloring of a graph with maximum degree `delta` down
/// to the fixpoint palette, and that palette.
///
/// A step needs a prime `q ≥ dΔ + 1` with `q^(d+1) ≥ m`; it is applied while
/// the best `d` gives `q² < m`.
pub fn linial_schedule(m: u64, delta: usize) -> (Vec<LinialStep>, u64) {
    if delta == 0 {
        return (Vec::new(), 1);
    }
    let mut steps = Vec::new();
    let mut m = m.max(1);
    loop {
        let best = (1..=64u32)
            .map(|d| {
                let need = (d as u64 * delta as u64 + 1).max(ceil_root(m, d + 1));
                LinialStep { q: next_prime(need), d }
            })
            .min_by_key(|s| s.q)
            .unwrap();
        if best.q * best.q >= m {
            return (steps, m);
        }
        m = best.q * best.q;
        steps.push(best);
    }
}

fn poly_eval(color: u64, step: LinialStep, x: u64) -> u64 {
    // Base-q digits of the color are the coefficients, lowest degree first.
    let mut c = color;
    let mut acc = 0;
    let mut pow = 1;
    for _ in 0..=step.d {
        acc = (acc + (c % step.q) * pow) % step.q;
        c /= step.q;
        pow = pow * x % step.q;
    }
    acc
}

/// Applies one step: the smallest `x` on which no neighbor's polynomial agrees.
pub fn linial_recolor(own: u64, neighbors: &[u64], step: LinialStep) -> u64 {
    let x = (0..step.q)
        .find(|&x| {
            let y = poly_eval(own, step, x);
            neighbors.iter().all(|&c| poly_eval(c, step, x) != y)
        })
        .expect("q > dΔ leaves an evaluation point free");
    x * step.q + poly_eval(own, step, x)
}

struct Linial {
    steps: Vec<LinialStep>,
    collapse: bool,
}

impl NodeProgram for Linial {
    type Input = u64;
    type State = u64;
    type Msg = u64;
    type Output = u64;

    fn init(&self, _: &NodeCtx<'_>, input: &u64) -> u64 {
        *input
    }

    fn step(&self, _: &NodeCtx<'_>, color: &mut u64, round: usize, inbox: &Inbox<'_, u64>) -> Step<u64, u64> {
        if self.collapse {
            return Step::finish(0);
        }
        if round > 1 {
            let nbrs: Vec<u64> = inbox.iter().map(|(_, &c)| c).collect();
            *color = linial_recolor(*color, &nbrs, self.steps[round - 2]);
        }
        if round > self.steps.len() {
            Step::finish(*color)
        } else {
            Step::broadcast(*color)
        }
    }
}

/// Reduces a proper coloring to `O(Δ²)` colors; `delta` bounds every degree.
pub fn linial_refresh(
    exec: &Executor,
    g: &Graph,
    base: &ProperColoring,
    delta: usize,
) -> Result<(ProperColoring, RunMetrics)> {
    debug_assert!(g.max_degree() <= delta);
    let (steps, palette) = linial_schedule(base.palette_size, delta);
    let program = Linial {
        steps,
        collapse: delta == 0,
    };
    let (color, metrics) = exec.run("linial", &program, g, &base.color)?;
    Ok((
        ProperColoring {
            color,
            palette_size: palette,
        },
        metrics,
    ))
}

/// `O(Δ²)`-coloring from the node ids.
pub fn linial_coloring(exec: &Executor, g: &Graph) -> Result<(ProperColoring, RunMetrics)> {
    linial_refresh(exec, g, &ProperColoring::from_ids(g.n()), g.max_degree())
}

fn lowest_min(counts: &[usize]) -> usize {
    let mut best = 0;
    for (b, &c) in counts.iter().enumerate() {
        if c < counts[best] {
            best = b;
        }
    }
    best
}

/// Base color classes pick buckets in turn, each node the bucket least used by
/// already assigned neighbors.
struct GreedyBuckets;

impl NodeProgram for GreedyBuckets {
    /// `(base color, bucket count)`.
    type Input = (u64, usize);
    type State = (u64, Vec<usize>);
    type Msg = usize;
    type Output = usize;

    fn init(&self, _: &NodeCtx<'_>, &(base, k): &(u64, usize)) -> Self::State {
        (base, vec![0; k])
    }

    fn step(&self, _: &NodeCtx<'_>, (base, counts): &mut Self::State, round: usize, inbox: &Inbox<'_, usize>) -> Step<usize, usize> {
        for (_, &b) in inbox.iter() {
            counts[b] += 1;
        }
        if round as u64 == *base + 1 {
            let b = lowest_min(counts);
            Step::broadcast(b).with_output(b)
        } else {
            Step::silent()
        }
    }
}

/// One local-search pass: base classes in turn, a node whose bucket holds
/// more than `deg/k` of its neighbors moves to its least used bucket.
struct RepairSweep;

struct SweepState {
    base: u64,
    bucket: usize,
    k: usize,
    nbr: Vec<usize>,
}

impl NodeProgram for RepairSweep {
    /// `(base color, bucket, bucket count)`.
    type Input = (u64, usize, usize);
    type State = SweepState;
    type Msg = usize;
    type Output = (usize, bool);

    fn init(&self, ctx: &NodeCtx<'_>, &(base, bucket, k): &(u64, usize, usize)) -> SweepState {
        SweepState {
            base,
            bucket,
            k,
            nbr: vec![0; ctx.degree()],
        }
    }

    fn step(&self, ctx: &NodeCtx<'_>, s: &mut SweepState, round: usize, inbox: &Inbox<'_, usize>) -> Step<usize, (usize, bool)> {
        if round == 1 {
            return Step::broadcast(s.bucket);
        }
        for (slot, &b) in inbox.iter() {
            s.nbr[slot] = b;
        }
        if round as u64 != s.base + 2 {
            return Step::silent();
        }
        let mut counts = vec![0; s.k];
        for &b in &s.nbr {
            counts[b] += 1;
        }
        if counts[s.bucket] * s.k > ctx.degree() {
            s.bucket = lowest_min(&counts);
            Step::broadcast(s.bucket).with_output((s.bucket, true))
        } else {
            Step::finish((s.bucket, false))
        }
    }
}

/// Buckets in `[0, k)` with at most `deg(v)/k` same-bucket neighbors per node.
pub fn defective_with_buckets(
    exec: &Executor,
    g: &Graph,
    k: usize,
    base: &ProperColoring,
) -> Result<(Vec<usize>, RunMetrics)> {
    defective_per_node(exec, g, &vec![k; g.n()], base)
}

/// Like [`defective_with_buckets`] with a bucket count per node; adjacent
/// nodes must agree on it.
pub fn defective_per_node(
    exec: &Executor,
    g: &Graph,
    ks: &[usize],
    base: &ProperColoring,
) -> Result<(Vec<usize>, RunMetrics)> {
    if ks.contains(&0) {
        return Err(Error::InvalidParameter("bucket count must be positive".into()));
    }
    let inputs: Vec<(u64, usize)> = base.color.iter().copied().zip(ks.iter().copied()).collect();
    let (mut bucket, mut metrics) = exec.run("defective", &GreedyBuckets, g, &inputs)?;
    // Each move strictly lowers the number of monochromatic edges, so the
    // sweeps stop after at most m moves.
    loop {
        let inputs: Vec<(u64, usize, usize)> = (0..g.n()).map(|v| (base.color[v], bucket[v], ks[v])).collect();
        let (out, m) = exec.run("defective", &RepairSweep, g, &inputs)?;
        metrics.then(m);
        let moved = out.iter().any(|&(_, moved)| moved);
        bucket = out.into_iter().map(|(b, _)| b).collect();
        if !moved {
            return Ok((bucket, metrics));
        }
    }
}

/// λ-relative defective coloring with `⌈1/λ⌉` buckets.
pub fn relative_defective_coloring<T: Scalar>(
    exec: &Executor,
    g: &Graph,
    lambda: T,
    base: &ProperColoring,
) -> Result<(DefectiveColoring<T>, RunMetrics)> {
    if !(lambda > T::zero() && lambda <= T::one()) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} outside (0, 1]")));
    }
    let q = (T::one() / lambda).ceil_count();
    let (bucket, metrics) = defective_with_buckets(exec, g, q, base)?;
    Ok((DefectiveColoring { bucket, q, lambda }, metrics))
}

/// Halving color reduction to `t` colors: in blocks of `2t` colors, the upper
/// half recolors into the lower half one offset per round.
struct BlockReduce {
    t: u64,
    halvings: usize,
}

struct BlockState {
    color: u64,
    nbr: Vec<u64>,
}

impl BlockReduce {
    fn new(m: u64, t: u64) -> Self {
        let mut halvings = 0;
        let mut m = m;
        while m > t {
            m = m.div_ceil(2 * t) * t;
            halvings += 1;
        }
        BlockReduce { t, halvings }
    }

    fn squeeze(&self, c: u64) -> u64 {
        c / (2 * self.t) * self.t + c % (2 * self.t)
    }
}

impl NodeProgram for BlockReduce {
    type Input = u64;
    type State = BlockState;
    type Msg = u64;
    type Output = u64;

    fn init(&self, ctx: &NodeCtx<'_>, &color: &u64) -> BlockState {
        BlockState {
            color,
            nbr: vec![0; ctx.degree()],
        }
    }

    fn step(&self, _: &NodeCtx<'_>, s: &mut BlockState, round: usize, inbox: &Inbox<'_, u64>) -> Step<u64, u64> {
        if self.halvings == 0 {
            return Step::finish(s.color);
        }
        if round == 1 {
            return Step::broadcast(s.color);
        }
        let t = self.t as usize;
        let i = round - 2;
        let (halving, offset) = (i / t, self.t + (i % t) as u64);
        for (slot, &c) in inbox.iter() {
            s.nbr[slot] = c;
        }
        if i > 0 && i.is_multiple_of(t) {
            // The previous halving ended: every color now fits the lower halves.
            s.color = self.squeeze(s.color);
            for c in s.nbr.iter_mut() {
                *c = self.squeeze(*c);
            }
        }
        let width = 2 * self.t;
        let mut step = Step::silent();
        if s.color % width == offset {
            let block = s.color / width;
            let taken: Vec<u64> = s
                .nbr
                .iter()
                .filter(|&&c| c / width == block)
                .map(|&c| c % width)
                .collect();
            let free = (0..self.t).find(|o| !taken.contains(o)).expect("t > degree");
            s.color = block * width + free;
            step = Step::broadcast(s.color);
        }
        if halving + 1 == self.halvings && offset + 1 == width {
            step.output = Some(self.squeeze(s.color));
        }
        step
    }
}

/// Reduces a proper coloring of a graph with degrees `≤ d` to `d + 1` colors.
pub fn reduce_to_degree_plus_one(
    exec: &Executor,
    g: &Graph,
    base: &ProperColoring,
    d: usize,
) -> Result<(ProperColoring, RunMetrics)> {
    let t = d as u64 + 1;
    let program = BlockReduce::new(base.palette_size, t);
    let (color, metrics) = exec.run("reduce", &program, g, &base.color)?;
    Ok((
        ProperColoring {
            color,
            palette_size: base.palette_size.min(t),
        },
        metrics,
    ))
}

/// Color classes in turn; each node takes the smallest list color not taken
/// by an earlier neighbor, or ⊥ if none is left.
pub(crate) struct GreedyList;

pub(crate) struct GreedyListState {
    class: u64,
    list: Vec<Color>,
    taken: Vec<Color>,
}

impl NodeProgram for GreedyList {
    type Input = (u64, Vec<Color>);
    type State = GreedyListState;
    type Msg = Color;
    type Output = Option<Color>;

    fn init(&self, _: &NodeCtx<'_>, (class, list): &(u64, Vec<Color>)) -> GreedyListState {
        GreedyListState {
            class: *class,
            list: list.clone(),
            taken: Vec::new(),
        }
    }

    fn step(&self, _: &NodeCtx<'_>, s: &mut GreedyListState, round: usize, inbox: &Inbox<'_, Color>) -> Step<Color, Option<Color>> {
        s.taken.extend(inbox.iter().map(|(_, &c)| c));
        if round as u64 != s.class + 1 {
            return Step::silent();
        }
        match s.list.iter().copied().find(|c| !s.taken.contains(c)) {
            Some(c) => Step::broadcast(c).with_output(Some(c)),
            None => Step::finish(None),
        }
    }
}

/// Greedy list coloring along the classes of a proper coloring.
pub fn greedy_list_by_classes(
    exec: &Executor,
    g: &Graph,
    classes: &ProperColoring,
    lists: &[Vec<Color>],
) -> Result<(PartialColoring, RunMetrics)> {
    let inputs: Vec<(u64, Vec<Color>)> = classes.color.iter().copied().zip(lists.iter().cloned()).collect();
    Ok(exec.run("greedy", &GreedyList, g, &inputs)?)
}

/// Colors nodes of degree at most `d` from their lists; the others stay ⊥.
///
/// On `G[{v : deg(v) ≤ d}]` the base coloring is refreshed to `O(d²)` colors,
/// reduced to `d + 1` colors, and the classes then pick list colors greedily.
/// Every participating node with `|L_v| > deg(v)` ends up colored.
pub fn low_degree_list_color(
    exec: &Executor,
    g: &Graph,
    d: usize,
    lists: &ListAssignment,
    base: &ProperColoring,
) -> Result<(PartialColoring, RunMetrics)> {
    let nodes: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) <= d).collect();
    let (sub, map) = g.induced_subgraph(&nodes);
    let sub_base = base.restrict(&map);
    let (refreshed, mut metrics) = linial_refresh(exec, &sub, &sub_base, d)?;
    let (classes, m) = reduce_to_degree_plus_one(exec, &sub, &refreshed, d)?;
    metrics.then(m);
    let sub_lists = map.restrict(lists.lists());
    let (colors, m) = greedy_list_by_classes(exec, &sub, &classes, &sub_lists)?;
    metrics.then(m);
    let mut out = vec![None; g.n()];
    for (i, &v) in map.to_orig.iter().enumerate() {
        out[v] = colors[i];
    }
    Ok((out, metrics))
}

/// Newly colored nodes broadcast their color; neighbors drop it from their lists.
struct Announce;

impl NodeProgram for Announce {
    type Input = (Option<Color>, Vec<Color>);
    type State = (Option<Color>, Vec<Color>);
    type Msg = Color;
    type Output = Vec<Color>;

    fn init(&self, _: &NodeCtx<'_>, input: &Self::Input) -> Self::State {
        input.clone()
    }

    fn step(&self, _: &NodeCtx<'_>, (newly, list): &mut Self::State, round: usize, inbox: &Inbox<'_, Color>) -> Step<Color, Vec<Color>> {
        if round == 1 {
            return match newly {
                Some(c) => Step::broadcast(*c).with_output(std::mem::take(list)),
                None => Step::silent(),
            };
        }
        for (_, c) in inbox.iter() {
            if let Ok(i) = list.binary_search(c) {
                list.remove(i);
            }
        }
        Step::finish(std::mem::take(list))
    }
}

/// Removes the colors of `newly` colored nodes from their neighbors' lists.
pub(crate) fn announce_colors(
    exec: &Executor,
    g: &Graph,
    newly: &[Option<Color>],
    lists: &mut [Vec<Color>],
) -> Result<RunMetrics> {
    let inputs: Vec<(Option<Color>, Vec<Color>)> =
        newly.iter().copied().zip(lists.iter().cloned()).collect();
    let (out, metrics) = exec.run("announce", &Announce, g, &inputs)?;
    for (l, o) in lists.iter_mut().zip(out) {
        *l = o;
    }
    Ok(metrics)
}
