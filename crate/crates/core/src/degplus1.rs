//! (deg+1)-list coloring by repeated degree halving, and list coloring of
//! graphs with bounded arboricity.

use serde::{Deserialize, Serialize};

use crate::coloring::{Color, ListAssignment, PartialColoring, ProperColoring};
use crate::engine::{Executor, RunMetrics};
use crate::error::{Error, Result};
use crate::graph::{orient_by_degeneracy, Graph};
use crate::hpartition::{h_partition_fixed_bound, HPartition};
use crate::listreduce::recursive_list_color_with_base;
use crate::primitives::{announce_colors, defective_with_buckets, linial_coloring, linial_refresh, low_degree_list_color};
use crate::scalar::Scalar;

/// Partial list colorer run inside each defective class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Inner<T> {
    /// Colors every node with `|L_v| > deg(v)`.
    LowDegree,
    /// Colors every node with `|L_v| > (2+ε)^r·deg(v)`.
    Recursive { epsilon: T, r: u32 },
    /// Colors every node with `|L_v| > (3θ)^(r-1)·deg(v)`.
    Bni { theta: usize, r: u32 },
}

impl<T: Scalar> Inner<T> {
    /// Smallest integer slack whose guarantee this colorer meets.
    pub fn required_slack(&self) -> usize {
        match *self {
            Inner::LowDegree => 1,
            Inner::Recursive { epsilon, r } => (T::two() + epsilon).powi(r).ceil_count(),
            Inner::Bni { theta, r } => (3 * theta).pow(r.saturating_sub(1)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameworkParams<T> {
    /// Nodes with `|L_v| > slack·deg(v)` in their class must get colored.
    pub slack: usize,
    pub inner: Inner<T>,
}

impl<T: Scalar> FrameworkParams<T> {
    pub fn new(slack: usize, inner: Inner<T>) -> Result<Self> {
        if slack == 0 || slack < inner.required_slack() {
            return Err(Error::InvalidParameter(format!(
                "slack {slack} below the {} the inner colorer needs",
                inner.required_slack()
            )));
        }
        Ok(FrameworkParams { slack, inner })
    }

    /// `ε = 1`, `r = max(1, ⌈√log₂ Δ⌉)`, slack `3^r`.
    pub fn for_degree(delta: usize) -> Self {
        let r = sqrt_rounds((delta as f64).log2());
        let inner = Inner::Recursive { epsilon: T::one(), r };
        FrameworkParams {
            slack: inner.required_slack(),
            inner,
        }
    }
}

/// `max(1, ⌈√x⌉)`.
pub(crate) fn sqrt_rounds(x: f64) -> u32 {
    if x.is_nan() || x <= 1.0 {
        return 1;
    }
    x.sqrt().ceil() as u32
}

#[derive(Clone, Debug, PartialEq)]
pub struct HalfStep {
    pub coloring: PartialColoring,
    /// Lists with the colors of colored neighbors removed.
    pub residual_lists: Vec<Vec<Color>>,
    /// Maximum degree among uncolored nodes after the step.
    pub bot_max_degree: usize,
}

fn run_inner<T: Scalar>(
    exec: &Executor,
    g: &Graph,
    lists: &ListAssignment,
    base: &ProperColoring,
    inner: Inner<T>,
) -> Result<(PartialColoring, RunMetrics)> {
    match inner {
        Inner::LowDegree => low_degree_list_color(exec, g, g.max_degree(), lists, base),
        Inner::Recursive { epsilon, r } => {
            let (o, _) = orient_by_degeneracy(g);
            let (fresh, mut metrics) = linial_refresh(exec, g, base, g.max_degree())?;
            let (c, m) = recursive_list_color_with_base(exec, g, &o, lists, epsilon, r, &fresh)?;
            metrics.then(m);
            Ok((c, metrics))
        }
        Inner::Bni { theta, r } => crate::bni::bni_recursive_list_color(exec, g, theta, lists, r, base),
    }
}

/// One degree-halving step: afterwards every uncolored node has at most
/// `⌊Δ/2⌋` uncolored neighbors.
///
/// Nodes are split into `2S` buckets with at most `deg(v)/(2S)` same-bucket
/// neighbors; the buckets run the inner colorer one after another on residual
/// lists.
pub fn half_degree_step<T: Scalar>(
    exec: &Executor,
    g: &Graph,
    lists: &ListAssignment,
    params: &FrameworkParams<T>,
    base: &ProperColoring,
) -> Result<(HalfStep, RunMetrics)> {
    let n = g.n();
    check_deg_plus_one(g, lists)?;
    let delta = g.max_degree();
    let k = 2 * params.slack;
    let (fresh, mut metrics) = linial_refresh(exec, g, base, delta)?;
    let (bucket, m) = defective_with_buckets(exec, g, k, &fresh)?;
    metrics.then(m);
    let space = lists.space();
    let mut cur = lists.lists().to_vec();
    let mut coloring: PartialColoring = vec![None; n];
    for x in 0..k {
        let nodes: Vec<usize> = (0..n).filter(|&v| bucket[v] == x).collect();
        if nodes.is_empty() {
            continue;
        }
        let (sub, map) = g.induced_subgraph(&nodes);
        let sub_lists = ListAssignment::new(space, map.restrict(&cur))?;
        let (sub_color, m) = run_inner(exec, &sub, &sub_lists, &fresh.restrict(&map), params.inner)?;
        metrics.then(m);
        let mut newly = vec![None; n];
        for (i, &v) in map.to_orig.iter().enumerate() {
            match sub_color[i] {
                Some(c) => newly[v] = Some(c),
                None if sub_lists.list(i).len() > params.slack * sub.degree(i) => {
                    return Err(Error::Internal(format!(
                        "node {v} has {} residual colors and {} same-class neighbors but stayed uncolored",
                        sub_lists.list(i).len(),
                        sub.degree(i)
                    )));
                }
                None => {}
            }
        }
        metrics.then(announce_colors(exec, g, &newly, &mut cur)?);
        for v in 0..n {
            if newly[v].is_some() {
                coloring[v] = newly[v];
            }
        }
    }
    let bot_max_degree = (0..n)
        .filter(|&v| coloring[v].is_none())
        .map(|v| g.neighbors(v).iter().filter(|&&u| coloring[u].is_none()).count())
        .max()
        .unwrap_or(0);
    Ok((
        HalfStep {
            coloring,
            residual_lists: cur,
            bot_max_degree,
        },
        metrics,
    ))
}

fn check_deg_plus_one(g: &Graph, lists: &ListAssignment) -> Result<()> {
    if lists.len() != g.n() {
        return Err(Error::Precondition(format!("{} lists for {} nodes", lists.len(), g.n())));
    }
    if let Some(v) = (0..g.n()).find(|&v| lists.list(v).len() <= g.degree(v)) {
        return Err(Error::Precondition(format!(
            "node {v} has degree {} but only {} colors",
            g.degree(v),
            lists.list(v).len()
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Iteration {
    /// Maximum degree of the residual graph entering the step.
    pub delta: usize,
    pub bot_max_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegPlusOneOutcome {
    pub coloring: PartialColoring,
    pub iterations: Vec<Iteration>,
}

/// Colors every node, halving the uncolored degree per iteration. `params`
/// picks the framework instance from the residual maximum degree.
pub fn deg_plus_one_with<T: Scalar>(
    exec: &Executor,
    g: &Graph,
    lists: &ListAssignment,
    base: &ProperColoring,
    params: impl Fn(usize) -> Result<FrameworkParams<T>>,
) -> Result<(DegPlusOneOutcome, RunMetrics)> {
    check_deg_plus_one(g, lists)?;
    let n = g.n();
    let space = lists.space();
    let mut coloring: PartialColoring = vec![None; n];
    let mut cur = lists.lists().to_vec();
    let mut iterations = Vec::new();
    let mut metrics = RunMetrics::default();
    loop {
        let nodes: Vec<usize> = (0..n).filter(|&v| coloring[v].is_none()).collect();
        if nodes.is_empty() {
            break;
        }
        let (sub, map) = g.induced_subgraph(&nodes);
        let delta = sub.max_degree();
        let p = params(delta)?;
        let sub_lists = ListAssignment::new(space, map.restrict(&cur))?;
        let (step, m) = half_degree_step(exec, &sub, &sub_lists, &p, &base.restrict(&map))?;
        metrics.then(m);
        iterations.push(Iteration {
            delta,
            bot_max_degree: step.bot_max_degree,
        });
        let mut progressed = false;
        for (i, &v) in map.to_orig.iter().enumerate() {
            coloring[v] = step.coloring[i];
            progressed |= step.coloring[i].is_some();
            cur[v] = step.residual_lists[i].clone();
        }
        if !progressed {
            return Err(Error::Internal(format!(
                "degree-halving step colored none of {} nodes",
                nodes.len()
            )));
        }
    }
    Ok((DegPlusOneOutcome { coloring, iterations }, metrics))
}

/// Total list coloring for lists of size at least `deg(v) + 1` from a space
/// of at most `(Δ+1)³` colors.
pub fn deg_plus_one_list_color(
    exec: &Executor,
    g: &Graph,
    lists: &ListAssignment,
) -> Result<(DegPlusOneOutcome, RunMetrics)> {
    let limit = (g.max_degree() as u128 + 1).pow(3);
    if lists.space().size() as u128 > limit {
        return Err(Error::Precondition(format!(
            "color space of {} exceeds (Δ+1)³ = {limit}",
            lists.space().size()
        )));
    }
    let (base, mut metrics) = linial_coloring(exec, g)?;
    let (out, m) = deg_plus_one_with(exec, g, lists, &base, |d| Ok(FrameworkParams::<f64>::for_degree(d)))?;
    metrics.then(m);
    Ok((out, metrics))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArboricityOutcome<T> {
    pub coloring: PartialColoring,
    pub partition: HPartition<T>,
}

/// Total list coloring of a graph with arboricity at most `a` from lists of
/// size at least `⌊(2+ε)a⌋ + 1`: levels of an H-partition are colored from
/// the top down, each as a (deg+1)-instance on residual lists.
pub fn arboricity_list_color<T: Scalar>(
    exec: &Executor,
    g: &Graph,
    a: usize,
    epsilon: T,
    lists: &ListAssignment,
) -> Result<(ArboricityOutcome<T>, RunMetrics)> {
    let need = ((T::two() + epsilon) * T::from_count(a)).floor_count() + 1;
    if lists.len() != g.n() {
        return Err(Error::Precondition(format!("{} lists for {} nodes", lists.len(), g.n())));
    }
    if let Some(v) = (0..g.n()).find(|&v| lists.list(v).len() < need) {
        return Err(Error::Precondition(format!(
            "node {v} has {} colors, needs {need}",
            lists.list(v).len()
        )));
    }
    let (partition, mut metrics) = h_partition_fixed_bound(exec, g, a, epsilon)?;
    let (base, m) = linial_coloring(exec, g)?;
    metrics.then(m);
    let n = g.n();
    let space = lists.space();
    let mut cur = lists.lists().to_vec();
    let mut coloring: PartialColoring = vec![None; n];
    for i in (1..=partition.h).rev() {
        let nodes = partition.level_nodes(i);
        let (sub, map) = g.induced_subgraph(&nodes);
        let sub_lists = ListAssignment::new(space, map.restrict(&cur))?;
        let (out, m) = deg_plus_one_with(exec, &sub, &sub_lists, &base.restrict(&map), |d| {
            Ok(FrameworkParams::<T>::for_degree(d))
        })?;
        metrics.then(m);
        let mut newly = vec![None; n];
        for (j, &v) in map.to_orig.iter().enumerate() {
            newly[v] = out.coloring[j];
            coloring[v] = out.coloring[j];
        }
        metrics.then(announce_colors(exec, g, &newly, &mut cur)?);
    }
    Ok((ArboricityOutcome { coloring, partition }, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::ColorSpace;
    use crate::graph::{generate, GraphKind};

    fn proper_and_listed(g: &Graph, lists: &ListAssignment, c: &PartialColoring) -> bool {
        g.edges().iter().all(|&(u, v)| c[u].is_none() || c[u] != c[v])
            && (0..g.n()).all(|v| c[v].is_none_or(|x| lists.contains(v, x)))
    }

    #[test]
    fn slack_must_cover_inner() {
        assert!(FrameworkParams::new(8, Inner::Recursive { epsilon: 1.0, r: 2 }).is_err());
        assert!(FrameworkParams::new(9, Inner::Recursive { epsilon: 1.0, r: 2 }).is_ok());
        assert_eq!(Inner::<f64>::Bni { theta: 2, r: 3 }.required_slack(), 36);
        assert_eq!(FrameworkParams::<f64>::for_degree(20).slack, 27);
        assert_eq!(FrameworkParams::<f64>::for_degree(2).slack, 3);
    }

    #[test]
    fn isolated_nodes_all_colored() {
        let g = Graph::empty(5);
        let lists = ListAssignment::new(ColorSpace::first(3), vec![vec![2]; 5]).unwrap();
        let p = FrameworkParams::<f64>::new(1, Inner::LowDegree).unwrap();
        let (s, _) = half_degree_step(&Executor::local(), &g, &lists, &p, &ProperColoring::from_ids(5)).unwrap();
        assert_eq!(s.coloring, vec![Some(2); 5]);
    }

    #[test]
    fn k4_low_degree_inner() {
        let g = generate(GraphKind::Complete, 4).unwrap();
        let lists = ListAssignment::full(4, ColorSpace::new(1, 5).unwrap());
        let p = FrameworkParams::<f64>::new(1, Inner::LowDegree).unwrap();
        let (s, _) = half_degree_step(&Executor::local(), &g, &lists, &p, &ProperColoring::from_ids(4)).unwrap();
        assert!(proper_and_listed(&g, &lists, &s.coloring));
        assert!(s.bot_max_degree <= 1);
    }

    #[test]
    fn gnp_recursive_inner_halves_degree() {
        let exec = Executor::local();
        let g = generate(GraphKind::Gnp { p: 0.05, seed: 4 }, 150).unwrap();
        let delta = g.max_degree();
        let lists = ListAssignment::new(
            ColorSpace::first(delta + 1),
            (0..150).map(|v| (0..=g.degree(v) as Color).collect()).collect(),
        )
        .unwrap();
        let (base, _) = linial_coloring(&exec, &g).unwrap();
        let p = FrameworkParams::<f64>::for_degree(delta);
        let (s, _) = half_degree_step(&exec, &g, &lists, &p, &base).unwrap();
        assert!(proper_and_listed(&g, &lists, &s.coloring));
        assert!(s.bot_max_degree <= delta / 2);
    }

    #[test]
    fn clique_gets_a_permutation() {
        let g = generate(GraphKind::Complete, 4).unwrap();
        let lists = ListAssignment::full(4, ColorSpace::new(1, 5).unwrap());
        let (out, _) = deg_plus_one_list_color(&Executor::local(), &g, &lists).unwrap();
        let mut c: Vec<Color> = out.coloring.iter().map(|x| x.unwrap()).collect();
        c.sort_unstable();
        assert_eq!(c, vec![1, 2, 3, 4]);
    }

    #[test]
    fn ring5_lists_of_three() {
        let g = generate(GraphKind::Ring, 5).unwrap();
        let lists = ListAssignment::new(
            ColorSpace::new(1, 10).unwrap(),
            vec![vec![1, 2, 3], vec![2, 3, 4], vec![1, 5, 9], vec![3, 4, 9], vec![1, 2, 9]],
        )
        .unwrap();
        let (out, _) = deg_plus_one_list_color(&Executor::local(), &g, &lists).unwrap();
        assert!(out.coloring.iter().all(Option::is_some));
        assert!(proper_and_listed(&g, &lists, &out.coloring));
    }

    #[test]
    fn precondition_failures() {
        let g = generate(GraphKind::Path, 3).unwrap();
        let lists = ListAssignment::new(ColorSpace::first(8), vec![vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap();
        assert!(matches!(
            deg_plus_one_list_color(&Executor::local(), &g, &lists),
            Err(Error::Precondition(_))
        ));
        let lists = ListAssignment::full(3, ColorSpace::first(28));
        assert!(matches!(
            deg_plus_one_list_color(&Executor::local(), &g, &lists),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn arboricity_cases() {
        let exec = Executor::local();
        let tree = generate(GraphKind::Tree { seed: 3 }, 40).unwrap();
        let lists = ListAssignment::new(ColorSpace::first(10), (0..40).map(|v| vec![v % 3, 3 + v % 5, 8, 9]).collect()).unwrap();
        let (out, _) = arboricity_list_color(&exec, &tree, 1, 1.0, &lists).unwrap();
        assert!(out.coloring.iter().all(Option::is_some));
        assert!(proper_and_listed(&tree, &lists, &out.coloring));

        let k6 = generate(GraphKind::Complete, 6).unwrap();
        let lists = ListAssignment::full(6, ColorSpace::new(1, 11).unwrap());
        let (out, _) = arboricity_list_color(&exec, &k6, 3, 1.0, &lists).unwrap();
        assert!(out.coloring.iter().all(Option::is_some));
        assert!(proper_and_listed(&k6, &lists, &out.coloring));

        let short = ListAssignment::full(6, ColorSpace::first(9));
        assert!(matches!(
            arboricity_list_color(&exec, &k6, 3, 1.0, &short),
            Err(Error::Precondition(_))
        ));
    }
}
