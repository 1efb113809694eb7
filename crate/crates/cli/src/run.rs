//! Running an algorithm on an instance and checking its output.

use anyhow::{bail, Context};
use clap::ValueEnum;
use listcolor::bni::{bni_deg_plus_one, edge_list_color};
use listcolor::degplus1::arboricity_list_color;
use listcolor::degplus1::deg_plus_one_list_color;
use listcolor::graph::{line_graph, orient_by_degeneracy};
use listcolor::hpartition::{generalized_h_partition, HPartition};
use listcolor::listreduce::{oriented_reduction, recursive_list_color, ReductionOutcome};
use listcolor::oracle::{
    degeneracy, exact_list_color, neighborhood_independence, verify_h_partition, verify_list_respecting,
    verify_oriented_reduction, verify_proper, verify_total, Report, Witness, EXACT_CAP, INDEPENDENCE_CAP,
};
use listcolor::primitives::{defective_with_buckets, linial_coloring};
use listcolor::{ColorSpace, Graph, ListAssignment, RunMetrics};
use serde::{Deserialize, Serialize};

use crate::instance::Loaded;
use crate::params::Params;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Total list coloring with `deg(v)+1` lists.
    Degplus1,
    /// Total list coloring with `⌊(2+ε)a⌋+1` lists on arboricity-`a` graphs.
    Arboricity,
    /// Degree+1 list coloring for bounded neighborhood independence.
    Bni,
    /// Edge list coloring through the line graph.
    Edgecolor,
    /// One oriented color space reduction.
    Reduce,
    /// Recursive partial list coloring under the degeneracy orientation.
    Recursive,
    Hpartition,
    Linial,
    Defective,
}

/// Parameter values the run actually used.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Settings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arboricity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub buckets: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub report: Report,
}

impl Check {
    fn new(name: &str, report: Report) -> Self {
        Check {
            name: name.into(),
            passed: report.passed(),
            report,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunOutput {
    pub algorithm: Algorithm,
    pub settings: Settings,
    /// Per node, or per edge for `edgecolor`; `null` is uncolored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coloring: Option<Vec<Option<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<HPartition<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub buckets: Option<Vec<usize>>,
    pub metrics: RunMetrics,
    #[serde(default)]
    pub warnings: Vec<String>,
    #[serde(default)]
    pub checks: Vec<Check>,
    #[serde(default)]
    pub passed: bool,
}

impl RunOutput {
    fn new(algorithm: Algorithm, settings: Settings, metrics: RunMetrics) -> Self {
        RunOutput {
            algorithm,
            settings,
            coloring: None,
            partition: None,
            reduction: None,
            buckets: None,
            metrics,
            warnings: Vec::new(),
            checks: Vec::new(),
            passed: false,
        }
    }
}

fn default_eta(c: usize) -> usize {
    ((c as f64).sqrt().ceil() as usize).clamp(1, c.max(1))
}

fn integer_eta(eta: Option<f64>, c: usize) -> anyhow::Result<usize> {
    match eta {
        None => Ok(default_eta(c)),
        Some(e) if e >= 1.0 && e.fract() == 0.0 => Ok(e as usize),
        Some(e) => bail!("--eta must be a positive integer here, got {e}"),
    }
}

/// Per-edge lists for `edgecolor`: explicit ones if the instance carries one
/// list per edge, `{0, .., 2Δ-2}` otherwise.
fn edge_lists(inst: &Loaded) -> anyhow::Result<ListAssignment> {
    let g = &inst.graph;
    match &inst.lists {
        Some(l) if l.len() == g.edge_count() => inst.assignment(),
        Some(l) => bail!("edgecolor needs one list per edge: {} lists for {} edges", l.len(), g.edge_count()),
        None => {
            let c = (2 * g.max_degree()).saturating_sub(1).max(1);
            Ok(ListAssignment::full(g.edge_count(), ColorSpace::first(c)))
        }
    }
}

pub fn run(alg: Algorithm, inst: &Loaded, params: &Params) -> anyhow::Result<RunOutput> {
    let g = &inst.graph;
    let n = g.n();
    let mut out = match alg {
        Algorithm::Degplus1 => {
            let lists = inst.node_lists()?;
            let exec = params.executor(n, lists.space().size());
            let (res, metrics) = deg_plus_one_list_color(&exec, g, &lists)?;
            let mut out = RunOutput::new(alg, Settings::default(), metrics);
            out.coloring = Some(res.coloring);
            out
        }
        Algorithm::Arboricity => {
            let lists = inst.node_lists()?;
            let a = params.arboricity.unwrap_or_else(|| degeneracy(g)).max(1);
            let epsilon = params.epsilon()?;
            let exec = params.executor(n, lists.space().size());
            let (res, metrics) = arboricity_list_color(&exec, g, a, epsilon, &lists)?;
            let settings = Settings {
                epsilon: Some(epsilon),
                arboricity: Some(a),
                ..Settings::default()
            };
            let mut out = RunOutput::new(alg, settings, metrics);
            out.coloring = Some(res.coloring);
            out.partition = Some(res.partition);
            out
        }
        Algorithm::Bni => {
            let lists = inst.node_lists()?;
            let measured = neighborhood_independence(g, INDEPENDENCE_CAP).ok();
            let theta = match (params.theta, measured) {
                (Some(t), _) => t,
                (None, Some(t)) => t.max(1),
                (None, None) => bail!(
                    "--theta is required when the maximum degree exceeds {INDEPENDENCE_CAP}"
                ),
            };
            let mut warnings = Vec::new();
            if let Some(m) = measured.filter(|&m| m > theta) {
                warnings.push(format!(
                    "declared theta = {theta} is below the measured neighborhood independence {m}; \
                     the guarantees do not apply"
                ));
            }
            let exec = params.executor(n, lists.space().size());
            let (res, metrics) = bni_deg_plus_one(&exec, g, theta, &lists)?;
            let settings = Settings {
                theta: Some(theta),
                ..Settings::default()
            };
            let mut out = RunOutput::new(alg, settings, metrics);
            out.coloring = Some(res.coloring);
            out.warnings = warnings;
            out
        }
        Algorithm::Edgecolor => {
            let lists = edge_lists(inst)?;
            let exec = params.executor(g.edge_count(), lists.space().size());
            let (colors, metrics) = edge_list_color(&exec, g, &lists)?;
            let mut out = RunOutput::new(alg, Settings::default(), metrics);
            out.coloring = Some(colors.into_iter().map(Some).collect());
            out
        }
        Algorithm::Reduce => {
            let lists = inst.node_lists()?;
            let c = lists.space().size();
            let eta = integer_eta(params.eta, c)?;
            let epsilon = params.epsilon()?;
            let (o, _) = orient_by_degeneracy(g);
            let exec = params.executor(n, c);
            let (res, metrics) = oriented_reduction(&exec, g, &o, &lists, eta, epsilon)?;
            let settings = Settings {
                epsilon: Some(epsilon),
                eta: Some(eta),
                ..Settings::default()
            };
            let mut out = RunOutput::new(alg, settings, metrics);
            out.reduction = Some(res);
            out
        }
        Algorithm::Recursive => {
            let lists = inst.node_lists()?;
            let c = lists.space().size();
            let r = params.r.unwrap_or_else(|| ((c as f64).log2().sqrt().ceil() as u32).max(1));
            let epsilon = params.epsilon()?;
            let (o, _) = orient_by_degeneracy(g);
            let exec = params.executor(n, c);
            let (coloring, metrics) = recursive_list_color(&exec, g, &o, &lists, epsilon, r)?;
            let settings = Settings {
                epsilon: Some(epsilon),
                r: Some(r),
                ..Settings::default()
            };
            let mut out = RunOutput::new(alg, settings, metrics);
            out.coloring = Some(coloring);
            out
        }
        Algorithm::Hpartition => {
            let epsilon = params.epsilon()?;
            let (o, _) = orient_by_degeneracy(g);
            let exec = params.executor(n, inst.space_or(n));
            let (res, metrics) = generalized_h_partition(&exec, g, &o, epsilon)?;
            let settings = Settings {
                epsilon: Some(epsilon),
                ..Settings::default()
            };
            let mut out = RunOutput::new(alg, settings, metrics);
            out.partition = Some(res);
            out
        }
        Algorithm::Linial => {
            let exec = params.executor(n, inst.space_or(n));
            let (res, metrics) = linial_coloring(&exec, g)?;
            let mut out = RunOutput::new(alg, Settings::default(), metrics);
            out.coloring = Some(res.color.iter().map(|&c| Some(c as u32)).collect());
            out
        }
        Algorithm::Defective => {
            let k = params.buckets.unwrap_or(2);
            let exec = params.executor(n, inst.space_or(n));
            let (base, mut metrics) = linial_coloring(&exec, g)?;
            let (buckets, m) = defective_with_buckets(&exec, g, k, &base)?;
            metrics.then(m);
            let settings = Settings {
                buckets: Some(k),
                ..Settings::default()
            };
            let mut out = RunOutput::new(alg, settings, metrics);
            out.buckets = Some(buckets);
            out
        }
    };
    out.checks = checks(inst, &out)?;
    out.passed = out.checks.iter().all(|c| c.passed);
    Ok(out)
}

fn coloring_checks(g: &Graph, lists: Option<&ListAssignment>, coloring: &[Option<u32>], total: bool) -> Vec<Check> {
    let mut out = vec![Check::new("proper", verify_proper(g, coloring))];
    if let Some(l) = lists {
        out.push(Check::new("list_respecting", verify_list_respecting(l, coloring)));
    }
    if total {
        out.push(Check::new("total", verify_total(coloring)));
    }
    out
}

fn need<T>(value: Option<T>, what: &str) -> anyhow::Result<T> {
    value.with_context(|| format!("result has no {what}"))
}

/// Validator checks for a result. Recomputes everything from the instance;
/// nothing reported by the run is trusted.
pub fn checks(inst: &Loaded, out: &RunOutput) -> anyhow::Result<Vec<Check>> {
    let g = &inst.graph;
    let s = &out.settings;
    Ok(match out.algorithm {
        Algorithm::Degplus1 | Algorithm::Bni => {
            let lists = inst.node_lists()?;
            coloring_checks(g, Some(&lists), need(out.coloring.as_deref(), "coloring")?, true)
        }
        Algorithm::Arboricity => {
            let lists = inst.node_lists()?;
            let mut v = coloring_checks(g, Some(&lists), need(out.coloring.as_deref(), "coloring")?, true);
            let p = need(out.partition.as_ref(), "partition")?;
            let a = need(s.arboricity, "arboricity")?;
            let alpha = 2.0 + need(s.epsilon, "epsilon")?;
            v.push(Check::new("h_partition", verify_h_partition(g, &vec![a; g.n()], &p.level, alpha)));
            v
        }
        Algorithm::Edgecolor => {
            let lists = edge_lists(inst)?;
            let lg = line_graph(g).line_graph;
            coloring_checks(&lg, Some(&lists), need(out.coloring.as_deref(), "coloring")?, true)
        }
        Algorithm::Reduce => {
            let lists = inst.node_lists()?;
            let (o, _) = orient_by_degeneracy(g);
            let red = need(out.reduction.as_ref(), "reduction")?;
            let eta = need(s.eta, "eta")? as f64;
            let gamma = 2.0 + need(s.epsilon, "epsilon")?;
            vec![Check::new("oriented_reduction", verify_oriented_reduction(g, &o, &lists, red, eta, gamma))]
        }
        Algorithm::Recursive => {
            let lists = inst.node_lists()?;
            let coloring = need(out.coloring.as_deref(), "coloring")?;
            let mut v = coloring_checks(g, Some(&lists), coloring, false);
            let (o, _) = orient_by_degeneracy(g);
            let slack = (2.0 + need(s.epsilon, "epsilon")?).powi(need(s.r, "r")? as i32);
            let mut report = Report::default();
            for x in 0..g.n() {
                let guaranteed = lists.list(x).len() as f64 > slack * o.out_degree(x) as f64;
                if guaranteed && coloring.get(x).copied().flatten().is_none() {
                    push(&mut report, Witness::Uncolored { v: x });
                }
            }
            v.push(Check::new("guaranteed_colored", report));
            v
        }
        Algorithm::Hpartition => {
            let (o, _) = orient_by_degeneracy(g);
            let p = need(out.partition.as_ref(), "partition")?;
            let alpha = 2.0 + need(s.epsilon, "epsilon")?;
            vec![Check::new("h_partition", verify_h_partition(g, o.out_degrees(), &p.level, alpha))]
        }
        Algorithm::Linial => coloring_checks(g, None, need(out.coloring.as_deref(), "coloring")?, true),
        Algorithm::Defective => {
            let buckets = need(out.buckets.as_deref(), "buckets")?;
            let k = need(s.buckets, "buckets")?;
            vec![Check::new("defect", defect_report(g, buckets, k))]
        }
    })
}

fn push(r: &mut Report, w: Witness) {
    r.violations += 1;
    if r.witnesses.len() < 10 {
        r.witnesses.push(w);
    }
}

/// Every node has at most `deg(v)/k` same-bucket neighbors.
fn defect_report(g: &Graph, buckets: &[usize], k: usize) -> Report {
    let mut r = Report::default();
    if buckets.len() != g.n() {
        push(
            &mut r,
            Witness::LengthMismatch {
                expected: g.n(),
                found: buckets.len(),
            },
        );
        return r;
    }
    for v in 0..g.n() {
        let same = g.neighbors(v).iter().filter(|&&u| buckets[u] == buckets[v]).count();
        if same * k > g.degree(v) || buckets[v] >= k {
            push(&mut r, Witness::RatioBroken { v, new_degree: same });
        }
    }
    r
}

/// Satisfiability of the instance by exhaustive search, checked against the
/// result: a total valid coloring of an unsatisfiable instance is impossible.
pub fn exact_check(inst: &Loaded, out: &RunOutput) -> anyhow::Result<Check> {
    let (g, lists) = match out.algorithm {
        Algorithm::Edgecolor => (line_graph(&inst.graph).line_graph, edge_lists(inst)?),
        _ => (inst.graph.clone(), inst.node_lists()?),
    };
    let sat = exact_list_color(&g, &lists, EXACT_CAP)?.is_some();
    let claims_total = out.passed && out.coloring.as_ref().is_some_and(|c| c.iter().all(Option::is_some));
    let mut report = Report::default();
    if claims_total && !sat {
        report.violations = 1;
    }
    Ok(Check::new(if sat { "exact_satisfiable" } else { "exact_unsatisfiable" }, report))
}
