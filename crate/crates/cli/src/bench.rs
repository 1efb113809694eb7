//! Parameter sweeps producing one row of round metrics per run.

use std::io::Write;

use anyhow::Context;
use listcolor::graph::generate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::instance::{default_lists, ListKind, Loaded};
use crate::params::Params;
use crate::run::{run, Algorithm};
use crate::KindArg;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default)]
    pub entries: Vec<Entry>,
}

/// One sweep: the product of `n`, `r` and `epsilon` values.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub algorithm: Algorithm,
    pub kind: KindArg,
    pub n: Vec<usize>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub lists: Option<String>,
    #[serde(default)]
    pub space: Option<usize>,
    #[serde(default)]
    pub r: Vec<u32>,
    #[serde(default)]
    pub epsilon: Vec<f64>,
    #[serde(default)]
    pub params: Params,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub algorithm: Algorithm,
    pub kind: KindArg,
    pub n: usize,
    pub m: usize,
    pub delta: usize,
    pub r: Option<u32>,
    pub epsilon: Option<f64>,
    pub space: Option<usize>,
    pub rounds: Option<usize>,
    pub messages: Option<u64>,
    pub max_payload_bits: Option<u64>,
    /// `pass`, `fail`, or the error that stopped the run.
    pub status: String,
}

const HEADER: [&str; 12] = [
    "algorithm",
    "kind",
    "n",
    "m",
    "delta",
    "r",
    "epsilon",
    "space",
    "rounds",
    "messages",
    "max_payload_bits",
    "status",
];

fn list_kind(e: &Entry) -> anyhow::Result<ListKind> {
    if let Some(name) = &e.lists {
        return <ListKind as clap::ValueEnum>::from_str(name, true).map_err(|m| anyhow::anyhow!("lists: {m}"));
    }
    Ok(match e.algorithm {
        Algorithm::Arboricity => ListKind::Arboricity,
        Algorithm::Edgecolor => ListKind::Edge,
        Algorithm::Reduce | Algorithm::Recursive => ListKind::Full,
        _ => ListKind::Degplus1,
    })
}

struct Job<'a> {
    entry: &'a Entry,
    n: usize,
    r: Option<u32>,
    epsilon: Option<f64>,
}

fn run_job(job: &Job) -> anyhow::Result<Row> {
    let e = job.entry;
    let g = generate(e.kind.to_graph_kind(e.p, e.seed)?, job.n)?;
    let params = Params {
        r: job.r,
        epsilon: job.epsilon,
        ..Params::default()
    }
    .over(e.params.clone());
    let lists = default_lists(&g, list_kind(e)?, e.space, params.epsilon()?, params.arboricity, e.seed)?;
    let space = lists.space().size();
    let mut row = Row {
        algorithm: e.algorithm,
        kind: e.kind,
        n: g.n(),
        m: g.edge_count(),
        delta: g.max_degree(),
        r: job.r,
        epsilon: job.epsilon,
        space: Some(space),
        rounds: None,
        messages: None,
        max_payload_bits: None,
        status: String::new(),
    };
    let inst = Loaded {
        graph: g,
        lists: Some(lists.into_lists()),
        space: Some(space),
    };
    match run(e.algorithm, &inst, &params) {
        Ok(out) => {
            row.r = out.settings.r.or(row.r);
            row.epsilon = out.settings.epsilon.or(row.epsilon);
            row.rounds = Some(out.metrics.rounds);
            row.messages = Some(out.metrics.messages_sent);
            row.max_payload_bits = Some(out.metrics.max_payload_bits);
            row.status = if out.passed { "pass" } else { "fail" }.into();
        }
        Err(err) => row.status = format!("error: {err:#}"),
    }
    Ok(row)
}

pub fn run_suite(suite: &Suite) -> anyhow::Result<Vec<Row>> {
    let mut jobs = Vec::new();
    for entry in &suite.entries {
        let rs: Vec<Option<u32>> = if entry.r.is_empty() { vec![None] } else { entry.r.iter().map(|&r| Some(r)).collect() };
        let eps: Vec<Option<f64>> = if entry.epsilon.is_empty() {
            vec![None]
        } else {
            entry.epsilon.iter().map(|&e| Some(e)).collect()
        };
        for &n in &entry.n {
            for &r in &rs {
                for &epsilon in &eps {
                    jobs.push(Job { entry, n, r, epsilon });
                }
            }
        }
    }
    // Runs are independent and deterministic; order is restored by collect.
    jobs.par_iter().map(run_job).collect()
}

pub fn write_csv(rows: &[Row], out: impl Write) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().context("writing CSV")?;
    Ok(())
}
