//! Instance files: a graph, explicit per-node (or per-edge) lists and the
//! color space size `C` (colors `0..C`).

use std::path::Path;

use anyhow::{bail, Context};
use clap::ValueEnum;
use listcolor::graph::DrawStream;
use listcolor::oracle::degeneracy;
use listcolor::{Color, ColorSpace, Graph, ListAssignment};
use serde::{Deserialize, Serialize};

/// A graph given inline as JSON or as edge-list text.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphField {
    Json(Graph),
    EdgeList(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Instance {
    pub graph: GraphField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lists: Option<Vec<Vec<Color>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<usize>,
}

/// An instance with its graph parsed.
pub struct Loaded {
    pub graph: Graph,
    pub lists: Option<Vec<Vec<Color>>>,
    pub space: Option<usize>,
}

impl Loaded {
    /// Per-node lists, checked against the graph.
    pub fn node_lists(&self) -> anyhow::Result<ListAssignment> {
        let lists = self.assignment()?;
        if lists.len() != self.graph.n() {
            bail!("instance has {} lists for {} nodes", lists.len(), self.graph.n());
        }
        Ok(lists)
    }

    pub fn assignment(&self) -> anyhow::Result<ListAssignment> {
        let (Some(lists), Some(space)) = (&self.lists, self.space) else {
            bail!("instance has no lists or no space size");
        };
        Ok(ListAssignment::new(ColorSpace::first(space), lists.clone())?)
    }

    pub fn space_or(&self, fallback: usize) -> usize {
        self.space.unwrap_or(fallback)
    }
}

pub fn load(path: &Path) -> anyhow::Result<Loaded> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let inst: Instance = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let graph = match inst.graph {
        GraphField::Json(g) => g,
        GraphField::EdgeList(text) => Graph::from_edge_list(&text)?,
    };
    Ok(Loaded {
        graph,
        lists: inst.lists,
        space: inst.space,
    })
}

pub fn save(path: &Path, g: &Graph, lists: &ListAssignment) -> anyhow::Result<()> {
    let inst = Instance {
        graph: GraphField::Json(g.clone()),
        lists: Some(lists.lists().to_vec()),
        space: Some(lists.space().size()),
    };
    write_json(path, &inst)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Which hypothesis the generated lists satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ListKind {
    /// `deg(v) + 1` random colors per node.
    Degplus1,
    /// `⌊(2+ε)a⌋ + 1` random colors per node.
    Arboricity,
    /// `deg(u) + deg(v) - 1` random colors per edge.
    Edge,
    /// The whole space for every node.
    Full,
}

/// `size` distinct colors from `0..c`, sorted.
fn random_subset(c: usize, size: usize, draws: &mut DrawStream) -> Vec<Color> {
    let mut pool: Vec<Color> = (0..c as Color).collect();
    for i in 0..size {
        let j = i + draws.below(c - i);
        pool.swap(i, j);
    }
    let mut out = pool[..size].to_vec();
    out.sort_unstable();
    out
}

pub fn default_lists(
    g: &Graph,
    kind: ListKind,
    space: Option<usize>,
    epsilon: f64,
    a: Option<usize>,
    seed: u64,
) -> anyhow::Result<ListAssignment> {
    let delta = g.max_degree();
    let sizes: Vec<usize> = match kind {
        ListKind::Degplus1 => g.degrees().iter().map(|d| d + 1).collect(),
        ListKind::Arboricity => {
            let a = a.unwrap_or_else(|| degeneracy(g)).max(1);
            vec![((2.0 + epsilon) * a as f64).floor() as usize + 1; g.n()]
        }
        ListKind::Edge => g.edges().iter().map(|&(u, v)| g.degree(u) + g.degree(v) - 1).collect(),
        ListKind::Full => {
            let c = space.unwrap_or(delta + 1);
            return Ok(ListAssignment::full(g.n(), ColorSpace::first(c)));
        }
    };
    let need = sizes.iter().copied().max().unwrap_or(1).max(1);
    let c = match (space, kind) {
        (Some(c), _) => c,
        // Twice the largest list, within the (Δ+1)³ limit of the
        // degree+1 algorithms.
        (None, ListKind::Degplus1) => (2 * need).min((delta + 1).pow(3)),
        (None, ListKind::Edge) => (2 * delta).saturating_sub(1).max(1),
        (None, _) => 2 * need,
    };
    if c < need {
        bail!("space {c} is smaller than the largest list ({need} colors)");
    }
    let mut draws = DrawStream::new(seed);
    let lists = sizes.iter().map(|&s| random_subset(c, s, &mut draws)).collect();
    Ok(ListAssignment::new(ColorSpace::first(c), lists)?)
}
