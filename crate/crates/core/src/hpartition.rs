//! Generalized H-partitions: levels peeled one round at a time.
//!
//! A node joins the current level as soon as its degree among unpeeled nodes
//! is at most `α·β(v)`. Level `i` is decided in round `i`; peeled nodes
//! announce themselves so neighbors can lower their residual degree.

use serde::{Deserialize, Serialize};

use crate::engine::{Executor, Inbox, NodeCtx, NodeProgram, RunMetrics, Step};
use crate::error::{Error, Result};
use crate::graph::{Graph, Orientation};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HPartition<T> {
    /// 1-based level of every node.
    #[serde(rename = "levels")]
    pub level: Vec<usize>,
    pub h: usize,
    pub alpha: T,
    pub beta_bound: Vec<usize>,
}

impl<T: Scalar> HPartition<T> {
    /// Nodes of level `i`, ascending.
    pub fn level_nodes(&self, i: usize) -> Vec<usize> {
        (0..self.level.len()).filter(|&v| self.level[v] == i).collect()
    }
}

/// Depth guaranteed by residual edges shrinking by a factor `1/(1+ε)` per level.
pub fn depth_bound(m: usize, epsilon: f64) -> usize {
    ((2.0 * m as f64 + 1.0).ln() / (1.0 + epsilon).ln()).ceil() as usize + 1
}

struct Peel<T> {
    alpha: T,
}

struct PeelState {
    beta: usize,
    residual: usize,
}

impl<T: Scalar> NodeProgram for Peel<T> {
    type Input = usize;
    type State = PeelState;
    type Msg = ();
    type Output = usize;

    fn init(&self, ctx: &NodeCtx<'_>, &beta: &usize) -> PeelState {
        PeelState {
            beta,
            residual: ctx.degree(),
        }
    }

    fn step(&self, _: &NodeCtx<'_>, s: &mut PeelState, round: usize, inbox: &Inbox<'_, ()>) -> Step<(), usize> {
        s.residual -= inbox.iter().count();
        if T::from_count(s.residual) <= self.alpha * T::from_count(s.beta) {
            Step::broadcast(()).with_output(round)
        } else {
            Step::silent()
        }
    }
}

fn peel<T: Scalar>(
    exec: &Executor,
    g: &Graph,
    beta: Vec<usize>,
    alpha: T,
) -> std::result::Result<(HPartition<T>, RunMetrics), (usize, RunMetrics)> {
    // Every level is nonempty until the residual graph stalls, so n + 1
    // rounds always suffice unless it does.
    let bounded = exec.with_max_rounds(exec.max_rounds.min(g.n() + 1));
    match bounded.run("hpartition", &Peel { alpha }, g, &beta) {
        Ok((level, metrics)) => {
            let h = level.iter().copied().max().unwrap_or(0);
            Ok((
                HPartition {
                    level,
                    h,
                    alpha,
                    beta_bound: beta,
                },
                metrics,
            ))
        }
        Err(e) => {
            let residual = e.partial.iter().filter(|l| l.is_none()).count();
            Err((residual, e.metrics))
        }
    }
}

/// Partition with parameter `2 + ε` and `β(v)` the out-degree under `o`.
pub fn generalized_h_partition<T: Scalar>(
    exec: &Executor,
    g: &Graph,
    o: &Orientation,
    epsilon: T,
) -> Result<(HPartition<T>, RunMetrics)> {
    if epsilon <= T::zero() {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
    }
    if o.edge_count() != g.edge_count() {
        return Err(Error::InvalidParameter("orientation does not match graph".into()));
    }
    peel(exec, g, o.out_degrees().to_vec(), T::two() + epsilon).map_err(|(residual, _)| {
        Error::Internal(format!(
            "h-partition peeled no node while {residual} node(s) remained; \
             the residual out-degree sum cannot exceed half the residual volume"
        ))
    })
}

/// Partition with parameter `2 + ε` and `β ≡ a`.
pub fn h_partition_fixed_bound<T: Scalar>(
    exec: &Executor,
    g: &Graph,
    a: usize,
    epsilon: T,
) -> Result<(HPartition<T>, RunMetrics)> {
    if a == 0 {
        return Err(Error::InvalidParameter("arboricity bound must be >= 1".into()));
    }
    if epsilon <= T::zero() {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
    }
    peel(exec, g, vec![a; g.n()], T::two() + epsilon).map_err(|(residual, _)| Error::Stalled { residual })
}
