//! Shared run parameters. Every flag can also come from a JSON config file;
//! flags win.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use listcolor::engine::default_budget;
use listcolor::Executor;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Local,
    Congest,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Per-edge bit budget in CONGEST mode; defaults to 32·(⌈log n⌉+⌈log C⌉+8).
    #[arg(long)]
    pub budget_bits: Option<u64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Declared neighborhood independence.
    #[arg(long)]
    pub theta: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_rounds: Option<usize>,
    /// Pass messages by clone instead of serializing them.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub emulated: Option<bool>,
    /// Arboricity bound `a`; defaults to the degeneracy.
    #[arg(long)]
    pub arboricity: Option<usize>,
    /// Bucket count for the defective coloring.
    #[arg(long)]
    pub buckets: Option<usize>,
}

#[derive(Clone, Debug, Default, Args)]
pub struct ParamArgs {
    #[command(flatten)]
    pub params: Params,
    /// JSON file with any of the parameter flags as keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl ParamArgs {
    pub fn resolve(&self) -> anyhow::Result<Params> {
        let base = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => Params::default(),
        };
        Ok(self.params.clone().over(base))
    }
}

impl Params {
    /// Fields set here take precedence over `base`.
    pub fn over(self, base: Params) -> Params {
        Params {
            mode: self.mode.or(base.mode),
            budget_bits: self.budget_bits.or(base.budget_bits),
            epsilon: self.epsilon.or(base.epsilon),
            r: self.r.or(base.r),
            eta: self.eta.or(base.eta),
            theta: self.theta.or(base.theta),
            seed: self.seed.or(base.seed),
            max_rounds: self.max_rounds.or(base.max_rounds),
            emulated: self.emulated.or(base.emulated),
            arboricity: self.arboricity.or(base.arboricity),
            buckets: self.buckets.or(base.buckets),
        }
    }

    pub fn epsilon(&self) -> anyhow::Result<f64> {
        let eps = self.epsilon.unwrap_or(1.0);
        if !(eps > 0.0 && eps.is_finite()) {
            bail!("--epsilon must be positive, got {eps}");
        }
        Ok(eps)
    }

    pub fn executor(&self, n: usize, space: usize) -> Executor {
        let mut exec = match self.mode.unwrap_or(ModeArg::Local) {
            ModeArg::Local => Executor::local(),
            ModeArg::Congest => Executor::congest(self.budget_bits.unwrap_or_else(|| default_budget(n, space))),
        };
        exec = exec.emulated(self.emulated.unwrap_or(false));
        if let Some(m) = self.max_rounds {
            exec = exec.with_max_rounds(m);
        }
        exec
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let file: Params = serde_json::from_str(r#"{"epsilon": 0.5, "r": 3, "mode": "congest"}"#).unwrap();
        let flags = Params {
            r: Some(4),
            ..Params::default()
        };
        let p = flags.over(file);
        assert_eq!((p.epsilon, p.r, p.mode), (Some(0.5), Some(4), Some(ModeArg::Congest)));
    }

    #[test]
    fn unknown_config_keys_rejected() {
        assert!(serde_json::from_str::<Params>(r#"{"epsilom": 1}"#).is_err());
    }
}
