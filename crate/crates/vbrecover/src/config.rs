//! Experiment configuration: a single TOML file plus CLI overrides.
//!
//! Unknown keys are rejected so typos fail fast instead of silently running
//! a default. Sections that only apply to one experiment kind are optional
//! and carry their own defaults.

use std::path::PathBuf;

use serde::Deserialize;

use vb_core::decoder::{AlgorithmKind, ComparisonPolicy};
use vb_core::ensembles::{
    GraphConfig, SignalConfig, ValueMode, WeightMode, DEFAULT_INTEGER_RANGE,
};
use vb_core::{analysis::StoppingCriteria, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Recover,
    Threshold,
    Evolution,
    StopMap,
    Concentration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Ci,
    Paper,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub n: usize,
    pub d_v: usize,
    pub d_c: usize,
    /// Omitted: unit weights. Present: continuous uniform on [lo, hi].
    pub weights: Option<WeightInterval>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightInterval {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    pub alpha: f64,
    /// "integer" (default) or "gaussian".
    pub values: Option<String>,
    /// Magnitude range for integer values.
    pub range: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    /// "auto" (default), "exact" or "tolerance".
    pub mode: String,
    pub abs: Option<f64>,
    pub rel: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSection {
    pub resolution: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub alpha_start: f64,
    pub alpha_end: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationSection {
    pub n_list: Vec<usize>,
    pub ell: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub alg: AlgorithmKind,
    pub graph: GraphSection,
    pub signal: SignalSection,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Seeds per Monte-Carlo verdict (threshold probes, evolution averages).
    #[serde(default = "default_num_seeds")]
    pub num_seeds: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub policy: Option<PolicySection>,
    pub stopping: Option<StoppingCriteria>,
    pub threshold: Option<ThresholdSection>,
    pub sweep: Option<SweepSection>,
    pub concentration: Option<ConcentrationSection>,
}

fn default_trials() -> usize {
    1000
}

fn default_num_seeds() -> usize {
    3
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Smallest n' >= n with n'·d_v divisible by d_c, so biregular graphs exist.
pub fn fit_n(n: usize, d_v: usize, d_c: usize) -> usize {
    let mut n = n.max(d_c);
    while (n * d_v) % d_c != 0 {
        n += 1;
    }
    n
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.num_seeds == 0 {
            return Err(Error::Config("num_seeds must be >= 1".into()));
        }
        self.graph_config(0).validate()?;
        self.signal_config(0).validate()?;
        self.policy()?;
        self.stopping().validate()?;
        if let Some(t) = &self.threshold {
            if t.resolution <= 0.0 {
                return Err(Error::Config("threshold.resolution must be positive".into()));
            }
        }
        if let Some(s) = &self.sweep {
            if !(s.step > 0.0 && s.alpha_start >= 0.0 && s.alpha_end <= 1.0
                && s.alpha_start <= s.alpha_end)
            {
                return Err(Error::Config(
                    "sweep requires 0 <= alpha_start <= alpha_end <= 1 and step > 0".into(),
                ));
            }
        }
        if let Some(c) = &self.concentration {
            if c.n_list.is_empty() {
                return Err(Error::Config("concentration.n_list must be non-empty".into()));
            }
        }
        Ok(())
    }

    /// CLI overrides applied after parsing; profile last so it wins.
    pub fn apply_overrides(
        &mut self,
        seed: Option<u64>,
        trials: Option<usize>,
        out: Option<PathBuf>,
        profile: Option<Profile>,
    ) {
        if let Some(s) = seed {
            self.seed = s;
        }
        if let Some(t) = trials {
            self.trials = t;
        }
        if let Some(o) = out {
            self.output_dir = o;
        }
        match profile {
            Some(Profile::Ci) => {
                self.trials = self.trials.min(100);
                self.graph.n = fit_n(
                    self.graph.n.min(10_000),
                    self.graph.d_v,
                    self.graph.d_c,
                );
            }
            Some(Profile::Paper) | None => {}
        }
    }

    pub fn graph_config(&self, seed: u64) -> GraphConfig {
        GraphConfig {
            n: self.graph.n,
            d_v: self.graph.d_v,
            d_c: self.graph.d_c,
            weight_mode: match self.graph.weights {
                None => WeightMode::AllOnes,
                Some(w) => WeightMode::ContinuousUniform { lo: w.lo, hi: w.hi },
            },
            seed,
        }
    }

    pub fn signal_config(&self, seed: u64) -> SignalConfig {
        let value_mode = match self.signal.values.as_deref() {
            Some("gaussian") => ValueMode::StandardGaussian,
            _ => ValueMode::UniformInteger {
                range: self.signal.range.unwrap_or(DEFAULT_INTEGER_RANGE),
            },
        };
        SignalConfig {
            n: self.graph.n,
            alpha: self.signal.alpha,
            value_mode,
            seed,
        }
    }

    /// Resolved comparison policy. `None` means auto-select per instance
    /// (exact for integer signals on unit-weight graphs, measurement-scaled
    /// tolerance otherwise).
    pub fn policy(&self) -> Result<Option<ComparisonPolicy>> {
        let Some(p) = &self.policy else { return Ok(None) };
        match p.mode.as_str() {
            "auto" => Ok(None),
            "exact" => Ok(Some(ComparisonPolicy::Exact)),
            "tolerance" => Ok(Some(ComparisonPolicy::Tolerance {
                abs: p.abs.unwrap_or(1e-9),
                rel: p.rel.unwrap_or(1e-9),
            })),
            other => Err(Error::Config(format!(
                "policy.mode must be auto, exact or tolerance, got {other:?}"
            ))),
        }
    }

    pub fn stopping(&self) -> StoppingCriteria {
        self.stopping.unwrap_or_default()
    }

    /// Signal values mode check: true when exact arithmetic applies.
    pub fn is_exact_regime(&self) -> bool {
        self.graph.weights.is_none()
            && !matches!(self.signal.values.as_deref(), Some("gaussian"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
experiment = "recover"
alg = "sbb"

[graph]
n = 1200
d_v = 3
d_c = 6

[signal]
alpha = 0.2
"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.trials, 1000);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.num_seeds, 3);
        assert!(cfg.policy().unwrap().is_none());
        assert!(cfg.is_exact_regime());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = format!("{MINIMAL}\nnot_a_key = 1\n");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let bad_nested = MINIMAL.replace("alpha = 0.2", "alpha = 0.2\nalphaa = 0.3");
        assert!(ExperimentConfig::from_toml(&bad_nested).is_err());
    }

    #[test]
    fn invalid_sections_are_rejected() {
        let bad = MINIMAL.replace("n = 1200", "n = 1201"); // 1201*3 % 6 != 0
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let bad = format!("{MINIMAL}\n[threshold]\nresolution = 0.0\n");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let bad = format!("{MINIMAL}\n[sweep]\nalpha_start = 0.5\nalpha_end = 0.2\nstep = 0.1\n");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn ci_profile_caps_size_and_trials() {
        let mut cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        cfg.graph.n = 100_000;
        cfg.trials = 1000;
        cfg.apply_overrides(None, None, None, Some(Profile::Ci));
        assert_eq!(cfg.trials, 100);
        assert_eq!(cfg.graph.n, 10_000);
        assert_eq!(cfg.graph_config(0).validate().map_err(|e| e.to_string()), Ok(()));
    }

    #[test]
    fn fit_n_preserves_divisibility() {
        assert_eq!(fit_n(10_000, 3, 6), 10_000);
        assert_eq!(fit_n(10_000, 5, 6), 10_002);
        assert_eq!(fit_n(999, 5, 10), 1000);
    }

    #[test]
    fn overrides_apply() {
        let mut cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        cfg.apply_overrides(Some(9), Some(7), Some(PathBuf::from("elsewhere")), None);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.trials, 7);
        assert_eq!(cfg.output_dir, PathBuf::from("elsewhere"));
    }
}
