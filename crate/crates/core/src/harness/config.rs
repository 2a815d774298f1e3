//! Experiment configuration, read from a single JSON file.
//!
//! ```json
//! {
//!   "experiment": "convergence",
//!   "body": {"variant": "ball", "n": 2, "radius": 1},
//!   "sweeps": {"lambda": [4, 8, 16, 64], "p": [1, 2]},
//!   "budgets": {"rotations": 16},
//!   "seed": 7
//! }
//! ```

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bodies::json::{body_from_json, parse_scalar};
use crate::bodies::ConvexBody;
use crate::borell::ReferenceConstants;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::report::ReportFormat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Enumerate,
    Borell,
    Cq,
    BrunnMinkowski,
    Meanwidth,
    Convergence,
    Counterexample,
    ShellBound,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Enumerate,
        Experiment::Borell,
        Experiment::Cq,
        Experiment::BrunnMinkowski,
        Experiment::Meanwidth,
        Experiment::Convergence,
        Experiment::Counterexample,
        Experiment::ShellBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Enumerate => "enumerate",
            Experiment::Borell => "borell",
            Experiment::Cq => "cq",
            Experiment::BrunnMinkowski => "brunn-minkowski",
            Experiment::Meanwidth => "meanwidth",
            Experiment::Convergence => "convergence",
            Experiment::Counterexample => "counterexample",
            Experiment::ShellBound => "shell-bound",
        }
    }
}

impl std::str::FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

/// How the `meanwidth` experiment compares widths.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanWidthKind {
    /// `E w(K_N)` against `w(Z_{log N}(K))` by Monte Carlo.
    #[default]
    Sandwich,
    /// Floating-body support against centroid-body support.
    Floating,
    /// Rotation-averaged lattice expected maximum against the `log N` moment.
    DiscreteUpper,
    /// Rotation-averaged lattice expected maximum against a lower moment.
    DiscreteLower,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweeps {
    /// Dilation factors or combination weights; numbers or rational strings.
    #[serde(default)]
    pub lambda: Vec<Value>,
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default)]
    pub q: Vec<f64>,
    /// Sample counts `N`.
    #[serde(default)]
    pub n: Vec<u64>,
    /// Shell widths for `shell-bound`.
    #[serde(default)]
    pub t: Vec<f64>,
    /// Union-bound multipliers.
    #[serde(default)]
    pub a: Vec<f64>,
    /// Floating-body levels.
    #[serde(default)]
    pub delta: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budgets {
    pub rotations: usize,
    pub point_samples: usize,
    pub direction_samples: usize,
    pub replicates: usize,
    pub p_grid: usize,
    /// Randomized body pairs added to a `brunn-minkowski` run.
    pub random_triples: Option<usize>,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            rotations: 64,
            point_samples: 10_000,
            direction_samples: 1_000,
            replicates: 8,
            p_grid: 4,
            random_triples: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub borell: f64,
    pub meanwidth_upper: f64,
    pub meanwidth_lower: f64,
    pub lower_scale: f64,
    /// Allowed range of width ratios in sandwich checks.
    pub band_low: f64,
    pub band_high: f64,
    /// Largest accepted `|C₀ − 1|` at the end of a convergence sweep.
    pub convergence_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let r = ReferenceConstants::default();
        Tolerances {
            borell: r.borell,
            meanwidth_upper: r.meanwidth_upper,
            meanwidth_lower: r.meanwidth_lower,
            lower_scale: r.lower_scale,
            band_low: 0.05,
            band_high: 20.0,
            convergence_gap: 0.25,
        }
    }
}

impl Tolerances {
    pub fn constants(&self) -> ReferenceConstants {
        ReferenceConstants {
            borell: self.borell,
            meanwidth_upper: self.meanwidth_upper,
            meanwidth_lower: self.meanwidth_lower,
            lower_scale: self.lower_scale,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub body: Option<Value>,
    /// Second body of a `brunn-minkowski` pair.
    #[serde(default)]
    pub other: Option<Value>,
    /// Ambient dimension for `counterexample`.
    #[serde(default)]
    pub dimension: Option<usize>,
    #[serde(default)]
    pub mode: MeanWidthKind,
    #[serde(default)]
    pub sweeps: Sweeps,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub format: ReportFormat,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            body: None,
            other: None,
            dimension: None,
            mode: MeanWidthKind::default(),
            sweeps: Sweeps::default(),
            budgets: Budgets::default(),
            seed: 0,
            output: None,
            format: ReportFormat::default(),
            tolerances: Tolerances::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn body(&self) -> Result<ConvexBody> {
        let v = self.body.as_ref().ok_or_else(|| Error::Config(format!("{} needs a body", self.experiment.name())))?;
        body_from_json(v)
    }

    pub fn other_body(&self) -> Result<Option<ConvexBody>> {
        self.other.as_ref().map(body_from_json).transpose()
    }

    pub fn lambdas(&self) -> Result<Vec<Scalar>> {
        self.sweeps.lambda.iter().map(parse_scalar).collect()
    }

    /// Checks budgets, sweep shapes and that the bodies parse.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let b = &self.budgets;
        for (name, v) in [
            ("rotations", b.rotations),
            ("point_samples", b.point_samples),
            ("direction_samples", b.direction_samples),
            ("replicates", b.replicates),
            ("p_grid", b.p_grid),
        ] {
            if v == 0 {
                return bad(format!("budget {name} must be positive"));
            }
        }
        if b.random_triples == Some(0) {
            return bad("budget random_triples must be positive when given".into());
        }
        let lambdas = self.lambdas()?;
        if lambdas.windows(2).any(|w| w[0].exact() >= w[1].exact()) {
            return bad("lambda sweep must be strictly increasing".into());
        }
        if lambdas.iter().any(|l| !l.is_positive()) && self.experiment != Experiment::BrunnMinkowski {
            return bad("lambda values must be positive".into());
        }
        let s = &self.sweeps;
        if s.p.iter().chain(&s.q).any(|&v| !(v >= 1.0) || !v.is_finite()) {
            return bad("p and q values must be finite and at least 1".into());
        }
        if s.n.contains(&0) {
            return bad("sample counts must be positive".into());
        }
        if s.t.iter().chain(&s.a).any(|&v| !(v > 0.0)) {
            return bad("t and a values must be positive".into());
        }
        if s.delta.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
            return bad("delta values must lie in (0, 1)".into());
        }
        if let Some(body) = &self.body {
            body_from_json(body)?;
        }
        if let Some(other) = &self.other {
            body_from_json(other)?;
        }
        let need = |ok: bool, what: &str| if ok { Ok(()) } else { bad(format!("{}: {what}", self.experiment.name())) };
        match self.experiment {
            Experiment::Enumerate | Experiment::Cq | Experiment::Borell | Experiment::ShellBound => {
                need(self.body.is_some(), "a body is required")
            }
            Experiment::Convergence => {
                need(self.body.is_some(), "a body is required")?;
                need(lambdas.len() >= 3, "the lambda sweep needs at least 3 values")
            }
            Experiment::Counterexample => {
                need(!lambdas.is_empty(), "the lambda sweep must be nonempty")?;
                need(self.dimension.unwrap_or(2) >= 2, "dimension must be at least 2")
            }
            Experiment::BrunnMinkowski => {
                let pair = self.body.is_some() && self.other.is_some();
                need(pair || b.random_triples.is_some(), "give body and other, or random_triples")?;
                need(!pair || !lambdas.is_empty(), "the lambda sweep must be nonempty")
            }
            Experiment::Meanwidth => {
                need(self.body.is_some(), "a body is required")?;
                match self.mode {
                    MeanWidthKind::Sandwich | MeanWidthKind::DiscreteUpper => {
                        need(!s.n.is_empty() && s.n.iter().all(|&n| n >= 3), "the N sweep needs values >= 3")
                    }
                    MeanWidthKind::Floating => need(!s.delta.is_empty(), "the delta sweep must be nonempty"),
                    MeanWidthKind::DiscreteLower => need(!s.q.is_empty(), "the q sweep must be nonempty"),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let cfg = ExperimentConfig::parse(
            r#"{"experiment": "convergence", "body": {"variant": "ball", "n": 2, "radius": 1},
                "sweeps": {"lambda": [4, "8", 16], "p": [1, 2]}, "seed": 3}"#,
        )
        .unwrap();
        assert_eq!(cfg.experiment, Experiment::Convergence);
        assert_eq!(cfg.lambdas().unwrap().len(), 3);
        assert_eq!(cfg.budgets.rotations, 64);
        let again = ExperimentConfig::parse(&cfg.to_json()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let cases = [
            r#"{"experiment": "nope"}"#,
            r#"{"experiment": "convergence", "body": {"variant": "ball", "n": 2, "radius": 1}, "sweeps": {"lambda": [4, 8]}}"#,
            r#"{"experiment": "counterexample", "sweeps": {"lambda": [4, 4]}}"#,
            r#"{"experiment": "counterexample", "sweeps": {"lambda": [4]}, "budgets": {"rotations": 0}}"#,
            r#"{"experiment": "enumerate"}"#,
            r#"{"experiment": "enumerate", "body": {"variant": "ball", "n": 2, "radius": 1}, "extra": 1}"#,
            r#"{"experiment": "meanwidth", "body": {"variant": "ball", "n": 2, "radius": 1}, "sweeps": {"n": [2]}}"#,
        ];
        for c in cases {
            assert!(ExperimentConfig::parse(c).is_err(), "{c}");
        }
    }
}
