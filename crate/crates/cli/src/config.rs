//! Experiment configuration: a TOML file with flat keys plus repeated
//! `[[solver]]` blocks.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use proxopt::data::ScalingMode;
use proxopt::losses::{LabeledDataset, LossKind};
use proxopt::problem::CompositeProblem;
use proxopt::regularizers::RegularizerKind;
use proxopt::solvers::DEFAULT_MAX_PROX_CALLS;

/// `lambda` accepts a number or the literal string `"1/n"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Fixed(f64),
    Expr(String),
}

impl Default for LambdaSpec {
    fn default() -> Self {
        LambdaSpec::Expr("1/n".into())
    }
}

impl LambdaSpec {
    pub fn resolve(&self, n_rows: usize) -> Result<f64> {
        match self {
            LambdaSpec::Fixed(v) if *v > 0.0 => Ok(*v),
            LambdaSpec::Fixed(v) => bail!("lambda must be positive, got {v}"),
            LambdaSpec::Expr(s) if s.trim() == "1/n" => {
                if n_rows == 0 {
                    bail!("lambda = \"1/n\" needs a nonempty dataset");
                }
                Ok(1.0 / n_rows as f64)
            }
            LambdaSpec::Expr(s) => bail!("unsupported lambda expression `{s}` (use a number or \"1/n\")"),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct SolverBlock {
    pub name: String,
    /// rAPG only: the error-bound constant.
    pub c: Option<f64>,
    /// rAPG only: certified initial objective gap.
    pub eps0: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    /// Display name; defaults to the dataset file stem.
    pub name: Option<String>,
    pub loss: String,
    #[serde(default = "default_huber_delta")]
    pub huber_delta: f64,
    pub power_p: Option<u32>,
    pub regularizer: String,
    #[serde(default)]
    pub lambda: LambdaSpec,
    pub ball_radius: Option<f64>,
    #[serde(default = "default_huber_delta")]
    pub reg_huber_delta: f64,
    pub group_boundaries: Option<Vec<usize>>,
    #[serde(default = "default_scaling")]
    pub scaling: String,
    pub eps: Vec<f64>,
    /// Error-bound exponent; defaults to 1/p for power losses and 1/2
    /// for the piecewise-quadratic and logistic families.
    pub theta: Option<f64>,
    #[serde(default = "default_c0")]
    pub c0: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_budget")]
    pub max_prox_calls: u64,
    #[serde(default = "default_eta")]
    pub eta: String,
    pub fixed_l: Option<f64>,
    #[serde(rename = "solver")]
    pub solvers: Vec<SolverBlock>,
}

fn default_huber_delta() -> f64 {
    1.0
}
fn default_scaling() -> String {
    "none".into()
}
fn default_c0() -> f64 {
    10.0
}
fn default_gamma() -> f64 {
    2.0
}
fn default_budget() -> u64 {
    DEFAULT_MAX_PROX_CALLS
}
fn default_eta() -> String {
    "backtracking".into()
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: ExperimentConfig =
            toml::from_str(&text).with_context(|| format!("cannot parse config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            bail!("config lists no solvers (add at least one [[solver]] block)");
        }
        if self.eps.is_empty() {
            bail!("config lists no eps values");
        }
        for &e in &self.eps {
            if !(e > 0.0 && e.is_finite()) {
                bail!("eps values must be positive, got {e}");
            }
        }
        for s in &self.solvers {
            match s.name.as_str() {
                "pg1" | "pg2" | "apg" | "adaagc" => {}
                "rapg" => {
                    if s.c.is_none() || s.eps0.is_none() {
                        bail!("solver rapg requires `c` and `eps0` in its block");
                    }
                }
                other => bail!("unknown solver `{other}` (expected pg1, pg2, apg, rapg, adaagc)"),
            }
        }
        self.loss_kind()?;
        match self.eta.as_str() {
            "backtracking" => {}
            "fixed" => {
                if self.fixed_l.is_none() {
                    bail!("eta = \"fixed\" requires `fixed_l`");
                }
            }
            other => bail!("unknown eta policy `{other}`"),
        }
        self.scaling_mode()?;
        if let Some(t) = self.theta {
            if !(t > 0.0 && t <= 1.0) {
                bail!("theta must lie in (0, 1], got {t}");
            }
        }
        Ok(())
    }

    pub fn loss_kind(&self) -> Result<LossKind> {
        Ok(match self.loss.as_str() {
            "square" => LossKind::Square,
            "squared_hinge" => LossKind::SquaredHinge,
            "huber" => LossKind::huber(self.huber_delta)?,
            "logistic" => LossKind::Logistic,
            "power" => {
                let p = self.power_p.context("loss = \"power\" requires `power_p`")?;
                LossKind::power(p)?
            }
            other => bail!("unknown loss `{other}`"),
        })
    }

    pub fn scaling_mode(&self) -> Result<ScalingMode> {
        Ok(match self.scaling.as_str() {
            "none" => ScalingMode::None,
            "unit_row" => ScalingMode::UnitRow,
            "minmax_column" => ScalingMode::MinmaxColumn,
            other => bail!("unknown scaling mode `{other}`"),
        })
    }

    pub fn regularizer_kind(&self, n_rows: usize, dim: usize) -> Result<RegularizerKind> {
        let kind = match self.regularizer.as_str() {
            "l1" => RegularizerKind::L1 { lambda: self.lambda.resolve(n_rows)? },
            "linf" => RegularizerKind::Linf { lambda: self.lambda.resolve(n_rows)? },
            "l1inf_groups" => RegularizerKind::L1InfGroups {
                lambda: self.lambda.resolve(n_rows)?,
                boundaries: self
                    .group_boundaries
                    .clone()
                    .context("regularizer l1inf_groups requires `group_boundaries`")?,
            },
            "huber_norm" => RegularizerKind::HuberNorm {
                lambda: self.lambda.resolve(n_rows)?,
                delta: self.reg_huber_delta,
            },
            "l1_ball" => RegularizerKind::L1Ball {
                radius: self.ball_radius.context("regularizer l1_ball requires `ball_radius`")?,
            },
            "none" => RegularizerKind::None,
            other => bail!("unknown regularizer `{other}`"),
        };
        kind.validate(dim)?;
        Ok(kind)
    }

    /// Resolved lambda for reporting; 0 for unpenalized regularizers.
    pub fn lambda_for_report(&self, n_rows: usize) -> Result<f64> {
        match self.regularizer.as_str() {
            "l1" | "linf" | "l1inf_groups" | "huber_norm" => self.lambda.resolve(n_rows),
            _ => Ok(0.0),
        }
    }

    /// Default exponent per problem class: `1/p` for power losses
    /// (polyhedral-constrained polynomial regression), `1/2` for the
    /// piecewise-quadratic and logistic families with polyhedral or Huber
    /// regularizers.
    pub fn resolve_theta(&self) -> Result<f64> {
        if let Some(t) = self.theta {
            return Ok(t);
        }
        Ok(match self.loss_kind()? {
            LossKind::PowerP { p } => 1.0 / f64::from(p),
            _ => 0.5,
        })
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            self.dataset
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into())
        })
    }
}

/// Everything the runner needs after resolving the config against the
/// parsed dataset.
pub struct PreparedExperiment {
    pub problem: CompositeProblem,
    pub data: Arc<LabeledDataset>,
    pub theta: f64,
    pub lambda: f64,
    pub dataset_name: String,
    pub loss_name: &'static str,
    pub regularizer_name: String,
}

pub fn prepare(config: &ExperimentConfig) -> Result<PreparedExperiment> {
    let file = std::fs::File::open(&config.dataset)
        .with_context(|| format!("cannot open dataset {}", config.dataset.display()))?;
    let raw = proxopt::data::parse_libsvm(std::io::BufReader::new(file))
        .with_context(|| format!("cannot parse dataset {}", config.dataset.display()))?;
    let scaled = proxopt::data::scale_features(&raw, config.scaling_mode()?);
    let kind = config.loss_kind()?;
    let data = if kind.is_classification() {
        Arc::new(proxopt::data::map_binary_labels(&scaled)?)
    } else {
        Arc::new(scaled)
    };
    let n = data.n_rows();
    let d = data.dim();
    if n == 0 {
        bail!("dataset {} is empty", config.dataset.display());
    }
    let loss = proxopt::losses::make_empirical_loss(kind, Arc::clone(&data))?;
    let regularizer = config.regularizer_kind(n, d)?;
    let problem = CompositeProblem::new(Arc::new(loss), Arc::new(regularizer), d);
    Ok(PreparedExperiment {
        problem,
        data: Arc::clone(&data),
        theta: config.resolve_theta()?,
        lambda: config.lambda_for_report(n)?,
        dataset_name: config.display_name(),
        loss_name: kind.name(),
        regularizer_name: config.regularizer.clone(),
    })
}
