//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qgeo_core::completeness::{COHERENT_DEFAULT_RADIUS, DEFAULT_NODES};
use qgeo_core::estimation::MleOptions;
use qgeo_core::state_model::{Coherent, Su11};
use qgeo_core::vertex::MvddsConfig;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "qgeo",
    version,
    about = "Quantum geometric tensor, Fisher-Rao metric and Cramer-Rao tools for parameterized pure states",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the artifact to this file instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the random streams (required by stochastic commands)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core. Never changes results
    #[arg(long, global = true, env = "QGEO_WORKERS", default_value_t = 0)]
    pub workers: usize,
    /// Exit with status 3 if numerical-quality warnings were raised
    #[arg(long, global = true)]
    pub strict: bool,
    /// Flat TOML file of option values; command-line flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantum geometric tensor, metric, Berry curvature and IDQS at a point
    Qgt(PointCmd),
    /// Intrinsic density of quantum states sqrt(det g^F)
    Idqs(PointCmd),
    /// Fisher-Rao metric of a measurement
    Frm(MeasureCmd),
    /// Density of distinguishable states sqrt(det g^I)
    Dds(MeasureCmd),
    /// Matrix and determinant Cramer-Rao chain from simulated estimation
    Qcri(EstimateCmd),
    /// Maximal vertex-measurement density at a point of a 2-parameter model
    Mvdds(MvddsCmd),
    /// Sweep random points of an SU(3) coordinate plane
    Fig4(Fig4Cmd),
    /// Repeated maximum-likelihood estimation
    Simulate(EstimateCmd),
    /// Numerical resolution of the identity by the invariant measure
    Completeness(CompletenessCmd),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Qgt(_) => "qgt",
            Command::Idqs(_) => "idqs",
            Command::Frm(_) => "frm",
            Command::Dds(_) => "dds",
            Command::Qcri(_) => "qcri",
            Command::Mvdds(_) => "mvdds",
            Command::Fig4(_) => "fig4",
            Command::Simulate(_) => "simulate",
            Command::Completeness(_) => "completeness",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Model: su3, cpn, coherent, su11 or sphere
    #[arg(long, default_value = "su3")]
    pub model: String,
    /// Fixed coordinates as name=value pairs, e.g. gamma=0.3,beta=0.4
    #[arg(long, default_value = "")]
    pub fix: String,
    /// n of the CP^n model
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Level cutoff of the coherent (default 40) and su11 (default 60) models
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Bargmann index of the su11 model
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Half-width of the coherent-state parameter square
    #[arg(long, default_value_t = Coherent::DEFAULT_HALF_WIDTH)]
    pub half_width: f64,
    /// Largest |z| of the su11 model
    #[arg(long, default_value_t = Su11::DEFAULT_R_MAX)]
    pub r_max: f64,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// Free coordinates, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub theta: Vec<f64>,
    /// Finite-difference step in coordinate units
    #[arg(long, default_value_t = 1e-5)]
    pub step: f64,
}

#[derive(Debug, Clone, Args)]
pub struct PointCmd {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub point: PointArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MeasureCmd {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub point: PointArgs,
    /// Measurement: computational, identity, random:K:SEED, vertex:T:PHI,
    /// informative:MU, inline JSON or @FILE
    #[arg(long, default_value = "computational")]
    pub povm: String,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateCmd {
    #[command(flatten)]
    pub measure: MeasureCmd,
    /// Shots per trial
    #[arg(long, default_value_t = 100_000)]
    pub m: u64,
    /// Independent trials
    #[arg(long, default_value_t = 400)]
    pub trials: usize,
    /// Centre the covariance on the sample mean instead of the truth
    #[arg(long)]
    pub mean_centred: bool,
    /// Search box half-width in units of 1/sqrt(g^F_mumu)
    #[arg(long, default_value_t = MleOptions::default().prior_half_width)]
    pub prior_half_width: f64,
    /// Bootstrap resamples for standard errors
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
}

#[derive(Debug, Clone, Args)]
pub struct MvddsArgs {
    /// Largest mismatch radius
    #[arg(long, default_value_t = MvddsConfig::default().r0)]
    pub r0: f64,
    /// Ratio between consecutive radii
    #[arg(long, default_value_t = MvddsConfig::default().factor)]
    pub factor: f64,
    /// Number of radii
    #[arg(long, default_value_t = MvddsConfig::default().rungs)]
    pub rungs: usize,
    /// Grid points per search axis
    #[arg(long, default_value_t = MvddsConfig::default().grid)]
    pub grid: usize,
    /// Simplex iterations after the grid search
    #[arg(long, default_value_t = MvddsConfig::default().max_iter)]
    pub max_iter: usize,
    /// Simplex tolerance
    #[arg(long, default_value_t = MvddsConfig::default().tol)]
    pub tol: f64,
    /// Differencing step as a fraction of r / lambda
    #[arg(long, default_value_t = MvddsConfig::default().step_ratio)]
    pub step_ratio: f64,
    /// Cap on the coordinate offset of the largest radius, in units of 1/lambda_min
    #[arg(long, default_value_t = MvddsConfig::default().max_offset)]
    pub max_offset: f64,
}

impl MvddsArgs {
    pub fn config(&self) -> MvddsConfig {
        MvddsConfig {
            r0: self.r0,
            factor: self.factor,
            rungs: self.rungs,
            grid: self.grid,
            max_iter: self.max_iter,
            tol: self.tol,
            step_ratio: self.step_ratio,
            max_offset: self.max_offset,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MvddsCmd {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Free coordinates, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub theta: Vec<f64>,
    #[command(flatten)]
    pub search: MvddsArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Fig4Cmd {
    /// Coordinate plane: alpha-beta, alpha-theta or gamma-theta
    #[arg(long, default_value = "alpha-theta")]
    pub submanifold: String,
    /// Number of sampled points
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[command(flatten)]
    pub search: MvddsArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompletenessCmd {
    /// cp1, cp2, cp3, coherent or su11
    #[arg(long, default_value = "cp1")]
    pub space: String,
    /// quadrature or monte-carlo (default: quadrature up to two parameters)
    #[arg(long)]
    pub method: Option<String>,
    /// Nodes per axis (quadrature, default 64) or samples (monte-carlo, default 1000000)
    #[arg(long)]
    pub points: Option<usize>,
    /// Bargmann index for su11
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Level cutoff (coherent: 40, su11: 60)
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Half-width of the coherent-state integration square
    #[arg(long, default_value_t = COHERENT_DEFAULT_RADIUS)]
    pub radius: f64,
    /// Include the integrated matrix in JSON output
    #[arg(long)]
    pub matrix: bool,
}

/// Documented default for `--points` with quadrature.
pub const QUADRATURE_NODES: usize = DEFAULT_NODES;
