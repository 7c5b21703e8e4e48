//! Command-line surface. Every flag maps onto a [`RunConfig`] key of the same
//! name, so anything given on the command line can also come from
//! `--config`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Command, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "mwave", version, about = "Spectral Mexican-hat wavelets on tori and spheres")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Args)]
pub struct Shared {
    /// key=value file; flags given on the command line override it
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write CSV here instead of stdout
    #[arg(long, value_name = "FILE")]
    pub output: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Evaluate K_t on a θ-grid (sphere2) or at torus points
    Kernel(KernelArgs),
    /// Cross-check a closed form or fast series against a reference
    Validate(ValidateArgs),
    /// Apply the wavelet transform to a spectral field at a list of scales
    Cwt(CwtArgs),
    /// Reconstruct a field from its transform over a scale grid
    Reconstruct(ReconstructArgs),
    /// Fit the decay exponent of sup-norms of T_tF
    Holder(HolderArgs),
    /// Weighted sup-norms of K_t across scales
    Localize(LocalizeArgs),
    /// Run the acceptance suite
    Accept(AcceptArgs),
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// torus1, torus2 or sphere2
    #[arg(long)]
    pub manifold: Option<String>,
    /// mexican:m, paper-torus or gauss
    #[arg(long)]
    pub symbol: Option<String>,
    /// Scale, or a comma-separated list of scales
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Colatitude samples lo:hi:n (sphere2), e.g. 0:pi:512
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Torus point x[,y]
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Torus grid with this many points per axis
    #[arg(long)]
    pub grid: Option<String>,
    /// kernel, 4pi or t2pi
    #[arg(long)]
    pub report: Option<String>,
    /// Degree cutoff of the zonal series
    #[arg(long = "l-max")]
    pub l_max: Option<String>,
    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// ht-approx, gt-approx, theta-duality or torus-table
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    #[arg(long = "l-max")]
    pub l_max: Option<String>,
    /// Failure threshold on the reported error
    #[arg(long)]
    pub tolerance: Option<String>,
    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Debug, Args)]
pub struct CwtArgs {
    /// Spectral field CSV
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long)]
    pub symbol: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long)]
    pub symbol: Option<String>,
    /// Target relative error used to choose the scale grid
    #[arg(long = "rel-err")]
    pub rel_err: Option<String>,
    /// Explicit scale grid bounds (instead of --rel-err)
    #[arg(long = "t-min")]
    pub t_min: Option<String>,
    #[arg(long = "t-max")]
    pub t_max: Option<String>,
    #[arg(long = "nodes-per-decade")]
    pub nodes_per_decade: Option<String>,
    /// Failure threshold on the measured relative error
    #[arg(long)]
    pub tolerance: Option<String>,
    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Debug, Args)]
pub struct HolderArgs {
    #[arg(long)]
    pub input: Option<String>,
    /// Use the built-in |sin πr|^{1/2} field with this bandlimit
    #[arg(long = "test-field")]
    pub test_field: Option<String>,
    #[arg(long)]
    pub symbol: Option<String>,
    /// Fit window lo:hi
    #[arg(long)]
    pub window: Option<String>,
    /// Number of log-spaced scales in the window
    #[arg(long)]
    pub scales: Option<String>,
    /// Synthesis grid points per axis
    #[arg(long)]
    pub resolution: Option<String>,
    #[arg(long = "expect-alpha")]
    pub expect_alpha: Option<String>,
    #[arg(long)]
    pub tolerance: Option<String>,
    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    #[arg(long)]
    pub manifold: Option<String>,
    #[arg(long)]
    pub symbol: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Exponent N of the (1 + d/t) weight
    #[arg(long)]
    pub power: Option<String>,
    #[arg(long = "max-ratio")]
    pub max_ratio: Option<String>,
    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Debug, Args)]
pub struct AcceptArgs {
    #[command(flatten)]
    pub shared: Shared,
}

type Pairs<'a> = Vec<(&'static str, &'a Option<String>)>;

impl Sub {
    fn parts(&self) -> (Command, &Shared, Pairs<'_>) {
        match self {
            Sub::Kernel(a) => (
                Command::Kernel,
                &a.shared,
                vec![
                    ("manifold", &a.manifold),
                    ("symbol", &a.symbol),
                    ("t", &a.t),
                    ("theta", &a.theta),
                    ("point", &a.point),
                    ("grid", &a.grid),
                    ("report", &a.report),
                    ("l-max", &a.l_max),
                ],
            ),
            Sub::Validate(a) => (
                Command::Validate,
                &a.shared,
                vec![
                    ("target", &a.target),
                    ("t", &a.t),
                    ("theta", &a.theta),
                    ("l-max", &a.l_max),
                    ("tolerance", &a.tolerance),
                ],
            ),
            Sub::Cwt(a) => (
                Command::Cwt,
                &a.shared,
                vec![("input", &a.input), ("symbol", &a.symbol), ("t", &a.t)],
            ),
            Sub::Reconstruct(a) => (
                Command::Reconstruct,
                &a.shared,
                vec![
                    ("input", &a.input),
                    ("symbol", &a.symbol),
                    ("rel-err", &a.rel_err),
                    ("t-min", &a.t_min),
                    ("t-max", &a.t_max),
                    ("nodes-per-decade", &a.nodes_per_decade),
                    ("tolerance", &a.tolerance),
                ],
            ),
            Sub::Holder(a) => (
                Command::Holder,
                &a.shared,
                vec![
                    ("input", &a.input),
                    ("test-field", &a.test_field),
                    ("symbol", &a.symbol),
                    ("window", &a.window),
                    ("scales", &a.scales),
                    ("resolution", &a.resolution),
                    ("expect-alpha", &a.expect_alpha),
                    ("tolerance", &a.tolerance),
                ],
            ),
            Sub::Localize(a) => (
                Command::Localize,
                &a.shared,
                vec![
                    ("manifold", &a.manifold),
                    ("symbol", &a.symbol),
                    ("t", &a.t),
                    ("power", &a.power),
                    ("max-ratio", &a.max_ratio),
                ],
            ),
            Sub::Accept(a) => (Command::Accept, &a.shared, Vec::new()),
        }
    }
}

impl Cli {
    /// The config file first, then every flag on top.
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let (command, shared, pairs) = self.command.parts();
        let mut cfg = RunConfig::new(command);
        if let Some(path) = &shared.config {
            cfg.merge_file(path)?;
        }
        for (key, value) in pairs.into_iter().chain([("output", &shared.output)]) {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}
