//! Flag and config-file parsing, and resolution into a validated run config.
//!
//! Precedence is flags (or `DISKSTAT_THREADS`) > `--config` file > defaults.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use diskstat_core::numerics::QuadratureSpec;
use diskstat_core::{EnsembleParams, Fugacities, MergeConfig, Regime};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeArg {
    Bulk,
    Edge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand. Unset flags fall back to the file.
#[derive(Debug, Clone, Default, Args)]
pub struct SharedArgs {
    /// TOML file with any of the settings below (keys use underscores).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    pub print_config: bool,

    /// Potential exponent b > 0.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Point-charge exponent alpha > -1.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Single system size; shorthand for a one-point grid.
    #[arg(long, conflicts_with = "n_grid")]
    pub n: Option<usize>,
    /// Comma-separated system sizes.
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    pub regime: Option<RegimeArg>,
    /// Base radius (bulk only), 0 < r < b^{-1/(2b)}.
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Comma-separated, strictly increasing offsets.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub offsets: Option<Vec<f64>>,
    /// Comma-separated fugacities, one per offset (or radius).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub u: Option<Vec<f64>>,
    /// Fixed radii instead of merging ones (mgf only).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub radii: Option<Vec<f64>>,
    /// Relative tolerance of every quadrature.
    #[arg(long, allow_negative_numbers = true)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Cap on replicas * n gamma draws.
    #[arg(long)]
    pub max_draws: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "DISKSTAT_THREADS")]
    pub threads: Option<usize>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub b: Option<f64>,
    pub alpha: Option<f64>,
    pub n: Option<usize>,
    pub n_grid: Option<Vec<usize>>,
    pub regime: Option<RegimeArg>,
    pub r: Option<f64>,
    pub offsets: Option<Vec<f64>>,
    pub u: Option<Vec<f64>>,
    pub radii: Option<Vec<f64>>,
    pub rel_tol: Option<f64>,
    pub seed: Option<u64>,
    pub replicas: Option<usize>,
    pub max_draws: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

/// Fully resolved settings. Printed by `--print-config`.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub b: f64,
    pub alpha: f64,
    pub n_grid: Vec<usize>,
    pub regime: RegimeArg,
    pub r: f64,
    pub offsets: Vec<f64>,
    pub u: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    pub rel_tol: f64,
    pub seed: u64,
    pub replicas: usize,
    pub max_draws: u64,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

pub const DEFAULT_GRID: [usize; 4] = [256, 1024, 4096, 16384];

/// Per-command default system sizes.
pub fn default_grid(command: &str) -> Vec<usize> {
    match command {
        "sample" => vec![1000],
        _ => DEFAULT_GRID.to_vec(),
    }
}

fn load_file(path: &PathBuf) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("config: cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Validation(format!("config: {}: {e}", path.display())))
}

fn invalid(field: &str, detail: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("invalid `{field}`: {detail}"))
}

impl RunConfig {
    pub fn resolve(args: &SharedArgs, command: &str) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => load_file(p)?,
            None => FileConfig::default(),
        };
        let grid_flag = args.n_grid.clone().or(args.n.map(|n| vec![n]));
        let grid_file = file.n_grid.clone().or(file.n.map(|n| vec![n]));
        let cfg = RunConfig {
            b: args.b.or(file.b).unwrap_or(1.0),
            alpha: args.alpha.or(file.alpha).unwrap_or(0.0),
            n_grid: grid_flag.or(grid_file).unwrap_or_else(|| default_grid(command)),
            regime: args.regime.or(file.regime).unwrap_or(RegimeArg::Bulk),
            r: args.r.or(file.r).unwrap_or(0.6),
            offsets: args.offsets.clone().or(file.offsets).unwrap_or_else(|| vec![-0.3, 0.4]),
            u: args.u.clone().or(file.u).unwrap_or_else(|| vec![0.2, -0.1]),
            radii: args.radii.clone().or(file.radii),
            rel_tol: args
                .rel_tol
                .or(file.rel_tol)
                .unwrap_or(QuadratureSpec::default().rel_tol),
            seed: args.seed.or(file.seed).unwrap_or(20_240_607),
            replicas: args.replicas.or(file.replicas).unwrap_or(10_000),
            max_draws: args
                .max_draws
                .or(file.max_draws)
                .unwrap_or(diskstat_core::sampler::DEFAULT_DRAW_BUDGET),
            format: args.format.or(file.format).unwrap_or(Format::Csv),
            out: args.out.clone().or(file.out),
            threads: args.threads.or(file.threads),
        };
        cfg.validate(command)?;
        Ok(cfg)
    }

    fn validate(&self, command: &str) -> Result<(), CliError> {
        if self.n_grid.is_empty() {
            return Err(invalid("n_grid", "must not be empty"));
        }
        for &n in &self.n_grid {
            self.params(n)?;
        }
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(invalid("threads", "must be at least 1"));
            }
        }
        if self.replicas == 0 {
            return Err(invalid("replicas", "must be at least 1"));
        }
        self.quadrature()?;
        match (&self.radii, command) {
            (Some(radii), "mgf") => {
                diskstat_core::ensemble::check_radii(radii).map_err(CliError::from)?;
                if radii.len() != self.u.len() {
                    return Err(invalid(
                        "u",
                        format!("{} fugacities for {} radii", self.u.len(), radii.len()),
                    ));
                }
            }
            (Some(_), _) => {
                return Err(invalid(
                    "radii",
                    format!("fixed radii are only accepted by mgf, not {command}"),
                ))
            }
            (None, _) => {
                let merge = self.merge_config()?;
                if command != "moments" && self.u.len() != merge.m() {
                    return Err(invalid(
                        "u",
                        format!("{} fugacities for {} offsets", self.u.len(), merge.m()),
                    ));
                }
            }
        }
        Fugacities::new(self.u.clone())?;
        match command {
            "converge" => check_geometric(&self.n_grid)?,
            "sample" if self.n_grid.len() != 1 => {
                return Err(invalid("n_grid", "sample takes a single n"));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn params(&self, n: usize) -> Result<EnsembleParams, CliError> {
        Ok(EnsembleParams::new(self.b, self.alpha, n)?)
    }

    pub fn merge_config(&self) -> Result<MergeConfig, CliError> {
        let regime = match self.regime {
            RegimeArg::Bulk => Regime::Bulk { r: self.r },
            RegimeArg::Edge => Regime::Edge,
        };
        let cfg = MergeConfig::new(regime, self.offsets.clone())?;
        cfg.validate_for(self.b)?;
        Ok(cfg)
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec, CliError> {
        let q = QuadratureSpec {
            rel_tol: self.rel_tol,
            ..QuadratureSpec::default()
        };
        q.validate()?;
        Ok(q)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }
}

fn check_geometric(grid: &[usize]) -> Result<(), CliError> {
    if grid.len() < 4 {
        return Err(invalid("n_grid", "convergence studies need at least 4 sizes"));
    }
    let ratio = grid[1] as f64 / grid[0] as f64;
    let geometric = ratio > 1.0
        && grid
            .windows(2)
            .all(|w| ((w[1] as f64 / w[0] as f64) - ratio).abs() <= 1e-9 * ratio);
    if !geometric {
        return Err(invalid(
            "n_grid",
            "convergence studies need an increasing geometric grid",
        ));
    }
    Ok(())
}
