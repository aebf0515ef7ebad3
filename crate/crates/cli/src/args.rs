use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "waveguide", version, about = "Spectra of thin Dirac waveguides with infinite-mass boundary")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transverse wavenumber and eigenvalue of one branch over a range of μ.
    Transverse(TransverseArgs),
    /// Dispersion curves ν_j(ξ, μ) at fixed μ.
    Dispersion(DispersionArgs),
    /// Taylor coefficients of k₁(μ) and ν₁(0, μ) at μ = 0.
    Series(SeriesArgs),
    /// Eigenvalues and negative count of the Schrödinger model.
    Effective(EffectiveArgs),
    /// Spectrum report of the 2D Dirac operator at one width.
    Full2d(Full2dArgs),
    /// Thin-width asymptotics along a sequence of widths, with checks.
    Verify(VerifyArgs),
    /// Write a geometry document.
    #[command(subcommand)]
    Geometry(GeometryCommand),
}

/// Inclusive uniform grid `a:b:n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let span = self.end - self.start;
        let last = (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + span * i as f64 / last).collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(format!("expected a:b:n, got '{s}'"));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("'{t}' is not a finite number"))
        };
        let count: usize = n.trim().parse().map_err(|_| format!("'{n}' is not a point count"))?;
        if count == 0 {
            return Err("point count must be positive".into());
        }
        Ok(Range { start: num(a)?, end: num(b)?, count })
    }
}

/// Comma-separated list of finite numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct NumberList(pub Vec<f64>);

impl FromStr for NumberList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_list(s).map(NumberList)
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("'{t}' is not a finite number"))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args, Serialize)]
pub struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(short, long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TransverseArgs {
    /// μ grid as start:end:count.
    #[arg(long, allow_hyphen_values = true)]
    pub mu_range: Range,
    #[arg(long, default_value_t = 1)]
    pub branch: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct DispersionArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub mu: f64,
    /// ξ grid as start:end:count.
    #[arg(long, allow_hyphen_values = true)]
    pub xi_range: Range,
    /// Number of branches j = 1..=J.
    #[arg(long, default_value_t = 3)]
    pub branches: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SeriesArgs {
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct EffectiveArgs {
    /// Geometry file, or inline `circle:R`, `ellipse:A,B`, `bump:AMP,WIDTH,L`.
    #[arg(long)]
    pub geom: String,
    /// Flux for closed curves: πp2 (default), 2mπ, πm2 or a number c giving c/ℓ.
    #[arg(long, allow_hyphen_values = true)]
    pub flux: Option<String>,
    /// Number of eigenvalues listed.
    #[arg(long, default_value_t = 5)]
    pub count: usize,
    /// Plane waves |p| <= P for closed curves, grid nodes for open ones.
    #[arg(long)]
    pub resolution: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct TruncationArgs {
    /// Fourier modes p in [-P-1, P].
    #[arg(long, default_value_t = 24)]
    pub p: usize,
    /// Transverse branches per sign.
    #[arg(long, default_value_t = 8)]
    pub nt: usize,
    /// Gauss-Legendre nodes across the strip.
    #[arg(long, default_value_t = 64)]
    pub nq: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct Full2dArgs {
    #[arg(long)]
    pub geom: String,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub m: f64,
    #[arg(long, default_value_t = 2)]
    pub jmax: usize,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    /// Skip the enlarged-truncation check.
    #[arg(long)]
    pub no_refine: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub geom: String,
    /// Strictly descending widths, comma separated.
    #[arg(long)]
    pub eps_list: NumberList,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub m: f64,
    #[arg(long, default_value_t = 2)]
    pub jmax: usize,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[arg(long)]
    pub no_refine: bool,
    /// Resolution of the Schrödinger model.
    #[arg(long, default_value_t = 64)]
    pub effective_resolution: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Parallel workers over the widths; results do not depend on it.
    #[arg(long, env = "WAVEGUIDE_WORKERS", default_value_t = 1)]
    #[serde(skip)]
    pub workers: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Subcommand)]
pub enum GeometryCommand {
    Circle {
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    Ellipse {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    Bump {
        #[arg(long, allow_hyphen_values = true)]
        amp: f64,
        #[arg(long)]
        width: f64,
        #[arg(long)]
        half_length: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_points_are_inclusive() {
        let r: Range = "-3:3:61".parse().unwrap();
        let p = r.points();
        assert_eq!(p.len(), 61);
        assert_eq!(p[0], -3.0);
        assert_eq!(p[30], 0.0);
        assert_eq!(p[60], 3.0);
        assert_eq!("2:5:1".parse::<Range>().unwrap().points(), vec![2.0]);
    }

    #[test]
    fn malformed_ranges_are_rejected() {
        for bad in ["1:2", "a:1:3", "0:1:0", "0:inf:3", "0:1:2:3"] {
            assert!(bad.parse::<Range>().is_err(), "{bad}");
        }
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("0.2, 0.1,0.05").unwrap(), vec![0.2, 0.1, 0.05]);
        assert!(parse_list("0.2,,0.1").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
