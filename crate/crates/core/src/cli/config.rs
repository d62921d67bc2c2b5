use std::path::Path;

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::dynamics::Resonance;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A complete, reproducible invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub operation: Operation,
    /// `-` for standard output; absent to print only the summary line.
    #[serde(default)]
    pub output_path: Option<String>,
    #[serde(default)]
    pub format: Format,
    /// Physical inputs are given in MHz and multiplied by 2π.
    #[serde(default)]
    pub mhz2pi: bool,
}

impl RunConfig {
    pub fn new(operation: Operation) -> Self {
        Self {
            operation,
            output_path: None,
            format: Format::Csv,
            mhz2pi: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| Error::InvalidParams(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParams(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }

    pub fn command_name(&self) -> &'static str {
        self.operation.name()
    }

    /// Every numeric parameter must be finite; grids need positive extent and
    /// at least two points per axis.
    pub fn validate(&self) -> Result<()> {
        for (name, x) in self.operation.numbers() {
            if !x.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {x}")));
            }
        }
        let grid = match &self.operation {
            Operation::Spectrum(a) => Some(&a.grid),
            Operation::Arcs(a) => Some(&a.grid),
            _ => None,
        };
        if let Some(g) = grid {
            for (name, n) in [("n_lambda1", g.n_lambda1), ("n_lambda2", g.n_lambda2)] {
                if n.is_some_and(|n| n < 2) {
                    return Err(Error::InvalidParams(format!("{name} must be at least 2")));
                }
            }
            for (name, lo, hi) in [
                ("lambda1", g.lambda1_min, g.lambda1_max),
                ("lambda2", g.lambda2_min, g.lambda2_max),
            ] {
                if let (Some(lo), Some(hi)) = (lo, hi) {
                    if !(hi > lo) {
                        return Err(Error::InvalidParams(format!("{name} range must have positive extent")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "lowercase")]
pub enum Operation {
    /// Gap maxima and arc flags over a (λ1, λ2) grid.
    Spectrum(SpectrumArgs),
    /// The four EP3 points and the degenerate energy.
    Eps(EpsArgs),
    /// Winding number of the resultant vector along a closed loop.
    Winding(WindingArgs),
    /// No-jump evolution under the effective chain.
    Evolve(EvolveArgs),
    /// Two-tone modulated qubit compared with the effective chain.
    Modulated(ModulatedArgs),
    /// Matrix-pencil eigenenergies from simulated traces.
    Extract(ExtractArgs),
    /// Pairwise concurrences of chain eigenvectors.
    Concurrence(ConcurrenceArgs),
    /// EP2 lines and i-Fermi arcs crossing a grid.
    Arcs(ArcsArgs),
}

impl Operation {
    /// Every numeric parameter that was given, by name.
    fn numbers(&self) -> Vec<(&'static str, f64)> {
        let mut out = Vec::new();
        let mut opt = |name, x: Option<f64>| {
            if let Some(x) = x {
                out.push((name, x));
            }
        };
        let grid = |opt: &mut dyn FnMut(&'static str, Option<f64>), g: &GridArgs| {
            opt("lambda1_min", g.lambda1_min);
            opt("lambda1_max", g.lambda1_max);
            opt("lambda2_min", g.lambda2_min);
            opt("lambda2_max", g.lambda2_max);
        };
        match self {
            Operation::Spectrum(a) => {
                opt("kappa", Some(a.kappa));
                opt("flag_tol", a.flag_tol);
                grid(&mut opt, &a.grid);
            }
            Operation::Eps(a) => opt("kappa", Some(a.kappa)),
            Operation::Winding(a) => {
                opt("kappa", a.kappa);
                opt("gamma", a.gamma);
            }
            Operation::Evolve(a) => {
                opt("kappa", Some(a.kappa));
                opt("lambda1", Some(a.lambda1));
                opt("lambda2", a.lambda2);
                opt("dt", a.dt);
                opt("t_final", a.t_final);
            }
            Operation::Modulated(a) => {
                opt("lambda1", a.lambda1);
                opt("lambda2", a.lambda2);
                opt("dt", a.dt);
                opt("t_final", a.t_final);
                opt("output_dt", a.output_dt);
            }
            Operation::Extract(a) => {
                opt("kappa", Some(a.kappa));
                for p in &a.points {
                    opt("points", Some(p[0]));
                    opt("points", Some(p[1]));
                }
                opt("dt", a.dt);
                opt("t_final", a.t_final);
                opt("re_tol", a.re_tol);
            }
            Operation::Concurrence(a) => {
                opt("kappa", Some(a.kappa));
                opt("lambda1", a.lambda1);
                opt("lambda2", a.lambda2);
            }
            Operation::Arcs(a) => {
                opt("kappa", Some(a.kappa));
                grid(&mut opt, &a.grid);
            }
        }
        out
    }

    pub fn name(&self) -> &'static str {
        match self {
            Operation::Spectrum(_) => "spectrum",
            Operation::Eps(_) => "eps",
            Operation::Winding(_) => "winding",
            Operation::Evolve(_) => "evolve",
            Operation::Modulated(_) => "modulated",
            Operation::Extract(_) => "extract",
            Operation::Concurrence(_) => "concurrence",
            Operation::Arcs(_) => "arcs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridArgs {
    /// Defaults to 0.
    #[arg(long)]
    pub lambda1_min: Option<f64>,
    /// Defaults to 2κ.
    #[arg(long)]
    pub lambda1_max: Option<f64>,
    #[arg(long)]
    pub n_lambda1: Option<usize>,
    #[arg(long)]
    pub lambda2_min: Option<f64>,
    #[arg(long)]
    pub lambda2_max: Option<f64>,
    #[arg(long)]
    pub n_lambda2: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub kappa: f64,
    #[command(flatten)]
    #[serde(default)]
    pub grid: GridArgs,
    /// Arc-flag tolerance relative to max(κ, |λ1|, |λ2|).
    #[arg(long)]
    pub flag_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsArgs {
    #[arg(long)]
    pub kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FieldModel {
    #[default]
    Chain,
    Dp2d,
    Dp3d,
    Ep2qubit,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindingArgs {
    /// Chain decay rate (chain model only).
    #[arg(long)]
    pub kappa: Option<f64>,
    /// `square:<λm>`, `theta:<λm>:<n>`, `circle:<x>,<y>,<r>` or `polyline:<file or JSON>`.
    #[arg(long = "loop")]
    #[serde(rename = "loop")]
    pub loop_spec: String,
    /// Traverse the loop backwards.
    #[arg(long)]
    #[serde(default)]
    pub reverse: bool,
    #[arg(long, value_enum)]
    pub model: Option<FieldModel>,
    /// Dissipation rate of the EP2 qubit model.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub samples_per_edge: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveArgs {
    #[arg(long)]
    pub kappa: f64,
    #[arg(long)]
    pub lambda1: f64,
    /// Omit for the two-mode chain.
    #[arg(long)]
    pub lambda2: Option<f64>,
    /// Initially excited mode, 1-based (default 2).
    #[arg(long)]
    pub initial: Option<usize>,
    /// Step in μs (default 0.001).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Duration in μs (default 2).
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Record every n-th step (default 10).
    #[arg(long)]
    pub stride: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ResonanceArg {
    Bare,
    Dressed,
}

impl From<ResonanceArg> for Resonance {
    fn from(r: ResonanceArg) -> Self {
        match r {
            ResonanceArg::Bare => Resonance::Bare,
            ResonanceArg::Dressed => Resonance::Dressed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulatedArgs {
    /// Target λ1 (default 2π×0.21).
    #[arg(long)]
    pub lambda1: Option<f64>,
    /// Target λ2 (default 2π×0.31).
    #[arg(long)]
    pub lambda2: Option<f64>,
    #[arg(long, value_enum)]
    pub resonance: Option<ResonanceArg>,
    /// Step in μs (default: the largest step the modulation allows).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Duration in μs (default 1).
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Output spacing in μs (default 0.001).
    #[arg(long)]
    pub output_dt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractArgs {
    #[arg(long)]
    pub kappa: f64,
    /// Parameter point `λ1,λ2`; repeatable.
    #[arg(long = "point", value_parser = parse_point, required = true)]
    #[serde(rename = "points")]
    pub points: Vec<[f64; 2]>,
    /// Mode whose amplitude is fitted, 1-based (default 2).
    #[arg(long)]
    pub component: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Duration in μs (default 4).
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Record every n-th step (default 20).
    #[arg(long)]
    pub stride: Option<usize>,
    /// Tolerance on the near-imaginary energy, relative to κ.
    #[arg(long)]
    pub re_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcurrenceArgs {
    #[arg(long)]
    pub kappa: f64,
    /// Defaults to the first-quadrant EP3.
    #[arg(long, requires = "lambda2")]
    pub lambda1: Option<f64>,
    #[arg(long, requires = "lambda1")]
    pub lambda2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcsArgs {
    #[arg(long)]
    pub kappa: f64,
    #[command(flatten)]
    #[serde(default)]
    pub grid: GridArgs,
}

fn parse_point(text: &str) -> std::result::Result<[f64; 2], String> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| format!("expected `lambda1,lambda2`, got `{text}`"))?;
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
    Ok([parse(a)?, parse(b)?])
}
