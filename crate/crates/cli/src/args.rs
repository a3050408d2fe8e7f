use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "pseudocalc", version, about = "Pseudo-integrals and Hardy-type inequalities on [0,1]")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a pseudo-integral.
    Integrate(IntegrateArgs),
    /// Check one Hardy-type inequality.
    Hardy(HardyArgs),
    /// Rerun a built-in worked example against its published figures.
    Reproduce(ReproduceArgs),
    /// Run a seeded campaign of random inequality checks.
    Fuzz(FuzzArgs),
    /// Recompute a check at increasing resolution.
    Refine(RefineArgs),
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    /// Integrand in `x` (and `y` for two dimensions).
    #[arg(long = "f", value_name = "EXPR")]
    pub f: String,

    /// Generator spec, e.g. `sqrt`, `power:0.5`, `exp:4`.
    #[arg(long = "g", value_name = "GEN", conflicts_with = "semiring")]
    pub g: Option<String>,

    /// Semiring spec: `g:<gen>`, `supplus`, `suptimes` or `maxmin`.
    #[arg(long, value_name = "SPEC")]
    pub semiring: Option<String>,

    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub dim: u8,

    /// `a,b` or `a,b,c,d`; defaults to the unit interval or square.
    #[arg(long, value_name = "BOUNDS", allow_hyphen_values = true)]
    pub domain: Option<String>,

    /// Density of the sup-measure, a function of `x`.
    #[arg(long, value_name = "EXPR")]
    pub psi: Option<String>,

    /// Sugeno integral with respect to Lebesgue measure.
    #[arg(long, conflicts_with_all = ["g", "semiring", "psi"])]
    pub sugeno: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    G,
    Sup,
    Sugeno,
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizationArg {
    RectMeasure,
    Area,
}

/// A scenario, from a file or from flags.
#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["f", "g", "semiring", "kind", "p", "domain", "psi"])]
    pub scenario: Option<PathBuf>,

    #[arg(long = "f", value_name = "EXPR")]
    pub f: Option<String>,

    #[arg(long = "g", value_name = "GEN", conflicts_with = "semiring")]
    pub g: Option<String>,

    #[arg(long, value_name = "SPEC")]
    pub semiring: Option<String>,

    /// Which inequality; inferred from `--g`/`--semiring` when omitted.
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,

    /// Exponent, a number or a constant expression such as `1/6`.
    #[arg(long, allow_hyphen_values = true, value_name = "EXPR")]
    pub p: Option<String>,

    #[arg(long, value_name = "BOUNDS", allow_hyphen_values = true)]
    pub domain: Option<String>,

    #[arg(long, value_name = "EXPR")]
    pub psi: Option<String>,

    /// Normalisation of the sup kernel.
    #[arg(long, value_enum)]
    pub normalization: Option<NormalizationArg>,
}

#[derive(Debug, Args)]
pub struct HardyArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,

    /// Explain the generator inequality for p < 1 instead of checking it.
    #[arg(long)]
    pub diagnostics: bool,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// One of ex32, ex33, remark35a, remark35b, remark35c, ex38, ex39, classical.
    pub name: String,
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    /// Campaign JSON; omitted fields take their defaults.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[arg(long)]
    pub trials: Option<usize>,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Directory receiving one scenario file per flagged trial.
    #[arg(long, value_name = "DIR")]
    pub corpus: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RefineArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,

    /// Comma-separated ascending levels.
    #[arg(long, default_value = "2,3,4,5,6", value_delimiter = ',')]
    pub levels: Vec<u32>,
}
