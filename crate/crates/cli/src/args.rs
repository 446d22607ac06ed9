use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use tcl_core::regions::Exponent;

/// Probe joint convexity and concavity of matrix trace functionals.
#[derive(Parser, Debug, Clone, Serialize, Deserialize)]
#[command(name = "tcl", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct GlobalOpts {
    /// Base seed for all random draws (TCL_SEED overrides it when set)
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Matrix dimension
    #[arg(long, global = true, default_value_t = 2, value_parser = positive)]
    pub dim: usize,

    /// Random trials per probe / point
    #[arg(long, global = true, default_value_t = 1000, value_parser = positive)]
    pub trials: usize,

    /// Relative tolerance below which a normalized margin counts as a violation
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,

    /// Write output here (plus `<out>.manifest.json`) instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads (default: available parallelism)
    #[arg(long, global = true, value_parser = positive)]
    pub workers: Option<usize>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
pub enum Command {
    /// Region verdicts for an exponent choice
    Classify(ClassifyArgs),
    /// Classify and probe every point of a (p, q, s) grid
    Scan(ScanArgs),
    /// Random-search probe of one functional
    Probe(ProbeArgs),
    /// Replay an explicit counterexample construction
    #[command(subcommand)]
    Counterexample(CounterexampleCmd),
    /// Check the variational formulas for Tr[X^s] on random inputs
    Variational(VariationalArgs),
    /// Data-processing checks for α–z Rényi divergences over a grid
    Dpi(DpiArgs),
    /// Re-run the command recorded in a manifest
    Replay(ReplayArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    /// Tr[(A^{q/2} B^p A^{q/2})^s]
    Trace,
    /// A^{q/2} B^p A^{q/2}
    Operator,
    /// Tr[A^{q/2} B^p A^{q/2} C^r]
    Triple,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyArgs {
    #[arg(long, value_enum, default_value_t = MapKind::Trace)]
    pub map: MapKind,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Exponent,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Exponent,
    /// Outer power (trace map)
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<Exponent>,
    /// Power of C (triple map)
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<Exponent>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ScanArgs {
    /// Comma list ("1/2,1,3/2") or range "lo:hi:n"
    #[arg(long, allow_hyphen_values = true)]
    pub p_grid: String,
    #[arg(long, allow_hyphen_values = true)]
    pub q_grid: String,
    #[arg(long, allow_hyphen_values = true)]
    pub s_grid: String,
    /// Mixing weights for the midpoint test
    #[arg(long, default_value = "0.5")]
    pub lambdas: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionalKind {
    Trace,
    Psi,
    PsiDiagonal,
    Operator,
    Triple,
    Epstein,
    /// Cross-check Φ against its Ψ_K reformulations
    Equivalence,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionArg {
    Convex,
    Concave,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ProbeArgs {
    #[arg(long, value_enum, default_value_t = FunctionalKind::Trace)]
    pub functional: FunctionalKind,
    #[arg(long, value_enum, default_value_t = DirectionArg::Convex)]
    pub direction: DirectionArg,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<Exponent>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<Exponent>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<Exponent>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<Exponent>,
    /// Inner power (epstein)
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Outer power (epstein)
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<f64>,
    #[arg(long, default_value = "0.5")]
    pub lambdas: String,
    /// Locally refine the best candidate when no violation is found
    #[arg(long)]
    pub refine: bool,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
pub enum CounterexampleCmd {
    /// X ↦ |⟨w|X^r|v⟩|² at X₁ = 2I, X₂ = t·diag(2,4)
    Lemma33Neg {
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        #[arg(long, default_value_t = 1e-10)]
        t: f64,
    },
    /// X ↦ |⟨w|X^r|v⟩|² at X₁ = [[2,2],[2,2]], X₂ = [[2,0],[0,0]]
    Lemma33Mid {
        #[arg(long)]
        r: f64,
    },
    /// Scaling argument against operator concavity
    Homogeneity {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Unitary dilation of Ψ_K for a random contraction K
    Dilation {
        #[arg(long)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        #[arg(long)]
        s: f64,
        /// Spectral norm of K
        #[arg(long, default_value_t = 0.5)]
        k_norm: f64,
        /// Comma list of t values (default: decades until convergence)
        #[arg(long)]
        schedule: Option<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Sup,
    Inf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct VariationalArgs {
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Fixed s; drawn per sample when omitted
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, default_value_t = 200, value_parser = positive)]
    pub samples: usize,
    /// Random feasible Z compared against the certificate per sample
    #[arg(long, default_value_t = 50)]
    pub random_z: usize,
    /// Gradient-search steps
    #[arg(long, default_value_t = tcl_core::functionals::VARIATIONAL_STEPS)]
    pub steps: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct DpiArgs {
    /// Comma list or range "lo:hi:n"
    #[arg(long)]
    pub alpha_grid: String,
    /// Comma list or range "lo:hi:n"
    #[arg(long)]
    pub z_grid: String,
    /// Inclusive dimension range "lo:hi"
    #[arg(long, default_value = "2:4")]
    pub dims: String,
    #[arg(long, default_value_t = 4, value_parser = positive)]
    pub max_env: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
