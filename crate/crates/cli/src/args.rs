//! Subcommand arguments. Every struct doubles as the manifest schema: a
//! manifest is `{"op": "<subcommand>", ...}` with the flag names in
//! snake_case as keys.

use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use scalecalc::quantize::Potential;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::input::{parse_json, FieldSpec, GenSpec};

fn gen_arg(s: &str) -> Result<GenSpec, String> {
    parse_json(s)
}

fn potential_arg(s: &str) -> Result<Potential, String> {
    parse_json(s)
}

fn field_arg(s: &str) -> Result<FieldSpec, String> {
    parse_json(s)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a generator to a `t,value` CSV.
    Gen(GenArgs),
    /// Quantum differences or the complex scale derivative.
    Deriv(DerivArgs),
    /// Minimal resolution at threshold `h`.
    Minres(MinresArgs),
    /// Graph-length scale law and fitted Hölder exponent.
    Scalelaw(ScalelawArgs),
    /// Box-counting dimension of the graph.
    Dim(DimArgs),
    /// Direct scale derivative of a polynomial field against its expansion.
    ItoCheck(ItoArgs),
    /// Exact bialgebra axioms and the evaluation diagram on random instances.
    AlgebraCheck(AlgebraArgs),
    /// Complex local fractional derivative scan.
    Fracscan(FracArgs),
    /// Scale Euler-Lagrange residual along a path, through both quantization orders.
    Quantize(QuantizeArgs),
    /// Residual of the generalized, classical or nonlinear wave equation.
    GseResidual(GseArgs),
    /// Check the difference equations defining the principal paths.
    SchrodCheck(SchrodArgs),
    /// Chord-length scaling exponent.
    Heisenberg(HeisenbergArgs),
    /// Run a JSON manifest.
    Run(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Deriv(_) => "deriv",
            Command::Minres(_) => "minres",
            Command::Scalelaw(_) => "scalelaw",
            Command::Dim(_) => "dim",
            Command::ItoCheck(_) => "ito-check",
            Command::AlgebraCheck(_) => "algebra-check",
            Command::Fracscan(_) => "fracscan",
            Command::Quantize(_) => "quantize",
            Command::GseResidual(_) => "gse-residual",
            Command::SchrodCheck(_) => "schrod-check",
            Command::Heisenberg(_) => "heisenberg",
            Command::Run(_) => "run",
        }
    }
}

fn fields<T: serde::de::DeserializeOwned>(value: Value) -> CliResult<T> {
    serde_path_to_error::deserialize(value)
        .map_err(|e| CliError::Usage(format!("manifest field `{}`: {}", e.path(), e.inner())))
}

/// Reads `{"op": ..., <fields>}` into the matching subcommand.
pub fn parse_manifest(mut value: Value) -> CliResult<Command> {
    let obj = value
        .as_object_mut()
        .ok_or_else(|| CliError::usage("manifest", "expected a JSON object"))?;
    let op = match obj.remove("op") {
        Some(Value::String(s)) => s,
        Some(_) => return Err(CliError::usage("op", "expected a subcommand name")),
        None => return Err(CliError::usage("op", "missing")),
    };
    Ok(match op.as_str() {
        "gen" => Command::Gen(fields(value)?),
        "deriv" => Command::Deriv(fields(value)?),
        "minres" => Command::Minres(fields(value)?),
        "scalelaw" => Command::Scalelaw(fields(value)?),
        "dim" => Command::Dim(fields(value)?),
        "ito-check" => Command::ItoCheck(fields(value)?),
        "algebra-check" => Command::AlgebraCheck(fields(value)?),
        "fracscan" => Command::Fracscan(fields(value)?),
        "quantize" => Command::Quantize(fields(value)?),
        "gse-residual" => Command::GseResidual(fields(value)?),
        "schrod-check" => Command::SchrodCheck(fields(value)?),
        "heisenberg" => Command::Heisenberg(fields(value)?),
        other => {
            return Err(CliError::usage(
                "op",
                format!("unknown subcommand `{other}`"),
            ))
        }
    })
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenArgs {
    /// Generator as JSON, e.g. '{"name":"takagi","alpha":0.5,"dt":0.001,"length":1001}'.
    #[arg(long, value_parser = gen_arg)]
    pub gen: GenSpec,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivKind {
    #[default]
    Scale,
    Plus,
    Minus,
}

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivArgs {
    /// `t,value` CSV.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_parser = gen_arg)]
    pub gen: Option<GenSpec>,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t)]
    #[serde(default)]
    pub kind: DerivKind,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinresArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_parser = gen_arg)]
    pub gen: Option<GenSpec>,
    #[arg(long)]
    pub h: f64,
    /// Widest width in grid steps; defaults to an eighth of the domain.
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Full JSON report including per-point resolutions.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalelawArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_parser = gen_arg)]
    pub gen: Option<GenSpec>,
    /// Explicit widths, sorted.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Dyadic grid widths between these bounds.
    #[arg(long)]
    pub eps_min: Option<f64>,
    #[arg(long)]
    pub eps_max: Option<f64>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
    /// `log_eps,log_length` rows.
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
}

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_parser = gen_arg)]
    pub gen: Option<GenSpec>,
    #[arg(long, value_delimiter = ',')]
    pub box_sizes: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn square() -> Vec<f64> {
    vec![0.0, 0.0, 1.0]
}

fn two() -> usize {
    2
}

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItoArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_parser = gen_arg)]
    pub gen: Option<GenSpec>,
    /// Polynomial field `Σ c_m x^m`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = square())]
    #[serde(default = "square")]
    pub coeffs: Vec<f64>,
    #[arg(long, default_value_t = 2)]
    #[serde(default = "two")]
    pub order: usize,
    #[arg(long)]
    pub eps: f64,
    /// Further widths for the remainder trend.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<f64>>,
    /// `t,re_direct,im_direct,re_expansion,im_expansion` rows at `eps`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn three() -> usize {
    3
}

fn hundred() -> usize {
    100
}

fn default_seed() -> u64 {
    0x5eed
}

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraArgs {
    #[arg(long, default_value_t = 3)]
    #[serde(default = "three")]
    pub max_word_len: usize,
    #[arg(long, default_value_t = 100)]
    #[serde(default = "hundred")]
    pub trials: usize,
    #[arg(long, default_value_t = default_seed())]
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombinationArg {
    #[default]
    Antisymmetric,
    Literal,
}

fn sixty_four() -> usize {
    64
}

fn twelve() -> usize {
    12
}

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FracArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_parser = gen_arg)]
    pub gen: Option<GenSpec>,
    #[arg(long)]
    pub alpha: f64,
    /// Scan times; defaults to `count` evenly spaced interior grid points.
    #[arg(long, value_delimiter = ',')]
    pub points: Option<Vec<f64>>,
    #[arg(long, default_value_t = 64)]
    #[serde(default = "sixty_four")]
    pub count: usize,
    #[arg(long, default_value_t = 12)]
    #[serde(default = "twelve")]
    pub levels: usize,
    #[arg(long, value_enum, default_value_t)]
    #[serde(default)]
    pub combination: CombinationArg,
    /// `t,re,im,flag` rows.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantizeArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_parser = gen_arg)]
    pub gen: Option<GenSpec>,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "one")]
    pub m: f64,
    /// Potential as JSON, e.g. '{"name":"harmonic","k":1}'.
    #[arg(long, value_parser = potential_arg)]
    pub potential: Option<Potential>,
    /// Regularity threshold; when set, paths with vanishing minimal
    /// resolution use central differences.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    #[default]
    Gse,
    Classical,
    Nngse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AEpsMode {
    /// `a_eps` constant, default `-2iγ`.
    #[default]
    Constant,
    /// `a_{ε,2}` of a trajectory.
    Measured,
    /// `t,re,im` CSV.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientArg {
    #[default]
    Homogeneous,
    InverseSquare,
}

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GseArgs {
    /// `x,t,re,im` CSV ordered by t, then x.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Analytic field as JSON, e.g.
    /// '{"name":"gaussian","sigma":1,"k":1,"x":[-8,0.05,321],"t":[0,0.025,41]}'.
    #[arg(long, value_parser = field_arg)]
    pub field: Option<FieldSpec>,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "one")]
    pub m: f64,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "one")]
    pub hbar: f64,
    /// Defaults to `hbar / 2m`.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_parser = potential_arg)]
    pub potential: Option<Potential>,
    /// Gauge function α(x), in the same form as a potential.
    #[arg(long, value_parser = potential_arg)]
    pub alpha_gauge: Option<Potential>,
    #[arg(long, value_enum, default_value_t)]
    #[serde(default)]
    pub equation: Equation,
    #[arg(long, value_enum, default_value_t)]
    #[serde(default)]
    pub a_eps_mode: AEpsMode,
    /// `re,im` for the constant mode.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub a_eps: Option<Vec<f64>>,
    /// `t,re,im` CSV for the file mode.
    #[arg(long)]
    pub a_eps_file: Option<PathBuf>,
    /// Trajectory for the measured mode, as a `t,value` CSV.
    #[arg(long)]
    pub path_input: Option<PathBuf>,
    #[arg(long, value_parser = gen_arg)]
    pub path_gen: Option<GenSpec>,
    /// Width for the measured mode.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    #[serde(default)]
    pub gradient: GradientArg,
    /// `re,im` of the nonlinear equation's constant.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alpha_c: Option<Vec<f64>>,
    /// Also evaluate the classical residual and report whether it is identical.
    #[arg(long)]
    #[serde(default)]
    pub compare_classical: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn tight() -> f64 {
    1e-12
}

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchrodArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_parser = gen_arg)]
    pub gen: Option<GenSpec>,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "one")]
    pub hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "one")]
    pub m: f64,
    #[arg(long, default_value_t = 1e-12)]
    #[serde(default = "tight")]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeisenbergArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_parser = gen_arg)]
    pub gen: Option<GenSpec>,
    /// Time steps; defaults to dyadic multiples of dt from 4 dt to a 32nd of the domain.
    #[arg(long, value_delimiter = ',')]
    pub dt_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
