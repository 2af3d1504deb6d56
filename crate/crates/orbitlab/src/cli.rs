//! Command-line surface and the merge of `--config` files with flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};
use crate::report::Format;
use crate::spec::load_spec_value;

#[derive(Debug, Parser)]
#[command(
    name = "orbitlab",
    version,
    about = "Experiments on completely multiplicative functions f: ℕ → 𝕋"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON file whose keys supply defaults for the subcommand's flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output format (json unless stated otherwise by the subcommand).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Orbit (f(n), g(n+1)) summary: log-mass, star discrepancy, coverage.
    Scan(ScanArgs),
    /// Per-cell log-weighted masses of the orbit on a G×G grid.
    Coverage(CoverageArgs),
    /// Star and full discrepancy of the orbit of f (d = 1) or of (f, g).
    Discrepancy(DiscrepancyArgs),
    /// Erdős–Turán style bound from the correlation sums up to degree K.
    EtBound(EtBoundArgs),
    /// Pretentious distance 𝔻(f, g; x)².
    Distance(DistanceArgs),
    /// Logarithmic binary correlation of f(a₁n+b₁) g(a₂n+b₂).
    Correlation(CorrelationArgs),
    /// Sieved count Φ_{N,B}(x;q,a) against the main term.
    Sieve(SieveArgs),
    /// Level sets of a pair of root-of-unity valued functions.
    Levelset(LevelsetArgs),
    /// Beurling majorant coefficients or samples.
    Beurling(BeurlingArgs),
    /// Checks on the two counterexample families.
    Counterexample(CounterexampleArgs),
    /// Rational and irrational ratio families.
    Ratratio(RatratioArgs),
    /// Kronecker target search, or the prime-power search when --f is set.
    Kronecker(KroneckerArgs),
    /// Both sides of the concentration estimate.
    Concentration(ConcentrationArgs),
}

/// A count such as `x`, accepting `1e6` as well as `1000000`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Count(pub u64);

pub fn parse_count(s: &str) -> Result<Count, String> {
    let t = s.trim().replace('_', "");
    if let Ok(v) = t.parse::<u64>() {
        return Ok(Count(v));
    }
    match t.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(Count(v as u64)),
        _ => Err(format!("`{s}` is not a non-negative integer")),
    }
}

impl Serialize for Count {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.0)
    }
}

impl<'de> Deserialize<'de> for Count {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::Number(n) => match (n.as_u64(), n.as_f64()) {
                (Some(v), _) => Ok(Count(v)),
                (None, Some(v)) => parse_count(&v.to_string()).map_err(serde::de::Error::custom),
                _ => Err(serde::de::Error::custom("not a count")),
            },
            Value::String(s) => parse_count(&s).map_err(serde::de::Error::custom),
            other => Err(serde::de::Error::custom(format!(
                "expected a count, found {other}"
            ))),
        }
    }
}

fn spec_arg(s: &str) -> Result<Value, String> {
    load_spec_value(s)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct FnArgs {
    /// counterexample-i, counterexample-ii, ratratio-rational,
    /// ratratio-irrational or random-phase.
    #[arg(long)]
    pub preset: Option<String>,
    /// f as inline JSON or @file.
    #[arg(long, value_parser = spec_arg)]
    pub f: Option<Value>,
    /// g as inline JSON or @file.
    #[arg(long, value_parser = spec_arg)]
    pub g: Option<Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionArg {
    /// (f(n), g(n+1)).
    #[default]
    Forward,
    /// (f(n−1), g(n)).
    Backward,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub functions: FnArgs,
    /// Strictly increasing x values, e.g. 1e4,1e5,1e6.
    #[arg(long, value_parser = parse_count, value_delimiter = ',')]
    pub x: Vec<Count>,
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    /// Coverage grid size G.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Histogram resolution for the star discrepancy beyond the exact cap.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Emit the orbit points at the largest x instead of the summary.
    #[arg(long)]
    pub dump: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CoverageArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub functions: FnArgs,
    #[arg(long, value_parser = parse_count, value_delimiter = ',')]
    pub x: Vec<Count>,
    #[arg(long)]
    pub grid: Option<usize>,
    /// 2 for the pair orbit, 1 for the values of f alone.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct DiscrepancyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub functions: FnArgs,
    #[arg(long, value_parser = parse_count, value_delimiter = ',')]
    pub x: Vec<Count>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct EtBoundArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub functions: FnArgs,
    #[arg(long, value_parser = parse_count, value_delimiter = ',')]
    pub x: Vec<Count>,
    /// Degree K.
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: Option<usize>,
    /// Emit the correlation sums at the largest x instead of the bounds.
    #[arg(long)]
    pub coeffs: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct DistanceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub functions: FnArgs,
    #[arg(long, value_parser = parse_count, value_delimiter = ',')]
    pub x: Vec<Count>,
    /// Only primes above this bound count.
    #[arg(long = "N-low")]
    #[serde(rename = "N_low")]
    pub n_low: Option<u64>,
    /// With --t-max: also minimize over g·n^{it} on a log grid.
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub per_decade: Option<u32>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CorrelationArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub functions: FnArgs,
    #[arg(long, value_parser = parse_count, value_delimiter = ',')]
    pub x: Vec<Count>,
    #[arg(long)]
    pub a1: Option<u64>,
    #[arg(long)]
    pub b1: Option<u64>,
    #[arg(long)]
    pub a2: Option<u64>,
    #[arg(long)]
    pub b2: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SieveArgs {
    /// Sieve threshold N.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<u64>,
    /// Linear coefficient B.
    #[arg(long = "B")]
    #[serde(rename = "B")]
    pub b: Option<u64>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub a: Option<u64>,
    #[arg(long, value_parser = parse_count, value_delimiter = ',')]
    pub x: Vec<Count>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct LevelsetArgs {
    #[arg(long, value_parser = spec_arg)]
    pub h1: Option<Value>,
    #[arg(long, value_parser = spec_arg)]
    pub h2: Option<Value>,
    /// Level of h₁(n), as `a/b`.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Level of h₂(Bn+1), as `a/b`.
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<u64>,
    #[arg(long = "B")]
    #[serde(rename = "B")]
    pub b: Option<u64>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub a: Option<u64>,
    #[arg(long, value_parser = parse_count, value_delimiter = ',')]
    pub x: Vec<Count>,
    /// List the members at the largest x.
    #[arg(long)]
    pub members: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct BeurlingArgs {
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: Option<usize>,
    /// Emit the coefficients m, Re, Im.
    #[arg(long)]
    pub coeffs: bool,
    /// Sample majorant and minorant of this interval, `a,b`.
    #[arg(long, value_delimiter = ',')]
    pub interval: Vec<f64>,
    /// Number of offset grid points to sample.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    #[default]
    I,
    Ii,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CounterexampleArgs {
    #[arg(long, value_enum)]
    pub which: Option<Family>,
    /// Order of h₁ (family i).
    #[arg(long)]
    pub k: Option<u64>,
    /// Order of h₂ (family i).
    #[arg(long)]
    pub l: Option<u64>,
    #[arg(long)]
    pub t: Option<f64>,
    /// The exceptional prime (family ii).
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_parser = parse_count, value_delimiter = ',')]
    pub x: Vec<Count>,
    #[arg(long)]
    pub grid: Option<usize>,
    /// Bound for the exact structural checks.
    #[arg(long, value_parser = parse_count)]
    pub check_x: Option<Count>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct RatratioArgs {
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub l: Option<u64>,
    #[arg(long)]
    pub r1: Option<i64>,
    #[arg(long)]
    pub s1: Option<i64>,
    #[arg(long)]
    pub t_prime: Option<f64>,
    /// Use t = √2·t′ instead of (r₁/s₁)·t′.
    #[arg(long)]
    pub irrational: bool,
    #[arg(long, value_parser = parse_count, value_delimiter = ',')]
    pub x: Vec<Count>,
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct KroneckerArgs {
    /// One or two angles.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub target: Vec<String>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Search bound M.
    #[arg(long = "M", value_parser = parse_count)]
    #[serde(rename = "M")]
    pub m: Option<Count>,
    /// Required divisor of m.
    #[arg(long)]
    pub k: Option<u64>,
    /// Use the continued-fraction style recursion (single angle).
    #[arg(long)]
    pub fast: bool,
    /// Prime-power search for this function.
    #[arg(long, value_parser = spec_arg)]
    pub f: Option<Value>,
    #[arg(long)]
    pub z: Option<String>,
    #[arg(long)]
    pub u: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<u64>,
    #[arg(long, value_parser = parse_count)]
    pub prime_bound: Option<Count>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArgumentArg {
    /// f(n).
    #[default]
    N,
    /// f(Bn+1).
    Shifted,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ConcentrationArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub functions: FnArgs,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<u64>,
    #[arg(long = "B")]
    #[serde(rename = "B")]
    pub b: Option<u64>,
    #[arg(long, value_parser = parse_count, value_delimiter = ',')]
    pub x: Vec<Count>,
    #[arg(long, value_enum)]
    pub argument: Option<ArgumentArg>,
}

/// Keys a config file may carry besides the subcommand's own flags.
const GLOBAL_KEYS: [&str; 3] = ["command", "format", "out"];

fn is_unset(v: &Value) -> bool {
    match v {
        Value::Null | Value::Bool(false) => true,
        Value::Array(a) => a.is_empty(),
        _ => false,
    }
}

/// Overlays the flags in `cli` on `file`, returns the merged arguments and
/// their full JSON form.
pub fn resolve<T>(cli: &T, file: &Map<String, Value>) -> CliResult<(T, Value)>
where
    T: Serialize + DeserializeOwned + Default,
{
    let known = match serde_json::to_value(T::default())
        .map_err(|e| CliError::config("config", e.to_string()))?
    {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    let mut merged = Map::new();
    for (k, v) in file {
        if GLOBAL_KEYS.contains(&k.as_str()) {
            continue;
        }
        if !known.contains_key(k) {
            return Err(CliError::config(
                k.clone(),
                "unknown field for this command",
            ));
        }
        // attribute type errors to the key that caused them
        let mut single = Map::new();
        single.insert(k.clone(), v.clone());
        serde_json::from_value::<T>(Value::Object(single))
            .map_err(|e| CliError::config(k.clone(), e.to_string()))?;
        merged.insert(k.clone(), v.clone());
    }
    if let Value::Object(flags) =
        serde_json::to_value(cli).map_err(|e| CliError::config("flags", e.to_string()))?
    {
        for (k, v) in flags {
            if !is_unset(&v) {
                merged.insert(k, v);
            }
        }
    }
    let args: T = serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::config("config", e.to_string()))?;
    let full =
        serde_json::to_value(&args).map_err(|e| CliError::config("config", e.to_string()))?;
    Ok((args, full))
}

/// Parsed `--config` file; must be a JSON object.
pub fn load_config(path: &std::path::Path) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(CliError::config("config", "must be a JSON object")),
        Err(e) => Err(CliError::config("config", e.to_string())),
    }
}
