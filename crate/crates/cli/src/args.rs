use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::config::{self, CliError, Map};

#[derive(Parser, Debug)]
#[command(
    name = "multirec",
    version,
    about = "Exact experiments on multiple recurrence, progressions and weighted shifts"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// JSON configuration; command-line flags override its fields
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Arithmetic mode for commands with scalar sequences
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    pub output: Output,
    /// Orbit length / largest time examined
    #[arg(long, global = true, value_name = "N")]
    pub horizon: Option<u64>,
    /// Main search bound of the command (see the README)
    #[arg(long, global = true, value_name = "N")]
    pub budget: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Output {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Progression structure and density proxies of a set read from stdin
    AnalyzeSet(AnalyzeSetArgs),
    /// Iterates T_n x for n = 0..=horizon
    Orbit(OrbitArgs),
    /// Return times {n <= horizon : T_n x ∈ U}
    ReturnSet(ReturnSetArgs),
    /// Progression criterion grid for a backward shift
    ShiftCheck(ShiftCheckArgs),
    /// Multiple-recurrence witness search
    Multirec(MultirecArgs),
    /// Universal-vector construction and its error
    Universal(UniversalArgs),
    /// One row of the quantitative Szemerédi scaffolding
    Gowers(GowersArgs),
    /// Exact r_k(n)
    Szemeredi(SzemerediArgs),
    /// Two-colour van der Waerden check
    Vdw(VdwArgs),
    /// Weak-mixing pair witness search
    PairSearch(PairSearchArgs),
    /// Nested-ball refinement
    Nested(NestedArgs),
    /// Counts a with λ_a T^{a+iq} x ∈ U for all i <= m
    PuigCount(PuigCountArgs),
    /// Runs a command over a Cartesian parameter grid
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Default)]
pub struct AnalyzeSetArgs {
    /// Window for the Banach density proxy
    #[arg(long)]
    pub window: Option<u64>,
    /// Progression length (terms) for the fixed-step count
    #[arg(long)]
    pub length: Option<u64>,
    /// Number of progressions one step must reach
    #[arg(long)]
    pub threshold: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct OrbitArgs {
    /// Operator as JSON or shorthand (unit, constant:R, valley:M)
    #[arg(long)]
    pub operator: Option<String>,
    /// Scalar sequence: one, dyadic-sqrt, exp-sqrt or JSON
    #[arg(long)]
    pub scalars: Option<String>,
    /// Start vector: e3, 0 or JSON triples
    #[arg(long)]
    pub x: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct ReturnSetArgs {
    #[command(flatten)]
    pub orbit: OrbitArgs,
    /// Target ball as JSON or CENTER:RADIUS
    #[arg(long)]
    pub ball: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct ShiftCheckArgs {
    #[arg(long)]
    pub operator: Option<String>,
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub p_max: Option<u64>,
    #[arg(long)]
    pub m_max: Option<u64>,
    #[arg(long)]
    pub q_max: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct MultirecArgs {
    #[arg(long)]
    pub operator: Option<String>,
    #[arg(long)]
    pub ball: Option<String>,
    /// Number of steps: iterates 0, q, ..., mq
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub q_max: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct UniversalArgs {
    #[arg(long)]
    pub scalars: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
    /// Norm exponent: 1, 2 or inf
    #[arg(long)]
    pub p: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct GowersArgs {
    #[arg(long)]
    pub l: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct SzemerediArgs {
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct VdwArgs {
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct PairSearchArgs {
    #[arg(long)]
    pub operator: Option<String>,
    /// The set U both points start in
    #[arg(long)]
    pub ball: Option<String>,
    #[arg(long)]
    pub v1: Option<String>,
    #[arg(long)]
    pub v2: Option<String>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub a_max: Option<u64>,
    #[arg(long)]
    pub q_max: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct NestedArgs {
    #[arg(long)]
    pub operator: Option<String>,
    #[arg(long)]
    pub ball: Option<String>,
    #[arg(long)]
    pub stages: Option<u64>,
    #[arg(long)]
    pub q_max: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct PuigCountArgs {
    #[command(flatten)]
    pub orbit: OrbitArgs,
    #[arg(long)]
    pub ball: Option<String>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub q: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct SweepArgs {
    /// Command run at every grid point
    #[arg(long)]
    pub command: Option<String>,
    /// Grid dimension KEY=SPEC with SPEC a..b, a..b:step or a comma list
    #[arg(long, value_name = "KEY=SPEC")]
    pub grid: Vec<String>,
    /// Base field KEY=JSON shared by all points
    #[arg(long = "set", value_name = "KEY=JSON")]
    pub base: Vec<String>,
}

fn put(map: &mut Map, key: &str, value: Option<Value>) {
    if let Some(v) = value {
        map.insert(key.to_string(), v);
    }
}

fn put_bound(map: &mut Map, key: &str, value: Option<u64>) {
    if let Some(v) = value {
        config::bounds_mut(map).insert(key.to_string(), Value::from(v));
    }
}

fn conv<F>(flag: &str, raw: &Option<String>, f: F) -> Result<Option<Value>, CliError>
where
    F: Fn(&str) -> Result<Value, CliError>,
{
    raw.as_deref()
        .map(|s| f(s).map_err(|e| CliError::Input(format!("--{flag}: {e}"))))
        .transpose()
}

impl OrbitArgs {
    fn apply(&self, map: &mut Map) -> Result<(), CliError> {
        put(
            map,
            "operator",
            conv("operator", &self.operator, config::parse_operator)?,
        );
        put(map, "scalars", conv("scalars", &self.scalars, config::parse_scalars)?);
        put(map, "x", conv("x", &self.x, config::parse_vector)?);
        Ok(())
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::AnalyzeSet(_) => "analyze-set",
            Command::Orbit(_) => "orbit",
            Command::ReturnSet(_) => "return-set",
            Command::ShiftCheck(_) => "shift-check",
            Command::Multirec(_) => "multirec",
            Command::Universal(_) => "universal",
            Command::Gowers(_) => "gowers",
            Command::Szemeredi(_) => "szemeredi",
            Command::Vdw(_) => "vdw",
            Command::PairSearch(_) => "pair-search",
            Command::Nested(_) => "nested",
            Command::PuigCount(_) => "puig-count",
            Command::Sweep(_) => "sweep",
        }
    }

    /// Writes the command-specific flags into the configuration map.
    pub fn apply_flags(&self, map: &mut Map) -> Result<(), CliError> {
        let num = |v: Option<u64>| v.map(Value::from);
        match self {
            Command::AnalyzeSet(a) => {
                put(map, "window", num(a.window));
                put(map, "length", num(a.length));
                put(map, "threshold", num(a.threshold));
            }
            Command::Orbit(a) => a.apply(map)?,
            Command::ReturnSet(a) => {
                a.orbit.apply(map)?;
                put(map, "ball", conv("ball", &a.ball, config::parse_ball)?);
            }
            Command::ShiftCheck(a) => {
                put(map, "operator", conv("operator", &a.operator, config::parse_operator)?);
                put(map, "epsilon", conv("epsilon", &a.epsilon, config::parse_rational)?);
                put_bound(map, "p_max", a.p_max);
                put_bound(map, "m_max", a.m_max);
                put_bound(map, "q_max", a.q_max);
            }
            Command::Multirec(a) => {
                put(map, "operator", conv("operator", &a.operator, config::parse_operator)?);
                put(map, "ball", conv("ball", &a.ball, config::parse_ball)?);
                put(map, "m", num(a.m));
                put_bound(map, "q_max", a.q_max);
            }
            Command::Universal(a) => {
                put(map, "scalars", conv("scalars", &a.scalars, config::parse_scalars)?);
                put(map, "y", conv("y", &a.y, config::parse_vector)?);
                put(map, "m", num(a.m));
                put(map, "k", num(a.k));
                put(map, "p", conv("p", &a.p, config::parse_norm)?);
            }
            Command::Gowers(a) => put(map, "l", num(a.l)),
            Command::Szemeredi(SzemerediArgs { n, k }) | Command::Vdw(VdwArgs { n, k }) => {
                put(map, "n", num(*n));
                put(map, "k", num(*k));
            }
            Command::PairSearch(a) => {
                put(map, "operator", conv("operator", &a.operator, config::parse_operator)?);
                put(map, "ball", conv("ball", &a.ball, config::parse_ball)?);
                put(map, "v1", conv("v1", &a.v1, config::parse_ball)?);
                put(map, "v2", conv("v2", &a.v2, config::parse_ball)?);
                put(map, "m", num(a.m));
                put_bound(map, "a_max", a.a_max);
                put_bound(map, "q_max", a.q_max);
            }
            Command::Nested(a) => {
                put(map, "operator", conv("operator", &a.operator, config::parse_operator)?);
                put(map, "ball", conv("ball", &a.ball, config::parse_ball)?);
                put(map, "stages", num(a.stages));
                put_bound(map, "q_max", a.q_max);
            }
            Command::PuigCount(a) => {
                a.orbit.apply(map)?;
                put(map, "ball", conv("ball", &a.ball, config::parse_ball)?);
                put(map, "m", num(a.m));
                put(map, "q", num(a.q));
            }
            Command::Sweep(a) => {
                if let Some(c) = &a.command {
                    map.insert("command".into(), Value::from(c.as_str()));
                }
                for spec in &a.base {
                    let (key, value) = config::split_assignment(spec, "--set")?;
                    let value: Value =
                        serde_json::from_str(value).map_err(|e| CliError::Input(format!("--set {key}: {e}")))?;
                    config::object_mut(map, "base").insert(key.to_string(), value);
                }
                for spec in &a.grid {
                    let (key, values) = config::split_assignment(spec, "--grid")?;
                    let values =
                        config::parse_grid_values(values).map_err(|e| CliError::Input(format!("--grid {key}: {e}")))?;
                    config::object_mut(map, "grid").insert(key.to_string(), Value::Array(values));
                }
            }
        }
        Ok(())
    }
}
