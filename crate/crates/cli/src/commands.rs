//! One function per subcommand: resolve the configuration, call the core,
//! re-verify whatever is claimed, and package the result.

use multirec_core::ap::{
    ap_bar_estimate, density_report, longest_ap, szemeredi_r_with_budget, vdw_check_with_budget, ApBarVerdict,
    ApWitness, Coloring, HitSet, VdwOutcome, SZEMEREDI_DEFAULT_MAX_N, VDW_DEFAULT_MAX_N,
};
use multirec_core::gowers::{f_eval, gowers_row, GowersRow};
use multirec_core::recurrence::{
    ap_universal_vector, multirec_witness, nested_ball_refinement, puig_count, return_set, shift_ap_criterion,
    verify_universal, verify_universal_float, weak_mixing_pair_search, Exhaustion, SearchOutcome,
};
use multirec_core::seq::rational::{self, Rational};
use multirec_core::seq::{
    in_ball, in_ball_float, iterate, iterate_float, Ball, FiniteVector, FloatVector, MapSequence, Mode, Norm,
    OperatorSpec, ScalarSeq, SpaceSpec, WeightSpec,
};
use multirec_core::verify;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{Global, ModeArg};
use crate::config::{self, resolve, CliError, Map};

pub const COMMANDS: [&str; 12] = [
    "analyze-set",
    "orbit",
    "return-set",
    "shift-check",
    "multirec",
    "universal",
    "gowers",
    "szemeredi",
    "vdw",
    "pair-search",
    "nested",
    "puig-count",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Witness,
    Exhausted,
}

/// Rows for `--output csv`; the header order is part of the interface.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn row<I: IntoIterator<Item = String>>(mut self, cells: I) -> Self {
        self.rows.push(cells.into_iter().collect());
        self
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub verdict: Verdict,
    pub mode: Mode,
    pub defaults: Map,
    pub witness: Value,
    pub exhaustion: Option<Exhaustion>,
    /// `None` when nothing was claimed (an exhausted search).
    pub verified: Option<bool>,
    pub table: Table,
}

impl Outcome {
    fn witness(mode: Mode, defaults: Map, witness: Value, verified: bool, table: Table) -> Self {
        Outcome {
            verdict: Verdict::Witness,
            mode,
            defaults,
            witness,
            exhaustion: None,
            verified: Some(verified),
            table,
        }
    }

    fn exhausted(mode: Mode, defaults: Map, exhaustion: Exhaustion, table: Table) -> Self {
        Outcome {
            verdict: Verdict::Exhausted,
            mode,
            defaults,
            witness: Value::Null,
            exhaustion: Some(exhaustion),
            verified: None,
            table,
        }
    }

    /// 0: verified witness; 1: bounded search exhausted; 2: a claim failed
    /// re-verification.
    pub fn exit_code(&self) -> i32 {
        match (self.verified, self.verdict) {
            (Some(false), _) => 2,
            (_, Verdict::Exhausted) => 1,
            _ => 0,
        }
    }
}

/// The single place where step counts become term counts: a progression
/// `0, q, ..., mq` has `m + 1` terms.
pub fn terms_for_steps(m: u64) -> u64 {
    m + 1
}

/// Commands whose arithmetic mode can be chosen.
fn has_mode(name: &str) -> bool {
    matches!(name, "orbit" | "return-set" | "universal" | "puig-count")
}

/// The arithmetic a command without a mode choice uses.
fn fixed_mode(name: &str) -> Mode {
    if name == "gowers" {
        Mode::Float
    } else {
        Mode::Exact
    }
}

fn has_horizon(name: &str) -> bool {
    matches!(name, "analyze-set" | "orbit" | "return-set" | "puig-count")
}

/// Bounds set by `--budget`.
pub fn budget_keys(name: &str) -> &'static [&'static str] {
    match name {
        "szemeredi" | "vdw" => &["max_n"],
        "shift-check" | "multirec" | "nested" => &["q_max"],
        "pair-search" => &["a_max", "q_max"],
        _ => &[],
    }
}

/// Folds `--mode`, `--horizon` and `--budget` into the configuration,
/// rejecting them where they mean nothing.
pub fn apply_global(name: &str, global: &Global, map: &mut Map) -> Result<(), CliError> {
    if let Some(mode) = global.mode {
        let mode = match mode {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        };
        if has_mode(name) {
            map.insert("mode".into(), to_value(&mode));
        } else if mode != fixed_mode(name) {
            return Err(CliError::Input(format!(
                "--mode {}: {name} always runs in {} mode",
                mode_name(mode),
                mode_name(fixed_mode(name))
            )));
        }
    }
    if let Some(h) = global.horizon {
        if !has_horizon(name) {
            return Err(CliError::Input(format!("--horizon does not apply to {name}")));
        }
        map.insert("horizon".into(), Value::from(h));
    }
    if let Some(b) = global.budget {
        let keys = budget_keys(name);
        if keys.is_empty() {
            return Err(CliError::Input(format!("--budget does not apply to {name}")));
        }
        for key in keys {
            config::bounds_mut(map).insert((*key).into(), Value::from(b));
        }
    }
    Ok(())
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Exact => "exact",
        Mode::Float => "float",
    }
}

pub fn run_command(name: &str, input: &Map) -> Result<Outcome, CliError> {
    match name {
        "analyze-set" => analyze_set(input),
        "orbit" => orbit(input),
        "return-set" => return_set_cmd(input),
        "shift-check" => shift_check(input),
        "multirec" => multirec(input),
        "universal" => universal(input),
        "gowers" => gowers(input),
        "szemeredi" => szemeredi(input),
        "vdw" => vdw(input),
        "pair-search" => pair_search(input),
        "nested" => nested(input),
        "puig-count" => puig(input),
        other => Err(CliError::Input(format!(
            "unknown command {other:?} (expected one of {})",
            COMMANDS.join(", ")
        ))),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize to JSON")
}

/// `index:coefficient` pairs separated by spaces, for CSV cells.
pub fn vector_cell(x: &FiniteVector) -> String {
    x.iter()
        .map(|(n, c)| format!("{n}:{}", rational::format(c)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn float_vector_json(x: &FloatVector) -> Value {
    Value::Array(x.iter().map(|(n, c)| json!([n, c])).collect())
}

fn float_vector_cell(x: &FloatVector) -> String {
    x.iter().map(|(n, c)| format!("{n}:{c}")).collect::<Vec<_>>().join(" ")
}

fn backward_parts(op: &OperatorSpec) -> Result<(&WeightSpec, &SpaceSpec), CliError> {
    match op {
        OperatorSpec::BackwardShift { weights, space } => Ok((weights, space)),
        _ => Err(CliError::Input(
            "this search needs a plain backward shift operator (\"kind\": \"backward\")".into(),
        )),
    }
}

fn progression(initial: u64, step: u64, m: u64) -> ApWitness {
    ApWitness {
        initial,
        step,
        length: terms_for_steps(m),
    }
}

// ---------------------------------------------------------------- analyze-set

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalyzeSetConfig {
    set: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    horizon: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    window: Option<u64>,
    /// Terms, not steps.
    #[serde(default = "three")]
    length: u64,
    #[serde(default = "two")]
    threshold: u64,
}

fn two() -> u64 {
    2
}

fn three() -> u64 {
    3
}

fn analyze_set(input: &Map) -> Result<Outcome, CliError> {
    let (cfg, mut defaults): (AnalyzeSetConfig, _) = resolve(input)?;
    let max = cfg.set.iter().copied().max().unwrap_or(0);
    let horizon = match cfg.horizon {
        Some(h) => h,
        None => {
            defaults.insert("horizon".into(), Value::from(max));
            max
        }
    };
    let window = match cfg.window {
        Some(w) => w,
        None => {
            let w = ((horizon + 1) / 10).max(1);
            defaults.insert("window".into(), Value::from(w));
            w
        }
    };
    let set = HitSet::from_unsorted(cfg.set.iter().copied(), Some(horizon))?;
    let longest = longest_ap(&set);
    let density = density_report(&set, window)?;
    let bar = ap_bar_estimate(&set, cfg.length, cfg.threshold);

    let mut verified = longest
        .as_ref()
        .map_or(set.is_empty(), |ap| verify::ap_in_set(&set, ap));
    if let ApBarVerdict::Pass { step, count } = bar {
        // every start whose progression fits in the set
        let naive = set
            .elements()
            .iter()
            .filter(|&&a| (0..cfg.length).all(|j| set.contains(a + j * step)))
            .count() as u64;
        verified &= naive == count && count >= cfg.threshold;
    }

    let witness = json!({
        "size": set.len(),
        "longest_ap": longest,
        "density": density,
        "ap_bar": bar,
    });
    let (bar_step, bar_count) = match bar {
        ApBarVerdict::Pass { step, count } => (step.to_string(), count.to_string()),
        ApBarVerdict::Fail { .. } => (String::new(), String::new()),
    };
    let table = Table::new(&[
        "size",
        "horizon",
        "ap_initial",
        "ap_step",
        "ap_length",
        "lower_proxy",
        "upper_proxy",
        "banach_upper_proxy",
        "ap_bar_step",
        "ap_bar_count",
    ])
    .row([
        set.len().to_string(),
        horizon.to_string(),
        longest.map(|a| a.initial.to_string()).unwrap_or_default(),
        longest.map(|a| a.step.to_string()).unwrap_or_default(),
        longest.map(|a| a.length.to_string()).unwrap_or_default(),
        rational::format(&density.lower_proxy),
        rational::format(&density.upper_proxy),
        rational::format(&density.banach_upper_proxy),
        bar_step,
        bar_count,
    ]);
    Ok(Outcome::witness(Mode::Exact, defaults, witness, verified, table))
}

// ---------------------------------------------------------------- orbits

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrbitConfig {
    operator: OperatorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scalars: Option<ScalarSeq>,
    x: FiniteVector,
    #[serde(default = "ten")]
    horizon: u64,
    #[serde(default)]
    mode: Mode,
}

fn ten() -> u64 {
    10
}

fn hundred() -> u64 {
    100
}

fn thousand() -> u64 {
    1000
}

fn sequence(op: &OperatorSpec, scalars: &Option<ScalarSeq>) -> Result<MapSequence, CliError> {
    let seq = MapSequence::new(op.clone(), scalars.clone());
    seq.validate()?;
    Ok(seq)
}

/// `λ_n T^n x` by single steps of `T`.
fn naive_exact(seq: &MapSequence, x: &FiniteVector, n: u64) -> Result<FiniteVector, CliError> {
    Ok(verify::iterate_naive(seq.operator(), x, n)?.scale(&seq.scalar_exact(n)?))
}

fn naive_float(seq: &MapSequence, x: &FiniteVector, n: u64) -> Result<FloatVector, CliError> {
    Ok(verify::iterate_naive(seq.operator(), x, n)?
        .to_float()
        .scale(seq.scalar_float(n)?))
}

fn floats_agree(a: &FloatVector, b: &FloatVector) -> bool {
    let scale = a.norm(Norm::Sup).max(b.norm(Norm::Sup)).max(1.0);
    let diff = FloatVector::from_terms(a.iter().chain(b.iter().map(|(n, c)| (n, -c))));
    diff.norm(Norm::Sup) <= 1e-12 * scale
}

fn orbit(input: &Map) -> Result<Outcome, CliError> {
    let (cfg, defaults): (OrbitConfig, _) = resolve(input)?;
    let seq = sequence(&cfg.operator, &cfg.scalars)?;
    if cfg.mode == Mode::Exact && !seq.is_exact() {
        return Err(multirec_core::Error::ModeMismatch(
            "scalar sequence has no exact values; rerun with --mode float".into(),
        )
        .into());
    }
    let mut iterates = Vec::new();
    let mut table = Table::new(&["n", "x"]);
    let mut verified = true;
    for n in 0..=cfg.horizon {
        match cfg.mode {
            Mode::Exact => {
                let y = iterate(&seq, &cfg.x, n)?;
                verified &= y == naive_exact(&seq, &cfg.x, n)?;
                table = table.row([n.to_string(), vector_cell(&y)]);
                iterates.push(json!({"n": n, "x": y}));
            }
            Mode::Float => {
                let y = iterate_float(&seq, &cfg.x, n)?;
                verified &= floats_agree(&y, &naive_float(&seq, &cfg.x, n)?);
                table = table.row([n.to_string(), float_vector_cell(&y)]);
                iterates.push(json!({"n": n, "x": float_vector_json(&y)}));
            }
        }
    }
    let witness = json!({ "iterates": iterates });
    Ok(Outcome::witness(cfg.mode, defaults, witness, verified, table))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReturnSetConfig {
    operator: OperatorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scalars: Option<ScalarSeq>,
    x: FiniteVector,
    ball: Ball,
    #[serde(default = "hundred")]
    horizon: u64,
    #[serde(default)]
    mode: Mode,
}

fn member(seq: &MapSequence, x: &FiniteVector, ball: &Ball, n: u64, mode: Mode) -> Result<bool, CliError> {
    Ok(match mode {
        Mode::Exact => in_ball(&naive_exact(seq, x, n)?, ball),
        Mode::Float => in_ball_float(&naive_float(seq, x, n)?, ball),
    })
}

fn return_set_cmd(input: &Map) -> Result<Outcome, CliError> {
    let (cfg, defaults): (ReturnSetConfig, _) = resolve(input)?;
    let seq = sequence(&cfg.operator, &cfg.scalars)?;
    let hits = return_set(&seq, &cfg.x, &cfg.ball, cfg.horizon, cfg.mode)?;
    let mut verified = true;
    for n in 0..=cfg.horizon {
        verified &= member(&seq, &cfg.x, &cfg.ball, n, cfg.mode)? == hits.contains(n);
    }
    let longest = longest_ap(&hits);
    let witness = json!({
        "hits": hits.elements(),
        "count": hits.len(),
        "longest_ap": longest,
    });
    let mut table = Table::new(&["n"]);
    for n in hits.elements() {
        table = table.row([n.to_string()]);
    }
    Ok(Outcome::witness(cfg.mode, defaults, witness, verified, table))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PuigConfig {
    operator: OperatorSpec,
    #[serde(default = "one_scalars")]
    scalars: ScalarSeq,
    x: FiniteVector,
    ball: Ball,
    m: u64,
    q: u64,
    #[serde(default = "hundred")]
    horizon: u64,
    #[serde(default)]
    mode: Mode,
}

fn one_scalars() -> ScalarSeq {
    ScalarSeq::One
}

fn puig(input: &Map) -> Result<Outcome, CliError> {
    let (cfg, defaults): (PuigConfig, _) = resolve(input)?;
    cfg.operator.validate()?;
    cfg.scalars.validate()?;
    let args = (
        &cfg.scalars,
        &cfg.operator,
        &cfg.x,
        &cfg.ball,
        cfg.m,
        cfg.q,
        cfg.horizon,
        cfg.mode,
    );
    let count = puig_count(args.0, args.1, args.2, args.3, args.4, args.5, args.6, args.7)?;
    let naive = verify::puig_count(args.0, args.1, args.2, args.3, args.4, args.5, args.6, args.7)?;
    let witness = json!({ "count": count, "terms": terms_for_steps(cfg.m) });
    let table = Table::new(&["m", "q", "horizon", "count"]).row([
        cfg.m.to_string(),
        cfg.q.to_string(),
        cfg.horizon.to_string(),
        count.to_string(),
    ]);
    Ok(Outcome::witness(cfg.mode, defaults, witness, count == naive, table))
}

// ---------------------------------------------------------------- shift searches

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CriterionBounds {
    #[serde(default = "three")]
    p_max: u64,
    #[serde(default = "three")]
    m_max: u64,
    #[serde(default = "thousand")]
    q_max: u64,
}

impl Default for CriterionBounds {
    fn default() -> Self {
        CriterionBounds {
            p_max: 3,
            m_max: 3,
            q_max: 1000,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShiftCheckConfig {
    operator: OperatorSpec,
    #[serde(with = "rational::serde_str")]
    epsilon: Rational,
    #[serde(default)]
    bounds: CriterionBounds,
}

fn shift_check(input: &Map) -> Result<Outcome, CliError> {
    let (cfg, defaults): (ShiftCheckConfig, _) = resolve(input)?;
    let (w, space) = backward_parts(&cfg.operator)?;
    let b = &cfg.bounds;
    let report = shift_ap_criterion(w, space, &cfg.epsilon, b.p_max, b.m_max, b.q_max)?;
    let verified = verify::criterion_report(w, &report)?;
    let mut table = Table::new(&["p", "m", "q"]);
    for c in &report.cells {
        table = table.row([
            c.p.to_string(),
            c.m.to_string(),
            c.q.map(|q| q.to_string()).unwrap_or_default(),
        ]);
    }
    let witness = to_value(&report);
    if report.complete {
        return Ok(Outcome::witness(Mode::Exact, defaults, witness, verified, table));
    }
    let missing: Vec<String> = report
        .cells
        .iter()
        .filter(|c| c.q.is_none())
        .map(|c| format!("(p={}, m={})", c.p, c.m))
        .collect();
    let exhaustion = Exhaustion::new(format!("no step <= {} for {}", b.q_max, missing.join(", ")));
    // the partial grid is still reported and still checked
    Ok(Outcome {
        witness,
        verified: Some(verified),
        ..Outcome::exhausted(Mode::Exact, defaults, exhaustion, table)
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QBounds {
    #[serde(default = "thousand")]
    q_max: u64,
}

impl Default for QBounds {
    fn default() -> Self {
        QBounds { q_max: 1000 }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultirecConfig {
    operator: OperatorSpec,
    ball: Ball,
    /// Steps: iterates `0, q, ..., mq`.
    m: u64,
    #[serde(default)]
    bounds: QBounds,
}

fn multirec(input: &Map) -> Result<Outcome, CliError> {
    let (cfg, defaults): (MultirecConfig, _) = resolve(input)?;
    let (w, space) = backward_parts(&cfg.operator)?;
    let header = ["q", "m", "x"];
    match multirec_witness(w, space, &cfg.ball, cfg.m, cfg.bounds.q_max)? {
        SearchOutcome::Found(wit) => {
            let verified = verify::recurrence_witness(&cfg.operator, &cfg.ball, &wit)?;
            let table = Table::new(&header).row([wit.q.to_string(), wit.m.to_string(), vector_cell(&wit.x)]);
            let mut witness = to_value(&wit);
            witness["progression"] = to_value(&progression(0, wit.q, wit.m));
            Ok(Outcome::witness(Mode::Exact, defaults, witness, verified, table))
        }
        SearchOutcome::Exhausted(e) => Ok(Outcome::exhausted(Mode::Exact, defaults, e, Table::new(&header))),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairBounds {
    #[serde(default = "sixty_four")]
    a_max: u64,
    #[serde(default = "sixty_four")]
    q_max: u64,
}

fn sixty_four() -> u64 {
    64
}

impl Default for PairBounds {
    fn default() -> Self {
        PairBounds { a_max: 64, q_max: 64 }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairConfig {
    operator: OperatorSpec,
    /// The set `U` both points start in.
    ball: Ball,
    v1: Ball,
    v2: Ball,
    m: u64,
    #[serde(default)]
    bounds: PairBounds,
}

fn pair_search(input: &Map) -> Result<Outcome, CliError> {
    let (cfg, defaults): (PairConfig, _) = resolve(input)?;
    let (w, space) = backward_parts(&cfg.operator)?;
    let b = &cfg.bounds;
    let header = ["a", "q", "m", "x1", "x2"];
    match weak_mixing_pair_search(w, space, &cfg.ball, &cfg.v1, &cfg.v2, cfg.m, b.a_max, b.q_max)? {
        SearchOutcome::Found(wit) => {
            let verified = verify::pair_witness(&cfg.operator, &cfg.ball, &cfg.v1, &cfg.v2, &wit)?;
            let table = Table::new(&header).row([
                wit.a.to_string(),
                wit.q.to_string(),
                wit.m.to_string(),
                vector_cell(&wit.x1),
                vector_cell(&wit.x2),
            ]);
            let mut witness = to_value(&wit);
            witness["progression"] = to_value(&progression(wit.a, wit.q, wit.m));
            Ok(Outcome::witness(Mode::Exact, defaults, witness, verified, table))
        }
        SearchOutcome::Exhausted(e) => Ok(Outcome::exhausted(Mode::Exact, defaults, e, Table::new(&header))),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NestedConfig {
    operator: OperatorSpec,
    ball: Ball,
    stages: u32,
    #[serde(default)]
    bounds: QBounds,
}

/// `closure(inner) ⊂ outer`, i.e. `d(c, c') + r < r'`, decided exactly.
fn strictly_nested(inner: &Ball, outer: &Ball) -> bool {
    if inner.radius >= outer.radius {
        return false;
    }
    let gap = &outer.radius - &inner.radius;
    let d = outer.distance_exact(&inner.center);
    match outer.space.p {
        Norm::L2 => d < &gap * &gap,
        _ => d < gap,
    }
}

fn nested(input: &Map) -> Result<Outcome, CliError> {
    let (cfg, defaults): (NestedConfig, _) = resolve(input)?;
    let (w, space) = backward_parts(&cfg.operator)?;
    let header = ["stage", "q", "radius", "center"];
    match nested_ball_refinement(w, space, &cfg.ball, cfg.stages, cfg.bounds.q_max)? {
        SearchOutcome::Found(report) => {
            let mut verified = report.stages.len() as u64 == u64::from(cfg.stages) + 1
                && report.stages.first().map(|s| &s.ball) == Some(&cfg.ball);
            let mut table = Table::new(&header);
            for (s, pair) in report.stages.iter().enumerate() {
                table = table.row([
                    s.to_string(),
                    pair.q.map(|q| q.to_string()).unwrap_or_default(),
                    rational::format(&pair.ball.radius),
                    vector_cell(&pair.ball.center),
                ]);
            }
            for (s, win) in report.stages.windows(2).enumerate() {
                let (outer, stage) = (&win[0], &win[1]);
                let Some(q) = stage.q else {
                    verified = false;
                    continue;
                };
                let wit = multirec_core::recurrence::RecurrenceWitness {
                    q,
                    x: stage.ball.center.clone(),
                    m: s as u64 + 1,
                    verified_memberships: Vec::new(),
                };
                verified &= strictly_nested(&stage.ball, &outer.ball)
                    && verify::recurrence_witness(&cfg.operator, &stage.ball, &wit)?;
            }
            verified &= report.stages.last().map(|s| &s.ball.center) == Some(&report.point);
            Ok(Outcome::witness(
                Mode::Exact,
                defaults,
                to_value(&report),
                verified,
                table,
            ))
        }
        SearchOutcome::Exhausted(e) => Ok(Outcome::exhausted(Mode::Exact, defaults, e, Table::new(&header))),
    }
}

// ---------------------------------------------------------------- universal vectors

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UniversalConfig {
    scalars: ScalarSeq,
    y: FiniteVector,
    m: u64,
    k: u64,
    #[serde(default)]
    p: Norm,
    #[serde(default)]
    mode: Mode,
}

fn universal(input: &Map) -> Result<Outcome, CliError> {
    let (cfg, defaults): (UniversalConfig, _) = resolve(input)?;
    cfg.scalars.validate()?;
    match cfg.mode {
        Mode::Exact => {
            let vector = ap_universal_vector(&cfg.scalars, &cfg.y, cfg.m, cfg.k)?;
            let report = verify_universal(&cfg.scalars, &cfg.y, cfg.m, cfg.k, cfg.p)?;
            let verified = verify::universal_report(&cfg.scalars, &cfg.y, cfg.m, cfg.k, cfg.p, &report)?;
            let header = if report.squared {
                ["l", "error_squared"]
            } else {
                ["l", "error"]
            };
            let mut table = Table::new(&header);
            for (l, e) in report.errors.iter().enumerate() {
                table = table.row([(l + 1).to_string(), rational::format(e)]);
            }
            let mut witness = to_value(&report);
            witness["vector"] = to_value(&vector);
            Ok(Outcome::witness(Mode::Exact, defaults, witness, verified, table))
        }
        Mode::Float => {
            let err = verify_universal_float(&cfg.scalars, &cfg.y, cfg.m, cfg.k, cfg.p)?;
            let naive = verify::universal_float(&cfg.scalars, &cfg.y, cfg.m, cfg.k, cfg.p)?;
            let verified = err.is_finite() && (err - naive).abs() <= 1e-9 * naive.abs().max(1.0);
            let table = Table::new(&["max_error"]).row([err.to_string()]);
            Ok(Outcome::witness(
                Mode::Float,
                defaults,
                json!({ "max_error": err }),
                verified,
                table,
            ))
        }
    }
}

// ---------------------------------------------------------------- combinatorics

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GowersConfig {
    l: u64,
}

fn gowers(input: &Map) -> Result<Outcome, CliError> {
    let (cfg, defaults): (GowersConfig, _) = resolve(input)?;
    let row: GowersRow = gowers_row(cfg.l)?;
    // m_l brackets l: f(m_l) <= l < f(m_l + 1)
    let target = cfg.l as f64;
    let verified = f_eval(row.m_l as f64)? <= target && target < f_eval(row.m_l as f64 + 1.0)?;
    let table = Table::new(&GowersRow::CSV_HEADER).row(row.csv_fields());
    Ok(Outcome::witness(Mode::Float, defaults, to_value(&row), verified, table))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaxNBounds {
    max_n: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SzemerediConfig {
    n: u64,
    k: u64,
    #[serde(default = "szemeredi_bounds")]
    bounds: MaxNBounds,
}

fn szemeredi_bounds() -> MaxNBounds {
    MaxNBounds {
        max_n: SZEMEREDI_DEFAULT_MAX_N,
    }
}

/// A `k`-term progression inside `set`, by brute force over pairs.
fn has_k_ap(set: &[u64], k: u64) -> bool {
    let contains = |v: u64| set.binary_search(&v).is_ok();
    set.iter()
        .enumerate()
        .any(|(i, &a)| set[i + 1..].iter().any(|&b| (1..k).all(|j| contains(a + j * (b - a)))))
}

fn szemeredi(input: &Map) -> Result<Outcome, CliError> {
    let (cfg, defaults): (SzemerediConfig, _) = resolve(input)?;
    let (r, set) = szemeredi_r_with_budget(cfg.n, cfg.k, cfg.bounds.max_n)?;
    let mut sorted = set.clone();
    sorted.sort_unstable();
    sorted.dedup();
    // the extremal set certifies the lower bound r_k(n) >= r
    let verified =
        sorted.len() as u64 == r && sorted.iter().all(|&v| (1..=cfg.n).contains(&v)) && !has_k_ap(&sorted, cfg.k);
    let witness = json!({ "n": cfg.n, "k": cfg.k, "r": r, "extremal_set": sorted });
    let table = Table::new(&["n", "k", "r"]).row([cfg.n.to_string(), cfg.k.to_string(), r.to_string()]);
    Ok(Outcome::witness(Mode::Exact, defaults, witness, verified, table))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VdwConfig {
    n: u64,
    k: u64,
    #[serde(default = "vdw_bounds")]
    bounds: MaxNBounds,
}

fn vdw_bounds() -> MaxNBounds {
    MaxNBounds {
        max_n: VDW_DEFAULT_MAX_N,
    }
}

/// Largest `n` for which a "forced" verdict is re-checked by enumerating all
/// colourings.
pub const VDW_FORCED_CHECK_MAX_N: u64 = 20;

fn forced_by_enumeration(n: u64, k: u64) -> bool {
    // colour of 1 fixed: complements preserve monochromatic progressions
    (0..1u64 << (n - 1)).all(|bits| {
        let coloring = Coloring((0..n).map(|i| i > 0 && (bits >> (i - 1)) & 1 == 1).collect());
        !verify::coloring_avoids_aps(&coloring, k)
    })
}

fn vdw(input: &Map) -> Result<Outcome, CliError> {
    let (cfg, defaults): (VdwConfig, _) = resolve(input)?;
    let outcome = vdw_check_with_budget(cfg.n, cfg.k, cfg.bounds.max_n)?;
    let verified = match &outcome {
        VdwOutcome::Counterexample { coloring } => {
            coloring.0.len() as u64 == cfg.n && verify::coloring_avoids_aps(coloring, cfg.k)
        }
        VdwOutcome::Forced if cfg.n <= VDW_FORCED_CHECK_MAX_N => forced_by_enumeration(cfg.n, cfg.k),
        VdwOutcome::Forced => {
            return Err(CliError::Unverified(format!(
                "a forced verdict is only re-checked for N <= {VDW_FORCED_CHECK_MAX_N}"
            )))
        }
    };
    let (label, coloring) = match &outcome {
        VdwOutcome::Forced => ("forced", String::new()),
        VdwOutcome::Counterexample { coloring } => ("counterexample", coloring.to_string()),
    };
    let mut witness = to_value(&outcome);
    witness["n"] = Value::from(cfg.n);
    witness["k"] = Value::from(cfg.k);
    let table = Table::new(&["n", "k", "outcome", "coloring"]).row([
        cfg.n.to_string(),
        cfg.k.to_string(),
        label.to_string(),
        coloring,
    ]);
    Ok(Outcome::witness(Mode::Exact, defaults, witness, verified, table))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(v: Value) -> Map {
        v.as_object().unwrap().clone()
    }

    #[test]
    fn szemeredi_example() {
        let out = run_command("szemeredi", &map(json!({"n": 5, "k": 3}))).unwrap();
        assert_eq!(out.table.rows, vec![vec!["5", "3", "4"]]);
        assert_eq!(out.exit_code(), 0);
        assert_eq!(out.defaults, map(json!({"bounds": {"max_n": 25}})));
    }

    #[test]
    fn analyze_set_fills_horizon_and_window() {
        let out = run_command("analyze-set", &map(json!({"set": [1, 2, 3, 5, 7, 9]}))).unwrap();
        assert_eq!(out.witness["longest_ap"], json!({"initial": 1, "step": 2, "length": 5}));
        assert_eq!(out.defaults["horizon"], 9);
        assert_eq!(out.defaults["window"], 1);
        assert_eq!(out.verified, Some(true));
    }

    #[test]
    fn unknown_fields_are_rejected_with_their_path() {
        let err = run_command("szemeredi", &map(json!({"n": 5, "k": 3, "bounds": {"q_max": 4}}))).unwrap_err();
        assert!(err.to_string().contains("bounds"), "{err}");
        let err = run_command("gowers", &map(json!({"l": "x"}))).unwrap_err();
        assert!(err.to_string().contains("`l`"), "{err}");
    }

    #[test]
    fn multirec_exhausts_honestly() {
        let cfg = json!({
            "operator": {"kind": "backward", "weights": {"kind": "unit"}, "p": 1},
            "ball": {"center": [[0, 1, 1]], "radius": "1/2", "p": 1},
            "m": 2,
            "bounds": {"q_max": 50}
        });
        let out = run_command("multirec", &map(cfg)).unwrap();
        assert_eq!(out.verdict, Verdict::Exhausted);
        assert!(out.exhaustion.as_ref().unwrap().inconclusive);
        assert_eq!(out.exit_code(), 1);
    }

    #[test]
    fn multirec_progression_counts_terms() {
        let cfg = json!({
            "operator": {"kind": "backward", "weights": {"kind": "constant", "value": "2/1"}, "p": 1},
            "ball": {"center": [[0, 1, 1]], "radius": "1/4", "p": 1},
            "m": 3
        });
        let out = run_command("multirec", &map(cfg)).unwrap();
        assert_eq!(out.exit_code(), 0);
        assert_eq!(out.witness["progression"]["length"], 4);
        assert_eq!(out.witness["progression"]["step"], out.witness["q"]);
    }

    #[test]
    fn vdw_forced_is_rechecked() {
        let out = run_command("vdw", &map(json!({"n": 9, "k": 3}))).unwrap();
        assert_eq!(out.table.rows[0][2], "forced");
        assert_eq!(out.verified, Some(true));
        let out = run_command("vdw", &map(json!({"n": 8, "k": 3}))).unwrap();
        assert_eq!(out.table.rows[0][2], "counterexample");
        assert_eq!(out.verified, Some(true));
    }

    #[test]
    fn nesting_is_strict() {
        let b = |c: i64, r: (i64, i64), p| {
            Ball::new(
                FiniteVector::basis(c),
                rational::ratio(r.0, r.1),
                SpaceSpec::new(p, Default::default()),
            )
            .unwrap()
        };
        assert!(strictly_nested(&b(0, (1, 2), Norm::L1), &b(0, (1, 1), Norm::L1)));
        // touching boundaries: d + r = r'
        let inner = Ball::new(
            &FiniteVector::basis(0) + &FiniteVector::term(1, rational::ratio(1, 2)),
            rational::ratio(1, 2),
            SpaceSpec::L1,
        )
        .unwrap();
        assert!(!strictly_nested(&inner, &b(0, (1, 1), Norm::L1)));
    }

    #[test]
    fn global_flags_respect_applicability() {
        let global = |mode, horizon, budget| Global {
            config: None,
            mode,
            output: crate::args::Output::Json,
            horizon,
            budget,
        };
        let mut m = Map::new();
        assert!(apply_global("gowers", &global(Some(ModeArg::Exact), None, None), &mut m).is_err());
        assert!(apply_global("gowers", &global(Some(ModeArg::Float), None, None), &mut m).is_ok());
        assert!(apply_global("szemeredi", &global(None, Some(4), None), &mut m).is_err());
        apply_global("pair-search", &global(None, None, Some(9)), &mut m).unwrap();
        assert_eq!(Value::Object(m), json!({"bounds": {"a_max": 9, "q_max": 9}}));
    }
}
