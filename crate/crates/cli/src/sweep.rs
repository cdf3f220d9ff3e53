//! Cartesian parameter sweeps. Points run in parallel; rows come back in grid
//! order (dimensions sorted by key, the last key varying fastest).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::Global;
use crate::commands::{self, Outcome, Verdict};
use crate::config::{self, resolve, CliError, Map};
use crate::report::Rendered;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepBounds {
    #[serde(default = "default_max_points")]
    max_points: u64,
}

fn default_max_points() -> u64 {
    10_000
}

impl Default for SweepBounds {
    fn default() -> Self {
        SweepBounds {
            max_points: default_max_points(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepConfig {
    command: String,
    /// Fields shared by every point.
    #[serde(default)]
    base: Map,
    /// Values per field; `a.b` addresses the nested field `b` of `a`.
    #[serde(default)]
    grid: BTreeMap<String, Vec<Value>>,
    #[serde(default)]
    bounds: SweepBounds,
}

/// `--budget` caps the number of points; `--mode` and `--horizon` go into
/// the base configuration of the swept command.
pub fn apply_global(global: &Global, map: &mut Map) -> Result<(), CliError> {
    if let Some(b) = global.budget {
        config::bounds_mut(map).insert("max_points".into(), Value::from(b));
    }
    if global.mode.is_some() || global.horizon.is_some() {
        let command = map
            .get("command")
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::Input("sweep needs --command".into()))?
            .to_string();
        let inner = Global {
            budget: None,
            config: None,
            ..global.clone()
        };
        commands::apply_global(&command, &inner, config::object_mut(map, "base"))?;
    }
    Ok(())
}

fn set_path(map: &mut Map, path: &str, value: Value) {
    match path.split_once('.') {
        Some((head, rest)) => set_path(config::object_mut(map, head), rest, value),
        None => {
            map.insert(path.to_string(), value);
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

struct PointResult {
    point: Map,
    outcome: Result<Outcome, CliError>,
}

impl PointResult {
    fn code(&self) -> i32 {
        self.outcome.as_ref().map_or(2, Outcome::exit_code)
    }

    fn to_json(&self) -> Value {
        match &self.outcome {
            Ok(o) => {
                let mut row = json!({
                    "point": self.point,
                    "mode": commands::mode_name(o.mode),
                    "defaults": o.defaults,
                    "verdict": o.verdict,
                    "witness": o.witness,
                    "verified": o.verified,
                });
                if let Some(e) = &o.exhaustion {
                    row["exhaustion"] = serde_json::to_value(e).expect("exhaustion serializes");
                }
                row
            }
            Err(e) => json!({
                "point": self.point,
                "verdict": "error",
                "error": e.to_string(),
            }),
        }
    }
}

/// The grid points in order, or an error if there are more than `limit`.
fn points(grid: &BTreeMap<String, Vec<Value>>, limit: u64) -> Result<Vec<Map>, CliError> {
    if grid.is_empty() || grid.values().any(Vec::is_empty) {
        return Ok(Vec::new());
    }
    let total = grid
        .values()
        .try_fold(1u64, |acc, v| acc.checked_mul(v.len() as u64))
        .filter(|&t| t <= limit)
        .ok_or_else(|| CliError::Input(format!("sweep grid exceeds bounds.max_points = {limit}")))?;
    let mut out = Vec::with_capacity(total as usize);
    let dims: Vec<(&String, &Vec<Value>)> = grid.iter().collect();
    let mut idx = vec![0usize; dims.len()];
    loop {
        out.push(
            dims.iter()
                .zip(&idx)
                .map(|((k, vals), &i)| ((*k).clone(), vals[i].clone()))
                .collect(),
        );
        // odometer, last dimension fastest
        let mut d = dims.len();
        loop {
            if d == 0 {
                return Ok(out);
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < dims[d].1.len() {
                break;
            }
            idx[d] = 0;
        }
    }
}

pub fn run_sweep(input: &Map) -> Result<Rendered, CliError> {
    let (cfg, defaults): (SweepConfig, _) = resolve(input)?;
    if cfg.command == "sweep" {
        return Err(CliError::Input("sweeps cannot be nested".into()));
    }
    if !commands::COMMANDS.contains(&cfg.command.as_str()) {
        return Err(CliError::Input(format!(
            "unknown command {:?} (expected one of {})",
            cfg.command,
            commands::COMMANDS.join(", ")
        )));
    }
    let grid_points = points(&cfg.grid, cfg.bounds.max_points)?;
    let results: Vec<PointResult> = grid_points
        .into_par_iter()
        .map(|point| {
            let mut config = cfg.base.clone();
            for (k, v) in &point {
                set_path(&mut config, k, v.clone());
            }
            let outcome = commands::run_command(&cfg.command, &config);
            PointResult { point, outcome }
        })
        .collect();

    // worst code over rows: 2 (error or failed check) > 1 (exhausted) > 0
    let code = results.iter().map(PointResult::code).max().unwrap_or(0);
    let counts = |v: Verdict| {
        results
            .iter()
            .filter(|r| matches!(&r.outcome, Ok(o) if o.verdict == v))
            .count()
    };
    let summary = json!({
        "points": results.len(),
        "witness": counts(Verdict::Witness),
        "exhausted": counts(Verdict::Exhausted),
        "error": results.iter().filter(|r| r.outcome.is_err()).count(),
    });

    let keys: Vec<&String> = cfg.grid.keys().collect();
    let command_header = results
        .iter()
        .find_map(|r| r.outcome.as_ref().ok().map(|o| o.table.header.clone()))
        .unwrap_or_default();
    let extra: Vec<&String> = keys.iter().copied().filter(|k| !command_header.contains(k)).collect();
    let mut table = commands::Table {
        header: extra.iter().map(|k| k.to_string()).chain(command_header).collect(),
        rows: Vec::new(),
    };
    for r in &results {
        if let Ok(o) = &r.outcome {
            for row in &o.table.rows {
                let lead = extra.iter().map(|k| cell(&r.point[k.as_str()]));
                table.rows.push(lead.chain(row.iter().cloned()).collect());
            }
        }
    }

    let json = json!({
        "command": "sweep",
        "input": input,
        "defaults": defaults,
        "summary": summary,
        "rows": results.iter().map(PointResult::to_json).collect::<Vec<_>>(),
    });
    let errors = results.iter().filter(|r| r.code() == 2).count();
    Ok(Rendered {
        json,
        table,
        code,
        diagnostic: (errors > 0).then(|| format!("{errors} sweep point(s) failed; see their rows")),
    })
}
