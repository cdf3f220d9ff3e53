use serde::Serialize;
use serde_json::Value;

use crate::args::Output;
use crate::commands::{mode_name, Outcome, Table, Verdict};
use crate::config::{CliError, Map};
use crate::Run;

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    mode: &'a str,
    input: &'a Map,
    defaults: &'a Map,
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    exhaustion: Option<&'a multirec_core::recurrence::Exhaustion>,
    witness: &'a Value,
    verified: Option<bool>,
}

/// A finished report in both output forms.
#[derive(Debug)]
pub struct Rendered {
    pub json: Value,
    pub table: Table,
    pub code: i32,
    pub diagnostic: Option<String>,
}

impl Rendered {
    pub fn single(name: &str, input: Map, outcome: Outcome) -> Self {
        let report = Report {
            command: name,
            mode: mode_name(outcome.mode),
            input: &input,
            defaults: &outcome.defaults,
            verdict: outcome.verdict,
            exhaustion: outcome.exhaustion.as_ref(),
            witness: &outcome.witness,
            verified: outcome.verified,
        };
        let code = outcome.exit_code();
        Rendered {
            json: serde_json::to_value(&report).expect("reports serialize"),
            table: outcome.table.clone(),
            code,
            diagnostic: (code == 2).then(|| format!("verification failed: {name} result did not re-verify")),
        }
    }

    pub fn finish(self, output: Output) -> Run {
        let stdout = match output {
            Output::Json => json_text(&self.json),
            Output::Csv => csv_text(&self.table),
        };
        Run {
            code: self.code,
            stdout,
            stderr: self.diagnostic.map(|d| format!("error: {d}\n")).unwrap_or_default(),
        }
    }
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_text(t: &Table) -> String {
    let mut out = String::new();
    if t.header.is_empty() {
        return out;
    }
    for line in std::iter::once(&t.header).chain(&t.rows) {
        out.push_str(&line.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// Exit 2 with the diagnostic on stderr; JSON output also carries an error
/// report on stdout.
pub fn error_run(name: &str, e: &CliError, output: Output) -> Run {
    let stdout = match output {
        Output::Json => json_text(&serde_json::json!({
            "command": name,
            "verdict": "error",
            "error": e.to_string(),
        })),
        Output::Csv => String::new(),
    };
    Run {
        code: 2,
        stdout,
        stderr: format!("error: {e}\n"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_only_when_needed() {
        let t = Table {
            header: vec!["a".into(), "b".into()],
            rows: vec![vec!["1,2".into(), "x\"y".into()], vec!["3".into(), String::new()]],
        };
        assert_eq!(csv_text(&t), "a,b\n\"1,2\",\"x\"\"y\"\n3,\n");
    }
}
