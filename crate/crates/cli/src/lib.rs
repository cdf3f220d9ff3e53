//! Command-line front end: parses experiment configs, dispatches to
//! `multirec-core`, and renders JSON or CSV reports.
//!
//! Every report echoes the explicitly supplied configuration under `input`
//! and the defaults that were filled in under `defaults`; feeding `input`
//! back through `--config` reproduces the report byte for byte.

pub mod args;
pub mod commands;
pub mod config;
pub mod report;
pub mod sweep;

use std::io::Read;

use clap::Parser;

use args::Cli;
use config::CliError;
use report::Rendered;

/// Exit code, stdout and stderr of one invocation.
#[derive(Debug)]
pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` and runs the command; `stdin` is read only when a command
/// needs a set and the configuration supplies none.
pub fn run<I, T, R>(argv: I, stdin: R) -> Run
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    R: Read,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Run {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Run {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let output = cli.global.output;
    let name = cli.command.name();
    match dispatch(cli, stdin) {
        Ok(rendered) => rendered.finish(output),
        Err(e) => report::error_run(name, &e, output),
    }
}

fn dispatch<R: Read>(cli: Cli, stdin: R) -> Result<Rendered, CliError> {
    let name = cli.command.name();
    let mut input = match &cli.global.config {
        Some(path) => config::load_config(path)?,
        None => config::Map::new(),
    };
    if name == "sweep" {
        cli.command.apply_flags(&mut input)?;
        sweep::apply_global(&cli.global, &mut input)?;
        return sweep::run_sweep(&input);
    }
    cli.command.apply_flags(&mut input)?;
    commands::apply_global(name, &cli.global, &mut input)?;
    if name == "analyze-set" && !input.contains_key("set") {
        let mut text = String::new();
        let mut stdin = stdin;
        stdin
            .read_to_string(&mut text)
            .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
        input.insert("set".into(), config::parse_set(&text)?);
    }
    let outcome = commands::run_command(name, &input)?;
    Ok(Rendered::single(name, input, outcome))
}
