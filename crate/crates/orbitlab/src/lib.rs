//! Command-line front end for `orbitlab-core`: argument and config handling,
//! function specs in JSON, and JSON/CSV reports.

pub mod cli;
pub mod commands;
pub mod error;
pub mod report;
pub mod spec;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::cli::{load_config, resolve, Cli, Command};
use crate::error::{CliError, CliResult};
use crate::report::{Format, Report};

fn with_config<T, F>(name: &str, args: &T, file: &Map<String, Value>, run: F) -> CliResult<Report>
where
    T: Serialize + DeserializeOwned + Default,
    F: FnOnce(&T, Value) -> CliResult<Report>,
{
    let (merged, mut config) = resolve(args, file)?;
    if let Value::Object(m) = &mut config {
        m.insert("command".into(), Value::String(name.into()));
    }
    run(&merged, config)
}

fn dispatch(cli: &Cli, file: &Map<String, Value>) -> CliResult<Report> {
    use crate::commands as c;
    match &cli.command {
        Command::Scan(a) => with_config("scan", a, file, c::scan),
        Command::Coverage(a) => with_config("coverage", a, file, c::coverage),
        Command::Discrepancy(a) => with_config("discrepancy", a, file, c::discrepancy),
        Command::EtBound(a) => with_config("et-bound", a, file, c::et_bound),
        Command::Distance(a) => with_config("distance", a, file, c::distance),
        Command::Correlation(a) => with_config("correlation", a, file, c::correlation),
        Command::Sieve(a) => with_config("sieve", a, file, c::sieve),
        Command::Levelset(a) => with_config("levelset", a, file, c::levelset),
        Command::Beurling(a) => with_config("beurling", a, file, c::beurling),
        Command::Counterexample(a) => with_config("counterexample", a, file, c::counterexample),
        Command::Ratratio(a) => with_config("ratratio", a, file, c::ratratio),
        Command::Kronecker(a) => with_config("kronecker", a, file, c::kronecker),
        Command::Concentration(a) => with_config("concentration", a, file, c::concentration),
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => load_config(path)?,
        None => Map::new(),
    };
    let report = dispatch(&cli, &file)?;
    if let Some(cmd) = file.get("command") {
        if cmd.as_str() != Some(report.command) {
            return Err(CliError::config(
                "command",
                format!("config is for {cmd}, not `{}`", report.command),
            ));
        }
    }
    let format = match (cli.format, file.get("format")) {
        (Some(f), _) => f,
        (None, Some(v)) => serde_json::from_value(v.clone())
            .map_err(|e| CliError::config("format", e.to_string()))?,
        (None, None) if report.command == "beurling" => Format::Csv,
        (None, None) => Format::Json,
    };
    let out = match (&cli.out, file.get("out")) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(Value::String(s))) => Some(s.into()),
        (None, Some(Value::Null)) | (None, None) => None,
        (None, Some(_)) => return Err(CliError::config("out", "must be a path string")),
    };
    match out {
        Some(path) => {
            let mut buf = std::io::BufWriter::new(std::fs::File::create(path)?);
            report.write(format, &mut buf)?;
            buf.flush()?;
        }
        None => report.write(format, stdout)?,
    }
    Ok(())
}

/// Runs the command line in `args`, returning the process exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "orbitlab: {e}");
            e.exit_code()
        }
    }
}

pub fn run() -> i32 {
    run_with(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
