//! The `novarch` command line: JSON documents in, JSON or table reports out.

pub mod cli;
pub mod commands;
pub mod document;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use sha2::{Digest, Sha256};

use cli::{Cli, Command, ModelKind};
use commands::Outcome;
use document::{parse, ComplexDocument, Overrides, RigidityDocument, TauDocument};
use error::CliError;
use report::{CommandEcho, RunReport, Timing};

/// What a run writes and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

struct Inputs<'a> {
    stdin: &'a mut (dyn Read + Send),
    stdin_used: bool,
    hashes: Vec<String>,
}

impl Inputs<'_> {
    fn read(&mut self, path: &str) -> Result<String, CliError> {
        let bytes = if path == "-" {
            if self.stdin_used {
                return Err(CliError::Usage("standard input can be read only once".into()));
            }
            self.stdin_used = true;
            let mut buf = Vec::new();
            self.stdin.read_to_end(&mut buf).map_err(|source| CliError::Io { path: PathBuf::from("<stdin>"), source })?;
            buf
        } else {
            std::fs::read(path).map_err(|source| CliError::Io { path: PathBuf::from(path), source })?
        };
        self.hashes.push(format!("{:x}", Sha256::digest(&bytes)));
        String::from_utf8(bytes).map_err(|e| CliError::Parse(format!("{path} is not UTF-8: {e}")))
    }
}

fn reject(present: bool, flag: &str, command: &str) -> Result<(), CliError> {
    if present {
        Err(CliError::Usage(format!("{flag} does not apply to `{command}`")))
    } else {
        Ok(())
    }
}

enum Produced {
    Report(&'static str, Outcome),
    Document(String),
}

fn execute(cli: &Cli, inputs: &mut Inputs) -> Result<Produced, CliError> {
    let o = Overrides { precision: cli.precision.clone(), hbar: cli.hbar.clone() };
    let seed = cli.seed.is_some();
    match &cli.command {
        Command::Depth { input } => {
            reject(seed, "--seed", "depth")?;
            let c = commands::load_complex(&inputs.read(input)?, cli.lax, &o)?;
            Ok(Produced::Report("depth", commands::depth(&c)?))
        }
        Command::Hpt { input, epsilon } => {
            reject(seed, "--seed", "hpt")?;
            let c = commands::load_complex(&inputs.read(input)?, cli.lax, &o)?;
            Ok(Produced::Report("hpt", commands::hpt(&c, epsilon)?))
        }
        Command::Ss { inputs: paths, pages, threshold, track } => {
            reject(seed, "--seed", "ss")?;
            let members = paths
                .iter()
                .map(|p| commands::load_complex(&inputs.read(p)?, cli.lax, &o))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Produced::Report("ss", commands::ss(&members, *pages, threshold, track)?))
        }
        Command::Tau { input } => {
            reject(seed, "--seed", "tau")?;
            reject(cli.precision.is_some(), "--precision", "tau")?;
            reject(cli.hbar.is_some(), "--hbar", "tau")?;
            let doc: TauDocument = parse(&inputs.read(input)?, cli.lax)?;
            Ok(Produced::Report("tau", commands::tau(&doc)?))
        }
        Command::Rigidity { input } => {
            reject(seed, "--seed", "rigidity")?;
            reject(cli.hbar.is_some(), "--hbar", "rigidity")?;
            let doc: RigidityDocument = parse(&inputs.read(input)?, cli.lax)?;
            Ok(Produced::Report("rigidity", commands::rigidity(&doc, cli.precision.as_ref())?))
        }
        Command::Model { kind } => {
            let c = match kind {
                ModelKind::Cp1 { r, truncation } => {
                    reject(seed, "--seed", "model cp1")?;
                    reject(cli.hbar.is_some(), "--hbar", "model cp1")?;
                    commands::cp1(r, *truncation, cli.precision.as_ref())?
                }
                ModelKind::Lambda { lambda } => {
                    reject(seed, "--seed", "model lambda")?;
                    commands::lambda_model(lambda, cli.hbar.as_ref(), cli.precision.as_ref())?
                }
                ModelKind::Random { rank, beta } | ModelKind::Deformable { rank, beta } => {
                    let deformable = matches!(kind, ModelKind::Deformable { .. });
                    reject(cli.precision.is_some(), "--precision", "model random")?;
                    commands::random(cli.seed.unwrap_or(0), *rank, beta, cli.hbar.as_ref(), deformable)?
                }
            };
            Ok(Produced::Document(ComplexDocument::emit(&c).to_json()))
        }
    }
}

fn failure(e: &CliError) -> Output {
    Output { stdout: String::new(), stderr: format!("error: {e}\n"), code: e.exit_code() }
}

/// Runs one invocation. `threads` is the value of `NOVARCH_THREADS`.
pub fn run<I, T>(args: I, stdin: &mut (dyn Read + Send), threads: Option<&str>) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.exit_code() {
                0 => Output { stdout: text, stderr: String::new(), code: 0 },
                _ => Output { stdout: String::new(), stderr: text, code: 2 },
            };
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        match t.trim().parse::<usize>() {
            Ok(n) if n > 0 => builder = builder.num_threads(n),
            _ => return failure(&CliError::Usage(format!("NOVARCH_THREADS must be a positive integer, got `{t}`"))),
        }
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return failure(&CliError::Usage(format!("cannot start the thread pool: {e}"))),
    };
    let start = Instant::now();
    let mut inputs = Inputs { stdin, stdin_used: false, hashes: Vec::new() };
    let produced = pool.install(|| execute(&cli, &mut inputs));
    match produced {
        Err(e) => failure(&e),
        Ok(Produced::Document(text)) => Output { stdout: text, stderr: String::new(), code: 0 },
        Ok(Produced::Report(name, outcome)) => {
            let report = RunReport {
                command: CommandEcho { name: name.into(), args: args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect() },
                input_sha256: inputs.hashes,
                results: outcome.results,
                checks: outcome.ledger.0,
                timing: Timing { elapsed_ms: start.elapsed().as_millis(), threads: pool.current_num_threads() },
            };
            let passed = report.passed();
            let stderr = if passed { String::new() } else { "error: a check failed; see the report\n".into() };
            Output { stdout: report.render(cli.format), stderr, code: if passed { 0 } else { 1 } }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str], stdin: &str) -> Output {
        let mut input = stdin.as_bytes();
        run(std::iter::once("novarch").chain(args.iter().copied()), &mut input, Some("2"))
    }

    #[test]
    fn model_output_feeds_depth() {
        let doc = go(&["model", "lambda", "--lambda", "3/2"], "");
        assert_eq!(doc.code, 0, "{}", doc.stderr);
        let out = go(&["depth", "-"], &doc.stdout);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["results"]["beta"], "3/2");
        assert_eq!(v["input_sha256"][0].as_str().unwrap().len(), 64);
    }

    #[test]
    fn inapplicable_flags_are_usage_errors() {
        assert_eq!(go(&["model", "cp1", "--r", "0.6", "--hbar", "1"], "").code, 2);
        assert_eq!(go(&["tau", "--precision", "4"], "{}").code, 2);
    }

    #[test]
    fn stdin_is_read_once() {
        let out = go(&["ss", "-", "-"], "{}");
        assert_eq!(out.code, 3, "malformed stdin is reported first");
        let doc = go(&["model", "lambda", "--lambda", "1"], "");
        assert_eq!(go(&["ss", "-", "-"], &doc.stdout).code, 2);
    }

    #[test]
    fn bad_thread_counts_are_rejected() {
        let mut input: &[u8] = b"";
        assert_eq!(run(["novarch", "model", "lambda", "--lambda", "1"], &mut input, Some("zero")).code, 2);
    }

    #[test]
    fn help_exits_zero() {
        let out = go(&["--help"], "");
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("depth"));
    }

    #[test]
    fn missing_files_are_io_errors() {
        let out = go(&["depth", "/nonexistent/complex.json"], "");
        assert_eq!(out.code, 3);
        assert!(out.stderr.contains("cannot read"));
    }
}
