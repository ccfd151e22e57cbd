//! The `mkbs` command line.
//!
//! Exit codes: 0 success, 1 domain failure (invalid KB semantics, failed or
//! unanswered consultation), 2 environment failure (I/O, unparsable input,
//! bad flags, port in use).

use std::ffi::OsString;
use std::io::{self, BufRead, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use mkbs_core::{
    parse_kb, validate_kb, CertaintyFactor, ConsultError, ConsultationResult, Diagnostic,
    EngineConfig, KnowledgeBase, SemanticNet,
};

use crate::answers::{AnswerScript, Strict, Terminal, TerminalError};
use crate::service::{http, Service, ServiceConfig, DEFAULT_MAX_SESSIONS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_ENV: i32 = 2;

pub const NO_CONCLUSION: &str = "no conclusion above threshold";

#[derive(Debug, Parser)]
#[command(name = "mkbs", version, about = "Knowledge-based diagnosis shell")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a knowledge base and print its diagnostics
    Validate { kb: PathBuf },
    /// Run a consultation, from an answers file or on the terminal
    Consult {
        kb: PathBuf,
        #[arg(long)]
        goal: String,
        #[arg(long)]
        answers: Option<PathBuf>,
        #[arg(long, env = "MKBS_THRESHOLD", value_parser = parse_threshold)]
        threshold: Option<CertaintyFactor>,
        /// Write the trace document (JSON) here
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Query the semantic net
    Net {
        kb: PathBuf,
        #[arg(long)]
        relation: String,
        #[arg(long)]
        node: String,
        #[arg(long)]
        inherit: bool,
    },
    /// Serve every .mkb file in a directory over HTTP
    Serve {
        #[arg(long)]
        kb_dir: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "MKBS_THRESHOLD", value_parser = parse_threshold)]
        threshold: Option<CertaintyFactor>,
    },
}

fn parse_threshold(s: &str) -> Result<CertaintyFactor, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    CertaintyFactor::new(v).map_err(|e| e.to_string())
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdin = io::stdin();
    run(std::env::args_os(), &mut stdin.lock(), &mut io::stdout(), &mut io::stderr())
}

/// Runs one command with the given streams. `input` only matters for
/// terminal consultations.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return e.exit_code();
        }
    };
    match cli.command {
        Command::Validate { kb } => cmd_validate(&kb, err),
        Command::Consult { kb, goal, answers, threshold, trace } => {
            let config = threshold.map_or_else(EngineConfig::default, EngineConfig::with_threshold);
            cmd_consult(&kb, &goal, answers.as_deref(), config, trace.as_deref(), input, out, err)
        }
        Command::Net { kb, relation, node, inherit } => cmd_net(&kb, &relation, &node, inherit, out, err),
        Command::Serve { kb_dir, port, threshold } => {
            let engine = threshold.map_or_else(EngineConfig::default, EngineConfig::with_threshold);
            cmd_serve(&kb_dir, port, engine, err)
        }
    }
}

fn print_diagnostics(err: &mut dyn Write, path: &Path, diags: &[Diagnostic]) {
    for d in diags {
        let _ = writeln!(err, "{}: {d}", path.display());
    }
}

/// Parse failures are environment failures; semantic errors are domain ones.
fn failure_code(diags: &[Diagnostic]) -> i32 {
    if diags.iter().any(Diagnostic::is_syntactic) {
        EXIT_ENV
    } else {
        EXIT_DOMAIN
    }
}

fn read(path: &Path, err: &mut dyn Write) -> Result<String, i32> {
    std::fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
        EXIT_ENV
    })
}

fn load(path: &Path, err: &mut dyn Write) -> Result<KnowledgeBase, i32> {
    let source = read(path, err)?;
    parse_kb(&source).map_err(|diags| {
        print_diagnostics(err, path, &diags);
        failure_code(&diags)
    })
}

pub fn cmd_validate(path: &Path, err: &mut dyn Write) -> i32 {
    let source = match read(path, err) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match parse_kb(&source) {
        Ok(kb) => {
            let warnings = validate_kb(&kb);
            print_diagnostics(err, path, &warnings);
            let _ = writeln!(
                err,
                "{}: ok, {} rules, {} askables, {} triples, {} warnings",
                path.display(),
                kb.rules.len(),
                kb.askables.len(),
                kb.triples.len(),
                warnings.len()
            );
            EXIT_OK
        }
        Err(diags) => {
            print_diagnostics(err, path, &diags);
            failure_code(&diags)
        }
    }
}

/// The human report: one `value cf` line per ranked candidate.
pub fn format_report(result: &ConsultationResult) -> String {
    if result.ranked.is_empty() {
        return format!("{NO_CONCLUSION}\n");
    }
    result.ranked.iter().map(|c| format!("{} {:.2}\n", c.value.text(), c.cf.value())).collect()
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_consult(
    path: &Path,
    goal: &str,
    answers: Option<&Path>,
    config: EngineConfig,
    trace: Option<&Path>,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let kb = match load(path, err) {
        Ok(kb) => kb,
        Err(code) => return code,
    };
    let outcome = match answers {
        Some(file) => {
            let text = match read(file, err) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let script = match AnswerScript::parse(&text) {
                Ok(s) => s,
                Err(e) => {
                    let _ = writeln!(err, "error: {}: {e}", file.display());
                    return EXIT_ENV;
                }
            };
            mkbs_core::consult(&kb, goal, &mut Strict(&script), config).map_err(|e| match e {
                ConsultError::Engine(e) => (EXIT_DOMAIN, e.to_string()),
                ConsultError::Provider(e) => (EXIT_DOMAIN, e.to_string()),
            })
        }
        None => {
            let mut terminal = Terminal::new(&mut *input, &mut *out);
            mkbs_core::consult(&kb, goal, &mut terminal, config).map_err(|e| match e {
                ConsultError::Engine(e) => (EXIT_DOMAIN, e.to_string()),
                ConsultError::Provider(e @ TerminalError::Eof(_)) => (EXIT_DOMAIN, e.to_string()),
                ConsultError::Provider(e @ TerminalError::Io(_)) => (EXIT_ENV, e.to_string()),
            })
        }
    };
    let result = match outcome {
        Ok(r) => r,
        Err((code, message)) => {
            let _ = writeln!(err, "error: {message}");
            return code;
        }
    };
    if answers.is_none() {
        let _ = writeln!(out);
    }
    if let Err(e) = out.write_all(format_report(&result).as_bytes()) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_ENV;
    }
    if let Some(trace_path) = trace {
        if let Err(e) = std::fs::write(trace_path, result.trace_document()) {
            let _ = writeln!(err, "error: cannot write {}: {e}", trace_path.display());
            return EXIT_ENV;
        }
    }
    EXIT_OK
}

pub fn cmd_net(path: &Path, relation: &str, node: &str, inherit: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let kb = match load(path, err) {
        Ok(kb) => kb,
        Err(code) => return code,
    };
    let answer = SemanticNet::from_kb(&kb).query(relation, node, inherit);
    for r in &answer.results {
        let line = match &r.via {
            Some(via) => writeln!(out, "{} (via {via})", r.object),
            None => writeln!(out, "{}", r.object),
        };
        if line.is_err() {
            return EXIT_ENV;
        }
    }
    EXIT_OK
}

fn env_or<T: std::str::FromStr>(name: &str, default: T) -> T {
    std::env::var(name).ok().and_then(|v| v.parse().ok()).unwrap_or(default)
}

/// Blocks serving until interrupted. Besides the flags, reads `MKBS_HOST`
/// (default 127.0.0.1), `MKBS_MAX_SESSIONS` and `MKBS_STATIC_DIR`.
pub fn cmd_serve(dir: &Path, port: u16, engine: EngineConfig, err: &mut dyn Write) -> i32 {
    let _ = tracing_subscriber::fmt()
        .with_writer(io::stderr)
        .with_ansi(io::stderr().is_terminal())
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .try_init();

    let config = ServiceConfig {
        engine,
        max_sessions: env_or("MKBS_MAX_SESSIONS", DEFAULT_MAX_SESSIONS),
        ..ServiceConfig::default()
    };
    let mut service = Service::new(config);
    let skipped = match service.load_dir(dir) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", dir.display());
            return EXIT_ENV;
        }
    };
    for (id, e) in &skipped {
        tracing::warn!("skipping knowledge base `{id}`: {e}");
        for d in e.diagnostics() {
            tracing::warn!("  {d}");
        }
    }
    if service.kb_ids().next().is_none() {
        let _ = writeln!(err, "error: no valid .mkb knowledge base in {}", dir.display());
        return EXIT_ENV;
    }
    for id in service.kb_ids() {
        tracing::info!("serving knowledge base `{id}`");
    }

    let host = std::env::var("MKBS_HOST").unwrap_or_else(|_| "127.0.0.1".into());
    let mut app = http::router(Arc::new(service));
    if let Some(static_dir) = std::env::var_os("MKBS_STATIC_DIR") {
        app = http::with_static(app, Path::new(&static_dir));
    }

    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_ENV;
        }
    };
    runtime.block_on(async {
        let listener = match tokio::net::TcpListener::bind((host.as_str(), port)).await {
            Ok(l) => l,
            Err(e) => {
                let _ = writeln!(err, "error: cannot listen on {host}:{port}: {e}");
                return EXIT_ENV;
            }
        };
        if let Ok(addr) = listener.local_addr() {
            tracing::info!("listening on http://{addr}");
        }
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        match axum::serve(listener, app).with_graceful_shutdown(shutdown).await {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_ENV
            }
        }
    })
}
