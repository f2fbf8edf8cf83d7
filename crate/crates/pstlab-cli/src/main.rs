//! `pstlab`: synthesize transfer chains from spectra, verify transfer by
//! unitary evolution, emit arithmetic certificates, and export fidelity
//! traces.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 structured domain
//! failure, 3 I/O failure. JSON output is canonical: keys sorted, exact
//! rationals as "p/q" strings.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use pstlab::dynamics;
use pstlab::exact::parse_ratio;
use pstlab::hamiltonian::PathHamiltonian;
use pstlab::spectra::{Spectrum, SpectrumKind, Time, Values};
use pstlab::synthesis::{self, RationalityOutcome, SynthesisError};

#[derive(Parser)]
#[command(name = "pstlab", version, about = "Transfer-chain synthesis and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct a chain from a target spectrum and report it
    Synth(SynthArgs),
    /// Check transfer fidelity between a vertex pair at a given time
    Verify(VerifyArgs),
    /// Emit an infeasibility or irrationality certificate, or run a scan
    Certify(CertifyArgs),
    /// Sample a fidelity curve to CSV
    Trace(TraceArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Inline spectrum: comma-separated values ("-4,-2,0,2,4"; rationals allowed)
    #[arg(long, conflicts_with = "input", allow_hyphen_values = true)]
    spectrum: Option<String>,
    /// Spectrum JSON file
    #[arg(long)]
    input: Option<PathBuf>,
    /// adjacency | adjacency_np | laplacian (with --spectrum)
    #[arg(long, default_value = "adjacency")]
    kind: String,
    /// Readout time recorded on the spectrum ("pi", "pi/2", or a decimal)
    #[arg(long, default_value = "pi")]
    time: String,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Hamiltonian JSON file
    #[arg(long)]
    input: PathBuf,
    /// Vertex pair "j,k" (1-based)
    #[arg(long)]
    pair: String,
    /// Evolution time ("pi", "pi/2", or a decimal)
    #[arg(long)]
    time: String,
    /// Fidelity tolerance for declaring transfer
    #[arg(long, default_value_t = dynamics::PST_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    /// laplacian | rational
    kind: String,
    /// Chain order (laplacian certificates, rational scans)
    #[arg(long)]
    n: Option<usize>,
    /// Inline spectrum for a single rational certificate
    #[arg(long, allow_hyphen_values = true)]
    spectrum: Option<String>,
    /// Run a seeded scan over random spectra
    #[arg(long)]
    scan: bool,
    /// Number of spectra to scan
    #[arg(long, default_value_t = 1000)]
    count: u64,
    /// Scan seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for scans (falls back to PSTLAB_WORKERS, then 1)
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    /// Hamiltonian JSON file
    #[arg(long)]
    input: PathBuf,
    /// Vertex pair "j,k" (1-based)
    #[arg(long)]
    pair: String,
    /// End of the time window ("pi" forms or a decimal)
    #[arg(long, name = "t-max")]
    t_max: String,
    /// Number of samples (>= 2, endpoints included)
    #[arg(long)]
    steps: usize,
    /// Output CSV file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure carrying the exit code contract.
enum CliError {
    /// exit 1: bad flags, unparseable input
    Usage(String),
    /// exit 2: structured domain failure with a machine-readable code
    Domain { code: String, message: String },
    /// exit 3: filesystem trouble
    Io(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl From<SynthesisError> for CliError {
    fn from(err: SynthesisError) -> Self {
        CliError::Domain {
            code: err.code().to_string(),
            message: err.to_string(),
        }
    }
}

impl From<dynamics::DynamicsError> for CliError {
    fn from(err: dynamics::DynamicsError) -> Self {
        CliError::Domain {
            code: "dynamics_failure".into(),
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    // usage problems exit 1 (clap's default would be 2, which is reserved
    // for structured domain failures)
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Trace(args) => cmd_trace(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Domain { code, message }) => {
            let body = json!({ "error": code, "message": message });
            println!("{}", serde_json::to_string_pretty(&body).expect("static shape"));
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

// ---------------------------------------------------------------------------
// commands

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let spectrum = match (&args.spectrum, &args.input) {
        (Some(inline), None) => parse_inline_spectrum(inline, &args.kind, &args.time)?,
        (None, Some(path)) => read_json(path)?,
        _ => return Err(CliError::usage("provide exactly one of --spectrum or --input")),
    };
    let report = synthesis::reconstruct(&spectrum)?;
    emit_json(&report, args.out.as_deref())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let h: PathHamiltonian = read_json(&args.input)?;
    let (j, k) = parse_pair(&args.pair)?;
    let time = parse_time(&args.time)?;
    let t = time.as_f64();
    let (pst, fidelity) = dynamics::verify_pst(&h, j, k, t, args.tol)?;

    // the mirror-pair table applies when the endpoints transfer
    let internal = if pst && ((j, k) == (1, h.n()) || (j, k) == (h.n(), 1)) {
        Some(dynamics::verify_internal_pairs(&h, t, args.tol)?)
    } else {
        None
    };

    #[derive(Serialize)]
    struct Verdict {
        pst: bool,
        fidelity: dynamics::FidelityResult,
        #[serde(skip_serializing_if = "Option::is_none")]
        internal_pairs: Option<dynamics::InternalPairsReport>,
    }
    emit_json(
        &Verdict {
            pst,
            fidelity,
            internal_pairs: internal,
        },
        args.out.as_deref(),
    )
}

fn cmd_certify(args: CertifyArgs) -> Result<(), CliError> {
    match args.kind.as_str() {
        "laplacian" => {
            let n = args.n.ok_or_else(|| CliError::usage("certify laplacian needs --n"))?;
            let cert = synthesis::laplacian_infeasibility(n)?;
            emit_json(&cert, args.out.as_deref())
        }
        "rational" if args.scan => {
            let n = args.n.ok_or_else(|| CliError::usage("certify rational --scan needs --n"))?;
            let workers = args
                .workers
                .or_else(|| {
                    std::env::var("PSTLAB_WORKERS").ok().and_then(|v| v.parse().ok())
                })
                .unwrap_or(1);
            let summary = synthesis::scan_rationality(n, args.count, args.seed, workers)?;
            emit_json(&summary, args.out.as_deref())
        }
        "rational" => {
            let inline = args
                .spectrum
                .as_deref()
                .ok_or_else(|| CliError::usage("certify rational needs --spectrum or --scan"))?;
            let spectrum = parse_inline_spectrum(inline, "adjacency", "pi")?;
            match synthesis::rationality_certificate(&spectrum)? {
                RationalityOutcome::Certified(cert) => emit_json(&cert, args.out.as_deref()),
                RationalityOutcome::NotCovered { n } => emit_json(
                    &json!({
                        "result": "not_covered",
                        "n": n,
                        "message": "no proven residue class covers this order",
                    }),
                    args.out.as_deref(),
                ),
            }
        }
        other => Err(CliError::usage(format!(
            "unknown certificate kind '{other}' (expected laplacian or rational)"
        ))),
    }
}

fn cmd_trace(args: TraceArgs) -> Result<(), CliError> {
    if args.steps < 2 {
        return Err(CliError::usage("--steps must be at least 2"));
    }
    let h: PathHamiltonian = read_json(&args.input)?;
    let (j, k) = parse_pair(&args.pair)?;
    let t_max = parse_time(&args.t_max)?.as_f64();
    let points = dynamics::fidelity_trace(&h, j, k, t_max, args.steps)?;
    let csv = dynamics::trace_to_csv(&points);
    match args.out.as_deref() {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// parsing and output helpers

fn parse_inline_spectrum(inline: &str, kind: &str, time: &str) -> Result<Spectrum, CliError> {
    let kind = match kind {
        "adjacency" => SpectrumKind::Adjacency,
        "adjacency_np" => SpectrumKind::AdjacencyNoPotentials,
        "laplacian" => SpectrumKind::Laplacian,
        other => return Err(CliError::usage(format!("unknown kind '{other}'"))),
    };
    let tokens: Vec<&str> = inline.split(',').map(str::trim).collect();
    if tokens.iter().any(|t| t.is_empty()) {
        return Err(CliError::usage("empty entry in spectrum list"));
    }
    let float_mode = tokens
        .iter()
        .any(|t| t.contains('.') || t.contains('e') || t.contains('E'));
    let values = if float_mode {
        let mut v = Vec::with_capacity(tokens.len());
        for t in &tokens {
            v.push(
                t.parse::<f64>()
                    .map_err(|_| CliError::usage(format!("invalid value '{t}'")))?,
            );
        }
        Values::Float(v)
    } else {
        let mut v = Vec::with_capacity(tokens.len());
        for t in &tokens {
            v.push(parse_ratio(t).ok_or_else(|| CliError::usage(format!("invalid value '{t}'")))?);
        }
        Values::Exact(v)
    };
    let time = parse_time(time)?;
    Spectrum::new(kind, values, time).map_err(|e| CliError::usage(e.to_string()))
}

fn parse_pair(s: &str) -> Result<(usize, usize), CliError> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| CliError::usage(format!("pair '{s}' is not of the form j,k")))?;
    let j = a.trim().parse().map_err(|_| CliError::usage(format!("invalid vertex '{a}'")))?;
    let k = b.trim().parse().map_err(|_| CliError::usage(format!("invalid vertex '{b}'")))?;
    Ok((j, k))
}

fn parse_time(s: &str) -> Result<Time, CliError> {
    let time = Time::parse(s).ok_or_else(|| CliError::usage(format!("invalid time '{s}'")))?;
    if !time.is_positive() {
        return Err(CliError::usage("time must be positive"));
    }
    Ok(time)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("parsing {}: {e}", path.display())))
}

/// Canonical JSON out: round-trip through `serde_json::Value` sorts keys.
fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let canonical = serde_json::to_value(value)
        .map_err(|e| CliError::Io(format!("serializing output: {e}")))?;
    let mut text = serde_json::to_string_pretty(&canonical)
        .map_err(|e| CliError::Io(format!("serializing output: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display()))),
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(format!("writing stdout: {e}")))
        }
    }
}
