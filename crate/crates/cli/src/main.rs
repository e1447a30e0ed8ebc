//! `moment-flows`: batch front end over the library with JSON file I/O.
//!
//! Exit status is 0 on success, 1 for usage errors (including flow
//! parameters that violate the equation's constraints), 2 for unreadable or
//! malformed input, and 3 when the computation itself fails. Failures print a
//! single JSON object `{"error": kind, "message": text}` on stderr.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use moment_flows::json::{
    BoundaryReportJson, FlowJson, Measure, MeasureJson, RecoveryJson, SequenceJson,
};
use moment_flows::oracle::{oracle_moments_atomic, oracle_moments_gaussian_mixture};
use moment_flows::{
    distance_upper_bound, evaluate_flow, heat_distance_1d, recover_gaussian_mixture,
    BoundaryOptions, Error, FlowKind, FlowParams, MomentSequence, RecoveryOptions,
};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "moment-flows",
    version,
    about = "Heat, transport and combined flows of truncated moment sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve a moment sequence to time t.
    Evolve(EvolveArgs),
    /// Heat distance to the moment-cone boundary (exact for n = 1, bound only otherwise).
    Distance(DistanceArgs),
    /// Recover a Gaussian-mixture representing measure of a 1-D sequence.
    Recover(RecoverArgs),
    /// Moments of an atomic measure or Gaussian mixture.
    Oracle(OracleArgs),
    /// Sample a flow on a uniform time grid and write long-format CSV.
    Trajectory(TrajectoryArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Equation {
    Heat,
    Transport,
    Combined,
}

impl From<Equation> for FlowKind {
    fn from(e: Equation) -> Self {
        match e {
            Equation::Heat => FlowKind::Heat,
            Equation::Transport => FlowKind::Transport,
            Equation::Combined => FlowKind::Combined,
        }
    }
}

#[derive(Args, Debug)]
struct FlowArgs {
    #[arg(long, value_enum)]
    equation: Equation,
    /// Diffusion coefficient [default: 1 for heat and combined, 0 for transport]
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<f64>,
    /// Drift vector, comma separated [default: zeros]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    #[command(flatten)]
    flow: FlowArgs,
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    #[arg(long = "in")]
    input: PathBuf,
    /// Output file [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the full table of exponential polynomials.
    #[arg(long)]
    flow_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundaryArgs {
    #[arg(long, default_value_t = 1.0)]
    nu: f64,
    /// Bisection tolerance in t.
    #[arg(long, default_value_t = BoundaryOptions::default().tol)]
    tol: f64,
    #[arg(long, default_value_t = BoundaryOptions::default().psd_tol)]
    psd_tol: f64,
    #[arg(long, default_value_t = BoundaryOptions::default().kernel_tol)]
    kernel_tol: f64,
    #[arg(long, default_value_t = BoundaryOptions::default().scan_cells)]
    scan_cells: usize,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl BoundaryArgs {
    fn options(&self) -> BoundaryOptions {
        BoundaryOptions {
            tol: self.tol,
            psd_tol: self.psd_tol,
            kernel_tol: self.kernel_tol,
            scan_cells: self.scan_cells,
            ..BoundaryOptions::default()
        }
    }
}

#[derive(Args, Debug)]
struct DistanceArgs {
    #[command(flatten)]
    common: BoundaryArgs,
}

#[derive(Args, Debug)]
struct RecoverArgs {
    #[command(flatten)]
    common: BoundaryArgs,
    /// Forward-check gate on the relative moment mismatch.
    #[arg(long, default_value_t = RecoveryOptions::default().residual_gate)]
    residual_gate: f64,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    measure: PathBuf,
    #[arg(long)]
    degree: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrajectoryArgs {
    #[command(flatten)]
    flow: FlowArgs,
    #[arg(long, allow_hyphen_values = true)]
    t0: f64,
    #[arg(long, allow_hyphen_values = true)]
    t1: f64,
    /// Number of grid intervals; 0 writes the single row at t0.
    #[arg(long)]
    steps: usize,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Parse(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    fn report(&self) -> String {
        let (kind, message) = match self {
            Failure::Usage(m) => ("usage", m),
            Failure::Parse(m) => ("parse", m),
            Failure::Numeric(m) => ("numeric", m),
        };
        serde_json::json!({ "error": kind, "message": message }).to_string()
    }

    /// Library errors raised while computing; bad flow parameters are usage.
    fn numeric(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) => Failure::Usage(e.to_string()),
            other => Failure::Numeric(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("off")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            // keep clap's message, drop the usage block and hints after it
            let msg = e.to_string();
            let text: Vec<&str> = msg
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .filter(|l| !l.is_empty())
                .collect();
            let f = Failure::Usage(text.join(" ").trim_start_matches("error: ").to_string());
            eprintln!("{}", f.report());
            return ExitCode::from(f.code());
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.report());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Evolve(args) => evolve(args),
        Command::Distance(args) => distance(args),
        Command::Recover(args) => recover(args),
        Command::Oracle(args) => oracle(args),
        Command::Trajectory(args) => trajectory(args),
    }
}

fn evolve(args: EvolveArgs) -> CliResult<()> {
    let s = read_sequence(&args.input)?;
    let params = flow_params(&args.flow, s.n())?;
    if !args.t.is_finite() {
        return Err(Failure::Usage(format!(
            "--t must be finite, got {}",
            args.t
        )));
    }
    let flow = params.build(&s).map_err(Failure::numeric)?;
    let out = evaluate_flow(&flow, args.t);
    if let Some(path) = &args.flow_out {
        write_output(Some(path), &to_json(&FlowJson::from(&flow))?)?;
    }
    write_output(args.out.as_deref(), &to_json(&SequenceJson::from(&out))?)
}

fn distance(args: DistanceArgs) -> CliResult<()> {
    let c = &args.common;
    let s = read_sequence(&c.input)?;
    check_nu(c.nu)?;
    let report = if s.n() == 1 {
        let r = heat_distance_1d(&s, c.nu, &c.options()).map_err(Failure::numeric)?;
        BoundaryReportJson::from(&r)
    } else {
        let ub = distance_upper_bound(&s, c.nu).map_err(Failure::numeric)?;
        BoundaryReportJson::bound_only(ub.value, ub.trivial)
    };
    write_output(c.out.as_deref(), &to_json(&report)?)
}

fn recover(args: RecoverArgs) -> CliResult<()> {
    let c = &args.common;
    let s = read_sequence(&c.input)?;
    check_nu(c.nu)?;
    if s.n() != 1 {
        return Err(Failure::Usage(format!(
            "recovery is one-dimensional, input has n = {}",
            s.n()
        )));
    }
    let opts = RecoveryOptions {
        boundary: c.options(),
        residual_gate: args.residual_gate,
        ..RecoveryOptions::default()
    };
    let r = recover_gaussian_mixture(&s, c.nu, &opts).map_err(Failure::numeric)?;
    write_output(c.out.as_deref(), &to_json(&RecoveryJson::from(&r))?)
}

fn oracle(args: OracleArgs) -> CliResult<()> {
    let text = read_text(&args.measure)?;
    let wire: MeasureJson = serde_json::from_str(&text)
        .map_err(|e| Failure::Parse(format!("{}: {e}", args.measure.display())))?;
    let measure = Measure::try_from(wire)
        .map_err(|e| Failure::Parse(format!("{}: {e}", args.measure.display())))?;
    let s = match &measure {
        Measure::Atomic(mu) => oracle_moments_atomic(mu, args.degree),
        Measure::GaussianMixture(g) => oracle_moments_gaussian_mixture(g, args.degree),
    };
    write_output(args.out.as_deref(), &to_json(&SequenceJson::from(&s))?)
}

fn trajectory(args: TrajectoryArgs) -> CliResult<()> {
    let s = read_sequence(&args.input)?;
    let params = flow_params(&args.flow, s.n())?;
    if !args.t0.is_finite() || !args.t1.is_finite() {
        return Err(Failure::Usage("t0 and t1 must be finite".into()));
    }
    let flow = params.build(&s).map_err(Failure::numeric)?;
    let mut csv = String::from("t");
    for j in 1..=s.n() {
        write!(csv, ",alpha_{j}").unwrap();
    }
    csv.push_str(",value\n");
    for i in 0..=args.steps {
        let t = if args.steps == 0 {
            args.t0
        } else {
            args.t0 + (args.t1 - args.t0) * i as f64 / args.steps as f64
        };
        let st = evaluate_flow(&flow, t);
        for (alpha, v) in st.iter() {
            csv.push_str(&fmt_float(t));
            for k in alpha.entries() {
                write!(csv, ",{k}").unwrap();
            }
            writeln!(csv, ",{}", fmt_float(v)).unwrap();
        }
    }
    write_output(args.out.as_deref(), &csv)
}

/// Shortest round-trip decimal, the same text the JSON files use.
fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&x).expect("finite float serializes")
    } else {
        format!("{x}")
    }
}

fn flow_params(f: &FlowArgs, n: usize) -> CliResult<FlowParams> {
    let kind = FlowKind::from(f.equation);
    let nu = f.nu.unwrap_or(match kind {
        FlowKind::Transport => 0.0,
        _ => 1.0,
    });
    let a = f.a.clone().unwrap_or_else(|| vec![0.0; n]);
    if a.len() != n {
        return Err(Failure::Usage(format!(
            "--a has {} entries but the sequence has n = {n}",
            a.len()
        )));
    }
    FlowParams::new(kind, nu, a).map_err(|e| Failure::Usage(e.to_string()))
}

fn check_nu(nu: f64) -> CliResult<()> {
    if nu > 0.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--nu must be positive, got {nu}")))
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn read_sequence(path: &Path) -> CliResult<MomentSequence> {
    let text = read_text(path)?;
    let wire: SequenceJson = serde_json::from_str(&text)
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    MomentSequence::try_from(wire).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string(value).map_err(|e| Failure::Numeric(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Parse(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Parse(format!("stdout: {e}"))),
    }
}
