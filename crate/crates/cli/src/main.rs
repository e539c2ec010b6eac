//! Command-line front door for the game laboratory.
//!
//! Exit codes: 0 on success with the report fully written, 2 on usage or
//! configuration errors, 3 on internal invariant violations. Reports go to
//! `--output` (stdout when omitted); diagnostics go to stderr only.

mod report;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qcentipede::conjecture::{conjecture_sweep, corner_degeneracy_check};
use qcentipede::equilibrium::{certify_nash, format_sig12, gradient_check, parse_angle, sweep_table};
use qcentipede::game::{
    expected_payoffs_exact, expected_payoffs_mc, outcome_distribution, PayoffSchedule,
};
use qcentipede::protocol::{run_protocol, EntanglerBackend, StrategyProfile};

use report::{envelope, json_str, meta, schedule_hash};

#[derive(Parser)]
#[command(name = "qcentipede", version, about = "Quantized centipede game laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the 18-point strategy grid: exact payoffs plus Monte Carlo
    /// averages per row
    Table1(Table1Args),
    /// Run one strategy profile and report state, outcomes, and payoffs
    Simulate(SimulateArgs),
    /// Certify a profile as a Nash equilibrium by best-response grid search
    Nash(NashArgs),
    /// Compare analytic payoff gradients against central finite differences
    GradCheck(GradCheckArgs),
    /// Probe last-round-defection collapse and corner degeneracy over a
    /// range of round counts
    Conjecture(ConjectureArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Table1Args {
    /// Monte Carlo shots per grid row
    #[arg(long, default_value_t = 1000)]
    shots: u64,
    /// Base sampling seed (row r uses seed + r)
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Report file (stdout when omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct SimulateArgs {
    /// Comma-separated per-round angles; accepts decimals and pi tokens
    /// (e.g. `pi,pi/2,0`)
    #[arg(long)]
    angles: String,
    /// Payoff schedule JSON file (built-in 3-round schedule when omitted)
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    shots: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Emit a JSON report instead of the readable text layout
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct NashArgs {
    /// Comma-separated per-round angles of the candidate profile
    #[arg(long)]
    angles: String,
    /// Deviation grid points per angle in [0, pi]
    #[arg(long, default_value_t = 25)]
    grid: usize,
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct GradCheckArgs {
    /// Number of random strategy triples to test
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct ConjectureArgs {
    /// Round-count range `min:max` (or a single count), within 2..=8
    #[arg(long, default_value = "2:6")]
    n: String,
    /// Random profiles per round count (corners are always included)
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

enum CliError {
    /// Bad flags, unparsable inputs, unwritable paths: exit 2.
    Config(String),
    /// A result failed its own sanity checks: exit 3.
    Internal(String),
}

impl CliError {
    fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(|| run(cli.command));
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(CliError::Config(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Ok(Err(CliError::Internal(msg))) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
        Err(_) => ExitCode::from(3),
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Table1(args) => cmd_table1(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Nash(args) => cmd_nash(args),
        Command::GradCheck(args) => cmd_grad_check(args),
        Command::Conjecture(args) => cmd_conjecture(args),
    }
}

fn write_report(output: Option<&PathBuf>, content: &str) -> CliResult<()> {
    match output {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display()))),
    }
}

fn load_schedule(path: Option<&PathBuf>) -> CliResult<PayoffSchedule> {
    match path {
        None => Ok(PayoffSchedule::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", p.display())))?;
            PayoffSchedule::from_json_str(&text)
                .map_err(|e| CliError::config(format!("{}: {e}", p.display())))
        }
    }
}

fn parse_angles(list: &str, expected_rounds: usize) -> CliResult<StrategyProfile> {
    let thetas: Vec<f64> = list
        .split(',')
        .map(|tok| parse_angle(tok).map_err(|e| CliError::config(e.to_string())))
        .collect::<CliResult<_>>()?;
    if thetas.len() != expected_rounds {
        return Err(CliError::config(format!(
            "{} angles given but the schedule has {} rounds",
            thetas.len(),
            expected_rounds
        )));
    }
    StrategyProfile::from_thetas(thetas).map_err(|e| CliError::config(e.to_string()))
}

fn require_shots(shots: u64) -> CliResult<()> {
    if shots == 0 {
        return Err(CliError::config("shots must be at least 1"));
    }
    Ok(())
}

fn cmd_table1(args: Table1Args) -> CliResult<()> {
    require_shots(args.shots)?;
    let schedule = PayoffSchedule::default();
    let rows = sweep_table(args.shots, args.seed);
    if rows.len() != 18 {
        return Err(CliError::Internal(format!("sweep produced {} rows", rows.len())));
    }
    let content = match args.format {
        Format::Csv => report::sweep_csv(&rows, &schedule, args.shots, args.seed),
        Format::Json => {
            let m = meta(&[
                ("schedule_sha256", json_str(&schedule_hash(&schedule))),
                ("shots", args.shots.to_string()),
                ("seed", args.seed.to_string()),
            ]);
            let rows_json = serde_json::to_string(&rows)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            envelope(&m, "rows", &rows_json)
        }
    };
    write_report(args.output.as_ref(), &content)
}

fn cmd_simulate(args: SimulateArgs) -> CliResult<()> {
    require_shots(args.shots)?;
    let schedule = load_schedule(args.schedule.as_ref())?;
    let profile = parse_angles(&args.angles, schedule.n_rounds())?;

    let state = run_protocol(&profile, EntanglerBackend::Matrix);
    let dist = outcome_distribution(&state);
    if (dist.total() - 1.0).abs() > 1e-9 {
        return Err(CliError::Internal(format!(
            "outcome probabilities sum to {}",
            dist.total()
        )));
    }
    let exact = expected_payoffs_exact(&profile, &schedule)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let mc = expected_payoffs_mc(&profile, &schedule, args.shots, args.seed)
        .map_err(|e| CliError::Internal(e.to_string()))?;

    let labels = report::outcome_labels(schedule.n_rounds());
    let values = report::outcome_values(&dist);

    let content = match args.format {
        Some(Format::Csv) => {
            return Err(CliError::config("simulate reports are text or json, not csv"))
        }
        Some(Format::Json) => {
            let m = meta(&[
                ("schedule_sha256", json_str(&schedule_hash(&schedule))),
                ("shots", args.shots.to_string()),
                ("seed", args.seed.to_string()),
            ]);
            let amps: Vec<String> = state
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm() > 1e-12)
                .map(|(i, a)| {
                    report::json_object(&[
                        ("bitstring", json_str(&qcentipede::sim::bitstring(i, state.n_qubits()))),
                        ("re", serde_json::Value::from(a.re).to_string()),
                        ("im", serde_json::Value::from(a.im).to_string()),
                    ])
                })
                .collect();
            let outcomes: Vec<(&str, String)> = labels
                .iter()
                .zip(&values)
                .map(|(l, v)| (l.as_str(), serde_json::Value::from(*v).to_string()))
                .collect();
            let body = report::json_object(&[
                ("angles", serde_json::to_string(profile.thetas()).unwrap()),
                ("state", format!("[{}]", amps.join(","))),
                ("outcome_probabilities", report::json_object(&outcomes)),
                (
                    "exact_payoffs",
                    serde_json::to_string(&exact).unwrap(),
                ),
                ("mc_payoffs", serde_json::to_string(&mc).unwrap()),
            ]);
            envelope(&m, "report", &body)
        }
        None => {
            let mut out = String::new();
            let angle_list: Vec<String> =
                profile.thetas().iter().map(|t| format_sig12(*t)).collect();
            let _ = writeln!(out, "angles [rad]: {}", angle_list.join(" "));
            let _ = writeln!(out, "final state: {}", report::format_ket(&state));
            let _ = writeln!(out, "outcome probabilities:");
            for (label, value) in labels.iter().zip(&values) {
                let _ = writeln!(out, "  {label:<18} {}", format_sig12(*value));
            }
            let _ = writeln!(
                out,
                "exact payoffs: player1={} player2={}",
                format_sig12(exact.player1),
                format_sig12(exact.player2)
            );
            let _ = writeln!(
                out,
                "mc payoffs:    player1={} player2={} (shots={}, seed={})",
                format_sig12(mc.player1),
                format_sig12(mc.player2),
                args.shots,
                args.seed
            );
            out
        }
    };
    write_report(args.output.as_ref(), &content)
}

fn cmd_nash(args: NashArgs) -> CliResult<()> {
    if args.grid < 2 {
        return Err(CliError::config("deviation grid needs at least 2 points"));
    }
    if args.format == Some(Format::Csv) {
        return Err(CliError::config("nash reports are json"));
    }
    let schedule = load_schedule(args.schedule.as_ref())?;
    let profile = parse_angles(&args.angles, schedule.n_rounds())?;
    let tol = 1e-9;
    let certificate = certify_nash(&profile, &schedule, args.grid, tol);

    let m = meta(&[
        ("schedule_sha256", json_str(&schedule_hash(&schedule))),
        ("deviation_grid", args.grid.to_string()),
        ("tolerance", serde_json::Value::from(tol).to_string()),
    ]);
    let body = serde_json::to_string(&certificate)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    write_report(args.output.as_ref(), &envelope(&m, "report", &body))
}

fn cmd_grad_check(args: GradCheckArgs) -> CliResult<()> {
    if args.samples == 0 {
        return Err(CliError::config("samples must be at least 1"));
    }
    if args.format == Some(Format::Csv) {
        return Err(CliError::config("grad-check reports are json"));
    }
    let step = 1e-5;
    let tolerance = 1e-6;
    let summary = gradient_check(args.samples, step, args.seed);

    let m = meta(&[
        ("seed", args.seed.to_string()),
        ("samples", args.samples.to_string()),
        ("h", serde_json::Value::from(step).to_string()),
    ]);
    let summary_json =
        serde_json::to_string(&summary).map_err(|e| CliError::Internal(e.to_string()))?;
    let body = report::json_object(&[
        ("summary", summary_json),
        ("tolerance", serde_json::Value::from(tolerance).to_string()),
        (
            "within_tolerance",
            (summary.max_abs_difference < tolerance).to_string(),
        ),
    ]);
    write_report(args.output.as_ref(), &envelope(&m, "report", &body))
}

fn parse_round_range(spec: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::config(format!("invalid round range `{spec}` (expected `min:max` in 2..=8)"));
    let (lo, hi) = match spec.split_once(':') {
        Some((a, b)) => (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
        None => {
            let n: usize = spec.parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if !(2..=8).contains(&lo) || !(2..=8).contains(&hi) || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn cmd_conjecture(args: ConjectureArgs) -> CliResult<()> {
    let (n_min, n_max) = parse_round_range(&args.n)?;
    if args.samples == 0 {
        return Err(CliError::config("samples must be at least 1"));
    }
    if args.format == Some(Format::Csv) {
        return Err(CliError::config("conjecture reports are json"));
    }
    let reports = conjecture_sweep(n_min, n_max, args.samples, args.seed);

    // fitted corner phases are diagnostics, not part of the report shape
    for r in &reports {
        let corner = corner_degeneracy_check(r.n_rounds, 1e-12);
        match corner.phase {
            Some(phase) => eprintln!(
                "n={}: corner states match up to phase {:.6}{:+.6}i",
                r.n_rounds, phase.re, phase.im
            ),
            None => eprintln!("n={}: corner states are not phase-equivalent", r.n_rounds),
        }
    }

    let m = meta(&[
        ("seed", args.seed.to_string()),
        ("samples", args.samples.to_string()),
        ("rounds", format!("[{n_min},{n_max}]")),
    ]);
    let body = serde_json::to_string(&reports).map_err(|e| CliError::Internal(e.to_string()))?;
    write_report(args.output.as_ref(), &envelope(&m, "reports", &body))
}
