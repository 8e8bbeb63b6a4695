use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sics_core::channel::{generate_channels_for, FadingParams, NodeGeometry};
use sics_core::harness::{sweep_csv, SweepConfig};
use sics_core::optimizer::{optimize, verify_outcome, Residual, SolveOutcome};
use sics_core::phy::{db_to_linear, SystemParams};
use sics_core::star::{oracle_solve, solve_amplitudes, AmplitudeProblem};
use sics_core::Error;

const EXIT_VERIFY: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "sics", version, about = "STAR-RIS NOMA rate optimizer with in-band control signalling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one channel realization of the reference scenario and print the outcome as JSON.
    Solve {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 30.0)]
        ps_watts: f64,
        #[arg(long, default_value_t = 10.0)]
        gamma_th1_db: f64,
        #[arg(long, default_value_t = 20.0)]
        gamma_th2_db: f64,
        #[arg(long, default_value_t = 1e-11)]
        n0_watts: f64,
        #[arg(long, default_value_t = 0.9)]
        a1_init: f64,
        /// Channel seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Realization index within the seed's channel streams.
        #[arg(long, default_value_t = 0)]
        realization: u64,
    },
    /// Run a sweep described by a TOML config file and write its CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Cross-check the amplitude solver against the exhaustive grid oracle.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Rate and power split against transmit power for N = 16, 36, 64.
    Figure2(PresetArgs),
    /// Rate and power split against transmit power for control thresholds 5, 15, 25 dB.
    Figure3(PresetArgs),
}

#[derive(clap::Args)]
struct PresetArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n0_watts: Option<f64>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Csv(_) => EXIT_IO,
            Error::Config(_) | Error::InvalidParameter(_) | Error::DimensionMismatch { .. } | Error::OracleScope(_) => EXIT_CONFIG,
            _ => EXIT_VERIFY,
        };
        Failure { code, message: e.to_string() }
    }
}

fn config_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_CONFIG, message: message.into() }
}

#[derive(Serialize)]
struct SolveReport {
    outcome: SolveOutcome,
    residuals: Vec<Residual>,
}

fn solve(cmd: Command) -> Result<(), Failure> {
    let Command::Solve { n, ps_watts, gamma_th1_db, gamma_th2_db, n0_watts, a1_init, seed, realization } = cmd else {
        unreachable!()
    };
    let p = SystemParams::new(ps_watts, n0_watts, db_to_linear(gamma_th1_db), db_to_linear(gamma_th2_db), n)?;
    let fading = FadingParams { seed, ..Default::default() };
    let ch = generate_channels_for(&NodeGeometry::reference_scenario(), &fading, n, realization)?;
    let init = sics_core::harness::init_seed(seed, realization);
    let outcome = optimize(&ch, &p, a1_init, init)?;
    let residuals = verify_outcome(&outcome, &ch, &p)?;
    let text = serde_json::to_string_pretty(&SolveReport { outcome, residuals }).expect("report serializes");
    writeln!(std::io::stdout().lock(), "{text}").map_err(|e| Failure { code: EXIT_IO, message: e.to_string() })
}

fn run_config(mut cfg: SweepConfig, out: Option<PathBuf>, workers: Option<usize>) -> Result<(), Failure> {
    if let Some(w) = workers {
        cfg.workers = w;
    }
    if let Some(path) = out {
        cfg.output_path = path.to_string_lossy().into_owned();
    }
    let spec = cfg.into_spec()?;
    let (report, text) = sweep_csv(&spec)?;
    std::fs::write(&spec.output_path, text)
        .map_err(|e| Failure { code: EXIT_IO, message: format!("cannot write {}: {e}", spec.output_path) })?;
    eprintln!(
        "wrote {} rows to {} ({} infeasible, {} solver failures)",
        report.rows.len(),
        spec.output_path,
        report.infeasible,
        report.solver_failures
    );
    Ok(())
}

fn preset(mut cfg: SweepConfig, args: PresetArgs) -> Result<(), Failure> {
    if let Some(r) = args.realizations {
        cfg.realizations = r;
    }
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(n0) = args.n0_watts {
        cfg.n0_watts = n0;
    }
    run_config(cfg, args.out, args.workers)
}

fn verify(n: usize, cases: usize, step: f64, seed: u64) -> Result<(), Failure> {
    if !(1..=3).contains(&n) {
        return Err(config_error(format!("--n must be between 1 and 3, got {n}")));
    }
    if !(step > 0.0 && step <= 1e-2) {
        return Err(config_error(format!("--step must lie in (0, 0.01], got {step}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    let mut worst: f64 = 0.0;
    for case in 0..cases {
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.0)).collect();
        let h: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.0)).collect();
        let q = rng.random_range(0.05..0.6) * h.iter().sum::<f64>();
        let prob = AmplitudeProblem::new(d, h, q)?;
        let h_max = prob.h_cap.iter().cloned().fold(0.0, f64::max);
        let exact = solve_amplitudes(&prob, 1e-12)?;
        let grid = oracle_solve(&prob, step)?;
        let gap = (exact.objective - grid.objective).abs() / (2.0 * step * h_max);
        worst = worst.max(gap);
        if gap > 1.0 || exact.constraint_residual > 1e-10 {
            mismatches += 1;
            eprintln!(
                "case {case}: solver {:.9} oracle {:.9} residual {:.2e}",
                exact.objective, grid.objective, exact.constraint_residual
            );
        }
    }
    println!("{cases} cases, {mismatches} mismatches, worst gap {worst:.3} of tolerance");
    if mismatches > 0 {
        return Err(Failure { code: EXIT_VERIFY, message: "solver disagrees with oracle".into() });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        cmd @ Command::Solve { .. } => solve(cmd),
        Command::Sweep { config, out, workers } => {
            SweepConfig::load(&config).map_err(Failure::from).and_then(|cfg| run_config(cfg, out, workers))
        }
        Command::Verify { n, cases, step, seed } => verify(n, cases, step, seed),
        Command::Figure2(args) => preset(SweepConfig::figure2(), args),
        Command::Figure3(args) => preset(SweepConfig::figure3(), args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
