//! greenfix CLI: `check` the existence hypotheses, `solve` the truncated
//! system, `verify` a solved state. All reports are JSON on stdout.
//!
//! Exit codes: 0 success; 2 hypothesis verdict is `fails`; 3 the
//! iteration did not converge; 4 invalid interval length; 5 verification
//! failed; 64 malformed config or state file.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use greenfix::error::Error;
use greenfix::hypothesis;
use greenfix::solver;
use greenfix::state_csv::{read_state_csv, write_state_csv};
use greenfix::verifier;
use greenfix::{Config, Verdict};

const EXIT_OK: u8 = 0;
const EXIT_HYPOTHESIS_FAILS: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;
const EXIT_INVALID_INTERVAL: u8 = 4;
const EXIT_VERIFY_FAILED: u8 = 5;
const EXIT_BAD_INPUT: u8 = 64;

#[derive(Parser)]
#[command(
    name = "greenfix",
    about = "Green's-function fixed-point solver for truncated infinite BVP systems in lp"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: all cores; GREENFIX_THREADS as fallback).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the existence constants and conditions for the config.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the fixed-point iteration; write report.json and state.csv.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for report.json and state.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a solved state against the config.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// state.csv produced by `solve`.
        #[arg(long)]
        state: PathBuf,
        /// Seed for the randomized operator checks.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::InvalidInterval { .. } => EXIT_INVALID_INTERVAL,
        Error::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_BAD_INPUT,
    }
}

fn init_threads(flag: Option<usize>) {
    let from_env = std::env::var("GREENFIX_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(n) = flag.or(from_env) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn print_json<T: serde::Serialize>(value: &T) {
    match serde_json::to_string_pretty(value) {
        Ok(text) => println!("{text}"),
        Err(e) => eprintln!("could not serialize report: {e}"),
    }
}

fn run_check(config_path: &PathBuf) -> Result<u8, Error> {
    let config = Config::from_path(config_path)?;
    let params = config.lp_params()?;
    let spec = config.load_system()?;
    let kernel = config.kernel()?;
    let report = hypothesis::evaluate(
        spec.as_ref(),
        kernel.t_len(),
        params,
        config.components,
        config.t_samples,
    );
    print_json(&report);
    Ok(if report.verdict == Verdict::Fails {
        EXIT_HYPOTHESIS_FAILS
    } else {
        EXIT_OK
    })
}

fn run_solve(config_path: &PathBuf, out_dir: &PathBuf) -> Result<u8, Error> {
    let config = Config::from_path(config_path)?;
    let params = config.lp_params()?;
    let spec = config.load_system()?;
    let kernel = config.kernel()?;
    let hyp = hypothesis::evaluate(
        spec.as_ref(),
        kernel.t_len(),
        params,
        config.components,
        config.t_samples,
    );
    let mut solver_cfg = config.solver_config();
    solver_cfg.ball_radius = hyp.r;

    std::fs::create_dir_all(out_dir)?;
    let (result, code) = match solver::solve(spec.as_ref(), &kernel, &solver_cfg, params) {
        Ok(result) => (result, EXIT_OK),
        Err(Error::NoConvergence { result, .. }) => (*result, EXIT_NO_CONVERGENCE),
        Err(other) => return Err(other),
    };
    write_state_csv(&out_dir.join("state.csv"), &result.state)?;
    let report = serde_json::json!({
        "hypothesis": hyp,
        "solve": result,
    });
    std::fs::write(
        out_dir.join("report.json"),
        serde_json::to_string_pretty(&report)
            .map_err(|e| Error::MalformedConfig(e.to_string()))?,
    )?;
    print_json(&report);
    Ok(code)
}

fn run_verify(config_path: &PathBuf, state_path: &PathBuf, seed: u64) -> Result<u8, Error> {
    let config = Config::from_path(config_path)?;
    let params = config.lp_params()?;
    let spec = config.load_system()?;
    let kernel = config.kernel()?;
    let state = read_state_csv(state_path)?;

    let expected_mesh = solver::uniform_mesh(kernel.t_len(), config.mesh_points);
    if state.components() != config.components {
        return Err(Error::MeshMismatch(format!(
            "state has {} components, config J = {}",
            state.components(),
            config.components
        )));
    }
    if state.mesh_points() != config.mesh_points
        || state
            .mesh()
            .iter()
            .zip(&expected_mesh)
            .any(|(a, b)| (a - b).abs() > 1e-12 * kernel.t_len().max(1.0))
    {
        return Err(Error::MeshMismatch(
            "state mesh does not match the config mesh".into(),
        ));
    }

    let hyp = hypothesis::evaluate(
        spec.as_ref(),
        kernel.t_len(),
        params,
        config.components,
        config.t_samples,
    );
    let report = verifier::run_all(
        spec.as_ref(),
        &kernel,
        &config.solver_config(),
        params,
        &state,
        hyp.r,
        &config.verify,
        seed,
    )?;
    print_json(&report);
    Ok(if report.passed {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads(cli.threads);
    let outcome = match &cli.command {
        Command::Check { config } => run_check(config),
        Command::Solve { config, out } => run_solve(config, out),
        Command::Verify {
            config,
            state,
            seed,
        } => run_verify(config, state, *seed),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_for(&err))
        }
    }
}
