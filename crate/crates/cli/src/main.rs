//! Command line driver for the adaptive L-shape benchmarks.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use afem::harness::{problem, write_csv, LevelRecord};
use afem::mesh::initial_lshape;
use afem::{Error, EstimatorVariant, LoopConfig, Mesh, ProblemId, RefineMode};
use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    M3,
    M3p,
}

#[derive(Parser, Debug)]
#[command(name = "afem", version, about = "Adaptive P1/P2 finite elements on the L-shaped domain")]
struct Args {
    /// smooth, singular-known or singular-unknown
    #[arg(long, value_parser = parse_problem)]
    problem: ProblemId,
    /// Polynomial degree (1 or 2)
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Three (m3) or five (m3p) bisections per marked element
    #[arg(long, value_enum, default_value_t = Mode::M3)]
    mode: Mode,
    /// Marking parameter in (0, 1]; 1 refines uniformly
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Estimator driving the marking, e.g. lambda-res; defaults by degree and mode
    #[arg(long, value_parser = parse_variant)]
    variant: Option<EstimatorVariant>,
    /// Stop before a level whose mesh exceeds this many elements
    #[arg(long, default_value_t = 200_000)]
    max_elements: usize,
    /// Stop after this many levels
    #[arg(long)]
    max_levels: Option<usize>,
    /// CSV output path
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Write the last coarse mesh to this path
    #[arg(long)]
    dump_mesh: Option<std::path::PathBuf>,
    /// Accepted for compatibility; runs are deterministic
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress the per-level table
    #[arg(long)]
    quiet: bool,
}

fn parse_problem(s: &str) -> Result<ProblemId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_variant(s: &str) -> Result<EstimatorVariant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn fmt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.4e}"))
}

fn print_row(r: &LevelRecord, seconds: f64) {
    println!(
        "{:>3} {:>8} {:>9} {:>11} {:>11} {:>11} {:>11} {:>7} {:>7} {:>5} {:>7.2}s",
        r.level,
        r.nrelements,
        r.fine_dofs,
        fmt(r.eta[1]),
        fmt(r.eta[4]),
        fmt(r.error_osc),
        format!("{:.4e}", r.mu_tilde),
        r.efficiency().map_or("-".into(), |v| format!("{v:.4}")),
        r.reliability().map_or("-".into(), |v| format!("{v:.4}")),
        r.solver_iterations,
        seconds
    );
}

fn run(args: Args) -> Result<(), Error> {
    let mode = match args.mode {
        Mode::M3 => RefineMode::Bisec3,
        Mode::M3p => RefineMode::Bisec5,
    };
    let mut config = LoopConfig::new(args.problem, args.p, mode, args.theta).with_max_elements(args.max_elements);
    if let Some(v) = args.variant {
        config = config.with_variant(v);
    }
    if let Some(n) = args.max_levels {
        config = config.with_max_levels(n);
    }
    config.validate()?;
    if !args.quiet {
        println!(
            "{:>3} {:>8} {:>9} {:>11} {:>11} {:>11} {:>11} {:>7} {:>7} {:>5} {:>8}",
            "lvl", "N", "fine dofs", "lambda+osc", "mu+osc", "err+osc", "mu~", "eff", "rel", "iters", "time"
        );
    }
    let spec = problem(config.problem);
    let mut last: Option<Arc<Mesh>> = None;
    let mut clock = Instant::now();
    let records = afem::harness::run_experiment_with(&config, &spec, initial_lshape(), |state, record| {
        last = Some(state.coarse.mesh().clone());
        if !args.quiet {
            print_row(record, clock.elapsed().as_secs_f64());
            clock = Instant::now();
        }
        Ok(())
    })?;
    if let Some(path) = &args.out {
        write_csv(&records, path)?;
    }
    if let (Some(path), Some(mesh)) = (&args.dump_mesh, &last) {
        mesh.write_file(path)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::UnsupportedDegree(_) => 2,
                Error::Solver { .. } | Error::NotSpd(_) => 3,
                _ => 1,
            })
        }
    }
}
