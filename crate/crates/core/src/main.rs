//! `simulate` — run the random-vs-controlled sampling experiment from a
//! JSON scenario config and write CSV results (and optionally an SVG
//! plot) to an output directory.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use obcsim::harness::{self, Method, ScenarioConfig};
use obcsim::rng::RngStream;
use obcsim::{gibbs, Error};

/// Error-conditioned sequential sampling simulation for negative-binomial
/// count classifiers: compares random label sampling against choosing the
/// label that minimizes the classifier's expected error.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Cli {
    /// Scenario configuration file (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    /// Override the config's master_seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Override the config's repetitions.
    #[arg(long, value_name = "N")]
    reps: Option<usize>,

    /// Override the config's parallelism.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,

    /// Directory for raw.csv, mean.csv and plot.svg.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Also render the mean curves to plot.svg.
    #[arg(long)]
    plot: bool,

    /// Diagnostic mode: run one Gibbs chain on repetition 0's initial
    /// data, write every sweep to FILE as CSV, and exit.
    #[arg(long, value_name = "FILE")]
    trace_gibbs: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            if err.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<(), Error> {
    let mut scn = ScenarioConfig::from_json_file(&cli.config)?;
    if let Some(seed) = cli.seed {
        scn.master_seed = seed;
    }
    if let Some(reps) = cli.reps {
        scn.repetitions = reps;
    }
    if let Some(threads) = cli.threads {
        scn.parallelism = threads;
    }
    scn.validate()?;

    if let Some(trace_path) = &cli.trace_gibbs {
        return trace_gibbs(&scn, trace_path);
    }

    let result = harness::run_scenario(&scn, &cli.out)?;
    for method in Method::BOTH {
        if let Some(point) = result
            .curves
            .iter()
            .rfind(|point| point.method == method)
        {
            println!(
                "{method:>10}: mean error {:.4} (stderr {:.4}) at training size {}",
                point.mean_error, point.stderr, point.training_size
            );
        }
    }
    println!("raw records: {}", harness::raw_csv_path(&cli.out).display());
    println!("mean curves: {}", harness::mean_csv_path(&cli.out).display());

    if cli.plot {
        let plot_path = cli.out.join("plot.svg");
        harness::emit_plot(&result.curves, &plot_path)?;
        println!("plot: {}", plot_path.display());
    }
    Ok(())
}

/// Run one diagnostic chain on the initial data of repetition 0 and dump
/// every sweep to a CSV file.
fn trace_gibbs(scn: &ScenarioConfig, path: &PathBuf) -> Result<(), Error> {
    let (_, initial, _) = harness::repetition_inputs(scn, 0)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    let samples = gibbs::run_gibbs_traced(
        &initial,
        &scn.hyper,
        &scn.sampler.gibbs,
        &mut RngStream::new(scn.master_seed).child("gibbs-trace"),
        &mut writer,
    )?;
    println!(
        "traced {} sweeps ({} retained) to {}",
        scn.sampler.gibbs.iterations,
        samples.len(),
        path.display()
    );
    Ok(())
}
