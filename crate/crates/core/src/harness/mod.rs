//! The experiment protocol: paired random-vs-controlled sampling over many
//! repetitions, with parallel execution, aggregation, CSV output, and SVG
//! curve plots.
//!
//! Each repetition draws its own ground truth from the prior, generates a
//! shared initial training set and a fixed evaluation test set, and then
//! grows the training set one point at a time under two strategies run
//! from identical starting conditions: labels drawn at random by the class
//! prior, and labels chosen by the error-conditioned rule. After every
//! added point the posterior is refit and the classifier's error on the
//! test set is recorded.
//!
//! Repetitions are independent work items on derived random streams;
//! aggregation is an ordered reduction by repetition index, so results are
//! byte-identical no matter how many worker threads run.

mod plot;

pub use plot::{emit_plot, render_plot};

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbs;
use crate::model::{self, ClassLabel, Dataset, Hyperparameters, ModelParams};
use crate::obc::ObcClassifier;
use crate::rng::RngStream;
use crate::sampler::{self, SamplerConfig};

fn default_initial_n() -> usize {
    10
}

fn default_added_n() -> usize {
    30
}

fn default_repetitions() -> usize {
    2000
}

fn default_test_size() -> usize {
    10000
}

fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}

/// Full description of one experiment.
///
/// The JSON config file is this struct verbatim: top-level keys match the
/// field names, `hyper` and `sampler` are nested objects, and unknown keys
/// anywhere are an error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub hyper: Hyperparameters,
    /// Training points generated before either strategy starts.
    #[serde(default = "default_initial_n")]
    pub initial_n: usize,
    /// Points each strategy adds, one per step.
    #[serde(default = "default_added_n")]
    pub added_n: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Size of the fixed per-repetition evaluation test set.
    #[serde(default = "default_test_size")]
    pub test_size: usize,
    #[serde(default)]
    pub sampler: SamplerConfig,
    #[serde(default)]
    pub master_seed: u64,
    /// Upper bound on concurrently running repetitions.
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

impl ScenarioConfig {
    /// Parse a scenario from a JSON file, rejecting unknown keys.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Parse a scenario from JSON text, rejecting unknown keys.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.hyper.validate()?;
        self.sampler.validate()?;
        for (name, value) in [
            ("initial_n", self.initial_n),
            ("added_n", self.added_n),
            ("repetitions", self.repetitions),
            ("test_size", self.test_size),
            ("parallelism", self.parallelism),
        ] {
            if value == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// How the next training label was selected.
#[derive(Clone, Copy, Debug, Hash, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Random,
    Controlled,
}

impl Method {
    pub const BOTH: [Method; 2] = [Method::Random, Method::Controlled];

    fn stream_label(self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::Controlled => "controlled",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.stream_label())
    }
}

/// One measurement: the classifier's test error after one strategy added
/// its `training_size - initial_n`-th point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub repetition: usize,
    pub method: Method,
    pub training_size: usize,
    /// Label of the point added at this step (drawn for random, chosen for
    /// controlled).
    pub chosen_class: ClassLabel,
    pub error: f64,
}

/// One aggregated point of a method's mean-error curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub method: Method,
    pub training_size: usize,
    pub mean_error: f64,
    /// Standard error of the mean across repetitions.
    pub stderr: f64,
}

/// Raw records plus the derived mean curves of one scenario run.
#[derive(Clone, Debug)]
pub struct ScenarioResult {
    pub records: Vec<StepRecord>,
    pub curves: Vec<CurvePoint>,
}

/// Ground truth, initial training set, and evaluation test set of one
/// repetition. Both strategies start from exactly these values; the
/// derivation depends only on `(master_seed, rep_index)`.
pub fn repetition_inputs(
    scn: &ScenarioConfig,
    rep_index: usize,
) -> Result<(ModelParams, Dataset, Dataset)> {
    let rep_rng = RngStream::new(scn.master_seed).child_indexed("repetition", rep_index as u64);
    let truth = model::draw_true_params(&scn.hyper, &mut rep_rng.child("truth"))?;
    let initial = model::generate_labeled_set(
        &truth,
        scn.hyper.c,
        scn.initial_n,
        &mut rep_rng.child("initial"),
    )?;
    let test = model::generate_labeled_set(
        &truth,
        scn.hyper.c,
        scn.test_size,
        &mut rep_rng.child("test"),
    )?;
    Ok((truth, initial, test))
}

/// Run both strategies of one repetition and return one record per
/// strategy per added point (`2 * added_n` records).
pub fn run_repetition(scn: &ScenarioConfig, rep_index: usize) -> Result<Vec<StepRecord>> {
    scn.validate()?;
    let (truth, initial, test) = repetition_inputs(scn, rep_index)?;
    let rep_rng = RngStream::new(scn.master_seed).child_indexed("repetition", rep_index as u64);

    let mut records = Vec::with_capacity(2 * scn.added_n);
    for method in Method::BOTH {
        let method_rng = rep_rng.child(method.stream_label());
        let mut data = initial.clone();
        for step in 1..=scn.added_n {
            let step_rng = method_rng.child_indexed("step", step as u64);
            let label = match method {
                Method::Random => model::draw_label(scn.hyper.c, &mut step_rng.child("label")),
                Method::Controlled => sampler::choose_next_class(
                    &data,
                    &scn.hyper,
                    &scn.sampler,
                    &mut step_rng.child("choose"),
                )?,
            };
            let point = model::generate_sample(&truth, label, &mut step_rng.child("point"))?;
            data.push(point);

            let posterior = gibbs::run_gibbs(
                &data,
                &scn.hyper,
                &scn.sampler.gibbs,
                &mut step_rng.child("fit"),
            )?;
            let classifier = ObcClassifier::new(&posterior, scn.hyper.c)?;
            let error = classifier.estimate_error(&test)?.total;
            records.push(StepRecord {
                repetition: rep_index,
                method,
                training_size: scn.initial_n + step,
                chosen_class: label,
                error,
            });
        }
        log::debug!(
            "repetition {rep_index} {method}: final error {:.4}",
            records.last().map_or(f64::NAN, |rec| rec.error)
        );
    }
    Ok(records)
}

/// Mean and standard error per (method, training size), in repetition
/// order within each cell. Rows come out random-method first, training
/// sizes ascending within each method.
pub fn aggregate(records: &[StepRecord]) -> Vec<CurvePoint> {
    let mut curves = Vec::new();
    for method in Method::BOTH {
        let mut sizes: Vec<usize> = records
            .iter()
            .filter(|rec| rec.method == method)
            .map(|rec| rec.training_size)
            .collect();
        sizes.sort_unstable();
        sizes.dedup();
        for size in sizes {
            let errors: Vec<f64> = records
                .iter()
                .filter(|rec| rec.method == method && rec.training_size == size)
                .map(|rec| rec.error)
                .collect();
            let n = errors.len() as f64;
            let mean = errors.iter().sum::<f64>() / n;
            let stderr = if errors.len() < 2 {
                0.0
            } else {
                let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            };
            curves.push(CurvePoint {
                method,
                training_size: size,
                mean_error: mean,
                stderr,
            });
        }
    }
    curves
}

fn csv_error(path: &Path, err: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source: err,
    }
}

/// Write raw step records as CSV
/// (`repetition,method,training_size,chosen_class,error`).
pub fn write_raw_csv(records: &[StepRecord], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for record in records {
        writer.serialize(record).map_err(|e| csv_error(path, e))?;
    }
    writer
        .flush()
        .map_err(|e| Error::io(path, e))
}

/// Write mean curves as CSV (`method,training_size,mean_error,stderr`).
pub fn write_mean_csv(curves: &[CurvePoint], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for point in curves {
        writer.serialize(point).map_err(|e| csv_error(path, e))?;
    }
    writer
        .flush()
        .map_err(|e| Error::io(path, e))
}

/// Path of the raw per-step CSV inside an output directory.
pub fn raw_csv_path(out_dir: &Path) -> PathBuf {
    out_dir.join("raw.csv")
}

/// Path of the aggregated mean-curve CSV inside an output directory.
pub fn mean_csv_path(out_dir: &Path) -> PathBuf {
    out_dir.join("mean.csv")
}

/// Run every repetition of the scenario (parallel up to
/// `scn.parallelism`), write `raw.csv` and `mean.csv` into `out_dir`, and
/// return the records and curves. Output is identical for every
/// parallelism degree.
pub fn run_scenario(scn: &ScenarioConfig, out_dir: &Path) -> Result<ScenarioResult> {
    use rayon::prelude::*;

    scn.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(scn.parallelism)
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;

    log::info!(
        "running {} repetitions on {} worker(s)",
        scn.repetitions,
        scn.parallelism
    );
    let per_rep: Vec<Vec<StepRecord>> = pool.install(|| {
        (0..scn.repetitions)
            .into_par_iter()
            .map(|rep_index| run_repetition(scn, rep_index))
            .collect::<Result<_>>()
    })?;
    let records: Vec<StepRecord> = per_rep.into_iter().flatten().collect();
    let curves = aggregate(&records);

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    write_raw_csv(&records, &raw_csv_path(out_dir))?;
    write_mean_csv(&curves, &mean_csv_path(out_dir))?;
    log::info!("wrote {} records to {}", records.len(), out_dir.display());
    Ok(ScenarioResult { records, curves })
}
