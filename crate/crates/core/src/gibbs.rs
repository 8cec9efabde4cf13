//! Posterior inference for the count model.
//!
//! The sampler alternates three closed-form conditional updates:
//!
//! 1. each class-`k` success probability from
//!    `Beta(a0 + sum_j x_{gjk}, b0 + n_k * r_g)`,
//! 2. a latent table count for every (point, gene) cell, drawn from the
//!    table-count distribution with concentration `r_g` and the cell's
//!    count as occupancy, accumulated into a per-gene total,
//! 3. each dispersion from
//!    `Gamma(e0 + total_g, rate f0 - sum_k n_k ln(1 - p_{gk}))`.
//!
//! The latent totals are consumed immediately by the dispersion update, so
//! only the per-gene sums are ever stored. Chains start from the prior
//! mean dispersion `e0 / f0` and a prior draw of the probabilities.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dist;
use crate::error::{Error, Result};
use crate::model::{ClassLabel, Dataset, Hyperparameters, ModelParams};
use crate::rng::RngStream;

fn default_iterations() -> usize {
    300
}

fn default_burn_in() -> usize {
    150
}

fn default_thin() -> usize {
    3
}

/// Chain-length settings for the posterior sampler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GibbsConfig {
    /// Total sweeps per chain.
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    /// Sweeps discarded from the front of the chain.
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    /// Keep every `thin`-th sweep after burn-in.
    #[serde(default = "default_thin")]
    pub thin: usize,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        Self {
            iterations: default_iterations(),
            burn_in: default_burn_in(),
            thin: default_thin(),
        }
    }
}

impl GibbsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(Error::Config("thin must be at least 1".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::Config(format!(
                "burn_in ({}) must be smaller than iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        Ok(())
    }

    /// Number of draws a chain retains: sweeps `burn_in, burn_in + thin, ...`
    /// up to `iterations - 1`.
    pub fn retained_draws(&self) -> usize {
        (self.iterations - self.burn_in + self.thin - 1) / self.thin
    }
}

/// Retained posterior draws from one chain, together with the class sizes
/// of the dataset they condition on.
#[derive(Clone, Debug)]
pub struct PosteriorSamples {
    pub draws: Vec<ModelParams>,
    pub source_n0: usize,
    pub source_n1: usize,
}

impl PosteriorSamples {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn num_genes(&self) -> usize {
        self.draws.first().map_or(0, ModelParams::num_genes)
    }
}

fn check_dims(data: &Dataset, genes: usize) -> Result<()> {
    for point in data.iter() {
        if point.counts.len() != genes {
            return Err(Error::Config(format!(
                "sample point has {} genes, model expects {genes}",
                point.counts.len()
            )));
        }
    }
    Ok(())
}

/// Per-gene count totals of one class.
fn class_count_sums(data: &Dataset, label: ClassLabel, genes: usize) -> Vec<u64> {
    let mut sums = vec![0u64; genes];
    for point in data.class_points(label) {
        for (sum, count) in sums.iter_mut().zip(&point.counts) {
            *sum += count;
        }
    }
    sums
}

fn update_p_from_sums(
    sums: &[u64],
    class_size: usize,
    dispersions: &[f64],
    hyper: &Hyperparameters,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    let mut probs = Vec::with_capacity(sums.len());
    for (sum, r) in sums.iter().zip(dispersions) {
        let a = hyper.a0 + *sum as f64;
        let b = hyper.b0 + class_size as f64 * r;
        probs.push(dist::sample_beta(a, b, rng)?);
    }
    Ok(probs)
}

/// Draw both classes' success probabilities from their conditional
/// posteriors given the dispersions: `Beta(a0 + sum_j x_{gjk}, b0 + n_k r_g)`
/// for gene `g` of class `k` with `n_k` points. Class 0 is drawn first,
/// genes in order within each class.
pub fn update_p(
    data: &Dataset,
    dispersions: &[f64],
    hyper: &Hyperparameters,
    rng: &mut RngStream,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let genes = dispersions.len();
    check_dims(data, genes)?;
    let sums0 = class_count_sums(data, ClassLabel::Class0, genes);
    let sums1 = class_count_sums(data, ClassLabel::Class1, genes);
    let probs0 = update_p_from_sums(
        &sums0,
        data.class_len(ClassLabel::Class0),
        dispersions,
        hyper,
        rng,
    )?;
    let probs1 = update_p_from_sums(
        &sums1,
        data.class_len(ClassLabel::Class1),
        dispersions,
        hyper,
        rng,
    )?;
    Ok((probs0, probs1))
}

/// Draw a latent table count for every (point, gene) cell and return the
/// per-gene totals across all points of both classes. Points are visited
/// class 0 first, in insertion order, genes in order within each point.
pub fn sample_latent_tables(
    data: &Dataset,
    dispersions: &[f64],
    rng: &mut RngStream,
) -> Result<Vec<u64>> {
    let genes = dispersions.len();
    check_dims(data, genes)?;
    let mut totals = vec![0u64; genes];
    for point in data.iter() {
        for g in 0..genes {
            totals[g] += dist::sample_crt(point.counts[g], dispersions[g], rng)?;
        }
    }
    Ok(totals)
}

/// Draw each dispersion from its conditional posterior given the latent
/// table totals and the current probabilities:
/// `Gamma(e0 + total_g, rate f0 - n_0 ln(1 - p_{g0}) - n_1 ln(1 - p_{g1}))`.
pub fn update_r(
    table_totals: &[u64],
    probs0: &[f64],
    probs1: &[f64],
    n0: usize,
    n1: usize,
    hyper: &Hyperparameters,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    let mut dispersions = Vec::with_capacity(table_totals.len());
    for ((total, p0), p1) in table_totals.iter().zip(probs0).zip(probs1) {
        // A probability at 0 or 1 here signals an upstream bug, not data.
        if !(*p0 > 0.0 && *p0 < 1.0) {
            return Err(Error::domain("p0", *p0));
        }
        if !(*p1 > 0.0 && *p1 < 1.0) {
            return Err(Error::domain("p1", *p1));
        }
        let shape = hyper.e0 + *total as f64;
        let rate = hyper.f0 - n0 as f64 * (1.0 - p0).ln() - n1 as f64 * (1.0 - p1).ln();
        debug_assert!(rate >= hyper.f0);
        dispersions.push(dist::sample_gamma(shape, 1.0 / rate, rng)?);
    }
    Ok(dispersions)
}

fn run_sweeps(
    data: &Dataset,
    hyper: &Hyperparameters,
    config: &GibbsConfig,
    rng: &mut RngStream,
    mut on_sweep: impl FnMut(usize, &[f64], &[f64], &[f64]) -> Result<()>,
) -> Result<PosteriorSamples> {
    hyper.validate()?;
    config.validate()?;
    let genes = hyper.num_genes;
    check_dims(data, genes)?;

    let n0 = data.class_len(ClassLabel::Class0);
    let n1 = data.class_len(ClassLabel::Class1);
    let sums0 = class_count_sums(data, ClassLabel::Class0, genes);
    let sums1 = class_count_sums(data, ClassLabel::Class1, genes);

    let mut dispersions = vec![hyper.e0 / hyper.f0; genes];
    let mut draws = Vec::with_capacity(config.retained_draws());
    for sweep in 0..config.iterations {
        let probs0 = update_p_from_sums(&sums0, n0, &dispersions, hyper, rng)?;
        let probs1 = update_p_from_sums(&sums1, n1, &dispersions, hyper, rng)?;
        let totals = sample_latent_tables(data, &dispersions, rng)?;
        dispersions = update_r(&totals, &probs0, &probs1, n0, n1, hyper, rng)?;
        on_sweep(sweep, &dispersions, &probs0, &probs1)?;
        if sweep >= config.burn_in && (sweep - config.burn_in) % config.thin == 0 {
            draws.push(ModelParams {
                dispersions: dispersions.clone(),
                probs0,
                probs1,
            });
        }
    }
    Ok(PosteriorSamples {
        draws,
        source_n0: n0,
        source_n1: n1,
    })
}

/// Run one chain on `data` and return the retained draws.
pub fn run_gibbs(
    data: &Dataset,
    hyper: &Hyperparameters,
    config: &GibbsConfig,
    rng: &mut RngStream,
) -> Result<PosteriorSamples> {
    run_sweeps(data, hyper, config, rng, |_, _, _, _| Ok(()))
}

/// [`run_gibbs`], additionally writing every sweep (burn-in included) as a
/// CSV row `sweep,r_0..,p0_0..,p1_0..` for chain diagnostics.
pub fn run_gibbs_traced(
    data: &Dataset,
    hyper: &Hyperparameters,
    config: &GibbsConfig,
    rng: &mut RngStream,
    trace: &mut dyn Write,
) -> Result<PosteriorSamples> {
    let genes = hyper.num_genes;
    let mut header = String::from("sweep");
    for tag in ["r", "p0", "p1"] {
        for g in 0..genes {
            header.push_str(&format!(",{tag}_{g}"));
        }
    }
    writeln!(trace, "{header}").map_err(Error::Trace)?;

    run_sweeps(data, hyper, config, rng, |sweep, r, p0, p1| {
        let mut row = sweep.to_string();
        for value in r.iter().chain(p0).chain(p1) {
            row.push_str(&format!(",{value}"));
        }
        writeln!(trace, "{row}").map_err(Error::Trace)
    })
}
