//! Error-conditioned choice of the class to sample next.
//!
//! Given the current training data, the controlled strategy asks: if the
//! next training point were drawn from class `k`, what would the
//! classifier's expected error become? That quantity has no closed form,
//! so it is estimated by simulation:
//!
//! 1. fit the posterior to the current data,
//! 2. for each of `candidate_draws` repeats, take one retained draw as a
//!    stand-in truth, synthesize an inner test set and a hypothetical
//!    class-`k` training point from it, refit on the augmented data, and
//!    measure the refit classifier's error on the inner test set,
//! 3. average the repeats.
//!
//! The class with the smaller estimated post-sampling error wins; ties go
//! to class 0. Both classes are estimated on independent child streams, so
//! neither estimate perturbs the other's draws.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbs::{self, GibbsConfig};
use crate::model::{self, ClassLabel, Dataset, Hyperparameters};
use crate::obc::ObcClassifier;
use crate::rng::RngStream;

fn default_candidate_draws() -> usize {
    3
}

fn default_inner_test_size() -> usize {
    500
}

/// Settings of the error-conditioned sampling rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    /// Number of posterior stand-in truths averaged per class estimate.
    #[serde(default = "default_candidate_draws")]
    pub candidate_draws: usize,
    /// Size of each synthesized inner test set.
    #[serde(default = "default_inner_test_size")]
    pub inner_test_size: usize,
    /// Chain settings used for the base fit and every refit.
    #[serde(default)]
    pub gibbs: GibbsConfig,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            candidate_draws: default_candidate_draws(),
            inner_test_size: default_inner_test_size(),
            gibbs: GibbsConfig::default(),
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.candidate_draws == 0 {
            return Err(Error::Config("candidate_draws must be at least 1".into()));
        }
        if self.inner_test_size == 0 {
            return Err(Error::Config("inner_test_size must be at least 1".into()));
        }
        self.gibbs.validate()
    }
}

/// Estimated expected classifier error after hypothetically adding one
/// class-`label` point to `data`.
pub fn expected_error_if_sampled(
    label: ClassLabel,
    data: &Dataset,
    hyper: &Hyperparameters,
    config: &SamplerConfig,
    rng: &mut RngStream,
) -> Result<f64> {
    expected_error_from_start(label, data, hyper, config, 0, rng)
}

/// [`expected_error_if_sampled`] with the round-robin walk over retained
/// draws starting at `start` instead of 0. Repeat `m` uses retained draw
/// `(start + m) % draws` as its stand-in truth; with `candidate_draws`
/// equal to the number of retained draws the average is independent of
/// `start` up to summation order.
pub fn expected_error_from_start(
    label: ClassLabel,
    data: &Dataset,
    hyper: &Hyperparameters,
    config: &SamplerConfig,
    start: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    config.validate()?;
    let posterior = gibbs::run_gibbs(data, hyper, &config.gibbs, &mut rng.child("fit"))?;

    let mut total = 0.0;
    for m in 0..config.candidate_draws {
        let truth = &posterior.draws[(start + m) % posterior.len()];
        let repeat_rng = rng.child_indexed("repeat", m as u64);

        let inner_test = model::generate_labeled_set(
            truth,
            hyper.c,
            config.inner_test_size,
            &mut repeat_rng.child("inner-test"),
        )?;
        let candidate =
            model::generate_sample(truth, label, &mut repeat_rng.child("candidate"))?;

        let mut augmented = data.clone();
        augmented.push(candidate);
        let refit = gibbs::run_gibbs(
            &augmented,
            hyper,
            &config.gibbs,
            &mut repeat_rng.child("refit"),
        )?;
        let classifier = ObcClassifier::new(&refit, hyper.c)?;
        total += classifier.estimate_error(&inner_test)?.total;
    }
    Ok(total / config.candidate_draws as f64)
}

/// Pick the class whose estimated post-sampling error is smaller; ties go
/// to class 0.
pub fn pick_lower_error(error0: f64, error1: f64) -> ClassLabel {
    if error1 < error0 {
        ClassLabel::Class1
    } else {
        ClassLabel::Class0
    }
}

/// The controlled sampling decision: estimate the post-sampling error of
/// both classes on independent child streams and pick the smaller.
pub fn choose_next_class(
    data: &Dataset,
    hyper: &Hyperparameters,
    config: &SamplerConfig,
    rng: &mut RngStream,
) -> Result<ClassLabel> {
    let error0 = expected_error_if_sampled(
        ClassLabel::Class0,
        data,
        hyper,
        config,
        &mut rng.child("candidate-class0"),
    )?;
    let error1 = expected_error_if_sampled(
        ClassLabel::Class1,
        data,
        hyper,
        config,
        &mut rng.child("candidate-class1"),
    )?;
    Ok(pick_lower_error(error0, error1))
}
