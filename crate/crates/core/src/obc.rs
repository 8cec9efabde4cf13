//! The posterior-averaged count classifier and its empirical error.
//!
//! The classifier scores a count vector under each class by averaging the
//! model likelihood over retained posterior draws (the Monte Carlo
//! estimate of the class's effective density), weights the scores by the
//! class prior, and picks the larger side. All scoring happens in log
//! space; the average over draws uses log-sum-exp.

use crate::dist;
use crate::error::{Error, Result};
use crate::gibbs::PosteriorSamples;
use crate::model::{ClassLabel, Dataset};

/// Numerically stable `ln(sum_i exp(v_i))`.
fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Monte Carlo estimate of the log effective class-conditional density:
/// the posterior average, over retained draws, of the model likelihood of
/// `counts` under class `label`.
pub fn effective_log_density(
    counts: &[u64],
    posterior: &PosteriorSamples,
    label: ClassLabel,
) -> f64 {
    let mut log_likes = Vec::with_capacity(posterior.len());
    for draw in &posterior.draws {
        let probs = draw.probs(label);
        let mut ll = 0.0;
        for ((x, r), p) in counts.iter().zip(&draw.dispersions).zip(probs) {
            ll += dist::nb_log_pmf_unchecked(*x, *r, *p);
        }
        log_likes.push(ll);
    }
    log_sum_exp(&log_likes) - (posterior.len() as f64).ln()
}

/// Pick the class with the larger prior-weighted log score; exact ties go
/// to class 0.
pub fn decide_from_scores(score0: f64, score1: f64) -> ClassLabel {
    if score0 >= score1 {
        ClassLabel::Class0
    } else {
        ClassLabel::Class1
    }
}

/// Empirical error of a classifier on a labeled test set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorEstimate {
    /// Overall misclassification rate, equal by construction to the
    /// label-frequency-weighted average of the per-class rates.
    pub total: f64,
    /// Fraction of class-0 test points sent to class 1.
    pub class0_error: f64,
    /// Fraction of class-1 test points sent to class 0.
    pub class1_error: f64,
    pub n_test0: usize,
    pub n_test1: usize,
}

impl ErrorEstimate {
    fn from_counts(wrong0: usize, n0: usize, wrong1: usize, n1: usize) -> Self {
        let rate = |wrong: usize, n: usize| if n == 0 { 0.0 } else { wrong as f64 / n as f64 };
        let class0_error = rate(wrong0, n0);
        let class1_error = rate(wrong1, n1);
        let n = (n0 + n1) as f64;
        let total = (n0 as f64 * class0_error + n1 as f64 * class1_error) / n;
        Self {
            total,
            class0_error,
            class1_error,
            n_test0: n0,
            n_test1: n1,
        }
    }
}

/// Per-draw, per-gene log-mass tables over a bounded count range, so that
/// scoring a whole test set evaluates each (draw, gene, count) log-mass at
/// most once. Table entries are exactly the values the direct scoring path
/// would compute, making both paths decide identically.
struct DensityTables {
    genes: usize,
    width: usize,
    draws: usize,
    /// Indexed `[label][(s * genes + g) * width + x]`.
    values: [Vec<f64>; 2],
}

impl DensityTables {
    fn build(posterior: &PosteriorSamples, max_count: u64) -> Self {
        let genes = posterior.num_genes();
        let width = max_count as usize + 1;
        let draws = posterior.len();
        let mut values = [Vec::new(), Vec::new()];
        for label in ClassLabel::BOTH {
            let table = &mut values[label.index()];
            table.reserve_exact(draws * genes * width);
            for draw in &posterior.draws {
                let probs = draw.probs(label);
                for (r, p) in draw.dispersions.iter().zip(probs) {
                    for x in 0..width {
                        table.push(dist::nb_log_pmf_unchecked(x as u64, *r, *p));
                    }
                }
            }
        }
        Self {
            genes,
            width,
            draws,
            values,
        }
    }

    /// Table-backed equivalent of [`effective_log_density`].
    fn log_density(&self, counts: &[u64], label: ClassLabel, scratch: &mut Vec<f64>) -> f64 {
        let table = &self.values[label.index()];
        scratch.clear();
        for s in 0..self.draws {
            let base = s * self.genes * self.width;
            let mut ll = 0.0;
            for (g, x) in counts.iter().enumerate() {
                ll += table[base + g * self.width + *x as usize];
            }
            scratch.push(ll);
        }
        log_sum_exp(scratch) - (self.draws as f64).ln()
    }
}

/// A classifier built from one posterior and a class-0 prior weight.
pub struct ObcClassifier<'a> {
    posterior: &'a PosteriorSamples,
    ln_prior0: f64,
    ln_prior1: f64,
}

impl<'a> ObcClassifier<'a> {
    /// `class0_prior` is the prior probability of class 0 (the expected
    /// label split of future points).
    pub fn new(posterior: &'a PosteriorSamples, class0_prior: f64) -> Result<Self> {
        if !(class0_prior > 0.0 && class0_prior < 1.0) {
            return Err(Error::domain("class0_prior", class0_prior));
        }
        if posterior.is_empty() {
            return Err(Error::Config("posterior contains no draws".into()));
        }
        Ok(Self {
            posterior,
            ln_prior0: class0_prior.ln(),
            ln_prior1: (1.0 - class0_prior).ln(),
        })
    }

    /// Classify one count vector. Consumes no randomness.
    pub fn classify(&self, counts: &[u64]) -> ClassLabel {
        let score0 = self.ln_prior0 + effective_log_density(counts, self.posterior, ClassLabel::Class0);
        let score1 = self.ln_prior1 + effective_log_density(counts, self.posterior, ClassLabel::Class1);
        decide_from_scores(score0, score1)
    }

    /// Misclassification rates over a labeled test set.
    ///
    /// Decisions are identical to calling [`Self::classify`] on each point;
    /// the log-mass memoization only removes repeated evaluations.
    pub fn estimate_error(&self, test: &Dataset) -> Result<ErrorEstimate> {
        if test.is_empty() {
            return Err(Error::EmptyTestSet);
        }
        let genes = self.posterior.num_genes();
        for point in test.iter() {
            if point.counts.len() != genes {
                return Err(Error::Config(format!(
                    "test point has {} genes, posterior expects {genes}",
                    point.counts.len()
                )));
            }
        }
        let tables = DensityTables::build(self.posterior, test.max_count());
        let mut scratch = Vec::with_capacity(self.posterior.len());
        let mut wrong = [0usize; 2];
        for label in ClassLabel::BOTH {
            for point in test.class_points(label) {
                let score0 = self.ln_prior0
                    + tables.log_density(&point.counts, ClassLabel::Class0, &mut scratch);
                let score1 = self.ln_prior1
                    + tables.log_density(&point.counts, ClassLabel::Class1, &mut scratch);
                if decide_from_scores(score0, score1) != label {
                    wrong[label.index()] += 1;
                }
            }
        }
        Ok(ErrorEstimate::from_counts(
            wrong[0],
            test.class_len(ClassLabel::Class0),
            wrong[1],
            test.class_len(ClassLabel::Class1),
        ))
    }
}
