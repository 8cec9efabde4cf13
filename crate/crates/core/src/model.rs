//! The two-class count model: hyperparameters, ground-truth parameters,
//! and synthetic data generation.
//!
//! A sample point is a vector of per-gene read counts plus a class label.
//! Gene `g` of a class-`k` point is negative binomial with dispersion
//! `r_g` (shared by both classes) and success probability `p_{gk}`
//! (class-specific). The generative hierarchy places a Gamma(e0, rate f0)
//! prior on each dispersion and a Beta(a0, b0) prior on each probability;
//! labels are Bernoulli with `P(class 0) = c`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dist;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Which of the two classes a sample point belongs to.
#[derive(Clone, Copy, Debug, Hash, PartialEq, Eq)]
pub enum ClassLabel {
    Class0,
    Class1,
}

impl ClassLabel {
    /// Both labels, in class order.
    pub const BOTH: [ClassLabel; 2] = [ClassLabel::Class0, ClassLabel::Class1];

    /// 0 or 1.
    pub fn index(self) -> usize {
        match self {
            ClassLabel::Class0 => 0,
            ClassLabel::Class1 => 1,
        }
    }

    /// The other class.
    pub fn other(self) -> ClassLabel {
        match self {
            ClassLabel::Class0 => ClassLabel::Class1,
            ClassLabel::Class1 => ClassLabel::Class0,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

impl Serialize for ClassLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.index() as u64)
    }
}

impl<'de> Deserialize<'de> for ClassLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        match u64::deserialize(deserializer)? {
            0 => Ok(ClassLabel::Class0),
            1 => Ok(ClassLabel::Class1),
            other => Err(serde::de::Error::custom(format!(
                "class label must be 0 or 1, got {other}"
            ))),
        }
    }
}

fn default_num_genes() -> usize {
    5
}

/// Prior hyperparameters of the count model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hyperparameters {
    /// Prior probability that a point belongs to class 0.
    pub c: f64,
    /// Beta shape parameters of the success-probability prior.
    pub a0: f64,
    pub b0: f64,
    /// Gamma shape and rate of the dispersion prior (mean `e0 / f0`).
    pub e0: f64,
    pub f0: f64,
    /// Number of genes measured per sample point.
    #[serde(default = "default_num_genes")]
    pub num_genes: usize,
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(Error::Config(format!(
                "c must lie strictly between 0 and 1, got {}",
                self.c
            )));
        }
        for (name, value) in [
            ("a0", self.a0),
            ("b0", self.b0),
            ("e0", self.e0),
            ("f0", self.f0),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        if self.num_genes == 0 {
            return Err(Error::Config("num_genes must be at least 1".into()));
        }
        Ok(())
    }
}

/// A full parameter vector of the count model: one dispersion per gene and
/// one success probability per gene per class.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub dispersions: Vec<f64>,
    pub probs0: Vec<f64>,
    pub probs1: Vec<f64>,
}

impl ModelParams {
    pub fn num_genes(&self) -> usize {
        self.dispersions.len()
    }

    /// Success probabilities of the given class.
    pub fn probs(&self, label: ClassLabel) -> &[f64] {
        match label {
            ClassLabel::Class0 => &self.probs0,
            ClassLabel::Class1 => &self.probs1,
        }
    }
}

/// One labeled observation: per-gene counts plus the class they came from.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplePoint {
    pub counts: Vec<u64>,
    pub label: ClassLabel,
}

/// A labeled collection of sample points, stored partitioned by class so
/// per-class sums and counts never require a scan.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    class0: Vec<SamplePoint>,
    class1: Vec<SamplePoint>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add a point to the partition matching its label.
    pub fn push(&mut self, point: SamplePoint) {
        match point.label {
            ClassLabel::Class0 => self.class0.push(point),
            ClassLabel::Class1 => self.class1.push(point),
        }
    }

    /// Number of points in the given class.
    pub fn class_len(&self, label: ClassLabel) -> usize {
        self.class_points(label).len()
    }

    pub fn len(&self) -> usize {
        self.class0.len() + self.class1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class0.is_empty() && self.class1.is_empty()
    }

    /// Points of one class, in insertion order.
    pub fn class_points(&self, label: ClassLabel) -> &[SamplePoint] {
        match label {
            ClassLabel::Class0 => &self.class0,
            ClassLabel::Class1 => &self.class1,
        }
    }

    /// All points, class 0 first, then class 1, each in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &SamplePoint> {
        self.class0.iter().chain(self.class1.iter())
    }

    /// Largest count anywhere in the dataset (0 when empty).
    pub fn max_count(&self) -> u64 {
        self.iter()
            .flat_map(|point| point.counts.iter().copied())
            .max()
            .unwrap_or(0)
    }
}

/// Draw a ground-truth parameter vector from the prior: all dispersions
/// first, then the class-0 probabilities, then the class-1 probabilities.
pub fn draw_true_params(hyper: &Hyperparameters, rng: &mut RngStream) -> Result<ModelParams> {
    let genes = hyper.num_genes;
    let mut dispersions = Vec::with_capacity(genes);
    for _ in 0..genes {
        dispersions.push(dist::sample_gamma(hyper.e0, 1.0 / hyper.f0, rng)?);
    }
    let mut probs0 = Vec::with_capacity(genes);
    for _ in 0..genes {
        probs0.push(dist::sample_beta(hyper.a0, hyper.b0, rng)?);
    }
    let mut probs1 = Vec::with_capacity(genes);
    for _ in 0..genes {
        probs1.push(dist::sample_beta(hyper.a0, hyper.b0, rng)?);
    }
    Ok(ModelParams {
        dispersions,
        probs0,
        probs1,
    })
}

/// Draw one labeled count vector from the given class of the model.
pub fn generate_sample(
    params: &ModelParams,
    label: ClassLabel,
    rng: &mut RngStream,
) -> Result<SamplePoint> {
    let probs = params.probs(label);
    let mut counts = Vec::with_capacity(params.num_genes());
    for (r, p) in params.dispersions.iter().zip(probs) {
        counts.push(dist::sample_nb(*r, *p, rng)?);
    }
    Ok(SamplePoint { counts, label })
}

/// Draw a class label with `P(class 0) = c`.
pub fn draw_label(c: f64, rng: &mut RngStream) -> ClassLabel {
    use rand::Rng;
    if rng.random::<f64>() < c {
        ClassLabel::Class0
    } else {
        ClassLabel::Class1
    }
}

/// Generate `n` points whose labels are Bernoulli draws with
/// `P(class 0) = c`; each point draws its label first, then its counts.
pub fn generate_labeled_set(
    params: &ModelParams,
    c: f64,
    n: usize,
    rng: &mut RngStream,
) -> Result<Dataset> {
    let mut data = Dataset::new();
    for _ in 0..n {
        let label = draw_label(c, rng);
        data.push(generate_sample(params, label, rng)?);
    }
    Ok(data)
}
