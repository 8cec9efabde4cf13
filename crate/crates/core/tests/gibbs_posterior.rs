//! Posterior-inference checks: literal conditional-update laws, the
//! analytic conjugate oracle with a pinned dispersion, prior recovery on
//! empty data, and a coverage simulation against known ground truth.

mod common;

use obcsim::gibbs::{self, GibbsConfig};
use obcsim::model::{ClassLabel, Dataset, Hyperparameters, SamplePoint};
use obcsim::rng::RngStream;
use obcsim::Error;
use statrs::distribution::{Beta, ContinuousCDF};

use common::*;

fn hyper(a0: f64, b0: f64, e0: f64, f0: f64, genes: usize) -> Hyperparameters {
    Hyperparameters {
        c: 0.5,
        a0,
        b0,
        e0,
        f0,
        num_genes: genes,
    }
}

fn point(counts: Vec<u64>, label: ClassLabel) -> SamplePoint {
    SamplePoint { counts, label }
}

#[test]
fn update_p_matches_the_literal_conditional_law() {
    // Two class-0 points with counts {5, 0} and r = 1 under a flat prior:
    // the class-0 conditional is Beta(1 + 5, 1 + 2*1) = Beta(6, 3).
    let mut data = Dataset::new();
    data.push(point(vec![5], ClassLabel::Class0));
    data.push(point(vec![0], ClassLabel::Class0));
    let hyper = hyper(1.0, 1.0, 1.0, 1.0, 1);
    let mut rng = RngStream::new(201);

    let mut draws0 = Vec::with_capacity(4000);
    let mut draws1 = Vec::with_capacity(4000);
    for _ in 0..4000 {
        let (p0, p1) = gibbs::update_p(&data, &[1.0], &hyper, &mut rng).unwrap();
        draws0.push(p0[0]);
        draws1.push(p1[0]);
    }
    let conditional = Beta::new(6.0, 3.0).unwrap();
    let distance = ks_distance(&mut draws0, |x| conditional.cdf(x));
    assert!(distance < 0.03, "KS distance {distance} against Beta(6,3)");

    // The empty class falls back to its prior, here uniform.
    let prior = Beta::new(1.0, 1.0).unwrap();
    let distance = ks_distance(&mut draws1, |x| prior.cdf(x));
    assert!(distance < 0.03, "KS distance {distance} against Beta(1,1)");
}

#[test]
fn latent_table_totals_follow_the_enumeration_pmf() {
    // A single point with count 3 and r = 1: the total is one table draw
    // with pmf {1/3, 1/2, 1/6} on {1, 2, 3}.
    let mut data = Dataset::new();
    data.push(point(vec![3], ClassLabel::Class0));
    let mut rng = RngStream::new(202);
    let draws: Vec<u64> = (0..100_000)
        .map(|_| gibbs::sample_latent_tables(&data, &[1.0], &mut rng).unwrap()[0])
        .collect();
    let pmf = crt_enumeration_pmf(3, 1.0);
    assert!(gof_matches(&histogram(&draws, 3), &pmf, 0.01));

    // Zero and one-count cells are deterministic.
    let mut zeros = Dataset::new();
    zeros.push(point(vec![0, 1], ClassLabel::Class1));
    let totals = gibbs::sample_latent_tables(&zeros, &[2.0, 2.0], &mut rng).unwrap();
    assert_eq!(totals, vec![0, 1]);
}

#[test]
fn update_r_matches_the_literal_conditional_law() {
    // e0 = f0 = 1, table total 4, two class-0 points at p = 0.5:
    // Gamma(1 + 4, scale 1 / (1 - 2 ln(1 - 0.5))) = Gamma(5, 1/(1 + 2 ln 2)).
    let hyper = hyper(1.0, 1.0, 1.0, 1.0, 1);
    let mut rng = RngStream::new(203);
    let draws: Vec<f64> = (0..100_000)
        .map(|_| {
            gibbs::update_r(&[4], &[0.5], &[0.5], 2, 0, &hyper, &mut rng).unwrap()[0]
        })
        .collect();
    let rate = 1.0 + 2.0 * 2.0f64.ln();
    assert!((mean(&draws) - 5.0 / rate).abs() < 0.01, "mean {}", mean(&draws));
    assert!(
        (sample_variance(&draws) - 5.0 / (rate * rate)).abs() < 0.02,
        "variance {}",
        sample_variance(&draws)
    );
}

#[test]
fn update_r_with_no_data_is_the_prior() {
    let hyper = hyper(1.0, 1.0, 1.0, 1.0, 1);
    let mut rng = RngStream::new(204);
    let draws: Vec<f64> = (0..100_000)
        .map(|_| {
            gibbs::update_r(&[0], &[0.5], &[0.5], 0, 0, &hyper, &mut rng).unwrap()[0]
        })
        .collect();
    assert!((mean(&draws) - 1.0).abs() < 0.02);
}

#[test]
fn update_r_rejects_degenerate_probabilities() {
    let hyper = hyper(1.0, 1.0, 1.0, 1.0, 1);
    let mut rng = RngStream::new(205);
    assert!(matches!(
        gibbs::update_r(&[1], &[1.0], &[0.5], 1, 1, &hyper, &mut rng),
        Err(Error::ParamDomain { .. })
    ));
    assert!(matches!(
        gibbs::update_r(&[1], &[0.5], &[0.0], 1, 1, &hyper, &mut rng),
        Err(Error::ParamDomain { .. })
    ));
}

#[test]
fn larger_probabilities_shrink_the_dispersion_draw() {
    let hyper = hyper(1.0, 1.0, 1.0, 1.0, 1);
    let mut rng = RngStream::new(206);
    let mean_at = |p: f64, rng: &mut RngStream| {
        let draws: Vec<f64> = (0..10_000)
            .map(|_| gibbs::update_r(&[4], &[p], &[p], 3, 3, &hyper, rng).unwrap()[0])
            .collect();
        mean(&draws)
    };
    let low = mean_at(0.2, &mut rng);
    let high = mean_at(0.8, &mut rng);
    assert!(
        high < low,
        "dispersion mean should fall as p grows: {low} -> {high}"
    );
}

#[test]
fn pinned_dispersion_reproduces_the_analytic_beta_posterior() {
    // A gamma prior with huge shape and rate pins r at 1, making the
    // p-marginal exactly the conjugate Beta posterior.
    let hyper = hyper(2.0, 3.0, 1e8, 1e8, 1);
    let mut data = Dataset::new();
    data.push(point(vec![7], ClassLabel::Class0));
    data.push(point(vec![2], ClassLabel::Class0));
    data.push(point(vec![0], ClassLabel::Class0));
    data.push(point(vec![1], ClassLabel::Class1));

    let config = GibbsConfig {
        iterations: 5150,
        burn_in: 150,
        thin: 1,
    };
    assert_eq!(config.retained_draws(), 5000);
    let samples = gibbs::run_gibbs(&data, &hyper, &config, &mut RngStream::new(207)).unwrap();

    for draw in &samples.draws {
        assert!((draw.dispersions[0] - 1.0).abs() < 1e-2, "dispersion drifted");
    }

    // Class 0: Beta(2 + 9, 3 + 3*1); class 1: Beta(2 + 1, 3 + 1*1).
    let mut p0: Vec<f64> = samples.draws.iter().map(|d| d.probs0[0]).collect();
    let posterior0 = Beta::new(11.0, 6.0).unwrap();
    let distance = ks_distance(&mut p0, |x| posterior0.cdf(x));
    assert!(distance < 0.05, "KS distance {distance} against Beta(11,6)");

    let mut p1: Vec<f64> = samples.draws.iter().map(|d| d.probs1[0]).collect();
    let posterior1 = Beta::new(3.0, 4.0).unwrap();
    let distance = ks_distance(&mut p1, |x| posterior1.cdf(x));
    assert!(distance < 0.05, "KS distance {distance} against Beta(3,4)");
}

#[test]
fn empty_dataset_recovers_prior_moments() {
    let hyper = hyper(2.0, 5.0, 1.5, 2.0, 2);
    let config = GibbsConfig {
        iterations: 2150,
        burn_in: 150,
        thin: 1,
    };
    let samples =
        gibbs::run_gibbs(&Dataset::new(), &hyper, &config, &mut RngStream::new(208)).unwrap();

    let r: Vec<f64> = samples.draws.iter().map(|d| d.dispersions[0]).collect();
    let p: Vec<f64> = samples.draws.iter().map(|d| d.probs0[1]).collect();

    // Prior moments: r ~ Gamma(1.5, rate 2), p ~ Beta(2, 5).
    let r_mean = 1.5 / 2.0;
    let p_mean = 2.0 / 7.0;
    assert!((mean(&r) - r_mean).abs() < 3.0 * stderr_of_mean(&r), "r mean {}", mean(&r));
    assert!((mean(&p) - p_mean).abs() < 3.0 * stderr_of_mean(&p), "p mean {}", mean(&p));
}

#[test]
fn posterior_covers_known_truth_on_balanced_data() {
    // 50 points per class from a known truth; the posterior mean of each
    // success probability should land within 3 posterior standard
    // deviations of the truth for nearly every (gene, class) cell.
    let hyper = hyper(1.0, 1.0, 1.0, 1.0, 5);
    let config = GibbsConfig::default();
    let mut hits = 0;
    let mut cells = 0;
    for rep in 0..10u64 {
        let mut rng = RngStream::new(300 + rep);
        let truth = obcsim::model::draw_true_params(&hyper, &mut rng).unwrap();
        let mut data = Dataset::new();
        for _ in 0..50 {
            data.push(obcsim::model::generate_sample(&truth, ClassLabel::Class0, &mut rng).unwrap());
            data.push(obcsim::model::generate_sample(&truth, ClassLabel::Class1, &mut rng).unwrap());
        }
        let samples = gibbs::run_gibbs(&data, &hyper, &config, &mut rng).unwrap();
        for gene in 0..5 {
            for label in ClassLabel::BOTH {
                let draws: Vec<f64> = samples
                    .draws
                    .iter()
                    .map(|d| d.probs(label)[gene])
                    .collect();
                let posterior_mean = mean(&draws);
                let posterior_sd = sample_variance(&draws).sqrt();
                let true_p = truth.probs(label)[gene];
                cells += 1;
                if (posterior_mean - true_p).abs() <= 3.0 * posterior_sd {
                    hits += 1;
                }
            }
        }
    }
    assert_eq!(cells, 100);
    assert!(hits >= 95, "coverage {hits}/{cells}");
}

#[test]
fn chain_state_stays_in_domain_with_heavy_counts() {
    // Large counts push the probabilities toward 1; every draw must stay
    // strictly inside the open interval and keep the dispersion finite.
    let hyper = hyper(1.0, 1.0, 1.0, 1.0, 2);
    let mut data = Dataset::new();
    for _ in 0..5 {
        data.push(point(vec![900, 2], ClassLabel::Class0));
        data.push(point(vec![850, 0], ClassLabel::Class1));
    }
    let config = GibbsConfig {
        iterations: 80,
        burn_in: 20,
        thin: 1,
    };
    let samples = gibbs::run_gibbs(&data, &hyper, &config, &mut RngStream::new(209)).unwrap();
    for draw in &samples.draws {
        for p in draw.probs0.iter().chain(&draw.probs1) {
            assert!(*p > 0.0 && *p < 1.0);
        }
        for r in &draw.dispersions {
            assert!(*r > 0.0 && r.is_finite());
        }
    }
}
