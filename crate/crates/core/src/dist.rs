//! Samplers and log-mass functions for the primitive distributions used by
//! the count model and its posterior inference.
//!
//! Every sampler validates its parameters and returns
//! [`Error::ParamDomain`] on violations instead of panicking. Mass
//! functions are exposed in log space only; callers that need densities on
//! the natural scale combine the log values themselves (see
//! [`crate::obc`]), which keeps long products of per-gene terms from
//! underflowing.

use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, Poisson};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::rng::RngStream;

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(name, value))
    }
}

fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(name, value))
    }
}

/// Draw from Gamma(shape, scale) with mean `shape * scale`.
///
/// Valid for every positive shape, including shape < 1 (needed when a
/// latent table total is zero and the conditional shape falls back to the
/// prior's). Draws are strictly positive and finite: boundary values, which
/// the rejection method can emit for tiny shapes, are redrawn.
pub fn sample_gamma(shape: f64, scale: f64, rng: &mut RngStream) -> Result<f64> {
    check_positive("shape", shape)?;
    check_positive("scale", scale)?;
    let dist = Gamma::new(shape, scale).expect("parameters validated above");
    loop {
        let draw = dist.sample(rng);
        if draw > 0.0 && draw.is_finite() {
            return Ok(draw);
        }
    }
}

/// Draw from Beta(a, b) on the open interval (0, 1).
///
/// Endpoint values are redrawn so downstream `ln(p)` / `ln(1 - p)` terms
/// stay finite.
pub fn sample_beta(a: f64, b: f64, rng: &mut RngStream) -> Result<f64> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    let dist = Beta::new(a, b).expect("parameters validated above");
    loop {
        let draw = dist.sample(rng);
        if draw > 0.0 && draw < 1.0 {
            return Ok(draw);
        }
    }
}

/// Draw a count from the negative binomial with dispersion `r` and success
/// probability `p`, i.e. mean `r * p / (1 - p)`.
///
/// Sampled as a gamma-Poisson mixture: `lambda ~ Gamma(r, p / (1 - p))`,
/// then `Poisson(lambda)`. This covers non-integer `r` directly.
pub fn sample_nb(r: f64, p: f64, rng: &mut RngStream) -> Result<u64> {
    check_positive("r", r)?;
    check_open_unit("p", p)?;
    let lambda = sample_gamma(r, p / (1.0 - p), rng)?;
    let dist = Poisson::new(lambda).expect("gamma draw is positive and finite");
    let draw: f64 = dist.sample(rng);
    Ok(draw as u64)
}

/// Log-mass of the negative binomial at count `x`:
/// `lnGamma(x + r) - lnGamma(x + 1) - lnGamma(r) + x ln p + r ln(1 - p)`.
pub fn nb_log_pmf(x: u64, r: f64, p: f64) -> Result<f64> {
    check_positive("r", r)?;
    check_open_unit("p", p)?;
    Ok(nb_log_pmf_unchecked(x, r, p))
}

/// [`nb_log_pmf`] without domain checks, for hot loops whose parameters
/// come from already-validated posterior draws.
pub(crate) fn nb_log_pmf_unchecked(x: u64, r: f64, p: f64) -> f64 {
    let x = x as f64;
    ln_gamma(x + r) - ln_gamma(x + 1.0) - ln_gamma(r) + x * p.ln() + r * (1.0 - p).ln()
}

/// Draw the table count of a Chinese restaurant process with concentration
/// `r` after `n` customers: the sum over `t = 1..=n` of independent
/// Bernoulli(`r / (r + t - 1)`) indicators.
///
/// Returns 0 when `n == 0`; otherwise the result lies in `1..=n` (the
/// first customer always opens a table).
pub fn sample_crt(n: u64, r: f64, rng: &mut RngStream) -> Result<u64> {
    check_positive("r", r)?;
    let mut tables = 0;
    for t in 0..n {
        let open = r / (r + t as f64);
        if rng.random::<f64>() < open {
            tables += 1;
        }
    }
    Ok(tables)
}

/// Draw from the logarithmic distribution with parameter `p`:
/// `P(u) = -p^u / (u ln(1 - p))` for `u >= 1`.
///
/// Inversion on the cumulative series, walking terms until the uniform is
/// covered; the walk stops once cumulative mass exceeds `1 - 1e-12`, which
/// bounds the support actually reachable. Used only to cross-check the
/// compound-Poisson representation of the negative binomial.
pub fn sample_logarithmic(p: f64, rng: &mut RngStream) -> Result<u64> {
    check_open_unit("p", p)?;
    let u: f64 = rng.random();
    let mut k = 1u64;
    let mut term = -p / (-p).ln_1p();
    let mut cumulative = term;
    while u > cumulative && cumulative < 1.0 - 1e-12 {
        term *= p * k as f64 / (k + 1) as f64;
        k += 1;
        cumulative += term;
    }
    Ok(k)
}
