//! Closed-form service success probabilities for the SNR coverage model.
//!
//! For object `j` with cache probability `b_j` and size `z_j`,
//!
//! ```text
//! P_srv,j = 1 - exp(-π λ_t b_j (P/N)^{2/α} E[H^{2/α}] I_T(z_j))
//! I_T(z)  = E[(2^{z/(W T)} - 1)^{-2/α}]
//! ```
//!
//! and the total metric averages `P_srv,j` over the popularity law.

use std::f64::consts::{LN_2, PI};

use rand::Rng;
use rayon::prelude::*;

use crate::channel::fading_moment;
use crate::content::SizeLaw;
use crate::error::{positive, Error, Result};
use crate::metric::MetricEstimate;
use crate::mobility::LifespanLaw;
use crate::quadrature::{integrate, Tolerance};
use crate::scenario::Scenario;
use crate::special::ln_expm1;

/// Relative accuracy of the exponential-lifespan integral.
pub const LIFESPAN_MOMENT_REL_TOL: f64 = 1e-8;
const LIFESPAN_MOMENT_MAX_SEGMENTS: usize = 2000;

/// Largest `z / (W τ)` for which `2^{z/(Wτ)}` is representable.
const MAX_RATE_EXPONENT: f64 = 1024.0;

/// `(2^{z/(W s)} - 1)^{-2/α}` evaluated in log space.
fn lifespan_transform(z: f64, s: f64, bandwidth: f64, alpha: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let y = z * LN_2 / (bandwidth * s);
    (-(2.0 / alpha) * ln_expm1(y)).exp()
}

/// `I_T` for a lifespan fixed at `tau`: `(2^{z/(W τ)} - 1)^{-2/α}`.
pub fn lifespan_moment_fixed(z: f64, tau: f64, bandwidth: f64, alpha: f64) -> f64 {
    if z / (bandwidth * tau) > MAX_RATE_EXPONENT {
        return 0.0;
    }
    lifespan_transform(z, tau, bandwidth, alpha)
}

/// `I_T` for exponential lifespans with mean `tau`:
/// `∫_0^∞ τ^{-1} e^{-s/τ} (2^{z/(W s)} - 1)^{-2/α} ds`.
///
/// The integral is split at `s* = z/W`, where the transform crosses 1.
/// `[0, s*]` is integrated directly. The tail is mapped to `(0, 1]` with
/// `s = s* - τ ln v`, which absorbs the exponential weight.
pub fn lifespan_moment_exponential(z: f64, tau: f64, bandwidth: f64, alpha: f64) -> Result<f64> {
    positive("size", z)?;
    positive("lifespan.mean", tau)?;
    let split = z / bandwidth;
    let g = |s: f64| lifespan_transform(z, s, bandwidth, alpha);

    let tail_weight = (-split / tau).exp();
    let tail = if tail_weight > 0.0 {
        integrate(
            |v: f64| g(split - tau * v.ln()),
            0.0,
            1.0,
            Tolerance::relative(0.1 * LIFESPAN_MOMENT_REL_TOL),
            LIFESPAN_MOMENT_MAX_SEGMENTS,
        )
        .map_err(|e| Error::quadrature(format!("I_T tail (z = {z}, τ = {tau})"), e))?
        .value
            * tail_weight
    } else {
        0.0
    };

    let head = integrate(
        |s: f64| (-s / tau).exp() / tau * g(s),
        0.0,
        split,
        Tolerance {
            abs: 0.1 * LIFESPAN_MOMENT_REL_TOL * tail,
            rel: 0.1 * LIFESPAN_MOMENT_REL_TOL,
        },
        LIFESPAN_MOMENT_MAX_SEGMENTS,
    )
    .map_err(|e| Error::quadrature(format!("I_T head (z = {z}, τ = {tau})"), e))?
    .value;

    Ok(head + tail)
}

/// `I_T(z)` under `law`.
pub fn lifespan_moment(law: &LifespanLaw, z: f64, bandwidth: f64, alpha: f64) -> Result<f64> {
    match *law {
        LifespanLaw::Fixed { mean } => {
            positive("size", z)?;
            positive("lifespan.mean", mean)?;
            Ok(lifespan_moment_fixed(z, mean, bandwidth, alpha))
        }
        LifespanLaw::Exponential { mean } => lifespan_moment_exponential(z, mean, bandwidth, alpha),
    }
}

/// `π λ_t (P/N)^{2/α} E[H^{2/α}]`: expected number of transmitters per unit
/// `b_j I_T` that can serve the origin.
pub fn coverage_factor(scenario: &Scenario) -> Result<f64> {
    let radio = &scenario.radio;
    let alpha = radio.pathloss_exponent();
    let factor = PI * scenario.density * radio.snr_scale().powf(2.0 / alpha) * fading_moment(&scenario.fading, alpha)?;
    if factor.is_finite() {
        Ok(factor)
    } else {
        Err(Error::Domain(format!("coverage factor overflows ({factor})")))
    }
}

fn success_from_exponent(x: f64) -> f64 {
    (-(-x).exp_m1()).clamp(0.0, 1.0)
}

fn object_success(scenario: &Scenario, factor: f64, object: usize, size: f64) -> Result<f64> {
    let b = scenario.placement.marginal(object);
    if b == 0.0 {
        return Ok(0.0);
    }
    let it = lifespan_moment(
        &scenario.lifespan,
        size,
        scenario.radio.bandwidth(),
        scenario.radio.pathloss_exponent(),
    )?;
    Ok(success_from_exponent(factor * b * it))
}

fn check_object(scenario: &Scenario, object: usize) -> Result<()> {
    if object >= scenario.catalogue.len() {
        return Err(Error::invalid(
            "object",
            format!("index {object} outside catalogue of {}", scenario.catalogue.len()),
        ));
    }
    Ok(())
}

/// Closed-form probability that a request for `object` (0-based) is served.
pub fn per_object_success(scenario: &Scenario, object: usize) -> Result<MetricEstimate> {
    scenario.validate()?;
    check_object(scenario, object)?;
    let factor = coverage_factor(scenario)?;
    let p = object_success(scenario, factor, object, scenario.catalogue.sizes()[object])?;
    Ok(MetricEstimate::exact(p))
}

/// Per-object closed forms for the whole catalogue.
pub fn per_object_successes(scenario: &Scenario) -> Result<Vec<f64>> {
    scenario.validate()?;
    let factor = coverage_factor(scenario)?;
    scenario
        .catalogue
        .sizes()
        .iter()
        .enumerate()
        .map(|(j, &z)| object_success(scenario, factor, j, z))
        .collect()
}

/// Total service success probability `Σ_j a_j P_srv,j` for the catalogue's sizes.
pub fn total_success(scenario: &Scenario) -> Result<MetricEstimate> {
    let per_object = per_object_successes(scenario)?;
    let total: f64 = scenario
        .catalogue
        .popularity()
        .probabilities()
        .iter()
        .zip(&per_object)
        .map(|(a, p)| a * p)
        .sum();
    Ok(MetricEstimate::exact(total))
}

/// Expected service success probability when every object's size is an
/// independent draw from `size_law`; the catalogue's own sizes are ignored.
///
/// There is no closed form for general laws, so the expectation over `Z` is
/// a Monte Carlo average. Each size draw is shared by all objects.
pub fn expected_success<R: Rng + ?Sized>(
    scenario: &Scenario,
    size_law: &SizeLaw,
    mc_samples: usize,
    rng: &mut R,
) -> Result<MetricEstimate> {
    scenario.validate()?;
    if mc_samples < 1000 {
        return Err(Error::invalid("mc_samples", format!("need at least 1000, got {mc_samples}")));
    }
    let sizes = size_law.sample_sizes(mc_samples, rng)?;
    let factor = coverage_factor(scenario)?;
    let popularity = scenario.catalogue.popularity().probabilities();
    let cached: Vec<(f64, f64)> = popularity
        .iter()
        .zip(scenario.placement.marginals())
        .filter(|(_, &b)| b > 0.0)
        .map(|(&a, &b)| (a, b))
        .collect();
    let radio = &scenario.radio;
    let per_draw: Vec<f64> = sizes
        .par_iter()
        .map(|&z| -> Result<f64> {
            let it = lifespan_moment(&scenario.lifespan, z, radio.bandwidth(), radio.pathloss_exponent())?;
            Ok(cached.iter().map(|&(a, b)| a * success_from_exponent(factor * b * it)).sum())
        })
        .collect::<Result<_>>()?;
    Ok(MetricEstimate::from_samples(&per_draw))
}
