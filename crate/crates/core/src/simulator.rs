//! Monte Carlo engine for the service event at a receiver placed at the origin.
//!
//! Each iteration draws a request, then walks the transmitter field outward
//! from the origin. A transmitter serves the request when it caches the
//! object and its link delivers the whole file before the transmitter moves
//! away: `τ_i W log2(1 + SNR(r_i)) ≥ z_j`.
//!
//! Transmitters farther than a cutoff radius are skipped. The cutoff is
//! chosen so that the expected number of transmitters beyond it that could
//! serve the request is below [`MISS_BOUND`], using a Markov bound on
//! `E[(h P/N)^q] E[(2^{z/(Wτ)} - 1)^{-q}] r^{-αq}`.

use std::f64::consts::{LN_2, PI};
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::content::SizeLaw;
use crate::error::{Error, Result};
use crate::geometry::RadialPoints;
use crate::metric::MetricEstimate;
use crate::mobility::LifespanLaw;
use crate::rng::{iteration_stream, Purpose};
use crate::scenario::Scenario;
use crate::special::{ln_expm1, ln_gamma};

/// Bound on the expected number of servers the cutoff radius may drop.
pub const MISS_BOUND: f64 = 1e-9;

const CUTOFF_MOMENTS: [f64; 23] = [
    1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0, 7.5, 8.0, 8.5, 9.0, 9.5, 10.0, 10.5, 11.0,
    11.5, 12.0,
];

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub scenario: Scenario,
    pub iterations: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// When set, the requested object's size is redrawn from this law in
    /// every iteration instead of taken from the catalogue.
    pub size_law: Option<SizeLaw>,
}

impl SimulationConfig {
    pub fn new(scenario: Scenario, iterations: u64, seed: u64) -> Self {
        SimulationConfig {
            scenario,
            iterations,
            seed,
            threads: None,
            size_law: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.iterations == 0 {
            return Err(Error::invalid("iterations", "must be at least 1"));
        }
        if self.iterations >= 1 << 48 {
            return Err(Error::invalid("iterations", "must be below 2^48"));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("threads", "must be at least 1"));
        }
        if let Some(law) = &self.size_law {
            law.validate()?;
        }
        Ok(())
    }
}

/// Result of one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ServiceOutcome {
    pub iteration: u64,
    /// Requested object, 0-based.
    pub object: usize,
    pub success: bool,
    /// Number of transmitters able to serve; only counted with full diagnostics.
    pub qualifiers: Option<u64>,
    /// Distance to the nearest transmitter able to serve.
    pub nearest_m: Option<f64>,
}

/// Whether a transmitter at `distance` with fading `fading` and lifespan
/// `lifespan` delivers `size` bits before leaving.
pub fn transmitter_serves(scenario: &Scenario, fading: f64, distance: f64, lifespan: f64, size: f64) -> bool {
    let radio = &scenario.radio;
    let snr = radio.snr_scale() * fading * distance.powf(-radio.pathloss_exponent());
    lifespan * radio.bandwidth() * snr.ln_1p() / LN_2 >= size
}

/// Precomputed per-scenario state shared by all iterations.
#[derive(Debug)]
pub struct Simulator<'a> {
    config: &'a SimulationConfig,
    /// `(q, ln E[H^q])` for the moments usable in the cutoff bound.
    fading_moments: Vec<(f64, f64)>,
}

impl<'a> Simulator<'a> {
    pub fn new(config: &'a SimulationConfig) -> Result<Self> {
        config.validate()?;
        let fading_moments = CUTOFF_MOMENTS
            .iter()
            .map(|&q| (q, config.scenario.fading.moment_upper_bound(q).ln()))
            .filter(|(_, m)| m.is_finite())
            .collect();
        Ok(Simulator { config, fading_moments })
    }

    /// Radius beyond which transmitters are skipped for an object with
    /// marginal `b` and size `z`.
    pub fn cutoff_radius(&self, b: f64, z: f64) -> f64 {
        let s = &self.config.scenario;
        let limit = s.window.circumradius();
        if b <= 0.0 || s.density <= 0.0 {
            return 0.0;
        }
        let alpha = s.radio.pathloss_exponent();
        let w = s.radio.bandwidth();
        let ln_snr = s.radio.snr_scale().ln();
        let mut best = f64::INFINITY;
        for &(q, ln_h) in &self.fading_moments {
            let ln_l = match s.lifespan {
                LifespanLaw::Fixed { mean } => -q * ln_expm1(z * LN_2 / (w * mean)),
                LifespanLaw::Exponential { mean } => q * (w * mean / (z * LN_2)).ln() + ln_gamma(1.0 + q),
            };
            let d = alpha * q - 2.0;
            let ln_r = ((2.0 * PI * s.density * b).ln() + q * ln_snr + ln_h + ln_l - d.ln() - MISS_BOUND.ln()) / d;
            best = best.min(ln_r.exp());
        }
        if best.is_nan() {
            limit
        } else {
            best.min(limit)
        }
    }

    /// One iteration; `pinned` fixes the request, otherwise it is drawn from
    /// the popularity law. With `full_diagnostics` every transmitter inside
    /// the cutoff is examined so the qualifier count is exact.
    pub fn run_iteration(&self, iteration: u64, pinned: Option<usize>, full_diagnostics: bool) -> Result<ServiceOutcome> {
        let cfg = self.config;
        let s = &cfg.scenario;
        let object = match pinned {
            Some(j) => j,
            None => s.catalogue.popularity().sample(&mut iteration_stream(cfg.seed, iteration, Purpose::Request)),
        };
        let mut outcome = ServiceOutcome {
            iteration,
            object,
            success: false,
            qualifiers: full_diagnostics.then_some(0),
            nearest_m: None,
        };
        let b = s.placement.marginal(object);
        if b == 0.0 {
            return Ok(outcome);
        }
        let z = match &cfg.size_law {
            Some(law) => law.sample(&mut iteration_stream(cfg.seed, iteration, Purpose::Size)),
            None => s.catalogue.sizes()[object],
        };
        let radius = self.cutoff_radius(b, z);

        let mut field = iteration_stream(cfg.seed, iteration, Purpose::Field);
        let mut inventory = iteration_stream(cfg.seed, iteration, Purpose::Inventory);
        let mut fading = iteration_stream(cfg.seed, iteration, Purpose::Fading);
        let mut lifespan = iteration_stream(cfg.seed, iteration, Purpose::Lifespan);
        for r in RadialPoints::new(s.density, s.window, radius, &mut field)? {
            if !s.placement.caches(object, inventory.random()) {
                continue;
            }
            let h = s.fading.sample(&mut fading);
            let tau = s.lifespan.sample(&mut lifespan);
            if transmitter_serves(s, h, r, tau, z) {
                outcome.success = true;
                outcome.nearest_m.get_or_insert(r);
                match outcome.qualifiers.as_mut() {
                    Some(n) => *n += 1,
                    None => break,
                }
            }
        }
        Ok(outcome)
    }

    fn count_successes(&self, pinned: Option<usize>) -> Result<u64> {
        (0..self.config.iterations)
            .into_par_iter()
            .map(|i| self.run_iteration(i, pinned, false).map(|o| o.success as u64))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    }
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid("threads", e.to_string()))?
            .install(f),
    }
}

/// Fraction of iterations in which a popularity-sampled request is served.
pub fn estimate_total_success(config: &SimulationConfig) -> Result<MetricEstimate> {
    let sim = Simulator::new(config)?;
    let hits = in_pool(config.threads, || sim.count_successes(None))?;
    Ok(MetricEstimate::from_successes(hits, config.iterations))
}

/// Fraction of iterations in which a request for `object` (0-based) is served.
pub fn estimate_per_object_success(config: &SimulationConfig, object: usize) -> Result<MetricEstimate> {
    let sim = Simulator::new(config)?;
    if object >= config.scenario.catalogue.len() {
        return Err(Error::invalid(
            "object",
            format!("index {object} outside catalogue of {}", config.scenario.catalogue.len()),
        ));
    }
    let hits = in_pool(config.threads, || sim.count_successes(Some(object)))?;
    Ok(MetricEstimate::from_successes(hits, config.iterations))
}

/// Every iteration's outcome, in iteration order.
pub fn run_outcomes(config: &SimulationConfig, full_diagnostics: bool) -> Result<Vec<ServiceOutcome>> {
    let sim = Simulator::new(config)?;
    in_pool(config.threads, || {
        (0..config.iterations)
            .into_par_iter()
            .map(|i| sim.run_iteration(i, None, full_diagnostics))
            .collect()
    })
}

/// Writes `iteration,object,success,n_qualifiers,nearest_m` rows; objects are
/// 1-based and missing diagnostics are left empty.
pub fn write_outcomes_csv<W: Write>(outcomes: &[ServiceOutcome], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["iteration", "object", "success", "n_qualifiers", "nearest_m"])?;
    for o in outcomes {
        w.write_record([
            o.iteration.to_string(),
            (o.object + 1).to_string(),
            (o.success as u8).to_string(),
            o.qualifiers.map(|n| n.to_string()).unwrap_or_default(),
            o.nearest_m.map(|r| r.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
