//! Baseline parameters for every preset. Sizes are in bits, times in
//! seconds, distances in metres.

use std::f64::consts::LN_10;

use crate::content::SizeLaw;

pub const DENSITY: f64 = 2.5e-3;
/// Half of the 100 km window side.
pub const WINDOW_HALF_WIDTH: f64 = 50_000.0;
/// Transmit power in W.
pub const POWER: f64 = 0.5;
/// Noise power spectral density in W/Hz.
pub const NOISE_DENSITY: f64 = 1e-11;
pub const BANDWIDTH: f64 = 5e6;
pub const PATHLOSS_EXPONENT: f64 = 4.0;

pub const CATALOGUE_SIZE: usize = 100;
/// Catalogue size for the ordered-sample comparison.
pub const ORDERED_CATALOGUE_SIZE: usize = 200;
pub const ZIPF_EXPONENT: f64 = 0.78;
pub const CACHE_CAPACITY: usize = 5;

pub const AUDIO_MEAN_SIZE: f64 = 1e7;
pub const VIDEO_MEAN_SIZE: f64 = 1e9;
pub const AUDIO_MAX_MEAN_LIFESPAN: f64 = 100.0;
pub const VIDEO_MAX_MEAN_LIFESPAN: f64 = 1000.0;
/// Lifespan of every transmitter in the expected-metric comparison.
pub const COMPARISON_LIFESPAN: f64 = 1000.0;
/// Lowest density of the comparison's density sweep; the highest is [`DENSITY`].
pub const COMPARISON_MIN_DENSITY: f64 = 2.5e-5;
pub const GRID_POINTS: usize = 10;

pub const ITERATIONS: u64 = 2000;
pub const SEED: u64 = 1;
pub const MC_SAMPLES: usize = 100_000;
/// Cap for the automatic doubling of `mc_samples`.
pub const MAX_MC_SAMPLES: usize = 3_200_000;

/// Video size laws with mean close to 1 Gb, in the order of the comparison.
pub fn video_size_laws() -> Vec<(&'static str, SizeLaw)> {
    vec![
        (
            "uniform",
            SizeLaw::Uniform {
                min: 5e7,
                max: 2e9,
            },
        ),
        ("exponential", SizeLaw::Exponential { rate: 1.0 / VIDEO_MEAN_SIZE }),
        (
            "pareto",
            SizeLaw::Pareto {
                shape: 20.0 / 19.0,
                scale: 5e7,
            },
        ),
        (
            "lognormal",
            SizeLaw::LogNormal {
                mu: 5.0 * LN_10,
                sigma: (8.0 * LN_10).sqrt(),
                truncate: None,
            },
        ),
        (
            "weibull",
            SizeLaw::Weibull {
                scale: 276.0,
                shape: 0.1,
            },
        ),
    ]
}

/// `n` evenly spaced points over `(0, max]`.
pub fn linear_grid(max: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| max * i as f64 / n as f64).collect()
}

/// `n ≥ 2` log-spaced points over `[min, max]`.
pub fn log_grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    let (a, b) = (min.ln(), max.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                max
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison_laws_have_video_mean() {
        for (name, law) in video_size_laws() {
            let mean = law.mean().unwrap();
            assert!((mean / VIDEO_MEAN_SIZE - 1.0).abs() < 0.03, "{name}: {mean}");
        }
    }

    #[test]
    fn grids() {
        assert_eq!(linear_grid(100.0, 10), vec![10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0]);
        let g = log_grid(2.5e-5, 2.5e-3, 3);
        assert!((g[0] - 2.5e-5).abs() < 1e-18 && (g[1] - 2.5e-4).abs() < 1e-15 && g[2] == 2.5e-3);
    }
}
