//! Homogeneous planar Poisson point processes of transmitters observed in a
//! square window centred on the typical receiver at the origin.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{check, positive, Error, Result};

/// Axis-aligned square `[-h, h]²` around the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    half_width: f64,
}

impl Window {
    pub fn new(half_width: f64) -> Result<Self> {
        Ok(Window {
            half_width: positive("window_half_width", half_width)?,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_width * self.half_width
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0].abs() <= self.half_width && p[1].abs() <= self.half_width
    }

    /// Distance from the origin to the window corners.
    pub fn circumradius(&self) -> f64 {
        self.half_width * std::f64::consts::SQRT_2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointField {
    pub density: f64,
    pub window: Window,
    pub points: Vec<[f64; 2]>,
}

impl PointField {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distances(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p[0].hypot(p[1]))
    }

    pub fn nearest_distance(&self) -> Option<f64> {
        self.distances().min_by(f64::total_cmp)
    }
}

fn check_density(density: f64) -> Result<f64> {
    check("density", density, |v| v >= 0.0, "finite and ≥ 0")
}

/// Samples a PPP of intensity `density` (points/m²) in `window`: a Poisson
/// count with mean `density · area`, then i.i.d. uniform positions.
pub fn sample_ppp<R: Rng + ?Sized>(density: f64, window: Window, rng: &mut R) -> Result<PointField> {
    let density = check_density(density)?;
    let mean = density * window.area();
    let count = if mean > 0.0 {
        let poisson = Poisson::new(mean).map_err(|e| Error::invalid("density", e.to_string()))?;
        poisson.sample(rng) as usize
    } else {
        0
    };
    let h = window.half_width();
    let points = (0..count)
        .map(|_| [rng.random_range(-h..=h), rng.random_range(-h..=h)])
        .collect();
    Ok(PointField {
        density,
        window,
        points,
    })
}

/// Points of a PPP in order of increasing distance from the origin,
/// restricted to `window` and to the disc of radius `max_radius`.
///
/// Uses the fact that `π λ r_k²` are the arrival times of a unit-rate Poisson
/// process, so only points that are actually visited get generated. Angles
/// are drawn only for radii beyond the inscribed circle, where they decide
/// window membership.
pub struct RadialPoints<'a, R: Rng + ?Sized> {
    rng: &'a mut R,
    scale: f64,
    arrival: f64,
    half_width: f64,
    max_radius: f64,
}

impl<'a, R: Rng + ?Sized> RadialPoints<'a, R> {
    pub fn new(density: f64, window: Window, max_radius: f64, rng: &'a mut R) -> Result<Self> {
        let density = check_density(density)?;
        Ok(RadialPoints {
            rng,
            scale: PI * density,
            arrival: 0.0,
            half_width: window.half_width(),
            max_radius: if density > 0.0 {
                max_radius.min(window.circumradius())
            } else {
                0.0
            },
        })
    }
}

impl<R: Rng + ?Sized> Iterator for RadialPoints<'_, R> {
    /// Distance from the origin in metres.
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        loop {
            if self.max_radius <= 0.0 {
                return None;
            }
            let step: f64 = Exp1.sample(self.rng);
            self.arrival += step;
            let r = (self.arrival / self.scale).sqrt();
            if r > self.max_radius {
                self.max_radius = 0.0;
                return None;
            }
            if r <= self.half_width {
                return Some(r);
            }
            let theta = self.rng.random_range(0.0..2.0 * PI);
            if (r * theta.cos()).abs() <= self.half_width && (r * theta.sin()).abs() <= self.half_width {
                return Some(r);
            }
        }
    }
}

/// Mean distance from the origin to the nearest point of an unbounded PPP.
pub fn mean_nearest_distance(density: f64) -> f64 {
    0.5 / density.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn zero_density_is_empty() {
        let mut rng = stream(1, 0);
        let field = sample_ppp(0.0, Window::new(100.0).unwrap(), &mut rng).unwrap();
        assert!(field.is_empty());
        let mut radial = RadialPoints::new(0.0, Window::new(100.0).unwrap(), 1e9, &mut rng).unwrap();
        assert_eq!(radial.next(), None);
    }

    #[test]
    fn rejects_bad_density_and_window() {
        let mut rng = stream(1, 0);
        let w = Window::new(1.0).unwrap();
        assert!(sample_ppp(-1.0, w, &mut rng).is_err());
        assert!(sample_ppp(f64::NAN, w, &mut rng).is_err());
        assert!(sample_ppp(f64::INFINITY, w, &mut rng).is_err());
        assert!(Window::new(0.0).is_err());
    }

    #[test]
    fn points_inside_window_and_deterministic() {
        let w = Window::new(50.0).unwrap();
        let a = sample_ppp(0.05, w, &mut stream(3, 0)).unwrap();
        let b = sample_ppp(0.05, w, &mut stream(3, 0)).unwrap();
        assert_eq!(a, b);
        assert!(a.points.iter().all(|p| w.contains(*p)));
    }

    #[test]
    fn count_mean_and_variance_match_poisson() {
        let w = Window::new(100.0).unwrap();
        let density = 0.01;
        let expected = density * w.area();
        let mut rng = stream(11, 0);
        let counts: Vec<f64> = (0..2000)
            .map(|_| sample_ppp(density, w, &mut rng).unwrap().len() as f64)
            .collect();
        let n = counts.len() as f64;
        let mean = counts.iter().sum::<f64>() / n;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((mean / expected - 1.0).abs() < 0.05, "mean {mean}");
        assert!((var / expected - 1.0).abs() < 0.05 * 2.0, "var {var}");
    }

    #[test]
    fn default_density_expected_count() {
        // 100 x 100 km at 2.5e-3 /m²: only the Poisson count is drawn here, positions are
        // exercised above on smaller windows.
        let w = Window::new(50_000.0).unwrap();
        let mean = 2.5e-3 * w.area();
        assert_eq!(mean, 2.5e7);
        let poisson = Poisson::new(mean).unwrap();
        let mut rng = stream(5, 0);
        let draws = 400;
        let avg = (0..draws).map(|_| poisson.sample(&mut rng)).sum::<f64>() / draws as f64;
        let se = (mean / draws as f64).sqrt();
        assert!((avg - mean).abs() < 3.0 * se, "avg {avg}");
    }

    #[test]
    fn quadrant_counts_pass_chi_square() {
        let w = Window::new(10.0).unwrap();
        let mut rng = stream(21, 0);
        let mut q = [0.0f64; 4];
        for _ in 0..200 {
            for p in sample_ppp(0.5, w, &mut rng).unwrap().points {
                let idx = (p[0] >= 0.0) as usize * 2 + (p[1] >= 0.0) as usize;
                q[idx] += 1.0;
            }
        }
        let total: f64 = q.iter().sum();
        let chi2: f64 = q.iter().map(|c| (c - total / 4.0).powi(2) / (total / 4.0)).sum();
        // chi-square, 3 dof, alpha = 0.01
        assert!(chi2 < 11.345, "chi2 {chi2}");
    }

    #[test]
    fn nearest_distance_mean_is_ten_metres_at_default_density() {
        let density = 2.5e-3;
        assert!((mean_nearest_distance(density) - 10.0).abs() < 1e-12);
        let w = Window::new(500.0).unwrap();
        let mut rng = stream(9, 0);
        let samples: Vec<f64> = (0..1500)
            .map(|_| sample_ppp(density, w, &mut rng).unwrap().nearest_distance().unwrap())
            .collect();
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let sd = (samples.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((mean - 10.0).abs() < 3.0 * sd / n.sqrt(), "mean {mean}");
    }

    #[test]
    fn radial_points_are_ordered_and_match_intensity() {
        let w = Window::new(30.0).unwrap();
        let density = 0.02;
        let mut rng = stream(13, 0);
        let mut total = 0usize;
        let mut inner = 0usize;
        let runs = 500;
        for _ in 0..runs {
            let radii: Vec<f64> = RadialPoints::new(density, w, f64::INFINITY, &mut rng).unwrap().collect();
            assert!(radii.windows(2).all(|p| p[0] <= p[1]));
            assert!(radii.iter().all(|&r| r <= w.circumradius()));
            total += radii.len();
            inner += radii.iter().filter(|&&r| r <= 10.0).count();
        }
        let mean = total as f64 / runs as f64;
        let expected = density * w.area();
        assert!((mean - expected).abs() < 3.0 * (expected / runs as f64).sqrt(), "{mean} vs {expected}");
        let mean_inner = inner as f64 / runs as f64;
        let expected_inner = density * PI * 100.0;
        assert!((mean_inner - expected_inner).abs() < 3.0 * (expected_inner / runs as f64).sqrt());
    }
}
