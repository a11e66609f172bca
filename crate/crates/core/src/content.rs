//! Content catalogue: Zipf popularity, file-size laws and the coupling
//! between popularity rank and file size.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check, positive, Error, Result};
use crate::special::gamma;

/// Request probabilities of the `F` objects, indexed by decreasing popularity.
#[derive(Debug, Clone, PartialEq)]
pub struct PopularityLaw {
    exponent: f64,
    probabilities: Vec<f64>,
}

impl PopularityLaw {
    /// `a_j = j^{-γ} / Σ_k k^{-γ}` for `j = 1..=F`.
    pub fn zipf(catalogue_size: usize, exponent: f64) -> Result<Self> {
        if catalogue_size < 2 {
            return Err(Error::invalid(
                "catalogue_size",
                format!("need at least 2 objects, got {catalogue_size}"),
            ));
        }
        check("zipf_exponent", exponent, |g| g >= 0.0, "finite and ≥ 0")?;
        let weights: Vec<f64> = (1..=catalogue_size).map(|j| (j as f64).powf(-exponent)).collect();
        // sum smallest first
        let norm: f64 = weights.iter().rev().sum();
        Ok(PopularityLaw {
            exponent,
            probabilities: weights.into_iter().map(|w| w / norm).collect(),
        })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Combined probability of the `n` most popular objects.
    pub fn head_mass(&self, n: usize) -> f64 {
        self.probabilities.iter().take(n).sum()
    }

    /// Draws an object index (0-based) by inversion.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (j, &p) in self.probabilities.iter().enumerate() {
            acc += p;
            if u < acc {
                return j;
            }
        }
        self.probabilities.len() - 1
    }
}

/// File-size distribution, sizes in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum SizeLaw {
    /// Point mass.
    Constant { bits: f64 },
    Uniform { min: f64, max: f64 },
    Exponential { rate: f64 },
    /// Tail `(β/z)^a` for `z ≥ β`.
    Pareto { shape: f64, scale: f64 },
    /// Tail `exp(-(z/μ)^k)`.
    Weibull { scale: f64, shape: f64 },
    /// `ln Z ~ N(μ, σ²)`, optionally truncated to `[min, max]` by rejection.
    LogNormal {
        mu: f64,
        sigma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truncate: Option<[f64; 2]>,
    },
}

impl SizeLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SizeLaw::Constant { bits } => positive("sizes.bits", bits).map(drop),
            SizeLaw::Uniform { min, max } => {
                positive("sizes.min", min)?;
                check("sizes.max", max, |m| m >= min, "finite and ≥ min").map(drop)
            }
            SizeLaw::Exponential { rate } => positive("sizes.rate", rate).map(drop),
            SizeLaw::Pareto { shape, scale } => {
                positive("sizes.shape", shape)?;
                positive("sizes.scale", scale).map(drop)
            }
            SizeLaw::Weibull { scale, shape } => {
                positive("sizes.scale", scale)?;
                positive("sizes.shape", shape).map(drop)
            }
            SizeLaw::LogNormal { mu, sigma, truncate } => {
                check("sizes.mu", mu, |_| true, "finite")?;
                positive("sizes.sigma", sigma)?;
                if let Some([lo, hi]) = truncate {
                    positive("sizes.truncate[0]", lo)?;
                    check("sizes.truncate[1]", hi, |h| h > lo, "finite and > truncate[0]")?;
                }
                Ok(())
            }
        }
    }

    /// One draw. Pareto and Weibull use inverse-CDF transforms of a uniform on (0, 1).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            SizeLaw::Constant { bits } => bits,
            SizeLaw::Uniform { min, max } => {
                let u: f64 = rng.random();
                min + u * (max - min)
            }
            SizeLaw::Exponential { rate } => {
                let u: f64 = Open01.sample(rng);
                -u.ln() / rate
            }
            SizeLaw::Pareto { shape, scale } => {
                let u: f64 = Open01.sample(rng);
                scale * u.powf(-1.0 / shape)
            }
            SizeLaw::Weibull { scale, shape } => {
                let u: f64 = Open01.sample(rng);
                scale * (-u.ln()).powf(1.0 / shape)
            }
            SizeLaw::LogNormal { mu, sigma, truncate } => loop {
                let z: f64 = StandardNormal.sample(rng);
                let x = (mu + sigma * z).exp();
                match truncate {
                    Some([lo, hi]) if !(lo..=hi).contains(&x) => continue,
                    _ => break x,
                }
            },
        }
    }

    /// `count` i.i.d. draws.
    pub fn sample_sizes<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<f64>> {
        self.validate()?;
        Ok((0..count).map(|_| self.sample(rng)).collect())
    }

    /// Analytic mean in bits. The truncated log-normal is not supported.
    pub fn mean(&self) -> Result<f64> {
        self.validate()?;
        match *self {
            SizeLaw::Constant { bits } => Ok(bits),
            SizeLaw::Uniform { min, max } => Ok(0.5 * (min + max)),
            SizeLaw::Exponential { rate } => Ok(1.0 / rate),
            SizeLaw::Pareto { shape, scale } => {
                if shape <= 1.0 {
                    Err(Error::InfiniteMean(format!("Pareto with shape {shape} ≤ 1")))
                } else {
                    Ok(scale * shape / (shape - 1.0))
                }
            }
            SizeLaw::Weibull { scale, shape } => Ok(scale * gamma(1.0 + 1.0 / shape)),
            SizeLaw::LogNormal { mu, sigma, truncate: None } => Ok((mu + 0.5 * sigma * sigma).exp()),
            SizeLaw::LogNormal { .. } => Err(Error::invalid(
                "sizes.truncate",
                "mean of the truncated log-normal is not available in closed form",
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SizeLaw::Constant { .. } => "constant",
            SizeLaw::Uniform { .. } => "uniform",
            SizeLaw::Exponential { .. } => "exponential",
            SizeLaw::Pareto { .. } => "pareto",
            SizeLaw::Weibull { .. } => "weibull",
            SizeLaw::LogNormal { .. } => "lognormal",
        }
    }
}

/// How sampled sizes are assigned to popularity ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeOrdering {
    /// Sizes keep their sampling order.
    #[default]
    Independent,
    /// Most popular object gets the smallest size.
    Increasing,
    /// Most popular object gets the largest size.
    Decreasing,
}

impl SizeOrdering {
    pub fn name(&self) -> &'static str {
        match self {
            SizeOrdering::Independent => "independent",
            SizeOrdering::Increasing => "increasing",
            SizeOrdering::Decreasing => "decreasing",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContentCatalogue {
    popularity: PopularityLaw,
    sizes: Vec<f64>,
    ordering: SizeOrdering,
}

impl ContentCatalogue {
    pub fn new(popularity: PopularityLaw, sizes: Vec<f64>) -> Result<Self> {
        if sizes.len() != popularity.len() {
            return Err(Error::invalid(
                "sizes",
                format!("{} sizes for {} objects", sizes.len(), popularity.len()),
            ));
        }
        for &z in &sizes {
            positive("sizes", z)?;
        }
        Ok(ContentCatalogue {
            popularity,
            sizes,
            ordering: SizeOrdering::Independent,
        })
    }

    /// Samples `F` sizes from `law` and attaches them in sampling order.
    pub fn sample<R: Rng + ?Sized>(popularity: PopularityLaw, law: &SizeLaw, rng: &mut R) -> Result<Self> {
        let sizes = law.sample_sizes(popularity.len(), rng)?;
        Self::new(popularity, sizes)
    }

    /// Permutes the sizes against the popularity ranks; the size multiset and
    /// the popularity vector are unchanged. `Independent` leaves the current order.
    pub fn apply_ordering(mut self, ordering: SizeOrdering) -> Self {
        match ordering {
            SizeOrdering::Independent => {}
            SizeOrdering::Increasing => self.sizes.sort_by(f64::total_cmp),
            SizeOrdering::Decreasing => self.sizes.sort_by(|a, b| b.total_cmp(a)),
        }
        self.ordering = ordering;
        self
    }

    pub fn popularity(&self) -> &PopularityLaw {
        &self.popularity
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    pub fn ordering(&self) -> SizeOrdering {
        self.ordering
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// Writes `index,popularity,size_bits` rows with 1-based indices.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["index", "popularity", "size_bits"])?;
        for (j, (a, z)) in self.popularity.probabilities().iter().zip(&self.sizes).enumerate() {
            w.write_record([(j + 1).to_string(), a.to_string(), z.to_string()])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;

    #[test]
    fn zipf_examples() {
        let p = PopularityLaw::zipf(2, 0.0).unwrap();
        assert_eq!(p.probabilities(), &[0.5, 0.5]);
        let p = PopularityLaw::zipf(3, 1.0).unwrap();
        for (got, want) in p.probabilities().iter().zip([6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(PopularityLaw::zipf(1, 1.0).is_err());
        assert!(PopularityLaw::zipf(10, -0.1).is_err());
    }

    #[test]
    fn zipf_head_mass_at_catalogue_100_and_200() {
        // 0.4259 for F = 100; the 0.3433 figure corresponds to F = 200
        let p100 = PopularityLaw::zipf(100, 0.78).unwrap();
        assert!((p100.head_mass(10) - 0.425_922).abs() < 1e-5);
        let p200 = PopularityLaw::zipf(200, 0.78).unwrap();
        assert!((p200.head_mass(10) - 0.3433).abs() < 5e-4);
    }

    #[test]
    fn zipf_sampling_frequencies() {
        let p = PopularityLaw::zipf(5, 1.0).unwrap();
        let mut rng = stream(4, 0);
        let n = 100_000;
        let mut counts = [0usize; 5];
        for _ in 0..n {
            counts[p.sample(&mut rng)] += 1;
        }
        for (c, a) in counts.iter().zip(p.probabilities()) {
            let f = *c as f64 / n as f64;
            assert!((f - a).abs() < 3.0 * (a * (1.0 - a) / n as f64).sqrt() + 1e-12);
        }
    }

    #[test]
    fn uniform_video_sizes() {
        let law = SizeLaw::Uniform { min: 5e7, max: 2e9 };
        let xs = law.sample_sizes(100_000, &mut stream(5, 0)).unwrap();
        assert!(xs.iter().all(|&x| (5e7..=2e9).contains(&x)));
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let sd = (2e9 - 5e7) / 12f64.sqrt();
        assert!((mean - 1.025e9).abs() < 3.0 * sd / (xs.len() as f64).sqrt());
    }

    #[test]
    fn pareto_minimum_and_median() {
        let law = SizeLaw::Pareto { shape: 20.0 / 19.0, scale: 0.05e9 };
        let mut xs = law.sample_sizes(100_001, &mut stream(6, 0)).unwrap();
        assert!(xs.iter().all(|&x| x >= 5e7));
        xs.sort_by(f64::total_cmp);
        let median = xs[xs.len() / 2];
        let exact = 5e7 * 2f64.powf(19.0 / 20.0);
        // the sample median has sd ≈ 1 / (2 f(m) √n)
        let density_at_median = (20.0 / 19.0) * 5e7f64.powf(20.0 / 19.0) / exact.powf(1.0 + 20.0 / 19.0);
        let sd = 1.0 / (2.0 * density_at_median * (xs.len() as f64).sqrt());
        assert!((median - exact).abs() < 3.0 * sd, "{median} vs {exact}");
    }

    #[test]
    fn analytic_means() {
        assert!((SizeLaw::Exponential { rate: 1e-9 }.mean().unwrap() - 1e9).abs() < 1e-3);
        let pareto = SizeLaw::Pareto { shape: 20.0 / 19.0, scale: 5e7 };
        assert!((pareto.mean().unwrap() - 1e9).abs() < 1e-3);
        let weibull = SizeLaw::Weibull { scale: 276.0, shape: 0.1 };
        assert!((weibull.mean().unwrap() - 276.0 * 3_628_800.0).abs() < 1e-3);
        let ln10 = std::f64::consts::LN_10;
        let lognormal = SizeLaw::LogNormal { mu: 5.0 * ln10, sigma: (8.0 * ln10).sqrt(), truncate: None };
        assert!((lognormal.mean().unwrap() / 1e9 - 1.0).abs() < 1e-12);
        assert!((SizeLaw::Uniform { min: 1e5, max: 2e7 }.mean().unwrap() - 1.005e7).abs() < 1e-6);
        assert!(matches!(
            SizeLaw::Pareto { shape: 1.0, scale: 1.0 }.mean(),
            Err(Error::InfiniteMean(_))
        ));
    }

    #[test]
    fn sample_means_match_analytic_means() {
        let laws = [
            SizeLaw::Uniform { min: 1e5, max: 2e7 },
            SizeLaw::Exponential { rate: 1e-7 },
            SizeLaw::Weibull { scale: 1e6, shape: 1.5 },
            SizeLaw::LogNormal { mu: 10.0, sigma: 0.5, truncate: None },
            SizeLaw::Pareto { shape: 3.5, scale: 1e6 },
        ];
        for (i, law) in laws.iter().enumerate() {
            let n = 1_000_000;
            let xs = law.sample_sizes(n, &mut stream(7, i as u64)).unwrap();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
            let want = law.mean().unwrap();
            assert!((mean - want).abs() < 3.0 * sd / (n as f64).sqrt(), "{law:?}: {mean} vs {want}");
        }
    }

    #[test]
    fn truncated_lognormal_stays_in_range() {
        let law = SizeLaw::LogNormal { mu: 10.0, sigma: 2.0, truncate: Some([1e4, 1e5]) };
        let xs = law.sample_sizes(10_000, &mut stream(8, 0)).unwrap();
        assert!(xs.iter().all(|&x| (1e4..=1e5).contains(&x)));
    }

    #[test]
    fn weibull_shape_one_matches_exponential() {
        let n = 20_000;
        let mut xs = SizeLaw::Weibull { scale: 2.0, shape: 1.0 }
            .sample_sizes(n, &mut stream(9, 0))
            .unwrap();
        xs.sort_by(f64::total_cmp);
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let cdf = 1.0 - (-x / 2.0).exp();
                (cdf - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - cdf).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.628 / (n as f64).sqrt());
    }

    #[test]
    fn ordering_examples() {
        let pop = PopularityLaw::zipf(3, 1.0).unwrap();
        let cat = ContentCatalogue::new(pop, vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(cat.clone().apply_ordering(SizeOrdering::Increasing).sizes(), &[1.0, 2.0, 3.0]);
        assert_eq!(cat.clone().apply_ordering(SizeOrdering::Decreasing).sizes(), &[3.0, 2.0, 1.0]);
        assert_eq!(cat.clone().apply_ordering(SizeOrdering::Independent).sizes(), &[3.0, 1.0, 2.0]);
    }

    #[test]
    fn catalogue_rejects_bad_sizes() {
        let pop = PopularityLaw::zipf(3, 1.0).unwrap();
        assert!(ContentCatalogue::new(pop.clone(), vec![1.0, 2.0]).is_err());
        assert!(ContentCatalogue::new(pop, vec![1.0, 0.0, 2.0]).is_err());
    }

    #[test]
    fn catalogue_csv() {
        let pop = PopularityLaw::zipf(2, 0.0).unwrap();
        let cat = ContentCatalogue::new(pop, vec![10.0, 2.5e9]).unwrap();
        let mut buf = Vec::new();
        cat.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "index,popularity,size_bits\n1,0.5,10\n2,0.5,2500000000\n");
    }

    proptest! {
        #[test]
        fn zipf_normalized_and_nonincreasing(f in 2usize..5000, g in 0.0f64..3.0) {
            let p = PopularityLaw::zipf(f, g).unwrap();
            let s: f64 = p.probabilities().iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
            prop_assert!(p.probabilities().windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn ordering_preserves_multiset(sizes in proptest::collection::vec(1.0f64..1e10, 2..60), mode in 0u8..3) {
            let pop = PopularityLaw::zipf(sizes.len(), 0.8).unwrap();
            let cat = ContentCatalogue::new(pop, sizes.clone()).unwrap();
            let ordering = [SizeOrdering::Independent, SizeOrdering::Increasing, SizeOrdering::Decreasing][mode as usize];
            let out = cat.apply_ordering(ordering);
            let mut a = sizes.clone();
            let mut b = out.sizes().to_vec();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            prop_assert_eq!(a, b);
            match ordering {
                SizeOrdering::Increasing => prop_assert!(out.sizes().windows(2).all(|w| w[0] <= w[1])),
                SizeOrdering::Decreasing => prop_assert!(out.sizes().windows(2).all(|w| w[0] >= w[1])),
                SizeOrdering::Independent => prop_assert_eq!(out.sizes(), &sizes[..]),
            }
        }
    }

    #[test]
    fn zipf_large_catalogue_normalized() {
        let p = PopularityLaw::zipf(1_000_000, 3.0).unwrap();
        assert!((p.probabilities().iter().rev().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
