//! Link budget, fading laws and the fading moment `E[H^{2/α}]`.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal, Open01};
use serde::{Deserialize, Serialize};

use crate::error::{check, positive, Error, Result};
use crate::quadrature::{integrate_to_infinity, Tolerance};
use crate::special::{bessel_i0_scaled, gamma, ln_gamma};

/// Transmit power, noise power, bandwidth and path-loss exponent of every link.
///
/// `power` and `noise` only enter through their ratio, so any consistent unit
/// works (total Watt, or Watt/Hz for both).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    power: f64,
    noise: f64,
    bandwidth: f64,
    pathloss_exponent: f64,
}

impl RadioParams {
    pub fn new(power: f64, noise: f64, bandwidth: f64, pathloss_exponent: f64) -> Result<Self> {
        Ok(RadioParams {
            power: positive("power", power)?,
            noise: positive("noise", noise)?,
            bandwidth: positive("bandwidth", bandwidth)?,
            pathloss_exponent: check("pathloss_exponent", pathloss_exponent, |a| a > 2.0, "finite and > 2")?,
        })
    }

    pub fn power(&self) -> f64 {
        self.power
    }
    pub fn noise(&self) -> f64 {
        self.noise
    }
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
    pub fn pathloss_exponent(&self) -> f64 {
        self.pathloss_exponent
    }

    pub fn with_power(self, power: f64) -> Result<Self> {
        Self::new(power, self.noise, self.bandwidth, self.pathloss_exponent)
    }
    pub fn with_noise(self, noise: f64) -> Result<Self> {
        Self::new(self.power, noise, self.bandwidth, self.pathloss_exponent)
    }
    pub fn with_bandwidth(self, bandwidth: f64) -> Result<Self> {
        Self::new(self.power, self.noise, bandwidth, self.pathloss_exponent)
    }
    pub fn with_pathloss_exponent(self, alpha: f64) -> Result<Self> {
        Self::new(self.power, self.noise, self.bandwidth, alpha)
    }

    /// `P / N`.
    pub fn snr_scale(&self) -> f64 {
        self.power / self.noise
    }

    /// `P h r^{-α} / N`.
    pub fn snr(&self, fading: f64, distance: f64) -> Result<f64> {
        if distance.is_nan() || distance <= 0.0 {
            return Err(Error::Domain(format!(
                "path loss is singular at distance {distance}; need r > 0"
            )));
        }
        Ok(self.snr_scale() * fading * distance.powf(-self.pathloss_exponent))
    }

    /// Shannon rate `W log2(1 + snr)` in bits/s.
    pub fn rate(&self, snr: f64) -> f64 {
        self.bandwidth * snr.ln_1p() / std::f64::consts::LN_2
    }

    /// `P^{2/α} E[H^{2/α}]`, the fading/power factor of the closed-form service probability.
    pub fn fading_factor(&self, law: &FadingLaw) -> Result<f64> {
        let order = 2.0 / self.pathloss_exponent;
        Ok(self.power.powf(order) * fading_moment(law, self.pathloss_exponent)?)
    }
}

/// Distribution of the fading variable `H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum FadingLaw {
    /// Density `λ e^{-λh}`; Rayleigh fading in power.
    Exponential { rate: f64 },
    LogNormal { mu: f64, sigma: f64 },
    Weibull { scale: f64, shape: f64 },
    /// Amplitude density `2 m^m h^{2m-1} e^{-m h²/Ω} / (Γ(m) Ω^m)`.
    Nakagami { m: f64, omega: f64 },
    /// Amplitude density `(h/σ²) I0(hν/σ²) e^{-(h²+ν²)/(2σ²)}`.
    Rice { nu: f64, sigma: f64 },
}

impl FadingLaw {
    pub const RAYLEIGH: FadingLaw = FadingLaw::Exponential { rate: 1.0 };

    pub fn validate(&self) -> Result<()> {
        match *self {
            FadingLaw::Exponential { rate } => positive("fading.rate", rate).map(drop),
            FadingLaw::LogNormal { mu, sigma } => {
                check("fading.mu", mu, |_| true, "finite")?;
                positive("fading.sigma", sigma).map(drop)
            }
            FadingLaw::Weibull { scale, shape } => {
                positive("fading.scale", scale)?;
                positive("fading.shape", shape).map(drop)
            }
            FadingLaw::Nakagami { m, omega } => {
                check("fading.m", m, |v| v >= 0.5, "finite and ≥ 0.5")?;
                positive("fading.omega", omega).map(drop)
            }
            FadingLaw::Rice { nu, sigma } => {
                check("fading.nu", nu, |v| v >= 0.0, "finite and ≥ 0")?;
                positive("fading.sigma", sigma).map(drop)
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            FadingLaw::Exponential { rate } => {
                let u: f64 = Open01.sample(rng);
                -u.ln() / rate
            }
            FadingLaw::LogNormal { mu, sigma } => {
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                (mu + sigma * z).exp()
            }
            FadingLaw::Weibull { scale, shape } => {
                let u: f64 = Open01.sample(rng);
                scale * (-u.ln()).powf(1.0 / shape)
            }
            FadingLaw::Nakagami { m, omega } => {
                // H² ~ Gamma(m, Ω/m); parameters were validated
                Gamma::new(m, omega / m).expect("validated").sample(rng).sqrt()
            }
            FadingLaw::Rice { nu, sigma } => {
                let n = Normal::new(0.0, sigma).expect("validated");
                (nu + n.sample(rng)).hypot(n.sample(rng))
            }
        }
    }

    /// Probability density at `h > 0`.
    pub fn density(&self, h: f64) -> f64 {
        if h.is_nan() || h <= 0.0 {
            return 0.0;
        }
        match *self {
            FadingLaw::Exponential { rate } => rate * (-rate * h).exp(),
            FadingLaw::LogNormal { mu, sigma } => {
                let z = (h.ln() - mu) / sigma;
                (-0.5 * z * z).exp() / (h * sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            FadingLaw::Weibull { scale, shape } => {
                let x = h / scale;
                (shape / scale) * x.powf(shape - 1.0) * (-x.powf(shape)).exp()
            }
            FadingLaw::Nakagami { m, omega } => {
                let ln = std::f64::consts::LN_2 + m * (m / omega).ln() - ln_gamma(m)
                    + (2.0 * m - 1.0) * h.ln()
                    - m * h * h / omega;
                ln.exp()
            }
            FadingLaw::Rice { nu, sigma } => {
                let s2 = sigma * sigma;
                let d = h - nu;
                (h / s2) * bessel_i0_scaled(h * nu / s2) * (-d * d / (2.0 * s2)).exp()
            }
        }
    }

    /// Typical magnitude of `H`, used to scale numerical integration.
    fn scale(&self) -> f64 {
        match *self {
            FadingLaw::Exponential { rate } => 1.0 / rate,
            FadingLaw::LogNormal { mu, .. } => mu.exp(),
            FadingLaw::Weibull { scale, .. } => scale,
            FadingLaw::Nakagami { omega, .. } => omega.sqrt(),
            FadingLaw::Rice { nu, sigma } => nu + sigma,
        }
    }

    /// Closed form of `E[H^q]` for the laws where it is standard.
    pub fn closed_form_moment(&self, q: f64) -> Option<f64> {
        match *self {
            FadingLaw::Exponential { rate } => Some(rate.powf(-q) * gamma(1.0 + q)),
            FadingLaw::LogNormal { mu, sigma } => Some((q * mu + 0.5 * q * q * sigma * sigma).exp()),
            FadingLaw::Weibull { scale, shape } => Some(scale.powf(q) * gamma(1.0 + q / shape)),
            FadingLaw::Nakagami { .. } | FadingLaw::Rice { .. } => None,
        }
    }

    /// `E[H^q]` by adaptive quadrature of `h^q f(h)` over `(0, ∞)`.
    pub fn numerical_moment(&self, q: f64) -> Result<f64> {
        self.validate()?;
        let s = self.scale();
        let tol = Tolerance {
            abs: 1e-300,
            rel: 1e-9,
        };
        // substitute h = s·y so the map y = t/(1-t) sees a unit-scale integrand
        let r = integrate_to_infinity(
            |y| {
                let h = s * y;
                if h <= 0.0 {
                    0.0
                } else {
                    h.powf(q) * self.density(h) * s
                }
            },
            0.0,
            tol,
            4000,
        )
        .map_err(|e| Error::quadrature(format!("E[H^{q}] under {self:?}"), e))?;
        Ok(r.value)
    }

    /// `E[H^q]`: closed form where trusted, quadrature otherwise.
    pub fn moment(&self, q: f64) -> Result<f64> {
        self.validate()?;
        match self.closed_form_moment(q) {
            Some(v) => Ok(v),
            None => self.numerical_moment(q),
        }
    }

    /// An upper bound on `E[H^q]` for `q ≥ 1` that needs no integration:
    /// exact for all laws except Rice, where Minkowski's inequality on
    /// `|ν + σ·(X, Y)|` is used.
    pub fn moment_upper_bound(&self, q: f64) -> f64 {
        match *self {
            FadingLaw::Nakagami { m, omega } => {
                (ln_gamma(m + 0.5 * q) - ln_gamma(m)).exp() * (omega / m).powf(0.5 * q)
            }
            FadingLaw::Rice { nu, sigma } => {
                // E[Rayleigh(1)^q] = 2^{q/2} Γ(1 + q/2)
                let rayleigh = (0.5 * q * std::f64::consts::LN_2 + ln_gamma(1.0 + 0.5 * q)).exp();
                (nu + sigma * rayleigh.powf(1.0 / q.max(1.0))).powf(q)
            }
            _ => self.closed_form_moment(q).expect("closed form exists"),
        }
    }
}

/// `E[H^{2/α}]` for path-loss exponent `α > 2`.
pub fn fading_moment(law: &FadingLaw, alpha: f64) -> Result<f64> {
    check("pathloss_exponent", alpha, |a| a > 2.0, "finite and > 2")?;
    law.moment(2.0 / alpha)
}
