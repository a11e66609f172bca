//! Transmitter lifespans: how long a link keeps its initial quality before
//! the transmitter is displaced and the link drops.

use rand::Rng;
use rand_distr::{Distribution, Open01};
use serde::{Deserialize, Serialize};

use crate::error::{positive, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum LifespanLaw {
    /// Every transmitter stays exactly `mean` seconds.
    Fixed { mean: f64 },
    /// Exponential lifespans with mean `mean` seconds.
    Exponential { mean: f64 },
}

impl LifespanLaw {
    pub fn validate(&self) -> Result<()> {
        positive("lifespan.mean", self.mean()).map(drop)
    }

    pub fn mean(&self) -> f64 {
        match *self {
            LifespanLaw::Fixed { mean } | LifespanLaw::Exponential { mean } => mean,
        }
    }

    pub fn with_mean(self, mean: f64) -> Result<Self> {
        let law = match self {
            LifespanLaw::Fixed { .. } => LifespanLaw::Fixed { mean },
            LifespanLaw::Exponential { .. } => LifespanLaw::Exponential { mean },
        };
        law.validate()?;
        Ok(law)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            LifespanLaw::Fixed { mean } => mean,
            LifespanLaw::Exponential { mean } => {
                let u: f64 = Open01.sample(rng);
                -mean * u.ln()
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LifespanLaw::Fixed { .. } => "fixed",
            LifespanLaw::Exponential { .. } => "exponential",
        }
    }
}
