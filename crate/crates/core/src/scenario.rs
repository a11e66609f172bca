use std::f64::consts::PI;

use crate::analytics::{coverage_factor, lifespan_moment};
use crate::channel::{FadingLaw, RadioParams};
use crate::content::ContentCatalogue;
use crate::error::{check, Error, Result};
use crate::geometry::Window;
use crate::mobility::LifespanLaw;
use crate::placement::PlacementPolicy;

/// Above this many expected servers the miss probability is below 1e-6.
const SATURATED_SERVERS: f64 = 14.0;

/// Everything the closed forms and the simulator need about one network.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Transmitter density λ_t in transmitters/m².
    pub density: f64,
    pub window: Window,
    pub radio: RadioParams,
    pub fading: FadingLaw,
    pub lifespan: LifespanLaw,
    pub catalogue: ContentCatalogue,
    pub placement: PlacementPolicy,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        check("density", self.density, |d| d >= 0.0, "finite and ≥ 0")?;
        self.fading.validate()?;
        self.lifespan.validate()?;
        if self.placement.len() != self.catalogue.len() {
            return Err(Error::invalid(
                "placement.b",
                format!(
                    "{} marginals for a catalogue of {} objects",
                    self.placement.len(),
                    self.catalogue.len()
                ),
            ));
        }
        Ok(())
    }

    /// Warns when some cached object can be served from near the window
    /// edge while its service is not yet saturated, since transmitters
    /// outside the window would then matter.
    pub fn truncation_warning(&self) -> Result<Option<String>> {
        let factor = coverage_factor(self)?;
        let h = self.window.half_width();
        for (j, &z) in self.catalogue.sizes().iter().enumerate() {
            let b = self.placement.marginal(j);
            if b == 0.0 {
                continue;
            }
            let it = lifespan_moment(&self.lifespan, z, self.radio.bandwidth(), self.radio.pathloss_exponent())?;
            // disc that holds `servers` cached transmitters on average
            let servers = factor * b * it;
            let radius = (servers / (PI * self.density * b)).sqrt();
            if servers < SATURATED_SERVERS && radius * 10.0 > h {
                return Ok(Some(format!(
                    "object {}: coverage radius scale {radius:.3e} m is within a factor 10 of the window half-width {h} m",
                    j + 1
                )));
            }
        }
        Ok(None)
    }
}
