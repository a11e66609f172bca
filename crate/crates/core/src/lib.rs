//! Service success probability of cached device-to-device networks whose
//! transmitters move away after a random lifespan.
//!
//! [`analytics`] evaluates the closed forms, [`simulator`] estimates the same
//! quantities by Monte Carlo, and [`experiments`] wires both into reproducible
//! parameter sweeps.

pub mod analytics;
pub mod channel;
pub mod content;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod metric;
pub mod mobility;
pub mod placement;
pub mod quadrature;
pub mod rng;
pub mod scenario;
pub mod simulator;
pub mod special;

pub use analytics::{expected_success, per_object_success, total_success};
pub use channel::{FadingLaw, RadioParams};
pub use content::{ContentCatalogue, PopularityLaw, SizeLaw, SizeOrdering};
pub use error::{Error, Result};
pub use geometry::Window;
pub use metric::MetricEstimate;
pub use mobility::LifespanLaw;
pub use placement::PlacementPolicy;
pub use scenario::Scenario;
pub use simulator::{estimate_per_object_success, estimate_total_success, SimulationConfig};
