//! Reproducible parameter sweeps comparing closed forms with simulation.

pub mod config;
pub mod defaults;
pub mod output;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{expected_success, total_success};
use crate::channel::{FadingLaw, RadioParams};
use crate::content::{ContentCatalogue, PopularityLaw, SizeLaw, SizeOrdering};
use crate::error::{Error, Result};
use crate::geometry::Window;
use crate::metric::MetricEstimate;
use crate::mobility::LifespanLaw;
use crate::placement::PlacementPolicy;
use crate::rng::stream;
use crate::scenario::Scenario;
use crate::simulator::{estimate_total_success, SimulationConfig};

pub use config::{load_config, parse_config};
pub use output::{emit_results, write_results, OutputFormat, COLUMNS};

/// Stream ids for catalogue sampling; variant `i` with its own size law uses `CATALOGUE_STREAM + 1 + i`.
const CATALOGUE_STREAM: u64 = 1 << 20;
const SIZE_EXPECTATION_STREAM: u64 = 2 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetName {
    ValidateAudio,
    ValidateVideo,
    CorrelationVideo,
    ExpectedComparison,
    OrderedComparison,
    Custom,
}

impl PresetName {
    pub const ALL: [PresetName; 6] = [
        PresetName::ValidateAudio,
        PresetName::ValidateVideo,
        PresetName::CorrelationVideo,
        PresetName::ExpectedComparison,
        PresetName::OrderedComparison,
        PresetName::Custom,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PresetName::ValidateAudio => "validate_audio",
            PresetName::ValidateVideo => "validate_video",
            PresetName::CorrelationVideo => "correlation_video",
            PresetName::ExpectedComparison => "expected_comparison",
            PresetName::OrderedComparison => "ordered_comparison",
            PresetName::Custom => "custom",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            PresetName::ValidateAudio => "total success vs mean lifespan, exponential audio sizes (10 Mb)",
            PresetName::ValidateVideo => "total success vs mean lifespan, exponential video sizes (1 Gb)",
            PresetName::CorrelationVideo => "video sizes in increasing, independent and decreasing popularity order",
            PresetName::ExpectedComparison => "expected success for five 1 Gb size laws, fixed 1000 s lifespan",
            PresetName::OrderedComparison => "total success for five size laws, 200 samples in decreasing order",
            PresetName::Custom => "audio defaults; every field overridable from a config file",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PresetName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::invalid("preset", format!("unknown preset `{s}`")))
    }
}

/// What each sweep point computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Closed-form total success against the simulator, catalogue sizes fixed.
    Total,
    /// Size expectation by Monte Carlo against a simulator that redraws sizes.
    Expected,
}

/// How the noise figure is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// Noise power is `noise_density · bandwidth` against the total `power`.
    #[default]
    Band,
    /// `power` and `noise_density` are both per hertz; only their ratio matters.
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    MeanLifespan,
    Density,
}

impl SweepVariable {
    pub fn column_name(&self) -> &'static str {
        match self {
            SweepVariable::MeanLifespan => "mean_lifespan_s",
            SweepVariable::Density => "density_per_m2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn validate(&self) -> Result<()> {
        let name = format!("sweep.{}", self.variable.column_name());
        if self.values.is_empty() {
            return Err(Error::invalid(name, "grid is empty"));
        }
        if self.values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::invalid(name, "grid values must be finite and > 0"));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(name, "grid must be strictly increasing"));
        }
        Ok(())
    }
}

/// Serializable description of a [`Scenario`] whose catalogue is sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub density: f64,
    pub window_half_width: f64,
    pub power: f64,
    pub noise_density: f64,
    pub noise_model: NoiseModel,
    pub bandwidth: f64,
    pub pathloss_exponent: f64,
    pub fading: FadingLaw,
    pub lifespan: LifespanLaw,
    pub catalogue_size: usize,
    pub zipf_exponent: f64,
    pub cache_capacity: usize,
    pub size: SizeLaw,
    pub ordering: SizeOrdering,
}

impl ScenarioSpec {
    fn baseline(mean_size: f64, lifespan: LifespanLaw) -> Self {
        ScenarioSpec {
            density: defaults::DENSITY,
            window_half_width: defaults::WINDOW_HALF_WIDTH,
            power: defaults::POWER,
            noise_density: defaults::NOISE_DENSITY,
            noise_model: NoiseModel::Band,
            bandwidth: defaults::BANDWIDTH,
            pathloss_exponent: defaults::PATHLOSS_EXPONENT,
            fading: FadingLaw::RAYLEIGH,
            lifespan,
            catalogue_size: defaults::CATALOGUE_SIZE,
            zipf_exponent: defaults::ZIPF_EXPONENT,
            cache_capacity: defaults::CACHE_CAPACITY,
            size: SizeLaw::Exponential { rate: 1.0 / mean_size },
            ordering: SizeOrdering::Independent,
        }
    }

    pub fn radio(&self) -> Result<RadioParams> {
        let noise = match self.noise_model {
            NoiseModel::Band => self.noise_density * self.bandwidth,
            NoiseModel::Spectral => self.noise_density,
        };
        RadioParams::new(self.power, noise, self.bandwidth, self.pathloss_exponent)
    }

    pub fn validate(&self) -> Result<()> {
        self.radio()?;
        Window::new(self.window_half_width)?;
        self.fading.validate()?;
        self.lifespan.validate()?;
        self.size.validate()?;
        let pop = PopularityLaw::zipf(self.catalogue_size, self.zipf_exponent)?;
        PlacementPolicy::normalized_popularity(&pop, self.cache_capacity)?;
        crate::error::check("density", self.density, |d| d > 0.0, "finite and > 0")?;
        Ok(())
    }

    /// Builds the scenario with catalogue sizes drawn from `size` under
    /// stream `(seed, catalogue_stream)` and arranged by `ordering`.
    pub fn build(&self, seed: u64, catalogue_stream: u64) -> Result<Scenario> {
        let pop = PopularityLaw::zipf(self.catalogue_size, self.zipf_exponent)?;
        let placement = PlacementPolicy::normalized_popularity(&pop, self.cache_capacity)?;
        let catalogue =
            ContentCatalogue::sample(pop, &self.size, &mut stream(seed, catalogue_stream))?.apply_ordering(self.ordering);
        let scenario = Scenario {
            density: self.density,
            window: Window::new(self.window_half_width)?,
            radio: self.radio()?,
            fading: self.fading,
            lifespan: self.lifespan,
            catalogue,
            placement,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

/// One curve of an experiment: the base scenario with some fields replaced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<SizeLaw>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordering: Option<SizeOrdering>,
}

impl Variant {
    fn named(name: &str) -> Self {
        Variant {
            name: name.to_owned(),
            size: None,
            ordering: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPreset {
    pub name: PresetName,
    pub experiment: ExperimentKind,
    pub scenario: ScenarioSpec,
    pub variants: Vec<Variant>,
    pub sweeps: Vec<Sweep>,
    pub iterations: u64,
    pub seed: u64,
    pub threads: Option<usize>,
    /// Initial size draws for [`ExperimentKind::Expected`]; doubled up to
    /// [`defaults::MAX_MC_SAMPLES`] until adjacent variants separate.
    pub mc_samples: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl ExperimentPreset {
    pub fn named(name: PresetName) -> Self {
        use defaults::*;
        let lifespan_sweep = |max| Sweep {
            variable: SweepVariable::MeanLifespan,
            values: linear_grid(max, GRID_POINTS),
        };
        let audio = ScenarioSpec::baseline(AUDIO_MEAN_SIZE, LifespanLaw::Exponential { mean: AUDIO_MAX_MEAN_LIFESPAN });
        let video = ScenarioSpec::baseline(VIDEO_MEAN_SIZE, LifespanLaw::Exponential { mean: VIDEO_MAX_MEAN_LIFESPAN });
        let laws = || {
            video_size_laws()
                .into_iter()
                .map(|(n, law)| Variant {
                    name: n.to_owned(),
                    size: Some(law),
                    ordering: None,
                })
                .collect::<Vec<_>>()
        };
        let (experiment, scenario, variants, sweeps) = match name {
            PresetName::ValidateAudio | PresetName::Custom => (
                ExperimentKind::Total,
                audio,
                vec![Variant::named("independent")],
                vec![lifespan_sweep(AUDIO_MAX_MEAN_LIFESPAN)],
            ),
            PresetName::ValidateVideo => (
                ExperimentKind::Total,
                video,
                vec![Variant::named("independent")],
                vec![lifespan_sweep(VIDEO_MAX_MEAN_LIFESPAN)],
            ),
            PresetName::CorrelationVideo => (
                ExperimentKind::Total,
                video,
                [SizeOrdering::Increasing, SizeOrdering::Independent, SizeOrdering::Decreasing]
                    .into_iter()
                    .map(|o| Variant {
                        name: o.name().to_owned(),
                        size: None,
                        ordering: Some(o),
                    })
                    .collect(),
                vec![lifespan_sweep(VIDEO_MAX_MEAN_LIFESPAN)],
            ),
            PresetName::ExpectedComparison => (
                ExperimentKind::Expected,
                ScenarioSpec {
                    lifespan: LifespanLaw::Fixed { mean: COMPARISON_LIFESPAN },
                    ..video
                },
                laws(),
                vec![
                    Sweep {
                        variable: SweepVariable::Density,
                        values: log_grid(COMPARISON_MIN_DENSITY, DENSITY, GRID_POINTS),
                    },
                    lifespan_sweep(VIDEO_MAX_MEAN_LIFESPAN),
                ],
            ),
            PresetName::OrderedComparison => (
                ExperimentKind::Total,
                ScenarioSpec {
                    catalogue_size: ORDERED_CATALOGUE_SIZE,
                    ordering: SizeOrdering::Decreasing,
                    ..video
                },
                laws(),
                vec![lifespan_sweep(VIDEO_MAX_MEAN_LIFESPAN)],
            ),
        };
        ExperimentPreset {
            name,
            experiment,
            scenario,
            variants,
            sweeps,
            iterations: ITERATIONS,
            seed: SEED,
            threads: None,
            mc_samples: MC_SAMPLES,
            out: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.variants.is_empty() {
            return Err(Error::invalid("variants", "need at least one variant"));
        }
        for v in &self.variants {
            self.variant_spec(v).validate()?;
        }
        if self.sweeps.is_empty() {
            return Err(Error::invalid("sweeps", "need at least one sweep"));
        }
        for s in &self.sweeps {
            s.validate()?;
        }
        if self.iterations == 0 {
            return Err(Error::invalid("iterations", "must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("threads", "must be at least 1"));
        }
        if self.experiment == ExperimentKind::Expected && self.mc_samples < 1000 {
            return Err(Error::invalid("mc_samples", "need at least 1000"));
        }
        Ok(())
    }

    fn variant_spec(&self, v: &Variant) -> ScenarioSpec {
        ScenarioSpec {
            size: v.size.unwrap_or(self.scenario.size),
            ordering: v.ordering.unwrap_or(self.scenario.ordering),
            ..self.scenario.clone()
        }
    }

    /// Scenario of variant `index` before any sweep value is applied.
    pub fn variant_scenario(&self, index: usize) -> Result<Scenario> {
        let v = &self.variants[index];
        let stream_id = if v.size.is_some() {
            CATALOGUE_STREAM + 1 + index as u64
        } else {
            CATALOGUE_STREAM
        };
        self.variant_spec(v)
            .build(self.seed, stream_id)
            .map_err(|e| e.context(format!("variant {}", v.name)))
    }
}

/// One sweep point of one variant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub sweep_name: String,
    pub sweep_value: f64,
    pub variant: String,
    pub analytic: MetricEstimate,
    pub simulated: MetricEstimate,
    pub seed: u64,
    pub wall_time_s: f64,
}

impl ResultRow {
    /// `|simulated - analytic|` in standard errors, using the binomial error
    /// implied by the analytic value so that `p̂ ∈ {0, 1}` is not flagged.
    pub fn z_score(&self) -> f64 {
        let p = self.analytic.value;
        let n = self.simulated.sample_count.max(1) as f64;
        let se = (p * (1.0 - p) / n + self.analytic.standard_error.powi(2)).sqrt();
        let d = (self.simulated.value - self.analytic.value).abs();
        if se > 0.0 {
            d / se
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

fn apply(scenario: &mut Scenario, variable: SweepVariable, value: f64) -> Result<()> {
    match variable {
        SweepVariable::MeanLifespan => scenario.lifespan = scenario.lifespan.with_mean(value)?,
        SweepVariable::Density => scenario.density = value,
    }
    Ok(())
}

fn size_law(preset: &ExperimentPreset, variant: usize) -> SizeLaw {
    preset.variants[variant].size.unwrap_or(preset.scenario.size)
}

fn analytic_expected(preset: &ExperimentPreset, scenarios: &[Scenario]) -> Result<Vec<MetricEstimate>> {
    let mut samples = preset.mc_samples;
    loop {
        let estimates = scenarios
            .iter()
            .enumerate()
            .map(|(i, s)| expected_success(s, &size_law(preset, i), samples, &mut stream(preset.seed, SIZE_EXPECTATION_STREAM)))
            .collect::<Result<Vec<_>>>()?;
        let separated = estimates.windows(2).all(|w| w[0].z_score(&w[1]) > 3.0);
        if separated || samples * 2 > defaults::MAX_MC_SAMPLES {
            return Ok(estimates);
        }
        samples *= 2;
    }
}

fn run_point(preset: &ExperimentPreset, bases: &[Scenario], sweep: &Sweep, value: f64) -> Result<Vec<ResultRow>> {
    let start = Instant::now();
    let scenarios = bases
        .iter()
        .map(|b| {
            let mut s = b.clone();
            apply(&mut s, sweep.variable, value).map(|_| s)
        })
        .collect::<Result<Vec<_>>>()?;
    let analytic = match preset.experiment {
        ExperimentKind::Total => scenarios.iter().map(total_success).collect::<Result<Vec<_>>>()?,
        ExperimentKind::Expected => analytic_expected(preset, &scenarios)?,
    };
    let mut rows = Vec::with_capacity(scenarios.len());
    for (i, (scenario, analytic)) in scenarios.into_iter().zip(analytic).enumerate() {
        let mut config = SimulationConfig::new(scenario, preset.iterations, preset.seed);
        if preset.experiment == ExperimentKind::Expected {
            config.size_law = Some(size_law(preset, i));
        }
        let simulated = estimate_total_success(&config)?;
        rows.push(ResultRow {
            sweep_name: sweep.variable.column_name().to_owned(),
            sweep_value: value,
            variant: preset.variants[i].name.clone(),
            analytic,
            simulated,
            seed: preset.seed,
            wall_time_s: 0.0,
        });
    }
    let elapsed = start.elapsed().as_secs_f64() / rows.len() as f64;
    rows.iter_mut().for_each(|r| r.wall_time_s = elapsed);
    Ok(rows)
}

/// Runs every sweep point of every variant. Rows come out sweep by sweep,
/// point by point, variant by variant, whatever the completion order.
pub fn run_preset(preset: &ExperimentPreset) -> Result<Vec<ResultRow>> {
    preset.validate()?;
    let run = || -> Result<Vec<ResultRow>> {
        let bases = (0..preset.variants.len())
            .map(|i| preset.variant_scenario(i))
            .collect::<Result<Vec<_>>>()?;
        let points: Vec<(&Sweep, f64)> =
            preset.sweeps.iter().flat_map(|s| s.values.iter().map(move |&v| (s, v))).collect();
        let per_point = points
            .par_iter()
            .map(|&(sweep, value)| {
                run_point(preset, &bases, sweep, value)
                    .map_err(|e| e.context(format!("{} = {value}", sweep.variable.column_name())))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(per_point.into_iter().flatten().collect())
    };
    match preset.threads {
        None => run(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid("threads", e.to_string()))?
            .install(run),
    }
}

/// The `n` largest catalogue sizes of each variant, largest first.
pub fn largest_sizes(preset: &ExperimentPreset, n: usize) -> Result<Vec<(String, Vec<f64>)>> {
    (0..preset.variants.len())
        .map(|i| {
            let s = preset.variant_scenario(i)?;
            let mut sizes = s.catalogue.sizes().to_vec();
            sizes.sort_by(|a, b| b.total_cmp(a));
            sizes.truncate(n);
            Ok((preset.variants[i].name.clone(), sizes))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(name: PresetName) -> ExperimentPreset {
        let mut p = ExperimentPreset::named(name);
        p.iterations = 200;
        p.mc_samples = 2000;
        for s in &mut p.sweeps {
            s.values.truncate(2);
        }
        p
    }

    #[test]
    fn every_preset_is_valid() {
        for name in PresetName::ALL {
            ExperimentPreset::named(name).validate().unwrap();
            assert_eq!(name.as_str().parse::<PresetName>().unwrap(), name);
        }
        assert!("nope".parse::<PresetName>().is_err());
    }

    #[test]
    fn audio_defaults() {
        let p = ExperimentPreset::named(PresetName::ValidateAudio);
        let s = &p.scenario;
        assert_eq!((s.density, s.bandwidth, s.pathloss_exponent), (2.5e-3, 5e6, 4.0));
        assert_eq!((s.catalogue_size, s.zipf_exponent, s.cache_capacity), (100, 0.78, 5));
        assert_eq!(s.size.mean().unwrap(), 1e7);
        assert_eq!(p.iterations, 2000);
        let grid = &p.sweeps[0].values;
        assert!(grid.len() == 10 && grid[0] > 0.0 && grid[9] == 100.0);
        assert!((s.radio().unwrap().snr_scale() - 1e4).abs() < 1e-8);
    }

    #[test]
    fn rows_in_sweep_order() {
        let p = small(PresetName::CorrelationVideo);
        let rows = run_preset(&p).unwrap();
        assert_eq!(rows.len(), 6);
        let order: Vec<(f64, &str)> = rows.iter().map(|r| (r.sweep_value, r.variant.as_str())).collect();
        assert_eq!(
            order,
            vec![
                (100.0, "increasing"),
                (100.0, "independent"),
                (100.0, "decreasing"),
                (200.0, "increasing"),
                (200.0, "independent"),
                (200.0, "decreasing"),
            ]
        );
        for r in &rows {
            assert!((0.0..=1.0).contains(&r.analytic.value) && (0.0..=1.0).contains(&r.simulated.value));
        }
    }

    #[test]
    fn correlation_variants_share_sizes() {
        let p = ExperimentPreset::named(PresetName::CorrelationVideo);
        let mut sets: Vec<Vec<f64>> = (0..3)
            .map(|i| {
                let mut v = p.variant_scenario(i).unwrap().catalogue.sizes().to_vec();
                v.sort_by(f64::total_cmp);
                v
            })
            .collect();
        let first = sets.remove(0);
        assert!(sets.iter().all(|s| *s == first));
    }

    #[test]
    fn expected_comparison_runs_both_sweeps() {
        let p = small(PresetName::ExpectedComparison);
        let rows = run_preset(&p).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 5);
        assert!(rows[..10].iter().all(|r| r.sweep_name == "density_per_m2"));
        assert!(rows[10..].iter().all(|r| r.sweep_name == "mean_lifespan_s"));
    }

    #[test]
    fn ordered_comparison_top_sizes() {
        let p = ExperimentPreset::named(PresetName::OrderedComparison);
        let top = largest_sizes(&p, 5).unwrap();
        let uniform = &top[0].1;
        assert!(uniform.iter().all(|&z| z <= 2e9 && z > 1.8e9));
        let weibull = &top[4].1;
        assert!(weibull[0] > uniform[0]);
        assert_eq!(p.variant_scenario(0).unwrap().catalogue.len(), 200);
    }

    #[test]
    fn rejects_bad_grids() {
        let mut p = ExperimentPreset::named(PresetName::ValidateAudio);
        p.sweeps[0].values = vec![10.0, 10.0];
        assert!(p.validate().is_err());
        p.sweeps[0].values = vec![];
        assert!(p.validate().is_err());
        p.sweeps[0].values = vec![0.0, 10.0];
        assert!(p.validate().is_err());
    }
}
