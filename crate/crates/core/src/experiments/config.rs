//! TOML experiment files.
//!
//! Only `preset` is required; every other key overrides that preset's
//! defaults. Unknown keys are rejected.
//!
//! ```toml
//! preset = "validate_video"
//! seed = 7
//! iterations = 5000
//!
//! [radio]
//! pathloss_exponent = 3.5
//!
//! [lifespan]
//! law = "fixed"
//! mean = 100.0
//!
//! [[sweeps]]
//! variable = "mean_lifespan"
//! start = 100.0
//! stop = 1000.0
//! points = 10
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::defaults::{linear_grid, log_grid};
use super::{ExperimentKind, ExperimentPreset, NoiseModel, OutputFormat, PresetName, Sweep, SweepVariable, Variant};
use crate::channel::FadingLaw;
use crate::content::{SizeLaw, SizeOrdering};
use crate::error::{Error, Result};
use crate::mobility::LifespanLaw;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    preset: PresetName,
    experiment: Option<ExperimentKind>,
    seed: Option<u64>,
    iterations: Option<u64>,
    threads: Option<usize>,
    mc_samples: Option<usize>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
    #[serde(default)]
    network: NetworkSection,
    #[serde(default)]
    radio: RadioSection,
    fading: Option<FadingLaw>,
    lifespan: Option<LifespanLaw>,
    #[serde(default)]
    content: ContentSection,
    sweeps: Option<Vec<SweepSection>>,
    variants: Option<Vec<Variant>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkSection {
    density: Option<f64>,
    window_half_width: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadioSection {
    power: Option<f64>,
    noise_density: Option<f64>,
    noise_model: Option<NoiseModel>,
    bandwidth: Option<f64>,
    pathloss_exponent: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContentSection {
    catalogue_size: Option<usize>,
    zipf_exponent: Option<f64>,
    cache_capacity: Option<usize>,
    size: Option<SizeLaw>,
    ordering: Option<SizeOrdering>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Either explicit `values` or a `start`/`stop`/`points` grid.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    variable: SweepVariable,
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    points: Option<usize>,
    #[serde(default)]
    spacing: Spacing,
}

impl SweepSection {
    fn into_sweep(self) -> std::result::Result<Sweep, String> {
        let values = match (self.values, self.start, self.stop, self.points) {
            (Some(v), None, None, None) => v,
            (None, start, Some(stop), Some(n)) if n >= 1 => match (self.spacing, start) {
                (Spacing::Linear, None) => linear_grid(stop, n),
                (Spacing::Linear, Some(a)) if n >= 2 => {
                    (0..n).map(|i| a + (stop - a) * i as f64 / (n - 1) as f64).collect()
                }
                (Spacing::Log, Some(a)) if n >= 2 => log_grid(a, stop, n),
                _ => return Err("a grid with `start` needs `points` ≥ 2; log spacing needs `start`".into()),
            },
            _ => return Err("give either `values` or `stop` and `points` (with optional `start`)".into()),
        };
        Ok(Sweep {
            variable: self.variable,
            values,
        })
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn config_error(origin: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: origin.to_owned(),
        message: message.into(),
    }
}

/// Parses and validates a config; `origin` names the source in errors.
pub fn parse_config(text: &str, origin: &str) -> Result<ExperimentPreset> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| config_error(origin, e.to_string().trim_end()))?;
    let mut p = ExperimentPreset::named(file.preset);
    if let Some(kind) = file.experiment {
        if file.preset != PresetName::Custom {
            return Err(config_error(origin, "`experiment` can only be set for the custom preset"));
        }
        p.experiment = kind;
    }
    set(&mut p.seed, file.seed);
    set(&mut p.iterations, file.iterations);
    p.threads = file.threads.or(p.threads);
    set(&mut p.mc_samples, file.mc_samples);
    p.out = file.out.or(p.out);
    set(&mut p.format, file.format);

    let s = &mut p.scenario;
    set(&mut s.density, file.network.density);
    set(&mut s.window_half_width, file.network.window_half_width);
    set(&mut s.power, file.radio.power);
    set(&mut s.noise_density, file.radio.noise_density);
    set(&mut s.noise_model, file.radio.noise_model);
    set(&mut s.bandwidth, file.radio.bandwidth);
    set(&mut s.pathloss_exponent, file.radio.pathloss_exponent);
    set(&mut s.fading, file.fading);
    set(&mut s.lifespan, file.lifespan);
    set(&mut s.catalogue_size, file.content.catalogue_size);
    set(&mut s.zipf_exponent, file.content.zipf_exponent);
    set(&mut s.cache_capacity, file.content.cache_capacity);
    set(&mut s.size, file.content.size);
    set(&mut s.ordering, file.content.ordering);

    if let Some(sweeps) = file.sweeps {
        p.sweeps = sweeps
            .into_iter()
            .map(|s| s.into_sweep().map_err(|m| config_error(origin, format!("sweeps: {m}"))))
            .collect::<Result<_>>()?;
    }
    set(&mut p.variants, file.variants);

    p.validate().map_err(|e| config_error(origin, e.to_string()))?;
    Ok(p)
}

pub fn load_config(path: &Path) -> Result<ExperimentPreset> {
    let text = std::fs::read_to_string(path).map_err(|e| config_error(&path.display().to_string(), e.to_string()))?;
    parse_config(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn message(text: &str) -> String {
        let e = parse_config(text, "test.toml").unwrap_err();
        assert!(e.is_config(), "{e}");
        e.to_string()
    }

    #[test]
    fn empty_file_names_missing_field() {
        assert!(message("").contains("preset"));
    }

    #[test]
    fn bare_preset_gives_defaults() {
        let p = parse_config("preset = \"validate_audio\"\n", "t").unwrap();
        assert_eq!(p, ExperimentPreset::named(PresetName::ValidateAudio));
    }

    #[test]
    fn rejects_alpha_two() {
        let m = message("preset = \"validate_audio\"\n[radio]\npathloss_exponent = 2.0\n");
        assert!(m.contains("pathloss_exponent"), "{m}");
    }

    #[test]
    fn rejects_unknown_keys_with_line() {
        let m = message("preset = \"validate_audio\"\n\n[radio]\nbogus = 1\n");
        assert!(m.contains("bogus") && m.contains("line 4"), "{m}");
        assert!(message("preset = \"validate_audio\"\n[fading]\nlaw = \"exponential\"\nrate = 1.0\nextra = 2\n").contains("extra"));
    }

    #[test]
    fn overrides_apply() {
        let p = parse_config(
            r#"
preset = "custom"
experiment = "expected"
seed = 9
iterations = 10
mc_samples = 5000
format = "json"

[network]
density = 1e-3

[radio]
noise_model = "spectral"

[lifespan]
law = "fixed"
mean = 50.0

[content]
catalogue_size = 40
size = { law = "pareto", shape = 1.5, scale = 1e6 }

[[sweeps]]
variable = "density"
start = 1e-4
stop = 1e-2
points = 3
spacing = "log"

[[variants]]
name = "pareto"

[[variants]]
name = "uniform"
size = { law = "uniform", min = 1e5, max = 2e6 }
"#,
            "t",
        )
        .unwrap();
        assert_eq!(p.experiment, ExperimentKind::Expected);
        assert_eq!((p.seed, p.iterations, p.mc_samples, p.format), (9, 10, 5000, OutputFormat::Json));
        assert_eq!(p.scenario.density, 1e-3);
        assert_eq!(p.scenario.noise_model, NoiseModel::Spectral);
        assert_eq!(p.scenario.lifespan, LifespanLaw::Fixed { mean: 50.0 });
        assert_eq!(p.scenario.catalogue_size, 40);
        assert_eq!(p.sweeps.len(), 1);
        assert_eq!(p.sweeps[0].values.len(), 3);
        assert!((p.sweeps[0].values[1] - 1e-3).abs() < 1e-15);
        assert_eq!(p.variants.len(), 2);
    }

    #[test]
    fn experiment_kind_only_for_custom() {
        assert!(message("preset = \"validate_audio\"\nexperiment = \"expected\"\n").contains("custom"));
    }

    #[test]
    fn rejects_bad_sweeps() {
        assert!(message("preset = \"custom\"\n[[sweeps]]\nvariable = \"density\"\n").contains("values"));
        assert!(message("preset = \"custom\"\n[[sweeps]]\nvariable = \"density\"\nvalues = [2.0, 1.0]\n")
            .contains("increasing"));
    }
}
