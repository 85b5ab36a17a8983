//! Scenario files: strict TOML, unknown keys rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub source: SourceConfig,
    pub sample: SampleConfig,
    pub delay_axis: DelayAxisConfig,
    pub outputs: OutputsConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub center_wavelength_m: f64,
    /// Full 1/e width of the Gaussian power spectrum in wavelength.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth_fw1e_m: Option<f64>,
    /// Two-column table of frequency offset (rad/s) and density, resolved
    /// relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tabulated_spectrum: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub layers: Vec<LayerConfig>,
    pub dispersion: DispersionConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    pub r_re: f64,
    #[serde(default)]
    pub r_im: f64,
    pub z_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionConfig {
    pub omega_r_rad_s: ReferenceFrequency,
    pub beta_r: f64,
    pub beta1: f64,
    pub beta2: f64,
    #[serde(default)]
    pub beta3: f64,
    #[serde(default)]
    pub beta4: f64,
}

/// Expansion point of the dispersion polynomial: a number in rad/s or `"match_source"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReferenceFrequency {
    Value(f64),
    Keyword(MatchSource),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchSource {
    MatchSource,
}

/// Delays in position units `x = τv₀/2`, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelayAxisConfig {
    pub min_m: f64,
    pub max_m: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default)]
    pub oct: bool,
    #[serde(default)]
    pub qoct_full: bool,
    #[serde(default)]
    pub qoct_self_only: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump_average: Option<PumpAverageConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wigner: Option<WignerConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpAverageConfig {
    pub n_points: usize,
    /// Total sweep of ω₀. Omitted: one full turn of the closest layer pair's cross phase.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span_rad_s: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n_trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerConfig {
    pub n_centers: usize,
    pub omega_half_range_rad_s: f64,
    pub n_omega: usize,
    /// When set, H is reconstructed about the source center with this relative floor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconstruct_amplitude_floor: Option<f64>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<(Self, String), CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Self::from_toml(&text)?;
        if let (Some(table), Some(dir)) = (&config.source.tabulated_spectrum, path.parent()) {
            if table.is_relative() {
                config.source.tabulated_spectrum = Some(dir.join(table));
            }
        }
        Ok((config, text))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario config is always representable")
    }

    /// Checks that do not need the physics layer.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        match (
            &self.source.bandwidth_fw1e_m,
            &self.source.tabulated_spectrum,
        ) {
            (Some(_), Some(_)) => {
                return bad(
                    "source: give either bandwidth_fw1e_m or tabulated_spectrum, not both".into(),
                )
            }
            (None, None) => {
                return bad(
                    "source: one of bandwidth_fw1e_m or tabulated_spectrum is required".into(),
                )
            }
            _ => {}
        }
        if self.sample.layers.is_empty() {
            return bad("sample.layers: at least one layer is required".into());
        }
        let axis = &self.delay_axis;
        if !(axis.min_m.is_finite() && axis.max_m.is_finite() && axis.max_m > axis.min_m) {
            return bad(format!(
                "delay_axis: need min_m < max_m, got [{}, {}]",
                axis.min_m, axis.max_m
            ));
        }
        if axis.n_points < 2 {
            return bad(format!(
                "delay_axis.n_points must be >= 2, got {}",
                axis.n_points
            ));
        }
        let o = &self.outputs;
        if !(o.oct || o.qoct_full || o.qoct_self_only)
            && o.pump_average.is_none()
            && o.ensemble.is_none()
            && o.wigner.is_none()
        {
            return bad("outputs: nothing requested".into());
        }
        if let Some(w) = &o.wigner {
            if w.n_centers == 0 {
                return bad("outputs.wigner.n_centers must be >= 1".into());
            }
        }
        Ok(())
    }
}
