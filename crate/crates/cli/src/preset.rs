//! Built-in scenarios.

use std::f64::consts::PI;

use qoct_core::SPEED_OF_LIGHT;

use crate::config::{
    DelayAxisConfig, DispersionConfig, LayerConfig, MatchSource, OutputsConfig, ReferenceFrequency,
    SampleConfig, ScenarioConfig, SourceConfig,
};
use crate::error::CliError;

pub const NAMES: [&str; 3] = ["fig3", "fig4", "hom"];

const CENTER_WAVELENGTH: f64 = 812e-9;
const BANDWIDTH: f64 = 155e-9;
const GROUP_DELAY: f64 = 5e-9;
const GVD: f64 = 1.8e-25;

pub fn preset(name: &str) -> Result<ScenarioConfig, CliError> {
    match name {
        "fig3" => Ok(two_layer(1e-4, (95e-6, 115e-6))),
        "fig4" => Ok(two_layer(0.0, (-5e-6, 15e-6))),
        "hom" => Ok(hom()),
        other => Err(CliError::Config(format!(
            "unknown preset {other:?} (expected one of {})",
            NAMES.join(", ")
        ))),
    }
}

fn center_frequency() -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / CENTER_WAVELENGTH
}

fn source() -> SourceConfig {
    SourceConfig {
        center_wavelength_m: CENTER_WAVELENGTH,
        bandwidth_fw1e_m: Some(BANDWIDTH),
        tabulated_spectrum: None,
    }
}

fn outputs() -> OutputsConfig {
    OutputsConfig {
        oct: true,
        qoct_full: true,
        qoct_self_only: true,
        pump_average: None,
        ensemble: None,
        wigner: None,
    }
}

// r₁ = 0.1 at `depth`, r₂ = 0.2 ten microns below it. The phase constant is
// β_r = ω₀β' (phase index equal to group index at the center).
fn two_layer(depth: f64, axis: (f64, f64)) -> ScenarioConfig {
    ScenarioConfig {
        source: source(),
        sample: SampleConfig {
            layers: vec![
                LayerConfig {
                    r_re: 0.1,
                    r_im: 0.0,
                    z_m: depth,
                },
                LayerConfig {
                    r_re: 0.2,
                    r_im: 0.0,
                    z_m: depth + 1e-5,
                },
            ],
            dispersion: DispersionConfig {
                omega_r_rad_s: ReferenceFrequency::Keyword(MatchSource::MatchSource),
                beta_r: center_frequency() * GROUP_DELAY,
                beta1: GROUP_DELAY,
                beta2: GVD,
                beta3: 0.0,
                beta4: 0.0,
            },
        },
        delay_axis: DelayAxisConfig {
            min_m: axis.0,
            max_m: axis.1,
            n_points: 2001,
        },
        outputs: outputs(),
    }
}

// Mirror in vacuum: the HOM configuration.
fn hom() -> ScenarioConfig {
    ScenarioConfig {
        source: source(),
        sample: SampleConfig {
            layers: vec![LayerConfig {
                r_re: 1.0,
                r_im: 0.0,
                z_m: 0.0,
            }],
            dispersion: DispersionConfig {
                omega_r_rad_s: ReferenceFrequency::Keyword(MatchSource::MatchSource),
                beta_r: center_frequency() / SPEED_OF_LIGHT,
                beta1: 1.0 / SPEED_OF_LIGHT,
                beta2: 0.0,
                beta3: 0.0,
                beta4: 0.0,
            },
        },
        delay_axis: DelayAxisConfig {
            min_m: -10e-6,
            max_m: 10e-6,
            n_points: 2001,
        },
        outputs: OutputsConfig {
            qoct_self_only: false,
            ..outputs()
        },
    }
}
