//! Turns a config into engine inputs, runs the requested traces and renders
//! them as CSV text plus a manifest. Nothing here touches the filesystem
//! except reading a tabulated spectrum.

use num_complex::Complex64;
use qoct_core::oct::{oct_interferogram, oct_self_term};
use qoct_core::qoct::{
    pump_averaged_coincidence, qoct_coincidence, qoct_self_term, random_phase_ensemble,
};
use qoct_core::wigner::{global_phase_residual, reconstruct_transfer, wigner_map};
use qoct_core::{
    CenterGrid, Contributions, DelayGrid, DispersionProfile, EnsembleResult, EnsembleSpec,
    FreqGrid, Interferogram, Layer, LocalExpansion, OctOutput, Path, PumpSweep, Sample, Spectrum,
    TabulatedTransfer, WignerMap,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{ReferenceFrequency, ScenarioConfig};
use crate::error::CliError;
use crate::output;

/// Resolved physical inputs of one scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub spectrum: Spectrum,
    pub sample: Sample,
    /// Delay grid in seconds, `τ = 2x/v₀`.
    pub delays: DelayGrid,
    pub local: LocalExpansion,
    pub path: Path,
}

impl Scenario {
    pub fn build(config: &ScenarioConfig) -> Result<Self, CliError> {
        config.validate()?;
        let src = &config.source;
        let spectrum = match (&src.bandwidth_fw1e_m, &src.tabulated_spectrum) {
            (Some(bw), None) => Spectrum::gaussian_from_wavelength(src.center_wavelength_m, *bw)
                .map_err(|e| CliError::invalid("source", e))?,
            (None, Some(table)) => {
                let text = std::fs::read_to_string(table).map_err(|source| CliError::Io {
                    path: table.clone(),
                    source,
                })?;
                let omega0 = 2.0 * std::f64::consts::PI * qoct_core::SPEED_OF_LIGHT
                    / src.center_wavelength_m;
                Spectrum::parse_table(omega0, &text).map_err(|e| {
                    CliError::invalid(&format!("source.tabulated_spectrum {}", table.display()), e)
                })?
            }
            _ => unreachable!("validated"),
        };
        let omega0 = spectrum.center_frequency();
        let d = &config.sample.dispersion;
        let omega_r = match d.omega_r_rad_s {
            ReferenceFrequency::Value(w) => w,
            ReferenceFrequency::Keyword(_) => omega0,
        };
        let profile = DispersionProfile::with_higher_orders(
            omega_r, d.beta_r, d.beta1, d.beta2, d.beta3, d.beta4,
        )
        .map_err(|e| CliError::invalid("sample.dispersion", e))?;
        let layers = config
            .sample
            .layers
            .iter()
            .enumerate()
            .map(|(i, l)| {
                Layer::new(Complex64::new(l.r_re, l.r_im), l.z_m)
                    .map_err(|e| CliError::invalid(&format!("sample.layers[{i}]"), e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let sample = Sample::new(layers, profile).map_err(|e| CliError::invalid("sample", e))?;
        let local = profile
            .expand_at(omega0)
            .map_err(|e| CliError::invalid("sample.dispersion", e))?;
        let v0 = local.group_velocity();
        let axis = &config.delay_axis;
        let delays = DelayGrid::new(2.0 * axis.min_m / v0, 2.0 * axis.max_m / v0, axis.n_points)
            .map_err(|e| CliError::invalid("delay_axis", e))?;
        let path = Path::preferred(&sample, &spectrum);
        Ok(Self {
            spectrum,
            sample,
            delays,
            local,
            path,
        })
    }

    pub fn group_velocity(&self) -> f64 {
        self.local.group_velocity()
    }

    /// Position coordinate `x = τv₀/2` in micrometers.
    pub fn x_um(&self, tau: f64) -> f64 {
        0.5 * tau * self.group_velocity() * 1e6
    }
}

#[derive(Debug, Clone)]
pub struct WignerOutput {
    pub map: WignerMap,
    pub reconstruction: Option<Reconstruction>,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub transfer: TabulatedTransfer,
    pub truth: Vec<Complex64>,
    pub residual: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Traces {
    pub oct: Option<Interferogram>,
    pub qoct_full: Option<Interferogram>,
    pub qoct_self: Option<Interferogram>,
    pub pump_average: Option<(PumpSweep, Interferogram)>,
    pub ensemble: Option<(EnsembleSpec, EnsembleResult)>,
    pub wigner: Option<WignerOutput>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub scenario: Scenario,
    pub traces: Traces,
    /// `(file name, contents)` in write order; the manifest is not included.
    pub files: Vec<(String, String)>,
    pub manifest: Manifest,
}

pub fn compute(scenario: &Scenario, config: &ScenarioConfig) -> Result<Traces, CliError> {
    let (sample, sp, delays, path) = (
        &scenario.sample,
        &scenario.spectrum,
        &scenario.delays,
        scenario.path,
    );
    let out = &config.outputs;
    let mut traces = Traces::default();
    if out.oct {
        traces.oct = Some(oct_interferogram(
            sample,
            sp,
            delays,
            OctOutput::Envelope,
            path,
        )?);
    }
    if out.qoct_full {
        traces.qoct_full = Some(qoct_coincidence(
            sample,
            sp,
            delays,
            Contributions::Full,
            path,
        )?);
    }
    if out.qoct_self_only {
        traces.qoct_self = Some(qoct_coincidence(
            sample,
            sp,
            delays,
            Contributions::SelfOnly,
            path,
        )?);
    }
    if let Some(p) = &out.pump_average {
        let sweep = match p.span_rad_s {
            Some(span) => PumpSweep::new(p.n_points, span)?,
            None => PumpSweep::full_phase_cycle(sample, sp, p.n_points)?,
        };
        let trace = pump_averaged_coincidence(sample, sp, delays, &sweep, path)?;
        traces.pump_average = Some((sweep, trace));
    }
    if let Some(e) = &out.ensemble {
        let spec = EnsembleSpec::new(e.n_trials, e.seed)?;
        let result = random_phase_ensemble(sample, sp, delays, &spec, path)?;
        traces.ensemble = Some((spec, result));
    }
    if let Some(w) = &out.wigner {
        let window = FreqGrid::new(w.omega_half_range_rad_s, w.n_omega)?;
        let omega0 = sp.center_frequency();
        let half = w.n_centers / 2;
        let centers = CenterGrid::new(
            omega0 - half as f64 * window.step(),
            window.step(),
            w.n_centers,
        )?;
        let map_delays = window.conjugate_delays(0.0);
        let map = wigner_map(
            sample,
            &map_delays,
            &centers,
            w.omega_half_range_rad_s,
            w.n_omega,
        )?;
        let reconstruction = match w.reconstruct_amplitude_floor {
            Some(floor) => {
                let transfer = reconstruct_transfer(&map, omega0, floor)?;
                let truth = transfer
                    .frequencies()
                    .iter()
                    .map(|&f| sample.transfer_function(f))
                    .collect::<Result<Vec<_>, _>>()?;
                let residual = global_phase_residual(&transfer.values, &truth);
                Some(Reconstruction {
                    transfer,
                    truth,
                    residual,
                })
            }
            None => None,
        };
        traces.wigner = Some(WignerOutput {
            map,
            reconstruction,
        });
    }
    Ok(traces)
}

/// Build, compute and render. `timestamp` is seconds since the Unix epoch.
pub fn run(
    config: &ScenarioConfig,
    config_text: &str,
    timestamp: u64,
) -> Result<RunResult, CliError> {
    let scenario = Scenario::build(config)?;
    let traces = compute(&scenario, config)?;
    let mut files = Vec::new();
    if let Some(t) = &traces.oct {
        files.push((
            "oct.csv".to_string(),
            output::interferogram_csv(&scenario, t)?,
        ));
    }
    if let Some(t) = &traces.qoct_full {
        files.push((
            "qoct_full.csv".to_string(),
            output::interferogram_csv(&scenario, t)?,
        ));
    }
    if let Some(t) = &traces.qoct_self {
        files.push((
            "qoct_self.csv".to_string(),
            output::interferogram_csv(&scenario, t)?,
        ));
    }
    if let Some((_, t)) = &traces.pump_average {
        files.push((
            "qoct_pump_average.csv".to_string(),
            output::interferogram_csv(&scenario, t)?,
        ));
    }
    if let Some((_, r)) = &traces.ensemble {
        files.push((
            "qoct_ensemble.csv".to_string(),
            output::ensemble_csv(&scenario, r)?,
        ));
    }
    if let Some(w) = &traces.wigner {
        files.push(("wigner.csv".to_string(), output::wigner_csv(&w.map)));
        if let Some(r) = &w.reconstruction {
            files.push((
                "transfer_reconstructed.csv".to_string(),
                output::transfer_csv(r),
            ));
        }
    }
    let manifest = Manifest::new(&scenario, &traces, config, config_text, timestamp, &files)?;
    Ok(RunResult {
        scenario,
        traces,
        files,
        manifest,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub code_version: String,
    pub config_sha256: String,
    pub timestamp_unix_s: u64,
    pub engine_path: String,
    pub source: SourceRecord,
    pub dispersion: DispersionRecord,
    pub local_expansion: ExpansionRecord,
    pub layers: Vec<LayerRecord>,
    /// `2β₀(z_j - z_k)` for every pair `j < k`, radians.
    pub cross_phases: Vec<CrossPhase>,
    pub delay_axis: DelayRecord,
    pub frequency_grid: GridRecord,
    pub normalization: NormalizationRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pump_average: Option<PumpRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wigner: Option<WignerRecord>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceRecord {
    pub omega0_rad_s: f64,
    pub gaussian: bool,
    /// ΔΩ: 1/e half width of S(Ω).
    pub half_width_rad_s: Option<f64>,
    pub bandwidth_fw1e_rad_s: Option<f64>,
    /// Full 1/e width of |s(τ)|.
    pub coherence_time_field_fw1e_s: Option<f64>,
    /// Full 1/e width of |s(τ)|².
    pub coherence_time_intensity_fw1e_s: Option<f64>,
    pub applied_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionRecord {
    pub omega_r_rad_s: f64,
    pub beta_r: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub beta4: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionRecord {
    pub omega_rad_s: f64,
    pub beta0_rad_m: f64,
    pub beta1_s_m: f64,
    pub beta2_s2_m: f64,
    pub beta3_s3_m: f64,
    pub beta4_s4_m: f64,
    pub group_velocity_m_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerRecord {
    pub r_re: f64,
    pub r_im: f64,
    pub z_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossPhase {
    pub j: usize,
    pub k: usize,
    pub phase_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelayRecord {
    pub x_min_m: f64,
    pub x_max_m: f64,
    pub n_points: usize,
    pub tau_min_s: f64,
    pub tau_max_s: f64,
    pub tau_step_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRecord {
    pub half_range_rad_s: f64,
    pub n_points: usize,
    pub step_rad_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizationRecord {
    pub gamma0: f64,
    pub lambda0_full: f64,
    pub lambda0_self_only: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PumpRecord {
    pub n_points: usize,
    pub span_rad_s: f64,
    pub offsets_rad_s: Vec<f64>,
    pub mean_lambda0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleRecord {
    pub n_trials: usize,
    pub seed: u64,
    pub rng: String,
    pub mean_lambda0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerRecord {
    pub omega_half_range_rad_s: f64,
    pub n_omega: usize,
    pub center_start_rad_s: f64,
    pub center_step_rad_s: f64,
    pub n_centers: usize,
    pub tau_min_s: f64,
    pub tau_step_s: f64,
    pub reconstruction_reference_rad_s: Option<f64>,
    pub reconstruction_residual: Option<f64>,
}

impl Manifest {
    fn new(
        scenario: &Scenario,
        traces: &Traces,
        config: &ScenarioConfig,
        config_text: &str,
        timestamp: u64,
        files: &[(String, String)],
    ) -> Result<Self, CliError> {
        let (sample, sp, path) = (&scenario.sample, &scenario.spectrum, scenario.path);
        let dp = sample.dispersion();
        let local = &scenario.local;
        let grid = sp.quadrature_grid();
        let layers = sample.layers();
        let mut cross_phases = Vec::new();
        for j in 0..layers.len() {
            for k in j + 1..layers.len() {
                cross_phases.push(CrossPhase {
                    j,
                    k,
                    phase_rad: 2.0 * local.beta0 * (layers[j].depth - layers[k].depth),
                });
            }
        }
        let digest = Sha256::digest(config_text.as_bytes());
        Ok(Self {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
            timestamp_unix_s: timestamp,
            engine_path: path.name().to_string(),
            source: SourceRecord {
                omega0_rad_s: sp.center_frequency(),
                gaussian: sp.is_gaussian(),
                half_width_rad_s: sp.half_width(),
                bandwidth_fw1e_rad_s: sp.half_width().map(|w| 2.0 * w),
                coherence_time_field_fw1e_s: sp.coherence_time_fw_1e_field(),
                coherence_time_intensity_fw1e_s: sp.coherence_time_fw_1e_intensity(),
                applied_scale: sp.applied_scale(),
            },
            dispersion: DispersionRecord {
                omega_r_rad_s: dp.reference_frequency,
                beta_r: dp.beta_r,
                beta1: dp.beta1,
                beta2: dp.beta2,
                beta3: dp.beta3,
                beta4: dp.beta4,
            },
            local_expansion: ExpansionRecord {
                omega_rad_s: local.center,
                beta0_rad_m: local.beta0,
                beta1_s_m: local.beta1,
                beta2_s2_m: local.beta2,
                beta3_s3_m: local.beta3,
                beta4_s4_m: local.beta4,
                group_velocity_m_s: local.group_velocity(),
            },
            layers: layers
                .iter()
                .map(|l| LayerRecord {
                    r_re: l.reflectance.re,
                    r_im: l.reflectance.im,
                    z_m: l.depth,
                })
                .collect(),
            cross_phases,
            delay_axis: DelayRecord {
                x_min_m: config.delay_axis.min_m,
                x_max_m: config.delay_axis.max_m,
                n_points: scenario.delays.len(),
                tau_min_s: scenario.delays.tau_min(),
                tau_max_s: scenario.delays.tau_max(),
                tau_step_s: scenario.delays.step(),
            },
            frequency_grid: GridRecord {
                half_range_rad_s: grid.half_range(),
                n_points: grid.len(),
                step_rad_s: grid.step(),
            },
            normalization: NormalizationRecord {
                gamma0: oct_self_term(sample, sp, path)?,
                lambda0_full: qoct_self_term(sample, sp, Contributions::Full, path)?,
                lambda0_self_only: qoct_self_term(sample, sp, Contributions::SelfOnly, path)?,
            },
            pump_average: traces.pump_average.as_ref().map(|(sweep, t)| PumpRecord {
                n_points: sweep.n_points,
                span_rad_s: sweep.span,
                offsets_rad_s: sweep.offsets(),
                mean_lambda0: t.background,
            }),
            ensemble: traces.ensemble.as_ref().map(|(spec, r)| EnsembleRecord {
                n_trials: spec.n_trials,
                seed: spec.seed,
                rng: "ChaCha8, stream = trial index, phase = 2π·U[0,1)".to_string(),
                mean_lambda0: r.mean.background,
            }),
            wigner: traces.wigner.as_ref().map(|w| WignerRecord {
                omega_half_range_rad_s: w.map.window.half_range(),
                n_omega: w.map.window.len(),
                center_start_rad_s: w.map.centers.center(0),
                center_step_rad_s: w.map.centers.step(),
                n_centers: w.map.centers.len(),
                tau_min_s: w.map.delays.tau_min(),
                tau_step_s: w.map.delays.step(),
                reconstruction_reference_rad_s: w
                    .reconstruction
                    .as_ref()
                    .map(|r| r.transfer.reference_frequency),
                reconstruction_residual: w.reconstruction.as_ref().map(|r| r.residual),
            }),
            files: files.iter().map(|(name, _)| name.clone()).collect(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        text
    }
}
