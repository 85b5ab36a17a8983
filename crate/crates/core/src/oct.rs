//! Classical OCT interferogram.
//!
//! `I(τ) = Γ₀ + 2 Re{Γ(τ) e^{-iω₀τ}}` with
//! `Γ₀ = ∫ dΩ [1 + |H(ω₀+Ω)|²] S(Ω)` and `Γ(τ) = ∫ dΩ H(ω₀+Ω) S(Ω) e^{-iΩτ}`.
//! The proportionality constant is 1; normalized traces divide by Γ₀.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::engine::{self, Path};
use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::spectrum::Spectrum;
use crate::xform::{self, DelayGrid, FreqGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    OctIntensity,
    OctEnvelope,
    QoctCoincidence,
}

impl TraceKind {
    pub fn name(&self) -> &'static str {
        match self {
            TraceKind::OctIntensity => "oct-intensity",
            TraceKind::OctEnvelope => "oct-envelope",
            TraceKind::QoctCoincidence => "qoct-coincidence",
        }
    }
}

/// A real trace on a delay grid plus the self-interference term used to normalize it.
///
/// Normalization always divides by `background` (Γ₀ for OCT, Λ₀ for QOCT).
#[derive(Debug, Clone, PartialEq)]
pub struct Interferogram {
    pub delays: DelayGrid,
    pub kind: TraceKind,
    pub values: Vec<f64>,
    pub background: f64,
}

impl Interferogram {
    pub fn normalized(&self) -> Result<Vec<f64>> {
        if self.background == 0.0 {
            return Err(Error::ZeroBackground);
        }
        Ok(self.values.iter().map(|v| v / self.background).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OctOutput {
    /// Fringe-resolved intensity evaluated directly on the delay grid.
    Intensity,
    /// `|Γ(τ)|`.
    Envelope,
    /// Γ computed on the given (envelope-scale) grid, intensity synthesized on a
    /// grid `factor` times finer by interpolating Γ.
    SynthesizedIntensity { factor: usize },
}

/// Γ(τ) by quadrature on the spectrum's grid.
pub fn oct_cross(
    sample: &Sample,
    spectrum: &Spectrum,
    delays: &DelayGrid,
) -> Result<Vec<Complex64>> {
    oct_cross_on(
        sample,
        spectrum,
        &spectrum.quadrature_grid(),
        &delays.taus(),
    )
}

/// Γ at arbitrary delays by quadrature on an explicit grid.
pub fn oct_cross_on(
    sample: &Sample,
    spectrum: &Spectrum,
    grid: &FreqGrid,
    taus: &[f64],
) -> Result<Vec<Complex64>> {
    engine::check_grid(sample, spectrum, grid)?;
    if sample.is_empty() {
        return Ok(vec![Complex64::new(0.0, 0.0); taus.len()]);
    }
    let h = engine::transfer_on_grid(sample, spectrum.center_frequency(), grid, 1.0);
    let integrand: Vec<Complex64> = h
        .iter()
        .zip(spectrum.density_on(grid))
        .map(|(h, s)| h * s)
        .collect();
    xform::inverse_ft_at(&integrand, grid, taus)
}

/// Γ(τ) from the discrete-layer closed form
/// `Σ_j r_j s_d^{(0j)}(τ - 2z_j/v₀) e^{i2β₀z_j}`.
pub fn oct_cross_closed(
    sample: &Sample,
    spectrum: &Spectrum,
    delays: &DelayGrid,
) -> Result<Vec<Complex64>> {
    oct_cross_closed_at(sample, spectrum, &delays.taus())
}

pub fn oct_cross_closed_at(
    sample: &Sample,
    spectrum: &Spectrum,
    taus: &[f64],
) -> Result<Vec<Complex64>> {
    let local = engine::closed_expansion(sample, spectrum)?;
    Ok(taus
        .iter()
        .map(|&tau| {
            sample
                .layers()
                .iter()
                .map(|l| {
                    l.reflectance
                        * Complex64::from_polar(1.0, 2.0 * local.beta0 * l.depth)
                        * spectrum.fresnel_correlation(
                            local.beta2,
                            l.depth,
                            tau - 2.0 * local.beta1 * l.depth,
                        )
                })
                .sum()
        })
        .collect())
}

/// Γ₀ by the chosen path.
pub fn oct_self_term(sample: &Sample, spectrum: &Spectrum, path: Path) -> Result<f64> {
    Ok(1.0 + sample_power(sample, spectrum, path)?)
}

pub(crate) fn sample_power(sample: &Sample, spectrum: &Spectrum, path: Path) -> Result<f64> {
    match path {
        Path::Quadrature => {
            let grid = spectrum.quadrature_grid();
            engine::check_grid(sample, spectrum, &grid)?;
            Ok(engine::sample_power_quadrature(sample, spectrum, &grid))
        }
        Path::Closed => {
            let local = engine::closed_expansion(sample, spectrum)?;
            Ok(engine::sample_power_closed(sample, spectrum, &local))
        }
    }
}

fn cross_at(
    sample: &Sample,
    spectrum: &Spectrum,
    taus: &[f64],
    path: Path,
) -> Result<Vec<Complex64>> {
    match path {
        Path::Quadrature => oct_cross_on(sample, spectrum, &spectrum.quadrature_grid(), taus),
        Path::Closed => oct_cross_closed_at(sample, spectrum, taus),
    }
}

/// Largest delay step that resolves the `e^{-iω₀τ}` carrier.
pub fn carrier_step_limit(spectrum: &Spectrum) -> f64 {
    PI / (spectrum.center_frequency() + spectrum.quadrature_grid().half_range())
}

pub fn oct_interferogram(
    sample: &Sample,
    spectrum: &Spectrum,
    delays: &DelayGrid,
    output: OctOutput,
    path: Path,
) -> Result<Interferogram> {
    let background = oct_self_term(sample, spectrum, path)?;
    let omega0 = spectrum.center_frequency();
    let limit = carrier_step_limit(spectrum);
    match output {
        OctOutput::Envelope => {
            let gamma = cross_at(sample, spectrum, &delays.taus(), path)?;
            Ok(Interferogram {
                delays: *delays,
                kind: TraceKind::OctEnvelope,
                values: gamma.iter().map(|g| g.norm()).collect(),
                background,
            })
        }
        OctOutput::Intensity => {
            if delays.step() > limit {
                return Err(Error::CarrierUndersampled {
                    step: delays.step(),
                    limit,
                });
            }
            let taus = delays.taus();
            let gamma = cross_at(sample, spectrum, &taus, path)?;
            Ok(Interferogram {
                delays: *delays,
                kind: TraceKind::OctIntensity,
                values: intensity(background, omega0, &taus, &gamma),
                background,
            })
        }
        OctOutput::SynthesizedIntensity { factor } => {
            if factor == 0 {
                return Err(Error::InvalidParameter(
                    "synthesis factor must be >= 1".into(),
                ));
            }
            let fine = DelayGrid::new(
                delays.tau_min(),
                delays.tau_max(),
                (delays.len() - 1) * factor + 1,
            )?;
            if fine.step() > limit {
                return Err(Error::CarrierUndersampled {
                    step: fine.step(),
                    limit,
                });
            }
            let gamma = cross_at(sample, spectrum, &delays.taus(), path)?;
            let fine_gamma = upsample_catmull_rom(&gamma, factor);
            Ok(Interferogram {
                delays: fine,
                kind: TraceKind::OctIntensity,
                values: intensity(background, omega0, &fine.taus(), &fine_gamma),
                background,
            })
        }
    }
}

fn intensity(background: f64, omega0: f64, taus: &[f64], gamma: &[Complex64]) -> Vec<f64> {
    taus.iter()
        .zip(gamma)
        .map(|(&tau, g)| background + 2.0 * (g * Complex64::from_polar(1.0, -omega0 * tau)).re)
        .collect()
}

// Cubic Hermite with Catmull-Rom tangents; end tangents from linear extrapolation.
fn upsample_catmull_rom(points: &[Complex64], factor: usize) -> Vec<Complex64> {
    let n = points.len();
    let at = |i: isize| -> Complex64 {
        if i < 0 {
            points[0] * 2.0 - points[1]
        } else if i as usize >= n {
            points[n - 1] * 2.0 - points[n - 2]
        } else {
            points[i as usize]
        }
    };
    let mut out = Vec::with_capacity((n - 1) * factor + 1);
    for i in 0..n - 1 {
        let (p0, p1, p2, p3) = (
            at(i as isize - 1),
            at(i as isize),
            at(i as isize + 1),
            at(i as isize + 2),
        );
        for s in 0..factor {
            let t = s as f64 / factor as f64;
            let t2 = t * t;
            let t3 = t2 * t;
            out.push(
                (p1 * 2.0
                    + (p2 - p0) * t
                    + (p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3) * t2
                    + (p1 * 3.0 - p0 - p2 * 3.0 + p3) * t3)
                    * 0.5,
            );
        }
    }
    out.push(points[n - 1]);
    out
}
