//! Pieces shared by the OCT and QOCT engines.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sample::{LocalExpansion, Sample};
use crate::spectrum::Spectrum;
use crate::xform::FreqGrid;

/// How an engine evaluates its frequency integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Path {
    /// Step-weighted sum over the spectrum's quadrature grid; any spectrum, any profile.
    Quadrature,
    /// Gaussian closed forms; Gaussian spectrum and second-order dispersion only.
    Closed,
}

impl Path {
    /// Closed form when it applies, quadrature otherwise.
    pub fn preferred(sample: &Sample, spectrum: &Spectrum) -> Path {
        if spectrum.is_gaussian() && sample.dispersion().is_second_order() {
            Path::Closed
        } else {
            Path::Quadrature
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Path::Quadrature => "quadrature",
            Path::Closed => "closed",
        }
    }
}

pub(crate) fn check_grid(sample: &Sample, spectrum: &Spectrum, grid: &FreqGrid) -> Result<()> {
    spectrum.check_coverage(grid)?;
    let lowest = spectrum.center_frequency() - grid.half_range();
    if lowest <= 0.0 && !sample.is_empty() {
        return Err(Error::NonPositiveFrequency(lowest));
    }
    Ok(())
}

/// `H(ω₀ + sign·Ω_k)` for every grid sample.
pub(crate) fn transfer_on_grid(
    sample: &Sample,
    omega0: f64,
    grid: &FreqGrid,
    sign: f64,
) -> Vec<Complex64> {
    let dp = sample.dispersion();
    grid.omegas()
        .map(|w| sample.transfer_at_beta(dp.beta_unchecked(omega0 + sign * w)))
        .collect()
}

pub(crate) fn closed_expansion(sample: &Sample, spectrum: &Spectrum) -> Result<LocalExpansion> {
    if !spectrum.is_gaussian() {
        return Err(Error::ClosedFormUnavailable(
            "closed form requires a Gaussian spectrum",
        ));
    }
    if !sample.dispersion().is_second_order() {
        return Err(Error::ClosedFormUnavailable(
            "closed form covers second-order dispersion only (β''' = β'''' = 0)",
        ));
    }
    sample.dispersion().expand_at(spectrum.center_frequency())
}

/// `∫ dΩ |H(ω₀+Ω)|² S(Ω)` by quadrature.
pub(crate) fn sample_power_quadrature(
    sample: &Sample,
    spectrum: &Spectrum,
    grid: &FreqGrid,
) -> f64 {
    let h = transfer_on_grid(sample, spectrum.center_frequency(), grid, 1.0);
    h.iter()
        .zip(spectrum.density_on(grid))
        .map(|(h, s)| h.norm_sqr() * s)
        .sum::<f64>()
        * grid.step()
}

/// Closed form of `∫ dΩ |H(ω₀+Ω)|² S(Ω)`:
/// `Σ_jk r_j r_k* e^{i2β₀Δ} s_d(Δ)(-2β'Δ)` with `Δ = z_j - z_k`.
pub(crate) fn sample_power_closed(
    sample: &Sample,
    spectrum: &Spectrum,
    local: &LocalExpansion,
) -> f64 {
    let layers = sample.layers();
    let mut total = Complex64::new(0.0, 0.0);
    for lj in layers {
        for lk in layers {
            let dz = lj.depth - lk.depth;
            let term = if dz == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, 2.0 * local.beta0 * dz)
                    * spectrum.fresnel_correlation(local.beta2, dz, -2.0 * local.beta1 * dz)
            };
            total += lj.reflectance * lk.reflectance.conj() * term;
        }
    }
    total.re
}
