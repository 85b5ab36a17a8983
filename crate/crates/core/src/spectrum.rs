//! Source power spectral density S(Ω) and its correlation functions.
//!
//! S is unit-normalized (`∫ dΩ S(Ω) = 1`) and symmetric about the center
//! frequency. Gaussian sources have closed forms for both the correlation
//! `s(τ) = ∫ dΩ S e^{-iΩτ}` and the dispersed correlation
//! `s_d(τ) = ∫ dΩ S e^{iβ''Ω²Δz} e^{-iΩτ}`; tabulated sources go through
//! quadrature on their own grid.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::xform::{self, FreqGrid, DEFAULT_COVERAGE, DEFAULT_FREQ_POINTS, MIN_COVERAGE};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

const SYMMETRY_TOL: f64 = 1e-12;
// exp(-144) is far below every tolerance in the crate
const GAUSSIAN_CUTOFF: f64 = 12.0;

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumShape {
    /// `S(Ω) = exp(-Ω²/ΔΩ²) / (ΔΩ√π)`, with `half_width` = ΔΩ (1/e half width).
    Gaussian { half_width: f64 },
    /// Samples on a frequency grid, renormalized to unit area at construction.
    Tabulated {
        grid: FreqGrid,
        density: Vec<f64>,
        applied_scale: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    center_frequency: f64,
    shape: SpectrumShape,
}

impl Spectrum {
    pub fn gaussian(center_frequency: f64, half_width: f64) -> Result<Self> {
        check_center(center_frequency)?;
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidSpectrum(format!(
                "Gaussian half width must be positive, got {half_width}"
            )));
        }
        Ok(Self {
            center_frequency,
            shape: SpectrumShape::Gaussian { half_width },
        })
    }

    /// Gaussian source from a center wavelength and a full 1/e bandwidth, both in meters.
    ///
    /// The bandwidth is converted to first order, `ΔΩ_full = 2πcΔλ/λ₀²`.
    pub fn gaussian_from_wavelength(center_wavelength: f64, bandwidth_fw_1e: f64) -> Result<Self> {
        if !(center_wavelength.is_finite() && center_wavelength > 0.0) {
            return Err(Error::InvalidSpectrum(format!(
                "center wavelength must be positive, got {center_wavelength}"
            )));
        }
        if !(bandwidth_fw_1e > 0.0 && bandwidth_fw_1e < center_wavelength) {
            return Err(Error::InvalidSpectrum(format!(
                "bandwidth must lie in (0, λ₀), got {bandwidth_fw_1e}"
            )));
        }
        let omega0 = 2.0 * PI * SPEED_OF_LIGHT / center_wavelength;
        let full = 2.0 * PI * SPEED_OF_LIGHT * bandwidth_fw_1e / center_wavelength.powi(2);
        Self::gaussian(omega0, 0.5 * full)
    }

    /// Tabulated density on `grid`. Rejects negative or asymmetric input and
    /// rescales to unit area.
    pub fn tabulated(center_frequency: f64, grid: FreqGrid, density: Vec<f64>) -> Result<Self> {
        check_center(center_frequency)?;
        if density.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: density.len(),
            });
        }
        if let Some(v) = density.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidSpectrum(format!(
                "density must be finite and nonnegative, found {v}"
            )));
        }
        let peak = density.iter().cloned().fold(0.0, f64::max);
        if peak == 0.0 {
            return Err(Error::InvalidSpectrum("density is identically zero".into()));
        }
        let n = density.len();
        // Ω_0 = -R has no partner on the half-open grid; its mirror is treated as 0.
        let mut worst = density[0];
        for k in 1..n {
            worst = worst.max((density[k] - density[n - k]).abs());
        }
        if worst > SYMMETRY_TOL * peak {
            return Err(Error::InvalidSpectrum(format!(
                "density is asymmetric (max mismatch {:.3e} of peak)",
                worst / peak
            )));
        }
        let area: f64 = density.iter().sum::<f64>() * grid.step();
        let applied_scale = 1.0 / area;
        let density = density.into_iter().map(|v| v * applied_scale).collect();
        Ok(Self {
            center_frequency,
            shape: SpectrumShape::Tabulated {
                grid,
                density,
                applied_scale,
            },
        })
    }

    /// Parse a two-column table (`Ω_offset_rad_per_s density`), separated by
    /// whitespace or commas. `#` starts a comment. The offsets must form a
    /// half-open symmetric power-of-two grid.
    pub fn parse_table(center_frequency: f64, text: &str) -> Result<Self> {
        let mut omegas = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::InvalidSpectrum(format!(
                    "line {}: expected 2 columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::InvalidSpectrum(format!("line {}: {s:?}: {e}", lineno + 1)))
            };
            omegas.push(parse(cols[0])?);
            values.push(parse(cols[1])?);
        }
        let n = omegas.len();
        if n < 2 {
            return Err(Error::InvalidSpectrum("table has fewer than 2 rows".into()));
        }
        let half_range = -omegas[0];
        let grid = FreqGrid::new(half_range, n)?;
        let step = grid.step();
        for (k, w) in omegas.iter().enumerate() {
            if (w - grid.omega(k)).abs() > 1e-9 * step {
                return Err(Error::InvalidSpectrum(format!(
                    "row {}: offset {w:e} is off the uniform symmetric grid (expected {:e})",
                    k + 1,
                    grid.omega(k)
                )));
            }
        }
        Self::tabulated(center_frequency, grid, values)
    }

    pub fn from_table_file(center_frequency: f64, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidSpectrum(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_table(center_frequency, &text)
    }

    pub fn center_frequency(&self) -> f64 {
        self.center_frequency
    }

    pub fn shape(&self) -> &SpectrumShape {
        &self.shape
    }

    /// Same shape about a different center frequency.
    pub fn with_center(&self, center_frequency: f64) -> Result<Self> {
        check_center(center_frequency)?;
        Ok(Self {
            center_frequency,
            shape: self.shape.clone(),
        })
    }

    /// ΔΩ for Gaussian sources.
    pub fn half_width(&self) -> Option<f64> {
        match self.shape {
            SpectrumShape::Gaussian { half_width } => Some(half_width),
            SpectrumShape::Tabulated { .. } => None,
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.shape, SpectrumShape::Gaussian { .. })
    }

    /// Scale applied to tabulated input to reach unit area (1 for Gaussians).
    pub fn applied_scale(&self) -> f64 {
        match self.shape {
            SpectrumShape::Gaussian { .. } => 1.0,
            SpectrumShape::Tabulated { applied_scale, .. } => applied_scale,
        }
    }

    /// S(Ω). Tabulated shapes use nearest-sample lookup and vanish off-grid.
    pub fn density(&self, omega: f64) -> f64 {
        match &self.shape {
            SpectrumShape::Gaussian { half_width } => {
                let u = omega / half_width;
                if u.abs() > GAUSSIAN_CUTOFF {
                    0.0
                } else {
                    (-u * u).exp() / (half_width * PI.sqrt())
                }
            }
            SpectrumShape::Tabulated { grid, density, .. } => {
                grid.nearest_index(omega).map_or(0.0, |k| density[k])
            }
        }
    }

    /// The grid the quadrature engines integrate over: the default coverage for
    /// Gaussians, the owning grid for tabulated spectra.
    pub fn quadrature_grid(&self) -> FreqGrid {
        match &self.shape {
            SpectrumShape::Gaussian { half_width } => {
                xform::make_freq_grid(*half_width, DEFAULT_COVERAGE, DEFAULT_FREQ_POINTS)
                    .expect("default grid parameters are valid")
            }
            SpectrumShape::Tabulated { grid, .. } => *grid,
        }
    }

    /// Reject grids that do not cover the spectral support.
    pub fn check_coverage(&self, grid: &FreqGrid) -> Result<()> {
        match &self.shape {
            SpectrumShape::Gaussian { half_width } => {
                let required = MIN_COVERAGE * half_width;
                if grid.half_range() < required * (1.0 - 1e-12) {
                    return Err(Error::Coverage {
                        half_range: grid.half_range(),
                        required,
                    });
                }
            }
            SpectrumShape::Tabulated { grid: own, .. } => {
                if own != grid {
                    return Err(Error::Coverage {
                        half_range: grid.half_range(),
                        required: own.half_range(),
                    });
                }
            }
        }
        Ok(())
    }

    /// S sampled on `grid`.
    pub fn density_on(&self, grid: &FreqGrid) -> Vec<f64> {
        match &self.shape {
            SpectrumShape::Tabulated {
                grid: own, density, ..
            } if own == grid => density.clone(),
            _ => grid.omegas().map(|w| self.density(w)).collect(),
        }
    }

    /// s(τ). Closed form for Gaussians, quadrature otherwise.
    pub fn correlation(&self, tau: f64) -> Complex64 {
        self.fresnel_correlation(0.0, 0.0, tau)
    }

    /// `s_d(τ) = ∫ dΩ S(Ω) e^{iβ''Ω²Δz} e^{-iΩτ}`.
    ///
    /// `dz` is the separation `z_j - z_k` between the two reflections; the
    /// quadratic phase is the one carried by `e^{i2β(ω)z}` for a second-order β.
    pub fn fresnel_correlation(&self, beta2: f64, dz: f64, tau: f64) -> Complex64 {
        match &self.shape {
            SpectrumShape::Gaussian { half_width } => {
                gaussian_fresnel(*half_width, beta2 * dz, tau)
            }
            SpectrumShape::Tabulated { grid, .. } => {
                self.fresnel_correlation_on(grid, beta2, dz, &[tau])[0]
            }
        }
    }

    /// Quadrature route for `s_d` at several delays on an explicit grid.
    pub fn fresnel_correlation_on(
        &self,
        grid: &FreqGrid,
        beta2: f64,
        dz: f64,
        taus: &[f64],
    ) -> Vec<Complex64> {
        let chirp = beta2 * dz;
        let values: Vec<Complex64> = grid
            .omegas()
            .zip(self.density_on(grid))
            .map(|(w, s)| Complex64::from_polar(s, chirp * w * w))
            .collect();
        xform::inverse_ft_at(&values, grid, taus).expect("length matches grid")
    }

    /// Quadrature route for `s` at several delays on an explicit grid.
    pub fn correlation_on(&self, grid: &FreqGrid, taus: &[f64]) -> Vec<Complex64> {
        self.fresnel_correlation_on(grid, 0.0, 0.0, taus)
    }

    /// Full width at 1/e of `|s(τ)|` (Gaussian only): `4/ΔΩ`.
    pub fn coherence_time_fw_1e_field(&self) -> Option<f64> {
        self.half_width().map(|w| 4.0 / w)
    }

    /// Full width at 1/e of `|s(τ)|²` (Gaussian only): `2√2/ΔΩ`.
    pub fn coherence_time_fw_1e_intensity(&self) -> Option<f64> {
        self.half_width().map(|w| 2.0 * 2f64.sqrt() / w)
    }
}

fn check_center(center_frequency: f64) -> Result<()> {
    if !(center_frequency.is_finite() && center_frequency > 0.0) {
        return Err(Error::InvalidSpectrum(format!(
            "center frequency must be positive, got {center_frequency}"
        )));
    }
    Ok(())
}

// ∫ dΩ e^{-Ω²/ΔΩ²}/(ΔΩ√π) e^{iaΩ²} e^{-iΩτ}: with A = 1/ΔΩ² - ia the
// Gaussian integral gives exp(-τ²/4A) / (ΔΩ√A), principal root (Re A > 0).
fn gaussian_fresnel(half_width: f64, chirp: f64, tau: f64) -> Complex64 {
    if chirp == 0.0 {
        let u = half_width * tau;
        return Complex64::new((-u * u / 4.0).exp(), 0.0);
    }
    // work in units of ΔΩ: A·ΔΩ² = 1 - i·chirp·ΔΩ²
    let a = Complex64::new(1.0, -chirp * half_width * half_width);
    let u = half_width * tau;
    (-(u * u) / (4.0 * a)).exp() / a.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3_source() -> Spectrum {
        Spectrum::gaussian_from_wavelength(812e-9, 155e-9).unwrap()
    }

    #[test]
    fn wavelength_conversion() {
        let sp = fig3_source();
        // 2πc/812 nm
        assert!((sp.center_frequency() - 2.319_768e15).abs() / 2.32e15 < 1e-6);
        let full = 2.0 * sp.half_width().unwrap();
        assert!((full - 4.429e14).abs() / 4.429e14 < 5e-4);

        let sp = Spectrum::gaussian_from_wavelength(1000e-9, 100e-9).unwrap();
        let full = 2.0 * sp.half_width().unwrap();
        assert!((full - 1.884e14).abs() / 1.884e14 < 5e-4);

        assert!(Spectrum::gaussian_from_wavelength(812e-9, 0.0).is_err());
        assert!(Spectrum::gaussian_from_wavelength(812e-9, -1e-9).is_err());
        assert!(Spectrum::gaussian_from_wavelength(812e-9, 900e-9).is_err());
    }

    #[test]
    fn gaussian_density_values() {
        let sp = Spectrum::gaussian(1e15, 2.0).unwrap();
        let peak = 1.0 / (2.0 * PI.sqrt());
        assert_eq!(sp.density(0.0), peak);
        assert!((sp.density(2.0) - (-1f64).exp() * peak).abs() < 1e-16);
        assert!(sp.density(40.0) < 1e-170);
        assert!(sp.density(-3.0) >= 0.0);
    }

    #[test]
    fn correlation_values() {
        let sp = Spectrum::gaussian(2.3e15, 2.215e14).unwrap();
        assert_eq!(sp.correlation(0.0), Complex64::new(1.0, 0.0));
        let tau = 2.0 / 2.215e14;
        assert!((sp.correlation(tau).re - (-1f64).exp()).abs() < 1e-15);
        let grid = sp.quadrature_grid();
        let q = sp.correlation_on(&grid, &[tau])[0];
        assert!((q - sp.correlation(tau)).norm() < 1e-8);
    }

    #[test]
    fn fresnel_reduces_to_correlation() {
        let sp = fig3_source();
        for tau in [-3e-14, 0.0, 1e-14] {
            assert_eq!(
                sp.fresnel_correlation(1.8e-25, 0.0, tau),
                sp.correlation(tau)
            );
            assert_eq!(sp.fresnel_correlation(0.0, 1e-5, tau), sp.correlation(tau));
        }
    }

    #[test]
    fn fresnel_closed_form_matches_quadrature() {
        let sp = fig3_source();
        let grid = sp.quadrature_grid();
        let w = sp.half_width().unwrap();
        let taus: Vec<f64> = (-50..=50).map(|i| i as f64 * 0.2 / w).collect();
        for dz in [1e-5, -1e-5, 1e-4, 1e-3] {
            let q = sp.fresnel_correlation_on(&grid, 1.8e-25, dz, &taus);
            for (tau, qv) in taus.iter().zip(&q) {
                let c = sp.fresnel_correlation(1.8e-25, dz, *tau);
                assert!((c - qv).norm() < 1e-8, "dz {dz} tau {tau}: {c} vs {qv}");
            }
        }
        assert!(sp.fresnel_correlation(1.8e-25, 1e-5, 0.0).norm() < 1.0);
    }

    #[test]
    fn tabulated_roundtrip_and_rejections() {
        let grid = FreqGrid::new(8.0, 64).unwrap();
        let raw: Vec<f64> = grid.omegas().map(|w| 3.0 * (-w * w).exp()).collect();
        let sp = Spectrum::tabulated(1e15, grid, raw.clone()).unwrap();
        let area: f64 = sp.density_on(&grid).iter().sum::<f64>() * grid.step();
        assert!((area - 1.0).abs() < 1e-12);
        assert!((sp.applied_scale() - 1.0 / (3.0 * PI.sqrt())).abs() < 1e-9);
        assert!((sp.correlation(0.0) - 1.0).norm() < 1e-12);
        // nearest-sample lookup
        assert_eq!(sp.density(0.05), sp.density(0.0));
        assert_eq!(sp.density(10.0), 0.0);

        let mut neg = raw.clone();
        neg[10] = -1e-3;
        assert!(Spectrum::tabulated(1e15, grid, neg).is_err());
        let mut skew = raw.clone();
        skew[20] *= 1.01;
        assert!(Spectrum::tabulated(1e15, grid, skew).is_err());
        assert!(Spectrum::tabulated(1e15, grid, raw[..63].to_vec()).is_err());
    }

    #[test]
    fn parse_table_text() {
        let grid = FreqGrid::new(8.0, 64).unwrap();
        let mut text = String::from("# omega density\n");
        for w in grid.omegas() {
            text.push_str(&format!("{w:e}, {:e}\n", (-w * w).exp()));
        }
        let sp = Spectrum::parse_table(2e15, &text).unwrap();
        assert!(!sp.is_gaussian());
        assert!((sp.correlation(0.0).re - 1.0).abs() < 1e-12);

        assert!(Spectrum::parse_table(2e15, "1 2 3\n").is_err());
        assert!(Spectrum::parse_table(2e15, "-1 x\n1 2\n").is_err());
    }

    #[test]
    fn coherence_time_conventions() {
        let sp = fig3_source();
        let field = sp.coherence_time_fw_1e_field().unwrap();
        let intensity = sp.coherence_time_fw_1e_intensity().unwrap();
        assert!((field - 18.06e-15).abs() < 0.05e-15);
        assert!((intensity - 12.77e-15).abs() < 0.05e-15);
    }

    #[test]
    fn coverage_check() {
        let sp = Spectrum::gaussian(1e15, 1.0).unwrap();
        assert!(sp.check_coverage(&FreqGrid::new(4.0, 64).unwrap()).is_ok());
        assert!(matches!(
            sp.check_coverage(&FreqGrid::new(3.0, 64).unwrap()),
            Err(Error::Coverage { .. })
        ));
    }
}
