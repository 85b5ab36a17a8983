//! Wigner map of the sample transfer function and reconstruction of H from it.
//!
//! Under a spectrum much broader than the structure of
//! `K(Ω, ω₀) = H(ω₀+Ω) H*(ω₀-Ω)`, the coincidence cross term becomes
//!
//! ```text
//! Λ(τ, ω₀) ≈ ∫ dΩ K(Ω, ω₀) e^{-iΩτ} / (2R),   |Ω| ≤ R
//! ```
//!
//! i.e. the Wigner distribution of H. The window weights the two endpoints
//! `Ω = ±R` by one half so the map is real, like any Wigner distribution.
//!
//! Reconstruction inverts the τ transform to get K on the map's Ω grid, then
//! reads `H(ω) = K((ω-ω_ref)/2, (ω+ω_ref)/2) / H*(ω_ref)` with `H(ω_ref)`
//! taken real and nonnegative. Grids must line up exactly; nothing is interpolated.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::spectrum::Spectrum;
use crate::xform::{self, DelayGrid, FreqGrid};

/// Uniform grid of twin-photon center frequencies ω₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterGrid {
    start: f64,
    step: f64,
    n_points: usize,
}

impl CenterGrid {
    pub fn new(start: f64, step: f64, n_points: usize) -> Result<Self> {
        if !(start.is_finite() && start > 0.0) {
            return Err(Error::NonPositiveFrequency(start));
        }
        if n_points == 0 || (n_points > 1 && !(step.is_finite() && step > 0.0)) {
            return Err(Error::Sizing(format!(
                "center grid needs n >= 1 and positive step, got n = {n_points}, step = {step}"
            )));
        }
        Ok(Self {
            start,
            step,
            n_points,
        })
    }

    /// `2h + 1` centers spaced like `grid`, centered on `omega`.
    pub fn around(omega: f64, half_count: usize, grid: &FreqGrid) -> Result<Self> {
        Self::new(
            omega - half_count as f64 * grid.step(),
            grid.step(),
            2 * half_count + 1,
        )
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn center(&self, m: usize) -> f64 {
        self.start + m as f64 * self.step
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_points).map(|m| self.center(m)).collect()
    }

    fn index_of(&self, omega: f64) -> Option<usize> {
        let pos = (omega - self.start) / self.step;
        let m = pos.round();
        if m < 0.0 || m >= self.n_points as f64 || (pos - m).abs() > 1e-6 {
            None
        } else {
            Some(m as usize)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerMap {
    pub delays: DelayGrid,
    pub centers: CenterGrid,
    /// The Ω window; `half_range()` is R.
    pub window: FreqGrid,
    /// `values[m][n] = Λ(τ_n, ω₀_m)`.
    pub values: Vec<Vec<Complex64>>,
}

/// Sampled transfer function on a uniform frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedTransfer {
    pub start: f64,
    pub step: f64,
    pub values: Vec<Complex64>,
    /// Frequency where H was fixed real and nonnegative.
    pub reference_frequency: f64,
}

impl TabulatedTransfer {
    pub fn frequency(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.frequency(i)).collect()
    }
}

/// Latest delay the sample's `H_q` puts structure at: `4 z_max · max dβ/dω` over the window.
pub fn delay_extent(sample: &Sample, centers: &CenterGrid, half_range: f64) -> Result<f64> {
    let dp = sample.dispersion();
    let mut slope: f64 = 0.0;
    for m in [0, centers.len() - 1] {
        for w in [
            centers.center(m) - half_range,
            centers.center(m),
            centers.center(m) + half_range,
        ] {
            slope = slope.max(dp.beta_derivative(w)?.abs());
        }
    }
    Ok(4.0 * sample.max_depth() * slope)
}

/// Flat-spectrum map `Λ(τ, ω₀)` over the given delays and centers.
pub fn wigner_map(
    sample: &Sample,
    delays: &DelayGrid,
    centers: &CenterGrid,
    half_range: f64,
    n_omega: usize,
) -> Result<WignerMap> {
    let window = FreqGrid::new(half_range, n_omega)?;
    let lowest = centers.center(0) - half_range;
    if lowest <= 0.0 {
        return Err(Error::NonPositiveFrequency(lowest));
    }
    let required = 4.0 * delay_extent(sample, centers, half_range)?;
    let available = 2.0 * std::f64::consts::PI / window.step();
    if required > available {
        return Err(Error::WignerWindow {
            available,
            required,
        });
    }
    let taus = delays.taus();
    let flat = 1.0 / (2.0 * half_range);
    let dp = sample.dispersion();
    let mut values = Vec::with_capacity(centers.len());
    for w0 in centers.centers() {
        let mut k_vals = kernel(sample, w0, &window);
        k_vals[0] *= 0.5;
        for v in k_vals.iter_mut() {
            *v *= flat;
        }
        let mut row = xform::inverse_ft(&k_vals, &window, delays)?;
        // the +R endpoint, absent from the half-open grid
        let hp = sample.transfer_at_beta(dp.beta_unchecked(w0 + half_range));
        let hm = sample.transfer_at_beta(dp.beta_unchecked(w0 - half_range));
        let edge = hp * hm.conj() * (0.5 * flat * window.step());
        for (v, tau) in row.iter_mut().zip(&taus) {
            *v += edge * Complex64::from_polar(1.0, -half_range * tau);
        }
        values.push(row);
    }
    Ok(WignerMap {
        delays: *delays,
        centers: *centers,
        window,
        values,
    })
}

fn kernel(sample: &Sample, omega0: f64, window: &FreqGrid) -> Vec<Complex64> {
    let dp = sample.dispersion();
    window
        .omegas()
        .map(|w| {
            let hp = sample.transfer_at_beta(dp.beta_unchecked(omega0 + w));
            let hm = sample.transfer_at_beta(dp.beta_unchecked(omega0 - w));
            hp * hm.conj()
        })
        .collect()
}

impl WignerMap {
    /// `K(Ω_k, ω₀_m)` recovered from row `m`. Requires the conjugate delay grid.
    /// Entry `k = 0` mixes both window endpoints and is not a sample of K.
    pub fn kernel_row(&self, m: usize) -> Result<Vec<Complex64>> {
        let f = xform::forward_ft_conjugate(&self.values[m], &self.window, &self.delays)?;
        let scale = 2.0 * self.window.half_range();
        Ok(f.into_iter().map(|v| v * scale).collect())
    }

    /// Row `m` weighted by a real spectrum: `∫ dΩ K(Ω, ω₀_m) S(Ω) e^{-iΩτ}`.
    pub fn spectrally_weighted(
        &self,
        m: usize,
        spectrum: &Spectrum,
        taus: &[f64],
    ) -> Result<Vec<Complex64>> {
        spectrum.check_coverage(&self.window)?;
        let mut k = self.kernel_row(m)?;
        // spectrum is negligible at the window edge; drop the mixed endpoint bin
        k[0] = Complex64::new(0.0, 0.0);
        let weighted: Vec<Complex64> = k
            .iter()
            .zip(self.window.omegas())
            .map(|(v, w)| v * spectrum.density(w))
            .collect();
        xform::inverse_ft_at(&weighted, &self.window, taus)
    }
}

/// Recover H on the grid `ω = 2ω₀_m - ω_ref`, up to one global phase.
///
/// `amplitude_floor` is relative: `K(0, ω_ref)` must be at least this fraction
/// of the largest `|K|` in the map.
pub fn reconstruct_transfer(
    map: &WignerMap,
    omega_ref: f64,
    amplitude_floor: f64,
) -> Result<TabulatedTransfer> {
    let window = &map.window;
    if !map.delays.is_conjugate_to(window) {
        return Err(Error::GridMisaligned(
            "map delays must be the conjugate grid of its Ω window".into(),
        ));
    }
    if ((map.centers.step() - window.step()) / window.step()).abs() > 1e-12 && map.centers.len() > 1
    {
        return Err(Error::GridMisaligned(format!(
            "center spacing {:e} must equal the Ω spacing {:e}",
            map.centers.step(),
            window.step()
        )));
    }
    let m_ref = map.centers.index_of(omega_ref).ok_or_else(|| {
        Error::GridMisaligned(format!(
            "reference frequency {omega_ref:e} is not a map center"
        ))
    })?;
    let n = window.len();
    let half = n / 2;
    let kernels = (0..map.centers.len())
        .map(|m| map.kernel_row(m))
        .collect::<Result<Vec<_>>>()?;
    let peak = kernels
        .iter()
        .flat_map(|row| row[1..].iter())
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    let k_ref = kernels[m_ref][half];
    if peak == 0.0 || k_ref.norm() < amplitude_floor * peak {
        return Err(Error::AmplitudeFloor {
            value: if peak == 0.0 {
                0.0
            } else {
                k_ref.norm() / peak
            },
            floor: amplitude_floor,
        });
    }
    let h_ref = k_ref.re.max(0.0).sqrt();
    // Ω index for center m is m - m_ref + N/2; keep 1..N
    let first = m_ref.saturating_sub(half - 1);
    let last = (m_ref + half - 1).min(map.centers.len() - 1);
    let values = (first..=last)
        .map(|m| kernels[m][m + half - m_ref] / h_ref)
        .collect();
    Ok(TabulatedTransfer {
        start: 2.0 * map.centers.center(first) - omega_ref,
        step: 2.0 * map.centers.step(),
        values,
        reference_frequency: omega_ref,
    })
}

/// `max |rec·e^{iφ} - truth| / max |truth|` with φ the least-squares phase alignment.
pub fn global_phase_residual(reconstructed: &[Complex64], truth: &[Complex64]) -> f64 {
    let overlap: Complex64 = truth
        .iter()
        .zip(reconstructed)
        .map(|(t, r)| t * r.conj())
        .sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let scale = truth.iter().map(|t| t.norm()).fold(0.0, f64::max);
    let worst = reconstructed
        .iter()
        .zip(truth)
        .map(|(r, t)| (r * phase - t).norm())
        .fold(0.0, f64::max);
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}
