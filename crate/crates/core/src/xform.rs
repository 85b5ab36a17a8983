//! Frequency and delay grids, and the inverse Fourier transform shared by the engines.
//!
//! All transforms use the kernel `e^{-iΩτ}`:
//!
//! ```text
//! f(τ) = ∫ dΩ F(Ω) e^{-iΩτ}  ≈  ΔΩ · Σ_k F(Ω_k) e^{-iΩ_k τ}
//! ```
//!
//! Frequency grids are half-open and symmetric, `Ω_k = -R + k·ΔΩ` for
//! `k = 0..N`, so the FFT route and the direct sum agree up to accumulation
//! order when the delay grid is the conjugate grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

pub const MIN_FREQ_POINTS: usize = 64;
pub const MIN_COVERAGE: f64 = 4.0;
pub const DEFAULT_COVERAGE: f64 = 6.0;
pub const DEFAULT_FREQ_POINTS: usize = 4096;

/// Uniform grid of detunings Ω about a center frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqGrid {
    half_range: f64,
    n_points: usize,
}

impl FreqGrid {
    pub fn new(half_range: f64, n_points: usize) -> Result<Self> {
        if !(half_range.is_finite() && half_range > 0.0) {
            return Err(Error::Sizing(format!(
                "half range must be positive and finite, got {half_range}"
            )));
        }
        if n_points < MIN_FREQ_POINTS || !n_points.is_power_of_two() {
            return Err(Error::Sizing(format!(
                "point count must be a power of two >= {MIN_FREQ_POINTS}, got {n_points}"
            )));
        }
        Ok(Self {
            half_range,
            n_points,
        })
    }

    pub fn half_range(&self) -> f64 {
        self.half_range
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_range / self.n_points as f64
    }

    pub fn omega(&self, k: usize) -> f64 {
        -self.half_range + k as f64 * self.step()
    }

    pub fn omegas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |k| self.omega(k))
    }

    /// Nearest sample index, or `None` outside `[-R, R)` (with half a step of slack).
    pub fn nearest_index(&self, omega: f64) -> Option<usize> {
        let pos = ((omega + self.half_range) / self.step()).round();
        if pos < 0.0 || pos >= self.n_points as f64 {
            None
        } else {
            Some(pos as usize)
        }
    }

    /// Delay grid whose spacing is `2π / (N·ΔΩ)` with `N` points starting at `tau_min`.
    pub fn conjugate_delays(&self, tau_min: f64) -> DelayGrid {
        let dt = 2.0 * PI / (self.n_points as f64 * self.step());
        DelayGrid {
            tau_min,
            tau_max: tau_min + (self.n_points - 1) as f64 * dt,
            n_points: self.n_points,
        }
    }
}

/// Build a grid spanning `coverage_factor` spectral widths on each side of the center.
pub fn make_freq_grid(
    spectral_width: f64,
    coverage_factor: f64,
    n_points: usize,
) -> Result<FreqGrid> {
    if !(spectral_width.is_finite() && spectral_width > 0.0) {
        return Err(Error::Sizing(format!(
            "spectral width must be positive, got {spectral_width}"
        )));
    }
    if !(coverage_factor >= MIN_COVERAGE) {
        return Err(Error::Sizing(format!(
            "coverage factor must be >= {MIN_COVERAGE}, got {coverage_factor}"
        )));
    }
    FreqGrid::new(coverage_factor * spectral_width, n_points)
}

/// Uniform grid of delays τ (seconds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayGrid {
    tau_min: f64,
    tau_max: f64,
    n_points: usize,
}

impl DelayGrid {
    pub fn new(tau_min: f64, tau_max: f64, n_points: usize) -> Result<Self> {
        if !(tau_min.is_finite() && tau_max.is_finite() && tau_min < tau_max) {
            return Err(Error::Sizing(format!(
                "delay range must satisfy min < max, got [{tau_min:e}, {tau_max:e}]"
            )));
        }
        if n_points < 2 {
            return Err(Error::Sizing(format!(
                "delay grid needs at least 2 points, got {n_points}"
            )));
        }
        Ok(Self {
            tau_min,
            tau_max,
            n_points,
        })
    }

    /// Grid of `n_points` delays centered on `center` with the given spacing.
    pub fn centered(center: f64, step: f64, n_points: usize) -> Result<Self> {
        let half = 0.5 * step * (n_points.max(1) - 1) as f64;
        Self::new(center - half, center + half, n_points)
    }

    pub fn tau_min(&self) -> f64 {
        self.tau_min
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.tau_max - self.tau_min) / (self.n_points - 1) as f64
    }

    pub fn tau(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.tau_max
        } else {
            self.tau_min + i as f64 * self.step()
        }
    }

    pub fn taus(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.tau(i)).collect()
    }

    /// Nyquist adequacy for baseband (envelope) traces on the given frequency grid.
    pub fn resolves_envelope(&self, grid: &FreqGrid) -> bool {
        self.step() <= PI / grid.half_range()
    }

    /// True when this grid is the FFT-conjugate of `grid`.
    pub fn is_conjugate_to(&self, grid: &FreqGrid) -> bool {
        if self.n_points != grid.len() {
            return false;
        }
        let expected = 2.0 * PI / (grid.len() as f64 * grid.step());
        ((self.step() - expected) / expected).abs() < 1e-12
    }
}

/// Evaluate `ΔΩ Σ_k F(Ω_k) e^{-iΩ_k τ}` on a delay grid.
///
/// Uses an FFT when the delay grid is conjugate to the frequency grid and a
/// direct sum otherwise.
pub fn inverse_ft(
    values: &[Complex64],
    grid: &FreqGrid,
    delays: &DelayGrid,
) -> Result<Vec<Complex64>> {
    check_len(values, grid)?;
    if delays.is_conjugate_to(grid) {
        Ok(fft_conjugate(values, grid, delays.tau_min()))
    } else {
        Ok(direct_sum(values, grid, &delays.taus()))
    }
}

/// Direct-sum route at arbitrary delays.
pub fn inverse_ft_at(
    values: &[Complex64],
    grid: &FreqGrid,
    taus: &[f64],
) -> Result<Vec<Complex64>> {
    check_len(values, grid)?;
    Ok(direct_sum(values, grid, taus))
}

/// FFT route; the delay grid must be conjugate to `grid`.
pub fn inverse_ft_fft(
    values: &[Complex64],
    grid: &FreqGrid,
    delays: &DelayGrid,
) -> Result<Vec<Complex64>> {
    check_len(values, grid)?;
    if !delays.is_conjugate_to(grid) {
        return Err(Error::GridMisaligned(
            "FFT route requires the conjugate delay grid".into(),
        ));
    }
    Ok(fft_conjugate(values, grid, delays.tau_min()))
}

/// Exact inverse of [`inverse_ft`] on a conjugate pair: recovers `F(Ω_k)` from `f(τ_n)`.
pub fn forward_ft_conjugate(
    samples: &[Complex64],
    grid: &FreqGrid,
    delays: &DelayGrid,
) -> Result<Vec<Complex64>> {
    if samples.len() != delays.len() {
        return Err(Error::LengthMismatch {
            expected: delays.len(),
            actual: samples.len(),
        });
    }
    if !delays.is_conjugate_to(grid) {
        return Err(Error::GridMisaligned(
            "forward transform requires the conjugate delay grid".into(),
        ));
    }
    // F_k = 1/(NΔΩ) Σ_n f_n e^{iΩ_k τ_n}
    let n = grid.len();
    let r = grid.half_range();
    let t0 = delays.tau_min();
    let mut buf: Vec<Complex64> = samples
        .iter()
        .enumerate()
        .map(|(i, f)| f * sign(i))
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / (n as f64 * grid.step());
    let lead = Complex64::from_polar(scale, -r * t0);
    Ok(buf
        .into_iter()
        .enumerate()
        .map(|(k, v)| v * lead * Complex64::from_polar(1.0, k as f64 * grid.step() * t0))
        .collect())
}

fn check_len(values: &[Complex64], grid: &FreqGrid) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: values.len(),
        });
    }
    Ok(())
}

fn sign(i: usize) -> f64 {
    if i.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn direct_sum(values: &[Complex64], grid: &FreqGrid, taus: &[f64]) -> Vec<Complex64> {
    let step = grid.step();
    let omegas: Vec<f64> = grid.omegas().collect();
    taus.par_iter()
        .map(|&tau| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (f, &w) in values.iter().zip(&omegas) {
                if f.re != 0.0 || f.im != 0.0 {
                    let (s, c) = (w * tau).sin_cos();
                    acc += f * Complex64::new(c, -s);
                }
            }
            acc * step
        })
        .collect()
}

// Ω_k τ_n = -Rτ_0 - nπ + kΔΩτ_0 + 2πkn/N, since RΔτ = π and ΔΩΔτ = 2π/N.
fn fft_conjugate(values: &[Complex64], grid: &FreqGrid, tau_min: f64) -> Vec<Complex64> {
    let n = grid.len();
    let step = grid.step();
    let mut buf: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(k, f)| f * Complex64::from_polar(1.0, -(k as f64) * step * tau_min))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let lead = Complex64::from_polar(step, grid.half_range() * tau_min);
    buf.into_iter()
        .enumerate()
        .map(|(i, v)| v * lead * sign(i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: &FreqGrid, width: f64) -> Vec<Complex64> {
        let norm = 1.0 / (width * PI.sqrt());
        grid.omegas()
            .map(|w| Complex64::new(norm * (-(w / width).powi(2)).exp(), 0.0))
            .collect()
    }

    #[test]
    fn grid_sizing_examples() {
        let g = make_freq_grid(2.215e14, 6.0, 4096).unwrap();
        assert!((g.half_range() - 1.329e15).abs() < 1e3);
        let expected_step = 2.0 * 6.0 * 2.215e14 / 4096.0;
        assert!((g.step() - expected_step).abs() / expected_step < 1e-15);
        assert!((g.step() - 6.49e11).abs() < 0.01e11);

        let g = make_freq_grid(1.0, 4.0, 64).unwrap();
        assert_eq!(g.half_range(), 4.0);
        assert_eq!(g.step(), 0.125);

        assert!(matches!(
            make_freq_grid(1.0, 4.0, 100),
            Err(Error::Sizing(_))
        ));
        assert!(matches!(
            make_freq_grid(0.0, 4.0, 64),
            Err(Error::Sizing(_))
        ));
        assert!(matches!(
            make_freq_grid(-1.0, 4.0, 64),
            Err(Error::Sizing(_))
        ));
        assert!(matches!(
            make_freq_grid(1.0, 3.9, 64),
            Err(Error::Sizing(_))
        ));
        assert!(matches!(
            make_freq_grid(1.0, 4.0, 32),
            Err(Error::Sizing(_))
        ));
    }

    #[test]
    fn grid_is_symmetric_half_open() {
        let g = make_freq_grid(1.0, 4.0, 64).unwrap();
        assert_eq!(g.omega(0), -4.0);
        assert_eq!(g.omega(32), 0.0);
        for k in 1..64 {
            assert_eq!(g.omega(k), -g.omega(64 - k));
        }
        assert_eq!(g.nearest_index(0.0), Some(32));
        assert_eq!(g.nearest_index(4.0), None);
    }

    #[test]
    fn delay_grid_validation() {
        assert!(DelayGrid::new(1.0, 1.0, 10).is_err());
        assert!(DelayGrid::new(0.0, 1.0, 1).is_err());
        let d = DelayGrid::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(d.step(), 0.5);
        assert_eq!(d.taus(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let c = DelayGrid::centered(3.0, 0.25, 5).unwrap();
        assert_eq!(c.tau(2), 3.0);
    }

    #[test]
    fn zero_input_gives_zero() {
        let g = make_freq_grid(1.0, 6.0, 256).unwrap();
        let d = DelayGrid::new(-5.0, 5.0, 41).unwrap();
        let out = inverse_ft(&vec![Complex64::new(0.0, 0.0); 256], &g, &d).unwrap();
        assert!(out.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn length_mismatch_rejected() {
        let g = make_freq_grid(1.0, 6.0, 256).unwrap();
        let d = DelayGrid::new(-5.0, 5.0, 41).unwrap();
        let err = inverse_ft(&vec![Complex64::new(1.0, 0.0); 255], &g, &d).unwrap_err();
        assert_eq!(
            err,
            Error::LengthMismatch {
                expected: 256,
                actual: 255
            }
        );
    }

    #[test]
    fn gaussian_matches_closed_form() {
        let width = 2.215e14;
        let g = make_freq_grid(width, DEFAULT_COVERAGE, DEFAULT_FREQ_POINTS).unwrap();
        let d = DelayGrid::new(-10.0 / width, 10.0 / width, 201).unwrap();
        let out = inverse_ft(&gaussian(&g, width), &g, &d).unwrap();
        for (tau, v) in d.taus().iter().zip(&out) {
            let expected = (-(width * tau).powi(2) / 4.0).exp();
            assert!(
                (v - expected).norm() < 1e-12,
                "tau {tau}: {v} vs {expected}"
            );
        }
    }

    #[test]
    fn shift_theorem() {
        let width = 1.0;
        let t0 = 2.5;
        let g = make_freq_grid(width, 6.0, 1024).unwrap();
        let shifted: Vec<Complex64> = gaussian(&g, width)
            .iter()
            .zip(g.omegas())
            .map(|(f, w)| f * Complex64::from_polar(1.0, w * t0))
            .collect();
        let d = DelayGrid::new(-8.0, 12.0, 161).unwrap();
        let out = inverse_ft(&shifted, &g, &d).unwrap();
        for (tau, v) in d.taus().iter().zip(&out) {
            let expected = (-(width * (tau - t0)).powi(2) / 4.0).exp();
            assert!((v - expected).norm() < 1e-12);
        }
        let peak = out
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap()
            .0;
        assert_eq!(d.tau(peak), t0);
    }

    #[test]
    fn fft_route_matches_direct_sum() {
        let g = make_freq_grid(1.0, 6.0, 512).unwrap();
        let values: Vec<Complex64> = gaussian(&g, 1.0)
            .iter()
            .zip(g.omegas())
            .map(|(f, w)| f * Complex64::from_polar(1.0, 0.7 * w + 0.1 * w * w))
            .collect();
        let d = g.conjugate_delays(-13.3);
        assert!(d.is_conjugate_to(&g));
        let fast = inverse_ft_fft(&values, &g, &d).unwrap();
        let slow = inverse_ft_at(&values, &g, &d.taus()).unwrap();
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
        let back = forward_ft_conjugate(&fast, &g, &d).unwrap();
        for (a, b) in back.iter().zip(&values) {
            assert!((a - b).norm() < 1e-12 * values.iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
    }

    #[test]
    fn riemann_sum_converges() {
        let width = 1.0;
        let taus: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.5).collect();
        for n in [1024usize, 2048] {
            let g1 = FreqGrid::new(6.0, n).unwrap();
            let g2 = FreqGrid::new(6.0, 2 * n).unwrap();
            let a = inverse_ft_at(&gaussian(&g1, width), &g1, &taus).unwrap();
            let b = inverse_ft_at(&gaussian(&g2, width), &g2, &taus).unwrap();
            let peak = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() / peak < 1e-8);
            }
        }
    }

    #[test]
    fn envelope_nyquist_flag() {
        let g = FreqGrid::new(PI, 64).unwrap();
        assert!(DelayGrid::new(0.0, 1.0, 2).unwrap().resolves_envelope(&g));
        assert!(!DelayGrid::new(0.0, 1.01, 2).unwrap().resolves_envelope(&g));
    }
}
