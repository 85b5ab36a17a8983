//! Quantum OCT coincidence interferogram.
//!
//! `C(τ) = Λ₀ - Re{Λ(2τ)}` with `Λ₀ = ∫ dΩ |H(ω₀+Ω)|² S(Ω)` and
//! `Λ(τ) = ∫ dΩ H(ω₀+Ω) H*(ω₀-Ω) S(Ω) e^{-iΩτ}`. Only the odd part of
//! `β(ω₀+Ω) - β(ω₀-Ω)` survives in the self terms, so even-order dispersion
//! drops out of every single-layer dip.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{self, Path};
use crate::error::{Error, Result};
use crate::oct::{Interferogram, TraceKind};
use crate::sample::Sample;
use crate::spectrum::Spectrum;
use crate::xform::{self, DelayGrid, FreqGrid};

/// Largest pump sweep, as a fraction of ω₀.
pub const MAX_RELATIVE_SPAN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contributions {
    /// Self terms and inter-layer cross terms.
    Full,
    /// Only the `j = k` terms: each layer on its own, free of even-order dispersion.
    SelfOnly,
}

/// Λ(τ) by quadrature on the spectrum's grid.
pub fn qoct_cross(
    sample: &Sample,
    spectrum: &Spectrum,
    delays: &DelayGrid,
) -> Result<Vec<Complex64>> {
    qoct_cross_on(
        sample,
        spectrum,
        &spectrum.quadrature_grid(),
        &delays.taus(),
        Contributions::Full,
    )
}

pub fn qoct_cross_on(
    sample: &Sample,
    spectrum: &Spectrum,
    grid: &FreqGrid,
    taus: &[f64],
    contributions: Contributions,
) -> Result<Vec<Complex64>> {
    engine::check_grid(sample, spectrum, grid)?;
    if sample.is_empty() {
        return Ok(vec![Complex64::new(0.0, 0.0); taus.len()]);
    }
    match contributions {
        Contributions::Full => {
            let hq = two_photon_transfer(sample, spectrum.center_frequency(), grid);
            let integrand: Vec<Complex64> = hq
                .iter()
                .zip(spectrum.density_on(grid))
                .map(|(h, s)| h * s)
                .collect();
            xform::inverse_ft_at(&integrand, grid, taus)
        }
        Contributions::SelfOnly => {
            let mut total = vec![Complex64::new(0.0, 0.0); taus.len()];
            for layer in sample.split_layers() {
                let part = qoct_cross_on(&layer, spectrum, grid, taus, Contributions::Full)?;
                for (t, p) in total.iter_mut().zip(part) {
                    *t += p;
                }
            }
            Ok(total)
        }
    }
}

/// `H_q(Ω) = H(ω₀+Ω) H*(ω₀-Ω)` on the grid.
pub fn two_photon_transfer(sample: &Sample, omega0: f64, grid: &FreqGrid) -> Vec<Complex64> {
    let plus = engine::transfer_on_grid(sample, omega0, grid, 1.0);
    let minus = engine::transfer_on_grid(sample, omega0, grid, -1.0);
    plus.iter().zip(&minus).map(|(p, m)| p * m.conj()).collect()
}

/// Λ(τ) from the discrete-layer closed form:
/// `Σ_j |r_j|² s(τ - 4z_j/v₀) + Σ_{j≠k} r_j r_k* s_d^{(jk)}(τ - 2(z_j+z_k)/v₀) e^{i2β₀(z_j-z_k)}`.
pub fn qoct_cross_closed(
    sample: &Sample,
    spectrum: &Spectrum,
    delays: &DelayGrid,
    contributions: Contributions,
) -> Result<Vec<Complex64>> {
    qoct_cross_closed_at(sample, spectrum, &delays.taus(), contributions)
}

pub fn qoct_cross_closed_at(
    sample: &Sample,
    spectrum: &Spectrum,
    taus: &[f64],
    contributions: Contributions,
) -> Result<Vec<Complex64>> {
    let local = engine::closed_expansion(sample, spectrum)?;
    let layers = sample.layers();
    Ok(taus
        .iter()
        .map(|&tau| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, lj) in layers.iter().enumerate() {
                for (k, lk) in layers.iter().enumerate() {
                    if j == k {
                        acc += lj.reflectance.norm_sqr()
                            * spectrum.correlation(tau - 4.0 * local.beta1 * lj.depth);
                    } else if contributions == Contributions::Full {
                        let dz = lj.depth - lk.depth;
                        acc += lj.reflectance
                            * lk.reflectance.conj()
                            * Complex64::from_polar(1.0, 2.0 * local.beta0 * dz)
                            * spectrum.fresnel_correlation(
                                local.beta2,
                                dz,
                                tau - 2.0 * local.beta1 * (lj.depth + lk.depth),
                            );
                    }
                }
            }
            acc
        })
        .collect())
}

/// Λ₀ by the chosen path. In self-only mode the inter-layer part is dropped: `Σ_j |r_j|²`.
pub fn qoct_self_term(
    sample: &Sample,
    spectrum: &Spectrum,
    contributions: Contributions,
    path: Path,
) -> Result<f64> {
    match contributions {
        Contributions::Full => crate::oct::sample_power(sample, spectrum, path),
        Contributions::SelfOnly => {
            let mut total = 0.0;
            for layer in sample.split_layers() {
                total += crate::oct::sample_power(&layer, spectrum, path)?;
            }
            Ok(total)
        }
    }
}

fn cross_at(
    sample: &Sample,
    spectrum: &Spectrum,
    taus: &[f64],
    contributions: Contributions,
    path: Path,
) -> Result<Vec<Complex64>> {
    match path {
        Path::Quadrature => qoct_cross_on(
            sample,
            spectrum,
            &spectrum.quadrature_grid(),
            taus,
            contributions,
        ),
        Path::Closed => qoct_cross_closed_at(sample, spectrum, taus, contributions),
    }
}

/// `C(τ) = Λ₀ - Re{Λ(2τ)}` on the delay grid.
pub fn qoct_coincidence(
    sample: &Sample,
    spectrum: &Spectrum,
    delays: &DelayGrid,
    contributions: Contributions,
    path: Path,
) -> Result<Interferogram> {
    let background = qoct_self_term(sample, spectrum, contributions, path)?;
    let doubled: Vec<f64> = delays.taus().iter().map(|t| 2.0 * t).collect();
    let lambda = cross_at(sample, spectrum, &doubled, contributions, path)?;
    Ok(Interferogram {
        delays: *delays,
        kind: TraceKind::QoctCoincidence,
        values: lambda.iter().map(|l| background - l.re).collect(),
        background,
    })
}

/// Uniform sweep of the twin-photon center frequency ω₀ (pump at 2ω₀).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSweep {
    pub n_points: usize,
    /// Total width of the sweep in ω₀, rad/s.
    pub span: f64,
}

impl PumpSweep {
    pub fn new(n_points: usize, span: f64) -> Result<Self> {
        if n_points == 0 {
            return Err(Error::InvalidParameter(
                "pump sweep needs at least one point".into(),
            ));
        }
        if !(span.is_finite() && span >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pump sweep span must be >= 0, got {span}"
            )));
        }
        Ok(Self { n_points, span })
    }

    /// Sweep whose cross-term phase `2Δβ₀(z_{j+1} - z_j)` covers one full turn
    /// for the closest pair of adjacent layers.
    pub fn full_phase_cycle(sample: &Sample, spectrum: &Spectrum, n_points: usize) -> Result<Self> {
        let gap = sample
            .layers()
            .windows(2)
            .map(|w| w[1].depth - w[0].depth)
            .fold(f64::INFINITY, f64::min);
        if !gap.is_finite() {
            return Self::new(n_points, 0.0);
        }
        let beta1 = sample
            .dispersion()
            .beta_derivative(spectrum.center_frequency())?;
        Self::new(n_points, PI / (beta1 * gap))
    }

    /// Offsets from ω₀, midpoints of `n_points` equal cells across the span.
    pub fn offsets(&self) -> Vec<f64> {
        let m = self.n_points as f64;
        (0..self.n_points)
            .map(|i| -0.5 * self.span + self.span * (i as f64 + 0.5) / m)
            .collect()
    }

    /// Pump frequencies `2(ω₀ + δ)`.
    pub fn pump_frequencies(&self, omega0: f64) -> Vec<f64> {
        self.offsets().iter().map(|d| 2.0 * (omega0 + d)).collect()
    }
}

/// Pairwise decomposition `Λ(τ) = Σ_jk r_j r_k* P_jk(τ)` and `Λ₀ = Σ_jk r_j r_k* Q_jk`.
///
/// Lets sweeps and ensembles re-weight the reflectances without redoing the
/// frequency integrals.
struct PairTraces {
    n: usize,
    lambda: Vec<Vec<Complex64>>,
    power: Vec<Complex64>,
}

impl PairTraces {
    fn build(sample: &Sample, spectrum: &Spectrum, taus: &[f64], path: Path) -> Result<Self> {
        let n = sample.layers().len();
        let mut lambda = Vec::with_capacity(n * n);
        let mut power = Vec::with_capacity(n * n);
        match path {
            Path::Closed => {
                let local = engine::closed_expansion(sample, spectrum)?;
                for lj in sample.layers() {
                    for lk in sample.layers() {
                        let dz = lj.depth - lk.depth;
                        let carrier = Complex64::from_polar(1.0, 2.0 * local.beta0 * dz);
                        let center = 2.0 * local.beta1 * (lj.depth + lk.depth);
                        lambda.push(
                            taus.iter()
                                .map(|t| {
                                    carrier
                                        * spectrum.fresnel_correlation(local.beta2, dz, t - center)
                                })
                                .collect(),
                        );
                        power.push(
                            carrier
                                * spectrum.fresnel_correlation(
                                    local.beta2,
                                    dz,
                                    -2.0 * local.beta1 * dz,
                                ),
                        );
                    }
                }
            }
            Path::Quadrature => {
                let grid = spectrum.quadrature_grid();
                engine::check_grid(sample, spectrum, &grid)?;
                let w0 = spectrum.center_frequency();
                let density = spectrum.density_on(&grid);
                let unit = |s: &Sample, sign| engine::transfer_on_grid(s, w0, &grid, sign);
                let singles: Vec<Sample> = sample
                    .split_layers()
                    .into_iter()
                    .map(|s| {
                        let r = s.layers()[0].reflectance;
                        s.with_phasors(&[if r.norm() > 0.0 {
                            1.0 / r
                        } else {
                            Complex64::new(0.0, 0.0)
                        }])
                    })
                    .collect();
                let plus: Vec<Vec<Complex64>> = singles.iter().map(|s| unit(s, 1.0)).collect();
                let minus: Vec<Vec<Complex64>> = singles.iter().map(|s| unit(s, -1.0)).collect();
                for j in 0..n {
                    for k in 0..n {
                        let integrand: Vec<Complex64> = plus[j]
                            .iter()
                            .zip(&minus[k])
                            .zip(&density)
                            .map(|((a, b), s)| a * b.conj() * s)
                            .collect();
                        lambda.push(xform::inverse_ft_at(&integrand, &grid, taus)?);
                        power.push(
                            plus[j]
                                .iter()
                                .zip(&plus[k])
                                .zip(&density)
                                .map(|((a, b), s)| a * b.conj() * s)
                                .sum::<Complex64>()
                                * grid.step(),
                        );
                    }
                }
            }
        }
        Ok(Self { n, lambda, power })
    }

    /// Raw coincidence trace and Λ₀ for the given effective reflectances.
    fn coincidence(&self, reflectances: &[Complex64]) -> (Vec<f64>, f64) {
        let len = self.lambda.first().map_or(0, |v| v.len());
        let mut lambda = vec![Complex64::new(0.0, 0.0); len];
        let mut background = Complex64::new(0.0, 0.0);
        for j in 0..self.n {
            for k in 0..self.n {
                let w = reflectances[j] * reflectances[k].conj();
                background += w * self.power[j * self.n + k];
                for (acc, p) in lambda.iter_mut().zip(&self.lambda[j * self.n + k]) {
                    *acc += w * p;
                }
            }
        }
        let background = background.re;
        (
            lambda.iter().map(|l| background - l.re).collect(),
            background,
        )
    }
}

/// Mean coincidence trace over a uniform sweep of ω₀.
///
/// Only β₀ follows the sweep; the spectrum shape and group velocity stay at the
/// center, so each point rotates layer `j` by `e^{i2[β(ω₀+δ) - β(ω₀)]z_j}`.
pub fn pump_averaged_coincidence(
    sample: &Sample,
    spectrum: &Spectrum,
    delays: &DelayGrid,
    sweep: &PumpSweep,
    path: Path,
) -> Result<Interferogram> {
    let omega0 = spectrum.center_frequency();
    let limit = MAX_RELATIVE_SPAN * omega0;
    if sweep.span > limit {
        return Err(Error::SweepTooWide {
            span: sweep.span,
            limit,
        });
    }
    if sweep.n_points == 1 {
        return qoct_coincidence(sample, spectrum, delays, Contributions::Full, path);
    }
    let doubled: Vec<f64> = delays.taus().iter().map(|t| 2.0 * t).collect();
    let pairs = PairTraces::build(sample, spectrum, &doubled, path)?;
    let dp = sample.dispersion();
    let beta0 = dp.beta(omega0)?;
    let mut sum = vec![0.0; delays.len()];
    let mut background = 0.0;
    for offset in sweep.offsets() {
        let shift = dp.beta(omega0 + offset)? - beta0;
        let rotated: Vec<Complex64> = sample
            .layers()
            .iter()
            .map(|l| l.reflectance * Complex64::from_polar(1.0, 2.0 * shift * l.depth))
            .collect();
        let (trace, lambda0) = pairs.coincidence(&rotated);
        for (s, v) in sum.iter_mut().zip(trace) {
            *s += v;
        }
        background += lambda0;
    }
    let m = sweep.n_points as f64;
    Ok(Interferogram {
        delays: *delays,
        kind: TraceKind::QoctCoincidence,
        values: sum.into_iter().map(|v| v / m).collect(),
        background: background / m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub n_trials: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(n_trials: usize, seed: u64) -> Result<Self> {
        if n_trials == 0 {
            return Err(Error::InvalidParameter(
                "ensemble needs at least one trial".into(),
            ));
        }
        Ok(Self { n_trials, seed })
    }

    /// Phases for one trial. Trial `t` reads ChaCha8 stream `t` of the seed, so
    /// the draw does not depend on evaluation order.
    pub fn phases(&self, trial: usize, n_layers: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        (0..n_layers).map(|_| 2.0 * PI * rng.gen::<f64>()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    /// Mean raw trace; `background` is the mean Λ₀.
    pub mean: Interferogram,
    /// Population standard deviation of the raw trace at each delay.
    pub std_dev: Vec<f64>,
}

/// Coincidence statistics when every reflection picks up an independent uniform phase.
pub fn random_phase_ensemble(
    sample: &Sample,
    spectrum: &Spectrum,
    delays: &DelayGrid,
    ensemble: &EnsembleSpec,
    path: Path,
) -> Result<EnsembleResult> {
    let doubled: Vec<f64> = delays.taus().iter().map(|t| 2.0 * t).collect();
    let pairs = PairTraces::build(sample, spectrum, &doubled, path)?;
    let n = delays.len();
    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    let mut background = 0.0;
    for trial in 0..ensemble.n_trials {
        let phases = ensemble.phases(trial, sample.layers().len());
        let rotated: Vec<Complex64> = sample
            .layers()
            .iter()
            .zip(&phases)
            .map(|(l, p)| l.reflectance * Complex64::from_polar(1.0, *p))
            .collect();
        let (trace, lambda0) = pairs.coincidence(&rotated);
        for ((s, q), v) in sum.iter_mut().zip(sum_sq.iter_mut()).zip(trace) {
            *s += v;
            *q += v * v;
        }
        background += lambda0;
    }
    let m = ensemble.n_trials as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / m).collect();
    let std_dev = sum_sq
        .iter()
        .zip(&mean)
        .map(|(q, mu)| (q / m - mu * mu).max(0.0).sqrt())
        .collect();
    Ok(EnsembleResult {
        mean: Interferogram {
            delays: *delays,
            kind: TraceKind::QoctCoincidence,
            values: mean,
            background: background / m,
        },
        std_dev,
    })
}
