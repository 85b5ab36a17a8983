//! Helpers for the acceptance suite: verdict reporting and trace measurements.

use std::io::Write;
use std::ops::Range;

use qoct_core::measure::full_width;
use qoct_core::{Interferogram, Spectrum};

/// Print one `PASS`/`FAIL` line, bypassing the test harness capture, then assert.
pub fn report(criterion: &str, passed: bool, detail: String) {
    let line = format!(
        "{} criterion {criterion}: {detail}\n",
        if passed { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(passed, "criterion {criterion}: {detail}");
}

pub fn e_inv() -> f64 {
    (-1f64).exp()
}

/// `(max - min) / min`.
pub fn spread(values: &[f64]) -> f64 {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / lo
}

/// Inter-layer part of a raw coincidence trace: `(C - Λ₀) - (C_self - Λ₀_self)`.
pub fn cross_part(full: &Interferogram, own: &Interferogram) -> Vec<f64> {
    full.values
        .iter()
        .zip(&own.values)
        .map(|(f, s)| (f - full.background) - (s - own.background))
        .collect()
}

pub fn max_abs_in(values: &[f64], range: Range<usize>) -> f64 {
    values[range].iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// 1/e full width of `|s_d(τ)|` for chirp `beta2 · dz`, by quadrature on the
/// source's own grid.
pub fn fresnel_width(spectrum: &Spectrum, beta2: f64, dz: f64) -> f64 {
    let taus: Vec<f64> = (0..4001).map(|i| -2e-13 + i as f64 * 1e-16).collect();
    let s = spectrum.fresnel_correlation_on(&spectrum.quadrature_grid(), beta2, dz, &taus);
    let mag: Vec<f64> = s.iter().map(|v| v.norm()).collect();
    full_width(&taus, &mag, e_inv()).expect("window covers the envelope")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresnel_width_matches_chirped_gaussian() {
        let sp = Spectrum::gaussian(2.32e15, 2.2e14).unwrap();
        for (beta2, dz) in [(0.0f64, 0.0f64), (1.8e-25, 1e-5), (1.8e-25, 1e-4)] {
            let a = beta2 * dz * 2.2e14 * 2.2e14;
            let expected = 4.0 * (1.0 + a * a).sqrt() / 2.2e14;
            let w = fresnel_width(&sp, beta2, dz);
            assert!((w / expected - 1.0).abs() < 1e-9, "{w:e} vs {expected:e}");
        }
    }

    #[test]
    fn spread_is_relative_range() {
        assert_eq!(spread(&[2.0, 3.0, 2.5]), 0.5);
    }
}
