//! Quick oracle checks runnable from the binary.

use qoct_core::measure::full_width;
use qoct_core::oct::{oct_cross, oct_cross_closed};
use qoct_core::qoct::qoct_coincidence;
use qoct_core::wigner::{global_phase_residual, reconstruct_transfer, wigner_map};
use qoct_core::xform::make_freq_grid;
use qoct_core::{
    CenterGrid, Complex64, Contributions, DelayGrid, DispersionProfile, Layer, Path, Sample,
    Spectrum,
};

use crate::preset::preset;
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;
type Named = (&'static str, fn() -> Outcome);

pub fn run_all() -> Vec<Check> {
    let checks: [Named; 5] = [
        ("hom-null", hom_null),
        ("fresnel-closed-vs-quadrature", fresnel_oracle),
        ("fig3-closed-vs-quadrature", fig3_oracle),
        ("dip-width-dispersion-free", dip_width),
        ("wigner-round-trip", wigner_round_trip),
    ];
    checks
        .iter()
        .map(|(name, f)| match f() {
            Ok((passed, detail)) => Check {
                name,
                passed,
                detail,
            },
            Err(e) => Check {
                name,
                passed: false,
                detail: e.to_string(),
            },
        })
        .collect()
}

fn hom_null() -> Outcome {
    let s = Scenario::build(&preset("hom")?)?;
    let zero = DelayGrid::new(-1e-15, 1e-15, 3)?;
    let c = qoct_coincidence(&s.sample, &s.spectrum, &zero, Contributions::Full, s.path)?
        .normalized()?;
    Ok((c[1].abs() < 1e-9, format!("C(0)/Λ₀ = {:e}", c[1])))
}

fn fresnel_oracle() -> Outcome {
    let sp = Spectrum::gaussian_from_wavelength(812e-9, 155e-9)?;
    let dw = sp.half_width().unwrap_or(1.0);
    let grid = make_freq_grid(dw, 6.0, 4096)?;
    let taus: Vec<f64> = (0..101).map(|i| -1.5e-13 + 3e-15 * i as f64).collect();
    let quad = sp.fresnel_correlation_on(&grid, 1.8e-25, 1e-4, &taus);
    let worst = taus
        .iter()
        .zip(&quad)
        .map(|(t, q)| (sp.fresnel_correlation(1.8e-25, 1e-4, *t) - q).norm())
        .fold(0.0, f64::max);
    Ok((worst < 1e-9, format!("max deviation {worst:e}")))
}

fn fig3_oracle() -> Outcome {
    let s = Scenario::build(&preset("fig3")?)?;
    let delays = DelayGrid::new(s.delays.tau_min(), s.delays.tau_max(), 201)?;
    let closed = qoct_coincidence(
        &s.sample,
        &s.spectrum,
        &delays,
        Contributions::Full,
        Path::Closed,
    )?;
    let quad = qoct_coincidence(
        &s.sample,
        &s.spectrum,
        &delays,
        Contributions::Full,
        Path::Quadrature,
    )?;
    let peak = closed.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let q_err = closed
        .values
        .iter()
        .zip(&quad.values)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        / peak;
    let g_closed = oct_cross_closed(&s.sample, &s.spectrum, &delays)?;
    let g_quad = oct_cross(&s.sample, &s.spectrum, &delays)?;
    let g_peak = g_closed.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let o_err = g_closed
        .iter()
        .zip(&g_quad)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()))
        / g_peak;
    Ok((
        q_err < 1e-6 && o_err < 1e-6,
        format!("QOCT {q_err:e}, OCT {o_err:e} of peak"),
    ))
}

fn dip_width() -> Outcome {
    let sp = Spectrum::gaussian_from_wavelength(812e-9, 155e-9)?;
    let w0 = sp.center_frequency();
    let mut widths = Vec::new();
    for (z, beta2) in [(0.0, 0.0), (1e-3, 1.8e-25)] {
        let s = Sample::new(
            vec![Layer::real(0.5, z)?],
            DispersionProfile::new(w0, w0 * 5e-9, 5e-9, beta2)?,
        )?;
        let delays = DelayGrid::centered(2.0 * 5e-9 * z, 2e-16, 401)?;
        let c = qoct_coincidence(&s, &sp, &delays, Contributions::Full, Path::Closed)?;
        let depth: Vec<f64> = c.values.iter().map(|v| c.background - v).collect();
        widths
            .push(full_width(&delays.taus(), &depth, (-1f64).exp()).ok_or("dip width undefined")?);
    }
    let rel = (widths[1] - widths[0]).abs() / widths[0];
    Ok((rel < 1e-6, format!("width change {rel:e}")))
}

fn wigner_round_trip() -> Outcome {
    let w0 = 2.32e15;
    let s = Sample::new(
        vec![Layer::new(Complex64::new(0.5, 0.0), 2e-5)?],
        DispersionProfile::new(w0, 1.16e7, 5e-9, 0.0)?,
    )?;
    let window = qoct_core::FreqGrid::new(2e14, 256)?;
    let delays = window.conjugate_delays(0.0);
    let centers = CenterGrid::around(w0, 16, &window)?;
    let map = wigner_map(&s, &delays, &centers, 2e14, 256)?;
    let h = reconstruct_transfer(&map, w0, 0.01)?;
    let truth = h
        .frequencies()
        .iter()
        .map(|f| s.transfer_function(*f))
        .collect::<Result<Vec<_>, _>>()?;
    let err = global_phase_residual(&h.values, &truth);
    Ok((err < 1e-6, format!("residual {err:e}")))
}
