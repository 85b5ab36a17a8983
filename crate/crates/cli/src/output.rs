//! CSV rendering and atomic file output.
//!
//! Numbers use Rust's shortest round-trip formatting, so equal values always
//! print identically and parse back bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use qoct_core::{EnsembleResult, Interferogram, WignerMap};

use crate::error::CliError;
use crate::scenario::{Manifest, Reconstruction, Scenario};

pub const INTERFEROGRAM_HEADER: &str = "x_position_um,tau_s,value_normalized,value_raw";
pub const ENSEMBLE_HEADER: &str = "x_position_um,tau_s,value_normalized,value_raw,std_normalized";
pub const WIGNER_HEADER: &str = "omega0_rad_s,tau_s,re,im";
pub const TRANSFER_HEADER: &str = "omega_rad_s,re,im,true_re,true_im";

pub fn interferogram_csv(scenario: &Scenario, trace: &Interferogram) -> Result<String, CliError> {
    let normalized = trace.normalized()?;
    let mut out = String::with_capacity(64 * trace.values.len());
    out.push_str(INTERFEROGRAM_HEADER);
    out.push('\n');
    for (i, (raw, norm)) in trace.values.iter().zip(&normalized).enumerate() {
        let tau = trace.delays.tau(i);
        let _ = writeln!(
            out,
            "{:e},{:e},{:e},{:e}",
            scenario.x_um(tau),
            tau,
            norm,
            raw
        );
    }
    Ok(out)
}

pub fn ensemble_csv(scenario: &Scenario, result: &EnsembleResult) -> Result<String, CliError> {
    let trace = &result.mean;
    let normalized = trace.normalized()?;
    let mut out = String::with_capacity(80 * trace.values.len());
    out.push_str(ENSEMBLE_HEADER);
    out.push('\n');
    for (i, ((raw, norm), sd)) in trace
        .values
        .iter()
        .zip(&normalized)
        .zip(&result.std_dev)
        .enumerate()
    {
        let tau = trace.delays.tau(i);
        let _ = writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e}",
            scenario.x_um(tau),
            tau,
            norm,
            raw,
            sd / trace.background
        );
    }
    Ok(out)
}

/// Long format, one row per (ω₀, τ).
pub fn wigner_csv(map: &WignerMap) -> String {
    let mut out = String::new();
    out.push_str(WIGNER_HEADER);
    out.push('\n');
    let taus = map.delays.taus();
    for (m, row) in map.values.iter().enumerate() {
        let w0 = map.centers.center(m);
        for (tau, v) in taus.iter().zip(row) {
            let _ = writeln!(out, "{:e},{:e},{:e},{:e}", w0, tau, v.re, v.im);
        }
    }
    out
}

pub fn transfer_csv(rec: &Reconstruction) -> String {
    let mut out = String::new();
    out.push_str(TRANSFER_HEADER);
    out.push('\n');
    for ((w, v), t) in rec
        .transfer
        .frequencies()
        .iter()
        .zip(&rec.transfer.values)
        .zip(&rec.truth)
    {
        let _ = writeln!(out, "{:e},{:e},{:e},{:e},{:e}", w, v.re, v.im, t.re, t.im);
    }
    out
}

/// Write `contents` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let target = dir.join(name);
    let temp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    let mut file = fs::File::create(&temp).map_err(io(&temp))?;
    file.write_all(contents.as_bytes()).map_err(io(&temp))?;
    file.sync_all().map_err(io(&temp))?;
    drop(file);
    fs::rename(&temp, &target).map_err(io(&target))
}

/// All CSVs, then the manifest last so its presence marks a complete run.
pub fn write_run(
    dir: &Path,
    files: &[(String, String)],
    manifest: &Manifest,
) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for (name, contents) in files {
        write_atomic(dir, name, contents)?;
    }
    write_atomic(dir, "manifest.json", &manifest.to_json())
}
