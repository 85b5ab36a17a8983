use std::fs;
use std::path::Path;
use std::process::Command;

use num_complex::Complex64;
use qoct_cli::config::ScenarioConfig;
use qoct_cli::output::{ENSEMBLE_HEADER, INTERFEROGRAM_HEADER, WIGNER_HEADER};
use qoct_cli::preset::{preset, NAMES};
use qoct_cli::{run, CliError};
use serde_json::Value;

fn qoct() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qoct"))
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

const FIG3_WITH_EXTRAS: &str = r#"
[source]
center_wavelength_m = 812e-9
bandwidth_fw1e_m = 155e-9

[[sample.layers]]
r_re = 0.1
z_m = 1e-4

[[sample.layers]]
r_re = 0.2
r_im = 0.0
z_m = 1.1e-4

[sample.dispersion]
omega_r_rad_s = "match_source"
beta_r = 11598839.700177668
beta1 = 5e-9
beta2 = 1.8e-25

[delay_axis]
min_m = 95e-6
max_m = 115e-6
n_points = 401

[outputs]
oct = true
qoct_full = true
qoct_self_only = true
pump_average = { n_points = 4 }
ensemble = { n_trials = 8, seed = 7 }
wigner = { n_centers = 9, omega_half_range_rad_s = 2e14, n_omega = 1024, reconstruct_amplitude_floor = 0.01 }
"#;

#[test]
fn golden_headers() {
    let config = ScenarioConfig::from_toml(FIG3_WITH_EXTRAS).unwrap();
    let result = run(&config, FIG3_WITH_EXTRAS, 0).unwrap();
    let names: Vec<&str> = result.files.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        [
            "oct.csv",
            "qoct_full.csv",
            "qoct_self.csv",
            "qoct_pump_average.csv",
            "qoct_ensemble.csv",
            "wigner.csv",
            "transfer_reconstructed.csv"
        ]
    );
    let header = |name: &str| {
        let (_, text) = result.files.iter().find(|(n, _)| n == name).unwrap();
        text.lines().next().unwrap().to_string()
    };
    assert_eq!(
        INTERFEROGRAM_HEADER,
        "x_position_um,tau_s,value_normalized,value_raw"
    );
    assert_eq!(
        ENSEMBLE_HEADER,
        "x_position_um,tau_s,value_normalized,value_raw,std_normalized"
    );
    assert_eq!(WIGNER_HEADER, "omega0_rad_s,tau_s,re,im");
    for name in [
        "oct.csv",
        "qoct_full.csv",
        "qoct_self.csv",
        "qoct_pump_average.csv",
    ] {
        assert_eq!(header(name), INTERFEROGRAM_HEADER);
    }
    assert_eq!(header("qoct_ensemble.csv"), ENSEMBLE_HEADER);
    assert_eq!(header("wigner.csv"), WIGNER_HEADER);
    assert_eq!(
        header("transfer_reconstructed.csv"),
        "omega_rad_s,re,im,true_re,true_im"
    );
    let residual = result
        .manifest
        .wigner
        .as_ref()
        .unwrap()
        .reconstruction_residual
        .unwrap();
    assert!(residual < 1e-6, "{residual:e}");
}

#[test]
fn unknown_key_is_named() {
    let text = FIG3_WITH_EXTRAS.replace("beta2 = 1.8e-25", "betta2 = 1.8e-25");
    let err = ScenarioConfig::from_toml(&text).unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, CliError::Config(_)));
    assert!(msg.contains("betta2"), "{msg}");
    assert!(msg.contains("line 19"), "{msg}");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, text).unwrap();
    let out = qoct()
        .arg("run")
        .arg(&path)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("betta2"));
}

#[test]
fn validation_errors() {
    let both = FIG3_WITH_EXTRAS.replace(
        "bandwidth_fw1e_m = 155e-9",
        "bandwidth_fw1e_m = 155e-9\ntabulated_spectrum = \"s.txt\"",
    );
    assert!(matches!(
        ScenarioConfig::from_toml(&both),
        Err(CliError::Config(_))
    ));
    let reversed = FIG3_WITH_EXTRAS.replace("max_m = 115e-6", "max_m = 90e-6");
    assert!(matches!(
        ScenarioConfig::from_toml(&reversed),
        Err(CliError::Config(_))
    ));
    let keyword = FIG3_WITH_EXTRAS.replace("\"match_source\"", "\"match_sauce\"");
    assert!(matches!(
        ScenarioConfig::from_toml(&keyword),
        Err(CliError::Config(_))
    ));
    let numeric = FIG3_WITH_EXTRAS.replace("\"match_source\"", "2.3e15");
    assert!(ScenarioConfig::from_toml(&numeric).is_ok());
    let unphysical = FIG3_WITH_EXTRAS.replace("r_re = 0.2", "r_re = 1.2");
    let config = ScenarioConfig::from_toml(&unphysical).unwrap();
    let err = run(&config, &unphysical, 0).unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");
    assert!(err.to_string().contains("sample.layers[1]"), "{err}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = qoct().args(["preset", "fig5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = qoct()
        .args(["run", "/nonexistent/scenario.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));

    // a pump sweep far beyond the allowed span is an engine contract violation
    let wide = FIG3_WITH_EXTRAS.replace(
        "pump_average = { n_points = 4 }",
        "pump_average = { n_points = 4, span_rad_s = 1e15 }",
    );
    let path = dir.path().join("wide.toml");
    fs::write(&path, wide).unwrap();
    let out = qoct()
        .arg("run")
        .arg(&path)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pump sweep span"));

    let blocked = dir.path().join("file");
    fs::write(&blocked, "").unwrap();
    let out = qoct()
        .args(["preset", "hom", "--out"])
        .arg(blocked.join("sub"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn runs_are_byte_identical_except_timestamp() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let config = a.path().join("scenario.toml");
    fs::write(&config, FIG3_WITH_EXTRAS).unwrap();
    for dir in [&a, &b] {
        let out = qoct()
            .arg("run")
            .arg(&config)
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for name in [
        "oct.csv",
        "qoct_full.csv",
        "qoct_self.csv",
        "qoct_ensemble.csv",
        "wigner.csv",
    ] {
        assert_eq!(
            read(&a.path().join(name)),
            read(&b.path().join(name)),
            "{name}"
        );
    }
    let strip = |dir: &Path| {
        let mut v: Value = serde_json::from_str(&read(&dir.join("manifest.json"))).unwrap();
        v.as_object_mut().unwrap().remove("timestamp_unix_s");
        v
    };
    assert_eq!(strip(a.path()), strip(b.path()));
}

#[test]
fn seed_and_points_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scenario.toml");
    fs::write(&config, FIG3_WITH_EXTRAS).unwrap();
    let out_dir = dir.path().join("o");
    let out = qoct()
        .arg("run")
        .arg(&config)
        .args(["--seed", "99", "--points", "51", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let manifest: Value = serde_json::from_str(&read(&out_dir.join("manifest.json"))).unwrap();
    assert_eq!(manifest["ensemble"]["seed"], 99);
    assert_eq!(manifest["delay_axis"]["n_points"], 51);
    assert_eq!(read(&out_dir.join("qoct_full.csv")).lines().count(), 52);
}

fn fresnel(half_width: f64, chirp: f64, tau: f64) -> Complex64 {
    let a = Complex64::new(1.0, -chirp * half_width * half_width);
    let u = half_width * tau;
    (-(u * u) / (4.0 * a)).exp() / a.sqrt()
}

fn field(v: &Value, path: &[&str]) -> f64 {
    let mut cur = v;
    for key in path {
        cur = &cur[*key];
    }
    cur.as_f64().unwrap_or_else(|| panic!("missing {path:?}"))
}

#[test]
fn manifest_suffices_to_recompute_cells() {
    let dir = tempfile::tempdir().unwrap();
    let out = qoct()
        .args(["preset", "fig3", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let m: Value = serde_json::from_str(&read(&dir.path().join("manifest.json"))).unwrap();
    let dw = field(&m, &["source", "half_width_rad_s"]);
    let beta0 = field(&m, &["local_expansion", "beta0_rad_m"]);
    let beta1 = field(&m, &["local_expansion", "beta1_s_m"]);
    let beta2 = field(&m, &["local_expansion", "beta2_s2_m"]);
    let v0 = field(&m, &["local_expansion", "group_velocity_m_s"]);
    let layers: Vec<(Complex64, f64)> = m["layers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| {
            (
                Complex64::new(field(l, &["r_re"]), field(l, &["r_im"])),
                field(l, &["z_m"]),
            )
        })
        .collect();
    let lambda = |tau: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (rj, zj) in &layers {
            for (rk, zk) in &layers {
                let dz = zj - zk;
                acc += rj
                    * rk.conj()
                    * Complex64::from_polar(1.0, 2.0 * beta0 * dz)
                    * fresnel(dw, beta2 * dz, tau - 2.0 * beta1 * (zj + zk));
            }
        }
        acc
    };
    let gamma = |tau: f64| -> Complex64 {
        layers
            .iter()
            .map(|(r, z)| {
                r * Complex64::from_polar(1.0, 2.0 * beta0 * z)
                    * fresnel(dw, beta2 * z, tau - 2.0 * beta1 * z)
            })
            .sum()
    };
    let lambda0 = {
        let mut acc = Complex64::new(0.0, 0.0);
        for (rj, zj) in &layers {
            for (rk, zk) in &layers {
                let dz = zj - zk;
                acc += rj
                    * rk.conj()
                    * Complex64::from_polar(1.0, 2.0 * beta0 * dz)
                    * fresnel(dw, beta2 * dz, -2.0 * beta1 * dz);
            }
        }
        acc.re
    };
    assert!((lambda0 - field(&m, &["normalization", "lambda0_full"])).abs() < 1e-15);
    let gamma0 = 1.0 + lambda0;
    assert!((gamma0 - field(&m, &["normalization", "gamma0"])).abs() < 1e-14);

    let rows = |name: &str| -> Vec<Vec<f64>> {
        read(&dir.path().join(name))
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect()
    };
    let qoct = rows("qoct_full.csv");
    let oct = rows("oct.csv");
    for &i in &[137usize, 502, 1000, 1501, 1789] {
        let (x, tau) = (qoct[i][0], qoct[i][1]);
        assert!((x - 0.5 * tau * v0 * 1e6).abs() < 1e-9);
        let c = lambda0 - lambda(2.0 * tau).re;
        assert!(
            (qoct[i][3] - c).abs() < 1e-12 * lambda0,
            "row {i}: {} vs {c}",
            qoct[i][3]
        );
        assert!((qoct[i][2] - c / lambda0).abs() < 1e-11);
        let g = gamma(oct[i][1]).norm();
        assert!((oct[i][3] - g).abs() < 1e-12, "row {i}");
        assert!((oct[i][2] - g / gamma0).abs() < 1e-12);
    }
}

#[test]
fn preset_values() {
    let fig3 = preset("fig3").unwrap();
    assert_eq!(fig3.sample.layers[1].z_m, 1.1e-4);
    assert_eq!(fig3.sample.layers[0].z_m, 1e-4);
    assert_eq!(
        (fig3.sample.layers[0].r_re, fig3.sample.layers[1].r_re),
        (0.1, 0.2)
    );
    assert_eq!(fig3.sample.dispersion.beta1, 5e-9);
    assert_eq!(fig3.sample.dispersion.beta2, 1.8e-25);
    assert_eq!(preset("fig4").unwrap().sample.layers[0].z_m, 0.0);
    let hom = preset("hom").unwrap();
    assert_eq!(hom.sample.layers.len(), 1);
    assert_eq!(hom.sample.dispersion.beta2, 0.0);
    let result = run(&hom, "", 0).unwrap();
    let c = result.traces.qoct_full.unwrap();
    let mid = c.delays.len() / 2;
    assert!(c.delays.tau(mid).abs() < 1e-25);
    assert!(c.normalized().unwrap()[mid].abs() < 1e-12);
}

#[test]
fn emitted_configs_round_trip() {
    for name in NAMES {
        let out = qoct()
            .args(["preset", name, "--emit-config"])
            .output()
            .unwrap();
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(
            ScenarioConfig::from_toml(&text).unwrap(),
            preset(name).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn tabulated_source_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let dw = 2.2e14;
    let n = 512;
    let half_range = 8.0 * dw;
    let step = 2.0 * half_range / n as f64;
    let table: String = (0..n)
        .map(|k| {
            let w = -half_range + k as f64 * step;
            let v = if k == 0 {
                0.0
            } else {
                (-(w / dw).powi(2)).exp()
            };
            format!("{w:e} {v:e}\n")
        })
        .collect();
    fs::write(dir.path().join("spectrum.txt"), table).unwrap();
    let text = FIG3_WITH_EXTRAS
        .replace(
            "bandwidth_fw1e_m = 155e-9",
            "tabulated_spectrum = \"spectrum.txt\"",
        )
        .replace("pump_average = { n_points = 4 }\n", "")
        .replace("ensemble = { n_trials = 8, seed = 7 }\n", "");
    let path = dir.path().join("scenario.toml");
    fs::write(&path, &text).unwrap();
    let (config, text) = ScenarioConfig::load(&path).unwrap();
    let result = run(&config, &text, 0).unwrap();
    assert_eq!(result.manifest.engine_path, "quadrature");
    assert!(!result.manifest.source.gaussian);
    let c = result.traces.qoct_self.unwrap().normalized().unwrap();
    let deepest = c.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!((deepest - 0.2).abs() < 1e-3, "{deepest}");
}

#[test]
fn selftest_passes() {
    let out = qoct().arg("selftest").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5);
}
