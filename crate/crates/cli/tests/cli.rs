use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn phononet(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phononet"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn ok(out: &Path, args: &[&str]) {
    let o = phononet(out, args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn meta(dir: &Path, stem: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{stem}.meta.json"))).unwrap()).unwrap()
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn hom_dip_reaches_zero_at_quarter_pi() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["hom", "--theta-scan", "0:0.5pi:201"]);
    let (h, rows) = read_csv(&d.path().join("hom.csv"));
    assert_eq!(h, ["theta_rad", "p_11", "p_20", "p_02"]);
    assert_eq!(rows.len(), 201);
    let (t, p) = rows
        .iter()
        .map(|r| (r[0].parse::<f64>().unwrap(), r[1].parse::<f64>().unwrap()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!(p < 1e-12);
    assert!((t - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
}

#[test]
fn tomography_recovers_superposition_from_config_file() {
    let d = TempDir::new().unwrap();
    let cfg = d.path().join("table_iv.json");
    fs::write(
        &cfg,
        r#"{"n_modes": 4, "beamsplitters": [
            {"m": 1, "n": 3, "ion": 3, "theta_pi_units": 0.696, "phi_pi_units": 0.0},
            {"m": 2, "n": 4, "ion": 4, "theta_pi_units": 0.304, "phi_pi_units": 0.0},
            {"m": 3, "n": 4, "ion": 5, "theta_pi_units": 0.5, "phi_pi_units": 0.5},
            {"m": 1, "n": 2, "ion": 2, "theta_pi_units": 0.5, "phi_pi_units": 1.0}
        ]}"#,
    )
    .unwrap();
    ok(
        d.path(),
        &["tomography", "--config", cfg.to_str().unwrap(), "--input", "(|10>+|01>)/sqrt2", "--shots", "0"],
    );
    let m = meta(d.path(), "tomography");
    let f = m["summary"]["fidelity"].as_f64().unwrap();
    assert!((f - 1.0).abs() < 1e-9, "fidelity {f}");
    let (h, rows) = read_csv(&d.path().join("tomography.csv"));
    assert_eq!(h[..4], ["row", "col", "ket_row", "ket_col"]);
    assert_eq!(rows.len(), 4);
}

#[test]
fn phase_scan_header_lists_single_phonon_outputs() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["phase-scan", "--phi", "0:2pi:9"]);
    let (h, rows) = read_csv(&d.path().join("phase_scan.csv"));
    assert_eq!(h, ["phi_rad", "p_1000", "p_0100", "p_0010", "p_0001"]);
    for r in &rows {
        let s: f64 = r[1..].iter().map(|x| x.parse::<f64>().unwrap()).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}

#[test]
fn phase_scan_shots_are_counts_over_shots() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["phase-scan", "--phi", "0:pi:3", "--shots", "40", "--seed", "7"]);
    let (_, rows) = read_csv(&d.path().join("phase_scan.csv"));
    for r in &rows {
        for x in &r[1..] {
            let k = x.parse::<f64>().unwrap() * 40.0;
            assert!((k - k.round()).abs() < 1e-9);
        }
    }
}

#[test]
fn scaling_header_and_monotone_duration() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["scaling", "--ions", "10:40:10"]);
    let (h, rows) = read_csv(&d.path().join("scaling.csv"));
    assert_eq!(h, ["n_ions", "spacing_hz", "bs_duration_s"]);
    assert_eq!(rows.len(), 4);
    let dur: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(dur.windows(2).all(|w| w[1] > w[0]));
    assert!(d.path().join("scaling.estimate.csv").exists());
}

#[test]
fn output_is_byte_stable_across_runs() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = ["tomography", "--input", "(|10>+|01>)/sqrt2", "--shots", "500", "--seed", "3"];
    ok(a.path(), &args);
    ok(b.path(), &args);
    for f in ["tomography.csv", "tomography.probabilities.csv", "tomography.records.json", "tomography.meta.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn different_seeds_give_different_counts() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    ok(a.path(), &["phase-scan", "--phi", "0:pi:3", "--shots", "200", "--seed", "1"]);
    ok(b.path(), &["phase-scan", "--phi", "0:pi:3", "--shots", "200", "--seed", "2"]);
    assert_ne!(
        fs::read(a.path().join("phase_scan.csv")).unwrap(),
        fs::read(b.path().join("phase_scan.csv")).unwrap()
    );
}

#[test]
fn json_format_holds_tables_and_result() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["hom", "--theta-scan", "0:0.5pi:5", "--format", "json"]);
    assert!(!d.path().join("hom.csv").exists());
    let v: Value = serde_json::from_str(&fs::read_to_string(d.path().join("hom.json")).unwrap()).unwrap();
    let t = &v["tables"]["hom"];
    assert_eq!(t["columns"][1], "p_11");
    assert_eq!(t["rows"].as_array().unwrap().len(), 5);
    assert!(t["rows"][0]["p_11"].as_f64().is_some());
    assert!(v.get("result").is_some());
}

#[test]
fn meta_sidecar_records_version_and_config() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["noise-sim", "--values", "10,40,100", "--seed", "5"]);
    let m = meta(d.path(), "noise_sim");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["command"], "noise_sim");
    assert!(m["convention"].as_str().unwrap().contains("<nu|W|psi>"));
    assert_eq!(m["config"]["common"]["seed"], 5);
    assert_eq!(m["config"]["args"]["values"], serde_json::json!([10.0, 40.0, 100.0]));
    assert!(m["config"]["common"].get("out").is_none());
    assert!(m["files"].as_array().unwrap().iter().any(|f| f == "noise_sim.csv"));
}

#[test]
fn malformed_input_exits_two() {
    let d = TempDir::new().unwrap();
    assert_eq!(phononet(d.path(), &["hom", "--theta-scan", "0:pi"]).status.code(), Some(2));
    assert_eq!(phononet(d.path(), &["hom", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        phononet(d.path(), &["tomography", "--input", "(|10>+|01"]).status.code(),
        Some(2)
    );
    let bad = d.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    let o = phononet(d.path(), &["tomography", "--config", bad.to_str().unwrap(), "--input", "|10>"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json"));
}

#[test]
fn physics_errors_exit_three() {
    let d = TempDir::new().unwrap();
    let o = phononet(d.path(), &["bs-scan", "--ion", "9"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let cfg = d.path().join("one.json");
    fs::write(
        &cfg,
        r#"{"n_modes": 2, "beamsplitters": [{"m": 1, "n": 2, "ion": 1, "theta_pi_units": 0.5, "phi_pi_units": 0.0}]}"#,
    )
    .unwrap();
    let o = phononet(
        d.path(),
        &["tomography", "--config", cfg.to_str().unwrap(), "--input", "(|10>+|01>)/sqrt2"],
    );
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn unwritable_output_exits_four() {
    let d = TempDir::new().unwrap();
    let file = d.path().join("plain");
    fs::write(&file, "x").unwrap();
    let o = phononet(&file.join("sub"), &["hom", "--theta-scan", "0:0.5pi:3"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn help_and_version_exit_zero() {
    let d = TempDir::new().unwrap();
    let o = phononet(d.path(), &["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("phase-scan"));
    assert_eq!(phononet(d.path(), &["--version"]).status.code(), Some(0));
}

#[test]
fn modes_fit_spectrum_from_file() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["modes"]);
    let (h, rows) = read_csv(&d.path().join("modes.csv"));
    let fc = column(&h, "freq_hz");
    let mut freqs: Vec<f64> = rows.iter().map(|r| r[fc].parse().unwrap()).collect();
    freqs.dedup();
    let spec = d.path().join("spectrum.json");
    fs::write(&spec, serde_json::json!({ "frequencies_hz": freqs }).to_string()).unwrap();
    let out = d.path().join("fit");
    ok(&out, &["modes", "--fit-spectrum", spec.to_str().unwrap()]);
    let m = meta(&out, "modes");
    let fit = &m["summary"]["fit"];
    assert!(fit.is_object(), "{m}");
    let rms = fit["rms_residual_hz"].as_f64().unwrap();
    assert!(rms < 1.0, "rms {rms}");
}

#[test]
fn heating_fit_recovers_synthetic_rate() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["heating-fit", "--shots", "300", "--seed", "11"]);
    let m = meta(d.path(), "heating_fit");
    let rate = m["summary"]["rate_quanta_per_s"].as_f64().unwrap();
    assert!((rate / 2.3e3 - 1.0).abs() < 0.1, "rate {rate}");
    assert!(d.path().join("heating_fit.data.json").exists());
}

#[test]
fn heating_fit_reads_its_own_data_file() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["heating-fit", "--shots", "0"]);
    let data = d.path().join("heating_fit.data.json");
    let out = d.path().join("refit");
    ok(&out, &["heating-fit", "--data", data.to_str().unwrap()]);
    let rate = meta(&out, "heating_fit")["summary"]["rate_quanta_per_s"].as_f64().unwrap();
    assert!((rate / 2.3e3 - 1.0).abs() < 1e-3, "rate {rate}");
}

#[test]
fn optimize_config_writes_loadable_configs() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["optimize-config", "--settings", "3", "--starts", "4", "--seed", "2"]);
    let m = meta(d.path(), "optimize_config");
    assert!(m["summary"]["det_gram"].as_f64().unwrap() > 1.0);
    let cfgs = d.path().join("optimize_config.configs.json");
    let out = d.path().join("tomo");
    let mut args = vec!["tomography", "--input", "(|10>+i|01>)/sqrt2"];
    args.extend(["--config", cfgs.to_str().unwrap()]);
    ok(&out, &args);
    let f = meta(&out, "tomography")["summary"]["fidelity"].as_f64().unwrap();
    assert!((f - 1.0).abs() < 1e-9, "fidelity {f}");
}
