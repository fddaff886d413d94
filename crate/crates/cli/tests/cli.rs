use std::f64::consts::PI;
use std::fs;
use std::process::Command;

use qthermo_cli::run;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qthermo").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = invoke(args);
    assert_eq!(code, 0, "{args:?} failed: {err}");
    out
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

/// Lines of the section headed `# <name suffix>` in multi-table output.
fn section<'a>(text: &'a str, suffix: &str) -> &'a str {
    let start = text
        .lines()
        .position(|l| l.starts_with("# ") && l.ends_with(suffix))
        .expect("section present");
    let offset: usize = text.lines().take(start + 1).map(|l| l.len() + 1).sum();
    let rest = &text[offset..];
    rest.split("\n\n").next().unwrap()
}

#[test]
fn qubit_scan_has_single_interior_maximum() {
    let out = ok(&["qfi", "--family", "qubit", "--delta", "1", "--tmin", "0.05", "--tmax", "5", "--points", "500"]);
    assert!(out.starts_with("T,qfi\n"));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 500);
    let maxima: Vec<usize> = (1..rows.len() - 1)
        .filter(|&i| rows[i][1] > rows[i - 1][1] && rows[i][1] > rows[i + 1][1])
        .collect();
    assert_eq!(maxima.len(), 1);
    assert!((rows[maxima[0]][0] - 0.242).abs() < 0.005);
}

#[test]
fn oscillator_optimum_json() {
    let out = ok(&["optimum", "--family", "oscillator", "--delta", "1"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["t_max"].as_f64().unwrap() - 0.26110).abs() < 1e-4);
    assert_eq!(v["converged"], true);
    assert!(v["h_max"].as_f64().unwrap() > 4.8);
}

#[test]
fn swap_windows_follow_half_time_law() {
    let out = ok(&[
        "dynamics", "swap", "--delta", "1", "--j", "1", "--temp", "1", "--tmax", "6.2832", "--steps", "2000", "--qsl",
    ]);
    let traj = section(&out, "_trajectory");
    assert!(traj.starts_with("t,p_e,gen_norm\n"));
    let qsl = section(&out, "_qsl");
    assert!(qsl.starts_with("t,fidelity,bures,v_qsl\n"));
    let windows = section(&out, "_windows");
    assert!(windows.starts_with("tau,e_tau,tau_qsl\n"));
    let rows = csv_rows(windows);
    let within: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] <= PI).collect();
    assert!(within.len() > 900);
    for r in within {
        assert!((r[2] - r[0] / 2.0).abs() < 1e-9, "τ = {}", r[0]);
    }
}

#[test]
fn markov_trajectory_table() {
    let out = ok(&["dynamics", "markov", "--temp", "1", "--tmax", "1", "--steps", "1000"]);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1001);
    assert!((rows[1000][1] - 0.238048).abs() < 1e-6);
    assert!((rows[0][2] - 0.581977).abs() < 1e-6);
}

#[test]
fn output_is_deterministic_with_seventeen_digits() {
    let args = ["qfi", "--family", "harmonic", "--d", "4", "--points", "50"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let first = a.lines().nth(1).unwrap();
    for field in first.split(',') {
        let mantissa = field.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17, "{field}");
    }
    let args = ["dynamics", "markov", "--temp", "0.25", "--temp", "5", "--tmax", "0.5", "--steps", "1000", "--qsl"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn as_printed_column_is_twice_the_qfi() {
    let out = ok(&["qfi", "--family", "qubit", "--points", "20", "--as-printed"]);
    assert!(out.starts_with("T,qfi,qfi_as_printed\n"));
    for r in csv_rows(&out) {
        assert!((r[2] - 2.0 * r[1]).abs() <= 1e-14 * r[2]);
    }
    let (code, _, err) = invoke(&["qfi", "--family", "harmonic", "--d", "3", "--as-printed"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn spectrum_file_matches_builtin_family() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("three.json");
    fs::write(&path, r#"{"levels":[{"energy":0,"g":1},{"energy":1,"g":1},{"energy":1.5,"g":1}]}"#).unwrap();
    let from_file = ok(&["qfi", "--spectrum", path.to_str().unwrap(), "--points", "40"]);
    let builtin = ok(&["qfi", "--family", "three-level", "--delta", "1", "--delta2", "1.5", "--points", "40"]);
    assert_eq!(from_file, builtin);

    fs::write(&path, r#"{"levels":[{"energy":0,"g":0}]}"#).unwrap();
    let (code, _, err) = invoke(&["qfi", "--spectrum", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("multiplicity"), "{err}");
}

#[test]
fn staircase_gap_reading() {
    let absolute = ok(&["qfi", "--family", "staircase", "--levels", "0:1,1:1,5:100", "--points", "30"]);
    let cumulative = ok(&["qfi", "--family", "staircase", "--levels", "0:1,1:1,4:100", "--gaps", "--points", "30"]);
    assert_eq!(absolute, cumulative);
}

#[test]
fn staircase_peaks() {
    let out = ok(&["peaks", "--family", "staircase", "--levels", "0:1,1:1,5:100,25:1000000"]);
    assert!(out.starts_with("peak,t_max,h_max\n"));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 3);
    assert!((rows[0][1] - 0.2422).abs() < 1e-3);
}

#[test]
fn scaling_report() {
    let out = ok(&["scaling", "--family", "qubit"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let fit = &v["scaling_fit"][0];
    assert!((fit["alpha"].as_f64().unwrap() - 0.24209).abs() < 1e-4);
    assert!((fit["inverse_h_coefficient"].as_f64().unwrap() - 0.22065).abs() < 5e-4);
    assert_eq!(v["scaling_points"].as_array().unwrap().len(), 6);

    let (code, _, _) = invoke(&["scaling", "--family", "qubit", "--deltas", "1,2,3"]);
    assert_eq!(code, 1);
}

#[test]
fn dynamics_json_and_directory_output() {
    let out = ok(&["dynamics", "markov", "--temp", "1", "--tmax", "0.2", "--steps", "200", "--qsl", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let obj = v.as_object().unwrap();
    assert_eq!(obj.len(), 3);
    let windows = &obj["markov_delta1_gamma1_T1_windows"];
    assert!(windows[0]["tau_qsl"].is_number());

    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("runs");
    ok(&[
        "dynamics", "markov", "--temp", "0.25", "--temp", "1.5", "--tmax", "0.2", "--steps", "200", "--qsl", "--out",
        target.to_str().unwrap(),
    ]);
    let mut names: Vec<String> = fs::read_dir(&target)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 6);
    assert!(names.contains(&"markov_delta1_gamma1_T0.25_trajectory.csv".to_string()));
}

#[test]
fn reproduce_writes_named_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["reproduce", "fig2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.lines().count(), 5);
    for d in 2..=5 {
        let text = fs::read_to_string(dir.path().join(format!("fig2_harmonic_d{d}_delta1.csv"))).unwrap();
        assert_eq!(text.lines().count(), 2001);
    }
    assert!(dir.path().join("fig2_oscillator_delta1.csv").exists());

    let out = ok(&["reproduce", "fig4a", "--out", dir.path().to_str().unwrap()]);
    assert!(out.contains("fig4a_staircase_e1_5_25_n100_m1000000.csv"));
    let peaks = fs::read_to_string(dir.path().join("fig4a_staircase_e1_5_25_n100_m1000000_peaks.csv")).unwrap();
    assert_eq!(csv_rows(&peaks).len(), 3);
}

#[test]
fn reproduce_swap_figure() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["reproduce", "fig5b", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.lines().count(), 12);
    let text = fs::read_to_string(dir.path().join("fig5b_swap_delta1_j1_T0.25_windows.csv")).unwrap();
    for r in csv_rows(&text).iter().filter(|r| r[0] <= PI) {
        assert!((r[2] - r[0] / 2.0).abs() < 1e-9);
    }
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["qfi", "--bogus"],
        vec!["qfi"],
        vec!["qfi", "--family", "qubit", "--spectrum", "x.json"],
        vec!["qfi", "--family", "harmonic"],
        vec!["qfi", "--family", "staircase", "--levels", "0:1,oops"],
        vec!["reproduce", "fig9"],
        vec!["dynamics", "markov"],
        vec!["frobnicate"],
    ] {
        let (code, _, err) = invoke(&args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn domain_errors_exit_with_one() {
    for args in [
        vec!["qfi", "--family", "qubit", "--delta", "-1"],
        vec!["qfi", "--family", "qubit", "--tmin", "2", "--tmax", "1"],
        vec!["peaks", "--family", "qubit", "--points", "100"],
        vec!["dynamics", "markov", "--temp", "5", "--steps", "100"],
        vec!["dynamics", "swap", "--temp", "-1"],
        vec!["qfi", "--family", "qubit", "--out", "/nonexistent/dir/q.csv"],
        vec!["qfi", "--spectrum", "/nonexistent/spectrum.json"],
    ] {
        let (code, _, err) = invoke(&args);
        assert_eq!(code, 1, "{args:?}: {err}");
        assert!(err.starts_with("error:"), "{err}");
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_qthermo");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let good = status(&["optimum", "--family", "qubit"]);
    assert_eq!(good.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&good.stdout).contains("\"t_max\""));
    assert_eq!(status(&["qfi", "--nope"]).status.code(), Some(2));
    assert_eq!(status(&["qfi", "--family", "qubit", "--delta", "0"]).status.code(), Some(1));
    assert_eq!(status(&["--help"]).status.code(), Some(0));
}
