//! End-to-end checks of the command-line front end: exit codes, output
//! schemas, config precedence and byte-level determinism.

use henon::cli::run;
use std::fs;
use std::path::PathBuf;

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("henon-cli-{}-{tag}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_args(args: &[&str]) -> i32 {
    run(std::iter::once("henon").chain(args.iter().copied()))
}

#[test]
fn radial_writes_summary_and_profile() {
    let dir = tmp_dir("radial");
    let out = dir.to_str().unwrap();
    let code = run_args(&["--out", out, "radial", "--N", "3", "--alpha", "0", "--p", "3"]);
    assert_eq!(code, 0);
    let json = fs::read_to_string(dir.join("radial.json")).unwrap();
    assert!(json.contains("\"central_value\": 6.896848619"), "{json}");
    assert!(json.contains("\"N_alpha\": 3.0"));
    let csv = fs::read_to_string(dir.join("radial.csv")).unwrap();
    assert!(csv.starts_with("r,u,du\n"));
    assert_eq!(csv.lines().count(), 2002);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn supercritical_radial_exits_with_invalid_config() {
    let dir = tmp_dir("super");
    let out = dir.to_str().unwrap();
    let code = run_args(&["--out", out, "radial", "--N", "3", "--alpha", "1", "--p", "7"]);
    assert_eq!(code, 4);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn missing_and_invalid_flags_exit_with_four() {
    let dir = tmp_dir("badflags");
    let out = dir.to_str().unwrap();
    assert_eq!(run_args(&["--out", out, "radial", "--N", "3"]), 4);
    assert_eq!(run_args(&["--out", out, "frobnicate"]), 4);
    assert_eq!(
        run_args(&[
            "--out", out, "perturbed", "--N", "3", "--alpha", "1", "--p", "5", "--t", "0.001",
            "--map", "spiral"
        ]),
        4
    );
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(run_args(&["--help"]), 0);
}

#[test]
fn nu_csv_has_contract_header() {
    let dir = tmp_dir("nu");
    let out = dir.to_str().unwrap();
    let code = run_args(&[
        "--out", out, "nu", "--N", "3", "--alpha", "1", "--p-min", "5.0", "--p-max", "5.5",
        "--samples", "4",
    ]);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(dir.join("nu.csv")).unwrap();
    assert!(csv.starts_with("p,nu,nu_direct,gap\n"));
    assert_eq!(csv.lines().count(), 5);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn pk_outputs_table_and_summary() {
    let dir = tmp_dir("pk");
    let out = dir.to_str().unwrap();
    let code = run_args(&[
        "--out", out, "pk", "--N", "3", "--alpha", "2.05", "--p-min", "5.05", "--p-max", "5.13",
        "--samples", "9", "--k-max", "3",
    ]);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(dir.join("pk.csv")).unwrap();
    assert!(csv.starts_with("k,lambda_k,p_k,bracket_lo,bracket_hi,mode_shot_residual\n"));
    assert_eq!(csv.lines().count(), 2, "{csv}");
    assert!(csv.lines().nth(1).unwrap().starts_with("2,6.0"));
    let json = fs::read_to_string(dir.join("pk.json")).unwrap();
    assert!(json.contains("\"roots\": 1"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn check_degeneracy_exit_codes() {
    let dir = tmp_dir("check");
    let out = dir.to_str().unwrap();
    // a safe exponent
    assert_eq!(
        run_args(&["--out", out, "check-degeneracy", "--N", "3", "--alpha", "1", "--p", "5"]),
        0
    );
    let json = fs::read_to_string(dir.join("certificate.json")).unwrap();
    assert!(json.contains("\"verdict\": \"nondegenerate\""));
    // at the located degenerate exponent of (N=3, α=2.05)
    assert_eq!(
        run_args(&[
            "--out", out, "check-degeneracy", "--N", "3", "--alpha", "2.05", "--p",
            "5.0890664858695800"
        ]),
        2
    );
    let json = fs::read_to_string(dir.join("certificate.json")).unwrap();
    assert!(json.contains("\"verdict\": \"degenerate\""));
    assert!(json.contains("\"min_mode\": 2"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn perturbed_report_has_contract_keys_and_forbidden_exponent_exits_two() {
    let dir = tmp_dir("pert");
    let out = dir.to_str().unwrap();
    let code = run_args(&[
        "--out", out, "perturbed", "--N", "3", "--alpha", "1", "--p", "5", "--t", "0.001",
        "--map", "dilation", "--kmax", "4", "--rnodes", "256",
    ]);
    assert_eq!(code, 0);
    let json = fs::read_to_string(dir.join("report.json")).unwrap();
    let kappa_pos = json.find("\"kappa\"").unwrap();
    let iters_pos = json.find("\"iters\"").unwrap();
    let res_pos = json.find("\"residual_sup\"").unwrap();
    let margin_pos = json.find("\"positivity_margin\"").unwrap();
    assert!(kappa_pos < iters_pos && iters_pos < res_pos && res_pos < margin_pos);
    assert!(dir.join("solution.csv").exists());
    let conv = fs::read_to_string(dir.join("convergence.csv")).unwrap();
    assert!(conv.starts_with("n,increment_norm\n"));

    // degenerate exponent → exit 2
    let code = run_args(&[
        "--out", out, "perturbed", "--N", "3", "--alpha", "2.05", "--p", "5.0890664858695800",
        "--t", "0.001", "--map", "bump:0,0,1", "--kmax", "8", "--rnodes", "256",
    ]);
    assert_eq!(code, 2);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn exterior_pohozaev_and_certificate_smoke() {
    let dir = tmp_dir("misc");
    let out = dir.to_str().unwrap();
    assert_eq!(
        run_args(&["--out", out, "exterior", "--N", "3", "--p", "6", "--smax", "200", "--nodes", "4096"]),
        0
    );
    let json = fs::read_to_string(dir.join("exterior.json")).unwrap();
    assert!(json.contains("\"beta\": 0.0"));
    assert!(dir.join("exterior.csv").exists());

    assert_eq!(
        run_args(&["--out", out, "pohozaev", "--N", "3", "--alpha", "2", "--p", "4"]),
        0
    );
    let json = fs::read_to_string(dir.join("pohozaev.json")).unwrap();
    assert!(json.contains("relative_residual"));

    assert_eq!(
        run_args(&[
            "--out", out, "certify-nonexistence", "--N", "3", "--alpha", "1", "--p", "6",
            "--shift", "100"
        ]),
        0
    );
    let json = fs::read_to_string(dir.join("nonexistence.json")).unwrap();
    assert!(json.contains("CERTIFIED-NONEXISTENCE"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir_a = tmp_dir("det-a");
    let dir_b = tmp_dir("det-b");
    for dir in [&dir_a, &dir_b] {
        let out = dir.to_str().unwrap();
        let code = run_args(&[
            "--out", out, "nu", "--N", "3", "--alpha", "1", "--p-min", "5.0", "--p-max", "5.4",
            "--samples", "5",
        ]);
        assert_eq!(code, 0);
    }
    let a = fs::read(dir_a.join("nu.csv")).unwrap();
    let b = fs::read(dir_b.join("nu.csv")).unwrap();
    assert_eq!(a, b, "nu.csv differs between identical runs");
    fs::remove_dir_all(&dir_a).ok();
    fs::remove_dir_all(&dir_b).ok();
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tmp_dir("cfg");
    let out = dir.to_str().unwrap();
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "N = 3\nalpha = 0.0\np = 3.0\n").unwrap();
    let code = run_args(&["--out", out, "--config", cfg.to_str().unwrap(), "radial"]);
    assert_eq!(code, 0);
    let json = fs::read_to_string(dir.join("radial.json")).unwrap();
    assert!(json.contains("\"central_value\": 6.896848619"));
    // flag overrides the config value of p
    let code = run_args(&[
        "--out", out, "--config", cfg.to_str().unwrap(), "radial", "--p", "2.0",
    ]);
    assert_eq!(code, 0);
    let json = fs::read_to_string(dir.join("radial.json")).unwrap();
    assert!(json.contains("\"p\": 2.0"));
    fs::remove_dir_all(&dir).ok();
}
