use std::path::Path;
use std::process::Command;

use fano_decay::experiments::linspace;
use fano_decay::output::read_json;
use fano_decay::{sweep_detuning, sweep_z, ChainPolicy, LatticeSpec, SurvivalRecord, SweepConfig};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = fano_decay::cli::run(
        std::iter::once("fano-decay").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run_ok(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_matches_library_bit_for_bit() {
    let out = run_ok(&["simulate", "--z", "20"]);
    let rec: SurvivalRecord = serde_json::from_str(&out).unwrap();
    let lib = sweep_z(&SweepConfig {
        base: LatticeSpec::experiment(),
        z_values: vec![20.0],
        eps2_values: None,
        chain: ChainPolicy::default(),
    })
    .unwrap()[0];
    assert_eq!(rec, lib);
}

#[test]
fn simulate_at_zero_distance_is_all_ones() {
    let rec: SurvivalRecord = serde_json::from_str(&run_ok(&["simulate", "--z", "0"])).unwrap();
    assert_eq!([rec.p_boson, rec.p_fermion, rec.p_classical, rec.p_entangled], [1.0; 4]);
}

#[test]
fn simulate_rejects_bad_parameters() {
    let (code, _, err) = run(&["simulate", "--kappa", "-1"]);
    assert_eq!(code, 2);
    assert!(err.contains("--kappa"), "{err}");
    let (code, _, err) = run(&["simulate", "--z", "-3"]);
    assert_eq!(code, 2);
    assert!(err.contains("--z"), "{err}");
    let (code, _, _) = run(&["simulate", "--n-chain", "10", "--faithful"]);
    assert_eq!(code, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
}

#[test]
fn help_and_version_succeed() {
    assert!(run_ok(&["--help"]).contains("sweep"));
    assert!(run_ok(&["--version"]).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn bic_reports_the_dressed_state() {
    let v: Value = serde_json::from_str(&run_ok(&["bic"])).unwrap();
    let states = v["bound_states"].as_array().unwrap();
    assert_eq!(states.len(), 1);
    assert_eq!(states[0]["kind"], "dressed");
    assert!((states[0]["energy"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["asymptotic"]["p_boson"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(v["asymptotic"]["z"], "inf");
    assert!(v["notes"].as_array().unwrap().is_empty());

    let v: Value = serde_json::from_str(&run_ok(&["bic", "--eps2", "0.9"])).unwrap();
    assert!(v["bound_states"].as_array().unwrap().is_empty());
    let p = v["asymptotic"]["p_boson"].as_f64().unwrap();
    assert!(p == 0.0 && p.is_sign_positive());
}

#[test]
fn bic_flags_a_decoupled_site() {
    let v: Value = serde_json::from_str(&run_ok(&["bic", "--kappa1", "0"])).unwrap();
    let states = v["bound_states"].as_array().unwrap();
    assert_eq!(states.len(), 1);
    assert_eq!(states[0]["kind"], "decoupled_site");
    assert_eq!(states[0]["site"], 1);
    let notes = v["notes"].as_array().unwrap();
    assert_eq!(notes.len(), 1);
    assert!(notes[0].as_str().unwrap().contains("site 1"));
}

#[test]
fn normalize_examples() {
    let v: Value = serde_json::from_str(&run_ok(&[
        "normalize", "--c-vv", "250", "--c-vv-dist", "500", "--c-ent", "10", "--c-vh-dist", "500", "--p-clas", "0.5",
    ]))
    .unwrap();
    assert_eq!(v["p_boson_est"].as_f64().unwrap(), 0.25);
    assert_eq!(v["p_fermion_est"].as_f64().unwrap(), 0.01);

    let (code, _, err) = run(&[
        "normalize", "--c-vv", "1", "--c-vv-dist", "0", "--c-ent", "1", "--c-vh-dist", "1", "--p-clas", "0.5",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("--c-vv-dist"), "{err}");
    let (code, _, _) = run(&["normalize", "--c-vv", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn single_point_sweep_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("one.csv");
    run_ok(&["sweep", "--points", "1", "--z-min", "7", "--out", path_str(&out)]);
    let text = std::fs::read_to_string(&out).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 2);
    assert!(data[0].starts_with("z_mm,eps1_inv_mm"));
    assert!(data[1].starts_with("7.00000000000,"));
    assert!(text.starts_with("# fano-decay sweep"));
}

#[test]
fn detuning_sweep_peaks_at_resonance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("det.json");
    run_ok(&["sweep", "--mode", "detuning", "--z", "20", "--format", "json", "--out", path_str(&out)]);
    let rows = read_json(&out).unwrap();
    assert_eq!(rows.len(), 41);
    let best = rows.iter().max_by(|a, b| a.p_boson.total_cmp(&b.p_boson)).unwrap();
    assert!((best.eps2_inv_mm - 0.5).abs() < 0.011);

    let eps2 = linspace(0.1, 0.9, 41);
    let lib = sweep_detuning(
        &SweepConfig {
            base: LatticeSpec::experiment(),
            z_values: vec![20.0],
            eps2_values: Some(eps2),
            chain: ChainPolicy::default(),
        },
        20.0,
    )
    .unwrap();
    for (row, rec) in rows.iter().zip(&lib) {
        assert_eq!(row.p_boson, rec.p_boson);
        assert_eq!(row.p_fermion, rec.p_fermion);
    }
}

#[test]
fn one_cell_map_matches_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cell.json");
    run_ok(&[
        "map", "--kz-min", "6", "--kz-max", "6", "--kz-points", "1", "--detuning-min", "0.5",
        "--detuning-points", "1", "--format", "json", "--out", path_str(&out),
    ]);
    let rows = read_json(&out).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].kappa_z, 6.0);
    assert_eq!(rows[0].detuning_over_kappa, 0.5);

    let rec: SurvivalRecord = serde_json::from_str(&run_ok(&[
        "simulate", "--eps1", "1", "--eps2", "1.5", "--kappa1", "0.4", "--kappa2", "0.4", "--kappa", "1", "--z", "6",
    ]))
    .unwrap();
    assert_eq!(rows[0].p_boson, rec.p_boson);
    assert_eq!(rows[0].p_fermion, rec.p_fermion);
    assert_eq!(rows[0].p_classical, rec.p_classical);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# lattice\neps2 = 0.9\nz = 5\nn-chain = 40\n").unwrap();
    let from_file: SurvivalRecord =
        serde_json::from_str(&run_ok(&["--config", path_str(&cfg), "simulate"])).unwrap();
    let explicit: SurvivalRecord = serde_json::from_str(&run_ok(&[
        "simulate", "--eps2", "0.9", "--z", "5", "--n-chain", "40",
    ]))
    .unwrap();
    assert_eq!(from_file, explicit);

    let overridden: SurvivalRecord =
        serde_json::from_str(&run_ok(&["--config", path_str(&cfg), "simulate", "--eps2", "0.5"])).unwrap();
    assert_ne!(overridden, from_file);

    std::fs::write(&cfg, "eps2 = banana\n").unwrap();
    assert_eq!(run(&["--config", path_str(&cfg), "simulate"]).0, 2);
    assert_eq!(run(&["--config", "/nonexistent/run.conf", "simulate"]).0, 1);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let (code, _, err) = run(&["sweep", "--points", "3", "--out", "/nonexistent-dir/out.csv"]);
    assert_eq!(code, 1);
    assert!(err.contains("/nonexistent-dir/out.csv"), "{err}");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_fano-decay");
    let ok = Command::new(bin).args(["simulate", "--z", "1"]).output().unwrap();
    assert!(ok.status.success());
    let rec: SurvivalRecord = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(rec.z, 1.0);
    let bad = Command::new(bin).args(["simulate", "--kappa", "0"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());
}

#[test]
fn faithful_simulate_uses_the_device_chain() {
    let rec: SurvivalRecord = serde_json::from_str(&run_ok(&["simulate", "--z", "20", "--faithful"])).unwrap();
    let lib = sweep_z(&SweepConfig {
        base: LatticeSpec::experiment(),
        z_values: vec![20.0],
        eps2_values: None,
        chain: ChainPolicy::Faithful,
    })
    .unwrap()[0];
    assert_eq!(rec, lib);
    let h = fano_decay::build_hamiltonian(&LatticeSpec::experiment()).unwrap();
    let direct = SurvivalRecord::from_propagator(&fano_decay::propagator(&h, 20.0).unwrap()).unwrap();
    assert_eq!(rec, direct);
}
