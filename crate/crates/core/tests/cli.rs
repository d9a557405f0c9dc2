//! End-to-end CLI checks: exit-code contract, run-to-run determinism, and
//! the committed golden term list. Set REGEN_GOLDEN=1 to regenerate the
//! golden file from the current build.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_fermilap")
}

fn run(args: &[&str], dir: &Path) -> (i32, String, String) {
    let out = Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn synth_matches_golden_term_list() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, _, err) = run(
        &["synth", "--A", "2", "--n", "2", "--D", "1", "--mode", "inline", "--Q", "1000",
          "--out-dir", "g"],
        tmp.path(),
    );
    assert_eq!(code, 0, "stderr: {err}");
    let terms = std::fs::read_to_string(tmp.path().join("g/terms.txt")).unwrap();
    let golden = golden_path("terms_a2_n2_d1_inline.txt");
    if std::env::var("REGEN_GOLDEN").as_deref() == Ok("1") {
        std::fs::create_dir_all(golden.parent().unwrap()).unwrap();
        std::fs::write(&golden, &terms).unwrap();
    }
    let want = std::fs::read_to_string(&golden)
        .expect("golden file committed; run with REGEN_GOLDEN=1 to create");
    assert_eq!(terms, want, "term list drifted from the golden file");
}

#[test]
fn synth_is_byte_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    for d in ["r1", "r2"] {
        let (code, _, err) = run(
            &["synth", "--A", "2", "--n", "3", "--D", "1", "--mode", "gadget", "--out-dir", d],
            tmp.path(),
        );
        assert_eq!(code, 0, "stderr: {err}");
    }
    for f in ["terms.txt", "manifest.txt", "layout.txt", "gadget_report.txt"] {
        let a = std::fs::read(tmp.path().join("r1").join(f)).unwrap();
        let b = std::fs::read(tmp.path().join("r2").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between identical runs");
    }
}

#[test]
fn synth_single_particle_emits_gray_laplacian() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, _, err) = run(
        &["synth", "--A", "1", "--n", "3", "--D", "1", "--out-dir", "s"],
        tmp.path(),
    );
    assert_eq!(code, 0, "stderr: {err}");
    let terms = std::fs::read_to_string(tmp.path().join("s/terms.txt")).unwrap();
    let sum = fermilap::pauli::PauliSum::parse_term_lines(&terms).unwrap();
    // ring recursion on 3 bits: X0, X1, X2 P0 P1 expansion, -X1 P0 P1 terms
    let dense = sum.to_dense_real(3, 24).unwrap();
    for x in 0..8u64 {
        for y in 0..8u64 {
            let gx = fermilap::encoding::brgc_encode(x, 3).unwrap() as usize;
            let gy = fermilap::encoding::brgc_encode(y, 3).unwrap() as usize;
            let adjacent = (x + 1) % 8 == y || (y + 1) % 8 == x;
            assert_eq!(dense[(gx, gy)], if adjacent { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn verify_default_suite_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, out, err) = run(
        &["verify", "--A", "2", "--n", "2", "--D", "1", "--Q", "1000", "--out-dir", "v"],
        tmp.path(),
    );
    assert_eq!(code, 0, "stdout: {out} stderr: {err}");
    assert!(out.contains("result=pass"));
    assert!(tmp.path().join("v/spectral_report.txt").exists());
}

#[test]
fn verify_fails_when_penalty_too_weak() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, out, _) = run(
        &["verify", "--A", "2", "--n", "2", "--D", "1", "--Q", "10", "--out-dir", "w"],
        tmp.path(),
    );
    assert_eq!(code, 1, "stdout: {out}");
    assert!(out.contains("FAIL"));
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("run.cfg"),
        "A=2\nn=3\nD=1\nmode=inline\nQ=1000\nout_dir=cfg_out\n",
    )
    .unwrap();
    let (code, _, err) =
        run(&["synth", "--config", "run.cfg", "--n", "2"], tmp.path());
    assert_eq!(code, 0, "stderr: {err}");
    let manifest = std::fs::read_to_string(tmp.path().join("cfg_out/manifest.txt")).unwrap();
    assert!(manifest.contains("n=2"), "flag should override config: {manifest}");
    assert!(manifest.contains("A=2"));
}

#[test]
fn invalid_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, _, _) = run(&["synth", "--A", "2", "--n", "2", "--D", "5"], tmp.path());
    assert_eq!(code, 2);
    let (code, _, err) = run(
        &["synth", "--A", "2", "--n", "2", "--D", "1", "--potential", "file:/no/such/file"],
        tmp.path(),
    );
    assert_eq!(code, 2, "stderr: {err}");
    let (code, _, _) = run(&["synth", "--A", "2", "--n", "2", "--mode", "sideways"], tmp.path());
    assert_eq!(code, 2);
    std::fs::write(tmp.path().join("bad.cfg"), "A=2\nwhatever=3\n").unwrap();
    let (code, _, _) = run(&["synth", "--config", "bad.cfg"], tmp.path());
    assert_eq!(code, 2);
}

#[test]
fn resource_cap_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, _, err) = run(
        &["verify", "--A", "2", "--n", "4", "--D", "3", "--cap-qubits", "10"],
        tmp.path(),
    );
    assert_eq!(code, 3, "stderr: {err}");
    assert!(err.contains("exceeds cap"));
}

#[test]
fn audit_emits_csv_with_contracted_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, out, err) = run(
        &["audit", "--A", "2", "--D", "1", "--sweep", "n=2..4", "--out-dir", "a"],
        tmp.path(),
    );
    assert_eq!(code, 0, "stderr: {err}");
    let csv = std::fs::read_to_string(tmp.path().join("a/audit.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("A,n,D,terms,max_weight,ancillas"));
    assert_eq!(lines.count(), 3);
    assert!(out.contains("A,n,D"));
}

#[test]
fn verify_sweep_emits_scaling_table() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, _, err) = run(
        &["verify", "--A", "2", "--D", "1", "--sweep", "n=2..4", "--out-dir", "sw"],
        tmp.path(),
    );
    assert_eq!(code, 0, "stderr: {err}");
    assert!(tmp.path().join("sw/scaling.csv").exists());
}
