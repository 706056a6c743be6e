//! End-to-end tests of the `lhrs` binary: exit-code contract, stable
//! stderr reasons, determinism under a fixed seed, and the documented
//! command pipelines.

use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_lhrs");
const SEED_A: &str = "aaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaa";
const SEED_B: &str = "bbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbb";

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Writes params.bin plus two key pairs (a, b) into `dir`.
fn fixture(dir: &Path) {
    assert_ok(&run(
        dir,
        &["setup", "--n", "96", "--k", "6", "--seed", SEED_A, "--out", "params.bin"],
    ));
    assert_ok(&run(
        dir,
        &["keygen", "--params", "params.bin", "--user-id", "0", "--pub", "a.pk", "--key", "a.sk",
          "--seed", SEED_A],
    ));
    assert_ok(&run(
        dir,
        &["keygen", "--params", "params.bin", "--user-id", "1", "--pub", "b.pk", "--key", "b.sk",
          "--seed", SEED_B],
    ));
}

#[test]
fn setup_is_deterministic_and_reports_derived_values() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = run(
        dir.path(),
        &["setup", "--n", "96", "--k", "6", "--profile", "toy", "--seed", SEED_A, "--out", "p1.bin"],
    );
    assert_ok(&out1);
    let stdout = String::from_utf8(out1.stdout).unwrap();
    assert!(stdout.contains("q=16411"), "{stdout}");
    assert!(stdout.contains("h=1"), "{stdout}");
    assert!(stdout.contains("V=836.335258"), "{stdout}");

    let out2 = run(
        dir.path(),
        &["setup", "--n", "96", "--k", "6", "--profile", "toy", "--seed", SEED_A, "--out", "p2.bin"],
    );
    assert_ok(&out2);
    let b1 = std::fs::read(dir.path().join("p1.bin")).unwrap();
    let b2 = std::fs::read(dir.path().join("p2.bin")).unwrap();
    assert_eq!(b1, b2, "same seed must give byte-identical params");
    // Canonical header: magic, version, then the params kind byte.
    assert_eq!(&b1[..4], b"LHRS");
    assert_eq!(b1[6], 1);
}

#[test]
fn setup_rejects_invalid_k_with_reason() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["setup", "--n", "96", "--k", "8", "--out", "p.bin"]);
    assert_eq!(code(&out), 2);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("k mod 4 != 2"), "{stderr}");
}

#[test]
fn malformed_seed_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["setup", "--n", "96", "--k", "6", "--seed", "zz", "--out", "p.bin"],
    );
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8(out.stderr).unwrap().contains("seed"));
}

#[test]
fn sign_verify_roundtrip_tamper_and_malformed() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path());
    assert_ok(&run(
        dir.path(),
        &["sign", "--params", "params.bin", "--key", "a.sk", "--ring", "a.pk", "--ring", "b.pk",
          "--signer", "0", "--tag", "b4", "--message", "101000", "--seed", SEED_A, "--out", "s.bin"],
    ));

    let ok = run(
        dir.path(),
        &["verify", "--params", "params.bin", "--ring", "a.pk", "--ring", "b.pk", "--tag", "b4",
          "--message", "101000", "--sig", "s.bin"],
    );
    assert_eq!(code(&ok), 0);
    assert!(String::from_utf8(ok.stdout).unwrap().starts_with("accept"));

    // One flipped tag bit moves the target: reject, exit 1.
    let flipped = run(
        dir.path(),
        &["verify", "--params", "params.bin", "--ring", "a.pk", "--ring", "b.pk", "--tag", "34",
          "--message", "101000", "--sig", "s.bin"],
    );
    assert_eq!(code(&flipped), 1);
    assert!(String::from_utf8(flipped.stdout)
        .unwrap()
        .contains("target equation mismatch"));

    // Truncated signature file: malformed input, exit 2.
    let bytes = std::fs::read(dir.path().join("s.bin")).unwrap();
    std::fs::write(dir.path().join("t.bin"), &bytes[..20]).unwrap();
    let trunc = run(
        dir.path(),
        &["verify", "--params", "params.bin", "--ring", "a.pk", "--ring", "b.pk", "--tag", "b4",
          "--message", "101000", "--sig", "t.bin"],
    );
    assert_eq!(code(&trunc), 2);
    assert!(String::from_utf8(trunc.stderr).unwrap().starts_with("error:"));

    // Signer index that does not match the key: exit 2 before signing.
    let wrong = run(
        dir.path(),
        &["sign", "--params", "params.bin", "--key", "a.sk", "--ring", "a.pk", "--ring", "b.pk",
          "--signer", "1", "--tag", "b4", "--message", "101000", "--out", "w.bin"],
    );
    assert_eq!(code(&wrong), 2);
    assert!(String::from_utf8(wrong.stderr)
        .unwrap()
        .contains("signer index does not match"));
}

#[test]
fn combine_verifies_against_summed_lift() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path());
    for (msg, seed, out) in [("101000", SEED_A, "s1.bin"), ("011000", SEED_B, "s2.bin")] {
        assert_ok(&run(
            dir.path(),
            &["sign", "--params", "params.bin", "--key", "a.sk", "--ring", "a.pk", "--ring", "b.pk",
              "--signer", "0", "--tag", "b4", "--message", msg, "--seed", seed, "--out", out],
        ));
    }
    assert_ok(&run(
        dir.path(),
        &["combine", "--params", "params.bin", "--ring", "a.pk", "--ring", "b.pk", "--tag", "b4",
          "--in", "s1.bin", "--in", "s2.bin", "--coeffs", "11", "--out", "sum.bin"],
    ));
    // Both inputs are weight-(κ−1) messages, so each lift equals its bits;
    // the sum is 1,1,2,0,0,0.
    let ok = run(
        dir.path(),
        &["verify", "--params", "params.bin", "--ring", "a.pk", "--ring", "b.pk", "--tag", "b4",
          "--lifted-message", "1,1,2,0,0,0", "--sig", "sum.bin"],
    );
    assert_eq!(code(&ok), 0);

    // Coefficient string of the wrong length: exit 2.
    let bad = run(
        dir.path(),
        &["combine", "--params", "params.bin", "--ring", "a.pk", "--ring", "b.pk", "--tag", "b4",
          "--in", "s1.bin", "--in", "s2.bin", "--coeffs", "1", "--out", "x.bin"],
    );
    assert_eq!(code(&bad), 2);
}

#[test]
fn paper_mode_draws_the_overlap_boundary() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path());
    // Weight 3 = k/2 lies in the zero-overlap band: paper mode accepts.
    assert_ok(&run(
        dir.path(),
        &["sign", "--params", "params.bin", "--key", "a.sk", "--ring", "a.pk", "--ring", "b.pk",
          "--signer", "0", "--tag", "00", "--message", "111000", "--seed", SEED_A, "--out", "w3.bin"],
    ));
    let accept = run(
        dir.path(),
        &["verify", "--params", "params.bin", "--ring", "a.pk", "--ring", "b.pk", "--tag", "00",
          "--message", "111000", "--sig", "w3.bin", "--mode", "paper"],
    );
    assert_eq!(code(&accept), 0);

    // Weight 1 decomposes with overlap: canonical accepts, paper rejects.
    assert_ok(&run(
        dir.path(),
        &["sign", "--params", "params.bin", "--key", "a.sk", "--ring", "a.pk", "--ring", "b.pk",
          "--signer", "0", "--tag", "00", "--message", "100000", "--seed", SEED_B, "--out", "w1.bin"],
    ));
    let canonical = run(
        dir.path(),
        &["verify", "--params", "params.bin", "--ring", "a.pk", "--ring", "b.pk", "--tag", "00",
          "--message", "100000", "--sig", "w1.bin"],
    );
    assert_eq!(code(&canonical), 0);
    let paper = run(
        dir.path(),
        &["verify", "--params", "params.bin", "--ring", "a.pk", "--ring", "b.pk", "--tag", "00",
          "--message", "100000", "--sig", "w1.bin", "--mode", "paper"],
    );
    assert_eq!(code(&paper), 1);
}

#[test]
fn bench_contract_holds() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path());
    let unknown = run(dir.path(), &["bench", "--op", "nonsense", "--params", "params.bin"]);
    assert_eq!(code(&unknown), 2);
    let zero = run(
        dir.path(),
        &["bench", "--op", "sign", "--params", "params.bin", "--reps", "0"],
    );
    assert_eq!(code(&zero), 2);
    assert!(String::from_utf8(zero.stderr).unwrap().contains("reps"));
    let ok = run(
        dir.path(),
        &["bench", "--op", "sign", "--params", "params.bin", "--reps", "3", "--seed", SEED_A],
    );
    assert_ok(&ok);
    let stdout = String::from_utf8(ok.stdout).unwrap();
    assert!(stdout.starts_with("op=sign reps=3"), "{stdout}");
    assert!(stdout.contains("median_ms="), "{stdout}");
    assert!(stdout.contains("p90_ms="), "{stdout}");
}

#[test]
fn experiments_are_seed_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path());
    let args = [
        "experiment", "forge-sim", "--params", "params.bin", "--trials", "20",
        "--ks-samples", "100", "--seed", SEED_A,
    ];
    let a = run(dir.path(), &args);
    let b = run(dir.path(), &args);
    assert_ok(&a);
    assert_eq!(a.stdout, b.stdout, "fixed seed must reproduce the report");
    let stdout = String::from_utf8(a.stdout).unwrap();
    assert!(stdout.contains("sim_verify_rate=1.000000"), "{stdout}");
    assert!(stdout.contains("extraction_ok=true"), "{stdout}");
    assert!(stdout.contains("self_cancel_zero=true"), "{stdout}");

    let anon = run(
        dir.path(),
        &["experiment", "anon", "--params", "params.bin", "--trials", "40", "--seed", SEED_B],
    );
    assert_ok(&anon);
    let stdout = String::from_utf8(anon.stdout).unwrap();
    assert!(stdout.contains("advantage="), "{stdout}");
}

#[cfg(unix)]
#[test]
fn secret_key_file_is_user_only() {
    use std::os::unix::fs::PermissionsExt;
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path());
    let mode = std::fs::metadata(dir.path().join("a.sk"))
        .unwrap()
        .permissions()
        .mode();
    assert_eq!(mode & 0o777, 0o600);
    // The warning lands on stderr at creation time.
    let out = run(
        dir.path(),
        &["keygen", "--params", "params.bin", "--pub", "c.pk", "--key", "c.sk", "--seed", SEED_A],
    );
    assert_ok(&out);
    assert!(String::from_utf8(out.stderr).unwrap().contains("secret key"));
}
