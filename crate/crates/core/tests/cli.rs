use std::path::PathBuf;
use std::process::Command;

fn kickback() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kickback"))
}

fn preset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("presets").join(name)
}

#[test]
fn simulate_writes_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("stage3.csv");
    let run = kickback()
        .args(["simulate", "--config"])
        .arg(preset("dnr-stage3.toml"))
        .args(["--shots", "6400", "--seed", "4", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("phi_probe,probability,label,label_probability,count,shots")
    );
    assert_eq!(csv.lines().count(), 1 + 64 * 3);
    let report: toml::Table = String::from_utf8(run.stdout).unwrap().parse().unwrap();
    assert_eq!(report["shots"].as_integer(), Some(6400));
    assert_eq!(report["seed"].as_integer(), Some(4));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let run = || {
        kickback()
            .args(["simulate", "--config"])
            .arg(preset("dnr-stage1.toml"))
            .args(["--shots", "3000"])
            .output()
            .unwrap()
            .stdout
    };
    let a = run();
    assert!(!a.is_empty());
    assert_eq!(a, run());
}

#[test]
fn exit_codes() {
    let eq = kickback()
        .args(["equivalence", "--config"])
        .arg(preset("dnr-stage1.toml"))
        .output()
        .unwrap();
    assert_eq!(eq.status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        "theta = 1.0\nphi = 0.0\nshots = 5\nwobble = 1\n[channel]\nkind = \"sew\"\nlambda_t = 1.0\n",
    )
    .unwrap();
    let run = kickback().args(["simulate", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("wobble"));

    let strict = kickback()
        .args(["equivalence", "--config"])
        .arg(preset("dnr-stage1.toml"))
        .env("KICKBACK_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(strict.status.code(), Some(2));

    let small = kickback().args(["fock-verify", "--n-i", "3"]).output().unwrap();
    assert_eq!(small.status.code(), Some(2));
    let failing = kickback().args(["fock-verify", "--i-max", "5"]).output().unwrap();
    assert_eq!(failing.status.code(), Some(1));
}

#[test]
fn erase_handles_both_pictures() {
    let env = kickback()
        .args(["erase", "--config"])
        .arg(preset("dnr-stage3.toml"))
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(0));
    let report: toml::Table = String::from_utf8(env.stdout).unwrap().parse().unwrap();
    assert_eq!(report["subensemble"].as_array().unwrap().len(), 2);

    let dir = tempfile::tempdir().unwrap();
    let kicks = dir.path().join("kicks.toml");
    std::fs::write(
        &kicks,
        "theta = 1.5\nphi = 0.0\nshots = 20000\n[channel]\nkind = \"window\"\nhalf_width = 2.0\n[erasure]\ntags = 3\n",
    )
    .unwrap();
    let control = kickback().args(["erase", "--config"]).arg(&kicks).output().unwrap();
    assert_eq!(
        control.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&control.stdout)
    );
    let report: toml::Table = String::from_utf8(control.stdout).unwrap().parse().unwrap();
    assert_eq!(report["tag"].as_array().unwrap().len(), 3);
}
