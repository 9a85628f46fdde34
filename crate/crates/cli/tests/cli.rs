use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_conekernel"));
    cmd.env_remove("CONEKERNEL_THREADS");
    cmd
}

fn code(cmd: &mut Command) -> i32 {
    cmd.output().expect("binary runs").status.code().expect("exit code")
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(code(bin().arg("teleport")), 2);
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[experiment]\nkind = \"geom\"\nwobble = 1\n").unwrap();
    assert_eq!(code(bin().arg("geom").arg("--config").arg(&cfg)), 2);
    std::fs::write(&cfg, "[experiment]\nkind = \"green\"\n").unwrap();
    assert_eq!(
        code(bin().arg("geom").arg("--config").arg(&cfg)),
        2,
        "kind must match the subcommand"
    );
    assert_eq!(
        code(
            bin()
                .args(["geom", "--threads", "0", "--out"])
                .arg(dir.path().join("x"))
        ),
        2
    );
}

#[test]
fn geom_run_writes_artifacts_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let output = bin()
        .args(["geom", "--seed", "5", "--threads", "1", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(
        output.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("PASS"), "{stdout}");

    let csv = std::fs::read_to_string(out.join("meeting_points.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# "));
    assert_eq!(lines.next().unwrap(), "point,z1,z2");

    let snapshot = std::fs::read_to_string(out.join("config.toml")).unwrap();
    let cfg = conekernel_cli::ExperimentConfig::from_toml(&snapshot).unwrap();
    assert_eq!(cfg.seed, 5);
    assert!(Path::new(&out.join("report.json")).exists());

    // The stored report replays with the same status.
    assert_eq!(code(bin().arg("report").arg("--out").arg(&out)), 0);
}

#[test]
fn missing_report_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(bin().arg("report").arg("--out").arg(dir.path())), 1);
}
