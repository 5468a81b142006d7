use std::process::Command;

fn sswm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sswm"))
}

#[test]
fn unknown_preset_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let s = sswm().args(["chi5", "--preset", "fig9", "--out"]).arg(dir.path()).status().unwrap();
    assert_eq!(s.code(), Some(2));
}

#[test]
fn unit_missing_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "base = \"fig3\"\n[fields]\nomega_c2 = 3\n").unwrap();
    let out = sswm().arg("criterion").arg("--config").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unit"));
}

#[test]
fn reproduce_fig3b_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = sswm().args(["reproduce", "fig3b", "--svg", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    for f in ["fig3b_conditional_12.csv", "fig3b_conditional_12.svg", "manifest.json", "resolved.toml"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn sweep_with_list() {
    let dir = tempfile::tempdir().unwrap();
    let out = sswm().args(["sweep", "--omega-c2-list", "4,12", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 3);
}

#[test]
fn long_transit_time_warns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "base = \"fig3\"\n[medium]\nunit = \"ns\"\ntransit_time = 30\n").unwrap();
    let out = sswm().arg("criterion").arg("--config").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).contains("transit"));
}

#[test]
fn flipped_sign_fails_oracle_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "base = \"fig3\"\n[model]\nchi5_sign = \"minus\"\n").unwrap();
    let out = sswm().arg("validate").arg("--config").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    let line = text.lines().find(|l| l.contains("max relative deviation of chi5 at omega_p = 0.01")).unwrap();
    assert!(line.contains("[FAIL]"), "{line}");
}
