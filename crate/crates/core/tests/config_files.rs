use std::fs;

use sswm::config::{load_config, load_file, ConfigError, ConfigSource};
use sswm::reproduce::{reproduce, Figure, OutputOptions};
use sswm::SystemParams;

#[test]
fn presets_by_name() {
    let c = load_config("fig2").unwrap();
    assert_eq!(c.params, SystemParams::fig2());
    assert_eq!(c.source, ConfigSource::Preset("fig2".into()));
    assert!(c.warnings.is_empty(), "{:?}", c.warnings);
    assert_eq!(load_config("fig3").unwrap().params, SystemParams::fig3());
}

#[test]
fn file_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.toml");
    fs::write(&empty, "").unwrap();
    assert!(matches!(load_file(&empty), Err(ConfigError::ParseError { .. })));

    let bare = dir.path().join("bare.toml");
    fs::write(&bare, "base = \"fig3\"\n\n[dephasing]\ngamma_21 = 3\n").unwrap();
    assert!(matches!(load_file(&bare), Err(ConfigError::UnitMissing { .. })));

    let extra = dir.path().join("extra.toml");
    fs::write(&extra, "base = \"fig3\"\n[model]\nchi5_sign = \"plus\"\ncolour = \"red\"\n").unwrap();
    assert!(matches!(load_file(&extra), Err(ConfigError::UnknownKey { .. })));

    let broken = dir.path().join("broken.toml");
    fs::write(&broken, "base = \"fig3\"\n\n[fields]\nunit = \"gamma_21\"\nomega_c2 = = 4\n").unwrap();
    match load_file(&broken) {
        Err(ConfigError::ParseError { line, .. }) => assert_eq!(line, 5),
        other => panic!("{other:?}"),
    }

    assert!(matches!(load_file(&dir.path().join("missing.toml")), Err(ConfigError::Io { .. })));
}

#[test]
fn resolved_config_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let cfg = load_config("fig3").unwrap();
    let opts = OutputOptions {
        out_dir: first.clone(),
        ..Default::default()
    };
    let m1 = reproduce(Figure::Fig4, &cfg, &opts).unwrap();

    let reloaded = load_file(&first.join("resolved.toml")).unwrap();
    assert_eq!(reloaded.params, cfg.params);
    let second = dir.path().join("b");
    let opts2 = OutputOptions {
        out_dir: second.clone(),
        ..Default::default()
    };
    let m2 = reproduce(Figure::Fig4, &reloaded, &opts2).unwrap();
    assert_eq!(m1.outputs, m2.outputs);
    for f in &m1.outputs {
        assert_eq!(fs::read(first.join(f)).unwrap(), fs::read(second.join(f)).unwrap(), "{f}");
    }
    let mut a = m1.without_timings();
    let mut b = m2.without_timings();
    a.source = ConfigSource::Inline;
    b.source = ConfigSource::Inline;
    assert_eq!(a, b);
}
