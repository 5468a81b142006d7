use std::fs;

use sswm::config::load_config;
use sswm::export::{spectral_grid_csv, waveform_grid_csv};
use sswm::grid::UniformAxis;
use sswm::reproduce::{reproduce, Figure, OutputOptions};
use sswm::susceptibility::{grid_eval, SpectralFunction};
use sswm::waveform::threefold_grid;
use sswm::SystemParams;

#[test]
fn threefold_csv_golden() {
    let p = SystemParams::fig3();
    let a = UniformAxis::closed(20e-9, 2).unwrap();
    let g = threefold_grid(&p, &a, &a).unwrap();
    let text = waveform_grid_csv(&g).render();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "# axis tau12 [ns]: start=0.0000000000000000e0 step=2.0000000000000000e1 n=2");
    assert_eq!(lines[3], "tau12_ns,tau13_ns,rate_normalized");
    assert_eq!(lines[4], "0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0");
    assert_eq!(lines[5], "2.0000000000000000e1,0.0000000000000000e0,0.0000000000000000e0");
    assert_eq!(lines[6], "0.0000000000000000e0,2.0000000000000000e1,0.0000000000000000e0");
    assert_eq!(lines[7], "2.0000000000000000e1,2.0000000000000000e1,1.0000000000000000e0");
    assert_eq!(lines.len(), 8);
}

#[test]
fn spectral_csv_schema() {
    let p = SystemParams::fig3();
    let a2 = UniformAxis::symmetric(4e6, 4).unwrap();
    let a3 = UniformAxis::symmetric(2e6, 2).unwrap();
    let g = grid_eval(&p, SpectralFunction::Chi5, &a2, &a3).unwrap();
    let text = spectral_grid_csv(&g).render();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "delta2_MHz,delta3_MHz,re,im,abs");
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 8);
    for r in rows {
        let v: Vec<f64> = r.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v.len(), 5);
        assert!((v[4] - v[2].hypot(v[3])).abs() <= 1e-15 * v[4]);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = load_config("fig2").unwrap();
    let run = |sub: &str| {
        let opts = OutputOptions {
            out_dir: dir.path().join(sub),
            svg: true,
            n2: Some(1024),
            n3: Some(64),
            ..Default::default()
        };
        reproduce(Figure::Fig2, &cfg, &opts).unwrap()
    };
    let m = run("a");
    run("b");
    for f in &m.outputs {
        assert_eq!(fs::read(dir.path().join("a").join(f)).unwrap(), fs::read(dir.path().join("b").join(f)).unwrap(), "{f}");
    }
}
