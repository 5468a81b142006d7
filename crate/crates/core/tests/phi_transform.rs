use num_complex::Complex64 as C64;

use sswm::fft::continuous_ft;
use sswm::grid::UniformAxis;
use sswm::susceptibility::{phi_longitudinal, phi_time_domain, PhaseMismatch};
use sswm::SystemParams;

/// The delta3 transform of the phase-matching factor is a boxcar of height 2π/T
/// over the transit window; its modulus, normalized, matches `phi_time_domain`.
#[test]
fn boxcar_from_numerical_transform() {
    let mut p = SystemParams::fig3();
    p.phase_mismatch_offset = 0.7;
    let width = PhaseMismatch::from_params(&p).slope;
    let n = 1 << 18;
    let axis = UniformAxis::symmetric(2.0e4 / width, n).unwrap();
    let f: Vec<C64> = axis.samples().iter().map(|&d| phi_longitudinal(&p, d)).collect();
    let (t, g) = continuous_ft(&f, &axis);
    let mut num = 0.0;
    let mut den = 0.0;
    for (m, v) in g.iter().enumerate() {
        let tau = t.value(m);
        // skip the two edges, where the discrete transform takes the midpoint value
        if (tau.abs() < 2.0 * t.step) || ((tau - width).abs() < 2.0 * t.step) {
            continue;
        }
        let a = v.norm() * width / std::f64::consts::TAU;
        let b = phi_time_domain(&p, tau);
        num += (a - b) * (a - b);
        den += b * b;
    }
    let rel = (num / den).sqrt();
    assert!(rel < 0.02, "relative L2 {rel}");
}
