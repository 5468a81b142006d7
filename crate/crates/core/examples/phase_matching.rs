//! The longitudinal phase-matching factor and how much it reshapes the
//! threefold map at two medium transit times.

use sswm::params::{transit_regime_ratio, validate_params};
use sswm::susceptibility::{phi, phi_time_domain};
use sswm::waveform::{phase_matching_effect, TransformGrid};
use sswm::SystemParams;

pub fn run_example() -> sswm::Result<()> {
    for x in [0.0, 1.0, std::f64::consts::PI, 2.0 * std::f64::consts::PI] {
        let z = phi(x);
        println!("phi({x:.3}): |phi| = {:.4}, arg = {:.4}", z.norm(), z.arg());
    }
    for t in [3e-9, 30e-9] {
        let p = SystemParams::fig3().with_transit_time(t);
        let warned = validate_params(&p).warnings.iter().any(|w| w.contains("transit"));
        let grid = TransformGrid::for_params(&p)?;
        let effect = phase_matching_effect(&p, &grid)?;
        println!(
            "L/v = {:.0} ns: ratio {:.3}, warning {warned}, boxcar at 1 ns = {}, L2 change {:.3}",
            t * 1e9,
            transit_regime_ratio(&p),
            phi_time_domain(&p, 1e-9),
            effect
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sswm::Result<()> {
    run_example()
}
