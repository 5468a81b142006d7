//! Temporal spread, spectral width and S for every photon pair.

use sswm::correlation::entanglement_report;
use sswm::SystemParams;

pub fn run_example() -> sswm::Result<()> {
    let r = entanglement_report(&SystemParams::fig3())?;
    for c in &r.pairs {
        println!(
            "pair {}: delta_tau = {:.2} ns, delta_nu = {:.3} MHz, S = {:.4} (angular {:.4})",
            c.pair,
            c.delta_tau * 1e9,
            c.delta_nu / 1e6,
            c.s_value,
            c.s_value_angular
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sswm::Result<()> {
    run_example()
}
