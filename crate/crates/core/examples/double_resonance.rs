//! Locates the two resonances of |chi5| for the strong-coupling preset and
//! measures their widths along delta3.

use sswm::params::to_mhz_cyclic;
use sswm::reproduce::chi5_map_axes;
use sswm::susceptibility::{delta3_half_width, grid_eval, ridge_half_width, SpectralFunction};
use sswm::{derived_rates, Coherence, SystemParams};

pub fn run_example() -> sswm::Result<()> {
    let p = SystemParams::fig2();
    let d = derived_rates(&p)?;
    println!("omega_e / 2pi = {:.3} MHz", to_mhz_cyclic(d.omega_e));

    let (a2, a3) = chi5_map_axes(&p, None, None)?;
    let g = grid_eval(&p, SpectralFunction::Chi5, &a2, &a3)?;
    for (i3, i2) in g.local_maxima() {
        let x = a2.value(i2);
        println!(
            "peak at delta2 = {:+.3} MHz, delta3 = {:+.3} MHz, |chi5| = {:.4e}",
            to_mhz_cyclic(x),
            to_mhz_cyclic(a3.value(i3)),
            g.values[[i3, i2]].norm()
        );
    }

    let g61 = p.gamma(Coherence::R61);
    let hw = delta3_half_width(&p, 0.5 * d.omega_e)?;
    let rw = ridge_half_width(&p, 0.5 * d.omega_e)?;
    println!("half-width at fixed delta2: {:.4} gamma_61", hw / g61);
    println!("half-width along the ridge: {:.4} gamma_61", rw / g61);
    Ok(())
}

#[allow(dead_code)]
fn main() -> sswm::Result<()> {
    run_example()
}
