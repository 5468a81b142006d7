//! Solves the fifteen coherence equations directly and compares the
//! finite-difference susceptibilities with the closed forms.

use sswm::oracle::{extract_chi5_numeric, extract_chi_linear, steady_state, LinearSignal, SignalSeeds};
use sswm::susceptibility::{chi5, chi_s1, chi_s3};
use sswm::{derived_rates, SystemParams};

pub fn run_example() -> sswm::Result<()> {
    let p = SystemParams::fig3();
    let d = derived_rates(&p)?;

    let s = steady_state(&p, &SignalSeeds::zero(), 0.0, 0.0)?;
    println!("condition number {:.3e}, residual {:.3e}", s.condition, s.residual);

    for (x, y) in [(0.5 * d.omega_e, 0.0), (-0.3 * d.omega_e, 0.5 * p.gamma21())] {
        let a = chi5(&p, x, y)?;
        let b = extract_chi5_numeric(&p, x, y)?;
        println!("chi5   closed {a:.5e}  oracle {b:.5e}  rel {:.2e}", (a - b).norm() / a.norm());
        let a = chi_s3(&p, y);
        let b = extract_chi_linear(&p, LinearSignal::S3, x, y)?;
        println!("chi_s3 closed {a:.5e}  oracle {b:.5e}  rel {:.2e}", (a - b).norm() / a.norm());
        let a = chi_s1(&p, x, y);
        let b = extract_chi_linear(&p, LinearSignal::S1, x, y)?;
        println!("chi_s1 closed {a:.5e}  oracle {b:.5e}  rel {:.2e}", (a - b).norm() / a.norm());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sswm::Result<()> {
    run_example()
}
