//! S_jk as the second coupling field is strengthened.

use sswm::correlation::{linspace, sweep_omega_c2, Pair};
use sswm::SystemParams;

pub fn run_example() -> sswm::Result<()> {
    let p = SystemParams::fig3();
    let g21 = p.gamma21();
    let values: Vec<f64> = linspace(2.0, 30.0, 8).iter().map(|m| m * g21).collect();
    println!("{:>10} {:>8} {:>8} {:>8}", "wc2/g21", "S12", "S13", "S23");
    for row in sweep_omega_c2(&p, &values) {
        let s = |pair| row.s(pair).unwrap_or(f64::NAN);
        println!(
            "{:>10.2} {:>8.4} {:>8.4} {:>8.4}",
            row.omega_c2 / g21,
            s(Pair::P12),
            s(Pair::P13),
            s(Pair::P23)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sswm::Result<()> {
    run_example()
}
