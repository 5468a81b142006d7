//! Two-photon rates with the third photon traced out: closed forms against
//! numerical marginals of the threefold rate.

use sswm::correlation::{conditional_rate, marginalize_threefold, Pair};
use sswm::SystemParams;

pub fn run_example() -> sswm::Result<()> {
    let p = SystemParams::fig3();
    println!("{:>6} {:>8} {:>14} {:>14} {:>10}", "pair", "tau/ns", "closed", "marginal", "rel");
    for pair in Pair::ALL {
        for tau in [4e-9, 20e-9, 60e-9] {
            let c = conditional_rate(&p, pair, tau)?;
            let m = marginalize_threefold(&p, pair, tau)?;
            println!("{pair:>6} {:>8.1} {c:>14.6e} {m:>14.6e} {:>10.2e}", tau * 1e9, (m - c).abs() / c);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sswm::Result<()> {
    run_example()
}
