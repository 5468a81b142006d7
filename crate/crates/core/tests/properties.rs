use proptest::prelude::*;

use sswm::config::{parse_config, to_config_toml, GridOverrides};
use sswm::correlation::{conditional_rate, Pair};
use sswm::oracle::Rho54Coupling;
use sswm::params::from_mhz_cyclic;
use sswm::susceptibility::phi;
use sswm::waveform::{threefold_rate, triphoton_waveform_analytic};
use sswm::{derived_rates, gamma_set, validate_params, Coherence, SystemParams};

fn params() -> impl Strategy<Value = SystemParams> {
    (1.0..10.0f64, 0.05..1.0f64, 3.0..40.0f64, 3.0..40.0f64, 0.0..2.0f64, 1.0..60.0f64).prop_map(
        |(g21_mhz, r51, c1, c2, r61, tm_ns)| {
            let mut p = SystemParams::fig2();
            let g21 = from_mhz_cyclic(g21_mhz);
            p.gammas = sswm::params::Dephasing::uniform(g21)
                .with(Coherence::R51, r51 * g21)
                .with(Coherence::R61, (0.2 + r61) * g21);
            p.omega_p = 0.01 * g21;
            p.omega_c1 = c1 * g21;
            p.omega_c2 = c2 * g21;
            p.medium_transit_time = tm_ns * 1e-9;
            p
        },
    )
}

proptest! {
    #[test]
    fn damping_is_minus_gamma(p in params(), d2 in -1e9..1e9f64, d3 in -1e9..1e9f64) {
        let g = gamma_set(&p, d2, d3);
        for c in Coherence::ALL {
            prop_assert_eq!(g[c].re, -p.gamma(c));
        }
    }

    #[test]
    fn phase_matching_factor_bounded(x in -1e4..1e4f64) {
        let z = phi(x);
        prop_assert!(z.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn effective_rabi_grows_with_coupling(p in params(), k in 1.001..3.0f64) {
        let a = derived_rates(&p).unwrap().omega_e;
        let b = derived_rates(&p.with_omega_c2(k * p.omega_c2)).unwrap().omega_e;
        prop_assert!(b > a);
    }

    #[test]
    fn validation_is_pure(p in params()) {
        let before = p;
        let a = validate_params(&p);
        let b = validate_params(&p);
        prop_assert_eq!(a, b);
        prop_assert_eq!(p, before);
    }

    #[test]
    fn rate_is_half_squared_amplitude(p in params(), t12 in 0.0..200e-9f64, extra in 0.0..200e-9f64) {
        let t13 = t12 + extra;
        let r = threefold_rate(&p, t12, t13).unwrap();
        let w = triphoton_waveform_analytic(&p, t12, t13).unwrap();
        prop_assert!((r - 0.5 * w.norm_sqr()).abs() <= 1e-12 * r.max(1e-300));
    }

    #[test]
    fn conditional_rates_non_negative(p in params(), tau in 0.0..300e-9f64) {
        for pair in Pair::ALL {
            let r = conditional_rate(&p, pair, tau).unwrap();
            // P13 is a difference of terms; allow rounding below zero
            prop_assert!(r >= -1e-12 * conditional_rate(&p, pair, 1e-9).unwrap().abs().max(1e-30), "{pair} {r}");
        }
    }

    #[test]
    fn config_round_trip(p in params(), offset in -3.0..3.0f64) {
        let mut p = p;
        p.phase_mismatch_offset = offset;
        let text = to_config_toml(&p, Rho54Coupling::Lowering, &GridOverrides::default());
        prop_assert_eq!(parse_config(&text).unwrap().params, p);
    }
}
