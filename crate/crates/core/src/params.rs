//! Physical inputs, unit conversions and derived rates.
//!
//! Every rate, detuning and Rabi frequency is stored in rad/s.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::Index;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cyclic MHz to rad/s.
pub fn from_mhz_cyclic(v: f64) -> f64 {
    v * 1.0e6 * TAU
}

/// rad/s to cyclic MHz.
pub fn to_mhz_cyclic(w: f64) -> f64 {
    w / TAU / 1.0e6
}

/// The fifteen atomic coherences carried by the six-level model, in solver order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Coherence {
    R21,
    R31,
    R41,
    R51,
    R61,
    R32,
    R42,
    R43,
    R52,
    R53,
    R54,
    R62,
    R63,
    R64,
    R65,
}

impl Coherence {
    pub const ALL: [Coherence; 15] = [
        Coherence::R21,
        Coherence::R31,
        Coherence::R41,
        Coherence::R51,
        Coherence::R61,
        Coherence::R32,
        Coherence::R42,
        Coherence::R43,
        Coherence::R52,
        Coherence::R53,
        Coherence::R54,
        Coherence::R62,
        Coherence::R63,
        Coherence::R64,
        Coherence::R65,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Upper and lower level, e.g. `(6, 1)` for `R61`.
    pub fn levels(self) -> (u8, u8) {
        use Coherence::*;
        match self {
            R21 => (2, 1),
            R31 => (3, 1),
            R41 => (4, 1),
            R51 => (5, 1),
            R61 => (6, 1),
            R32 => (3, 2),
            R42 => (4, 2),
            R43 => (4, 3),
            R52 => (5, 2),
            R53 => (5, 3),
            R54 => (5, 4),
            R62 => (6, 2),
            R63 => (6, 3),
            R64 => (6, 4),
            R65 => (6, 5),
        }
    }

    /// Accepts either ordering of the pair.
    pub fn from_levels(i: u8, j: u8) -> Option<Coherence> {
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        Coherence::ALL.iter().copied().find(|c| c.levels() == (hi, lo))
    }

    /// Config key, e.g. `gamma_61`.
    pub fn gamma_key(self) -> String {
        let (i, j) = self.levels();
        format!("gamma_{i}{j}")
    }
}

impl fmt::Display for Coherence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j) = self.levels();
        write!(f, "rho{i}{j}")
    }
}

/// Dephasing rates gamma_ij in rad/s, one per coherence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dephasing([f64; 15]);

impl Dephasing {
    pub fn uniform(gamma: f64) -> Self {
        Dephasing([gamma; 15])
    }

    pub fn with(mut self, c: Coherence, gamma: f64) -> Self {
        self.0[c.index()] = gamma;
        self
    }

    pub fn set(&mut self, c: Coherence, gamma: f64) {
        self.0[c.index()] = gamma;
    }

    pub fn get(&self, c: Coherence) -> f64 {
        self.0[c.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Coherence, f64)> + '_ {
        Coherence::ALL.iter().map(move |&c| (c, self.0[c.index()]))
    }
}

impl Index<Coherence> for Dephasing {
    type Output = f64;
    fn index(&self, c: Coherence) -> &f64 {
        &self.0[c.index()]
    }
}

/// Sign of the `|omega_c1|^2` term in the `(G21 G31 ± |omega_c1|^2)` factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DenominatorSign {
    Plus,
    Minus,
}

impl DenominatorSign {
    pub fn factor(self) -> f64 {
        match self {
            DenominatorSign::Plus => 1.0,
            DenominatorSign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            DenominatorSign::Plus => DenominatorSign::Minus,
            DenominatorSign::Minus => DenominatorSign::Plus,
        }
    }
}

/// All physical inputs of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega_p: f64,
    pub omega_c1: f64,
    pub omega_c2: f64,
    pub delta_p: f64,
    pub delta_c1: f64,
    pub delta_c2: f64,
    pub gammas: Dephasing,
    /// L / v_s3 in seconds.
    pub medium_transit_time: f64,
    /// Constant part of the phase mismatch, rad.
    pub phase_mismatch_offset: f64,
    /// v_s3 / c.
    pub signal_group_velocity_ratio: f64,
    pub denominator_sign: DenominatorSign,
}

pub const DEFAULT_TRANSIT_TIME: f64 = 3.0e-9;

/// Pump Rabi frequency used by the presets, as a multiple of gamma_21.
pub const PRESET_PUMP_RATIO: f64 = 0.01;

impl SystemParams {
    /// Parameter set of the double-resonance map: omega_c1 = omega_c2 = 20 gamma_21.
    pub fn fig2() -> Self {
        Self::preset_with_coupling(20.0)
    }

    /// Damped-Rabi parameter set: omega_c1 = omega_c2 = 5 gamma_21.
    pub fn fig3() -> Self {
        Self::preset_with_coupling(5.0)
    }

    fn preset_with_coupling(ratio: f64) -> Self {
        let g21 = from_mhz_cyclic(3.0);
        let gammas = Dephasing::uniform(g21)
            .with(Coherence::R41, 1.0 * g21)
            .with(Coherence::R51, 0.2 * g21)
            .with(Coherence::R61, 1.0 * g21);
        SystemParams {
            omega_p: PRESET_PUMP_RATIO * g21,
            omega_c1: ratio * g21,
            omega_c2: ratio * g21,
            delta_p: from_mhz_cyclic(-1000.0),
            delta_c1: from_mhz_cyclic(1000.0),
            delta_c2: from_mhz_cyclic(0.0),
            gammas,
            medium_transit_time: DEFAULT_TRANSIT_TIME,
            phase_mismatch_offset: 0.0,
            signal_group_velocity_ratio: 0.0,
            denominator_sign: DenominatorSign::Plus,
        }
    }

    pub fn gamma(&self, c: Coherence) -> f64 {
        self.gammas[c]
    }

    pub fn gamma21(&self) -> f64 {
        self.gammas[Coherence::R21]
    }

    pub fn with_omega_c2(mut self, omega_c2: f64) -> Self {
        self.omega_c2 = omega_c2;
        self
    }

    pub fn with_omega_p(mut self, omega_p: f64) -> Self {
        self.omega_p = omega_p;
        self
    }

    pub fn with_sign(mut self, sign: DenominatorSign) -> Self {
        self.denominator_sign = sign;
        self
    }

    pub fn with_transit_time(mut self, t: f64) -> Self {
        self.medium_transit_time = t;
        self
    }
}

/// Oscillation and damping rates of the damped-Rabi regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedRates {
    pub omega_e: f64,
    pub gamma_e: f64,
    pub gamma_6e: f64,
}

pub fn derived_rates(p: &SystemParams) -> Result<DerivedRates> {
    let g41 = p.gamma(Coherence::R41);
    let g51 = p.gamma(Coherence::R51);
    let disc = 4.0 * p.omega_c2 * p.omega_c2 - (g41 - g51) * (g41 - g51);
    if disc < 0.0 {
        return Err(Error::OverdampedRegime { discriminant: disc });
    }
    let gamma_e = 0.5 * (g41 + g51);
    Ok(DerivedRates {
        omega_e: disc.sqrt(),
        gamma_e,
        gamma_6e: p.gamma(Coherence::R61) - gamma_e,
    })
}

/// Complex relaxation coefficients evaluated at one spectral point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSet([C64; 15]);

impl GammaSet {
    pub fn get(&self, c: Coherence) -> C64 {
        self.0[c.index()]
    }
}

impl Index<Coherence> for GammaSet {
    type Output = C64;
    fn index(&self, c: Coherence) -> &C64 {
        &self.0[c.index()]
    }
}

pub fn gamma_set(p: &SystemParams, delta2: f64, delta3: f64) -> GammaSet {
    use Coherence::*;
    let dp = p.delta_p;
    let dc1 = p.delta_c1;
    let dc2 = p.delta_c2;
    let detuning = |c: Coherence| -> f64 {
        match c {
            R61 => delta3,
            R51 | R41 => dp + dc1 + delta3 + delta2,
            R21 => dp,
            R31 => dp + dc1,
            R32 => dc1,
            R42 | R52 => dc1 + delta3 + delta2,
            R43 | R53 => -(delta3 + delta2),
            R54 => dc2,
            R62 => -dp + delta3,
            R63 => -delta3,
            R64 => -delta2,
            R65 => delta2,
        }
    };
    let mut out = [C64::new(0.0, 0.0); 15];
    for c in Coherence::ALL {
        out[c.index()] = C64::new(-p.gamma(c), detuning(c));
    }
    GammaSet(out)
}

/// Largest transit time, in units of the 1/(2 gamma_61) decay time, for which
/// the phase-matching factor stays enveloped by the susceptibility.
pub const TRANSIT_REGIME_MAX_RATIO: f64 = 0.5;

/// Outcome of [`validate_params`]. Empty lists mean a clean parameter set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.warnings.is_empty()
    }

    pub fn into_result(self) -> Result<ValidationReport> {
        if self.is_valid() {
            Ok(self)
        } else {
            Err(Error::InvalidParams(self.violations))
        }
    }
}

/// `L / v_s3` measured against the 1/(2 gamma_61) coherence time.
pub fn transit_regime_ratio(p: &SystemParams) -> f64 {
    p.medium_transit_time * 2.0 * p.gamma(Coherence::R61)
}

pub fn weak_pump_ok(p: &SystemParams) -> bool {
    let bound = 0.01
        * (p.delta_p * p.delta_p).min(p.gamma(Coherence::R21) * p.gamma(Coherence::R31));
    p.omega_p * p.omega_p < bound
}

pub fn validate_params(p: &SystemParams) -> ValidationReport {
    let mut r = ValidationReport::default();
    for (c, g) in p.gammas.iter() {
        if !(g > 0.0) || !g.is_finite() {
            r.violations
                .push(format!("gamma must be positive: {} = {g}", c.gamma_key()));
        }
    }
    for (name, v) in [
        ("omega_p", p.omega_p),
        ("omega_c1", p.omega_c1),
        ("omega_c2", p.omega_c2),
    ] {
        if !(v >= 0.0) || !v.is_finite() {
            r.violations
                .push(format!("Rabi frequency must be non-negative: {name} = {v}"));
        }
    }
    for (name, v) in [
        ("delta_p", p.delta_p),
        ("delta_c1", p.delta_c1),
        ("delta_c2", p.delta_c2),
        ("phase_mismatch_offset", p.phase_mismatch_offset),
        ("signal_group_velocity_ratio", p.signal_group_velocity_ratio),
    ] {
        if !v.is_finite() {
            r.violations.push(format!("{name} must be finite"));
        }
    }
    if p.signal_group_velocity_ratio < 0.0 {
        r.violations.push(format!(
            "signal_group_velocity_ratio must be non-negative: {}",
            p.signal_group_velocity_ratio
        ));
    }
    if !(p.medium_transit_time > 0.0) || !p.medium_transit_time.is_finite() {
        r.violations.push(format!(
            "medium_transit_time must be positive: {}",
            p.medium_transit_time
        ));
    }
    if !r.is_valid() {
        return r;
    }

    if !weak_pump_ok(p) {
        r.warnings.push(
            "weak-pump approximation violated: |omega_p|^2 >= 0.01 min(delta_p^2, gamma_21 gamma_31)"
                .to_string(),
        );
    }
    let mismatch = p.delta_p + p.delta_c1;
    if mismatch != 0.0 {
        r.warnings.push(format!(
            "two-photon resonance deviation: delta_p + delta_c1 = {mismatch:e} rad/s ({} gamma_21)",
            mismatch / p.gamma21()
        ));
    }
    if let Err(e) = derived_rates(p) {
        r.warnings.push(format!("damped-Rabi formulas unavailable: {e}"));
    }
    let ratio = transit_regime_ratio(p);
    if ratio > TRANSIT_REGIME_MAX_RATIO {
        r.warnings.push(format!(
            "transit-time regime: L/v_s3 is {ratio:.3} of 1/(2 gamma_61); phase matching is no longer enveloped by chi5"
        ));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig3_rates() {
        let p = SystemParams::fig3();
        let d = derived_rates(&p).unwrap();
        let g = p.gamma21();
        assert!((d.omega_e / g - (100.0f64 - 0.64).sqrt()).abs() < 1e-12);
        assert!((d.omega_e / g - 9.968).abs() < 1e-3);
        let period_ns = TAU / d.omega_e * 1e9;
        assert!((period_ns - 33.44).abs() < 0.01, "{period_ns}");
        assert!((d.gamma_e / g - 0.6).abs() < 1e-12);
        assert!((d.gamma_6e / g - 0.4).abs() < 1e-12);
    }

    #[test]
    fn symmetric_dephasing() {
        let g = 2.0e7;
        let mut p = SystemParams::fig3();
        p.gammas = Dephasing::uniform(g);
        let d = derived_rates(&p).unwrap();
        assert_eq!(d.gamma_e, g);
        assert_eq!(d.omega_e, 2.0 * p.omega_c2);
    }

    #[test]
    fn critical_damping_boundary() {
        let mut p = SystemParams::fig3();
        p.omega_c2 = 0.5 * (p.gamma(Coherence::R41) - p.gamma(Coherence::R51));
        assert_eq!(derived_rates(&p).unwrap().omega_e, 0.0);
        p.omega_c2 *= 0.99;
        assert!(matches!(
            derived_rates(&p),
            Err(Error::OverdampedRegime { .. })
        ));
    }

    #[test]
    fn on_resonance_gammas() {
        let p = SystemParams::fig2();
        let g = gamma_set(&p, 0.0, 0.0);
        assert_eq!(g[Coherence::R51], C64::new(-p.gamma(Coherence::R51), 0.0));
        assert_eq!(g[Coherence::R41], C64::new(-p.gamma(Coherence::R41), 0.0));
        assert_eq!(g[Coherence::R61], C64::new(-p.gamma(Coherence::R61), 0.0));
        let g61 = p.gamma(Coherence::R61);
        let g = gamma_set(&p, 0.0, g61);
        assert_eq!(g[Coherence::R61], C64::new(-g61, g61));
    }

    #[test]
    fn peak_identity() {
        let p = SystemParams::fig2();
        let d = derived_rates(&p).unwrap();
        let g = gamma_set(&p, d.omega_e / 2.0, 0.0);
        let y = g[Coherence::R41] * g[Coherence::R51] + p.omega_c2 * p.omega_c2;
        let expect = d.gamma_e * (d.gamma_e * d.gamma_e + d.omega_e * d.omega_e).sqrt();
        assert!((y.norm() - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn presets_are_clean() {
        assert!(validate_params(&SystemParams::fig2()).is_clean());
        assert!(validate_params(&SystemParams::fig3()).is_clean());
    }

    #[test]
    fn zero_gamma_is_violation() {
        let mut p = SystemParams::fig2();
        p.gammas.set(Coherence::R21, 0.0);
        let r = validate_params(&p);
        assert!(r.violations.iter().any(|v| v.contains("gamma must be positive")));
    }

    #[test]
    fn strong_pump_warns() {
        let mut p = SystemParams::fig2();
        p.omega_p = p.delta_p.abs();
        let r = validate_params(&p);
        assert!(r.is_valid());
        assert!(r.warnings.iter().any(|w| w.contains("weak-pump")));
    }

    #[test]
    fn long_transit_time_warns() {
        let p = SystemParams::fig3().with_transit_time(30e-9);
        let r = validate_params(&p);
        assert!(r.warnings.iter().any(|w| w.contains("transit-time regime")));
        assert!((transit_regime_ratio(&SystemParams::fig3()) - 0.113).abs() < 1e-3);
    }

    #[test]
    fn coherence_lookup() {
        for c in Coherence::ALL {
            let (i, j) = c.levels();
            assert_eq!(Coherence::from_levels(i, j), Some(c));
            assert_eq!(Coherence::from_levels(j, i), Some(c));
        }
        assert_eq!(Coherence::from_levels(2, 2), None);
        assert_eq!(Coherence::R61.gamma_key(), "gamma_61");
    }
}
