//! Conditional two-photon rates, their temporal and spectral widths, and the
//! energy-time entanglement criterion.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_gaussian, levenberg_marquardt, GaussianFit, LmOptions};
use crate::params::{derived_rates, Coherence, DerivedRates, SystemParams};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};
use crate::waveform::threefold_rate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pair {
    #[serde(rename = "12")]
    P12,
    #[serde(rename = "13")]
    P13,
    #[serde(rename = "23")]
    P23,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::P12, Pair::P13, Pair::P23];

    pub fn label(self) -> &'static str {
        match self {
            Pair::P12 => "12",
            Pair::P13 => "13",
            Pair::P23 => "23",
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", &self.label()[..1], &self.label()[1..])
    }
}

impl FromStr for Pair {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().trim_matches(|c| c == '(' || c == ')').replace(',', "").as_str() {
            "12" => Ok(Pair::P12),
            "13" => Ok(Pair::P13),
            "23" => Ok(Pair::P23),
            other => Err(format!("unknown pair '{other}', expected 12, 13 or 23")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceSource {
    Analytic,
    Marginalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTrace {
    pub pair: Pair,
    pub tau: Vec<f64>,
    pub rate: Vec<f64>,
    pub source: TraceSource,
}

/// `(1 - e^{-a t}) / a`, continuous through `a = 0`.
fn one_minus_exp_over(a: f64, t: f64) -> f64 {
    if a == 0.0 {
        t
    } else {
        -(-a * t).exp_m1() / a
    }
}

fn conditional_with(d: &DerivedRates, g61: f64, pair: Pair, tau: f64) -> f64 {
    if tau < 0.0 {
        return 0.0;
    }
    let (w, ge, g6e) = (d.omega_e, d.gamma_e, d.gamma_6e);
    match pair {
        Pair::P12 => (-2.0 * ge * tau).exp() * (1.0 - (w * tau).cos()) / (2.0 * g61),
        Pair::P13 => {
            let ee = (-2.0 * ge * tau).exp();
            let e61 = (-2.0 * g61 * tau).exp();
            let den = w * w + 4.0 * g6e * g6e;
            let first = ee * one_minus_exp_over(2.0 * g6e, tau);
            let second = (-2.0 * e61 * g6e + ee * w * (w * tau).sin()) / den;
            let third = 2.0 * ee * g6e * (w * tau).cos() / den;
            first - second - third
        }
        Pair::P23 => w * w / (2.0 * ge * (w * w + 4.0 * ge * ge)) * (-2.0 * g61 * tau).exp(),
    }
}

/// Closed-form conditional rate with unit prefactor; zero for negative delay.
pub fn conditional_rate(p: &SystemParams, pair: Pair, tau: f64) -> Result<f64> {
    let d = derived_rates(p)?;
    Ok(conditional_with(&d, p.gamma(Coherence::R61), pair, tau))
}

/// Relative accuracy requested from the marginal quadrature.
pub const MARGINAL_REL_TOL: f64 = 1e-12;
/// Absolute accuracy, as a fraction of integrand peak times integration length.
pub const MARGINAL_ABS_TOL: f64 = 1e-10;

fn sampled_peak(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    (0..=64)
        .map(|k| f(a + (b - a) * k as f64 / 64.0).abs())
        .fold(0.0, f64::max)
}

/// Numerical marginal of the threefold rate over the delay not kept by `pair`.
pub fn marginalize_threefold(p: &SystemParams, pair: Pair, tau: f64) -> Result<f64> {
    let d = derived_rates(p)?;
    let g61 = p.gamma(Coherence::R61);
    let rate = |a: f64, b: f64| threefold_rate(p, a, b).unwrap_or(0.0);
    let opts_for = |peak: f64, length: f64| QuadOptions {
        abs_tol: MARGINAL_ABS_TOL * peak * length,
        rel_tol: MARGINAL_REL_TOL,
        max_intervals: 20_000,
    };
    match pair {
        Pair::P12 => {
            if tau < 0.0 {
                return Ok(0.0);
            }
            let f = |t13: f64| rate(tau, t13);
            let len = 1.0 / (2.0 * g61);
            let peak = sampled_peak(&f, tau, tau + 10.0 * len);
            if peak == 0.0 {
                return Ok(0.0);
            }
            Ok(integrate_to_infinity(f, tau, len, &opts_for(peak, len))?.value)
        }
        Pair::P13 => {
            if tau <= 0.0 {
                return Ok(0.0);
            }
            let f = |t12: f64| rate(t12, tau);
            let peak = sampled_peak(&f, 0.0, tau);
            if peak == 0.0 {
                return Ok(0.0);
            }
            Ok(integrate(f, 0.0, tau, &opts_for(peak, tau))?.value)
        }
        Pair::P23 => {
            if tau < 0.0 {
                return Ok(0.0);
            }
            let f = |t12: f64| rate(t12, t12 + tau);
            let len = 1.0 / (2.0 * d.gamma_e);
            let peak = sampled_peak(&f, 0.0, 10.0 * len);
            Ok(integrate_to_infinity(f, 0.0, len, &opts_for(peak, len))?.value)
        }
    }
}

/// Constant ratio of the (2,3) marginal to `e^{-2 gamma_61 tau}`.
pub fn pair23_marginal_ratio(p: &SystemParams) -> Result<f64> {
    let d = derived_rates(p)?;
    let w2 = d.omega_e * d.omega_e;
    Ok(w2 / (2.0 * d.gamma_e * (w2 + 4.0 * d.gamma_e * d.gamma_e)))
}

pub const TRACE_SAMPLES: usize = 1 << 14;
/// Trace window length in units of the slowest amplitude-squared decay time.
pub const TRACE_DECAY_TIMES: f64 = 12.0;

/// End of the sampling window `[0, 12 / min(2 gamma_e, 2 gamma_61)]`.
pub fn trace_window(p: &SystemParams) -> Result<f64> {
    let d = derived_rates(p)?;
    let slow = (2.0 * d.gamma_e).min(2.0 * p.gamma(Coherence::R61));
    Ok(TRACE_DECAY_TIMES / slow)
}

pub fn trace_axis(p: &SystemParams) -> Result<Vec<f64>> {
    let t = trace_window(p)?;
    let n = TRACE_SAMPLES;
    Ok((0..n).map(|k| t * k as f64 / (n - 1) as f64).collect())
}

/// Closed-form trace on the default window.
pub fn conditional_trace(p: &SystemParams, pair: Pair) -> Result<CorrelationTrace> {
    let d = derived_rates(p)?;
    let g61 = p.gamma(Coherence::R61);
    let tau = trace_axis(p)?;
    let rate = tau.iter().map(|&t| conditional_with(&d, g61, pair, t)).collect();
    Ok(CorrelationTrace {
        pair,
        tau,
        rate,
        source: TraceSource::Analytic,
    })
}

/// Numerically marginalized trace on arbitrary delays.
pub fn marginal_trace(p: &SystemParams, pair: Pair, tau: &[f64]) -> Result<CorrelationTrace> {
    let rate = tau
        .par_iter()
        .map(|&t| marginalize_threefold(p, pair, t))
        .collect::<Result<Vec<f64>>>()?;
    Ok(CorrelationTrace {
        pair,
        tau: tau.to_vec(),
        rate,
        source: TraceSource::Marginalized,
    })
}

fn trapezoid_moments(tau: &[f64], rate: &[f64]) -> (f64, f64, f64) {
    let mut m = (0.0, 0.0, 0.0);
    for k in 1..tau.len() {
        let h = 0.5 * (tau[k] - tau[k - 1]);
        let (a, b) = (rate[k - 1], rate[k]);
        let (ta, tb) = (tau[k - 1], tau[k]);
        m.0 += h * (a + b);
        m.1 += h * (ta * a + tb * b);
        m.2 += h * (ta * ta * a + tb * tb * b);
    }
    m
}

/// Standard deviation of the trace read as an unnormalized density.
pub fn time_spread(trace: &CorrelationTrace) -> Result<f64> {
    let (m0, m1, m2) = trapezoid_moments(&trace.tau, &trace.rate);
    if !(m0 > 0.0) || !m0.is_finite() {
        return Err(Error::ZeroMass);
    }
    let mean = m1 / m0;
    Ok((m2 / m0 - mean * mean).max(0.0).sqrt())
}

/// Zero-padded transform length used for the spectral width.
pub const SPECTRUM_POINTS: usize = 1 << 18;
/// Fit window: spectral bins above this fraction of the peak power.
pub const FIT_WINDOW_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralWidth {
    /// Gaussian sigma in cyclic Hz.
    pub sigma_hz: f64,
    pub fit: GaussianFit,
    pub window_points: usize,
}

/// Power spectrum `|∫ r(t) e^{-2πiνt} dt|^2` of the unit-mass trace, as
/// `(frequency in Hz, power)` sorted by frequency.
pub fn power_spectrum(trace: &CorrelationTrace) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = trace.tau.len();
    if n < 2 {
        return Err(Error::ZeroMass);
    }
    let (m0, _, _) = trapezoid_moments(&trace.tau, &trace.rate);
    if !(m0 > 0.0) || !m0.is_finite() {
        return Err(Error::ZeroMass);
    }
    let dt = trace.tau[1] - trace.tau[0];
    let npad = SPECTRUM_POINTS.max(n.next_power_of_two());
    let mut buf = vec![C64::new(0.0, 0.0); npad];
    for (k, (b, r)) in buf.iter_mut().zip(&trace.rate).enumerate() {
        let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        *b = C64::from(w * dt * r / m0);
    }
    FftPlanner::new().plan_fft_forward(npad).process(&mut buf);
    let df = 1.0 / (npad as f64 * dt);
    let half = npad / 2;
    let mut freq = Vec::with_capacity(npad);
    let mut power = Vec::with_capacity(npad);
    for j in 0..npad {
        let m = (j + half) % npad;
        let f = if m < half { m as f64 } else { m as f64 - npad as f64 };
        freq.push(f * df);
        power.push(buf[m].norm_sqr());
    }
    Ok((freq, power))
}

/// Gaussian sigma of the power spectrum of the unit-mass trace.
pub fn spectral_width(trace: &CorrelationTrace) -> Result<SpectralWidth> {
    let (freq, power) = power_spectrum(trace)?;
    let peak = power.iter().cloned().fold(0.0, f64::max);
    let (x, y): (Vec<f64>, Vec<f64>) = freq
        .iter()
        .zip(&power)
        .filter(|(_, &v)| v > FIT_WINDOW_FRACTION * peak)
        .map(|(&f, &v)| (f, v))
        .unzip();
    if x.len() < 5 {
        return Err(Error::FitNonConvergence(format!(
            "only {} spectral bins above {FIT_WINDOW_FRACTION} of peak",
            x.len()
        )));
    }
    let fit = fit_gaussian(&x, &y)?;
    Ok(SpectralWidth {
        sigma_hz: fit.sigma,
        fit,
        window_points: x.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCriterion {
    pub pair: Pair,
    /// Seconds.
    pub delta_tau: f64,
    /// Cyclic Hz.
    pub delta_nu: f64,
    /// `delta_tau * delta_nu`.
    pub s_value: f64,
    /// `delta_tau * 2π delta_nu`.
    pub s_value_angular: f64,
    pub gaussian_fit: GaussianFit,
}

pub fn criterion_for_trace(trace: &CorrelationTrace) -> Result<PairCriterion> {
    let dt = time_spread(trace)?;
    let w = spectral_width(trace)?;
    Ok(PairCriterion {
        pair: trace.pair,
        delta_tau: dt,
        delta_nu: w.sigma_hz,
        s_value: dt * w.sigma_hz,
        s_value_angular: dt * TAU * w.sigma_hz,
        gaussian_fit: w.fit,
    })
}

/// `S = delta_tau * delta_nu` for one pair, from the closed-form trace.
pub fn entanglement_s(p: &SystemParams, pair: Pair) -> Result<PairCriterion> {
    criterion_for_trace(&conditional_trace(p, pair)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyConvention {
    Cyclic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    /// Convention of `s_value`; the angular product is carried alongside.
    pub convention: FrequencyConvention,
    pub pairs: Vec<PairCriterion>,
}

impl EntanglementReport {
    pub fn get(&self, pair: Pair) -> Option<&PairCriterion> {
        self.pairs.iter().find(|c| c.pair == pair)
    }
}

pub fn entanglement_report(p: &SystemParams) -> Result<EntanglementReport> {
    let pairs = Pair::ALL
        .par_iter()
        .map(|&pair| entanglement_s(p, pair))
        .collect::<Result<Vec<_>>>()?;
    Ok(EntanglementReport {
        convention: FrequencyConvention::Cyclic,
        pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub omega_c2: f64,
    pub outcome: std::result::Result<EntanglementReport, String>,
}

impl SweepRow {
    pub fn s(&self, pair: Pair) -> Option<f64> {
        self.outcome.as_ref().ok()?.get(pair).map(|c| c.s_value)
    }
}

/// Full criterion pipeline at each omega_c2; failing rows are kept and marked.
pub fn sweep_omega_c2(p: &SystemParams, values: &[f64]) -> Vec<SweepRow> {
    values
        .par_iter()
        .map(|&w| SweepRow {
            omega_c2: w,
            outcome: entanglement_report(&p.with_omega_c2(w)).map_err(|e| e.to_string()),
        })
        .collect()
}

/// `n` values evenly spaced over `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Interior local minima, located by a parabola through the three nearest samples.
pub fn local_minima(trace: &CorrelationTrace) -> Vec<(f64, f64)> {
    let (t, r) = (&trace.tau, &trace.rate);
    let mut out = Vec::new();
    for k in 1..r.len().saturating_sub(1) {
        if r[k] < r[k - 1] && r[k] <= r[k + 1] {
            out.push(parabola_vertex(t[k - 1], t[k], t[k + 1], r[k - 1], r[k], r[k + 1]));
        }
    }
    out
}

/// Interior local maxima, same refinement.
pub fn local_maxima(trace: &CorrelationTrace) -> Vec<(f64, f64)> {
    let (t, r) = (&trace.tau, &trace.rate);
    let mut out = Vec::new();
    for k in 1..r.len().saturating_sub(1) {
        if r[k] > r[k - 1] && r[k] >= r[k + 1] {
            out.push(parabola_vertex(t[k - 1], t[k], t[k + 1], r[k - 1], r[k], r[k + 1]));
        }
    }
    out
}

fn parabola_vertex(t0: f64, t1: f64, t2: f64, y0: f64, y1: f64, y2: f64) -> (f64, f64) {
    let h = t1 - t0;
    let den = y0 - 2.0 * y1 + y2;
    if den == 0.0 || (t2 - t1 - h).abs() > 1e-9 * h {
        return (t1, y1);
    }
    let u = 0.5 * (y0 - y2) / den;
    (t1 + u * h, y1 - 0.25 * (y0 - y2) * u)
}

/// First zero of the fringe after the origin.
pub fn first_minimum_after_origin(trace: &CorrelationTrace) -> Option<f64> {
    local_minima(trace).first().map(|m| m.0)
}

/// Largest `(max - min) / (max + min)` over adjacent local maximum/minimum pairs.
pub fn oscillation_contrast(trace: &CorrelationTrace) -> f64 {
    let maxima = local_maxima(trace);
    let minima = local_minima(trace);
    let mut best: f64 = 0.0;
    for &(tm, ym) in &minima {
        if let Some(&(_, yx)) = maxima.iter().rev().find(|m| m.0 < tm) {
            best = best.max((yx - ym) / (yx + ym));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillationFit {
    /// Seconds.
    pub period: f64,
    pub decay: f64,
    pub amplitude: f64,
    pub rms_residual: f64,
}

/// Fits `A e^{-k t} (1 - cos(w t))` to a trace; initial `w` from the spacing of
/// the first two minima, `k` from the first two maxima.
pub fn fit_oscillation(trace: &CorrelationTrace) -> Result<OscillationFit> {
    let minima = local_minima(trace);
    let maxima = local_maxima(trace);
    if minima.len() < 2 || maxima.len() < 2 {
        return Err(Error::FitNonConvergence("fewer than two fringes in trace".into()));
    }
    let period0 = minima[1].0 - minima[0].0;
    let w0 = TAU / period0;
    let k0 = (maxima[0].1 / maxima[1].1).ln() / (maxima[1].0 - maxima[0].0);
    let a0 = maxima[0].1 / ((-k0 * maxima[0].0).exp() * (1.0 - (w0 * maxima[0].0).cos())).max(1e-300);
    // fit in units of the first period to keep the normal equations balanced
    let x: Vec<f64> = trace.tau.iter().map(|t| t / period0).collect();
    let y: Vec<f64> = trace.rate.iter().map(|r| r / maxima[0].1).collect();
    let model = |t: f64, q: &[f64]| q[0] * (-q[1] * t).exp() * (1.0 - (q[2] * t).cos());
    let q0 = [a0 / maxima[0].1, k0 * period0, w0 * period0];
    let scales = [1.0, 1.0, 1.0];
    let fit = levenberg_marquardt(model, &x, &y, &q0, &scales, &LmOptions::default())?;
    Ok(OscillationFit {
        period: TAU / fit.params[2] * period0,
        decay: fit.params[1] / period0,
        amplitude: fit.params[0] * maxima[0].1,
        rms_residual: fit.rms_residual * maxima[0].1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(t, ln r)`.
pub fn log_linear_fit(tau: &[f64], rate: &[f64]) -> Result<LogLinearFit> {
    if tau.len() < 3 || rate.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::FitNonConvergence("log-linear fit needs 3+ positive samples".into()));
    }
    let n = tau.len() as f64;
    let y: Vec<f64> = rate.iter().map(|r| r.ln()).collect();
    let mx = tau.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = tau.iter().map(|t| (t - mx) * (t - mx)).sum();
    let sxy: f64 = tau.iter().zip(&y).map(|(t, v)| (t - mx) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let ss_res: f64 = tau
        .iter()
        .zip(&y)
        .map(|(t, v)| {
            let e = v - (intercept + slope * t);
            e * e
        })
        .sum();
    Ok(LogLinearFit {
        slope,
        intercept,
        r_squared: 1.0 - ss_res / ss_tot,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn fig3() -> SystemParams {
        SystemParams::fig3()
    }

    #[test]
    fn pair12_zeros_at_fringe_period() {
        let p = fig3();
        let d = derived_rates(&p).unwrap();
        for n in 1..4 {
            let t = n as f64 * TAU / d.omega_e;
            let peak = conditional_rate(&p, Pair::P12, PI / d.omega_e).unwrap();
            assert!(conditional_rate(&p, Pair::P12, t).unwrap() < 1e-14 * peak);
        }
        assert!((TAU / d.omega_e * 1e9 - 33.4).abs() < 0.1);
    }

    #[test]
    fn pair23_is_pure_exponential() {
        let p = fig3();
        let g61 = p.gamma(Coherence::R61);
        let r0 = conditional_rate(&p, Pair::P23, 0.0).unwrap();
        for t in [1e-9, 10e-9, 50e-9] {
            let r = conditional_rate(&p, Pair::P23, t).unwrap();
            assert!((r / r0 - (-2.0 * g61 * t).exp()).abs() < 1e-14);
        }
        assert_eq!(conditional_rate(&p, Pair::P23, -1e-9).unwrap(), 0.0);
    }

    #[test]
    fn pair13_vanishes_at_origin() {
        let p = fig3();
        let r = conditional_rate(&p, Pair::P13, 0.0).unwrap();
        let scale = conditional_rate(&p, Pair::P13, 30e-9).unwrap();
        assert!(r.abs() < 1e-14 * scale);
        assert_eq!(marginalize_threefold(&p, Pair::P13, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn pair13_stable_when_rates_coincide() {
        let mut p = fig3();
        let ge = derived_rates(&p).unwrap().gamma_e;
        p.gammas.set(Coherence::R61, ge);
        for t in [5e-9, 40e-9] {
            let c = conditional_rate(&p, Pair::P13, t).unwrap();
            let m = marginalize_threefold(&p, Pair::P13, t).unwrap();
            assert!((c - m).abs() < 1e-9 * m, "{c} {m}");
        }
    }

    #[test]
    fn marginals_match_closed_forms() {
        let p = fig3();
        for t in [2e-9, 13e-9, 47e-9, 120e-9] {
            for pair in Pair::ALL {
                let c = conditional_rate(&p, pair, t).unwrap();
                let m = marginalize_threefold(&p, pair, t).unwrap();
                assert!((m - c).abs() < 1e-8 * c, "{pair} {t}: {m} vs {c}");
            }
        }
    }

    #[test]
    fn pair23_marginal_over_exponential_is_constant() {
        let p = fig3();
        let g61 = p.gamma(Coherence::R61);
        let k = pair23_marginal_ratio(&p).unwrap();
        for t in [0.0, 7e-9, 90e-9] {
            let m = marginalize_threefold(&p, Pair::P23, t).unwrap();
            assert!((m / (-2.0 * g61 * t).exp() / k - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn pair23_spread_is_coherence_time() {
        let p = fig3();
        let t = conditional_trace(&p, Pair::P23).unwrap();
        let s = time_spread(&t).unwrap();
        let exact = 1.0 / (2.0 * p.gamma(Coherence::R61));
        assert!((s / exact - 1.0).abs() < 1e-6, "{}", s / exact - 1.0);
    }

    #[test]
    fn scale_invariance() {
        let p = fig3();
        let t = conditional_trace(&p, Pair::P12).unwrap();
        let mut u = t.clone();
        u.rate.iter_mut().for_each(|r| *r *= 7.25e11);
        let a = criterion_for_trace(&t).unwrap();
        let b = criterion_for_trace(&u).unwrap();
        assert!((a.delta_tau / b.delta_tau - 1.0).abs() < 1e-12);
        assert!((a.delta_nu / b.delta_nu - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gaussian_trace_self_check() {
        let sigma_t = 20e-9;
        let tau: Vec<f64> = (0..TRACE_SAMPLES).map(|k| 400e-9 * k as f64 / (TRACE_SAMPLES - 1) as f64).collect();
        let rate = tau.iter().map(|t| (-0.5 * ((t - 200e-9) / sigma_t).powi(2)).exp()).collect();
        let trace = CorrelationTrace {
            pair: Pair::P12,
            tau,
            rate,
            source: TraceSource::Analytic,
        };
        let w = spectral_width(&trace).unwrap();
        let expect = 1.0 / (2.0 * 2f64.sqrt() * PI * sigma_t);
        assert!((w.sigma_hz / expect - 1.0).abs() < 1e-3, "{}", w.sigma_hz / expect);
        let s = time_spread(&trace).unwrap();
        assert!((s / sigma_t - 1.0).abs() < 1e-6);
        // transform-limited product in this convention
        assert!((s * w.sigma_hz - 1.0 / (2.0 * 2f64.sqrt() * PI)).abs() < 1e-4);
    }

    #[test]
    fn zero_trace_has_no_spread() {
        let trace = CorrelationTrace {
            pair: Pair::P13,
            tau: vec![0.0, 1.0, 2.0],
            rate: vec![0.0; 3],
            source: TraceSource::Analytic,
        };
        assert_eq!(time_spread(&trace), Err(Error::ZeroMass));
    }

    #[test]
    fn oscillation_fit_recovers_period() {
        let p = fig3();
        let d = derived_rates(&p).unwrap();
        let f = fit_oscillation(&conditional_trace(&p, Pair::P12).unwrap()).unwrap();
        assert!((f.period * d.omega_e / TAU - 1.0).abs() < 1e-6);
        assert!((f.decay / (2.0 * d.gamma_e) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn pair_parsing() {
        assert_eq!("12".parse::<Pair>().unwrap(), Pair::P12);
        assert_eq!("(1,3)".parse::<Pair>().unwrap(), Pair::P13);
        assert!("14".parse::<Pair>().is_err());
        assert_eq!(Pair::P23.to_string(), "(2,3)");
    }

    #[test]
    fn log_linear_exact() {
        let t: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let r: Vec<f64> = t.iter().map(|x| 2.0 * (-0.5 * x).exp()).collect();
        let f = log_linear_fit(&t, &r).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-14);
        assert!(f.r_squared > 1.0 - 1e-14);
    }
}
