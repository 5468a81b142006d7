//! Triphoton waveform and threefold coincidence rate, from the residue
//! solution and from a numerical 2D transform of the spectral kernel.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::continuous_ft_2d;
use crate::grid::UniformAxis;
use crate::params::{derived_rates, gamma_set, Coherence, SystemParams};
use crate::susceptibility::{check_resolution, grid_eval_for, pump_factor, GridPurpose, SpectralFunction, SpectralGrid2D};

fn step(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Two-delay amplitude with unit prefactor; zero outside `0 <= tau12 <= tau13`.
pub fn triphoton_waveform_analytic(p: &SystemParams, tau12: f64, tau13: f64) -> Result<C64> {
    let d = derived_rates(p)?;
    if tau12 < 0.0 || tau13 < tau12 {
        return Ok(C64::new(0.0, 0.0));
    }
    let half = 0.5 * d.omega_e * tau12;
    let env = (-d.gamma_e * tau12 - p.gamma(Coherence::R61) * (tau13 - tau12)).exp();
    Ok((C64::cis(half) - C64::cis(-half)) * env)
}

/// Threefold coincidence rate with unit prefactor.
pub fn threefold_rate(p: &SystemParams, tau12: f64, tau13: f64) -> Result<f64> {
    let d = derived_rates(p)?;
    Ok(rate_with(&d, p.gamma(Coherence::R61), tau12, tau13))
}

fn rate_with(d: &crate::params::DerivedRates, g61: f64, tau12: f64, tau13: f64) -> f64 {
    let support = step(tau12) * step(tau13 - tau12);
    if support == 0.0 {
        return 0.0;
    }
    // 2 sin^2(x/2) rather than 1 - cos x, to keep precision at short delays
    let s = (0.5 * d.omega_e * tau12).sin();
    (-2.0 * d.gamma_e * tau12 - 2.0 * g61 * (tau13 - tau12)).exp() * 2.0 * s * s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveformSource {
    Analytic,
    Transform,
}

/// Peak-normalized rates `rates[[i13, i12]]`; `normalization` is the raw peak.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformGrid2D {
    pub axis12: UniformAxis,
    pub axis13: UniformAxis,
    pub rates: Array2<f64>,
    pub normalization: f64,
    pub source: WaveformSource,
}

impl WaveformGrid2D {
    fn from_raw(axis12: UniformAxis, axis13: UniformAxis, raw: Array2<f64>, source: WaveformSource) -> Result<Self> {
        let peak = raw.iter().cloned().fold(0.0, f64::max);
        if !(peak > 0.0) || !peak.is_finite() {
            return Err(Error::ZeroMass);
        }
        Ok(WaveformGrid2D {
            axis12,
            axis13,
            rates: raw.mapv(|v| v / peak),
            normalization: peak,
            source,
        })
    }

    pub fn raw(&self) -> Array2<f64> {
        self.rates.mapv(|v| v * self.normalization)
    }
}

/// Analytic rates sampled on the given delay axes.
pub fn threefold_grid(p: &SystemParams, axis12: &UniformAxis, axis13: &UniformAxis) -> Result<WaveformGrid2D> {
    let d = derived_rates(p)?;
    let g61 = p.gamma(Coherence::R61);
    let raw = Array2::from_shape_fn((axis13.len, axis12.len), |(i13, i12)| {
        rate_with(&d, g61, axis12.value(i12), axis13.value(i13))
    });
    WaveformGrid2D::from_raw(*axis12, *axis13, raw, WaveformSource::Analytic)
}

/// Spectral axes for the kernel transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformGrid {
    pub axis2: UniformAxis,
    pub axis3: UniformAxis,
}

/// delta3 half-span of the default transform grid, in units of gamma_61.
pub const TRANSFORM_DELTA3_SPAN: f64 = 512.0;
/// Extra delta2 half-span beyond the delta3 one, in units of omega_e.
pub const TRANSFORM_DELTA2_EXTRA: f64 = 8.0;
pub const TRANSFORM_POINTS: usize = 2048;
/// Largest kernel modulus allowed on the grid boundary, relative to the peak.
pub const MAX_BOUNDARY_RATIO: f64 = 5e-3;

impl TransformGrid {
    /// delta3 over ±512 gamma_61 and delta2 over ±(512 gamma_61 + 8 omega_e), 2048 points each.
    pub fn for_params(p: &SystemParams) -> Result<Self> {
        Self::with_points(p, TRANSFORM_POINTS, TRANSFORM_POINTS)
    }

    pub fn with_points(p: &SystemParams, n2: usize, n3: usize) -> Result<Self> {
        let d = derived_rates(p)?;
        let w3 = TRANSFORM_DELTA3_SPAN * p.gamma(Coherence::R61);
        let w2 = w3 + TRANSFORM_DELTA2_EXTRA * d.omega_e;
        Ok(TransformGrid {
            axis2: UniformAxis::symmetric(w2, n2)?,
            axis3: UniformAxis::symmetric(w3, n3)?,
        })
    }

    pub fn explicit(axis2: UniformAxis, axis3: UniformAxis) -> Self {
        TransformGrid { axis2, axis3 }
    }
}

/// Kernel samples after the resolution and boundary-decay checks.
pub fn kernel_grid(p: &SystemParams, include_phi: bool, grid: &TransformGrid) -> Result<SpectralGrid2D> {
    check_resolution(p, &grid.axis2, &grid.axis3, GridPurpose::Transform)?;
    let f = if include_phi {
        SpectralFunction::Kernel
    } else {
        SpectralFunction::Chi5
    };
    let k = grid_eval_for(p, f, &grid.axis2, &grid.axis3, GridPurpose::Transform)?;
    let (n3, n2) = k.values.dim();
    let peak = k.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut edge: f64 = 0.0;
    for i2 in 0..n2 {
        edge = edge.max(k.values[[0, i2]].norm()).max(k.values[[n3 - 1, i2]].norm());
    }
    for i3 in 0..n3 {
        edge = edge.max(k.values[[i3, 0]].norm()).max(k.values[[i3, n2 - 1]].norm());
    }
    if edge > MAX_BOUNDARY_RATIO * peak {
        return Err(Error::GridTooCoarse {
            axis: "boundary",
            detail: format!(
                "kernel modulus on the boundary is {:.3e} of its peak, limit {MAX_BOUNDARY_RATIO:e}",
                edge / peak
            ),
        });
    }
    Ok(k)
}

/// `|∫∫ kernel e^{-i(delta2 tau12 + delta3 tau13)}|^2` on the conjugate delay grid, peak-normalized.
pub fn waveform_numeric_fft(p: &SystemParams, include_phi: bool, grid: &TransformGrid) -> Result<WaveformGrid2D> {
    let k = kernel_grid(p, include_phi, grid)?;
    let (t12, t13, b) = continuous_ft_2d(&k.values, &k.axis2, &k.axis3);
    let raw = b.mapv(|z| z.norm_sqr());
    WaveformGrid2D::from_raw(t12, t13, raw, WaveformSource::Transform)
}

/// Factor mapping the unit-prefactor threefold rate onto the raw squared
/// transform of chi5, from the residues of the two pole pairs.
pub fn transform_rate_scale(p: &SystemParams) -> Result<f64> {
    let d = derived_rates(p)?;
    let x = pump_factor(p, &gamma_set(p, 0.0, 0.0));
    Ok(32.0 * PI.powi(4) / (x.norm_sqr() * d.omega_e * d.omega_e))
}

/// Cells kept for transform comparisons: away from the `tau13 = tau12` step
/// and the outer 5% of each axis.
pub fn interior_mask(axis12: &UniformAxis, axis13: &UniformAxis) -> Array2<bool> {
    let guard = 2.0 * axis12.step.max(axis13.step);
    let m12 = axis12.len / 20;
    let m13 = axis13.len / 20;
    Array2::from_shape_fn((axis13.len, axis12.len), |(i13, i12)| {
        let inside = i12 >= m12 && i12 < axis12.len - m12 && i13 >= m13 && i13 < axis13.len - m13;
        inside && (axis13.value(i13) - axis12.value(i12)).abs() > guard
    })
}

/// `||a - b|| / ||b||` over masked cells.
pub fn relative_l2(a: &Array2<f64>, b: &Array2<f64>, mask: &Array2<bool>) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((x, y), &m) in a.iter().zip(b.iter()).zip(mask.iter()) {
        if m {
            num += (x - y) * (x - y);
            den += y * y;
        }
    }
    (num / den).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformComparison {
    /// Interior relative L2 error of the transform against the residue rate.
    pub relative_l2: f64,
    /// Fraction of transform mass at `tau13 < tau12 - max step`.
    pub support_leak: f64,
}

/// Transform of chi5 alone against the analytic rate with its exact prefactor.
pub fn compare_transform_to_analytic(p: &SystemParams, grid: &TransformGrid) -> Result<TransformComparison> {
    let num = waveform_numeric_fft(p, false, grid)?;
    let raw = num.raw();
    let scale = transform_rate_scale(p)?;
    let d = derived_rates(p)?;
    let g61 = p.gamma(Coherence::R61);
    let (a12, a13) = (num.axis12, num.axis13);
    let rows: Vec<f64> = (0..a13.len)
        .into_par_iter()
        .flat_map_iter(|i13| (0..a12.len).map(move |i12| scale * rate_with(&d, g61, a12.value(i12), a13.value(i13))))
        .collect();
    let ana = Array2::from_shape_vec((a13.len, a12.len), rows).map_err(|e| Error::InvalidGrid(e.to_string()))?;
    let mask = interior_mask(&a12, &a13);
    let guard = a12.step.max(a13.step);
    let mut leak = 0.0;
    let mut total = 0.0;
    for ((i13, i12), v) in raw.indexed_iter() {
        total += v;
        if a13.value(i13) < a12.value(i12) - guard {
            leak += v;
        }
    }
    Ok(TransformComparison {
        relative_l2: relative_l2(&raw, &ana, &mask),
        support_leak: leak / total,
    })
}

/// Interior relative L2 change of the raw transform when the phase-matching factor is included.
pub fn phase_matching_effect(p: &SystemParams, grid: &TransformGrid) -> Result<f64> {
    let off = waveform_numeric_fft(p, false, grid)?;
    let on = waveform_numeric_fft(p, true, grid)?;
    let mask = interior_mask(&off.axis12, &off.axis13);
    Ok(relative_l2(&on.raw(), &off.raw(), &mask))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn waveform_vanishes_at_zero_delay() {
        let p = SystemParams::fig3();
        assert_eq!(triphoton_waveform_analytic(&p, 0.0, 10e-9).unwrap().norm(), 0.0);
        assert_eq!(triphoton_waveform_analytic(&p, 20e-9, 10e-9).unwrap().norm(), 0.0);
        assert_eq!(triphoton_waveform_analytic(&p, -1e-9, 10e-9).unwrap().norm(), 0.0);
    }

    #[test]
    fn waveform_at_half_period() {
        let p = SystemParams::fig3();
        let d = derived_rates(&p).unwrap();
        let t = PI / d.omega_e;
        let w = triphoton_waveform_analytic(&p, t, t).unwrap();
        let expect = 4.0 * (-2.0 * d.gamma_e * t).exp();
        assert!((w.norm_sqr() - expect).abs() < 1e-14);
    }

    #[test]
    fn rate_is_half_squared_waveform() {
        let p = SystemParams::fig2();
        for (a, b) in [(3e-9, 5e-9), (17e-9, 40e-9), (1e-10, 1e-10), (80e-9, 81e-9)] {
            let r = threefold_rate(&p, a, b).unwrap();
            let w = triphoton_waveform_analytic(&p, a, b).unwrap();
            assert!((r - w.norm_sqr() / 2.0).abs() <= 1e-13 * r);
        }
    }

    #[test]
    fn step_edge() {
        let p = SystemParams::fig3();
        let t = 10e-9;
        assert_eq!(threefold_rate(&p, t, t * (1.0 - 1e-12)).unwrap(), 0.0);
        assert!(threefold_rate(&p, t, t).unwrap() > 0.0);
        assert!(threefold_rate(&p, t, t * (1.0 + 1e-12)).unwrap() > 0.0);
    }

    #[test]
    fn decay_along_tau13() {
        let p = SystemParams::fig3();
        let g61 = p.gamma(Coherence::R61);
        let t12 = 12e-9;
        let a = threefold_rate(&p, t12, 20e-9).unwrap();
        let b = threefold_rate(&p, t12, 30e-9).unwrap();
        let slope = (b / a).ln() / 10e-9;
        assert!((slope + 2.0 * g61).abs() < 1e-9 * g61);
    }

    #[test]
    fn first_ridge_maximum() {
        let p = SystemParams::fig3();
        let d = derived_rates(&p).unwrap();
        // maximise exp(-2 gamma_e t)(1 - cos omega_e t) on the diagonal by golden section
        let f = |t: f64| threefold_rate(&p, t, t).unwrap();
        let (mut a, mut b) = (0.2 * PI / d.omega_e, 1.8 * PI / d.omega_e);
        let r = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            let c = b - r * (b - a);
            let e = a + r * (b - a);
            if f(c) > f(e) {
                b = e;
            } else {
                a = c;
            }
        }
        let t = 0.5 * (a + b);
        // stationary point of the damped fringe
        let expect = 2.0 * (d.omega_e / (2.0 * d.gamma_e)).atan() / d.omega_e;
        assert!((t - expect).abs() < 1e-6 * expect);
        assert!((t * 1e9 - 16.7).abs() < 1.5, "{}", t * 1e9);
    }

    #[test]
    fn analytic_grid_support() {
        let p = SystemParams::fig3();
        let a = UniformAxis::closed(100e-9, 64).unwrap();
        let g = threefold_grid(&p, &a, &a).unwrap();
        for ((i13, i12), v) in g.rates.indexed_iter() {
            assert!(*v >= 0.0);
            if i13 < i12 {
                assert_eq!(*v, 0.0);
            }
        }
        let peak = g.rates.iter().cloned().fold(0.0, f64::max);
        assert_eq!(peak, 1.0);
    }

    #[test]
    fn default_transform_grid_checks() {
        let p = SystemParams::fig3();
        let g = TransformGrid::for_params(&p).unwrap();
        assert!(check_resolution(&p, &g.axis2, &g.axis3, GridPurpose::Transform).is_ok());
        let coarse = TransformGrid::with_points(&p, 256, 256).unwrap();
        assert!(matches!(
            check_resolution(&p, &coarse.axis2, &coarse.axis3, GridPurpose::Transform),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn narrow_grid_fails_boundary_check() {
        let p = SystemParams::fig3();
        let d = derived_rates(&p).unwrap();
        let g = TransformGrid::explicit(
            UniformAxis::symmetric(4.0 * d.omega_e, 256).unwrap(),
            UniformAxis::symmetric(16.0 * p.gamma(Coherence::R61), 256).unwrap(),
        );
        assert!(matches!(kernel_grid(&p, false, &g), Err(Error::GridTooCoarse { axis: "boundary", .. })));
    }
}
