//! Closed-form susceptibilities, phase mismatch and spectral grids.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{next_power_of_two_at_least, UniformAxis};
use crate::params::{derived_rates, gamma_set, Coherence, GammaSet, SystemParams};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `G21 G31 ± |omega_c1|^2` with the configured sign.
pub fn pump_factor(p: &SystemParams, g: &GammaSet) -> C64 {
    g[Coherence::R21] * g[Coherence::R31]
        + p.denominator_sign.factor() * p.omega_c1 * p.omega_c1
}

/// `G41 G51 + |omega_c2|^2`, the dressed-state factor that splits into the two resonances.
pub fn dressing_factor(p: &SystemParams, g: &GammaSet) -> C64 {
    g[Coherence::R41] * g[Coherence::R51] + p.omega_c2 * p.omega_c2
}

/// Fifth-order susceptibility with unit prefactor.
pub fn chi5(p: &SystemParams, delta2: f64, delta3: f64) -> Result<C64> {
    let g = gamma_set(p, delta2, delta3);
    let den = g[Coherence::R61] * dressing_factor(p, &g) * pump_factor(p, &g);
    let scale = p.gamma21().powi(5);
    if !(den.norm() >= 1e-12 * scale) {
        return Err(Error::PoleOnGrid { delta2, delta3 });
    }
    Ok(I / den)
}

/// Linear susceptibility of the first signal, unit prefactor.
pub fn chi_s1(p: &SystemParams, delta2: f64, delta3: f64) -> C64 {
    let g = gamma_set(p, delta2, delta3);
    let s = p.denominator_sign.factor();
    let a = g[Coherence::R41] * g[Coherence::R51] + s * p.omega_c2 * p.omega_c2;
    let b = pump_factor(p, &g);
    I * (p.omega_p * p.omega_p * p.omega_c1 * p.omega_c1) * g[Coherence::R51] / (a * b * b)
}

/// Linear susceptibility of the third signal, unit prefactor.
pub fn chi_s3(p: &SystemParams, delta3: f64) -> C64 {
    let g61 = gamma_set(p, 0.0, delta3)[Coherence::R61];
    -I / g61.conj()
}

/// `Δk L` as an affine function of delta3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseMismatch {
    pub offset: f64,
    /// Seconds: `L/c + L/v_s3`.
    pub slope: f64,
}

impl PhaseMismatch {
    pub fn from_params(p: &SystemParams) -> Self {
        PhaseMismatch {
            offset: p.phase_mismatch_offset,
            slope: p.medium_transit_time * (1.0 + p.signal_group_velocity_ratio),
        }
    }

    pub fn delta_k_times_l(&self, delta3: f64) -> f64 {
        self.offset + delta3 * self.slope
    }
}

/// `(e^{ix} - 1) / (ix)`.
pub fn phi(x: f64) -> C64 {
    if x.abs() < 1e-8 {
        C64::new(1.0 - x * x / 6.0, x / 2.0)
    } else {
        (C64::cis(x) - 1.0) / (I * x)
    }
}

pub fn phi_longitudinal(p: &SystemParams, delta3: f64) -> C64 {
    phi(PhaseMismatch::from_params(p).delta_k_times_l(delta3))
}

/// Modulus of the delta3 transform of the phase-matching factor, peak 1.
///
/// The transform is a phase ramp over `(0, L/c + L/v_s3)`, so the modulus is a
/// boxcar whatever the offset.
pub fn phi_time_domain(p: &SystemParams, tau13: f64) -> f64 {
    let width = PhaseMismatch::from_params(p).slope;
    if tau13 > 0.0 && tau13 < width {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralFunction {
    Chi5,
    ChiS1,
    ChiS3,
    Phi,
    /// chi5 times the phase-matching factor.
    Kernel,
}

impl SpectralFunction {
    pub fn name(self) -> &'static str {
        match self {
            SpectralFunction::Chi5 => "chi5",
            SpectralFunction::ChiS1 => "chi_s1",
            SpectralFunction::ChiS3 => "chi_s3",
            SpectralFunction::Phi => "phi",
            SpectralFunction::Kernel => "kernel",
        }
    }
}

pub fn eval_spectral(p: &SystemParams, f: SpectralFunction, delta2: f64, delta3: f64) -> Result<C64> {
    Ok(match f {
        SpectralFunction::Chi5 => chi5(p, delta2, delta3)?,
        SpectralFunction::ChiS1 => chi_s1(p, delta2, delta3),
        SpectralFunction::ChiS3 => chi_s3(p, delta3),
        SpectralFunction::Phi => phi_longitudinal(p, delta3),
        SpectralFunction::Kernel => chi5(p, delta2, delta3)? * phi_longitudinal(p, delta3),
    })
}

/// Samples of a spectral function, `values[[i3, i2]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid2D {
    pub axis2: UniformAxis,
    pub axis3: UniformAxis,
    pub values: Array2<C64>,
    pub label: SpectralFunction,
}

impl SpectralGrid2D {
    /// Grid indices `(i3, i2)` of the largest modulus.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0);
        let mut best_v = f64::NEG_INFINITY;
        for ((i3, i2), v) in self.values.indexed_iter() {
            let m = v.norm_sqr();
            if m > best_v {
                best_v = m;
                best = (i3, i2);
            }
        }
        best
    }

    /// Strict local maxima of the modulus over the 8-neighbourhood, edges excluded.
    pub fn local_maxima(&self) -> Vec<(usize, usize)> {
        let (n3, n2) = self.values.dim();
        let m = self.values.mapv(|v| v.norm_sqr());
        let mut out = Vec::new();
        for i3 in 1..n3.saturating_sub(1) {
            for i2 in 1..n2.saturating_sub(1) {
                let c = m[[i3, i2]];
                let mut is_max = true;
                'nb: for d3 in [-1isize, 0, 1] {
                    for d2 in [-1isize, 0, 1] {
                        if d3 == 0 && d2 == 0 {
                            continue;
                        }
                        let v = m[[(i3 as isize + d3) as usize, (i2 as isize + d2) as usize]];
                        if v >= c {
                            is_max = false;
                            break 'nb;
                        }
                    }
                }
                if is_max {
                    out.push((i3, i2));
                }
            }
        }
        out
    }
}

/// What a grid will be used for, which decides the resolution rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridPurpose {
    /// Direct inspection of the spectrum: spacing must resolve the narrowest linewidth.
    Spectrum,
    /// Input to a 2D Fourier transform: the conjugate time window must hold the decay.
    Transform,
}

/// Narrowest spectral linewidth, `min(gamma_e, gamma_61)`.
pub fn gamma_min(p: &SystemParams) -> f64 {
    let ge = 0.5 * (p.gamma(Coherence::R41) + p.gamma(Coherence::R51));
    ge.min(p.gamma(Coherence::R61))
}

/// Number of 1/e amplitude decays required inside half the conjugate time window.
pub const MIN_DECAYS_PER_HALF_WINDOW: f64 = 3.0;

pub fn check_resolution(
    p: &SystemParams,
    axis2: &UniformAxis,
    axis3: &UniformAxis,
    purpose: GridPurpose,
) -> Result<()> {
    axis2.require_power_of_two("delta2 axis")?;
    axis3.require_power_of_two("delta3 axis")?;
    match purpose {
        GridPurpose::Spectrum => {
            let limit = gamma_min(p) / 4.0;
            for (name, ax) in [("delta2", axis2), ("delta3", axis3)] {
                if ax.step > limit {
                    return Err(Error::GridTooCoarse {
                        axis: name,
                        detail: format!("spacing {:e} rad/s exceeds gamma_min/4 = {limit:e}", ax.step),
                    });
                }
            }
        }
        GridPurpose::Transform => {
            let ge = 0.5 * (p.gamma(Coherence::R41) + p.gamma(Coherence::R51));
            let g61 = p.gamma(Coherence::R61);
            for (name, ax, rate) in [("delta2", axis2, ge), ("delta3", axis3, g61)] {
                let decays = rate * PI / ax.step;
                if decays < MIN_DECAYS_PER_HALF_WINDOW {
                    return Err(Error::GridTooCoarse {
                        axis: name,
                        detail: format!(
                            "conjugate half-window holds {decays:.3} decay times, need {MIN_DECAYS_PER_HALF_WINDOW}"
                        ),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Samples `f` on the given axes after checking spectral resolution.
pub fn grid_eval(
    p: &SystemParams,
    f: SpectralFunction,
    axis2: &UniformAxis,
    axis3: &UniformAxis,
) -> Result<SpectralGrid2D> {
    grid_eval_for(p, f, axis2, axis3, GridPurpose::Spectrum)
}

pub fn grid_eval_for(
    p: &SystemParams,
    f: SpectralFunction,
    axis2: &UniformAxis,
    axis3: &UniformAxis,
    purpose: GridPurpose,
) -> Result<SpectralGrid2D> {
    check_resolution(p, axis2, axis3, purpose)?;
    let d2 = axis2.samples();
    let rows: Vec<Vec<C64>> = (0..axis3.len)
        .into_par_iter()
        .map(|i3| {
            let delta3 = axis3.value(i3);
            d2.iter()
                .map(|&delta2| eval_spectral(p, f, delta2, delta3))
                .collect::<Result<Vec<C64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let flat: Vec<C64> = rows.into_iter().flatten().collect();
    let values = Array2::from_shape_vec((axis3.len, axis2.len), flat)
        .map_err(|e| Error::InvalidGrid(e.to_string()))?;
    Ok(SpectralGrid2D {
        axis2: *axis2,
        axis3: *axis3,
        values,
        label: f,
    })
}

pub const DEFAULT_SPECTRAL_POINTS: usize = 2048;

/// delta2 over ±4 omega_e and delta3 over ±16 gamma_61, refined to a power of
/// two that keeps the spacing within gamma_min/4.
pub fn default_spectral_axes(p: &SystemParams) -> Result<(UniformAxis, UniformAxis)> {
    let d = derived_rates(p)?;
    let w2 = 4.0 * d.omega_e;
    let w3 = 16.0 * p.gamma(Coherence::R61);
    let limit = gamma_min(p) / 4.0;
    let n2 = next_power_of_two_at_least(2.0 * w2 / limit).max(DEFAULT_SPECTRAL_POINTS);
    let n3 = next_power_of_two_at_least(2.0 * w3 / limit).max(DEFAULT_SPECTRAL_POINTS);
    Ok((UniformAxis::symmetric(w2, n2)?, UniformAxis::symmetric(w3, n3)?))
}

/// Half width at half maximum of `|chi5|^2` along delta3, about `delta3 = 0`, at fixed delta2.
pub fn delta3_half_width(p: &SystemParams, delta2: f64) -> Result<f64> {
    half_width_along(p, |t| (delta2, t))
}

/// Same measurement along the ridge `delta2 + delta3 = const` through `(delta2, 0)`.
pub fn ridge_half_width(p: &SystemParams, delta2: f64) -> Result<f64> {
    half_width_along(p, |t| (delta2 - t, t))
}

fn half_width_along(p: &SystemParams, path: impl Fn(f64) -> (f64, f64)) -> Result<f64> {
    let val = |t: f64| -> Result<f64> {
        let (a, b) = path(t);
        Ok(chi5(p, a, b)?.norm_sqr())
    };
    let half = 0.5 * val(0.0)?;
    let g = p.gamma(Coherence::R61);
    let mut sides = [0.0; 2];
    for (k, dir) in [1.0, -1.0].into_iter().enumerate() {
        let mut lo = 0.0;
        let mut hi = 0.05 * g;
        let mut steps = 0;
        while val(dir * hi)? > half {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > 200 {
                return Err(Error::InvalidGrid("half-maximum not bracketed".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if val(dir * mid)? > half {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        sides[k] = 0.5 * (lo + hi);
    }
    Ok(0.5 * (sides[0] + sides[1]))
}
