//! Steady state of the full fifteen-coherence system, used as ground truth for
//! the closed-form susceptibilities.
//!
//! The equations couple some coherences to conjugates of others, so the
//! system `A rho + C conj(rho) = b` is solved in its real 30x30 form.

use std::ops::Index;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{gamma_set, Coherence, SystemParams};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Condition numbers above this are reported as [`Error::SingularSystem`].
pub const MAX_CONDITION: f64 = 1e12;

/// Seed magnitude bound relative to gamma_21.
pub const MAX_SEED_RATIO: f64 = 1e-3;

/// Default finite-difference seed magnitude relative to gamma_21.
pub const DEFAULT_SEED_RATIO: f64 = 1e-4;

/// Small stand-ins for the three quantized signal fields, `g(+)`; `g(-)` is the conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SignalSeeds {
    pub g_s1: C64,
    pub g_s2: C64,
    pub g_s3: C64,
}

impl SignalSeeds {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(g_s1: C64, g_s2: C64, g_s3: C64) -> Self {
        SignalSeeds { g_s1, g_s2, g_s3 }
    }

    pub fn check(&self, p: &SystemParams) -> Result<()> {
        let bound = MAX_SEED_RATIO * p.gamma21();
        for g in [self.g_s1, self.g_s2, self.g_s3] {
            if g.norm() > bound {
                return Err(Error::InvalidParams(vec![format!(
                    "seed amplitude {:e} exceeds {bound:e}",
                    g.norm()
                )]));
            }
        }
        Ok(())
    }
}

/// Reading of the s2 coupling in the rho54 equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rho54Coupling {
    /// `g(-)_s2`, matching the neighbouring equations.
    #[default]
    Lowering,
    /// `g(+)_s2`.
    Raising,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    pub rho54: Rho54Coupling,
    /// Seed step as a multiple of gamma_21.
    pub seed_ratio: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            rho54: Rho54Coupling::Lowering,
            seed_ratio: DEFAULT_SEED_RATIO,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceVector(pub [C64; 15]);

impl Index<Coherence> for CoherenceVector {
    type Output = C64;
    fn index(&self, c: Coherence) -> &C64 {
        &self.0[c.index()]
    }
}

impl CoherenceVector {
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `direct * rho + conjugate * conj(rho) = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub direct: DMatrix<C64>,
    pub conjugate: DMatrix<C64>,
    pub rhs: DVector<C64>,
}

/// Solution together with solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub rho: CoherenceVector,
    pub residual: f64,
    pub rhs_norm: f64,
    pub condition: f64,
    pub sigma_min: f64,
}

impl SteadyState {
    /// Solution error scale implied by the residual.
    pub fn error_scale(&self) -> f64 {
        if self.sigma_min > 0.0 {
            self.residual / self.sigma_min
        } else {
            f64::INFINITY
        }
    }
}

impl LinearSystem {
    /// Real form acting on `[Re rho; Im rho]`.
    pub fn realified(&self) -> (DMatrix<f64>, DVector<f64>) {
        let n = self.rhs.len();
        let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                let a = self.direct[(r, c)];
                let k = self.conjugate[(r, c)];
                m[(r, c)] = a.re + k.re;
                m[(r, n + c)] = -a.im + k.im;
                m[(n + r, c)] = a.im + k.im;
                m[(n + r, n + c)] = a.re - k.re;
            }
        }
        let mut b = DVector::<f64>::zeros(2 * n);
        for r in 0..n {
            b[r] = self.rhs[r].re;
            b[n + r] = self.rhs[r].im;
        }
        (m, b)
    }

    pub fn solve(&self) -> Result<SteadyState> {
        let (m, b) = self.realified();
        let sv = m.clone().svd(false, false).singular_values;
        let smax = sv.max();
        let smin = sv.min();
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !(condition <= MAX_CONDITION) {
            return Err(Error::SingularSystem { condition });
        }
        let x = m
            .clone()
            .lu()
            .solve(&b)
            .ok_or(Error::SingularSystem { condition })?;
        let residual = (&m * &x - &b).norm();
        let n = self.rhs.len();
        let mut rho = [C64::new(0.0, 0.0); 15];
        for (k, z) in rho.iter_mut().enumerate() {
            *z = C64::new(x[k], x[n + k]);
        }
        Ok(SteadyState {
            rho: CoherenceVector(rho),
            residual,
            rhs_norm: b.norm(),
            condition,
            sigma_min: smin,
        })
    }
}

pub fn assemble_system(p: &SystemParams, seeds: &SignalSeeds, delta2: f64, delta3: f64) -> LinearSystem {
    assemble_system_with(p, seeds, delta2, delta3, &OracleOptions::default())
}

pub fn assemble_system_with(
    p: &SystemParams,
    seeds: &SignalSeeds,
    delta2: f64,
    delta3: f64,
    opts: &OracleOptions,
) -> LinearSystem {
    use Coherence::*;
    let g = gamma_set(p, delta2, delta3);
    let op = C64::from(p.omega_p);
    let oc1 = C64::from(p.omega_c1);
    let oc2 = C64::from(p.omega_c2);
    let (gp1, gp2, gp3) = (seeds.g_s1, seeds.g_s2, seeds.g_s3);
    let (gm1, gm2, gm3) = (gp1.conj(), gp2.conj(), gp3.conj());
    let g54 = match opts.rho54 {
        Rho54Coupling::Lowering => gm2,
        Rho54Coupling::Raising => gp2,
    };

    let mut a = DMatrix::<C64>::zeros(15, 15);
    let mut k = DMatrix::<C64>::zeros(15, 15);
    let mut b = DVector::<C64>::zeros(15);
    // d(rho_row)/dt = G rho_row + i * (sum of couplings) + source
    let mut d = |row: Coherence, col: Coherence, c: C64| a[(row.index(), col.index())] += c;
    for c in Coherence::ALL {
        d(c, c, g[c]);
    }
    d(R21, R31, -I * oc1);
    d(R31, R32, I * op.conj());
    d(R31, R21, -I * oc1.conj());
    d(R31, R41, -I * gm1);
    d(R41, R42, I * op.conj());
    d(R41, R31, -I * gp1);
    d(R41, R51, -I * oc2);
    d(R51, R52, I * op.conj());
    d(R51, R41, -I * oc2.conj());
    d(R51, R61, -I * gm2);
    d(R61, R62, I * op.conj());
    d(R61, R51, -I * gp2);
    d(R32, R31, I * op);
    d(R32, R42, -I * gm1);
    d(R42, R41, I * op);
    d(R42, R52, -I * oc2);
    d(R42, R43, I * oc1.conj());
    d(R42, R32, -I * gp1);
    d(R43, R42, I * oc1);
    d(R43, R53, -I * oc2);
    d(R52, R51, I * op);
    d(R52, R42, -I * oc2.conj());
    d(R52, R53, I * oc1.conj());
    d(R52, R62, -I * gm2);
    d(R53, R52, I * oc1);
    d(R53, R63, -I * gm2);
    d(R53, R54, I * gp1);
    d(R53, R43, -I * oc2.conj());
    d(R54, R53, I * gm1);
    d(R54, R64, -I * g54);
    d(R62, R61, I * op);
    d(R62, R63, I * oc1.conj());
    d(R62, R52, -I * gp2);
    d(R63, R62, I * oc1);
    d(R63, R64, I * gp1);
    d(R63, R53, -I * gp2);
    d(R64, R63, I * gm1);
    d(R64, R65, I * oc2.conj());
    d(R64, R54, -I * gp2);
    d(R65, R64, I * oc2);

    // couplings to rho_ji = conj(rho_ij)
    let mut dc = |row: Coherence, col: Coherence, c: C64| k[(row.index(), col.index())] += c;
    dc(R21, R62, I * gm3);
    dc(R31, R63, I * gm3);
    dc(R41, R64, I * gm3);
    dc(R51, R65, I * gm3);
    dc(R62, R21, -I * gm3);
    dc(R63, R31, -I * gm3);
    dc(R64, R41, -I * gm3);
    dc(R65, R51, -I * gm3);

    // sources move to the right-hand side with opposite sign
    b[R21.index()] = I * op.conj();
    b[R61.index()] = I * gm3;

    LinearSystem {
        direct: a,
        conjugate: k,
        rhs: b,
    }
}

pub fn steady_state(p: &SystemParams, seeds: &SignalSeeds, delta2: f64, delta3: f64) -> Result<SteadyState> {
    assemble_system(p, seeds, delta2, delta3).solve()
}

fn powi(k: usize) -> C64 {
    [C64::new(1.0, 0.0), I, C64::new(-1.0, 0.0), -I][k % 4]
}

/// Bilinear `g_s1 g_s2` coefficient of rho61 from a 4x4 roots-of-unity stencil,
/// before removing the classical field factors.
pub fn mixed_coefficient(p: &SystemParams, delta2: f64, delta3: f64, opts: &OracleOptions) -> Result<(C64, f64)> {
    let h = opts.seed_ratio * p.gamma21();
    let mut sum = C64::new(0.0, 0.0);
    let mut noise: f64 = 0.0;
    for j in 0..4 {
        for l in 0..4 {
            let seeds = SignalSeeds::new(h * powi(j), h * powi(l), C64::new(0.0, 0.0));
            seeds.check(p)?;
            let s = assemble_system_with(p, &seeds, delta2, delta3, opts).solve()?;
            noise = noise.max(s.error_scale());
            sum += s.rho[Coherence::R61] * powi(4 - j) * powi(4 - l);
        }
    }
    let second_difference = sum / 16.0;
    let floor = 10.0 * noise;
    if !(second_difference.norm() > floor) {
        return Err(Error::NoiseFloor {
            estimate: second_difference.norm(),
            floor,
        });
    }
    Ok((second_difference / (h * h), second_difference.norm()))
}

/// Numerical counterpart of the closed-form chi5.
pub fn extract_chi5_numeric(p: &SystemParams, delta2: f64, delta3: f64) -> Result<C64> {
    extract_chi5_numeric_with(p, delta2, delta3, &OracleOptions::default())
}

pub fn extract_chi5_numeric_with(
    p: &SystemParams,
    delta2: f64,
    delta3: f64,
    opts: &OracleOptions,
) -> Result<C64> {
    let (coef, _) = mixed_coefficient(p, delta2, delta3, opts)?;
    let fields = C64::from(p.omega_p).conj() * C64::from(p.omega_c1).conj() * C64::from(p.omega_c2).conj();
    if fields.norm() == 0.0 {
        return Err(Error::NoiseFloor {
            estimate: 0.0,
            floor: 0.0,
        });
    }
    Ok(coef / fields)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearSignal {
    S1,
    S3,
}

/// Numerical counterpart of chi_s1 or chi_s3.
///
/// `S3`: conjugate of the `conj(g_s3)` coefficient of rho61.
/// `S1`: conjugate of the `g_s1` coefficient of rho43, i.e. the `conj(g_s1)` coefficient of rho34.
pub fn extract_chi_linear(p: &SystemParams, which: LinearSignal, delta2: f64, delta3: f64) -> Result<C64> {
    extract_chi_linear_with(p, which, delta2, delta3, &OracleOptions::default())
}

pub fn extract_chi_linear_with(
    p: &SystemParams,
    which: LinearSignal,
    delta2: f64,
    delta3: f64,
    opts: &OracleOptions,
) -> Result<C64> {
    let h = opts.seed_ratio * p.gamma21();
    let zero = C64::new(0.0, 0.0);
    let mut sum = zero;
    let mut noise: f64 = 0.0;
    for j in 0..4 {
        let g = h * powi(j);
        let (seeds, target, weight) = match which {
            LinearSignal::S3 => (SignalSeeds::new(zero, zero, g), Coherence::R61, powi(j)),
            LinearSignal::S1 => (SignalSeeds::new(g, zero, zero), Coherence::R43, powi(4 - j)),
        };
        seeds.check(p)?;
        let s = assemble_system_with(p, &seeds, delta2, delta3, opts).solve()?;
        noise = noise.max(s.error_scale());
        sum += s.rho[target] * weight;
    }
    let first_difference = sum / 4.0;
    if p.omega_p == 0.0 && which == LinearSignal::S1 {
        return Ok(zero);
    }
    let floor = 10.0 * noise;
    if !(first_difference.norm() > floor) {
        return Err(Error::NoiseFloor {
            estimate: first_difference.norm(),
            floor,
        });
    }
    Ok((first_difference / h).conj())
}
