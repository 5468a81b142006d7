//! Discrete approximations of continuous Fourier integrals
//! `F(tau) = ∫ f(delta) e^{-i delta tau} d(delta)` on uniform grids.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::grid::UniformAxis;

struct Plan {
    fft: Arc<dyn Fft<f64>>,
    pre: Vec<C64>,
    post: Vec<C64>,
}

impl Plan {
    fn new(axis: &UniformAxis, inverse: bool) -> (Plan, UniformAxis) {
        let n = axis.len;
        let conj = axis.conjugate();
        let sign = if inverse { 1.0 } else { -1.0 };
        let (d0, dd) = (axis.start, axis.step);
        let (t0, dt) = (conj.start, conj.step);
        let pre = (0..n).map(|k| C64::cis(sign * k as f64 * dd * t0)).collect();
        let global = C64::cis(sign * d0 * t0) * dd;
        let post = (0..n).map(|m| global * C64::cis(sign * d0 * m as f64 * dt)).collect();
        let mut planner = FftPlanner::new();
        let fft = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        (Plan { fft, pre, post }, conj)
    }

    fn apply(&self, line: &mut [C64]) {
        for (v, w) in line.iter_mut().zip(&self.pre) {
            *v *= w;
        }
        self.fft.process(line);
        for (v, w) in line.iter_mut().zip(&self.post) {
            *v *= w;
        }
    }
}

/// One-dimensional transform; returns the conjugate axis and the samples on it.
pub fn continuous_ft(values: &[C64], axis: &UniformAxis) -> (UniformAxis, Vec<C64>) {
    transform_1d(values, axis, false)
}

/// Same with kernel `e^{+i x t}`, without the `1/2π` factor.
pub fn continuous_ift(values: &[C64], axis: &UniformAxis) -> (UniformAxis, Vec<C64>) {
    transform_1d(values, axis, true)
}

fn transform_1d(values: &[C64], axis: &UniformAxis, inverse: bool) -> (UniformAxis, Vec<C64>) {
    assert_eq!(values.len(), axis.len, "samples must match axis length");
    let (plan, conj) = Plan::new(axis, inverse);
    let mut buf = values.to_vec();
    plan.apply(&mut buf);
    (conj, buf)
}

/// Two-dimensional transform of `values[[i3, i2]]` with kernel
/// `e^{-i (delta2 tau12 + delta3 tau13)}`.  Output is indexed `[[i13, i12]]`.
pub fn continuous_ft_2d(values: &Array2<C64>, axis2: &UniformAxis, axis3: &UniformAxis) -> (UniformAxis, UniformAxis, Array2<C64>) {
    let (n3, n2) = values.dim();
    assert_eq!((n3, n2), (axis3.len, axis2.len), "grid must match axes");
    let (plan2, conj2) = Plan::new(axis2, false);
    let (plan3, conj3) = Plan::new(axis3, false);

    let mut data: Vec<C64> = values.iter().copied().collect();
    data.par_chunks_mut(n2).for_each(|row| plan2.apply(row));
    let mut cols = transpose(&data, n3, n2);
    cols.par_chunks_mut(n3).for_each(|col| plan3.apply(col));
    let data = transpose(&cols, n2, n3);
    let out = Array2::from_shape_vec((n3, n2), data).expect("shape preserved");
    (conj2, conj3, out)
}

fn transpose(data: &[C64], rows: usize, cols: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); data.len()];
    out.par_chunks_mut(rows).enumerate().for_each(|(c, dst)| {
        for (r, v) in dst.iter_mut().enumerate() {
            *v = data[r * cols + c];
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn gaussian_pair() {
        let axis = UniformAxis::symmetric(20.0, 512).unwrap();
        let f: Vec<C64> = axis.samples().iter().map(|&x| C64::from((-0.5 * x * x).exp())).collect();
        let (t, g) = continuous_ft(&f, &axis);
        for (m, v) in g.iter().enumerate() {
            let tau = t.value(m);
            let exact = TAU.sqrt() * (-0.5 * tau * tau).exp();
            assert!((v - exact).norm() < 1e-12, "{m}");
        }
    }

    #[test]
    fn shifted_gaussian_phase() {
        let axis = UniformAxis::symmetric(20.0, 256).unwrap();
        let s = 1.5;
        let f: Vec<C64> = axis.samples().iter().map(|&x| C64::from((-0.5 * (x - s) * (x - s)).exp())).collect();
        let (t, g) = continuous_ft(&f, &axis);
        for (m, v) in g.iter().enumerate() {
            let tau = t.value(m);
            let exact = C64::cis(-s * tau) * TAU.sqrt() * (-0.5 * tau * tau).exp();
            assert!((v - exact).norm() < 1e-10, "{m}");
        }
    }

    #[test]
    fn lorentzian_maps_to_positive_delays() {
        let gamma = 1.0;
        let axis = UniformAxis::symmetric(2000.0, 1 << 16).unwrap();
        let f: Vec<C64> = axis.samples().iter().map(|&x| 1.0 / C64::new(x, gamma)).collect();
        let (t, g) = continuous_ft(&f, &axis);
        for tau in [-3.0, -1.0, 1.0, 3.0] {
            let m = t.nearest_index(tau);
            let tau = t.value(m);
            let exact = if tau > 0.0 {
                C64::new(0.0, -2.0 * PI) * (-gamma * tau).exp()
            } else {
                C64::new(0.0, 0.0)
            };
            assert!((g[m] - exact).norm() < 5e-3, "tau {tau}: {} vs {exact}", g[m]);
        }
    }

    #[test]
    fn two_dimensional_separable() {
        let a2 = UniformAxis::symmetric(16.0, 64).unwrap();
        let a3 = UniformAxis::symmetric(24.0, 128).unwrap();
        let vals = Array2::from_shape_fn((128, 64), |(i3, i2)| {
            let x = a2.value(i2);
            let y = a3.value(i3);
            C64::from((-0.5 * x * x - 0.5 * (y / 2.0) * (y / 2.0)).exp())
        });
        let (t2, t3, out) = continuous_ft_2d(&vals, &a2, &a3);
        for (i13, i12) in [(64, 32), (70, 30), (60, 40)] {
            let u = t2.value(i12);
            let v = t3.value(i13);
            let exact = TAU * 2.0 * (-0.5 * u * u - 2.0 * v * v).exp();
            assert!((out[[i13, i12]] - exact).norm() < 1e-10);
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let axis = UniformAxis::symmetric(10.0, 128).unwrap();
        let f: Vec<C64> = axis.samples().iter().map(|&x| C64::new((-x * x).exp(), 0.2 * x * (-x * x).exp())).collect();
        let (t, g) = continuous_ft(&f, &axis);
        let (back_axis, back) = continuous_ift(&g, &t);
        assert!((back_axis.step - axis.step).abs() < 1e-12);
        for (a, b) in f.iter().zip(&back) {
            assert!((a - b / TAU).norm() < 1e-12);
        }
    }
}
