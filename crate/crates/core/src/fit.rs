//! Damped least squares (Levenberg-Marquardt) and a Gaussian line fit on top of it.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Converged once every parameter moves less than this, relative to its scale.
    pub step_tolerance: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iterations: 200,
            step_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmFit {
    pub params: Vec<f64>,
    pub rms_residual: f64,
    pub iterations: usize,
}

fn residuals(model: &impl Fn(f64, &[f64]) -> f64, x: &[f64], y: &[f64], p: &[f64]) -> DVector<f64> {
    DVector::from_iterator(x.len(), x.iter().zip(y).map(|(&xi, &yi)| model(xi, p) - yi))
}

/// Minimises `sum (model(x_i, p) - y_i)^2` from `p0`.
///
/// `scales` sets the finite-difference step and the step-size test for each
/// parameter, so that parameters near zero are still handled.
pub fn levenberg_marquardt(
    model: impl Fn(f64, &[f64]) -> f64,
    x: &[f64],
    y: &[f64],
    p0: &[f64],
    scales: &[f64],
    opts: &LmOptions,
) -> Result<LmFit> {
    let n = p0.len();
    if x.len() != y.len() || x.len() < n || scales.len() != n {
        return Err(Error::FitNonConvergence(format!(
            "need matching data of at least {n} points and {n} scales"
        )));
    }
    let mut p = p0.to_vec();
    let mut r = residuals(&model, x, y, &p);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    for iter in 1..=opts.max_iterations {
        let mut jac = DMatrix::<f64>::zeros(x.len(), n);
        for k in 0..n {
            let h = 1e-7 * p[k].abs().max(scales[k]);
            let mut up = p.clone();
            let mut dn = p.clone();
            up[k] += h;
            dn[k] -= h;
            let col = (residuals(&model, x, y, &up) - residuals(&model, x, y, &dn)) / (2.0 * h);
            jac.set_column(k, &col);
        }
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        loop {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
            }
            let step = match a.cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => {
                    lambda *= 10.0;
                    if lambda > 1e30 {
                        break;
                    }
                    continue;
                }
            };
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let rt = residuals(&model, x, y, &trial);
            let ct = rt.norm_squared();
            if ct.is_finite() && ct <= cost {
                let rel_step = (0..n)
                    .map(|k| step[k].abs() / p[k].abs().max(scales[k]))
                    .fold(0.0, f64::max);
                p = trial;
                r = rt;
                cost = ct;
                lambda = (lambda / 3.0).max(1e-15);
                if rel_step < opts.step_tolerance {
                    return Ok(LmFit {
                        params: p,
                        rms_residual: (cost / x.len() as f64).sqrt(),
                        iterations: iter,
                    });
                }
                break;
            }
            lambda *= 2.0;
            if lambda > 1e30 {
                // no descent direction left: sitting on the minimum
                return Ok(LmFit {
                    params: p,
                    rms_residual: (cost / x.len() as f64).sqrt(),
                    iterations: iter,
                });
            }
        }
    }
    Err(Error::FitNonConvergence(format!(
        "no convergence within {} iterations",
        opts.max_iterations
    )))
}

/// `amplitude * exp(-(x - center)^2 / (2 sigma^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub amplitude: f64,
    pub center: f64,
    pub sigma: f64,
    pub rms_residual: f64,
    pub iterations: usize,
}

impl GaussianFit {
    pub fn eval(&self, x: f64) -> f64 {
        gaussian(x, &[self.amplitude, self.center, self.sigma])
    }
}

fn gaussian(x: f64, p: &[f64]) -> f64 {
    let u = (x - p[1]) / p[2];
    p[0] * (-0.5 * u * u).exp()
}

/// Gaussian fit seeded from the zeroth, first and second moments of the data.
pub fn fit_gaussian(x: &[f64], y: &[f64]) -> Result<GaussianFit> {
    let mass: f64 = y.iter().sum();
    if !(mass > 0.0) || x.len() < 3 {
        return Err(Error::FitNonConvergence("need at least 3 points of positive mass".into()));
    }
    let mu = x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / mass;
    let var = x.iter().zip(y).map(|(a, b)| (a - mu) * (a - mu) * b).sum::<f64>() / mass;
    let amp = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sigma0 = var.sqrt();
    let span = x[x.len() - 1] - x[0];
    let scales = [amp.abs(), span.abs(), sigma0];
    let fit = levenberg_marquardt(gaussian, x, y, &[amp, mu, sigma0], &scales, &LmOptions::default())?;
    Ok(GaussianFit {
        amplitude: fit.params[0],
        center: fit.params[1],
        sigma: fit.params[2].abs(),
        rms_residual: fit.rms_residual,
        iterations: fit.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_gaussian() {
        let x: Vec<f64> = (0..201).map(|i| -5.0 + 0.05 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&v| gaussian(v, &[2.5, 0.3, 0.8])).collect();
        let f = fit_gaussian(&x, &y).unwrap();
        assert!((f.amplitude - 2.5).abs() < 1e-9);
        assert!((f.center - 0.3).abs() < 1e-9);
        assert!((f.sigma - 0.8).abs() < 1e-9);
        assert!(f.rms_residual < 1e-9);
    }

    #[test]
    fn fits_exponential_decay() {
        let x: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|&v| 3.0 * (-1.7 * v).exp()).collect();
        let f = levenberg_marquardt(|t, p| p[0] * (-p[1] * t).exp(), &x, &y, &[1.0, 1.0], &[1.0, 1.0], &LmOptions::default())
            .unwrap();
        assert!((f.params[0] - 3.0).abs() < 1e-8);
        assert!((f.params[1] - 1.7).abs() < 1e-8);
    }

    #[test]
    fn rejects_empty_mass() {
        assert!(fit_gaussian(&[0.0, 1.0, 2.0], &[0.0, 0.0, 0.0]).is_err());
    }
}
