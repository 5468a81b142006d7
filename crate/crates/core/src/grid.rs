//! Uniform sample axes shared by spectral and time-domain grids.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `len` samples `start + i * step`, strictly increasing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformAxis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformAxis {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if len == 0 || !(step > 0.0) || !start.is_finite() || !step.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "axis needs len > 0 and finite positive step (start {start}, step {step}, len {len})"
            )));
        }
        Ok(UniformAxis { start, step, len })
    }

    /// `n` samples on `[-half_span, half_span)`; zero sits at index `n / 2` for even `n`.
    pub fn symmetric(half_span: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 samples, got {n}")));
        }
        Self::new(-half_span, 2.0 * half_span / n as f64, n)
    }

    /// `n` samples on `[0, stop]` inclusive.
    pub fn closed(stop: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 samples, got {n}")));
        }
        Self::new(0.0, stop / (n - 1) as f64, n)
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn samples(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.value(i)).collect()
    }

    pub fn last(&self) -> f64 {
        self.value(self.len - 1)
    }

    pub fn require_power_of_two(&self, name: &str) -> Result<()> {
        if self.len.is_power_of_two() {
            Ok(())
        } else {
            Err(Error::InvalidGrid(format!(
                "{name} length {} is not a power of two",
                self.len
            )))
        }
    }

    /// Conjugate axis of a length-`len` DFT after an fft-shift, so that the
    /// zero-delay sample sits at index `len / 2`.
    pub fn conjugate(&self) -> UniformAxis {
        let step = TAU / (self.len as f64 * self.step);
        UniformAxis {
            start: -((self.len / 2) as f64) * step,
            step,
            len: self.len,
        }
    }

    pub fn nearest_index(&self, x: f64) -> usize {
        let i = ((x - self.start) / self.step).round();
        i.clamp(0.0, (self.len - 1) as f64) as usize
    }
}

pub fn next_power_of_two_at_least(n: f64) -> usize {
    let n = n.ceil().max(1.0) as usize;
    n.next_power_of_two()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_axis_contains_zero() {
        let a = UniformAxis::symmetric(4.0, 8).unwrap();
        assert_eq!(a.value(4), 0.0);
        assert_eq!(a.start, -4.0);
        assert_eq!(a.step, 1.0);
        assert_eq!(a.nearest_index(0.2), 4);
        assert_eq!(a.nearest_index(-100.0), 0);
    }

    #[test]
    fn conjugate_axis() {
        let a = UniformAxis::symmetric(std::f64::consts::PI, 16).unwrap();
        let c = a.conjugate();
        assert!((c.step - 1.0).abs() < 1e-15);
        assert_eq!(c.value(8), 0.0);
    }

    #[test]
    fn rejects_degenerate_axes() {
        assert!(UniformAxis::new(0.0, 0.0, 4).is_err());
        assert!(UniformAxis::new(0.0, 1.0, 0).is_err());
        assert!(UniformAxis::symmetric(1.0, 6).unwrap().require_power_of_two("x").is_err());
    }

    #[test]
    fn power_of_two_rounding() {
        assert_eq!(next_power_of_two_at_least(2048.0), 2048);
        assert_eq!(next_power_of_two_at_least(2048.5), 4096);
        assert_eq!(next_power_of_two_at_least(0.0), 1);
    }
}
