//! Spontaneous six-wave mixing in a six-level cold-atom ensemble.
//!
//! Closed-form susceptibilities are checked against a numerical steady state
//! of the full coherence equations; triphoton waveforms come both from the
//! residue solution and from a 2D Fourier transform of the spectral kernel;
//! conditional coincidence rates feed the energy-time entanglement criterion.

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod correlation;
pub mod error;
pub mod export;
pub mod fft;
pub mod fit;
pub mod grid;
pub mod oracle;
pub mod manifest;
pub mod params;
pub mod quad;
pub mod reproduce;
pub mod susceptibility;
pub mod validate;
pub mod waveform;

pub use error::{Error, Result};
pub use params::{derived_rates, gamma_set, validate_params, Coherence, DenominatorSign, DerivedRates, SystemParams};
