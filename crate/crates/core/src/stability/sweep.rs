use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::analysis::{analyze, StabilityOptions};
use super::{EigenMode, ModeClass};
use crate::error::{Error, Result};
use crate::stationary::StationaryState;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SweepParameter {
    /// Vary the degree `N` at fixed length.
    Nodes { length: f64 },
    /// Vary the length `L` at fixed degree.
    Length { n_nodes: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeSelector {
    /// The k-th (1-based) imaginary pair ordered by `|λ|`, taken with `Im λ > 0`.
    Imaginary(usize),
    /// The quadruple member with the largest real part.
    MaxReal,
}

impl ModeSelector {
    pub fn select(&self, modes: &[EigenMode]) -> Option<Complex64> {
        match *self {
            ModeSelector::Imaginary(k) => {
                let mut v: Vec<Complex64> = modes
                    .iter()
                    .filter(|m| m.class == ModeClass::ImaginaryPair && m.lambda.im > 0.0)
                    .map(|m| m.lambda)
                    .collect();
                v.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
                k.checked_sub(1).and_then(|i| v.get(i).copied())
            }
            ModeSelector::MaxReal => modes
                .iter()
                .filter(|m| m.class == ModeClass::ComplexQuadruple && m.lambda.im >= 0.0)
                .map(|m| m.lambda)
                .max_by(|a, b| a.re.total_cmp(&b.re)),
        }
    }
}

/// The selected eigenvalue at degree `n_nodes` and length `length`.
pub fn track(
    state: &StationaryState,
    n_nodes: usize,
    length: f64,
    opts: &StabilityOptions,
    selector: ModeSelector,
) -> Result<Complex64> {
    let o = StabilityOptions { n_nodes, length: Some(length), ..*opts };
    let a = analyze(state, &o)?;
    selector.select(&a.modes).ok_or(Error::TrackingLost { value: f64::NAN })
}

/// Tracked eigenvalue for each value of the swept parameter.
pub fn convergence_sweep(
    state: &StationaryState,
    parameter: SweepParameter,
    values: &[f64],
    selector: ModeSelector,
    opts: &StabilityOptions,
) -> Result<Vec<(f64, Complex64)>> {
    if values.is_empty() || values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("sweep values must be non-empty and ascending".into()));
    }
    values
        .iter()
        .map(|&v| {
            let (n_nodes, length) = match parameter {
                SweepParameter::Nodes { length } => (v.round() as usize, length),
                SweepParameter::Length { n_nodes } => (n_nodes, v),
            };
            match track(state, n_nodes, length, opts, selector) {
                Ok(l) => Ok((v, l)),
                Err(Error::TrackingLost { .. }) => Err(Error::TrackingLost { value: v }),
                Err(e) => Err(e),
            }
        })
        .collect()
}
