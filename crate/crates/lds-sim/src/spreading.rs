//! Spreading-side plumbing: a matrix resolved into sparse unit-norm columns
//! with per-user amplitudes folded in, and the chip-level transmit product.

use lds_core::lds::LdsMatrix;
use num_complex::Complex64;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum SpreadError {
    AmplitudeCount { expected: usize, got: usize },
    NonPositiveAmplitude { user: usize, value: f64 },
    SymbolCount { expected: usize, got: usize },
}

impl fmt::Display for SpreadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpreadError::AmplitudeCount { expected, got } => {
                write!(f, "expected {expected} amplitudes, got {got}")
            }
            SpreadError::NonPositiveAmplitude { user, value } => {
                write!(f, "amplitude for user {user} must be positive, got {value}")
            }
            SpreadError::SymbolCount { expected, got } => {
                write!(f, "expected {expected} symbols, got {got}")
            }
        }
    }
}

impl std::error::Error for SpreadError {}

/// A spreading matrix ready for simulation: sparse columns of unit Euclidean
/// norm times the user amplitude d_k.
#[derive(Debug, Clone)]
pub struct Spreader {
    id: String,
    l: usize,
    /// column k as (chip index, amplitude-scaled entry) pairs
    cols: Vec<Vec<(usize, f64)>>,
    amplitudes: Vec<f64>,
}

impl Spreader {
    pub fn from_matrix(m: &LdsMatrix, amplitudes: &[f64]) -> Result<Self, SpreadError> {
        let scale = m.scale();
        let sparse: Vec<Vec<(usize, f64)>> = m
            .columns()
            .iter()
            .map(|col| {
                col.iter()
                    .enumerate()
                    .filter(|&(_, &e)| e != 0)
                    .map(|(i, &e)| (i, f64::from(e) * scale))
                    .collect()
            })
            .collect();
        Self::new(m.id(), m.l(), sparse, amplitudes)
    }

    /// K orthogonal users on K chips; the collision-free baseline.
    pub fn identity(k: usize, amplitudes: &[f64]) -> Result<Self, SpreadError> {
        let sparse = (0..k).map(|i| vec![(i, 1.0)]).collect();
        Self::new(format!("identity-{k}"), k, sparse, amplitudes)
    }

    /// Arbitrary sparse columns, given as (chip, entry) pairs of the
    /// unit-norm signature; amplitudes are folded in on top. For synthetic
    /// and cut-down systems that no matrix file describes.
    pub fn from_sparse_columns(
        id: String,
        l: usize,
        unit_cols: Vec<Vec<(usize, f64)>>,
        amplitudes: &[f64],
    ) -> Result<Self, SpreadError> {
        Self::new(id, l, unit_cols, amplitudes)
    }

    fn new(
        id: String,
        l: usize,
        unit_cols: Vec<Vec<(usize, f64)>>,
        amplitudes: &[f64],
    ) -> Result<Self, SpreadError> {
        if amplitudes.len() != unit_cols.len() {
            return Err(SpreadError::AmplitudeCount {
                expected: unit_cols.len(),
                got: amplitudes.len(),
            });
        }
        if let Some((user, &value)) = amplitudes.iter().enumerate().find(|&(_, &d)| d <= 0.0) {
            return Err(SpreadError::NonPositiveAmplitude { user, value });
        }
        let cols = unit_cols
            .into_iter()
            .zip(amplitudes)
            .map(|(col, &d)| col.into_iter().map(|(i, e)| (i, e * d)).collect())
            .collect();
        Ok(Spreader {
            id,
            l,
            cols,
            amplitudes: amplitudes.to_vec(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k(&self) -> usize {
        self.cols.len()
    }

    /// Sparse column k: (chip, d_k · c_k[chip]) pairs.
    pub fn col(&self, k: usize) -> &[(usize, f64)] {
        &self.cols[k]
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// Mean of d_k² across users; the average symbol energy actually sent.
    pub fn mean_amplitude_sq(&self) -> f64 {
        self.amplitudes.iter().map(|d| d * d).sum::<f64>() / self.k() as f64
    }

    /// s = C·D·x — superimposes all users' scaled symbols onto L chips.
    pub fn transmit(&self, x: &[Complex64]) -> Result<Vec<Complex64>, SpreadError> {
        self.transmit_faded(x, None)
    }

    /// Same product with optional per-user complex gains applied.
    pub fn transmit_faded(
        &self,
        x: &[Complex64],
        gains: Option<&[Complex64]>,
    ) -> Result<Vec<Complex64>, SpreadError> {
        if x.len() != self.k() {
            return Err(SpreadError::SymbolCount {
                expected: self.k(),
                got: x.len(),
            });
        }
        let mut s = vec![Complex64::new(0.0, 0.0); self.l];
        for (k, col) in self.cols.iter().enumerate() {
            let weight = match gains {
                Some(g) => g[k] * x[k],
                None => x[k],
            };
            for &(i, e) in col {
                s[i] += weight * e;
            }
        }
        Ok(s)
    }
}
