//! Linear models with bounded columns.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// `sum coefs * x (sense) rhs`, coefficients given sparsely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinRow {
    pub coefs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("column {0}: lower bound exceeds upper bound")]
    Bounds(usize),
    #[error("column {0}: non-finite data")]
    Column(usize),
    #[error("row {0}: non-finite data or unknown column")]
    Row(usize),
    #[error("column vectors have different lengths")]
    Lengths,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpModel {
    pub maximize: bool,
    pub obj: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub integer: Vec<bool>,
    pub rows: Vec<LinRow>,
}

impl LpModel {
    pub fn new(maximize: bool) -> Self {
        LpModel {
            maximize,
            obj: Vec::new(),
            lo: Vec::new(),
            hi: Vec::new(),
            integer: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn n_cols(&self) -> usize {
        self.obj.len()
    }

    /// Appends a column and returns its index.
    pub fn add_col(&mut self, obj: f64, lo: f64, hi: f64, integer: bool) -> usize {
        self.obj.push(obj);
        self.lo.push(lo);
        self.hi.push(hi);
        self.integer.push(integer);
        self.obj.len() - 1
    }

    pub fn add_row(&mut self, coefs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.rows.push(LinRow { coefs, sense, rhs });
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.obj.len();
        if self.lo.len() != n || self.hi.len() != n || self.integer.len() != n {
            return Err(ModelError::Lengths);
        }
        for j in 0..n {
            if !self.obj[j].is_finite() || self.lo[j].is_nan() || self.hi[j].is_nan() {
                return Err(ModelError::Column(j));
            }
            if self.lo[j] > self.hi[j] || self.lo[j] == f64::INFINITY || self.hi[j] == f64::NEG_INFINITY {
                return Err(ModelError::Bounds(j));
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() || row.coefs.iter().any(|&(j, v)| j >= n || !v.is_finite()) {
                return Err(ModelError::Row(r));
            }
        }
        Ok(())
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.obj.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}
