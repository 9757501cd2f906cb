//! The one-variable restriction `w <= g(a x), 0 <= x <= mu`, its seed cuts
//! and its hull, plus the affine cut type shared by every cut builder.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concave_core::ConcaveFn;

/// Coefficients smaller than this in magnitude are written as zero.
pub const COEF_SNAP: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance1D {
    pub a: f64,
    pub mu: u32,
    pub g: ConcaveFn,
}

#[derive(Debug, Error, PartialEq)]
pub enum SeedError {
    #[error("weight must be positive, got {0}")]
    NonPositiveWeight(f64),
    #[error("bound must be at least 1")]
    ZeroBound,
    #[error("k = {k} is outside 1..={mu}")]
    KOutOfRange { k: u32, mu: u32 },
}

impl Instance1D {
    pub fn new(a: f64, mu: u32, g: ConcaveFn) -> Result<Self, SeedError> {
        if a.is_nan() || a <= 0.0 {
            return Err(SeedError::NonPositiveWeight(a));
        }
        if mu == 0 {
            return Err(SeedError::ZeroBound);
        }
        Ok(Instance1D { a, mu, g })
    }
}

/// Which construction produced a cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutFamily {
    Seed,
    SinglePhase,
    /// Lower-bound variables lifted first, then upper-bound ones.
    TwoPhaseI,
    /// Upper-bound variables lifted first, then lower-bound ones.
    TwoPhaseII,
    Mir,
    KnapsackPack,
    KnapsackCover,
    BinarySingle,
    BinaryTwoPhaseI,
    BinaryTwoPhaseII,
    OuterApproximation,
    Transformed,
}

/// The partition a lifted cut was built from, in original variable indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSnapshot {
    pub s: usize,
    pub k: u32,
    pub s0: Vec<usize>,
    pub s1: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutMeta {
    pub family: CutFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<ContextSnapshot>,
    /// For two-phase cuts: whether the exact second-phase lifting function
    /// was used rather than its upper approximation.
    #[serde(default)]
    pub exact: bool,
}

impl CutMeta {
    pub fn new(family: CutFamily) -> Self {
        CutMeta {
            family,
            context: None,
            exact: false,
        }
    }
}

/// The affine inequality `w <= alpha0 + sum_i alpha[i] * x[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub alpha0: f64,
    pub alpha: Vec<f64>,
    pub meta: CutMeta,
}

impl Cut {
    pub fn new(alpha0: f64, alpha: Vec<f64>, meta: CutMeta) -> Self {
        Cut {
            alpha0,
            alpha,
            meta,
        }
    }

    pub fn rhs(&self, x: &[f64]) -> f64 {
        self.alpha0 + self.alpha.iter().zip(x).map(|(a, v)| a * v).sum::<f64>()
    }

    /// Amount by which `(w, x)` violates the cut; negative when satisfied.
    pub fn violation(&self, w: f64, x: &[f64]) -> f64 {
        w - self.rhs(x)
    }

    pub fn snapped(mut self) -> Self {
        for a in self.alpha.iter_mut() {
            if a.abs() < COEF_SNAP {
                *a = 0.0;
            }
        }
        if self.alpha0.abs() < COEF_SNAP {
            self.alpha0 = 0.0;
        }
        self
    }
}

/// The seed cut `w <= [g(ka) - g((k-1)a)](x - k) + g(ka)`, tight at `x = k-1`
/// and `x = k`.
pub fn seed_inequality(inst: &Instance1D, k: u32) -> Result<Cut, SeedError> {
    if k < 1 || k > inst.mu {
        return Err(SeedError::KOutOfRange { k, mu: inst.mu });
    }
    let kf = k as f64;
    let gk = inst.g.eval(kf * inst.a);
    let slope = gk - inst.g.eval((kf - 1.0) * inst.a);
    Ok(Cut::new(gk - slope * kf, vec![slope], CutMeta::new(CutFamily::Seed)).snapped())
}

/// Full description of the hull of the restriction: one seed cut per `k` in
/// increasing order, followed by the bounds `0 <= x <= mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hull1D {
    pub cuts: Vec<Cut>,
    pub lower: f64,
    pub upper: f64,
}

pub fn hull_1d(inst: &Instance1D) -> Hull1D {
    let cuts = (1..=inst.mu)
        .map(|k| seed_inequality(inst, k).expect("k ranges over 1..=mu"))
        .collect();
    Hull1D {
        cuts,
        lower: 0.0,
        upper: inst.mu as f64,
    }
}

impl Hull1D {
    /// Largest `w` allowed by the description at `x`, or `None` outside the
    /// bounds.
    pub fn max_w(&self, x: f64) -> Option<f64> {
        if x < self.lower || x > self.upper {
            return None;
        }
        Some(
            self.cuts
                .iter()
                .map(|c| c.rhs(&[x]))
                .fold(f64::INFINITY, f64::min),
        )
    }
}
