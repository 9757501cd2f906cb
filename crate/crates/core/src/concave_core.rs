//! Closed-form concave functions and the two slope-comparison predicates
//! that the rest of the crate uses as test oracles.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Global tolerance for every inequality check in the crate.
pub const TOL: f64 = 1e-9;

/// A concave function on the real line, given in closed form so that
/// instances serialize exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConcaveFn {
    /// `1 - exp(-(z - c) / lambda)` with `lambda > 0`.
    ExpUtility { lambda: f64, c: f64 },
    /// `-exp(-(z - c))`.
    NegExp { c: f64 },
    /// `min(0, b - z)`.
    MinLinear { b: f64 },
    /// `-|b - z|`.
    NegAbs { b: f64 },
    /// `-(z - c)^2`.
    NegQuadratic { c: f64 },
    /// `inner(z + c)`.
    Shifted { inner: Box<ConcaveFn>, c: f64 },
    /// `inner(-z + c)`.
    Reflected { inner: Box<ConcaveFn>, c: f64 },
    /// Piecewise-linear interpolation through `(xs[i], ys[i])`, extended
    /// linearly past both ends. Slopes must be nonincreasing.
    Tabulated { xs: Vec<f64>, ys: Vec<f64> },
}

#[derive(Debug, Error, PartialEq)]
pub enum ConcaveFnError {
    #[error("parameter {0} is not finite")]
    NonFinite(&'static str),
    #[error("exp_utility needs lambda > 0, got {0}")]
    NonPositiveLambda(f64),
    #[error("tabulated function needs matching, nonempty breakpoint lists")]
    BadTable,
    #[error("tabulated breakpoints must be strictly increasing")]
    UnsortedTable,
    #[error("tabulated slopes increase at breakpoint {0}, so the function is not concave")]
    NotConcave(usize),
}

impl ConcaveFn {
    pub fn tabulated(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, ConcaveFnError> {
        let f = ConcaveFn::Tabulated { xs, ys };
        f.validate()?;
        Ok(f)
    }

    /// Checks parameters recursively. Deserialized values should pass through
    /// this before use.
    pub fn validate(&self) -> Result<(), ConcaveFnError> {
        let finite = |v: f64, name| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(ConcaveFnError::NonFinite(name))
            }
        };
        match self {
            ConcaveFn::ExpUtility { lambda, c } => {
                finite(*lambda, "lambda")?;
                finite(*c, "c")?;
                if *lambda <= 0.0 {
                    return Err(ConcaveFnError::NonPositiveLambda(*lambda));
                }
                Ok(())
            }
            ConcaveFn::NegExp { c } | ConcaveFn::NegQuadratic { c } => finite(*c, "c"),
            ConcaveFn::MinLinear { b } | ConcaveFn::NegAbs { b } => finite(*b, "b"),
            ConcaveFn::Shifted { inner, c } | ConcaveFn::Reflected { inner, c } => {
                finite(*c, "c")?;
                inner.validate()
            }
            ConcaveFn::Tabulated { xs, ys } => {
                if xs.is_empty() || xs.len() != ys.len() {
                    return Err(ConcaveFnError::BadTable);
                }
                for (&x, &y) in xs.iter().zip(ys) {
                    finite(x, "xs")?;
                    finite(y, "ys")?;
                }
                if xs.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(ConcaveFnError::UnsortedTable);
                }
                let slopes: Vec<f64> = (1..xs.len())
                    .map(|i| (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]))
                    .collect();
                for (i, w) in slopes.windows(2).enumerate() {
                    if w[1] > w[0] + TOL * (1.0 + w[0].abs()) {
                        return Err(ConcaveFnError::NotConcave(i + 1));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, z: f64) -> f64 {
        match self {
            ConcaveFn::ExpUtility { lambda, c } => 1.0 - (-(z - c) / lambda).exp(),
            ConcaveFn::NegExp { c } => -(-(z - c)).exp(),
            ConcaveFn::MinLinear { b } => (b - z).min(0.0),
            ConcaveFn::NegAbs { b } => -(b - z).abs(),
            ConcaveFn::NegQuadratic { c } => -(z - c) * (z - c),
            ConcaveFn::Shifted { inner, c } => inner.eval(z + c),
            ConcaveFn::Reflected { inner, c } => inner.eval(-z + c),
            ConcaveFn::Tabulated { xs, ys } => {
                let n = xs.len();
                if n == 1 {
                    return ys[0];
                }
                // Segment index: the last breakpoint not to the right of z,
                // clamped so the end segments extend outward.
                let seg = match xs.partition_point(|&x| x <= z) {
                    0 => 0,
                    p if p >= n => n - 2,
                    p => p - 1,
                };
                let slope = (ys[seg + 1] - ys[seg]) / (xs[seg + 1] - xs[seg]);
                ys[seg] + slope * (z - xs[seg])
            }
        }
    }

    /// A supergradient at `z`. For kinked variants the right derivative is
    /// returned.
    pub fn derivative(&self, z: f64) -> f64 {
        match self {
            ConcaveFn::ExpUtility { lambda, c } => (-(z - c) / lambda).exp() / lambda,
            ConcaveFn::NegExp { c } => (-(z - c)).exp(),
            ConcaveFn::MinLinear { b } => {
                if z < *b {
                    0.0
                } else {
                    -1.0
                }
            }
            ConcaveFn::NegAbs { b } => {
                if z < *b {
                    1.0
                } else {
                    -1.0
                }
            }
            ConcaveFn::NegQuadratic { c } => -2.0 * (z - c),
            ConcaveFn::Shifted { inner, c } => inner.derivative(z + c),
            ConcaveFn::Reflected { inner, c } => -inner.derivative(-z + c),
            ConcaveFn::Tabulated { xs, ys } => {
                let n = xs.len();
                if n == 1 {
                    return 0.0;
                }
                let seg = xs.partition_point(|&x| x <= z).clamp(1, n - 1) - 1;
                (ys[seg + 1] - ys[seg]) / (xs[seg + 1] - xs[seg])
            }
        }
    }

    /// `z -> self(z + c)`. Consecutive shifts are merged.
    pub fn shift(&self, c: f64) -> ConcaveFn {
        if c == 0.0 {
            return self.clone();
        }
        match self {
            ConcaveFn::Shifted { inner, c: c0 } => ConcaveFn::Shifted {
                inner: inner.clone(),
                c: c0 + c,
            },
            _ => ConcaveFn::Shifted {
                inner: Box::new(self.clone()),
                c,
            },
        }
    }

    /// `z -> self(-z + c)`.
    pub fn reflect(&self, c: f64) -> ConcaveFn {
        ConcaveFn::Reflected {
            inner: Box::new(self.clone()),
            c,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ComparisonError {
    #[error("slope check needs a1 <= b1, a2 <= b2, a1 <= a2 and b1 <= b2")]
    SlopeOrder,
    #[error("term {0} has a negative multiplier")]
    NegativeMultiplier(usize),
    #[error("term {0} has its left end above its right end")]
    ReversedInterval(usize),
    #[error("a right end on the plus side exceeds one on the minus side")]
    RightEndsOverlap,
    #[error("a left end on the plus side exceeds one on the minus side")]
    LeftEndsOverlap,
    #[error("weighted lengths do not balance: plus {plus}, minus {minus}")]
    Unbalanced { plus: f64, minus: f64 },
}

/// Secant slopes of a concave function decrease as the interval moves right:
/// `(b2 - a2)(f(b1) - f(a1)) >= (b1 - a1)(f(b2) - f(a2))`.
pub fn check_slope(
    f: &ConcaveFn,
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
) -> Result<bool, ComparisonError> {
    if !(a1 <= b1 && a2 <= b2 && a1 <= a2 && b1 <= b2) {
        return Err(ComparisonError::SlopeOrder);
    }
    let lhs = (b2 - a2) * (f.eval(b1) - f.eval(a1));
    let rhs = (b1 - a1) * (f.eval(b2) - f.eval(a2));
    let scale = 1.0f64.max(lhs.abs()).max(rhs.abs());
    Ok(lhs >= rhs - TOL * scale)
}

/// One term `mult * (f(right) - f(left))` of a regrouped sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Increment {
    pub mult: f64,
    pub left: f64,
    pub right: f64,
}

impl From<(f64, f64, f64)> for Increment {
    fn from((mult, left, right): (f64, f64, f64)) -> Self {
        Increment { mult, left, right }
    }
}

/// Evaluates `H = sum_plus mult (f(right) - f(left)) - sum_minus (...)` after
/// checking that the terms are arranged so that `H >= 0` must hold for every
/// concave `f`. Returns whether `H >= -TOL`.
pub fn check_regrouped_sum(
    f: &ConcaveFn,
    plus: &[Increment],
    minus: &[Increment],
) -> Result<bool, ComparisonError> {
    for (i, t) in plus.iter().chain(minus).enumerate() {
        if t.mult < 0.0 {
            return Err(ComparisonError::NegativeMultiplier(i));
        }
        if t.left > t.right {
            return Err(ComparisonError::ReversedInterval(i));
        }
    }
    // Zero-weight and zero-length terms contribute nothing and are exempt
    // from the ordering conditions.
    let live = |t: &&Increment| t.mult > 0.0 && t.left < t.right;
    let p: Vec<&Increment> = plus.iter().filter(live).collect();
    let m: Vec<&Increment> = minus.iter().filter(live).collect();

    let fold_max = |v: &[&Increment], key: fn(&Increment) -> f64| {
        v.iter().map(|t| key(t)).fold(f64::NEG_INFINITY, f64::max)
    };
    let fold_min = |v: &[&Increment], key: fn(&Increment) -> f64| {
        v.iter().map(|t| key(t)).fold(f64::INFINITY, f64::min)
    };
    if fold_max(&p, |t| t.right) > fold_min(&m, |t| t.right) {
        return Err(ComparisonError::RightEndsOverlap);
    }
    if fold_max(&p, |t| t.left) > fold_min(&m, |t| t.left) {
        return Err(ComparisonError::LeftEndsOverlap);
    }
    let weight = |v: &[&Increment]| v.iter().map(|t| t.mult * (t.right - t.left)).sum::<f64>();
    let (wp, wm) = (weight(&p), weight(&m));
    if (wp - wm).abs() > TOL * 1.0f64.max(wp.abs()).max(wm.abs()) {
        return Err(ComparisonError::Unbalanced {
            plus: wp,
            minus: wm,
        });
    }
    let term = |t: &&Increment| t.mult * (f.eval(t.right) - f.eval(t.left));
    let h: f64 = p.iter().map(term).sum::<f64>() - m.iter().map(term).sum::<f64>();
    let scale = 1.0f64.max(p.iter().chain(&m).map(|t| term(t).abs()).sum());
    Ok(h >= -TOL * scale)
}
