//! A parametric family of subadditive functions built from a concave kernel:
//! `omega`/`omega_bar` on the nonpositive reals and their reflections
//! `chi`/`chi_bar` on the nonnegative reals. The lifting bounds `eta_lower`
//! and `eta_upper` are members of the family.
//!
//! Indexing follows the usual convention: `b[0]` is `b_1` and `v[0]` is
//! `v_0`, so interval `i` (starting at 0) uses `b[i]` and `v[i]`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concave_core::ConcaveFn;
use crate::lifting::LiftContext;

/// Breakpoint snap tolerance, relative to `max(1, |t|)`.
const SNAP: f64 = 1e-12;

/// How `b` and `v` continue past the materialized prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRule {
    /// `b_i = 0` and `v_{i-1} = b_L + v_{L-1}` for every `i > L`, where `L`
    /// is the materialized length.
    #[default]
    Closure,
    /// No continuation; evaluating past the prefix is an error.
    None,
}

#[derive(Debug, Error, PartialEq)]
pub enum FamilyError {
    #[error("b and v must have the same nonzero length (got {b} and {v})")]
    Lengths { b: usize, v: usize },
    #[error("parameter {0} is not finite")]
    NonFinite(&'static str),
    #[error("epsilon must be nonnegative, got {0}")]
    NegativeEpsilon(f64),
    #[error("tau must be positive")]
    ZeroTau,
    #[error("epsilon = 0 is only allowed with tau = 1")]
    DegenerateSteps,
    /// 1-based index of the offending `b_i`.
    #[error("b_{0} is negative")]
    NegativeB(usize),
    /// `b_i < b_{i+1}` at the given 1-based `i`.
    #[error("b must be nonincreasing, but it rises after b_{0}")]
    IncreasingB(usize),
    /// `b_{i+2} + v_{i+1} < b_{i+1} + v_i` at the given 0-based `i`.
    #[error("b_(i+2) + v_(i+1) < b_(i+1) + v_i at i = {0}")]
    VOrder(usize),
    #[error("gamma = {gamma} is outside 0..tau = {tau}")]
    GammaRange { gamma: u32, tau: u32 },
    #[error("m = {m} is outside 1..={len}")]
    MRange { m: usize, len: usize },
    #[error("delta = {0} lies beyond the materialized sequences")]
    Coverage(f64),
}

/// Parameters `(epsilon, tau, b, v, m, gamma)` plus the concave kernel: `g`
/// for `omega`/`omega_bar`, `h` for `chi`/`chi_bar`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubadditiveParams {
    pub epsilon: f64,
    pub tau: u32,
    pub b: Vec<f64>,
    pub v: Vec<f64>,
    pub m: usize,
    pub gamma: u32,
    pub base: ConcaveFn,
    #[serde(default)]
    pub tail: TailRule,
}

impl SubadditiveParams {
    pub fn validate(&self) -> Result<(), FamilyError> {
        let len = self.b.len();
        if len == 0 || self.v.len() != len {
            return Err(FamilyError::Lengths {
                b: len,
                v: self.v.len(),
            });
        }
        if !self.epsilon.is_finite() {
            return Err(FamilyError::NonFinite("epsilon"));
        }
        if self.b.iter().any(|x| !x.is_finite()) {
            return Err(FamilyError::NonFinite("b"));
        }
        if self.v.iter().any(|x| !x.is_finite()) {
            return Err(FamilyError::NonFinite("v"));
        }
        if self.epsilon < 0.0 {
            return Err(FamilyError::NegativeEpsilon(self.epsilon));
        }
        if self.tau == 0 {
            return Err(FamilyError::ZeroTau);
        }
        if self.epsilon == 0.0 && self.tau != 1 {
            return Err(FamilyError::DegenerateSteps);
        }
        for (i, &bi) in self.b.iter().enumerate() {
            if bi < 0.0 {
                return Err(FamilyError::NegativeB(i + 1));
            }
        }
        for i in 0..len.saturating_sub(1) {
            if self.b[i + 1] > self.b[i] {
                return Err(FamilyError::IncreasingB(i + 1));
            }
            if self.b[i + 1] + self.v[i + 1] < self.b[i] + self.v[i] - SNAP * (1.0 + self.v[i].abs()) {
                return Err(FamilyError::VOrder(i));
            }
        }
        if self.gamma >= self.tau {
            return Err(FamilyError::GammaRange {
                gamma: self.gamma,
                tau: self.tau,
            });
        }
        let m_max = match self.tail {
            TailRule::Closure => usize::MAX,
            TailRule::None => len,
        };
        if self.m == 0 || self.m > m_max {
            return Err(FamilyError::MRange { m: self.m, len });
        }
        Ok(())
    }

    /// `(b_{i+1}, v_i)`, continued by the tail rule.
    pub fn step(&self, i: usize) -> Option<(f64, f64)> {
        let len = self.b.len();
        if i < len {
            return Some((self.b[i], self.v[i]));
        }
        match self.tail {
            TailRule::Closure => Some((0.0, self.b[len - 1] + self.v[len - 1])),
            TailRule::None => None,
        }
    }

    /// `a_i = b_i + tau * epsilon` for interval `i` (0-based, so this is `a_{i+1}`).
    fn width(&self, b: f64) -> f64 {
        b + self.tau as f64 * self.epsilon
    }
}

/// The family evaluated through a kernel `kern` on the nonnegative side:
/// `kern = h` gives `chi`, `kern(x) = g(-x)` gives `omega(-x)`.
struct Walker<'a, K: Fn(f64) -> f64> {
    p: &'a SubadditiveParams,
    kern: K,
}

impl<K: Fn(f64) -> f64> Walker<'_, K> {
    fn psi(&self, b: f64, v: f64) -> f64 {
        (self.kern)(b + v + self.p.epsilon) - (self.kern)(b + v)
    }

    /// Increase of the function across interval `i`.
    fn rise(&self, b: f64, v: f64) -> f64 {
        self.p.tau as f64 * self.psi(b, v) + (self.kern)(b + v) - (self.kern)(v)
    }

    /// `(A_i, value at A_i)`.
    fn node(&self, i: usize) -> Result<(f64, f64), FamilyError> {
        let (mut a, mut val) = (0.0, 0.0);
        for j in 0..i {
            let (b, v) = self.p.step(j).ok_or(FamilyError::Coverage(-a))?;
            a += self.p.width(b);
            val += self.rise(b, v);
        }
        Ok((a, val))
    }

    fn piece(&self, t: f64, a_i: f64, val_i: f64, b: f64, v: f64) -> f64 {
        let p = self.p;
        let big_b = a_i + b;
        if t <= big_b + SNAP * t.abs().max(1.0) || p.epsilon == 0.0 {
            return (self.kern)(t - a_i + v) + val_i - (self.kern)(v);
        }
        let steps = ((t - big_b - SNAP * t.abs().max(1.0)) / p.epsilon).ceil() as i64 - 1;
        let l = steps.clamp(0, p.tau as i64 - 1) as f64;
        (self.kern)(t - a_i - l * p.epsilon + v) + val_i + l * self.psi(b, v) - (self.kern)(v)
    }

    fn eval(&self, t: f64) -> Result<f64, FamilyError> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        let p = self.p;
        let len = p.b.len();
        let (mut a, mut val) = (0.0, 0.0);
        let mut i = 0usize;
        loop {
            let (b, v) = p.step(i).ok_or(FamilyError::Coverage(-t))?;
            let next = a + p.width(b);
            if t <= next + SNAP * t.abs().max(1.0) {
                return Ok(self.piece(t, a, val, b, v));
            }
            a = next;
            val += self.rise(b, v);
            i += 1;
            if i >= len {
                // Past the prefix every interval is identical; skip whole ones.
                let Some((b, v)) = p.step(i) else {
                    return Err(FamilyError::Coverage(-t));
                };
                let w = p.width(b);
                if w <= 0.0 {
                    return Err(FamilyError::Coverage(-t));
                }
                let skip = (((t - a) / w).ceil() - 1.0).max(0.0);
                a += skip * w;
                val += skip * self.rise(b, v);
            }
        }
    }

    fn eval_bar(&self, t: f64) -> Result<f64, FamilyError> {
        let p = self.p;
        let m = p.m;
        let (b_m, _) = p.step(m - 1).ok_or(FamilyError::Coverage(-t))?;
        let (a_prev, val_prev) = self.node(m - 1)?;
        let threshold = a_prev + b_m + (p.gamma as f64 + 1.0) * p.epsilon;
        if t <= threshold + SNAP * t.abs().max(1.0) {
            return self.eval(t);
        }
        let (b, v) = p.step(m - 1).expect("checked above");
        let gamma = p.gamma as f64;
        Ok((self.kern)(t - a_prev - gamma * p.epsilon + v) + val_prev + gamma * self.psi(b, v)
            - (self.kern)(v))
    }
}

impl SubadditiveParams {
    fn omega_walker(&self) -> Walker<'_, impl Fn(f64) -> f64 + '_> {
        Walker {
            p: self,
            kern: move |x: f64| self.base.eval(-x),
        }
    }

    fn chi_walker(&self) -> Walker<'_, impl Fn(f64) -> f64 + '_> {
        Walker {
            p: self,
            kern: move |x: f64| self.base.eval(x),
        }
    }

    /// `omega(delta)` for `delta <= 0`, with `base` playing the role of `g`.
    pub fn omega(&self, delta: f64) -> Result<f64, FamilyError> {
        self.omega_walker().eval(-delta)
    }

    /// `omega_bar(delta)` for `delta <= 0`.
    pub fn omega_bar(&self, delta: f64) -> Result<f64, FamilyError> {
        self.omega_walker().eval_bar(-delta)
    }

    /// `chi(delta)` for `delta >= 0`, with `base` playing the role of `h`.
    pub fn chi(&self, delta: f64) -> Result<f64, FamilyError> {
        self.chi_walker().eval(delta)
    }

    /// `chi_bar(delta)` for `delta >= 0`.
    pub fn chi_bar(&self, delta: f64) -> Result<f64, FamilyError> {
        self.chi_walker().eval_bar(delta)
    }

    /// `A_i`.
    pub fn big_a(&self, i: usize) -> Result<f64, FamilyError> {
        Ok(self.chi_walker().node(i)?.0)
    }

    /// `B_i = A_{i-1} + b_i` for `i >= 1`.
    pub fn big_b(&self, i: usize) -> Result<f64, FamilyError> {
        let (b, _) = self.step(i - 1).ok_or(FamilyError::Coverage(f64::NAN))?;
        Ok(self.big_a(i - 1)? + b)
    }

    /// `psi_i` computed from the `h` kernel.
    pub fn psi_h(&self, i: usize) -> Option<f64> {
        let (b, v) = self.step(i)?;
        Some(self.base.eval(b + v + self.epsilon) - self.base.eval(b + v))
    }

    /// `chi(A_i)` by the summed closed form
    /// `tau * sum psi_{j-1} + sum (h(b_j + v_{j-1}) - h(v_{j-1}))`.
    pub fn chi_at_node(&self, i: usize) -> Result<f64, FamilyError> {
        let mut total = 0.0;
        for j in 0..i {
            let (b, v) = self.step(j).ok_or(FamilyError::Coverage(f64::NAN))?;
            let psi = self.psi_h(j).expect("step exists");
            total += self.tau as f64 * psi + self.base.eval(b + v) - self.base.eval(v);
        }
        Ok(total)
    }

    /// The same parameters with the kernel reflected, `z -> base(-z)`, so
    /// that `chi` of the result equals `omega` of `self` mirrored.
    pub fn reflected(&self) -> SubadditiveParams {
        SubadditiveParams {
            base: self.base.reflect(0.0),
            ..self.clone()
        }
    }
}

/// Large-variable units of `S0+`, heaviest first, one entry per copy.
fn s0_units(ctx: &LiftContext) -> Vec<f64> {
    let inst = ctx.instance();
    ctx.s0_plus()
        .iter()
        .flat_map(|&i| std::iter::repeat_n(inst.a[i], inst.mu[i] as usize))
        .collect()
}

/// Parameters under which `omega_bar` coincides with `eta_lower` on the
/// context: steps of `a_s`, `tau = k`, one interval per large unit followed
/// by enough virtual units of width `k a_s` to exhaust the seed bound.
pub fn eta_lower_params(ctx: &LiftContext) -> SubadditiveParams {
    let k = ctx.k() as usize;
    let a_s = ctx.a_s();
    let slack = ctx.mu_s() as usize - k + 1;
    let extra = slack.div_ceil(k);
    let kappa = slack - (extra - 1) * k;
    let mut units = s0_units(ctx);
    units.extend(std::iter::repeat_n(k as f64 * a_s, extra));
    SubadditiveParams {
        epsilon: a_s,
        tau: ctx.k(),
        b: units.iter().map(|u| u - k as f64 * a_s).collect(),
        v: units.iter().map(|u| -u).collect(),
        m: units.len(),
        gamma: kappa as u32 - 1,
        base: ctx.g().clone(),
        tail: TailRule::Closure,
    }
}

/// Parameters under which `omega` coincides with `eta_upper`: the large
/// units, then the closure tail of virtual units of width `k a_s`.
pub fn eta_upper_params(ctx: &LiftContext) -> SubadditiveParams {
    let k = ctx.k() as f64;
    let a_s = ctx.a_s();
    let mut units = s0_units(ctx);
    units.push(k * a_s);
    SubadditiveParams {
        epsilon: a_s,
        tau: ctx.k(),
        b: units.iter().map(|u| u - k * a_s).collect(),
        v: units.iter().map(|u| -u).collect(),
        m: units.len(),
        gamma: 0,
        base: ctx.g().clone(),
        tail: TailRule::Closure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> SubadditiveParams {
        SubadditiveParams {
            epsilon: 0.5,
            tau: 3,
            b: vec![1.7, 1.5, 1.0],
            v: vec![-1.3, -1.0, -0.4],
            m: 3,
            gamma: 1,
            base: ConcaveFn::NegQuadratic { c: 0.0 },
            tail: TailRule::Closure,
        }
    }

    #[test]
    fn zero_at_origin() {
        let p = quad();
        p.validate().unwrap();
        assert_eq!(p.omega(0.0).unwrap(), 0.0);
        assert_eq!(p.chi(0.0).unwrap(), 0.0);
        assert_eq!(p.omega_bar(0.0).unwrap(), 0.0);
    }

    #[test]
    fn continuity_at_breakpoints() {
        let p = quad();
        for i in 1..6 {
            for x in [p.big_a(i).unwrap(), p.big_b(i).unwrap()] {
                let l = p.omega(-x + 1e-10).unwrap();
                let r = p.omega(-x - 1e-10).unwrap();
                assert!((l - r).abs() < 1e-8, "jump at {x}: {l} vs {r}");
            }
        }
    }

    #[test]
    fn chi_is_reflected_omega() {
        let p = quad();
        let h = p.reflected();
        for i in 0..80 {
            let d = i as f64 * 0.17;
            assert!((h.chi(d).unwrap() - p.omega(-d).unwrap()).abs() < 1e-12);
            assert!((h.chi_bar(d).unwrap() - p.omega_bar(-d).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn node_formula_matches_walk() {
        let p = quad().reflected();
        for i in 0..7 {
            let a = p.big_a(i).unwrap();
            assert!((p.chi(a).unwrap() - p.chi_at_node(i).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn validation_diagnostics() {
        let mut p = quad();
        p.b[1] = 2.0;
        assert_eq!(p.validate(), Err(FamilyError::IncreasingB(1)));
        let mut p = quad();
        p.v[1] = -5.0;
        assert_eq!(p.validate(), Err(FamilyError::VOrder(0)));
        let mut p = quad();
        p.epsilon = 0.0;
        assert_eq!(p.validate(), Err(FamilyError::DegenerateSteps));
        let mut p = quad();
        p.b[2] = -0.1;
        assert_eq!(p.validate(), Err(FamilyError::NegativeB(3)));
        let mut p = quad();
        p.gamma = 3;
        assert!(matches!(p.validate(), Err(FamilyError::GammaRange { .. })));
    }

    #[test]
    fn no_tail_reports_coverage() {
        let mut p = quad();
        p.tail = TailRule::None;
        let end = p.big_a(3).unwrap();
        assert!(p.omega(-end).is_ok());
        assert!(matches!(p.omega(-end - 1.0), Err(FamilyError::Coverage(_))));
    }
}
