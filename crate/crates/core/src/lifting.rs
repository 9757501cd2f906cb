//! Closed-form lifting functions for the set
//! `{(w, x) : w <= f(a'x), 0 <= x <= mu, x integer}`.
//!
//! A [`LiftContext`] fixes a seed variable `s`, a seed level `k`, and the
//! sets `S0`/`S1` of variables held at their lower/upper bounds. Every lifting
//! function here is a pure function of the context and the weight change
//! `delta`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concave_core::ConcaveFn;
use crate::seed::ContextSnapshot;

/// Points this close to a breakpoint are assigned to the piece whose closed
/// end contains the breakpoint.
pub const BRANCH_SNAP: f64 = 1e-12;

/// `floor(x / a)` with `x` nudged up so that representation error never
/// drops a value that sits on a multiple of `a` into the piece below.
pub fn floor_snap(x: f64, a: f64) -> i64 {
    ((x + BRANCH_SNAP * x.abs().max(1.0)) / a).floor() as i64
}

/// `ceil(x / a)` with `x` nudged down, the mirror image of [`floor_snap`].
pub fn ceil_snap(x: f64, a: f64) -> i64 {
    ((x - BRANCH_SNAP * x.abs().max(1.0)) / a).ceil() as i64
}

fn snap_tol(x: f64) -> f64 {
    BRANCH_SNAP * x.abs().max(1.0)
}

#[derive(Debug, Error, PartialEq)]
pub enum LiftError {
    #[error("weights and bounds have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("weight {0} is not finite")]
    NonFiniteWeight(usize),
    #[error("bound of variable {0} is zero")]
    ZeroBound(usize),
    #[error("index {0} is out of range")]
    IndexOutOfRange(usize),
    #[error("variable {0} appears more than once in the partition")]
    Duplicate(usize),
    #[error("variable {0} is missing from the partition")]
    Missing(usize),
    #[error("seed variable {0} has zero weight")]
    ZeroSeedWeight(usize),
    #[error("seed level {k} is outside 1..={mu}")]
    KOutOfRange { k: u32, mu: u32 },
    #[error(transparent)]
    Function(#[from] crate::concave_core::ConcaveFnError),
}

/// The set `X`. Weights are nonnegative: a variable given with a negative
/// weight is replaced by its complement `mu_i - x_i` and `flipped[i]` records
/// the substitution so cuts can be mapped back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceX {
    pub a: Vec<f64>,
    pub mu: Vec<u32>,
    pub f: ConcaveFn,
    #[serde(default)]
    pub flipped: Vec<bool>,
}

impl InstanceX {
    pub fn new(a: Vec<f64>, mu: Vec<u32>, f: ConcaveFn) -> Result<Self, LiftError> {
        if a.len() != mu.len() {
            return Err(LiftError::LengthMismatch(a.len(), mu.len()));
        }
        f.validate()?;
        for (i, (&ai, &mi)) in a.iter().zip(&mu).enumerate() {
            if !ai.is_finite() {
                return Err(LiftError::NonFiniteWeight(i));
            }
            if mi == 0 {
                return Err(LiftError::ZeroBound(i));
            }
        }
        let flipped: Vec<bool> = a.iter().map(|&ai| ai < 0.0).collect();
        let offset: f64 = a
            .iter()
            .zip(&mu)
            .filter(|(ai, _)| **ai < 0.0)
            .map(|(ai, mi)| ai * *mi as f64)
            .sum();
        let f = f.shift(offset);
        let a = a.into_iter().map(f64::abs).collect();
        Ok(InstanceX {
            a,
            mu,
            f,
            flipped,
        })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn weight(&self, x: &[f64]) -> f64 {
        self.a.iter().zip(x).map(|(a, v)| a * v).sum()
    }

    pub fn is_flipped(&self, i: usize) -> bool {
        self.flipped.get(i).copied().unwrap_or(false)
    }

    pub fn any_flipped(&self) -> bool {
        self.flipped.iter().any(|&b| b)
    }

    /// Maps a point between the caller's variables and the internal
    /// complemented ones. The map is its own inverse.
    pub fn map_point(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, &v)| {
                if self.is_flipped(i) {
                    self.mu[i] as f64 - v
                } else {
                    v
                }
            })
            .collect()
    }

    /// The same set seen through `y = mu - x`: weights stay, the function
    /// becomes `z -> f(-z + a'mu)`.
    pub fn complemented(&self) -> InstanceX {
        let total: f64 = self.a.iter().zip(&self.mu).map(|(a, m)| a * *m as f64).sum();
        InstanceX {
            a: self.a.clone(),
            mu: self.mu.clone(),
            f: self.f.reflect(total),
            flipped: vec![false; self.n()],
        }
    }
}

/// One item of a sorted ladder: `mu` copies of a unit of width `a`, each unit
/// charging `cost` once it is taken.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Rung {
    a: f64,
    mu: u32,
    cost: f64,
}

/// Where `delta` falls on a ladder of units.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Step {
    /// Cumulative width up to and including the selected unit.
    width: f64,
    /// Cumulative cost up to and including the selected unit.
    cost: f64,
    /// Number of units in the selected prefix.
    units: usize,
    last: bool,
}

/// Units are taken from the top while `delta <= -width`; the selected unit is
/// the first whose cumulative width strictly exceeds `-delta`, or the last.
fn descend(rungs: &[Rung], delta: f64) -> Step {
    let mut step = Step {
        width: 0.0,
        cost: 0.0,
        units: 0,
        last: true,
    };
    let total_units: usize = rungs.iter().map(|r| r.mu as usize).sum();
    for r in rungs {
        for _ in 0..r.mu {
            step.width += r.a;
            step.cost += r.cost;
            step.units += 1;
            if delta > -step.width + snap_tol(step.width) {
                step.last = step.units == total_units;
                return step;
            }
        }
    }
    step
}

/// Mirror of [`descend`] for `delta >= 0`: unit `u` covers
/// `[width_{u-1}, width_u)` and the last unit extends to infinity.
fn ascend(rungs: &[Rung], delta: f64) -> Step {
    let mut step = Step {
        width: 0.0,
        cost: 0.0,
        units: 0,
        last: true,
    };
    let total_units: usize = rungs.iter().map(|r| r.mu as usize).sum();
    for r in rungs {
        for _ in 0..r.mu {
            step.width += r.a;
            step.cost += r.cost;
            step.units += 1;
            if delta < step.width - snap_tol(step.width) {
                step.last = step.units == total_units;
                return step;
            }
        }
    }
    step
}

/// Which closed form `eta_exact` or `phi_exact` used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactForm {
    /// All held-at-bound variables are large, so the restriction is exact.
    LargeOnly,
    /// The seed level sits at the end of its range and the ladder is rebuilt
    /// around the smallest weight.
    Reseeded,
}

/// A seed choice `(s, k)` with the partition of the other variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftContext {
    inst: InstanceX,
    s: usize,
    k: u32,
    s0: Vec<usize>,
    s1: Vec<usize>,
    g: ConcaveFn,
    rho: f64,
    gk: f64,
    s0_plus: Vec<usize>,
    s1_plus: Vec<usize>,
    s0_rungs: Vec<Rung>,
    s1_rungs: Vec<Rung>,
}

/// Sorts indices by weight descending, ties by index ascending.
fn sort_desc(inst: &InstanceX, idx: &mut [usize]) {
    idx.sort_by(|&i, &j| inst.a[j].total_cmp(&inst.a[i]).then(i.cmp(&j)));
}

impl LiftContext {
    pub fn new(
        inst: &InstanceX,
        s: usize,
        k: u32,
        s0: &[usize],
        s1: &[usize],
    ) -> Result<Self, LiftError> {
        let n = inst.n();
        let mut seen = vec![false; n];
        for &i in std::iter::once(&s).chain(s0).chain(s1) {
            if i >= n {
                return Err(LiftError::IndexOutOfRange(i));
            }
            if seen[i] {
                return Err(LiftError::Duplicate(i));
            }
            seen[i] = true;
        }
        if let Some(i) = seen.iter().position(|&b| !b) {
            return Err(LiftError::Missing(i));
        }
        if inst.a[s].is_nan() || inst.a[s] <= 0.0 {
            return Err(LiftError::ZeroSeedWeight(s));
        }
        let mu_s = inst.mu[s];
        if k < 1 || k > mu_s {
            return Err(LiftError::KOutOfRange { k, mu: mu_s });
        }
        let mut s0 = s0.to_vec();
        let mut s1 = s1.to_vec();
        s0.sort_unstable();
        s1.sort_unstable();

        let fixed: f64 = s1.iter().map(|&i| inst.a[i] * inst.mu[i] as f64).sum();
        let g = inst.f.shift(fixed);
        let a_s = inst.a[s];
        let kf = k as f64;
        let gk = g.eval(kf * a_s);
        let rho = gk - g.eval((kf - 1.0) * a_s);

        let mut ctx = LiftContext {
            inst: inst.clone(),
            s,
            k,
            s0,
            s1,
            g,
            rho,
            gk,
            s0_plus: Vec::new(),
            s1_plus: Vec::new(),
            s0_rungs: Vec::new(),
            s1_rungs: Vec::new(),
        };

        let lo = kf * a_s;
        let hi = (mu_s - k + 1) as f64 * a_s;
        let mut s0_plus: Vec<usize> = ctx.s0.iter().copied().filter(|&i| inst.a[i] >= lo).collect();
        let mut s1_plus: Vec<usize> = ctx.s1.iter().copied().filter(|&i| inst.a[i] >= hi).collect();
        sort_desc(inst, &mut s0_plus);
        sort_desc(inst, &mut s1_plus);
        ctx.s0_rungs = s0_plus
            .iter()
            .map(|&i| Rung {
                a: inst.a[i],
                mu: inst.mu[i],
                cost: ctx.zeta(inst.a[i]),
            })
            .collect();
        ctx.s1_rungs = s1_plus
            .iter()
            .map(|&i| Rung {
                a: inst.a[i],
                mu: inst.mu[i],
                cost: ctx.zeta(-inst.a[i]),
            })
            .collect();
        ctx.s0_plus = s0_plus;
        ctx.s1_plus = s1_plus;
        Ok(ctx)
    }

    pub fn from_snapshot(inst: &InstanceX, snap: &ContextSnapshot) -> Result<Self, LiftError> {
        Self::new(inst, snap.s, snap.k, &snap.s0, &snap.s1)
    }

    pub fn snapshot(&self) -> ContextSnapshot {
        ContextSnapshot {
            s: self.s,
            k: self.k,
            s0: self.s0.clone(),
            s1: self.s1.clone(),
        }
    }

    pub fn instance(&self) -> &InstanceX {
        &self.inst
    }
    pub fn s(&self) -> usize {
        self.s
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn s0(&self) -> &[usize] {
        &self.s0
    }
    pub fn s1(&self) -> &[usize] {
        &self.s1
    }
    /// `g(z) = f(z + sum_{S1} mu_i a_i)`.
    pub fn g(&self) -> &ConcaveFn {
        &self.g
    }
    /// Slope of the seed cut, `g(k a_s) - g((k-1) a_s)`.
    pub fn rho(&self) -> f64 {
        self.rho
    }
    /// `g(k a_s)`.
    pub fn g_at_k(&self) -> f64 {
        self.gk
    }
    pub fn a_s(&self) -> f64 {
        self.inst.a[self.s]
    }
    pub fn mu_s(&self) -> u32 {
        self.inst.mu[self.s]
    }
    /// `S0` members with `a_i >= k a_s`, heaviest first.
    pub fn s0_plus(&self) -> &[usize] {
        &self.s0_plus
    }
    /// `S1` members with `a_i >= (mu_s - k + 1) a_s`, heaviest first.
    pub fn s1_plus(&self) -> &[usize] {
        &self.s1_plus
    }
    /// Total width `sum mu_i a_i` over `S0+`.
    pub fn s0_plus_width(&self) -> f64 {
        self.s0_rungs.iter().map(|r| r.a * r.mu as f64).sum()
    }
    /// Total width `sum mu_i a_i` over `S1+`.
    pub fn s1_plus_width(&self) -> f64 {
        self.s1_rungs.iter().map(|r| r.a * r.mu as f64).sum()
    }

    /// The seed-variable objective `g(delta + a_s x_s) - rho (x_s - k) - g(k a_s)`.
    pub fn seed_gain(&self, delta: f64, xs: i64) -> f64 {
        self.g.eval(delta + self.a_s() * xs as f64) - self.rho * (xs - self.k as i64) as f64 - self.gk
    }

    /// The same context on the complemented set: `S0` and `S1` swap and the
    /// seed level becomes `mu_s - k + 1`.
    pub fn complemented(&self) -> LiftContext {
        let inst = self.inst.complemented();
        LiftContext::new(&inst, self.s, self.mu_s() - self.k + 1, &self.s1, &self.s0)
            .expect("complementing preserves a valid partition")
    }

    /// Exact first-phase lifting function: the best seed-variable response
    /// within its bounds.
    pub fn zeta(&self, delta: f64) -> f64 {
        let k = self.k as i64;
        let mu = self.mu_s() as i64;
        let l = floor_snap(delta, self.a_s());
        let xs = if l < k - mu - 1 {
            mu
        } else if l >= k {
            0
        } else {
            k - l - 1
        };
        self.seed_gain(delta, xs)
    }

    /// Subadditive upper approximation of [`zeta`](Self::zeta): the seed
    /// variable is unbounded.
    pub fn z_approx(&self, delta: f64) -> f64 {
        let l = floor_snap(delta, self.a_s());
        self.seed_gain(delta, self.k as i64 - l - 1)
    }

    /// Best seed level once the selected large variables contribute weight
    /// `a_lambda`, clamped to `0..=mu_s`.
    pub fn gamma_opt(&self, a_lambda: f64, delta: f64) -> u32 {
        self.gamma_capped(a_lambda, delta, Some(self.mu_s() as i64)) as u32
    }

    fn gamma_capped(&self, a_lambda: f64, delta: f64, cap: Option<i64>) -> i64 {
        let y = delta + a_lambda;
        let l = (self.k as i64 - ceil_snap(y, self.a_s())).max(0);
        match cap {
            Some(c) => l.min(c),
            None => l,
        }
    }

    /// Number of large-variable units in an optimal prefix for the restricted
    /// second-phase problem.
    pub fn opt_prefix(&self, delta: f64) -> usize {
        descend(&self.s0_rungs, delta).units
    }

    fn ladder_value(&self, step: Step, delta: f64, gamma: i64) -> f64 {
        self.g.eval(delta + step.width + gamma as f64 * self.a_s()) - step.cost
            + (self.k as i64 - gamma) as f64 * self.rho
            - self.gk
    }

    /// Lower bound on the second-phase lifting function obtained by fixing
    /// the small members of `S0` at zero. Defined for `delta <= 0`.
    pub fn eta_lower(&self, delta: f64) -> f64 {
        let step = descend(&self.s0_rungs, delta);
        let gamma = self.gamma_capped(step.width, delta, Some(self.mu_s() as i64));
        self.ladder_value(step, delta, gamma)
    }

    /// Subadditive upper bound on the second-phase lifting function obtained
    /// by dropping the upper bound of the seed variable. Defined for
    /// `delta <= 0`.
    pub fn eta_upper(&self, delta: f64) -> f64 {
        let step = descend(&self.s0_rungs, delta);
        let cap = if step.last {
            None
        } else {
            Some(self.mu_s() as i64)
        };
        let gamma = self.gamma_capped(step.width, delta, cap);
        self.ladder_value(step, delta, gamma)
    }

    /// The form [`eta_exact`](Self::eta_exact) would use, if any.
    pub fn eta_exact_form(&self) -> Option<ExactForm> {
        if self.s0.len() == self.s0_plus.len() {
            Some(ExactForm::LargeOnly)
        } else if self.k == 1 {
            Some(ExactForm::Reseeded)
        } else {
            None
        }
    }

    /// The exact second-phase lifting function where a closed form exists,
    /// `None` otherwise. Defined for `delta <= 0`.
    pub fn eta_exact(&self, delta: f64) -> Option<f64> {
        match self.eta_exact_form()? {
            ExactForm::LargeOnly => Some(self.eta_lower(delta)),
            ExactForm::Reseeded => Some(self.reseeded().eta_lower(delta)),
        }
    }

    /// For `k = 1`: the context whose seed is the lightest positive-weight
    /// member of `S0 + s` (lowest index on ties). Every other positive-weight
    /// member of that set is then large, so the lower bound is exact.
    /// Zero-weight members contribute nothing and stay in the new `S0`.
    fn reseeded(&self) -> LiftContext {
        let a = &self.inst.a;
        let pool: Vec<usize> = self.s0.iter().copied().chain(std::iter::once(self.s)).collect();
        let new_s = pool
            .iter()
            .copied()
            .filter(|&i| a[i] > 0.0)
            .min_by(|&i, &j| a[i].total_cmp(&a[j]).then(i.cmp(&j)))
            .expect("the seed has positive weight");
        let rest: Vec<usize> = pool.into_iter().filter(|&i| i != new_s).collect();
        LiftContext::new(&self.inst, new_s, 1, &rest, &self.s1)
            .expect("reseeding keeps a valid partition")
    }

    fn phi_ladder(&self, delta: f64, bounded: bool) -> f64 {
        let step = ascend(&self.s1_rungs, delta);
        let a_s = self.a_s();
        let mu = self.mu_s() as i64;
        let x = delta - step.width;
        let l = (floor_snap(x, a_s) + mu - self.k as i64 + 1).max(0);
        let l = if bounded && step.last { l.min(mu) } else { l };
        let xs = mu - l;
        self.g.eval(x + xs as f64 * a_s) - step.cost + (self.k as i64 - xs) as f64 * self.rho
            - self.gk
    }

    /// Subadditive upper bound for lifting `S0` after `S1`, defined for
    /// `delta >= 0`. It is the reflection of the upper bound built on the
    /// complemented context.
    pub fn phi_upper(&self, delta: f64) -> f64 {
        self.phi_ladder(delta, false)
    }

    /// The form [`phi_exact`](Self::phi_exact) would use, if any.
    pub fn phi_exact_form(&self) -> Option<ExactForm> {
        if self.s1.len() == self.s1_plus.len() {
            Some(ExactForm::LargeOnly)
        } else if self.k == self.mu_s() {
            Some(ExactForm::Reseeded)
        } else {
            None
        }
    }

    /// The exact lifting function for `S0` after `S1` where a closed form
    /// exists. Defined for `delta >= 0`.
    pub fn phi_exact(&self, delta: f64) -> Option<f64> {
        match self.phi_exact_form()? {
            ExactForm::LargeOnly => Some(self.phi_ladder(delta, true)),
            ExactForm::Reseeded => Some(self.phi_top_level(delta)),
        }
    }

    /// Closed form for `k = mu_s`: the seed joins `S1` on one ladder sorted by
    /// weight and no seed response is left to optimize.
    fn phi_top_level(&self, delta: f64) -> f64 {
        let mut items: Vec<usize> = self
            .s1
            .iter()
            .copied()
            .chain(std::iter::once(self.s))
            .filter(|&i| self.inst.a[i] > 0.0)
            .collect();
        sort_desc(&self.inst, &mut items);
        let rungs: Vec<Rung> = items
            .iter()
            .map(|&i| Rung {
                a: self.inst.a[i],
                mu: self.inst.mu[i],
                cost: self.zeta(-self.inst.a[i]),
            })
            .collect();
        let step = ascend(&rungs, delta);
        let top = self.mu_s() as f64 * self.a_s();
        self.g.eval(delta + top - step.width) - step.cost - self.g.eval(top)
    }
}

/// The lifting functions of one context at one `delta`. Functions defined
/// only on one half-line are `None` on the other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub delta: f64,
    pub zeta: f64,
    pub z: f64,
    pub eta_lower: Option<f64>,
    pub eta_upper: Option<f64>,
    pub eta: Option<f64>,
    pub phi_upper: Option<f64>,
    pub phi: Option<f64>,
}

/// `count` evenly spaced evaluations on `[lo, hi]`.
pub fn evaluate_grid(ctx: &LiftContext, lo: f64, hi: f64, count: usize) -> Vec<GridPoint> {
    (0..count)
        .map(|i| {
            let delta = if count == 1 { lo } else { lo + (hi - lo) * i as f64 / (count - 1) as f64 };
            let neg = delta <= 0.0;
            let pos = delta >= 0.0;
            GridPoint {
                delta,
                zeta: ctx.zeta(delta),
                z: ctx.z_approx(delta),
                eta_lower: neg.then(|| ctx.eta_lower(delta)),
                eta_upper: neg.then(|| ctx.eta_upper(delta)),
                eta: if neg { ctx.eta_exact(delta) } else { None },
                phi_upper: pos.then(|| ctx.phi_upper(delta)),
                phi: if pos { ctx.phi_exact(delta) } else { None },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex1() -> LiftContext {
        let inst = InstanceX::new(
            vec![1.0, 2.0, 2.0, 3.0],
            vec![1; 4],
            ConcaveFn::NegExp { c: 3.0 },
        )
        .unwrap();
        LiftContext::new(&inst, 0, 1, &[1, 2], &[3]).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn zeta_values() {
        let c = ex1();
        let e = std::f64::consts::E;
        assert!(close(c.zeta(1.0), 1.0 - 1.0 / e));
        assert!(close(c.zeta(2.0) + c.zeta(-1.0), 1.0 / e - 1.0 / (e * e)));
        assert_eq!(c.zeta(0.0), 0.0);
    }

    #[test]
    fn z_values() {
        let c = ex1();
        let e = std::f64::consts::E;
        assert!(close(c.z_approx(2.0), 2.0 * (1.0 - 1.0 / e)));
        assert_eq!(c.z_approx(0.0), 0.0);
        for d in [-1.0, -0.3, 0.4, 0.99] {
            assert!(close(c.z_approx(d), c.zeta(d)));
        }
    }

    #[test]
    fn gamma_ends() {
        let inst = InstanceX::new(vec![1.0, 3.0], vec![3, 1], ConcaveFn::NegQuadratic { c: 2.0 })
            .unwrap();
        let c = LiftContext::new(&inst, 0, 2, &[1], &[]).unwrap();
        // delta <= (k - mu_s - 1) a_s - a_lambda
        assert_eq!(c.gamma_opt(3.0, -5.0), 3);
        // k a_s - a_lambda < delta
        assert_eq!(c.gamma_opt(3.0, -0.5), 0);
    }

    #[test]
    fn prefix_ends() {
        let inst = InstanceX::new(vec![1.0, 3.0, 2.5], vec![1, 1, 1], ConcaveFn::NegExp { c: 0.0 })
            .unwrap();
        let c = LiftContext::new(&inst, 0, 1, &[1, 2], &[]).unwrap();
        assert_eq!(c.opt_prefix(0.0), 1);
        assert_eq!(c.opt_prefix(-5.5), 2);
        assert_eq!(c.opt_prefix(-100.0), 2);
    }

    #[test]
    fn exact_availability() {
        let inst = InstanceX::new(
            vec![1.0, 0.5, 3.0, 1.0],
            vec![3, 1, 1, 1],
            ConcaveFn::NegExp { c: 0.0 },
        )
        .unwrap();
        let c = LiftContext::new(&inst, 0, 2, &[1, 2], &[3]).unwrap();
        assert_eq!(c.eta_exact(-1.0), None);
        let c1 = LiftContext::new(&inst, 0, 1, &[1, 2], &[3]).unwrap();
        assert!(c1.eta_exact(-1.0).is_some());
        let c2 = LiftContext::new(&inst, 0, 2, &[2], &[1, 3]).unwrap();
        assert_eq!(c2.eta_exact(-1.7), Some(c2.eta_lower(-1.7)));
    }

    #[test]
    fn negative_weights_are_complemented() {
        let inst = InstanceX::new(vec![1.0, -2.0], vec![1, 2], ConcaveFn::NegAbs { b: 0.5 }).unwrap();
        assert_eq!(inst.a, vec![1.0, 2.0]);
        assert_eq!(inst.flipped, vec![false, true]);
        // f(1 - 2*1) in original variables equals f_internal(1 + 2*(2-1)).
        let orig = ConcaveFn::NegAbs { b: 0.5 }.eval(1.0 - 2.0);
        assert!(close(inst.f.eval(inst.weight(&inst.map_point(&[1.0, 1.0]))), orig));
    }

    #[test]
    fn partition_errors() {
        let inst = InstanceX::new(vec![1.0, 0.0], vec![1, 1], ConcaveFn::NegExp { c: 0.0 }).unwrap();
        assert_eq!(
            LiftContext::new(&inst, 0, 1, &[], &[]).unwrap_err(),
            LiftError::Missing(1)
        );
        assert_eq!(
            LiftContext::new(&inst, 1, 1, &[0], &[]).unwrap_err(),
            LiftError::ZeroSeedWeight(1)
        );
        assert_eq!(
            LiftContext::new(&inst, 0, 2, &[1], &[]).unwrap_err(),
            LiftError::KOutOfRange { k: 2, mu: 1 }
        );
    }
}
