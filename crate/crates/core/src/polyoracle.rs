//! Ground truth by enumeration: the points of `X`, cut validity, face
//! dimensions, lifting problems solved by brute force, and exact optima of the
//! benchmark problems.

use thiserror::Error;

use crate::lifting::{ceil_snap, InstanceX, LiftContext};
use crate::milp::problems::{EumInstance, Problem, WtaInstance};
use crate::seed::Cut;

/// Most integer points `enumerate_points` and friends will visit.
pub const POINT_LIMIT: u64 = 2_000_000;
/// Most assignments `optimum_bruteforce` will visit.
pub const ASSIGNMENT_LIMIT: u64 = 20_000_000;
/// Cut slack below which a point counts as tight, relative to `max(1, |w|)`.
pub const TIGHT_TOL: f64 = 1e-9;
/// Pivot threshold for the affine-rank elimination.
pub const RANK_TOL: f64 = 1e-8;
/// Absolute slack tolerated by [`check_validity`].
pub const VALIDITY_TOL: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("search space has {size} points, above the limit {limit}")]
    TooLarge { size: u64, limit: u64 },
    #[error("cut has {got} coefficients for {n} variables")]
    DimensionMismatch { got: usize, n: usize },
    #[error("cut is violated by {amount} at {x:?}")]
    InvalidCut { x: Vec<u32>, amount: f64 },
    #[error("seed-variable cap {cap} still improves the objective; enumeration would be incomplete")]
    CapTooSmall { cap: i64 },
}

fn box_size(mu: impl IntoIterator<Item = u32>) -> u64 {
    mu.into_iter()
        .fold(1u64, |acc, m| acc.saturating_mul(m as u64 + 1))
}

/// Visits every integer point of `[lo, hi]` in lexicographic order.
pub fn for_each_in_box(lo: &[i64], hi: &[i64], mut visit: impl FnMut(&[i64])) {
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return;
    }
    let mut x = lo.to_vec();
    loop {
        visit(&x);
        let mut i = x.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if x[i] < hi[i] {
                x[i] += 1;
                break;
            }
            x[i] = lo[i];
        }
    }
}

fn for_each_point(inst: &InstanceX, mut visit: impl FnMut(&[u32], f64)) -> Result<(), OracleError> {
    let size = box_size(inst.mu.iter().copied());
    if size > POINT_LIMIT {
        return Err(OracleError::TooLarge {
            size,
            limit: POINT_LIMIT,
        });
    }
    let lo = vec![0; inst.n()];
    let hi: Vec<i64> = inst.mu.iter().map(|&m| m as i64).collect();
    let mut xu = vec![0u32; inst.n()];
    let mut xf = vec![0f64; inst.n()];
    for_each_in_box(&lo, &hi, |x| {
        for (i, &v) in x.iter().enumerate() {
            xu[i] = v as u32;
            xf[i] = v as f64;
        }
        visit(&xu, value_at(inst, &xf));
    });
    Ok(())
}

/// `f(a'x)` at a point given in the caller's (uncomplemented) variables.
pub fn value_at(inst: &InstanceX, x: &[f64]) -> f64 {
    inst.f.eval(inst.weight(&inst.map_point(x)))
}

/// Every integer `x` in the box together with `w = f(a'x)`, in the caller's
/// variables.
pub fn enumerate_points(inst: &InstanceX) -> Result<Vec<(f64, Vec<u32>)>, OracleError> {
    let mut out = Vec::new();
    for_each_point(inst, |x, w| out.push((w, x.to_vec())))?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Validity {
    Ok,
    /// The worst violated point and by how much `w` exceeds the cut.
    Violation { x: Vec<u32>, amount: f64 },
}

impl Validity {
    pub fn is_ok(&self) -> bool {
        matches!(self, Validity::Ok)
    }
}

pub fn check_validity(cut: &Cut, inst: &InstanceX) -> Result<Validity, OracleError> {
    check_validity_tol(cut, inst, VALIDITY_TOL)
}

pub fn check_validity_tol(cut: &Cut, inst: &InstanceX, tol: f64) -> Result<Validity, OracleError> {
    if cut.alpha.len() != inst.n() {
        return Err(OracleError::DimensionMismatch {
            got: cut.alpha.len(),
            n: inst.n(),
        });
    }
    let mut worst: Option<(Vec<u32>, f64)> = None;
    let mut xf = vec![0.0; inst.n()];
    for_each_point(inst, |x, w| {
        for (d, &v) in xf.iter_mut().zip(x) {
            *d = v as f64;
        }
        let amount = w - cut.rhs(&xf);
        if amount > tol && worst.as_ref().is_none_or(|(_, a)| amount > *a) {
            worst = Some((x.to_vec(), amount));
        }
    })?;
    Ok(match worst {
        None => Validity::Ok,
        Some((x, amount)) => Validity::Violation { x, amount },
    })
}

/// Incremental affine-rank computation by elimination. Each accepted vector
/// is reduced against the basis and pivoted on its largest remaining entry.
#[derive(Debug, Clone)]
pub struct AffineRank {
    origin: Option<Vec<f64>>,
    basis: Vec<(usize, Vec<f64>)>,
    dim: usize,
}

impl AffineRank {
    pub fn new(dim: usize) -> Self {
        AffineRank {
            origin: None,
            basis: Vec::new(),
            dim,
        }
    }

    /// Adds a point; returns whether it raised the affine rank.
    pub fn push(&mut self, p: &[f64]) -> bool {
        let Some(origin) = &self.origin else {
            self.origin = Some(p.to_vec());
            return true;
        };
        let scale = p.iter().chain(origin).fold(1.0f64, |m, v| m.max(v.abs()));
        let mut r: Vec<f64> = p.iter().zip(origin).map(|(a, b)| a - b).collect();
        for (piv, row) in &self.basis {
            let c = r[*piv];
            if c != 0.0 {
                for (ri, bi) in r.iter_mut().zip(row) {
                    *ri -= c * bi;
                }
            }
        }
        let (piv, big) = r
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
        if big <= RANK_TOL * scale {
            return false;
        }
        let pv = r[piv];
        for v in r.iter_mut() {
            *v /= pv;
        }
        // Keep the basis fully reduced so later reductions need one pass.
        for (_, row) in self.basis.iter_mut() {
            let c = row[piv];
            if c != 0.0 {
                for (bi, ri) in row.iter_mut().zip(&r) {
                    *bi -= c * ri;
                }
            }
        }
        self.basis.push((piv, r));
        true
    }

    /// Number of affinely independent points seen.
    pub fn rank(&self) -> usize {
        if self.origin.is_none() {
            0
        } else {
            self.basis.len() + 1
        }
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.dim + 1
    }
}

/// Dimension of the face of `conv(X)` cut out by `cut` (rank of its tight
/// points minus one; `-1` for an empty face). The cut is facet-defining
/// exactly when the result equals `n`.
pub fn face_dimension(cut: &Cut, inst: &InstanceX) -> Result<i64, OracleError> {
    if let Validity::Violation { x, amount } = check_validity(cut, inst)? {
        return Err(OracleError::InvalidCut { x, amount });
    }
    let n = inst.n();
    let mut rank = AffineRank::new(n + 1);
    let mut p = vec![0.0; n + 1];
    for_each_point(inst, |x, w| {
        if rank.is_full() {
            return;
        }
        for (d, &v) in p[1..].iter_mut().zip(x) {
            *d = v as f64;
        }
        if (cut.rhs(&p[1..]) - w).abs() <= TIGHT_TOL * w.abs().max(1.0) {
            p[0] = w;
            rank.push(&p);
        }
    })?;
    Ok(rank.rank() as i64 - 1)
}

/// Dimension of the face `x_i = 0` (or `x_i = mu_i` when `upper`). The face
/// contains the downward ray in `w`, which is added as one extra point.
pub fn bound_face_dimension(inst: &InstanceX, i: usize, upper: bool) -> Result<i64, OracleError> {
    let n = inst.n();
    let target = if upper { inst.mu[i] } else { 0 };
    let mut rank = AffineRank::new(n + 1);
    let mut p = vec![0.0; n + 1];
    let mut ray_added = false;
    for_each_point(inst, |x, w| {
        if x[i] != target || rank.is_full() {
            return;
        }
        for (d, &v) in p[1..].iter_mut().zip(x) {
            *d = v as f64;
        }
        p[0] = w;
        rank.push(&p);
        if !ray_added {
            p[0] = w - 1.0;
            rank.push(&p);
            ray_added = true;
        }
    })?;
    Ok(rank.rank() as i64 - 1)
}

/// Which lifting problem [`lift_bruteforce`] solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftProblem {
    /// First phase: only the seed variable responds.
    Zeta,
    /// Second phase over `S0` and the seed variable, all within bounds.
    Eta,
    /// As `Eta` without the seed variable's upper bound.
    EtaRelaxed,
    /// Second phase of the reverse order: `S1` (complemented) and the seed.
    Phi,
    /// As `Phi` without the seed variable's lower bound.
    PhiRelaxed,
}

/// Seed-variable values tried beyond the cap to confirm the objective has
/// stopped improving.
const CAP_PROBE: i64 = 2;

/// Exact value of a lifting problem by enumeration.
pub fn lift_bruteforce(ctx: &LiftContext, delta: f64, which: LiftProblem) -> Result<f64, OracleError> {
    let inst = ctx.instance();
    let a_s = ctx.a_s();
    let k = ctx.k() as i64;
    let mu_s = ctx.mu_s() as i64;
    let (others, sign, zeta_sign): (&[usize], f64, f64) = match which {
        LiftProblem::Zeta => (&[], 1.0, 1.0),
        LiftProblem::Eta | LiftProblem::EtaRelaxed => (ctx.s0(), 1.0, 1.0),
        LiftProblem::Phi | LiftProblem::PhiRelaxed => (ctx.s1(), -1.0, -1.0),
    };
    let (xs_lo, xs_hi, probe) = match which {
        LiftProblem::Zeta | LiftProblem::Eta | LiftProblem::Phi => (0, mu_s, None),
        LiftProblem::EtaRelaxed => {
            let cap = k + ceil_snap(delta.abs(), a_s) + 1;
            (0, cap + CAP_PROBE, Some(cap))
        }
        LiftProblem::PhiRelaxed => {
            let cap = (k - 2 - ceil_snap(delta.abs(), a_s)).min(0);
            (cap - CAP_PROBE, mu_s, Some(cap))
        }
    };
    let size = box_size(others.iter().map(|&i| inst.mu[i])).saturating_mul((xs_hi - xs_lo + 1) as u64);
    if size > POINT_LIMIT {
        return Err(OracleError::TooLarge {
            size,
            limit: POINT_LIMIT,
        });
    }
    let weights: Vec<f64> = others.iter().map(|&i| sign * inst.a[i]).collect();
    let costs: Vec<f64> = others.iter().map(|&i| ctx.zeta(zeta_sign * inst.a[i])).collect();
    let lo = vec![0i64; others.len()];
    let hi: Vec<i64> = others.iter().map(|&i| inst.mu[i] as i64).collect();

    // Best value for each seed level, maximized over the other variables.
    let mut best_at = vec![f64::NEG_INFINITY; (xs_hi - xs_lo + 1) as usize];
    for_each_in_box(&lo, &hi, |y| {
        let mut shift = 0.0;
        let mut cost = 0.0;
        for (j, &v) in y.iter().enumerate() {
            shift += weights[j] * v as f64;
            cost += costs[j] * v as f64;
        }
        for xs in xs_lo..=xs_hi {
            let val = ctx.seed_gain(delta + shift, xs) - cost;
            let slot = &mut best_at[(xs - xs_lo) as usize];
            if val > *slot {
                *slot = val;
            }
        }
    });
    let in_range = |xs: i64| match (which, probe) {
        (LiftProblem::EtaRelaxed, Some(cap)) => xs <= cap,
        (LiftProblem::PhiRelaxed, Some(cap)) => xs >= cap,
        _ => true,
    };
    let best = (xs_lo..=xs_hi)
        .filter(|&xs| in_range(xs))
        .map(|xs| best_at[(xs - xs_lo) as usize])
        .fold(f64::NEG_INFINITY, f64::max);
    if let Some(cap) = probe {
        let beyond = (xs_lo..=xs_hi)
            .filter(|&xs| !in_range(xs))
            .map(|xs| best_at[(xs - xs_lo) as usize])
            .fold(f64::NEG_INFINITY, f64::max);
        if beyond > best + 1e-12 * best.abs().max(1.0) {
            return Err(OracleError::CapTooSmall { cap });
        }
    }
    Ok(best)
}

/// Exact optimum of a benchmark problem: objective and a maximizer in the
/// problem's own variable layout.
pub fn optimum_bruteforce(problem: &Problem) -> Result<(f64, Vec<u32>), OracleError> {
    match problem {
        Problem::Eum(p) => optimum_eum(p),
        Problem::Wta(p) => optimum_wta(p),
    }
}

fn optimum_eum(p: &EumInstance) -> Result<(f64, Vec<u32>), OracleError> {
    let n = p.n();
    let size = if n >= 64 { u64::MAX } else { 1u64 << n };
    if size > ASSIGNMENT_LIMIT {
        return Err(OracleError::TooLarge {
            size,
            limit: ASSIGNMENT_LIMIT,
        });
    }
    // Depth-first over the items with budget pruning.
    let mut best = (p.objective(&vec![0; n]), vec![0u32; n]);
    let mut x = vec![0u32; n];
    fn rec(p: &EumInstance, i: usize, spent: f64, x: &mut Vec<u32>, best: &mut (f64, Vec<u32>)) {
        if i == x.len() {
            let v = p.objective(x);
            if v > best.0 {
                *best = (v, x.clone());
            }
            return;
        }
        x[i] = 0;
        rec(p, i + 1, spent, x, best);
        if spent + p.a[i] <= 1.0 + 1e-12 {
            x[i] = 1;
            rec(p, i + 1, spent + p.a[i], x, best);
            x[i] = 0;
        }
    }
    rec(p, 0, 0.0, &mut x, &mut best);
    Ok(best)
}

fn optimum_wta(p: &WtaInstance) -> Result<(f64, Vec<u32>), OracleError> {
    let (n, m) = (p.n(), p.m());
    // Per weapon: the number of ways to spread at most mu_i copies over m targets.
    let mut per_weapon: Vec<Vec<Vec<u32>>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut opts = Vec::new();
        let lo = vec![0i64; m];
        let hi = vec![p.mu[i] as i64; m];
        for_each_in_box(&lo, &hi, |y| {
            if y.iter().sum::<i64>() <= p.mu[i] as i64 {
                opts.push(y.iter().map(|&v| v as u32).collect());
            }
        });
        per_weapon.push(opts);
    }
    let size = per_weapon
        .iter()
        .fold(1u64, |acc, o| acc.saturating_mul(o.len() as u64));
    if size > ASSIGNMENT_LIMIT {
        return Err(OracleError::TooLarge {
            size,
            limit: ASSIGNMENT_LIMIT,
        });
    }
    let weights: Vec<Vec<f64>> = (0..n).map(|i| (0..m).map(|j| p.weight(i, j)).collect()).collect();
    let f = p.kill_fn();
    let mut best = (f64::NEG_INFINITY, vec![0u32; n * m]);
    let lo = vec![0i64; n];
    let hi: Vec<i64> = per_weapon.iter().map(|o| o.len() as i64 - 1).collect();
    let mut z = vec![0.0; m];
    for_each_in_box(&lo, &hi, |choice| {
        z.iter_mut().for_each(|v| *v = 0.0);
        for (i, &c) in choice.iter().enumerate() {
            for (j, &cnt) in per_weapon[i][c as usize].iter().enumerate() {
                z[j] += weights[i][j] * cnt as f64;
            }
        }
        let val: f64 = (0..m).map(|j| p.value[j] * f.eval(z[j])).sum();
        if val > best.0 {
            let mut x = vec![0u32; n * m];
            for (i, &c) in choice.iter().enumerate() {
                x[i * m..(i + 1) * m].copy_from_slice(&per_weapon[i][c as usize]);
            }
            best = (val, x);
        }
    });
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concave_core::ConcaveFn;
    use crate::seed::{CutFamily, CutMeta};

    fn inst(a: Vec<f64>, mu: Vec<u32>, f: ConcaveFn) -> InstanceX {
        InstanceX::new(a, mu, f).unwrap()
    }

    #[test]
    fn point_counts() {
        let f = ConcaveFn::NegExp { c: 0.0 };
        assert_eq!(enumerate_points(&inst(vec![1.0], vec![3], f.clone())).unwrap().len(), 4);
        assert_eq!(
            enumerate_points(&inst(vec![1.0, 2.0, 2.0, 3.0], vec![1; 4], f.clone())).unwrap().len(),
            16
        );
        assert_eq!(
            enumerate_points(&inst(vec![1.0, 1.0, 1.0], vec![2, 3, 1], f)).unwrap().len(),
            24
        );
    }

    #[test]
    fn too_large_box() {
        let x = inst(vec![1.0; 21], vec![1; 21], ConcaveFn::NegExp { c: 0.0 });
        assert!(matches!(enumerate_points(&x), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn violation_at_origin() {
        let f = ConcaveFn::NegQuadratic { c: 1.0 };
        let x = inst(vec![1.0, 2.0], vec![1, 1], f.clone());
        let cut = Cut::new(f.eval(0.0) - 1.0, vec![10.0, 10.0], CutMeta::new(CutFamily::Seed));
        match check_validity(&cut, &x).unwrap() {
            Validity::Violation { x, amount } => {
                assert_eq!(x, vec![0, 0]);
                assert!((amount - 1.0).abs() < 1e-12);
            }
            Validity::Ok => panic!("expected a violation"),
        }
    }

    #[test]
    fn rank_shuffle_stable() {
        let pts = [vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![2.0, 0.0, 0.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0]];
        let mut orders = vec![vec![0, 1, 2, 3, 4], vec![4, 2, 0, 3, 1], vec![3, 4, 1, 0, 2]];
        orders.push(vec![2, 1, 4, 3, 0]);
        for ord in orders {
            let mut r = AffineRank::new(3);
            for &i in &ord {
                r.push(&pts[i]);
            }
            assert_eq!(r.rank(), 3);
        }
    }

    #[test]
    fn bound_face_is_facet() {
        let x = inst(vec![1.0, 2.0, 0.5], vec![2, 1, 3], ConcaveFn::NegExp { c: 1.0 });
        for i in 0..3 {
            assert_eq!(bound_face_dimension(&x, i, false).unwrap(), 3);
            assert_eq!(bound_face_dimension(&x, i, true).unwrap(), 3);
        }
    }

    #[test]
    fn tiny_wta_optimum() {
        let p = WtaInstance {
            p: vec![vec![0.4]],
            value: vec![7.0],
            mu: vec![1],
        };
        let (v, x) = optimum_bruteforce(&Problem::Wta(p)).unwrap();
        assert!((v - 2.8).abs() < 1e-12);
        assert_eq!(x, vec![1]);
    }

    #[test]
    fn eum_over_budget_is_empty() {
        let p = EumInstance {
            lambda: 1.0,
            a: vec![1.5, 2.0],
            pi: vec![0.5, 0.5],
            v: vec![vec![1.0, 1.0], vec![2.0, 1.0]],
        };
        let (v, x) = optimum_bruteforce(&Problem::Eum(p)).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(x, vec![0, 0]);
    }
}
