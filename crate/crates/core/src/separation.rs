//! Choosing `(s, k, S0, S1)` for a point: exact when the point is integral
//! with at most one variable strictly inside its bounds, a rounding
//! heuristic otherwise.

use serde::{Deserialize, Serialize};

use crate::concave_core::TOL;
use crate::cutgen::{single_phase_cut, two_phase_cut_i, two_phase_cut_ii};
use crate::lifting::{InstanceX, LiftContext};
use crate::seed::{Cut, CutFamily, CutMeta};

/// Smallest violation worth returning from the heuristic.
pub const VIOL_MIN: f64 = 1e-6;
/// Coordinates this close to an integer are treated as integral.
pub const SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Single,
    TwoI,
    TwoIi,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Single, Family::TwoI, Family::TwoIi];

    pub fn build(self, ctx: &LiftContext, prefer_exact: bool) -> Cut {
        match self {
            Family::Single => single_phase_cut(ctx),
            Family::TwoI => two_phase_cut_i(ctx, prefer_exact),
            Family::TwoIi => two_phase_cut_ii(ctx, prefer_exact),
        }
    }
}

/// Internal coordinate of `x_i`, snapped, and its integer value if integral.
fn snapped(v: f64) -> (f64, Option<u32>) {
    let r = v.round();
    if (v - r).abs() <= SNAP {
        (r, Some(r as u32))
    } else {
        (v, None)
    }
}

/// The most violated cut among the requested families for `(w_bar, x_bar)`,
/// or `None`. At points integral with at most one coordinate strictly inside
/// its bounds a cut is returned exactly when `w_bar > f(a'x_bar)` by more
/// than `TOL` relative to `max(1, |f(a'x_bar)|)`.
pub fn separate(w_bar: f64, x_bar: &[f64], inst: &InstanceX, families: &[Family], prefer_exact: bool) -> Option<Cut> {
    let n = inst.n();
    assert_eq!(x_bar.len(), n, "point has the wrong dimension");
    if families.is_empty() {
        return None;
    }
    let mut x = vec![0.0; n];
    let mut level = vec![None; n];
    for i in 0..n {
        let v = if inst.is_flipped(i) { inst.mu[i] as f64 - x_bar[i] } else { x_bar[i] };
        (x[i], level[i]) = snapped(v);
    }
    // Zero weights get zero coefficients in every family, so their value
    // never matters.
    let at_bound = |i: usize| inst.a[i] == 0.0 || matches!(level[i], Some(l) if l == 0 || l == inst.mu[i]);
    let interior: Vec<usize> = (0..n).filter(|&i| !at_bound(i)).collect();

    let exact_case = match interior.as_slice() {
        [] => {
            // Largest weight, smallest index on ties.
            let s = (0..n).fold(0, |best, i| if inst.a[i] > inst.a[best] { i } else { best });
            if inst.a[s] <= 0.0 {
                return flat_cut(w_bar, inst);
            }
            let k = if level[s] == Some(0) { 1 } else { inst.mu[s] };
            Some((s, k))
        }
        [s] if level[*s].is_some() && inst.a[*s] > 0.0 => Some((*s, level[*s].unwrap())),
        _ => None,
    };

    if let Some((s, k)) = exact_case {
        let others = (0..n).filter(|&i| i != s);
        let low = |i: &usize| level[*i] == Some(0) || inst.a[*i] == 0.0;
        let s0: Vec<usize> = others.clone().filter(low).collect();
        let s1: Vec<usize> = others.filter(|i| !low(i)).collect();
        let ctx = LiftContext::new(inst, s, k, &s0, &s1).expect("partition is well formed");
        // The rhs collapses to f(a'x), so rounding scales with its size.
        let top = inst.f.eval(inst.weight(&x));
        return most_violated(&ctx, families, prefer_exact, w_bar, x_bar, TOL * top.abs().max(1.0));
    }

    let mut best: Option<(f64, Cut)> = None;
    for &s in interior.iter().filter(|&&s| inst.a[s] > 0.0) {
        let k = (x[s].ceil() as u32).max(1);
        let others = (0..n).filter(|&i| i != s);
        let s1: Vec<usize> = others.clone().filter(|&i| x[i] >= inst.mu[i] as f64 / 2.0).collect();
        let s0: Vec<usize> = others.filter(|&i| x[i] < inst.mu[i] as f64 / 2.0).collect();
        let ctx = LiftContext::new(inst, s, k, &s0, &s1).expect("partition is well formed");
        if let Some(cut) = most_violated(&ctx, families, prefer_exact, w_bar, x_bar, VIOL_MIN) {
            let v = cut.violation(w_bar, x_bar);
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, cut));
            }
        }
    }
    best.map(|(_, cut)| cut)
}

fn most_violated(ctx: &LiftContext, families: &[Family], prefer_exact: bool, w_bar: f64, x_bar: &[f64], min: f64) -> Option<Cut> {
    let mut best: Option<(f64, Cut)> = None;
    for fam in families {
        let cut = fam.build(ctx, prefer_exact);
        let v = cut.violation(w_bar, x_bar);
        if v > min && best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, cut));
        }
    }
    best.map(|(_, cut)| cut)
}

/// Every weight is zero, so `f(a'x) = f(0)` is itself the hull.
fn flat_cut(w_bar: f64, inst: &InstanceX) -> Option<Cut> {
    let top = inst.f.eval(0.0);
    (w_bar > top + TOL).then(|| Cut::new(top, vec![0.0; inst.n()], CutMeta::new(CutFamily::Seed)))
}
