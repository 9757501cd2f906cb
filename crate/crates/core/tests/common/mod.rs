//! Random instances and contexts shared by the integration suites.
#![allow(dead_code)]

use liftcut::concave_core::ConcaveFn;
use liftcut::lifting::{InstanceX, LiftContext};
use liftcut::subadditive_family::{SubadditiveParams, TailRule};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Weights on a coarse grid so ties and exact breakpoints occur often.
pub fn weight(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..10) {
        0 => 0.0,
        1..=5 => rng.gen_range(1..=12) as f64 * 0.25,
        _ => rng.gen_range(0.1..3.0),
    }
}

pub fn concave_fn(rng: &mut ChaCha8Rng) -> ConcaveFn {
    match rng.gen_range(0..6) {
        0 => ConcaveFn::ExpUtility {
            lambda: rng.gen_range(0.5..3.0),
            c: rng.gen_range(-2.0..2.0),
        },
        1 => ConcaveFn::NegExp {
            c: rng.gen_range(-1.0..4.0),
        },
        2 => ConcaveFn::MinLinear {
            b: rng.gen_range(0.0..6.0),
        },
        3 => ConcaveFn::NegAbs {
            b: rng.gen_range(-1.0..6.0),
        },
        4 => ConcaveFn::NegQuadratic {
            c: rng.gen_range(-1.0..6.0),
        },
        _ => {
            let pts = rng.gen_range(2..6);
            let mut xs = vec![rng.gen_range(-2.0..1.0)];
            for _ in 1..pts {
                let last = *xs.last().unwrap();
                xs.push(last + rng.gen_range(0.3..2.5));
            }
            let mut slope = rng.gen_range(0.0..3.0);
            let mut ys = vec![rng.gen_range(-1.0..1.0)];
            for i in 1..pts {
                let y = ys[i - 1] + slope * (xs[i] - xs[i - 1]);
                ys.push(y);
                slope -= rng.gen_range(0.0..1.5);
            }
            ConcaveFn::tabulated(xs, ys).unwrap()
        }
    }
}

pub fn instance(rng: &mut ChaCha8Rng, n: usize, max_mu: u32) -> InstanceX {
    let mut a: Vec<f64> = (0..n).map(|_| weight(rng)).collect();
    if a.iter().all(|&v| v == 0.0) {
        a[0] = 1.0;
    }
    let mu = (0..n).map(|_| rng.gen_range(1..=max_mu)).collect();
    InstanceX::new(a, mu, concave_fn(rng)).unwrap()
}

/// A random partition with a positive-weight seed variable.
pub fn context_on(rng: &mut ChaCha8Rng, inst: &InstanceX) -> LiftContext {
    let n = inst.n();
    let seeds: Vec<usize> = (0..n).filter(|&i| inst.a[i] > 0.0).collect();
    let s = seeds[rng.gen_range(0..seeds.len())];
    let k = rng.gen_range(1..=inst.mu[s]);
    let (mut s0, mut s1) = (Vec::new(), Vec::new());
    for i in (0..n).filter(|&i| i != s) {
        if rng.gen_bool(0.5) {
            s0.push(i);
        } else {
            s1.push(i);
        }
    }
    LiftContext::new(inst, s, k, &s0, &s1).unwrap()
}

pub fn context(rng: &mut ChaCha8Rng, max_n: usize, max_mu: u32) -> LiftContext {
    let n = rng.gen_range(1..=max_n);
    let inst = instance(rng, n, max_mu);
    context_on(rng, &inst)
}

/// `count` evenly spaced points from `lo` to `hi`.
pub fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Span of `delta` values that exercises every branch of the lifting
/// functions on this context.
pub fn reach(ctx: &LiftContext) -> f64 {
    let inst = ctx.instance();
    let total: f64 = inst.a.iter().zip(&inst.mu).map(|(a, m)| a * *m as f64).sum();
    total + (ctx.mu_s() as f64 + 1.0) * ctx.a_s() + 0.5
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Like [`instance`] but with weights of either sign, so complementing is
/// exercised.
pub fn signed_instance(rng: &mut ChaCha8Rng, n: usize, max_mu: u32) -> InstanceX {
    let mut a: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(0.3) { -weight(rng) } else { weight(rng) })
        .collect();
    if a.iter().all(|&v| v == 0.0) {
        a[0] = 1.0;
    }
    let mu = (0..n).map(|_| rng.gen_range(1..=max_mu)).collect();
    InstanceX::new(a, mu, concave_fn(rng)).unwrap()
}

/// A context over `min(0, b - z)` meeting the knapsack preconditions, with
/// `k = ceil(theta / a_s)`.
pub fn knapsack_context(rng: &mut ChaCha8Rng, max_n: usize, max_mu: u32) -> LiftContext {
    loop {
        let n = rng.gen_range(1..=max_n);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=12) as f64 * 0.25).collect();
        let mu: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=max_mu)).collect();
        let s = rng.gen_range(0..n);
        let (mut s0, mut s1) = (Vec::new(), Vec::new());
        for i in (0..n).filter(|&i| i != s) {
            if rng.gen_bool(0.5) {
                s0.push(i);
            } else {
                s1.push(i);
            }
        }
        let fixed: f64 = s1.iter().map(|&i| a[i] * mu[i] as f64).sum();
        let theta = rng.gen_range(0.05..a[s] * mu[s] as f64);
        let ratio = theta / a[s];
        if (ratio - ratio.round()).abs() < 1e-3 {
            continue;
        }
        let k = ratio.ceil() as u32;
        let f = ConcaveFn::MinLinear { b: fixed + theta };
        let inst = InstanceX::new(a, mu, f).unwrap();
        return LiftContext::new(&inst, s, k, &s0, &s1).unwrap();
    }
}

/// Exactly binary instances with a `k = 1` context.
pub fn binary_context(rng: &mut ChaCha8Rng, max_n: usize) -> LiftContext {
    let n = rng.gen_range(1..=max_n);
    let inst = instance(rng, n, 1);
    context_on(rng, &inst)
}

/// Cuts agree coefficient by coefficient.
pub fn same_cut(a: &liftcut::seed::Cut, b: &liftcut::seed::Cut, tol: f64) -> bool {
    close(a.alpha0, b.alpha0, tol) && a.alpha.iter().zip(&b.alpha).all(|(x, y)| close(*x, *y, tol))
}

pub const PAIRS: usize = 10_000;

/// A draw from `[lo, hi]`, snapped to a quarter grid half the time so that
/// breakpoints on coarse weights are hit.
pub fn draw(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let x = r.gen_range(lo..=hi);
    if r.gen_bool(0.5) {
        ((x * 4.0).round() / 4.0).clamp(lo, hi)
    } else {
        x
    }
}

/// Worst `f(x + y) - f(x) - f(y)` over sampled pairs, relative to the
/// magnitudes involved.
pub fn worst_excess(r: &mut ChaCha8Rng, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64, f64) {
    let mut worst = (f64::NEG_INFINITY, 0.0, 0.0);
    for _ in 0..PAIRS {
        let (x, y) = (draw(r, lo, hi), draw(r, lo, hi));
        let (fx, fy, fxy) = (f(x), f(y), f(x + y));
        let excess = (fxy - fx - fy) / fx.abs().max(fy.abs()).max(fxy.abs()).max(1.0);
        if excess > worst.0 {
            worst = (excess, x, y);
        }
    }
    worst
}

/// Random valid family parameters: `b` nonincreasing and nonnegative,
/// `b[i] + v[i]` nondecreasing, any kernel.
pub fn family_params(rng: &mut ChaCha8Rng) -> SubadditiveParams {
    let len = rng.gen_range(1..=5);
    let tau = rng.gen_range(1..=4);
    let mut b: Vec<f64> = (0..len).map(|_| rng.gen_range(0..=12) as f64 * 0.25).collect();
    b.sort_by(|x, y| y.total_cmp(x));
    let mut c: Vec<f64> = (0..len).map(|_| rng.gen_range(-12..=12) as f64 * 0.25).collect();
    c.sort_by(f64::total_cmp);
    SubadditiveParams {
        epsilon: rng.gen_range(1..=8) as f64 * 0.25,
        tau,
        v: b.iter().zip(&c).map(|(bi, ci)| ci - bi).collect(),
        b,
        m: rng.gen_range(1..=len + 2),
        gamma: rng.gen_range(0..tau),
        base: concave_fn(rng),
        tail: TailRule::Closure,
    }
}

/// A span covering the prefix, the `m`-th interval and a few tail intervals.
pub fn family_reach(p: &SubadditiveParams) -> f64 {
    p.big_a(p.b.len().max(p.m) + 3).unwrap()
}
