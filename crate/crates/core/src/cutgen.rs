//! Lifted cuts assembled from the lifting functions, the closed forms they
//! reduce to for knapsack and binary sets, and the two affine transforms that
//! carry cuts between related sets.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concave_core::ConcaveFn;
use crate::lifting::{ceil_snap, floor_snap, InstanceX, LiftContext, LiftError};
use crate::seed::{Cut, CutFamily, CutMeta};

#[derive(Debug, Error, PartialEq)]
pub enum CutgenError {
    #[error("expected {expected} coefficients, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the concave function is not of the form min(0, b - z)")]
    NotKnapsack,
    #[error("theta = b - sum over S1 of a_i mu_i must be positive, got {0}")]
    ThetaNonPositive(f64),
    #[error("a_s mu_s must exceed theta ({theta}), got {cap}")]
    NoExcess { theta: f64, cap: f64 },
    #[error("theta / a_s = {0} is integral")]
    IntegralRatio(f64),
    #[error("seed level must be ceil(theta / a_s) = {expected}, got {got}")]
    SeedLevel { expected: u32, got: u32 },
    #[error("every bound must be 1 for the binary closed forms")]
    NotBinary,
    #[error("the binary forms need k = {expected}, got {got}")]
    BinarySeedLevel { expected: u32, got: u32 },
}

/// Substitutes `x_i -> mu_i - y_i` for every variable.
pub fn complement_transform(cut: &Cut, mu: &[u32]) -> Result<Cut, CutgenError> {
    if cut.alpha.len() != mu.len() {
        return Err(CutgenError::DimensionMismatch {
            expected: mu.len(),
            got: cut.alpha.len(),
        });
    }
    let mask = vec![true; mu.len()];
    Ok(complement_some(cut.clone(), mu, &mask))
}

fn complement_some(mut cut: Cut, mu: &[u32], mask: &[bool]) -> Cut {
    for i in 0..cut.alpha.len() {
        if mask[i] {
            cut.alpha0 += cut.alpha[i] * mu[i] as f64;
            cut.alpha[i] = -cut.alpha[i];
        }
    }
    cut
}

/// Maps a cut for `{w <= min(0, b - a'x)}` with `a = a1 - a2`, `b = b1 - b2`
/// to the two-row set `{v <= b1 - a1'x, v <= b2 - a2'x}` through
/// `w = v + a2'x - b2`.
pub fn tworow_transform(cut: &Cut, a2: &[f64], b2: f64) -> Result<Cut, CutgenError> {
    if cut.alpha.len() != a2.len() {
        return Err(CutgenError::DimensionMismatch {
            expected: a2.len(),
            got: cut.alpha.len(),
        });
    }
    let alpha = cut.alpha.iter().zip(a2).map(|(a, b)| a - b).collect();
    let mut meta = cut.meta.clone();
    meta.family = CutFamily::Transformed;
    Ok(Cut::new(cut.alpha0 + b2, alpha, meta).snapped())
}

/// Collects `w <= const + sum coef_i x_i` in the instance's internal
/// variables and maps it back to the caller's variables.
struct Builder<'a> {
    inst: &'a InstanceX,
    alpha0: f64,
    alpha: Vec<f64>,
}

impl<'a> Builder<'a> {
    fn new(inst: &'a InstanceX, alpha0: f64) -> Self {
        Builder {
            inst,
            alpha0,
            alpha: vec![0.0; inst.n()],
        }
    }

    /// `coef * x_i`.
    fn lower(&mut self, i: usize, coef: f64) {
        self.alpha[i] += coef;
    }

    /// `coef * (mu_i - x_i)`.
    fn upper(&mut self, i: usize, coef: f64) {
        self.alpha0 += coef * self.inst.mu[i] as f64;
        self.alpha[i] -= coef;
    }

    fn finish(self, meta: CutMeta) -> Cut {
        let cut = Cut::new(self.alpha0, self.alpha, meta);
        complement_some(cut, &self.inst.mu, &self.inst.flipped).snapped()
    }
}

fn meta(ctx: &LiftContext, family: CutFamily, exact: bool) -> CutMeta {
    CutMeta {
        family,
        context: Some(ctx.snapshot()),
        exact,
    }
}

/// Seed term `rho (x_s - k) + g(k a_s)`.
fn seeded(ctx: &LiftContext) -> Builder<'_> {
    let mut b = Builder::new(ctx.instance(), ctx.g_at_k() - ctx.rho() * ctx.k() as f64);
    b.lower(ctx.s(), ctx.rho());
    b
}

/// Every fixed variable lifted at once with the subadditive bound `Z`.
pub fn single_phase_cut(ctx: &LiftContext) -> Cut {
    let a = &ctx.instance().a;
    let mut b = seeded(ctx);
    for &i in ctx.s0() {
        b.lower(i, ctx.z_approx(a[i]));
    }
    for &i in ctx.s1() {
        b.upper(i, ctx.z_approx(-a[i]));
    }
    b.finish(meta(ctx, CutFamily::SinglePhase, false))
}

/// `S0` lifted first with `zeta`, then `S1` with the exact second-phase
/// function when available and requested, else with its upper bound.
pub fn two_phase_cut_i(ctx: &LiftContext, prefer_exact: bool) -> Cut {
    let a = &ctx.instance().a;
    let exact = prefer_exact && ctx.eta_exact_form().is_some();
    let mut b = seeded(ctx);
    for &i in ctx.s0() {
        b.lower(i, ctx.zeta(a[i]));
    }
    for &i in ctx.s1() {
        let coef = if exact {
            ctx.eta_exact(-a[i]).expect("form checked")
        } else {
            ctx.eta_upper(-a[i])
        };
        b.upper(i, coef);
    }
    b.finish(meta(ctx, CutFamily::TwoPhaseI, exact))
}

/// `S1` lifted first with `zeta`, then `S0` with the exact second-phase
/// function when available and requested, else with its upper bound.
pub fn two_phase_cut_ii(ctx: &LiftContext, prefer_exact: bool) -> Cut {
    let a = &ctx.instance().a;
    let exact = prefer_exact && ctx.phi_exact_form().is_some();
    let mut b = seeded(ctx);
    for &i in ctx.s1() {
        b.upper(i, ctx.zeta(-a[i]));
    }
    for &i in ctx.s0() {
        let coef = if exact {
            ctx.phi_exact(a[i]).expect("form checked")
        } else {
            ctx.phi_upper(a[i])
        };
        b.lower(i, coef);
    }
    b.finish(meta(ctx, CutFamily::TwoPhaseII, exact))
}

/// `0 <= a_i <= k a_s` on `S0` and `(k - mu_s - 1) a_s <= -a_i` on `S1`:
/// the single-phase cut is then facet-defining.
pub fn single_phase_is_facet(ctx: &LiftContext) -> bool {
    let (a, a_s) = (&ctx.instance().a, ctx.a_s());
    let k = ctx.k() as f64;
    let lo = (k - ctx.mu_s() as f64 - 1.0) * a_s;
    ctx.s0().iter().all(|&i| a[i] <= k * a_s) && ctx.s1().iter().all(|&i| -a[i] >= lo)
}

/// `S1` weights inside the window where the approximate Type I cut is still
/// facet-defining.
pub fn two_phase_i_is_facet(ctx: &LiftContext) -> bool {
    let a = &ctx.instance().a;
    let lo = (ctx.k() as f64 - ctx.mu_s() as f64 - 1.0) * ctx.a_s() - ctx.s0_plus_width();
    ctx.s1().iter().all(|&i| -a[i] >= lo)
}

/// `S0` weights inside the window where the approximate Type II cut is still
/// facet-defining.
pub fn two_phase_ii_is_facet(ctx: &LiftContext) -> bool {
    let a = &ctx.instance().a;
    let hi = ctx.s1_plus_width() + ctx.k() as f64 * ctx.a_s();
    ctx.s0().iter().all(|&i| a[i] <= hi)
}

/// Knapsack data derived from a context over `f(z) = min(0, b - z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnapsackData {
    pub theta: f64,
    pub sigma: f64,
    pub k: u32,
    pub a_s: f64,
    pub mu_s: u32,
}

impl KnapsackData {
    /// `sigma_delta`, the remainder of `delta` modulo `a_s`.
    pub fn remainder(&self, delta: f64) -> f64 {
        delta - floor_snap(delta, self.a_s) as f64 * self.a_s
    }

    /// `-delta + min(sigma, sigma_delta) + floor(delta / a_s) sigma`, the
    /// rounding coefficient.
    pub fn mir(&self, delta: f64) -> f64 {
        -delta + self.sigma.min(self.remainder(delta)) + floor_snap(delta, self.a_s) as f64 * self.sigma
    }

    fn constant(&self) -> f64 {
        -(self.k as f64 - 1.0) * (self.sigma - self.a_s)
    }
}

/// `b` for functions equal to `min(0, b - z)`, including shifted copies.
fn knapsack_rhs(f: &ConcaveFn) -> Option<f64> {
    match f {
        ConcaveFn::MinLinear { b } => Some(*b),
        ConcaveFn::Shifted { inner, c } => knapsack_rhs(inner).map(|b| b - c),
        _ => None,
    }
}

pub fn knapsack_data(ctx: &LiftContext) -> Result<KnapsackData, CutgenError> {
    let inst = ctx.instance();
    let b = knapsack_rhs(&inst.f).ok_or(CutgenError::NotKnapsack)?;
    let fixed: f64 = ctx.s1().iter().map(|&i| inst.a[i] * inst.mu[i] as f64).sum();
    let theta = b - fixed;
    let a_s = ctx.a_s();
    if theta <= 0.0 {
        return Err(CutgenError::ThetaNonPositive(theta));
    }
    let cap = a_s * ctx.mu_s() as f64;
    if cap - theta <= 0.0 {
        return Err(CutgenError::NoExcess { theta, cap });
    }
    let ratio = theta / a_s;
    if (ratio - ratio.round()).abs() <= 1e-9 * ratio.max(1.0) {
        return Err(CutgenError::IntegralRatio(ratio));
    }
    let k = ratio.ceil() as u32;
    if k != ctx.k() {
        return Err(CutgenError::SeedLevel {
            expected: k,
            got: ctx.k(),
        });
    }
    Ok(KnapsackData {
        theta,
        sigma: theta - ratio.floor() * a_s,
        k,
        a_s,
        mu_s: ctx.mu_s(),
    })
}

/// The single-phase cut of a knapsack context written as a rounding cut.
pub fn mir_closed_form(ctx: &LiftContext) -> Result<Cut, CutgenError> {
    let kd = knapsack_data(ctx)?;
    let a = &ctx.instance().a;
    let mut b = Builder::new(ctx.instance(), kd.constant());
    for &i in ctx.s0().iter().chain(std::iter::once(&ctx.s())) {
        b.lower(i, kd.mir(a[i]));
    }
    for &i in ctx.s1() {
        b.upper(i, kd.mir(-a[i]));
    }
    Ok(b.finish(meta(ctx, CutFamily::Mir, false)))
}

/// Units of a sorted large-item list, one weight per copy.
fn units(ctx: &LiftContext, items: &[usize]) -> Vec<f64> {
    let inst = ctx.instance();
    items
        .iter()
        .flat_map(|&i| std::iter::repeat_n(inst.a[i], inst.mu[i] as usize))
        .collect()
}

/// Upper second-phase bound of a knapsack pack context, unit by unit.
fn pack_eta_upper(kd: &KnapsackData, units: &[f64], delta: f64) -> f64 {
    if units.is_empty() {
        return kd.mir(delta);
    }
    let (k, sigma, theta, a_s) = (kd.k as f64, kd.sigma, kd.theta, kd.a_s);
    let mut width = 0.0;
    let mut u = 0usize;
    for w in units {
        width += w;
        u += 1;
        if delta > -width + 1e-12 * width.max(1.0) {
            break;
        }
    }
    let before = (u - 1) as f64;
    let y = delta + width;
    if y > theta {
        -delta - before * k * sigma
    } else if y > k * a_s {
        width - before * k * sigma - theta
    } else {
        let l = (kd.k as i64 - ceil_snap(y, a_s)) as f64;
        if y > theta - l * a_s {
            -delta - (before * k + l) * sigma
        } else {
            width - before * k * sigma - theta - l * (sigma - a_s)
        }
    }
}

/// Upper second-phase bound of a knapsack cover context, unit by unit.
fn cover_phi_upper(kd: &KnapsackData, units: &[f64], delta: f64) -> f64 {
    if units.is_empty() {
        return kd.mir(delta);
    }
    let (sigma, theta, a_s) = (kd.sigma, kd.theta, kd.a_s);
    let (k, mu_s) = (kd.k as i64, kd.mu_s as i64);
    let mut width = 0.0;
    let mut u = 0usize;
    for w in units {
        width += w;
        u += 1;
        if delta < width - 1e-12 * width.max(1.0) {
            break;
        }
    }
    let c = (mu_s - k + 1) as f64 * (sigma - a_s) * (u - 1) as f64;
    let l = (floor_snap(delta - width, a_s) + mu_s - k + 1).max(0);
    let edge = width + theta - (mu_s - l) as f64 * a_s;
    let base = c + l as f64 * (sigma - a_s);
    if delta < edge {
        base
    } else {
        -delta + edge + base
    }
}

/// Pack (Type I) and cover (Type II) cuts of a knapsack context in closed
/// form, both with the upper second-phase bounds.
pub fn knapsack_pack_cover_cuts(ctx: &LiftContext) -> Result<(Cut, Cut), CutgenError> {
    let kd = knapsack_data(ctx)?;
    let a = &ctx.instance().a;
    let k = kd.k as f64;
    let seed_coef = kd.sigma - kd.a_s;

    let mut pack = Builder::new(ctx.instance(), kd.constant());
    pack.lower(ctx.s(), seed_coef);
    let s0_units = units(ctx, ctx.s0_plus());
    for &i in ctx.s0() {
        let coef = if a[i] >= k * kd.a_s {
            -a[i] + k * kd.sigma
        } else {
            kd.mir(a[i])
        };
        pack.lower(i, coef);
    }
    for &i in ctx.s1() {
        pack.upper(i, pack_eta_upper(&kd, &s0_units, -a[i]));
    }

    let mut cover = Builder::new(ctx.instance(), kd.constant());
    cover.lower(ctx.s(), seed_coef);
    let s1_units = units(ctx, ctx.s1_plus());
    let large = (kd.mu_s - kd.k + 1) as f64 * kd.a_s;
    for &i in ctx.s1() {
        let coef = if a[i] >= large {
            (k - kd.mu_s as f64 - 1.0) * seed_coef
        } else {
            kd.mir(-a[i])
        };
        cover.upper(i, coef);
    }
    for &i in ctx.s0() {
        cover.lower(i, cover_phi_upper(&kd, &s1_units, a[i]));
    }
    Ok((
        pack.finish(meta(ctx, CutFamily::KnapsackPack, false)),
        cover.finish(meta(ctx, CutFamily::KnapsackCover, false)),
    ))
}

/// Which binary closed form to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubmodularFamily {
    Single,
    TwoI,
    TwoII,
}

fn weight_of(a: &[f64], idx: impl IntoIterator<Item = usize>) -> f64 {
    idx.into_iter().map(|i| a[i]).sum()
}

/// Items sorted by weight descending, ties by index ascending.
fn sorted_desc(a: &[f64], mut idx: Vec<usize>) -> Vec<usize> {
    idx.sort_by(|&i, &j| a[j].total_cmp(&a[i]).then(i.cmp(&j)));
    idx
}

/// The binary (all bounds 1) cuts written directly in terms of `f` and set
/// weights `a(T)`.
pub fn submodular_cut_closed_forms(ctx: &LiftContext, family: SubmodularFamily) -> Result<Cut, CutgenError> {
    let inst = ctx.instance();
    if inst.mu.iter().any(|&m| m != 1) {
        return Err(CutgenError::NotBinary);
    }
    if ctx.k() != 1 {
        return Err(CutgenError::BinarySeedLevel {
            expected: 1,
            got: ctx.k(),
        });
    }
    let (a, f, s) = (&inst.a, &inst.f, ctx.s());
    let a_s1 = weight_of(a, ctx.s1().iter().copied());
    let a_s1s = a_s1 + a[s];
    let f_s1 = f.eval(a_s1);
    let f_s1s = f.eval(a_s1s);
    let rho = f_s1s - f_s1;
    match family {
        SubmodularFamily::Single => {
            let z = |delta: f64| {
                let l = floor_snap(delta, a[s]) as f64;
                f.eval(delta + a_s1 - l * a[s]) + l * rho - f_s1
            };
            let mut b = Builder::new(inst, f_s1);
            b.lower(s, rho);
            for &i in ctx.s0() {
                b.lower(i, z(a[i]));
            }
            for &i in ctx.s1() {
                b.upper(i, z(-a[i]));
            }
            Ok(b.finish(meta(ctx, CutFamily::BinarySingle, false)))
        }
        SubmodularFamily::TwoI => {
            let zeta_pos = |d: f64| f.eval(d + a_s1) - f_s1;
            let order = sorted_desc(a, ctx.s0().iter().copied().chain([s]).collect());
            let total = a_s1 + weight_of(a, order.iter().copied());
            let eta = |delta: f64| {
                let (mut width, mut cost) = (0.0, 0.0);
                for &j in &order {
                    width += a[j];
                    cost += zeta_pos(a[j]);
                    if delta > -width {
                        return f.eval(delta + width + a_s1) - cost - f_s1;
                    }
                }
                f.eval(delta + total) - cost - f_s1
            };
            let mut b = Builder::new(inst, f_s1);
            for &i in ctx.s0().iter().chain([s].iter()) {
                b.lower(i, f.eval(a_s1 + a[i]) - f_s1);
            }
            for &i in ctx.s1() {
                b.upper(i, eta(-a[i]));
            }
            Ok(b.finish(meta(ctx, CutFamily::BinaryTwoPhaseI, true)))
        }
        SubmodularFamily::TwoII => {
            let zeta_neg = |d: f64| f.eval(d + a_s1s) - f_s1s;
            let order = sorted_desc(a, ctx.s1().iter().copied().chain([s]).collect());
            let phi = |delta: f64| {
                let (mut width, mut cost) = (0.0, 0.0);
                for &j in &order {
                    width += a[j];
                    cost += zeta_neg(-a[j]);
                    if delta < width {
                        return f.eval(delta - width + a_s1s) - cost - f_s1s;
                    }
                }
                f.eval(delta) - cost - f_s1s
            };
            let mut b = Builder::new(inst, f_s1s);
            for &i in ctx.s0() {
                b.lower(i, phi(a[i]));
            }
            for &i in ctx.s1().iter().chain([s].iter()) {
                b.upper(i, f.eval(a_s1s - a[i]) - f_s1s);
            }
            Ok(b.finish(meta(ctx, CutFamily::BinaryTwoPhaseII, true)))
        }
    }
}

/// A context in serializable form: the instance plus `(s, k, S0, S1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextDef {
    pub a: Vec<f64>,
    pub mu: Vec<u32>,
    pub f: ConcaveFn,
    pub s: usize,
    pub k: u32,
    pub s0: Vec<usize>,
    pub s1: Vec<usize>,
}

impl ContextDef {
    pub fn build(&self) -> Result<(InstanceX, LiftContext), LiftError> {
        let inst = InstanceX::new(self.a.clone(), self.mu.clone(), self.f.clone())?;
        let ctx = LiftContext::new(&inst, self.s, self.k, &self.s0, &self.s1)?;
        Ok((inst, ctx))
    }
}

/// Every cut this module can build from a context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutKind {
    Single,
    TwoI,
    TwoIi,
    Mir,
    Pack,
    Cover,
    BinarySingle,
    BinaryTwoI,
    BinaryTwoIi,
}

impl CutKind {
    pub const ALL: [CutKind; 9] = [
        CutKind::Single,
        CutKind::TwoI,
        CutKind::TwoIi,
        CutKind::Mir,
        CutKind::Pack,
        CutKind::Cover,
        CutKind::BinarySingle,
        CutKind::BinaryTwoI,
        CutKind::BinaryTwoIi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CutKind::Single => "single",
            CutKind::TwoI => "two-i",
            CutKind::TwoIi => "two-ii",
            CutKind::Mir => "mir",
            CutKind::Pack => "pack",
            CutKind::Cover => "cover",
            CutKind::BinarySingle => "binary-single",
            CutKind::BinaryTwoI => "binary-two-i",
            CutKind::BinaryTwoIi => "binary-two-ii",
        }
    }

    /// `prefer_exact` selects the exact second-phase function for the
    /// two-phase cuts when a closed form exists.
    pub fn build(self, ctx: &LiftContext, prefer_exact: bool) -> Result<Cut, CutgenError> {
        match self {
            CutKind::Single => Ok(single_phase_cut(ctx)),
            CutKind::TwoI => Ok(two_phase_cut_i(ctx, prefer_exact)),
            CutKind::TwoIi => Ok(two_phase_cut_ii(ctx, prefer_exact)),
            CutKind::Mir => mir_closed_form(ctx),
            CutKind::Pack => knapsack_pack_cover_cuts(ctx).map(|(pack, _)| pack),
            CutKind::Cover => knapsack_pack_cover_cuts(ctx).map(|(_, cover)| cover),
            CutKind::BinarySingle => submodular_cut_closed_forms(ctx, SubmodularFamily::Single),
            CutKind::BinaryTwoI => submodular_cut_closed_forms(ctx, SubmodularFamily::TwoI),
            CutKind::BinaryTwoIi => submodular_cut_closed_forms(ctx, SubmodularFamily::TwoII),
        }
    }
}

impl std::str::FromStr for CutKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        CutKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown cut kind '{s}'"))
    }
}
