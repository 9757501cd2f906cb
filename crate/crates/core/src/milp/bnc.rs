//! Branch-and-cut over models with concave rows `w <= f(a'x)`.
//!
//! Every LP is solved from scratch with the current cut pool. Cuts are
//! globally valid and never removed. Node order is depth-first, switching to
//! the best open bound every [`RESTART_EVERY`] nodes.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::{LpModel, Sense};
use super::problems::{EumInstance, Problem, WtaInstance};
use super::simplex::{solve_lp_bounded, LpError};
use crate::concave_core::ConcaveFn;
use crate::lifting::{InstanceX, LiftError};
use crate::separation::{separate, Family, VIOL_MIN};
use crate::seed::{Cut, CutFamily, CutMeta};

pub const ABS_GAP: f64 = 1e-7;
pub const INT_TOL: f64 = 1e-6;
pub const RESTART_EVERY: usize = 100;
/// Cut rounds at an integral LP point are not capped by the round limits,
/// since the point can only be accepted once no cut separates it.
const INTEGRAL_ROUND_CAP: usize = 1000;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("branch-and-cut maximizes; the model minimizes")]
    NotMaximization,
    #[error("column {0} in a concave row must be integer with bounds [0, mu]")]
    RowColumn(usize),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error("LP failure: {0}")]
    Lp(#[from] LpError),
    #[error("an integral point kept producing violated cuts")]
    Stalled,
}

/// `w <= f(a'x)` over columns `vars`, whose global bounds are `[0, mu]`.
#[derive(Debug, Clone)]
pub struct ConcaveRow {
    pub w: usize,
    pub vars: Vec<usize>,
    pub inst: InstanceX,
}

#[derive(Debug, Clone)]
pub struct ConcaveMilp {
    pub lp: LpModel,
    pub rows: Vec<ConcaveRow>,
}

impl ConcaveMilp {
    pub fn new(lp: LpModel) -> Self {
        ConcaveMilp { lp, rows: Vec::new() }
    }

    /// Adds `w <= f(a'x)` and its tangent at `x = 0`, which keeps `w` bounded
    /// in the relaxation. Columns fixed at zero are dropped from the row.
    pub fn add_concave_row(&mut self, w: usize, vars: &[usize], a: &[f64], f: ConcaveFn) -> Result<(), SolveError> {
        let (mut kept, mut weights, mut mu) = (Vec::new(), Vec::new(), Vec::new());
        for (&j, &aj) in vars.iter().zip(a) {
            let hi = self.lp.hi[j];
            if !self.lp.integer[j] || self.lp.lo[j] != 0.0 || !hi.is_finite() || hi.fract() != 0.0 {
                return Err(SolveError::RowColumn(j));
            }
            if hi > 0.0 {
                kept.push(j);
                weights.push(aj);
                mu.push(hi as u32);
            }
        }
        let inst = InstanceX::new(weights, mu, f)?;
        let row = ConcaveRow { w, vars: kept, inst };
        let tangent = oa_cut(&row.inst, &vec![0.0; row.vars.len()]);
        self.lp.rows.push(row.lp_row(&tangent));
        self.rows.push(row);
        Ok(())
    }
}

impl ConcaveRow {
    fn restrict(&self, x: &[f64]) -> Vec<f64> {
        self.vars.iter().map(|&j| x[j]).collect()
    }

    fn lp_row(&self, cut: &Cut) -> super::model::LinRow {
        let mut coefs = vec![(self.w, 1.0)];
        coefs.extend(self.vars.iter().zip(&cut.alpha).filter(|(_, c)| **c != 0.0).map(|(&j, &c)| (j, -c)));
        super::model::LinRow {
            coefs,
            sense: Sense::Le,
            rhs: cut.alpha0,
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        let sub = self.restrict(x);
        self.inst.f.eval(self.inst.weight(&self.inst.map_point(&sub)))
    }
}

/// Tangent `w <= f(z) + f'(z) (a'x - z)` at `z = a'x_bar`, in the caller's
/// variables of `inst`.
pub fn oa_cut(inst: &InstanceX, x_bar: &[f64]) -> Cut {
    let z = inst.weight(&inst.map_point(x_bar));
    let slope = inst.f.derivative(z);
    let alpha: Vec<f64> = (0..inst.n())
        .map(|i| {
            let a = if inst.is_flipped(i) { -inst.a[i] } else { inst.a[i] };
            slope * a
        })
        .collect();
    let alpha0 = inst.f.eval(z) - alpha.iter().zip(x_bar).map(|(c, x)| c * x).sum::<f64>();
    Cut::new(alpha0, alpha, CutMeta::new(CutFamily::OuterApproximation))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Tangent cuts at the rounded LP point. When off they are still used as
    /// a last resort at integral points no lifted cut separates.
    pub use_oa: bool,
    pub families: Vec<Family>,
    pub prefer_exact: bool,
    pub time_limit: Option<f64>,
    pub node_limit: Option<usize>,
    pub root_rounds: usize,
    pub node_rounds: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            use_oa: true,
            families: Vec::new(),
            prefer_exact: false,
            time_limit: Some(600.0),
            node_limit: None,
            root_rounds: 10,
            node_rounds: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    TimeLimit,
    NodeLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub cuts_added: usize,
    pub nodes: usize,
    pub wall_time: f64,
    pub separation_time: f64,
    /// Simplex iterations, a machine-independent effort measure.
    pub lp_iterations: usize,
    /// Cut evaluations, the separation counterpart of `lp_iterations`.
    pub separation_work: usize,
    pub root_bound: f64,
    pub incumbent: Option<f64>,
    pub proven_bound: f64,
    pub status: SolveStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub x: Option<Vec<f64>>,
    pub stats: SolveStats,
}

struct Node {
    id: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    bound: f64,
}

enum Outcome {
    Pruned,
    Feasible { value: f64, x: Vec<f64> },
    Branch { bound: f64, x: Vec<f64> },
}

struct Solver<'a> {
    model: &'a ConcaveMilp,
    lp: LpModel,
    config: &'a SolveConfig,
    stats: SolveStats,
    incumbent: Option<(f64, Vec<f64>)>,
}

impl Solver<'_> {
    fn cutoff(&self) -> f64 {
        self.incumbent.as_ref().map_or(f64::NEG_INFINITY, |(v, _)| v + ABS_GAP)
    }

    fn is_integral(&self, x: &[f64]) -> bool {
        (0..x.len()).all(|j| !self.lp.integer[j] || (x[j] - x[j].round()).abs() <= INT_TOL)
    }

    /// One cut per concave row that the point violates, the most violated
    /// among the candidates.
    fn separate_point(&mut self, x: &[f64], integral: bool) -> Vec<super::model::LinRow> {
        let start = Instant::now();
        let mut out = Vec::new();
        for row in &self.model.rows {
            let sub = row.restrict(x);
            let w = x[row.w];
            let mut best: Option<(f64, Cut)> = None;
            // An integral point is accepted as feasible once nothing cuts it,
            // so there any genuine violation counts.
            let min = if integral { 1e-9 * w.abs().max(1.0) } else { VIOL_MIN };
            let offer = |cut: Cut, best: &mut Option<(f64, Cut)>| {
                let v = cut.violation(w, &sub);
                if v > min && best.as_ref().is_none_or(|(b, _)| v > *b) {
                    *best = Some((v, cut));
                }
            };
            if !self.config.families.is_empty() {
                self.stats.separation_work += 1;
                if let Some(cut) = separate(w, &sub, &row.inst, &self.config.families, self.config.prefer_exact) {
                    offer(cut, &mut best);
                }
            }
            let fallback = integral && best.is_none();
            if self.config.use_oa || fallback {
                self.stats.separation_work += 1;
                let rounded: Vec<f64> = sub
                    .iter()
                    .zip(&row.inst.mu)
                    .map(|(v, &m)| v.round().clamp(0.0, m as f64))
                    .collect();
                offer(oa_cut(&row.inst, &rounded), &mut best);
            }
            if let Some((_, cut)) = best {
                out.push(row.lp_row(&cut));
            }
        }
        self.stats.separation_time += start.elapsed().as_secs_f64();
        out
    }

    fn process(&mut self, lo: &[f64], hi: &[f64], root: bool) -> Result<Outcome, SolveError> {
        let max_rounds = if root { self.config.root_rounds } else { self.config.node_rounds };
        let mut rounds = 0;
        loop {
            let sol = match solve_lp_bounded(&self.lp, lo, hi) {
                Ok(sol) => sol,
                Err(LpError::Infeasible) => return Ok(Outcome::Pruned),
                Err(e) => return Err(e.into()),
            };
            self.stats.lp_iterations += sol.iterations;
            if root {
                self.stats.root_bound = sol.objective;
            }
            if sol.objective <= self.cutoff() {
                return Ok(Outcome::Pruned);
            }
            let integral = self.is_integral(&sol.x);
            if !integral && rounds >= max_rounds {
                return Ok(Outcome::Branch { bound: sol.objective, x: sol.x });
            }
            if integral && rounds >= INTEGRAL_ROUND_CAP {
                return Err(SolveError::Stalled);
            }
            let cuts = self.separate_point(&sol.x, integral);
            if cuts.is_empty() {
                if !integral {
                    return Ok(Outcome::Branch { bound: sol.objective, x: sol.x });
                }
                let x = self.repair(&sol.x);
                return Ok(Outcome::Feasible {
                    value: self.lp.objective(&x),
                    x,
                });
            }
            self.stats.cuts_added += cuts.len();
            self.lp.rows.extend(cuts);
            rounds += 1;
        }
    }

    /// Rounds the integer columns and sets each `w` to its concave value.
    fn repair(&self, x: &[f64]) -> Vec<f64> {
        let mut x: Vec<f64> = (0..x.len())
            .map(|j| if self.lp.integer[j] { x[j].round() } else { x[j] })
            .collect();
        for row in &self.model.rows {
            x[row.w] = f64::INFINITY;
        }
        for row in &self.model.rows {
            x[row.w] = x[row.w].min(row.value(&x));
        }
        x
    }

    fn run(mut self, start: Instant) -> Result<SolveResult, SolveError> {
        let n = self.lp.n_cols();
        let mut open = vec![Node {
            id: 0,
            lo: self.lp.lo.clone(),
            hi: self.lp.hi.clone(),
            bound: f64::INFINITY,
        }];
        let mut next_id = 1;
        let mut processed = 0usize;
        let mut status = SolveStatus::Optimal;
        self.stats.proven_bound = f64::INFINITY;
        while !open.is_empty() {
            if self.config.time_limit.is_some_and(|t| start.elapsed().as_secs_f64() >= t) {
                status = SolveStatus::TimeLimit;
                break;
            }
            if self.config.node_limit.is_some_and(|l| processed >= l) {
                status = SolveStatus::NodeLimit;
                break;
            }
            let pick = if processed > 0 && processed.is_multiple_of(RESTART_EVERY) {
                (0..open.len())
                    .max_by(|&i, &j| open[i].bound.total_cmp(&open[j].bound).then(open[j].id.cmp(&open[i].id)))
                    .expect("nonempty")
            } else {
                open.len() - 1
            };
            let node = open.remove(pick);
            if node.bound <= self.cutoff() {
                continue;
            }
            let root = processed == 0;
            processed += 1;
            self.stats.nodes = processed;
            match self.process(&node.lo, &node.hi, root)? {
                Outcome::Pruned => {}
                Outcome::Feasible { value, x } => {
                    if self.incumbent.as_ref().is_none_or(|(v, _)| value > *v) {
                        self.incumbent = Some((value, x));
                    }
                }
                Outcome::Branch { bound, x } => {
                    let j = (0..n)
                        .filter(|&j| self.lp.integer[j])
                        .map(|j| (j, (x[j] - x[j].floor()).min(x[j].ceil() - x[j])))
                        .filter(|&(_, frac)| frac > INT_TOL)
                        .fold(None, |best: Option<(usize, f64)>, (j, frac)| match best {
                            Some((_, b)) if b >= frac => best,
                            _ => Some((j, frac)),
                        })
                        .expect("a fractional column")
                        .0;
                    let mut down_hi = node.hi.clone();
                    down_hi[j] = x[j].floor();
                    let mut up_lo = node.lo.clone();
                    up_lo[j] = x[j].ceil();
                    open.push(Node {
                        id: next_id,
                        lo: node.lo.clone(),
                        hi: down_hi,
                        bound,
                    });
                    open.push(Node {
                        id: next_id + 1,
                        lo: up_lo,
                        hi: node.hi,
                        bound,
                    });
                    next_id += 2;
                }
            }
            let open_best = open.iter().map(|n| n.bound).fold(f64::NEG_INFINITY, f64::max);
            let inc = self.incumbent.as_ref().map_or(f64::NEG_INFINITY, |(v, _)| *v);
            self.stats.proven_bound = self.stats.proven_bound.min(open_best.max(inc));
        }
        let inc = self.incumbent.as_ref().map(|(v, _)| *v);
        if status == SolveStatus::Optimal {
            match inc {
                Some(v) => self.stats.proven_bound = v,
                None => status = SolveStatus::Infeasible,
            }
        }
        self.stats.status = status;
        self.stats.incumbent = inc;
        self.stats.wall_time = start.elapsed().as_secs_f64();
        Ok(SolveResult {
            x: self.incumbent.map(|(_, x)| x),
            stats: self.stats,
        })
    }
}

/// Maximizes the model by branch-and-cut.
pub fn branch_and_cut(model: &ConcaveMilp, config: &SolveConfig) -> Result<SolveResult, SolveError> {
    if !model.lp.maximize {
        return Err(SolveError::NotMaximization);
    }
    model.lp.validate().map_err(LpError::from)?;
    let start = Instant::now();
    let solver = Solver {
        model,
        lp: model.lp.clone(),
        config,
        stats: SolveStats {
            cuts_added: 0,
            nodes: 0,
            wall_time: 0.0,
            separation_time: 0.0,
            lp_iterations: 0,
            separation_work: 0,
            root_bound: f64::NAN,
            incumbent: None,
            proven_bound: f64::INFINITY,
            status: SolveStatus::Optimal,
        },
        incumbent: None,
    };
    solver.run(start)
}

/// Columns `x_0..x_{n-1}` then `w_0..w_{m-1}`.
pub fn build_eum(inst: &EumInstance) -> Result<ConcaveMilp, SolveError> {
    let n = inst.n();
    let mut lp = LpModel::new(true);
    for _ in 0..n {
        lp.add_col(0.0, 0.0, 1.0, true);
    }
    let w: Vec<usize> = inst
        .pi
        .iter()
        .map(|&p| lp.add_col(p, f64::NEG_INFINITY, f64::INFINITY, false))
        .collect();
    lp.add_row(inst.a.iter().copied().enumerate().collect(), Sense::Le, 1.0);
    let mut model = ConcaveMilp::new(lp);
    let vars: Vec<usize> = (0..n).collect();
    for (j, &wj) in w.iter().enumerate() {
        model.add_concave_row(wj, &vars, &inst.v[j], inst.utility())?;
    }
    Ok(model)
}

/// Columns `x_ij` at `i * m + j`, then `w_0..w_{m-1}`.
pub fn build_wta(inst: &WtaInstance) -> Result<ConcaveMilp, SolveError> {
    let (n, m) = (inst.n(), inst.m());
    let mut lp = LpModel::new(true);
    for i in 0..n {
        for _ in 0..m {
            lp.add_col(0.0, 0.0, inst.mu[i] as f64, true);
        }
    }
    let w: Vec<usize> = inst
        .value
        .iter()
        .map(|&v| lp.add_col(v, f64::NEG_INFINITY, f64::INFINITY, false))
        .collect();
    for i in 0..n {
        lp.add_row((0..m).map(|j| (i * m + j, 1.0)).collect(), Sense::Le, inst.mu[i] as f64);
    }
    let mut model = ConcaveMilp::new(lp);
    for (j, &wj) in w.iter().enumerate() {
        let vars: Vec<usize> = (0..n).map(|i| i * m + j).collect();
        let a: Vec<f64> = (0..n).map(|i| inst.weight(i, j)).collect();
        model.add_concave_row(wj, &vars, &a, inst.kill_fn())?;
    }
    Ok(model)
}

/// The model of a benchmark problem and the number of leading integer
/// columns that make up its decision vector.
pub fn build_problem(problem: &Problem) -> Result<(ConcaveMilp, usize), SolveError> {
    match problem {
        Problem::Eum(p) => Ok((build_eum(p)?, p.n())),
        Problem::Wta(p) => Ok((build_wta(p)?, p.n() * p.m())),
    }
}

/// Solves a benchmark problem; the decision vector is returned as integers.
pub fn solve_problem(problem: &Problem, config: &SolveConfig) -> Result<(Option<Vec<u32>>, SolveStats), SolveError> {
    let (model, width) = build_problem(problem)?;
    let result = branch_and_cut(&model, config)?;
    let x = result
        .x
        .map(|x| x[..width].iter().map(|v| v.round() as u32).collect());
    Ok((x, result.stats))
}
