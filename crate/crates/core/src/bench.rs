//! Instance generators and the experiment harness.

use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::milp::bnc::{solve_problem, ABS_GAP, SolveConfig, SolveError, SolveStats, SolveStatus};
use crate::milp::problems::{EumInstance, Problem, WtaInstance};
use crate::separation::Family;

/// Generator identity written into every instance file. Bump the suffix
/// whenever the draw order changes.
pub const PRNG_TAG: &str = "chacha8-rand0.8-boxmuller-v1";

/// A standard normal draw by the Box-Muller transform (cosine branch only, so
/// each draw consumes exactly two uniforms).
fn std_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn normal(rng: &mut ChaCha8Rng, mean: f64, variance: f64) -> f64 {
    mean + variance.sqrt() * std_normal(rng)
}

/// Expected utility instance. Draw order: `a`, then per option `p, alpha,
/// beta`, then `ln f_j` per scenario, then `eps_ji` scenario-major.
pub fn gen_eum(n: usize, m: usize, lambda: f64, seed: u64) -> EumInstance {
    assert!(n >= 1 && m >= 1 && lambda > 0.0, "need n, m >= 1 and lambda > 0");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..=0.15)).collect();
    let mut opt = Vec::with_capacity(n);
    for _ in 0..n {
        let p = rng.gen_range(0.0..=0.2);
        let alpha = rng.gen_range(0.05..=0.1);
        let beta = rng.gen_range(0.0..=1.0);
        opt.push((p, alpha, beta));
    }
    let ln_f: Vec<f64> = (0..m).map(|_| normal(&mut rng, 0.05, 0.0025)).collect();
    let v = (0..m)
        .map(|j| {
            opt.iter()
                .map(|&(p, alpha, beta)| {
                    let eps = normal(&mut rng, 0.0, 0.0025);
                    p * (alpha + beta * ln_f[j] + eps).exp()
                })
                .collect()
        })
        .collect();
    EumInstance {
        lambda,
        a,
        pi: vec![1.0 / m as f64; m],
        v,
    }
}

/// Weapon-target instance. Draw order: `p` row-major, then `V`, then `mu`.
pub fn gen_wta(n: usize, m: usize, rho: f64, seed: u64) -> WtaInstance {
    assert!(n >= 1 && m >= 1 && (0.0..=1.0).contains(&rho), "need n, m >= 1 and rho in [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut open_unit = || loop {
        let p: f64 = rng.gen();
        if p > 0.0 {
            return p;
        }
    };
    let p: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| open_unit()).collect()).collect();
    let value = (0..m).map(|_| rng.gen_range(1..=100) as f64).collect();
    let mu = (0..n).map(|_| if rng.gen_bool(rho) { 2 } else { 1 }).collect();
    WtaInstance { p, value, mu }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Eum,
    Wta,
}

/// How an instance was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenHeader {
    pub prng: String,
    pub kind: ProblemKind,
    pub n: usize,
    pub m: usize,
    /// `lambda` for expected utility, `rho` for weapon-target.
    pub param: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub header: Option<GenHeader>,
    #[serde(flatten)]
    pub problem: Problem,
}

pub fn generate(kind: ProblemKind, n: usize, m: usize, param: f64, seed: u64) -> InstanceFile {
    let problem = match kind {
        ProblemKind::Eum => Problem::Eum(gen_eum(n, m, param, seed)),
        ProblemKind::Wta => Problem::Wta(gen_wta(n, m, param, seed)),
    };
    InstanceFile {
        header: Some(GenHeader {
            prng: PRNG_TAG.to_string(),
            kind,
            n,
            m,
            param,
            seed,
        }),
        problem,
    }
}

/// The four solver settings compared in the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    Oa,
    Single,
    Two,
    Both,
}

impl Setting {
    pub fn name(self) -> &'static str {
        match self {
            Setting::Oa => "oa",
            Setting::Single => "single",
            Setting::Two => "two",
            Setting::Both => "both",
        }
    }

    pub fn families(self) -> Vec<Family> {
        match self {
            Setting::Oa => vec![],
            Setting::Single => vec![Family::Single],
            Setting::Two => vec![Family::TwoI, Family::TwoIi],
            Setting::Both => Family::ALL.to_vec(),
        }
    }

    /// Tangent cuts are on for weapon-target and for the pure tangent
    /// setting; expected utility relies on exact separation at binary points.
    pub fn config(self, kind: ProblemKind, prefer_exact: bool, time_limit: Option<f64>) -> SolveConfig {
        SolveConfig {
            use_oa: kind == ProblemKind::Wta || self == Setting::Oa,
            families: self.families(),
            prefer_exact,
            time_limit,
            ..SolveConfig::default()
        }
    }
}

/// One parameter cell of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub n: usize,
    pub m: usize,
    pub param: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ProblemKind,
    pub cells: Vec<Cell>,
    pub instances_per_cell: usize,
    pub base_seed: u64,
    pub settings: Vec<Setting>,
    pub prefer_exact: bool,
    pub time_limit: Option<f64>,
    pub node_limit: Option<usize>,
    /// Report seconds in `T` and `ST` instead of simplex iterations and cut
    /// evaluations. Seconds make the output machine dependent.
    pub wall_clock: bool,
}

/// Outcome of one setting on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub cell: usize,
    pub instance: usize,
    pub setting: Setting,
    pub stats: Result<SolveStats, String>,
}

/// Per-cell averages for one setting.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub cell: Cell,
    pub setting: Setting,
    pub cuts: f64,
    pub nodes: f64,
    pub time: f64,
    pub sep_time: f64,
    pub rgap: f64,
    /// Average end gap over unsolved instances, when there are any.
    pub egap: Option<f64>,
    pub unsolved: usize,
    pub failed: usize,
    pub total: usize,
}

/// The desk-scale grid: a few cells per problem, sized to finish in minutes.
pub fn desk_grid(kind: ProblemKind) -> Vec<Cell> {
    let mut cells = Vec::new();
    match kind {
        ProblemKind::Eum => {
            for n in [15, 20] {
                for lambda in [0.4, 0.6, 1.0] {
                    cells.push(Cell { n, m: 5, param: lambda });
                }
            }
        }
        ProblemKind::Wta => {
            for n in [5, 8, 10] {
                for rho in [0.3, 0.4, 0.5] {
                    cells.push(Cell { n, m: n, param: rho });
                }
            }
        }
    }
    cells
}

pub fn instance_seed(base: u64, cell: usize, instance: usize) -> u64 {
    base.wrapping_add(1_000_003 * cell as u64).wrapping_add(instance as u64)
}

/// Percentage gap; bounds within the solver's gap tolerance count as closed.
fn gap(z: f64, opt: f64) -> f64 {
    if (z - opt).abs() <= ABS_GAP {
        return 0.0;
    }
    (z - opt) / opt.abs() * 100.0
}

/// Runs every setting on every instance and averages per cell. Solver errors
/// are recorded on their row and the grid continues.
pub fn run_experiment(config: &ExperimentConfig) -> (Vec<RunRecord>, Vec<CellSummary>) {
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for (ci, cell) in config.cells.iter().enumerate() {
        let mut per_instance: Vec<Vec<RunRecord>> = Vec::new();
        for inst in 0..config.instances_per_cell {
            let seed = instance_seed(config.base_seed, ci, inst);
            let problem = generate(config.kind, cell.n, cell.m, cell.param, seed).problem;
            let runs = config
                .settings
                .iter()
                .map(|&setting| {
                    let mut sc = setting.config(config.kind, config.prefer_exact, config.time_limit);
                    sc.node_limit = config.node_limit;
                    let stats = solve_problem(&problem, &sc)
                        .map(|(_, s)| s)
                        .map_err(|e: SolveError| e.to_string());
                    RunRecord {
                        cell: ci,
                        instance: inst,
                        setting,
                        stats,
                    }
                })
                .collect();
            per_instance.push(runs);
        }
        for (si, &setting) in config.settings.iter().enumerate() {
            let mut sum = CellSummary {
                cell: cell.clone(),
                setting,
                cuts: 0.0,
                nodes: 0.0,
                time: 0.0,
                sep_time: 0.0,
                rgap: 0.0,
                egap: None,
                unsolved: 0,
                failed: 0,
                total: per_instance.len(),
            };
            let (mut ok, mut egap_sum) = (0usize, 0.0);
            for runs in &per_instance {
                let opt = runs
                    .iter()
                    .filter_map(|r| r.stats.as_ref().ok().and_then(|s| s.incumbent))
                    .fold(f64::NEG_INFINITY, f64::max);
                let Ok(stats) = &runs[si].stats else {
                    sum.failed += 1;
                    continue;
                };
                ok += 1;
                sum.cuts += stats.cuts_added as f64;
                sum.nodes += stats.nodes as f64;
                if config.wall_clock {
                    sum.time += stats.wall_time;
                    sum.sep_time += stats.separation_time;
                } else {
                    sum.time += stats.lp_iterations as f64;
                    sum.sep_time += stats.separation_work as f64;
                }
                sum.rgap += gap(stats.root_bound, opt);
                if stats.status != SolveStatus::Optimal {
                    sum.unsolved += 1;
                    egap_sum += gap(stats.proven_bound, opt);
                }
            }
            if ok > 0 {
                let k = ok as f64;
                sum.cuts /= k;
                sum.nodes /= k;
                sum.time /= k;
                sum.sep_time /= k;
                sum.rgap /= k;
            }
            if sum.unsolved > 0 {
                sum.egap = Some(egap_sum / sum.unsolved as f64);
            }
            summaries.push(sum);
        }
        records.extend(per_instance.into_iter().flatten());
    }
    (records, summaries)
}

pub const CSV_HEADER: &str = "n,m,param,setting,C,N,T,ST,Rgap,Egap,status";

/// One line per cell and setting. `status` is `solved/total`, with failed
/// runs noted; `Egap` is empty when every instance was solved.
pub fn to_csv(summaries: &[CellSummary]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for s in summaries {
        let egap = s.egap.map(|g| format!("{g:.4}")).unwrap_or_default();
        let mut status = format!("{}/{}", s.total - s.unsolved - s.failed, s.total);
        if s.failed > 0 {
            let _ = write!(status, " failed={}", s.failed);
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{:.1},{:.1},{:.2},{:.2},{:.4},{},{}",
            s.cell.n,
            s.cell.m,
            s.cell.param,
            s.setting.name(),
            s.cuts,
            s.nodes,
            s.time,
            s.sep_time,
            s.rgap,
            egap,
            status
        );
    }
    out
}

/// Fixed-width table in which an average time over a cell with unsolved
/// instances carries their count as a superscript, `T^k`.
pub fn summary_table(summaries: &[CellSummary]) -> String {
    let mut out = format!(
        "{:>5} {:>4} {:>6} {:>7} {:>9} {:>9} {:>12} {:>10} {:>8} {:>8}\n",
        "n", "m", "param", "setting", "C", "N", "T", "ST", "Rgap", "Egap"
    );
    for s in summaries {
        let time = if s.unsolved > 0 {
            format!("{:.1}^{}", s.time, s.unsolved)
        } else {
            format!("{:.1}", s.time)
        };
        let egap = s.egap.map(|g| format!("{g:.2}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:>5} {:>4} {:>6} {:>7} {:>9.1} {:>9.1} {:>12} {:>10.1} {:>8.2} {:>8}",
            s.cell.n,
            s.cell.m,
            s.cell.param,
            s.setting.name(),
            s.cuts,
            s.nodes,
            time,
            s.sep_time,
            s.rgap,
            egap
        );
    }
    out
}
