use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use liftcut::bench::{self, ExperimentConfig, InstanceFile, ProblemKind, Setting};
use liftcut::cutgen::{ContextDef, CutKind};
use liftcut::lifting::evaluate_grid;
use liftcut::milp::solve_problem;
use liftcut::polyoracle::{check_validity, face_dimension, Validity};
use liftcut::seed::Cut;

#[derive(Parser)]
#[command(name = "liftcut", version, about = "Lifted cuts for sets with a concave right-hand side")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a cut from a context file and print it as JSON.
    Cut(CutArgs),
    /// Build a cut and check it against the enumerated hull.
    Verify(CutArgs),
    /// Tabulate the lifting functions of a context.
    Eval(EvalArgs),
    /// Solve one expected-utility or weapon-target instance.
    Solve(SolveArgs),
    /// Write a generated instance as JSON.
    Gen(GenArgs),
    /// Run a grid of generated instances under every setting.
    Bench(BenchArgs),
}

#[derive(Args)]
struct CutArgs {
    /// JSON context: `{a, mu, f, s, k, s0, s1}`.
    context: PathBuf,
    #[arg(long, default_value = "single")]
    kind: CutKind,
    /// Use the exact second-phase function when a closed form exists.
    #[arg(long)]
    exact_lifting: bool,
}

#[derive(Args)]
struct EvalArgs {
    context: PathBuf,
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    hi: f64,
    #[arg(long, default_value_t = 41)]
    count: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Eum,
    Wta,
}

impl From<KindArg> for ProblemKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Eum => ProblemKind::Eum,
            KindArg::Wta => ProblemKind::Wta,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CutsArg {
    None,
    Single,
    Two,
    Both,
}

impl From<CutsArg> for Setting {
    fn from(c: CutsArg) -> Self {
        match c {
            CutsArg::None => Setting::Oa,
            CutsArg::Single => Setting::Single,
            CutsArg::Two => Setting::Two,
            CutsArg::Both => Setting::Both,
        }
    }
}

#[derive(Args)]
struct GenParams {
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// `lambda` for eum, `rho` for wta.
    #[arg(long)]
    param: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl GenParams {
    fn generate(&self) -> Result<InstanceFile, String> {
        let kind = self.kind.ok_or("pass an instance file or --kind")?;
        let (default_n, default_m, default_param) = match kind {
            KindArg::Eum => (15, 5, 0.6),
            KindArg::Wta => (5, 5, 0.4),
        };
        Ok(bench::generate(
            kind.into(),
            self.n.unwrap_or(default_n),
            self.m.unwrap_or(default_m),
            self.param.unwrap_or(default_param),
            self.seed,
        ))
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON; omit to generate one from the flags below.
    instance: Option<PathBuf>,
    #[command(flatten)]
    gen: GenParams,
    #[arg(long, value_enum, default_value = "both")]
    cuts: CutsArg,
    #[arg(long)]
    exact_lifting: bool,
    /// Seconds; 0 disables the limit.
    #[arg(long, default_value_t = 600.0)]
    time_limit: f64,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    gen: GenParams,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 5)]
    instances: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 600.0)]
    time_limit: f64,
    #[arg(long)]
    node_limit: Option<usize>,
    #[arg(long)]
    exact_lifting: bool,
    /// Report seconds instead of deterministic effort counters.
    #[arg(long)]
    wall_clock: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn limit(seconds: f64) -> Option<f64> {
    (seconds > 0.0).then_some(seconds)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn print_json(value: &impl Serialize) -> Result<(), String> {
    println!("{}", serde_json::to_string_pretty(value).map_err(|e| e.to_string())?);
    Ok(())
}

fn build_cut(args: &CutArgs) -> Result<(liftcut::lifting::InstanceX, Cut), String> {
    let def: ContextDef = read_json(&args.context)?;
    let (inst, ctx) = def.build().map_err(|e| e.to_string())?;
    let cut = args.kind.build(&ctx, args.exact_lifting).map_err(|e| e.to_string())?;
    Ok((inst, cut))
}

#[derive(Serialize)]
struct Verdict {
    cut: Cut,
    valid: bool,
    violation: Option<(Vec<u32>, f64)>,
    face_dimension: Option<i64>,
    facet: bool,
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Cut(args) => {
            let (_, cut) = build_cut(&args)?;
            print_json(&cut)
        }
        Command::Verify(args) => {
            let (inst, cut) = build_cut(&args)?;
            let validity = check_validity(&cut, &inst).map_err(|e| e.to_string())?;
            let violation = match &validity {
                Validity::Ok => None,
                Validity::Violation { x, amount } => Some((x.clone(), *amount)),
            };
            let face_dimension = if validity.is_ok() {
                Some(face_dimension(&cut, &inst).map_err(|e| e.to_string())?)
            } else {
                None
            };
            let facet = face_dimension == Some(inst.n() as i64);
            print_json(&Verdict {
                cut,
                valid: validity.is_ok(),
                violation,
                face_dimension,
                facet,
            })
        }
        Command::Eval(args) => {
            let def: ContextDef = read_json(&args.context)?;
            let (_, ctx) = def.build().map_err(|e| e.to_string())?;
            print_json(&evaluate_grid(&ctx, args.lo, args.hi, args.count))
        }
        Command::Solve(args) => {
            let file = match &args.instance {
                Some(path) => read_json::<InstanceFile>(path)?,
                None => args.gen.generate()?,
            };
            let kind = match file.problem {
                liftcut::milp::problems::Problem::Eum(_) => ProblemKind::Eum,
                liftcut::milp::problems::Problem::Wta(_) => ProblemKind::Wta,
            };
            let setting = Setting::from(args.cuts);
            let config = setting.config(kind, args.exact_lifting, limit(args.time_limit));
            let (x, stats) = solve_problem(&file.problem, &config).map_err(|e| e.to_string())?;
            #[derive(Serialize)]
            struct Report<'a> {
                setting: &'static str,
                x: Option<Vec<u32>>,
                stats: &'a liftcut::milp::SolveStats,
            }
            print_json(&Report {
                setting: setting.name(),
                x,
                stats: &stats,
            })
        }
        Command::Gen(args) => {
            let file = args.gen.generate()?;
            let text = serde_json::to_string_pretty(&file).map_err(|e| e.to_string())?;
            match args.out {
                Some(path) => fs::write(&path, text + "\n").map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    println!("{text}");
                    Ok(())
                }
            }
        }
        Command::Bench(args) => {
            let kind = ProblemKind::from(args.kind);
            let config = ExperimentConfig {
                kind,
                cells: bench::desk_grid(kind),
                instances_per_cell: args.instances,
                base_seed: args.seed,
                settings: vec![Setting::Oa, Setting::Single, Setting::Two, Setting::Both],
                prefer_exact: args.exact_lifting,
                time_limit: limit(args.time_limit),
                node_limit: args.node_limit,
                wall_clock: args.wall_clock,
            };
            let (_, summaries) = bench::run_experiment(&config);
            let csv = bench::to_csv(&summaries);
            eprint!("{}", bench::summary_table(&summaries));
            match args.out {
                Some(path) => fs::write(&path, csv).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{csv}");
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
