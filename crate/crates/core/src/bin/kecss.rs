use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use kecss::gadgets::tap_to_kecsm;
use kecss::ghost_rounding::{RoundingOptions, RunTrace};
use kecss::harness::generators::{
    cycle, provenance, random_multigraph, random_tap, wheel, Prng, RandomMultigraph,
};
use kecss::harness::io::{
    emit_instance_with_comment, emit_tap_with_comment, parse_instance, parse_tap,
};
use kecss::problems::{
    instance_lp_value, solve, verify_solution, Claims, Instance, Mode, ProblemError, SolveReport,
    VerifyDepth,
};
use kecss::rational::format_rational;

const EXIT_OTHER: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "kecss",
    version,
    about = "Exact k-edge-connectivity solvers by ghost-value iterative relaxation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print the solution report as JSON.
    Solve(SolveArgs),
    /// Print the exact LP optimum.
    Lp(LpArgs),
    /// Build the k-ECSM instance of a TAP instance (odd k).
    Gadget(GadgetArgs),
    /// Generate an instance file.
    Gen(GenArgs),
    /// Verify a solution file against an instance file.
    Check(CheckArgs),
    /// Solve a batch of generated instances and print CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Ecss,
    Ecsm,
    Subset,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Ecss => Mode::Ecss,
            ModeArg::Ecsm => Mode::Ecsm,
            ModeArg::Subset => Mode::Subset,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DepthArg {
    Fast,
    Exhaustive,
}

impl From<DepthArg> for VerifyDepth {
    fn from(d: DepthArg) -> Self {
        match d {
            DepthArg::Fast => VerifyDepth::Fast,
            DepthArg::Exhaustive => VerifyDepth::Exhaustive,
        }
    }
}

/// Mode and k default to the instance header.
#[derive(Args)]
struct Target {
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    k: Option<i64>,
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    target: Target,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write the run trace as JSON.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Re-read the instance and the written solution and verify them;
    /// the report goes to stderr.
    #[arg(long, value_enum)]
    verify: Option<DepthArg>,
}

#[derive(Args)]
struct LpArgs {
    #[command(flatten)]
    target: Target,
}

#[derive(Args)]
struct GadgetArgs {
    #[arg(long, value_name = "FILE")]
    tap: PathBuf,
    #[arg(long)]
    k: i64,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Cycle,
    RandomMultigraph,
    Wheel,
    TapRandom,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    family: Family,
    #[arg(long)]
    n: usize,
    /// Edge probability (random-multigraph).
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    k: i64,
    #[arg(long, value_enum, default_value = "ecsm")]
    mode: ModeArg,
    /// Random links before coverage is completed (tap-random); defaults to n.
    #[arg(long)]
    links: Option<usize>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    target: Target,
    /// Solution report JSON, or a bare JSON array of multiplicities.
    #[arg(long, value_name = "FILE")]
    solution: PathBuf,
    #[arg(long, value_enum, default_value = "exhaustive")]
    verify: DepthArg,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "ecsm")]
    mode: ModeArg,
    #[arg(long)]
    k: i64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    #[arg(long, default_value_t = 10)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<ProblemError> for Failure {
    fn from(e: ProblemError) -> Self {
        let code = if e.is_invariant_violation() {
            EXIT_INVARIANT
        } else if e.is_infeasible() {
            EXIT_INFEASIBLE
        } else if matches!(
            e,
            ProblemError::InvalidK(_)
                | ProblemError::CostLength { .. }
                | ProblemError::NegativeCost(_)
        ) {
            EXIT_PARSE
        } else {
            EXIT_OTHER
        };
        Failure::new(code, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_OTHER, format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::new(EXIT_OTHER, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            std::io::stdout()
                .flush()
                .map_err(|e| Failure::new(EXIT_OTHER, e.to_string()))
        }
    }
}

fn load(target: &Target) -> Result<Instance, Failure> {
    let text = read(&target.input)?;
    let mut instance = parse_instance(&text)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", target.input.display())))?;
    if let Some(m) = target.mode {
        instance.mode = m.into();
    }
    if let Some(k) = target.k {
        instance.k = k;
    }
    if instance.mode == Mode::Subset && instance.terminals.is_empty() {
        instance.terminals = instance.graph.vertices().collect();
    }
    Ok(instance)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct TraceFile<'a> {
    elapsed_ms: u64,
    trace: &'a RunTrace,
}

fn run_solve(args: &SolveArgs) -> Result<(), Failure> {
    let instance = load(&args.target)?;
    let start = Instant::now();
    let outcome = solve(&instance, &RoundingOptions::default())?;
    let elapsed_ms = start.elapsed().as_millis() as u64;
    let text = json(&outcome.report);
    write_or_print(args.out.as_deref(), &text)?;
    if let Some(path) = &args.trace {
        let trace = TraceFile {
            elapsed_ms,
            trace: &outcome.trace,
        };
        write_or_print(Some(path), &json(&trace))?;
    }
    if let Some(depth) = args.verify {
        // Trust nothing held in memory: re-read both files.
        let instance = load(&args.target)?;
        let written = match &args.out {
            Some(p) => read(p)?,
            None => text,
        };
        let report: SolveReport = serde_json::from_str(&written)
            .map_err(|e| Failure::new(EXIT_OTHER, format!("re-reading solution: {e}")))?;
        let claims = Claims {
            cost: Some(&report.cost),
            y0: report.y0.as_deref(),
            cost_bound: Some(&report.guarantee),
        };
        let verdict = verify_solution(&instance, &report.z, &claims, depth.into())?;
        eprint!("{}", json(&verdict));
        if !verdict.passed {
            return Err(Failure::new(
                EXIT_INVARIANT,
                "verification of the solver output failed",
            ));
        }
    }
    Ok(())
}

fn run_lp(args: &LpArgs) -> Result<(), Failure> {
    let instance = load(&args.target)?;
    let value = instance_lp_value(&instance, instance.k)?;
    println!("{}", format_rational(&value));
    Ok(())
}

fn run_gadget(args: &GadgetArgs) -> Result<(), Failure> {
    let text = read(&args.tap)?;
    let tap = parse_tap(&text)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", args.tap.display())))?;
    let gadget = tap_to_kecsm(&tap, args.k).map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
    let comment = format!(
        "k-ECSM instance of a TAP instance: {} tree vertices, {} tree edges, {} links",
        tap.vertex_count(),
        tap.tree().len(),
        tap.links().len()
    );
    write_or_print(
        args.out.as_deref(),
        &emit_instance_with_comment(&gadget.to_instance(), Some(&comment)),
    )
}

fn generated(args: &GenArgs) -> Result<String, Failure> {
    let family = match args.family {
        Family::Cycle => "cycle",
        Family::RandomMultigraph => "random-multigraph",
        Family::Wheel => "wheel",
        Family::TapRandom => "tap-random",
    };
    let mode: Mode = args.mode.into();
    let bad = |m: &str| Failure::new(EXIT_PARSE, m);
    Ok(match args.family {
        Family::Cycle | Family::Wheel => {
            let min = if matches!(args.family, Family::Cycle) {
                3
            } else {
                4
            };
            if args.n < min {
                return Err(bad(&format!("{family} needs n >= {min}")));
            }
            let (g, cost) = if matches!(args.family, Family::Cycle) {
                cycle(args.n)
            } else {
                wheel(args.n)
            };
            let instance = with_mode(Instance::new(mode, args.k, g, cost));
            let command = format!(
                "kecss gen {family} --n {} --k {} --mode {mode}",
                args.n, args.k
            );
            emit_instance_with_comment(&instance, Some(&provenance(&command, None)))
        }
        Family::RandomMultigraph => {
            if args.n == 0 || !(0.0..=1.0).contains(&args.p) {
                return Err(bad("need n >= 1 and 0 <= p <= 1"));
            }
            let mut rng = Prng::new(args.seed);
            let (g, cost) = random_multigraph(&RandomMultigraph::new(args.n, args.p), &mut rng);
            let instance = with_mode(Instance::new(mode, args.k, g, cost));
            let command = format!(
                "kecss gen {family} --n {} --p {} --seed {} --k {} --mode {mode}",
                args.n, args.p, args.seed, args.k
            );
            emit_instance_with_comment(&instance, Some(&provenance(&command, Some(args.seed))))
        }
        Family::TapRandom => {
            if args.n < 2 {
                return Err(bad("tap-random needs n >= 2"));
            }
            let links = args.links.unwrap_or(args.n);
            let tap = random_tap(args.n, links, &mut Prng::new(args.seed));
            let command = format!(
                "kecss gen {family} --n {} --links {links} --seed {}",
                args.n, args.seed
            );
            emit_tap_with_comment(&tap, Some(&provenance(&command, Some(args.seed))))
        }
    })
}

/// Subset instances from the generators take every vertex as a terminal.
fn with_mode(instance: Instance) -> Instance {
    if instance.mode == Mode::Subset {
        let all = instance.graph.vertices().collect();
        instance.with_terminals(all)
    } else {
        instance
    }
}

fn run_gen(args: &GenArgs) -> Result<(), Failure> {
    write_or_print(args.out.as_deref(), &generated(args)?)
}

fn run_check(args: &CheckArgs) -> Result<(), Failure> {
    let instance = load(&args.target)?;
    let text = read(&args.solution)?;
    let bad = |e: serde_json::Error| {
        Failure::new(EXIT_PARSE, format!("{}: {e}", args.solution.display()))
    };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
    let verdict = if value.is_array() {
        let z: Vec<u64> = serde_json::from_value(value).map_err(bad)?;
        verify_solution(&instance, &z, &Claims::default(), args.verify.into())?
    } else {
        let report: SolveReport = serde_json::from_value(value).map_err(bad)?;
        let claims = Claims {
            cost: Some(&report.cost),
            y0: report.y0.as_deref(),
            cost_bound: Some(&report.guarantee),
        };
        verify_solution(&instance, &report.z, &claims, args.verify.into())?
    };
    print!("{}", json(&verdict));
    if verdict.passed {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_INFEASIBLE,
            "solution failed verification",
        ))
    }
}

fn bench_row(args: &BenchArgs, seed: u64) -> String {
    let mut rng = Prng::new(seed);
    let (g, cost) = random_multigraph(&RandomMultigraph::new(args.n, args.p), &mut rng);
    let m = g.edge_slots();
    let instance = with_mode(Instance::new(args.mode.into(), args.k, g, cost));
    let start = Instant::now();
    let result = solve(&instance, &RoundingOptions::default());
    let ms = start.elapsed().as_millis();
    match result {
        Ok(out) => {
            let r = out.report;
            let opt =
                |v: &Option<kecss::Rational>| v.as_ref().map(format_rational).unwrap_or_default();
            format!(
                "{seed},{},{m},{},ok,{},{},{},{},{},{ms}",
                args.n,
                args.k,
                format_rational(&r.cost),
                opt(&r.lp_k),
                format_rational(&r.lp_k_plus_10),
                opt(&r.ratio),
                r.iterations
            )
        }
        Err(e) => {
            let status = if e.is_infeasible() {
                "infeasible"
            } else {
                "error"
            };
            format!("{seed},{},{m},{},{status},,,,,,{ms}", args.n, args.k)
        }
    }
}

fn run_bench(args: &BenchArgs) -> Result<(), Failure> {
    if args.n == 0 || !(0.0..=1.0).contains(&args.p) {
        return Err(Failure::new(EXIT_PARSE, "need n >= 1 and 0 <= p <= 1"));
    }
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    let seeds: Vec<u64> = (0..args.count).map(|i| args.seed + i).collect();
    let mut rows = vec![String::new(); seeds.len()];
    std::thread::scope(|scope| {
        for (chunk_seeds, chunk_rows) in seeds
            .chunks(seeds.len().div_ceil(jobs).max(1))
            .zip(rows.chunks_mut(seeds.len().div_ceil(jobs).max(1)))
        {
            scope.spawn(move || {
                for (s, row) in chunk_seeds.iter().zip(chunk_rows) {
                    *row = bench_row(args, *s);
                }
            });
        }
    });
    println!("seed,n,m,k,status,cost,lp_k,lp_k_plus_10,ratio,iterations,elapsed_ms");
    for row in rows {
        println!("{row}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Lp(a) => run_lp(a),
        Command::Gadget(a) => run_gadget(a),
        Command::Gen(a) => run_gen(a),
        Command::Check(a) => run_check(a),
        Command::Bench(a) => run_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("kecss: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
