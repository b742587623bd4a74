use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qswitch::bench::{self, MethodSpec, DEFAULT_CHECKPOINTS};
use qswitch::heuristic::{run_p1, HeuristicStatus};
use qswitch::instances::{self, GenSpec};
use qswitch::policy_space::brute_force_optimum;
use qswitch::solver::{self, SolverConfig, Status, Strategy};
use qswitch::{evaluate, Instance, Method, Policy};

#[derive(Parser, Debug)]
#[command(name = "qswitch", version, about = "Optimal front-room/back-room worker switching policies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// Instance file, one `S N lambda mu Bl` per line.
    #[arg(long)]
    instance_file: PathBuf,
    /// Zero-based index of the instance in the file.
    #[arg(long)]
    index: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one policy exactly.
    Eval {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Switching points `k0,k1,...,kN`.
        #[arg(long)]
        policy: String,
        /// `closed` (closed form) or `direct` (balance recursion).
        #[arg(long, default_value = "closed", value_parser = parse_method)]
        method: Method,
    },
    /// Run the greedy heuristic.
    Heuristic {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Print every policy the heuristic visits.
        #[arg(long)]
        trace: bool,
    },
    /// Solve exactly with shaving and branch-and-bound.
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        /// none, bl-shave, wq-shave, alt-shave or alt-search-shave.
        #[arg(long, default_value = "alt-search-shave")]
        strategy: Strategy,
        /// Record dominance cuts at improving leaves.
        #[arg(long)]
        dominance: bool,
        /// Seed the incumbent with the greedy heuristic.
        #[arg(long)]
        hybrid: bool,
        /// Wall-clock budget in seconds.
        #[arg(long, default_value_t = 600.0)]
        time_limit: f64,
    },
    /// Enumerate every policy.
    Brute {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Generate a benchmark instance file.
    Generate {
        /// Capacity values, comma separated.
        #[arg(long = "s", value_delimiter = ',', required = true)]
        s_values: Vec<usize>,
        /// Instances per capacity value.
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        /// Output instance file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run methods over an instance file and write CSV results.
    Bench {
        /// Instance file, one `S N lambda mu Bl` per line.
        #[arg(long)]
        instance_file: PathBuf,
        /// Comma-separated methods, e.g. `p1,alt-search-shave+dom,hybrid`.
        #[arg(long)]
        methods: String,
        /// Per-run wall-clock budget in seconds.
        #[arg(long)]
        time_limit: f64,
        /// Result CSV; incumbent traces go to a sibling file.
        #[arg(long)]
        out_csv: PathBuf,
        /// Worker threads; 0 uses every CPU.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Seconds at which to report MRE, comma separated.
        #[arg(long, value_delimiter = ',')]
        checkpoints: Option<Vec<f64>>,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

/// Exit code 2: the instance has no feasible policy.
const EXIT_INFEASIBLE: u8 = 2;

type CliResult = Result<ExitCode, String>;

fn load_instance(args: &InstanceArgs) -> Result<Instance, String> {
    let all = load_instances(&args.instance_file)?;
    all.get(args.index).copied().ok_or_else(|| {
        format!("{}: index {} out of range ({} instances)", args.instance_file.display(), args.index, all.len())
    })
}

fn load_instances(path: &Path) -> Result<Vec<Instance>, String> {
    instances::read_instances(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Eval { instance, policy, method } => cmd_eval(&instance, &policy, method),
        Command::Heuristic { instance, trace } => cmd_heuristic(&instance, trace),
        Command::Solve { instance, strategy, dominance, hybrid, time_limit } => {
            let cfg = SolverConfig { strategy, dominance, hybrid, time_limit, ..SolverConfig::default() };
            cmd_solve(&instance, &cfg)
        }
        Command::Brute { instance } => cmd_brute(&instance),
        Command::Generate { s_values, count, seed, out } => cmd_generate(s_values, count, seed, &out),
        Command::Bench { instance_file, methods, time_limit, out_csv, workers, checkpoints } => {
            let checkpoints = checkpoints.unwrap_or_else(|| DEFAULT_CHECKPOINTS.to_vec());
            cmd_bench(&instance_file, &methods, time_limit, &out_csv, workers, &checkpoints)
        }
    }
}

fn cmd_eval(args: &InstanceArgs, policy: &str, method: Method) -> CliResult {
    let inst = load_instance(args)?;
    let pol = Policy::parse(&inst, policy).map_err(|e| e.to_string())?;
    let m = evaluate(&inst, &pol, method);
    println!("instance: {inst}");
    println!("policy: {pol}");
    println!("F: {:.10}", m.front);
    println!("B: {:.10}", m.back);
    println!("L: {:.10}", m.customers);
    println!("Wq: {:.10}", m.wait);
    println!("feasible: {}", m.is_feasible(&inst));
    Ok(ExitCode::SUCCESS)
}

fn cmd_heuristic(args: &InstanceArgs, trace: bool) -> CliResult {
    let inst = load_instance(args)?;
    let res = run_p1(&inst);
    if trace {
        for (step, t) in res.trace.iter().enumerate() {
            println!("{step:>4} {:<12} {}  B={:.7}  Wq={:.7}", t.action.to_string(), t.policy, t.back, t.wait);
        }
    }
    if res.status == HeuristicStatus::Infeasible {
        println!("status: infeasible");
        return Ok(ExitCode::from(EXIT_INFEASIBLE));
    }
    println!("status: solved");
    println!("policy: {}", res.policy);
    println!("Wq: {:.10}", res.wait);
    println!("evaluations: {}", res.evaluations);
    if res.cycle_detected {
        println!("note: stopped on a repeated state");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(args: &InstanceArgs, cfg: &SolverConfig) -> CliResult {
    let inst = load_instance(args)?;
    let res = solver::solve(&inst, cfg).map_err(|e| e.to_string())?;
    println!("status: {}", res.status);
    if let (Some(pol), Some(wait)) = (&res.incumbent, res.wait) {
        println!("policy: {pol}");
        println!("Wq: {wait:.10}");
    }
    println!("proof: {}", res.proof);
    println!("nodes: {}", res.stats.nodes);
    println!("shave_probes: {}", res.stats.shave_probes);
    println!("evaluations: {}", res.stats.evaluations);
    println!("elapsed_s: {:.6}", res.elapsed);
    Ok(if res.status == Status::Infeasible { ExitCode::from(EXIT_INFEASIBLE) } else { ExitCode::SUCCESS })
}

fn cmd_brute(args: &InstanceArgs) -> CliResult {
    let inst = load_instance(args)?;
    match brute_force_optimum(&inst).map_err(|e| e.to_string())? {
        Some(best) => {
            println!("policy: {}", best.policy);
            println!("Wq: {:.10}", best.wait);
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("status: infeasible");
            Ok(ExitCode::from(EXIT_INFEASIBLE))
        }
    }
}

fn cmd_generate(s_values: Vec<usize>, count: usize, seed: u64, out: &Path) -> CliResult {
    let header = format!(
        "S N lambda mu Bl\nseed {seed}, {count} per S, S in {}",
        s_values.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
    );
    let spec = GenSpec::new(s_values, count, seed);
    let generated = instances::generate(&spec).map_err(|e| e.to_string())?;
    for shortfall in &generated.shortfalls {
        eprintln!("warning: {shortfall}");
    }
    instances::write_instances(&generated.instances, Some(&header), out).map_err(|e| e.to_string())?;
    println!("wrote {} instances to {}", generated.instances.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(
    instance_file: &Path,
    methods: &str,
    time_limit: f64,
    out_csv: &Path,
    workers: usize,
    checkpoints: &[f64],
) -> CliResult {
    let suite = load_instances(instance_file)?;
    let methods: Vec<MethodSpec> = bench::parse_methods(methods)?;
    let outcome = bench::run_suite(&suite, &methods, time_limit, workers).map_err(|e| e.to_string())?;
    bench::write_records(&outcome.records, out_csv).map_err(|e| format!("{}: {e}", out_csv.display()))?;

    println!("{} records written to {}", outcome.records.len(), out_csv.display());
    print!("{:<28}", "method");
    for t in checkpoints {
        print!(" {:>10}", format!("t={t}s"));
    }
    println!(" {:>10} {:>7}", "final", "proved");
    for m in &methods {
        let name = m.to_string();
        print!("{name:<28}");
        for &t in checkpoints {
            print!(" {:>10.6}", bench::mre_at(outcome.records_for(&name), &outcome.table, &outcome.fallback, t));
        }
        let proved = outcome.records_for(&name).filter(|r| r.proof).count();
        println!(
            " {:>10.6} {:>7}",
            bench::mre(outcome.records_for(&name), &outcome.table, &outcome.fallback),
            proved
        );
    }
    Ok(ExitCode::SUCCESS)
}
