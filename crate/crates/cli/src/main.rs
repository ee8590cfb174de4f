//! Command-line front end for the dock re-allocation solvers.
//!
//! Exit codes: 0 on success, 1 for invalid input (malformed files,
//! structural violations, failed checks), 2 when the instance is
//! well-formed but infeasible.

mod files;

use clap::{Parser, Subcommand, ValueEnum};
use drsolve_core::dock::{solve_da_scaling, solve_da_steepest, solve_dr_greedy, solve_dr_poly};
use drsolve_core::gen::{self, CostKind, GenParams};
use drsolve_core::verify::{brute_force_dr, check_theorem_suite, CheckKind, EnumGuard};
use drsolve_core::{Allocation, Instance};
use files::{InstanceFile, SolutionFile};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "drsolve", version, about = "Bike-share dock re-allocation solvers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one instance file and print the solution as JSON.
    Solve {
        /// Instance file (JSON).
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Algo::Greedy)]
        algo: Algo,
        /// Include the per-iteration trace in the output.
        #[arg(long)]
        trace: bool,
        /// Write the solution here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a random valid instance.
    Gen {
        #[arg(long)]
        n: usize,
        /// Largest per-station capacity.
        #[arg(long, default_value_t = 6)]
        umax: i64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = KindArg::Quad)]
        kind: KindArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run structural checks against an instance file or a random corpus.
    Check {
        /// Instance file to check.
        #[arg(long, conflicts_with = "random")]
        input: Option<PathBuf>,
        /// Number of random instances to check instead of a file.
        #[arg(long)]
        random: Option<u64>,
        /// Seed for the random corpus.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// "all" or a comma-separated list of check names.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Time a solver family on a generated instance and append a CSV row.
    Bench {
        #[arg(long, value_enum)]
        family: BenchFamily,
        #[arg(long)]
        n: usize,
        /// Total capacity D + B of the generated instance.
        #[arg(long)]
        capacity: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV file to create or append to.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    /// Allowance-greedy with the incremental neighborhood heaps.
    Greedy,
    /// Allowance-greedy with full neighborhood rescans.
    GreedySlow,
    /// Relax, then repair the allowance via the split binary search.
    Poly,
    /// Unit-step steepest descent on the relaxation (no allowance).
    Da,
    /// Scaled steepest descent on the relaxation (no allowance).
    DaScaling,
    /// Exhaustive enumeration.
    Brute,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Greedy => "greedy",
            Algo::GreedySlow => "greedy-slow",
            Algo::Poly => "poly",
            Algo::Da => "da",
            Algo::DaScaling => "da-scaling",
            Algo::Brute => "brute",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Quad,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchFamily {
    Scaling,
    Greedy,
}

/// Failures carry the exit code they map to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Failure {
        Failure { code: 1, message: message.into() }
    }

    fn infeasible(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Solve { input, algo, trace, output } => cmd_solve(&input, algo, trace, output.as_deref()),
        Cmd::Gen { n, umax, seed, kind, output } => cmd_gen(n, umax, seed, kind, output.as_deref()),
        Cmd::Check { input, random, seed, suite } => cmd_check(input.as_deref(), random, seed, &suite),
        Cmd::Bench { family, n, capacity, seed, csv } => cmd_bench(family, n, capacity, seed, csv.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn enum_guard() -> Result<EnumGuard, Failure> {
    match std::env::var("DRSOLVE_ENUM_GUARD") {
        Ok(s) => {
            let max_points = s
                .parse::<u64>()
                .map_err(|_| Failure::invalid(format!("DRSOLVE_ENUM_GUARD is not a number: {s:?}")))?;
            Ok(EnumGuard { max_points })
        }
        Err(_) => Ok(EnumGuard::default()),
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))?;
    let file: InstanceFile = serde_json::from_str(&text)
        .map_err(|e| Failure::invalid(format!("cannot parse {}: {e}", path.display())))?;
    let inst = file.into_instance();
    let violations = inst.validate();
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("violation: {v}");
        }
        let message = format!("{} violation(s) in {}", violations.len(), path.display());
        return if violations.iter().all(|v| v.is_feasibility()) {
            Err(Failure::infeasible(message))
        } else {
            Err(Failure::invalid(message))
        };
    }
    Ok(inst)
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn cmd_solve(input: &Path, algo: Algo, trace: bool, output: Option<&Path>) -> Result<(), Failure> {
    let inst = load_instance(input)?;
    let start = Allocation::new(inst.dbar.clone(), inst.bbar.clone());
    let xbar = inst.x_bar();
    let solution = match algo {
        Algo::Greedy => SolutionFile::from_dr(&solve_dr_greedy(&inst, true), algo.name(), trace),
        Algo::GreedySlow => SolutionFile::from_dr(&solve_dr_greedy(&inst, false), algo.name(), trace),
        Algo::Poly => SolutionFile::from_dr(&solve_dr_poly(&inst), algo.name(), trace),
        Algo::Da => {
            let sol = solve_da_steepest(&inst, &start, 1)
                .map_err(|e| Failure::infeasible(e.to_string()))?;
            SolutionFile::from_da(&sol, &xbar, algo.name())
        }
        Algo::DaScaling => {
            let (sol, _) = solve_da_scaling(&inst);
            SolutionFile::from_da(&sol, &xbar, algo.name())
        }
        Algo::Brute => {
            let brute = brute_force_dr(&inst, &enum_guard()?)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            let best = brute.optima.first().expect("nonempty optimum set");
            SolutionFile::from_brute(best, brute.objective, &xbar, algo.name())
        }
    };
    let json = serde_json::to_string_pretty(&solution)
        .map_err(|e| Failure::invalid(format!("cannot serialize solution: {e}")))?;
    emit(&format!("{json}\n"), output)
}

fn cmd_gen(n: usize, umax: i64, seed: u64, kind: KindArg, output: Option<&Path>) -> Result<(), Failure> {
    if n == 0 {
        return Err(Failure::invalid("--n must be positive"));
    }
    if umax < 2 {
        return Err(Failure::invalid("--umax must be at least 2"));
    }
    let params = GenParams {
        n,
        u_max: umax,
        gamma_max: 4,
        kind: match kind {
            KindArg::Quad => CostKind::Quad,
            KindArg::Table => CostKind::Table,
        },
    };
    let inst = gen::random_instance(&params, seed);
    let json = serde_json::to_string_pretty(&InstanceFile::from_instance(&inst))
        .map_err(|e| Failure::invalid(format!("cannot serialize instance: {e}")))?;
    emit(&format!("{json}\n"), output)
}

fn parse_suite(s: &str) -> Result<Vec<CheckKind>, Failure> {
    if s == "all" {
        return Ok(CheckKind::ALL.to_vec());
    }
    s.split(',')
        .map(str::trim)
        .map(|name| {
            CheckKind::parse(name).ok_or_else(|| {
                let known: Vec<&str> = CheckKind::ALL.iter().map(|k| k.name()).collect();
                Failure::invalid(format!("unknown check {name:?}; known: all, {}", known.join(", ")))
            })
        })
        .collect()
}

fn cmd_check(input: Option<&Path>, random: Option<u64>, seed: u64, suite: &str) -> Result<(), Failure> {
    let kinds = parse_suite(suite)?;
    let guard = enum_guard()?;
    let instances: Vec<(String, Instance)> = match (input, random) {
        (Some(path), None) => vec![(path.display().to_string(), load_instance(path)?)],
        (None, Some(count)) => (0..count)
            .map(|k| (format!("random:{}", seed + k), gen::random_mixed(seed + k)))
            .collect(),
        (None, None) => return Err(Failure::invalid("pass --input FILE or --random N")),
        (Some(_), Some(_)) => unreachable!("clap rejects --input with --random"),
    };
    let mut checks = 0usize;
    let mut failures: Vec<serde_json::Value> = Vec::new();
    for (label, inst) in &instances {
        let reports = check_theorem_suite(inst, &kinds, &guard)
            .map_err(|e| Failure::invalid(format!("{label}: {e}")))?;
        for r in &reports {
            checks += 1;
            let status = if r.passed { "PASS" } else { "FAIL" };
            println!("{label} {}: {status} {}", r.kind.name(), r.detail);
            if !r.passed {
                failures.push(serde_json::json!({
                    "instance": label,
                    "kind": r.kind.name(),
                    "witness": r.detail,
                }));
            }
        }
    }
    let summary = serde_json::json!({
        "instances": instances.len(),
        "checks": checks,
        "passed": checks - failures.len(),
        "failed": failures.len(),
        "failures": failures,
    });
    println!("{summary}");
    if summary["failed"].as_u64() != Some(0) {
        return Err(Failure::invalid("checks failed"));
    }
    Ok(())
}

fn cmd_bench(
    family: BenchFamily,
    n: usize,
    capacity: i64,
    seed: u64,
    csv: Option<&Path>,
) -> Result<(), Failure> {
    if n == 0 || capacity < n as i64 {
        return Err(Failure::invalid("need --n ≥ 1 and --capacity ≥ n"));
    }
    let row = match family {
        BenchFamily::Scaling => {
            let inst = gen::large_instance(n, capacity, seed);
            let t0 = Instant::now();
            let (sol, schedule) = solve_da_scaling(&inst);
            let wall_ms = t0.elapsed().as_secs_f64() * 1e3;
            let steps_per_phase: Vec<String> = schedule
                .rebike_steps
                .iter()
                .zip(schedule.descent_steps.iter())
                .map(|(r, d)| format!("{r}+{d}"))
                .collect();
            let _ = sol;
            format!(
                "scaling,{n},{capacity},{seed},{},{},{},{wall_ms:.3}",
                schedule.phases(),
                schedule.total_steps(),
                steps_per_phase.join(";"),
            )
        }
        BenchFamily::Greedy => {
            let params = GenParams {
                n,
                u_max: (capacity / n as i64).max(2),
                gamma_max: capacity,
                kind: CostKind::Quad,
            };
            let inst = gen::random_instance(&params, seed);
            let t0 = Instant::now();
            let sol = solve_dr_greedy(&inst, true);
            let wall_ms = t0.elapsed().as_secs_f64() * 1e3;
            format!(
                "greedy,{n},{capacity},{seed},1,{},{},{wall_ms:.3}",
                sol.iterations, sol.iterations,
            )
        }
    };
    const HEADER: &str = "family,n,capacity,seed,phases,total_steps,steps_per_phase,wall_ms";
    match csv {
        Some(path) => {
            let mut text = match std::fs::read_to_string(path) {
                Ok(existing) => existing,
                Err(_) => format!("{HEADER}\n"),
            };
            text.push_str(&row);
            text.push('\n');
            std::fs::write(path, text)
                .map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display())))?;
        }
        None => {
            println!("{HEADER}");
            println!("{row}");
        }
    }
    Ok(())
}
