//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line (run with --nocapture to see them as they finish).
//! The corpus of 500 seeded instances is shared across criteria.

use drsolve_core::dock::{
    make_f_oracle, make_fhat_oracle, solve_da_scaling, solve_da_steepest, solve_dr_greedy,
    solve_dr_poly,
};
use drsolve_core::gen::{self, random_mixed};
use drsolve_core::mconvex::{
    check_m_exc, check_mnat_exc, mu_profile, reverse_steepest_descent_mml1, solve_mml1_via_g,
    steepest_descent, steepest_descent_mml1, ExchangeCheck,
};
use drsolve_core::sra::{solve_sra, sra_incremental, SraState};
use drsolve_core::verify::{
    brute_force_da, brute_force_dr, brute_force_sra, check_theorem_suite, CheckKind, EnumGuard,
};
use drsolve_core::{Allocation, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use std::time::Instant;

const CORPUS_SIZE: u64 = 500;
const GUARD: EnumGuard = EnumGuard { max_points: 100_000_000 };

fn corpus() -> &'static [Instance] {
    static CORPUS: OnceLock<Vec<Instance>> = OnceLock::new();
    CORPUS.get_or_init(|| (0..CORPUS_SIZE).map(random_mixed).collect())
}

fn verdict(num: u8, name: &str, result: Result<String, String>) {
    match result {
        Ok(detail) => println!("acceptance {num:02} {name}: PASS ({detail})"),
        Err(e) => {
            println!("acceptance {num:02} {name}: FAIL ({e})");
            panic!("criterion {num:02} {name}: {e}");
        }
    }
}

#[test]
fn criterion_01_solver_agreement() {
    verdict(1, "solver-agreement", (|| {
        let t0 = Instant::now();
        for (seed, inst) in corpus().iter().enumerate() {
            let fast = solve_dr_greedy(inst, true).objective;
            let slow = solve_dr_greedy(inst, false).objective;
            let poly = solve_dr_poly(inst).objective;
            let brute = brute_force_dr(inst, &GUARD)
                .map_err(|e| format!("seed {seed}: {e}"))?
                .objective;
            if fast != brute || slow != brute || poly != brute {
                return Err(format!(
                    "seed {seed}: heap {fast}, rescan {slow}, poly {poly}, exhaustive {brute}"
                ));
            }
        }
        let secs = t0.elapsed().as_secs_f64();
        if secs >= 300.0 {
            return Err(format!("took {secs:.1}s, budget is 300s"));
        }
        Ok(format!("{} instances, {secs:.1}s", corpus().len()))
    })());
}

#[test]
fn criterion_02_exchange_axioms() {
    verdict(2, "exchange-axioms", (|| {
        for (seed, inst) in corpus().iter().enumerate() {
            match check_m_exc(&make_f_oracle(inst), GUARD.max_points) {
                Ok(ExchangeCheck::Pass) => {}
                Ok(ExchangeCheck::Fail { x, y, i }) => {
                    return Err(format!("seed {seed}: level objective fails at x={x}, y={y}, i={i}"))
                }
                Err(e) => return Err(format!("seed {seed}: {e}")),
            }
            match check_mnat_exc(&make_fhat_oracle(inst), GUARD.max_points) {
                Ok(ExchangeCheck::Pass) => {}
                Ok(ExchangeCheck::Fail { x, y, i }) => {
                    return Err(format!("seed {seed}: free objective fails at x={x}, y={y}, i={i}"))
                }
                Err(e) => return Err(format!("seed {seed}: {e}")),
            }
        }
        Ok(format!("{} instances, both axioms", corpus().len()))
    })());
}

#[test]
fn criterion_03_greedy_trace() {
    verdict(3, "greedy-trace", (|| {
        let mut traced = 0usize;
        for (seed, inst) in corpus().iter().enumerate() {
            if inst.gamma < 1 {
                continue;
            }
            let prof = mu_profile(&make_f_oracle(inst), &inst.x_bar(), GUARD.max_points)
                .map_err(|e| format!("seed {seed}: {e}"))?;
            let sol = solve_dr_greedy(inst, true);
            let trace = sol.trace.as_ref().expect("greedy records a trace");
            let horizon = inst.gamma.min(prof.tau);
            if trace.len() as i64 != horizon + 1 {
                return Err(format!(
                    "seed {seed}: {} trace rows, expected min(γ, τ) + 1 = {}",
                    trace.len(),
                    horizon + 1
                ));
            }
            for (k, row) in trace.iter().enumerate() {
                let k = k as i64;
                if row.objective != prof.mu_at(k) {
                    return Err(format!("seed {seed}: f(x_{k}) = {} ≠ μ_{k} = {}", row.objective, prof.mu_at(k)));
                }
                if row.distance != 2 * k {
                    return Err(format!("seed {seed}: step {k} at distance {} ≠ {}", row.distance, 2 * k));
                }
            }
            for k in 1..trace.len() {
                if trace[k].objective >= trace[k - 1].objective {
                    return Err(format!("seed {seed}: μ not strictly decreasing at step {k}"));
                }
            }
            for k in 1..trace.len().saturating_sub(1) {
                let (a, m, b) = (
                    trace[k - 1].objective as i128,
                    trace[k].objective as i128,
                    trace[k + 1].objective as i128,
                );
                if a + b < 2 * m {
                    return Err(format!("seed {seed}: μ not convex at step {k}: {a} + {b} < 2·{m}"));
                }
            }
            traced += 1;
        }
        Ok(format!("{traced} instances with γ ≥ 1"))
    })());
}

#[test]
fn criterion_04_descent_iterations() {
    verdict(4, "descent-iterations", (|| {
        for (seed, inst) in corpus().iter().enumerate() {
            let f = make_f_oracle(inst);
            let center = inst.x_bar();
            let prof = mu_profile(&f, &center, GUARD.max_points).map_err(|e| format!("seed {seed}: {e}"))?;
            let (_, trace) = steepest_descent(&f, &center).map_err(|e| format!("seed {seed}: {e}"))?;
            if trace.iterations() as i64 != prof.tau {
                return Err(format!(
                    "seed {seed}: descent stopped after {} exchanges, τ = {}",
                    trace.iterations(),
                    prof.tau
                ));
            }
        }
        Ok(format!("{} instances, iterations = τ on each", corpus().len()))
    })());
}

#[test]
fn criterion_05_incremental_reopt() {
    verdict(5, "incremental-reopt", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(999);
        let lower_upper = |inst: &Instance| (inst.box_lower(), inst.box_upper());
        let mut tested = 0usize;
        'outer: for round in 0..4 {
            for (seed, inst) in corpus().iter().enumerate() {
                if tested >= 1000 {
                    break 'outer;
                }
                let (lower, upper) = lower_upper(inst);
                // Random dock totals: wander from the standing totals.
                let mut x = inst.x_bar();
                for _ in 0..rng.gen_range(0..=4) {
                    let i = rng.gen_range(0..inst.n);
                    let j = rng.gen_range(0..inst.n);
                    if i != j {
                        let moved = x.exchanged(i, j, 1);
                        if moved.within_box(&lower, &upper) {
                            x = moved;
                        }
                    }
                }
                // Random admissible single exchange.
                let mut pair = None;
                for _ in 0..20 {
                    let i = rng.gen_range(0..inst.n);
                    let j = rng.gen_range(0..inst.n);
                    if i != j && x.exchanged(i, j, 1).within_box(&lower, &upper) {
                        pair = Some((i, j));
                        break;
                    }
                }
                let Some((i, j)) = pair else { continue };
                let (b0, v0) = solve_sra(inst, &x);
                let base = SraState::init(&inst.costs, x.clone(), b0.clone(), 1);
                if base.cost != v0 {
                    return Err(format!("round {round} seed {seed}: state cost {} ≠ greedy {v0}", base.cost));
                }
                let state = sra_incremental(inst, base, i, j);
                let moved = x.exchanged(i, j, 1);
                let (_, brute) = brute_force_sra(inst, &moved, &GUARD)
                    .map_err(|e| format!("round {round} seed {seed}: {e}"))?;
                if state.cost != brute {
                    return Err(format!(
                        "round {round} seed {seed}: incremental {} ≠ exhaustive {brute} at x = {x}, move ({i}, {j})",
                        state.cost
                    ));
                }
                let diff: Vec<i64> = state.b.iter().zip(b0.iter()).map(|(a, b)| a - b).collect();
                let pos: i64 = diff.iter().filter(|&&d| d > 0).sum();
                let neg: i64 = -diff.iter().filter(|&&d| d < 0).sum::<i64>();
                if pos > 1 || neg > 1 || diff.iter().any(|d| d.abs() > 1) {
                    return Err(format!(
                        "round {round} seed {seed}: b̂ − b = {diff:?} outside the six-move candidate set"
                    ));
                }
                tested += 1;
            }
        }
        if tested < 1000 {
            return Err(format!("only {tested} exchanges sampled, need 1000"));
        }
        Ok(format!("{tested} random (x, i, j) triples"))
    })());
}

#[test]
fn criterion_06_step_proximity() {
    verdict(6, "step-proximity", (|| {
        let instances: Vec<&Instance> = corpus().iter().take(120).collect();
        for (seed, &inst) in instances.iter().enumerate() {
            let brute = brute_force_da(inst, &GUARD).map_err(|e| format!("seed {seed}: {e}"))?;
            let start = Allocation::new(inst.dbar.clone(), inst.bbar.clone());
            for lambda in [2i64, 4] {
                let sol = solve_da_steepest(inst, &start, lambda)
                    .map_err(|e| format!("seed {seed}, λ = {lambda}: {e}"))?;
                let x = sol.allocation.x();
                let nearest = brute.optima.iter().map(|o| o.x().l1_dist(&x)).min().unwrap();
                if nearest > 8 * lambda * inst.n as i64 {
                    return Err(format!(
                        "seed {seed}, λ = {lambda}: nearest exact optimum at {nearest} > {}",
                        8 * lambda * inst.n as i64
                    ));
                }
                if lambda == 2 && nearest > 16 * inst.n as i64 {
                    return Err(format!(
                        "seed {seed}: λ = 2 endpoint at {nearest} > 16n = {}",
                        16 * inst.n as i64
                    ));
                }
            }
        }
        Ok(format!("{} instances, λ ∈ {{2, 4}}", instances.len()))
    })());
}

#[test]
fn criterion_07_scaling_phases() {
    verdict(7, "scaling-phases", (|| {
        let t0 = Instant::now();
        for (seed, inst) in corpus().iter().enumerate() {
            let (sol, _) = solve_da_scaling(inst);
            let brute = brute_force_da(inst, &GUARD).map_err(|e| format!("seed {seed}: {e}"))?;
            if sol.objective != brute.objective {
                return Err(format!(
                    "seed {seed}: scaled descent {} ≠ exhaustive {}",
                    sol.objective, brute.objective
                ));
            }
        }

        let n = 50usize;
        let csv_path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../target/acceptance-scaling.csv");
        let mut csv = String::from("family,n,capacity,seed,phases,total_steps,steps_per_phase,wall_ms\n");
        for total in [10_000i64, 100_000, 1_000_000] {
            let inst = gen::large_instance(n, total, 7);
            let run0 = Instant::now();
            let (_, schedule) = solve_da_scaling(&inst);
            let wall_ms = run0.elapsed().as_secs_f64() * 1e3;
            let lambda1 = (total / (4 * n as i64)).max(1);
            let ceil_log2 = if lambda1 <= 1 {
                0
            } else {
                64 - ((lambda1 - 1) as u64).leading_zeros() as i64
            };
            let phase_bound = ceil_log2 + 1;
            if (schedule.phases() as i64) > phase_bound {
                return Err(format!(
                    "capacity {total}: {} phases > bound {phase_bound}",
                    schedule.phases()
                ));
            }
            let per_phase: Vec<String> = schedule
                .rebike_steps
                .iter()
                .zip(schedule.descent_steps.iter())
                .map(|(r, d)| format!("{r}+{d}"))
                .collect();
            for (k, (r, d)) in schedule.rebike_steps.iter().zip(schedule.descent_steps.iter()).enumerate().skip(1) {
                if r + d > 8 * n + n {
                    return Err(format!(
                        "capacity {total}: phase {k} took {} steps > 8n + n = {}",
                        r + d,
                        8 * n + n
                    ));
                }
            }
            csv.push_str(&format!(
                "scaling,{n},{total},7,{},{},{},{wall_ms:.3}\n",
                schedule.phases(),
                schedule.total_steps(),
                per_phase.join(";"),
            ));
        }
        std::fs::write(csv_path, &csv).map_err(|e| format!("cannot write {csv_path}: {e}"))?;
        let secs = t0.elapsed().as_secs_f64();
        if secs >= 120.0 {
            return Err(format!("took {secs:.1}s, budget is 120s"));
        }
        Ok(format!(
            "corpus exact + capacities 10⁴..10⁶ within phase/step bounds, CSV at target/acceptance-scaling.csv, {secs:.1}s"
        ))
    })());
}

#[test]
fn criterion_08_alpha_search() {
    verdict(8, "alpha-search", (|| {
        let mut split_count = 0usize;
        for (seed, inst) in corpus().iter().enumerate() {
            let prof = mu_profile(&make_f_oracle(inst), &inst.x_bar(), GUARD.max_points)
                .map_err(|e| format!("seed {seed}: {e}"))?;
            if prof.tau <= inst.gamma {
                continue; // relaxation already lands inside the allowance
            }
            split_count += 1;
            let reports = check_theorem_suite(inst, &[CheckKind::PsiConvex], &GUARD)
                .map_err(|e| format!("seed {seed}: {e}"))?;
            if !reports[0].passed {
                return Err(format!("seed {seed}: {}", reports[0].detail));
            }
            // The α binary search inside the polynomial solver must land
            // on the grid minimum, which equals the exhaustive optimum.
            let poly = solve_dr_poly(inst).objective;
            let brute = brute_force_dr(inst, &GUARD).map_err(|e| format!("seed {seed}: {e}"))?.objective;
            if poly != brute {
                return Err(format!("seed {seed}: binary-search result {poly} ≠ grid/exhaustive {brute}"));
            }
        }
        if split_count == 0 {
            return Err("corpus routed no instance through the α search".into());
        }
        Ok(format!("{split_count} instances took the split path"))
    })());
}

#[test]
fn criterion_09_descent_equivalences() {
    verdict(9, "descent-equivalences", (|| {
        for (seed, inst) in corpus().iter().enumerate() {
            let f = make_f_oracle(inst);
            let center = inst.x_bar();
            let (xf, _) = steepest_descent_mml1(&f, &center, inst.gamma, GUARD.max_points)
                .map_err(|e| format!("seed {seed}: {e}"))?;
            let xr = reverse_steepest_descent_mml1(&f, &center, inst.gamma, GUARD.max_points)
                .map_err(|e| format!("seed {seed}: {e}"))?;
            let xg = solve_mml1_via_g(&f, &center, inst.gamma, GUARD.max_points)
                .map_err(|e| format!("seed {seed}: {e}"))?;
            let (of, or, og) = (f.eval(&xf), f.eval(&xr), f.eval(&xg));
            if of != or || or != og {
                return Err(format!(
                    "seed {seed}: forward {of:?}, reverse {or:?}, split-reduce {og:?}"
                ));
            }
        }
        Ok(format!("{} instances, three descents agree", corpus().len()))
    })());
}

#[test]
fn criterion_10_cli_contract() {
    verdict(10, "cli-contract", (|| {
        use std::process::Command;
        let bin = env!("CARGO_BIN_EXE_drsolve");
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let run = |args: &[&str]| -> Result<std::process::Output, String> {
            Command::new(bin).args(args).output().map_err(|e| e.to_string())
        };

        // Byte-deterministic generation.
        let a = dir.path().join("a.json");
        let b = dir.path().join("b.json");
        run(&["gen", "--n", "3", "--seed", "77", "--output", a.to_str().unwrap()])?;
        run(&["gen", "--n", "3", "--seed", "77", "--output", b.to_str().unwrap()])?;
        let bytes = std::fs::read(&a).map_err(|e| e.to_string())?;
        if bytes != std::fs::read(&b).map_err(|e| e.to_string())? {
            return Err("gen is not byte-deterministic across runs".into());
        }

        // JSON round-trip: parse, re-serialize, re-parse identical; the
        // solver accepts the file and emits a well-formed solution.
        let value: serde_json::Value = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
        let rewritten = serde_json::to_vec(&value).map_err(|e| e.to_string())?;
        let reparsed: serde_json::Value = serde_json::from_slice(&rewritten).map_err(|e| e.to_string())?;
        if value != reparsed {
            return Err("instance JSON does not round-trip".into());
        }
        let solved = run(&["solve", "--input", a.to_str().unwrap(), "--algo", "poly"])?;
        if !solved.status.success() {
            return Err("solve rejected a generated instance".into());
        }
        let sol: serde_json::Value = serde_json::from_slice(&solved.stdout).map_err(|e| e.to_string())?;
        for key in ["d", "b", "objective", "iterations", "distance", "algorithm"] {
            if sol.get(key).is_none() {
                return Err(format!("solution lacks key {key}"));
            }
        }

        // Exit codes: 0 valid, 1 structural, 2 infeasible, 1 unparseable.
        let expect_code = |path: &std::path::Path, want: i32| -> Result<(), String> {
            let out = Command::new(bin)
                .args(["solve", "--input", path.to_str().unwrap()])
                .output()
                .map_err(|e| e.to_string())?;
            let got = out.status.code().unwrap_or(-1);
            if got != want {
                return Err(format!("{} exited {got}, want {want}", path.display()));
            }
            Ok(())
        };
        expect_code(&a, 0)?;

        let structural = dir.path().join("structural.json");
        std::fs::write(
            &structural,
            serde_json::json!({
                "n": 2, "D": 2, "B": 2, "gamma": -1,
                "ell": [0, 0], "u": [4, 4], "dbar": [1, 1], "bbar": [1, 1],
                "costs": [
                    {"kind": "quad_uvw", "u": [1, 0], "v": [1, 0], "w": [0, 0]},
                    {"kind": "quad_uvw", "u": [1, 0], "v": [1, 0], "w": [0, 0]}
                ]
            })
            .to_string(),
        )
        .map_err(|e| e.to_string())?;
        expect_code(&structural, 1)?;

        let infeasible = dir.path().join("infeasible.json");
        std::fs::write(
            &infeasible,
            serde_json::json!({
                "n": 2, "D": 3, "B": 1, "gamma": 1,
                "ell": [0, 0], "u": [4, 4], "dbar": [1, 0], "bbar": [1, 2],
                "costs": [
                    {"kind": "quad_uvw", "u": [1, 0], "v": [1, 0], "w": [0, 0]},
                    {"kind": "quad_uvw", "u": [1, 0], "v": [1, 0], "w": [0, 0]}
                ]
            })
            .to_string(),
        )
        .map_err(|e| e.to_string())?;
        expect_code(&infeasible, 2)?;

        let garbled = dir.path().join("garbled.json");
        std::fs::write(&garbled, "]{[").map_err(|e| e.to_string())?;
        expect_code(&garbled, 1)?;

        Ok("gen determinism, JSON round-trip, exit codes 0/1/2".into())
    })());
}
