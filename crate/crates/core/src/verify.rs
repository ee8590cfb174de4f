//! Independent ground truth: brute-force enumeration oracles for the
//! re-allocation problems and a suite of structural checks that pin the
//! solvers to theory on small instances.
//!
//! The oracles enumerate raw (d, b) assignments directly — they never
//! consult the solver modules — so agreement between a solver and its
//! oracle is meaningful evidence.

use crate::cost::{Cost, ExtendedCost, Finite};
use crate::dock::{
    self, make_f_oracle, make_fhat_oracle, solve_dr_greedy, DrSolution, SplitSide,
};
use crate::instance::{Allocation, Instance};
use crate::mconvex::{
    check_m_exc, check_mnat_exc, mu_profile, reverse_steepest_descent_mml1, solve_mml1_via_g,
    steepest_descent_mml1, ExchangeCheck, McError, MuProfile,
};
use crate::sra::{solve_sra, sra_incremental, SraState};
use crate::vector::IntVec;
use thiserror::Error;

/// Budget for exhaustive enumeration, counted in visited partial
/// assignments.  Exceeding it aborts cleanly instead of hanging.
#[derive(Clone, Copy, Debug)]
pub struct EnumGuard {
    pub max_points: u64,
}

impl Default for EnumGuard {
    fn default() -> Self {
        EnumGuard { max_points: 1_000_000 }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("enumeration budget exceeded: visited {visited} points, guard is {guard}")]
    GuardExceeded { visited: u64, guard: u64 },
    #[error("no feasible allocation exists")]
    Infeasible,
}

fn mc_to_verify(e: McError) -> VerifyError {
    match e {
        McError::EnumLimitExceeded { volume, guard } => VerifyError::GuardExceeded {
            visited: volume.min(u64::MAX as u128) as u64,
            guard,
        },
        // Valid instances never hit these; surface them as exhaustion
        // of the (empty) search rather than panicking.
        _ => VerifyError::Infeasible,
    }
}

/// Exhaustive optimum with every optimal allocation retained.
#[derive(Clone, Debug)]
pub struct BruteForce {
    pub objective: Cost,
    pub optima: Vec<Allocation>,
}

struct Enumerator<'a> {
    inst: &'a Instance,
    lower: IntVec,
    upper: IntVec,
    level: i64,
    // Σ over the remaining stations of the bounds, for pruning.
    tail_min: Vec<i64>,
    tail_max: Vec<i64>,
    ball: Option<(IntVec, i64)>,
    visited: u64,
    guard: u64,
}

impl<'a> Enumerator<'a> {
    fn new(inst: &'a Instance, ball: Option<(IntVec, i64)>) -> Self {
        let lower = inst.box_lower();
        let upper = inst.box_upper();
        let n = inst.n;
        let mut tail_min = vec![0i64; n + 1];
        let mut tail_max = vec![0i64; n + 1];
        for i in (0..n).rev() {
            tail_min[i] = tail_min[i + 1] + lower[i];
            tail_max[i] = tail_max[i + 1] + upper[i];
        }
        Enumerator {
            inst,
            lower,
            upper,
            level: inst.total(),
            tail_min,
            tail_max,
            ball,
            visited: 0,
            guard: 0,
        }
    }

    fn run(
        &mut self,
        guard: &EnumGuard,
        visit: &mut dyn FnMut(&[i64], &[i64], Cost),
    ) -> Result<(), VerifyError> {
        self.guard = guard.max_points;
        self.visited = 0;
        let n = self.inst.n;
        let mut x = vec![0i64; n];
        let mut b = vec![0i64; n];
        self.recurse(0, self.level, self.inst.b_total, 0, 0, &mut x, &mut b, visit)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &mut self,
        depth: usize,
        remaining: i64,
        bikes_left: i64,
        deviation: i64,
        cost: Cost,
        x: &mut Vec<i64>,
        b: &mut Vec<i64>,
        visit: &mut dyn FnMut(&[i64], &[i64], Cost),
    ) -> Result<(), VerifyError> {
        let n = self.inst.n;
        if depth == n {
            if remaining == 0 {
                visit(x, b, cost);
            }
            return Ok(());
        }
        let lo = self.lower[depth].max(remaining - self.tail_max[depth + 1]);
        let hi = self.upper[depth].min(remaining - self.tail_min[depth + 1]);
        for xv in lo..=hi {
            let dev = match &self.ball {
                Some((center, allowance)) => {
                    let d = deviation + (xv - center[depth]).abs();
                    if d > *allowance {
                        continue;
                    }
                    d
                }
                None => 0,
            };
            for bv in 0..=xv.min(bikes_left) {
                self.visited += 1;
                if self.visited > self.guard {
                    return Err(VerifyError::GuardExceeded {
                        visited: self.visited,
                        guard: self.guard,
                    });
                }
                let Finite(c) = self.inst.station_cost(depth, xv - bv, bv) else {
                    continue;
                };
                x[depth] = xv;
                b[depth] = bv;
                self.recurse(depth + 1, remaining - xv, bikes_left - bv, dev, cost + c, x, b, visit)?;
            }
        }
        Ok(())
    }
}

fn brute_force_impl(inst: &Instance, ball: bool, guard: &EnumGuard) -> Result<BruteForce, VerifyError> {
    let ball = ball.then(|| (inst.x_bar(), 2 * inst.gamma));
    let mut en = Enumerator::new(inst, ball);
    let mut best: Option<Cost> = None;
    let mut optima: Vec<Allocation> = Vec::new();
    en.run(guard, &mut |x, b, cost| {
        if best.map_or(true, |bc| cost < bc) {
            best = Some(cost);
            optima.clear();
        }
        if best == Some(cost) {
            let d = IntVec::new(x.iter().zip(b.iter()).map(|(x, b)| x - b).collect());
            optima.push(Allocation::new(d, IntVec::new(b.to_vec())));
        }
    })?;
    match best {
        Some(objective) => Ok(BruteForce { objective, optima }),
        None => Err(VerifyError::Infeasible),
    }
}

/// Exact optimum of the full re-allocation problem (with the L1
/// allowance) by enumeration of every feasible (d, b).
pub fn brute_force_dr(inst: &Instance, guard: &EnumGuard) -> Result<BruteForce, VerifyError> {
    brute_force_impl(inst, true, guard)
}

/// Exact optimum of the allowance-free relaxation (per-station window
/// kept, L1 constraint dropped).
pub fn brute_force_da(inst: &Instance, guard: &EnumGuard) -> Result<BruteForce, VerifyError> {
    brute_force_impl(inst, false, guard)
}

/// Exact optimal bike split at fixed dock totals x, by full scan over
/// 0 ≤ b ≤ x with b(N) ≤ B.  Ties resolve to the lexicographically
/// smallest b.
pub fn brute_force_sra(
    inst: &Instance,
    x: &IntVec,
    guard: &EnumGuard,
) -> Result<(IntVec, Cost), VerifyError> {
    let n = inst.n;
    assert_eq!(x.len(), n);
    let mut best: Option<(IntVec, Cost)> = None;
    let mut b = vec![0i64; n];
    let mut visited = 0u64;
    fn scan(
        inst: &Instance,
        x: &IntVec,
        depth: usize,
        bikes_left: i64,
        cost: Cost,
        b: &mut Vec<i64>,
        best: &mut Option<(IntVec, Cost)>,
        visited: &mut u64,
        guard: u64,
    ) -> Result<(), VerifyError> {
        if depth == inst.n {
            if best.as_ref().map_or(true, |(_, bc)| cost < *bc) {
                *best = Some((IntVec::new(b.clone()), cost));
            }
            return Ok(());
        }
        for bv in 0..=x[depth].min(bikes_left) {
            *visited += 1;
            if *visited > guard {
                return Err(VerifyError::GuardExceeded { visited: *visited, guard });
            }
            let Finite(c) = inst.station_cost(depth, x[depth] - bv, bv) else {
                continue;
            };
            b[depth] = bv;
            scan(inst, x, depth + 1, bikes_left - bv, cost + c, b, best, visited, guard)?;
            b[depth] = 0;
        }
        Ok(())
    }
    scan(inst, x, 0, inst.b_total, 0, &mut b, &mut best, &mut visited, guard.max_points)?;
    best.ok_or(VerifyError::Infeasible)
}

// ---------------------------------------------------------------------
// Theorem-check suite.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckKind {
    MExc,
    MnatExc,
    MuMonotone,
    MuConvex,
    Trajectory,
    Lemma61,
    Proximity,
    PsiConvex,
    Equivalence,
}

impl CheckKind {
    pub const ALL: [CheckKind; 9] = [
        CheckKind::MExc,
        CheckKind::MnatExc,
        CheckKind::MuMonotone,
        CheckKind::MuConvex,
        CheckKind::Trajectory,
        CheckKind::Lemma61,
        CheckKind::Proximity,
        CheckKind::PsiConvex,
        CheckKind::Equivalence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::MExc => "m-exc",
            CheckKind::MnatExc => "mnat-exc",
            CheckKind::MuMonotone => "mu-monotone",
            CheckKind::MuConvex => "mu-convex",
            CheckKind::Trajectory => "trajectory",
            CheckKind::Lemma61 => "lemma61",
            CheckKind::Proximity => "proximity",
            CheckKind::PsiConvex => "psi-convex",
            CheckKind::Equivalence => "equivalence",
        }
    }

    pub fn parse(s: &str) -> Option<CheckKind> {
        CheckKind::ALL.iter().copied().find(|k| k.name() == s)
    }
}

/// Outcome of one structural check: `passed` plus a human-readable
/// summary (a witness when failing).
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub kind: CheckKind,
    pub passed: bool,
    pub detail: String,
}

impl CheckReport {
    fn pass(kind: CheckKind, detail: impl Into<String>) -> Self {
        CheckReport { kind, passed: true, detail: detail.into() }
    }

    fn fail(kind: CheckKind, detail: impl Into<String>) -> Self {
        CheckReport { kind, passed: false, detail: detail.into() }
    }
}

/// Run the selected structural checks against one instance.  Guard
/// exhaustion aborts with an error; individual theorem violations are
/// reported, not raised.
pub fn check_theorem_suite(
    inst: &Instance,
    kinds: &[CheckKind],
    guard: &EnumGuard,
) -> Result<Vec<CheckReport>, VerifyError> {
    let mut out = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let report = match kind {
            CheckKind::MExc => check_exchange_axiom(inst, false, guard)?,
            CheckKind::MnatExc => check_exchange_axiom(inst, true, guard)?,
            CheckKind::MuMonotone => check_mu(inst, guard, false)?,
            CheckKind::MuConvex => check_mu(inst, guard, true)?,
            CheckKind::Trajectory => check_trajectory(inst, guard)?,
            CheckKind::Lemma61 => check_lemma61(inst, guard)?,
            CheckKind::Proximity => check_proximity(inst, guard)?,
            CheckKind::PsiConvex => check_psi_convex(inst, guard)?,
            CheckKind::Equivalence => check_equivalence(inst, guard)?,
        };
        out.push(report);
    }
    Ok(out)
}

fn check_exchange_axiom(inst: &Instance, nat: bool, guard: &EnumGuard) -> Result<CheckReport, VerifyError> {
    let (kind, outcome) = if nat {
        (CheckKind::MnatExc, check_mnat_exc(&make_fhat_oracle(inst), guard.max_points))
    } else {
        (CheckKind::MExc, check_m_exc(&make_f_oracle(inst), guard.max_points))
    };
    match outcome {
        Ok(ExchangeCheck::Pass) => Ok(CheckReport::pass(kind, "exchange axiom holds on the whole domain")),
        Ok(ExchangeCheck::Fail { x, y, i }) => Ok(CheckReport::fail(
            kind,
            format!("no exchange target for x = {x}, y = {y}, i = {i}"),
        )),
        Err(McError::EmptyDomain) => Ok(CheckReport::pass(kind, "empty domain (vacuous)")),
        Err(e) => Err(mc_to_verify(e)),
    }
}

fn profile(inst: &Instance, guard: &EnumGuard) -> Result<MuProfile, VerifyError> {
    mu_profile(&make_f_oracle(inst), &inst.x_bar(), guard.max_points).map_err(mc_to_verify)
}

fn check_mu(inst: &Instance, guard: &EnumGuard, convex: bool) -> Result<CheckReport, VerifyError> {
    let prof = profile(inst, guard)?;
    let kind = if convex { CheckKind::MuConvex } else { CheckKind::MuMonotone };
    if convex {
        for w in 1..prof.mu.len().saturating_sub(1) {
            let (a, m, b) = (prof.mu[w - 1] as i128, prof.mu[w] as i128, prof.mu[w + 1] as i128);
            if a + b < 2 * m {
                return Ok(CheckReport::fail(
                    kind,
                    format!("mu not convex at k = {}: {a} + {b} < 2·{m}", prof.sigma + w as i64),
                ));
            }
        }
        Ok(CheckReport::pass(kind, format!("mu convex on [{}, {}]", prof.sigma, prof.tau)))
    } else {
        for w in 1..prof.mu.len() {
            if prof.mu[w] >= prof.mu[w - 1] {
                return Ok(CheckReport::fail(
                    kind,
                    format!(
                        "mu not strictly decreasing at k = {}: {} then {}",
                        prof.sigma + w as i64,
                        prof.mu[w - 1],
                        prof.mu[w]
                    ),
                ));
            }
        }
        let center = inst.x_bar();
        for (w, x) in prof.witnesses.iter().enumerate() {
            let k = prof.sigma + w as i64;
            if x.l1_dist(&center) != 2 * k {
                return Ok(CheckReport::fail(
                    kind,
                    format!("optimum of the k = {k} ball lies at distance {} ≠ {}", x.l1_dist(&center), 2 * k),
                ));
            }
        }
        Ok(CheckReport::pass(
            kind,
            format!("mu strictly decreasing on [{}, {}] with boundary witnesses", prof.sigma, prof.tau),
        ))
    }
}

fn check_trajectory(inst: &Instance, guard: &EnumGuard) -> Result<CheckReport, VerifyError> {
    let kind = CheckKind::Trajectory;
    let prof = profile(inst, guard)?;
    let fast = solve_dr_greedy(inst, true);
    let slow = solve_dr_greedy(inst, false);
    let objs = |s: &DrSolution| -> Vec<Cost> {
        s.trace.as_ref().unwrap().iter().map(|t| t.objective).collect()
    };
    if objs(&fast) != objs(&slow) {
        return Ok(CheckReport::fail(
            kind,
            format!("fast/slow objective sequences differ: {:?} vs {:?}", objs(&fast), objs(&slow)),
        ));
    }
    let horizon = inst.gamma.min(prof.tau);
    let trace = fast.trace.as_ref().unwrap();
    if trace.len() as i64 != horizon + 1 {
        return Ok(CheckReport::fail(
            kind,
            format!("trace has {} steps, expected min(γ, τ) = {horizon} exchanges", trace.len() - 1),
        ));
    }
    for (k, step) in trace.iter().enumerate() {
        let k = k as i64;
        if step.objective != prof.mu_at(k) {
            return Ok(CheckReport::fail(
                kind,
                format!("f(x_{k}) = {} but μ_{k} = {}", step.objective, prof.mu_at(k)),
            ));
        }
        if step.distance != 2 * k {
            return Ok(CheckReport::fail(
                kind,
                format!("‖x_{k} − x̄‖₁ = {} ≠ {}", step.distance, 2 * k),
            ));
        }
    }
    Ok(CheckReport::pass(kind, format!("greedy tracks μ over {horizon} exchanges")))
}

/// Enumerate the points of {level hyperplane} ∩ [lower, upper] in
/// lexicographic order, stopping after `cap` visits.
fn level_points(lower: &IntVec, upper: &IntVec, level: i64, cap: usize) -> Vec<IntVec> {
    let n = lower.len();
    let mut tail_min = vec![0i64; n + 1];
    let mut tail_max = vec![0i64; n + 1];
    for i in (0..n).rev() {
        tail_min[i] = tail_min[i + 1] + lower[i];
        tail_max[i] = tail_max[i + 1] + upper[i];
    }
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    fn rec(
        depth: usize,
        remaining: i64,
        lower: &IntVec,
        upper: &IntVec,
        tail_min: &[i64],
        tail_max: &[i64],
        x: &mut Vec<i64>,
        out: &mut Vec<IntVec>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        let n = lower.len();
        if depth == n {
            if remaining == 0 {
                out.push(IntVec::new(x.clone()));
            }
            return;
        }
        let lo = lower[depth].max(remaining - tail_max[depth + 1]);
        let hi = upper[depth].min(remaining - tail_min[depth + 1]);
        for v in lo..=hi {
            x[depth] = v;
            rec(depth + 1, remaining - v, lower, upper, tail_min, tail_max, x, out, cap);
            if out.len() >= cap {
                return;
            }
        }
    }
    rec(0, level, lower, upper, &tail_min, &tail_max, &mut x, &mut out, cap);
    out
}

fn check_lemma61(inst: &Instance, guard: &EnumGuard) -> Result<CheckReport, VerifyError> {
    let kind = CheckKind::Lemma61;
    let lower = inst.box_lower();
    let upper = inst.box_upper();
    let xs = level_points(&lower, &upper, inst.total(), 48);
    let mut checked = 0usize;
    for x in &xs {
        let (b0, v0) = solve_sra(inst, x);
        let base = SraState::init(&inst.costs, x.clone(), b0.clone(), 1);
        debug_assert_eq!(base.cost, v0);
        for i in 0..inst.n {
            for j in 0..inst.n {
                if i == j {
                    continue;
                }
                let moved = x.exchanged(i, j, 1);
                if !moved.within_box(&lower, &upper) {
                    continue;
                }
                let state = sra_incremental(inst, base.clone(), i, j);
                let (_, want) = brute_force_sra(inst, &moved, guard)?;
                if state.cost != want {
                    return Ok(CheckReport::fail(
                        kind,
                        format!(
                            "incremental value {} ≠ exhaustive {} at x = {x}, move ({i}, {j})",
                            state.cost, want
                        ),
                    ));
                }
                // The new b must stay inside the constant candidate set
                // around the old optimum.
                let diff: Vec<i64> = state.b.iter().zip(b0.iter()).map(|(a, b)| a - b).collect();
                let pos: i64 = diff.iter().filter(|&&d| d > 0).sum();
                let neg: i64 = -diff.iter().filter(|&&d| d < 0).sum::<i64>();
                if pos > 1 || neg > 1 {
                    return Ok(CheckReport::fail(
                        kind,
                        format!("b̂ − b = {diff:?} leaves the candidate set at x = {x}, move ({i}, {j})"),
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(CheckReport::pass(kind, format!("{checked} single exchanges re-optimized exactly")))
}

fn check_proximity(inst: &Instance, guard: &EnumGuard) -> Result<CheckReport, VerifyError> {
    let kind = CheckKind::Proximity;
    let brute = brute_force_da(inst, guard)?;
    let start = Allocation::new(inst.dbar.clone(), inst.bbar.clone());
    for lambda in [2i64, 4] {
        let sol = match dock::solve_da_steepest(inst, &start, lambda) {
            Ok(s) => s,
            Err(e) => return Ok(CheckReport::fail(kind, format!("λ = {lambda}: {e}"))),
        };
        if let Some(witness) = lambda_improving_move(inst, &sol.allocation, lambda) {
            return Ok(CheckReport::fail(
                kind,
                format!("λ = {lambda}: output admits the improving move {witness}"),
            ));
        }
        let x = sol.allocation.x();
        let nearest = brute
            .optima
            .iter()
            .map(|o| o.x().l1_dist(&x))
            .min()
            .expect("relaxation has at least one optimum");
        let bound = 8 * lambda * inst.n as i64;
        if nearest > bound {
            return Ok(CheckReport::fail(
                kind,
                format!("λ = {lambda}: nearest exact optimum at distance {nearest} > 8λn = {bound}"),
            ));
        }
    }
    Ok(CheckReport::pass(kind, "λ ∈ {2,4} endpoints are λ-optimal and within 8λn of an exact optimum"))
}

/// Exhaustive scan of the six-family step-λ neighborhood of (d, b),
/// independent of the heap machinery: returns a description of a
/// strictly improving feasible move if one exists.
fn lambda_improving_move(inst: &Instance, alloc: &Allocation, lambda: i64) -> Option<String> {
    let n = inst.n;
    let lower = inst.box_lower();
    let upper = inst.box_upper();
    let base = inst.allocation_cost(alloc).expect_finite("current allocation");
    let total_b = alloc.b.total();
    let try_move = |d: &IntVec, b: &IntVec, label: &str| -> Option<String> {
        for i in 0..n {
            if d[i] < 0 || b[i] < 0 {
                return None;
            }
            let xi = d[i] + b[i];
            if xi < lower[i] || xi > upper[i] {
                return None;
            }
        }
        if b.total() > inst.b_total {
            return None;
        }
        let cand = Allocation::new(d.clone(), b.clone());
        match inst.allocation_cost(&cand) {
            Finite(c) if c < base => Some(format!("{label} (cost {c} < {base})")),
            _ => None,
        }
    };
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            // All six ways of raising x(i) and lowering x(j) by λ.
            let mut cands: Vec<(IntVec, IntVec, String)> = Vec::new();
            let (d0, b0) = (&alloc.d, &alloc.b);
            // 1: docks only.
            cands.push((d0.exchanged(i, j, lambda), b0.clone(), format!("N1({i},{j})")));
            // 2: bike in at i, dock out at j.
            if total_b + lambda <= inst.b_total {
                let mut b = b0.clone();
                b.set(i, b[i] + lambda);
                let mut d = d0.clone();
                d.set(j, d[j] - lambda);
                cands.push((d, b, format!("N2({i},{j})")));
            }
            // 3: dock in at i, bike out at j.
            {
                let mut d = d0.clone();
                d.set(i, d[i] + lambda);
                let mut b = b0.clone();
                b.set(j, b[j] - lambda);
                cands.push((d, b, format!("N3({i},{j})")));
            }
            // 4: bikes both sides.
            {
                let mut b = b0.clone();
                b.set(i, b[i] + lambda);
                b.set(j, b[j] - lambda);
                cands.push((d0.clone(), b, format!("N4({i},{j})")));
            }
            for t in 0..n {
                if t == i || t == j {
                    continue;
                }
                // 5: bike in at i, dock out at j, bike→dock at t.
                {
                    let mut b = b0.clone();
                    b.set(i, b[i] + lambda);
                    b.set(t, b[t] - lambda);
                    let mut d = d0.clone();
                    d.set(j, d[j] - lambda);
                    d.set(t, d[t] + lambda);
                    cands.push((d, b, format!("N5({i},{j};{t})")));
                }
                // 6: dock in at i, bike out at j, dock→bike at t.
                {
                    let mut d = d0.clone();
                    d.set(i, d[i] + lambda);
                    d.set(t, d[t] - lambda);
                    let mut b = b0.clone();
                    b.set(j, b[j] - lambda);
                    b.set(t, b[t] + lambda);
                    cands.push((d, b, format!("N6({i},{j};{t})")));
                }
            }
            for (d, b, label) in cands {
                if let Some(w) = try_move(&d, &b, &label) {
                    return Some(w);
                }
            }
        }
    }
    None
}

fn check_psi_convex(inst: &Instance, guard: &EnumGuard) -> Result<CheckReport, VerifyError> {
    let kind = CheckKind::PsiConvex;
    let prof = profile(inst, guard)?;
    if prof.tau <= inst.gamma {
        return Ok(CheckReport::pass(
            kind,
            format!("allowance does not bind (τ = {} ≤ γ = {}); nothing to split", prof.tau, inst.gamma),
        ));
    }
    let brute_da = brute_force_da(inst, guard)?;
    let xbar = inst.x_bar();
    // Nearest exact optimum of the relaxation, ties to the smallest x.
    let x_star = brute_da
        .optima
        .iter()
        .map(|o| o.x())
        .min_by_key(|x| (x.l1_dist(&xbar), x.to_vec()))
        .expect("relaxation has at least one optimum");
    let split = dock::make_drl_split(inst, &x_star);
    let grid: Vec<(ExtendedCost, ExtendedCost)> = (0..=inst.b_total)
        .map(|alpha| {
            (
                dock::psi(inst, &split, SplitSide::A, alpha),
                dock::psi(inst, &split, SplitSide::B, alpha),
            )
        })
        .collect();
    for (alpha, w) in grid.windows(2).enumerate() {
        if w[1].0 > w[0].0 {
            return Ok(CheckReport::fail(
                kind,
                format!("ψ_A increases from α = {alpha}: {:?} then {:?}", w[0].0, w[1].0),
            ));
        }
        if w[1].1 < w[0].1 {
            return Ok(CheckReport::fail(
                kind,
                format!("ψ_B decreases from α = {alpha}: {:?} then {:?}", w[0].1, w[1].1),
            ));
        }
    }
    for side in [0usize, 1] {
        let vals: Vec<ExtendedCost> = grid.iter().map(|g| if side == 0 { g.0 } else { g.1 }).collect();
        for alpha in 1..vals.len().saturating_sub(1) {
            if let (Finite(a), Finite(m), Finite(b)) = (vals[alpha - 1], vals[alpha], vals[alpha + 1]) {
                if (a as i128) + (b as i128) < 2 * m as i128 {
                    let name = if side == 0 { "ψ_A" } else { "ψ_B" };
                    return Ok(CheckReport::fail(
                        kind,
                        format!("{name} not convex at α = {alpha}: {a} + {b} < 2·{m}"),
                    ));
                }
            }
        }
    }
    let grid_min = grid
        .iter()
        .map(|(a, b)| a.add(*b))
        .min()
        .expect("grid is nonempty");
    let brute_dr = brute_force_dr(inst, guard)?;
    if grid_min != Finite(brute_dr.objective) {
        return Ok(CheckReport::fail(
            kind,
            format!("min_α (ψ_A + ψ_B) = {grid_min:?} but the exhaustive optimum is {}", brute_dr.objective),
        ));
    }
    Ok(CheckReport::pass(
        kind,
        format!("ψ monotone + convex over α ∈ [0, {}], grid minimum matches", inst.b_total),
    ))
}

fn check_equivalence(inst: &Instance, guard: &EnumGuard) -> Result<CheckReport, VerifyError> {
    let kind = CheckKind::Equivalence;
    let f = make_f_oracle(inst);
    let center = inst.x_bar();
    let brute = brute_force_dr(inst, guard)?;
    let (xf, _) = steepest_descent_mml1(&f, &center, inst.gamma, guard.max_points).map_err(mc_to_verify)?;
    let xr = reverse_steepest_descent_mml1(&f, &center, inst.gamma, guard.max_points).map_err(mc_to_verify)?;
    let xg = solve_mml1_via_g(&f, &center, inst.gamma, guard.max_points).map_err(mc_to_verify)?;
    let of = f.eval(&xf);
    let or = f.eval(&xr);
    let og = f.eval(&xg);
    if of != or || or != og || of != Finite(brute.objective) {
        return Ok(CheckReport::fail(
            kind,
            format!(
                "objectives diverge: forward {of:?}, reverse {or:?}, split-reduce {og:?}, exhaustive {}",
                brute.objective
            ),
        ));
    }
    Ok(CheckReport::pass(kind, format!("forward = reverse = split-reduce = {}", brute.objective)))
}
