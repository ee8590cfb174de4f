//! Solvers for the dock re-allocation problem: the induced-objective
//! oracles over dock totals, the budgeted greedy (fast six-heap and
//! slow re-solving variants), steepest descent and proximity scaling
//! for the allowance-free relaxation, and the polynomial solver that
//! splits the L1 allowance and binary-searches the bike budget between
//! the two sides.

use crate::cost::{Cost, ExtendedCost, Finite, Infinite};
use crate::instance::{Allocation, Instance};
use crate::mconvex::{MConvexOracle, TraceStep};
use crate::sra::{solve_sra_on, NeighborMove, ScanBounds, SraState};
use crate::station::StationCost;
use crate::vector::IntVec;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DockError {
    #[error("start allocation is infeasible: {0}")]
    StartInfeasible(String),
}

/// A solved re-allocation: the allocation, its cost, how many moves the
/// solver made, and how far the dock totals travelled from x̄.
#[derive(Clone, Debug)]
pub struct DrSolution {
    pub allocation: Allocation,
    pub objective: Cost,
    /// Solver work counter: accepted exchanges for the greedy, total
    /// phase moves (plus α probes) for the polynomial solver.
    pub iterations: usize,
    /// ‖(d + b) − (d̄ + b̄)‖₁.
    pub distance: i64,
    /// Per-iteration trace (greedy solvers only).
    pub trace: Option<Vec<TraceStep>>,
}

/// Allowance-free solution: the relaxation drops the L1 budget but
/// keeps the per-station window around x̄.
#[derive(Clone, Debug)]
pub struct DaSolution {
    pub allocation: Allocation,
    pub objective: Cost,
    pub steps: usize,
}

/// Phase log of the proximity-scaling solver.
#[derive(Clone, Debug, Default)]
pub struct ScalingSchedule {
    /// Step sizes, strictly decreasing, ending at 1.
    pub lambdas: Vec<i64>,
    /// Bike re-optimization moves per phase.
    pub rebike_steps: Vec<usize>,
    /// Dock-exchange descent moves per phase.
    pub descent_steps: Vec<usize>,
}

impl ScalingSchedule {
    pub fn phases(&self) -> usize {
        self.lambdas.len()
    }

    pub fn total_steps(&self) -> usize {
        self.rebike_steps.iter().sum::<usize>() + self.descent_steps.iter().sum::<usize>()
    }
}

// ---------------------------------------------------------------------
// Induced objectives over dock totals.

/// The dock-total objective f(x) = (optimal bike split cost at x) on
/// the hyperplane x(N) = D + B, boxed to [max(ℓ, x̄−γ, 0), min(u, x̄+γ)].
pub fn make_f_oracle(inst: &Instance) -> MConvexOracle {
    let costs = inst.costs.clone();
    let budget = inst.b_total;
    MConvexOracle::new(
        inst.n,
        inst.total(),
        inst.box_lower(),
        inst.box_upper(),
        move |x: &IntVec| Finite(solve_sra_on(&costs, x, budget).1),
    )
}

/// The same objective without the hyperplane constraint (the level test
/// is dropped; the box stays).
pub fn make_fhat_oracle(inst: &Instance) -> MConvexOracle {
    let costs = inst.costs.clone();
    let budget = inst.b_total;
    MConvexOracle::new_free(
        inst.n,
        inst.box_lower(),
        inst.box_upper(),
        move |x: &IntVec| Finite(solve_sra_on(&costs, x, budget).1),
    )
}

// ---------------------------------------------------------------------
// Budgeted greedy.

fn dr_solution_from(inst: &Instance, x: IntVec, b: IntVec, objective: Cost, trace: Vec<TraceStep>) -> DrSolution {
    let d = IntVec::new(x.iter().zip(b.iter()).map(|(x, b)| x - b).collect());
    let distance = x.l1_dist(&inst.x_bar());
    let sol = DrSolution {
        allocation: Allocation::new(d, b),
        objective,
        iterations: trace.len().saturating_sub(1),
        distance,
        trace: Some(trace),
    };
    debug_assert!(check_dr_feasible(inst, &sol.allocation, inst.gamma).is_ok());
    sol
}

/// Feasibility of an allocation for the re-allocation problem with the
/// given allowance (γ = ∞ for the relaxation is expressed by callers
/// passing a huge γ).
pub fn check_dr_feasible(inst: &Instance, alloc: &Allocation, gamma: i64) -> Result<(), String> {
    if alloc.d.len() != inst.n || alloc.b.len() != inst.n {
        return Err("length mismatch".into());
    }
    let x = alloc.x();
    for i in 0..inst.n {
        if alloc.d[i] < 0 || alloc.b[i] < 0 {
            return Err(format!("negative counts at station {i}"));
        }
        if x[i] < inst.ell[i] || x[i] > inst.u[i] {
            return Err(format!("x({i}) = {} outside [{}, {}]", x[i], inst.ell[i], inst.u[i]));
        }
    }
    if x.total() != inst.total() {
        return Err(format!("x(N) = {} but D + B = {}", x.total(), inst.total()));
    }
    if alloc.b.total() > inst.b_total {
        return Err(format!("b(N) = {} exceeds B = {}", alloc.b.total(), inst.b_total));
    }
    let dist = x.l1_dist(&inst.x_bar());
    if dist > 2 * gamma {
        return Err(format!("distance {dist} exceeds allowance {}", 2 * gamma));
    }
    if !inst.allocation_cost(alloc).is_finite() {
        return Err("allocation outside the cost domain".into());
    }
    Ok(())
}

/// Budgeted steepest descent from (d̄, b̄): bike-optimize at x̄, then up
/// to γ rounds of the best dock exchange, stopping early when no
/// exchange strictly improves.  `fast` scans the six marginal heaps;
/// the slow mode re-solves the bike subproblem for every candidate
/// x + χ_i − χ_j.  Both produce the same objective at every iteration.
pub fn solve_dr_greedy(inst: &Instance, fast: bool) -> DrSolution {
    let xbar = inst.x_bar();
    let (b0, f0) = solve_sra_on(&inst.costs, &xbar, inst.b_total);
    let bounds = ScanBounds {
        lower: inst.box_lower(),
        upper: inst.box_upper(),
        bike_cap: inst.b_total,
    };
    let mut trace = vec![TraceStep { k: 0, x: xbar.clone(), objective: f0, distance: 0 }];

    if fast {
        let mut state = SraState::init(&inst.costs, xbar.clone(), b0, 1);
        for k in 1..=inst.gamma {
            match state.best_neighbor(&bounds) {
                Some(mv) if mv.delta < 0 => {
                    state.apply(&inst.costs, &mv);
                    trace.push(TraceStep {
                        k,
                        x: state.x.clone(),
                        objective: state.cost,
                        distance: state.x.l1_dist(&xbar),
                    });
                }
                _ => break,
            }
        }
        let SraState { x, b, cost, .. } = state;
        dr_solution_from(inst, x, b, cost, trace)
    } else {
        let mut x = xbar.clone();
        let mut bx = b0;
        let mut fx = f0;
        for k in 1..=inst.gamma {
            let mut best: Option<(usize, usize, Cost, IntVec)> = None;
            for i in 0..inst.n {
                for j in 0..inst.n {
                    if i == j {
                        continue;
                    }
                    let cand = x.exchanged(i, j, 1);
                    if !cand.within_box(&bounds.lower, &bounds.upper) {
                        continue;
                    }
                    let (bc, v) = solve_sra_on(&inst.costs, &cand, inst.b_total);
                    if best.as_ref().map_or(true, |&(.., bv, _)| v < bv) {
                        best = Some((i, j, v, bc));
                    }
                }
            }
            match best {
                Some((i, j, v, bc)) if v < fx => {
                    x = x.exchanged(i, j, 1);
                    fx = v;
                    bx = bc;
                    trace.push(TraceStep { k, x: x.clone(), objective: fx, distance: x.l1_dist(&xbar) });
                }
                _ => break,
            }
        }
        dr_solution_from(inst, x, bx, fx, trace)
    }
}

// ---------------------------------------------------------------------
// Allowance-free relaxation: steepest descent and proximity scaling.

/// One relaxation subproblem: minimize Σ costs over dock totals in
/// [lower, upper] summing to `level`, with at most `bike_cap` bikes.
/// Wholly self-describing so the split solver can run it on station
/// subsets.
#[derive(Clone, Debug)]
pub struct DaProblem {
    pub costs: Vec<StationCost>,
    pub lower: IntVec,
    pub upper: IntVec,
    pub level: i64,
    pub bike_cap: i64,
}

impl DaProblem {
    /// The relaxation of the full instance: every station, the shared
    /// dock-total box, level D + B, bike budget B.
    pub fn full(inst: &Instance) -> DaProblem {
        DaProblem {
            costs: inst.costs.clone(),
            lower: inst.box_lower(),
            upper: inst.box_upper(),
            level: inst.total(),
            bike_cap: inst.b_total,
        }
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    fn bounds(&self) -> ScanBounds {
        ScanBounds {
            lower: self.lower.clone(),
            upper: self.upper.clone(),
            bike_cap: self.bike_cap,
        }
    }

    /// First step size of the scaling schedule: max(1, ⌊level/(4n)⌋).
    pub fn initial_lambda(&self) -> i64 {
        (self.level / (4 * self.n() as i64)).max(1)
    }

    /// Some point of the dock-total polytope: lower bounds plus a
    /// greedy fill, or None when the polytope is empty.
    pub fn feasible_x(&self) -> Option<IntVec> {
        let n = self.n();
        for i in 0..n {
            if self.lower[i] > self.upper[i] {
                return None;
            }
        }
        let mut x = self.lower.clone();
        let mut deficit = self.level - x.total();
        if deficit < 0 {
            return None;
        }
        for i in 0..n {
            if deficit == 0 {
                break;
            }
            let add = (self.upper[i] - self.lower[i]).min(deficit);
            x.set(i, x[i] + add);
            deficit -= add;
        }
        (deficit == 0).then_some(x)
    }
}

/// Six-family steepest descent at the state's current step size until
/// no move strictly improves.  Returns the number of accepted moves.
fn da_phase(problem: &DaProblem, state: &mut SraState) -> usize {
    let bounds = problem.bounds();
    let mut steps = 0;
    loop {
        match state.best_neighbor(&bounds) {
            Some(mv) if mv.delta < 0 => {
                state.apply(&problem.costs, &mv);
                steps += 1;
            }
            _ => break,
        }
    }
    steps
}

/// Run the full scaling schedule from (x0, b0): per phase, re-optimize
/// bikes on the λ-grid, descend over dock exchanges, then halve λ.
/// The final phase runs at λ = 1, whose endpoint is exactly optimal.
fn scaled_run(problem: &DaProblem, x0: IntVec, b0: IntVec) -> (SraState, ScalingSchedule) {
    let mut lambda = problem.initial_lambda();
    let mut state = SraState::init(&problem.costs, x0, b0, lambda);
    let mut sched = ScalingSchedule::default();
    loop {
        if state.step() != lambda {
            state.set_step(&problem.costs, lambda);
        }
        let rebike = state.bike_optimize(&problem.costs, problem.bike_cap);
        let descent = da_phase(problem, &mut state);
        sched.lambdas.push(lambda);
        sched.rebike_steps.push(rebike);
        sched.descent_steps.push(descent);
        if lambda == 1 {
            break;
        }
        lambda /= 2;
    }
    (state, sched)
}

fn da_solution_from(inst: &Instance, state: &SraState, steps: usize) -> DaSolution {
    let d = IntVec::new(state.x.iter().zip(state.b.iter()).map(|(x, b)| x - b).collect());
    let sol = DaSolution {
        allocation: Allocation::new(d, state.b.clone()),
        objective: state.cost,
        steps,
    };
    debug_assert!(check_dr_feasible(inst, &sol.allocation, i64::MAX / 4).is_ok());
    sol
}

fn check_da_start(problem: &DaProblem, start: &Allocation) -> Result<(), DockError> {
    let n = problem.n();
    if start.d.len() != n || start.b.len() != n {
        return Err(DockError::StartInfeasible("length mismatch".into()));
    }
    let x = start.x();
    for i in 0..n {
        if start.d[i] < 0 || start.b[i] < 0 {
            return Err(DockError::StartInfeasible(format!("negative counts at station {i}")));
        }
        if x[i] < problem.lower[i] || x[i] > problem.upper[i] {
            return Err(DockError::StartInfeasible(format!(
                "x({i}) = {} outside [{}, {}]",
                x[i], problem.lower[i], problem.upper[i]
            )));
        }
        if !problem.costs[i].eval(start.d[i], start.b[i]).is_finite() {
            return Err(DockError::StartInfeasible(format!("station {i} outside the cost domain")));
        }
    }
    if x.total() != problem.level {
        return Err(DockError::StartInfeasible(format!(
            "x(N) = {} but the level is {}",
            x.total(),
            problem.level
        )));
    }
    if start.b.total() > problem.bike_cap {
        return Err(DockError::StartInfeasible(format!(
            "b(N) = {} exceeds the bike budget {}",
            start.b.total(),
            problem.bike_cap
        )));
    }
    Ok(())
}

/// Single-step-size solve of the relaxation: bike-optimize the start on
/// the λ-grid, then six-family descent at step λ.  All iterates stay on
/// the start's λ-grid.  At λ = 1 the result is globally optimal; at
/// larger λ it satisfies the step-λ local-optimality condition.
pub fn solve_da_steepest(
    inst: &Instance,
    start: &Allocation,
    lambda: i64,
) -> Result<DaSolution, DockError> {
    assert!(lambda >= 1);
    let problem = DaProblem::full(inst);
    check_da_start(&problem, start)?;
    let mut state = SraState::init(&problem.costs, start.x(), start.b.clone(), lambda);
    let rebike = state.bike_optimize(&problem.costs, problem.bike_cap);
    let descent = da_phase(&problem, &mut state);
    Ok(da_solution_from(inst, &state, rebike + descent))
}

/// Proximity-scaling solve of the relaxation from (d̄, b̄): step sizes
/// max(1, ⌊(D+B)/(4n)⌋), halved each phase down to 1.  The endpoint is
/// a true optimum of the relaxation.
pub fn solve_da_scaling(inst: &Instance) -> (DaSolution, ScalingSchedule) {
    let problem = DaProblem::full(inst);
    let (state, sched) = scaled_run(&problem, inst.x_bar(), inst.bbar.clone());
    let total = sched.total_steps();
    (da_solution_from(inst, &state, total), sched)
}

// ---------------------------------------------------------------------
// Polynomial solver: scaling + allowance split + α binary search.

/// The allowance split around a nearest optimum x• of the relaxation:
/// P = supp⁺(x• − x̄); raised stations may climb from x̄(i) to
/// min(x•(i), x̄(i)+γ), the rest may descend from x̄(i) to
/// max(x•(i), x̄(i)−γ).
#[derive(Clone, Debug)]
pub struct DrlSplit {
    pub p: Vec<usize>,
    pub ell_hat: IntVec,
    pub u_hat: IntVec,
}

pub fn make_drl_split(inst: &Instance, x_star: &IntVec) -> DrlSplit {
    let xbar = inst.x_bar();
    let p = x_star.supp_plus(&xbar);
    let mut ell_hat = IntVec::zeros(inst.n);
    let mut u_hat = IntVec::zeros(inst.n);
    for i in 0..inst.n {
        if p.binary_search(&i).is_ok() {
            ell_hat.set(i, xbar[i]);
            u_hat.set(i, x_star[i].min(xbar[i] + inst.gamma));
        } else {
            ell_hat.set(i, x_star[i].max(xbar[i] - inst.gamma));
            u_hat.set(i, xbar[i]);
        }
    }
    DrlSplit { p, ell_hat, u_hat }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitSide {
    /// The raised stations P, which absorb exactly γ extra docks.
    A,
    /// The rest, which give up exactly γ docks.
    B,
}

/// Stations of one side (in increasing order) and its subproblem under
/// bike budget α (side A) or B − α (side B).
fn side_problem(inst: &Instance, split: &DrlSplit, side: SplitSide, alpha: i64) -> (Vec<usize>, DaProblem) {
    let xbar = inst.x_bar();
    let stations: Vec<usize> = match side {
        SplitSide::A => split.p.clone(),
        SplitSide::B => (0..inst.n).filter(|i| split.p.binary_search(i).is_err()).collect(),
    };
    let level: i64 = match side {
        SplitSide::A => stations.iter().map(|&i| xbar[i]).sum::<i64>() + inst.gamma,
        SplitSide::B => stations.iter().map(|&i| xbar[i]).sum::<i64>() - inst.gamma,
    };
    let bike_cap = match side {
        SplitSide::A => alpha,
        SplitSide::B => inst.b_total - alpha,
    };
    let problem = DaProblem {
        costs: stations.iter().map(|&i| inst.costs[i].clone()).collect(),
        lower: IntVec::new(stations.iter().map(|&i| split.ell_hat[i]).collect()),
        upper: IntVec::new(stations.iter().map(|&i| split.u_hat[i]).collect()),
        level,
        bike_cap,
    };
    (stations, problem)
}

/// Exactly solve a side subproblem (scaling from a greedy-filled start
/// with no bikes); None when its dock polytope is empty.
fn solve_side(problem: &DaProblem) -> Option<SraState> {
    let x0 = problem.feasible_x()?;
    let b0 = IntVec::zeros(problem.n());
    let (state, _) = scaled_run(problem, x0, b0);
    Some(state)
}

/// Optimal value of one side's subproblem at the given bike budget
/// split; +∞ when infeasible.  As α grows, side A's value can only
/// improve (nonincreasing) and side B's only worsen (nondecreasing);
/// both are convex in α.
pub fn psi(inst: &Instance, split: &DrlSplit, side: SplitSide, alpha: i64) -> ExtendedCost {
    assert!(0 <= alpha && alpha <= inst.b_total);
    let (_, problem) = side_problem(inst, split, side, alpha);
    match solve_side(&problem) {
        Some(state) => Finite(state.cost),
        None => Infinite,
    }
}

/// Pull an optimal unit-step state toward `center` along objective-
/// preserving exchanges: repeatedly raise a below-center coordinate and
/// lower an above-center one while the objective stays equal.  Ends at
/// the nearest optimum (the lexicographic value-then-distance optimum).
fn pull_toward(problem: &DaProblem, state: &mut SraState, center: &IntVec) -> usize {
    debug_assert_eq!(state.step(), 1);
    let bounds = problem.bounds();
    let mut moves = 0;
    loop {
        let raise = state.x.supp_minus(center); // x(i) < center(i)
        let lower = state.x.supp_plus(center); // x(j) > center(j)
        let mut chosen: Option<NeighborMove> = None;
        'scan: for &i in &raise {
            for &j in &lower {
                if let Some(mv) = state.eval_exchange(&problem.costs, i, j, &bounds) {
                    // At an optimum no move has delta < 0; accept the
                    // first objective-preserving one.
                    debug_assert!(mv.delta >= 0);
                    if mv.delta == 0 {
                        chosen = Some(mv);
                        break 'scan;
                    }
                }
            }
        }
        match chosen {
            Some(mv) => {
                state.apply(&problem.costs, &mv);
                moves += 1;
            }
            None => break,
        }
    }
    moves
}

/// Polynomial solve of the full problem: scaling on the relaxation,
/// pull to the nearest relaxed optimum, return it if within the
/// allowance; otherwise split the allowance at P and binary-search the
/// bike budget α between the sides of the split.
pub fn solve_dr_poly(inst: &Instance) -> DrSolution {
    let problem = DaProblem::full(inst);
    let xbar = inst.x_bar();
    let (mut state, sched) = scaled_run(&problem, xbar.clone(), inst.bbar.clone());
    let mut work = sched.total_steps();
    work += pull_toward(&problem, &mut state, &xbar);

    if state.x.l1_dist(&xbar) <= 2 * inst.gamma {
        let SraState { x, b, cost, .. } = state;
        let d = IntVec::new(x.iter().zip(b.iter()).map(|(x, b)| x - b).collect());
        let distance = x.l1_dist(&xbar);
        let sol = DrSolution {
            allocation: Allocation::new(d, b),
            objective: cost,
            iterations: work,
            distance,
            trace: None,
        };
        debug_assert!(check_dr_feasible(inst, &sol.allocation, inst.gamma).is_ok());
        return sol;
    }

    let split = make_drl_split(inst, &state.x);
    let mut memo_a: HashMap<i64, ExtendedCost> = HashMap::new();
    let mut memo_b: HashMap<i64, ExtendedCost> = HashMap::new();
    let mut evals = 0usize;
    let mut psi_a = |alpha: i64, evals: &mut usize| -> ExtendedCost {
        *memo_a.entry(alpha).or_insert_with(|| {
            *evals += 1;
            psi(inst, &split, SplitSide::A, alpha)
        })
    };
    let mut psi_b = |alpha: i64, evals: &mut usize| -> ExtendedCost {
        *memo_b.entry(alpha).or_insert_with(|| {
            *evals += 1;
            psi(inst, &split, SplitSide::B, alpha)
        })
    };

    // Effective interval: ψ_A is nonincreasing so its finite set is an
    // up-set [α_lo, B]; ψ_B is nondecreasing so its finite set is
    // [0, α_hi].  (Both are in fact finite everywhere for valid
    // instances; this narrowing is defensive.)
    let mut alpha_lo = 0i64;
    let mut alpha_hi = inst.b_total;
    if !psi_a(alpha_lo, &mut evals).is_finite() {
        let (mut lo, mut hi) = (alpha_lo, alpha_hi);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if psi_a(mid, &mut evals).is_finite() {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        alpha_lo = lo;
    }
    if !psi_b(alpha_hi, &mut evals).is_finite() {
        let (mut lo, mut hi) = (alpha_lo, alpha_hi);
        while lo < hi {
            let mid = lo + (hi - lo + 1) / 2;
            if psi_b(mid, &mut evals).is_finite() {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        alpha_hi = lo;
    }
    assert!(
        alpha_lo <= alpha_hi,
        "the split subproblems admit no common bike budget"
    );

    // Binary search the discrete convex sum Φ(α) = ψ_A(α) + ψ_B(α).
    let (mut lo, mut hi) = (alpha_lo, alpha_hi);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let here = psi_a(mid, &mut evals).add(psi_b(mid, &mut evals));
        let next = psi_a(mid + 1, &mut evals).add(psi_b(mid + 1, &mut evals));
        if here > next {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let alpha = lo;

    // Reconstruct the two sides at the optimal α and stitch.
    let (stations_a, prob_a) = side_problem(inst, &split, SplitSide::A, alpha);
    let (stations_b, prob_b) = side_problem(inst, &split, SplitSide::B, alpha);
    let sa = solve_side(&prob_a).expect("side A must be feasible at the optimal budget split");
    let sb = solve_side(&prob_b).expect("side B must be feasible at the optimal budget split");
    let mut x = IntVec::zeros(inst.n);
    let mut b = IntVec::zeros(inst.n);
    for (slot, &i) in stations_a.iter().enumerate() {
        x.set(i, sa.x[slot]);
        b.set(i, sa.b[slot]);
    }
    for (slot, &i) in stations_b.iter().enumerate() {
        x.set(i, sb.x[slot]);
        b.set(i, sb.b[slot]);
    }
    let d = IntVec::new(x.iter().zip(b.iter()).map(|(x, b)| x - b).collect());
    let objective = sa.cost + sb.cost;
    let distance = x.l1_dist(&xbar);
    let sol = DrSolution {
        allocation: Allocation::new(d, b),
        objective,
        iterations: work + evals,
        distance,
        trace: None,
    };
    debug_assert!(check_dr_feasible(inst, &sol.allocation, inst.gamma).is_ok());
    sol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mconvex::{check_m_exc, check_mnat_exc, DEFAULT_ENUM_GUARD};
    use crate::testutil::two_station;

    #[test]
    fn f_oracle_values_and_axiom() {
        let inst = two_station();
        let f = make_f_oracle(&inst);
        // At the current totals the best split costs 4.
        assert_eq!(f.eval(&IntVec::new(vec![2, 2])), Finite(4));
        // Off the level: +∞.
        assert_eq!(f.eval(&IntVec::new(vec![2, 1])), Infinite);
        // The optimum of the γ=1 ball sits at (3,1).
        assert_eq!(f.eval(&IntVec::new(vec![3, 1])), Finite(2));
        assert!(check_m_exc(&f, DEFAULT_ENUM_GUARD).unwrap().passed());

        let fhat = make_fhat_oracle(&inst);
        assert_eq!(fhat.eval(&IntVec::new(vec![2, 2])), Finite(4));
        // No level test: one-coordinate moves are inside the domain.
        assert_eq!(fhat.eval(&IntVec::new(vec![2, 1])), Finite(3));
        assert!(check_mnat_exc(&fhat, DEFAULT_ENUM_GUARD).unwrap().passed());
    }

    #[test]
    fn greedy_reference_values() {
        let inst = two_station();
        for fast in [false, true] {
            let sol = solve_dr_greedy(&inst, fast);
            assert_eq!(sol.objective, 2, "fast = {fast}");
            assert_eq!(sol.distance, 2);
            assert_eq!(sol.iterations, 1);
            assert!(check_dr_feasible(&inst, &sol.allocation, inst.gamma).is_ok());
        }

        let mut pinned = two_station();
        pinned.gamma = 0;
        for fast in [false, true] {
            let sol = solve_dr_greedy(&pinned, fast);
            assert_eq!(sol.objective, 4, "fast = {fast}");
            assert_eq!(sol.iterations, 0);
            assert_eq!(sol.distance, 0);
        }
    }

    #[test]
    fn fast_and_slow_traces_agree() {
        let inst = two_station();
        let fast = solve_dr_greedy(&inst, true);
        let slow = solve_dr_greedy(&inst, false);
        let objs = |s: &DrSolution| -> Vec<Cost> {
            s.trace.as_ref().unwrap().iter().map(|t| t.objective).collect()
        };
        assert_eq!(objs(&fast), objs(&slow));
    }

    #[test]
    fn da_steepest_unit_step_is_exact() {
        let inst = two_station();
        let start = Allocation::new(inst.dbar.clone(), inst.bbar.clone());
        let sol = solve_da_steepest(&inst, &start, 1).unwrap();
        assert_eq!(sol.objective, 2);
        assert!(check_dr_feasible(&inst, &sol.allocation, i64::MAX / 4).is_ok());
    }

    #[test]
    fn da_steepest_huge_step_returns_start() {
        let inst = two_station();
        let start = Allocation::new(inst.dbar.clone(), inst.bbar.clone());
        let sol = solve_da_steepest(&inst, &start, 10).unwrap();
        assert_eq!(sol.allocation, start);
        assert_eq!(sol.steps, 0);
    }

    #[test]
    fn da_steepest_rejects_bad_start() {
        let inst = two_station();
        // Too many bikes.
        let start = Allocation::new(IntVec::new(vec![0, 0]), IntVec::new(vec![2, 2]));
        assert!(matches!(
            solve_da_steepest(&inst, &start, 1),
            Err(DockError::StartInfeasible(_))
        ));
    }

    #[test]
    fn scaling_matches_unit_descent() {
        let inst = two_station();
        let (sol, sched) = solve_da_scaling(&inst);
        assert_eq!(sol.objective, 2);
        // D + B = 4, n = 2: ⌊4/8⌋ → λ₁ = 1, single phase.
        assert_eq!(sched.lambdas, vec![1]);
    }

    #[test]
    fn scaling_schedule_halves_from_initial_lambda() {
        // D + B = 64, n = 2 → λ = 8, 4, 2, 1.
        let inst = Instance {
            n: 2,
            d_total: 32,
            b_total: 32,
            gamma: 64,
            ell: IntVec::new(vec![0, 0]),
            u: IntVec::new(vec![40, 40]),
            dbar: IntVec::new(vec![16, 16]),
            bbar: IntVec::new(vec![16, 16]),
            costs: vec![StationCost::quad([1, 0], [1, 0], [0, 0]); 2],
        };
        assert!(inst.validate().is_empty());
        let (sol, sched) = solve_da_scaling(&inst);
        assert_eq!(sched.lambdas, vec![8, 4, 2, 1]);
        // Symmetric optimum: x = (32, 32), b = (16, 16).
        assert_eq!(sol.objective, 4 * 16 * 16);
    }

    #[test]
    fn poly_bypasses_when_relaxed_optimum_is_near() {
        let inst = two_station();
        let sol = solve_dr_poly(&inst);
        assert_eq!(sol.objective, 2);
        assert!(sol.distance <= 2 * inst.gamma);
    }

    #[test]
    fn poly_splits_when_allowance_binds() {
        let mut inst = two_station();
        inst.gamma = 0;
        let sol = solve_dr_poly(&inst);
        assert_eq!(sol.objective, 4);
        assert_eq!(sol.distance, 0);
        assert_eq!(sol.allocation.x().as_slice(), &[2, 2]);
    }

    #[test]
    fn psi_reference_values_on_pinned_split() {
        // γ = 0 forces both sides to keep x̄; the split degenerates to
        // splitting the bike budget between the stations.
        let mut inst = two_station();
        inst.gamma = 0;
        let x_star = IntVec::new(vec![3, 1]); // relaxed optimum
        let split = make_drl_split(&inst, &x_star);
        assert_eq!(split.p, vec![0]);
        assert_eq!(split.ell_hat.as_slice(), &[2, 2]);
        assert_eq!(split.u_hat.as_slice(), &[2, 2]);
        let a: Vec<ExtendedCost> =
            (0..=2).map(|al| psi(&inst, &split, SplitSide::A, al)).collect();
        let b: Vec<ExtendedCost> =
            (0..=2).map(|al| psi(&inst, &split, SplitSide::B, al)).collect();
        assert_eq!(a, vec![Finite(4), Finite(2), Finite(2)]);
        assert_eq!(b, vec![Finite(2), Finite(2), Finite(4)]);
    }

    #[test]
    fn poly_matches_greedy_on_reference() {
        for gamma in 0..=3 {
            let mut inst = two_station();
            inst.gamma = gamma;
            let greedy = solve_dr_greedy(&inst, true);
            let poly = solve_dr_poly(&inst);
            assert_eq!(poly.objective, greedy.objective, "gamma = {gamma}");
        }
    }
}
