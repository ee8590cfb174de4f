//! The inner resource-allocation subproblem: for fixed dock totals x,
//! choose bike counts b (0 ≤ b ≤ x, b(N) ≤ B) minimizing Σ c_i(x−b, b).
//!
//! Because each c_i is multimodular, β ↦ c_i(x(i)−β, β) is convex, so a
//! marginal-greedy solves the subproblem exactly.  On top of that this
//! module keeps an incremental state with six priority queues over the
//! per-station marginals
//!
//!   c(d+λ,b)−c(d,b),  c(d−λ,b)−c(d,b),  c(d,b+λ)−c(d,b),
//!   c(d,b−λ)−c(d,b),  c(d+λ,b−λ)−c(d,b), c(d−λ,b+λ)−c(d,b),
//!
//! from which both the constant-size re-optimization of b after a dock
//! exchange x → x + λ(χ_i − χ_j) and the full best-neighbor scan of the
//! re-allocation solvers are answered in O(log n).
//!
//! Functions here take a plain `&[StationCost]` rather than a full
//! instance so the same machinery runs on station subsets (the split
//! subproblems of the polynomial solver).

use crate::cost::{Cost, ExtendedCost, Finite};
use crate::instance::Instance;
use crate::station::StationCost;
use crate::vector::IntVec;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Marginal families, indexed by the role a station would play in a
/// move.  `IncD`/`IncB` raise the station's dock total by λ, `DecD`/
/// `DecB` lower it, `SwapDb`/`SwapBd` keep it fixed and trade a bike
/// against an empty dock.
const INC_D: usize = 0;
const DEC_D: usize = 1;
const INC_B: usize = 2;
const DEC_B: usize = 3;
const SWAP_DB: usize = 4; // d+λ, b−λ
const SWAP_BD: usize = 5; // d−λ, b+λ

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct Entry {
    key: Cost,
    station: usize,
    version: u64,
}

/// Solve the subproblem from scratch by marginal greedy: start at
/// b = 0 and repeatedly add the bike with the most negative marginal,
/// smallest station index first, until the budget B is reached or no
/// strictly improving increment remains.
pub fn solve_sra(inst: &Instance, x: &IntVec) -> (IntVec, Cost) {
    for i in 0..inst.n {
        assert!(
            x[i] >= 0 && inst.ell[i] <= x[i] && x[i] <= inst.u[i],
            "x = {x:?} violates the capacity bounds at station {i}"
        );
    }
    solve_sra_on(&inst.costs, x, inst.b_total)
}

/// The same greedy over an explicit cost slice (station subsets).
pub(crate) fn solve_sra_on(costs: &[StationCost], x: &IntVec, budget: i64) -> (IntVec, Cost) {
    let n = costs.len();
    assert_eq!(x.len(), n);
    let mut b = IntVec::zeros(n);
    let mut value: Cost = 0;
    for (i, c) in costs.iter().enumerate() {
        value += c.eval(x[i], 0).expect_finite("cost domain must cover (x(i), 0)");
    }
    let marginal = |i: usize, beta: i64| -> ExtendedCost {
        costs[i]
            .eval(x[i] - beta - 1, beta + 1)
            .sub_finite(costs[i].eval(x[i] - beta, beta).expect_finite("current point"))
    };
    let mut heap: BinaryHeap<Reverse<Entry>> = BinaryHeap::new();
    for i in 0..n {
        if x[i] >= 1 {
            if let Finite(m) = marginal(i, 0) {
                heap.push(Reverse(Entry { key: m, station: i, version: 0 }));
            }
        }
    }
    let mut total_b: i64 = 0;
    while total_b < budget {
        let Some(Reverse(top)) = heap.pop() else { break };
        if top.key >= 0 {
            break;
        }
        let i = top.station;
        b.set(i, b[i] + 1);
        total_b += 1;
        value += top.key;
        if b[i] < x[i] {
            if let Finite(m) = marginal(i, b[i]) {
                heap.push(Reverse(Entry { key: m, station: i, version: 0 }));
            }
        }
    }
    (b, value)
}

/// One candidate move of the dock-exchange neighborhood: raise x(i) by
/// λ, lower x(j) by λ, with `kind` selecting how d and b absorb it
/// (families 1–6) and `via` the third station of families 5/6.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NeighborMove {
    pub kind: u8,
    pub i: usize,
    pub j: usize,
    pub via: Option<usize>,
    pub delta: Cost,
}

/// Per-coordinate bounds a neighbor scan must respect: the dock-total
/// box of the problem at hand plus the bike budget.
#[derive(Clone, Debug)]
pub struct ScanBounds {
    pub lower: IntVec,
    pub upper: IntVec,
    pub bike_cap: i64,
}

impl ScanBounds {
    /// Bounds that constrain nothing but the bike budget.
    pub fn unbounded(n: usize, bike_cap: i64) -> ScanBounds {
        ScanBounds {
            lower: IntVec::new(vec![i64::MIN / 4; n]),
            upper: IntVec::new(vec![i64::MAX / 4; n]),
            bike_cap,
        }
    }
}

/// Incrementally maintained solver state: the current (x, b), its cost,
/// and the six marginal heaps at step λ.  Heaps use lazy deletion: each
/// station carries a version stamp, bumped whenever its (d, b) changes,
/// and entries with stale stamps are dropped on pop.
#[derive(Debug, Clone)]
pub struct SraState {
    pub x: IntVec,
    pub b: IntVec,
    pub total_b: i64,
    pub cost: Cost,
    step: i64,
    heaps: [BinaryHeap<Reverse<Entry>>; 6],
    version: Vec<u64>,
}

impl SraState {
    /// Build state around an existing feasible assignment.  `b` need
    /// not be optimal; callers that require bike-optimality run
    /// `bike_optimize` (or seed from `solve_sra`).
    pub fn init(costs: &[StationCost], x: IntVec, b: IntVec, step: i64) -> SraState {
        assert!(step >= 1);
        let n = costs.len();
        assert_eq!(x.len(), n);
        let mut cost: Cost = 0;
        let mut total_b = 0;
        for i in 0..n {
            assert!(b[i] >= 0 && b[i] <= x[i], "infeasible b at station {i}");
            cost += costs[i]
                .eval(x[i] - b[i], b[i])
                .expect_finite("cost domain must cover the start");
            total_b += b[i];
        }
        let mut st = SraState {
            x,
            b,
            total_b,
            cost,
            step,
            heaps: Default::default(),
            version: vec![0; n],
        };
        for i in 0..n {
            st.push_station(costs, i);
        }
        st
    }

    pub fn step(&self) -> i64 {
        self.step
    }

    pub fn d(&self, i: usize) -> i64 {
        self.x[i] - self.b[i]
    }

    /// Change the move granularity (between scaling phases): all heap
    /// keys depend on λ, so rebuild them.
    pub fn set_step(&mut self, costs: &[StationCost], step: i64) {
        assert!(step >= 1);
        self.step = step;
        for h in &mut self.heaps {
            h.clear();
        }
        for i in 0..self.x.len() {
            self.push_station(costs, i);
        }
    }

    fn marginal(&self, costs: &[StationCost], family: usize, i: usize) -> ExtendedCost {
        let (d, b, s) = (self.d(i), self.b[i], self.step);
        let (nd, nb) = match family {
            INC_D => (d + s, b),
            DEC_D => (d - s, b),
            INC_B => (d, b + s),
            DEC_B => (d, b - s),
            SWAP_DB => (d + s, b - s),
            SWAP_BD => (d - s, b + s),
            _ => unreachable!(),
        };
        costs[i]
            .eval(nd, nb)
            .sub_finite(costs[i].eval(d, b).expect_finite("current point"))
    }

    /// Refresh station i in every heap (called after its (d,b) moved).
    /// Entries are pushed only when the move is inside Z₊² and the cost
    /// domain; anything else is simply absent.
    fn push_station(&mut self, costs: &[StationCost], i: usize) {
        self.version[i] += 1;
        let v = self.version[i];
        for family in 0..6 {
            if let Finite(key) = self.marginal(costs, family, i) {
                self.heaps[family].push(Reverse(Entry { key, station: i, version: v }));
            }
        }
    }

    /// Is station i allowed to take the given role under `bounds`?
    /// Roles IncD/IncB raise x(i); DecD/DecB lower it; swaps keep it.
    fn role_ok(&self, family: usize, i: usize, bounds: &ScanBounds) -> bool {
        match family {
            INC_D | INC_B => self.x[i] + self.step <= bounds.upper[i],
            DEC_D | DEC_B => self.x[i] - self.step >= bounds.lower[i],
            _ => true,
        }
    }

    /// Pop up to `k` entries of one family that are fresh and feasible
    /// for their role.  Stale entries are discarded (lazy deletion);
    /// fresh-but-bound-blocked entries are discarded too, which is safe
    /// because any change to that station's x re-pushes it.  The
    /// returned entries are pushed back afterwards.
    fn top_k(&mut self, family: usize, k: usize, bounds: &ScanBounds) -> Vec<Entry> {
        let mut out = Vec::with_capacity(k);
        while out.len() < k {
            let Some(Reverse(e)) = self.heaps[family].pop() else { break };
            if e.version != self.version[e.station] {
                continue;
            }
            if !self.role_ok(family, e.station, bounds) {
                continue;
            }
            out.push(e);
        }
        for e in &out {
            self.heaps[family].push(Reverse(*e));
        }
        out
    }

    /// Best move over the six neighborhood families at the current
    /// step, respecting `bounds`, or None when every move is infeasible.
    /// Deterministic: ties fall to the smaller family kind, then the
    /// heap order (key, then station index).
    pub fn best_neighbor(&mut self, bounds: &ScanBounds) -> Option<NeighborMove> {
        let mut best: Option<NeighborMove> = None;
        let mut consider = |cand: NeighborMove| {
            if best.as_ref().map_or(true, |b| cand.delta < b.delta) {
                best = Some(cand);
            }
        };

        let inc_d = self.top_k(INC_D, 3, bounds);
        let dec_d = self.top_k(DEC_D, 3, bounds);
        let inc_b = self.top_k(INC_B, 3, bounds);
        let dec_b = self.top_k(DEC_B, 3, bounds);
        let swap_db = self.top_k(SWAP_DB, 3, bounds);
        let swap_bd = self.top_k(SWAP_BD, 3, bounds);

        let bikes_fit = self.total_b + self.step <= bounds.bike_cap;
        let pair = |ups: &[Entry], downs: &[Entry], kind: u8, consider: &mut dyn FnMut(NeighborMove)| {
            for a in &ups[..ups.len().min(2)] {
                for c in &downs[..downs.len().min(2)] {
                    if a.station != c.station {
                        consider(NeighborMove {
                            kind,
                            i: a.station,
                            j: c.station,
                            via: None,
                            delta: a.key + c.key,
                        });
                    }
                }
            }
        };
        pair(&inc_d, &dec_d, 1, &mut consider);
        if bikes_fit {
            pair(&inc_b, &dec_d, 2, &mut consider);
        }
        pair(&inc_d, &dec_b, 3, &mut consider);
        pair(&inc_b, &dec_b, 4, &mut consider);

        let triple = |ups: &[Entry], downs: &[Entry], vias: &[Entry], kind: u8, consider: &mut dyn FnMut(NeighborMove)| {
            for a in ups {
                for c in downs {
                    if a.station == c.station {
                        continue;
                    }
                    for t in vias {
                        if t.station != a.station && t.station != c.station {
                            consider(NeighborMove {
                                kind,
                                i: a.station,
                                j: c.station,
                                via: Some(t.station),
                                delta: a.key + c.key + t.key,
                            });
                        }
                    }
                }
            }
        };
        // Families 5/6 move a bike between stations: net bike count is
        // unchanged, so the budget never blocks them.
        triple(&inc_b, &dec_d, &swap_db, 5, &mut consider);
        triple(&inc_d, &dec_b, &swap_bd, 6, &mut consider);

        best
    }

    /// Apply a move returned by `best_neighbor`/`eval_exchange`.
    pub fn apply(&mut self, costs: &[StationCost], mv: &NeighborMove) {
        let s = self.step;
        let (i, j) = (mv.i, mv.j);
        self.x.set(i, self.x[i] + s);
        self.x.set(j, self.x[j] - s);
        match mv.kind {
            1 => {}
            2 => {
                self.b.set(i, self.b[i] + s);
                self.total_b += s;
            }
            3 => {
                self.b.set(j, self.b[j] - s);
                self.total_b -= s;
            }
            4 => {
                self.b.set(i, self.b[i] + s);
                self.b.set(j, self.b[j] - s);
            }
            5 => {
                let t = mv.via.unwrap();
                self.b.set(i, self.b[i] + s);
                self.b.set(t, self.b[t] - s);
            }
            6 => {
                let t = mv.via.unwrap();
                self.b.set(t, self.b[t] + s);
                self.b.set(j, self.b[j] - s);
            }
            _ => unreachable!(),
        }
        self.cost += mv.delta;
        self.push_station(costs, i);
        self.push_station(costs, j);
        if let Some(t) = mv.via {
            self.push_station(costs, t);
        }
        debug_assert!(self.b[i] >= 0 && self.b[j] >= 0 && self.d(i) >= 0 && self.d(j) >= 0);
    }

    /// Best re-assignment of b for the fixed exchange x → x + λ(χ_i −
    /// χ_j): the optimum is one of the six family moves for this (i, j),
    /// so the scan is constant-size plus two heap probes for the third
    /// station of families 5/6.  Requires the current b to be optimal
    /// for x.  Ties prefer the b̂ moving least (‖b̂ − b‖₁), then the
    /// smaller family kind, then the smaller third station.
    pub fn eval_exchange(
        &mut self,
        costs: &[StationCost],
        i: usize,
        j: usize,
        bounds: &ScanBounds,
    ) -> Option<NeighborMove> {
        assert_ne!(i, j);
        if !self.role_ok(INC_D, i, bounds) || !self.role_ok(DEC_D, j, bounds) {
            return None;
        }
        let inc_d = self.marginal(costs, INC_D, i);
        let dec_d = self.marginal(costs, DEC_D, j);
        let inc_b = self.marginal(costs, INC_B, i);
        let dec_b = self.marginal(costs, DEC_B, j);
        let bikes_fit = self.total_b + self.step <= bounds.bike_cap;

        // Candidates selected by (delta, bike movement ‖b̂−b‖₁/λ, kind,
        // via station).
        let mut best: Option<(NeighborMove, i64)> = None;
        let mut consider = |kind: u8, via: Option<usize>, delta: ExtendedCost, moved: i64| {
            if let Finite(delta) = delta {
                let cand = (NeighborMove { kind, i, j, via, delta }, moved);
                let better = match &best {
                    None => true,
                    Some((b, m)) => {
                        (delta, moved, kind, via.unwrap_or(usize::MAX))
                            < (b.delta, *m, b.kind, b.via.unwrap_or(usize::MAX))
                    }
                };
                if better {
                    best = Some(cand);
                }
            }
        };

        consider(1, None, inc_d.add(dec_d), 0);
        if bikes_fit {
            consider(2, None, inc_b.add(dec_d), 1);
        }
        consider(3, None, inc_d.add(dec_b), 1);
        consider(4, None, inc_b.add(dec_b), 2);
        for t in self.top_k(SWAP_DB, 3, bounds) {
            if t.station != i && t.station != j {
                consider(5, Some(t.station), inc_b.add(dec_d).add(Finite(t.key)), 2);
            }
        }
        for t in self.top_k(SWAP_BD, 3, bounds) {
            if t.station != i && t.station != j {
                consider(6, Some(t.station), inc_d.add(dec_b).add(Finite(t.key)), 2);
            }
        }
        best.map(|(mv, _)| mv)
    }

    /// Re-optimize b at the current x on the λ-grid: steepest descent
    /// over single bike additions/removals and bike swaps until locally
    /// (hence, by separable convexity, globally) optimal.  Returns the
    /// number of moves performed.
    pub fn bike_optimize(&mut self, costs: &[StationCost], bike_cap: i64) -> usize {
        let mut moves = 0;
        // x is fixed throughout, so only the budget matters for roles.
        let free = ScanBounds {
            lower: self.x.clone(),
            upper: self.x.clone(),
            bike_cap,
        };
        loop {
            // Candidates: add at s (SwapBd), remove at t (SwapDb), swap s ↔ t.
            let adds = self.top_k(SWAP_BD, 2, &free);
            let removes = self.top_k(SWAP_DB, 2, &free);
            let mut best: Option<(Cost, u8, usize, Option<usize>)> = None;
            let mut consider = |key: Cost, kind: u8, s: usize, t: Option<usize>| {
                if best.map_or(true, |(bk, ..)| key < bk) {
                    best = Some((key, kind, s, t));
                }
            };
            if self.total_b + self.step <= bike_cap {
                if let Some(e) = adds.first() {
                    consider(e.key, 0, e.station, None);
                }
            }
            if let Some(e) = removes.first() {
                consider(e.key, 1, e.station, None);
            }
            for a in &adds {
                for r in &removes {
                    if a.station != r.station {
                        consider(a.key + r.key, 2, a.station, Some(r.station));
                    }
                }
            }
            match best {
                Some((key, kind, s, t)) if key < 0 => {
                    let lambda = self.step;
                    match kind {
                        0 => {
                            self.b.set(s, self.b[s] + lambda);
                            self.total_b += lambda;
                        }
                        1 => {
                            self.b.set(s, self.b[s] - lambda);
                            self.total_b -= lambda;
                        }
                        2 => {
                            self.b.set(s, self.b[s] + lambda);
                            let t = t.unwrap();
                            self.b.set(t, self.b[t] - lambda);
                        }
                        _ => unreachable!(),
                    }
                    self.cost += key;
                    self.push_station(costs, s);
                    if let Some(t) = t {
                        self.push_station(costs, t);
                    }
                    moves += 1;
                }
                _ => break,
            }
        }
        moves
    }
}

/// Re-optimized state for the dock exchange x → x + χ_i − χ_j (unit
/// step): applies the best family move for this (i, j).  The input
/// state must be bike-optimal for its x; the result is bike-optimal for
/// the shifted x.
pub fn sra_incremental(inst: &Instance, mut state: SraState, i: usize, j: usize) -> SraState {
    assert_eq!(state.step(), 1, "incremental update is defined per unit exchange");
    let bounds = ScanBounds::unbounded(inst.n, inst.b_total);
    let mv = state
        .eval_exchange(&inst.costs, i, j, &bounds)
        .expect("an in-bounds exchange must admit at least one family move");
    state.apply(&inst.costs, &mv);
    state
}
