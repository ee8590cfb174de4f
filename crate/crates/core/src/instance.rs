//! Problem instances and allocations, plus eager validation.
//!
//! An instance describes n stations with capacity bounds [ℓ(i), u(i)],
//! a current allocation (d̄, b̄) of empty docks and bikes, totals D and
//! B, a move budget γ, and per-station multimodular costs.  The solvers
//! assume a *valid* instance; `Instance::validate` is the single place
//! where every structural and feasibility invariant is enforced.

use crate::cost::ExtendedCost;
use crate::station::{check_multimodular, MultimodularCheck, StationCost};
use crate::vector::IntVec;
use std::fmt;

#[derive(Clone, Debug)]
pub struct Instance {
    pub n: usize,
    /// Total empty docks across the system.
    pub d_total: i64,
    /// Total bikes across the system.
    pub b_total: i64,
    /// L1 move budget: re-allocations must keep ‖x − x̄‖₁ ≤ 2γ.
    pub gamma: i64,
    pub ell: IntVec,
    pub u: IntVec,
    pub dbar: IntVec,
    pub bbar: IntVec,
    pub costs: Vec<StationCost>,
}

/// A candidate assignment of empty docks `d` and bikes `b` per station.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation {
    pub d: IntVec,
    pub b: IntVec,
}

impl Allocation {
    pub fn new(d: IntVec, b: IntVec) -> Self {
        assert_eq!(d.len(), b.len(), "length mismatch");
        Allocation { d, b }
    }

    /// Dock totals x = d + b.
    pub fn x(&self) -> IntVec {
        IntVec::new(
            self.d
                .iter()
                .zip(self.b.iter())
                .map(|(d, b)| d + b)
                .collect(),
        )
    }
}

/// A named validation failure.  `code` is stable and machine-checkable;
/// `station` is set when the failure is per-station.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub code: &'static str,
    pub station: Option<usize>,
    pub detail: String,
}

impl Violation {
    fn new(code: &'static str, station: Option<usize>, detail: String) -> Self {
        Violation { code, station, detail }
    }

    /// True for violations that mean the *current allocation* is not
    /// feasible; the instance is otherwise well-formed.  The CLI maps
    /// these to a distinct exit code.
    pub fn is_feasibility(&self) -> bool {
        matches!(self.code, "total-capacity" | "bike-budget" | "box-bounds")
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.station {
            Some(i) => write!(f, "{} (station {}): {}", self.code, i, self.detail),
            None => write!(f, "{}: {}", self.code, self.detail),
        }
    }
}

impl Instance {
    /// Current dock totals x̄ = d̄ + b̄.
    pub fn x_bar(&self) -> IntVec {
        IntVec::new(
            self.dbar
                .iter()
                .zip(self.bbar.iter())
                .map(|(d, b)| d + b)
                .collect(),
        )
    }

    /// D + B, the conserved total of docks-plus-bikes.
    pub fn total(&self) -> i64 {
        self.d_total + self.b_total
    }

    pub fn station_cost(&self, i: usize, d: i64, b: i64) -> ExtendedCost {
        self.costs[i].eval(d, b)
    }

    /// Σ c_i(d(i), b(i)); +∞ if any station is outside its cost domain.
    pub fn allocation_cost(&self, alloc: &Allocation) -> ExtendedCost {
        let mut total = ExtendedCost::Finite(0);
        for i in 0..self.n {
            total = total.add(self.station_cost(i, alloc.d[i], alloc.b[i]));
        }
        total
    }

    /// Lower bound of the dock-total box shared by the re-allocation
    /// solvers: max(ℓ(i), x̄(i) − γ, 0).
    pub fn box_lower(&self) -> IntVec {
        let xbar = self.x_bar();
        IntVec::new(
            (0..self.n)
                .map(|i| self.ell[i].max(xbar[i] - self.gamma).max(0))
                .collect(),
        )
    }

    /// Upper bound of the dock-total box: min(u(i), x̄(i) + γ).
    pub fn box_upper(&self) -> IntVec {
        let xbar = self.x_bar();
        IntVec::new((0..self.n).map(|i| self.u[i].min(xbar[i] + self.gamma)).collect())
    }

    /// Check every invariant; an empty list means the instance is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.n < 2 {
            out.push(Violation::new(
                "station-count",
                None,
                format!("n = {} but at least 2 stations are required", self.n),
            ));
        }
        for (name, v) in [
            ("ell", &self.ell),
            ("u", &self.u),
            ("dbar", &self.dbar),
            ("bbar", &self.bbar),
        ] {
            if v.len() != self.n {
                out.push(Violation::new(
                    "length-mismatch",
                    None,
                    format!("{name} has length {} but n = {}", v.len(), self.n),
                ));
            }
        }
        if self.costs.len() != self.n {
            out.push(Violation::new(
                "length-mismatch",
                None,
                format!("costs has length {} but n = {}", self.costs.len(), self.n),
            ));
        }
        if !out.is_empty() {
            // Per-station checks below index by n; stop early on shape errors.
            return out;
        }
        if self.d_total < 0 || self.b_total < 0 || self.gamma < 0 {
            out.push(Violation::new(
                "negative-parameter",
                None,
                format!(
                    "D = {}, B = {}, gamma = {} must all be nonnegative",
                    self.d_total, self.b_total, self.gamma
                ),
            ));
        }

        for i in 0..self.n {
            if self.dbar[i] < 0 || self.bbar[i] < 0 {
                out.push(Violation::new(
                    "negative-allocation",
                    Some(i),
                    format!("dbar = {}, bbar = {}", self.dbar[i], self.bbar[i]),
                ));
            }
            let x = self.dbar[i] + self.bbar[i];
            if !(self.ell[i] <= x && x <= self.u[i]) {
                out.push(Violation::new(
                    "box-bounds",
                    Some(i),
                    format!(
                        "dbar + bbar = {} outside [{}, {}]",
                        x, self.ell[i], self.u[i]
                    ),
                ));
            }
            if self.ell[i] < 0 {
                out.push(Violation::new(
                    "negative-parameter",
                    Some(i),
                    format!("ell = {} must be nonnegative", self.ell[i]),
                ));
            }
        }

        let current_total: i128 = (0..self.n)
            .map(|i| self.dbar[i] as i128 + self.bbar[i] as i128)
            .sum();
        if current_total != self.d_total as i128 + self.b_total as i128 {
            out.push(Violation::new(
                "total-capacity",
                None,
                format!(
                    "dbar(N) + bbar(N) = {} but D + B = {}",
                    current_total,
                    self.d_total as i128 + self.b_total as i128
                ),
            ));
        }
        let bikes: i128 = self.bbar.iter().map(|&b| b as i128).sum();
        if bikes > self.b_total as i128 {
            out.push(Violation::new(
                "bike-budget",
                None,
                format!("bbar(N) = {} exceeds B = {}", bikes, self.b_total),
            ));
        }

        let mut magnitude_total: i128 = 0;
        for (i, c) in self.costs.iter().enumerate() {
            if let Some(max_d) = c.max_d() {
                if max_d < self.u[i] || c.max_b().unwrap_or(-1) < self.u[i] {
                    out.push(Violation::new(
                        "cost-domain",
                        Some(i),
                        format!(
                            "table covers d ≤ {}, b ≤ {} but u = {}",
                            max_d,
                            c.max_b().unwrap_or(-1),
                            self.u[i]
                        ),
                    ));
                    continue;
                }
            }
            match c {
                StationCost::QuadUvw { u, v, w } => {
                    if u[0] < 0 || v[0] < 0 || w[0] < 0 {
                        out.push(Violation::new(
                            "quad-coefficient",
                            Some(i),
                            format!(
                                "leading coefficients ({}, {}, {}) must be nonnegative",
                                u[0], v[0], w[0]
                            ),
                        ));
                        continue;
                    }
                }
                StationCost::Table { .. } => {
                    let span_d = c.max_d().unwrap();
                    let span_b = c.max_b().unwrap();
                    if let MultimodularCheck::Violation { ineq, eta, zeta } =
                        check_multimodular(c, span_d, span_b)
                    {
                        out.push(Violation::new(
                            "multimodularity",
                            Some(i),
                            format!("inequality {ineq} fails at (d, b) = ({eta}, {zeta})"),
                        ));
                        continue;
                    }
                }
            }
            match c.magnitude_bound(self.u[i].max(0)) {
                Some(m) => magnitude_total += m as i128,
                None => {
                    out.push(Violation::new(
                        "overflow",
                        Some(i),
                        "cost magnitude bound exceeds i64".to_string(),
                    ));
                }
            }
        }
        // Leave headroom so any difference of partial sums the solvers
        // and checkers form (at most 4 full objective values) is safe.
        if magnitude_total > i64::MAX as i128 / 4 {
            out.push(Violation::new(
                "overflow",
                None,
                format!("total cost magnitude bound {magnitude_total} exceeds i64::MAX/4"),
            ));
        }
        out
    }
}
