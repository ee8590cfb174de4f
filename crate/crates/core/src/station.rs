//! Per-station cost functions c_i(d, b) on nonnegative integer pairs,
//! and the multimodularity scan that instance validation runs on them.
//!
//! Multimodularity of every c_i is what makes the induced set function
//! f(x) = min{Σc_i(d_i, b_i) : d + b = x, b(N) ≤ B} M-convex, so the
//! whole solver stack is conditioned on this check.

use crate::cost::{Cost, ExtendedCost, Finite, Infinite};

/// A station cost function.  Domain is a subset of Z₊²; evaluation
/// outside the domain yields +∞.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StationCost {
    /// Explicit table: `values[d as usize][b as usize]`.  Domain is the
    /// rectangle [0, rows−1] × [0, cols−1].
    Table { values: Vec<Vec<Cost>> },
    /// u₂d² + u₁d + v₂b² + v₁b + w₂(d+b)² + w₁(d+b) with u₂,v₂,w₂ ≥ 0,
    /// stored leading-coefficient first.  Domain is all of Z₊².
    /// Convexity of the three univariate pieces makes this multimodular
    /// for any such coefficients.
    QuadUvw { u: [Cost; 2], v: [Cost; 2], w: [Cost; 2] },
}

impl StationCost {
    pub fn table(values: Vec<Vec<Cost>>) -> Self {
        StationCost::Table { values }
    }

    pub fn quad(u: [Cost; 2], v: [Cost; 2], w: [Cost; 2]) -> Self {
        StationCost::QuadUvw { u, v, w }
    }

    /// Largest d the domain covers, or None if unbounded.
    pub fn max_d(&self) -> Option<i64> {
        match self {
            StationCost::Table { values } => Some(values.len() as i64 - 1),
            StationCost::QuadUvw { .. } => None,
        }
    }

    /// Largest b the domain covers, or None if unbounded.
    pub fn max_b(&self) -> Option<i64> {
        match self {
            StationCost::Table { values } => {
                Some(values.first().map_or(-1, |row| row.len() as i64 - 1))
            }
            StationCost::QuadUvw { .. } => None,
        }
    }

    /// c(d, b), +∞ outside the domain (negative arguments or beyond the
    /// table bounds).
    pub fn eval(&self, d: i64, b: i64) -> ExtendedCost {
        if d < 0 || b < 0 {
            return Infinite;
        }
        match self {
            StationCost::Table { values } => match values
                .get(d as usize)
                .and_then(|row| row.get(b as usize))
            {
                Some(&v) => Finite(v),
                None => Infinite,
            },
            StationCost::QuadUvw { u, v, w } => {
                let s = d + b;
                let total = (u[0] as i128) * (d as i128) * (d as i128)
                    + (u[1] as i128) * (d as i128)
                    + (v[0] as i128) * (b as i128) * (b as i128)
                    + (v[1] as i128) * (b as i128)
                    + (w[0] as i128) * (s as i128) * (s as i128)
                    + (w[1] as i128) * (s as i128);
                Finite(i64::try_from(total).expect("cost evaluation overflowed i64"))
            }
        }
    }

    /// An upper bound on |c(d, b)| over [0, span]², evaluated widely
    /// enough that validation can reject instances whose sums could
    /// leave the i64 range.  Returns None when even the bound overflows.
    pub fn magnitude_bound(&self, span: i64) -> Option<i64> {
        match self {
            StationCost::Table { values } => values
                .iter()
                .flat_map(|row| row.iter())
                .map(|&v| v.abs())
                .max()
                .or(Some(0)),
            StationCost::QuadUvw { u, v, w } => {
                let s = span as i128;
                let bound = (u[0] as i128).abs() * s * s
                    + (u[1] as i128).abs() * s
                    + (v[0] as i128).abs() * s * s
                    + (v[1] as i128).abs() * s
                    + (w[0] as i128).abs() * (2 * s) * (2 * s)
                    + (w[1] as i128).abs() * (2 * s);
                i64::try_from(bound).ok()
            }
        }
    }
}

/// Result of a multimodularity scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MultimodularCheck {
    Pass,
    /// First failure in scan order: points visited lexicographically in
    /// (η, ζ), inequalities tried in index order 1..=3 at each point.
    Violation { ineq: u8, eta: i64, zeta: i64 },
}

/// Scan the three multimodularity inequalities of c over [0, max_d] ×
/// [0, max_b]:
///
///   1. c(η+1,ζ+1) − c(η+1,ζ) ≥ c(η,ζ+1) − c(η,ζ)
///   2. c(η−1,ζ+1) − c(η−1,ζ) ≥ c(η,ζ) − c(η,ζ−1)   (η,ζ ≥ 1)
///   3. c(η+1,ζ−1) − c(η,ζ−1) ≥ c(η,ζ) − c(η−1,ζ)   (η,ζ ≥ 1)
///
/// Each inequality is checked wherever all four of its points fall in
/// the scan rectangle.  The cost's domain must cover the rectangle.
pub fn check_multimodular(cost: &StationCost, max_d: i64, max_b: i64) -> MultimodularCheck {
    if let Some(td) = cost.max_d() {
        assert!(max_d <= td, "scan range exceeds table depth");
    }
    if let Some(tb) = cost.max_b() {
        assert!(max_b <= tb, "scan range exceeds table width");
    }
    let c = |d: i64, b: i64| -> i128 {
        cost.eval(d, b).expect_finite("multimodularity scan point") as i128
    };
    for eta in 0..=max_d {
        for zeta in 0..=max_b {
            if eta + 1 <= max_d
                && zeta + 1 <= max_b
                && c(eta + 1, zeta + 1) - c(eta + 1, zeta) < c(eta, zeta + 1) - c(eta, zeta)
            {
                return MultimodularCheck::Violation { ineq: 1, eta, zeta };
            }
            if eta >= 1
                && zeta >= 1
                && zeta + 1 <= max_b
                && c(eta - 1, zeta + 1) - c(eta - 1, zeta) < c(eta, zeta) - c(eta, zeta - 1)
            {
                return MultimodularCheck::Violation { ineq: 2, eta, zeta };
            }
            if eta >= 1
                && zeta >= 1
                && eta + 1 <= max_d
                && c(eta + 1, zeta - 1) - c(eta, zeta - 1) < c(eta, zeta) - c(eta - 1, zeta)
            {
                return MultimodularCheck::Violation { ineq: 3, eta, zeta };
            }
        }
    }
    MultimodularCheck::Pass
}
