//! On-disk JSON shapes for instances and solutions, kept separate from
//! the in-memory solver types so the file format stays stable.

use drsolve_core::dock::{DaSolution, DrSolution};
use drsolve_core::mconvex::TraceStep;
use drsolve_core::{Allocation, Cost, Instance, IntVec, StationCost};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    #[serde(rename = "D")]
    pub d_total: i64,
    #[serde(rename = "B")]
    pub b_total: i64,
    pub gamma: i64,
    pub ell: Vec<i64>,
    pub u: Vec<i64>,
    pub dbar: Vec<i64>,
    pub bbar: Vec<i64>,
    pub costs: Vec<CostFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostFile {
    Table { values: Vec<Vec<Cost>> },
    QuadUvw { u: [Cost; 2], v: [Cost; 2], w: [Cost; 2] },
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> InstanceFile {
        InstanceFile {
            n: inst.n,
            d_total: inst.d_total,
            b_total: inst.b_total,
            gamma: inst.gamma,
            ell: inst.ell.to_vec(),
            u: inst.u.to_vec(),
            dbar: inst.dbar.to_vec(),
            bbar: inst.bbar.to_vec(),
            costs: inst
                .costs
                .iter()
                .map(|c| match c {
                    StationCost::Table { values } => CostFile::Table { values: values.clone() },
                    StationCost::QuadUvw { u, v, w } => CostFile::QuadUvw { u: *u, v: *v, w: *w },
                })
                .collect(),
        }
    }

    pub fn into_instance(self) -> Instance {
        Instance {
            n: self.n,
            d_total: self.d_total,
            b_total: self.b_total,
            gamma: self.gamma,
            ell: IntVec::new(self.ell),
            u: IntVec::new(self.u),
            dbar: IntVec::new(self.dbar),
            bbar: IntVec::new(self.bbar),
            costs: self
                .costs
                .into_iter()
                .map(|c| match c {
                    CostFile::Table { values } => StationCost::Table { values },
                    CostFile::QuadUvw { u, v, w } => StationCost::QuadUvw { u, v, w },
                })
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct SolutionFile {
    pub d: Vec<i64>,
    pub b: Vec<i64>,
    pub objective: Cost,
    pub iterations: usize,
    pub distance: i64,
    pub algorithm: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRow>>,
}

#[derive(Serialize, Deserialize)]
pub struct TraceRow {
    pub k: i64,
    pub x: Vec<i64>,
    pub objective: Cost,
    pub distance: i64,
}

fn rows(steps: &[TraceStep]) -> Vec<TraceRow> {
    steps
        .iter()
        .map(|s| TraceRow { k: s.k, x: s.x.to_vec(), objective: s.objective, distance: s.distance })
        .collect()
}

impl SolutionFile {
    pub fn from_dr(sol: &DrSolution, algorithm: &str, include_trace: bool) -> SolutionFile {
        SolutionFile {
            d: sol.allocation.d.to_vec(),
            b: sol.allocation.b.to_vec(),
            objective: sol.objective,
            iterations: sol.iterations,
            distance: sol.distance,
            algorithm: algorithm.to_string(),
            trace: match (&sol.trace, include_trace) {
                (Some(steps), true) => Some(rows(steps)),
                _ => None,
            },
        }
    }

    pub fn from_da(sol: &DaSolution, xbar: &IntVec, algorithm: &str) -> SolutionFile {
        SolutionFile {
            d: sol.allocation.d.to_vec(),
            b: sol.allocation.b.to_vec(),
            objective: sol.objective,
            iterations: sol.steps,
            distance: sol.allocation.x().l1_dist(xbar),
            algorithm: algorithm.to_string(),
            trace: None,
        }
    }

    pub fn from_brute(best: &Allocation, objective: Cost, xbar: &IntVec, algorithm: &str) -> SolutionFile {
        SolutionFile {
            d: best.d.to_vec(),
            b: best.b.to_vec(),
            objective,
            iterations: 0,
            distance: best.x().l1_dist(xbar),
            algorithm: algorithm.to_string(),
            trace: None,
        }
    }
}
