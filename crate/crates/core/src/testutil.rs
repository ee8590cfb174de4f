//! Shared fixtures for unit tests across modules.

use crate::instance::Instance;
use crate::station::StationCost;
use crate::vector::IntVec;

/// The reference 2-station instance: D=2, B=2, γ=1, ℓ=(0,0), u=(4,4),
/// d̄ = b̄ = (1,1), c₁ = (d−2)² + (b−2)², c₂ = d² + b² (tabulated on
/// [0,4]²).  Optimal objective 2 (e.g. x=(3,1)); with γ=0 it is 4.
pub fn two_station() -> Instance {
    let shifted = |sd: i64, sb: i64| -> StationCost {
        StationCost::table(
            (0..5)
                .map(|d: i64| (0..5).map(|b: i64| (d - sd).pow(2) + (b - sb).pow(2)).collect())
                .collect(),
        )
    };
    Instance {
        n: 2,
        d_total: 2,
        b_total: 2,
        gamma: 1,
        ell: IntVec::new(vec![0, 0]),
        u: IntVec::new(vec![4, 4]),
        dbar: IntVec::new(vec![1, 1]),
        bbar: IntVec::new(vec![1, 1]),
        costs: vec![shifted(2, 2), shifted(0, 0)],
    }
}
