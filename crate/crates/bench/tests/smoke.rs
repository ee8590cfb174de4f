//! The benchmark inputs must be solvable at every advertised size.

use drsolve_core::dock::solve_da_scaling;
use drsolve_core::gen;

#[test]
fn bench_instances_solve_quickly() {
    for total in [10_000i64, 100_000] {
        let inst = gen::large_instance(50, total, 7);
        let (sol, schedule) = solve_da_scaling(&inst);
        assert!(schedule.phases() >= 1);
        assert_eq!(sol.allocation.x().total(), total);
    }
}
