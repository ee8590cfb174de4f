//! Seeded random instance generation.  Every generator is a pure
//! function of its parameters and seed, so corpora are reproducible
//! across runs, platforms, and the CLI/test boundary.

use crate::instance::Instance;
use crate::station::StationCost;
use crate::vector::IntVec;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostKind {
    /// Quadratic-plus-linear in d, b, and d + b, with nonnegative
    /// leading coefficients.
    Quad,
    /// Dense table built from convex separable pieces, exercising the
    /// tabulated code paths and domain edges.
    Table,
}

#[derive(Clone, Copy, Debug)]
pub struct GenParams {
    pub n: usize,
    /// Per-station capacity is drawn from [2, u_max].
    pub u_max: i64,
    /// Allowance γ is drawn from [0, gamma_max].
    pub gamma_max: i64,
    pub kind: CostKind,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { n: 3, u_max: 6, gamma_max: 4, kind: CostKind::Quad }
    }
}

fn quad_cost(rng: &mut ChaCha8Rng) -> StationCost {
    let mut pair = |lead: i64| [rng.gen_range(0..=lead), rng.gen_range(-5..=5)];
    StationCost::quad(pair(5), pair(5), pair(5))
}

/// Sample a convex integer sequence of the given length: an arbitrary
/// start and first slope, then nondecreasing slopes.
fn convex_seq(rng: &mut ChaCha8Rng, len: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(len);
    let mut value = rng.gen_range(-5..=5);
    let mut slope = rng.gen_range(-5..=2);
    for _ in 0..len {
        out.push(value);
        value += slope;
        slope += rng.gen_range(0..=3);
    }
    out
}

fn table_cost(rng: &mut ChaCha8Rng, cap: i64) -> StationCost {
    let side = cap as usize + 1;
    let ud = convex_seq(rng, side);
    let vb = convex_seq(rng, side);
    let ws = convex_seq(rng, 2 * cap as usize + 1);
    let values = (0..side)
        .map(|d| (0..side).map(|b| ud[d] + vb[b] + ws[d + b]).collect())
        .collect();
    StationCost::table(values)
}

/// Draw a valid instance.  The center allocation (d̄, b̄) is sampled
/// first and the totals derived from it, so every output is feasible
/// by construction.
pub fn random_instance(params: &GenParams, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.n;
    let u: Vec<i64> = (0..n).map(|_| rng.gen_range(2..=params.u_max.max(2))).collect();
    let ell: Vec<i64> = u.iter().map(|&ui| rng.gen_range(0..=ui.min(1))).collect();
    let xbar: Vec<i64> = u
        .iter()
        .zip(ell.iter())
        .map(|(&ui, &li)| rng.gen_range(li..=ui))
        .collect();
    let bbar: Vec<i64> = xbar.iter().map(|&xi| rng.gen_range(0..=xi)).collect();
    let dbar: Vec<i64> = xbar.iter().zip(bbar.iter()).map(|(x, b)| x - b).collect();
    let dbar_total: i64 = dbar.iter().sum();
    let bbar_total: i64 = bbar.iter().sum();
    let extra = rng.gen_range(0..=dbar_total.min(2));
    let b_total = bbar_total + extra;
    let d_total = dbar_total - extra;
    let gamma = rng.gen_range(0..=params.gamma_max.max(0));
    let costs = (0..n)
        .map(|i| match params.kind {
            CostKind::Quad => quad_cost(&mut rng),
            CostKind::Table => table_cost(&mut rng, u[i]),
        })
        .collect();
    let inst = Instance {
        n,
        d_total,
        b_total,
        gamma,
        ell: IntVec::new(ell),
        u: IntVec::new(u),
        dbar: IntVec::new(dbar),
        bbar: IntVec::new(bbar),
        costs,
    };
    debug_assert!(inst.validate().is_empty(), "{:?}", inst.validate());
    inst
}

/// Small mixed-shape instance for randomized check corpora: n ∈ {2, 3, 4},
/// capacities ≤ 6, γ ≤ 4, four quadratic draws for every tabulated one.
pub fn random_mixed(seed: u64) -> Instance {
    let mut pick = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let params = GenParams {
        n: pick.gen_range(2..=4),
        u_max: 6,
        gamma_max: 4,
        kind: if pick.gen_range(0..5) == 0 { CostKind::Table } else { CostKind::Quad },
    };
    random_instance(&params, seed)
}

/// Large quadratic instance for scaling benchmarks: capacity `total`
/// spread over n stations with scattered per-station optima.
pub fn large_instance(n: usize, total: i64, seed: u64) -> Instance {
    assert!(n > 0 && total >= n as i64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = (2 * total) / n as i64 + 2;
    let base = total / n as i64;
    let rem = (total % n as i64) as usize;
    let mut xbar: Vec<i64> = (0..n).map(|i| base + (i < rem) as i64).collect();
    // Random transfers to roughen the start while keeping the total.
    for _ in 0..4 * n {
        let from = rng.gen_range(0..n);
        let to = rng.gen_range(0..n);
        let amount = rng.gen_range(0..=base / 2);
        if from != to && xbar[from] - amount >= 0 && xbar[to] + amount <= cap {
            xbar[from] -= amount;
            xbar[to] += amount;
        }
    }
    let bbar: Vec<i64> = xbar.iter().map(|&x| x / 2).collect();
    let dbar: Vec<i64> = xbar.iter().zip(bbar.iter()).map(|(x, b)| x - b).collect();
    let b_total = total / 2;
    let d_total = total - b_total;
    assert!(bbar.iter().sum::<i64>() <= b_total);
    let costs = (0..n)
        .map(|_| {
            let mut quad = || [rng.gen_range(1..=5), rng.gen_range(-cap..=cap)];
            StationCost::quad(quad(), quad(), quad())
        })
        .collect();
    let inst = Instance {
        n,
        d_total,
        b_total,
        gamma: total,
        ell: IntVec::zeros(n),
        u: IntVec::new(vec![cap; n]),
        dbar: IntVec::new(dbar),
        bbar: IntVec::new(bbar),
        costs,
    };
    debug_assert!(inst.validate().is_empty(), "{:?}", inst.validate());
    inst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let params = GenParams::default();
        let a = random_instance(&params, 7);
        let b = random_instance(&params, 7);
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        let c = random_instance(&params, 8);
        assert_ne!(format!("{a:?}"), format!("{c:?}"));
    }

    #[test]
    fn all_generated_instances_validate() {
        for seed in 0..200 {
            let inst = random_mixed(seed);
            assert!(inst.validate().is_empty(), "seed {seed}: {:?}", inst.validate());
            assert!((2..=4).contains(&inst.n));
            assert!(inst.gamma <= 4);
            assert!(inst.u.iter().all(|&u| u <= 6));
        }
    }

    #[test]
    fn table_instances_validate() {
        let params = GenParams { kind: CostKind::Table, ..GenParams::default() };
        for seed in 0..50 {
            let inst = random_instance(&params, seed);
            assert!(inst.validate().is_empty(), "seed {seed}: {:?}", inst.validate());
        }
    }

    #[test]
    fn large_instance_validates() {
        let inst = large_instance(50, 10_000, 3);
        assert!(inst.validate().is_empty(), "{:?}", inst.validate());
        assert_eq!(inst.total(), 10_000);
        assert_eq!(inst.n, 50);
    }
}
