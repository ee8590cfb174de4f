//! Cost values: finite 64-bit integers plus an absorbing +∞ used for
//! infeasible points, and the lexicographic two-level cost that realizes
//! "minimize f, break ties by distance" (and the reverse) exactly.

use std::cmp::Ordering;
use std::fmt;

/// A finite cost.  Instance validation bounds the magnitudes so that any
/// sum the solvers form stays inside `i64`; see `Instance::validate`.
pub type Cost = i64;

/// A cost extended with +∞.  +∞ absorbs addition and compares above
/// every finite value.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtendedCost {
    Finite(Cost),
    Infinite,
}

pub use ExtendedCost::{Finite, Infinite};

impl ExtendedCost {
    pub fn is_finite(&self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn finite(&self) -> Option<Cost> {
        match self {
            Finite(v) => Some(*v),
            Infinite => None,
        }
    }

    /// Finite value, panicking on +∞.  For call sites where feasibility
    /// was already established.
    pub fn expect_finite(&self, what: &str) -> Cost {
        match self {
            Finite(v) => *v,
            Infinite => panic!("expected finite cost: {what}"),
        }
    }

    /// Addition with absorbing +∞.  Overflow of finite values panics:
    /// validated instances cannot reach it, so wrapping silently would
    /// only hide a bug.
    pub fn add(self, other: ExtendedCost) -> ExtendedCost {
        match (self, other) {
            (Finite(a), Finite(b)) => {
                Finite(a.checked_add(b).expect("cost addition overflowed i64"))
            }
            _ => Infinite,
        }
    }

    /// `self − other` for finite `other`; +∞ stays +∞.
    pub fn sub_finite(self, other: Cost) -> ExtendedCost {
        match self {
            Finite(a) => Finite(a.checked_sub(other).expect("cost subtraction overflowed i64")),
            Infinite => Infinite,
        }
    }
}

impl PartialOrd for ExtendedCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedCost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinite) => Ordering::Less,
            (Infinite, Finite(_)) => Ordering::Greater,
            (Infinite, Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Debug for ExtendedCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(v) => write!(f, "{v}"),
            Infinite => write!(f, "+inf"),
        }
    }
}

impl fmt::Display for ExtendedCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Two-level cost ordered lexicographically: primary first, then
/// secondary.  With primary = f(x) and secondary = ‖x − center‖₁ this is
/// the exact limit of minimizing f + ε‖·‖₁ as ε → 0⁺; with the roles
/// swapped it is the limit of minimizing Υ‖·‖₁ + f as Υ → ∞.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexCost {
    pub primary: ExtendedCost,
    pub secondary: i64,
}

impl LexCost {
    pub fn new(primary: ExtendedCost, secondary: i64) -> Self {
        LexCost { primary, secondary }
    }

    /// The key of an infeasible point: worse than any feasible key.
    pub fn infinite() -> Self {
        LexCost { primary: Infinite, secondary: i64::MAX }
    }

    pub fn is_finite(&self) -> bool {
        self.primary.is_finite()
    }
}

impl fmt::Debug for LexCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {})", self.primary, self.secondary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_and_dominates() {
        assert_eq!(Finite(3).add(Finite(4)), Finite(7));
        assert_eq!(Finite(3).add(Infinite), Infinite);
        assert!(Finite(i64::MAX) < Infinite);
        assert!(Infinite <= Infinite);
    }

    #[test]
    fn lex_orders_primary_first() {
        let a = LexCost::new(Finite(1), 100);
        let b = LexCost::new(Finite(2), 0);
        let c = LexCost::new(Finite(1), 99);
        assert!(a < b);
        assert!(c < a);
        assert!(LexCost::infinite() > b);
    }
}
