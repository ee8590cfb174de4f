//! Integer vectors indexed by station, with the handful of lattice
//! operations the solvers need (L1 distance, signed supports, unit
//! exchanges).

use std::fmt;
use std::ops::Index;

/// A fixed-length integer vector.  The length is the station count `n`
/// of whatever instance or oracle it belongs to; operations that combine
/// two vectors panic on length mismatch.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntVec {
    data: Vec<i64>,
}

impl IntVec {
    pub fn new(data: Vec<i64>) -> Self {
        IntVec { data }
    }

    pub fn zeros(n: usize) -> Self {
        IntVec { data: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.data
    }

    pub fn to_vec(&self) -> Vec<i64> {
        self.data.clone()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, i64> {
        self.data.iter()
    }

    pub fn get(&self, i: usize) -> i64 {
        self.data[i]
    }

    pub fn set(&mut self, i: usize, v: i64) {
        self.data[i] = v;
    }

    /// Sum of all components (written x(N) in the solver modules).
    pub fn total(&self) -> i64 {
        self.data.iter().sum()
    }

    /// L1 distance to `other`.
    pub fn l1_dist(&self, other: &IntVec) -> i64 {
        assert_eq!(self.len(), other.len(), "length mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// Indices where self(i) > other(i).
    pub fn supp_plus(&self, other: &IntVec) -> Vec<usize> {
        assert_eq!(self.len(), other.len(), "length mismatch");
        (0..self.len()).filter(|&i| self.data[i] > other.data[i]).collect()
    }

    /// Indices where self(i) < other(i).
    pub fn supp_minus(&self, other: &IntVec) -> Vec<usize> {
        assert_eq!(self.len(), other.len(), "length mismatch");
        (0..self.len()).filter(|&i| self.data[i] < other.data[i]).collect()
    }

    /// The vector self + step·χ_i − step·χ_j.
    pub fn exchanged(&self, i: usize, j: usize, step: i64) -> IntVec {
        let mut v = self.clone();
        v.data[i] += step;
        v.data[j] -= step;
        v
    }

    /// The vector self + step·χ_i.
    pub fn bumped(&self, i: usize, step: i64) -> IntVec {
        let mut v = self.clone();
        v.data[i] += step;
        v
    }

    /// Componentwise lower ≤ self ≤ upper.
    pub fn within_box(&self, lower: &IntVec, upper: &IntVec) -> bool {
        self.data
            .iter()
            .enumerate()
            .all(|(i, &v)| lower.data[i] <= v && v <= upper.data[i])
    }
}

impl Index<usize> for IntVec {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.data[i]
    }
}

impl From<Vec<i64>> for IntVec {
    fn from(data: Vec<i64>) -> Self {
        IntVec { data }
    }
}

impl From<&[i64]> for IntVec {
    fn from(data: &[i64]) -> Self {
        IntVec { data: data.to_vec() }
    }
}

impl fmt::Debug for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.data)
    }
}

impl fmt::Display for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, v) in self.data.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_and_supports() {
        let x = IntVec::new(vec![3, 0, 2]);
        let y = IntVec::new(vec![1, 1, 2]);
        assert_eq!(x.l1_dist(&y), 3);
        assert_eq!(x.supp_plus(&y), vec![0]);
        assert_eq!(x.supp_minus(&y), vec![1]);
    }

    #[test]
    fn exchange_moves_one_unit() {
        let x = IntVec::new(vec![2, 2]);
        let y = x.exchanged(0, 1, 1);
        assert_eq!(y.as_slice(), &[3, 1]);
        assert_eq!(x.l1_dist(&y), 2);
    }
}
