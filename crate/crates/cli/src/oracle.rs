//! Brute-force Cantor–Bendixson derivatives on explicit models, independent
//! of the symbolic end-space code.
//!
//! The space `ω^α·d + 1` is modelled on addresses `(c, i_1, …, i_k)` with
//! `c < d`, `k ≤ α` and `1 ≤ i_j ≤ n`. The address `x` is the limit of its
//! one-step extensions `x·i` as `i → ∞`, with basic neighbourhoods
//! `U_m(x) = {x} ∪ {y extending x : y[|x|] ≥ m}`. Truncating the branching
//! at `n` is exact as long as only neighbourhoods with `m < n` are probed.

use std::collections::BTreeSet;

pub type Address = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestedModel {
    pub points: BTreeSet<Address>,
    /// Largest neighbourhood index probed.
    pub probe: u32,
}

impl NestedModel {
    pub fn new(alpha: u32, d: u32, probe: u32) -> Self {
        let n = probe + 2;
        let mut points = BTreeSet::new();
        let mut level: Vec<Address> = (0..d).map(|c| vec![c]).collect();
        for _ in 0..alpha {
            let next: Vec<Address> = level
                .iter()
                .flat_map(|x| (1..=n).map(move |i| [x.as_slice(), &[i]].concat()))
                .collect();
            points.extend(level);
            level = next;
        }
        points.extend(level);
        Self { points, probe }
    }

    /// `x` is an accumulation point of `set` when every probed basic
    /// neighbourhood meets `set` away from `x`.
    fn accumulates(&self, set: &BTreeSet<Address>, x: &Address) -> bool {
        (1..=self.probe).all(|m| {
            set.iter()
                .any(|y| y.len() > x.len() && y.starts_with(x) && y[x.len()] >= m)
        })
    }

    pub fn derivative(&self, set: &BTreeSet<Address>) -> BTreeSet<Address> {
        set.iter().filter(|x| self.accumulates(set, x)).cloned().collect()
    }

    /// Sizes of the successive derived sets, ending with the first empty one.
    pub fn profile(&self) -> Vec<usize> {
        let mut set = self.points.clone();
        let mut sizes = vec![set.len()];
        while !set.is_empty() {
            set = self.derivative(&set);
            sizes.push(set.len());
        }
        sizes
    }

    /// Rank and degree read off the profile: the last non-empty derived set
    /// has index `α` and `d` points.
    pub fn rank_degree(&self) -> (usize, usize) {
        let p = self.profile();
        let last = p.len() - 2;
        (last, p[last])
    }

    /// The `k`-th derived set.
    pub fn derived(&self, k: usize) -> BTreeSet<Address> {
        let mut set = self.points.clone();
        for _ in 0..k {
            set = self.derivative(&set);
        }
        set
    }
}

/// Whether the `k`-th derived set of the `(α, d)` model is the `(α − k, d)`
/// model up to deleting the deepest address level.
pub fn derived_matches_lower_model(alpha: u32, d: u32, probe: u32, k: u32) -> bool {
    let big = NestedModel::new(alpha, d, probe);
    let got = big.derived(k as usize);
    let expected: BTreeSet<Address> = big
        .points
        .iter()
        .filter(|x| x.len() <= (alpha - k) as usize + 1)
        .cloned()
        .collect();
    got == expected
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_models() {
        assert_eq!(NestedModel::new(0, 3, 3).profile(), vec![3, 0]);
        // One limit point with five isolated points around it.
        assert_eq!(NestedModel::new(1, 1, 3).profile(), vec![6, 1, 0]);
        assert_eq!(NestedModel::new(2, 2, 3).rank_degree(), (2, 2));
        assert!(derived_matches_lower_model(3, 2, 2, 1));
    }

    #[test]
    fn model_sizes() {
        // d·(1 + n + … + n^α) with n = probe + 2.
        assert_eq!(NestedModel::new(2, 3, 2).points.len(), 3 * (1 + 4 + 16));
        assert_eq!(NestedModel::new(0, 1, 5).points.len(), 1);
    }
}
