//! Index helpers shared by the geometry and Killing-Yano code.

use itertools::Itertools;
use ndarray::{ArrayD, Dimension, IxDyn};

/// Sign of the permutation `indices` of `0..n`, or 0 if any index repeats or
/// is out of range. `levi_civita(&[0, 1, .., n-1]) == 1`.
pub fn levi_civita(indices: &[usize]) -> i32 {
    let n = indices.len();
    let mut seen = vec![false; n];
    for &i in indices {
        if i >= n || seen[i] {
            return 0;
        }
        seen[i] = true;
    }
    let mut sign = 1;
    for a in 0..n {
        for b in (a + 1)..n {
            if indices[a] > indices[b] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Sign of the permutation that sorts `indices`, 0 on repeats.
pub fn sort_sign(indices: &[usize]) -> (i32, Vec<usize>) {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return (0, sorted);
    }
    let mut sign = 1;
    for a in 0..indices.len() {
        for b in (a + 1)..indices.len() {
            if indices[a] > indices[b] {
                sign = -sign;
            }
        }
    }
    (sign, sorted)
}

/// All strictly increasing index tuples of length `rank` from `0..n`.
pub fn increasing_tuples(n: usize, rank: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(rank).collect()
}

/// Every multi-index of a rank-`rank` array over `0..n`, in row-major order.
pub fn all_indices(n: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(rank as u32);
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; rank];
        for slot in idx.iter_mut().rev() {
            *slot = flat % n;
            flat /= n;
        }
        idx
    })
}

pub fn zeros(n: usize, rank: usize) -> ArrayD<f64> {
    ArrayD::zeros(IxDyn(&vec![n; rank]))
}

/// Largest absolute entry.
pub fn max_abs(a: &ArrayD<f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Largest `|a_I + a_J|` over all adjacent transpositions `J` of `I`.
pub fn antisymmetry_defect(a: &ArrayD<f64>) -> f64 {
    let rank = a.ndim();
    let mut worst: f64 = 0.0;
    for (idx, v) in a.indexed_iter() {
        let idx = idx.slice().to_vec();
        for k in 0..rank.saturating_sub(1) {
            let mut swapped = idx.clone();
            swapped.swap(k, k + 1);
            worst = worst.max((v + a[IxDyn(&swapped)]).abs());
        }
    }
    worst
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
