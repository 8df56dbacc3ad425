use std::collections::BTreeMap;

use ndarray::{ArrayD, IxDyn};

use super::{AntisymField, KyError};
use crate::expr::{Expr, Node, Vars};
use crate::geometry::ChartRole;
use crate::tensor::{self, levi_civita};

/// Tolerance on the antisymmetry defect accepted by the reconstruction maps.
const ANTISYMMETRY_TOL: f64 = 1e-12;

/// `f_{i1..i(n-1)} = eps_{k i1..i(n-1)} v_k` as a dense rank-`(n-1)` array.
fn epsilon_contract(v: &[f64]) -> ArrayD<f64> {
    let n = v.len();
    let mut out = tensor::zeros(n, n - 1);
    let mut full = vec![0; n];
    for idx in tensor::all_indices(n, n - 1) {
        full[1..].copy_from_slice(&idx);
        let mut acc = 0.0;
        for (k, vk) in v.iter().enumerate() {
            full[0] = k;
            let e = levi_civita(&full);
            if e != 0 {
                acc += f64::from(e) * vk;
            }
        }
        out[IxDyn(&idx)] = acc;
    }
    out
}

/// Flat-space Killing-Yano pair `(f, f~)` of rank `n - 1` built from a position
/// and a momentum, `f_{i1..i(n-1)} = eps_{k i1..i(n-1)} x_k` and likewise for `p`.
pub fn flat_ky_pair(n: usize, x: &[f64], p: &[f64]) -> Result<(ArrayD<f64>, ArrayD<f64>), KyError> {
    if n < 2 {
        return Err(KyError::UnsupportedRank { rank: 0, dim: n });
    }
    for v in [x, p] {
        if v.len() != n {
            return Err(KyError::Dimension {
                expected: n,
                got: v.len(),
            });
        }
    }
    Ok((epsilon_contract(x), epsilon_contract(p)))
}

/// `x_i = 1/(n-1)! eps_{i i1..i(n-1)} f_{i1..i(n-1)}`; for `n = 3` this is
/// `x_i = 1/2 eps_ijk f_jk`.
pub fn reconstruct_position(f: &ArrayD<f64>) -> Result<Vec<f64>, KyError> {
    let rank = f.ndim();
    let n = rank + 1;
    if f.shape().iter().any(|&s| s != n) {
        return Err(KyError::Dimension {
            expected: n,
            got: f.shape().first().copied().unwrap_or(0),
        });
    }
    let defect = tensor::antisymmetry_defect(f);
    if defect > ANTISYMMETRY_TOL {
        return Err(KyError::NotAntisymmetric { defect });
    }
    let mut full = vec![0; n];
    let mut out = vec![0.0; n];
    for (i, slot) in out.iter_mut().enumerate() {
        full[0] = i;
        let mut acc = 0.0;
        for idx in tensor::increasing_tuples(n, rank) {
            full[1..].copy_from_slice(&idx);
            let e = levi_civita(&full);
            // the full sum has rank! equal terms per increasing tuple, cancelling 1/(n-1)!
            if e != 0 {
                acc += f64::from(e) * f[IxDyn(&idx)];
            }
        }
        *slot = acc;
    }
    Ok(out)
}

/// Same map as [`reconstruct_position`], applied to `f~`.
pub fn reconstruct_momentum(f_tilde: &ArrayD<f64>) -> Result<Vec<f64>, KyError> {
    reconstruct_position(f_tilde)
}

/// The linear flat-space field `eps_{k i1..} x_k` (or `p_k` on the momentum chart).
pub fn flat_ky_field(n: usize, role: ChartRole) -> AntisymField {
    let rank = n - 1;
    let mut components = BTreeMap::new();
    for idx in tensor::increasing_tuples(n, rank) {
        let k = (0..n)
            .find(|k| !idx.contains(k))
            .expect("one index is missing");
        let mut full = vec![k];
        full.extend_from_slice(&idx);
        let node = match levi_civita(&full) {
            1 => Node::var(k),
            _ => -Node::var(k),
        };
        components.insert(idx, Expr::new(node, Vars::Coords(n)).expect("index < n"));
    }
    let label = match role {
        ChartRole::Position => "flat eps.x",
        ChartRole::Momentum => "flat eps.p",
    };
    AntisymField::new(n, rank, components)
        .expect("rank n - 1 is supported")
        .with_role(role)
        .with_label(label)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(a: &ArrayD<f64>, idx: &[usize]) -> f64 {
        a[IxDyn(idx)]
    }

    #[test]
    fn three_dimensional_pair() {
        let (f, _) = flat_ky_pair(3, &[0.0, 0.0, 1.0], &[0.0; 3]).unwrap();
        assert_eq!(at(&f, &[0, 1]), 1.0);
        assert_eq!(at(&f, &[1, 0]), -1.0);
        assert_eq!(tensor::max_abs(&f), 1.0);
        assert_eq!(f.iter().filter(|v| **v != 0.0).count(), 2);

        let (_, ft) = flat_ky_pair(3, &[0.0; 3], &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(at(&ft, &[0, 2]), -1.0);
        assert_eq!(at(&ft, &[2, 0]), 1.0);
        assert_eq!(ft.iter().filter(|v| **v != 0.0).count(), 2);
    }

    #[test]
    fn four_dimensional_pair_is_epsilon_slice() {
        let (f, _) = flat_ky_pair(4, &[1.0, 0.0, 0.0, 0.0], &[0.0; 4]).unwrap();
        for idx in tensor::all_indices(4, 3) {
            let mut full = vec![0];
            full.extend_from_slice(&idx);
            assert_eq!(at(&f, &idx), f64::from(levi_civita(&full)));
        }
    }

    #[test]
    fn reconstruction_round_trip() {
        let (f, _) = flat_ky_pair(3, &[0.0, 0.0, 1.0], &[0.0; 3]).unwrap();
        assert_eq!(reconstruct_position(&f).unwrap(), vec![0.0, 0.0, 1.0]);
        assert_eq!(
            reconstruct_position(&tensor::zeros(3, 2)).unwrap(),
            vec![0.0; 3]
        );
        let x = [2.0, -1.0, 0.5];
        let (f, ft) = flat_ky_pair(3, &x, &x).unwrap();
        for (a, b) in reconstruct_position(&f).unwrap().iter().zip(x) {
            assert!((a - b).abs() <= 1e-15);
        }
        assert_eq!(
            reconstruct_momentum(&ft).unwrap(),
            reconstruct_position(&f).unwrap()
        );
    }

    #[test]
    fn reconstruction_rejects_symmetric_input() {
        let mut f = tensor::zeros(3, 2);
        f[[0, 1].as_slice()] = 1.0;
        f[[1, 0].as_slice()] = 1.0;
        assert!(matches!(
            reconstruct_position(&f),
            Err(KyError::NotAntisymmetric { .. })
        ));
    }

    #[test]
    fn field_matches_pointwise_pair() {
        for n in 2..=6 {
            let f = flat_ky_field(n, ChartRole::Position);
            let x: Vec<f64> = (0..n).map(|i| 0.25 * i as f64 - 0.6).collect();
            let (pair, _) = flat_ky_pair(n, &x, &x).unwrap();
            assert_eq!(f.value_at(&x).unwrap(), pair, "n = {n}");
        }
    }

    #[test]
    fn dimension_errors() {
        assert!(flat_ky_pair(3, &[1.0, 2.0], &[0.0; 3]).is_err());
        assert!(flat_ky_pair(1, &[1.0], &[1.0]).is_err());
    }
}
