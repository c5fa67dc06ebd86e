//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use crate::error::{Error, Result};

/// Off-diagonal magnitude below which a sweep loop stops.
pub const SOLVER_TOLERANCE: f64 = 1e-10;
pub const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition {
    /// Ascending.
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

fn max_off_diagonal(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            m = m.max(a[i][j].abs());
        }
    }
    m
}

/// Eigenpairs of a symmetric matrix, sorted ascending.
///
/// Sweeps rotate every `(p, q)` pair in row order until all off-diagonal
/// entries are below `tolerance`. Ties keep the solver's column order.
pub fn eigen_symmetric(m: &[Vec<f64>], tolerance: f64) -> Result<EigenDecomposition> {
    let n = m.len();
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Malformed(format!("row {i} has {} entries, expected {n}", row.len())));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if (m[i][j] - m[j][i]).abs() > tolerance {
                return Err(Error::Asymmetric { row: i, col: j });
            }
        }
    }

    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut sweeps = 0;
    while max_off_diagonal(&a) >= tolerance {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NonConvergence { sweeps, max_off_diagonal: max_off_diagonal(&a) });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[p][p], a[q][q]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k != p && k != q {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = c * akp - s * akq;
                        a[p][k] = a[k][p];
                        a[k][q] = s * akp + c * akq;
                        a[q][k] = a[k][q];
                    }
                }
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&k| (0..n).map(|i| v[i][k]).collect()).collect();
    Ok(EigenDecomposition { values, vectors, sweeps })
}

/// `‖Mv − λv‖∞` over all pairs.
pub fn max_residual(m: &[Vec<f64>], eig: &EigenDecomposition) -> f64 {
    let n = m.len();
    let mut worst: f64 = 0.0;
    for (lambda, vec) in eig.values.iter().zip(&eig.vectors) {
        for i in 0..n {
            let mv: f64 = (0..n).map(|j| m[i][j] * vec[j]).sum();
            worst = worst.max((mv - lambda * vec[i]).abs());
        }
    }
    worst
}

/// Largest deviation of the eigenvector Gram matrix from the identity.
pub fn orthonormality_defect(eig: &EigenDecomposition) -> f64 {
    let k = eig.vectors.len();
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let dot: f64 = eig.vectors[i].iter().zip(&eig.vectors[j]).map(|(x, y)| x * y).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_by_two_laplacian() {
        let e = eigen_symmetric(&[vec![1.0, -1.0], vec![-1.0, 1.0]], SOLVER_TOLERANCE).unwrap();
        assert!((e.values[0] - 0.0).abs() < 1e-12);
        assert!((e.values[1] - 2.0).abs() < 1e-12);
        assert!(max_residual(&[vec![1.0, -1.0], vec![-1.0, 1.0]], &e) < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let e = eigen_symmetric(&[vec![0.0, 0.0], vec![0.0, 0.0]], SOLVER_TOLERANCE).unwrap();
        assert_eq!(e.values, vec![0.0, 0.0]);
        assert_eq!(e.sweeps, 0);
    }

    #[test]
    fn complete_graph_k3() {
        let l = vec![vec![2.0, -1.0, -1.0], vec![-1.0, 2.0, -1.0], vec![-1.0, -1.0, 2.0]];
        let e = eigen_symmetric(&l, SOLVER_TOLERANCE).unwrap();
        for (got, want) in e.values.iter().zip([0.0, 3.0, 3.0]) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
        assert!(max_residual(&l, &e) < 1e-9);
        assert!(orthonormality_defect(&e) < 1e-9);
    }

    #[test]
    fn empty_and_single() {
        assert!(eigen_symmetric(&[], SOLVER_TOLERANCE).unwrap().values.is_empty());
        let e = eigen_symmetric(&[vec![5.0]], SOLVER_TOLERANCE).unwrap();
        assert_eq!(e.values, vec![5.0]);
        assert_eq!(e.vectors, vec![vec![1.0]]);
    }

    #[test]
    fn asymmetric_rejected() {
        let r = eigen_symmetric(&[vec![0.0, 1.0], vec![0.0, 0.0]], SOLVER_TOLERANCE);
        assert!(matches!(r, Err(Error::Asymmetric { row: 0, col: 1 })));
    }

    #[test]
    fn path_graph_matches_closed_form() {
        // Path on n vertices: λ_k = 2 − 2cos(kπ/n).
        let n = 6;
        let mut l = vec![vec![0.0; n]; n];
        for i in 0..n - 1 {
            l[i][i + 1] = -1.0;
            l[i + 1][i] = -1.0;
            l[i][i] += 1.0;
            l[i + 1][i + 1] += 1.0;
        }
        let e = eigen_symmetric(&l, SOLVER_TOLERANCE).unwrap();
        for (k, got) in e.values.iter().enumerate() {
            let want = 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / n as f64).cos();
            assert!((got - want).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn random_symmetric_matrices(n in 1usize..7, seed in proptest::collection::vec(-5i32..=5, 49)) {
            let mut m = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in i..n {
                    let x = seed[i * 7 + j] as f64;
                    m[i][j] = x;
                    m[j][i] = x;
                }
            }
            let e = eigen_symmetric(&m, SOLVER_TOLERANCE).unwrap();
            prop_assert!(max_residual(&m, &e) < 1e-9);
            prop_assert!(orthonormality_defect(&e) < 1e-9);
            prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            let trace: f64 = (0..n).map(|i| m[i][i]).sum();
            prop_assert!((e.values.iter().sum::<f64>() - trace).abs() < 1e-9);
            let frob: f64 = m.iter().flatten().map(|x| x * x).sum();
            prop_assert!((e.values.iter().map(|x| x * x).sum::<f64>() - frob).abs() < 1e-8);
        }
    }
}
