//! Small dense least-squares and null-space helpers.
//!
//! nalgebra's iterative SVD can return an inconsistent factorization on
//! rank-deficient input (for example a matrix with exactly proportional
//! columns), which silently corrupts pseudo-inverse solves and null-space
//! reads. The systems solved in this crate are small and well scaled, so
//! the normal equations with the symmetric eigendecomposition are the more
//! reliable tool; eigenvalues of AᵀA at or below `rel_tol · max(λ_max, 1)`
//! are treated as exact zeros.

use nalgebra::{DMatrix, DVector};

pub(crate) struct GramSolution {
    /// Minimum-norm least-squares solution.
    pub x: DVector<f64>,
    /// Orthonormal basis of the numerical null space, ordered by ascending
    /// Gram eigenvalue, each with its first significant entry positive.
    pub null: Vec<DVector<f64>>,
}

/// Minimum-norm least squares and null space of `a · x = b`.
pub(crate) fn gram_lstsq(a: &DMatrix<f64>, b: &DVector<f64>, rel_tol: f64) -> GramSolution {
    let gram = a.transpose() * a;
    let h = a.transpose() * b;
    let eig = gram.symmetric_eigen();
    let cut = rel_tol * eig.eigenvalues.amax().max(1.0);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&l, &r| eig.eigenvalues[l].total_cmp(&eig.eigenvalues[r]));
    let mut x = DVector::<f64>::zeros(a.ncols());
    let mut null = Vec::new();
    for &k in &order {
        let lambda = eig.eigenvalues[k];
        let v = eig.eigenvectors.column(k).clone_owned();
        if lambda <= cut {
            null.push(sign_fixed(v));
        } else {
            x += &v * (v.dot(&h) / lambda);
        }
    }
    GramSolution { x, null }
}

/// Orthonormal basis of the numerical null space of `a`.
pub(crate) fn gram_nullspace(a: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    gram_lstsq(a, &DVector::zeros(a.nrows()), rel_tol).null
}

fn sign_fixed(v: DVector<f64>) -> DVector<f64> {
    let amax = v.amax();
    for k in 0..v.len() {
        if v[k].abs() > 1e-6 * amax {
            return if v[k] < 0.0 { -v } else { v };
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportional_columns_are_handled_exactly() {
        // Column 2 = 3 × column 1: the null direction is (3, -1, 0)/sqrt(10)
        // and an exact solution exists. (This very shape defeats the
        // iterative SVD.)
        let c = [0.37, -0.05, -0.04, -0.19, -0.49, -0.046];
        let mut a = DMatrix::<f64>::zeros(6, 3);
        for (r, v) in c.iter().enumerate() {
            a[(r, 0)] = *v;
            a[(r, 1)] = 3.0 * v;
            a[(r, 2)] = if r % 3 == 0 { 1.0 } else { 0.0 };
        }
        let x_true = DVector::from_vec(vec![0.25, 0.25, -0.125]);
        let b = &a * &x_true;
        let sol = gram_lstsq(&a, &b, 1e-10);
        assert!((&a * &sol.x - &b).norm() <= 1e-12);
        assert_eq!(sol.null.len(), 1);
        let n = &sol.null[0];
        let expected = DVector::from_vec(vec![3.0, -1.0, 0.0]) / 10.0f64.sqrt();
        assert!((n - expected).norm() <= 1e-12);
    }

    #[test]
    fn full_rank_square_system_is_solved() {
        let a =
            DMatrix::<f64>::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let b = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let sol = gram_lstsq(&a, &b, 1e-12);
        assert!(sol.null.is_empty());
        assert!((&a * &sol.x - &b).norm() <= 1e-12);
    }

    #[test]
    fn zero_matrix_is_all_null() {
        let a = DMatrix::<f64>::zeros(4, 3);
        let nulls = gram_nullspace(&a, 1e-12);
        assert_eq!(nulls.len(), 3);
        for (i, u) in nulls.iter().enumerate() {
            assert!((u.norm() - 1.0).abs() <= 1e-14);
            for v in &nulls[i + 1..] {
                assert!(u.dot(v).abs() <= 1e-14);
            }
        }
    }
}
