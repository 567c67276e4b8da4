//! The derivation algebra Der(g) as the kernel of a linear operator.
//!
//! A matrix D is a derivation iff D[x,y] = [Dx,y] + [x,Dy] for all basis
//! pairs; flattening over (i < j, l) gives a (n * n(n-1)/2) x n^2 linear
//! system whose kernel is Der(g), extracted by SVD.

use nalgebra::DMatrix;

use crate::algebra::LieAlgebra;
use crate::linalg;
use crate::tol;

/// Orthonormal (Frobenius) basis of Der(g).
#[derive(Debug, Clone)]
pub struct DerivationSpace {
    pub basis: Vec<DMatrix<f64>>,
}

impl DerivationSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Frobenius-orthogonal projection of `m` onto span(basis).
    pub fn project(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(m.nrows(), m.ncols());
        for d in &self.basis {
            let coeff = m.dot(d);
            out += d * coeff;
        }
        out
    }
}

/// Leibniz residual max_{i<j} |D[e_i,e_j] - [De_i,e_j] - [e_i,De_j]|_inf.
pub fn derivation_residual(alg: &LieAlgebra, d: &DMatrix<f64>) -> f64 {
    let n = alg.dim();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            for l in 0..n {
                // (D [e_i,e_j])_l - ([De_i, e_j])_l - ([e_i, De_j])_l
                let mut s = 0.0;
                for m in 0..n {
                    s += alg.c(m, i, j) * d[(l, m)];
                    s -= d[(m, i)] * alg.c(l, m, j);
                    s -= d[(m, j)] * alg.c(l, i, m);
                }
                worst = worst.max(s.abs());
            }
        }
    }
    worst
}

/// Compute Der(g) as the null space of the Leibniz constraint operator,
/// with Gram eigenvalues under `tol::RANK` (relative) treated as zero.
pub fn derivation_space(alg: &LieAlgebra) -> DerivationSpace {
    let n = alg.dim();
    let ncols = n * n;
    let nrows = (n * n * (n - 1)) / 2;
    let mut a = DMatrix::<f64>::zeros(nrows, ncols);
    let mut r = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            for l in 0..n {
                // coefficient of D_{l m}: +C^m_{ij}; of D_{m i}: -C^l_{mj}; of D_{m j}: -C^l_{im}
                for m in 0..n {
                    a[(r, l * n + m)] += alg.c(m, i, j);
                    a[(r, m * n + i)] -= alg.c(l, m, j);
                    a[(r, m * n + j)] -= alg.c(l, i, m);
                }
                r += 1;
            }
        }
    }
    let nulls = linalg::gram_nullspace(&a, tol::RANK);
    let mut basis = Vec::with_capacity(nulls.len());
    for v in nulls {
        let mut d = DMatrix::zeros(n, n);
        for p in 0..n {
            for q in 0..n {
                d[(p, q)] = v[p * n + q];
            }
        }
        basis.push(d);
    }
    DerivationSpace { basis }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::catalog;
    use nalgebra::DVector;

    #[test]
    fn dimensions_match_structure_theory() {
        let cases = [
            ("abelian", Some(3.0), 9),
            ("heisenberg3", None, 6),
            ("nil4", None, 7),
            ("su2", None, 3),
            ("sl2r", None, 3),
            ("hyperbolic", Some(3.0), 6),
        ];
        for (name, p, expect) in cases {
            let alg = catalog(name, p).unwrap();
            let der = derivation_space(&alg);
            assert_eq!(der.dim(), expect, "{name}");
            for d in &der.basis {
                assert!(derivation_residual(&alg, d) <= 1e-10, "{name}");
            }
        }
    }

    #[test]
    fn basis_is_frobenius_orthonormal() {
        let alg = catalog("nil4", None).unwrap();
        let der = derivation_space(&alg);
        for (a, da) in der.basis.iter().enumerate() {
            for (b, db) in der.basis.iter().enumerate() {
                let g = da.dot(db);
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((g - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn su2_derivations_are_antisymmetric() {
        let alg = catalog("su2", None).unwrap();
        let der = derivation_space(&alg);
        for d in &der.basis {
            assert!((d + d.transpose()).amax() < 1e-12);
        }
    }

    #[test]
    fn derivations_close_under_commutator() {
        // [D, D'] is again a derivation: its projection onto Der equals itself.
        for name in ["heisenberg3", "nil4", "su2", "hyperbolic"] {
            let alg = catalog(name, None).unwrap();
            let der = derivation_space(&alg);
            for a in 0..der.dim().min(4) {
                for b in 0..der.dim().min(4) {
                    let comm = &der.basis[a] * &der.basis[b] - &der.basis[b] * &der.basis[a];
                    let proj = der.project(&comm);
                    assert!((&comm - proj).amax() < 1e-8, "{name}");
                }
            }
        }
    }

    #[test]
    fn dimension_is_basis_change_invariant() {
        let alg = catalog("heisenberg3", None).unwrap();
        let m = nalgebra::DMatrix::from_row_slice(
            3,
            3,
            &[1.0, 0.4, -0.1, -0.2, 0.9, 0.3, 0.1, 0.2, 1.1],
        );
        let moved = alg.change_basis(&m).unwrap();
        assert_eq!(derivation_space(&moved).dim(), 6);
    }

    #[test]
    fn adjoints_are_derivations() {
        for name in ["su2", "sl2r", "nil4"] {
            let alg = catalog(name, None).unwrap();
            let n = alg.dim();
            for i in 0..n {
                let mut x = DVector::zeros(n);
                x[i] = 1.0;
                let ad = alg.adjoint(&x);
                assert!(derivation_residual(&alg, &ad) < 1e-12, "{name} ad_e{i}");
            }
        }
    }
}
