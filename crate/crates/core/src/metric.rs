//! Left-invariant metrics as frame changes.
//!
//! A metric on the algebra is g = s^T s for an invertible matrix s; the
//! columns of s^{-1} form a g-orthonormal frame. Pushing s^{-1} into the
//! structure constants reduces every curvature computation to the flat-metric
//! case, so all downstream formulas assume g = identity.

use nalgebra::{Cholesky, DMatrix};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::tol;

/// Frame-change representation of a metric: g = s^T s.
#[derive(Debug, Clone)]
pub struct MetricFrame {
    s: DMatrix<f64>,
}

impl MetricFrame {
    /// The identity (round) metric.
    pub fn identity(n: usize) -> Self {
        MetricFrame {
            s: DMatrix::identity(n, n),
        }
    }

    /// From an explicit frame matrix; rejects near-singular s.
    pub fn from_frame(s: DMatrix<f64>) -> Result<Self> {
        if s.nrows() != s.ncols() || s.determinant().abs() <= tol::SINGULAR {
            return Err(Error::BadMetric);
        }
        Ok(MetricFrame { s })
    }

    /// From a symmetric positive-definite metric matrix, via Cholesky
    /// g = L L^T with s = L^T.
    pub fn from_metric(g: &DMatrix<f64>) -> Result<Self> {
        if g.nrows() != g.ncols() || (g - g.transpose()).amax() > 1e-12 * g.amax().max(1.0) {
            return Err(Error::BadMetric);
        }
        let chol = Cholesky::new(g.clone()).ok_or(Error::BadMetric)?;
        Ok(MetricFrame {
            s: chol.l().transpose(),
        })
    }

    /// The frame matrix s.
    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }

    /// The metric matrix g = s^T s.
    pub fn g(&self) -> DMatrix<f64> {
        self.s.transpose() * &self.s
    }

    /// Transport the algebra to the g-orthonormal frame: change_basis(alg, s^{-1}).
    /// Curvature of (alg, g) equals curvature of the result with the flat metric.
    pub fn orthonormalize(&self, alg: &LieAlgebra) -> Result<LieAlgebra> {
        let sinv = self.s.clone().try_inverse().ok_or(Error::BadMetric)?;
        alg.change_basis(&sinv)
    }
}

/// Orthonormalize with respect to an explicit SPD metric matrix.
pub fn orthonormal_constants(alg: &LieAlgebra, g: &DMatrix<f64>) -> Result<LieAlgebra> {
    MetricFrame::from_metric(g)?.orthonormalize(alg)
}

/// Project a symmetric matrix to the SPD cone by clipping eigenvalues at `floor`.
pub fn spd_project(a: &DMatrix<f64>, floor: f64) -> DMatrix<f64> {
    let sym = 0.5 * (a + a.transpose());
    let eig = sym.symmetric_eigen();
    let clipped = eig.eigenvalues.map(|l| l.max(floor));
    &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose()
}

/// I + amp * (random symmetric), SPD-projected — the standard perturbed start
/// for flows and searches. Entries are standard normal draws in row-major
/// order (i, j) with i <= j mirrored, so the result is seed-deterministic.
pub fn perturbed_identity<R: Rng>(n: usize, amp: f64, rng: &mut R) -> DMatrix<f64> {
    let mut sym = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let x: f64 = StandardNormal.sample(rng);
            sym[(i, j)] = x;
        }
    }
    let sym = 0.5 * (&sym + sym.transpose());
    spd_project(&(DMatrix::identity(n, n) + amp * sym), 1e-6)
}

/// Unit-determinant upper-triangular metric parametrization used by the
/// searches: n(n+1)/2 real parameters, diagonal entries exp(x) to stay
/// positive, then g = U^T U normalized to det g = 1.
#[derive(Debug, Clone)]
pub struct TriangularParams {
    pub n: usize,
}

impl TriangularParams {
    pub fn new(n: usize) -> Self {
        TriangularParams { n }
    }

    pub fn count(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    /// Map parameters to the unit-determinant frame U (upper triangular).
    pub fn frame(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        assert_eq!(x.len(), self.count());
        let mut u = DMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            u[(i, i)] = x[k].exp();
            k += 1;
            for j in (i + 1)..n {
                u[(i, j)] = x[k];
                k += 1;
            }
        }
        // det g = (prod U_ii)^2; divide U by the 2n-th root for det g = 1.
        let logdet: f64 = (0..n).map(|i| u[(i, i)].ln()).sum();
        let scale = (-logdet / n as f64).exp();
        u * scale
    }

    /// The metric g = U^T U for the given parameters (det g = 1).
    pub fn metric(&self, x: &[f64]) -> MetricFrame {
        MetricFrame { s: self.frame(x) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::catalog;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_metric_is_a_no_op() {
        let h = catalog("heisenberg3", None).unwrap();
        let m = MetricFrame::identity(3);
        assert!(m.orthonormalize(&h).unwrap().max_diff(&h) == 0.0);
    }

    #[test]
    fn diagonal_metric_rescales_heisenberg_bracket() {
        // g = diag(1, 1, c^2) lengthens the center direction: the orthonormal
        // frame has f_3 = e_3 / c, so [f_1, f_2] = e_3 = c f_3.
        let h = catalog("heisenberg3", None).unwrap();
        let c = 2.5;
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, c]));
        let m = MetricFrame::from_frame(s).unwrap();
        let moved = m.orthonormalize(&h).unwrap();
        assert_abs_diff_eq!(moved.c(2, 0, 1), c, epsilon = 1e-14);
    }

    #[test]
    fn squashed_sphere_constants() {
        // frame s = diag(1, 1, t^{-1/2}) on su2 gives the Berger-type constants
        // C^1_23 = C^2_31 = sqrt(t), C^3_12 = 1/sqrt(t)
        let su2 = catalog("su2", None).unwrap();
        let t = 4.0_f64;
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, t.powf(-0.5)]));
        let m = MetricFrame::from_frame(s).unwrap();
        let moved = m.orthonormalize(&su2).unwrap();
        assert_abs_diff_eq!(moved.c(0, 1, 2), t.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(moved.c(1, 2, 0), t.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(moved.c(2, 0, 1), 1.0 / t.sqrt(), epsilon = 1e-14);
        assert!(moved.validate().ok);
    }

    #[test]
    fn from_metric_round_trips() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0]);
        let m = MetricFrame::from_metric(&g).unwrap();
        assert!((m.g() - &g).amax() < 1e-12);
    }

    #[test]
    fn bad_metrics_are_rejected() {
        let not_spd = DMatrix::from_row_slice(2, 2, &[1.0, 3.0, 3.0, 1.0]);
        assert!(MetricFrame::from_metric(&not_spd).is_err());
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(MetricFrame::from_frame(singular).is_err());
    }

    #[test]
    fn spd_projection_clips_negative_eigenvalues() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let p = spd_project(&a, 1e-6);
        let eig = p.symmetric_eigen();
        assert!(eig.eigenvalues.min() >= 1e-7);
    }

    #[test]
    fn triangular_params_have_unit_determinant() {
        let tp = TriangularParams::new(4);
        let x: Vec<f64> = (0..tp.count())
            .map(|i| 0.3 * (i as f64 * 0.9).sin())
            .collect();
        let g = tp.metric(&x).g();
        assert_abs_diff_eq!(g.determinant(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn perturbed_identity_is_spd_and_deterministic() {
        use rand::SeedableRng;
        let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let a = perturbed_identity(3, 0.3, &mut r1);
        let b = perturbed_identity(3, 0.3, &mut r2);
        assert_eq!(a, b);
        assert!(Cholesky::new(a).is_some());
    }
}
