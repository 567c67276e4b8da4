//! Connection, Riemann, Ricci, and covariant derivatives for a left-invariant
//! metric in an orthonormal frame.
//!
//! All operations assume the metric is the identity in the given frame (use
//! [`crate::metric::MetricFrame::orthonormalize`] first otherwise). Sign
//! conventions are pinned by two anchors: heisenberg3 has Ricci
//! diag(-1/2, -1/2, 1/2) and hyperbolic(n) has Ricci -(n-1) I. The Ricci
//! tensor is produced two independent ways — through the Koszul connection
//! and through the closed form R = Rpart - K/2 - Z — and the two must agree.

use nalgebra::DMatrix;

use crate::algebra::LieAlgebra;

/// Human-readable statement of the conventions every report carries.
pub const SIGN_CONVENTION: &str = "brackets [e_i,e_j] = C^k_{ij} e_k in a g-orthonormal frame; \
connection Gamma^k_{ij} = <nabla_{e_i} e_j, e_k> = (C^k_{ij} - C^i_{jk} + C^j_{ki})/2; \
curvature R(X,Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_{[X,Y]}; \
Ricci(k,j) = sum_m R^m_{kmj}; anchors: heisenberg3 -> diag(-1/2,-1/2,1/2), hyperbolic(n) -> -(n-1)I; \
closed-form trace term Z_ij = (a_b C^i_{jb} + a_b C^j_{ib})/2 with a_b = C^a_{ab}";

/// Rank-3 array with uniform dimension n, indexed (a, b, c) row-major.
#[derive(Debug, Clone)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Tensor3 {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.n + b) * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.data[(a * self.n + b) * self.n + c] = v;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Rank-4 array with uniform dimension n, indexed (a, b, c, d) row-major.
#[derive(Debug, Clone)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Tensor4 {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[((a * self.n + b) * self.n + c) * self.n + d]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        self.data[((a * self.n + b) * self.n + c) * self.n + d] = v;
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

/// Koszul connection coefficients Gamma^k_{ij} = <nabla_{e_i} e_j, e_k>
/// = (C^k_{ij} - C^i_{jk} + C^j_{ki}) / 2.
pub fn connection(alg: &LieAlgebra) -> Tensor3 {
    let n = alg.dim();
    let mut g = Tensor3::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let v = 0.5 * (alg.c(k, i, j) - alg.c(i, j, k) + alg.c(j, k, i));
                g.set(k, i, j, v);
            }
        }
    }
    g
}

/// Riemann tensor R^l_{kij} with R(e_i, e_j) e_k = R^l_{kij} e_l:
/// R^l_{kij} = Gamma^l_{im} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{ik} - C^m_{ij} Gamma^l_{mk}.
pub fn riemann(alg: &LieAlgebra) -> Tensor4 {
    let gamma = connection(alg);
    riemann_from_connection(alg, &gamma)
}

fn riemann_from_connection(alg: &LieAlgebra, gamma: &Tensor3) -> Tensor4 {
    let n = alg.dim();
    let mut r = Tensor4::zeros(n);
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for m in 0..n {
                        s += gamma.get(l, i, m) * gamma.get(m, j, k)
                            - gamma.get(l, j, m) * gamma.get(m, i, k)
                            - alg.c(m, i, j) * gamma.get(l, m, k);
                    }
                    r.set(l, k, i, j, s);
                }
            }
        }
    }
    r
}

/// Ricci tensor as the trace of Riemann: Ric_{kj} = sum_m R^m_{kmj}.
pub fn ricci_from_connection(alg: &LieAlgebra) -> DMatrix<f64> {
    let n = alg.dim();
    let r = riemann(alg);
    let mut ric = DMatrix::zeros(n, n);
    for k in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for m in 0..n {
                s += r.get(m, k, m, j);
            }
            ric[(k, j)] = s;
        }
    }
    ric
}

/// Scalar curvature R = tr Ric (computed through the closed form).
pub fn scalar_curvature(alg: &LieAlgebra) -> f64 {
    ricci_closed_form(alg).ricci.trace()
}

/// Constituents of the closed-form Ricci R = r_part - killing_part/2 - z_part.
#[derive(Debug, Clone)]
pub struct ClosedFormRicci {
    pub ricci: DMatrix<f64>,
    /// Rpart_ij = (1/4) C^i_{ab} C^j_{ab} - (1/2) C^a_{bi} C^a_{bj}.
    pub r_part: DMatrix<f64>,
    /// The Killing form K_ij.
    pub killing_part: DMatrix<f64>,
    /// Trace term Z_ij = (a_b C^i_{jb} + a_b C^j_{ib}) / 2, a_b = C^a_{ab}.
    pub z_part: DMatrix<f64>,
}

/// Closed-form Ricci for an orthonormal frame; the independent cross-check of
/// [`ricci_from_connection`]. Zero z_part on unimodular inputs and zero
/// killing_part + z_part on nilpotent ones.
pub fn ricci_closed_form(alg: &LieAlgebra) -> ClosedFormRicci {
    let n = alg.dim();
    let r_part = nilpotent_ricci(alg);
    let killing_part = alg.killing_form();
    let a = alg.trace_vector();
    let mut z_part = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for b in 0..n {
                s += 0.5 * a[b] * (alg.c(i, j, b) + alg.c(j, i, b));
            }
            z_part[(i, j)] = s;
        }
    }
    let ricci = &r_part - 0.5 * &killing_part - &z_part;
    ClosedFormRicci {
        ricci,
        r_part,
        killing_part,
        z_part,
    }
}

/// The nilpotent part of the closed form (the full Ricci when the Killing
/// form and trace vector vanish): (1/4) C^i_{ab} C^j_{ab} - (1/2) C^a_{bi} C^a_{bj}.
/// This is the moment-map expression behind the soliton variational principle,
/// smooth in C without reference to Jacobi or nilpotency.
pub fn nilpotent_ricci(alg: &LieAlgebra) -> DMatrix<f64> {
    let n = alg.dim();
    let mut r = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s += 0.25 * alg.c(i, a, b) * alg.c(j, a, b)
                        - 0.5 * alg.c(a, b, i) * alg.c(a, b, j);
                }
            }
            r[(i, j)] = s;
        }
    }
    r
}

/// First covariant derivative S_{abc} = (nabla_a Ric)_{bc}. Frame components
/// of left-invariant tensors are constant, so only connection terms survive:
/// S_{abc} = -Gamma^d_{ab} Ric_{dc} - Gamma^d_{ac} Ric_{bd}.
pub fn covariant_derivative_ricci(alg: &LieAlgebra) -> Tensor3 {
    let n = alg.dim();
    let gamma = connection(alg);
    let ric = ricci_closed_form(alg).ricci;
    let mut s3 = Tensor3::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut s = 0.0;
                for d in 0..n {
                    s -= gamma.get(d, a, b) * ric[(d, c)] + gamma.get(d, a, c) * ric[(b, d)];
                }
                s3.set(a, b, c, s);
            }
        }
    }
    s3
}

/// Rough Laplacian (box) of the Ricci tensor: (box Ric)_{bc} = sum_a (nabla_a nabla_a Ric)_{bc},
/// where the second derivative acts on S_{abc} as a 3-tensor.
pub fn box_ricci(alg: &LieAlgebra) -> DMatrix<f64> {
    let n = alg.dim();
    let gamma = connection(alg);
    let s3 = covariant_derivative_ricci(alg);
    let mut out = DMatrix::zeros(n, n);
    for b in 0..n {
        for c in 0..n {
            let mut total = 0.0;
            // (nabla_e S)_{abc} at e = a, summed over a
            for a in 0..n {
                for f in 0..n {
                    total -= gamma.get(f, a, a) * s3.get(f, b, c)
                        + gamma.get(f, a, b) * s3.get(a, f, c)
                        + gamma.get(f, a, c) * s3.get(a, b, f);
                }
            }
            out[(b, c)] = total;
        }
    }
    out
}

/// Max first-Bianchi residual |R^l_{kij} + R^l_{ijk} + R^l_{jki}| over all indices.
pub fn first_bianchi_residual(alg: &LieAlgebra) -> f64 {
    let n = alg.dim();
    let r = riemann(alg);
    let mut worst = 0.0_f64;
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let s = r.get(l, k, i, j) + r.get(l, i, j, k) + r.get(l, j, k, i);
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

/// Max residual of the contracted second Bianchi identity sum_a (nabla_a Ric)_{ab} = 0
/// (the scalar curvature of a homogeneous space is constant).
pub fn contracted_second_bianchi_residual(alg: &LieAlgebra) -> f64 {
    let n = alg.dim();
    let s3 = covariant_derivative_ricci(alg);
    let mut worst = 0.0_f64;
    for b in 0..n {
        let mut s = 0.0;
        for a in 0..n {
            s += s3.get(a, a, b);
        }
        worst = worst.max(s.abs());
    }
    worst
}

/// Sectional curvature of the coordinate plane (e_i, e_j): K = R^i_{jij}.
pub fn sectional(alg: &LieAlgebra, i: usize, j: usize) -> f64 {
    riemann(alg).get(i, j, i, j)
}

/// Ricci tensor in the coordinate frame of a metric g over a fixed algebra:
/// Ric_coord = L * Ric_ortho * L^T with g = L L^T. Also returns the
/// orthonormalized constants (useful to flow and soliton callers).
pub fn ricci_in_coordinates(
    alg: &LieAlgebra,
    g: &DMatrix<f64>,
) -> crate::error::Result<(DMatrix<f64>, LieAlgebra)> {
    let chol = nalgebra::Cholesky::new(g.clone()).ok_or(crate::error::Error::BadMetric)?;
    let l = chol.l();
    let frame = crate::metric::MetricFrame::from_frame(l.transpose())?;
    let ortho = frame.orthonormalize(alg)?;
    let ric_hat = ricci_closed_form(&ortho).ricci;
    Ok((&l * ric_hat * l.transpose(), ortho))
}
