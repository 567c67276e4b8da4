//! Lie algebras as structure constants in a chosen frame.
//!
//! An algebra is the dense array C^k_{ij} with [e_i, e_j] = C^k_{ij} e_k,
//! antisymmetric in (i, j) by construction. Everything downstream — curvature,
//! solitons, flow — is a function of this array, and changing the metric is
//! the same as moving C along its GL(n) orbit (see [`LieAlgebra::change_basis`]).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// One bracket relation [e_i, e_j] = c * e_k with 1-based indices and i < j.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

/// Jacobi-identity check result. `worst` is the 1-based (i, j, k, l) of the
/// largest component of J^l_{ijk} = sum_m (C^m_{ij}C^l_{km} + C^m_{jk}C^l_{im} + C^m_{ki}C^l_{jm}).
#[derive(Debug, Clone, Copy)]
pub struct JacobiReport {
    pub max_residual: f64,
    pub worst: (usize, usize, usize, usize),
    pub ok: bool,
}

/// Classification summary: trace vector, Killing form, and the standard
/// structure-theory predicates.
#[derive(Debug, Clone)]
pub struct AlgebraProfile {
    pub trace_vector: DVector<f64>,
    pub killing: DMatrix<f64>,
    pub unimodular: bool,
    /// Nilpotency class when the lower central series terminates.
    pub nilpotent: Option<usize>,
    /// Derived length when the derived series terminates.
    pub solvable: Option<usize>,
    pub semisimple: bool,
    pub lower_central_dims: Vec<usize>,
    pub derived_dims: Vec<usize>,
}

/// A finite-dimensional real Lie algebra given by structure constants.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    /// Dense C^k_{ij}, indexed [k][i][j], row-major.
    c: Vec<f64>,
}

impl LieAlgebra {
    /// The zero (abelian) algebra of the given dimension.
    pub fn zero(dim: usize) -> Self {
        LieAlgebra {
            dim,
            c: vec![0.0; dim * dim * dim],
        }
    }

    /// Build from bracket entries (1-based, i < j, no duplicate (i,j,k)).
    pub fn from_brackets(dim: usize, brackets: &[BracketEntry]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Schema("dim must be a positive integer".into()));
        }
        let mut alg = LieAlgebra::zero(dim);
        let mut seen = std::collections::HashSet::new();
        for b in brackets {
            let bad = |reason: &str| Error::BadBracket {
                i: b.i,
                j: b.j,
                k: b.k,
                reason: reason.into(),
            };
            if b.i < 1 || b.j < 1 || b.k < 1 || b.i > dim || b.j > dim || b.k > dim {
                return Err(bad(&format!("index out of range 1..={dim}")));
            }
            if b.i >= b.j {
                return Err(bad("entries must have i < j"));
            }
            if !b.c.is_finite() {
                return Err(bad("coefficient must be finite"));
            }
            if !seen.insert((b.i, b.j, b.k)) {
                return Err(bad("duplicate (i,j,k) entry"));
            }
            alg.set(b.k - 1, b.i - 1, b.j - 1, b.c);
        }
        Ok(alg)
    }

    /// Number of basis vectors.
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.dim + i) * self.dim + j
    }

    /// Structure constant C^k_{ij} (0-based indices).
    #[inline]
    pub fn c(&self, k: usize, i: usize, j: usize) -> f64 {
        self.c[self.idx(k, i, j)]
    }

    /// Set C^k_{ij} = v and C^k_{ji} = -v (0-based indices).
    pub(crate) fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        let a = self.idx(k, i, j);
        let b = self.idx(k, j, i);
        self.c[a] = v;
        self.c[b] = -v;
    }

    /// Nonzero brackets with i < j, 1-based — the JSON wire form.
    pub fn bracket_entries(&self) -> Vec<BracketEntry> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let v = self.c(k, i, j);
                    if v != 0.0 {
                        out.push(BracketEntry {
                            i: i + 1,
                            j: j + 1,
                            k: k + 1,
                            c: v,
                        });
                    }
                }
            }
        }
        out
    }

    /// [x, y] for coordinate vectors x, y.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        let mut out = DVector::zeros(n);
        for k in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                let xi = x[i];
                if xi == 0.0 {
                    continue;
                }
                for j in 0..n {
                    s += xi * y[j] * self.c(k, i, j);
                }
            }
            out[k] = s;
        }
        out
    }

    /// ad_x as a matrix: (ad_x)^k_j = sum_i x^i C^k_{ij}, so ad_x * y = [x, y].
    pub fn adjoint(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for i in 0..n {
                    s += x[i] * self.c(k, i, j);
                }
                m[(k, j)] = s;
            }
        }
        m
    }

    /// Jacobi residual report with the worst offending quadruple.
    pub fn validate(&self) -> JacobiReport {
        self.validate_with_tol(tol::JACOBI)
    }

    /// As [`validate`](Self::validate) with an explicit `ok` threshold.
    pub fn validate_with_tol(&self, jacobi_tol: f64) -> JacobiReport {
        let n = self.dim;
        let mut max_residual = 0.0_f64;
        let mut worst = (1, 1, 1, 1);
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for l in 0..n {
                        let mut s = 0.0;
                        for m in 0..n {
                            s += self.c(m, i, j) * self.c(l, k, m)
                                + self.c(m, j, k) * self.c(l, i, m)
                                + self.c(m, k, i) * self.c(l, j, m);
                        }
                        if s.abs() > max_residual {
                            max_residual = s.abs();
                            worst = (i + 1, j + 1, k + 1, l + 1);
                        }
                    }
                }
            }
        }
        JacobiReport {
            max_residual,
            worst,
            ok: max_residual <= jacobi_tol,
        }
    }

    /// Transport along an invertible basis change M (new frame f_i = M^m_i e_m):
    /// C'^k_{ij} = (M^{-1})^k_l C^l_{mn} M^m_i M^n_j.
    pub fn change_basis(&self, m: &DMatrix<f64>) -> Result<LieAlgebra> {
        let n = self.dim;
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.nrows(),
            });
        }
        let det = m.determinant();
        if det.abs() <= tol::SINGULAR {
            return Err(Error::SingularBasisChange { det });
        }
        let minv = m
            .clone()
            .try_inverse()
            .ok_or(Error::SingularBasisChange { det })?;
        // tmp^l_{ij} = C^l_{mn} M^m_i M^n_j, then contract with M^{-1} on l.
        let mut tmp = vec![0.0; n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for mm in 0..n {
                        let mi = m[(mm, i)];
                        if mi == 0.0 {
                            continue;
                        }
                        for nn in 0..n {
                            s += self.c(l, mm, nn) * mi * m[(nn, j)];
                        }
                    }
                    tmp[(l * n + i) * n + j] = s;
                }
            }
        }
        let mut out = LieAlgebra::zero(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += minv[(k, l)] * tmp[(l * n + i) * n + j];
                    }
                    let idx = out.idx(k, i, j);
                    out.c[idx] = s;
                }
            }
        }
        Ok(out)
    }

    /// Killing form K_{ij} = C^a_{bi} C^b_{aj} = tr(ad_{e_i} ad_{e_j}).
    pub fn killing_form(&self) -> DMatrix<f64> {
        let n = self.dim;
        let mut k = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        s += self.c(a, b, i) * self.c(b, a, j);
                    }
                }
                k[(i, j)] = s;
            }
        }
        k
    }

    /// Trace vector a_b = C^a_{ab} = tr(ad_{e_b}); zero iff unimodular.
    pub fn trace_vector(&self) -> DVector<f64> {
        let n = self.dim;
        let mut v = DVector::zeros(n);
        for b in 0..n {
            let mut s = 0.0;
            for a in 0..n {
                s += self.c(a, a, b);
            }
            v[b] = s;
        }
        v
    }

    pub fn is_unimodular(&self) -> bool {
        self.trace_vector().amax() <= tol::JACOBI
    }

    /// Dimensions of the lower central series g_1 = g, g_{p+1} = [g, g_p],
    /// computed until the dimension stabilizes or reaches zero.
    pub fn lower_central_series(&self) -> Vec<usize> {
        self.series(false)
    }

    /// Dimensions of the derived series g^(0) = g, g^(p+1) = [g^(p), g^(p)].
    pub fn derived_series(&self) -> Vec<usize> {
        self.series(true)
    }

    /// Shared series driver. Subspaces are carried as orthonormal column bases
    /// obtained from rank-revealing SVD of the bracket images.
    fn series(&self, derived: bool) -> Vec<usize> {
        let n = self.dim;
        let full = DMatrix::<f64>::identity(n, n);
        let mut current = full.clone();
        let mut dims = vec![n];
        loop {
            let left = if derived { &current } else { &full };
            let mut images: Vec<DVector<f64>> = Vec::new();
            for a in 0..left.ncols() {
                for b in 0..current.ncols() {
                    let x = left.column(a).into_owned();
                    let y = current.column(b).into_owned();
                    images.push(self.bracket(&x, &y));
                }
            }
            let next = orthonormal_span(&images, n, tol::RANK);
            let d = next.ncols();
            dims.push(d);
            if d == 0 || d == *dims.get(dims.len() - 2).unwrap() {
                return dims;
            }
            current = next;
        }
    }

    /// Nilpotency class (series length to zero), if nilpotent.
    pub fn nilpotency_class(&self) -> Option<usize> {
        let dims = self.lower_central_series();
        if *dims.last().unwrap() == 0 {
            Some(dims.len() - 1)
        } else {
            None
        }
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilpotency_class().is_some()
    }

    /// Derived length (series length to zero), if solvable.
    pub fn derived_length(&self) -> Option<usize> {
        let dims = self.derived_series();
        if *dims.last().unwrap() == 0 {
            Some(dims.len() - 1)
        } else {
            None
        }
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_length().is_some()
    }

    /// Cartan's criterion: nondegenerate Killing form.
    pub fn is_semisimple(&self) -> bool {
        let k = self.killing_form();
        let max = k.amax();
        if max == 0.0 {
            return false;
        }
        k.determinant().abs() > tol::RANK * max.powi(self.dim as i32)
    }

    /// Full classification summary.
    pub fn profile(&self) -> AlgebraProfile {
        AlgebraProfile {
            trace_vector: self.trace_vector(),
            killing: self.killing_form(),
            unimodular: self.is_unimodular(),
            nilpotent: self.nilpotency_class(),
            solvable: self.derived_length(),
            semisimple: self.is_semisimple(),
            lower_central_dims: self.lower_central_series(),
            derived_dims: self.derived_series(),
        }
    }

    /// Frobenius norm of the structure-constant array.
    pub fn frobenius_norm(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// The algebra with constants s * C (bracket scaled uniformly).
    pub fn scaled(&self, s: f64) -> LieAlgebra {
        LieAlgebra {
            dim: self.dim,
            c: self.c.iter().map(|x| s * x).collect(),
        }
    }

    /// Max-norm distance between structure-constant arrays.
    pub fn max_diff(&self, other: &LieAlgebra) -> f64 {
        self.c
            .iter()
            .zip(other.c.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Raw constants as a flat slice, [k][i][j] row-major.
    pub fn constants(&self) -> &[f64] {
        &self.c
    }

    /// Build directly from a dense [k][i][j] array; antisymmetry is enforced
    /// by averaging C^k_{ij} and -C^k_{ji}.
    pub fn from_constants(dim: usize, c: &[f64]) -> Result<LieAlgebra> {
        if c.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                got: c.len(),
            });
        }
        let mut alg = LieAlgebra::zero(dim);
        for k in 0..dim {
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let v = 0.5 * (c[(k * dim + i) * dim + j] - c[(k * dim + j) * dim + i]);
                    alg.set(k, i, j, v);
                }
            }
        }
        Ok(alg)
    }
}

/// Orthonormal basis (as matrix columns) of the span of `vectors`, via
/// column-pivoted QR with diagonal entries below `rank_tol * max(1, r_max)`
/// treated as zero.
pub(crate) fn orthonormal_span(
    vectors: &[DVector<f64>],
    dim: usize,
    rank_tol: f64,
) -> DMatrix<f64> {
    if vectors.is_empty() {
        return DMatrix::zeros(dim, 0);
    }
    let mut m = DMatrix::zeros(dim, vectors.len());
    for (c, v) in vectors.iter().enumerate() {
        m.set_column(c, v);
    }
    let qr = m.col_piv_qr();
    let r = qr.r();
    let q = qr.q();
    let diag_max = r[(0, 0)].abs();
    let cut = rank_tol * diag_max.max(1.0);
    let rank = (0..r.nrows().min(r.ncols()))
        .take_while(|&k| r[(k, k)].abs() > cut)
        .count();
    q.columns(0, rank).into_owned()
}

/// Names accepted by [`catalog`].
pub const CATALOG_NAMES: [&str; 7] = [
    "abelian",
    "heisenberg3",
    "heisenberg5",
    "nil4",
    "hyperbolic",
    "su2",
    "sl2r",
];

/// Bundled algebras. `param` means: dimension for `abelian` (default 3) and
/// `hyperbolic` (default 3), the bracket coefficient c for `heisenberg3`
/// (default 1), the coefficient a for `nil4` (default 1); ignored elsewhere.
pub fn catalog(name: &str, param: Option<f64>) -> Result<LieAlgebra> {
    let int_param = |default: usize| -> Result<usize> {
        match param {
            None => Ok(default),
            Some(p) => {
                if p.fract() == 0.0 && (1.0..=64.0).contains(&p) {
                    Ok(p as usize)
                } else {
                    Err(Error::Schema(format!(
                        "parameter for '{name}' must be a small positive integer, got {p}"
                    )))
                }
            }
        }
    };
    let alg = match name {
        "abelian" => LieAlgebra::zero(int_param(3)?),
        "heisenberg3" => {
            let c = param.unwrap_or(1.0);
            let mut a = LieAlgebra::zero(3);
            a.set(2, 0, 1, c); // [e1, e2] = c e3
            a
        }
        "heisenberg5" => {
            let mut a = LieAlgebra::zero(5);
            a.set(4, 0, 1, 1.0); // [e1, e2] = e5
            a.set(4, 2, 3, 1.0); // [e3, e4] = e5
            a
        }
        "nil4" => {
            let p = param.unwrap_or(1.0);
            let mut a = LieAlgebra::zero(4);
            a.set(1, 0, 2, -p); // [e1, e3] = -a e2
            a.set(2, 0, 3, -p); // [e1, e4] = -a e3
            a
        }
        "hyperbolic" => {
            let n = int_param(3)?;
            if n < 2 {
                return Err(Error::Schema("hyperbolic requires dimension >= 2".into()));
            }
            let mut a = LieAlgebra::zero(n);
            for i in 1..n {
                a.set(i, 0, i, 1.0); // [X0, Xi] = Xi
            }
            a
        }
        "su2" => {
            let mut a = LieAlgebra::zero(3);
            a.set(2, 0, 1, 1.0);
            a.set(0, 1, 2, 1.0);
            a.set(1, 2, 0, 1.0);
            a
        }
        "sl2r" => {
            let mut a = LieAlgebra::zero(3);
            a.set(1, 0, 1, 2.0); // [e1, e2] = 2 e2
            a.set(2, 0, 2, -2.0); // [e1, e3] = -2 e3
            a.set(0, 1, 2, 1.0); // [e2, e3] = e1
            a
        }
        other => return Err(Error::UnknownCatalog(other.to_string())),
    };
    // Catalog entries are constructed antisymmetric; assert Jacobi anyway.
    debug_assert!(alg.validate().ok, "catalog entry failed Jacobi");
    Ok(alg)
}
