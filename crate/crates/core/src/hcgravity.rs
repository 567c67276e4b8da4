//! Generalized field equations for quadratic curvature corrections.
//!
//! The action density on a homogeneous space is
//!
//! ```text
//!     L = R + alpha R^2 + beta |Ric|^2 - 2 Lambda
//! ```
//!
//! with `R` the scalar curvature, `|Ric|^2` the squared Frobenius norm of the
//! Ricci tensor, and `Lambda` a cosmological constant. Varying the metric and
//! evaluating in an orthonormal left-invariant frame (where the metric is the
//! identity and all curvature quantities are constant matrices) yields the
//! field equation
//!
//! ```text
//!     Phi_ij(alpha, beta) + Lambda delta_ij = 0,
//! ```
//!
//! where [`phi_tensor`] assembles
//!
//! ```text
//!     Phi = Ric - R/2 I
//!         + 2 alpha R (Ric - R/4 I)
//!         + beta (Box Ric) + 2 beta (Q - |Ric|^2/4 I),
//!     Q_mn = sum_{s,r} Riem_{smrn} Ric_{sr}.
//! ```
//!
//! Homogeneity kills all gradient terms of the scalar invariants, so the
//! usually-differential equation collapses to the algebraic system above:
//! linear in `(alpha, beta, Lambda)` once the geometry is fixed. For a given
//! algebra [`solve_parameters`] therefore returns an *affine family* of
//! coupling triples — a least-squares offset plus a basis of the homogeneous
//! solution space — or flags the set as empty when no parameters balance the
//! equation. One-parameter families whose free direction leaves `Lambda`
//! untouched carry a genuinely invariant product `Lambda * (p alpha + q beta)`
//! which is also insensitive to rescaling the metric; those are reported with
//! exact rational weights whenever the direction admits them.
//!
//! A structural caveat on emptiness: `Phi - Lambda`-wise, both the Einstein
//! tensor and the `alpha` slope are linear combinations of `Ric` and `I`, so
//! every geometry with `R != 0` is solved by pure `R^2` gravity at
//! `(alpha, beta, Lambda) = (-1/(2R), 0, R/4)`. The empty verdict is
//! therefore reserved for scalar-flat geometries whose Ricci spectrum spreads
//! over three or more eigenvalues.

use nalgebra::{DMatrix, DVector};

use crate::algebra::LieAlgebra;
use crate::curvature::{box_ricci, ricci_from_connection, riemann};
use crate::linalg;
use crate::tol;

/// Coupling constants of the quadratic action `R + alpha R^2 + beta |Ric|^2 - 2 Lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HCParameters {
    /// Coefficient of `R^2`.
    pub alpha: f64,
    /// Coefficient of `|Ric|^2`.
    pub beta: f64,
    /// Cosmological constant.
    pub lambda_cc: f64,
}

impl HCParameters {
    pub fn new(alpha: f64, beta: f64, lambda_cc: f64) -> Self {
        Self {
            alpha,
            beta,
            lambda_cc,
        }
    }
}

/// A combination of couplings that is constant on the whole solution family.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantProduct {
    /// Human-readable form, e.g. `"Lambda*(2*alpha+3*beta)"`.
    pub label: String,
    /// Value of the product, evaluated at the family offset.
    pub value: f64,
}

/// The affine set of coupling triples solving the field equation on one geometry.
#[derive(Debug, Clone)]
pub struct HCSolutionSet {
    /// True when no parameters satisfy the equation; `offset` then holds the
    /// least-squares best fit for diagnostics and `basis` is empty.
    pub empty: bool,
    /// A particular solution (minimum-norm when the set is nonempty).
    pub offset: HCParameters,
    /// Directions along which solutions stay solutions. At most one basis
    /// vector carries a `lambda_cc` component; the rest are Lambda-free.
    pub basis: Vec<HCParameters>,
    /// Scale-invariant products attached to Lambda-free one-parameter families.
    pub invariant_products: Vec<InvariantProduct>,
    /// Max-abs field-equation residual at `offset`.
    pub residual: f64,
}

/// Field-equation evaluation at one parameter triple.
#[derive(Debug, Clone)]
pub struct FieldEquationReport {
    /// The tensor `Phi(alpha, beta)` in the orthonormal frame.
    pub phi: DMatrix<f64>,
    /// Max-abs entry of `Phi + Lambda I`.
    pub residual: f64,
    /// The action density `R + alpha R^2 + beta |Ric|^2 - 2 Lambda`.
    pub lagrangian_density: f64,
}

/// The three coupling-independent pieces of `Phi`: the Einstein tensor, the
/// `alpha` slope, and the `beta` slope.
fn phi_parts(alg: &LieAlgebra) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let n = alg.dim();
    let eye = DMatrix::<f64>::identity(n, n);
    let ric = ricci_from_connection(alg);
    let r = ric.trace();
    let rho2: f64 = ric.iter().map(|x| x * x).sum();
    let riem = riemann(alg);

    let einstein = &ric - &eye * (0.5 * r);
    let alpha_slope = (&ric - &eye * (0.25 * r)) * (2.0 * r);

    // Q_mn = Riem_{smrn} Ric_{sr}: the Ricci-weighted trace of the curvature
    // operator, equal to lambda^2 I on an Einstein space.
    let mut q = DMatrix::<f64>::zeros(n, n);
    for m in 0..n {
        for nn in 0..n {
            let mut acc = 0.0;
            for s in 0..n {
                for rr in 0..n {
                    acc += riem.get(s, m, rr, nn) * ric[(s, rr)];
                }
            }
            q[(m, nn)] = acc;
        }
    }
    let beta_slope = box_ricci(alg) + (q - &eye * (0.25 * rho2)) * 2.0;
    (einstein, alpha_slope, beta_slope)
}

/// The field-equation tensor `Phi(alpha, beta)` in the orthonormal frame.
pub fn phi_tensor(alg: &LieAlgebra, alpha: f64, beta: f64) -> DMatrix<f64> {
    let (e, a, b) = phi_parts(alg);
    e + a * alpha + b * beta
}

/// The action density `R + alpha R^2 + beta |Ric|^2 - 2 Lambda`.
pub fn lagrangian_density(alg: &LieAlgebra, params: &HCParameters) -> f64 {
    let ric = ricci_from_connection(alg);
    let r = ric.trace();
    let rho2: f64 = ric.iter().map(|x| x * x).sum();
    r + params.alpha * r * r + params.beta * rho2 - 2.0 * params.lambda_cc
}

/// Evaluate the field equation at one parameter triple.
pub fn check_solution(alg: &LieAlgebra, params: &HCParameters) -> FieldEquationReport {
    let n = alg.dim();
    let phi = phi_tensor(alg, params.alpha, params.beta);
    let residual = (&phi + DMatrix::<f64>::identity(n, n) * params.lambda_cc).amax();
    FieldEquationReport {
        phi,
        residual,
        lagrangian_density: lagrangian_density(alg, params),
    }
}

/// Best rational approximation `p/q` of `x` by continued-fraction convergents,
/// with `q <= max_den` and relative error below `rel_tol`.
fn rationalize(x: f64, max_den: i64, rel_tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() || x.abs() > max_den as f64 * 1e6 {
        return None;
    }
    let close = |p: i64, q: i64| (x - p as f64 / q as f64).abs() <= rel_tol * x.abs().max(1.0);
    // Convergents h_k/k_k seeded with h_-1/k_-1 = 1/0 and h_0/k_0 = floor(x)/1.
    let (mut p0, mut q0) = (1i64, 0i64);
    let (mut p1, mut q1) = (x.floor() as i64, 1i64);
    let mut frac = x - x.floor();
    for _ in 0..64 {
        if close(p1, q1) {
            return Some((p1, q1));
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let p2 = a as i64 * p1 + p0;
        let q2 = a as i64 * q1 + q0;
        if q2 > max_den {
            break;
        }
        (p0, q0) = (p1, q1);
        (p1, q1) = (p2, q2);
    }
    close(p1, q1).then_some((p1, q1))
}

/// Render `Lambda * (p alpha + q beta)` with integer weights.
fn product_label(p: i64, q: i64) -> String {
    let term = |c: i64, name: &str| match c {
        1 => name.to_string(),
        c => format!("{c}*{name}"),
    };
    match (p, q) {
        (p, 0) => format!("Lambda*({})", term(p, "alpha")),
        (0, q) => format!("Lambda*({})", term(q, "beta")),
        (p, q) if q > 0 => format!("Lambda*({}+{})", term(p, "alpha"), term(q, "beta")),
        (p, q) => format!("Lambda*({}-{})", term(p, "alpha"), term(-q, "beta")),
    }
}

/// The integer weights `(p, q)` of the coupling combination conserved along a
/// Lambda-free null direction `(v_alpha, v_beta, 0)`: any `(p, q)` orthogonal
/// to `(v_alpha, v_beta)`, canonicalized to a positive leading coefficient.
fn conserved_weights(v_alpha: f64, v_beta: f64) -> Option<(i64, i64)> {
    let scale = v_alpha.abs().max(v_beta.abs());
    if scale == 0.0 {
        return None;
    }
    if v_alpha.abs() <= 1e-9 * scale {
        // Direction moves beta only: alpha is conserved.
        return Some((1, 0));
    }
    if v_beta.abs() <= 1e-9 * scale {
        return Some((0, 1));
    }
    // (p, q) proportional to (v_beta, -v_alpha); rationalize the ratio.
    let (mut p, mut q) = rationalize(v_beta / -v_alpha, 1000, 1e-6)?;
    if q < 0 || (q == 0 && p < 0) {
        p = -p;
        q = -q;
    }
    Some((p, q))
}

/// Solve the field equation for the coupling triple on a fixed geometry.
///
/// Builds one linear equation per independent component of the symmetric
/// tensor `Phi + Lambda I`, solves for `(alpha, beta, lambda_cc)` in the
/// least-squares sense, and extracts the homogeneous solution space from the
/// spectrum of the normal matrix. The null basis is canonicalized so that at
/// most one direction moves `lambda_cc`; every reported direction is
/// re-verified against the field equation before it is kept.
pub fn solve_parameters(alg: &LieAlgebra) -> HCSolutionSet {
    let n = alg.dim();
    let (einstein, alpha_slope, beta_slope) = phi_parts(alg);

    let rows = n * (n + 1) / 2;
    let mut a = DMatrix::<f64>::zeros(rows, 3);
    let mut rhs = DVector::<f64>::zeros(rows);
    let mut row = 0;
    for i in 0..n {
        for j in i..n {
            a[(row, 0)] = alpha_slope[(i, j)];
            a[(row, 1)] = beta_slope[(i, j)];
            a[(row, 2)] = if i == j { 1.0 } else { 0.0 };
            rhs[row] = -einstein[(i, j)];
            row += 1;
        }
    }

    let solved = linalg::gram_lstsq(&a, &rhs, tol::RANK);
    let x = &solved.x;
    let offset = HCParameters::new(x[0], x[1], x[2]);
    let residual = (&einstein
        + &alpha_slope * offset.alpha
        + &beta_slope * offset.beta
        + DMatrix::<f64>::identity(n, n) * offset.lambda_cc)
        .amax();
    let empty = residual > tol::HC_EMPTY;
    if empty {
        return HCSolutionSet {
            empty,
            offset,
            basis: Vec::new(),
            invariant_products: Vec::new(),
            residual,
        };
    }

    let mut null = solved.null;

    // Canonicalize: concentrate the lambda component in a single direction.
    let pivot = null
        .iter()
        .enumerate()
        .filter(|(_, v)| v[2].abs() > 1e-9)
        .max_by(|l, r| l.1[2].abs().total_cmp(&r.1[2].abs()))
        .map(|(k, _)| k);
    if let Some(k) = pivot {
        let carrier = null[k].clone();
        for (j, v) in null.iter_mut().enumerate() {
            if j != k {
                let f = v[2] / carrier[2];
                *v -= &carrier * f;
                v[2] = 0.0;
            }
        }
        // Keep the lambda-carrying direction last for readability.
        let carrier = null.remove(k);
        null.push(carrier);
    }
    for v in &mut null {
        let norm = v.norm();
        if norm > 0.0 {
            *v /= norm;
        }
        let lead = v.iter().find(|c| c.abs() > 1e-12).copied().unwrap_or(1.0);
        if lead < 0.0 {
            *v = -&*v;
        }
    }

    // Re-verify each direction: offset + v must still solve the equation.
    let verify_bound = tol::HC_VERIFY * a.amax().max(1.0);
    null.retain(|v| {
        let shifted = HCParameters::new(
            offset.alpha + v[0],
            offset.beta + v[1],
            offset.lambda_cc + v[2],
        );
        check_solution(alg, &shifted).residual <= verify_bound
    });

    // A product Lambda*(p alpha + q beta) is constant on the whole family only
    // when the family is a single Lambda-free line.
    let mut invariant_products = Vec::new();
    if null.len() == 1 && null[0][2].abs() <= 1e-9 {
        if let Some((p, q)) = conserved_weights(null[0][0], null[0][1]) {
            let value = offset.lambda_cc * (p as f64 * offset.alpha + q as f64 * offset.beta);
            invariant_products.push(InvariantProduct {
                label: product_label(p, q),
                value,
            });
        }
    }

    let basis = null
        .into_iter()
        .map(|v| HCParameters::new(v[0], v[1], v[2]))
        .collect();
    HCSolutionSet {
        empty,
        offset,
        basis,
        invariant_products,
        residual,
    }
}
