//! Riemannian geometry of left-invariant metrics on Lie groups, computed
//! directly from structure constants.
//!
//! The crate fixes a basis `e_1..e_n`, stores brackets `[e_i, e_j] = C^k_{ij} e_k`,
//! and treats a metric as the matrix `g` of inner products in that basis. All
//! curvature is computed in a g-orthonormal frame obtained by a change of
//! basis, so the core formulas only ever see the constants. On top of that
//! sit a Ricci-soliton solver for nilpotent algebras, a rank-one Einstein
//! extension builder, a Ricci-flow integrator, and a solver for the
//! quadratic-curvature field equation.

pub mod algebra;
pub mod curvature;
pub mod derivation;
pub mod error;
pub mod extension;
pub mod flow;
pub mod hcgravity;
pub mod jsonio;
mod linalg;
pub mod metric;
pub mod optim;
pub mod soliton;
pub mod tol;

pub use algebra::{catalog, AlgebraProfile, BracketEntry, JacobiReport, LieAlgebra, CATALOG_NAMES};
pub use curvature::{
    box_ricci, connection, covariant_derivative_ricci, ricci_closed_form, ricci_from_connection,
    ricci_in_coordinates, riemann, scalar_curvature, ClosedFormRicci, Tensor3, Tensor4,
    SIGN_CONVENTION,
};
pub use derivation::{derivation_residual, derivation_space, DerivationSpace};
pub use error::{Error, Result};
pub use extension::{
    rank_one_extend, solve_einstein_extension, EinsteinExtension, RankOneExtension,
};
pub use flow::{
    flow_step, integrate, ricci_coordinates, FlowSample, FlowState, FlowTrajectory, Normalization,
};
pub use hcgravity::{
    check_solution, lagrangian_density, phi_tensor, solve_parameters, FieldEquationReport,
    HCParameters, HCSolutionSet, InvariantProduct,
};
pub use jsonio::{algebra_to_json, matrix_to_json, parse_algebra_file, AlgebraFile, Jv};
pub use metric::{orthonormal_constants, MetricFrame};
pub use soliton::{
    detect_su2, einstein_check, find_negative_scalar_metric, soliton_project, solve_nilsoliton,
    EinsteinCheck, SearchConfig, SolitonCertificate, SolitonSolution, Su2Detection,
};

/// Library version, reported by every CLI run.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
