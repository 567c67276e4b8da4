//! Default numerical tolerances. Exact-identity residuals on catalog-scale
//! inputs get 1e-12; rank decisions (SVD thresholding) get 1e-10. Operations
//! that accept a tolerance override take these as defaults.

/// Jacobi residual bound for an algebra to count as validated.
pub const JACOBI: f64 = 1e-12;
/// Singular-value threshold for rank decisions (kernels, series subspaces).
pub const RANK: f64 = 1e-10;
/// Residual bound under which a soliton certificate is "verified".
pub const CERTIFICATE: f64 = 1e-10;
/// Leibniz residual bound for a matrix to count as a derivation.
pub const DERIVATION: f64 = 1e-10;
/// Residual bound for the su(2)-triple detector's "found" verdict.
pub const SU2_FOUND: f64 = 1e-8;
/// Minimal |det| for a basis change or metric frame to count as invertible.
pub const SINGULAR: f64 = 1e-12;
/// Residual above which the generalized-Einstein solution set is empty.
pub const HC_EMPTY: f64 = 1e-8;
/// Re-verification bound for every member of a reported solution family.
pub const HC_VERIFY: f64 = 1e-9;
