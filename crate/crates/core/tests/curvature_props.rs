//! Structural properties of the curvature pipeline checked across the whole
//! catalog and random changes of basis.

use liegeo::curvature::{contracted_second_bianchi_residual, first_bianchi_residual};
use liegeo::{
    catalog, connection, ricci_closed_form, ricci_from_connection, scalar_curvature, LieAlgebra,
    CATALOG_NAMES,
};
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn catalog_all() -> Vec<LieAlgebra> {
    CATALOG_NAMES
        .iter()
        .map(|name| catalog(name, None).unwrap())
        .collect()
}

fn random_gl(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(n, n, |i, j| -> f64 {
            (if i == j { 1.0 } else { 0.0 }) + 0.3 * rng.gen_range(-1.0..1.0)
        });
        if m.determinant().abs() > 0.1 {
            return m;
        }
    }
}

fn random_rotation(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    m.qr().q()
}

#[test]
fn closed_form_matches_the_koszul_route_off_catalog() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for alg in catalog_all() {
        for _ in 0..12 {
            let m = random_gl(alg.dim(), &mut rng);
            let moved = alg.change_basis(&m).unwrap();
            let a = ricci_from_connection(&moved);
            let b = ricci_closed_form(&moved).ricci;
            let scale = a.amax().max(1.0);
            assert!(
                (a - b).amax() <= 1e-11 * scale,
                "closed form disagrees on a moved basis"
            );
        }
    }
}

#[test]
fn orthogonal_basis_changes_conjugate_the_ricci_tensor() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for alg in catalog_all() {
        let ric = ricci_from_connection(&alg);
        for _ in 0..6 {
            let q = random_rotation(alg.dim(), &mut rng);
            let rotated = alg.change_basis(&q).unwrap();
            let expected = q.transpose() * &ric * &q;
            let got = ricci_from_connection(&rotated);
            assert!((got - expected).amax() <= 1e-10);
            // The scalar curvature is a full invariant of the metric.
            assert!((scalar_curvature(&rotated) - scalar_curvature(&alg)).abs() <= 1e-10);
        }
    }
}

#[test]
fn scaling_the_brackets_scales_curvature_quadratically() {
    for alg in catalog_all() {
        let ric = ricci_from_connection(&alg);
        let r = scalar_curvature(&alg);
        for s in [0.5, 2.0, 3.0] {
            let scaled = alg.scaled(s);
            let got = ricci_from_connection(&scaled);
            assert!((got - &ric * (s * s)).amax() <= 1e-10 * (s * s).max(1.0));
            assert!((scalar_curvature(&scaled) - s * s * r).abs() <= 1e-9);
        }
    }
}

#[test]
fn bianchi_identities_survive_basis_changes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for alg in catalog_all() {
        for _ in 0..4 {
            let m = random_gl(alg.dim(), &mut rng);
            let moved = alg.change_basis(&m).unwrap();
            assert!(first_bianchi_residual(&moved) <= 1e-9);
            assert!(contracted_second_bianchi_residual(&moved) <= 1e-9);
        }
    }
}

#[test]
fn connection_reproduces_the_brackets_as_torsion() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for alg in catalog_all() {
        let m = random_gl(alg.dim(), &mut rng);
        let moved = alg.change_basis(&m).unwrap();
        let gamma = connection(&moved);
        let n = moved.dim();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let torsion = gamma.get(k, i, j) - gamma.get(k, j, i);
                    assert!((torsion - moved.c(k, i, j)).abs() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn killing_form_is_gl_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for alg in catalog_all() {
        let k = alg.killing_form();
        for _ in 0..6 {
            let m = random_gl(alg.dim(), &mut rng);
            let moved = alg.change_basis(&m).unwrap();
            let expected = m.transpose() * &k * &m;
            assert!((moved.killing_form() - expected).amax() <= 1e-10);
        }
    }
}
