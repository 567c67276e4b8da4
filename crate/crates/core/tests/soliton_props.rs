//! Invariance, covariance, and determinism properties of the soliton search.

use liegeo::soliton::bracket_sphere_gradient;
use liegeo::{
    catalog, derivation_residual, detect_su2, ricci_closed_form, soliton_project, solve_nilsoliton,
    SearchConfig,
};
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_rotation(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    m.qr().q()
}

const SOLITONS: [&str; 3] = ["heisenberg3", "heisenberg5", "nil4"];

#[test]
fn certificates_are_rotation_invariant() {
    // Rotating an orthonormal frame leaves the metric alone, so the soliton
    // constant must not move and the derivation conjugates.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for name in SOLITONS {
        let alg = catalog(name, None).unwrap();
        let reference = soliton_project(&alg);
        assert!(reference.verified());
        for _ in 0..20 {
            let q = random_rotation(alg.dim(), &mut rng);
            let rotated = alg.change_basis(&q).unwrap();
            let cert = soliton_project(&rotated);
            assert!(cert.verified());
            assert!((cert.lambda - reference.lambda).abs() <= 1e-10);
            let expected_d = q.transpose() * &reference.d * &q;
            assert!((cert.d - expected_d).amax() <= 1e-9);
        }
    }
}

#[test]
fn certificates_scale_quadratically_with_the_brackets() {
    for name in SOLITONS {
        let alg = catalog(name, None).unwrap();
        let reference = soliton_project(&alg);
        let (lam_hat, d_hat) = reference.scale_invariant(&alg);
        for s in [0.5, 2.0, 3.0] {
            let scaled = alg.scaled(s);
            let cert = soliton_project(&scaled);
            assert!(cert.verified());
            assert!((cert.lambda - s * s * reference.lambda).abs() <= 1e-9);
            assert!((&cert.d - &reference.d * (s * s)).amax() <= 1e-9);
            // The normalized pair is a genuine invariant of the ray.
            let (lh, dh) = cert.scale_invariant(&scaled);
            assert!((lh - lam_hat).abs() <= 1e-10);
            assert!((dh - &d_hat).amax() <= 1e-10);
        }
    }
}

#[test]
fn ricci_minus_lambda_is_a_derivation_at_solitons() {
    for name in SOLITONS {
        let alg = catalog(name, None).unwrap();
        let cert = soliton_project(&alg);
        let n = alg.dim();
        let ric = ricci_closed_form(&alg).ricci;
        let d = ric - DMatrix::<f64>::identity(n, n) * cert.lambda;
        assert!(derivation_residual(&alg, &d) <= 1e-9);
    }
}

#[test]
fn heisenberg_orbit_is_made_of_solitons() {
    // Every basis change of the Heisenberg algebra lands on another soliton
    // metric (the orbit degenerates to a single ray modulo isometry), so the
    // identity metric verifies even in a skewed frame and the normalized
    // certificate is the same everywhere on the orbit.
    let mut m = DMatrix::<f64>::identity(3, 3);
    m[(0, 1)] = 0.45;
    m[(1, 1)] = 1.3;
    m[(2, 0)] = -0.2;
    m[(2, 2)] = 0.8;
    let skewed = catalog("heisenberg3", None)
        .unwrap()
        .change_basis(&m)
        .unwrap();
    let cert = soliton_project(&skewed);
    assert!(cert.verified());
    let (lam_hat, d_hat) = cert.scale_invariant(&skewed);
    assert!((lam_hat - (-0.75)).abs() <= 1e-9);
    let mut eigs: Vec<f64> = d_hat
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eigs.sort_by(f64::total_cmp);
    for (got, want) in eigs.iter().zip([0.5, 0.5, 1.0]) {
        assert!((got - want).abs() <= 1e-9, "eigs {eigs:?}");
    }
}

#[test]
fn search_recovers_the_soliton_from_a_skewed_basis() {
    // nil4 has genuine non-soliton points on its orbit: skew the basis so the
    // identity metric fails, then let the search find the soliton again. Its
    // scale-invariant data: lambda = -3/2 over squared bracket norm 4, and
    // derivation eigenvalues (1/2, 2, 3/2, 1) over the same norm.
    let mut m = DMatrix::<f64>::identity(4, 4);
    m[(0, 1)] = 0.4;
    m[(2, 2)] = 1.7;
    m[(1, 3)] = -0.3;
    let skewed = catalog("nil4", None).unwrap().change_basis(&m).unwrap();
    assert!(!soliton_project(&skewed).verified());

    let sol = solve_nilsoliton(&skewed, &SearchConfig::default()).unwrap();
    assert!(sol.certificate.verified());
    let (lam_hat, d_hat) = sol.certificate.scale_invariant(&sol.constants);
    assert!((lam_hat - (-0.375)).abs() <= 1e-6);
    let mut eigs: Vec<f64> = d_hat
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eigs.sort_by(f64::total_cmp);
    let expected = [0.125, 0.25, 0.375, 0.5];
    for (got, want) in eigs.iter().zip(expected) {
        assert!((got - want).abs() <= 1e-6, "eigs {eigs:?}");
    }
}

#[test]
fn search_is_bitwise_deterministic() {
    let mut m = DMatrix::<f64>::identity(4, 4);
    m[(0, 2)] = 0.3;
    m[(1, 1)] = 1.2;
    m[(3, 0)] = -0.15;
    let skewed = catalog("nil4", None).unwrap().change_basis(&m).unwrap();
    let a = solve_nilsoliton(&skewed, &SearchConfig::default()).unwrap();
    let b = solve_nilsoliton(&skewed, &SearchConfig::default()).unwrap();
    assert_eq!(
        a.certificate.lambda.to_bits(),
        b.certificate.lambda.to_bits()
    );
    assert_eq!(a.iterations, b.iterations);
    assert_eq!(a.restarts_used, b.restarts_used);
    for (x, y) in a.frame.s().iter().zip(b.frame.s().iter()) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
    for (x, y) in a.certificate.d.iter().zip(b.certificate.d.iter()) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
}

#[test]
fn variational_gradient_vanishes_only_at_solitons() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for name in SOLITONS {
        let alg = catalog(name, None).unwrap();
        let q = random_rotation(alg.dim(), &mut rng);
        let rotated = alg.change_basis(&q).unwrap();
        assert!(bracket_sphere_gradient(&rotated) <= 1e-6);
    }
    // A genuinely non-soliton point on the same orbit keeps a live gradient.
    let mut skew = DMatrix::<f64>::identity(4, 4);
    skew[(0, 1)] = 0.4;
    skew[(2, 2)] = 1.7;
    skew[(1, 3)] = -0.3;
    let off = catalog("nil4", None).unwrap().change_basis(&skew).unwrap();
    assert!(bracket_sphere_gradient(&off) > 1e-3);
}

#[test]
fn su2_detector_is_sound_on_semisimple_split_forms() {
    // sl(2, R) is semisimple but contains no su(2): the detector must refuse.
    let sl2 = catalog("sl2r", None).unwrap();
    let det = detect_su2(&sl2, &SearchConfig::default());
    assert!(
        !det.found,
        "claimed su(2) inside sl(2,R), residual {}",
        det.residual
    );
    assert!(det.residual > 1e-2);

    // A hidden copy in a rotated frame is still found.
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let q = random_rotation(3, &mut rng);
    let rotated = catalog("su2", None).unwrap().change_basis(&q).unwrap();
    let found = detect_su2(&rotated, &SearchConfig::default());
    assert!(found.found);
    assert!(found.residual <= 1e-8);
}
