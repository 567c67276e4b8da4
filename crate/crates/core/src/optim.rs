//! Small deterministic optimizers used by the soliton, extension, and search
//! modules: Levenberg–Marquardt for least-squares residuals, golden-section
//! for one-dimensional scale fitting, and a backtracking gradient descent for
//! plain scalar objectives. All derivatives are central finite differences;
//! determinism under a fixed seed is part of the contract, so nothing here
//! consults wall clocks or thread counts.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic RNG stream for a given seed. Restart k of a multi-restart
/// search should use `seeded_rng(derive_seed(seed, k))` so restarts are
/// independent and order-insensitive.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sub-seed for restart `k` of a search seeded with `seed`.
pub fn derive_seed(seed: u64, k: u64) -> u64 {
    // splitmix-style mixing keeps distinct restarts decorrelated
    let mut z = seed ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Options for [`levenberg_marquardt`].
#[derive(Debug, Clone)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Stop when the cost ‖r‖² drops to or below this.
    pub cost_tol: f64,
    /// Stop when the accepted step satisfies ‖dx‖ ≤ step_tol · (1 + ‖x‖).
    pub step_tol: f64,
    /// Central-difference step scale for the numeric Jacobian.
    pub fd_step: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iter: 200,
            cost_tol: 1e-30,
            step_tol: 1e-14,
            fd_step: 1e-6,
        }
    }
}

/// Outcome of a Levenberg–Marquardt run.
#[derive(Debug, Clone)]
pub struct LmResult {
    pub x: DVector<f64>,
    /// Final cost ‖r(x)‖².
    pub cost: f64,
    pub iterations: usize,
    /// True when a tolerance (cost or step) was met rather than the budget.
    pub converged: bool,
}

/// Minimize ‖r(x)‖² by damped Gauss–Newton with a numeric Jacobian.
/// Deterministic for a fixed starting point.
pub fn levenberg_marquardt<F>(r: F, x0: DVector<f64>, opts: &LmOptions) -> LmResult
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut x = x0;
    let mut res = r(&x);
    let mut cost = res.norm_squared();
    let mut lambda = 1e-3;
    if cost <= opts.cost_tol {
        return LmResult {
            x,
            cost,
            iterations: 0,
            converged: true,
        };
    }
    let np = x.len();
    for iter in 1..=opts.max_iter {
        // central-difference Jacobian
        let m = res.len();
        let mut jac = DMatrix::<f64>::zeros(m, np);
        for p in 0..np {
            let h = opts.fd_step * x[p].abs().max(1.0);
            let mut xp = x.clone();
            xp[p] += h;
            let rp = r(&xp);
            xp[p] = x[p] - h;
            let rm = r(&xp);
            for q in 0..m {
                jac[(q, p)] = (rp[q] - rm[q]) / (2.0 * h);
            }
        }
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &res;
        let diag_floor = jtj.diagonal().amax().max(1e-12);

        let mut accepted = false;
        for _ in 0..25 {
            let mut a = jtj.clone();
            for p in 0..np {
                a[(p, p)] += lambda * jtj[(p, p)].max(1e-12 * diag_floor);
            }
            let step = match nalgebra::Cholesky::new(a) {
                Some(ch) => ch.solve(&(-&jtr)),
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let x_try = &x + &step;
            let r_try = r(&x_try);
            let c_try = r_try.norm_squared();
            if c_try.is_finite() && c_try < cost {
                let small_step = step.norm() <= opts.step_tol * (1.0 + x.norm());
                x = x_try;
                res = r_try;
                cost = c_try;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if cost <= opts.cost_tol || small_step {
                    return LmResult {
                        x,
                        cost,
                        iterations: iter,
                        converged: true,
                    };
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e14 {
                break;
            }
        }
        if !accepted {
            // damping exhausted: stationary to machine precision
            return LmResult {
                x,
                cost,
                iterations: iter,
                converged: true,
            };
        }
    }
    let iterations = opts.max_iter;
    LmResult {
        x,
        cost,
        iterations,
        converged: cost <= opts.cost_tol,
    }
}

/// Golden-section minimization of a unimodal function on [a, b].
/// Returns (argmin, min). The bracket shrinks by the golden ratio each
/// iteration, so 160 iterations exhaust f64 resolution on any sane interval.
pub fn golden_section<F>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
        if b - a <= f64::EPSILON * (1.0 + a.abs() + b.abs()) {
            break;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    (x, fx)
}

/// Options for [`gradient_descent`].
#[derive(Debug, Clone)]
pub struct DescentOptions {
    pub max_iter: usize,
    /// Initial step length along the negative gradient direction.
    pub step0: f64,
    /// Stop when ‖∇f‖ ≤ grad_tol.
    pub grad_tol: f64,
    pub fd_step: f64,
    /// Stop as soon as f(x) ≤ target (early exit for witness searches).
    pub target: Option<f64>,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            max_iter: 500,
            step0: 0.1,
            grad_tol: 1e-10,
            fd_step: 1e-6,
            target: None,
        }
    }
}

/// Outcome of a descent run.
#[derive(Debug, Clone)]
pub struct DescentResult {
    pub x: DVector<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Total objective evaluations (line-search probes included).
    pub evals: usize,
    /// True when the target or the gradient tolerance was met.
    pub converged: bool,
}

/// Steepest descent with central-difference gradient and a grow/shrink
/// backtracking line search. Crude but robust on the smooth, low-dimensional
/// objectives used here, and bitwise deterministic.
pub fn gradient_descent<F>(f: F, x0: DVector<f64>, opts: &DescentOptions) -> DescentResult
where
    F: Fn(&DVector<f64>) -> f64,
{
    let np = x0.len();
    let mut x = x0;
    let mut value = f(&x);
    let mut evals = 1;
    let mut step = opts.step0;
    let hit = |v: f64| opts.target.map(|t| v <= t).unwrap_or(false);
    if hit(value) {
        return DescentResult {
            x,
            value,
            iterations: 0,
            evals,
            converged: true,
        };
    }
    for iter in 1..=opts.max_iter {
        let mut grad = DVector::<f64>::zeros(np);
        for p in 0..np {
            let h = opts.fd_step * x[p].abs().max(1.0);
            let mut xp = x.clone();
            xp[p] += h;
            let fp = f(&xp);
            xp[p] = x[p] - h;
            let fm = f(&xp);
            evals += 2;
            grad[p] = (fp - fm) / (2.0 * h);
        }
        let gnorm = grad.norm();
        if gnorm <= opts.grad_tol {
            return DescentResult {
                x,
                value,
                iterations: iter,
                evals,
                converged: true,
            };
        }
        let dir = -&grad / gnorm;
        let mut improved = false;
        for _ in 0..40 {
            let x_try = &x + step * &dir;
            let v_try = f(&x_try);
            evals += 1;
            if v_try.is_finite() && v_try < value {
                x = x_try;
                value = v_try;
                step *= 1.5;
                improved = true;
                if hit(value) {
                    return DescentResult {
                        x,
                        value,
                        iterations: iter,
                        evals,
                        converged: true,
                    };
                }
                break;
            }
            step *= 0.5;
            if step < 1e-14 {
                break;
            }
        }
        if !improved {
            return DescentResult {
                x,
                value,
                iterations: iter,
                evals,
                converged: opts.target.is_none(),
            };
        }
    }
    DescentResult {
        x,
        value,
        iterations: opts.max_iter,
        evals,
        converged: opts.target.is_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lm_solves_rosenbrock_as_least_squares() {
        // r = (1 - x, 10 (y - x^2)); minimum at (1, 1)
        let r = |v: &DVector<f64>| DVector::from_vec(vec![1.0 - v[0], 10.0 * (v[1] - v[0] * v[0])]);
        let out = levenberg_marquardt(r, DVector::from_vec(vec![-1.2, 1.0]), &LmOptions::default());
        assert!(out.converged);
        assert_abs_diff_eq!(out.x[0], 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(out.x[1], 1.0, epsilon = 1e-8);
    }

    #[test]
    fn lm_returns_immediately_at_a_solution() {
        let r = |v: &DVector<f64>| v.clone();
        let out = levenberg_marquardt(r, DVector::zeros(3), &LmOptions::default());
        assert_eq!(out.iterations, 0);
        assert!(out.converged);
        assert_eq!(out.cost, 0.0);
    }

    #[test]
    fn golden_section_quadratic() {
        // argmin accuracy on a smooth quadratic is limited to ~sqrt(eps)
        // because f-differences vanish there; the value is sharp to eps.
        let (x, fx) = golden_section(|t| (t - 2.7).powi(2) + 1.0, 0.0, 10.0, 160);
        assert_abs_diff_eq!(x, 2.7, epsilon = 1e-6);
        assert_abs_diff_eq!(fx, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn golden_section_kink_to_machine_precision() {
        // V-shaped objectives (residual norms crossing zero) keep f-contrast
        // near the minimum, so the argmin is located to machine precision.
        let (x, fx) = golden_section(|t| (t - 0.5).abs(), 1e-3, 10.0, 160);
        assert_abs_diff_eq!(x, 0.5, epsilon = 1e-12);
        assert!(fx <= 1e-12);
    }

    #[test]
    fn descent_reaches_target_early() {
        let f = |v: &DVector<f64>| v.norm_squared() - 4.0;
        let out = gradient_descent(
            f,
            DVector::from_vec(vec![1.0, 1.0]),
            &DescentOptions {
                target: Some(-3.5),
                ..Default::default()
            },
        );
        assert!(out.converged);
        assert!(out.value <= -3.5);
    }

    #[test]
    fn descent_converges_on_quadratic() {
        let f = |v: &DVector<f64>| (v[0] - 1.0).powi(2) + 3.0 * (v[1] + 2.0).powi(2);
        let out = gradient_descent(f, DVector::zeros(2), &DescentOptions::default());
        assert!(out.value < 1e-9);
    }

    #[test]
    fn derived_seeds_are_distinct() {
        let s: Vec<u64> = (0..16).map(|k| derive_seed(7, k)).collect();
        for i in 0..16 {
            for j in 0..i {
                assert_ne!(s[i], s[j]);
            }
        }
    }

    #[test]
    fn rng_streams_are_reproducible() {
        use rand::Rng;
        let mut a = seeded_rng(42);
        let mut b = seeded_rng(42);
        for _ in 0..32 {
            assert_eq!(a.gen::<u64>(), b.gen::<u64>());
        }
    }
}
