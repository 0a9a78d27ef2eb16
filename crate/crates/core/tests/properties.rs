//! Property suites over the numeric kernels, the exponential-family layer,
//! and the two objectives: algebraic identities under random inputs plus
//! seeded convexity/positivity sweeps.

use nce_landscape::expfam::{mix_seed, FamilySpec, SplitMix64, TauParam};
use nce_landscape::numerics::{
    fd_gradient, integrate, log_sum_exp, sym_eigen, QuadratureSpec, SymMat,
};
use nce_landscape::objective::{Backend, Batch, ClipPolicy, LossKind, Objective};
use nce_landscape::optim::{step, Algo, AlgoConfig};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_sum_exp_is_shift_invariant(
        values in prop::collection::vec(-50.0..50.0f64, 1..8),
        shift in -30.0..30.0f64,
    ) {
        let base = log_sum_exp(&values).unwrap();
        let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
        let moved = log_sum_exp(&shifted).unwrap();
        prop_assert!((moved - (base + shift)).abs() <= 1e-9, "{moved} vs {}", base + shift);
    }

    #[test]
    fn gaussian_log_density_matches_quadratic_form(
        theta in -5.0..5.0f64,
        x in -8.0..8.0f64,
    ) {
        let fam = FamilySpec::gaussian_mean_1d();
        let tau = fam.tau_of_theta(&[theta]).unwrap();
        let lp = fam.log_pdf(&tau, &[x]);
        let expect = -0.5 * (x - theta) * (x - theta) - 0.918_938_533_204_672_7;
        prop_assert!((lp - expect).abs() <= 1e-11, "{lp} vs {expect}");
    }

    #[test]
    fn ngd_step_length_equals_eta(
        g0 in -10.0..10.0f64,
        g1 in -10.0..10.0f64,
        eta in 1e-3..10.0f64,
    ) {
        prop_assume!(g0 * g0 + g1 * g1 > 1e-6);
        let cfg = AlgoConfig::new(Algo::Ngd, eta, 1);
        let tau = TauParam::new(vec![0.3], -0.7);
        let out = step(&cfg, &tau, &[g0, g1], None).unwrap();
        let len = ((out.theta[0] - 0.3).powi(2) + (out.alpha + 0.7).powi(2)).sqrt();
        prop_assert!((len - eta).abs() <= 1e-12 * (1.0 + eta), "{len} vs {eta}");
    }

    #[test]
    fn eigen_shift_and_reconstruction(
        a in -5.0..5.0f64,
        b in -5.0..5.0f64,
        c in -5.0..5.0f64,
        d in -5.0..5.0f64,
        e in -5.0..5.0f64,
        f in -5.0..5.0f64,
        shift in -4.0..4.0f64,
    ) {
        let mut m = SymMat::zeros(3);
        m.set_sym(0, 0, a);
        m.set_sym(1, 1, b);
        m.set_sym(2, 2, c);
        m.set_sym(0, 1, d);
        m.set_sym(0, 2, e);
        m.set_sym(1, 2, f);
        let eig = sym_eigen(&m).unwrap();
        // Reconstruction: sum_k lambda_k v_k v_k^T recovers the matrix.
        for i in 0..3 {
            for j in 0..3 {
                let mut r = 0.0;
                for k in 0..3 {
                    r += eig.eigenvalues[k] * eig.eigenvectors[k][i] * eig.eigenvectors[k][j];
                }
                prop_assert!((r - m.get(i, j)).abs() <= 1e-8, "entry ({i},{j})");
            }
        }
        // Adding shift * I shifts every eigenvalue by shift.
        let mut ms = m.clone();
        for i in 0..3 {
            ms.set_sym(i, i, m.get(i, i) + shift);
        }
        let eig_s = sym_eigen(&ms).unwrap();
        for k in 0..3 {
            prop_assert!((eig_s.eigenvalues[k] - eig.eigenvalues[k] - shift).abs() <= 1e-8);
        }
    }

    #[test]
    fn finite_differences_recover_polynomial_gradients(
        x0 in -3.0..3.0f64,
        x1 in -3.0..3.0f64,
    ) {
        let f = |v: &[f64]| v[0] * v[0] * v[1] + 3.0 * v[1] - 0.5 * v[0];
        let g = fd_gradient(f, &[x0, x1], 1e-5);
        let expect = [2.0 * x0 * x1 - 0.5, x0 * x0 + 3.0];
        for k in 0..2 {
            prop_assert!((g[k] - expect[k]).abs() <= 1e-7 * (1.0 + expect[k].abs()));
        }
    }

    #[test]
    fn clip_with_absent_caps_is_identity(
        theta in -3.0..3.0f64,
        alpha in -3.0..3.0f64,
        seed in 0u64..1000,
    ) {
        let obj = Objective::gaussian_1d(LossKind::Ence, 2.0, 0.0).unwrap();
        let batch = Batch::sample(&obj.family, &obj.tau_star, &obj.tau_q, 32, seed).unwrap();
        let tau = TauParam::new(vec![theta], alpha);
        let a = obj.empirical_gradient(&tau, &batch, &ClipPolicy::none()).unwrap();
        let b = obj
            .empirical_gradient(&tau, &batch, &ClipPolicy { grad_norm_cap: None, log_ratio_cap: None })
            .unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn integration_is_exact_on_cubics(
        c0 in -5.0..5.0f64,
        c1 in -5.0..5.0f64,
        c2 in -5.0..5.0f64,
        c3 in -5.0..5.0f64,
        lo in -4.0..0.0f64,
        width in 0.5..6.0f64,
    ) {
        let spec = QuadratureSpec::new(lo, lo + width);
        let v = integrate(|x| c0 + c1 * x + c2 * x * x + c3 * x * x * x, &spec).unwrap();
        let anti = |x: f64| c0 * x + c1 * x * x / 2.0 + c2 * x * x * x / 3.0 + c3 * x * x * x * x / 4.0;
        let expect = anti(lo + width) - anti(lo);
        prop_assert!((v - expect).abs() <= 1e-9 * (1.0 + expect.abs()), "{v} vs {expect}");
    }
}

fn random_tau(rng: &mut SplitMix64) -> TauParam {
    TauParam::new(vec![rng.next_range(-3.0, 3.0)], rng.next_range(-3.0, 3.0))
}

/// Population Hessians of both losses stay positive semidefinite across
/// random extended parameters.
#[test]
fn hessians_are_positive_semidefinite_everywhere() {
    for kind in [LossKind::Nce, LossKind::Ence] {
        let obj = Objective::gaussian_1d(kind, 2.0, 0.0).unwrap();
        let mut rng = SplitMix64::new(mix_seed(7, kind as u64));
        for _ in 0..50 {
            let tau = random_tau(&mut rng);
            let min_eig = obj.min_hessian_eigenvalue(&tau).unwrap();
            assert!(min_eig >= -1e-10, "{kind:?} at {tau:?}: min eigenvalue {min_eig}");
        }
    }
}

/// Convexity along random segments: the midpoint loss never exceeds the
/// chord average.
#[test]
fn losses_are_convex_along_segments() {
    for kind in [LossKind::Nce, LossKind::Ence] {
        let obj = Objective::gaussian_1d(kind, 2.0, 0.0).unwrap();
        let mut rng = SplitMix64::new(mix_seed(11, kind as u64));
        for _ in 0..50 {
            let a = random_tau(&mut rng);
            let b = random_tau(&mut rng);
            let mid = TauParam::new(
                vec![0.5 * (a.theta[0] + b.theta[0])],
                0.5 * (a.alpha + b.alpha),
            );
            let la = obj.population_loss(&a).unwrap();
            let lb = obj.population_loss(&b).unwrap();
            let lm = obj.population_loss(&mid).unwrap();
            assert!(
                lm <= 0.5 * (la + lb) + 1e-9 * (1.0 + la.abs() + lb.abs()),
                "{kind:?}: midpoint {lm} above chord {}",
                0.5 * (la + lb)
            );
        }
    }
}

/// The data parameter is the global minimizer of the population loss.
#[test]
fn data_parameter_minimizes_population_loss() {
    for kind in [LossKind::Nce, LossKind::Ence] {
        let obj = Objective::gaussian_1d(kind, 2.0, 0.0).unwrap();
        let l_star = obj.population_loss(&obj.tau_star.clone()).unwrap();
        let mut rng = SplitMix64::new(mix_seed(13, kind as u64));
        for _ in 0..50 {
            let tau = random_tau(&mut rng);
            let l = obj.population_loss(&tau).unwrap();
            assert!(l >= l_star - 1e-10, "{kind:?}: {l} below optimum {l_star}");
        }
    }
}

/// Monte Carlo population estimates agree with quadrature within four
/// standard errors, coordinate by coordinate.
#[test]
fn monte_carlo_matches_quadrature_within_four_standard_errors() {
    let quad = Objective::gaussian_1d(LossKind::Nce, 2.0, 0.0).unwrap();
    let tau = TauParam::new(vec![0.8], 1.0);
    let g_quad = quad.population_gradient(&tau).unwrap();
    let l_quad = quad.population_loss(&tau).unwrap();
    let mc = quad.with_backend(Backend::MonteCarlo { n: 200_000, seed: 21 }).unwrap();
    let (l_mc, l_se) = mc.mc_loss_with_se(&tau).unwrap();
    assert!((l_mc - l_quad).abs() <= 4.0 * l_se, "loss {l_mc} vs {l_quad}, se {l_se}");
    let (g_mc, g_se) = mc.mc_gradient_with_se(&tau).unwrap();
    for k in 0..g_quad.len() {
        assert!(
            (g_mc[k] - g_quad[k]).abs() <= 4.0 * g_se[k],
            "coordinate {k}: {} vs {}, se {}",
            g_mc[k],
            g_quad[k],
            g_se[k]
        );
    }
}

/// Gradients and Hessians agree with central finite differences of the
/// level below them.
#[test]
fn derivatives_match_finite_differences() {
    for kind in [LossKind::Nce, LossKind::Ence] {
        let obj = Objective::gaussian_1d(kind, 2.0, 0.0).unwrap();
        let mut rng = SplitMix64::new(mix_seed(17, kind as u64));
        for _ in 0..5 {
            let tau = random_tau(&mut rng);
            let v = tau.as_vec();
            let g = obj.population_gradient(&tau).unwrap();
            let fd_g = fd_gradient(
                |w| obj.population_loss(&TauParam::from_vec(w)).unwrap(),
                &v,
                1e-5,
            );
            for k in 0..2 {
                let scale = 1.0 + g[k].abs();
                assert!(
                    (g[k] - fd_g[k]).abs() <= 1e-5 * scale,
                    "{kind:?} gradient coordinate {k}: {} vs {}",
                    g[k],
                    fd_g[k]
                );
            }
            let h = obj.population_hessian(&tau).unwrap();
            let fd_h = nce_landscape::numerics::fd_jacobian(
                |w| obj.population_gradient(&TauParam::from_vec(w)).unwrap(),
                &v,
                1e-5,
            );
            for i in 0..2 {
                for j in 0..2 {
                    let scale = 1.0 + h.get(i, j).abs();
                    assert!(
                        (h.get(i, j) - fd_h[i][j]).abs() <= 1e-4 * scale,
                        "{kind:?} Hessian entry ({i},{j}): {} vs {}",
                        h.get(i, j),
                        fd_h[i][j]
                    );
                }
            }
        }
    }
}
