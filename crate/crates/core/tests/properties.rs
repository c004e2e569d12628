use lcp_bounds::bounds::{
    certify, check_annulus_bound, check_ball_bound, check_invertible_bound, check_ratio_bound, Bound, Theorem,
};
use lcp_bounds::gallery::{
    projection_example, random_psd_instance, random_ray_instance, random_symmetric_operator, rng_from_seed, BPolicy,
    SignPolicy,
};
use lcp_bounds::io::write_instance;
use lcp_bounds::lcp::{
    detect_null_ray, enumerate_solutions, solve_lemke, solve_pgs, verify_solution, LcpInstance, DEFAULT_MAX_ITERS,
};
use lcp_bounds::operator::SymOperator;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn unit_samples(n: usize, count: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal)).normalize())
        .collect()
}

fn sign_policy() -> impl Strategy<Value = SignPolicy> {
    prop_oneof![
        Just(SignPolicy::Positive),
        Just(SignPolicy::Negative),
        Just(SignPolicy::Mixed)
    ]
}

/// (n, rank, seed) with 1 <= rank <= n.
fn shape(max_n: usize) -> impl Strategy<Value = (usize, usize, u64)> {
    (1..=max_n).prop_flat_map(|n| (Just(n), 1..=n, any::<u64>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn penrose_identities_hold((n, r, seed) in shape(20), signs in sign_policy()) {
        let (op, _) = random_symmetric_operator(n, r, 0.01, 100.0, signs, seed).unwrap();
        let p = op.penrose_residuals(op.pseudoinverse().matrix());
        prop_assert!(p.max() <= 1e-8, "{p:?}");
    }

    #[test]
    fn pseudoinverse_is_symmetric((n, r, seed) in shape(20), signs in sign_policy()) {
        let (op, _) = random_symmetric_operator(n, r, 0.01, 100.0, signs, seed).unwrap();
        let s = op.pseudoinverse();
        let s = s.matrix();
        prop_assert!((s - s.transpose()).amax() <= 1e-12);
    }

    #[test]
    fn square_root_squares_back_and_shares_null_space((n, r, seed) in shape(20)) {
        let (op, _) = random_symmetric_operator(n, r, 0.01, 100.0, SignPolicy::Positive, seed).unwrap();
        let root = op.sqrt_psd().unwrap();
        prop_assert!(rel(&(root.matrix() * root.matrix()), op.matrix()) <= 1e-8);
        let a = op.range_decomposition().null_projector;
        let b = root.range_decomposition().null_projector;
        prop_assert!((a.matrix() - b.matrix()).amax() <= 1e-8);
        prop_assert_eq!(root.rank(), op.rank());
    }

    #[test]
    fn psd_flag_matches_samples((n, r, seed) in shape(12), signs in sign_policy()) {
        let (op, _) = random_symmetric_operator(n, r, 0.1, 10.0, signs, seed).unwrap();
        let s = op.spectral_summary();
        prop_assert_eq!(s.is_psd, s.small_m >= -op.rank_tol());
        let samples = unit_samples(n, 1000, seed ^ 1);
        let min_sample = samples.iter().map(|x| op.quadratic_form(x)).fold(f64::INFINITY, f64::min);
        let max_sample = samples.iter().map(|x| op.quadratic_form(x)).fold(f64::NEG_INFINITY, f64::max);
        if s.is_psd {
            prop_assert!(min_sample >= -1e-8);
        }
        prop_assert!(min_sample >= s.small_m - 1e-10 && max_sample <= s.big_m + 1e-10);
    }

    #[test]
    fn m_r_is_the_infimum_over_the_range((n, r, seed) in shape(12), signs in sign_policy()) {
        let (op, _) = random_symmetric_operator(n, r, 0.1, 10.0, signs, seed).unwrap();
        let m_r = op.spectral_summary().m_r.unwrap();
        let q = op.eigenvectors().select_columns(&op.range_indices());
        let sampled = unit_samples(q.ncols(), 1000, seed ^ 2)
            .iter()
            .map(|y| op.quadratic_form(&(&q * y)))
            .fold(f64::INFINITY, f64::min);
        prop_assert!(sampled >= m_r - 1e-6, "sampled {sampled} below m_r {m_r}");
        let attained = (0..q.ncols())
            .map(|j| op.quadratic_form(&q.column(j).into_owned()))
            .fold(f64::INFINITY, f64::min);
        prop_assert!((attained - m_r).abs() <= 1e-10 * m_r.abs().max(1.0));
    }

    #[test]
    fn sup_variants_agree_when_m_r_positive((n, r, seed) in shape(20)) {
        let (op, _) = random_symmetric_operator(n, r, 0.01, 100.0, SignPolicy::Positive, seed).unwrap();
        let s = op.sup_variants();
        prop_assert!((s.r1.unwrap() - s.r3).abs() <= 1e-12);
        prop_assert!((s.r2 - s.r4).abs() <= 1e-12);
        let samples = unit_samples(n, 200, seed ^ 3);
        prop_assert!(samples.iter().all(|x| op.quadratic_form(x) <= s.r3 + 1e-10));
    }

    #[test]
    fn duality_products_are_one((n, r, seed) in shape(30)) {
        let (op, _) = random_symmetric_operator(n, r, 1e-3, 1e3, SignPolicy::Positive, seed).unwrap();
        let d = op.verify_duality();
        prop_assert!(d.applicable && d.holds, "{d:?}");
    }

    #[test]
    fn equivalence_always_holds((n, r, seed) in shape(15), signs in sign_policy()) {
        let (op, _) = random_symmetric_operator(n, r, 0.1, 10.0, signs, seed).unwrap();
        prop_assert!(op.classify().equivalence_holds);
    }

    #[test]
    fn generating_spectrum_is_reported((n, r, seed) in shape(20)) {
        let ri = random_psd_instance(n, r, 0.1, 10.0, seed, BPolicy::FullSpace).unwrap();
        let s = ri.instance.operator().spectral_summary();
        prop_assert_eq!(s.rank, r);
        prop_assert!((s.big_m - ri.spectrum[0]).abs() <= 1e-10);
        prop_assert!((s.m_r.unwrap() - ri.spectrum[r - 1]).abs() <= 1e-10);
    }

    #[test]
    fn instance_files_are_deterministic((n, r, seed) in shape(10)) {
        let a = random_psd_instance(n, r, 0.1, 10.0, seed, BPolicy::Planted).unwrap();
        let b = random_psd_instance(n, r, 0.1, 10.0, seed, BPolicy::Planted).unwrap();
        prop_assert_eq!(write_instance(&a.instance), write_instance(&b.instance));
    }

    #[test]
    fn solver_solutions_verify((n, r, seed) in shape(15)) {
        let inst = random_psd_instance(n, r, 0.1, 10.0, seed, BPolicy::Planted).unwrap().instance;
        let lemke = solve_lemke(&inst, 1e-8, 50 * n).unwrap();
        prop_assert!(verify_solution(&inst, &lemke.z, 1e-8).pass);
        let pgs = solve_pgs(&inst, 1e-8, DEFAULT_MAX_ITERS).unwrap();
        prop_assert!(verify_solution(&inst, &pgs.z, 1e-8).pass);
    }

    #[test]
    fn unique_oracle_solution_is_found(n in 1..=6usize, seed in any::<u64>()) {
        let inst = random_psd_instance(n, n, 0.1, 10.0, seed, BPolicy::FullSpace).unwrap().instance;
        let en = enumerate_solutions(&inst, 6, 1e-8).unwrap();
        prop_assert_eq!(en.solutions.len(), 1);
        let only = &en.solutions[0].solution.z;
        let lemke = solve_lemke(&inst, 1e-8, 50 * n).unwrap();
        let pgs = solve_pgs(&inst, 1e-8, DEFAULT_MAX_ITERS).unwrap();
        prop_assert!((&lemke.z - only).amax() <= 1e-6);
        prop_assert!((&pgs.z - only).amax() <= 1e-6);
    }

    #[test]
    fn solutions_scale_with_b(n in 1..=12usize, seed in any::<u64>(), alpha in 0.1f64..10.0) {
        let inst = random_psd_instance(n, n, 0.1, 10.0, seed, BPolicy::FullSpace).unwrap().instance;
        let scaled = LcpInstance::new(inst.operator().clone(), inst.b() * alpha).unwrap();
        let z = solve_lemke(&inst, 1e-10, 50 * n).unwrap().z;
        let za = solve_lemke(&scaled, 1e-10, 50 * n).unwrap().z;
        prop_assert!((&za - &z * alpha).amax() <= 1e-6 * alpha.max(1.0));

        let t = inst.operator();
        let before = check_ball_bound(t, inst.b(), &z);
        let after = check_ball_bound(t, scaled.b(), &za);
        let (Bound::Value(r0), Bound::Value(r1)) = (before.rhs, after.rhs) else { unreachable!() };
        prop_assert!((r1 - alpha * r0).abs() <= 1e-10 * r1.abs().max(1.0));
        prop_assert_eq!(before.pass, after.pass);
    }

    #[test]
    fn ratio_and_invertible_bounds_coincide_at_full_rank(n in 1..=12usize, seed in any::<u64>()) {
        let ri = random_psd_instance(n, n, 0.1, 10.0, seed, BPolicy::Planted).unwrap();
        let inst = ri.instance;
        let z = ri.planted.unwrap();
        let ratio = check_ratio_bound(inst.operator(), inst.b(), &z);
        let inv = check_invertible_bound(inst.operator(), inst.b(), &z);
        prop_assert!(ratio.applicable && inv.applicable);
        let (Bound::Value(a), Bound::Value(b)) = (ratio.rhs, inv.rhs) else { unreachable!() };
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn annulus_collapses_for_scaled_projections(k in 1..=6usize, extra in 0..=4usize, alpha in 0.1f64..10.0, seed in any::<u64>()) {
        let n = k + extra;
        let diag: Vec<f64> = (0..n).map(|i| if i < k { alpha } else { 0.0 }).collect();
        let t = SymOperator::from_diagonal(&diag).unwrap();
        let mut rng = rng_from_seed(seed);
        let b = DVector::from_fn(n, |i, _| if i < k { rng.sample::<f64, _>(StandardNormal) } else { 0.0 });
        let inst = LcpInstance::new(t, b).unwrap();
        let sol = solve_lemke(&inst, 1e-10, 50 * n).unwrap();
        let c = check_annulus_bound(inst.operator(), inst.b(), &sol.z);
        if c.applicable {
            let Bound::Interval { lower, upper } = c.rhs else { unreachable!() };
            prop_assert!((upper - lower).abs() <= 1e-12 * upper.max(1.0));
            prop_assert!((c.lhs - inst.b().norm() / (2.0 * alpha)).abs() <= 1e-8);
            prop_assert!(c.pass);
        }
    }

    #[test]
    fn ray_certificates_are_valid(n in 3..=15usize, seed in any::<u64>()) {
        let null_dim = 1 + (seed as usize % ((n - 1) / 2));
        let inst = random_ray_instance(n, null_dim, seed).unwrap().instance;
        let sol = solve_lemke(&inst, 1e-8, 50 * n).unwrap();
        let ray = detect_null_ray(&inst, &sol, 1e-8).expect("constructed null directions are rays");
        prop_assert!(inst.operator().apply(&ray.direction).norm() <= 1e-8);
        prop_assert!(ray.direction.min() >= 0.0);
        prop_assert!(ray.all_pass());
        let cert = certify(&inst, &sol, 1e-8).unwrap();
        prop_assert!(cert.check(Theorem::Ray).applicable && cert.check(Theorem::Ray).pass);
    }
}

#[test]
fn every_projection_example_certifies() {
    for n in 1..=10 {
        for k in 1..=n {
            let ex = projection_example(k, n).unwrap();
            let sol = solve_lemke(&ex.instance, 1e-10, 50 * n).unwrap();
            let cert = certify(&ex.instance, &sol, 1e-10).unwrap();
            assert!(cert.passes(), "k={k} n={n}");
            // a ray exists exactly when there are null coordinates
            assert_eq!(cert.check(Theorem::Ray).applicable, k < n, "k={k} n={n}");
        }
    }
}
