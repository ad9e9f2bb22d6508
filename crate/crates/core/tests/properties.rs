mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{c, gamma2_alternating};
use glab_core::gamma2::{gamma2, gamma2_sdp, DEFAULT_TOL};
use glab_core::groupoid::DEFAULT_ENUMERATION_CAP;
use glab_core::linalg::{self, schur_product, CMatrix};
use glab_core::multiplier::lift_group_multiplier;
use glab_core::subspace::{algebra_closure, bimodule_closure};
use glab_core::theorems::{functions_supported_in, galois_extract, random_generators, SUPPORT_TOL};
use glab_core::{corpus, ArrowFunction, ArrowSet, Complex64, Exec, Groupoid, MultiplierSymbol};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn groupoid(seed: u64) -> Groupoid {
    corpus::random_groupoid(&mut rng(seed), 10)
}

fn principal_groupoid(seed: u64) -> Groupoid {
    let mut r = rng(seed);
    loop {
        let g = corpus::random_groupoid(&mut r, 10);
        if g.is_principal() {
            return g;
        }
    }
}

fn close(a: &ArrowFunction, b: &ArrowFunction, tol: f64) -> bool {
    (a - b).sup_norm() <= tol * (1.0 + a.sup_norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn convolution_is_associative_and_adjoint_reverses(seed in any::<u64>()) {
        let g = groupoid(seed);
        let mut r = rng(seed ^ 1);
        let (a, b, d) = (ArrowFunction::random(&g, &mut r), ArrowFunction::random(&g, &mut r), ArrowFunction::random(&g, &mut r));
        let left = a.convolve(&b).unwrap().convolve(&d).unwrap();
        let right = a.convolve(&b.convolve(&d).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-12));
        let star = a.convolve(&b).unwrap().adjoint();
        prop_assert!(close(&star, &b.adjoint().convolve(&a.adjoint()).unwrap(), 1e-12));
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn reduced_norm_matches_power_iteration(seed in any::<u64>()) {
        let g = groupoid(seed);
        let f = ArrowFunction::random(&g, &mut rng(seed ^ 2));
        let oracle = f
            .rep_blocks(Exec::Sequential)
            .iter()
            .map(|b| linalg::spectral_norm_power(&b.matrix, 2000))
            .fold(0.0, f64::max);
        prop_assert!((f.reduced_norm() - oracle).abs() <= 1e-7 * (1.0 + oracle));
        prop_assert_eq!(f.reduced_norm_with(Exec::Sequential), f.reduced_norm_with(Exec::Parallel));
    }

    #[test]
    fn reduced_norm_is_between_sup_and_l1(seed in any::<u64>()) {
        let g = groupoid(seed);
        let f = ArrowFunction::random(&g, &mut rng(seed ^ 3));
        let l1: f64 = f.coeffs().iter().map(|z| z.norm()).sum();
        let n = f.reduced_norm();
        prop_assert!(f.sup_norm() <= n + 1e-12 && n <= l1 + 1e-12);
    }

    #[test]
    fn multiplier_acts_as_schur_product(seed in any::<u64>()) {
        let g = groupoid(seed);
        let mut r = rng(seed ^ 4);
        let h = MultiplierSymbol::new(ArrowFunction::random(&g, &mut r));
        let f = ArrowFunction::random(&g, &mut r);
        let hf = h.apply(&f).unwrap();
        for &x in g.units() {
            let expected = schur_product(h.schur_symbol(x).unwrap(), &f.rep_block(x).unwrap().matrix);
            prop_assert_eq!(hf.rep_block(x).unwrap().matrix, expected);
        }
    }

    #[test]
    fn op_norm_below_cb_norm(seed in any::<u64>()) {
        let g = groupoid(seed);
        let h = MultiplierSymbol::new(ArrowFunction::random(&g, &mut rng(seed ^ 5)));
        let op = h.op_norm(DEFAULT_TOL, seed).unwrap();
        prop_assert!(op.lower_bound <= op.value + 2.0 * DEFAULT_TOL);
    }

    #[test]
    fn cb_norm_is_a_norm(seed in any::<u64>(), scale in -3.0f64..3.0) {
        let g = groupoid(seed);
        let mut r = rng(seed ^ 6);
        let (a, b) = (ArrowFunction::random(&g, &mut r), ArrowFunction::random(&g, &mut r));
        let cb = |f: &ArrowFunction| MultiplierSymbol::new(f.clone()).cb_norm(DEFAULT_TOL).unwrap().value;
        prop_assert!(cb(&(&a + &b)) <= cb(&a) + cb(&b) + 3.0 * DEFAULT_TOL);
        let scaled = a.scale(Complex64::new(scale, 0.0));
        prop_assert!((cb(&scaled) - scale.abs() * cb(&a)).abs() <= 3.0 * DEFAULT_TOL * (1.0 + scale.abs()));
    }

    #[test]
    fn gamma2_matches_alternating_oracle(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let h = CMatrix::from_fn(n, n, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
        let cert = gamma2_sdp(&h, DEFAULT_TOL).unwrap();
        let oracle = gamma2_alternating(&h, 8, 400, &mut r);
        prop_assert!((cert.value - oracle).abs() <= 2e-6, "sdp {} oracle {}", cert.value, oracle);
        prop_assert!(oracle <= cert.upper + 1e-9 && cert.lower <= cert.upper);
        prop_assert!(linalg::min_hermitian_eigenvalue(&cert.primal) >= -1e-9);
    }

    #[test]
    fn gamma2_of_psd_is_max_diagonal(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let a = CMatrix::from_fn(n, n, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
        let p = &a * a.adjoint();
        let diag = (0..n).map(|i| p[(i, i)].re).fold(0.0, f64::max);
        prop_assert_eq!(gamma2(&p, DEFAULT_TOL).unwrap().value, diag);
        prop_assert!((gamma2_sdp(&p, DEFAULT_TOL).unwrap().value - diag).abs() <= 2e-6 * (1.0 + diag));
    }

    #[test]
    fn lifted_multiplier_keeps_cb_norm(seed in any::<u64>()) {
        let action = corpus::s3_on_three_points();
        let mut r = rng(seed);
        let h: Vec<Complex64> = (0..action.elements().len()).map(|_| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
        let lifted = lift_group_multiplier(&action, &h).unwrap().cb_norm(DEFAULT_TOL).unwrap().value;
        let group = action.group_groupoid();
        let own = MultiplierSymbol::new(ArrowFunction::from_coeffs(&group, h).unwrap()).cb_norm(DEFAULT_TOL).unwrap().value;
        prop_assert!(lifted <= own + 2.0 * DEFAULT_TOL);
    }

    #[test]
    fn restrictions_partition_arrows(seed in any::<u64>()) {
        let g = groupoid(seed);
        for f in g.invariant_subsets() {
            let u = ArrowSet::from_indices(g.len(), g.units().iter().copied().filter(|&x| !f.contains(x)));
            prop_assert_eq!(g.restrict(&f).unwrap().len() + g.restrict(&u).unwrap().len(), g.len());
        }
    }

    #[test]
    fn galois_round_trip(seed in any::<u64>()) {
        let g = groupoid(seed);
        for h in g.enumerate_subgroupoids(true, DEFAULT_ENUMERATION_CAP).unwrap() {
            prop_assert_eq!(galois_extract(&functions_supported_in(&g, &h)).unwrap().arrows, h);
        }
    }

    #[test]
    fn intermediate_algebras_are_coordinate_on_principal_groupoids(seed in any::<u64>()) {
        let g = principal_groupoid(seed);
        let gens = random_generators(&g, &mut rng(seed ^ 7));
        let b = algebra_closure(&g, &gens, true).unwrap();
        let e = galois_extract(&b).unwrap();
        prop_assert!(e.is_subgroupoid && e.contains_units);
        prop_assert!(b.same_subspace(&functions_supported_in(&g, &e.arrows), 1e-8));
    }

    #[test]
    fn bimodules_are_coordinate_on_principal_groupoids(seed in any::<u64>()) {
        let g = principal_groupoid(seed);
        let gens = random_generators(&g, &mut rng(seed ^ 8));
        let m = bimodule_closure(&g, &gens).unwrap();
        let u = m.support_union(SUPPORT_TOL);
        prop_assert!(m.same_subspace(&functions_supported_in(&g, &u), 1e-8));
    }
}

#[test]
fn gamma2_slow_oracle_case() {
    let mut r = rng(13120740548823548568);
    let h = CMatrix::from_fn(3, 3, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
    let cert = gamma2_sdp(&h, DEFAULT_TOL).unwrap();
    let oracle = gamma2_alternating(&h, 8, 400, &mut r);
    assert!((cert.value - oracle).abs() <= 2e-6 && oracle <= cert.upper + 1e-9);
    assert!(cert.gap() <= 2.0 * DEFAULT_TOL);
}
