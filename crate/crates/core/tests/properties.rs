use jsrlab_core::inequalities::{
    check_other_inequality, check_power_inequality, check_theorem_b, check_weaker_lemma, estimate_s,
};
use jsrlab_core::invariants::{max_relative_deviation, permutations, procesi_map, tuple_norm, Permutation};
use jsrlab_core::matcore::{spectral_norm, spectral_radius};
use jsrlab_core::norms::{operator_norm, NormSpec};
use jsrlab_core::random::{gaussian_matrix, gaussian_set, positive_diagonal, trial_rng, well_conditioned};
use jsrlab_core::semigroup::{jsr_bounds, BoundsConfig, DepthStatus};
use jsrlab_core::{CMatrix, MatrixSet};
use proptest::prelude::*;
use rand::Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn norms(seed: u64, d: usize) -> Vec<NormSpec> {
    let mut rng = trial_rng(seed, 99);
    vec![
        NormSpec::Euclidean,
        NormSpec::VectorSup,
        NormSpec::ellipsoidal(well_conditioned(&mut rng, d, 1e3)).unwrap(),
    ]
}

fn s_estimate_case(seed: u64, d: usize) -> Result<(), TestCaseError> {
    let set = gaussian_set(&mut trial_rng(seed, 0), d, 2, true);
    let e = estimate_s(&set, 4000, seed, 6, 1e-8).unwrap();
    let euclid = {
        let p = jsr_bounds(&set, &NormSpec::Euclidean, &BoundsConfig::exhaustive(d)).unwrap();
        p.records[d - 1].norm_root.powi(d as i32) / p.records[0].norm_root.powi(d as i32 - 1)
    };
    prop_assert!(e.value >= euclid * (1.0 - 1e-12));
    prop_assert!(e.consistent, "estimate {} below lower bound {}", e.value, e.jsr_lower);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_norms_are_submultiplicative(seed in any::<u64>(), d in 1usize..=5) {
        let mut rng = trial_rng(seed, 0);
        let a = gaussian_matrix(&mut rng, d);
        let b = gaussian_matrix(&mut rng, d);
        for spec in norms(seed, d) {
            let ab = operator_norm(&spec, &(&a * &b)).unwrap();
            let bound = operator_norm(&spec, &a).unwrap() * operator_norm(&spec, &b).unwrap();
            prop_assert!(ab <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn spectral_radius_facts(seed in any::<u64>(), d in 1usize..=5, n in 1usize..=6) {
        let a = gaussian_matrix(&mut trial_rng(seed, 0), d);
        let rho = spectral_radius(&a).unwrap();
        for spec in norms(seed, d) {
            prop_assert!(rho <= operator_norm(&spec, &a).unwrap() * (1.0 + 1e-10));
        }
        prop_assert!(a.trace().norm() <= d as f64 * rho * (1.0 + 1e-10) + 1e-12);
        let rho_n = spectral_radius(&a.pow(n)).unwrap();
        prop_assert!(rel(rho_n, rho.powi(n as i32)) < 1e-8);
    }

    #[test]
    fn sign_is_a_homomorphism(seed in any::<u64>(), s in 1usize..=6) {
        let all: Vec<Permutation> = permutations(s).collect();
        let mut rng = trial_rng(seed, 0);
        let a = &all[rng.random_range(0..all.len())];
        let b = &all[rng.random_range(0..all.len())];
        prop_assert_eq!(a.compose(b).unwrap().sign(), a.sign() * b.sign());
    }

    #[test]
    fn ratios_are_scale_invariant(seed in any::<u64>(), d in 2usize..=4, t in 1e-3f64..1e3) {
        let mut rng = trial_rng(seed, 0);
        let a = gaussian_matrix(&mut rng, d);
        let p1 = check_power_inequality(&a, &NormSpec::VectorSup, 1e-8).unwrap().ratio.unwrap();
        let p2 = check_power_inequality(&a.scale_real(t), &NormSpec::VectorSup, 1e-8).unwrap().ratio.unwrap();
        prop_assert!(rel(p1, p2) < 1e-9);

        let set = gaussian_set(&mut rng, d, 2, false);
        let s = positive_diagonal(&mut rng, d, 3.0);
        let w1 = check_weaker_lemma(&set, &s, 1e-8).unwrap().ratio.unwrap();
        let w2 = check_weaker_lemma(&set.scale_real(t), &s, 1e-8).unwrap().ratio.unwrap();
        prop_assert!(rel(w1, w2) < 1e-9);

        let tuple: Vec<CMatrix> = (0..d).map(|_| gaussian_matrix(&mut rng, d)).collect();
        let scaled: Vec<CMatrix> = tuple.iter().map(|m| m.scale_real(t)).collect();
        let o1 = check_other_inequality(&tuple, &NormSpec::Euclidean).unwrap().ratio.unwrap();
        let o2 = check_other_inequality(&scaled, &NormSpec::Euclidean).unwrap().ratio.unwrap();
        prop_assert!(rel(o1, o2) < 1e-9);
    }

    #[test]
    fn q_is_conjugation_invariant(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let set = gaussian_set(&mut rng, 2, 2, true);
        let s = well_conditioned(&mut rng, 2, 1e3);
        let a = check_theorem_b(&set, 4, None, 1e-9).unwrap();
        let b = check_theorem_b(&set.conjugate(&s).unwrap(), 4, None, 1e-9).unwrap();
        prop_assert!(rel(a.q, b.q) < 1e-8);
        prop_assert!(a.restricted_matches);
    }

    #[test]
    fn trace_vector_is_conjugation_invariant(seed in any::<u64>(), d in 2usize..=3) {
        let mut rng = trial_rng(seed, 0);
        let set = gaussian_set(&mut rng, d, 2, true);
        let s = well_conditioned(&mut rng, d, 1e3);
        let a = procesi_map(set.members()).unwrap();
        let b = procesi_map(set.conjugate(&s).unwrap().members()).unwrap();
        prop_assert!(max_relative_deviation(&a, &b, tuple_norm(set.members()).unwrap()).unwrap() < 1e-8);
    }

    #[test]
    fn bound_records_are_consistent(seed in any::<u64>(), size in 1usize..=3, pruning in any::<bool>()) {
        let set = gaussian_set(&mut trial_rng(seed, 0), 2, size, true);
        let config = BoundsConfig { max_depth: 6, pruning, ..BoundsConfig::default() };
        let r = jsr_bounds(&set, &NormSpec::Euclidean, &config).unwrap();
        prop_assert!(r.best_lower <= r.best_upper + 1e-9);
        let uppers: Vec<f64> = r.records.iter().filter_map(|x| x.upper).collect();
        prop_assert_eq!(r.best_upper, uppers.iter().copied().fold(f64::INFINITY, f64::min));
        for w in r.records.windows(2) {
            prop_assert!(w[1].lower >= w[0].lower);
        }
        prop_assert!(r.records.iter().all(|x| x.status != DepthStatus::Incomplete));
    }

    #[test]
    fn pruning_keeps_the_lower_bound(seed in any::<u64>()) {
        let set = gaussian_set(&mut trial_rng(seed, 0), 2, 2, true);
        let exact = jsr_bounds(&set, &NormSpec::Euclidean, &BoundsConfig::exhaustive(8)).unwrap();
        let pruned = jsr_bounds(&set, &NormSpec::Euclidean, &BoundsConfig { max_depth: 8, ..Default::default() }).unwrap();
        prop_assert!(pruned.best_upper >= exact.best_lower - 1e-12);
        prop_assert!(pruned.best_lower <= exact.best_lower);
        prop_assert!(rel(pruned.best_lower, exact.best_lower) < 1e-12);
    }

    #[test]
    fn parallel_search_matches_sequential(seed in any::<u64>(), size in 2usize..=3) {
        let set = gaussian_set(&mut trial_rng(seed, 0), 3, size, true);
        let seq = BoundsConfig::exhaustive(5);
        let par = BoundsConfig { parallel: true, ..seq.clone() };
        let a = jsr_bounds(&set, &NormSpec::VectorSup, &seq).unwrap();
        let b = jsr_bounds(&set, &NormSpec::VectorSup, &par).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn s_estimate_dominates_lower_bound_d2(seed in any::<u64>()) {
        s_estimate_case(seed, 2)?;
    }

    #[test]
    fn s_estimate_dominates_lower_bound_d3(seed in any::<u64>()) {
        s_estimate_case(seed, 3)?;
    }
}

#[test]
fn spectral_norm_of_unitary_is_one() {
    let u = CMatrix::from_real([[0.6, -0.8], [0.8, 0.6]]);
    assert!((spectral_norm(&u).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn gripenberg_is_its_own_conjugate_by_swap() {
    let swap = CMatrix::from_real([[0.0, 1.0], [1.0, 0.0]]);
    let g = MatrixSet::gripenberg();
    let c = g.conjugate(&swap).unwrap();
    assert!(c.get(0).approx_eq(g.get(1), 0.0) && c.get(1).approx_eq(g.get(0), 0.0));
}
