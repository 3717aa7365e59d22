mod common;

use std::collections::BTreeSet;

use common::*;
use everett_lab::distinguish::{
    binomial_lower_tail, derive_seed, find_distinguishing_basis, outcome_probabilities, perp_hit_test,
    sample_outcomes, theory_discrimination, Decision, MeasurementBasis, PERP_LABEL,
};
use everett_lab::engine::{compute_fs, run_everett, Scenario, Theory};
use everett_lab::observer::{make_toy_unitary, ObserverSpec};
use everett_lab::qlin::DensityMatrix;
use proptest::prelude::*;

fn b_labels() -> BTreeSet<String> {
    (1..=4).map(|i| format!("B{i}")).collect()
}

fn max_sigma_deviation(rho: &DensityMatrix, basis: &MeasurementBasis, n: usize, seed: u64) -> f64 {
    let probs = outcome_probabilities(rho, basis).unwrap();
    let mut counts = vec![0usize; basis.dim()];
    for s in sample_outcomes(rho, basis, n, seed).unwrap() {
        counts[s] += 1;
    }
    probs
        .iter()
        .zip(&counts)
        .map(|(&p, &c)| {
            let dev = (c as f64 / n as f64 - p).abs();
            if p == 0.0 {
                assert_eq!(c, 0, "outcome with probability zero was sampled");
                0.0
            } else {
                dev / (p * (1.0 - p) / n as f64).sqrt()
            }
        })
        .fold(0.0, f64::max)
}

#[test]
fn sampler_frequencies_converge() {
    let rho = random_density(&[8], 3, 11);
    let basis = MeasurementBasis::canonical(8);
    for seed in 0..20 {
        assert!(max_sigma_deviation(&rho, &basis, 100_000, seed) < 5.0, "seed {seed}");
    }
}

#[test]
fn sampler_never_hits_b_states_for_toy() {
    let sc = Scenario::toy(4, Theory::Everett);
    let rho = run_everett(&sc).unwrap().rho_s;
    let basis = MeasurementBasis::toy_ab();
    let samples = sample_outcomes(&rho, &basis, 10_000, 3).unwrap();
    assert!(samples.iter().all(|&s| s < 4));
    assert!(max_sigma_deviation(&rho, &basis, 100_000, 4) < 5.0);
}

#[test]
fn sampler_is_reproducible() {
    let rho = random_density(&[4], 2, 1);
    let basis = MeasurementBasis::canonical(4);
    assert_eq!(
        sample_outcomes(&rho, &basis, 500, 77).unwrap(),
        sample_outcomes(&rho, &basis, 500, 77).unwrap()
    );
    assert_ne!(
        sample_outcomes(&rho, &basis, 500, 77).unwrap(),
        sample_outcomes(&rho, &basis, 500, 78).unwrap()
    );
}

#[test]
fn tail_matches_statrs() {
    for &n in &[1usize, 7, 50, 100, 1000] {
        for &p in &[0.01, 0.25, 0.5, 0.875] {
            for k in [0, 1, n / 3, n / 2, n.saturating_sub(1)] {
                let want = binomial_cdf_oracle(k as u64, n as u64, p);
                let got = binomial_lower_tail(k, n, p);
                let tol = 1e-12_f64.max(want * 1e-9);
                assert!((got - want).abs() <= tol, "n {n} p {p} k {k}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn tail_matches_direct_pmf_sum() {
    // Small n: exact binomial coefficients fit in u64.
    for n in 1u64..=20 {
        for k in 0..=n {
            let pmf = |j: u64, choose: u64| choose as f64 * 0.3f64.powi(j as i32) * 0.7f64.powi((n - j) as i32);
            let mut choose = 1u64;
            let mut sum = pmf(0, choose);
            for j in 1..=k {
                choose = choose * (n - j + 1) / j;
                sum += pmf(j, choose);
            }
            assert!((binomial_lower_tail(k as usize, n as usize, 0.3) - sum.min(1.0)).abs() < 1e-13);
        }
    }
}

#[test]
fn zero_hits_in_1000_halves() {
    let p = binomial_lower_tail(0, 1000, 0.5);
    assert!(p > 0.0);
    assert!((p / 0.5f64.powi(1000) - 1.0).abs() < 1e-9);
}

#[test]
fn calibration_under_mixed_null() {
    let rho = DensityMatrix::maximally_mixed(vec![8]);
    let basis = MeasurementBasis::toy_ab();
    let labels = b_labels();
    let rejected = (0..1000u64)
        .filter(|&t| {
            let samples = sample_outcomes(&rho, &basis, 100, derive_seed(5, t)).unwrap();
            perp_hit_test(&samples, &basis, &labels, 0.01).unwrap().decision == Decision::CollapseRejected
        })
        .count();
    assert!(rejected as f64 / 1000.0 <= 0.02, "rejection rate {}", rejected as f64 / 1000.0);
}

#[test]
fn test_reports_hits_and_null_probability() {
    let basis = MeasurementBasis::toy_ab();
    let samples = vec![0, 4, 5, 1, 7, 2];
    let r = perp_hit_test(&samples, &basis, &b_labels(), 0.05).unwrap();
    assert_eq!(r.perp_hits, 3);
    assert_eq!(r.p0, 0.5);
    assert!((r.p_value_under_copenhagen - binomial_cdf_oracle(3, 6, 0.5)).abs() < 1e-14);
    assert_eq!(r.decision, Decision::CollapseNotRejected);
}

#[test]
fn distinguishing_basis_isolates_fs() {
    let sc = Scenario::toy(2, Theory::Everett);
    let rho = run_everett(&sc).unwrap().rho_s;
    let fs = compute_fs(&make_toy_unitary()).unwrap();
    let basis = find_distinguishing_basis(&rho, Some(&fs)).unwrap();
    let probs = outcome_probabilities(&rho, &basis).unwrap();
    for (label, p) in basis.labels().iter().zip(probs) {
        if label.starts_with(PERP_LABEL) {
            assert!(p < 1e-10);
        }
    }
}

#[test]
fn toy_discriminates() {
    let sc = Scenario::toy(4, Theory::Everett);
    let d = theory_discrimination(&sc, 1000, 1e-6, 2024).unwrap();
    assert!(d.discriminating());
    assert_eq!(d.fs_dim, 4);
    assert_eq!(d.perp_dim, 4);
    assert!(!d.bound_vacuous);
    assert!(d.warnings.is_empty());
    assert_eq!(d.everett.as_ref().unwrap().perp_hits, 0);
}

#[test]
fn recorder_with_small_memory_discriminates() {
    let spec = ObserverSpec::recording(1).unwrap();
    let sc = Scenario::new(4, 3, spec, Theory::Everett, 0).unwrap();
    for seed in 0..10 {
        let d = theory_discrimination(&sc, 1000, 1e-6, seed).unwrap();
        assert!(d.discriminating(), "seed {seed}");
        assert!(d.fs_dim <= 4);
    }
}

#[test]
fn vacuous_bound_is_flagged() {
    let spec = ObserverSpec::recording(2).unwrap();
    let sc = Scenario::new(2, 2, spec, Theory::Everett, 0).unwrap();
    let d = theory_discrimination(&sc, 200, 1e-6, 0).unwrap();
    assert!(d.bound_vacuous);
    assert!(d.warnings.iter().any(|w| w.starts_with("bound vacuous")));
    assert!(!d.discriminating());
}

proptest! {
    #[test]
    fn tail_is_monotone(n in 1usize..400, p in 0.01f64..0.99, a in 0usize..400, b in 0usize..400) {
        let (lo, hi) = (a.min(b).min(n), a.max(b).min(n));
        // Relative slack absorbs rounding of tails close to 1.
        let le = |x: f64, y: f64| x <= y * (1.0 + 1e-12);
        prop_assert!(le(binomial_lower_tail(lo, n, p), binomial_lower_tail(hi, n, p)));
        let k = lo.min(n - 1);
        prop_assert!(le(binomial_lower_tail(k, n + 1, p), binomial_lower_tail(k, n, p)));
        let q = (p + 0.005).min(0.999);
        prop_assert!(le(binomial_lower_tail(k, n, q), binomial_lower_tail(k, n, p)));
    }

    #[test]
    fn sampled_outcomes_stay_in_range(seed in any::<u64>(), n in 1usize..300) {
        let rho = random_density(&[6], 2, seed);
        let basis = MeasurementBasis::canonical(6);
        let samples = sample_outcomes(&rho, &basis, n, seed).unwrap();
        prop_assert_eq!(samples.len(), n);
        prop_assert!(samples.iter().all(|&s| s < 6));
    }
}

#[test]
fn copenhagen_samples_pass_the_null() {
    let rho = DensityMatrix::maximally_mixed(vec![8]);
    let basis = MeasurementBasis::toy_ab();
    let samples = sample_outcomes(&rho, &basis, 100, 42).unwrap();
    let r = perp_hit_test(&samples, &basis, &b_labels(), 1e-6).unwrap();
    assert!((35..=65).contains(&r.perp_hits), "hits {}", r.perp_hits);
    assert!(r.p_value_under_copenhagen > 0.01);
    assert_eq!(r.decision, Decision::CollapseNotRejected);
}
