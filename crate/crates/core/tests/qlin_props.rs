mod common;

use common::*;
use everett_lab::observer::{toy_a_states, toy_b_states};
use everett_lab::qlin::{
    complement, kron, kron_matrix, max_abs_diff, numerical_rank, random_unitary, schmidt, span_subspace, unitarity_error,
    CMatrix, DensityMatrix, StateVector, Subspace, UnitaryOperator, C64, DEFAULT_TOL,
};
use proptest::prelude::*;

#[test]
fn kron_identities() {
    let i2 = UnitaryOperator::identity(vec![2]);
    let i4 = kron(&i2, &i2);
    assert_eq!(i4.matrix(), &CMatrix::identity(4, 4));
    assert_eq!(i4.factor_dims(), &[2, 2]);
}

#[test]
fn kron_matches_index_formula() {
    let mut r = rng(1);
    let a = gaussian_matrix(2, 2, &mut r);
    let b = gaussian_matrix(3, 3, &mut r);
    let got = kron_matrix(&a, &b);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..3 {
                for l in 0..3 {
                    assert_eq!(got[(3 * i + k, 3 * j + l)], a[(i, j)] * b[(k, l)]);
                }
            }
        }
    }
}

#[test]
fn partial_trace_matches_explicit_sum() {
    for seed in 0..20 {
        let psi = random_state(&[2, 2, 2], seed);
        let rho = psi.to_density();
        let got = rho.partial_trace(&[0, 2]).unwrap();
        let want = brute_partial_trace_keep_0_2(rho.matrix(), [2, 2, 2]);
        assert!(max_abs_diff(got.matrix(), &want) < 1e-14);
        assert_eq!(got.factor_dims(), &[2, 2]);
        let from_pure = psi.reduced_state(&[2, 0]).unwrap();
        assert!(max_abs_diff(from_pure.matrix(), &want) < 1e-14);
    }
    // Unequal factor sizes.
    let rho = random_density(&[2, 3, 4], 3, 8);
    let got = rho.partial_trace(&[0, 2]).unwrap();
    let want = brute_partial_trace_keep_0_2(rho.matrix(), [2, 3, 4]);
    assert!(max_abs_diff(got.matrix(), &want) < 1e-14);
}

#[test]
fn toy_schmidt_splits_into_a_states() {
    let u = everett_lab::observer::make_toy_unitary();
    let plus = StateVector::plus_state(3);
    let psi0 = StateVector::basis(0, vec![2]).unwrap();
    let input = StateVector::new(plus.amplitudes().kronecker(psi0.amplitudes()), vec![8, 2]).unwrap();
    let sd = schmidt(&input.apply(u.unitary()).unwrap(), 1).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((sd.coefficients[0] - h).abs() < 1e-12 && (sd.coefficients[1] - h).abs() < 1e-12);
    assert_eq!(sd.rank(DEFAULT_TOL), 2);
    let span = Subspace::span_columns(&sd.significant_left(DEFAULT_TOL), DEFAULT_TOL).unwrap();
    let a = toy_a_states();
    assert!((span.overlap(&a[0]).unwrap() - 1.0).abs() < 1e-12);
    assert!((span.overlap(&a[1]).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn toy_equal_mixture_has_rank_four() {
    let a = toy_a_states();
    let parts: Vec<DensityMatrix> = a.iter().map(|s| s.to_density()).collect();
    let rho = DensityMatrix::mixture(&[(0.25, &parts[0]), (0.25, &parts[1]), (0.25, &parts[2]), (0.25, &parts[3])]).unwrap();
    // Oracle: rho is a rank-k projector scaled by 1/k iff rho^2 = rho/k; here k = 4.
    let sq = rho.matrix() * rho.matrix();
    assert!(max_abs_diff(&sq, &(rho.matrix() * C64::new(0.25, 0.0))) < 1e-15);
    assert_eq!(numerical_rank(&rho, DEFAULT_TOL), 4);
    assert_eq!(numerical_rank(&parts[0], DEFAULT_TOL), 1);
}

#[test]
fn span_examples() {
    let a = toy_a_states();
    // Gram matrix of the A-states is the identity, so their span has dimension 4.
    for x in &a {
        for y in &a {
            let g = x.inner(y).unwrap();
            assert!(g.norm() < 1e-15 || (g.re - 1.0).abs() < 1e-15);
        }
    }
    assert_eq!(span_subspace(&a, DEFAULT_TOL).unwrap().dim(), 4);
    let mix = StateVector::normalized(a[0].amplitudes() + a[1].amplitudes(), vec![2, 2, 2]).unwrap();
    assert_eq!(span_subspace(&[a[0].clone(), mix], DEFAULT_TOL).unwrap().dim(), 2);
}

#[test]
fn complement_of_a_span_holds_b_states() {
    let fs = span_subspace(&toy_a_states(), DEFAULT_TOL).unwrap();
    let perp = complement(&fs);
    assert_eq!(perp.dim(), 4);
    let p_f = fs.projector();
    for b in toy_b_states() {
        let leak = b.amplitudes().dotc(&(&p_f * b.amplitudes())).re;
        assert!(leak < 1e-10);
        assert!((perp.overlap(&b).unwrap() - 1.0).abs() < 1e-10);
    }
}

fn random_unitary_on(dim: usize, seed: u64) -> CMatrix {
    random_unitary(dim, seed).unwrap().into_matrix()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kron_is_associative(sa in any::<u64>(), sb in any::<u64>(), sc in any::<u64>()) {
        let a = random_state(&[2], sa);
        let b = random_state(&[3], sb);
        let c = random_state(&[2], sc);
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert_eq!(left.factor_dims(), right.factor_dims());
        prop_assert!((left.amplitudes() - right.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn unitary_on_traced_factor_leaves_marginal_unchanged(seed in any::<u64>(), rank in 1usize..5) {
        let rho = random_density(&[2, 4], rank, seed);
        let v = random_unitary_on(4, seed ^ 0x5555);
        let lifted = kron_matrix(&CMatrix::identity(2, 2), &v);
        let moved = rho.conjugate_by(&lifted).unwrap();
        let before = rho.partial_trace(&[0]).unwrap();
        let after = moved.partial_trace(&[0]).unwrap();
        prop_assert!(max_abs_diff(before.matrix(), after.matrix()) < 1e-10);
        prop_assert!((after.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_reconstructs(seed in any::<u64>(), right in prop::sample::select(vec![2usize, 4])) {
        let psi = random_state(&[8, right], seed);
        let sd = schmidt(&psi, 1).unwrap();
        prop_assert!((sd.reconstruct().amplitudes() - psi.amplitudes()).norm() < 1e-10);
        let total: f64 = sd.coefficients.iter().map(|c| c * c).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        prop_assert!(sd.coefficients.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(sd.rank(DEFAULT_TOL) <= right);
        prop_assert!(unitarity_error(&sd.left_vectors) < 1e-10);
        prop_assert!(unitarity_error(&sd.right_vectors) < 1e-10);
    }

    #[test]
    fn complement_completes_unitary(seed in any::<u64>(), k in 1usize..8) {
        let vectors: Vec<StateVector> = (0..k).map(|i| random_state(&[8], seed.wrapping_add(i as u64))).collect();
        let sub = span_subspace(&vectors, DEFAULT_TOL).unwrap();
        let comp = complement(&sub);
        prop_assert_eq!(sub.dim() + comp.dim(), 8);
        let mut joined = CMatrix::zeros(8, 8);
        joined.columns_mut(0, sub.dim()).copy_from(sub.basis());
        joined.columns_mut(sub.dim(), comp.dim()).copy_from(comp.basis());
        prop_assert!(unitarity_error(&joined) < 1e-10);
    }

    #[test]
    fn rank_of_mixed_and_pure(n in 1usize..16, seed in any::<u64>()) {
        prop_assert_eq!(numerical_rank(&DensityMatrix::maximally_mixed(vec![n]), DEFAULT_TOL), n);
        prop_assert_eq!(numerical_rank(&random_state(&[n], seed).to_density(), DEFAULT_TOL), 1);
    }
}
