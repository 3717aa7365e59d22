//! Independent reference computations shared by the integration suites.
#![allow(dead_code)]

use everett_lab::observer::InteractionUnitary;
use everett_lab::qlin::{CMatrix, CVector, DensityMatrix, StateVector, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(dim: usize, rng: &mut ChaCha20Rng) -> CVector {
    CVector::from_fn(dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha20Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

pub fn random_state(factor_dims: &[usize], seed: u64) -> StateVector {
    let dim = factor_dims.iter().product();
    StateVector::normalized(gaussian_vector(dim, &mut rng(seed)), factor_dims.to_vec()).unwrap()
}

/// Mixture of `rank` random pure states with random weights.
pub fn random_density(factor_dims: &[usize], rank: usize, seed: u64) -> DensityMatrix {
    let dim: usize = factor_dims.iter().product();
    let g = gaussian_matrix(dim, rank, &mut rng(seed));
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr, factor_dims.to_vec()).unwrap()
}

/// Explicit sum over traced indices for a three-factor matrix, keeping
/// factors 0 and 2.
pub fn brute_partial_trace_keep_0_2(rho: &CMatrix, dims: [usize; 3]) -> CMatrix {
    let [a, b, c] = dims;
    let idx = |i: usize, j: usize, k: usize| (i * b + j) * c + k;
    CMatrix::from_fn(a * c, a * c, |row, col| {
        let (i, k) = (row / c, row % c);
        let (i2, k2) = (col / c, col % c);
        (0..b).map(|j| rho[(idx(i, j, k), idx(i2, j, k2))]).sum()
    })
}

/// `a[i, j] * b[k, l]` placed at `[i * rows_b + k, j * cols_b + l]`.
pub fn kron_oracle(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (rb, cb) = b.shape();
    CMatrix::from_fn(a.nrows() * rb, a.ncols() * cb, |r, c| a[(r / rb, c / cb)] * b[(r % rb, c % cb)])
}

/// Full pure-state simulation of all `m` streams plus the observer, with
/// `us[k]` acting on stream `k` and the observer. Returns each stream's
/// reduced state.
pub fn full_joint_stream_states(us: &[&InteractionUnitary], observer_initial: &StateVector) -> Vec<DensityMatrix> {
    let m = us.len();
    let s_dim = us[0].stream_dim();
    let d = us[0].observer_dim();
    let plus = StateVector::plus_state(us[0].stream_qubits());
    let mut amps = CVector::from_element(1, C64::new(1.0, 0.0));
    for _ in 0..m {
        amps = amps.kronecker(plus.amplitudes());
    }
    amps = amps.kronecker(observer_initial.amplitudes());
    let mut dims = vec![s_dim; m];
    dims.push(d);
    let mut psi = StateVector::new(amps, dims).unwrap();
    for (k, u) in us.iter().enumerate() {
        psi = psi.apply_on_factors(u.matrix(), &[k, m]).unwrap();
    }
    (0..m).map(|k| psi.reduced_state(&[k]).unwrap()).collect()
}

/// `P(X <= k)` from statrs.
pub fn binomial_cdf_oracle(k: u64, n: u64, p: f64) -> f64 {
    use statrs::distribution::{Binomial, DiscreteCDF};
    Binomial::new(p, n).unwrap().cdf(k)
}
