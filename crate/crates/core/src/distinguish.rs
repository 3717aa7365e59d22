//! Measurement statistics and the perp-hit hypothesis test.
//!
//! Under the collapse hypothesis every stream is fully mixed, so an outcome
//! in a `k`-dimensional subspace of a `2^N` space occurs with probability
//! `k / 2^N`. Under no-collapse evolution the stream state is supported in
//! `F_S`, and outcomes in `F_S^perp` never occur. The test counts those
//! "perp hits" and computes the exact lower binomial tail under the null.

use std::collections::BTreeSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{self, compute_fs, RunReport, Scenario, Theory, DEFAULT_MAX_JOINT_DIM};
use crate::observer::{self, toy_a_states, toy_b_states};
use crate::qlin::{complement, hermitian_eigh, unitarity_error, CMatrix, DensityMatrix, StateVector, Subspace, C64, DEFAULT_TOL};
use crate::{Error, Result};

/// Probabilities below this are treated as exact zeros before sampling.
pub const CLIP_THRESHOLD: f64 = 1e-12;

pub const IN_FS_LABEL: &str = "in-F_S";
pub const PERP_LABEL: &str = "perp";

/// Orthonormal measurement basis, one labeled column per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    vectors: CMatrix,
    labels: Vec<String>,
}

impl MeasurementBasis {
    pub fn new(vectors: CMatrix, labels: Vec<String>) -> Result<Self> {
        if !vectors.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "measurement basis must be square, got {:?}",
                vectors.shape()
            )));
        }
        if labels.len() != vectors.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} basis vectors",
                labels.len(),
                vectors.ncols()
            )));
        }
        let err = unitarity_error(&vectors);
        if err > DEFAULT_TOL {
            return Err(Error::NotUnitary(err));
        }
        Ok(Self { vectors, labels })
    }

    /// Computational basis; qubit spaces get bit-string labels.
    pub fn canonical(dim: usize) -> Self {
        let labels = (0..dim)
            .map(|i| {
                if dim.is_power_of_two() && dim > 1 {
                    format!("{:0width$b}", i, width = dim.trailing_zeros() as usize)
                } else {
                    i.to_string()
                }
            })
            .collect();
        Self {
            vectors: CMatrix::identity(dim, dim),
            labels,
        }
    }

    /// `{A_1..A_4, B_1..B_4}` for the three-qubit worked example.
    pub fn toy_ab() -> Self {
        let states: Vec<StateVector> = toy_a_states().into_iter().chain(toy_b_states()).collect();
        let vectors = CMatrix::from_fn(8, 8, |i, j| states[j].amplitudes()[i]);
        let labels = ["A1", "A2", "A3", "A4", "B1", "B2", "B3", "B4"].map(String::from).to_vec();
        Self::new(vectors, labels).expect("A/B states are orthonormal")
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Outcome probabilities `<b_k|rho|b_k>` (unclipped).
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state of dimension {} measured in basis of dimension {}",
                rho.dim(),
                self.dim()
            )));
        }
        // Rayleigh quotients, so rounding in the stored basis norms cancels.
        let applied = rho.matrix() * &self.vectors;
        Ok(self
            .vectors
            .column_iter()
            .zip(applied.column_iter())
            .map(|(v, rv)| v.dotc(&rv).re / v.dotc(&v).re)
            .collect())
    }
}

/// Born-rule probabilities with tiny and negative values clipped to zero.
pub fn outcome_probabilities(rho: &DensityMatrix, basis: &MeasurementBasis) -> Result<Vec<f64>> {
    let raw = basis.probabilities(rho)?;
    let total: f64 = raw.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::ProbabilityTotal(total));
    }
    let clipped: Vec<f64> = raw.iter().map(|&p| if p < CLIP_THRESHOLD { 0.0 } else { p }).collect();
    let kept: f64 = clipped.iter().sum();
    if kept <= 0.0 {
        return Err(Error::ProbabilityTotal(kept));
    }
    Ok(clipped.into_iter().map(|p| p / kept).collect())
}

/// `n` i.i.d. outcome indices drawn from `rho` measured in `basis`.
pub fn sample_outcomes(rho: &DensityMatrix, basis: &MeasurementBasis, n: usize, seed: u64) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::EmptyInput("sample count"));
    }
    let probs = outcome_probabilities(rho, basis)?;
    let dist = WeightedIndex::new(&probs).map_err(|e| Error::InvalidArgument(format!("outcome weights: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| dist.sample(&mut rng)).collect())
}

/// With `fs`: its basis followed by a basis of its complement, labeled
/// [`IN_FS_LABEL`] and [`PERP_LABEL`]. Without: the eigenbasis of
/// `rho - I/dim`, most over-represented direction first.
pub fn find_distinguishing_basis(rho: &DensityMatrix, fs: Option<&Subspace>) -> Result<MeasurementBasis> {
    let n = rho.dim();
    match fs {
        Some(fs) => {
            if fs.parent_dim() != n {
                return Err(Error::DimensionMismatch(format!(
                    "F_S in dimension {} for a state of dimension {n}",
                    fs.parent_dim()
                )));
            }
            let perp = complement(fs);
            let mut vectors = CMatrix::zeros(n, n);
            vectors.columns_mut(0, fs.dim()).copy_from(fs.basis());
            vectors.columns_mut(fs.dim(), perp.dim()).copy_from(perp.basis());
            let labels = std::iter::repeat_n(IN_FS_LABEL, fs.dim())
                .chain(std::iter::repeat_n(PERP_LABEL, perp.dim()))
                .map(String::from)
                .collect();
            MeasurementBasis::new(vectors, labels)
        }
        None => {
            let shifted = rho.matrix() - CMatrix::identity(n, n) * C64::new((n as f64).recip(), 0.0);
            let (_, vectors) = hermitian_eigh(&shifted)?;
            let labels = (0..n).map(|k| format!("eig{k}")).collect();
            MeasurementBasis::new(vectors, labels)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    CollapseRejected,
    CollapseNotRejected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub n_samples: usize,
    pub perp_hits: usize,
    /// Null probability of a perp outcome: `|perp| / dim`.
    pub p0: f64,
    pub p_value_under_copenhagen: f64,
    pub decision: Decision,
    pub alpha: f64,
}

/// Exact `P(X <= k)` for `X ~ Binomial(n, p)`, summed in log space.
pub fn binomial_lower_tail(k: usize, n: usize, p: f64) -> f64 {
    if k >= n || p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    let mut ln_choose = 0.0;
    let mut terms = Vec::with_capacity(k + 1);
    for j in 0..=k {
        if j > 0 {
            ln_choose += ((n - j + 1) as f64).ln() - (j as f64).ln();
        }
        terms.push(ln_choose + j as f64 * ln_p + (n - j) as f64 * ln_q);
    }
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - top).exp()).sum();
    (top + sum.ln()).exp().min(1.0)
}

/// One-sided test of "fully mixed" against "no weight outside the
/// in-subspace labels": few perp hits are evidence against collapse.
pub fn perp_hit_test(
    samples: &[usize],
    basis: &MeasurementBasis,
    perp_labels: &BTreeSet<String>,
    alpha: f64,
) -> Result<TestResult> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if perp_labels.is_empty() {
        return Err(Error::EmptyInput("perp labels"));
    }
    if let Some(missing) = perp_labels.iter().find(|l| !basis.labels.contains(l)) {
        return Err(Error::UnknownLabel(missing.clone()));
    }
    let is_perp: Vec<bool> = basis.labels.iter().map(|l| perp_labels.contains(l)).collect();
    if let Some(&bad) = samples.iter().find(|&&s| s >= basis.dim()) {
        return Err(Error::InvalidArgument(format!("outcome index {bad} outside basis of size {}", basis.dim())));
    }
    let perp_hits = samples.iter().filter(|&&s| is_perp[s]).count();
    let p0 = is_perp.iter().filter(|&&b| b).count() as f64 / basis.dim() as f64;
    let p_value = binomial_lower_tail(perp_hits, samples.len(), p0);
    Ok(TestResult {
        n_samples: samples.len(),
        perp_hits,
        p0,
        p_value_under_copenhagen: p_value,
        decision: if p_value < alpha {
            Decision::CollapseRejected
        } else {
            Decision::CollapseNotRejected
        },
        alpha,
    })
}

/// Both theories measured in the same `F_S`-adapted basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Discrimination {
    pub fs_dim: usize,
    pub perp_dim: usize,
    /// `2^N <= D^2`: the support bound alone does not force a difference.
    pub bound_vacuous: bool,
    pub everett: Option<TestResult>,
    pub copenhagen: Option<TestResult>,
    pub everett_report: RunReport,
    pub copenhagen_report: RunReport,
    pub warnings: Vec<String>,
}

impl Discrimination {
    /// No-collapse run rejects collapse while the collapse run does not.
    pub fn discriminating(&self) -> bool {
        matches!(
            (&self.everett, &self.copenhagen),
            (Some(e), Some(c)) if e.decision == Decision::CollapseRejected && c.decision == Decision::CollapseNotRejected
        )
    }
}

/// Seeds for independent sub-experiments of one seeded run.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    use rand::RngCore;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.next_u64()
}

pub fn theory_discrimination(sc: &Scenario, n: usize, alpha: f64, seed: u64) -> Result<Discrimination> {
    theory_discrimination_with_limit(sc, n, alpha, seed, DEFAULT_MAX_JOINT_DIM)
}

pub fn theory_discrimination_with_limit(
    sc: &Scenario,
    n: usize,
    alpha: f64,
    seed: u64,
    max_joint_dim: usize,
) -> Result<Discrimination> {
    if n == 0 {
        return Err(Error::EmptyInput("sample count"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let everett_report = engine::run_everett_with_limit(&sc.with_theory(Theory::Everett), max_joint_dim)?;
    let copenhagen_report = engine::run_copenhagen_with_limit(&sc.with_theory(Theory::Copenhagen), max_joint_dim)?;
    let fs = compute_fs(&observer::build(&sc.observer, sc.n_qubits)?)?;
    let basis = find_distinguishing_basis(&everett_report.rho_s, Some(&fs))?;
    let perp_dim = basis.dim() - fs.dim();
    let bound_vacuous = !sc.bound_is_informative();
    let mut warnings = Vec::new();
    if bound_vacuous {
        warnings.push(format!(
            "bound vacuous: 2^N = {} <= D^2 = {}",
            sc.stream_dim(),
            sc.observer_dim() * sc.observer_dim()
        ));
    }
    let (everett, copenhagen) = if perp_dim == 0 {
        warnings.push("F_S is the whole stream space; no perp outcomes to test".into());
        (None, None)
    } else {
        let perp: BTreeSet<String> = [PERP_LABEL.to_string()].into();
        let e_samples = sample_outcomes(&everett_report.rho_s, &basis, n, derive_seed(seed, 0))?;
        let c_samples = sample_outcomes(&copenhagen_report.rho_s, &basis, n, derive_seed(seed, 1))?;
        (
            Some(perp_hit_test(&e_samples, &basis, &perp, alpha)?),
            Some(perp_hit_test(&c_samples, &basis, &perp, alpha)?),
        )
    };
    Ok(Discrimination {
        fs_dim: fs.dim(),
        perp_dim,
        bound_vacuous,
        everett,
        copenhagen,
        everett_report,
        copenhagen_report,
        warnings,
    })
}
