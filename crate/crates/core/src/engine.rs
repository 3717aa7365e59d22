//! End-to-end runs of the stream experiment under both theories.
//!
//! No-collapse runs use a reduced-state recurrence: the stream and the
//! observer form a joint system of dimension `2^N * D`, and only the
//! observer's reduced state is carried from one stream to the next. Streams
//! already traversed are never touched again, so their reduced states are
//! final once computed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::observer::{self, InteractionUnitary, ObserverSpec};
use crate::qlin::{
    complement, numerical_rank, rank_of_spectrum, schmidt, CMatrix, DensityMatrix, StateVector, Subspace, C64,
    DEFAULT_TOL,
};
use crate::{Error, Result};

/// Largest joint stream-observer dimension simulated by default.
pub const DEFAULT_MAX_JOINT_DIM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theory {
    Everett,
    Copenhagen,
}

impl std::fmt::Display for Theory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Theory::Everett => f.write_str("everett"),
            Theory::Copenhagen => f.write_str("copenhagen"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub n_qubits: u32,
    pub n_streams: usize,
    pub observer: ObserverSpec,
    pub theory: Theory,
    pub seed: u64,
}

impl Scenario {
    pub fn new(n_qubits: u32, n_streams: usize, observer: ObserverSpec, theory: Theory, seed: u64) -> Result<Self> {
        if n_qubits == 0 || n_streams == 0 {
            return Err(Error::InvalidArgument(format!(
                "need N >= 1 and m >= 1, got N = {n_qubits}, m = {n_streams}"
            )));
        }
        if n_qubits >= 31 {
            return Err(Error::InvalidArgument(format!("{n_qubits} qubits per stream is not simulable")));
        }
        Ok(Self {
            n_qubits,
            n_streams,
            observer,
            theory,
            seed,
        })
    }

    /// The built-in worked example: 3-qubit streams, 1-qubit observer.
    pub fn toy(n_streams: usize, theory: Theory) -> Self {
        Self::new(3, n_streams, ObserverSpec::toy(), theory, 0).expect("toy scenario is valid")
    }

    pub fn with_theory(&self, theory: Theory) -> Self {
        Self { theory, ..self.clone() }
    }

    pub fn stream_dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn observer_dim(&self) -> usize {
        self.observer.dim
    }

    pub fn joint_dim(&self) -> Option<usize> {
        self.stream_dim().checked_mul(self.observer.dim)
    }

    /// `2^N > D^2`: the support bound forbids a fully mixed stream.
    pub fn bound_is_informative(&self) -> bool {
        let d2 = (self.observer.dim as u128) * (self.observer.dim as u128);
        (self.stream_dim() as u128) > d2
    }

    fn check_size(&self, limit: usize) -> Result<usize> {
        match self.joint_dim() {
            Some(dim) if dim <= limit => Ok(dim),
            Some(dim) => Err(Error::SizeGuard { dim, limit }),
            None => Err(Error::SizeGuard { dim: usize::MAX, limit }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub theory: Theory,
    pub n_qubits: u32,
    pub n_streams: usize,
    pub observer_dim: usize,
    pub rho_s: DensityMatrix,
    pub per_stream_ranks: Vec<usize>,
    pub rank_rho_s: usize,
    pub fs_dim: Option<usize>,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    pub trace_distance_to_mixed: f64,
    /// Collapse outcomes, one row of `N` bits per stream (collapse runs only).
    pub collapse_bits: Option<Vec<Vec<u8>>>,
}

/// Reduced stream states for a sequence of interactions, one per stream,
/// with every stream prepared in `|+>^N` and the observer in `initial`.
pub fn stream_states<'a, I>(unitaries: I, initial: &DensityMatrix) -> Result<Vec<DensityMatrix>>
where
    I: IntoIterator<Item = &'a InteractionUnitary>,
{
    let mut sigma = initial.matrix().clone();
    let mut out = Vec::new();
    for u in unitaries {
        if u.observer_dim() != sigma.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "interaction on observer dimension {} with observer state of dimension {}",
                u.observer_dim(),
                sigma.nrows()
            )));
        }
        let (rho, next) = interaction_step(u, &sigma);
        out.push(DensityMatrix::from_parts_unchecked(rho, vec![u.stream_dim()]));
        sigma = next;
    }
    Ok(out)
}

// joint = U (|+><+| ⊗ sigma) U^dag, returned as (Tr_O joint, Tr_S joint).
fn interaction_step(u: &InteractionUnitary, sigma: &CMatrix) -> (CMatrix, CMatrix) {
    let s_dim = u.stream_dim();
    let d = u.observer_dim();
    let um = u.matrix();
    let amp = C64::new((s_dim as f64).sqrt().recip(), 0.0);
    // lift[:, e] = U (|+> ⊗ |e>)
    let mut lift = CMatrix::zeros(s_dim * d, d);
    for e in 0..d {
        let mut col = lift.column_mut(e);
        for s in 0..s_dim {
            col += um.column(s * d + e);
        }
        col *= amp;
    }
    let weighted = &lift * sigma;
    // Row (s, o) of `lift` sits at s * d + o.
    let by_stream = |m: &CMatrix| CMatrix::from_fn(s_dim, d * d, |s, k| m[(s * d + k / d, k % d)]);
    let by_observer = |m: &CMatrix| CMatrix::from_fn(d, s_dim * d, |o, k| m[((k / d) * d + o, k % d)]);
    let rho = by_stream(&weighted) * by_stream(&lift).adjoint();
    let next = by_observer(&weighted) * by_observer(&lift).adjoint();
    (rho, next)
}

/// `m` passes of the same interaction starting from the pure observer state.
pub fn everett_stream_states(u: &InteractionUnitary, n_streams: usize, initial: &StateVector) -> Result<Vec<DensityMatrix>> {
    stream_states(std::iter::repeat_n(u, n_streams), &initial.to_density())
}

pub fn run(sc: &Scenario) -> Result<RunReport> {
    match sc.theory {
        Theory::Everett => run_everett(sc),
        Theory::Copenhagen => run_copenhagen(sc),
    }
}

pub fn run_everett(sc: &Scenario) -> Result<RunReport> {
    run_everett_with_limit(sc, DEFAULT_MAX_JOINT_DIM)
}

pub fn run_everett_with_limit(sc: &Scenario, max_joint_dim: usize) -> Result<RunReport> {
    if sc.theory != Theory::Everett {
        return Err(Error::InvalidArgument("run_everett called on a collapse scenario".into()));
    }
    sc.check_size(max_joint_dim)?;
    let u = observer::build(&sc.observer, sc.n_qubits)?;
    let states = everett_stream_states(&u, sc.n_streams, &sc.observer.initial_state)?;
    let fs = compute_fs(&u)?;
    let report = summarize(sc, states, Some(fs.dim()), None)?;
    let d = sc.observer.dim;
    if report.rank_rho_s > d.saturating_mul(d) {
        return Err(Error::InvariantViolation(format!(
            "rank(rho_S) = {} exceeds D^2 = {}",
            report.rank_rho_s,
            d * d
        )));
    }
    Ok(report)
}

fn summarize(
    sc: &Scenario,
    states: Vec<DensityMatrix>,
    fs_dim: Option<usize>,
    collapse_bits: Option<Vec<Vec<u8>>>,
) -> Result<RunReport> {
    for (i, rho) in states.iter().enumerate() {
        if (rho.trace() - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvariantViolation(format!(
                "stream {} reduced state has trace {}",
                i + 1,
                rho.trace()
            )));
        }
    }
    let per_stream_ranks = states.iter().map(|r| numerical_rank(r, DEFAULT_TOL)).collect();
    let rho_s = DensityMatrix::average(&states)?;
    let eigenvalues = rho_s.eigenvalues();
    let uniform = (rho_s.dim() as f64).recip();
    Ok(RunReport {
        theory: sc.theory,
        n_qubits: sc.n_qubits,
        n_streams: sc.n_streams,
        observer_dim: sc.observer.dim,
        rank_rho_s: rank_of_spectrum(&eigenvalues, DEFAULT_TOL),
        trace_distance_to_mixed: 0.5 * eigenvalues.iter().map(|v| (v - uniform).abs()).sum::<f64>(),
        eigenvalues,
        rho_s,
        per_stream_ranks,
        fs_dim,
        collapse_bits,
    })
}

/// Collapse prediction: `rho_S = I / 2^N` exactly, plus seeded collapse
/// outcomes for every qubit of every stream.
pub fn run_copenhagen(sc: &Scenario) -> Result<RunReport> {
    run_copenhagen_with_limit(sc, DEFAULT_MAX_JOINT_DIM)
}

/// The limit only gates the optional `F_S` computation and the stream
/// dimension itself.
pub fn run_copenhagen_with_limit(sc: &Scenario, max_joint_dim: usize) -> Result<RunReport> {
    if sc.theory != Theory::Copenhagen {
        return Err(Error::InvalidArgument("run_copenhagen called on a no-collapse scenario".into()));
    }
    let dim = sc.stream_dim();
    if dim > max_joint_dim {
        return Err(Error::SizeGuard { dim, limit: max_joint_dim });
    }
    let fs_dim = match sc.check_size(max_joint_dim) {
        Ok(_) => Some(compute_fs(&observer::build(&sc.observer, sc.n_qubits)?)?.dim()),
        Err(_) => None,
    };
    let uniform = (dim as f64).recip();
    Ok(RunReport {
        theory: Theory::Copenhagen,
        n_qubits: sc.n_qubits,
        n_streams: sc.n_streams,
        observer_dim: sc.observer.dim,
        rho_s: DensityMatrix::maximally_mixed(vec![dim]),
        per_stream_ranks: vec![dim; sc.n_streams],
        rank_rho_s: dim,
        fs_dim,
        eigenvalues: vec![uniform; dim],
        trace_distance_to_mixed: 0.0,
        collapse_bits: Some(collapse_samples(sc.n_streams, sc.n_qubits, sc.seed)),
    })
}

/// Each qubit independently lands on 0 or 1 with probability 1/2.
pub fn collapse_samples(n_streams: usize, n_qubits: u32, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_streams)
        .map(|_| (0..n_qubits).map(|_| u8::from(rng.random::<bool>())).collect())
        .collect()
}

/// Span of the left Schmidt vectors of `U (|+>^N ⊗ |e_i>)` over every
/// observer basis state `|e_i>`. Every no-collapse `rho_S` for this
/// interaction is supported inside it, whatever the observer's initial state.
pub fn compute_fs(u: &InteractionUnitary) -> Result<Subspace> {
    let s_dim = u.stream_dim();
    let d = u.observer_dim();
    let plus = StateVector::plus_state(u.stream_qubits());
    let mut columns = Vec::new();
    for e in 0..d {
        let obs = StateVector::basis(e, vec![d])?;
        let input = StateVector::new(plus.amplitudes().kronecker(obs.amplitudes()), vec![s_dim, d])?;
        let sd = schmidt(&input.apply(u.unitary())?, 1)?;
        let left = sd.significant_left(DEFAULT_TOL);
        columns.extend(left.column_iter().map(|c| c.into_owned()));
    }
    if columns.is_empty() {
        return Ok(Subspace::empty(s_dim));
    }
    Subspace::span_columns(&CMatrix::from_columns(&columns), DEFAULT_TOL)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportCertificate {
    /// Largest `<chi|rho_S|chi>` over an orthonormal basis of `F_S^perp`.
    pub max_perp_expectation: f64,
    pub rank_rho_s: usize,
    pub fs_dim: usize,
    pub observer_dim: usize,
    /// `max_perp_expectation < 1e-10`.
    pub support_contained: bool,
    /// `rank_rho_s <= fs_dim <= D^2`.
    pub bound_holds: bool,
}

pub fn certify_support_bound(report: &RunReport, fs: &Subspace) -> Result<SupportCertificate> {
    if fs.parent_dim() != report.rho_s.dim() {
        return Err(Error::DimensionMismatch(format!(
            "F_S lives in dimension {} but rho_S has dimension {}",
            fs.parent_dim(),
            report.rho_s.dim()
        )));
    }
    let perp = complement(fs);
    let max_perp_expectation = perp
        .basis()
        .column_iter()
        .map(|chi| report.rho_s.expectation(&chi.into_owned()))
        .fold(0.0, f64::max);
    let d2 = report.observer_dim.saturating_mul(report.observer_dim);
    Ok(SupportCertificate {
        max_perp_expectation,
        rank_rho_s: report.rank_rho_s,
        fs_dim: fs.dim(),
        observer_dim: report.observer_dim,
        support_contained: max_perp_expectation < DEFAULT_TOL,
        bound_holds: report.rank_rho_s <= fs.dim() && fs.dim() <= d2,
    })
}
