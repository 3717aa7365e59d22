//! Observer interaction unitaries on `H_S ⊗ H_O`.
//!
//! An interaction acts on one stream of `N` qubits (a single factor of
//! dimension `2^N`) together with the observer (a single factor of
//! dimension `D`). Basis index of `|s>|o>` is `s * D + o`.

use serde::{Deserialize, Serialize};

use crate::qlin::{extend_to_basis, random_unitary, CMatrix, CVector, StateVector, UnitaryOperator, C64};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObserverKind {
    /// Fixed 3-qubit / 1-qubit-observer interaction with A-state outputs.
    Toy,
    /// XOR shift-register memory of `memory_qubits` qubits.
    Recording,
    /// Haar-random interaction.
    Random,
}

/// Which observer to build and where it starts.
#[derive(Debug, Clone, PartialEq)]
pub struct ObserverSpec {
    pub kind: ObserverKind,
    pub dim: usize,
    pub memory_qubits: Option<u32>,
    pub initial_state: StateVector,
    pub seed: u64,
}

impl ObserverSpec {
    pub fn new(
        kind: ObserverKind,
        dim: usize,
        memory_qubits: Option<u32>,
        initial_state: Option<StateVector>,
        seed: u64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("observer dimension must be positive".into()));
        }
        let memory_qubits = match kind {
            ObserverKind::Recording => {
                let mem = match memory_qubits {
                    Some(mem) => mem,
                    None if dim.is_power_of_two() => dim.trailing_zeros(),
                    None => {
                        return Err(Error::InvalidArgument(format!(
                            "recording observer needs a power-of-two dimension, got {dim}"
                        )))
                    }
                };
                if mem == 0 || mem >= usize::BITS || 1usize << mem != dim {
                    return Err(Error::InvalidArgument(format!(
                        "recording observer with {mem} memory qubits cannot have dimension {dim}"
                    )));
                }
                Some(mem)
            }
            _ => memory_qubits.or_else(|| dim.is_power_of_two().then(|| dim.trailing_zeros())),
        };
        if kind == ObserverKind::Toy && dim != 2 {
            return Err(Error::InvalidArgument(format!("toy observer has dimension 2, got {dim}")));
        }
        let initial_state = match initial_state {
            Some(s) if s.dim() != dim => {
                return Err(Error::DimensionMismatch(format!(
                    "initial observer state of dimension {} for observer dimension {dim}",
                    s.dim()
                )))
            }
            Some(s) => s.with_factor_dims(vec![dim])?,
            None => StateVector::basis(0, vec![dim])?,
        };
        Ok(Self {
            kind,
            dim,
            memory_qubits,
            initial_state,
            seed,
        })
    }

    pub fn toy() -> Self {
        Self::new(ObserverKind::Toy, 2, None, None, 0).expect("toy spec is valid")
    }

    pub fn recording(memory_qubits: u32) -> Result<Self> {
        let dim = 1usize
            .checked_shl(memory_qubits)
            .ok_or_else(|| Error::InvalidArgument(format!("{memory_qubits} memory qubits")))?;
        Self::new(ObserverKind::Recording, dim, Some(memory_qubits), None, 0)
    }

    pub fn random(dim: usize, seed: u64) -> Result<Self> {
        Self::new(ObserverKind::Random, dim, None, None, seed)
    }

    pub fn with_initial_state(mut self, state: StateVector) -> Result<Self> {
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "initial observer state of dimension {} for observer dimension {}",
                state.dim(),
                self.dim
            )));
        }
        self.initial_state = state.with_factor_dims(vec![self.dim])?;
        Ok(self)
    }
}

/// A unitary on one stream of `N` qubits together with the observer.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionUnitary {
    u: UnitaryOperator,
    stream_qubits: u32,
}

impl InteractionUnitary {
    /// `u` must act on `2^stream_qubits * observer_dim` dimensions.
    pub fn new(u: UnitaryOperator, stream_qubits: u32) -> Result<Self> {
        let stream_dim = 1usize << stream_qubits;
        if !u.dim().is_multiple_of(stream_dim) {
            return Err(Error::DimensionMismatch(format!(
                "operator of dimension {} cannot act on {stream_qubits} stream qubits",
                u.dim()
            )));
        }
        let observer_dim = u.dim() / stream_dim;
        let u = u.with_factor_dims(vec![stream_dim, observer_dim])?;
        Ok(Self { u, stream_qubits })
    }

    pub fn unitary(&self) -> &UnitaryOperator {
        &self.u
    }

    pub fn matrix(&self) -> &CMatrix {
        self.u.matrix()
    }

    pub fn stream_qubits(&self) -> u32 {
        self.stream_qubits
    }

    pub fn stream_dim(&self) -> usize {
        1 << self.stream_qubits
    }

    pub fn observer_dim(&self) -> usize {
        self.u.dim() >> self.stream_qubits
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }
}

/// The toy A-states `A_1..A_4` on three qubits.
pub fn toy_a_states() -> [StateVector; 4] {
    let rows: [[f64; 8]; 4] = [
        [1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 1.0, -1.0],
    ];
    rows.map(|r| StateVector::from_real(&r, vec![2, 2, 2]).expect("A-state"))
}

/// The toy B-states `B_1..B_4 = |a>|->|c>`, orthogonal to every A-state.
pub fn toy_b_states() -> [StateVector; 4] {
    let rows: [[f64; 8]; 4] = [
        [1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0],
    ];
    rows.map(|r| StateVector::from_real(&r, vec![2, 2, 2]).expect("B-state"))
}

/// How the toy interaction is extended beyond its two specified inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToyCompletion {
    /// Gram–Schmidt over the canonical basis for both inputs and outputs.
    Canonical,
    /// Canonical completion, with the output completion rotated by a
    /// seeded random unitary.
    Rotated(u64),
}

/// The toy interaction (`N = 3`, `D = 2`), completed canonically.
pub fn make_toy_unitary() -> InteractionUnitary {
    make_toy_unitary_with(ToyCompletion::Canonical)
}

/// Maps `|+>^3 |psi0>` to `(|A1>|psi0> + |A2>|psi1>)/sqrt2` and
/// `|+>^3 |psi1>` to `(|A3>|psi0> + |A4>|psi1>)/sqrt2`.
pub fn make_toy_unitary_with(completion: ToyCompletion) -> InteractionUnitary {
    let plus = StateVector::plus_state(3);
    let psi = [
        StateVector::basis(0, vec![2]).expect("basis"),
        StateVector::basis(1, vec![2]).expect("basis"),
    ];
    let a = toy_a_states();
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let pair = |x: &StateVector, y: &StateVector| -> CVector {
        (x.amplitudes().kronecker(psi[0].amplitudes()) + y.amplitudes().kronecker(psi[1].amplitudes())) * h
    };
    let inputs = CMatrix::from_columns(&[
        plus.amplitudes().kronecker(psi[0].amplitudes()),
        plus.amplitudes().kronecker(psi[1].amplitudes()),
    ]);
    let outputs = CMatrix::from_columns(&[pair(&a[0], &a[1]), pair(&a[2], &a[3])]);
    let in_basis = extend_to_basis(&inputs);
    let mut out_basis = extend_to_basis(&outputs);
    if let ToyCompletion::Rotated(seed) = completion {
        let w = random_unitary(14, seed).expect("dimension 14").into_matrix();
        let rotated = out_basis.columns(2, 14) * w;
        out_basis.columns_mut(2, 14).copy_from(&rotated);
    }
    let u = UnitaryOperator::new(out_basis * in_basis.adjoint(), vec![8, 2]).expect("toy completion is unitary");
    InteractionUnitary { u, stream_qubits: 3 }
}

/// Memory-limited recorder: stream qubit `k` is XORed (CNOT) into memory
/// qubit `k mod memory_qubits`. With `memory_qubits >= n_qubits` every
/// stream qubit gets its own slot.
pub fn make_recording_observer(n_qubits: u32, memory_qubits: u32) -> Result<InteractionUnitary> {
    if n_qubits == 0 || memory_qubits == 0 {
        return Err(Error::InvalidArgument(format!(
            "recording observer needs positive sizes, got N = {n_qubits}, memory = {memory_qubits}"
        )));
    }
    if n_qubits + memory_qubits > 30 {
        return Err(Error::InvalidArgument(format!(
            "recording observer too large: {} qubits",
            n_qubits + memory_qubits
        )));
    }
    let stream_dim = 1usize << n_qubits;
    let mem_dim = 1usize << memory_qubits;
    let record = |s: usize| -> usize {
        (0..n_qubits).fold(0usize, |acc, k| {
            let bit = (s >> (n_qubits - 1 - k)) & 1;
            let slot = k % memory_qubits;
            acc ^ (bit << (memory_qubits - 1 - slot))
        })
    };
    let dim = stream_dim * mem_dim;
    let mut m = CMatrix::zeros(dim, dim);
    for s in 0..stream_dim {
        let r = record(s);
        for mem in 0..mem_dim {
            m[(s * mem_dim + (mem ^ r), s * mem_dim + mem)] = C64::new(1.0, 0.0);
        }
    }
    let u = UnitaryOperator::new(m, vec![stream_dim, mem_dim])?;
    Ok(InteractionUnitary {
        u,
        stream_qubits: n_qubits,
    })
}

/// Haar-random interaction between `N` stream qubits and a `dim`-level observer.
pub fn make_random_observer(n_qubits: u32, dim: usize, seed: u64) -> Result<InteractionUnitary> {
    let stream_dim = 1usize
        .checked_shl(n_qubits)
        .ok_or_else(|| Error::InvalidArgument(format!("{n_qubits} stream qubits")))?;
    let total = stream_dim
        .checked_mul(dim)
        .ok_or_else(|| Error::InvalidArgument("interaction dimension overflows".into()))?;
    let u = random_unitary(total, seed)?.with_factor_dims(vec![stream_dim, dim])?;
    Ok(InteractionUnitary {
        u,
        stream_qubits: n_qubits,
    })
}

/// Number of clock levels for `m` time steps: `2^ceil(log2 m)`.
pub fn clock_dim(m: usize) -> usize {
    m.next_power_of_two()
}

/// Replaces the time-dependent sequence `us[0..m]` by one constant unitary
/// on `H_S ⊗ (H_O ⊗ H_clock)`. It applies `us[c]` when the clock reads `c`
/// (identity for padded clock values `c >= m`) and then increments the
/// clock modulo its dimension. The clock is the least significant part of
/// the observer factor.
pub fn make_clocked_unitary(us: &[InteractionUnitary], m: usize) -> Result<InteractionUnitary> {
    if m == 0 || us.len() != m {
        return Err(Error::InvalidArgument(format!(
            "expected {m} time steps (m >= 1), got {} unitaries",
            us.len()
        )));
    }
    let first = &us[0];
    if let Some(bad) = us
        .iter()
        .find(|u| u.u.factor_dims() != first.u.factor_dims() || u.stream_qubits != first.stream_qubits)
    {
        return Err(Error::DimensionMismatch(format!(
            "time-step unitaries on factors {:?} and {:?}",
            first.u.factor_dims(),
            bad.u.factor_dims()
        )));
    }
    let stream_dim = first.stream_dim();
    let obs_dim = first.observer_dim();
    let clock = clock_dim(m);
    let inner = stream_dim * obs_dim;
    let dim = inner * clock;
    let mut out = CMatrix::zeros(dim, dim);
    let full_index = |so: usize, c: usize| so * clock + c;
    for c in 0..clock {
        let next = (c + 1) % clock;
        match us.get(c) {
            Some(step) => {
                let u = step.matrix();
                for col in 0..inner {
                    for row in 0..inner {
                        out[(full_index(row, next), full_index(col, c))] = u[(row, col)];
                    }
                }
            }
            None => {
                for so in 0..inner {
                    out[(full_index(so, next), full_index(so, c))] = C64::new(1.0, 0.0);
                }
            }
        }
    }
    let u = UnitaryOperator::new(out, vec![stream_dim, obs_dim * clock])?;
    Ok(InteractionUnitary {
        u,
        stream_qubits: first.stream_qubits,
    })
}

/// Builds the interaction described by `spec` for streams of `n_qubits`.
pub fn build(spec: &ObserverSpec, n_qubits: u32) -> Result<InteractionUnitary> {
    match spec.kind {
        ObserverKind::Toy => {
            if n_qubits != 3 || spec.dim != 2 {
                return Err(Error::InvalidArgument(format!(
                    "toy observer requires N = 3 and D = 2, got N = {n_qubits}, D = {}",
                    spec.dim
                )));
            }
            Ok(make_toy_unitary())
        }
        ObserverKind::Recording => {
            let mem = spec
                .memory_qubits
                .ok_or_else(|| Error::InvalidArgument("recording observer without memory size".into()))?;
            make_recording_observer(n_qubits, mem)
        }
        ObserverKind::Random => make_random_observer(n_qubits, spec.dim, spec.seed),
    }
}
