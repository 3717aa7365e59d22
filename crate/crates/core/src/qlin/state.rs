use super::{CMatrix, CVector, DensityMatrix, FactorLayout, Kron, UnitaryOperator, C64, DEFAULT_TOL};
use crate::{Error, Result};

/// A normalized pure state over a labeled tensor factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
    factor_dims: Vec<usize>,
}

pub(crate) fn check_factor_dims(factor_dims: &[usize], len: usize) -> Result<()> {
    if factor_dims.is_empty() || factor_dims.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "factor dimensions must be positive, got {factor_dims:?}"
        )));
    }
    let product: usize = factor_dims.iter().product();
    if product != len {
        return Err(Error::DimensionMismatch(format!(
            "factor dimensions {factor_dims:?} multiply to {product}, data has length {len}"
        )));
    }
    Ok(())
}

impl StateVector {
    pub fn new(amplitudes: CVector, factor_dims: Vec<usize>) -> Result<Self> {
        check_factor_dims(&factor_dims, amplitudes.len())?;
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self {
            amplitudes,
            factor_dims,
        })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: CVector, factor_dims: Vec<usize>) -> Result<Self> {
        check_factor_dims(&factor_dims, amplitudes.len())?;
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
            factor_dims,
        })
    }

    /// Unnormalized real amplitudes, rescaled to unit norm.
    pub fn from_real(amplitudes: &[f64], factor_dims: Vec<usize>) -> Result<Self> {
        let v = CVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|&a| C64::new(a, 0.0)));
        Self::normalized(v, factor_dims)
    }

    pub(crate) fn from_parts_unchecked(amplitudes: CVector, factor_dims: Vec<usize>) -> Self {
        Self {
            amplitudes,
            factor_dims,
        }
    }

    /// Canonical basis state `|index>`.
    pub fn basis(index: usize, factor_dims: Vec<usize>) -> Result<Self> {
        let dim: usize = factor_dims.iter().product();
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = CVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self::new(v, factor_dims)
    }

    /// `(|0> + |1>)^n / sqrt(2^n)` as a single factor of dimension `2^n`.
    pub fn plus_state(n_qubits: u32) -> Self {
        let dim = 1usize << n_qubits;
        let amp = C64::new((dim as f64).sqrt().recip(), 0.0);
        Self {
            amplitudes: CVector::from_element(dim, amp),
            factor_dims: vec![dim],
        }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Same amplitudes viewed with a different factorization.
    pub fn with_factor_dims(&self, factor_dims: Vec<usize>) -> Result<Self> {
        check_factor_dims(&factor_dims, self.dim())?;
        Ok(Self {
            amplitudes: self.amplitudes.clone(),
            factor_dims,
        })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "inner product of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn to_density(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::from_parts_unchecked(m, self.factor_dims.clone())
    }

    pub fn apply(&self, u: &UnitaryOperator) -> Result<StateVector> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator of dimension {} applied to state of dimension {}",
                u.dim(),
                self.dim()
            )));
        }
        Ok(Self {
            amplitudes: u.matrix() * &self.amplitudes,
            factor_dims: self.factor_dims.clone(),
        })
    }

    /// Applies `op` to the listed factors (in the listed order) and the
    /// identity elsewhere.
    pub fn apply_on_factors(&self, op: &CMatrix, targets: &[usize]) -> Result<StateVector> {
        let layout = FactorLayout::new(&self.factor_dims);
        check_targets(&layout, targets)?;
        let target_dim: usize = targets.iter().map(|&t| self.factor_dims[t]).product();
        if op.shape() != (target_dim, target_dim) {
            return Err(Error::DimensionMismatch(format!(
                "operator shape {:?} does not match target dimension {target_dim}",
                op.shape()
            )));
        }
        let mut out = CVector::zeros(self.dim());
        for group in layout.grouped_indices(targets) {
            let local = CVector::from_iterator(target_dim, group.iter().map(|&i| self.amplitudes[i]));
            let mapped = op * local;
            for (k, &i) in group.iter().enumerate() {
                out[i] = mapped[k];
            }
        }
        Ok(Self {
            amplitudes: out,
            factor_dims: self.factor_dims.clone(),
        })
    }

    /// Reduced density matrix on `keep`, computed directly from the
    /// amplitudes without forming the full projector.
    pub fn reduced_state(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let layout = FactorLayout::new(&self.factor_dims);
        let keep = layout.normalize_selection(keep)?;
        let groups = layout.grouped_indices(&keep);
        let kept_dim = groups[0].len();
        let m = CMatrix::from_fn(kept_dim, groups.len(), |t, r| self.amplitudes[groups[r][t]]);
        let dims = keep.iter().map(|&k| self.factor_dims[k]).collect();
        Ok(DensityMatrix::from_parts_unchecked(&m * m.adjoint(), dims))
    }
}

// Ordered, distinct, in range.
fn check_targets(layout: &FactorLayout, targets: &[usize]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::EmptyInput("target factors"));
    }
    let count = layout.dims().len();
    for (k, &t) in targets.iter().enumerate() {
        if t >= count {
            return Err(Error::InvalidFactor { index: t, count });
        }
        if targets[..k].contains(&t) {
            return Err(Error::InvalidArgument(format!("factor {t} targeted twice")));
        }
    }
    Ok(())
}

impl Kron for StateVector {
    fn kron(&self, other: &Self) -> Self {
        let amplitudes = self.amplitudes.kronecker(&other.amplitudes);
        let mut factor_dims = self.factor_dims.clone();
        factor_dims.extend_from_slice(&other.factor_dims);
        Self {
            amplitudes,
            factor_dims,
        }
    }
}
