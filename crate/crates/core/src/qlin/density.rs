use super::state::check_factor_dims;
use super::{hermitian_eigh, max_abs_diff, CMatrix, CVector, FactorLayout, Kron, StateVector, C64, DEFAULT_TOL};
use crate::{Error, Result};

/// Hermitian, positive semidefinite, unit-trace matrix with factor labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    factor_dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates hermiticity, positivity and trace at [`DEFAULT_TOL`].
    pub fn new(matrix: CMatrix, factor_dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDensityMatrix(format!("non-square shape {:?}", matrix.shape())));
        }
        check_factor_dims(&factor_dims, matrix.nrows())?;
        let rho = Self { matrix, factor_dims };
        rho.validate(DEFAULT_TOL)?;
        Ok(rho)
    }

    pub(crate) fn from_parts_unchecked(matrix: CMatrix, factor_dims: Vec<usize>) -> Self {
        Self { matrix, factor_dims }
    }

    /// `I / dim` over the given factors.
    pub fn maximally_mixed(factor_dims: Vec<usize>) -> Self {
        let dim: usize = factor_dims.iter().product();
        let matrix = CMatrix::identity(dim, dim) * C64::new((dim as f64).recip(), 0.0);
        Self { matrix, factor_dims }
    }

    pub fn from_pure(state: &StateVector) -> Self {
        state.to_density()
    }

    /// Convex combination `sum_k w_k rho_k`; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let (_, first) = parts.first().ok_or(Error::EmptyInput("mixture components"))?;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidArgument(format!(
                "mixture weights must be non-negative and sum to 1 (sum = {total})"
            )));
        }
        let mut matrix = CMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in parts {
            if rho.factor_dims != first.factor_dims {
                return Err(Error::DimensionMismatch(format!(
                    "mixing factor dims {:?} with {:?}",
                    rho.factor_dims, first.factor_dims
                )));
            }
            matrix += rho.matrix() * C64::new(*w, 0.0);
        }
        Ok(Self {
            matrix,
            factor_dims: first.factor_dims.clone(),
        })
    }

    /// Uniform average of the inputs.
    pub fn average(states: &[DensityMatrix]) -> Result<Self> {
        let w = (states.len() as f64).recip();
        let parts: Vec<(f64, &DensityMatrix)> = states.iter().map(|r| (w, r)).collect();
        Self::mixture(&parts)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Real diagonal in the canonical basis.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let herm = max_abs_diff(&self.matrix, &self.matrix.adjoint());
        if herm > tol {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (max deviation {herm:e})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}")));
        }
        let min = self.eigenvalues().last().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigh().0
    }

    /// Descending eigenvalues with matching eigenvector columns.
    pub fn eigh(&self) -> (Vec<f64>, CMatrix) {
        // The input is Hermitian by construction; convergence failure would be a kernel bug.
        hermitian_eigh(&self.matrix).expect("Hermitian eigendecomposition failed")
    }

    /// `<v|rho|v>` for a vector in the same space.
    pub fn expectation(&self, v: &CVector) -> f64 {
        v.dotc(&(&self.matrix * v)).re
    }

    /// Trace out every factor not listed in `keep`. Kept factors appear in
    /// ascending index order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let layout = FactorLayout::new(&self.factor_dims);
        let keep = layout.normalize_selection(keep)?;
        let groups = layout.grouped_indices(&keep);
        let kept_dim = groups[0].len();
        let mut out = CMatrix::zeros(kept_dim, kept_dim);
        for group in &groups {
            for (a, &i) in group.iter().enumerate() {
                for (b, &j) in group.iter().enumerate() {
                    out[(a, b)] += self.matrix[(i, j)];
                }
            }
        }
        let dims = keep.iter().map(|&k| self.factor_dims[k]).collect();
        Ok(Self::from_parts_unchecked(out, dims))
    }

    /// `U rho U^dag` for a full-space operator.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.shape() != self.matrix.shape() {
            return Err(Error::DimensionMismatch(format!(
                "operator shape {:?} vs density matrix shape {:?}",
                u.shape(),
                self.matrix.shape()
            )));
        }
        Ok(Self::from_parts_unchecked(u * &self.matrix * u.adjoint(), self.factor_dims.clone()))
    }

    /// `(1/2) * sum |eigenvalues(self - other)|`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "trace distance between dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        let diff = &self.matrix - &other.matrix;
        let (values, _) = hermitian_eigh(&diff)?;
        Ok(0.5 * values.iter().map(|v| v.abs()).sum::<f64>())
    }

    /// Trace distance to `I/dim`, computed from the spectrum.
    pub fn trace_distance_to_mixed(&self) -> f64 {
        let uniform = (self.dim() as f64).recip();
        0.5 * self.eigenvalues().iter().map(|v| (v - uniform).abs()).sum::<f64>()
    }
}

impl Kron for DensityMatrix {
    fn kron(&self, other: &Self) -> Self {
        let mut factor_dims = self.factor_dims.clone();
        factor_dims.extend_from_slice(&other.factor_dims);
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
            factor_dims,
        }
    }
}
