use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use super::state::check_factor_dims;
use super::{unitarity_error, CMatrix, DensityMatrix, Kron, C64, DEFAULT_TOL};
use crate::{Error, Result};

/// Square complex matrix with `U^dag U = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
    factor_dims: Vec<usize>,
}

impl UnitaryOperator {
    /// Validates unitarity at [`DEFAULT_TOL`] in the max-abs-element norm.
    pub fn new(matrix: CMatrix, factor_dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "unitary must be square, got {:?}",
                matrix.shape()
            )));
        }
        check_factor_dims(&factor_dims, matrix.nrows())?;
        let err = unitarity_error(&matrix);
        if err > DEFAULT_TOL {
            return Err(Error::NotUnitary(err));
        }
        Ok(Self { matrix, factor_dims })
    }

    pub fn identity(factor_dims: Vec<usize>) -> Self {
        let dim: usize = factor_dims.iter().product();
        Self {
            matrix: CMatrix::identity(dim, dim),
            factor_dims,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn with_factor_dims(self, factor_dims: Vec<usize>) -> Result<Self> {
        check_factor_dims(&factor_dims, self.dim())?;
        Ok(Self {
            matrix: self.matrix,
            factor_dims,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            factor_dims: self.factor_dims.clone(),
        }
    }

    /// `self * first`, i.e. `first` acts before `self`.
    pub fn after(&self, first: &UnitaryOperator) -> Result<Self> {
        if self.dim() != first.dim() {
            return Err(Error::DimensionMismatch(format!(
                "composing operators of dimension {} and {}",
                self.dim(),
                first.dim()
            )));
        }
        Ok(Self {
            matrix: &self.matrix * &first.matrix,
            factor_dims: self.factor_dims.clone(),
        })
    }

    pub fn unitarity_error(&self) -> f64 {
        unitarity_error(&self.matrix)
    }

    pub fn conjugate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        rho.conjugate_by(&self.matrix)
    }
}

impl Kron for UnitaryOperator {
    fn kron(&self, other: &Self) -> Self {
        let mut factor_dims = self.factor_dims.clone();
        factor_dims.extend_from_slice(&other.factor_dims);
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
            factor_dims,
        }
    }
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `R`'s diagonal moved into `Q`. Deterministic for a given seed.
pub fn random_unitary(dim: usize, seed: u64) -> Result<UnitaryOperator> {
    if dim == 0 {
        return Err(Error::InvalidArgument("random unitary of dimension 0".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut entries = Vec::with_capacity(dim * dim);
    for _ in 0..dim * dim {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        entries.push(C64::new(re * scale, im * scale));
    }
    let ginibre = CMatrix::from_row_slice(dim, dim, &entries);
    let qr = ginibre.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    Ok(UnitaryOperator {
        matrix: q,
        factor_dims: vec![dim],
    })
}
