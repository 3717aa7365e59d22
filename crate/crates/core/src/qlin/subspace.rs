use super::{hermitian_eigh, svd_sorted, CMatrix, CVector, StateVector, C64};
use crate::{Error, Result};

/// Orthonormal basis (as columns) of a subspace of a `parent_dim` space.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: CMatrix,
    parent_dim: usize,
}

impl Subspace {
    /// Orthonormal basis of the column span of `columns`. Directions whose
    /// singular value is at most `tol` times the largest are dropped.
    pub fn span_columns(columns: &CMatrix, tol: f64) -> Result<Self> {
        let parent_dim = columns.nrows();
        if columns.ncols() == 0 {
            return Ok(Self::empty(parent_dim));
        }
        let (u, s, _) = svd_sorted(columns)?;
        let largest = s.first().copied().unwrap_or(0.0);
        let rank = if largest > 0.0 {
            s.iter().filter(|&&v| v > tol * largest).count()
        } else {
            0
        };
        Ok(Self {
            basis: u.columns(0, rank).into_owned(),
            parent_dim,
        })
    }

    /// Wraps columns already known to be orthonormal.
    pub(crate) fn from_orthonormal(basis: CMatrix) -> Self {
        let parent_dim = basis.nrows();
        Self { basis, parent_dim }
    }

    pub fn empty(parent_dim: usize) -> Self {
        Self {
            basis: CMatrix::zeros(parent_dim, 0),
            parent_dim,
        }
    }

    pub fn full(parent_dim: usize) -> Self {
        Self {
            basis: CMatrix::identity(parent_dim, parent_dim),
            parent_dim,
        }
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn parent_dim(&self) -> usize {
        self.parent_dim
    }

    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// `<v|P|v>` for the orthogonal projector onto this subspace.
    pub fn overlap(&self, v: &StateVector) -> Result<f64> {
        if v.dim() != self.parent_dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of dimension {} vs subspace parent {}",
                v.dim(),
                self.parent_dim
            )));
        }
        Ok((self.basis.adjoint() * v.amplitudes()).norm_squared())
    }

    pub fn complement(&self) -> Subspace {
        complement(self)
    }
}

/// Orthonormal basis of the span of `vectors`.
pub fn span_subspace(vectors: &[StateVector], tol: f64) -> Result<Subspace> {
    let first = vectors.first().ok_or(Error::EmptyInput("spanning vectors"))?;
    let n = first.dim();
    if let Some(bad) = vectors.iter().find(|v| v.dim() != n) {
        return Err(Error::DimensionMismatch(format!(
            "spanning vectors of dimension {n} and {}",
            bad.dim()
        )));
    }
    let columns = CMatrix::from_fn(n, vectors.len(), |i, j| vectors[j].amplitudes()[i]);
    Subspace::span_columns(&columns, tol)
}

/// Orthogonal complement, from the unit eigenspace of `I - P`.
pub fn complement(sub: &Subspace) -> Subspace {
    let n = sub.parent_dim;
    let k = sub.dim();
    if k == 0 {
        return Subspace::full(n);
    }
    if k >= n {
        return Subspace::empty(n);
    }
    let residual = CMatrix::identity(n, n) - sub.projector();
    let (_, vectors) = hermitian_eigh(&residual).expect("eigendecomposition of a projector failed");
    // Spectrum of I - P is (n - k) ones followed by k zeros.
    let mut basis = vectors.columns(0, n - k).into_owned();
    // Remove residual leakage into the subspace.
    let leak = &sub.basis * (sub.basis.adjoint() * &basis);
    basis -= leak;
    for mut col in basis.column_iter_mut() {
        let norm = col.norm();
        col.unscale_mut(norm);
    }
    Subspace::from_orthonormal(basis)
}

/// Extends orthonormal columns to a full orthonormal basis by Gram–Schmidt
/// over the canonical basis vectors, taken in index order. The input
/// columns are returned first, unchanged.
pub fn extend_to_basis(columns: &CMatrix) -> CMatrix {
    let n = columns.nrows();
    let mut basis: Vec<CVector> = columns.column_iter().map(|c| c.into_owned()).collect();
    for e in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = CVector::zeros(n);
        v[e] = C64::new(1.0, 0.0);
        // Two passes keep the result orthogonal to working precision.
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&v);
                v.axpy(-c, b, C64::new(1.0, 0.0));
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v.unscale(norm));
        }
    }
    CMatrix::from_columns(&basis)
}
