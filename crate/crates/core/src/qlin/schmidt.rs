use super::{svd_sorted, CMatrix, CVector, StateVector, C64};
use crate::{Error, Result};

/// `psi = sum_k c_k |left_k> ⊗ |right_k>` with orthonormal columns and
/// descending non-negative coefficients. All `min(dim A, dim B)` terms are
/// kept, including zero ones.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left_vectors: CMatrix,
    pub right_vectors: CMatrix,
    pub left_dims: Vec<usize>,
    pub right_dims: Vec<usize>,
}

impl SchmidtDecomposition {
    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&c| c > tol).count()
    }

    /// Left vectors whose coefficient exceeds `tol`, as columns.
    pub fn significant_left(&self, tol: f64) -> CMatrix {
        let r = self.rank(tol);
        self.left_vectors.columns(0, r).into_owned()
    }

    pub fn reconstruct(&self) -> StateVector {
        let da = self.left_vectors.nrows();
        let db = self.right_vectors.nrows();
        let mut amps = CVector::zeros(da * db);
        for (k, &c) in self.coefficients.iter().enumerate() {
            let term = self.left_vectors.column(k).kronecker(&self.right_vectors.column(k));
            amps.axpy(C64::new(c, 0.0), &term, C64::new(1.0, 0.0));
        }
        let mut dims = self.left_dims.clone();
        dims.extend_from_slice(&self.right_dims);
        StateVector::from_parts_unchecked(amps, dims)
    }
}

/// Schmidt decomposition across the cut after the first `cut` factors,
/// computed from the SVD of the amplitudes reshaped to `dim_A x dim_B`.
pub fn schmidt(psi: &StateVector, cut: usize) -> Result<SchmidtDecomposition> {
    let dims = psi.factor_dims();
    if cut == 0 || cut >= dims.len() {
        return Err(Error::InvalidArgument(format!(
            "cut {cut} must split {} factors into two non-empty groups",
            dims.len()
        )));
    }
    let left_dims = dims[..cut].to_vec();
    let right_dims = dims[cut..].to_vec();
    let da: usize = left_dims.iter().product();
    let db: usize = right_dims.iter().product();
    let amps = psi.amplitudes();
    let reshaped = CMatrix::from_fn(da, db, |a, b| amps[a * db + b]);
    let (u, s, v) = svd_sorted(&reshaped)?;
    // psi[a, b] = sum_k s_k u[a, k] conj(v[b, k])
    let right_vectors = v.map(|z| z.conj());
    Ok(SchmidtDecomposition {
        coefficients: s,
        left_vectors: u,
        right_vectors,
        left_dims,
        right_dims,
    })
}
