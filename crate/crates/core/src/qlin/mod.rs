//! Dense complex linear algebra for small quantum systems.
//!
//! Every state and operator carries an ordered list of tensor factor
//! dimensions. The leftmost factor is the most significant digit of a basis
//! index, so `|abc>` on three qubits has index `4a + 2b + c`.

mod density;
mod index;
mod schmidt;
mod state;
mod subspace;
mod unitary;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub use density::DensityMatrix;
pub use index::FactorLayout;
pub use schmidt::{schmidt, SchmidtDecomposition};
pub use state::StateVector;
pub use subspace::{complement, extend_to_basis, span_subspace, Subspace};
pub use unitary::{random_unitary, UnitaryOperator};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Default threshold for norms, ranks and orthogonality checks.
pub const DEFAULT_TOL: f64 = 1e-10;

#[cfg(test)]
pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
#[cfg(test)]
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Types that support the tensor (Kronecker) product.
pub trait Kron: Sized {
    fn kron(&self, other: &Self) -> Self;
}

/// `a ⊗ b`, with factor lists concatenated.
pub fn kron<T: Kron>(a: &T, b: &T) -> T {
    a.kron(b)
}

/// Kronecker product of two raw matrices.
pub fn kron_matrix(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Count of eigenvalues strictly above `tol` times the largest eigenvalue.
pub fn numerical_rank(rho: &DensityMatrix, tol: f64) -> usize {
    rank_of_spectrum(&rho.eigenvalues(), tol)
}

pub(crate) fn rank_of_spectrum(descending: &[f64], tol: f64) -> usize {
    let Some(&largest) = descending.first() else {
        return 0;
    };
    if largest <= 0.0 {
        return 0;
    }
    descending.iter().filter(|&&v| v > tol * largest).count()
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
/// The input is symmetrized first; eigenvectors are the returned columns.
pub fn hermitian_eigh(m: &CMatrix) -> crate::Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(crate::Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            n,
            m.ncols()
        )));
    }
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or(crate::Error::Numerical("Hermitian eigendecomposition did not converge"))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Singular value decomposition with singular values sorted descending.
/// Returns `(u, s, v)` with `m = u diag(s) v^dag`.
pub(crate) fn svd_sorted(m: &CMatrix) -> crate::Result<(CMatrix, Vec<f64>, CMatrix)> {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Ok((CMatrix::zeros(rows, 0), Vec::new(), CMatrix::zeros(cols, 0)));
    }
    let svd = nalgebra::SVD::try_new(m.clone(), true, true, f64::EPSILON, 0)
        .ok_or(crate::Error::Numerical("singular value decomposition did not converge"))?;
    let u = svd.u.ok_or(crate::Error::Numerical("missing left singular vectors"))?;
    let v_t = svd.v_t.ok_or(crate::Error::Numerical("missing right singular vectors"))?;
    let mut order: Vec<usize> = (0..k).collect();
    // Stable sort keeps input order among ties.
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s = order.iter().map(|&j| svd.singular_values[j]).collect();
    let u = CMatrix::from_fn(rows, k, |i, j| u[(i, order[j])]);
    let v = CMatrix::from_fn(cols, k, |i, j| v_t[(order[j], i)].conj());
    Ok((u, s, v))
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest absolute entry of `m^dag m - I`.
pub fn unitarity_error(m: &CMatrix) -> f64 {
    let n = m.ncols();
    let gram = m.adjoint() * m;
    max_abs_diff(&gram, &CMatrix::identity(n, n))
}
