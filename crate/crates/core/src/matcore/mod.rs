//! Dense complex-matrix kernel.
//!
//! Everything downstream works on [`ComplexMatrix`], a row-major dense matrix of
//! `Complex64`. Residuals are reported in the entrywise max-norm throughout.

mod matrix;
mod spectral;

pub use matrix::{partial_trace, tensor, ComplexMatrix, C64, MAX_DIM};
pub use spectral::{
    commutator_residual, eig_hermitian, eigvals_hermitian, expm_hermitian_generator, is_normal,
    normality_residual, HermitianSpectrum, EIG_CLIP, HERMITIAN_TOL,
};

/// Pauli matrices, ordered in the computational basis {|0>, |1>}.
pub mod pauli {
    use super::{ComplexMatrix, C64};

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn y() -> ComplexMatrix {
        let i = C64::new(0.0, 1.0);
        ComplexMatrix::from_rows(vec![vec![C64::new(0.0, 0.0), -i], vec![i, C64::new(0.0, 0.0)]])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
    }
}
