use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{eigvals_hermitian, partial_trace, ComplexMatrix, EIG_CLIP, HERMITIAN_TOL};

const TRACE_TOL: f64 = 1e-10;

/// A Hermitian, unit-trace, positive semidefinite matrix over a list of subsystems.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let rho = Self::checked_structure(matrix, dims)?;
        rho.spectrum()?;
        Ok(rho)
    }

    /// Validates everything except positivity; for matrices that are PSD by construction.
    pub(crate) fn from_reduction(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        Self::checked_structure(matrix, dims)
    }

    fn checked_structure(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!("{}x{} density matrix", matrix.rows(), matrix.cols())));
        }
        if dims.is_empty() || dims.iter().product::<usize>() != matrix.rows() {
            return Err(Error::Shape(format!("dims {dims:?} do not match dimension {}", matrix.rows())));
        }
        let deviation = matrix.hermiticity_residual();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Argument(format!("trace {tr} is not 1")));
        }
        Ok(Self { matrix, dims })
    }

    /// Pure state |ψ><ψ| over the given subsystem dims.
    pub fn from_pure(psi: &[crate::matcore::C64], dims: Vec<usize>) -> Result<Self> {
        Self::new(ComplexMatrix::outer(psi, psi), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Eigenvalues, descending, with round-off negatives clipped to zero.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        clip_spectrum(eigvals_hermitian(&self.matrix)?)
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        let m = partial_trace(&self.matrix, &self.dims, &kept)?;
        let dims = kept.iter().map(|&k| self.dims[k]).collect();
        Self::from_reduction(m, dims)
    }
}

/// Applies the clipping rule: values in [EIG_CLIP, 0) become 0, anything lower is an error.
pub fn clip_spectrum(mut values: Vec<f64>) -> Result<Vec<f64>> {
    for v in &mut values {
        if *v < EIG_CLIP {
            return Err(Error::NegativeEigenvalue { value: *v });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::C64;

    #[test]
    fn validation() {
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.5, 0.5]), vec![2]).is_ok());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.5, 0.6]), vec![2]).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diag(&[1.5, -0.5]), vec![2]).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.5, 0.5]), vec![3]).is_err());
        let skew = ComplexMatrix::from_rows(vec![
            vec![C64::new(0.5, 0.0), C64::new(0.1, 0.0)],
            vec![C64::new(0.2, 0.0), C64::new(0.5, 0.0)],
        ]);
        assert!(matches!(DensityMatrix::new(skew, vec![2]), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn clipping_rule() {
        assert_eq!(clip_spectrum(vec![1.0, -5e-13]).unwrap(), vec![1.0, 0.0]);
        assert!(clip_spectrum(vec![1.0, -1e-9]).is_err());
    }
}
