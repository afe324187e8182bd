use nalgebra::DMatrix;

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Largest tolerated ‖A − A†‖_max for inputs treated as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues in [EIG_CLIP, 0) are treated as round-off and clipped to zero.
pub const EIG_CLIP: f64 = -1e-12;

/// Eigendecomposition `A = V diag(λ) V†` with eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, in the same order as `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianSpectrum {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n)
                    .map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj())
                    .sum();
            }
        }
        out
    }

    /// `V f(Λ) V†` for a scalar function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let fl: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum();
            }
        }
        out
    }
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Shape(format!("{}x{} is not square", a.rows(), a.cols())));
    }
    let deviation = a.hermiticity_residual();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

fn to_nalgebra(a: &ComplexMatrix) -> DMatrix<C64> {
    let n = a.rows();
    // Symmetrize so round-off asymmetry never leaks into the solver.
    DMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

pub fn eig_hermitian(a: &ComplexMatrix) -> Result<HermitianSpectrum> {
    check_hermitian(a)?;
    let n = a.rows();
    let eig = to_nalgebra(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = ComplexMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            vecs[(row, col)] = eig.eigenvectors[(row, k)];
        }
    }
    let spectrum = HermitianSpectrum { eigenvalues, eigenvectors: vecs };
    let residual = spectrum.reconstruct().max_diff(a);
    if residual > 1e-10 * n as f64 * a.max_abs().max(1.0) {
        return Err(Error::Convergence(format!(
            "eigendecomposition of a {n}x{n} matrix reconstructs with residual {residual:.3e}"
        )));
    }
    Ok(spectrum)
}

/// Eigenvalues only, descending. Closed form for n ≤ 2.
pub fn eigvals_hermitian(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    match a.rows() {
        1 => Ok(vec![a[(0, 0)].re]),
        2 => {
            let p = a[(0, 0)].re;
            let q = a[(1, 1)].re;
            let off = (a[(0, 1)] + a[(1, 0)].conj()) * 0.5;
            let mean = 0.5 * (p + q);
            let radius = (0.25 * (p - q) * (p - q) + off.norm_sqr()).sqrt();
            Ok(vec![mean + radius, mean - radius])
        }
        n => {
            let mut vals: Vec<f64> = to_nalgebra(a).symmetric_eigenvalues().iter().copied().collect();
            debug_assert_eq!(vals.len(), n);
            vals.sort_by(|x, y| y.total_cmp(x));
            Ok(vals)
        }
    }
}

/// `exp(−i h t)` for Hermitian `h`, via its eigendecomposition.
pub fn expm_hermitian_generator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(h)?;
    Ok(eig.apply(|l| C64::new(0.0, -l * t).exp()))
}

/// ‖AB − BA‖_max.
pub fn commutator_residual(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() || a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::Shape(format!(
            "commutator of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok((a * b).max_diff(&(b * a)))
}

/// ‖AA† − A†A‖_max; infinite for non-square input.
pub fn normality_residual(a: &ComplexMatrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    let ad = a.adjoint();
    (a * &ad).max_diff(&(&ad * a))
}

pub fn is_normal(a: &ComplexMatrix, tol: f64) -> bool {
    normality_residual(a) <= tol
}
