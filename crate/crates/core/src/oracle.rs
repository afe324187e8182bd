//! Brute-force evolution in the full `2^(N+2)`-dimensional Hilbert space.
//!
//! Used to validate the branch representation for small environments and to
//! explore unequal XX/YY couplings, where the branch form no longer applies.
//!
//! Qubit order is S1, S2, E1, …, EN with S1 the most significant bit. The
//! Hamiltonian is
//!
//! ```text
//! H = (Jx/2) XX + (Jy/2) YY + N·Jz ZZ   (on S1 S2)
//!   + J_SE Σ_k (Z_S1 + Z_S2) Z_Ek
//! ```
//!
//! With `Jx = Jy = J` its propagator reproduces the branch amplitudes
//! (`cos(Jt)` swap and `e^{∓iNJzt}` phases) exactly.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::branchstate::{BranchState, ModelParams, PureState, SubsystemSelector};
use crate::density::{clip_spectrum, DensityMatrix};
use crate::error::{Error, Result};
use crate::matcore::{eig_hermitian, eigvals_hermitian, pauli, tensor, ComplexMatrix, HermitianSpectrum, C64};

/// Largest environment the dense path accepts (dimension 2^10).
pub const MAX_DENSE_ENV: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenseParams {
    pub model: ModelParams,
    pub jx: f64,
    pub jy: f64,
}

impl DenseParams {
    /// Excitation-preserving coupling, `Jx = Jy = model.j`.
    pub fn commuting(model: ModelParams) -> Self {
        Self { model, jx: model.j, jy: model.j }
    }

    pub fn is_commuting(&self) -> bool {
        self.jx == self.jy
    }

    fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.model.n_env > MAX_DENSE_ENV {
            return Err(Error::Capacity {
                requested: 1 << (self.model.n_env + 2).min(40),
                cap: 1 << (MAX_DENSE_ENV + 2),
            });
        }
        if !self.jx.is_finite() || !self.jy.is_finite() {
            return Err(Error::Argument("couplings must be finite".into()));
        }
        Ok(())
    }
}

fn embed(ops: &[(usize, ComplexMatrix)], qubits: usize) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::identity(1);
    for q in 0..qubits {
        let factor = ops
            .iter()
            .find(|(k, _)| *k == q)
            .map_or_else(pauli::identity, |(_, m)| m.clone());
        out = tensor(&out, &factor)?;
    }
    Ok(out)
}

pub fn hamiltonian(p: &DenseParams) -> Result<ComplexMatrix> {
    p.validate()?;
    let n = p.model.n_env;
    let qubits = n + 2;
    let (x, y, z) = (pauli::x(), pauli::y(), pauli::z());
    let mut h = embed(&[(0, x.clone()), (1, x)], qubits)?.scale(C64::from(p.jx / 2.0));
    h = &h + &embed(&[(0, y.clone()), (1, y)], qubits)?.scale(C64::from(p.jy / 2.0));
    h = &h + &embed(&[(0, z.clone()), (1, z.clone())], qubits)?.scale(C64::from(n as f64 * p.model.jz));
    for k in 0..n {
        for s in 0..2 {
            let term = embed(&[(s, z.clone()), (k + 2, z.clone())], qubits)?;
            h = &h + &term.scale(C64::from(p.model.jse));
        }
    }
    Ok(h)
}

/// `|φ(θ1)>|φ(θ2)>|+>^N`.
pub fn initial_state(p: &ModelParams) -> Vec<C64> {
    let (s1, c1) = p.theta1.sin_cos();
    let (s2, c2) = p.theta2.sin_cos();
    let mut psi: Vec<C64> = [c1 * c2, c1 * s2, s1 * c2, s1 * s2].iter().map(|&a| C64::from(a)).collect();
    for _ in 0..p.n_env {
        psi = psi.iter().flat_map(|&a| [a * FRAC_1_SQRT_2, a * FRAC_1_SQRT_2]).collect();
    }
    psi
}

/// Diagonalizes the Hamiltonian once; evolves the initial state to any time.
#[derive(Debug, Clone)]
pub struct DenseEvolver {
    params: DenseParams,
    spectrum: HermitianSpectrum,
    /// Initial state in the eigenbasis.
    coeffs: Vec<C64>,
}

impl DenseEvolver {
    pub fn new(params: DenseParams) -> Result<Self> {
        let spectrum = eig_hermitian(&hamiltonian(&params)?)?;
        let psi0 = initial_state(&params.model);
        let v = &spectrum.eigenvectors;
        let coeffs = (0..psi0.len())
            .map(|k| (0..psi0.len()).map(|i| v[(i, k)].conj() * psi0[i]).sum())
            .collect();
        Ok(Self { params, spectrum, coeffs })
    }

    pub fn params(&self) -> &DenseParams {
        &self.params
    }

    pub fn state_at(&self, t: f64) -> Result<DenseState> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Argument(format!("time {t} must be finite and nonnegative")));
        }
        let phased: Vec<C64> = self
            .coeffs
            .iter()
            .zip(&self.spectrum.eigenvalues)
            .map(|(&c, &l)| c * C64::from_polar(1.0, -l * t))
            .collect();
        let psi = self.spectrum.eigenvectors.mul_vec(&phased);
        DenseState::new(psi, self.params.model.n_env)
    }
}

/// `e^{−iHt}` applied to the initial product state.
pub fn dense_evolve(p: &DenseParams) -> Result<DenseState> {
    DenseEvolver::new(*p)?.state_at(p.model.time)
}

/// An explicit pure state of S1, S2 and `n_env` environment qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    psi: Vec<C64>,
    n_env: usize,
}

impl DenseState {
    pub fn new(psi: Vec<C64>, n_env: usize) -> Result<Self> {
        if psi.len() != 1 << (n_env + 2) {
            return Err(Error::Shape(format!("state of length {} for {n_env} env qubits", psi.len())));
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Argument(format!("state has squared norm {norm}")));
        }
        Ok(Self { psi, n_env })
    }

    pub fn from_branches(s: &BranchState) -> Result<Self> {
        Self::new(s.to_state_vector()?, s.n_env())
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.psi
    }

    pub fn fidelity(&self, other: &[C64]) -> f64 {
        fidelity(&self.psi, other)
    }

    fn qubit_indices(sel: &SubsystemSelector) -> Vec<usize> {
        let mut keep = Vec::new();
        if sel.keep_s1 {
            keep.push(0);
        }
        if sel.keep_s2 {
            keep.push(1);
        }
        keep.extend((0..sel.env_kept).map(|k| k + 2));
        keep
    }
}

/// `|<a|b>|²`.
pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm_sqr()
}

/// `tr_discarded |ψ><ψ|`, keeping subsystems `keep` in ascending order.
pub fn dense_reduce(psi: &[C64], dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != psi.len() {
        return Err(Error::Shape(format!("dims {dims:?} do not match state of length {}", psi.len())));
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() != keep.len() || kept.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Shape(format!("invalid keep set {keep:?}")));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len() - 1).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let offsets = |subs: &[usize]| -> Vec<usize> {
        let size: usize = subs.iter().map(|&k| dims[k]).product();
        (0..size)
            .map(|mut idx| {
                let mut off = 0;
                for &k in subs.iter().rev() {
                    off += (idx % dims[k]) * strides[k];
                    idx /= dims[k];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&kept);
    let traced_off = offsets(&traced);
    let n = kept_off.len();
    let mut rho = ComplexMatrix::zeros(n, n);
    for (i, &oi) in kept_off.iter().enumerate() {
        for (j, &oj) in kept_off.iter().enumerate().skip(i) {
            let v: C64 = traced_off.iter().map(|&t| psi[oi + t] * psi[oj + t].conj()).sum();
            rho[(i, j)] = v;
            rho[(j, i)] = v.conj();
        }
    }
    DensityMatrix::new(rho, kept.iter().map(|&k| dims[k]).collect())
}

impl PureState for DenseState {
    fn n_env(&self) -> usize {
        self.n_env
    }

    fn reduce(&self, sel: &SubsystemSelector) -> Result<DensityMatrix> {
        sel.check(self.n_env)?;
        dense_reduce(&self.psi, &vec![2; self.n_env + 2], &Self::qubit_indices(sel))
    }

    /// Diagonalizes whichever of the kept set and its complement is smaller.
    fn reduced_spectrum(&self, sel: &SubsystemSelector) -> Result<Vec<f64>> {
        sel.check(self.n_env)?;
        let keep = Self::qubit_indices(sel);
        let qubits = self.n_env + 2;
        let dims = vec![2; qubits];
        let small: Vec<usize> = if 2 * keep.len() <= qubits || keep.len() == qubits {
            keep.clone()
        } else {
            (0..qubits).filter(|q| !keep.contains(q)).collect()
        };
        let rho = dense_reduce(&self.psi, &dims, &small)?;
        let mut vals = clip_spectrum(eigvals_hermitian(rho.matrix())?)?;
        vals.resize(1 << keep.len(), 0.0);
        Ok(vals)
    }
}
