//! The global state of two interacting system qubits dephased by `N` identical
//! environment qubits, kept in compressed form.
//!
//! Because the system-system coupling commutes with the dephasing terms, the
//! state is a superposition of four branches, one per system basis label. Each
//! branch carries a single amplitude and the (identical) state every environment
//! qubit ends up in. Reductions never expand the `2^(N+2)` vector: traced
//! environment qubits contribute scalar overlaps raised to a power, and the
//! spectrum of any reduction follows from a 4x4 Gram-weighted matrix.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::density::{clip_spectrum, DensityMatrix};
use crate::error::{Error, Result};
use crate::matcore::{eig_hermitian, eigvals_hermitian, ComplexMatrix, C64, MAX_DIM};

const NORM_TOL: f64 = 1e-12;

/// Physical parameters of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub theta1: f64,
    pub theta2: f64,
    /// Exchange coupling shared by the XX and YY terms.
    pub j: f64,
    pub jz: f64,
    /// System-environment dephasing coupling.
    pub jse: f64,
    pub n_env: usize,
    pub time: f64,
}

impl ModelParams {
    /// θ₁ = θ₂ = π/6, J = 10, Jz = 0, J_SE = 1.
    pub fn preset(n_env: usize, time: f64) -> Self {
        Self {
            theta1: std::f64::consts::FRAC_PI_6,
            theta2: std::f64::consts::FRAC_PI_6,
            j: 10.0,
            jz: 0.0,
            jse: 1.0,
            n_env,
            time,
        }
    }

    pub fn at_time(self, time: f64) -> Self {
        Self { time, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_env == 0 {
            return Err(Error::Argument("environment size must be at least 1".into()));
        }
        let finite = [self.theta1, self.theta2, self.j, self.jz, self.jse, self.time];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::Argument("parameters must be finite".into()));
        }
        if self.time < 0.0 {
            return Err(Error::Argument(format!("time {} is negative", self.time)));
        }
        Ok(())
    }

    /// (α, β, γ, δ) = (c₁c₂, c₁s₂, s₁c₂, s₁s₂).
    pub fn initial_weights(&self) -> [f64; 4] {
        let (s1, c1) = self.theta1.sin_cos();
        let (s2, c2) = self.theta2.sin_cos();
        [c1 * c2, c1 * s2, s1 * c2, s1 * s2]
    }
}

/// System basis label of a branch; `S1` is the high bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchLabel {
    L00,
    L01,
    L10,
    L11,
}

impl BranchLabel {
    pub const ALL: [BranchLabel; 4] = [Self::L00, Self::L01, Self::L10, Self::L11];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn s1(self) -> usize {
        self.index() >> 1
    }

    pub fn s2(self) -> usize {
        self.index() & 1
    }
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.s1(), self.s2())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub label: BranchLabel,
    pub amplitude: C64,
    /// State of every environment qubit conditioned on this branch.
    pub env_ket: [C64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    branches: [Branch; 4],
    n_env: usize,
}

/// Which subsystems survive a reduction.
///
/// Environment qubits are identified by count: because every environment qubit
/// couples identically, any `m`-subset gives the same reduction, and by
/// convention the kept fraction is qubits `1..=m`. When two selectors are
/// combined (mutual information) their environment parts are disjoint blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsystemSelector {
    pub keep_s1: bool,
    pub keep_s2: bool,
    pub env_kept: usize,
}

impl SubsystemSelector {
    pub const fn new(keep_s1: bool, keep_s2: bool, env_kept: usize) -> Self {
        Self { keep_s1, keep_s2, env_kept }
    }

    pub const fn system() -> Self {
        Self::new(true, true, 0)
    }

    pub const fn s1() -> Self {
        Self::new(true, false, 0)
    }

    pub const fn s2() -> Self {
        Self::new(false, true, 0)
    }

    pub const fn env(m: usize) -> Self {
        Self::new(false, false, m)
    }

    pub const fn with_env(self, m: usize) -> Self {
        Self { env_kept: m, ..self }
    }

    pub fn is_empty(&self) -> bool {
        !self.keep_s1 && !self.keep_s2 && self.env_kept == 0
    }

    pub fn system_qubits(&self) -> usize {
        self.keep_s1 as usize + self.keep_s2 as usize
    }

    pub fn qubits(&self) -> usize {
        self.system_qubits() + self.env_kept
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        !(self.keep_s1 && other.keep_s1) && !(self.keep_s2 && other.keep_s2)
    }

    /// Union of two disjoint selectors.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if !self.is_disjoint(other) {
            return Err(Error::Argument(format!("selectors {self} and {other} overlap")));
        }
        Ok(Self::new(
            self.keep_s1 || other.keep_s1,
            self.keep_s2 || other.keep_s2,
            self.env_kept + other.env_kept,
        ))
    }

    /// Everything else, relative to an environment of `n_env` qubits.
    pub fn complement(&self, n_env: usize) -> Result<Self> {
        self.check(n_env)?;
        Ok(Self::new(!self.keep_s1, !self.keep_s2, n_env - self.env_kept))
    }

    pub fn check(&self, n_env: usize) -> Result<()> {
        if self.env_kept > n_env {
            return Err(Error::OutOfRange { what: "kept environment qubits", value: self.env_kept, max: n_env });
        }
        if self.is_empty() {
            return Err(Error::Argument("selector keeps nothing".into()));
        }
        Ok(())
    }

    fn system_key(&self, label: BranchLabel) -> usize {
        match (self.keep_s1, self.keep_s2) {
            (true, true) => label.index(),
            (true, false) => label.s1(),
            (false, true) => label.s2(),
            (false, false) => 0,
        }
    }

    fn traced_key(&self, label: BranchLabel) -> usize {
        Self::new(!self.keep_s1, !self.keep_s2, 0).system_key(label)
    }
}

impl fmt::Display for SubsystemSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.keep_s1 {
            f.write_str("S1")?;
        }
        if self.keep_s2 {
            f.write_str("S2")?;
        }
        if self.env_kept > 0 {
            write!(f, "E[{}]", self.env_kept)?;
        }
        Ok(())
    }
}

/// Anything that can hand out reductions of a pure global state of this model.
pub trait PureState {
    fn n_env(&self) -> usize;

    fn reduce(&self, sel: &SubsystemSelector) -> Result<DensityMatrix>;

    /// Eigenvalues of the reduction, descending, clipped.
    fn reduced_spectrum(&self, sel: &SubsystemSelector) -> Result<Vec<f64>>;
}

fn inner(a: &[C64; 2], b: &[C64; 2]) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

impl BranchState {
    pub fn build(p: &ModelParams) -> Result<Self> {
        p.validate()?;
        let [alpha, beta, gamma, delta] = p.initial_weights();
        let t = p.time;
        let nzt = p.n_env as f64 * p.jz * t;
        let (sin_jt, cos_jt) = (p.j * t).sin_cos();
        let minus = C64::from_polar(1.0, -nzt);
        let plus = C64::from_polar(1.0, nzt);
        let i = C64::new(0.0, 1.0);

        let amps = [
            minus * alpha,
            plus * (C64::from(beta * cos_jt) - i * gamma * sin_jt),
            plus * (C64::from(gamma * cos_jt) - i * beta * sin_jt),
            minus * delta,
        ];
        let phase = C64::from_polar(FRAC_1_SQRT_2, 2.0 * p.jse * t);
        let plus_ket = [C64::from(FRAC_1_SQRT_2); 2];
        let kets = [[phase.conj(), phase], plus_ket, plus_ket, [phase, phase.conj()]];

        let branches = BranchLabel::ALL.map(|label| Branch {
            label,
            amplitude: amps[label.index()],
            env_ket: kets[label.index()],
        });
        Self::from_branches(branches, p.n_env)
    }

    /// Assembles a state from explicit branches, checking normalization.
    pub fn from_branches(branches: [Branch; 4], n_env: usize) -> Result<Self> {
        if n_env == 0 {
            return Err(Error::Argument("environment size must be at least 1".into()));
        }
        for (b, label) in branches.iter().zip(BranchLabel::ALL) {
            if b.label != label {
                return Err(Error::Argument("branches must be ordered 00, 01, 10, 11".into()));
            }
            let norm = (b.env_ket[0].norm_sqr() + b.env_ket[1].norm_sqr()).sqrt();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::Argument(format!("branch {label} env ket has norm {norm}")));
            }
        }
        let total: f64 = branches.iter().map(|b| b.amplitude.norm_sqr()).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::Argument(format!("branch weights sum to {total}")));
        }
        Ok(Self { branches, n_env })
    }

    pub fn branches(&self) -> &[Branch; 4] {
        &self.branches
    }

    pub fn branch(&self, label: BranchLabel) -> &Branch {
        &self.branches[label.index()]
    }

    /// `<χ_j|χ_i>^m`, the overlap of `m` environment qubits between two branches.
    pub fn branch_env_overlap(&self, i: BranchLabel, j: BranchLabel, m: usize) -> Result<C64> {
        if m > self.n_env {
            return Err(Error::OutOfRange { what: "environment qubits", value: m, max: self.n_env });
        }
        Ok(self.overlap(i, j, m))
    }

    fn overlap(&self, i: BranchLabel, j: BranchLabel, m: usize) -> C64 {
        if i == j {
            return C64::from(1.0);
        }
        inner(&self.branch(j).env_ket, &self.branch(i).env_ket).powu(m as u32)
    }

    /// Coefficients A_ij with ρ_kept = Σ A_ij |kept_i><kept_j|.
    fn reduction_weights(&self, sel: &SubsystemSelector) -> [[C64; 4]; 4] {
        let traced_env = self.n_env - sel.env_kept;
        let mut a = [[C64::from(0.0); 4]; 4];
        for bi in &self.branches {
            for bj in &self.branches {
                if sel.traced_key(bi.label) != sel.traced_key(bj.label) {
                    continue;
                }
                a[bi.label.index()][bj.label.index()] =
                    bi.amplitude * bj.amplitude.conj() * self.overlap(bi.label, bj.label, traced_env);
            }
        }
        a
    }

    /// Full state vector over S1, S2, E1..EN; only for small `N`.
    pub fn to_state_vector(&self) -> Result<Vec<C64>> {
        if self.n_env + 2 > 20 {
            return Err(Error::Capacity { requested: usize::MAX, cap: 1 << 20 });
        }
        let dim = 1usize << (self.n_env + 2);
        let env_dim = 1usize << self.n_env;
        let mut psi = vec![C64::from(0.0); dim];
        for b in &self.branches {
            let env = tensor_power(&b.env_ket, self.n_env);
            let base = b.label.index() * env_dim;
            for (k, e) in env.into_iter().enumerate() {
                psi[base + k] = b.amplitude * e;
            }
        }
        Ok(psi)
    }
}

/// `v ⊗ v ⊗ … ⊗ v` (m factors); the first factor is the most significant.
fn tensor_power(v: &[C64; 2], m: usize) -> Vec<C64> {
    let mut out = vec![C64::from(1.0)];
    for _ in 0..m {
        out = out.iter().flat_map(|&x| [x * v[0], x * v[1]]).collect();
    }
    out
}

impl PureState for BranchState {
    fn n_env(&self) -> usize {
        self.n_env
    }

    /// Explicit reduced density matrix; subsystem order S1, S2, then env qubits.
    fn reduce(&self, sel: &SubsystemSelector) -> Result<DensityMatrix> {
        sel.check(self.n_env)?;
        let qubits = sel.qubits();
        if qubits > MAX_DIM.trailing_zeros() as usize {
            return Err(Error::Capacity {
                requested: 1usize.checked_shl(qubits as u32).unwrap_or(usize::MAX),
                cap: MAX_DIM,
            });
        }
        let m = sel.env_kept;
        let block = 1usize << m;
        let dim = block << sel.system_qubits();
        let weights = self.reduction_weights(sel);
        let env_vecs: Vec<Vec<C64>> =
            self.branches.iter().map(|b| tensor_power(&b.env_ket, m)).collect();

        let mut rho = ComplexMatrix::zeros(dim, dim);
        for bi in &self.branches {
            let (i, ri) = (bi.label.index(), sel.system_key(bi.label) * block);
            for bj in &self.branches {
                let (j, rj) = (bj.label.index(), sel.system_key(bj.label) * block);
                let w = weights[i][j];
                if w == C64::from(0.0) {
                    continue;
                }
                for (p, &vp) in env_vecs[i].iter().enumerate() {
                    let wp = w * vp;
                    for (q, &vq) in env_vecs[j].iter().enumerate() {
                        rho[(ri + p, rj + q)] += wp * vq.conj();
                    }
                }
            }
        }
        DensityMatrix::from_reduction(rho, vec![2; qubits])
    }

    /// Spectrum of the reduction through `G^{1/2} A G^{1/2}`, where `G` is the
    /// Gram matrix of the four kept branch vectors. Works for any `N`.
    fn reduced_spectrum(&self, sel: &SubsystemSelector) -> Result<Vec<f64>> {
        sel.check(self.n_env)?;
        let a = self.reduction_weights(sel);
        let mut gram = ComplexMatrix::zeros(4, 4);
        for bi in &self.branches {
            for bj in &self.branches {
                if sel.system_key(bi.label) == sel.system_key(bj.label) {
                    // <kept_i|kept_j>
                    gram[(bi.label.index(), bj.label.index())] =
                        self.overlap(bj.label, bi.label, sel.env_kept);
                }
            }
        }
        let g = eig_hermitian(&gram)?;
        let root = g.apply(|l| C64::from(l.max(0.0).sqrt()));
        let weights = ComplexMatrix::from_rows(a.iter().map(|row| row.to_vec()).collect());
        let core = &(&root * &weights) * &root;
        clip_spectrum(eigvals_hermitian(&core)?)
    }
}
