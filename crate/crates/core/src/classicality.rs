//! Objectivity and classicality verdicts for the system plus one environment qubit.
//!
//! A state of `A ⊗ B` has zero discord for measurements on `A` exactly when the
//! operator blocks obtained by fixing `B`'s basis indices are all normal and
//! mutually commuting (they can then be diagonalized in one basis of `A`), and
//! symmetrically for measurements on `B`. Here `A` is the two-qubit system and
//! `B` a single environment qubit, so the 8x8 state splits into four 4x4
//! system blocks or sixteen 2x2 environment blocks.

use rayon::prelude::*;
use serde::Serialize;

use crate::branchstate::{PureState, SubsystemSelector};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::infomeasures::{mutual_information, selection_entropy};
use crate::matcore::{commutator_residual, normality_residual, ComplexMatrix};

pub const DEFAULT_NULLITY_TOL: f64 = 1e-8;
pub const DEFAULT_PLATEAU_TOL: f64 = 1e-3;

const SYS: usize = 4;
const ENV: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    /// `blocks_sys[i][j]`: system operator paired with `|e_i><e_j|`.
    pub blocks_sys: [[ComplexMatrix; ENV]; ENV],
    /// `blocks_env[k][l]`: environment operator paired with `|s_k><s_l|`.
    pub blocks_env: [[ComplexMatrix; SYS]; SYS],
}

impl BlockDecomposition {
    /// `Σ_ij blocks_sys[i][j] ⊗ |e_i><e_j|`.
    pub fn reassemble_sys(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(SYS * ENV, SYS * ENV);
        for (i, row) in self.blocks_sys.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                for s in 0..SYS {
                    for t in 0..SYS {
                        out[(s * ENV + i, t * ENV + j)] = b[(s, t)];
                    }
                }
            }
        }
        out
    }

    /// `Σ_kl |s_k><s_l| ⊗ blocks_env[k][l]`.
    pub fn reassemble_env(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(SYS * ENV, SYS * ENV);
        for (k, row) in self.blocks_env.iter().enumerate() {
            for (l, b) in row.iter().enumerate() {
                for e in 0..ENV {
                    for f in 0..ENV {
                        out[(k * ENV + e, l * ENV + f)] = b[(e, f)];
                    }
                }
            }
        }
        out
    }

    fn sys_family(&self) -> Vec<&ComplexMatrix> {
        self.blocks_sys.iter().flatten().collect()
    }

    fn env_family(&self) -> Vec<&ComplexMatrix> {
        self.blocks_env.iter().flatten().collect()
    }
}

/// Splits a system-plus-one-qubit state (dims multiplying to 4 × 2, environment last).
pub fn decompose(rho: &DensityMatrix) -> Result<BlockDecomposition> {
    let dims = rho.dims();
    if rho.dim() != SYS * ENV || dims.last() != Some(&ENV) {
        return Err(Error::Shape(format!(
            "expected a 4x2-dimensional system/environment state, got dims {dims:?}"
        )));
    }
    let m = rho.matrix();
    let blocks_sys = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut b = ComplexMatrix::zeros(SYS, SYS);
            for s in 0..SYS {
                for t in 0..SYS {
                    b[(s, t)] = m[(s * ENV + i, t * ENV + j)];
                }
            }
            b
        })
    });
    let blocks_env = std::array::from_fn(|k| {
        std::array::from_fn(|l| {
            let mut b = ComplexMatrix::zeros(ENV, ENV);
            for e in 0..ENV {
                for f in 0..ENV {
                    b[(e, f)] = m[(k * ENV + e, l * ENV + f)];
                }
            }
            b
        })
    });
    Ok(BlockDecomposition { blocks_sys, blocks_env })
}

/// Max of every normality residual and every pairwise commutator residual.
pub fn family_residual(blocks: &[&ComplexMatrix]) -> f64 {
    let mut worst = blocks.iter().map(|b| normality_residual(b)).fold(0.0, f64::max);
    for (i, a) in blocks.iter().enumerate() {
        for b in &blocks[i + 1..] {
            let r = commutator_residual(a, b).unwrap_or(f64::INFINITY);
            worst = worst.max(r);
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalityReport {
    /// Residual of the system-side family (measurements on the system).
    pub max_residual_forward: f64,
    /// Residual of the environment-side family (measurements on the environment qubit).
    pub max_residual_backward: f64,
    pub forward_classical: bool,
    pub backward_classical: bool,
    pub tolerance: f64,
}

pub fn nullity_certificate(bd: &BlockDecomposition, tol: f64) -> ClassicalityReport {
    let forward = family_residual(&bd.sys_family());
    let backward = family_residual(&bd.env_family());
    ClassicalityReport {
        max_residual_forward: forward,
        max_residual_backward: backward,
        forward_classical: forward <= tol,
        backward_classical: backward <= tol,
        tolerance: tol,
    }
}

/// Certificate for the system and the first environment qubit of a global state.
pub fn certify<S: PureState + ?Sized>(s: &S, tol: f64) -> Result<ClassicalityReport> {
    let rho = s.reduce(&SubsystemSelector::system().with_env(1))?;
    Ok(nullity_certificate(&decompose(&rho)?, tol))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlateauReport {
    /// `(f, I(S1S2:F)/S(S1S2))` for fraction sizes `m = 1..=N`, `f = m/N`.
    pub fraction_curve: Vec<(f64, f64)>,
    pub plateau_detected: bool,
    /// Mean of the interior points.
    pub plateau_level: f64,
    /// Largest `|I/S − 1|` over the interior points.
    pub deviation: f64,
}

pub fn detect_plateau<S: PureState + Sync + ?Sized>(s: &S, tol: f64) -> Result<PlateauReport> {
    let n = s.n_env();
    if n < 3 {
        return Err(Error::Argument(format!("plateau detection needs N >= 3, got {n}")));
    }
    let sys = SubsystemSelector::system();
    let entropy = selection_entropy(s, &sys)?;
    if entropy < 1e-12 {
        return Err(Error::Degenerate(format!(
            "system entropy {entropy:.3e} leaves no information to proliferate"
        )));
    }
    let fraction_curve = (1..=n)
        .into_par_iter()
        .map(|m| {
            let mi = mutual_information(s, &sys, &SubsystemSelector::env(m))?;
            Ok((m as f64 / n as f64, mi / entropy))
        })
        .collect::<Result<Vec<_>>>()?;

    let interior = &fraction_curve[..n - 1];
    let deviation = interior.iter().map(|(_, r)| (r - 1.0).abs()).fold(0.0, f64::max);
    let plateau_level = interior.iter().map(|(_, r)| r).sum::<f64>() / interior.len() as f64;
    Ok(PlateauReport {
        fraction_curve,
        plateau_detected: deviation <= tol,
        plateau_level,
        deviation,
    })
}
