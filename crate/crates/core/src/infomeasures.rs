//! Scalar information quantities, all in bits.

use std::f64::consts::PI;

use serde::Serialize;

use crate::branchstate::{PureState, SubsystemSelector};
use crate::density::{clip_spectrum, DensityMatrix};
use crate::error::{Error, Result};
use crate::matcore::{eig_hermitian, eigvals_hermitian, pauli, tensor, ComplexMatrix, C64};

const SPECTRUM_SUM_TOL: f64 = 1e-9;

/// Largest unmeasured side accepted by the discord optimizer.
pub const MAX_UNMEASURED_DIM: usize = 1 << 6;

fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Rounds values in (−1e-12, 0) up to zero.
fn snap_zero(x: f64) -> f64 {
    if x < 0.0 && x > -1e-12 {
        0.0
    } else {
        x
    }
}

/// Von Neumann entropy of a spectrum, `−Σ λ log₂ λ` with `0 log 0 = 0`.
pub fn entropy(spectrum: &[f64]) -> Result<f64> {
    let clipped = clip_spectrum(spectrum.to_vec())?;
    let sum: f64 = clipped.iter().sum();
    if (sum - 1.0).abs() > SPECTRUM_SUM_TOL {
        return Err(Error::NotNormalized { sum });
    }
    // An eigenvalue a hair above 1 gives a tiny negative sum.
    Ok((-clipped.iter().map(|&l| xlog2x(l)).sum::<f64>()).max(0.0))
}

pub fn density_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy(&rho.spectrum()?)
}

/// Entropy of an unnormalized PSD block with trace `p`: returns `p·S(block/p)`.
fn weighted_entropy(block: &ComplexMatrix) -> Result<f64> {
    let mu = eigvals_hermitian(block)?;
    let p: f64 = mu.iter().sum();
    Ok(xlog2x(p) - mu.iter().map(|&m| xlog2x(m.max(0.0))).sum::<f64>())
}

pub fn selection_entropy<S: PureState + ?Sized>(s: &S, sel: &SubsystemSelector) -> Result<f64> {
    entropy(&s.reduced_spectrum(sel)?)
}

/// `I(A:B) = S(A) + S(B) − S(AB)` for disjoint selections of a pure global state.
pub fn mutual_information<S: PureState + ?Sized>(
    s: &S,
    a: &SubsystemSelector,
    b: &SubsystemSelector,
) -> Result<f64> {
    let ab = a.union(b)?;
    ab.check(s.n_env())?;
    Ok(selection_entropy(s, a)? + selection_entropy(s, b)? - selection_entropy(s, &ab)?)
}

/// `Σ_{i>j} |ρ_ij|`.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    (0..m.rows())
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)].norm())
        .sum()
}

/// Rank-one projective qubit measurement along the Bloch direction (θ, φ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementBasis {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementBasis {
    /// Folds arbitrary angles into θ ∈ [0, π], φ ∈ [0, 2π) without changing the projector pair.
    pub fn new(theta: f64, phi: f64) -> Self {
        let mut theta = theta.rem_euclid(2.0 * PI);
        let mut phi = phi;
        if theta > PI {
            theta = 2.0 * PI - theta;
            phi += PI;
        }
        Self { theta, phi: phi.rem_euclid(2.0 * PI) }
    }

    /// (|v>, |v⊥>) with |v> = cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>.
    pub fn vectors(&self) -> [[C64; 2]; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let e = C64::from_polar(1.0, self.phi);
        [[C64::from(c), e * s], [-e.conj() * s, C64::from(c)]]
    }

    pub fn projectors(&self) -> [ComplexMatrix; 2] {
        self.vectors().map(|v| ComplexMatrix::outer(&v, &v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscordResult {
    pub mutual_info: f64,
    pub holevo: f64,
    pub discord: f64,
    pub optimal_basis: MeasurementBasis,
}

#[derive(Debug, Clone, Copy)]
pub struct DiscordOptions {
    /// Grid points per Bloch angle.
    pub grid: usize,
    /// Convergence threshold of the local refinement, in the objective.
    pub refine_tol: f64,
}

impl Default for DiscordOptions {
    fn default() -> Self {
        Self { grid: 64, refine_tol: 1e-9 }
    }
}

/// The four operators `<a|ρ|b>` (a, b ∈ {0,1} on the measured qubit) acting on the rest.
struct MeasuredBlocks {
    blocks: [[ComplexMatrix; 2]; 2],
}

impl MeasuredBlocks {
    fn new(rho: &DensityMatrix, measured: usize) -> Result<Self> {
        let dims = rho.dims();
        let stride: usize = dims[measured + 1..].iter().product();
        let rest = rho.dim() / 2;
        let split = |r: usize| {
            // Rest index -> (high part, low part) around the measured digit.
            (r / stride, r % stride)
        };
        let full = |a: usize, r: usize| {
            let (hi, lo) = split(r);
            (hi * 2 + a) * stride + lo
        };
        let m = rho.matrix();
        let block = |a: usize, b: usize| {
            let mut out = ComplexMatrix::zeros(rest, rest);
            for r in 0..rest {
                for c in 0..rest {
                    out[(r, c)] = m[(full(a, r), full(b, c))];
                }
            }
            out
        };
        Ok(Self { blocks: [[block(0, 0), block(0, 1)], [block(1, 0), block(1, 1)]] })
    }

    fn unmeasured(&self) -> ComplexMatrix {
        &self.blocks[0][0] + &self.blocks[1][1]
    }

    /// Unnormalized conditional state `<v|ρ|v>` of the unmeasured side.
    fn conditional(&self, v: &[C64; 2]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.blocks[0][0].rows(), self.blocks[0][0].cols());
        for a in 0..2 {
            for b in 0..2 {
                let w = v[a].conj() * v[b];
                out = &out + &self.blocks[a][b].scale(w);
            }
        }
        out
    }

    /// `Σ_k p_k S(ρ_k)` for the measurement.
    fn conditional_entropy(&self, basis: &MeasurementBasis, rho_rest: &ComplexMatrix) -> f64 {
        let [v, _] = basis.vectors();
        let first = self.conditional(&v);
        let second = rho_rest - &first;
        weighted_entropy(&first).unwrap_or(f64::INFINITY)
            + weighted_entropy(&second).unwrap_or(f64::INFINITY)
    }
}

/// Discord with a projective measurement on the qubit subsystem `measured`.
pub fn discord_measured_on_qubit(rho: &DensityMatrix, measured: usize) -> Result<DiscordResult> {
    discord_with_options(rho, measured, &DiscordOptions::default())
}

pub fn discord_with_options(
    rho: &DensityMatrix,
    measured: usize,
    opts: &DiscordOptions,
) -> Result<DiscordResult> {
    let dims = rho.dims();
    if measured >= dims.len() {
        return Err(Error::OutOfRange { what: "measured subsystem", value: measured, max: dims.len() - 1 });
    }
    if dims[measured] != 2 {
        return Err(Error::Unsupported(format!(
            "discord needs a qubit on the measured side, got dimension {}",
            dims[measured]
        )));
    }
    if dims.len() < 2 {
        return Err(Error::Shape("discord needs at least two subsystems".into()));
    }
    let rest = rho.dim() / 2;
    if rest > MAX_UNMEASURED_DIM {
        return Err(Error::Unsupported(format!("unmeasured side of dimension {rest}")));
    }
    if opts.grid < 2 {
        return Err(Error::Argument("discord grid needs at least 2 points per angle".into()));
    }

    let blocks = MeasuredBlocks::new(rho, measured)?;
    let rho_rest = blocks.unmeasured();
    let s_rest = weighted_entropy(&rho_rest)?;
    let s_measured = {
        let m = rho.partial_trace(&[measured])?;
        density_entropy(&m)?
    };
    let mutual_info = s_measured + s_rest - density_entropy(rho)?;

    let objective = |x: [f64; 2]| blocks.conditional_entropy(&MeasurementBasis::new(x[0], x[1]), &rho_rest);

    let g = opts.grid;
    let mut best = ([0.0, 0.0], f64::INFINITY);
    for i in 0..g {
        let theta = PI * i as f64 / (g - 1) as f64;
        for k in 0..g {
            let phi = 2.0 * PI * k as f64 / g as f64;
            let f = objective([theta, phi]);
            if f < best.1 {
                best = ([theta, phi], f);
            }
        }
    }
    let step = PI / g as f64;
    let (x, fmin) = nelder_mead(&objective, best.0, step, opts.refine_tol);
    let (x, fmin) = if fmin < best.1 { (x, fmin) } else { best };

    let holevo = s_rest - fmin;
    Ok(DiscordResult {
        mutual_info,
        holevo,
        discord: snap_zero(mutual_info - holevo),
        optimal_basis: MeasurementBasis::new(x[0], x[1]),
    })
}

/// Two-dimensional Nelder–Mead minimization.
fn nelder_mead(f: &impl Fn([f64; 2]) -> f64, start: [f64; 2], step: f64, tol: f64) -> ([f64; 2], f64) {
    let mut simplex: Vec<([f64; 2], f64)> = [start, [start[0] + step, start[1]], [start[0], start[1] + step]]
        .into_iter()
        .map(|x| (x, f(x)))
        .collect();
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];

    for _ in 0..2000 {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[2].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .map(|(x, _)| (x[0] - simplex[0].0[0]).abs().max((x[1] - simplex[0].0[1]).abs()))
            .fold(0.0, f64::max);
        if spread <= tol * 1e-3 && size <= 1e-10 {
            break;
        }
        let centroid = lerp(simplex[0].0, simplex[1].0, 0.5);
        let worst = simplex[2];
        let reflected = lerp(centroid, worst.0, -1.0);
        let fr = f(reflected);
        if fr < simplex[0].1 {
            let expanded = lerp(centroid, worst.0, -2.0);
            let fe = f(expanded);
            simplex[2] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[1].1 {
            simplex[2] = (reflected, fr);
        } else {
            let contracted = if fr < worst.1 {
                lerp(centroid, reflected, 0.5)
            } else {
                lerp(centroid, worst.0, 0.5)
            };
            let fc = f(contracted);
            if fc < worst.1.min(fr) {
                simplex[2] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    let x = lerp(best, v.0, 0.5);
                    *v = (x, f(x));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0]
}

/// Both sides of `I(S1S2:F) − I(S1:F) = I(S2:E) − I(S2:F̄)` for a fraction `F` of `m` qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaI {
    pub lhs: f64,
    pub rhs: f64,
}

pub fn delta_i<S: PureState + ?Sized>(s: &S, m: usize) -> Result<DeltaI> {
    let n = s.n_env();
    if m > n {
        return Err(Error::OutOfRange { what: "fraction size", value: m, max: n });
    }
    let frac = SubsystemSelector::env(m);
    let lhs = if m == 0 {
        0.0
    } else {
        mutual_information(s, &SubsystemSelector::system(), &frac)?
            - mutual_information(s, &SubsystemSelector::s1(), &frac)?
    };
    let whole = mutual_information(s, &SubsystemSelector::s2(), &SubsystemSelector::env(n))?;
    let rest = if m == n {
        0.0
    } else {
        mutual_information(s, &SubsystemSelector::s2(), &SubsystemSelector::env(n - m))?
    };
    Ok(DeltaI { lhs, rhs: whole - rest })
}

/// `0 ≤ ΔI ≤ S(S1S2) + D←(S1S2:F)`. The upper bound needs a single-qubit
/// fraction (the measured side of the discord) and is `None` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KwGap {
    pub lower: f64,
    pub upper: Option<f64>,
    pub delta: f64,
    pub backward_discord: Option<f64>,
}

impl KwGap {
    pub fn holds(&self, slack: f64) -> bool {
        self.delta >= self.lower - slack && self.upper.map_or(true, |u| self.delta <= u + slack)
    }
}

pub fn kw_gap_bounds<S: PureState + ?Sized>(s: &S, m: usize) -> Result<KwGap> {
    let delta = delta_i(s, m)?.lhs;
    let backward_discord = if m == 1 {
        let rho = s.reduce(&SubsystemSelector::system().with_env(1))?;
        Some(discord_measured_on_qubit(&rho, 2)?.discord)
    } else {
        None
    };
    let s_sys = selection_entropy(s, &SubsystemSelector::system())?;
    Ok(KwGap {
        lower: 0.0,
        upper: backward_discord.map(|d| s_sys + d),
        delta,
        backward_discord,
    })
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(Error::Shape(format!("concurrence needs a two-qubit state, got dims {:?}", rho.dims())));
    }
    let yy = tensor(&pauli::y(), &pauli::y())?;
    let m = rho.matrix();
    let tilde = &(&yy * &m.map(|z| z.conj())) * &yy;
    // Round-off eigenvalues of a rank-deficient state would surface as ~1e-8 after the
    // square root, so anything at the double-precision floor counts as zero.
    let root = eig_hermitian(m)?.apply(|l| C64::from(if l > 1e-14 { l.sqrt() } else { 0.0 }));
    let r = &(&root * &tilde) * &root;
    let mut l: Vec<f64> = eigvals_hermitian(&r)?
        .into_iter()
        .map(|x| if x > 1e-14 { x.sqrt() } else { 0.0 })
        .collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// Entanglement of formation of a two-qubit state, from its concurrence.
pub fn entanglement_of_formation(rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence(rho)?;
    let x = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
    Ok(-xlog2x(x) - xlog2x(1.0 - x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branchstate::{BranchState, ModelParams};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn binary_entropy(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    fn bell() -> DensityMatrix {
        let s = C64::from(FRAC_1_SQRT_2);
        let z = C64::from(0.0);
        DensityMatrix::from_pure(&[s, z, z, s], vec![2, 2]).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((entropy(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        assert!((entropy(&[0.625, 0.375]).unwrap() - 0.954434002924965).abs() < 1e-12);
        assert!(matches!(entropy(&[1.0, -1e-6]), Err(Error::NegativeEigenvalue { .. })));
        assert!(matches!(entropy(&[0.5, 0.4]), Err(Error::NotNormalized { .. })));
        assert_eq!(entropy(&[1.0, -1e-13]).unwrap(), 0.0);
    }

    #[test]
    fn mutual_information_examples() {
        let s0 = BranchState::build(&ModelParams::preset(6, 0.0)).unwrap();
        let sys = SubsystemSelector::system();
        assert!(mutual_information(&s0, &sys, &SubsystemSelector::env(1)).unwrap().abs() < 1e-12);

        let s = BranchState::build(&ModelParams::preset(6, FRAC_PI_4)).unwrap();
        let h = binary_entropy(0.625);
        assert!((mutual_information(&s, &sys, &SubsystemSelector::env(1)).unwrap() - h).abs() < 1e-10);
        assert!((mutual_information(&s, &sys, &SubsystemSelector::env(6)).unwrap() - 2.0 * h).abs() < 1e-10);
        assert!(mutual_information(&s, &sys, &SubsystemSelector::s1()).is_err());
    }

    #[test]
    fn coherence_examples() {
        let diag = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.2, 0.3, 0.5]), vec![3]).unwrap();
        assert_eq!(l1_coherence(&diag), 0.0);

        let s = BranchState::build(&ModelParams::preset(6, FRAC_PI_4)).unwrap();
        let sys = s.reduce(&SubsystemSelector::system()).unwrap();
        assert!((l1_coherence(&sys) - 0.375).abs() < 1e-12);
        let env = s.reduce(&SubsystemSelector::env(1)).unwrap();
        assert!((l1_coherence(&env) - 0.125).abs() < 1e-12);
    }

    #[test]
    fn measurement_basis_is_complete() {
        for (t, p) in [(0.0, 0.0), (1.1, 4.0), (PI, 2.5), (4.0, -1.0)] {
            let b = MeasurementBasis::new(t, p);
            assert!((0.0..=PI).contains(&b.theta) && (0.0..2.0 * PI).contains(&b.phi));
            let [p0, p1] = b.projectors();
            assert!((&p0 + &p1).max_diff(&ComplexMatrix::identity(2)) < 1e-14);
            let [q0, _] = MeasurementBasis { theta: t, phi: p }.projectors();
            assert!(q0.max_diff(&p0) < 1e-12);
        }
    }

    #[test]
    fn discord_of_classical_state_is_zero() {
        let rho = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.1, 0.2, 0.3, 0.4]), vec![2, 2]).unwrap();
        for side in 0..2 {
            let d = discord_measured_on_qubit(&rho, side).unwrap();
            assert!(d.discord.abs() < 1e-9, "{d:?}");
        }
    }

    #[test]
    fn bell_discord() {
        let d = discord_measured_on_qubit(&bell(), 0).unwrap();
        assert!((d.mutual_info - 2.0).abs() < 1e-10);
        assert!((d.holevo - 1.0).abs() < 1e-9);
        assert!((d.discord - 1.0).abs() < 1e-9);
    }

    #[test]
    fn discord_rejects_non_qubit_side() {
        let rho = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.125; 8]), vec![4, 2]).unwrap();
        assert!(matches!(discord_measured_on_qubit(&rho, 0), Err(Error::Unsupported(_))));
        assert!(discord_measured_on_qubit(&rho, 1).is_ok());
        assert!(discord_measured_on_qubit(&rho, 2).is_err());
    }

    #[test]
    fn plateau_single_pair_discord_vanishes() {
        let s = BranchState::build(&ModelParams::preset(6, FRAC_PI_4)).unwrap();
        let rho = s.reduce(&SubsystemSelector::s1().with_env(1)).unwrap();
        assert!(discord_measured_on_qubit(&rho, 0).unwrap().discord.abs() < 1e-6);
    }

    #[test]
    fn delta_i_examples() {
        let s0 = BranchState::build(&ModelParams::preset(5, 0.0)).unwrap();
        for m in 0..=5 {
            let d = delta_i(&s0, m).unwrap();
            assert!(d.lhs.abs() < 1e-10 && d.rhs.abs() < 1e-10);
        }
        let s = BranchState::build(&ModelParams::preset(5, 0.6)).unwrap();
        let end = delta_i(&s, 5).unwrap();
        let whole = mutual_information(&s, &SubsystemSelector::s2(), &SubsystemSelector::env(5)).unwrap();
        assert!((end.rhs - whole).abs() < 1e-12);
        assert!((end.lhs - end.rhs).abs() < 1e-9);
        assert!(delta_i(&s, 6).is_err());
    }

    #[test]
    fn kw_gap_examples() {
        let s0 = BranchState::build(&ModelParams::preset(4, 0.0)).unwrap();
        let g = kw_gap_bounds(&s0, 1).unwrap();
        assert!(g.delta.abs() < 1e-10 && g.holds(1e-6));

        let s = BranchState::build(&ModelParams::preset(6, FRAC_PI_4)).unwrap();
        let g = kw_gap_bounds(&s, 1).unwrap();
        assert!(g.backward_discord.unwrap().abs() < 1e-6);
        assert!((g.upper.unwrap() - binary_entropy(0.625)).abs() < 1e-6);
        assert!(g.holds(1e-6));
        assert_eq!(kw_gap_bounds(&s, 3).unwrap().upper, None);
    }

    #[test]
    fn concurrence_examples() {
        assert!((concurrence(&bell()).unwrap() - 1.0).abs() < 1e-10);
        assert!((entanglement_of_formation(&bell()).unwrap() - 1.0).abs() < 1e-9);
        let mixed = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.25; 4]), vec![2, 2]).unwrap();
        assert!(concurrence(&mixed).unwrap().abs() < 1e-12);
    }
}
