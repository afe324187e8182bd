//! Grid evaluations behind the command-line sweeps.
//!
//! Points are evaluated in parallel; results always come back in grid order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::branchstate::{BranchState, ModelParams, PureState, SubsystemSelector};
use crate::classicality::{certify, detect_plateau, ClassicalityReport, PlateauReport};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::infomeasures::{discord_measured_on_qubit, l1_coherence, mutual_information, selection_entropy};
use crate::oracle::{DenseEvolver, DenseParams, DenseState};

/// How global states are produced: the branch form, or dense evolution when
/// the XX and YY couplings differ.
#[derive(Debug, Clone)]
pub enum Model {
    Analytic(ModelParams),
    Dense(Box<DenseEvolver>),
}

impl Model {
    /// Picks the dense path only for unequal couplings.
    pub fn new(params: ModelParams, jx: Option<f64>, jy: Option<f64>) -> Result<Self> {
        params.validate()?;
        let jx = jx.unwrap_or(params.j);
        let jy = jy.unwrap_or(params.j);
        if jx == jy {
            Ok(Self::Analytic(ModelParams { j: jx, ..params }))
        } else {
            Ok(Self::Dense(Box::new(DenseEvolver::new(DenseParams { model: params, jx, jy })?)))
        }
    }

    pub fn params(&self) -> ModelParams {
        match self {
            Self::Analytic(p) => *p,
            Self::Dense(d) => d.params().model,
        }
    }

    pub fn is_commuting(&self) -> bool {
        matches!(self, Self::Analytic(_))
    }

    pub fn state_at(&self, t: f64) -> Result<ModelState> {
        match self {
            Self::Analytic(p) => Ok(ModelState::Branch(BranchState::build(&p.at_time(t))?)),
            Self::Dense(d) => Ok(ModelState::Dense(d.state_at(t)?)),
        }
    }
}

#[derive(Debug, Clone)]
pub enum ModelState {
    Branch(BranchState),
    Dense(DenseState),
}

impl PureState for ModelState {
    fn n_env(&self) -> usize {
        match self {
            Self::Branch(s) => s.n_env(),
            Self::Dense(s) => s.n_env(),
        }
    }

    fn reduce(&self, sel: &SubsystemSelector) -> Result<DensityMatrix> {
        match self {
            Self::Branch(s) => s.reduce(sel),
            Self::Dense(s) => s.reduce(sel),
        }
    }

    fn reduced_spectrum(&self, sel: &SubsystemSelector) -> Result<Vec<f64>> {
        match self {
            Self::Branch(s) => s.reduced_spectrum(sel),
            Self::Dense(s) => s.reduced_spectrum(sel),
        }
    }
}

/// Columns of a time sweep, in output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Quantity {
    MiS1s2E1,
    EntropyS1s2,
    CoherenceS1s2,
    CoherenceE1,
    DiscordS1s2MeasuredS1,
    DiscordS1ekMeasuredS1,
    BackwardNullityResidual,
}

impl Quantity {
    pub const ALL: [Quantity; 7] = [
        Self::MiS1s2E1,
        Self::EntropyS1s2,
        Self::CoherenceS1s2,
        Self::CoherenceE1,
        Self::DiscordS1s2MeasuredS1,
        Self::DiscordS1ekMeasuredS1,
        Self::BackwardNullityResidual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::MiS1s2E1 => "mi_s1s2_e1",
            Self::EntropyS1s2 => "entropy_s1s2",
            Self::CoherenceS1s2 => "coherence_s1s2",
            Self::CoherenceE1 => "coherence_e1",
            Self::DiscordS1s2MeasuredS1 => "discord_s1s2_measured_s1",
            Self::DiscordS1ekMeasuredS1 => "discord_s1ek_measured_s1",
            Self::BackwardNullityResidual => "backward_nullity_residual",
        }
    }

    pub fn valid_names() -> String {
        Self::ALL.map(Self::name).join(", ")
    }

    fn evaluate<S: PureState + ?Sized>(self, s: &S, nullity_tol: f64) -> Result<f64> {
        let sys = SubsystemSelector::system();
        match self {
            Self::MiS1s2E1 => mutual_information(s, &sys, &SubsystemSelector::env(1)),
            Self::EntropyS1s2 => selection_entropy(s, &sys),
            Self::CoherenceS1s2 => Ok(l1_coherence(&s.reduce(&sys)?)),
            Self::CoherenceE1 => Ok(l1_coherence(&s.reduce(&SubsystemSelector::env(1))?)),
            Self::DiscordS1s2MeasuredS1 => Ok(discord_measured_on_qubit(&s.reduce(&sys)?, 0)?.discord),
            Self::DiscordS1ekMeasuredS1 => {
                let rho = s.reduce(&SubsystemSelector::s1().with_env(1))?;
                Ok(discord_measured_on_qubit(&rho, 0)?.discord)
            }
            Self::BackwardNullityResidual => Ok(certify(s, nullity_tol)?.max_residual_backward),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown quantity '{s}'; valid names: {}", Self::valid_names())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeRow {
    pub t: f64,
    /// One value per requested quantity, in the requested order.
    pub values: Vec<f64>,
}

pub fn time_sweep(model: &Model, times: &[f64], quantities: &[Quantity], nullity_tol: f64) -> Result<Vec<TimeRow>> {
    if times.is_empty() {
        return Err(Error::Argument("time grid is empty".into()));
    }
    times
        .par_iter()
        .map(|&t| {
            let s = model.state_at(t)?;
            let values = quantities
                .iter()
                .map(|q| q.evaluate(&s, nullity_tol))
                .collect::<Result<Vec<_>>>()?;
            Ok(TimeRow { t, values })
        })
        .collect()
}

pub const FRACTION_COLUMNS: [&str; 3] = ["f", "mi_composite_over_S", "mi_single_over_S_single"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FractionRow {
    pub m: usize,
    pub f: f64,
    /// `I(S1S2:F)/S(S1S2)`.
    pub mi_composite_over_s: f64,
    /// `I(S1:F)/S(S1)`.
    pub mi_single_over_s_single: f64,
}

/// Both fraction curves at one instant, for fraction sizes `fractions`.
pub fn fraction_sweep(model: &Model, t: f64, fractions: &[usize]) -> Result<Vec<FractionRow>> {
    if fractions.is_empty() {
        return Err(Error::Argument("fraction grid is empty".into()));
    }
    let s = model.state_at(t)?;
    let n = s.n_env();
    if let Some(&bad) = fractions.iter().find(|&&m| m > n) {
        return Err(Error::OutOfRange { what: "fraction size", value: bad, max: n });
    }
    let sys = SubsystemSelector::system();
    let s1 = SubsystemSelector::s1();
    let s_sys = selection_entropy(&s, &sys)?;
    let s_single = selection_entropy(&s, &s1)?;
    if s_sys < 1e-12 || s_single < 1e-12 {
        return Err(Error::Degenerate(format!(
            "system entropies ({s_sys:.3e}, {s_single:.3e}) vanish at t = {t}"
        )));
    }
    fractions
        .par_iter()
        .map(|&m| {
            let (comp, single) = if m == 0 {
                (0.0, 0.0)
            } else {
                let frac = SubsystemSelector::env(m);
                (mutual_information(&s, &sys, &frac)?, mutual_information(&s, &s1, &frac)?)
            };
            Ok(FractionRow {
                m,
                f: m as f64 / n as f64,
                mi_composite_over_s: comp / s_sys,
                mi_single_over_s_single: single / s_single,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalityRun {
    pub t: f64,
    pub classicality: ClassicalityReport,
    pub plateau: Option<PlateauReport>,
    /// Set when the system entropy vanishes and no plateau can be defined.
    pub degenerate_entropy: bool,
    pub notice: Option<String>,
}

pub fn classicality_at(model: &Model, t: f64, nullity_tol: f64, plateau_tol: f64) -> Result<ClassicalityRun> {
    let s = model.state_at(t)?;
    let classicality = certify(&s, nullity_tol)?;
    let (plateau, degenerate_entropy, notice) = match detect_plateau(&s, plateau_tol) {
        Ok(p) => (Some(p), false, None),
        Err(Error::Degenerate(msg)) => (None, true, Some(msg)),
        Err(Error::Argument(msg)) => (None, false, Some(msg)),
        Err(e) => return Err(e),
    };
    Ok(ClassicalityRun { t, classicality, plateau, degenerate_entropy, notice })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn quantity_names_round_trip() {
        for q in Quantity::ALL {
            assert_eq!(q.name().parse::<Quantity>().unwrap(), q);
        }
        let err = "entropy".parse::<Quantity>().unwrap_err().to_string();
        assert!(err.contains("mi_s1s2_e1") && err.contains("backward_nullity_residual"));
    }

    #[test]
    fn model_selection() {
        let p = ModelParams::preset(3, 0.0);
        assert!(Model::new(p, None, None).unwrap().is_commuting());
        assert!(Model::new(p, Some(2.0), Some(2.0)).unwrap().is_commuting());
        assert!(!Model::new(p, Some(2.0), Some(1.0)).unwrap().is_commuting());
        assert!(Model::new(ModelParams::preset(20, 0.0), Some(2.0), Some(1.0)).is_err());
    }

    #[test]
    fn t_zero_row_has_no_correlations() {
        let model = Model::new(ModelParams::preset(6, 0.0), None, None).unwrap();
        let rows = time_sweep(&model, &[0.0], &Quantity::ALL, 1e-8).unwrap();
        for (q, v) in Quantity::ALL.iter().zip(&rows[0].values) {
            if *q != Quantity::CoherenceS1s2 && *q != Quantity::CoherenceE1 {
                assert!(v.abs() < 1e-9, "{q} = {v}");
            }
        }
    }

    #[test]
    fn fraction_rows() {
        let model = Model::new(ModelParams::preset(6, 0.0), None, None).unwrap();
        let rows = fraction_sweep(&model, FRAC_PI_4, &[0, 1, 3, 6]).unwrap();
        assert_eq!(rows.iter().map(|r| r.m).collect::<Vec<_>>(), vec![0, 1, 3, 6]);
        assert!((rows[1].mi_composite_over_s - 1.0).abs() < 1e-9);
        assert!((rows[3].mi_composite_over_s - 2.0).abs() < 1e-9);
        assert!(rows[1].mi_single_over_s_single < 1.0);
        assert!(fraction_sweep(&model, FRAC_PI_4, &[7]).is_err());
        assert!(matches!(fraction_sweep(&model, 0.0, &[1]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn classicality_run_flags_degenerate_entropy() {
        let model = Model::new(ModelParams::preset(6, 0.0), None, None).unwrap();
        let run = classicality_at(&model, 0.0, 1e-8, 1e-3).unwrap();
        assert!(run.degenerate_entropy && run.plateau.is_none());
        let run = classicality_at(&model, FRAC_PI_4, 1e-8, 1e-3).unwrap();
        assert!(run.classicality.backward_classical);
        assert!(run.plateau.unwrap().plateau_detected);
    }
}
