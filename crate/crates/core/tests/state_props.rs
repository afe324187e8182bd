use std::f64::consts::PI;

use darwinsim_core::infomeasures::{entropy, mutual_information, selection_entropy};
use darwinsim_core::oracle::{dense_reduce, DenseEvolver, DenseParams};
use darwinsim_core::sweep::{time_sweep, Model};
use darwinsim_core::{BranchState, DenseState, ModelParams, PureState, Quantity, SubsystemSelector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params(n_env: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = ModelParams> {
    (0.0..PI, 0.0..PI, -10.0..10.0f64, -2.0..2.0f64, 0.1..2.0f64, n_env, 0.0..PI).prop_map(
        |(theta1, theta2, j, jz, jse, n_env, time)| ModelParams { theta1, theta2, j, jz, jse, n_env, time },
    )
}

fn selectors(n: usize) -> Vec<SubsystemSelector> {
    let mut out = Vec::new();
    for s1 in [false, true] {
        for s2 in [false, true] {
            for m in 0..=n {
                let sel = SubsystemSelector::new(s1, s2, m);
                if !sel.is_empty() && sel.qubits() <= 10 {
                    out.push(sel);
                }
            }
        }
    }
    out
}

fn max_spectrum_diff(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    (0..len)
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn explicit_and_gram_spectra_agree(p in params(1..=8)) {
        let s = BranchState::build(&p).unwrap();
        for sel in selectors(p.n_env) {
            let explicit = s.reduce(&sel).unwrap().spectrum().unwrap();
            let gram = s.reduced_spectrum(&sel).unwrap();
            prop_assert!(max_spectrum_diff(&explicit, &gram) < 1e-9, "{sel}");
        }
    }

    #[test]
    fn complementary_entropies_match_dense(p in params(1..=8)) {
        let s = DenseState::from_branches(&BranchState::build(&p).unwrap()).unwrap();
        for sel in selectors(p.n_env) {
            let rest = sel.complement(p.n_env).unwrap();
            if rest.is_empty() {
                continue;
            }
            let a = entropy(&s.reduce(&sel).unwrap().spectrum().unwrap()).unwrap();
            let b = selection_entropy(&s, &rest).unwrap();
            prop_assert!((a - b).abs() < 1e-9, "{sel}: {a} vs {b}");
        }
    }

    #[test]
    fn complementary_entropies_large_environment(p in params(100..=100)) {
        let s = BranchState::build(&p).unwrap();
        for sel in [SubsystemSelector::system(), SubsystemSelector::s1(), SubsystemSelector::s2().with_env(37),
                    SubsystemSelector::env(1), SubsystemSelector::system().with_env(99)] {
            let rest = sel.complement(p.n_env).unwrap();
            let a = selection_entropy(&s, &sel).unwrap();
            let b = selection_entropy(&s, &rest).unwrap();
            prop_assert!((a - b).abs() < 1e-9, "{sel}: {a} vs {b}");
        }
    }

    #[test]
    fn environment_qubits_are_interchangeable(p in params(5..=5), picks in prop::sample::subsequence(vec![2usize, 3, 4, 5, 6], 1..=4)) {
        let s = BranchState::build(&p).unwrap();
        let psi = s.to_state_vector().unwrap();
        let dims = vec![2; 7];
        let m = picks.len();
        let mut keep = vec![0, 1];
        keep.extend(&picks);
        let arbitrary = dense_reduce(&psi, &dims, &keep).unwrap();
        let leading = s.reduce(&SubsystemSelector::system().with_env(m)).unwrap();
        prop_assert!(arbitrary.matrix().max_diff(leading.matrix()) < 1e-12);
    }

    #[test]
    fn reduced_states_are_unit_trace_and_psd(p in params(1..=6)) {
        let s = BranchState::build(&p).unwrap();
        for sel in selectors(p.n_env) {
            let rho = s.reduce(&sel).unwrap();
            prop_assert!((rho.matrix().trace().re - 1.0).abs() < 1e-10);
            prop_assert!(rho.spectrum().unwrap().iter().all(|&l| l >= 0.0));
            prop_assert!(rho.matrix().hermiticity_residual() < 1e-12);
        }
    }
}

/// Branch-form and dense-evolution states give the same numbers for every
/// reported quantity and every fraction's mutual information.
#[test]
fn quantities_agree_with_dense_evolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = ModelParams {
            theta1: rng.gen_range(0.0..PI),
            theta2: rng.gen_range(0.0..PI),
            j: rng.gen_range(-10.0..10.0),
            jz: rng.gen_range(-2.0..2.0),
            jse: rng.gen_range(0.1..2.0),
            n_env: rng.gen_range(1..=6),
            time: 0.0,
        };
        let times: Vec<f64> = (0..10).map(|_| rng.gen_range(0.0..PI)).collect();
        let analytic = Model::Analytic(p);
        let dense = Model::Dense(Box::new(DenseEvolver::new(DenseParams::commuting(p)).unwrap()));
        let a = time_sweep(&analytic, &times, &Quantity::ALL, 1e-8).unwrap();
        let d = time_sweep(&dense, &times, &Quantity::ALL, 1e-8).unwrap();
        for (ra, rd) in a.iter().zip(&d) {
            for (q, (x, y)) in Quantity::ALL.iter().zip(ra.values.iter().zip(&rd.values)) {
                assert!((x - y).abs() < 1e-8, "{q} at t={}: {x} vs {y} ({p:?})", ra.t);
                worst = worst.max((x - y).abs());
            }
        }
        for &t in &times {
            let sa = analytic.state_at(t).unwrap();
            let sd = dense.state_at(t).unwrap();
            for m in 1..=p.n_env {
                for sys in [SubsystemSelector::system(), SubsystemSelector::s1(), SubsystemSelector::s2()] {
                    let frac = SubsystemSelector::env(m);
                    let x = mutual_information(&sa, &sys, &frac).unwrap();
                    let y = mutual_information(&sd, &sys, &frac).unwrap();
                    assert!((x - y).abs() < 1e-8, "I({sys}:{frac}) at t={t}: {x} vs {y}");
                }
            }
        }
    }
    assert!(worst < 1e-8);
}

#[test]
fn non_commuting_couplings_break_the_branch_form() {
    let p = ModelParams::preset(3, 0.0);
    let ev = DenseEvolver::new(DenseParams { model: p, jx: 10.0, jy: 6.0 }).unwrap();
    let worst = (1..=20)
        .map(|k| {
            let t = 0.1 * k as f64;
            let analytic = BranchState::build(&p.at_time(t)).unwrap().to_state_vector().unwrap();
            1.0 - ev.state_at(t).unwrap().fidelity(&analytic)
        })
        .fold(0.0, f64::max);
    assert!(worst > 1e-3, "deviation {worst}");
}
