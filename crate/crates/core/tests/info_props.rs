use std::f64::consts::PI;

use darwinsim_core::classicality::{certify, decompose, nullity_certificate, DEFAULT_NULLITY_TOL};
use darwinsim_core::infomeasures::{
    delta_i, density_entropy, discord_measured_on_qubit, discord_with_options, entanglement_of_formation,
    mutual_information, selection_entropy, DiscordOptions,
};
use darwinsim_core::matcore::{pauli, tensor};
use darwinsim_core::{BranchState, ComplexMatrix, DensityMatrix, ModelParams, PureState, SubsystemSelector, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params(n_env: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = ModelParams> {
    (0.0..PI, 0.0..PI, -10.0..10.0f64, -2.0..2.0f64, 0.1..2.0f64, n_env, 0.0..PI).prop_map(
        |(theta1, theta2, j, jz, jse, n_env, time)| ModelParams { theta1, theta2, j, jz, jse, n_env, time },
    )
}

fn state(p: &ModelParams) -> BranchState {
    BranchState::build(p).unwrap()
}

fn random_pure(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

fn random_mixed(rng: &mut ChaCha8Rng, dim: usize, dims: Vec<usize>) -> DensityMatrix {
    let a = ComplexMatrix::new(
        dim,
        dim,
        (0..dim * dim).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
    )
    .unwrap();
    let m = &a * &a.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(C64::from(1.0 / tr)), dims).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn entropies_and_correlations_are_nonnegative(p in params(1..=12)) {
        let s = state(&p);
        for m in 1..=p.n_env {
            let frac = SubsystemSelector::env(m);
            prop_assert!(selection_entropy(&s, &frac).unwrap() >= 0.0);
            for sys in [SubsystemSelector::system(), SubsystemSelector::s1(), SubsystemSelector::s2()] {
                prop_assert!(mutual_information(&s, &sys, &frac).unwrap() >= -1e-10);
            }
        }
    }

    #[test]
    fn fraction_information_is_monotone(p in params(1..=12)) {
        let s = state(&p);
        let sys = SubsystemSelector::system();
        let mut prev = 0.0;
        for m in 1..=p.n_env {
            let frac = SubsystemSelector::env(m);
            let whole = mutual_information(&s, &sys, &frac).unwrap();
            let part = mutual_information(&s, &SubsystemSelector::s1(), &frac).unwrap();
            prop_assert!(whole >= part - 1e-9, "m={m}: {whole} < {part}");
            prop_assert!(whole >= prev - 1e-9);
            prev = whole;
        }
    }

    #[test]
    fn fraction_identity(p in params(1..=12)) {
        let s = state(&p);
        for m in 0..=p.n_env {
            let d = delta_i(&s, m).unwrap();
            prop_assert!((d.lhs - d.rhs).abs() < 1e-9, "m={m}: {d:?}");
        }
    }

    #[test]
    fn discord_is_bounded_by_mutual_information(p in params(1..=8)) {
        let s = state(&p);
        for (sel, measured) in [
            (SubsystemSelector::system(), 0),
            (SubsystemSelector::system(), 1),
            (SubsystemSelector::s1().with_env(1), 0),
            (SubsystemSelector::s1().with_env(1), 1),
            (SubsystemSelector::system().with_env(1), 2),
        ] {
            let d = discord_measured_on_qubit(&s.reduce(&sel).unwrap(), measured).unwrap();
            prop_assert!(d.discord >= -1e-10, "{sel}/{measured}: {d:?}");
            prop_assert!(d.discord <= d.mutual_info + 1e-9, "{sel}/{measured}: {d:?}");
            prop_assert!(d.holevo >= -1e-10);
        }
    }
}

#[test]
fn product_states_have_no_discord() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let a = random_mixed(&mut rng, 2, vec![2]);
        let b = random_mixed(&mut rng, 4, vec![4]);
        let ab = DensityMatrix::new(tensor(a.matrix(), b.matrix()).unwrap(), vec![2, 4]).unwrap();
        let d = discord_measured_on_qubit(&ab, 0).unwrap();
        assert!(d.discord.abs() < 1e-9 && d.mutual_info.abs() < 1e-9, "{d:?}");
        let ba = DensityMatrix::new(tensor(b.matrix(), a.matrix()).unwrap(), vec![4, 2]).unwrap();
        assert!(discord_measured_on_qubit(&ba, 1).unwrap().discord.abs() < 1e-9);
    }
}

#[test]
fn finer_grid_does_not_move_discord() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let fine = DiscordOptions { grid: 128, ..DiscordOptions::default() };
    for k in 0..12 {
        let rho = if k % 2 == 0 {
            random_mixed(&mut rng, 4, vec![2, 2])
        } else {
            let p = ModelParams { time: rng.gen_range(0.0..PI), ..ModelParams::preset(4, 0.0) };
            state(&p).reduce(&SubsystemSelector::system()).unwrap()
        };
        let coarse = discord_measured_on_qubit(&rho, 0).unwrap().discord;
        let refined = discord_with_options(&rho, 0, &fine).unwrap().discord;
        assert!((coarse - refined).abs() < 1e-6, "{coarse} vs {refined}");
    }
}

/// With one environment qubit, the formation entanglement of the pair plus the
/// classical correlation S1 keeps with the environment exhausts S(S1).
#[test]
fn formation_and_classical_correlation_sum_to_entropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let p = ModelParams {
            theta1: rng.gen_range(0.0..PI),
            theta2: rng.gen_range(0.0..PI),
            j: rng.gen_range(-10.0..10.0),
            jz: rng.gen_range(-2.0..2.0),
            jse: rng.gen_range(0.1..2.0),
            n_env: 1,
            time: rng.gen_range(0.0..PI),
        };
        let s = state(&p);
        let ef = entanglement_of_formation(&s.reduce(&SubsystemSelector::system()).unwrap()).unwrap();
        let s1 = selection_entropy(&s, &SubsystemSelector::s1()).unwrap();
        let j = discord_measured_on_qubit(&s.reduce(&SubsystemSelector::s1().with_env(1)).unwrap(), 1)
            .unwrap()
            .holevo;
        assert!((ef - (s1 - j)).abs() < 1e-6, "{p:?}: E_f={ef}, S-J={}", s1 - j);
    }
}

#[test]
fn certificate_ignores_environment_relabeling() {
    let flip = tensor(&ComplexMatrix::identity(4), &pauli::x()).unwrap();
    for t in [0.3, PI / 4.0, 1.1] {
        for n in [1, 4, 7] {
            let rho = state(&ModelParams::preset(n, t)).reduce(&SubsystemSelector::system().with_env(1)).unwrap();
            let flipped = DensityMatrix::new(&(&flip * rho.matrix()) * &flip, rho.dims().to_vec()).unwrap();
            let a = nullity_certificate(&decompose(&rho).unwrap(), DEFAULT_NULLITY_TOL);
            let b = nullity_certificate(&decompose(&flipped).unwrap(), DEFAULT_NULLITY_TOL);
            assert_eq!(a.forward_classical, b.forward_classical);
            assert_eq!(a.backward_classical, b.backward_classical);
            assert!((a.max_residual_forward - b.max_residual_forward).abs() < 1e-12);
            assert!((a.max_residual_backward - b.max_residual_backward).abs() < 1e-12);
        }
    }
}

#[test]
fn random_pure_states_certificate_matches_discord() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut quantum = 0;
    for _ in 0..100 {
        let rho = DensityMatrix::from_pure(&random_pure(&mut rng, 8), vec![2, 2, 2]).unwrap();
        let r = nullity_certificate(&decompose(&rho).unwrap(), DEFAULT_NULLITY_TOL);
        let d = discord_measured_on_qubit(&rho, 2).unwrap().discord;
        if r.backward_classical {
            assert!(d <= 1e-6, "classical certificate with discord {d}");
        } else {
            quantum += 1;
            assert!(d > 1e-4, "residual {} but discord {d}", r.max_residual_backward);
        }
        assert!(!r.forward_classical);
    }
    assert_eq!(quantum, 100);
}

#[test]
fn certificate_matches_discord_along_the_dynamics() {
    for n in [1, 2, 5] {
        for k in 0..=20 {
            let s = state(&ModelParams::preset(n, PI / 40.0 * k as f64));
            let r = certify(&s, DEFAULT_NULLITY_TOL).unwrap();
            let d = discord_measured_on_qubit(&s.reduce(&SubsystemSelector::system().with_env(1)).unwrap(), 2)
                .unwrap()
                .discord;
            if r.backward_classical {
                assert!(d <= 1e-6, "N={n} k={k}: discord {d}");
            }
            if d > 1e-4 {
                assert!(!r.backward_classical);
            }
        }
    }
}

#[test]
fn mixed_state_entropy_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let rho = random_mixed(&mut rng, 8, vec![2, 2, 2]);
        let s = density_entropy(&rho).unwrap();
        assert!((0.0..=3.0 + 1e-12).contains(&s));
    }
}
