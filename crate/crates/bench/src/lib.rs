//! Fixtures shared by the benchmarks.

use std::f64::consts::FRAC_PI_4;

use darwinsim_core::{BranchState, ModelParams};

pub fn plateau_state(n_env: usize) -> BranchState {
    BranchState::build(&ModelParams::preset(n_env, FRAC_PI_4)).expect("preset parameters are valid")
}
