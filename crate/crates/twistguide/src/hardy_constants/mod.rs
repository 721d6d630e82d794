//! Explicit constants of the Hardy chain (`c(L, L')`, `gamma_{alpha,beta}`,
//! `a_j`, `c_h`) and their numerical counterparts.

mod constants;
mod decomposition;
mod verify;

pub use constants::{
    alpha_grid, best_local_coefficient, beta_grid, birman_constant, birman_inequality_check, birman_ratio, global_hardy_bound,
    local_hardy_coefficient, mixed_term_gamma, random_trials, window_fractions, BirmanCheck, ConstantsLedger, LedgerEntry,
    LocalCoefficient, MinSigmaPower, MixedTerm, MixedTermInputs, Trial,
};
pub use decomposition::{SigmaDecomposition, SupportComponent, SUBINTERVAL_LEVELS, ZERO_FRACTION};
pub use verify::{
    gauss_legendre, hardy_1d_ratio, hardy_weight, remark_scaling, twisted_local_energy, verify_hardy, verify_local_hardy,
    weighted_mass, HardyCheck, LocalHardyCheck, RadialTrial, ScalingRow, MARGIN_SLACK,
};
