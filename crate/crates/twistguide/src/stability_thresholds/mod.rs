//! Explicit constants `C1 .. C7` of the bent-tube comparison, the resulting
//! stability threshold `epsilon`, and the bend-strength sweep.

mod ledger;
mod sweep;

pub use ledger::{constants_ledger, epsilon_threshold, lower_bound_integrand, Branch, EpsilonThreshold, KShares, ThresholdLedger, ThresholdMode, ETA};
pub use sweep::{bend_strength, bend_sweep, profile_at_strength, sweep_epsilon, sweep_sigma, SweepEpsilon, SweepMode, SweepRow, SweepTable};
