//! Seeded Monte Carlo campaigns, deterministic sweeps and their output files.
//!
//! Every random quantity comes from a [`SeededStream`](crate::randmat::SeededStream)
//! keyed by `(master_seed, trial_index)`, trials run in parallel and results
//! are collected in trial order, so a campaign's output depends only on its
//! inputs.

mod output;
mod potential;
mod pseudo;
mod stats;
mod sweeps;
mod tail;
mod trials;

pub use output::{render_svg, write_eigen_csv, write_grid, write_jsonl, EigenDump};
pub use potential::{log_potential_curve, potential_compare, PotentialProbe, POTENTIAL_TOL};
pub use pseudo::{pseudospectrum_grid, Bbox, PseudoGrid, MAX_GRID_SIDE};
pub use stats::{linear_fit, median, quantile, theta_histogram, LinearFit};
pub use sweeps::{
    quasimode_decay_experiment, resolvent_stability_experiment, spacing_experiment, DecaySweep,
    SpacingRow, StabilitySweep,
};
pub use tail::{effective_tail_experiment, HistogramBin, TailProbe, TailTable};
pub use trials::{
    check_delta_window, delta_window, jordan_annulus_trial, run_campaign, thin_tube_trial,
    tube_radius, weyl_trial, DistanceQuantiles, JordanAnnulus, ProbeValue, TrialOutcome,
    TrialRecord, WeylSetup, SCHEMA_VERSION,
};
