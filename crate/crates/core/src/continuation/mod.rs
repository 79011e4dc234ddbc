//! Homotopy continuation for the likelihood system of a cell.
//!
//! Real predictor-corrector tracking follows Santaló points along paths of
//! right-hand sides inside one cell. Complex monodromy solves the system at
//! random exponents `u`; a parameter homotopy then moves all solutions to
//! `u = 1`, where exactly one is real and positive.
//!
//! Completeness of a monodromy run is heuristic: it stops once a number of
//! consecutive loops yields nothing new, so counts are lower bounds unless a
//! target count is supplied.

mod monodromy;
mod system;
mod tracker;

pub use monodromy::{
    exponent_solution_dimension, homotopy_to_one, independent_seed, ml_degree, ml_solutions, monodromy_solve,
    numerical_patch_degree, patch_witness_set, same_solution, seed_start_pair, track_santalo_path,
    track_santalo_path_sampled, trackable, LoopMode, PathSamples, SolutionSet, DEDUP_TOL, RESIDUAL_TOL,
};
pub use system::{real_rhs, Evaluation, ParametricSystem};
pub use tracker::{jacobian, ParameterPath, Predictor, TrackedPath, Tracker, TrackerOptions};
