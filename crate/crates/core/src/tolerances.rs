//! Numerical tolerances and iteration caps used across the crate.
//!
//! Cone tests and certificate checkers take their tolerance from the caller;
//! everything here is a solver-internal constant.

/// Relative asymmetry accepted for "symmetric" inputs, scaled by `max(1, ‖M‖∞)`.
pub const SYMMETRY_REL: f64 = 1e-8;

/// Jacobi stops once the off-diagonal Frobenius norm is below this fraction of `‖M‖_F`.
pub const JACOBI_OFF_REL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Gaussian elimination declares a pivot singular below this fraction of `‖A‖∞`.
pub const SINGULAR_PIVOT_REL: f64 = 1e-13;

pub const POWER_MAX_ITERS: usize = 100_000;
pub const POWER_RESTARTS: usize = 3;
pub const POWER_REL_TOL: f64 = 1e-12;

/// `max_singular_value` switches from a dense Gram eigensolve to power iteration
/// above this dimension.
pub const DENSE_SVD_MAX_DIM: usize = 200;

/// Simplex pivot / reduced-cost zero threshold.
pub const SIMPLEX_EPS: f64 = 1e-10;
pub const SIMPLEX_MAX_PIVOTS: usize = 1_000_000;
/// Feasibility residual accepted for an LP optimum, scaled by `max(1, ‖h‖∞)`.
pub const LP_FEAS_REL: f64 = 1e-8;

/// Maximum number of walks `enumerate_walks` will materialize.
pub const WALK_CAP: usize = 10_000_000;

pub const L1_DEFAULT_MARGIN: f64 = 1e-7;
pub const L1_DEFAULT_INTERIOR_FLOOR: f64 = 1e-6;

/// LMI margin is this factor times `max(1, max_l ‖[A B; C D]‖∞²)`.
pub const L2_MARGIN_REL: f64 = 1e-6;
pub const L2_DEFAULT_MAX_ITERS: usize = 50_000;
pub const L2_DEFAULT_GAMMA_TOL: f64 = 1e-3;
pub const L2_PROJECTION_RESIDUAL: f64 = 1e-8;
/// Over-relaxation applied to the affine projection step.
pub const L2_RELAXATION: f64 = 1.5;
/// History length for Anderson mixing of the projection iterates.
pub const L2_ANDERSON_MEMORY: usize = 6;
/// Relative fixed-point residual below which the iteration has settled.
pub const L2_FIXED_POINT_RESIDUAL: f64 = 1e-10;
/// Upper limit of the doubling search for a feasible gamma.
pub const L2_GAMMA_CAP: f64 = 1_152_921_504_606_846_976.0; // 2^60

/// Dimension bound for explicitly building the finite-horizon input/output map.
pub const DENSE_TOEPLITZ_MAX: usize = 2000;
