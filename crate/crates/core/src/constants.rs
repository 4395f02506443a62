//! Numerical tolerances and statistical thresholds shared by the library, the
//! test suites and the CLI metadata records.

/// Half-width of the band around `alpha_c` classified as critical.
pub const PHASE_TOL: f64 = 1e-9;

/// Uniform grid size for bracketing roots of `f'` when locating `max f`.
pub const CRITICAL_GRID: usize = 4096;

/// Bisection stops once the bracket of a root of `f'` is narrower than this.
pub const CRITICAL_BISECTION_TOL: f64 = 1e-12;

/// Two critical points whose `f` values differ by less than this are tied maxima.
pub const MAXIMIZER_VALUE_TOL: f64 = 1e-12;

/// Bernstein coefficients of `f` within this spread mean `f` is constant.
pub const CONSTANT_F_TOL: f64 = 1e-12;

/// Largest tolerated gap between the weight index total and `(n+n0-1)(2+alpha)+alpha`.
pub const WEIGHT_DRIFT_TOL: f64 = 1e-6;

/// The weight index is re-checked for drift at this step interval.
pub const WEIGHT_DRIFT_CHECK_INTERVAL: u64 = 1 << 16;

/// States with more vertices than this are rejected by exact enumeration.
pub const ENUMERATION_MAX_VERTICES: usize = 12;

/// Choice vectors longer than this are rejected by exact enumeration.
pub const ENUMERATION_MAX_R: usize = 4;

/// Minimum chi-square p-value accepted by the Monte-Carlo oracle comparisons.
pub const CHI_SQUARE_P_MIN: f64 = 0.001;

/// Chi-square cells with expected count below this are pooled into one cell.
pub const CHI_SQUARE_MIN_EXPECTED: f64 = 5.0;

/// Binomial standard errors allowed around theoretical bounds.
pub const SE_MULTIPLIER: f64 = 3.0;

/// Default lower end of the power-law fit range.
pub const FIT_K_MIN: u64 = 10;

/// The default fit range ends at the largest `k` with at least this many vertices of degree `>= k`.
pub const FIT_MIN_TAIL_COUNT: u64 = 100;

/// Fewer usable points than this make a power-law fit meaningless.
pub const FIT_MIN_POINTS: usize = 5;

/// Default number of uniform location bins for the local degree grid.
pub const DEFAULT_BINS: usize = 50;

/// Default number of Simpson panels for integrating over location.
pub const DEFAULT_PANELS: usize = 2048;

/// Name of the pseudo-random generator driving every simulation.
pub const RNG_NAME: &str = "ChaCha8Rng";
