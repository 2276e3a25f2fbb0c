//! Numeric tolerances used by the floating-point parts of the workbench.
//!
//! Exact checks (closedness, exact rank, exact sign of the square) never
//! consult these.

/// Image-curve velocity below this counts as zero when confirming a cusp.
pub const VELOCITY_ZERO: f64 = 1e-10;
/// Bisection stops once the bracket is narrower than this.
pub const BISECT_WIDTH: f64 = 1e-12;
/// Grid size of the initial scan for velocity zeros.
pub const CUSP_GRID: usize = 4096;
/// Roots closer than this (in curve parameter) are merged.
pub const ROOT_MERGE: f64 = 1e-7;

/// Singular values above this count toward numeric rank.
pub const RANK_SV: f64 = 1e-9;
/// A point is on the zero set when every coefficient is below this.
pub const ZERO_SET: f64 = 1e-12;
/// Symmetry and trace bounds for the normal quadratic form.
pub const SYMMETRY: f64 = 1e-12;
pub const TRACE: f64 = 1e-12;
/// Minimum overlap of consecutive transported eigenvectors.
pub const TRANSPORT_OVERLAP: f64 = 0.5;

/// Residual bound for polished branch points.
pub const ROOT_RESIDUAL: f64 = 1e-12;
/// Distance at which two tracked branch points are declared collided.
pub const COLLISION: f64 = 1e-6;

/// Number of pencil directions tested for the Lefschetz criterion.
pub const PENCIL_SAMPLES: usize = 64;
/// Number of exact samples used to cross-check a critical locus.
pub const LOCUS_SAMPLES: usize = 64;
