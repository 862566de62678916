//! Error taxonomy for the solver pipeline.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Shooting bracket `[u_lo, u_hi]` could not be established.
    #[error("no sign change while bracketing shooting amplitude (u_lo={u_lo:e}, last u_hi={u_hi:e})")]
    NoSignChange { u_lo: f64, u_hi: f64 },

    /// Bisection or an outer iteration stalled.
    #[error("{what} exceeded {limit} iterations (last error {last:e})")]
    MaxIterations {
        what: &'static str,
        limit: usize,
        last: f64,
    },

    /// A per-well solve failed; the well index is attached for diagnosis.
    #[error("well {well}: {source}")]
    Well {
        well: usize,
        #[source]
        source: Box<Error>,
    },

    /// Gradient of a Hölder-cusp potential requested at its center.
    #[error("gradient of a C^theta cusp potential requested at well center {well}")]
    GradAtCusp { well: usize },

    /// Box field would violate its boundary-decay invariant.
    #[error("box half-width {half_width} too small: boundary value {boundary:e} exceeds {tol:e} x max {max:e}")]
    BoxTooSmall {
        half_width: f64,
        boundary: f64,
        max: f64,
        tol: f64,
    },

    /// A field is missing the data the chosen quadrature backend needs.
    #[error("backend mismatch: {0}")]
    BackendMismatch(&'static str),

    /// Eigen iteration did not converge.
    #[error("eigen solve failed to converge: {what} after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// Box grid does not resolve the concentration scale eps*sqrt(c).
    #[error("unresolved peak: {nodes_per_peak:.2} nodes across peak width {peak_width:e} (need >= {required})")]
    UnresolvedPeak {
        nodes_per_peak: f64,
        peak_width: f64,
        required: f64,
    },

    /// Inner Newton iteration for the corrector diverged.
    #[error("Newton diverged after {iterations} iterations, last projected residual {residual:e}")]
    NewtonDiverged { iterations: usize, residual: f64 },

    /// Corrector drifted off the constraint manifold after line search.
    #[error("constraint drift: projection residual {residual:e} exceeds {bound:e}")]
    ConstraintDrift { residual: f64, bound: f64 },

    /// The reduced-energy minimiser landed on the boundary of the peak domain.
    #[error("minimiser touches the boundary of D_delta (well {well}, |y-a| = {distance:.6}, delta = {delta:.6})")]
    BoundaryMinimum {
        well: usize,
        distance: f64,
        delta: f64,
    },

    /// Configuration rejected before dispatch.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn for_well(well: usize) -> impl FnOnce(Error) -> Error {
        move |source| Error::Well {
            well,
            source: Box::new(source),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
