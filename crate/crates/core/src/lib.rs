//! Numerical laboratory for multi-peak concentration solutions of the
//! singularly perturbed Kirchhoff equation
//!
//! ```text
//! -(eps^2 a + eps b int |grad u|^2) Delta u + V(x) u = u^p   in R^3
//! ```
//!
//! The crate builds the objects of the construction as executable pieces:
//!
//! * [`radial`] — ground states of the scalar normal form by shooting,
//!   with controlled exponential tails and radial quadrature.
//! * [`limit`] — the coupled limit system shared by all peaks, solved
//!   exactly through the scaling reduction `sqrt(c) = (bbar + sqrt(bbar^2
//!   + 4a))/2`, and the per-well single equation used by the
//!   nonexistence diagnostic.
//! * [`potential`] — multi-well potential models with quadratic,
//!   Hölder-cusp and flat-cap well shapes.
//! * [`quad`] — spherical product rules and two-center (bipolar)
//!   quadrature for the interaction integrals.
//! * [`field`] / [`ansatz`] — Cartesian box fields and the multi-peak
//!   ansatz `W_{eps,Y} = sum_i w^i((x - y^i)/eps)`.
//! * [`energy`] — the variational functional, its small-eps expansion,
//!   the first-variation form, the Pohozaev identity and the
//!   naive-ansatz defect.
//! * [`spectral`] — nondegeneracy of the linearized operator by
//!   spherical-harmonic decomposition, and the coercivity estimate of the
//!   projected second variation.
//! * [`reduction`] — the finite-dimensional reduction: corrector solve,
//!   reduced energy, minimisation over the peak domain, and multi-peak
//!   diagnostics.
//!
//! All numerics are generic over the scalar type via [`scalar::Real`];
//! concrete `f64` aliases for the main domain types live at the crate
//! root (production runs use `f64` throughout).

pub mod error;
pub mod radial;
pub mod scalar;
pub mod sum;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision aliases for the main domain types.
pub type RadialGrid64 = radial::RadialGrid<f64>;
pub type RadialProfile64 = radial::RadialProfile<f64>;
pub type ShootingResult64 = radial::ShootingResult<f64>;
pub type StretchedProfile64 = radial::StretchedProfile<f64>;
