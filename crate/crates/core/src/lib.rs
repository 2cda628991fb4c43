//! Noncommutative two-oscillator phase-space dynamics.
//!
//! Two free oscillators with an off-diagonal metric, deformed by position and
//! momentum noncommutativity (θ, η), become coupled oscillators once mapped to
//! canonical variables. The coupling Γ makes each oscillator trace
//! logarithmic spirals and squeezes initially coherent Gaussian Wigner
//! functions.
//!
//! * [`params`]: parameters, the λμ constraint, derived constants.
//! * [`swmap`]: forward/inverse coordinate maps and the two Hamiltonians.
//! * [`dynamics`]: closed-form propagator, RK4 oracle, trajectory checks.
//! * [`wigner`]: Gaussian Wigner states, marginals, squeezing, grids.
//! * [`figures`], [`export`], [`audit`]: data exports and the invariant suite.

pub mod audit;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod figures;
pub mod params;
pub mod phase;
pub mod swmap;
pub mod wigner;

pub use error::{Error, Result};
pub use params::{derive, solve_constraint, DerivedParams, NcParams, ParamOverrides};
pub use phase::{symplectic_form, Mat4, PhasePoint};
