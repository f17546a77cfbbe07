//! Stationary states and linear stability of the spherically-symmetric
//! Schrödinger–Newton equations in nondimensional form
//! `−∇²ψ + φψ = Eψ`, `∇²φ = |ψ|²`.

// `!(a < b)` is used on purpose so NaN falls on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chebyshev;
pub mod dense;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod profile;
pub mod radial_ode;
pub mod scalar;
pub mod stability;
pub mod stationary;
pub mod verify;

pub use chebyshev::ChebyshevGrid;
pub use error::{Error, Result};
pub use profile::RadialProfile;
pub use scalar::Real;
pub use stationary::{shoot, ShootOptions, StationaryState};

pub type Grid = ChebyshevGrid<f64>;
pub type Profile = RadialProfile<f64>;
pub type State = StationaryState<f64>;
pub type Grid32 = ChebyshevGrid<f32>;
pub type Profile32 = RadialProfile<f32>;
pub type State32 = StationaryState<f32>;
