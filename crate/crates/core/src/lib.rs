//! Numerical laboratory for a coupled KdV system with Clifford-component
//! fields.
//!
//! The crate simulates
//!
//! ```text
//! u_t    = -u''' - u u' - (1/4) (P(xi))'
//! phi_it = -phi_i''' - (1/2) (phi_i u)'        P(xi) = sum_i phi_i^2
//! ```
//!
//! on a periodic box with a pseudo-spectral discretization, tracks its
//! conserved charges, and verifies the quantitative stability machinery of
//! the one-soliton and ground-state solutions: a priori Sobolev bounds,
//! translation-quotient distances, second-variation lower bounds, and the
//! spectrum of the linearization operator `-d^2/dx^2 - phi/2`.
//!
//! Modules follow the numerics stack bottom-up: [`grid`] (spectral calculus),
//! [`field`] (state types and norms), [`dynamics`] (time stepping),
//! [`charges`] (conserved functionals), [`soliton`] (closed-form solutions),
//! [`stability`] (distances, perturbations, bound margins), [`spectrum`]
//! (eigenpairs of the linearization), [`acceptance`] (the executable
//! verification suite), and [`io`] (CSV/JSON emission).

pub mod acceptance;
pub mod charges;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod soliton;
pub mod spectrum;
pub mod stability;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use field::{CliffordField, SimState};
pub use grid::{Grid, GridField};
