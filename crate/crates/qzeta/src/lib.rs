//! High-precision q-analogs of the Riemann zeta and Dirichlet eta
//! functions built from the zeros of q-trigonometric functions, exact
//! q-Bernoulli/Euler/Genocchi numbers as rational functions of q, and a
//! verification harness for the identities connecting them.

pub mod complex;
pub mod contour;
pub mod ctx;
pub mod qfunctions;
pub mod qnumbers;
pub mod spectral;
pub mod verify;
pub mod zeros;

pub use ctx::{PrecisionContext, QError, QResult};
