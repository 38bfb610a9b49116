//! Lyapunov exponents, accelerations and strip-zero statistics of
//! one-frequency analytic quasi-periodic Schrödinger cocycles
//!
//! ```text
//! A(x) = [[E - lambda f(x + iy), -1], [1, 0]]
//! ```
//!
//! together with the large-coupling asymptotics `L = log|lambda| + I[E/lambda - f](0) + O(...)`
//! and the constants entering its error term.

pub mod asymptotics;
pub mod cocycle;
pub mod constants;
pub mod error;
pub mod jensen;
pub mod par;
pub mod poly;
pub mod potential;
pub mod zeros;

pub use error::{Error, Result};
pub use potential::{FourierPotential, PotentialStats};
