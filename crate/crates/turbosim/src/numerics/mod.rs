//! Special functions, quadrature, and reproducible random streams.

pub mod quad;
pub mod rng;
pub mod special;

pub use quad::{integrate, integrate_semi_infinite, QuadResult, QuadratureSpec};
pub use rng::{derive_stream_id, sample_gamma, RngStream};
pub use special::{bessel_k, bessel_k_scaled, erfc, ln_gamma, q_function};
