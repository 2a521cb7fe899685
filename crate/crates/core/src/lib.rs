//! Parameterized families of perfect tensors in `(C^d)^4`.
//!
//! Start from the 0/1 tensor of an orthogonal Latin square, solve the
//! tangent-space equations exactly, push tangent directions through the
//! unitary-group exponential of each balanced flattening, and keep the
//! directions on which the three pulled-back curves coincide. Every point
//! on such a curve is a perfect tensor.

pub mod closed_form;
pub mod error;
pub mod exact;
pub mod families;
pub mod fixtures;
pub mod liecurve;
pub mod ols;
pub mod perfect;
pub mod repro;
pub mod tangent;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64;
