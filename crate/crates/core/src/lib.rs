//! Matrix-form multilayer perceptron with backpropagation-with-momentum
//! training, sized for microcontroller-class memory budgets.
//!
//! - [`matrix`]: binary32 kernels (product, element-wise ops, fused trace).
//! - [`mlp`]: feedforward, error, backpropagation and update modules, and the
//!   training loop.
//! - [`resource`]: SRAM footprint estimates and per-module timing fits.
//! - [`robot`]: differential-drive robot world with ray-cast proximity sensors.
//! - [`data`]: embedded datasets, CSV I/O and the binary weights format.

pub mod error;
pub mod matrix;
pub mod mlp;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub mod data;
pub mod resource;
pub mod robot;
