//! Stability laboratory for a piezoelectric beam with magnetic effects and
//! thermal memory.
//!
//! The beam fields `(v, φ, θ, η)` and the temperature-like variable `w` are
//! evolved in first-order energy variables `U = (v, z, u¹, u², u³, w, κ)`,
//! where `κ(x, s)` is the history of `w` over past ages `s`. The crate offers
//! time stepping with a discrete energy balance, stationary solves checked
//! against closed-form solutions, resolvent-norm sweeps and decay fits.
//!
//! Every numerical type is generic over [`Real`] (`f32`/`f64`); the aliases
//! below fix the common double-precision instantiation.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod generator;
pub mod grid;
pub mod history;
pub mod kernel;
pub mod linalg;
pub mod params;
pub mod quadrature;
pub mod scalar;
pub mod state;

pub use scalar::{Real, Scalar};

pub type Complex64 = num_complex::Complex<f64>;

pub type Params = params::PhysicalParams<f64>;
pub type Kernel = kernel::MemoryKernel<f64>;
pub type Quadrature = kernel::MemoryQuadrature<f64>;
pub type Grid = grid::SpatialGrid<f64>;
pub type State = state::FirstOrderState<f64>;
pub type ComplexState = state::FirstOrderState<Complex64>;
pub type Generator = generator::GeneratorMatrix<f64>;

pub type Params32 = params::PhysicalParams<f32>;
pub type Generator32 = generator::GeneratorMatrix<f32>;
