//! Exact linear algebra over `K`.

pub mod matrix;
pub mod poly;
pub mod power;
pub mod subspace;

pub use matrix::{MatrixK, VectorK};
pub use poly::CharPoly;
pub use power::{bits_budget, power_stripped, IntMatrix, PowerEngine};
pub use subspace::Subspace;
