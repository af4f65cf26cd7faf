//! Heights of vectors, subspaces and endomorphisms over `Q` and quadratic
//! fields, with the local analysis behind them and a few experiments on
//! spectral limits and bounded-height enumeration.

pub mod arith;
pub mod asymptotics;
pub mod error;
pub mod exec;
pub mod field;
pub mod heights;
pub mod io;
pub mod linalg;
pub mod local;
pub mod northcott;
pub mod numeric;
pub mod place;
pub mod value;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Field, Scalar};
pub use linalg::{CharPoly, MatrixK, Subspace, VectorK};
pub use place::{LocalMagnitude, Place};
pub use value::{FinitePart, HeightValue};
