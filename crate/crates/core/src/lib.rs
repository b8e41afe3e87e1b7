pub mod affrel;
pub mod diag;
pub mod error;
pub mod fplinalg;
pub mod qec;
pub mod render;
pub mod stab;
pub mod symp;

pub use affrel::{AffineRelation, LinearSystem};
pub use error::{Error, Result};
pub use fplinalg::{FpMatrix, Prime, Subspace};
