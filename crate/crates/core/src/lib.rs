//! Noncommutative deformations of the family `{D/Dd, D/Dt}` over the first
//! Weyl algebra, computed exactly over the rationals.

pub mod dmatrix;
pub mod dmod;
pub mod error;
pub mod ext;
pub mod hull;
pub mod linalg;
pub mod parse;
pub mod rep;
pub mod scalar;
pub mod versal;
pub mod weyl;

pub use error::{Error, Result};
pub use weyl::{Monomial, WeylElement};
