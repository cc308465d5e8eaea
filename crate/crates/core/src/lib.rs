pub mod charfun;
pub mod error;
pub mod identities;
pub mod lattice;
pub mod richardson;
pub mod rootfind;
pub mod schrodinger;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
