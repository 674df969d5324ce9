//! Finite computations with symmetric sequences, leveled operads and
//! cosimplicial box products.

pub mod algebras;
pub mod cosimpl;
pub mod error;
pub mod kernel;
pub mod nlev;
pub mod profiles;
pub mod symseq;

pub use error::{Error, Result};
