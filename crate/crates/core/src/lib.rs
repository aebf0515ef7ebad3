pub mod dirac2d;
pub mod effective;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod transverse;

pub use error::{Error, Result};
