//! Induced representations of finite groupoid convolution algebras.

pub mod algebra;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod groupoid;
pub mod imprimitivity;
pub mod induction;
pub mod linalg;
pub mod spectrum;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
