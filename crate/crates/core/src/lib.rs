//! Exact operator product expansions for affine current algebras.

pub mod cli;
pub mod composite;
pub mod error;
pub mod field;
pub mod indexset;
pub mod kz;
pub mod lie;
pub mod modes;
pub mod npoly;
pub mod ope;
pub mod parse;
pub mod scalar;
pub mod suite;
pub mod uea;

pub use error::{Error, Result};
pub use field::Field;
pub use indexset::{IndexSet, IndexSetCombination};
pub use lie::{Family, LieAlgebra};
pub use ope::{OpeEngine, OpeResult};
pub use scalar::{Scalar, Q};
pub use uea::{Uea, UeaElement};
