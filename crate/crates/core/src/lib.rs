//! Orbifold melting crystal models: exact partition-function series,
//! free-fermion operator identities, and initial Lax operators of the
//! associated Toda reductions.

pub mod crystal;
pub mod error;
pub mod fock;
pub mod partitions;
pub mod report;
pub mod scalars;
pub mod schur;
pub mod toda;

pub use error::{Error, Result};
