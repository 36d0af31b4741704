//! Band-matrix side of the story: the generating matrices U, U′, their
//! initial dressing factorization, and the reduced shape of the initial Lax
//! powers.

pub mod band;
pub mod generating;
pub mod lax;

pub use band::BandMatrix;
pub use generating::{build_u, gamma_commutation_check, ufactor_check};
pub use lax::{
    factorization_check, framing_conjugate, gamma_conjugation_lemmas, gamma_matrix, gamma_toeplitz, initial_dressing, lax_init,
    lemma_values, reduced_factors, tangency_check, DressingPair, LaxPowers, ReducedFactors,
};
