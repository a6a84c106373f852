//! Dense exact linear algebra over the crate's scalar domains: ranks,
//! echelon forms, kernels, solving, subspace calculus and maximal-minor
//! enumeration.

pub mod exact;
pub mod gf;
pub mod modular;
pub mod subspace;

pub use exact::{
    all_maximal_minors_nonzero, bareiss_det, bareiss_rank, binomial, combinations_vec,
    modular_rank_with_retry, primitive_rows, rational_rank_exact, MinorScan,
};
pub use gf::{GfEchelon, GfMatrix};
pub use modular::{
    rational_reconstruct, reconstruct_rationals, ModularImage, ReconstructError,
    ReconstructOptions,
};
pub use subspace::{kernel_rational, rref_rational, LinalgError, Matrix, Subspace, Verify};
