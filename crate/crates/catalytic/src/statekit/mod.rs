//! State representations, entropies, distances, composite-system algebra and
//! channels shared by every construction in this crate.

pub mod channel;
pub mod density;
pub mod layout;
pub mod prob;

pub use channel::{apply_dephasing, check_orthonormal, Channel};
pub use density::{
    check_unitary, eigh_descending, hermiticity_residual, identity, kron, trace_re,
    unitarity_residual, C64, CMatrix, DensityMatrix,
};
pub use layout::{
    c, embed_operator, mutual_information_classical, mutual_information_quantum,
    partial_trace_classical, partial_trace_quantum, SubsystemLayout,
};
pub use prob::{shannon_entropy, sort_descending, total_variation, ProbabilityVector};
