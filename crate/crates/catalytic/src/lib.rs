//! Catalytic state transitions on finite sample spaces and finite-dimensional
//! quantum systems.
//!
//! A catalytic transition carries a state `rho` to (within trace distance
//! epsilon of) a target `rho'` by a single reversible operation acting
//! jointly on the system and a catalyst whose own state is restored exactly.
//! Such a transition exists for every epsilon > 0 precisely when the target
//! entropy is at least the source entropy, and this crate implements the
//! constructive side of that equivalence end to end:
//!
//! - [`statekit`]: probability vectors, density matrices, entropies,
//!   distances, composite-system algebra and channels;
//! - [`majorization`]: the partial-sum predicate, T-transform chains, their
//!   unitary realization (Schur-Horn synthesis) and permutation mixtures;
//! - [`typicality`]: typical-set truncation of n-copy states and the
//!   majorized approximation of the n-copy target that seeds the catalysts;
//! - [`classical`]: the explicit catalyst distribution and global
//!   permutation for transitions between probability vectors;
//! - [`quantum`]: the explicit quantum catalyst, the three-step protocol
//!   unitary and the dephasing dilation;
//! - [`thermo`]: passive states, Gibbs states, the entropy-matching inverse
//!   temperature and catalytic work extraction;
//! - [`report`]: the verification records emitted by the constructions.

pub mod error;
pub mod majorization;
pub mod statekit;
pub mod tol;
pub mod typicality;

pub use error::{Error, Result};
