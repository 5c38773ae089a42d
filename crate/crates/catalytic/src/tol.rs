//! Centralized numerical tolerances.
//!
//! Validation thresholds are fixed here rather than scattered through the
//! code so that every contract (and every test) pins the same numbers.

/// Entries of a probability vector may undershoot zero by at most this much
/// before validation rejects them; anything in `[-NEG_PROB, 0)` is clamped.
pub const NEG_PROB: f64 = 1e-12;

/// Probability vectors must sum to 1 within this tolerance.
pub const PROB_SUM: f64 = 1e-10;

/// Hermiticity check: max entrywise |M - M^dag|.
pub const HERMITIAN: f64 = 1e-10;

/// Density-matrix eigenvalues may undershoot zero by this much; anything in
/// `[-PSD, 0)` is clamped to 0 for downstream use.
pub const PSD: f64 = 1e-10;

/// Trace of a density matrix must be 1 within this tolerance.
pub const TRACE_ONE: f64 = 1e-10;

/// Renormalize a clamped spectrum only when its sum deviates from 1 by more
/// than this.
pub const SPECTRUM_RENORM: f64 = 1e-12;

/// Unitarity check: max entrywise |U^dag U - I|.
pub const UNITARY: f64 = 1e-9;

/// Orthonormality of dephasing bases.
pub const ORTHONORMAL: f64 = 1e-9;

/// Slack for majorization partial-sum comparisons.
pub const MAJORIZATION_SLACK: f64 = 1e-10;

/// Entries closer than this are treated as equal inside the T-transform
/// loop, so the "smallest k with w'_k > w_k" rule uses a strict inequality
/// that cannot spin on numerically flat vectors.
pub const TT_EQUAL: f64 = 1e-12;

/// Mixture terms below this weight are pruned.
pub const MIXTURE_PRUNE: f64 = 1e-14;

/// Exact-catalysis residual: the catalyst marginal must return to its
/// initial state within this.
pub const CATALYST_RESIDUAL: f64 = 1e-10;

/// Dense classical representations refuse joint dimensions above this.
pub const CLASSICAL_DIM_CAP: usize = 1 << 20;

/// Dense quantum (matrix) representations refuse dimensions above this.
pub const QUANTUM_DIM_CAP: usize = 1 << 12;
