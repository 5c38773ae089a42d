//! Majorization: the partial-sum predicate, T-transform chains, their
//! unitary realization (Schur-Horn synthesis) and decomposition of the
//! induced doubly stochastic map into a mixture of permutations.

mod perm;

pub use perm::Permutation;

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::statekit::density::{C64, CMatrix, DensityMatrix};
use crate::statekit::prob::{sort_descending, ProbabilityVector};
use crate::tol;

/// One T-transform: mix entries j and k, keeping weight `t` in place and
/// swapping with weight `1 - t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTransformStep {
    pub j: usize,
    pub k: usize,
    pub t: f64,
}

impl TTransformStep {
    /// Apply to a raw vector in place.
    pub fn apply(&self, w: &mut [f64]) {
        let wj = w[self.j];
        let wk = w[self.k];
        w[self.j] = self.t * wj + (1.0 - self.t) * wk;
        w[self.k] = self.t * wk + (1.0 - self.t) * wj;
    }

    /// The rotation realizing this step: |j> -> sqrt(t)|j> + sqrt(1-t)|k>,
    /// |k> -> sqrt(t)|k> - sqrt(1-t)|j>. Conjugating a diagonal matrix by it
    /// applies the T-transform to the diagonal.
    pub fn rotation(&self, dim: usize) -> CMatrix {
        let mut r = CMatrix::identity(dim, dim);
        let ct = self.t.sqrt();
        let st = (1.0 - self.t).sqrt();
        r[(self.j, self.j)] = C64::new(ct, 0.0);
        r[(self.k, self.j)] = C64::new(st, 0.0);
        r[(self.j, self.k)] = C64::new(-st, 0.0);
        r[(self.k, self.k)] = C64::new(ct, 0.0);
        r
    }
}

/// True iff every partial sum of the descending-sorted `w` dominates that of
/// `w_prime` (slack `MAJORIZATION_SLACK`); shorter vectors are padded with
/// zeros.
pub fn majorizes(w: &ProbabilityVector, w_prime: &ProbabilityVector) -> bool {
    majorizes_raw(w.entries(), w_prime.entries())
}

pub fn majorizes_raw(w: &[f64], w_prime: &[f64]) -> bool {
    let d = w.len().max(w_prime.len());
    let pad = |v: &[f64]| {
        let mut x = v.to_vec();
        x.resize(d, 0.0);
        let (sorted, _) = sort_descending(&x);
        sorted
    };
    let a = pad(w);
    let b = pad(w_prime);
    let mut sa = 0.0;
    let mut sb = 0.0;
    for i in 0..d {
        sa += a[i];
        sb += b[i];
        if sa < sb - tol::MAJORIZATION_SLACK {
            return false;
        }
    }
    true
}

/// T-transform chain mapping the descending-sorted `w` onto the
/// descending-sorted `w_prime`, at most d-1 steps.
///
/// Index selection: k is the smallest index where the target exceeds the
/// current vector, and j is the largest index below k where the current
/// vector exceeds the target. Restricting j below k keeps every t in [0, 1];
/// a surplus index always exists below the first deficit because partial
/// sums dominate. Entries within `TT_EQUAL` count as already matched.
pub fn t_transform_chain(w: &[f64], w_prime: &[f64]) -> Result<Vec<TTransformStep>> {
    if w.len() != w_prime.len() {
        return Err(Error::DimensionMismatch(w.len(), w_prime.len()));
    }
    if !majorizes_raw(w, w_prime) {
        return Err(Error::Majorization(
            "source spectrum does not majorize target".into(),
        ));
    }
    let d = w.len();
    let mut cur = w.to_vec();
    let mut steps = Vec::new();
    for _ in 0..d {
        let Some(k) = (0..d).find(|&i| w_prime[i] - cur[i] > tol::TT_EQUAL) else {
            return Ok(steps);
        };
        let Some(j) = (0..k).rev().find(|&i| cur[i] - w_prime[i] > tol::TT_EQUAL) else {
            return Err(Error::Majorization(
                "no surplus entry above the first deficit; inputs not sorted descending?".into(),
            ));
        };
        let surplus = cur[j] - w_prime[j];
        let deficit = w_prime[k] - cur[k];
        let delta = surplus.min(deficit);
        let t = 1.0 - delta / (cur[j] - cur[k]);
        steps.push(TTransformStep { j, k, t });
        // Move delta and snap the achieving side exactly onto its target so
        // matched entries are never selected again.
        cur[j] -= delta;
        cur[k] += delta;
        if surplus <= deficit {
            cur[j] = w_prime[j];
        }
        if deficit <= surplus {
            cur[k] = w_prime[k];
        }
    }
    // d-1 steps always suffice; reaching here means the loop failed to
    // converge, which the majorization precondition rules out.
    Err(Error::Majorization("T-transform loop did not terminate".into()))
}

/// Apply a chain to a raw vector.
pub fn apply_chain(steps: &[TTransformStep], w: &[f64]) -> Vec<f64> {
    let mut out = w.to_vec();
    for s in steps {
        s.apply(&mut out);
    }
    out
}

/// Dense product of the step rotations, last step leftmost.
pub fn chain_rotation_product(steps: &[TTransformStep], dim: usize) -> CMatrix {
    let mut u = CMatrix::identity(dim, dim);
    for s in steps {
        u = s.rotation(dim) * u;
    }
    u
}

/// A unitary given as an ordered product of two-level rotations together
/// with optional basis changes, plus its dense realization:
/// `dense = post * (step rotations, first step rightmost) * pre`.
#[derive(Debug, Clone)]
pub struct UnitaryPlan {
    pub steps: Vec<TTransformStep>,
    pub pre_rotation: Option<CMatrix>,
    pub post_rotation: Option<CMatrix>,
    pub dense: CMatrix,
}

impl UnitaryPlan {
    pub fn identity(dim: usize) -> Self {
        Self {
            steps: Vec::new(),
            pre_rotation: None,
            post_rotation: None,
            dense: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dense.nrows()
    }

    /// Max of the unitarity residual and the factorization residual
    /// |dense - post * steps * pre|.
    pub fn residual(&self) -> f64 {
        let dim = self.dim();
        let mut rebuilt = chain_rotation_product(&self.steps, dim);
        if let Some(pre) = &self.pre_rotation {
            rebuilt = &rebuilt * pre;
        }
        if let Some(post) = &self.post_rotation {
            rebuilt = post * rebuilt;
        }
        let fact = (&self.dense - rebuilt)
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        fact.max(crate::statekit::density::unitarity_residual(&self.dense))
    }
}

/// Unitary U such that U omega U^dag has the spectrum of `omega_prime` on
/// its diagonal in the eigenbasis of `omega_prime`.
pub fn schur_horn_unitary(
    omega: &DensityMatrix,
    omega_prime: &DensityMatrix,
) -> Result<UnitaryPlan> {
    if omega.dim() != omega_prime.dim() {
        return Err(Error::DimensionMismatch(omega.dim(), omega_prime.dim()));
    }
    let (spec, vecs) = omega.eigh()?;
    let (spec_prime, vecs_prime) = omega_prime.eigh()?;
    if !majorizes_raw(&spec, &spec_prime) {
        return Err(Error::Majorization(
            "spectrum of omega does not majorize spectrum of omega_prime".into(),
        ));
    }
    let steps = t_transform_chain(&spec, &spec_prime)?;
    let chain = chain_rotation_product(&steps, omega.dim());
    let pre = vecs.adjoint();
    let post = vecs_prime;
    let dense = &post * &chain * &pre;
    Ok(UnitaryPlan {
        steps,
        pre_rotation: Some(pre),
        post_rotation: Some(post),
        dense,
    })
}

/// A convex mixture of permutations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PermutationMixture {
    pub terms: Vec<(f64, Permutation)>,
}

impl PermutationMixture {
    pub fn identity(dim: usize) -> Self {
        Self {
            terms: vec![(1.0, Permutation::identity(dim))],
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; w.len()];
        for (q, p) in &self.terms {
            let moved = p.apply(w);
            for (o, m) in out.iter_mut().zip(&moved) {
                *o += q * m;
            }
        }
        out
    }

    /// Row and column sums of sum_a q_a pi_a as a matrix; for a valid
    /// mixture both are 1 in every slot.
    pub fn doubly_stochastic_residual(&self, dim: usize) -> f64 {
        let mut rows = vec![0.0f64; dim];
        let mut cols = vec![0.0f64; dim];
        for (q, p) in &self.terms {
            for j in 0..dim {
                cols[j] += q;
                rows[p.dest()[j]] += q;
            }
        }
        rows.iter()
            .chain(cols.iter())
            .map(|s| (s - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Merge duplicate permutations, drop terms below `prune`, renormalize.
    pub fn compacted(mut self, prune: f64) -> Self {
        let mut merged: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (q, p) in self.terms.drain(..) {
            *merged.entry(p.dest().to_vec()).or_insert(0.0) += q;
        }
        let mut terms: Vec<(f64, Permutation)> = merged
            .into_iter()
            .filter(|(_, q)| *q >= prune)
            .map(|(dest, q)| (q, Permutation::new_unchecked(dest)))
            .collect();
        terms.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        let total: f64 = terms.iter().map(|(q, _)| q).sum();
        if total > 0.0 && (total - 1.0).abs() > tol::SPECTRUM_RENORM {
            for (q, _) in terms.iter_mut() {
                *q /= total;
            }
        }
        Self { terms }
    }

    /// Keep at most `max_terms` heaviest terms, renormalizing. The mixture
    /// stays valid (probabilities over permutations); only the vector it
    /// reconstructs moves, which callers re-measure.
    pub fn truncated(mut self, max_terms: usize) -> Self {
        if self.terms.len() <= max_terms {
            return self;
        }
        self.terms
            .sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        self.terms.truncate(max_terms);
        let total: f64 = self.terms.iter().map(|(q, _)| q).sum();
        for (q, _) in self.terms.iter_mut() {
            *q /= total;
        }
        self
    }
}

/// Expand a T-transform chain (acting on sorted coordinates) into a mixture
/// of permutations on the original coordinates of `w` and `w_prime`:
/// each step contributes the identity with weight t and the transposition
/// with weight 1 - t, and sorting permutations are composed on both sides.
///
/// `cap_terms` bounds the expansion; `None` keeps everything above the
/// prune threshold.
pub fn chain_to_mixture(
    steps: &[TTransformStep],
    sort_source: &Permutation,
    sort_target: &Permutation,
    cap_terms: Option<usize>,
) -> PermutationMixture {
    let dim = sort_source.dim();
    let unsort_target = sort_target.inverse();
    let mut mix: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    mix.insert(Permutation::identity(dim).dest().to_vec(), 1.0);
    for s in steps {
        let tau = Permutation::transposition(dim, s.j, s.k);
        let mut next: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (dest, q) in &mix {
            let base = Permutation::new_unchecked(dest.clone());
            *next.entry(dest.clone()).or_insert(0.0) += q * s.t;
            let swapped = tau.compose(&base);
            *next.entry(swapped.dest().to_vec()).or_insert(0.0) += q * (1.0 - s.t);
        }
        next.retain(|_, q| *q >= tol::MIXTURE_PRUNE);
        if let Some(cap) = cap_terms {
            if next.len() > 2 * cap {
                let mut v: Vec<(Vec<usize>, f64)> = next.into_iter().collect();
                v.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
                v.truncate(2 * cap);
                next = v.into_iter().collect();
            }
        }
        mix = next;
    }
    let terms = mix
        .into_iter()
        .map(|(dest, q)| {
            let sorted_perm = Permutation::new_unchecked(dest);
            let full = unsort_target.compose(&sorted_perm).compose(sort_source);
            (q, full)
        })
        .collect();
    let mut out = PermutationMixture { terms }.compacted(tol::MIXTURE_PRUNE);
    if let Some(cap) = cap_terms {
        out = out.truncated(cap);
    }
    out
}

/// Mixture of permutations carrying `w` onto `w_prime`, provided `w`
/// majorizes `w_prime`.
pub fn permutation_mixture(
    w: &ProbabilityVector,
    w_prime: &ProbabilityVector,
) -> Result<PermutationMixture> {
    if w.dim() != w_prime.dim() {
        return Err(Error::DimensionMismatch(w.dim(), w_prime.dim()));
    }
    if !majorizes(w, w_prime) {
        return Err(Error::Majorization(
            "w does not majorize w_prime".into(),
        ));
    }
    let (sw, order_w) = w.sorted_descending();
    let (swp, order_wp) = w_prime.sorted_descending();
    let steps = t_transform_chain(&sw, &swp)?;
    let sort_w = Permutation::sorting_from_order(&order_w);
    let sort_wp = Permutation::sorting_from_order(&order_wp);
    Ok(chain_to_mixture(&steps, &sort_w, &sort_wp, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pv(v: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn point_mass_majorizes_everything() {
        let top = pv(&[1.0, 0.0, 0.0]);
        for other in [
            pv(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]),
            pv(&[0.5, 0.3, 0.2]),
            pv(&[0.0, 1.0, 0.0]),
        ] {
            assert!(majorizes(&top, &other));
        }
    }

    #[test]
    fn incomparable_pair_fails_both_ways() {
        // First partial sums: 0.5 < 2/3; second: 5/6 < 1.
        let a = pv(&[0.5, 0.5, 0.0]);
        let b = pv(&[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]);
        assert!(!majorizes(&a, &b));
        assert!(!majorizes(&b, &a));
    }

    #[test]
    fn majorization_pads_shorter_vector() {
        let a = pv(&[0.6, 0.4]);
        let b = pv(&[0.5, 0.3, 0.2]);
        assert!(majorizes(&a, &b));
    }

    #[test]
    fn chain_is_empty_for_equal_vectors() {
        let w = [0.5, 0.3, 0.2];
        assert!(t_transform_chain(&w, &w).unwrap().is_empty());
    }

    #[test]
    fn chain_single_step_example() {
        // delta = min(0.1, 0.1) = 0.1, t = 1 - 0.1/0.4 = 0.75
        let steps = t_transform_chain(&[0.7, 0.3], &[0.6, 0.4]).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!((steps[0].j, steps[0].k), (0, 1));
        assert_abs_diff_eq!(steps[0].t, 0.75, epsilon = 1e-14);
        let out = apply_chain(&steps, &[0.7, 0.3]);
        assert_abs_diff_eq!(out[0], 0.6, epsilon = 1e-14);
        assert_abs_diff_eq!(out[1], 0.4, epsilon = 1e-14);
    }

    #[test]
    fn chain_handles_interleaved_surplus_deficit() {
        // Surpluses at ranks 0 and 2, deficits at 1 and 3: the unconstrained
        // "largest surplus anywhere" rule would produce t outside [0, 1].
        let w = [0.4, 0.3, 0.2, 0.1];
        let wp = [0.35, 0.35, 0.15, 0.15];
        let steps = t_transform_chain(&w, &wp).unwrap();
        assert!(steps.len() <= 3);
        for s in &steps {
            assert!((0.0..=1.0).contains(&s.t), "t out of range: {}", s.t);
        }
        let out = apply_chain(&steps, &w);
        for (o, e) in out.iter().zip(&wp) {
            assert_abs_diff_eq!(o, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn extreme_t_values_are_identity_and_swap() {
        let id_step = TTransformStep { j: 0, k: 1, t: 1.0 };
        let mut v = [0.8, 0.2];
        id_step.apply(&mut v);
        assert_eq!(v, [0.8, 0.2]);
        assert_eq!(id_step.rotation(2), CMatrix::identity(2, 2));

        let swap_step = TTransformStep { j: 0, k: 1, t: 0.0 };
        let mut v = [0.8, 0.2];
        swap_step.apply(&mut v);
        assert_eq!(v, [0.2, 0.8]);
        // rotation at t = 0 maps |0> -> |1>, |1> -> -|0>: a signed swap
        let r = swap_step.rotation(2);
        assert_abs_diff_eq!(r[(1, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r[(0, 1)].re, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn schur_horn_qubit_example() {
        let omega = DensityMatrix::from_probabilities(&pv(&[0.7, 0.3]));
        let omega_p = DensityMatrix::from_probabilities(&pv(&[0.6, 0.4]));
        let plan = schur_horn_unitary(&omega, &omega_p).unwrap();
        assert_eq!(plan.steps.len(), 1);
        assert_abs_diff_eq!(plan.steps[0].t, 0.75, epsilon = 1e-14);
        assert!(plan.residual() < 1e-12);
        let rotated = omega.conjugate(&plan.dense).unwrap();
        assert_abs_diff_eq!(rotated.matrix()[(0, 0)].re, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(rotated.matrix()[(1, 1)].re, 0.4, epsilon = 1e-12);
    }

    #[test]
    fn schur_horn_identity_when_equal() {
        let omega = DensityMatrix::from_probabilities(&pv(&[0.5, 0.3, 0.2]));
        let plan = schur_horn_unitary(&omega, &omega).unwrap();
        assert!(plan.steps.is_empty());
        let rotated = omega.conjugate(&plan.dense).unwrap();
        assert!(rotated.trace_distance(&omega).unwrap() < 1e-10);
    }

    #[test]
    fn schur_horn_rejects_non_majorizing() {
        let omega = DensityMatrix::from_probabilities(&pv(&[0.5, 0.5, 0.0]));
        let omega_p = DensityMatrix::from_probabilities(&pv(&[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]));
        assert!(matches!(
            schur_horn_unitary(&omega, &omega_p),
            Err(Error::Majorization(_))
        ));
    }

    #[test]
    fn mixture_qubit_example() {
        let w = pv(&[0.7, 0.3]);
        let wp = pv(&[0.6, 0.4]);
        let mix = permutation_mixture(&w, &wp).unwrap();
        assert_eq!(mix.len(), 2);
        // {(0.75, id), (0.25, swap)}
        let id_q = mix
            .terms
            .iter()
            .find(|(_, p)| p.is_identity())
            .map(|(q, _)| *q)
            .unwrap();
        assert_abs_diff_eq!(id_q, 0.75, epsilon = 1e-14);
        let out = mix.apply(w.entries());
        assert_abs_diff_eq!(out[0], 0.6, epsilon = 1e-14);
        assert_abs_diff_eq!(out[1], 0.4, epsilon = 1e-14);
        assert!(mix.doubly_stochastic_residual(2) < 1e-14);
    }

    #[test]
    fn mixture_identity_when_equal() {
        let w = pv(&[0.5, 0.25, 0.25]);
        let mix = permutation_mixture(&w, &w).unwrap();
        assert_eq!(mix.len(), 1);
        assert!(mix.terms[0].1.is_identity());
        assert_abs_diff_eq!(mix.terms[0].0, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn mixture_handles_unsorted_inputs() {
        let w = pv(&[0.3, 0.7]);
        let wp = pv(&[0.4, 0.6]);
        let mix = permutation_mixture(&w, &wp).unwrap();
        let out = mix.apply(w.entries());
        assert_abs_diff_eq!(out[0], 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(out[1], 0.6, epsilon = 1e-12);
    }
}
