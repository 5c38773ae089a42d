//! Typical-set machinery for n-copy states: truncation to the typical
//! subspace, projector size bounds, certified error bounds, and construction
//! of the majorized n-copy approximation of the target that seeds both
//! catalyst constructions.
//!
//! Everything here works on spectra. Product states of i.i.d. copies are
//! handled through type classes (empirical histograms), so tail masses and
//! counts stay cheap even when the full d^n sample space is out of reach;
//! dense vectors are materialized only on demand and under the dimension cap.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::majorization::{
    chain_rotation_product, chain_to_mixture, majorizes_raw, t_transform_chain, Permutation,
    PermutationMixture, TTransformStep, UnitaryPlan,
};
use crate::statekit::density::{C64, CMatrix};
use crate::statekit::prob::{sort_descending, total_variation, ProbabilityVector};
use crate::tol;

/// One empirical type of length-n tuples over the nonzero symbols of the
/// base distribution: `counts[i]` occurrences of symbol i.
#[derive(Debug, Clone, Serialize)]
pub struct TypeClass {
    pub counts: Vec<usize>,
    /// Number of tuples of this type (multinomial coefficient).
    pub tuples: f64,
    /// Probability of each individual tuple.
    pub tuple_prob: f64,
    /// |empirical average surprisal - H(p)|.
    pub deviation: f64,
    pub kept: bool,
}

/// The typical truncation of `base^(x) n` at width `delta`.
#[derive(Debug, Clone)]
pub struct TypicalTruncation {
    pub base: ProbabilityVector,
    pub n: usize,
    pub delta: f64,
    pub classes: Vec<TypeClass>,
    /// Probability removed before renormalization.
    pub tail_mass: f64,
    /// Spread of the surprisal values of the base distribution.
    pub surprisal_spread: f64,
    base_entropy: f64,
}

/// Analytic projector-size bracket together with the exact kept-tuple count.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SizeBounds {
    pub lower: f64,
    pub upper: f64,
    pub count: f64,
}

impl TypicalTruncation {
    pub fn kept_count(&self) -> f64 {
        self.classes
            .iter()
            .filter(|c| c.kept)
            .map(|c| c.tuples)
            .sum()
    }

    pub fn kept_mass(&self) -> f64 {
        1.0 - self.tail_mass
    }

    /// True when the tuple (indices into the base alphabet) is kept.
    pub fn is_tuple_typical(&self, tuple: &[usize]) -> bool {
        if tuple.len() != self.n {
            return false;
        }
        let p = self.base.entries();
        let mut sum = 0.0;
        for &i in tuple {
            if p[i] <= 0.0 {
                return false;
            }
            sum += -p[i].ln();
        }
        (sum / self.n as f64 - self.base_entropy).abs() < self.delta
    }

    /// Range of the kept (renormalized) eigenvalues.
    pub fn kept_value_range(&self) -> Option<(f64, f64)> {
        let norm = self.kept_mass();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in self.classes.iter().filter(|c| c.kept) {
            let v = c.tuple_prob / norm;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Sorted (value, multiplicity) segments of the renormalized truncation,
    /// descending by value.
    fn segments(&self) -> Vec<(f64, f64)> {
        let norm = self.kept_mass();
        let mut segs: Vec<(f64, f64)> = self
            .classes
            .iter()
            .filter(|c| c.kept)
            .map(|c| (c.tuple_prob / norm, c.tuples))
            .collect();
        segs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        segs
    }

    /// Dense d^n vector of the renormalized truncation (zeros outside the
    /// kept set), in the product-basis order with the first copy slowest.
    pub fn dense(&self) -> Result<Vec<f64>> {
        let d = self.base.dim();
        let total = checked_pow(d, self.n, tol::CLASSICAL_DIM_CAP)?;
        let p = self.base.entries();
        let norm = self.kept_mass();
        let mut out = vec![0.0f64; total];
        let mut tuple = vec![0usize; self.n];
        for (idx, slot) in out.iter_mut().enumerate() {
            digits(idx, d, &mut tuple);
            if tuple.iter().any(|&i| p[i] <= 0.0) {
                continue;
            }
            let mut sum = 0.0;
            let mut prob = 1.0;
            for &i in tuple.iter() {
                sum += -p[i].ln();
                prob *= p[i];
            }
            if (sum / self.n as f64 - self.base_entropy).abs() < self.delta {
                *slot = prob / norm;
            }
        }
        Ok(out)
    }
}

/// Truncate the n-fold product of `p` to its delta-typical part.
///
/// Tuples containing a zero-probability symbol carry no mass and are
/// excluded from the sample space outright.
pub fn typical_truncate(p: &ProbabilityVector, n: usize, delta: f64) -> Result<TypicalTruncation> {
    if n == 0 {
        return Err(Error::Invalid("copy count must be at least 1".into()));
    }
    if delta <= 0.0 {
        return Err(Error::Invalid("typicality width must be positive".into()));
    }
    let mut t = truncation_at(p, n, delta)?;
    flag_kept(&mut t);
    if t.classes.iter().all(|c| !c.kept) {
        return Err(Error::DegenerateTruncation { n, delta });
    }
    Ok(t)
}

fn truncation_at(p: &ProbabilityVector, n: usize, delta: f64) -> Result<TypicalTruncation> {
    let entries = p.entries();
    let support: Vec<usize> = (0..p.dim()).filter(|&i| entries[i] > 0.0).collect();
    if support.is_empty() {
        return Err(Error::Invalid("distribution has empty support".into()));
    }
    let h = p.shannon_entropy();
    let surprisals: Vec<f64> = support.iter().map(|&i| -entries[i].ln()).collect();
    let spread = surprisals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - surprisals.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut classes = Vec::new();
    let mut counts = vec![0usize; support.len()];
    enumerate_compositions(n, 0, &mut counts, &mut |counts| {
        let mut tuples = 1.0f64;
        let mut remaining = n;
        let mut log_prob = 0.0f64;
        let mut surprisal_sum = 0.0f64;
        for (slot, &k) in counts.iter().enumerate() {
            tuples *= binomial(remaining, k);
            remaining -= k;
            log_prob += k as f64 * entries[support[slot]].ln();
            surprisal_sum += k as f64 * surprisals[slot];
        }
        let mut full_counts = vec![0usize; entries.len()];
        for (slot, &k) in counts.iter().enumerate() {
            full_counts[support[slot]] = k;
        }
        classes.push(TypeClass {
            counts: full_counts,
            tuples,
            tuple_prob: log_prob.exp(),
            deviation: (surprisal_sum / n as f64 - h).abs(),
            kept: false,
        });
    });
    Ok(TypicalTruncation {
        base: p.clone(),
        n,
        delta,
        classes,
        tail_mass: 0.0,
        surprisal_spread: spread,
        base_entropy: h,
    })
}

fn flag_kept(t: &mut TypicalTruncation) {
    let mut tail = 0.0;
    for c in t.classes.iter_mut() {
        c.kept = c.deviation < t.delta;
        if !c.kept {
            tail += c.tuples * c.tuple_prob;
        }
    }
    t.tail_mass = tail;
}

/// Analytic bracket for the typical-projector size:
/// `(1 - tail) e^{n(H - delta)} <= count <= e^{n(H + delta)}`.
pub fn projector_size_bounds(t: &TypicalTruncation) -> SizeBounds {
    let h = t.base_entropy;
    let nf = t.n as f64;
    SizeBounds {
        lower: t.kept_mass() * (nf * (h - t.delta)).exp(),
        upper: (nf * (h + t.delta)).exp(),
        count: t.kept_count(),
    }
}

/// Hoeffding bound on the atypical mass: 2 exp(-2 n delta^2 / R^2), where R
/// is the spread of the surprisal values; 0 when the spread vanishes.
pub fn hoeffding_tail_bound(spread: f64, n: usize, delta: f64) -> f64 {
    if spread <= 0.0 {
        0.0
    } else {
        2.0 * (-2.0 * n as f64 * delta * delta / (spread * spread)).exp()
    }
}

/// Certified error bound for the majorized-target construction at `n`
/// copies: the two truncation tails assembled by the triangle inequality at
/// the canonical width delta = gap/4, capped at 1 (total variation never
/// exceeds 1).
pub fn error_bound(entropy_gap: f64, n: usize, spread_p: f64, spread_p_prime: f64) -> f64 {
    let delta = entropy_gap / 4.0;
    let raw = hoeffding_tail_bound(spread_p, n, delta) + hoeffding_tail_bound(spread_p_prime, n, delta);
    raw.min(1.0)
}

/// How the number of copies is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CopySelection {
    /// Smallest n whose certified bound meets the requested error, subject
    /// to the dimension cap.
    Epsilon(f64),
    /// A caller-forced copy count.
    ForcedN(usize),
    /// The largest copy count whose dense product stays within the given
    /// dimension budget.
    LargestAdmissible(usize),
}

/// Which construction produced the majorized target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetRoute {
    /// Typical truncation of both states at the given width, Schur-Horn
    /// chain between the truncations applied to the full product state.
    Typicality { delta: f64 },
    /// Target blended toward uniform just enough to be majorized by the
    /// product state; used when no truncation width works at this n.
    UniformBlend { gamma: f64 },
}

/// The majorized approximation of the n-copy target, with the transform
/// that realizes it from the n-copy input.
#[derive(Debug, Clone)]
pub struct MajorizedTarget {
    pub n: usize,
    pub base_dim: usize,
    pub route: TargetRoute,
    /// Spectrum of the approximation in the product-basis order of the
    /// target's eigenbasis; majorized by the n-copy input spectrum.
    pub target: Vec<f64>,
    /// Trace distance (total variation) between `target` and the full
    /// n-copy target, measured from the actual states.
    pub eps_achieved: f64,
    /// Certified bound from the truncation tails (1 when no typicality
    /// certificate applies to the route used).
    pub eps_certified: f64,
    /// T-transform chain acting on sorted coordinates.
    pub chain: Vec<TTransformStep>,
    /// Sorting permutation applied to the chain input.
    pub sort_source: Permutation,
    /// Sorting permutation applied to the chain output (the target side).
    pub sort_target: Permutation,
    pub entropy_gap: f64,
}

impl MajorizedTarget {
    /// Apply the realized doubly stochastic map to a raw vector in the
    /// product-basis order.
    pub fn stochastic_apply(&self, input: &[f64]) -> Vec<f64> {
        let sorted = self.sort_source.apply(input);
        let moved = crate::majorization::apply_chain(&self.chain, &sorted);
        self.sort_target.inverse().apply(&moved)
    }

    /// The unitary realization in the product basis:
    /// `U = P_target^{-1} * (step rotations) * P_source`.
    pub fn plan_in_product_basis(&self) -> UnitaryPlan {
        let dim = self.target.len();
        let pre = permutation_matrix(&self.sort_source);
        let post = permutation_matrix(&self.sort_target.inverse());
        let dense = &post * chain_rotation_product(&self.chain, dim) * &pre;
        UnitaryPlan {
            steps: self.chain.clone(),
            pre_rotation: Some(pre),
            post_rotation: Some(post),
            dense,
        }
    }

    /// Expand the chain into a mixture of permutations on the product basis,
    /// optionally capped to the heaviest terms.
    pub fn mixture(&self, cap_terms: Option<usize>) -> PermutationMixture {
        chain_to_mixture(&self.chain, &self.sort_source, &self.sort_target, cap_terms)
    }
}

pub fn permutation_matrix(p: &Permutation) -> CMatrix {
    let d = p.dim();
    let mut m = CMatrix::zeros(d, d);
    for (j, &i) in p.dest().iter().enumerate() {
        m[(i, j)] = C64::new(1.0, 0.0);
    }
    m
}

/// Build the majorized n-copy approximation of `p_prime` from copies of `p`.
///
/// Requires H(p) < H(p') strictly. The width starts at gap/4; when the
/// truncations at this width are degenerate or fail to majorize (small n),
/// the width is widened through the distinct deviation levels of the type
/// classes, and if no width works the target is blended toward uniform by
/// the minimal feasible amount.
pub fn build_majorized_target(
    p: &ProbabilityVector,
    p_prime: &ProbabilityVector,
    selection: CopySelection,
    dim_cap: usize,
) -> Result<MajorizedTarget> {
    if p.dim() != p_prime.dim() {
        return Err(Error::DimensionMismatch(p.dim(), p_prime.dim()));
    }
    let h = p.shannon_entropy();
    let h_prime = p_prime.shannon_entropy();
    let gap = h_prime - h;
    if gap <= 0.0 {
        return Err(Error::EntropyGap {
            input: h,
            target: h_prime,
        });
    }
    let d = p.dim();
    let spread_p = surprisal_spread(p);
    let spread_pp = surprisal_spread(p_prime);
    let n = match selection {
        CopySelection::ForcedN(n) => {
            if n == 0 {
                return Err(Error::Invalid("copy count must be at least 1".into()));
            }
            checked_pow(d, n, dim_cap)?;
            n
        }
        CopySelection::Epsilon(eps) => {
            if !(eps > 0.0) {
                return Err(Error::Invalid("epsilon must be positive".into()));
            }
            let mut best = f64::INFINITY;
            let mut best_n = 0;
            let mut chosen = None;
            for n in 1.. {
                if checked_pow(d, n, dim_cap).is_err() {
                    break;
                }
                let bound = error_bound(gap, n, spread_p, spread_pp);
                if bound <= best {
                    best = bound;
                    best_n = n;
                }
                if bound <= eps {
                    chosen = Some(n);
                    break;
                }
            }
            chosen.ok_or(Error::EpsilonUnreachable {
                requested: eps,
                achievable: best,
                at_n: best_n,
            })?
        }
        CopySelection::LargestAdmissible(budget) => {
            let budget = budget.min(dim_cap);
            let mut n = 0usize;
            while checked_pow(d, n + 1, budget).is_ok() {
                n += 1;
            }
            if n == 0 {
                return Err(Error::DimensionCapExceeded {
                    requested: d,
                    cap: budget,
                    context: " (single copy already over budget)".into(),
                });
            }
            n
        }
    };
    build_at_n(p, p_prime, n, gap, spread_p, spread_pp)
}

fn build_at_n(
    p: &ProbabilityVector,
    p_prime: &ProbabilityVector,
    n: usize,
    gap: f64,
    spread_p: f64,
    spread_pp: f64,
) -> Result<MajorizedTarget> {
    let base_delta = gap / 4.0;
    let mut trunc_p = truncation_at(p, n, base_delta)?;
    let mut trunc_pp = truncation_at(p_prime, n, base_delta)?;

    // Candidate widths: the canonical gap/4 first, then every level that
    // changes a kept-set, ascending.
    let mut levels: Vec<f64> = trunc_p
        .classes
        .iter()
        .chain(trunc_pp.classes.iter())
        .map(|c| c.deviation)
        .collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let mut candidates = vec![base_delta];
    for (i, &lv) in levels.iter().enumerate() {
        let next = levels.get(i + 1).copied().unwrap_or(lv + 1.0);
        let mid = 0.5 * (lv + next.min(lv + 2.0));
        if mid > base_delta {
            candidates.push(mid);
        }
    }

    let full_p = dense_product(p, n);
    let full_pp = dense_product(p_prime, n);

    for &delta in &candidates {
        trunc_p.delta = delta;
        trunc_pp.delta = delta;
        flag_kept(&mut trunc_p);
        flag_kept(&mut trunc_pp);
        if trunc_p.classes.iter().all(|c| !c.kept) || trunc_pp.classes.iter().all(|c| !c.kept) {
            continue;
        }
        if !majorizes_segments(&trunc_p.segments(), &trunc_pp.segments()) {
            continue;
        }
        let hat_p = trunc_p.dense()?;
        let hat_pp = trunc_pp.dense()?;
        let (sorted_hat_p, order_p) = sort_descending(&hat_p);
        let (sorted_hat_pp, order_pp) = sort_descending(&hat_pp);
        let chain = t_transform_chain(&sorted_hat_p, &sorted_hat_pp)?;
        let sort_source = Permutation::sorting_from_order(&order_p);
        let sort_target = Permutation::sorting_from_order(&order_pp);
        let mut out = MajorizedTarget {
            n,
            base_dim: p.dim(),
            route: TargetRoute::Typicality { delta },
            target: Vec::new(),
            eps_achieved: 0.0,
            eps_certified: error_bound(gap, n, spread_p, spread_pp),
            chain,
            sort_source,
            sort_target,
            entropy_gap: gap,
        };
        out.target = out.stochastic_apply(&full_p);
        out.eps_achieved = total_variation(&out.target, &full_pp);
        return Ok(out);
    }

    // No admissible width: blend the target toward uniform by the smallest
    // gamma that restores majorization by the product state.
    let total = full_p.len() as f64;
    let (sorted_a, _) = sort_descending(&full_p);
    let (sorted_b, order_b) = sort_descending(&full_pp);
    let mut gamma = 0.0f64;
    let mut sa = 0.0;
    let mut sb = 0.0;
    for k in 0..sorted_a.len() {
        sa += sorted_a[k];
        sb += sorted_b[k];
        if sb > sa {
            let flat = (k + 1) as f64 / total;
            gamma = gamma.max((sb - sa) / (sb - flat));
        }
    }
    let mut blended;
    loop {
        gamma = (gamma * (1.0 + 1e-12) + 1e-15).min(1.0);
        blended = full_pp
            .iter()
            .map(|&b| (1.0 - gamma) * b + gamma / total)
            .collect::<Vec<f64>>();
        if majorizes_raw(&full_p, &blended) || gamma >= 1.0 {
            break;
        }
        gamma *= 1.01;
    }
    // Mixing with uniform preserves the sort order of the target.
    let sorted_blend: Vec<f64> = sorted_b
        .iter()
        .map(|&b| (1.0 - gamma) * b + gamma / total)
        .collect();
    let chain = t_transform_chain(&sorted_a, &sorted_blend)?;
    let (_, order_a) = sort_descending(&full_p);
    let mut out = MajorizedTarget {
        n,
        base_dim: p.dim(),
        route: TargetRoute::UniformBlend { gamma },
        target: Vec::new(),
        eps_achieved: 0.0,
        eps_certified: 1.0,
        chain,
        sort_source: Permutation::sorting_from_order(&order_a),
        sort_target: Permutation::sorting_from_order(&order_b),
        entropy_gap: gap,
    };
    out.target = out.stochastic_apply(&full_p);
    out.eps_achieved = total_variation(&out.target, &full_pp);
    let _ = blended;
    Ok(out)
}

/// Partial-sum majorization on (value, multiplicity) segment lists sorted
/// descending by value; linearity between breakpoints makes checking at the
/// breakpoints of either side sufficient.
fn majorizes_segments(a: &[(f64, f64)], b: &[(f64, f64)]) -> bool {
    let total_a: f64 = a.iter().map(|(_, c)| c).sum();
    let total_b: f64 = b.iter().map(|(_, c)| c).sum();
    let total = total_a.max(total_b);
    let mut breaks: Vec<f64> = Vec::with_capacity(a.len() + b.len() + 1);
    let mut acc = 0.0;
    for (_, c) in a {
        acc += c;
        breaks.push(acc);
    }
    acc = 0.0;
    for (_, c) in b {
        acc += c;
        breaks.push(acc);
    }
    breaks.push(total);
    breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
    breaks.dedup();
    let prefix = |segs: &[(f64, f64)], count: f64| -> f64 {
        let mut left = count;
        let mut sum = 0.0;
        for &(v, c) in segs {
            if left <= 0.0 {
                break;
            }
            let take = left.min(c);
            sum += v * take;
            left -= take;
        }
        sum
    };
    for &c in &breaks {
        if prefix(a, c) < prefix(b, c) - tol::MAJORIZATION_SLACK {
            return false;
        }
    }
    true
}

pub fn surprisal_spread(p: &ProbabilityVector) -> f64 {
    let s: Vec<f64> = p
        .entries()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x.ln())
        .collect();
    s.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - s.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Dense n-fold product of a distribution, first copy slowest.
pub fn dense_product(p: &ProbabilityVector, n: usize) -> Vec<f64> {
    let d = p.dim();
    let total = d.pow(n as u32);
    let entries = p.entries();
    let mut out = vec![1.0f64; total];
    let mut tuple = vec![0usize; n];
    for (idx, slot) in out.iter_mut().enumerate() {
        digits(idx, d, &mut tuple);
        let mut prob = 1.0;
        for &i in tuple.iter() {
            prob *= entries[i];
        }
        *slot = prob;
    }
    out
}

fn digits(mut idx: usize, d: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = idx % d;
        idx /= d;
    }
}

fn checked_pow(d: usize, n: usize, cap: usize) -> Result<usize> {
    let mut total = 1usize;
    for _ in 0..n {
        total = total.checked_mul(d).ok_or(Error::DimensionCapExceeded {
            requested: usize::MAX,
            cap,
            context: " (n-copy product)".into(),
        })?;
        if total > cap {
            return Err(Error::DimensionCapExceeded {
                requested: total,
                cap,
                context: " (n-copy product)".into(),
            });
        }
    }
    Ok(total)
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k.min(n));
    let mut out = 1.0f64;
    for i in 0..k {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out.round()
}

fn enumerate_compositions(
    remaining: usize,
    slot: usize,
    counts: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if slot + 1 == counts.len() {
        counts[slot] = remaining;
        f(counts);
        return;
    }
    for k in 0..=remaining {
        counts[slot] = k;
        enumerate_compositions(remaining - k, slot + 1, counts, f);
    }
}
