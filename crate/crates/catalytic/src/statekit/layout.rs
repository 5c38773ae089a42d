//! Composite-system bookkeeping: tensor factorizations, partial traces and
//! operator embeddings.
//!
//! Joint indices are row-major: the first factor is the slowest index, the
//! last the fastest, matching the Kronecker-product convention of `tensor`.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statekit::density::{C64, CMatrix, DensityMatrix};
use crate::statekit::prob::ProbabilityVector;

/// An ordered tensor factorization of a joint space, with one label per factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsystemLayout {
    pub dims: Vec<usize>,
    pub labels: Vec<String>,
}

impl SubsystemLayout {
    pub fn new<S: Into<String>>(dims: Vec<usize>, labels: Vec<S>) -> Result<Self> {
        if dims.len() != labels.len() {
            return Err(Error::Invalid(format!(
                "{} dims vs {} labels",
                dims.len(),
                labels.len()
            )));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::Invalid("zero-dimensional factor".into()));
        }
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        for (i, a) in labels.iter().enumerate() {
            if labels[i + 1..].contains(a) {
                return Err(Error::Invalid(format!("duplicate label '{a}'")));
            }
        }
        Ok(Self { dims, labels })
    }

    /// Convenience layout for n same-dimension factors labelled `S1..Sn`.
    pub fn copies(d: usize, n: usize) -> Self {
        Self {
            dims: vec![d; n],
            labels: (1..=n).map(|k| format!("S{k}")).collect(),
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    pub fn position_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn positions_of(&self, labels: &[&str]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.position_of(l)).collect()
    }

    fn check_dim(&self, state_dim: usize) -> Result<()> {
        if self.total_dim() != state_dim {
            return Err(Error::InconsistentLayout {
                layout_dim: self.total_dim(),
                state_dim,
            });
        }
        Ok(())
    }

    /// Row-major strides of each factor.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    /// Decompose a joint index into per-factor digits.
    pub fn unravel(&self, index: usize) -> Vec<usize> {
        let strides = self.strides();
        self.dims
            .iter()
            .zip(&strides)
            .map(|(&d, &s)| (index / s) % d)
            .collect()
    }

    /// Recompose per-factor digits into a joint index.
    pub fn ravel(&self, digits: &[usize]) -> usize {
        let strides = self.strides();
        digits.iter().zip(&strides).map(|(&x, &s)| x * s).sum()
    }

    /// The layout restricted to the factors at `positions`, in that order.
    pub fn sublayout(&self, positions: &[usize]) -> Self {
        Self {
            dims: positions.iter().map(|&p| self.dims[p]).collect(),
            labels: positions.iter().map(|&p| self.labels[p].clone()).collect(),
        }
    }

    /// Positions not listed in `positions`, in layout order.
    pub fn complement(&self, positions: &[usize]) -> Vec<usize> {
        (0..self.num_factors())
            .filter(|p| !positions.contains(p))
            .collect()
    }
}

/// Marginal of a classical joint state on the factors labelled `keep`
/// (result factors ordered as in `keep`).
pub fn partial_trace_classical(
    state: &ProbabilityVector,
    layout: &SubsystemLayout,
    keep: &[&str],
) -> Result<ProbabilityVector> {
    layout.check_dim(state.dim())?;
    let keep_pos = layout.positions_of(keep)?;
    let kept = layout.sublayout(&keep_pos);
    let mut out = vec![0.0f64; kept.total_dim()];
    for (idx, &p) in state.entries().iter().enumerate() {
        let digits = layout.unravel(idx);
        let sub: Vec<usize> = keep_pos.iter().map(|&k| digits[k]).collect();
        out[kept.ravel(&sub)] += p;
    }
    Ok(ProbabilityVector::from_unnormalized(out))
}

/// Marginal of a quantum joint state on the factors labelled `keep`.
pub fn partial_trace_quantum(
    state: &DensityMatrix,
    layout: &SubsystemLayout,
    keep: &[&str],
) -> Result<DensityMatrix> {
    layout.check_dim(state.dim())?;
    let keep_pos = layout.positions_of(keep)?;
    let kept = layout.sublayout(&keep_pos);
    let drop_pos = layout.complement(&keep_pos);
    let dropped = layout.sublayout(&drop_pos);
    let dk = kept.total_dim();
    let dr = dropped.total_dim();
    let mut out = CMatrix::zeros(dk, dk);
    let m = state.matrix();
    let mut digits = vec![0usize; layout.num_factors()];
    for a in 0..dk {
        let da = kept.unravel(a);
        for b in 0..dk {
            let db = kept.unravel(b);
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..dr {
                let drd = dropped.unravel(r);
                for (slot, &p) in keep_pos.iter().enumerate() {
                    digits[p] = da[slot];
                }
                for (slot, &p) in drop_pos.iter().enumerate() {
                    digits[p] = drd[slot];
                }
                let row = layout.ravel(&digits);
                for (slot, &p) in keep_pos.iter().enumerate() {
                    digits[p] = db[slot];
                }
                let col = layout.ravel(&digits);
                acc += m[(row, col)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Embed an operator acting on the factors labelled `targets` (in that
/// order) into the full joint space, identity elsewhere.
pub fn embed_operator(
    op: &CMatrix,
    layout: &SubsystemLayout,
    targets: &[&str],
) -> Result<CMatrix> {
    let pos = layout.positions_of(targets)?;
    let sub = layout.sublayout(&pos);
    if op.nrows() != sub.total_dim() || op.ncols() != sub.total_dim() {
        return Err(Error::DimensionMismatch(op.nrows(), sub.total_dim()));
    }
    let total = layout.total_dim();
    let rest_pos = layout.complement(&pos);
    let mut out = CMatrix::zeros(total, total);
    for row in 0..total {
        let rd = layout.unravel(row);
        let i_sub = sub.ravel(&pos.iter().map(|&p| rd[p]).collect::<Vec<_>>());
        for j_sub in 0..sub.total_dim() {
            let jd = sub.unravel(j_sub);
            let mut cd = rd.clone();
            for (slot, &p) in pos.iter().enumerate() {
                cd[p] = jd[slot];
            }
            let col = layout.ravel(&cd);
            out[(row, col)] = op[(i_sub, j_sub)];
        }
        // rest digits of row and col coincide by construction
        let _ = &rest_pos;
    }
    Ok(out)
}

/// Mutual information I(A:B) = H(A) + H(B) - H(AB) of a classical joint
/// state under a bipartition that must cover every factor.
pub fn mutual_information_classical(
    joint: &ProbabilityVector,
    layout: &SubsystemLayout,
    part_a: &[&str],
    part_b: &[&str],
) -> Result<f64> {
    check_bipartition(layout, part_a, part_b)?;
    let a = partial_trace_classical(joint, layout, part_a)?;
    let b = partial_trace_classical(joint, layout, part_b)?;
    Ok(a.shannon_entropy() + b.shannon_entropy() - joint.shannon_entropy())
}

/// Mutual information of a quantum joint state under a full bipartition.
pub fn mutual_information_quantum(
    joint: &DensityMatrix,
    layout: &SubsystemLayout,
    part_a: &[&str],
    part_b: &[&str],
) -> Result<f64> {
    check_bipartition(layout, part_a, part_b)?;
    let a = partial_trace_quantum(joint, layout, part_a)?;
    let b = partial_trace_quantum(joint, layout, part_b)?;
    Ok(a.von_neumann_entropy()? + b.von_neumann_entropy()? - joint.von_neumann_entropy()?)
}

fn check_bipartition(layout: &SubsystemLayout, part_a: &[&str], part_b: &[&str]) -> Result<()> {
    let pa = layout.positions_of(part_a)?;
    let pb = layout.positions_of(part_b)?;
    let mut seen = vec![false; layout.num_factors()];
    for &p in pa.iter().chain(&pb) {
        if seen[p] {
            return Err(Error::InvalidPartition);
        }
        seen[p] = true;
    }
    if seen.iter().all(|&s| s) {
        Ok(())
    } else {
        Err(Error::InvalidPartition)
    }
}

/// Complex helper used by callers assembling pure states.
pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn classical_product_marginal_recovers_factor() {
        let a = ProbabilityVector::new(vec![0.2, 0.8]).unwrap();
        let b = ProbabilityVector::new(vec![0.5, 0.25, 0.25]).unwrap();
        let ab = a.tensor(&b).unwrap();
        let layout = SubsystemLayout::new(vec![2, 3], vec!["A", "B"]).unwrap();
        let ma = partial_trace_classical(&ab, &layout, &["A"]).unwrap();
        assert_abs_diff_eq!(ma.trace_distance(&a).unwrap(), 0.0, epsilon = 1e-12);
        let mb = partial_trace_classical(&ab, &layout, &["B"]).unwrap();
        assert_abs_diff_eq!(mb.trace_distance(&b).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn bell_state_marginal_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::pure(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
        let layout = SubsystemLayout::new(vec![2, 2], vec!["A", "B"]).unwrap();
        for keep in [["A"], ["B"]] {
            let m = partial_trace_quantum(&bell, &layout, &keep).unwrap();
            let d = m.trace_distance(&DensityMatrix::maximally_mixed(2)).unwrap();
            assert_abs_diff_eq!(d, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn quantum_product_marginal_recovers_factor() {
        let a = DensityMatrix::pure(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let b = DensityMatrix::maximally_mixed(3);
        let ab = a.tensor(&b).unwrap();
        let layout = SubsystemLayout::new(vec![2, 3], vec!["A", "B"]).unwrap();
        let ma = partial_trace_quantum(&ab, &layout, &["A"]).unwrap();
        assert!(ma.trace_distance(&a).unwrap() < 1e-12);
    }

    #[test]
    fn mutual_information_product_and_correlated() {
        let layout = SubsystemLayout::new(vec![2, 2], vec!["A", "B"]).unwrap();
        let a = ProbabilityVector::new(vec![0.3, 0.7]).unwrap();
        let b = ProbabilityVector::new(vec![0.6, 0.4]).unwrap();
        let prod = a.tensor(&b).unwrap();
        let mi = mutual_information_classical(&prod, &layout, &["A"], &["B"]).unwrap();
        assert_abs_diff_eq!(mi, 0.0, epsilon = 1e-12);

        // perfectly correlated pair uniform on {(0,0),(1,1)}
        let corr = ProbabilityVector::new(vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let mi = mutual_information_classical(&corr, &layout, &["A"], &["B"]).unwrap();
        assert_abs_diff_eq!(mi, 2.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn partition_must_cover_everything() {
        let layout = SubsystemLayout::new(vec![2, 2, 2], vec!["A", "B", "C"]).unwrap();
        let joint = ProbabilityVector::uniform(8);
        assert!(matches!(
            mutual_information_classical(&joint, &layout, &["A"], &["B"]),
            Err(Error::InvalidPartition)
        ));
        assert!(matches!(
            mutual_information_classical(&joint, &layout, &["A", "B"], &["B", "C"]),
            Err(Error::InvalidPartition)
        ));
    }

    #[test]
    fn embed_acts_on_chosen_factors() {
        // X on the middle qubit of three
        let layout = SubsystemLayout::new(vec![2, 2, 2], vec!["A", "B", "C"]).unwrap();
        let mut x = CMatrix::zeros(2, 2);
        x[(0, 1)] = c(1.0, 0.0);
        x[(1, 0)] = c(1.0, 0.0);
        let full = embed_operator(&x, &layout, &["B"]).unwrap();
        // |000> -> |010>
        let mut v = nalgebra::DVector::<C64>::zeros(8);
        v[0] = c(1.0, 0.0);
        let w = &full * v;
        assert_abs_diff_eq!(w[layout.ravel(&[0, 1, 0])].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn embed_respects_target_order() {
        // a SWAP embedded on (C, A) of a 3-factor space equals SWAP_{AC}
        let layout = SubsystemLayout::new(vec![2, 2, 2], vec!["A", "B", "C"]).unwrap();
        let mut swap = CMatrix::zeros(4, 4);
        swap[(0, 0)] = c(1.0, 0.0);
        swap[(1, 2)] = c(1.0, 0.0);
        swap[(2, 1)] = c(1.0, 0.0);
        swap[(3, 3)] = c(1.0, 0.0);
        let full = embed_operator(&swap, &layout, &["C", "A"]).unwrap();
        let mut v = nalgebra::DVector::<C64>::zeros(8);
        v[layout.ravel(&[1, 0, 0])] = c(1.0, 0.0);
        let w = &full * v;
        assert_abs_diff_eq!(w[layout.ravel(&[0, 0, 1])].re, 1.0, epsilon = 1e-15);
    }
}
