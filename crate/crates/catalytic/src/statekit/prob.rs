//! Classical states: probability vectors on finite sample spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// A probability distribution on a finite sample space.
///
/// Entries are validated to be nonnegative (up to a small clamp) and to sum
/// to one. The trivial state of dimension 1 represents an empty tensor
/// factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbabilityVector {
    entries: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Invalid("empty probability vector".into()));
        }
        let mut clamped = entries;
        for (i, p) in clamped.iter_mut().enumerate() {
            if *p < -tol::NEG_PROB {
                return Err(Error::NegativeProbability { index: i, value: *p });
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = clamped.iter().sum();
        if (sum - 1.0).abs() > tol::PROB_SUM {
            return Err(Error::NotNormalized(sum));
        }
        Ok(Self { entries: clamped })
    }

    /// The trivial (dimension-1) state, the identity for `tensor`.
    pub fn trivial() -> Self {
        Self { entries: vec![1.0] }
    }

    pub fn uniform(d: usize) -> Self {
        Self {
            entries: vec![1.0 / d as f64; d],
        }
    }

    /// Deterministic distribution concentrated on `index`.
    pub fn point_mass(d: usize, index: usize) -> Self {
        let mut entries = vec![0.0; d];
        entries[index] = 1.0;
        Self { entries }
    }

    /// Construct from raw entries renormalizing the total mass; used when a
    /// computation produces a vector that is normalized only up to rounding.
    pub(crate) fn from_unnormalized(mut entries: Vec<f64>) -> Self {
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > tol::SPECTRUM_RENORM && sum > 0.0 {
            for p in entries.iter_mut() {
                *p /= sum;
            }
        }
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    /// Shannon entropy in nats, with the convention 0 ln 0 = 0.
    pub fn shannon_entropy(&self) -> f64 {
        shannon_entropy(&self.entries)
    }

    /// Variance of surprisal: sum_i p_i (-ln p_i - H)^2 over nonzero entries.
    pub fn surprisal_variance(&self) -> f64 {
        let h = self.shannon_entropy();
        self.entries
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * (-p.ln() - h).powi(2))
            .sum()
    }

    /// Total variation distance (1/2) sum |p_j - p'_j|.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(total_variation(&self.entries, other.entries()))
    }

    /// Kronecker product, `self` slowest index.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.dim() * other.dim();
        if dim > tol::CLASSICAL_DIM_CAP {
            return Err(Error::DimensionCapExceeded {
                requested: dim,
                cap: tol::CLASSICAL_DIM_CAP,
                context: " (classical tensor product)".into(),
            });
        }
        let mut entries = Vec::with_capacity(dim);
        for &a in &self.entries {
            for &b in other.entries() {
                entries.push(a * b);
            }
        }
        Ok(Self { entries })
    }

    /// n-fold tensor power; n = 0 yields the trivial state.
    pub fn power(&self, n: usize) -> Result<Self> {
        let mut out = Self::trivial();
        for _ in 0..n {
            out = out.tensor(self)?;
        }
        Ok(out)
    }

    /// Entries sorted descending together with the stable sort permutation:
    /// `order[rank]` is the original index holding the rank-th largest entry.
    pub fn sorted_descending(&self) -> (Vec<f64>, Vec<usize>) {
        sort_descending(&self.entries)
    }
}

/// Shannon entropy of raw entries in nats; zeros contribute nothing.
pub fn shannon_entropy(entries: &[f64]) -> f64 {
    -entries
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// Total variation distance between raw entry slices.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Stable descending sort returning (sorted values, original indices by rank).
pub fn sort_descending(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap().then(a.cmp(&b)));
    let sorted = order.iter().map(|&i| values[i]).collect();
    (sorted, order)
}
