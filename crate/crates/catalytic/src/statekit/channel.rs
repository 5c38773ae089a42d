//! Channels: dephasing in a fixed orthonormal basis, and mixed-unitary
//! channels (convex combinations of unitary conjugations).

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::statekit::density::{check_unitary, C64, CMatrix, DensityMatrix};
use crate::tol;

#[derive(Debug, Clone)]
pub enum Channel {
    /// Remove off-diagonal elements in the given orthonormal basis
    /// (columns of the matrix).
    DephasingInBasis { basis: CMatrix },
    /// sum_i p_i V_i . V_i^dag
    MixedUnitary { components: Vec<(f64, CMatrix)> },
}

impl Channel {
    pub fn dephasing(basis: CMatrix) -> Result<Self> {
        check_orthonormal(&basis)?;
        Ok(Self::DephasingInBasis { basis })
    }

    /// Dephasing in the eigenbasis of a state (descending eigenvalue order).
    pub fn dephasing_in_eigenbasis(state: &DensityMatrix) -> Result<Self> {
        let (_, basis) = state.eigh()?;
        Ok(Self::DephasingInBasis { basis })
    }

    pub fn mixed_unitary(components: Vec<(f64, CMatrix)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::NotMixedUnitary);
        }
        let sum: f64 = components.iter().map(|(p, _)| p).sum();
        if (sum - 1.0).abs() > tol::PROB_SUM {
            return Err(Error::NotNormalized(sum));
        }
        let d = components[0].1.nrows();
        for (p, u) in &components {
            if *p < -tol::NEG_PROB {
                return Err(Error::NegativeProbability {
                    index: 0,
                    value: *p,
                });
            }
            if u.nrows() != d || u.ncols() != d {
                return Err(Error::DimensionMismatch(u.nrows(), d));
            }
            check_unitary(u)?;
        }
        Ok(Self::MixedUnitary { components })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::DephasingInBasis { basis } => basis.nrows(),
            Self::MixedUnitary { components } => components[0].1.nrows(),
        }
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), self.dim()));
        }
        match self {
            Self::DephasingInBasis { basis } => Ok(dephase_in_basis(rho, basis)),
            Self::MixedUnitary { components } => {
                let d = rho.dim();
                let mut out = CMatrix::zeros(d, d);
                for (p, u) in components {
                    out += (u * rho.matrix() * u.adjoint()).scale(*p);
                }
                Ok(DensityMatrix::from_matrix_unchecked(out))
            }
        }
    }

    /// Rewrite a dephasing channel as the uniform mixture of the d clock
    /// unitaries Z_k = B diag(omega^{k a}) B^dag, omega = e^{2 pi i / d}.
    /// The Fourier sum (1/d) sum_k omega^{k(a-b)} = delta_{ab} kills exactly
    /// the off-diagonal elements in the basis B.
    pub fn as_mixed_unitary(&self) -> Result<Self> {
        match self {
            Self::MixedUnitary { .. } => Ok(self.clone()),
            Self::DephasingInBasis { basis } => {
                let d = basis.nrows();
                let mut components = Vec::with_capacity(d);
                for k in 0..d {
                    let mut phase = CMatrix::zeros(d, d);
                    for a in 0..d {
                        let theta = TAU * (k as f64) * (a as f64) / d as f64;
                        phase[(a, a)] = C64::new(theta.cos(), theta.sin());
                    }
                    let z = basis * phase * basis.adjoint();
                    components.push((1.0 / d as f64, z));
                }
                Ok(Self::MixedUnitary { components })
            }
        }
    }
}

/// D[rho] = sum_i |i><i| rho |i><i| for the basis columns |i>.
fn dephase_in_basis(rho: &DensityMatrix, basis: &CMatrix) -> DensityMatrix {
    let in_basis = basis.adjoint() * rho.matrix() * basis;
    let d = rho.dim();
    let mut diag = CMatrix::zeros(d, d);
    for i in 0..d {
        diag[(i, i)] = C64::new(in_basis[(i, i)].re, 0.0);
    }
    DensityMatrix::from_matrix_unchecked(basis * diag * basis.adjoint())
}

/// Dephase a state in the eigenbasis of `reference`.
pub fn apply_dephasing(rho: &DensityMatrix, reference: &DensityMatrix) -> Result<DensityMatrix> {
    Channel::dephasing_in_eigenbasis(reference)?.apply(rho)
}

pub fn check_orthonormal(basis: &CMatrix) -> Result<()> {
    if basis.nrows() != basis.ncols() {
        return Err(Error::NotSquare(basis.nrows(), basis.ncols()));
    }
    let g = basis.adjoint() * basis;
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            let r = (g[(i, j)] - target).norm();
            if r > worst {
                worst = r;
            }
        }
    }
    if worst > tol::ORTHONORMAL {
        return Err(Error::NonOrthonormalBasis(worst));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statekit::density::identity;
    use crate::statekit::layout::c;
    use crate::statekit::prob::ProbabilityVector;

    #[test]
    fn diagonal_state_is_a_fixed_point() {
        let p = ProbabilityVector::new(vec![0.7, 0.3]).unwrap();
        let rho = DensityMatrix::from_probabilities(&p);
        let ch = Channel::dephasing(identity(2)).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!(out.trace_distance(&rho).unwrap() < 1e-14);
    }

    #[test]
    fn uniform_superposition_fully_decoheres() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityMatrix::pure(&[c(s, 0.0), c(s, 0.0)]).unwrap();
        let ch = Channel::dephasing(identity(2)).unwrap();
        let out = ch.apply(&plus).unwrap();
        assert!(out.trace_distance(&DensityMatrix::maximally_mixed(2)).unwrap() < 1e-12);
    }

    #[test]
    fn dephasing_is_idempotent() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..50 {
            let d = 3;
            let g = CMatrix::from_fn(d, d, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
            let h = &g * g.adjoint();
            let tr: f64 = (0..d).map(|i| h[(i, i)].re).sum();
            let rho = DensityMatrix::from_matrix_unchecked(h.scale(1.0 / tr));
            let ch = Channel::dephasing(identity(d)).unwrap();
            let once = ch.apply(&rho).unwrap();
            let twice = ch.apply(&once).unwrap();
            assert!(once.trace_distance(&twice).unwrap() < 1e-12);
        }
    }

    #[test]
    fn clock_mixture_reproduces_dephasing() {
        let s = 0.6f64.sqrt();
        let t = 0.4f64.sqrt();
        let rho = DensityMatrix::pure(&[c(s, 0.0), c(0.0, t), c(0.0, 0.0)]).unwrap();
        let ch = Channel::dephasing(identity(3)).unwrap();
        let out_direct = ch.apply(&rho).unwrap();
        let out_clock = ch.as_mixed_unitary().unwrap().apply(&rho).unwrap();
        assert!(out_direct.trace_distance(&out_clock).unwrap() < 1e-12);
    }

    #[test]
    fn mixed_unitary_validation() {
        let x = {
            let mut m = CMatrix::zeros(2, 2);
            m[(0, 1)] = c(1.0, 0.0);
            m[(1, 0)] = c(1.0, 0.0);
            m
        };
        assert!(Channel::mixed_unitary(vec![(0.5, identity(2)), (0.5, x.clone())]).is_ok());
        assert!(Channel::mixed_unitary(vec![(0.7, identity(2)), (0.5, x.clone())]).is_err());
        let not_unitary = x.scale(2.0);
        assert!(Channel::mixed_unitary(vec![(0.5, identity(2)), (0.5, not_unitary)]).is_err());
    }
}
