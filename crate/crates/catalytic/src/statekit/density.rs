//! Quantum states: dense complex density matrices.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::statekit::prob::{shannon_entropy, sort_descending, ProbabilityVector};
use crate::tol;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// A validated density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare(matrix.nrows(), matrix.ncols()));
        }
        if matrix.nrows() == 0 {
            return Err(Error::Invalid("empty density matrix".into()));
        }
        if matrix.nrows() > tol::QUANTUM_DIM_CAP {
            return Err(Error::DimensionCapExceeded {
                requested: matrix.nrows(),
                cap: tol::QUANTUM_DIM_CAP,
                context: " (density matrix)".into(),
            });
        }
        let herm = hermiticity_residual(&matrix);
        if herm > tol::HERMITIAN {
            return Err(Error::NotHermitian(herm));
        }
        let tr = trace_re(&matrix);
        if (tr - 1.0).abs() > tol::TRACE_ONE {
            return Err(Error::InvalidTrace(tr));
        }
        let state = Self { matrix };
        let min_eig = state.eigh()?.0.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -tol::PSD {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(state)
    }

    /// Diagonal density matrix from a probability vector.
    pub fn from_probabilities(p: &ProbabilityVector) -> Self {
        let d = p.dim();
        let mut m = CMatrix::zeros(d, d);
        for (i, &v) in p.entries().iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        Self { matrix: m }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = C64::new(1.0 / d as f64, 0.0);
        }
        Self { matrix: m }
    }

    /// Rank-1 projector |psi><psi| from an (unnormalized) state vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::Invalid("zero state vector".into()));
        }
        let d = psi.len();
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = psi[i] * psi[j].conj() / norm2;
            }
        }
        Ok(Self { matrix: m })
    }

    /// Trivial (dimension-1) state, the identity for `tensor`.
    pub fn trivial() -> Self {
        Self {
            matrix: CMatrix::identity(1, 1),
        }
    }

    /// Wrap a matrix produced by an internal exact operation without
    /// re-validating; used for intermediate states of verified pipelines.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Hermitian eigendecomposition, eigenvalues descending with stable
    /// tie-breaking, eigenvalues clamped to [0, 1].
    ///
    /// Returns (spectrum, eigenvector matrix with columns matching spectrum).
    pub fn eigh(&self) -> Result<(Vec<f64>, CMatrix)> {
        eigh_descending(&self.matrix)
    }

    /// Spectrum only, descending, clamped to [0, 1] and renormalized when
    /// clamping moved the total by more than the renorm tolerance.
    pub fn spectrum(&self) -> Result<ProbabilityVector> {
        let (vals, _) = self.eigh()?;
        Ok(ProbabilityVector::from_unnormalized(vals))
    }

    /// Von Neumann entropy in nats: Shannon entropy of the spectrum.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        Ok(shannon_entropy(self.spectrum()?.entries()))
    }

    /// Variance of surprisal tr[rho (-ln rho - H)^2] over nonzero eigenvalues.
    pub fn surprisal_variance(&self) -> Result<f64> {
        Ok(self.spectrum()?.surprisal_variance())
    }

    /// Trace distance (1/2)||a - b||_1 via the spectrum of the difference.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let diff = &self.matrix - other.matrix();
        let eig = nalgebra::linalg::SymmetricEigen::new(diff);
        Ok(0.5 * eig.eigenvalues.iter().map(|v| v.abs()).sum::<f64>())
    }

    /// Kronecker product, `self` slowest index.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.dim() * other.dim();
        if dim > tol::QUANTUM_DIM_CAP {
            return Err(Error::DimensionCapExceeded {
                requested: dim,
                cap: tol::QUANTUM_DIM_CAP,
                context: " (quantum tensor product)".into(),
            });
        }
        Ok(Self {
            matrix: self.matrix.kronecker(other.matrix()),
        })
    }

    /// n-fold tensor power; n = 0 yields the trivial state.
    pub fn power(&self, n: usize) -> Result<Self> {
        let mut out = Self::trivial();
        for _ in 0..n {
            out = out.tensor(self)?;
        }
        Ok(out)
    }

    /// Conjugation U rho U^dag.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(u.nrows(), self.dim()));
        }
        Ok(Self {
            matrix: u * &self.matrix * u.adjoint(),
        })
    }
}

/// Max entrywise |M - M^dag|.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let r = (m[(i, j)] - m[(j, i)].conj()).norm();
            if r > worst {
                worst = r;
            }
        }
    }
    worst
}

pub fn trace_re(m: &CMatrix) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

/// Max entrywise |U^dag U - I|.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let g = u.adjoint() * u;
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
    worst
}

pub fn check_unitary(u: &CMatrix) -> Result<()> {
    let r = unitarity_residual(u);
    if r > tol::UNITARY {
        return Err(Error::NotUnitary(r));
    }
    Ok(())
}

/// Hermitian eigendecomposition with descending eigenvalues, stable
/// tie-breaking by the solver's original ordering, values clamped to [0, 1]
/// when within the PSD tolerance of that range.
pub fn eigh_descending(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let eig = nalgebra::linalg::SymmetricEigen::new(m.clone());
    let raw: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    for (i, &v) in raw.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::EigenFailure(format!("non-finite eigenvalue at {i}")));
        }
    }
    let (sorted, order) = sort_descending(&raw);
    let clamped: Vec<f64> = sorted
        .iter()
        .map(|&v| {
            if v < 0.0 && v >= -tol::PSD {
                0.0
            } else if v > 1.0 && v <= 1.0 + tol::PSD {
                1.0
            } else {
                v
            }
        })
        .collect();
    let d = m.nrows();
    let mut vecs = CMatrix::zeros(d, d);
    for (rank, &src) in order.iter().enumerate() {
        vecs.set_column(rank, &eig.eigenvectors.column(src));
    }
    Ok((clamped, vecs))
}

/// Kronecker product of plain complex matrices (operators, not states).
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Identity operator of dimension d.
pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    pub fn random_unitary(d: usize, rng: &mut StdRng) -> CMatrix {
        // QR of a Ginibre matrix with phase fixing.
        let g = CMatrix::from_fn(d, d, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..d {
            let rjj = r[(j, j)];
            if rjj.norm() > 0.0 {
                let phase = rjj / rjj.norm();
                for i in 0..d {
                    q[(i, j)] *= phase.conj();
                }
            }
        }
        q
    }

    #[test]
    fn maximally_mixed_entropy_is_ln_d() {
        for d in [2usize, 3, 5, 8] {
            let rho = DensityMatrix::maximally_mixed(d);
            assert_abs_diff_eq!(
                rho.von_neumann_entropy().unwrap(),
                (d as f64).ln(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn pure_state_entropy_is_zero() {
        let psi = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.5, -0.5)];
        let rho = DensityMatrix::pure(&psi).unwrap();
        assert_abs_diff_eq!(rho.von_neumann_entropy().unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn entropy_is_unitarily_invariant() {
        let mut rng = StdRng::seed_from_u64(7);
        let p = ProbabilityVector::new(vec![0.5, 0.5, 0.0]).unwrap();
        let rho = DensityMatrix::from_probabilities(&p);
        let u = random_unitary(3, &mut rng);
        let rotated = rho.conjugate(&u).unwrap();
        assert_abs_diff_eq!(
            rotated.von_neumann_entropy().unwrap(),
            2.0f64.ln(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn trace_distance_orthogonal_pure_states() {
        let a = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let b = DensityMatrix::pure(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(a.trace_distance(&b).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.trace_distance(&a).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = C64::new(0.5, 0.0);
        m[(0, 1)] = C64::new(0.3, 0.0);
        m[(1, 1)] = C64::new(0.5, 0.0);
        // not Hermitian (0.3 vs 0)
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotHermitian(_))));

        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = C64::new(0.9, 0.0);
        m[(1, 1)] = C64::new(0.3, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidTrace(_))));

        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = C64::new(1.2, 0.0);
        m[(1, 1)] = C64::new(-0.2, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotPositive(_))));
    }

    #[test]
    fn eigh_orders_descending_with_clamping() {
        let p = ProbabilityVector::new(vec![0.1, 0.6, 0.3]).unwrap();
        let rho = DensityMatrix::from_probabilities(&p);
        let (vals, vecs) = rho.eigh().unwrap();
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        assert_abs_diff_eq!(vals[0], 0.6, epsilon = 1e-12);
        // residual ||rho v - lambda v||
        for (i, &v) in vals.iter().enumerate() {
            let col = vecs.column(i).clone_owned();
            let res = (rho.matrix() * &col - col.map(|z| z * C64::new(v, 0.0))).norm();
            assert!(res < 1e-9, "eigenpair residual {res}");
        }
    }
}
