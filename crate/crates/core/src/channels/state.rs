use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::eig::{entropy_bits, hermitian_eig, min_eigenvalue};
use crate::numerics::matrix::{ComplexMatrix, HermitianMatrix, Keep, C64, ZERO};

/// Tolerance on positivity and unit trace of density operators.
pub const STATE_TOL: f64 = 1e-9;
/// Tolerance on the norm of state vectors.
pub const VECTOR_TOL: f64 = 1e-12;

/// Positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: HermitianMatrix,
}

impl DensityOperator {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, STATE_TOL)
    }

    pub fn with_tolerance(matrix: HermitianMatrix, tol: f64) -> Result<Self> {
        let tr = matrix.trace();
        if (tr - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let lmin = min_eigenvalue(&matrix);
        if lmin < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {lmin}")));
        }
        Ok(Self { matrix })
    }

    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::with_tolerance(m, STATE_TOL)?)
    }

    /// Skips validation; used for outputs of channels that were validated
    /// themselves.
    pub(crate) fn from_trusted(matrix: HermitianMatrix) -> Self {
        Self { matrix }
    }

    /// Normalizes a PSD matrix with positive trace.
    pub fn normalized(m: &HermitianMatrix) -> Result<Self> {
        let tr = m.trace();
        if !(tr > 0.0) {
            return Err(Error::InvalidState("trace must be positive".into()));
        }
        Self::new(m.scale(1.0 / tr))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: HermitianMatrix::identity(d).scale(1.0 / d as f64),
        }
    }

    pub fn basis(d: usize, i: usize) -> Self {
        PureStateVector::basis(d, i).to_density()
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diag(probs))
    }

    /// Haar-random pure state mixed with `I/d` (Hilbert-Schmidt style draw
    /// when `rank = d`).
    pub fn random<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Self {
        let g = ComplexMatrix::from_fn(d, rank.max(1), |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let m = HermitianMatrix::from_hermitian_part(&g.matmul(&g.adjoint()));
        let tr = m.trace();
        Self::from_trusted(m.scale(1.0 / tr))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> HermitianMatrix {
        self.matrix
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.matrix)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_trusted(self.matrix.kron(&other.matrix))
    }

    pub fn tensor_power(&self, l: usize) -> Self {
        let mut out = Self::from_trusted(HermitianMatrix::identity(1));
        for _ in 0..l {
            out = out.kron(self);
        }
        out
    }

    pub fn partial_trace(&self, dim_a: usize, dim_b: usize, keep: Keep) -> Result<Self> {
        Ok(Self::from_trusted(self.matrix.partial_trace(dim_a, dim_b, keep)?))
    }

    /// Convex combination; weights must form a distribution.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidDistribution("empty mixture".into()))?;
        let d = first.1.dim();
        let mut acc = HermitianMatrix::zeros(d);
        let mut total = 0.0;
        for (w, rho) in parts {
            if *w < 0.0 || rho.dim() != d {
                return Err(Error::InvalidDistribution("bad mixture component".into()));
            }
            acc = acc.add(&rho.matrix.scale(*w));
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        Self::new(acc)
    }

    /// Minimal eigen-decomposition purification `Σ √λ_k |v_k>|k>` on `H ⊗ H`.
    pub fn purification(&self) -> PureStateVector {
        let d = self.dim();
        let e = hermitian_eig(&self.matrix);
        let mut amps = vec![ZERO; d * d];
        for k in 0..d {
            let w = e.values[k].max(0.0).sqrt();
            for i in 0..d {
                amps[i * d + k] = e.vectors[(i, k)] * w;
            }
        }
        PureStateVector::normalize(amps).expect("purification of a unit-trace state")
    }

    /// Fidelity with a pure state, `<x|ρ|x>`.
    pub fn overlap(&self, x: &PureStateVector) -> f64 {
        let v = self.matrix.as_matrix().mat_vec(x.amplitudes());
        x.amplitudes()
            .iter()
            .zip(&v)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }
}

/// Unit-norm vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureStateVector {
    amps: Vec<C64>,
}

impl PureStateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !n.is_finite() || (n - 1.0).abs() > VECTOR_TOL {
            return Err(Error::InvalidState(format!("state vector norm {n}")));
        }
        Ok(Self { amps })
    }

    pub fn normalize(mut amps: Vec<C64>) -> Result<Self> {
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalize the zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= n);
        Ok(Self { amps })
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut amps = vec![ZERO; d];
        amps[i] = C64::new(1.0, 0.0);
        Self { amps }
    }

    /// `Σ_i |i>|i> / √d`.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut amps = vec![ZERO; d * d];
        let w = 1.0 / (d as f64).sqrt();
        for i in 0..d {
            amps[i * d + i] = C64::new(w, 0.0);
        }
        Self { amps }
    }

    /// Uniform (Haar) random unit vector.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        loop {
            let amps: Vec<C64> = (0..d)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            if let Ok(v) = Self::normalize(amps) {
                return v;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self { amps }
    }

    pub fn apply(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::normalize(u.mat_vec(&self.amps))
    }

    pub fn projector(&self) -> HermitianMatrix {
        HermitianMatrix::projector(&self.amps)
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator::from_trusted(self.projector())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn validation_rejects_bad_states() {
        assert!(DensityOperator::diagonal(&[0.5, 0.6]).is_err());
        assert!(DensityOperator::diagonal(&[1.5, -0.5]).is_err());
        assert!(DensityOperator::diagonal(&[0.25, 0.75]).is_ok());
        assert!(PureStateVector::new(vec![C64::new(1.0, 0.0), C64::new(0.1, 0.0)]).is_err());
    }

    #[test]
    fn purification_reduces_to_the_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = DensityOperator::random(3, 3, &mut rng);
        let psi = rho.purification();
        let back = psi.to_density().partial_trace(3, 3, Keep::A).unwrap();
        let diff = back.matrix().sub(rho.matrix());
        assert!(diff.as_matrix().frobenius_norm() < 1e-10);
    }

    #[test]
    fn maximally_entangled_marginal_is_maximally_mixed() {
        let phi = PureStateVector::maximally_entangled(4).to_density();
        let m = phi.partial_trace(4, 4, Keep::A).unwrap();
        let diff = m.matrix().sub(DensityOperator::maximally_mixed(4).matrix());
        assert!(diff.as_matrix().frobenius_norm() < 1e-12);
    }
}
