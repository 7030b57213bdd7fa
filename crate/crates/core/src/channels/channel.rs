use rand::Rng;
use rand_distr::StandardNormal;

use super::state::DensityOperator;
use crate::error::{Error, Result};
use crate::numerics::eig::{hermitian_eig, min_eigenvalue};
use crate::numerics::matrix::{ComplexMatrix, HermitianMatrix, Keep, C64, ZERO};

/// Tolerance for trace preservation and Choi positivity.
pub const CPTP_TOL: f64 = 1e-9;
/// Default cap on `(d_in·d_out)^l` for tensor powers.
pub const DEFAULT_TENSOR_BUDGET: usize = 1 << 12;

/// Completely positive trace-preserving map in Kraus form, with its Choi
/// matrix cached.
///
/// Choi convention (input factor first):
/// `J = Σ_ij |i><j| ⊗ N(|i><j|)`, so `tr_out J = I_in`. Row index of `J` is
/// `i·d_out + a` for input basis `i` and output basis `a`.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
    choi: HermitianMatrix,
}

impl PartialEq for QuantumChannel {
    fn eq(&self, other: &Self) -> bool {
        self.dim_in == other.dim_in && self.dim_out == other.dim_out && self.choi == other.choi
    }
}

impl QuantumChannel {
    pub fn from_kraus(dim_in: usize, dim_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::from_kraus_with_tolerance(dim_in, dim_out, kraus, CPTP_TOL)
    }

    pub fn from_kraus_with_tolerance(
        dim_in: usize,
        dim_out: usize,
        kraus: Vec<ComplexMatrix>,
        tol: f64,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidChannel {
                reason: "empty Kraus list".into(),
                residual: 1.0,
            });
        }
        for k in &kraus {
            if k.rows() != dim_out || k.cols() != dim_in {
                return Err(Error::Shape(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.rows(),
                    k.cols(),
                    dim_out,
                    dim_in
                )));
            }
            if k.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        let ch = Self::from_kraus_unchecked(dim_in, dim_out, kraus);
        let residual = ch.tp_residual();
        if residual > tol {
            return Err(Error::InvalidChannel {
                reason: "Kraus operators do not sum to the identity".into(),
                residual,
            });
        }
        Ok(ch)
    }

    pub(crate) fn from_kraus_unchecked(dim_in: usize, dim_out: usize, kraus: Vec<ComplexMatrix>) -> Self {
        let choi = choi_from_kraus(dim_in, dim_out, &kraus);
        Self {
            dim_in,
            dim_out,
            kraus,
            choi,
        }
    }

    /// Rebuilds a canonical Kraus set from a Choi matrix.
    pub fn from_choi(dim_in: usize, dim_out: usize, choi: &HermitianMatrix) -> Result<Self> {
        Self::from_choi_with_tolerance(dim_in, dim_out, choi, CPTP_TOL)
    }

    pub fn from_choi_with_tolerance(
        dim_in: usize,
        dim_out: usize,
        choi: &HermitianMatrix,
        tol: f64,
    ) -> Result<Self> {
        if choi.dim() != dim_in * dim_out {
            return Err(Error::Shape(format!(
                "Choi matrix of dim {} for a {}→{} channel",
                choi.dim(),
                dim_in,
                dim_out
            )));
        }
        let lmin = min_eigenvalue(choi);
        if lmin < -tol {
            return Err(Error::InvalidChannel {
                reason: "Choi matrix is not positive semidefinite".into(),
                residual: -lmin,
            });
        }
        let kraus = kraus_from_choi(dim_in, dim_out, choi);
        let tr_out = choi.partial_trace(dim_in, dim_out, Keep::A)?;
        let residual = tr_out
            .sub(&HermitianMatrix::identity(dim_in))
            .as_matrix()
            .frobenius_norm();
        if residual > tol {
            return Err(Error::InvalidChannel {
                reason: "partial trace of the Choi matrix is not the identity".into(),
                residual,
            });
        }
        Ok(Self::from_kraus_unchecked(dim_in, dim_out, kraus))
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn choi(&self) -> &HermitianMatrix {
        &self.choi
    }

    /// Frobenius norm of `Σ K†K − I`.
    pub fn tp_residual(&self) -> f64 {
        let mut s = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            s = &s + &k.adjoint().matmul(k);
        }
        (&s - &ComplexMatrix::identity(self.dim_in)).frobenius_norm()
    }

    /// Frobenius distance between Choi matrices.
    pub fn choi_distance(&self, other: &Self) -> Result<f64> {
        self.check_same_dims(other)?;
        Ok(self.choi.sub(&other.choi).as_matrix().frobenius_norm())
    }

    pub(crate) fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(Error::Shape(format!(
                "{}→{} channel vs {}→{} channel",
                self.dim_in, self.dim_out, other.dim_in, other.dim_out
            )));
        }
        Ok(())
    }

    // ---- builtin families ----

    pub fn identity(d: usize) -> Self {
        Self::from_kraus_unchecked(d, d, vec![ComplexMatrix::identity(d)])
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        let d = u.rows();
        Self::from_kraus(d, d, vec![u])
    }

    /// `ρ ↦ VρV†` for an isometry `V` (columns orthonormal).
    pub fn isometry(v: &ComplexMatrix) -> Result<Self> {
        Self::from_kraus(v.cols(), v.rows(), vec![v.clone()])
    }

    /// Erasure channel `ρ ↦ (1−p)ρ ⊕ p·tr(ρ)|e><e|` into `C^{d+1}`, flag `e = d`.
    ///
    /// Kraus order: the `d` flag operators `√p|e><j|` first, then the
    /// embedding. With this order the complementary channel is `E_{1−p}`
    /// with the same labels. Zero operators are kept at `p ∈ {0, 1}` so the
    /// environment dimension is always `d + 1`.
    pub fn erasure(p: f64, d: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("erasure probability {p} outside [0,1]")));
        }
        if d == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        let sp = p.sqrt();
        let sq = (1.0 - p).sqrt();
        let mut kraus: Vec<ComplexMatrix> = (0..d)
            .map(|j| ComplexMatrix::unit(d + 1, d, d, j).scale_real(sp))
            .collect();
        kraus.push(ComplexMatrix::from_fn(d + 1, d, |a, i| {
            if a == i {
                C64::new(sq, 0.0)
            } else {
                ZERO
            }
        }));
        Ok(Self::from_kraus_unchecked(d, d + 1, kraus))
    }

    /// `ρ ↦ (1−λ)ρ + λ tr(ρ) I/d`, Kraus form over the Weyl operators.
    pub fn depolarizing(lambda: f64, d: usize) -> Result<Self> {
        let lmax = if d > 1 {
            1.0 + 1.0 / ((d * d) as f64 - 1.0)
        } else {
            1.0
        };
        if !(0.0..=lmax).contains(&lambda) || d == 0 {
            return Err(Error::Domain(format!("depolarizing parameter {lambda} out of range")));
        }
        let dd = (d * d) as f64;
        let mut kraus = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                let w = if a == 0 && b == 0 {
                    1.0 - lambda + lambda / dd
                } else {
                    lambda / dd
                };
                kraus.push(weyl(d, a, b).scale_real(w.max(0.0).sqrt()));
            }
        }
        Ok(Self::from_kraus_unchecked(d, d, kraus))
    }

    /// `ρ ↦ (1−p)ρ + p·diag(ρ)`.
    pub fn dephasing(p: f64, d: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || d == 0 {
            return Err(Error::Domain(format!("dephasing parameter {p} out of range")));
        }
        let mut kraus = vec![ComplexMatrix::identity(d).scale_real((1.0 - p).sqrt())];
        for i in 0..d {
            kraus.push(ComplexMatrix::unit(d, d, i, i).scale_real(p.sqrt()));
        }
        Ok(Self::from_kraus_unchecked(d, d, kraus))
    }

    /// Replacement channel `ρ ↦ tr(ρ)σ`.
    pub fn constant(sigma: &DensityOperator, dim_in: usize) -> Self {
        let e = hermitian_eig(sigma.matrix());
        let dout = sigma.dim();
        let mut kraus = Vec::new();
        for k in 0..dout {
            let w = e.values[k];
            if w <= 1e-15 {
                continue;
            }
            let v = e.vector(k);
            for j in 0..dim_in {
                kraus.push(ComplexMatrix::from_fn(dout, dim_in, |a, c| {
                    if c == j {
                        v[a] * w.sqrt()
                    } else {
                        ZERO
                    }
                }));
            }
        }
        Self::from_kraus_unchecked(dim_in, dout, kraus)
    }

    /// Random channel from a Haar-like isometry `C^{d_in} → C^{d_out}⊗C^{n}`.
    /// `n` is raised to `⌈d_in/d_out⌉` when smaller, since no isometry exists
    /// below that.
    pub fn random<R: Rng + ?Sized>(dim_in: usize, dim_out: usize, n_kraus: usize, rng: &mut R) -> Self {
        let n = n_kraus.max(dim_in.div_ceil(dim_out.max(1))).max(1);
        let g = ComplexMatrix::from_fn(n * dim_out, dim_in, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let gram = HermitianMatrix::from_hermitian_part(&g.adjoint().matmul(&g));
        let inv_sqrt = hermitian_eig(&gram).map(|x| if x > 1e-300 { 1.0 / x.sqrt() } else { 0.0 });
        let v = g.matmul(inv_sqrt.as_matrix());
        let kraus = (0..n).map(|k| v.block(k * dim_out, 0, dim_out, dim_in)).collect();
        Self::from_kraus_unchecked(dim_in, dim_out, kraus)
    }

    // ---- action and composition ----

    /// `Σ K X K†` for an arbitrary operator `X` on the input space.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim_in || x.cols() != self.dim_in {
            return Err(Error::Shape(format!(
                "{}x{} operator into a channel with input dimension {}",
                x.rows(),
                x.cols(),
                self.dim_in
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = &out + &k.sandwich(x);
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let out = self.apply_operator(rho.matrix().as_matrix())?;
        Ok(DensityOperator::from_trusted(HermitianMatrix::from_hermitian_part(&out)))
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &Self) -> Result<Self> {
        if after.dim_in != self.dim_out {
            return Err(Error::Shape(format!(
                "cannot compose a channel with output {} into input {}",
                self.dim_out, after.dim_in
            )));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * after.kraus.len());
        for b in &after.kraus {
            for a in &self.kraus {
                kraus.push(b.matmul(a));
            }
        }
        Ok(Self::from_kraus_unchecked(self.dim_in, after.dim_out, kraus).compressed())
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kron(b));
            }
        }
        Self::from_kraus_unchecked(self.dim_in * other.dim_in, self.dim_out * other.dim_out, kraus)
    }

    pub fn tensor_power(&self, l: usize) -> Result<Self> {
        self.tensor_power_with_budget(l, DEFAULT_TENSOR_BUDGET)
    }

    /// `N^{⊗l}`; rejects `(d_in·d_out)^l > budget`.
    pub fn tensor_power_with_budget(&self, l: usize, budget: usize) -> Result<Self> {
        let size = (self.dim_in * self.dim_out)
            .checked_pow(l as u32)
            .unwrap_or(usize::MAX);
        if size > budget {
            return Err(Error::Budget {
                requested: size,
                budget,
            });
        }
        let base = self.compressed();
        let mut out = Self::identity(1);
        for _ in 0..l {
            out = out.tensor(&base);
        }
        Ok(out)
    }

    /// Tensor product of a list of channels in order.
    pub fn tensor_all(channels: &[&Self]) -> Self {
        channels
            .iter()
            .fold(Self::identity(1), |acc, ch| acc.tensor(ch))
    }

    /// Kraus set from the Choi eigen-decomposition (minimal number of
    /// operators).
    pub fn canonical(&self) -> Self {
        let kraus = kraus_from_choi(self.dim_in, self.dim_out, &self.choi);
        Self {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            kraus,
            choi: self.choi.clone(),
        }
    }

    /// Canonical form only when it reduces the Kraus count.
    pub(crate) fn compressed(&self) -> Self {
        if self.kraus.len() <= 1 {
            return self.clone();
        }
        let c = self.canonical();
        if c.kraus.len() < self.kraus.len() {
            c
        } else {
            self.clone()
        }
    }

    /// Complementary channel for this Kraus representation: output on a
    /// `K`-dimensional environment with `N̂(ρ)_ij = tr(K_i ρ K_j†)`.
    pub fn complementary(&self) -> Self {
        let k = self.kraus.len();
        let kraus = (0..self.dim_out)
            .map(|o| ComplexMatrix::from_fn(k, self.dim_in, |i, x| self.kraus[i][(o, x)]))
            .collect();
        Self::from_kraus_unchecked(self.dim_in, k, kraus)
    }

    /// Convex combination `Σ q_s N_s`; Kraus list is the concatenation of the
    /// `√q_s`-scaled members.
    pub fn mix(channels: &[Self], q: &[f64]) -> Result<Self> {
        let refs: Vec<&Self> = channels.iter().collect();
        Self::mix_refs(&refs, q)
    }

    pub fn mix_refs(channels: &[&Self], q: &[f64]) -> Result<Self> {
        check_distribution(q, channels.len())?;
        let first = channels[0];
        for ch in channels {
            first.check_same_dims(ch)?;
        }
        let mut kraus = Vec::new();
        let mut choi = HermitianMatrix::zeros(first.dim_in * first.dim_out);
        for (ch, &w) in channels.iter().zip(q) {
            if w == 0.0 {
                continue;
            }
            let s = w.sqrt();
            kraus.extend(ch.kraus.iter().map(|k| k.scale_real(s)));
            choi = choi.add(&ch.choi.scale(w));
        }
        Ok(Self {
            dim_in: first.dim_in,
            dim_out: first.dim_out,
            kraus,
            choi,
        })
    }
}

/// Validates a probability vector of the given length.
pub fn check_distribution(q: &[f64], len: usize) -> Result<()> {
    if q.len() != len || len == 0 {
        return Err(Error::InvalidDistribution(format!(
            "expected {len} weights, got {}",
            q.len()
        )));
    }
    if q.iter().any(|w| !w.is_finite() || *w < -1e-12) {
        return Err(Error::InvalidDistribution("negative or non-finite weight".into()));
    }
    let s: f64 = q.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("weights sum to {s}")));
    }
    Ok(())
}

/// Generalized Pauli `X^a Z^b` on `C^d`.
pub fn weyl(d: usize, a: usize, b: usize) -> ComplexMatrix {
    let omega = 2.0 * std::f64::consts::PI / d as f64;
    ComplexMatrix::from_fn(d, d, |r, c| {
        if r == (c + a) % d {
            C64::from_polar(1.0, omega * (b * c) as f64)
        } else {
            ZERO
        }
    })
}

fn choi_from_kraus(dim_in: usize, dim_out: usize, kraus: &[ComplexMatrix]) -> HermitianMatrix {
    let n = dim_in * dim_out;
    let mut j = ComplexMatrix::zeros(n, n);
    let mut v = vec![ZERO; n];
    for k in kraus {
        for i in 0..dim_in {
            for a in 0..dim_out {
                v[i * dim_out + a] = k[(a, i)];
            }
        }
        for r in 0..n {
            if v[r] == ZERO {
                continue;
            }
            for c in 0..n {
                j[(r, c)] += v[r] * v[c].conj();
            }
        }
    }
    HermitianMatrix::from_hermitian_part(&j)
}

fn kraus_from_choi(dim_in: usize, dim_out: usize, choi: &HermitianMatrix) -> Vec<ComplexMatrix> {
    let e = hermitian_eig(choi);
    let cutoff = 1e-13 * e.values.first().copied().unwrap_or(0.0).abs().max(1.0);
    let mut out: Vec<ComplexMatrix> = e
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > cutoff)
        .map(|(k, &l)| {
            let s = l.sqrt();
            ComplexMatrix::from_fn(dim_out, dim_in, |o, i| e.vectors[(i * dim_out + o, k)] * s)
        })
        .collect();
    if out.is_empty() {
        out.push(ComplexMatrix::zeros(dim_out, dim_in));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn basis_states(d: usize) -> Vec<ComplexMatrix> {
        let mut v = Vec::new();
        for i in 0..d {
            for j in 0..d {
                v.push(ComplexMatrix::unit(d, d, i, j));
            }
        }
        v
    }

    #[test]
    fn choi_partial_trace_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = QuantumChannel::random(2, 3, 4, &mut rng);
        assert!(ch.tp_residual() < 1e-12);
        let t = ch.choi().partial_trace(2, 3, Keep::A).unwrap();
        assert!(t.sub(&HermitianMatrix::identity(2)).as_matrix().frobenius_norm() < 1e-12);
        assert!(min_eigenvalue(ch.choi()) > -1e-12);
    }

    #[test]
    fn kraus_choi_round_trip_preserves_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ch = QuantumChannel::random(3, 2, 5, &mut rng);
        let back = QuantumChannel::from_choi(3, 2, ch.choi()).unwrap();
        assert!(back.kraus().len() <= 6);
        for x in basis_states(3) {
            let a = ch.apply_operator(&x).unwrap();
            let b = back.apply_operator(&x).unwrap();
            assert!((&a - &b).frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn choi_block_is_channel_action() {
        let ch = QuantumChannel::erasure(0.3, 2).unwrap();
        let j = ch.choi().as_matrix();
        for x in 0..2 {
            for y in 0..2 {
                let out = ch.apply_operator(&ComplexMatrix::unit(2, 2, x, y)).unwrap();
                assert!((&j.block(x * 3, y * 3, 3, 3) - &out).frobenius_norm() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_non_trace_preserving_kraus() {
        let k = ComplexMatrix::identity(2).scale_real(1.0005);
        match QuantumChannel::from_kraus(2, 2, vec![k]) {
            Err(Error::InvalidChannel { residual, .. }) => assert!(residual > 1e-3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fully_depolarizing_has_constant_output() {
        let ch = QuantumChannel::depolarizing(1.0, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = DensityOperator::random(3, 2, &mut rng);
        let out = ch.apply(&rho).unwrap();
        let diff = out.matrix().sub(DensityOperator::maximally_mixed(3).matrix());
        assert!(diff.as_matrix().frobenius_norm() < 1e-12);
    }

    #[test]
    fn erasure_action_on_pure_state() {
        let p = 0.25;
        let ch = QuantumChannel::erasure(p, 2).unwrap();
        let x = super::super::state::PureStateVector::normalize(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)])
            .unwrap();
        let out = ch.apply(&x.to_density()).unwrap();
        let mut expect = ComplexMatrix::zeros(3, 3);
        let xx = x.projector();
        for i in 0..2 {
            for j in 0..2 {
                expect[(i, j)] = xx[(i, j)] * (1.0 - p);
            }
        }
        expect[(2, 2)] = C64::new(p, 0.0);
        assert!((out.matrix().as_matrix() - &expect).frobenius_norm() < 1e-14);
    }

    #[test]
    fn mix_of_erasures_is_erasure() {
        let a = QuantumChannel::erasure(0.1, 2).unwrap();
        let b = QuantumChannel::erasure(0.5, 2).unwrap();
        let m = QuantumChannel::mix(&[a, b], &[0.25, 0.75]).unwrap();
        let e = QuantumChannel::erasure(0.25 * 0.1 + 0.75 * 0.5, 2).unwrap();
        assert!(m.choi_distance(&e).unwrap() < 1e-14);
        assert!(m.tp_residual() < 1e-12);
    }

    #[test]
    fn mix_rejects_bad_weights() {
        let a = QuantumChannel::identity(2);
        assert!(QuantumChannel::mix(&[a.clone(), a.clone()], &[0.5, 0.6]).is_err());
        assert!(QuantumChannel::mix(std::slice::from_ref(&a), &[0.5, 0.5]).is_err());
    }

    #[test]
    fn erasure_complement_is_erasure_of_complementary_probability() {
        for p in [0.0, 0.2, 0.5, 0.8, 1.0] {
            let c = QuantumChannel::erasure(p, 2).unwrap().complementary();
            let e = QuantumChannel::erasure(1.0 - p, 2).unwrap();
            assert!(c.choi_distance(&e).unwrap() < 1e-12, "p = {p}");
        }
    }

    #[test]
    fn tensor_power_matches_componentwise_action() {
        let e = QuantumChannel::erasure(0.3, 2).unwrap();
        let e2 = e.tensor_power(2).unwrap();
        let pi = DensityOperator::maximally_mixed(2);
        let joint = e2.apply(&pi.kron(&pi)).unwrap();
        let single = e.apply(&pi).unwrap();
        let expect = single.kron(&single);
        assert!(joint.matrix().sub(expect.matrix()).as_matrix().frobenius_norm() < 1e-12);
        assert!(matches!(
            e.tensor_power_with_budget(5, 1000),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn weyl_operators_are_orthogonal_unitaries() {
        let d = 3;
        for a in 0..d {
            for b in 0..d {
                let w = weyl(d, a, b);
                let g = w.adjoint().matmul(&w);
                assert!((&g - &ComplexMatrix::identity(d)).frobenius_norm() < 1e-12);
                let tr = w.trace().norm();
                assert!(if a == 0 && b == 0 { (tr - 3.0).abs() < 1e-12 } else { tr < 1e-12 });
            }
        }
    }
}
