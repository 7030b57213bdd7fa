use itertools::Itertools;

use crate::channels::{check_distribution, QuantumChannel};
use crate::error::{Error, Result};
use crate::numerics::eig::min_eigenvalue;
use crate::numerics::matrix::HermitianMatrix;

/// Default cap on the number of adversary sequences `|S|^l` enumerated.
pub const DEFAULT_SEQUENCE_BUDGET: usize = 1 << 16;

/// Finite family of channels with common input and output dimensions.
#[derive(Clone, Debug)]
pub struct Avqc {
    labels: Vec<String>,
    channels: Vec<QuantumChannel>,
}

impl Avqc {
    pub fn new(channels: Vec<QuantumChannel>) -> Result<Self> {
        let labels = (0..channels.len()).map(|s| format!("s{s}")).collect();
        Self::with_labels(channels, labels)
    }

    pub fn with_labels(channels: Vec<QuantumChannel>, labels: Vec<String>) -> Result<Self> {
        let first = channels
            .first()
            .ok_or_else(|| Error::Domain("an AVQC needs at least one channel".into()))?;
        if labels.len() != channels.len() {
            return Err(Error::Domain("one label per channel required".into()));
        }
        for (s, ch) in channels.iter().enumerate() {
            if ch.dim_in() != first.dim_in() || ch.dim_out() != first.dim_out() {
                return Err(Error::Shape(format!(
                    "member {s} is {}→{}, member 0 is {}→{}",
                    ch.dim_in(),
                    ch.dim_out(),
                    first.dim_in(),
                    first.dim_out()
                )));
            }
        }
        Ok(Self { labels, channels })
    }

    /// Erasure family `{E_{p_s}}` on `C^d`.
    pub fn erasure(ps: &[f64], d: usize) -> Result<Self> {
        let channels = ps
            .iter()
            .map(|&p| QuantumChannel::erasure(p, d))
            .collect::<Result<Vec<_>>>()?;
        let labels = ps.iter().map(|p| format!("erasure({p})")).collect();
        Self::with_labels(channels, labels)
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn dim_in(&self) -> usize {
        self.channels[0].dim_in()
    }

    pub fn dim_out(&self) -> usize {
        self.channels[0].dim_out()
    }

    pub fn channels(&self) -> &[QuantumChannel] {
        &self.channels
    }

    pub fn channel(&self, s: usize) -> &QuantumChannel {
        &self.channels[s]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `N_q = Σ q(s) N_s`.
    pub fn mixture(&self, q: &[f64]) -> Result<QuantumChannel> {
        QuantumChannel::mix(&self.channels, q)
    }

    /// `N_{s_1} ⊗ … ⊗ N_{s_l}`.
    pub fn sequence_channel(&self, seq: &[usize]) -> Result<QuantumChannel> {
        if let Some(&bad) = seq.iter().find(|&&s| s >= self.len()) {
            return Err(Error::Domain(format!("sequence symbol {bad} outside the index set")));
        }
        let refs: Vec<&QuantumChannel> = seq.iter().map(|&s| &self.channels[s]).collect();
        Ok(QuantumChannel::tensor_all(&refs))
    }

    /// All of `S^l` in lexicographic order (first symbol most significant).
    pub fn sequences(&self, l: usize) -> Result<Vec<Vec<usize>>> {
        all_sequences(self.len(), l, DEFAULT_SEQUENCE_BUDGET)
    }
}

/// Lexicographic enumeration of `{0..n}^l`, rejecting `n^l > budget`.
pub fn all_sequences(n: usize, l: usize, budget: usize) -> Result<Vec<Vec<usize>>> {
    let count = n.checked_pow(l as u32).unwrap_or(usize::MAX);
    if count > budget {
        return Err(Error::Budget {
            requested: count,
            budget,
        });
    }
    if l == 0 {
        return Ok(vec![Vec::new()]);
    }
    Ok(std::iter::repeat_n(0..n, l).multi_cartesian_product().collect())
}

/// Index of a sequence in the lexicographic order of [`all_sequences`].
pub fn sequence_index(seq: &[usize], n: usize) -> usize {
    seq.iter().fold(0, |acc, &s| acc * n + s)
}

/// Positive operators summing to the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    dim: usize,
    elements: Vec<HermitianMatrix>,
}

/// Tolerance for POVM validity.
pub const POVM_TOL: f64 = 1e-9;

impl Povm {
    pub fn new(elements: Vec<HermitianMatrix>) -> Result<Self> {
        Self::with_tolerance(elements, POVM_TOL)
    }

    pub fn with_tolerance(elements: Vec<HermitianMatrix>, tol: f64) -> Result<Self> {
        let dim = elements
            .first()
            .ok_or_else(|| Error::Domain("empty POVM".into()))?
            .dim();
        let mut sum = HermitianMatrix::zeros(dim);
        for (k, e) in elements.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::Shape(format!("POVM element {k} has dimension {}", e.dim())));
            }
            let lmin = min_eigenvalue(e);
            if lmin < -tol {
                return Err(Error::Domain(format!(
                    "POVM element {k} has negative eigenvalue {lmin:.3e}"
                )));
            }
            sum = sum.add(e);
        }
        let defect = sum
            .sub(&HermitianMatrix::identity(dim))
            .as_matrix()
            .frobenius_norm();
        if defect > tol {
            return Err(Error::Domain(format!("POVM elements sum to identity only within {defect:.3e}")));
        }
        Ok(Self { dim, elements })
    }

    /// Projective measurement in the computational basis.
    pub fn computational(d: usize) -> Self {
        let elements = (0..d)
            .map(|i| {
                let mut diag = vec![0.0; d];
                diag[i] = 1.0;
                HermitianMatrix::from_real_diag(&diag)
            })
            .collect();
        Self { dim: d, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    /// Outcome probabilities `tr(E_k ρ)`.
    pub fn probabilities(&self, rho: &HermitianMatrix) -> Vec<f64> {
        self.elements.iter().map(|e| e.inner(rho)).collect()
    }

    /// `E_a ⊗ F_b` in lexicographic order.
    pub fn kron(&self, other: &Self) -> Self {
        let mut elements = Vec::with_capacity(self.len() * other.len());
        for a in &self.elements {
            for b in &other.elements {
                elements.push(a.kron(b));
            }
        }
        Self {
            dim: self.dim * other.dim,
            elements,
        }
    }
}

/// For each input state, a distribution over `S^l`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SymmetrizingMap {
    pub rows: Vec<Vec<f64>>,
}

impl SymmetrizingMap {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        for r in &rows {
            check_distribution(r, r.len())?;
        }
        Ok(Self { rows })
    }
}
