use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::numerics::eig::hermitian_eig;
use crate::numerics::matrix::{ComplexMatrix, HermitianMatrix, C64};

/// Relative eigenvalue cutoff on the Gram matrix when extracting a basis.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Complex subspace of `B(C^d)` with a Hilbert–Schmidt orthonormal basis.
#[derive(Clone, Debug)]
pub struct OperatorSubspace {
    dim: usize,
    basis: Vec<ComplexMatrix>,
}

impl OperatorSubspace {
    /// Orthonormal basis of `span(generators)` from the eigen-decomposition
    /// of the Gram matrix.
    pub fn span(dim: usize, generators: &[ComplexMatrix]) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.rows() != dim || g.cols() != dim) {
            return Err(Error::Shape(format!("{}x{} generator in B(C^{dim})", g.rows(), g.cols())));
        }
        let n = generators.len();
        if n == 0 {
            return Ok(Self { dim, basis: vec![] });
        }
        let gram = ComplexMatrix::from_fn(n, n, |i, j| generators[i].hs_inner(&generators[j]));
        let e = hermitian_eig(&HermitianMatrix::from_hermitian_part(&gram));
        let top = e.values[0].max(0.0);
        let mut basis = Vec::new();
        for k in 0..n {
            let lam = e.values[k];
            if lam <= RANK_CUTOFF * top.max(1.0) {
                break;
            }
            let mut b = ComplexMatrix::zeros(dim, dim);
            for (i, g) in generators.iter().enumerate() {
                b.axpy(e.vectors[(i, k)] / lam.sqrt(), g);
            }
            basis.push(b);
        }
        // one re-orthonormalization pass against round-off
        let mut clean: Vec<ComplexMatrix> = Vec::with_capacity(basis.len());
        for mut b in basis {
            for c in &clean {
                let overlap = c.hs_inner(&b);
                b.axpy(-overlap, c);
            }
            let nrm = b.frobenius_norm();
            if nrm > 1e-8 {
                clean.push(b.scale_real(1.0 / nrm));
            }
        }
        Ok(Self { dim, basis: clean })
    }

    /// All of `B(C^d)`.
    pub fn full(dim: usize) -> Self {
        let basis = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| ComplexMatrix::unit(dim, dim, i, j)))
            .collect();
        Self { dim, basis }
    }

    /// `span{I}`.
    pub fn scalars(dim: usize) -> Self {
        Self {
            dim,
            basis: vec![ComplexMatrix::identity(dim).scale_real(1.0 / (dim as f64).sqrt())],
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Complex dimension of the subspace.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.dim * self.dim
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for b in &self.basis {
            out.axpy(b.hs_inner(x), b);
        }
        out
    }

    /// Frobenius distance from `x` to the subspace.
    pub fn residual(&self, x: &ComplexMatrix) -> f64 {
        (x - &self.project(x)).frobenius_norm()
    }

    /// Largest residual of `other`'s basis, zero when `other ⊆ self`.
    pub fn containment_residual(&self, other: &Self) -> f64 {
        other.basis.iter().map(|b| self.residual(b)).fold(0.0, f64::max)
    }

    pub fn contains_identity(&self, tol: f64) -> bool {
        self.residual(&ComplexMatrix::identity(self.dim)) <= tol
    }

    pub fn is_adjoint_closed(&self, tol: f64) -> bool {
        self.basis.iter().all(|b| self.residual(&b.adjoint()) <= tol)
    }

    /// Basis of the Hermitian elements, orthonormal for the real inner
    /// product `Re tr(A†B)`. For an adjoint-closed subspace it has as many
    /// elements as the complex dimension.
    pub fn hermitian_basis(&self) -> Vec<HermitianMatrix> {
        let mut out: Vec<ComplexMatrix> = Vec::new();
        let half = C64::new(0.5, 0.0);
        let minus_half_i = C64::new(0.0, -0.5);
        for b in &self.basis {
            let bd = b.adjoint();
            let re = (b + &bd).scale(half);
            let im = (b - &bd).scale(minus_half_i);
            for mut h in [re, im] {
                for c in &out {
                    let overlap = c.hs_inner(&h).re;
                    h.axpy(C64::new(-overlap, 0.0), c);
                }
                let nrm = h.frobenius_norm();
                if nrm > 1e-8 {
                    out.push(h.scale_real(1.0 / nrm));
                }
            }
        }
        out.iter().map(HermitianMatrix::from_hermitian_part).collect()
    }
}

/// `S(N) = span{K_j† K_i}`.
pub fn confusability_space(n: &QuantumChannel) -> OperatorSubspace {
    let kraus = n.kraus();
    let mut gens = Vec::with_capacity(kraus.len() * kraus.len());
    for kj in kraus {
        let kjd = kj.adjoint();
        for ki in kraus {
            gens.push(kjd.matmul(ki));
        }
    }
    OperatorSubspace::span(n.dim_in(), &gens).expect("Kraus products are square on the input")
}

/// Outcome of the relative-interior test.
#[derive(Clone, Debug, serde::Serialize)]
pub struct InteriorCheck {
    pub zero_capacities: bool,
    pub confusability_dim: usize,
    pub explanation: String,
}

/// Sufficient test for vanishing zero-error capacities: a full confusability
/// space `S(N) = B(H)`.
pub fn interior_zero_capacity_check(n: &QuantumChannel) -> InteriorCheck {
    let s = confusability_space(n);
    let d = n.dim_in();
    let full = s.is_full();
    let explanation = if full {
        format!(
            "confusability space is all of B(C^{d}); every pair of inputs is confusable, \
             so the zero-error quantum, classical and entanglement-assisted capacities vanish"
        )
    } else {
        format!(
            "confusability space has dimension {} < {}; the sufficient test is inconclusive",
            s.dimension(),
            d * d
        )
    };
    InteriorCheck {
        zero_capacities: full,
        confusability_dim: s.dimension(),
        explanation,
    }
}
