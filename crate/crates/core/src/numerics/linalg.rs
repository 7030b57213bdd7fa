//! Real-coordinate helpers: Hermitian bases, dense real solves and the
//! orthogonal projector onto an affine subspace.

use super::matrix::{ComplexMatrix, HermitianMatrix, C64};

/// Orthonormal (Hilbert-Schmidt) real basis of the n x n Hermitian matrices.
///
/// Ordering: diagonal units first, then for each i < j the symmetric and the
/// antisymmetric off-diagonal element.
pub fn hermitian_basis(n: usize) -> Vec<HermitianMatrix> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(HermitianMatrix::from_hermitian_part(&ComplexMatrix::unit(
            n, n, i, i,
        )));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut s = ComplexMatrix::zeros(n, n);
            s[(i, j)] = C64::new(r, 0.0);
            s[(j, i)] = C64::new(r, 0.0);
            out.push(HermitianMatrix::from_hermitian_part(&s));
            let mut a = ComplexMatrix::zeros(n, n);
            a[(i, j)] = C64::new(0.0, r);
            a[(j, i)] = C64::new(0.0, -r);
            out.push(HermitianMatrix::from_hermitian_part(&a));
        }
    }
    out
}

/// Generalized Gell-Mann matrices plus the identity, in that fixed order:
/// identity, symmetric `E_jk + E_kj`, antisymmetric `−i(E_jk − E_kj)`, then
/// the traceless diagonal elements. Not normalized.
pub fn gell_mann_basis(n: usize) -> Vec<HermitianMatrix> {
    let mut out = vec![HermitianMatrix::identity(n)];
    for j in 0..n {
        for k in (j + 1)..n {
            let mut s = ComplexMatrix::zeros(n, n);
            s[(j, k)] = C64::new(1.0, 0.0);
            s[(k, j)] = C64::new(1.0, 0.0);
            out.push(HermitianMatrix::from_hermitian_part(&s));
            let mut a = ComplexMatrix::zeros(n, n);
            a[(j, k)] = C64::new(0.0, -1.0);
            a[(k, j)] = C64::new(0.0, 1.0);
            out.push(HermitianMatrix::from_hermitian_part(&a));
        }
    }
    for l in 1..n {
        let w = (2.0 / (l * (l + 1)) as f64).sqrt();
        let diag: Vec<f64> = (0..n)
            .map(|i| match i.cmp(&l) {
                std::cmp::Ordering::Less => w,
                std::cmp::Ordering::Equal => -(l as f64) * w,
                std::cmp::Ordering::Greater => 0.0,
            })
            .collect();
        out.push(HermitianMatrix::from_real_diag(&diag));
    }
    out
}

/// Coordinates of a Hermitian matrix in [`hermitian_basis`].
pub fn hermitian_coords(h: &HermitianMatrix) -> Vec<f64> {
    let n = h.dim();
    let s2 = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(h[(i, i)].re);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(s2 * h[(i, j)].re);
            out.push(s2 * h[(i, j)].im);
        }
    }
    out
}

/// Inverse of [`hermitian_coords`].
pub fn hermitian_from_coords(n: usize, x: &[f64]) -> HermitianMatrix {
    assert_eq!(x.len(), n * n);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(x[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = C64::new(r * x[k], r * x[k + 1]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    HermitianMatrix::from_hermitian_part(&m)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = b` for square `A` (row-major) by Gaussian elimination with
/// partial pivoting. Returns `None` when a pivot falls below `1e-300`.
pub fn solve_dense(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let (piv, pmax) = (col..n)
            .map(|r| (r, m[r * n + col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        if !(pmax > 1e-300) {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            x.swap(col, piv);
        }
        let d = m[col * n + col];
        for r in (col + 1)..n {
            let f = m[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[r * n + k] -= f * m[col * n + k];
            }
            x[r] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for k in (col + 1)..n {
            s -= m[col * n + k] * x[k];
        }
        x[col] = s / m[col * n + col];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Cholesky solve for a symmetric positive definite system; `None` if not SPD.
pub fn solve_spd(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let dj = d.sqrt();
        l[j * n + j] = dj;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / dj;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    Some(y)
}

/// Outcome of orthonormalizing the rows of `A x = b`.
#[derive(Clone, Debug)]
pub enum AffineSet {
    Consistent(AffineProjector),
    /// `y` satisfies `||A^T y|| ≈ 0` while `y^T b = gap ≠ 0`.
    Inconsistent { y: Vec<f64>, gap: f64 },
}

/// Orthogonal projector onto `{x : A x = b}` held as orthonormal rows `Q`
/// with transformed right-hand side `c` (`Q x = c` describes the same set).
#[derive(Clone, Debug)]
pub struct AffineProjector {
    dim: usize,
    q: Vec<Vec<f64>>,
    c: Vec<f64>,
}

impl AffineProjector {
    /// Modified Gram-Schmidt with one reorthogonalization pass. Rows whose
    /// residual norm drops below `rank_tol` times their original norm are
    /// treated as dependent; their transformed right-hand side must vanish
    /// within `consistency_tol`.
    pub fn build(
        dim: usize,
        rows: &[Vec<f64>],
        rhs: &[f64],
        rank_tol: f64,
        consistency_tol: f64,
    ) -> AffineSet {
        assert_eq!(rows.len(), rhs.len());
        let m = rows.len();
        let mut q: Vec<Vec<f64>> = Vec::new();
        let mut c: Vec<f64> = Vec::new();
        // combination coefficients of each q_k in terms of the original rows
        let mut comb: Vec<Vec<f64>> = Vec::new();
        let mut worst: Option<(Vec<f64>, f64)> = None;
        for (j, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim);
            let original = norm(row);
            let mut r = row.clone();
            let mut coef = vec![0.0; m];
            coef[j] = 1.0;
            let mut br = rhs[j];
            for _ in 0..2 {
                for k in 0..q.len() {
                    let a = dot(&q[k], &r);
                    if a == 0.0 {
                        continue;
                    }
                    for (ri, qi) in r.iter_mut().zip(&q[k]) {
                        *ri -= a * qi;
                    }
                    for (ci, ki) in coef.iter_mut().zip(&comb[k]) {
                        *ci -= a * ki;
                    }
                    br -= a * c[k];
                }
            }
            let rn = norm(&r);
            if rn <= rank_tol * original.max(1e-300) || original == 0.0 {
                if br.abs() > consistency_tol && worst.as_ref().is_none_or(|w| br.abs() > w.1.abs()) {
                    worst = Some((coef, br));
                }
                continue;
            }
            q.push(r.iter().map(|v| v / rn).collect());
            comb.push(coef.iter().map(|v| v / rn).collect());
            c.push(br / rn);
        }
        if let Some((y, gap)) = worst {
            return AffineSet::Inconsistent { y, gap };
        }
        AffineSet::Consistent(AffineProjector { dim, q, c })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.q.len()
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        for (qk, ck) in self.q.iter().zip(&self.c) {
            let a = dot(qk, x) - ck;
            for (o, qi) in out.iter_mut().zip(qk) {
                *o -= a * qi;
            }
        }
        out
    }

    /// Orthonormal basis of the direction space `{x : A x = 0}`.
    pub fn null_space(&self) -> Vec<Vec<f64>> {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for i in 0..self.dim {
            let mut v = vec![0.0; self.dim];
            v[i] = 1.0;
            for _ in 0..2 {
                for b in self.q.iter().chain(basis.iter()) {
                    let a = dot(b, &v);
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= a * bi;
                    }
                }
            }
            let n = norm(&v);
            if n > 1e-8 {
                basis.push(v.iter().map(|x| x / n).collect());
            }
            if basis.len() + self.q.len() == self.dim {
                break;
            }
        }
        basis
    }
}
