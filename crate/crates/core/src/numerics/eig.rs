//! Cyclic Jacobi eigensolver for Hermitian matrices and the spectral
//! functions built on it.

use super::matrix::{ComplexMatrix, HermitianMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `M = V diag(values) V^†`, values sorted descending.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column_vec(k)
    }

    /// Rebuilds `V f(diag) V^†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = ZERO;
            for k in 0..n {
                if fv[k] != 0.0 {
                    acc += v[(i, k)] * v[(j, k)].conj() * fv[k];
                }
            }
            acc
        });
        HermitianMatrix::from_hermitian_part(&m)
    }
}

/// Hermitian eigen-decomposition by cyclic complex Jacobi rotations.
///
/// Rejects non-square input and matrices that are not Hermitian within
/// 1e-10 relative Frobenius defect.
pub fn hermitian_eig_checked(m: &ComplexMatrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.hermiticity_defect();
    if defect > 1e-10 * m.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(jacobi(&m.hermitian_part()))
}

pub fn hermitian_eig(h: &HermitianMatrix) -> Eigen {
    jacobi(h.as_matrix())
}

fn jacobi(m: &ComplexMatrix) -> Eigen {
    let n = m.rows();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n);
    if n == 0 {
        return Eigen {
            values: vec![],
            vectors: v,
        };
    }
    let scale = a.frobenius_norm();
    let eps = f64::EPSILON * scale.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= eps {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= eps * 1e-3 {
                    continue;
                }
                // Phase e^{-iφ} on column q makes the (p,q) entry real, then a
                // real Jacobi rotation annihilates it.
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let pc = phase.conj();
                // U restricted to (p,q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
                let u_pp = C64::new(c, 0.0);
                let u_pq = C64::new(s, 0.0);
                let u_qp = pc * (-s);
                let u_qq = pc * c;
                // A <- A U (columns p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                // A <- U^† A (rows p, q)
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Eigen { values, vectors }
}

pub fn eigenvalues(h: &HermitianMatrix) -> Vec<f64> {
    hermitian_eig(h).values
}

pub fn min_eigenvalue(h: &HermitianMatrix) -> f64 {
    eigenvalues(h).last().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(h: &HermitianMatrix) -> f64 {
    eigenvalues(h).first().copied().unwrap_or(0.0)
}

/// Nearest positive semidefinite matrix in Frobenius norm.
pub fn psd_project(h: &HermitianMatrix) -> HermitianMatrix {
    let e = hermitian_eig(h);
    if e.values.iter().all(|&x| x >= 0.0) {
        return h.clone();
    }
    e.map(|x| x.max(0.0))
}

pub fn trace_norm(h: &HermitianMatrix) -> f64 {
    eigenvalues(h).iter().map(|x| x.abs()).sum()
}

/// Largest singular value of a Hermitian matrix.
pub fn operator_norm(h: &HermitianMatrix) -> f64 {
    eigenvalues(h).iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Square root of a positive semidefinite matrix; negative eigenvalues are clipped.
pub fn psd_sqrt(h: &HermitianMatrix) -> HermitianMatrix {
    hermitian_eig(h).map(|x| x.max(0.0).sqrt())
}

/// Von Neumann entropy in bits; eigenvalues below 1e-12 contribute zero.
pub fn entropy_bits(h: &HermitianMatrix) -> f64 {
    eigenvalues(h)
        .iter()
        .filter(|&&x| x > 1e-12)
        .map(|&x| -x * x.log2())
        .sum()
}

/// Cholesky factor `L` with `H = L L^†`, or `None` if `H` is not positive definite.
pub fn cholesky(h: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = h.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = h[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let dj = d.sqrt();
        l[(j, j)] = C64::new(dj, 0.0);
        for i in (j + 1)..n {
            let mut s = h[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / dj;
        }
    }
    Some(l)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_triangular_inverse(l: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows();
    let mut inv = ComplexMatrix::zeros(n, n);
    for col in 0..n {
        for i in col..n {
            let mut s = if i == col { ONE } else { ZERO };
            for k in col..i {
                s -= l[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = s / l[(i, i)];
        }
    }
    inv
}

/// Inverse of a Hermitian positive definite matrix via Cholesky.
pub fn hpd_inverse(h: &ComplexMatrix) -> Option<ComplexMatrix> {
    let l = cholesky(h)?;
    let li = lower_triangular_inverse(&l);
    Some(li.adjoint().matmul(&li))
}

/// log det of a Hermitian positive definite matrix.
pub fn hpd_log_det(h: &ComplexMatrix) -> Option<f64> {
    let l = cholesky(h)?;
    Some((0..h.rows()).map(|i| 2.0 * l[(i, i)].re.ln()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        HermitianMatrix::from_hermitian_part(&g)
    }

    fn reconstruct(e: &Eigen) -> ComplexMatrix {
        let d = ComplexMatrix::from_real_diag(&e.values);
        e.vectors.matmul(&d).matmul(&e.vectors.adjoint())
    }

    #[test]
    fn identity_eigenvalues() {
        let e = hermitian_eig(&HermitianMatrix::identity(2));
        assert_eq!(e.values, vec![1.0, 1.0]);
    }

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let e = hermitian_eig(&HermitianMatrix::from_real_diag(&[-1.0, 3.0]));
        assert_eq!(e.values, vec![3.0, -1.0]);
    }

    #[test]
    fn random_reconstruction_dim6() {
        for seed in 0..5 {
            let h = random_hermitian(6, seed);
            let e = hermitian_eig(&h);
            let r = &reconstruct(&e) - h.as_matrix();
            assert!(r.frobenius_norm() < 1e-10, "residual {}", r.frobenius_norm());
            let gram = e.vectors.adjoint().matmul(&e.vectors);
            assert!((&gram - &ComplexMatrix::identity(6)).frobenius_norm() < 1e-10);
            let sum: f64 = e.values.iter().sum();
            assert!((sum - h.trace()).abs() < 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian_and_non_square() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(i as f64, 2.0 * j as f64));
        assert!(matches!(hermitian_eig_checked(&m), Err(Error::NotHermitian(_))));
        assert!(matches!(
            hermitian_eig_checked(&ComplexMatrix::zeros(2, 3)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn psd_project_clips() {
        let h = HermitianMatrix::from_real_diag(&[1.0, -1.0]);
        let p = psd_project(&h);
        assert!((p.as_matrix() - HermitianMatrix::from_real_diag(&[1.0, 0.0]).as_matrix())
            .frobenius_norm()
            < 1e-14);
        let psd = HermitianMatrix::from_real_diag(&[2.0, 0.5]);
        assert_eq!(psd_project(&psd), psd);
    }

    #[test]
    fn psd_project_beats_random_candidates() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let h = random_hermitian(4, 7);
        let p = psd_project(&h);
        let best = (h.as_matrix() - p.as_matrix()).frobenius_norm();
        for _ in 0..100 {
            let g = ComplexMatrix::from_fn(4, 4, |_, _| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            })
            .scale_real(0.1);
            // p + G G^† stays PSD
            let cand = p.as_matrix() + &g.matmul(&g.adjoint());
            let dist = (h.as_matrix() - &cand).frobenius_norm();
            assert!(dist >= best - 1e-12);
        }
    }

    #[test]
    fn psd_project_idempotent() {
        let h = random_hermitian(5, 3);
        let p1 = psd_project(&h);
        let p2 = psd_project(&p1);
        assert!((p1.as_matrix() - p2.as_matrix()).frobenius_norm() < 1e-12);
    }

    #[test]
    fn cholesky_and_inverse() {
        let g = random_hermitian(4, 11);
        let h = g.as_matrix() + &ComplexMatrix::identity(4).scale_real(3.0);
        let inv = hpd_inverse(&h).unwrap();
        let prod = h.matmul(&inv);
        assert!((&prod - &ComplexMatrix::identity(4)).frobenius_norm() < 1e-12);
        let ld = hpd_log_det(&h).unwrap();
        let from_eig: f64 = eigenvalues(&HermitianMatrix::from_hermitian_part(&h))
            .iter()
            .map(|x| x.ln())
            .sum();
        assert!((ld - from_eig).abs() < 1e-12);
        assert!(cholesky(HermitianMatrix::from_real_diag(&[1.0, -1.0]).as_matrix()).is_none());
    }

    #[test]
    fn entropy_of_maximally_mixed() {
        let h = HermitianMatrix::from_real_diag(&[0.25; 4]);
        assert!((entropy_bits(&h) - 2.0).abs() < 1e-14);
        let pure = HermitianMatrix::from_real_diag(&[1.0, 0.0]);
        assert_eq!(entropy_bits(&pure), 0.0);
    }
}
