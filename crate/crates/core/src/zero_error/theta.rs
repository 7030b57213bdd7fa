use serde::Serialize;

use super::subspace::OperatorSubspace;
use crate::error::{Error, Result};
use crate::numerics::linalg::hermitian_basis;
use crate::numerics::matrix::{HermitianMatrix, Keep};
use crate::numerics::sdp::{sdp_minimize, LmiBlock, LmiProblem};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ThetaTilde {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub converged: bool,
}

/// `θ̃(S) = min { ||tr_H Y|| : Y ∈ S ⊗ B(H'), Y ⪰ |Φ⟩⟨Φ| }` with the
/// unnormalized `Φ = Σ_i e_i ⊗ e_i'`.
///
/// `Y` is expanded in products of a Hermitian basis of `S` with a Hermitian
/// basis of `B(H')`. Always `1 ≤ θ̃ ≤ d²`; on solver failure the result
/// brackets that range.
pub fn lovasz_theta_tilde(s: &OperatorSubspace, tol: f64) -> Result<ThetaTilde> {
    let d = s.ambient_dim();
    if !s.contains_identity(1e-9) || !s.is_adjoint_closed(1e-9) {
        return Err(Error::Domain(
            "θ̃ needs an adjoint-closed operator subspace containing the identity".into(),
        ));
    }
    let sb = s.hermitian_basis();
    let hb = hermitian_basis(d);
    let mut phi = vec![crate::numerics::matrix::ZERO; d * d];
    for i in 0..d {
        phi[i * d + i] = crate::numerics::matrix::C64::new(1.0, 0.0);
    }
    let phi_proj = HermitianMatrix::projector(&phi);

    let mut norm_coeffs = vec![HermitianMatrix::identity(d)];
    let mut psd_coeffs = vec![HermitianMatrix::zeros(d * d)];
    let mut x0 = vec![0.0];
    for a in &sb {
        for h in &hb {
            let y = a.kron(h);
            norm_coeffs.push(y.partial_trace(d, d, Keep::B)?.scale(-1.0));
            // start point (d+1)·I⊗I expressed in this orthonormal basis
            x0.push((d as f64 + 1.0) * a.trace() * h.trace());
            psd_coeffs.push(y);
        }
    }
    x0[0] = (d * (d + 1)) as f64 + 1.0;
    let nv = x0.len();
    let mut objective = vec![0.0; nv];
    objective[0] = 1.0;
    let problem = LmiProblem {
        num_vars: nv,
        objective,
        blocks: vec![
            LmiBlock {
                constant: HermitianMatrix::zeros(d),
                coeffs: norm_coeffs,
            },
            LmiBlock {
                constant: phi_proj.scale(-1.0),
                coeffs: psd_coeffs,
            },
        ],
        eq_rows: vec![],
        eq_rhs: vec![],
    };
    let ceiling = (d * d) as f64;
    match sdp_minimize(&problem, tol / 4.0, Some(&x0)) {
        Ok(sol) => {
            let upper = sol.value.min(ceiling);
            let lower = sol.lower_bound.max(1.0).min(upper);
            Ok(ThetaTilde {
                value: upper,
                lower,
                upper,
                converged: upper - lower <= tol,
            })
        }
        Err(Error::Solver(_)) => Ok(ThetaTilde {
            value: 0.5 * (1.0 + ceiling),
            lower: 1.0,
            upper: ceiling,
            converged: false,
        }),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::QuantumChannel;
    use crate::numerics::matrix::{ComplexMatrix, C64};
    use crate::zero_error::confusability_space;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m2(a: [[f64; 2]; 2]) -> ComplexMatrix {
        ComplexMatrix::from_fn(2, 2, |i, j| C64::new(a[i][j], 0.0))
    }

    // Reference values from an independent conic solver run at 1e-9.
    #[test]
    fn matches_reference_values() {
        let id = ComplexMatrix::identity(2);
        let z = m2([[1.0, 0.0], [0.0, -1.0]]);
        let x = m2([[0.0, 1.0], [1.0, 0.0]]);
        let cases = [
            (OperatorSubspace::scalars(2), 4.0),
            (OperatorSubspace::span(2, &[id.clone(), z.clone()]).unwrap(), 2.0),
            (OperatorSubspace::span(2, &[id, z, x]).unwrap(), 2.0),
            (OperatorSubspace::full(2), 1.0),
            (OperatorSubspace::scalars(3), 9.0),
        ];
        for (s, want) in cases {
            let t = lovasz_theta_tilde(&s, 1e-7).unwrap();
            assert!((t.value - want).abs() < 1e-6, "dim {} → {t:?}, want {want}", s.dimension());
            assert!(t.lower >= 1.0);
        }
    }

    #[test]
    fn full_space_of_noisy_channels_gives_one() {
        for lam in [0.01, 0.1, 0.5] {
            let s = confusability_space(&QuantumChannel::depolarizing(lam, 2).unwrap());
            let t = lovasz_theta_tilde(&s, 1e-7).unwrap();
            assert!((t.value - 1.0).abs() < 1e-6, "λ = {lam}: {t:?}");
        }
        let t0 = lovasz_theta_tilde(&confusability_space(&QuantumChannel::identity(2)), 1e-7).unwrap();
        assert!(t0.value > 1.0 + 1e-3);
    }

    #[test]
    fn nested_subspaces_are_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut rand_m = || ComplexMatrix::from_fn(2, 2, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        for _ in 0..2 {
            let a = rand_m();
            let b = rand_m();
            let small = OperatorSubspace::span(2, &[ComplexMatrix::identity(2), a.clone(), a.adjoint()]).unwrap();
            let big = OperatorSubspace::span(2, &[ComplexMatrix::identity(2), a.clone(), a.adjoint(), b.clone(), b.adjoint()])
                .unwrap();
            let ts = lovasz_theta_tilde(&small, 1e-7).unwrap();
            let tb = lovasz_theta_tilde(&big, 1e-7).unwrap();
            assert!(ts.value >= tb.value - 1e-6, "{ts:?} {tb:?}");
        }
    }

    #[test]
    fn rejects_subspaces_without_identity() {
        let z = m2([[1.0, 0.0], [0.0, -1.0]]);
        let s = OperatorSubspace::span(2, &[z]).unwrap();
        assert!(lovasz_theta_tilde(&s, 1e-7).is_err());
    }
}
