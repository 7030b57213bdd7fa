//! Symmetrizability for message transmission: both tests are linear
//! feasibility problems over distributions on `S^l`.

use serde::Serialize;

use super::avqc::{Avqc, SymmetrizingMap, DEFAULT_SEQUENCE_BUDGET};
use crate::channels::DensityOperator;
use crate::error::{Error, Result};
use crate::numerics::feasibility::{FeasibilityResult, Verdict};
use crate::numerics::linalg::{hermitian_coords, hermitian_from_coords};
use crate::numerics::lp::{lp_feasibility, FarkasCertificate, SimplexSystem};
use crate::numerics::matrix::HermitianMatrix;

/// Default cap on LP variables `|S|^l · K`.
pub const DEFAULT_LP_BUDGET: usize = 4096;
/// Default equality tolerance of the LP tests.
pub const DEFAULT_LP_TOL: f64 = 1e-9;

/// `outputs[s][i] = N_{s^l}(ρ_i)` over the lexicographic enumeration of `S^l`.
fn sequence_outputs(avqc: &Avqc, states: &[DensityOperator], l: usize) -> Result<Vec<Vec<HermitianMatrix>>> {
    let din = avqc.dim_in().pow(l as u32);
    if let Some(bad) = states.iter().find(|r| r.dim() != din) {
        return Err(Error::Shape(format!(
            "state of dimension {} for block length {l} (expected {din})",
            bad.dim()
        )));
    }
    let seqs = super::avqc::all_sequences(avqc.len(), l, DEFAULT_SEQUENCE_BUDGET)?;
    seqs.iter()
        .map(|seq| {
            let ch = avqc.sequence_channel(seq)?;
            states
                .iter()
                .map(|r| Ok(ch.apply(r)?.into_matrix()))
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

fn check_budget(vars: usize, budget: usize) -> Result<()> {
    if vars > budget {
        return Err(Error::Budget {
            requested: vars,
            budget,
        });
    }
    Ok(())
}

pub type LSymmetrizability = FeasibilityResult<SymmetrizingMap, FarkasCertificate>;

/// Decides whether some map `ρ_i ↦ p_i ∈ P(S^l)` satisfies
/// `Σ p_i(s) N_s(ρ_j) = Σ p_j(s) N_s(ρ_i)` for all pairs of the given states.
///
/// The verdict concerns this state set only; symmetrizability quantifies over
/// every finite set.
pub fn is_l_symmetrizable(avqc: &Avqc, states: &[DensityOperator], l: usize, tol: f64) -> Result<LSymmetrizability> {
    let k = states.len();
    let nseq = avqc.len().checked_pow(l as u32).unwrap_or(usize::MAX);
    check_budget(nseq.saturating_mul(k), DEFAULT_LP_BUDGET)?;
    let outputs = sequence_outputs(avqc, states, l)?;
    let nv = nseq * k;
    let mut rows = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let mut block_rows: Vec<Vec<f64>> = Vec::new();
            for (s, outs) in outputs.iter().enumerate() {
                let cj = hermitian_coords(&outs[j]);
                let ci = hermitian_coords(&outs[i]);
                if block_rows.is_empty() {
                    block_rows = vec![vec![0.0; nv]; cj.len()];
                }
                for (r, row) in block_rows.iter_mut().enumerate() {
                    row[i * nseq + s] += cj[r];
                    row[j * nseq + s] -= ci[r];
                }
            }
            rows.extend(block_rows);
        }
    }
    let rhs = vec![0.0; rows.len()];
    let system = SimplexSystem {
        rows,
        rhs,
        blocks: vec![nseq; k],
    };
    let res = lp_feasibility(&system, tol)?;
    Ok(FeasibilityResult {
        residual: res.residual,
        iterations: res.iterations,
        verdict: match res.verdict {
            Verdict::Feasible(x) => {
                let rows = x.chunks(nseq).map(|c| c.to_vec()).collect();
                Verdict::Feasible(SymmetrizingMap { rows })
            }
            Verdict::Infeasible(c) => Verdict::Infeasible(c),
            Verdict::Undecided => Verdict::Undecided,
        },
    })
}

/// Re-evaluates the symmetrization equations for a witness; max Frobenius
/// violation over pairs.
pub fn l_symmetrization_residual(
    avqc: &Avqc,
    states: &[DensityOperator],
    l: usize,
    map: &SymmetrizingMap,
) -> Result<f64> {
    let outputs = sequence_outputs(avqc, states, l)?;
    let dout = outputs[0][0].dim();
    let mut worst: f64 = 0.0;
    for i in 0..states.len() {
        for j in (i + 1)..states.len() {
            let mut diff = HermitianMatrix::zeros(dout);
            for (s, outs) in outputs.iter().enumerate() {
                diff = diff
                    .add(&outs[j].scale(map.rows[i][s]))
                    .sub(&outs[i].scale(map.rows[j][s]));
            }
            worst = worst.max(diff.as_matrix().frobenius_norm());
        }
    }
    Ok(worst)
}

/// Outcome of the maximal-error hull test.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HullIntersection {
    /// Distributions with `Σ p1 N_s(ρ1) = Σ p2 N_s(ρ2)`.
    Intersects { p1: Vec<f64>, p2: Vec<f64>, residual: f64 },
    /// `tr(A N_s(ρ1)) ≤ −margin` and `tr(A N_s(ρ2)) ≥ margin` for every `s^l`.
    Separated {
        #[serde(skip)]
        a: HermitianMatrix,
        margin: f64,
    },
    Undecided,
}

impl HullIntersection {
    pub fn is_separated(&self) -> bool {
        matches!(self, Self::Separated { .. })
    }
}

/// Separating-operator check by exhaustive evaluation over `S^l`; returns the
/// smallest margin `min(−tr(A N(ρ1)), tr(A N(ρ2)))`.
pub fn separation_margin(avqc: &Avqc, rho1: &DensityOperator, rho2: &DensityOperator, l: usize, a: &HermitianMatrix) -> Result<f64> {
    let outs = sequence_outputs(avqc, &[rho1.clone(), rho2.clone()], l)?;
    Ok(outs
        .iter()
        .map(|o| (-a.inner(&o[0])).min(a.inner(&o[1])))
        .fold(f64::INFINITY, f64::min))
}

/// Decides whether the output hulls `conv{N_{s^l}(ρ1)}` and
/// `conv{N_{s^l}(ρ2)}` intersect, producing a separating self-adjoint
/// operator when they do not.
pub fn maxerror_hull_intersection(
    avqc: &Avqc,
    rho1: &DensityOperator,
    rho2: &DensityOperator,
    l: usize,
    tol: f64,
) -> Result<HullIntersection> {
    let nseq = avqc.len().checked_pow(l as u32).unwrap_or(usize::MAX);
    check_budget(nseq.saturating_mul(2), DEFAULT_LP_BUDGET)?;
    let outputs = sequence_outputs(avqc, &[rho1.clone(), rho2.clone()], l)?;
    let dout = outputs[0][0].dim();
    let ncoord = dout * dout;
    let mut rows = vec![vec![0.0; 2 * nseq]; ncoord];
    for (s, outs) in outputs.iter().enumerate() {
        let c1 = hermitian_coords(&outs[0]);
        let c2 = hermitian_coords(&outs[1]);
        for r in 0..ncoord {
            rows[r][s] = c1[r];
            rows[r][nseq + s] = -c2[r];
        }
    }
    let system = SimplexSystem {
        rhs: vec![0.0; ncoord],
        rows,
        blocks: vec![nseq, nseq],
    };
    let res = lp_feasibility(&system, tol)?;
    match res.verdict {
        Verdict::Feasible(x) => Ok(HullIntersection::Intersects {
            p1: x[..nseq].to_vec(),
            p2: x[nseq..].to_vec(),
            residual: res.residual,
        }),
        Verdict::Undecided => Ok(HullIntersection::Undecided),
        Verdict::Infeasible(cert) => {
            // y·coords(X) = tr(Y X): max_s tr(Y N(ρ1)) < min_s tr(Y N(ρ2))
            let y = hermitian_from_coords(dout, &cert.y);
            let alpha = outputs.iter().map(|o| y.inner(&o[0])).fold(f64::NEG_INFINITY, f64::max);
            let beta = outputs.iter().map(|o| y.inner(&o[1])).fold(f64::INFINITY, f64::min);
            if !(alpha < beta) {
                return Ok(HullIntersection::Undecided);
            }
            let half = 0.5 * (beta - alpha);
            let shift = HermitianMatrix::identity(dout).scale(0.5 * (alpha + beta));
            let a = y.sub(&shift).scale(1.0 / half);
            let margin = separation_margin(avqc, rho1, rho2, l, &a)?;
            if margin > tol {
                Ok(HullIntersection::Separated { a, margin })
            } else {
                Ok(HullIntersection::Undecided)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::QuantumChannel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn basis_pair(d: usize) -> Vec<DensityOperator> {
        vec![DensityOperator::basis(d, 0), DensityOperator::basis(d, 1)]
    }

    #[test]
    fn erasure_basis_pair_is_not_symmetrizable() {
        let avqc = Avqc::erasure(&[0.0, 0.2, 0.45], 2).unwrap();
        let res = is_l_symmetrizable(&avqc, &basis_pair(2), 1, DEFAULT_LP_TOL).unwrap();
        assert!(res.is_infeasible());
        let cert = res.certificate().unwrap();
        assert!(cert.y.iter().any(|v| v.abs() > 0.0));
    }

    #[test]
    fn constant_outputs_are_symmetrizable() {
        let sigma = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        let c = QuantumChannel::constant(&sigma, 2);
        let avqc = Avqc::new(vec![c.clone(), c]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let states: Vec<DensityOperator> = (0..3).map(|_| DensityOperator::random(2, 1, &mut rng)).collect();
        let res = is_l_symmetrizable(&avqc, &states, 1, DEFAULT_LP_TOL).unwrap();
        let map = res.witness().expect("feasible");
        assert!(l_symmetrization_residual(&avqc, &states, 1, map).unwrap() < 1e-9);
    }

    #[test]
    fn single_state_is_vacuous() {
        let avqc = Avqc::erasure(&[0.1], 2).unwrap();
        let res = is_l_symmetrizable(&avqc, &[DensityOperator::basis(2, 0).tensor_power(2)], 2, DEFAULT_LP_TOL).unwrap();
        assert!(res.is_feasible());
    }

    #[test]
    fn identical_states_intersect() {
        let avqc = Avqc::erasure(&[0.1, 0.3], 2).unwrap();
        let rho = DensityOperator::basis(2, 0);
        match maxerror_hull_intersection(&avqc, &rho, &rho, 1, DEFAULT_LP_TOL).unwrap() {
            HullIntersection::Intersects { residual, .. } => assert!(residual < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn erasure_hulls_are_separated_at_every_sequence() {
        let avqc = Avqc::erasure(&[0.1, 0.3], 2).unwrap();
        for l in 1..=2 {
            let rho1 = DensityOperator::basis(2, 0).tensor_power(l);
            let rho2 = DensityOperator::basis(2, 1).tensor_power(l);
            match maxerror_hull_intersection(&avqc, &rho1, &rho2, l, DEFAULT_LP_TOL).unwrap() {
                HullIntersection::Separated { a, margin } => {
                    assert!(margin > 1e-6);
                    // independent exhaustive sign check
                    for seq in avqc.sequences(l).unwrap() {
                        let ch = avqc.sequence_channel(&seq).unwrap();
                        let o1 = ch.apply(&rho1).unwrap();
                        let o2 = ch.apply(&rho2).unwrap();
                        assert!(a.inner(o1.matrix()) < -DEFAULT_LP_TOL);
                        assert!(a.inner(o2.matrix()) > DEFAULT_LP_TOL);
                    }
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn depolarizing_member_makes_hulls_intersect() {
        let dep = QuantumChannel::depolarizing(1.0, 2).unwrap();
        let avqc = Avqc::new(vec![QuantumChannel::identity(2), dep]).unwrap();
        let r = maxerror_hull_intersection(
            &avqc,
            &DensityOperator::basis(2, 0),
            &DensityOperator::basis(2, 1),
            1,
            DEFAULT_LP_TOL,
        )
        .unwrap();
        assert!(matches!(r, HullIntersection::Intersects { .. }));
    }
}
