use super::channel::QuantumChannel;
use crate::error::Result;
use crate::numerics::feasibility::{FeasibilityResult, Verdict};
use crate::numerics::matrix::{ComplexMatrix, HermitianMatrix, C64};
use crate::numerics::sdp::{sdp_feasibility, ConeSystem, SdpSettings, SeparatingDirection};

/// Tolerance used when turning a solver witness into a channel.
const WITNESS_TOL: f64 = 1e-6;

pub type DegradabilityResult = FeasibilityResult<QuantumChannel, SeparatingDirection>;

/// Output of `D` on `X`, given the input-first Choi matrix of `D`:
/// `D(X) = Σ_ab X_ab · J_D[a-block, b-block]`.
pub fn apply_via_choi(choi: &ComplexMatrix, din: usize, dout: usize, x: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dout, dout);
    for a in 0..din {
        for b in 0..din {
            let w = x[(a, b)];
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..dout {
                for j in 0..dout {
                    out[(i, j)] += w * choi[(a * dout + i, b * dout + j)];
                }
            }
        }
    }
    out
}

/// Frobenius distance between the Choi matrices of `D∘N` and `N̂`.
pub fn degrading_residual(n: &QuantumChannel, d: &QuantumChannel) -> Result<f64> {
    let composed = n.then(d)?;
    composed.choi_distance(&n.complementary())
}

/// Searches for a CPTP `D` with `D∘N = N̂` by SDP feasibility over the Choi
/// matrix of `D`. `N̂` is taken with respect to the Kraus list stored in `N`
/// (compressed to the minimal count when that is smaller).
pub fn is_degradable(n: &QuantumChannel, settings: &SdpSettings) -> Result<DegradabilityResult> {
    let n = n.compressed();
    let comp = n.complementary();
    find_post_processing(&n, &comp, settings)
}

/// Searches for a CPTP `D` with `D∘N = T`. The residual of a Feasible verdict
/// is the recomputed Choi distance between `D∘N` and `T`.
pub fn find_post_processing(
    n: &QuantumChannel,
    target: &QuantumChannel,
    settings: &SdpSettings,
) -> Result<DegradabilityResult> {
    if target.dim_in() != n.dim_in() {
        return Err(crate::error::Error::Shape(format!(
            "target acts on dimension {}, channel on {}",
            target.dim_in(),
            n.dim_in()
        )));
    }
    let din = n.dim_in();
    let dmid = n.dim_out();
    let denv = target.dim_out();

    let mut rhs: Vec<C64> = ComplexMatrix::identity(dmid).into_data();
    let mut images = Vec::with_capacity(din * din);
    for i in 0..din {
        for j in 0..din {
            let e = ComplexMatrix::unit(din, din, i, j);
            images.push(n.apply_operator(&e)?);
            rhs.extend(target.apply_operator(&e)?.into_data());
        }
    }
    let system = ConeSystem::from_linear_map(
        vec![dmid * denv],
        |blocks: &[HermitianMatrix]| {
            let j = blocks[0].as_matrix();
            let mut out = j
                .partial_trace(dmid, denv, crate::numerics::matrix::Keep::A)
                .expect("block shape")
                .into_data();
            for img in &images {
                out.extend(apply_via_choi(j, dmid, denv, img).into_data());
            }
            out
        },
        &rhs,
    );
    let res = sdp_feasibility(&system, settings)?;
    let iterations = res.iterations;
    Ok(match res.verdict {
        Verdict::Feasible(blocks) => {
            match QuantumChannel::from_choi_with_tolerance(dmid, denv, &blocks[0], WITNESS_TOL) {
                Ok(d) => {
                    let residual = n.then(&d)?.choi_distance(target)?;
                    FeasibilityResult {
                        verdict: Verdict::Feasible(d),
                        residual,
                        iterations,
                    }
                }
                Err(_) => FeasibilityResult {
                    verdict: Verdict::Undecided,
                    residual: res.residual,
                    iterations,
                },
            }
        }
        Verdict::Infeasible(c) => FeasibilityResult {
            verdict: Verdict::Infeasible(c),
            residual: res.residual,
            iterations,
        },
        Verdict::Undecided => FeasibilityResult {
            verdict: Verdict::Undecided,
            residual: res.residual,
            iterations,
        },
    })
}

/// The degrading map of `E_p` for `p < 1/2`: `E_μ` on the data block with
/// `μ = (1−2p)/(1−p)`, flag sent to flag.
pub fn erasure_degrading_map(p: f64, d: usize) -> Result<QuantumChannel> {
    let mu = (1.0 - 2.0 * p) / (1.0 - p);
    erasure_flag_preserving(mu, d)
}

/// `E_μ` extended to `C^{d+1}` by mapping the flag to itself. Composing
/// `E_p` with it yields `E_{1−(1−p)(1−μ)}`.
pub fn erasure_flag_preserving(mu: f64, d: usize) -> Result<QuantumChannel> {
    let base = QuantumChannel::erasure(mu, d)?;
    let mut kraus: Vec<ComplexMatrix> = base
        .kraus()
        .iter()
        .map(|k| {
            ComplexMatrix::from_fn(d + 1, d + 1, |r, c| if c < d { k[(r, c)] } else { C64::new(0.0, 0.0) })
        })
        .collect();
    kraus.push(ComplexMatrix::unit(d + 1, d + 1, d, d));
    QuantumChannel::from_kraus(d + 1, d + 1, kraus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_erasure_degrading_map() {
        let p = 0.3;
        let e = QuantumChannel::erasure(p, 2).unwrap();
        let d = erasure_degrading_map(p, 2).unwrap();
        let target = QuantumChannel::erasure(1.0 - p, 2).unwrap();
        let composed = e.then(&d).unwrap();
        assert!(composed.choi_distance(&target).unwrap() < 1e-12);
        assert!(degrading_residual(&e, &d).unwrap() < 1e-12);
    }

    #[test]
    fn erasure_below_half_is_degradable() {
        let e = QuantumChannel::erasure(0.3, 2).unwrap();
        let res = is_degradable(&e, &SdpSettings::default()).unwrap();
        let d = res.witness().expect("feasible");
        assert!(res.residual <= 1e-6, "{}", res.residual);
        assert!(d.tp_residual() < 1e-6);
    }

    #[test]
    fn erasure_above_half_is_not_degradable() {
        let e = QuantumChannel::erasure(0.7, 2).unwrap();
        let res = is_degradable(&e, &SdpSettings::default()).unwrap();
        assert!(res.is_infeasible(), "{:?}", res.kind());
    }

    #[test]
    fn lower_erasure_degrades_to_higher_erasure() {
        let a = QuantumChannel::erasure(0.1, 2).unwrap();
        let b = QuantumChannel::erasure(0.4, 2).unwrap();
        let res = find_post_processing(&a, &b, &SdpSettings::default()).unwrap();
        assert!(res.is_feasible());
        assert!(res.residual <= 1e-6, "{}", res.residual);
        // planted witness
        let mu = (0.4 - 0.1) / 0.9;
        let planted = erasure_flag_preserving(mu, 2).unwrap();
        assert!(a.then(&planted).unwrap().choi_distance(&b).unwrap() < 1e-12);
        // the converse direction would raise fidelity
        let back = find_post_processing(&b, &a, &SdpSettings::default()).unwrap();
        assert!(back.is_infeasible(), "{:?}", back.kind());
    }

    #[test]
    fn identity_degrades_to_trace() {
        let res = is_degradable(&QuantumChannel::identity(2), &SdpSettings::default()).unwrap();
        let d = res.witness().expect("feasible");
        assert_eq!(d.dim_out(), 1);
        assert!(res.residual < 1e-8);
    }
}
