//! qc-symmetrizability: a POVM `{E_s}` such that
//! `M(a ⊗ b) = Σ_s tr(E_s a) N_s(b)` is symmetric under swapping `a` and `b`.

use super::avqc::{Avqc, Povm};
use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::numerics::feasibility::{FeasibilityResult, Verdict};
use crate::numerics::linalg::gell_mann_basis;
use crate::numerics::matrix::{ComplexMatrix, HermitianMatrix, Keep, C64};
use crate::numerics::sdp::{sdp_feasibility, ConeSystem, SdpSettings, SeparatingDirection};

/// Tolerance used when accepting a solver witness as a POVM.
const WITNESS_TOL: f64 = 1e-6;

pub type QcSymmetrizability = FeasibilityResult<Povm, SeparatingDirection>;

/// `N_s(a_k)` for every channel and every basis operator.
fn basis_images(channels: &[QuantumChannel], basis: &[HermitianMatrix]) -> Result<Vec<Vec<ComplexMatrix>>> {
    channels
        .iter()
        .map(|ch| basis.iter().map(|a| ch.apply_operator(a.as_matrix())).collect())
        .collect()
}

/// Stacked `M(a_i⊗a_j) − M(a_j⊗a_i)` over all basis pairs `i < j`.
fn antisymmetric_part(
    elements: &[HermitianMatrix],
    basis: &[HermitianMatrix],
    images: &[Vec<ComplexMatrix>],
    dout: usize,
) -> Vec<C64> {
    let traces: Vec<Vec<f64>> = elements
        .iter()
        .map(|e| basis.iter().map(|a| e.inner(a)).collect())
        .collect();
    let mut out = Vec::with_capacity(basis.len() * basis.len() / 2 * dout * dout);
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            let mut m = ComplexMatrix::zeros(dout, dout);
            for (s, t) in traces.iter().enumerate() {
                if t[i] != 0.0 {
                    m.axpy(C64::new(t[i], 0.0), &images[s][j]);
                }
                if t[j] != 0.0 {
                    m.axpy(C64::new(-t[j], 0.0), &images[s][i]);
                }
            }
            out.extend(m.into_data());
        }
    }
    out
}

fn max_pair_norm(stacked: &[C64], dout: usize) -> f64 {
    stacked
        .chunks(dout * dout)
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// Largest Frobenius violation of the swap symmetry over the generalized
/// Gell-Mann pairs, for a POVM indexed by `S^l` against the channels
/// `N_{s^l}` (lexicographic order). By linearity this bounds the violation on
/// all product inputs.
pub fn qc_symmetry_residual(avqc: &Avqc, l: usize, povm: &Povm) -> Result<f64> {
    let seqs = avqc.sequences(l)?;
    if povm.len() != seqs.len() {
        return Err(Error::Shape(format!(
            "POVM has {} outcomes, expected {}",
            povm.len(),
            seqs.len()
        )));
    }
    let d = avqc.dim_in().pow(l as u32);
    if povm.dim() != d {
        return Err(Error::Shape(format!("POVM on dimension {}, expected {d}", povm.dim())));
    }
    let channels = seqs
        .iter()
        .map(|s| avqc.sequence_channel(s))
        .collect::<Result<Vec<_>>>()?;
    let dout = channels[0].dim_out();
    let basis = gell_mann_basis(d);
    let images = basis_images(&channels, &basis)?;
    Ok(max_pair_norm(&antisymmetric_part(povm.elements(), &basis, &images, dout), dout))
}

/// SDP feasibility over POVMs indexed by `S`. A Feasible verdict carries a
/// POVM whose symmetry residual was recomputed independently.
pub fn is_qc_symmetrizable(avqc: &Avqc, settings: &SdpSettings) -> Result<QcSymmetrizability> {
    let d = avqc.dim_in();
    let dout = avqc.dim_out();
    let n = avqc.len();
    let basis = gell_mann_basis(d);
    let images = basis_images(avqc.channels(), &basis)?;

    let npairs = basis.len() * (basis.len() - 1) / 2;
    let mut target = ComplexMatrix::identity(d).into_data();
    target.extend(std::iter::repeat_n(C64::new(0.0, 0.0), npairs * dout * dout));
    let system = ConeSystem::from_linear_map(
        vec![d; n],
        |blocks: &[HermitianMatrix]| {
            let mut sum = HermitianMatrix::zeros(d);
            for b in blocks {
                sum = sum.add(b);
            }
            let mut out = sum.into_matrix().into_data();
            out.extend(antisymmetric_part(blocks, &basis, &images, dout));
            out
        },
        &target,
    );
    let res = sdp_feasibility(&system, settings)?;
    let iterations = res.iterations;
    Ok(match res.verdict {
        Verdict::Feasible(blocks) => match Povm::with_tolerance(blocks, WITNESS_TOL) {
            Ok(povm) => FeasibilityResult {
                residual: qc_symmetry_residual(avqc, 1, &povm)?,
                verdict: Verdict::Feasible(povm),
                iterations,
            },
            Err(_) => FeasibilityResult {
                verdict: Verdict::Undecided,
                residual: res.residual,
                iterations,
            },
        },
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

/// Collapses a POVM over `S^l` on `H^{⊗l}` to one over `S` on `H`:
/// `Ẽ_s = d^{−(l−1)} tr_{2..l} Σ_{s_2…s_l} E_{s s_2…s_l}`.
pub fn reduce_qc_l_to_1(povm: &Povm, avqc: &Avqc) -> Result<Povm> {
    let n = avqc.len();
    let d = avqc.dim_in();
    let mut l = 0usize;
    let mut count = 1usize;
    while count < povm.len() {
        count *= n;
        l += 1;
    }
    if count != povm.len() || l == 0 {
        return Err(Error::Shape(format!(
            "{} outcomes is not a power of |S| = {n}",
            povm.len()
        )));
    }
    let rest = d.pow((l - 1) as u32);
    if povm.dim() != d * rest {
        return Err(Error::Shape(format!(
            "POVM dimension {} does not match d^l = {}",
            povm.dim(),
            d * rest
        )));
    }
    let tail = povm.len() / n;
    let mut out = Vec::with_capacity(n);
    for s in 0..n {
        let mut acc = HermitianMatrix::zeros(d * rest);
        for e in &povm.elements()[s * tail..(s + 1) * tail] {
            acc = acc.add(e);
        }
        out.push(acc.partial_trace(d, rest, Keep::A)?.scale(1.0 / rest as f64));
    }
    Povm::with_tolerance(out, 1e-8)
}
