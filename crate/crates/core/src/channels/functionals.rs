//! Entropic and fidelity functionals of a state and a channel.

use super::channel::QuantumChannel;
use super::state::{DensityOperator, PureStateVector};
use crate::error::{Error, Result};
use crate::numerics::eig::entropy_bits;
use crate::numerics::matrix::{ComplexMatrix, HermitianMatrix, ZERO};

fn check_input(rho: &DensityOperator, ch: &QuantumChannel) -> Result<()> {
    if rho.dim() != ch.dim_in() {
        return Err(Error::Shape(format!(
            "state of dimension {} into a channel with input dimension {}",
            rho.dim(),
            ch.dim_in()
        )));
    }
    Ok(())
}

/// `F_e(ρ, Λ) = Σ_i |tr(K̃_i ρ)|²` where `K̃_i` is the block of `K_i` on the
/// input space (the input space is embedded as the first `d_in` output basis
/// vectors). Requires `d_out ≥ d_in`.
pub fn entanglement_fidelity(rho: &DensityOperator, ch: &QuantumChannel) -> Result<f64> {
    check_input(rho, ch)?;
    let d = ch.dim_in();
    if ch.dim_out() < d {
        return Err(Error::Shape(format!(
            "entanglement fidelity needs output dimension ≥ {d}, got {}",
            ch.dim_out()
        )));
    }
    let r = rho.matrix().as_matrix();
    let mut f = 0.0;
    for k in ch.kraus() {
        let mut tr = ZERO;
        for i in 0..d {
            for j in 0..d {
                tr += k[(i, j)] * r[(j, i)];
            }
        }
        f += tr.norm_sqr();
    }
    Ok(f.clamp(0.0, 1.0))
}

/// `<x| Λ(|x><x|) |x>`.
pub fn pure_state_fidelity(x: &PureStateVector, ch: &QuantumChannel) -> Result<f64> {
    let out = ch.apply(&x.to_density())?;
    let d = x.dim();
    if ch.dim_out() < d {
        return Err(Error::Shape("output space smaller than input space".into()));
    }
    let m = out.matrix().as_matrix();
    let a = x.amplitudes();
    let mut acc = ZERO;
    for i in 0..d {
        for j in 0..d {
            acc += a[i].conj() * m[(i, j)] * a[j];
        }
    }
    Ok(acc.re)
}

/// Environment state `W_ij = tr(K_i ρ K_j†)`, equal to the complementary
/// channel's output.
pub fn environment_state(rho: &DensityOperator, ch: &QuantumChannel) -> Result<HermitianMatrix> {
    check_input(rho, ch)?;
    let kr: Vec<ComplexMatrix> = ch
        .kraus()
        .iter()
        .map(|k| k.matmul(rho.matrix().as_matrix()))
        .collect();
    let n = ch.kraus().len();
    let w = ComplexMatrix::from_fn(n, n, |i, j| kr[i].hs_inner(&ch.kraus()[j]).conj());
    Ok(HermitianMatrix::from_hermitian_part(&w))
}

/// Entropy exchange `S(N̂(ρ))` in bits.
pub fn entropy_exchange(rho: &DensityOperator, ch: &QuantumChannel) -> Result<f64> {
    Ok(entropy_bits(&environment_state(rho, &ch.compressed())?))
}

/// `I_c(ρ, N) = S(N(ρ)) − S_e(ρ, N)` in bits.
pub fn coherent_information(rho: &DensityOperator, ch: &QuantumChannel) -> Result<f64> {
    let out = ch.apply(rho)?;
    Ok(out.entropy() - entropy_exchange(rho, ch)?)
}
