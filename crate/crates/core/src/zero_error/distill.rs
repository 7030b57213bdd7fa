use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{DensityOperator, PureStateVector};
use crate::error::{Error, Result};
use crate::numerics::eig::min_eigenvalue;

const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OverlapStats {
    pub k: usize,
    pub samples: usize,
    pub max: f64,
    pub mean: f64,
    /// `1/k`.
    pub bound: f64,
    pub within_bound: bool,
}

/// `⟨Φ_k|σ|Φ_k⟩` for the normalized maximally entangled `Φ_k` on `C^k ⊗ C^k`.
pub fn entangled_overlap(sigma: &DensityOperator) -> Result<f64> {
    let k = (sigma.dim() as f64).sqrt().round() as usize;
    if k * k != sigma.dim() {
        return Err(Error::Shape(format!("dimension {} is not a square", sigma.dim())));
    }
    Ok(sigma.overlap(&PureStateVector::maximally_entangled(k)))
}

/// `|⟨Φ_k|a⊗b⟩|² = |Σ_i a_i b_i|² / k`.
pub fn product_overlap(a: &PureStateVector, b: &PureStateVector) -> f64 {
    let s: crate::numerics::matrix::C64 = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x * y).sum();
    s.norm_sqr() / a.dim() as f64
}

/// Largest overlap with `Φ_k` over Haar-random pure product states. The
/// samples are split into fixed chunks, each with its own generator stream,
/// so the result does not depend on the thread count.
pub fn separable_overlap_bound(k: usize, n_samples: usize, seed: u64) -> Result<OverlapStats> {
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    let chunks = n_samples.div_ceil(CHUNK);
    let parts: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(n_samples - c * CHUNK);
            let mut max: f64 = 0.0;
            let mut sum = 0.0;
            for _ in 0..count {
                let a = PureStateVector::random(k, &mut rng);
                let b = PureStateVector::random(k, &mut rng);
                let v = product_overlap(&a, &b);
                max = max.max(v);
                sum += v;
            }
            (max, sum)
        })
        .collect();
    let max = parts.iter().map(|p| p.0).fold(0.0, f64::max);
    let mean = parts.iter().map(|p| p.1).sum::<f64>() / n_samples.max(1) as f64;
    let bound = 1.0 / k as f64;
    Ok(OverlapStats {
        k,
        samples: n_samples,
        max,
        mean,
        bound,
        within_bound: max <= bound + 1e-12,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FullRankCheck {
    pub full_rank: bool,
    pub min_eigenvalue: f64,
    pub message: String,
}

/// Full rank of a bipartite state on `C^{d_A} ⊗ C^{d_B}`, i.e. membership in
/// the relative interior of the state space.
pub fn full_rank_state_check(rho: &DensityOperator, dim_a: usize, dim_b: usize, tol: f64) -> Result<FullRankCheck> {
    if dim_a * dim_b != rho.dim() {
        return Err(Error::Shape(format!(
            "state of dimension {} declared as {dim_a}x{dim_b}",
            rho.dim()
        )));
    }
    let lmin = min_eigenvalue(rho.matrix());
    let full = lmin > tol;
    Ok(FullRankCheck {
        full_rank: full,
        min_eigenvalue: lmin,
        message: if full {
            "full rank: zero-error distillable entanglement is 0".into()
        } else {
            "rank deficient: the interior argument does not apply".into()
        },
    })
}
