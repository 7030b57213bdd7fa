//! Dimension formulas from concentration of measure, and Monte Carlo checks
//! of the sphere averages behind them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::code::RandomCode;
use crate::channels::{entanglement_fidelity, DensityOperator, PureStateVector, QuantumChannel};
use crate::error::{Error, Result};
use crate::numerics::matrix::{ComplexMatrix, C64};
use crate::symmetrizability::Avqc;

const CHUNK: usize = 4096;

/// `⌊δ²(n−1) / (2 log₂(4/Θ))⌋`.
pub fn dvoretzky_dimension(delta: f64, theta: f64, n: usize) -> Result<usize> {
    if !(delta > 0.0 && delta <= 1.0) || !(theta > 0.0 && theta < 4.0) || n == 0 {
        return Err(Error::Domain(format!("need δ ∈ (0,1], Θ ∈ (0,4), n ≥ 1; got {delta}, {theta}, {n}")));
    }
    Ok((delta * delta * (n - 1) as f64 / (2.0 * (4.0 / theta).log2())).floor() as usize)
}

/// `⌊ε² k / (256 log₂(32/ε))⌋`.
pub fn strong_subspace_dim(eps: f64, k: usize) -> Result<usize> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("ε = {eps} outside (0, 1]")));
    }
    Ok((eps * eps / (256.0 * (32.0 / eps).log2()) * k as f64).floor() as usize)
}

/// `|S|^l √(2/π) e^{−ε²(k−1)/128} < 1`, evaluated in log space.
pub fn premise_threshold(eps: f64, k: usize, n_states: usize, l: usize) -> Result<bool> {
    if !(eps > 0.0 && eps <= 1.0) || k == 0 || n_states == 0 {
        return Err(Error::Domain("need ε ∈ (0,1], k ≥ 1, |S| ≥ 1".into()));
    }
    let log = l as f64 * (n_states as f64).ln() + 0.5 * (2.0 / std::f64::consts::PI).ln()
        - eps * eps * (k - 1) as f64 / 128.0;
    Ok(log < 0.0)
}

/// Top `d×d` blocks of the Kraus operators, for pure-state fidelities with
/// the input space embedded in the output.
fn top_blocks(kraus: &[ComplexMatrix], d: usize) -> Vec<ComplexMatrix> {
    kraus.iter().map(|k| k.block(0, 0, d, d)).collect()
}

/// `Σ_k |⟨x|K̃_k|x⟩|²`.
fn pure_fidelity(blocks: &[ComplexMatrix], x: &[C64]) -> f64 {
    blocks
        .iter()
        .map(|k| {
            let kx = k.mat_vec(x);
            x.iter().zip(&kx).map(|(a, b)| a.conj() * b).sum::<C64>().norm_sqr()
        })
        .sum()
}

/// Sample mean and variance of `f(φ)` over Haar-random `φ`, computed in
/// fixed-size chunks with one rng stream per chunk.
fn sphere_moments<F>(d: usize, n: usize, seed: u64, f: F) -> (f64, f64)
where
    F: Fn(&[C64]) -> f64 + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                let v = f(PureStateVector::random(d, &mut rng).amplitudes());
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let mean = s / n as f64;
    let var = (s2 / n as f64 - mean * mean).max(0.0) * n as f64 / (n.max(2) - 1) as f64;
    (mean, var)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HaarTwirl {
    pub samples: usize,
    pub estimate: f64,
    pub stderr: f64,
    /// `(d F_e(π) + 1) / (d + 1)`.
    pub predicted: f64,
    /// `(d² F_e(π) + Σ tr K̃†K̃) / (d(d+1))`, which reduces to `predicted`
    /// when the input space is not left by any Kraus operator.
    pub general: f64,
}

impl HaarTwirl {
    /// `|estimate − predicted| ≤ 3·stderr`, with an absolute floor for
    /// zero-variance integrands.
    pub fn agrees(&self) -> bool {
        (self.estimate - self.predicted).abs() <= 3.0 * self.stderr + 1e-12
    }

    pub fn agrees_with_general(&self) -> bool {
        (self.estimate - self.general).abs() <= 3.0 * self.stderr + 1e-12
    }
}

/// Monte Carlo estimate of `∫ ⟨φ|N(|φ⟩⟨φ|)|φ⟩ dφ` over Haar-random `φ` in the
/// full input space.
pub fn haar_twirl_fidelity(n: &QuantumChannel, samples: usize, seed: u64) -> Result<HaarTwirl> {
    let d = n.dim_in();
    if n.dim_out() < d || samples == 0 {
        return Err(Error::Domain("needs dim_out ≥ dim_in and at least one sample".into()));
    }
    let blocks = top_blocks(n.kraus(), d);
    let (mean, var) = sphere_moments(d, samples, seed, |x| pure_fidelity(&blocks, x));
    let fe = entanglement_fidelity(&DensityOperator::maximally_mixed(d), n)?;
    let leak: f64 = blocks.iter().map(|k| k.frobenius_norm().powi(2)).sum();
    let df = d as f64;
    Ok(HaarTwirl {
        samples,
        estimate: mean,
        stderr: (var / samples as f64).sqrt(),
        predicted: (df * fe + 1.0) / (df + 1.0),
        general: (df * df * fe + leak) / (df * (df + 1.0)),
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LipschitzReport {
    pub pairs: usize,
    /// Pairs with `|f(x) − f(y)| > 4 D(x, y)`.
    pub violations: usize,
    /// Largest observed `|f(x) − f(y)| / D(x, y)`.
    pub max_ratio: f64,
    pub real_dim: usize,
    pub mean: f64,
    pub median: f64,
    pub gap: f64,
    pub gap_bound: f64,
    pub slack: f64,
    pub gap_ok: bool,
}

/// Geodesic distance on the unit sphere of `R^{2n}`, folded by `x ~ −x`.
fn geodesic(x: &[C64], y: &[C64]) -> f64 {
    let re: f64 = x.iter().zip(y).map(|(a, b)| (a.conj() * b).re).sum();
    re.abs().min(1.0).acos()
}

/// Samples `f(x) = ⟨x|Λ(|x⟩⟨x|)|x⟩` on pairs of unit vectors, half of them
/// close together, and checks the Lipschitz constant 4 and the gap between
/// the sampled median and mean against `48 / √(2(n−1))`.
pub fn lipschitz_median_checks(lambda: &QuantumChannel, pairs: usize, seed: u64) -> Result<LipschitzReport> {
    let d = lambda.dim_in();
    if lambda.dim_out() < d || pairs == 0 {
        return Err(Error::Domain("needs dim_out ≥ dim_in and at least one pair".into()));
    }
    let blocks = top_blocks(lambda.kraus(), d);
    let chunks = pairs.div_ceil(CHUNK);
    let per_chunk: Vec<(usize, f64, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(pairs - c * CHUNK);
            let (mut bad, mut ratio, mut values) = (0, 0.0f64, Vec::with_capacity(len));
            for k in 0..len {
                let x = PureStateVector::random(d, &mut rng);
                let y = if k % 2 == 0 {
                    PureStateVector::random(d, &mut rng)
                } else {
                    let scale = 10f64.powf(-3.0 * rng.random::<f64>());
                    let g = PureStateVector::random(d, &mut rng);
                    let amps = x.amplitudes().iter().zip(g.amplitudes()).map(|(a, b)| a + b * scale).collect();
                    PureStateVector::normalize(amps).expect("perturbation of a unit vector")
                };
                let fx = pure_fidelity(&blocks, x.amplitudes());
                let fy = pure_fidelity(&blocks, y.amplitudes());
                let dist = geodesic(x.amplitudes(), y.amplitudes());
                let diff = (fx - fy).abs();
                if diff > 4.0 * dist + 1e-12 {
                    bad += 1;
                }
                if dist > 1e-9 {
                    ratio = ratio.max(diff / dist);
                }
                values.push(fx);
            }
            (bad, ratio, values)
        })
        .collect();
    let violations = per_chunk.iter().map(|c| c.0).sum();
    let max_ratio = per_chunk.iter().map(|c| c.1).fold(0.0, f64::max);
    let mut values: Vec<f64> = per_chunk.into_iter().flat_map(|c| c.2).collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    let median = if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    };
    let real_dim = 2 * d;
    let gap_bound = 48.0 / (2.0 * (real_dim - 1) as f64).sqrt();
    // mean and median each within three standard errors
    let slack = 3.0 * sd / n.sqrt() * (1.0 + (std::f64::consts::PI / 2.0).sqrt());
    let gap = (median - mean).abs();
    Ok(LipschitzReport {
        pairs,
        violations,
        max_ratio,
        real_dim,
        mean,
        median,
        gap,
        gap_bound,
        slack,
        gap_ok: gap <= gap_bound + slack,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EquivalenceCheck {
    /// `inf_s Σ_i w_i F_e(π_F, R_i ∘ N_s ∘ P_i)`.
    pub entanglement: f64,
    /// Smallest sampled pure-state fidelity over all sequences.
    pub pure_min: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Compares the worst entanglement fidelity of a random code with
/// `1 − (3/2)(1 − min pure fidelity)`, the pure minimum taken over
/// `samples` Haar-random inputs per sequence plus basis vectors.
pub fn strong_subspace_equivalence<R: Rng + ?Sized>(
    mu: &RandomCode,
    avqc: &Avqc,
    l: usize,
    samples: usize,
    rng: &mut R,
) -> Result<EquivalenceCheck> {
    let f = mu
        .entries()
        .first()
        .ok_or_else(|| Error::Domain("random code with empty support".into()))?
        .0
        .f_dim();
    let seqs = avqc.sequences(l)?;
    let mut inputs: Vec<PureStateVector> = (0..f).map(|i| PureStateVector::basis(f, i)).collect();
    inputs.extend((0..samples).map(|_| PureStateVector::random(f, rng)));
    let per_seq: Vec<(f64, f64)> = seqs
        .par_iter()
        .map(|s| {
            let ch = avqc.sequence_channel(s)?;
            let weighted: Vec<(f64, Vec<ComplexMatrix>)> = mu
                .entries()
                .iter()
                .map(|(c, w)| {
                    let mut ks = Vec::new();
                    for p in c.encoder().kraus() {
                        for n in ch.kraus() {
                            let np = n.matmul(p);
                            for r in c.decoder().kraus() {
                                ks.push(r.matmul(&np).block(0, 0, f, f));
                            }
                        }
                    }
                    (*w, ks)
                })
                .collect();
            let pure = inputs
                .iter()
                .map(|x| weighted.iter().map(|(w, ks)| w * pure_fidelity(ks, x.amplitudes())).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            Ok((mu.expected_fidelity(&ch)?, pure))
        })
        .collect::<Result<_>>()?;
    let entanglement = per_seq.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let pure_min = per_seq.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let bound = 1.0 - 1.5 * (1.0 - pure_min);
    Ok(EquivalenceCheck {
        entanglement,
        pure_min,
        bound,
        holds: entanglement >= bound - 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding_sim::reduction::{letter_codes, shift_noise_avqc};

    #[test]
    fn dimension_formulas() {
        let k = dvoretzky_dimension(0.125, 0.125, 1025).unwrap();
        assert_eq!(k, (0.015625f64 * 1024.0 / (2.0 * 5.0)).floor() as usize);
        assert_eq!(k, 1);
        for kk in [1, 10, 1000, 1 << 20] {
            assert!(strong_subspace_dim(1.0, kk).unwrap() <= kk);
        }
        assert!(dvoretzky_dimension(0.0, 0.5, 10).is_err());
        assert!(strong_subspace_dim(1.5, 10).is_err());
    }

    #[test]
    fn premise_flips_once_as_k_grows() {
        let flags: Vec<bool> = (1..200).map(|j| premise_threshold(0.5, j * 100, 2, 3).unwrap()).collect();
        assert!(!flags[0]);
        assert!(*flags.last().unwrap());
        let flips = flags.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(flips, 1);
    }

    #[test]
    fn identity_twirl_is_one() {
        let t = haar_twirl_fidelity(&QuantumChannel::identity(3), 1000, 0).unwrap();
        assert!((t.estimate - 1.0).abs() < 1e-12);
        assert!(t.agrees());
    }

    #[test]
    fn random_channel_twirl_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ch = QuantumChannel::random(2, 2, 3, &mut rng);
        let t = haar_twirl_fidelity(&ch, 100_000, 1).unwrap();
        assert!(t.agrees(), "{t:?}");
        assert!((t.general - t.predicted).abs() < 1e-12);
    }

    #[test]
    fn erasure_twirl_follows_the_leakage_formula() {
        let t = haar_twirl_fidelity(&QuantumChannel::erasure(0.3, 2).unwrap(), 10_000, 2).unwrap();
        // the integrand is constant: the data block keeps weight 1 − p
        assert!((t.estimate - 0.7).abs() < 1e-12);
        assert!(t.agrees_with_general());
        assert!((t.predicted - 0.8).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_trivial_cases() {
        let c = QuantumChannel::constant(&DensityOperator::basis(2, 0), 2);
        let r = lipschitz_median_checks(&c, 1000, 0).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.gap < 1e-12 || r.gap_ok);
        let id = lipschitz_median_checks(&QuantumChannel::identity(4), 1000, 0).unwrap();
        assert!((id.mean - 1.0).abs() < 1e-12 && id.gap < 1e-12);
    }

    #[test]
    fn lipschitz_random_two_qubit_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch = QuantumChannel::random(4, 4, 4, &mut rng);
        let r = lipschitz_median_checks(&ch, 10_000, 5).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.max_ratio <= 4.0);
        assert!(r.gap_ok);
    }

    #[test]
    fn equivalence_direction_on_letter_codes() {
        let avqc = shift_noise_avqc(0.1, 3, 2).unwrap();
        let mu = RandomCode::uniform(letter_codes(3, 2).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let c = strong_subspace_equivalence(&mu, &avqc, 2, 200, &mut rng).unwrap();
        assert!(c.holds, "{c:?}");
    }
}
