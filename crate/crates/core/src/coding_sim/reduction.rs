//! From random codes to deterministic ones: sampling `l²` codes from a random
//! code, and gluing them to a short message code that announces which one is
//! in use.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::code::{ClassicalCode, CodePair, RandomCode};
use super::evaluators::{evaluate_avg_error, evaluate_random_code, WorstCase};
use crate::channels::{weyl, DensityOperator, QuantumChannel};
use crate::error::{Error, Result};
use crate::numerics::eig::hermitian_eig;
use crate::numerics::matrix::{ComplexMatrix, ZERO};
use crate::symmetrizability::{Avqc, Povm};

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ReductionOutcome {
    Reduced {
        /// Indices into the support of the random code.
        indices: Vec<usize>,
        attempts: usize,
        worst_average: f64,
        worst_sequence: Vec<usize>,
    },
    /// No draw met the target within the retry budget.
    Exhausted { attempts: usize, best_worst_average: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct Reduction {
    pub expected_fidelity: f64,
    pub target: f64,
    pub outcome: ReductionOutcome,
}

impl Reduction {
    pub fn codes(&self, mu: &RandomCode) -> Option<Vec<CodePair>> {
        match &self.outcome {
            ReductionOutcome::Reduced { indices, .. } => {
                Some(indices.iter().map(|&i| mu.entries()[i].0.clone()).collect())
            }
            ReductionOutcome::Exhausted { .. } => None,
        }
    }
}

/// Draws `l²` codes i.i.d. from `μ` until their average fidelity exceeds
/// `1 − ε` on every sequence in `S^l`, at most `retries` times.
pub fn reduce_random_code<R: Rng + ?Sized>(
    mu: &RandomCode,
    avqc: &Avqc,
    l: usize,
    eps: f64,
    retries: usize,
    rng: &mut R,
) -> Result<Reduction> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("ε = {eps} outside (0, 1]")));
    }
    if mu.entries().is_empty() {
        return Err(Error::Domain("random code with empty support".into()));
    }
    let expected = evaluate_random_code(mu, avqc, l)?.value;
    let seqs = avqc.sequences(l)?;
    // table[s][entry]
    let table: Vec<Vec<f64>> = seqs
        .par_iter()
        .map(|s| {
            let ch = avqc.sequence_channel(s)?;
            mu.entries().iter().map(|(c, _)| c.fidelity(&ch)).collect()
        })
        .collect::<Result<_>>()?;
    let weights: Vec<f64> = mu.entries().iter().map(|e| e.1).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let k = l * l;
    let mut best = f64::NEG_INFINITY;
    for attempt in 1..=retries.max(1) {
        let indices: Vec<usize> = (0..k).map(|_| dist.sample(rng)).collect();
        let (mut worst, mut arg) = (f64::INFINITY, 0);
        for (si, row) in table.iter().enumerate() {
            let avg = indices.iter().map(|&i| row[i]).sum::<f64>() / k as f64;
            if avg < worst {
                worst = avg;
                arg = si;
            }
        }
        if worst > 1.0 - eps {
            return Ok(Reduction {
                expected_fidelity: expected,
                target: 1.0 - eps,
                outcome: ReductionOutcome::Reduced {
                    indices,
                    attempts: attempt,
                    worst_average: worst,
                    worst_sequence: seqs[arg].clone(),
                },
            });
        }
        best = best.max(worst);
    }
    Ok(Reduction {
        expected_fidelity: expected,
        target: 1.0 - eps,
        outcome: ReductionOutcome::Exhausted {
            attempts: retries.max(1),
            best_worst_average: best,
        },
    })
}

/// `l²` quantum codes on block `l` glued to a message code on block `m`:
/// `P(a) = (1/l²) Σ_i P_i(a) ⊗ ρ_i` and `R(b ⊗ d) = Σ_i tr(D_i d) R_i(b)`.
#[derive(Clone, Debug)]
pub struct DerandomizedCode {
    codes: Vec<CodePair>,
    classical: ClassicalCode,
    l: usize,
    m: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DerandomizationCheck {
    pub block_length: usize,
    /// `1 −` worst average fidelity of the quantum codes.
    pub eps_codes: f64,
    /// Worst-case average error of the message code.
    pub eps_classical: f64,
    pub bound: f64,
    pub worst: WorstCase,
    pub holds: bool,
}

pub fn derandomize(codes: Vec<CodePair>, classical: ClassicalCode, avqc: &Avqc, l: usize, m: usize) -> Result<DerandomizedCode> {
    if codes.len() != l * l || classical.len() != l * l {
        return Err(Error::Domain(format!(
            "need l² = {} codes and messages, got {} and {}",
            l * l,
            codes.len(),
            classical.len()
        )));
    }
    let (hin, hout) = (avqc.dim_in().pow(l as u32), avqc.dim_out().pow(l as u32));
    let first = &codes[0];
    for c in &codes {
        if c.encoder().dim_out() != hin || c.decoder().dim_in() != hout {
            return Err(Error::Shape(format!("code does not act on block length {l}")));
        }
        if c.f_dim() != first.f_dim() || c.decoder().dim_out() != first.decoder().dim_out() {
            return Err(Error::Shape("codes differ in code space".into()));
        }
    }
    if classical.states()[0].dim() != avqc.dim_in().pow(m as u32)
        || classical.decoder().dim() != avqc.dim_out().pow(m as u32)
    {
        return Err(Error::Shape(format!("message code does not act on block length {m}")));
    }
    Ok(DerandomizedCode { codes, classical, l, m })
}

impl DerandomizedCode {
    pub fn block_length(&self) -> usize {
        self.l + self.m
    }

    /// `G[i][j] = F_e(π_F, R_j ∘ N_v ∘ P_i)`.
    fn cross_fidelities(&self, channel: &QuantumChannel) -> Result<Vec<Vec<f64>>> {
        self.codes
            .iter()
            .map(|p| {
                self.codes
                    .iter()
                    .map(|r| CodePair::new(p.encoder().clone(), r.decoder().clone())?.fidelity(channel))
                    .collect()
            })
            .collect()
    }

    /// Fidelity on `N_v ⊗ N_u`, by linearity of `F_e` in the channel:
    /// `(1/K) Σ_ij tr(D_j N_u(ρ_i)) F_e(R_j ∘ N_v ∘ P_i)`.
    pub fn fidelity(&self, avqc: &Avqc, v: &[usize], u: &[usize]) -> Result<f64> {
        let g = self.cross_fidelities(&avqc.sequence_channel(v)?)?;
        let t = self.classical.transition(&avqc.sequence_channel(u)?)?;
        Ok(combine(&g, &t))
    }

    /// Exhaustive check of `F_e ≥ 1 − 2 max(ε_codes, ε_classical)` over every
    /// `(v^l, u^m)`.
    pub fn verify(&self, avqc: &Avqc) -> Result<DerandomizationCheck> {
        let vs = avqc.sequences(self.l)?;
        let us = avqc.sequences(self.m)?;
        let gs: Vec<Vec<Vec<f64>>> = vs
            .par_iter()
            .map(|v| self.cross_fidelities(&avqc.sequence_channel(v)?))
            .collect::<Result<_>>()?;
        let ts: Vec<Vec<Vec<f64>>> = us
            .par_iter()
            .map(|u| self.classical.transition(&avqc.sequence_channel(u)?))
            .collect::<Result<_>>()?;
        let k = self.codes.len() as f64;
        let code_avg = gs
            .iter()
            .map(|g| (0..g.len()).map(|i| g[i][i]).sum::<f64>() / k)
            .fold(f64::INFINITY, f64::min);
        let eps_codes = (1.0 - code_avg).max(0.0);
        let eps_classical = evaluate_avg_error(&self.classical, avqc, self.m)?.value.max(0.0);
        let bound = 1.0 - 2.0 * eps_codes.max(eps_classical);
        let mut worst = WorstCase {
            value: f64::INFINITY,
            sequence: Vec::new(),
        };
        for (v, g) in vs.iter().zip(&gs) {
            for (u, t) in us.iter().zip(&ts) {
                let f = combine(g, t);
                if f < worst.value {
                    worst = WorstCase {
                        value: f,
                        sequence: v.iter().chain(u).copied().collect(),
                    };
                }
            }
        }
        Ok(DerandomizationCheck {
            block_length: self.block_length(),
            eps_codes,
            eps_classical,
            bound,
            holds: worst.value >= bound - 1e-9,
            worst,
        })
    }

    /// The composite encoder and decoder as explicit channels. Their size is
    /// the full block `l + m`, so this is meant for small cross-checks.
    pub fn to_code_pair(&self) -> Result<CodePair> {
        let k = self.codes.len() as f64;
        let mut enc = Vec::new();
        for (c, rho) in self.codes.iter().zip(self.classical.states()) {
            let e = hermitian_eig(rho.matrix());
            for idx in 0..e.values.len() {
                let w = e.values[idx];
                if w <= 1e-14 {
                    continue;
                }
                let col = ComplexMatrix::column(&e.vector(idx)).scale_real((w / k).sqrt());
                for p in c.encoder().kraus() {
                    enc.push(p.kron(&col));
                }
            }
        }
        let mut dec = Vec::new();
        for (c, d) in self.codes.iter().zip(self.classical.decoder().elements()) {
            let e = hermitian_eig(d);
            for idx in 0..e.values.len() {
                let w = e.values[idx];
                if w <= 1e-14 {
                    continue;
                }
                let row = ComplexMatrix::column(&e.vector(idx)).adjoint().scale_real(w.sqrt());
                for r in c.decoder().kraus() {
                    dec.push(r.kron(&row));
                }
            }
        }
        let first = &self.codes[0];
        let hin = first.encoder().dim_out() * self.classical.states()[0].dim();
        let hout = first.decoder().dim_in() * self.classical.decoder().dim();
        CodePair::new(
            QuantumChannel::from_kraus_with_tolerance(first.f_dim(), hin, enc, 1e-8)?,
            QuantumChannel::from_kraus_with_tolerance(hout, first.decoder().dim_out(), dec, 1e-8)?,
        )
    }
}

fn combine(g: &[Vec<f64>], t: &[Vec<f64>]) -> f64 {
    let k = g.len() as f64;
    let mut acc = 0.0;
    for i in 0..g.len() {
        for j in 0..g.len() {
            acc += t[i][j] * g[i][j];
        }
    }
    acc / k
}

/// Averages and product average of two `[0,1]` sequences.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct InnerProductCheck {
    pub eps: f64,
    pub product_average: f64,
    pub holds: bool,
}

/// With `ε` the larger of the two average deficits, checks
/// `(1/K) Σ a_i b_i ≥ 1 − 2ε`.
pub fn inner_product_bound(a: &[f64], b: &[f64]) -> Result<InnerProductCheck> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Shape(format!("sequences of length {} and {}", a.len(), b.len())));
    }
    if a.iter().chain(b).any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::Domain("entries must lie in [0, 1]".into()));
    }
    let k = a.len() as f64;
    let mean = |x: &[f64]| x.iter().sum::<f64>() / k;
    let eps = (1.0 - mean(a)).max(1.0 - mean(b)).max(0.0);
    let product_average = a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / k;
    Ok(InnerProductCheck {
        eps,
        product_average,
        holds: product_average >= 1.0 - 2.0 * eps - 1e-12,
    })
}

/// Number of violations among `instances` random pairs of length up to 32.
pub fn inner_product_sweep<R: Rng + ?Sized>(instances: usize, rng: &mut R) -> Result<usize> {
    let mut violations = 0;
    for _ in 0..instances {
        let k = rng.random_range(1..=32);
        let spread: f64 = rng.random();
        let draw = |rng: &mut R| -> Vec<f64> { (0..k).map(|_| 1.0 - spread * rng.random::<f64>()).collect() };
        let a = draw(rng);
        let b = draw(rng);
        if !inner_product_bound(&a, &b)?.holds {
            violations += 1;
        }
    }
    Ok(violations)
}

/// `(1−η) ρ + η X^{s+1} ρ X^{s+1}†` for `s = 0..n`, with `X` the cyclic shift
/// on `C^d`.
pub fn shift_noise_avqc(eta: f64, d: usize, n: usize) -> Result<Avqc> {
    if !(0.0..=1.0).contains(&eta) || n == 0 || n >= d {
        return Err(Error::Domain(format!("need η ∈ [0,1] and 1 ≤ |S| < d, got η = {eta}, |S| = {n}")));
    }
    let channels = (0..n)
        .map(|s| {
            let x = weyl(d, s + 1, 0).scale_real(eta.sqrt());
            let id = ComplexMatrix::identity(d).scale_real((1.0 - eta).sqrt());
            QuantumChannel::from_kraus(d, d, vec![id, x])
        })
        .collect::<Result<_>>()?;
    Avqc::new(channels)
}

/// Code on block `l` that stores `C^d` in letter `position` as `U|ψ⟩`, with
/// `|0⟩` elsewhere; the decoder undoes `U` on that letter and discards the rest.
pub fn letter_code(u: &ComplexMatrix, position: usize, l: usize) -> Result<CodePair> {
    let d = u.rows();
    if position >= l || !u.is_square() {
        return Err(Error::Domain(format!("letter {position} of a block of {l}")));
    }
    let stride = d.pow((l - 1 - position) as u32);
    let big = d.pow(l as u32);
    let v = ComplexMatrix::from_fn(big, d, |r, a| if r % stride == 0 && r / stride < d { u[(r / stride, a)] } else { ZERO });
    let ud = u.adjoint();
    let mut kraus = Vec::with_capacity(big / d);
    for rest in 0..big / d {
        // digits of the other letters: high part above the position, low part below
        let (hi, lo) = (rest / stride, rest % stride);
        let mut k = ComplexMatrix::zeros(d, big);
        for t in 0..d {
            let col = hi * stride * d + t * stride + lo;
            for a in 0..d {
                k[(a, col)] = ud[(a, t)];
            }
        }
        kraus.push(k);
    }
    CodePair::new(
        QuantumChannel::isometry(&v)?,
        QuantumChannel::from_kraus(big, d, kraus)?,
    )
}

/// The `l²` letter codes `P_i` storing the input in letter `i mod l` under
/// the Weyl unitary `X^{⌊i/d⌋ mod d} Z^{i mod d}`.
pub fn letter_codes(d: usize, l: usize) -> Result<Vec<CodePair>> {
    (0..l * l)
        .map(|i| letter_code(&weyl(d, (i / d) % d, i % d), i % l, l))
        .collect()
}

/// The `d^m` computational basis states of `(C^d)^{⊗m}` with the projective
/// decoder.
pub fn basis_message_code(d: usize, m: usize) -> Result<ClassicalCode> {
    let n = d.pow(m as u32);
    ClassicalCode::new((0..n).map(|i| DensityOperator::basis(n, i)).collect(), Povm::computational(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::entanglement_fidelity;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn letter_code_is_perfect_without_noise() {
        for pos in 0..3 {
            let c = letter_code(&weyl(3, 1, 2), pos, 3).unwrap();
            let f = c.fidelity(&QuantumChannel::identity(27)).unwrap();
            assert!((f - 1.0).abs() < 1e-12);
            let composed = c.encoder().then(c.decoder()).unwrap();
            let pi = DensityOperator::maximally_mixed(3);
            assert!((entanglement_fidelity(&pi, &composed).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn letter_code_fidelity_under_shift_noise() {
        let avqc = shift_noise_avqc(0.1, 3, 2).unwrap();
        let c = letter_code(&weyl(3, 0, 1), 1, 3).unwrap();
        for s in avqc.sequences(3).unwrap() {
            let f = c.fidelity(&avqc.sequence_channel(&s).unwrap()).unwrap();
            assert!((f - 0.9).abs() < 1e-12, "{s:?} {f}");
        }
    }

    #[test]
    fn point_mass_reduces_trivially() {
        let avqc = shift_noise_avqc(0.0, 3, 2).unwrap();
        let mu = RandomCode::point_mass(letter_code(&ComplexMatrix::identity(3), 0, 2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = reduce_random_code(&mu, &avqc, 2, 1e-6, 1, &mut rng).unwrap();
        let codes = r.codes(&mu).expect("reduced");
        assert_eq!(codes.len(), 4);
    }

    #[test]
    fn high_fidelity_random_code_reduces() {
        let avqc = shift_noise_avqc(0.025, 3, 2).unwrap();
        let mu = RandomCode::uniform(letter_codes(3, 3).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = reduce_random_code(&mu, &avqc, 3, 0.05, 10, &mut rng).unwrap();
        assert!((r.expected_fidelity - 0.975).abs() < 1e-12);
        assert!(matches!(r.outcome, ReductionOutcome::Reduced { attempts: 1, .. }));
    }

    #[test]
    fn low_fidelity_random_code_is_reported() {
        let avqc = shift_noise_avqc(0.5, 3, 2).unwrap();
        let mu = RandomCode::uniform(letter_codes(3, 2).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = reduce_random_code(&mu, &avqc, 2, 0.05, 5, &mut rng).unwrap();
        assert!(matches!(r.outcome, ReductionOutcome::Exhausted { attempts: 5, .. }));
    }

    #[test]
    fn perfect_parts_give_perfect_composite() {
        let avqc = shift_noise_avqc(0.0, 3, 2).unwrap();
        let code = derandomize(letter_codes(3, 3).unwrap(), basis_message_code(3, 2).unwrap(), &avqc, 3, 2).unwrap();
        assert_eq!(code.block_length(), 5);
        let check = code.verify(&avqc).unwrap();
        assert!((check.worst.value - 1.0).abs() < 1e-12);
        assert!(check.holds);
    }

    #[test]
    fn noisy_parts_meet_the_guarantee() {
        let avqc = shift_noise_avqc(0.025, 3, 2).unwrap();
        let code = derandomize(letter_codes(3, 3).unwrap(), basis_message_code(3, 2).unwrap(), &avqc, 3, 2).unwrap();
        let check = code.verify(&avqc).unwrap();
        assert!(check.eps_codes.max(check.eps_classical) <= 0.05);
        assert!(check.holds, "{check:?}");
        assert!(check.worst.value >= 0.9);
    }

    #[test]
    fn linearity_matches_explicit_composite() {
        let avqc = shift_noise_avqc(0.2, 2, 1).unwrap();
        let code = derandomize(letter_codes(2, 2).unwrap(), basis_message_code(2, 2).unwrap(), &avqc, 2, 2).unwrap();
        let pair = code.to_code_pair().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let other = shift_noise_avqc(0.35, 2, 1).unwrap();
        let mixed = Avqc::new(vec![avqc.channel(0).clone(), other.channel(0).clone()]).unwrap();
        for _ in 0..3 {
            let seq: Vec<usize> = (0..4).map(|_| rng.random_range(0..2)).collect();
            let explicit = pair.fidelity(&mixed.sequence_channel(&seq).unwrap()).unwrap();
            let linear = code.fidelity(&mixed, &seq[..2], &seq[2..]).unwrap();
            assert!((explicit - linear).abs() < 1e-12, "{explicit} vs {linear}");
        }
    }

    #[test]
    fn derandomize_rejects_mismatches() {
        let avqc = shift_noise_avqc(0.0, 3, 2).unwrap();
        assert!(derandomize(letter_codes(3, 2).unwrap(), basis_message_code(3, 2).unwrap(), &avqc, 2, 2).is_err());
        assert!(derandomize(letter_codes(3, 3).unwrap(), basis_message_code(3, 2).unwrap(), &avqc, 2, 2).is_err());
    }

    #[test]
    fn inner_product_lemma() {
        assert!(inner_product_bound(&[1.0; 4], &[1.0; 4]).unwrap().holds);
        let e = 0.2;
        let c = inner_product_bound(&[1.0 - e; 3], &[1.0 - e; 3]).unwrap();
        assert!((c.product_average - (1.0 - e) * (1.0 - e)).abs() < 1e-15 && c.holds);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(inner_product_sweep(10_000, &mut rng).unwrap(), 0);
    }
}
