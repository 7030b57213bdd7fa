use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::inner::{ic_min_over_hull, inner_min, HullObjective};
use crate::channels::{coherent_information, DensityOperator};
use crate::error::{Error, Result};
use crate::numerics::matrix::{ComplexMatrix, HermitianMatrix, C64};
use crate::symmetrizability::Avqc;

pub const DEFAULT_RESTARTS: usize = 20;
/// Cap on `d_in^l`, the dimension of the optimized state.
pub const STATE_DIM_BUDGET: usize = 16;
const MAX_ASCENT_ITER: usize = 80;
const FD_STEP: f64 = 1e-6;

/// Certified lower bound on `max_ρ min_{N ∈ conv} I_c(ρ, N^{⊗l})`.
#[derive(Clone, Debug)]
pub struct MaximinResult {
    /// Bits per block of length `l`.
    pub value: f64,
    pub l: usize,
    pub best_state: DensityOperator,
    pub worst_mix: Vec<f64>,
    /// Inner minimum solved to global optimality (convex case).
    pub certified: bool,
    /// Best value reached by each restart, in restart order.
    pub per_restart: Vec<f64>,
}

impl MaximinResult {
    pub fn per_letter(&self) -> f64 {
        self.value / self.l as f64
    }
}

fn state_from_factor(a: &ComplexMatrix) -> DensityOperator {
    let m = HermitianMatrix::from_hermitian_part(&a.matmul(&a.adjoint()));
    let tr = m.trace();
    DensityOperator::with_tolerance(m.scale(1.0 / tr), 1e-6).expect("factor parametrization is PSD")
}

fn perturbed(a: &ComplexMatrix, k: usize, h: f64) -> ComplexMatrix {
    let mut data = a.data().to_vec();
    let (idx, imag) = (k / 2, k % 2 == 1);
    data[idx] += if imag { C64::new(0.0, h) } else { C64::new(h, 0.0) };
    ComplexMatrix::from_vec(a.rows(), a.cols(), data).expect("same shape")
}

/// Projected ascent on the square-root factor `A`, `ρ = AA†/tr(AA†)`. The
/// gradient at a fixed worst mixture stands in for the gradient of the
/// min (Danskin); steps are accepted only if the true maximin improves.
fn ascend(avqc: &Avqc, l: usize, start: ComplexMatrix, tol: f64) -> Result<(f64, DensityOperator, Vec<f64>)> {
    let n = avqc.len();
    let value_at = |a: &ComplexMatrix| -> Result<(f64, Vec<f64>)> {
        let rho = state_from_factor(a);
        let obj = HullObjective::new(&rho, avqc, l)?;
        let r = inner_min(&obj, n, l, tol, false)?;
        Ok((r.value, r.q))
    };
    let mut a = start;
    let (mut f, mut q) = value_at(&a)?;
    let mut eta: f64 = 0.5;
    for _ in 0..MAX_ASCENT_ITER {
        let rho = state_from_factor(&a);
        let obj = HullObjective::new(&rho, avqc, l)?;
        let ch = obj.channel(&q)?;
        let base = coherent_information(&rho, &ch)?;
        let nparams = 2 * a.rows() * a.cols();
        let grad: Vec<f64> = (0..nparams)
            .map(|k| {
                let plus = coherent_information(&state_from_factor(&perturbed(&a, k, FD_STEP)), &ch)?;
                let minus = coherent_information(&state_from_factor(&perturbed(&a, k, -FD_STEP)), &ch)?;
                Ok((plus - minus) / (2.0 * FD_STEP))
            })
            .collect::<Result<_>>()?;
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < 1e-9 || !base.is_finite() {
            break;
        }
        let mut improved = false;
        eta = (eta * 2.0).min(4.0);
        for _ in 0..12 {
            let mut cand = a.clone();
            for (k, g) in grad.iter().enumerate() {
                cand = perturbed(&cand, k, eta * g / gnorm);
            }
            let (fc, qc) = value_at(&cand)?;
            if fc > f + 1e-12 {
                let gain = fc - f;
                a = cand;
                f = fc;
                q = qc;
                improved = true;
                if gain < 0.1 * tol {
                    return Ok((f, state_from_factor(&a), q));
                }
                break;
            }
            eta *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((f, state_from_factor(&a), q))
}

/// Best maximin value over seeded restarts. Restart 0 starts from the
/// maximally mixed state; restart `r` draws its start from stream `r` of the
/// seeded generator, so adding restarts never lowers the result.
pub fn maximin_ic(avqc: &Avqc, l: usize, restarts: usize, seed: u64, tol: f64) -> Result<MaximinResult> {
    if l == 0 {
        return Err(Error::Domain("block length must be positive".into()));
    }
    let dim = avqc.dim_in().checked_pow(l as u32).unwrap_or(usize::MAX);
    if dim > STATE_DIM_BUDGET {
        return Err(Error::Budget {
            requested: dim,
            budget: STATE_DIM_BUDGET,
        });
    }
    let restarts = restarts.max(1);
    let runs: Vec<(f64, DensityOperator, Vec<f64>)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                ComplexMatrix::identity(dim)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(r as u64);
                ComplexMatrix::from_fn(dim, dim, |_, _| {
                    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                })
            };
            ascend(avqc, l, start, tol)
        })
        .collect::<Result<_>>()?;
    let per_restart: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let best = runs
        .into_iter()
        .enumerate()
        .fold(None::<(usize, (f64, DensityOperator, Vec<f64>))>, |acc, (i, run)| match acc {
            Some((j, b)) if b.0 >= run.0 => Some((j, b)),
            _ => Some((i, run)),
        })
        .expect("at least one restart")
        .1;
    // final value with the full inner search (grid included)
    let inner = ic_min_over_hull(&best.1, avqc, l, tol)?;
    Ok(MaximinResult {
        value: inner.value.min(best.0),
        l,
        best_state: best.1,
        worst_mix: if inner.value <= best.0 { inner.q } else { best.2 },
        certified: inner.certified,
        per_restart,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::QuantumChannel;

    #[test]
    fn erasure_pair_gives_closed_form() {
        let avqc = Avqc::erasure(&[0.1, 0.3], 2).unwrap();
        let r = maximin_ic(&avqc, 1, 4, 0, 1e-9).unwrap();
        assert!((r.value - 0.4).abs() < 1e-6, "{}", r.value);
        assert!(r.certified);
        assert!((r.worst_mix[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn identity_gives_one_bit() {
        let avqc = Avqc::new(vec![QuantumChannel::identity(2)]).unwrap();
        let r = maximin_ic(&avqc, 1, 3, 1, 1e-9).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn dephasing_pair_beats_diagonal_grid() {
        let avqc = Avqc::new(vec![
            QuantumChannel::dephasing(0.1, 2).unwrap(),
            QuantumChannel::dephasing(0.25, 2).unwrap(),
        ])
        .unwrap();
        let r = maximin_ic(&avqc, 1, 4, 3, 1e-9).unwrap();
        let mut grid = f64::NEG_INFINITY;
        for k in 0..=100 {
            let x = k as f64 / 100.0;
            let rho = DensityOperator::diagonal(&[x, 1.0 - x]).unwrap();
            let v = ic_min_over_hull(&rho, &avqc, 1, 1e-9).unwrap().value;
            grid = grid.max(v);
        }
        assert!(r.value >= grid - 1e-4, "{} vs {}", r.value, grid);
    }

    #[test]
    fn more_restarts_never_lower_the_value() {
        let mut rng = <ChaCha8Rng as SeedableRng>::seed_from_u64(8);
        let avqc = Avqc::new(vec![
            QuantumChannel::random(2, 2, 2, &mut rng),
            QuantumChannel::random(2, 2, 2, &mut rng),
        ])
        .unwrap();
        let a = maximin_ic(&avqc, 1, 2, 5, 1e-9).unwrap();
        let b = maximin_ic(&avqc, 1, 5, 5, 1e-9).unwrap();
        assert_eq!(a.per_restart[..], b.per_restart[..2]);
        assert!(b.value >= a.value - 1e-9);
    }

    #[test]
    fn rejects_oversized_blocks() {
        let avqc = Avqc::erasure(&[0.1], 2).unwrap();
        assert!(matches!(maximin_ic(&avqc, 5, 1, 0, 1e-9), Err(Error::Budget { .. })));
    }
}
