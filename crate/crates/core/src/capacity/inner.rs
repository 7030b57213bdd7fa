//! `min_q I_c(ρ, N_q^{⊗l})` over the probability simplex.

use crate::channels::{coherent_information, DensityOperator, QuantumChannel};
use crate::error::{Error, Result};
use crate::symmetrizability::Avqc;

/// Step of the forward differences along simplex edges.
const FD_STEP: f64 = 1e-5;
const MAX_FW_ITER: usize = 200;
const GOLDEN_ITER: usize = 48;

/// Result of the inner minimization.
#[derive(Clone, Debug)]
pub struct InnerMin {
    pub value: f64,
    pub q: Vec<f64>,
    /// Frank–Wolfe gap estimate at `q`.
    pub gap: f64,
    /// True when the objective is convex in `q` (block length one), so that a
    /// small gap means a global minimum.
    pub certified: bool,
}

/// `q ↦ I_c(ρ, N_q^{⊗l})`.
pub struct HullObjective<'a> {
    rho: &'a DensityOperator,
    avqc: &'a Avqc,
    l: usize,
}

impl<'a> HullObjective<'a> {
    pub fn new(rho: &'a DensityOperator, avqc: &'a Avqc, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::Domain("block length must be positive".into()));
        }
        let d = avqc.dim_in().checked_pow(l as u32).unwrap_or(usize::MAX);
        if rho.dim() != d {
            return Err(Error::Shape(format!("state of dimension {}, expected {d}", rho.dim())));
        }
        Ok(Self { rho, avqc, l })
    }

    pub fn channel(&self, q: &[f64]) -> Result<QuantumChannel> {
        let mix = self.avqc.mixture(q)?.compressed();
        if self.l == 1 {
            Ok(mix)
        } else {
            mix.tensor_power(self.l)
        }
    }

    pub fn eval(&self, q: &[f64]) -> Result<f64> {
        coherent_information(self.rho, &self.channel(q)?)
    }
}

fn toward(q: &[f64], s: usize, t: f64) -> Vec<f64> {
    let mut out: Vec<f64> = q.iter().map(|x| (1.0 - t) * x).collect();
    out[s] += t;
    out
}

fn vertex(n: usize, s: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[s] = 1.0;
    v
}

/// Compositions of `steps` into `n` parts, scaled to the simplex.
fn simplex_grid(n: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(n - 1, left - k, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(n, steps, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|c| c.into_iter().map(|k| k as f64 / steps as f64).collect())
        .collect()
}

/// Frank–Wolfe from `start` with finite-difference directional derivatives
/// and golden-section line search.
pub(crate) fn frank_wolfe(obj: &HullObjective, start: Vec<f64>, tol: f64) -> Result<(Vec<f64>, f64, f64)> {
    let n = start.len();
    let mut q = start;
    let mut f = obj.eval(&q)?;
    let mut gap = f64::INFINITY;
    for _ in 0..MAX_FW_ITER {
        let mut best_s = 0;
        let mut best_d = f64::INFINITY;
        for s in 0..n {
            let d = (obj.eval(&toward(&q, s, FD_STEP))? - f) / FD_STEP;
            if d < best_d {
                best_d = d;
                best_s = s;
            }
        }
        gap = (-best_d).max(0.0);
        if gap <= tol {
            break;
        }
        // golden section on t ∈ [0, 1]
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (0.0, 1.0);
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let mut fc = obj.eval(&toward(&q, best_s, c))?;
        let mut fd = obj.eval(&toward(&q, best_s, d))?;
        for _ in 0..GOLDEN_ITER {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = obj.eval(&toward(&q, best_s, c))?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = obj.eval(&toward(&q, best_s, d))?;
            }
        }
        let mut t = 0.5 * (a + b);
        let mut ft = obj.eval(&toward(&q, best_s, t))?;
        let f1 = obj.eval(&vertex(n, best_s))?;
        if f1 < ft {
            t = 1.0;
            ft = f1;
        }
        if ft >= f - 1e-15 {
            break;
        }
        q = toward(&q, best_s, t);
        f = ft;
    }
    Ok((q, f, gap))
}

/// Global minimum of `q ↦ I_c(ρ, N_q^{⊗l})`.
///
/// Frank–Wolfe from the best vertex; for `|S| ≤ 3` a dense simplex grid is
/// scanned first and the descent starts from its best point. The map is
/// convex in `q` only for `l = 1`.
pub fn ic_min_over_hull(rho: &DensityOperator, avqc: &Avqc, l: usize, tol: f64) -> Result<InnerMin> {
    let obj = HullObjective::new(rho, avqc, l)?;
    inner_min(&obj, avqc.len(), l, tol, true)
}

pub(crate) fn inner_min(obj: &HullObjective, n: usize, l: usize, tol: f64, grid: bool) -> Result<InnerMin> {
    let mut best_q = vertex(n, 0);
    let mut best = f64::INFINITY;
    for s in 0..n {
        let v = obj.eval(&vertex(n, s))?;
        if v < best {
            best = v;
            best_q = vertex(n, s);
        }
    }
    if n == 1 {
        return Ok(InnerMin {
            value: best,
            q: best_q,
            gap: 0.0,
            certified: true,
        });
    }
    if grid && n <= 3 {
        let steps = match (n, l) {
            (2, 1) => 200,
            (2, _) => 40,
            (_, 1) => 50,
            _ => 20,
        };
        for q in simplex_grid(n, steps) {
            let v = obj.eval(&q)?;
            if v < best {
                best = v;
                best_q = q;
            }
        }
    }
    let (q, f, gap) = frank_wolfe(obj, best_q.clone(), tol)?;
    let (q, value) = if f <= best { (q, f) } else { (best_q, best) };
    Ok(InnerMin {
        value,
        q,
        gap,
        certified: l == 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn erasure_minimizer_is_the_worst_member() {
        let avqc = Avqc::erasure(&[0.1, 0.35, 0.2], 2).unwrap();
        let pi = DensityOperator::maximally_mixed(2);
        let r = ic_min_over_hull(&pi, &avqc, 1, 1e-9).unwrap();
        assert!((r.value - 0.3).abs() < 1e-9, "{}", r.value);
        assert!((r.q[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn singleton_is_plain_coherent_information() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ch = QuantumChannel::random(2, 2, 2, &mut rng);
        let rho = DensityOperator::random(2, 2, &mut rng);
        let avqc = Avqc::new(vec![ch.clone()]).unwrap();
        let r = ic_min_over_hull(&rho, &avqc, 1, 1e-9).unwrap();
        assert!((r.value - coherent_information(&rho, &ch).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn three_member_family_matches_grid_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..2 {
            let avqc = Avqc::new((0..3).map(|_| QuantumChannel::random(2, 2, 2, &mut rng)).collect()).unwrap();
            let rho = DensityOperator::random(2, 2, &mut rng);
            let r = ic_min_over_hull(&rho, &avqc, 1, 1e-9).unwrap();
            let obj = HullObjective::new(&rho, &avqc, 1).unwrap();
            let oracle = simplex_grid(3, 100)
                .into_iter()
                .map(|q| obj.eval(&q).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!(r.value <= oracle + 1e-4, "{} vs {}", r.value, oracle);
            assert!(r.value >= oracle - 1e-3);
        }
    }

    #[test]
    fn grid_counts() {
        assert_eq!(simplex_grid(2, 10).len(), 11);
        assert_eq!(simplex_grid(3, 4).len(), 15);
        for q in simplex_grid(3, 7) {
            assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
