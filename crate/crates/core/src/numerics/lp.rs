//! Feasibility of `A x = b` over a product of probability simplices by the
//! first phase of a dense two-phase simplex method with Bland's rule.
//!
//! Only the feasibility phase is needed by the callers; the phase-one duals
//! yield a Farkas vector whenever the system is infeasible.

use super::feasibility::{FeasibilityResult, Verdict};
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 200_000;

/// Equality system over variables grouped into consecutive simplex blocks.
#[derive(Clone, Debug)]
pub struct SimplexSystem {
    /// Row-major equality rows, each of length `num_vars()`.
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    /// Sizes of the consecutive blocks; each block is a probability vector.
    pub blocks: Vec<usize>,
}

/// Farkas vector `y`: every point `x` of the simplex product satisfies
/// `y^T A x <= Σ_blocks max_v (A^T y)_v < y^T b`, so `A x = b` is impossible.
#[derive(Clone, Debug)]
pub struct FarkasCertificate {
    pub y: Vec<f64>,
}

impl SimplexSystem {
    pub fn num_vars(&self) -> usize {
        self.blocks.iter().sum()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.rows.len() != self.rhs.len() {
            return Err(Error::IllPosed(format!(
                "{} rows but {} right-hand sides",
                self.rows.len(),
                self.rhs.len()
            )));
        }
        if self.blocks.contains(&0) {
            return Err(Error::IllPosed("empty simplex block".into()));
        }
        for (i, r) in self.rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::IllPosed(format!(
                    "row {i} has {} entries, expected {n}",
                    r.len()
                )));
            }
            if r.iter().any(|v| !v.is_finite()) || !self.rhs[i].is_finite() {
                return Err(Error::IllPosed(format!("row {i} has non-finite data")));
            }
        }
        Ok(())
    }

    /// Max-norm of `A x - b`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, b)| (r.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest violation of the simplex constraints (negativity or block sums).
    pub fn simplex_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        let mut off = 0;
        for &b in &self.blocks {
            let block = &x[off..off + b];
            worst = worst.max(block.iter().fold(0.0, |m: f64, &v| m.max(-v)));
            worst = worst.max((block.iter().sum::<f64>() - 1.0).abs());
            off += b;
        }
        worst
    }

    /// `y^T b - Σ_blocks max_v (A^T y)_v`; positive means `y` certifies infeasibility.
    pub fn farkas_gap(&self, cert: &FarkasCertificate) -> f64 {
        let n = self.num_vars();
        let mut aty = vec![0.0; n];
        for (r, yi) in self.rows.iter().zip(&cert.y) {
            for (o, a) in aty.iter_mut().zip(r) {
                *o += a * yi;
            }
        }
        let yb: f64 = cert.y.iter().zip(&self.rhs).map(|(y, b)| y * b).sum();
        let mut off = 0;
        let mut max_sum = 0.0;
        for &b in &self.blocks {
            max_sum += aty[off..off + b]
                .iter()
                .fold(f64::NEG_INFINITY, |m, &v| m.max(v));
            off += b;
        }
        yb - max_sum
    }

    /// Re-verifies a certificate by evaluating every simplex vertex.
    pub fn verify_certificate(&self, cert: &FarkasCertificate) -> bool {
        let scale = cert.y.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        self.farkas_gap(cert) > 1e-10 * scale
    }
}

/// Decides feasibility of `A x = b`, `x` in the product of simplices.
///
/// `Feasible` carries a witness with `||A x - b||_∞ <= tol`; `Infeasible`
/// carries a Farkas vector verified by [`SimplexSystem::verify_certificate`].
pub fn lp_feasibility(
    system: &SimplexSystem,
    tol: f64,
) -> Result<FeasibilityResult<Vec<f64>, FarkasCertificate>> {
    system.validate()?;
    let n = system.num_vars();
    let m_eq = system.rows.len();

    // Assemble the full row set: equality rows followed by the block sums.
    // Identically-zero equality rows are either dropped or immediately decide
    // infeasibility.
    let mut rows: Vec<(Vec<f64>, f64, usize)> = Vec::new();
    for (i, (r, &b)) in system.rows.iter().zip(&system.rhs).enumerate() {
        let amax = r.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if amax <= 1e-14 {
            if b.abs() > tol {
                let mut y = vec![0.0; m_eq];
                y[i] = b.signum();
                return Ok(FeasibilityResult {
                    verdict: Verdict::Infeasible(FarkasCertificate { y }),
                    residual: b.abs(),
                    iterations: 0,
                });
            }
            continue;
        }
        rows.push((r.clone(), b, i));
    }
    let mut off = 0;
    for &bs in &system.blocks {
        let mut r = vec![0.0; n];
        r[off..off + bs].iter_mut().for_each(|v| *v = 1.0);
        rows.push((r, 1.0, usize::MAX));
        off += bs;
    }

    let m = rows.len();
    let width = n + m;
    // tableau rows: [coefficients | artificials] and rhs
    let mut tab = vec![0.0; m * width];
    let mut rhs = vec![0.0; m];
    let mut sign = vec![1.0; m];
    for (r, (coef, b, _)) in rows.iter().enumerate() {
        let s = if *b < 0.0 { -1.0 } else { 1.0 };
        sign[r] = s;
        for j in 0..n {
            tab[r * width + j] = s * coef[j];
        }
        tab[r * width + n + r] = 1.0;
        rhs[r] = s * b;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // reduced costs for phase one: cost 1 on artificials
    let mut red = vec![0.0; width];
    for j in 0..n {
        red[j] = -(0..m).map(|r| tab[r * width + j]).sum::<f64>();
    }
    let mut obj: f64 = rhs.iter().sum();

    let mut pivots = 0;
    while let Some(enter) = (0..width).find(|&j| red[j] < -PIVOT_TOL) {
        // ratio test, ties broken by lowest basic variable index
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..m {
            let a = tab[r * width + enter];
            if a > PIVOT_TOL {
                let ratio = rhs[r] / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - 1e-14
                            || ((ratio - lratio).abs() <= 1e-14 && basis[r] < basis[lr])
                        {
                            Some((r, ratio))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
        }
        let Some((lr, _)) = leave else {
            // phase one is bounded below by zero; an unbounded ray signals
            // numerical breakdown
            return Err(Error::IllPosed("unbounded ray in phase one".into()));
        };
        pivot(&mut tab, &mut rhs, &mut red, &mut obj, width, m, lr, enter);
        basis[lr] = enter;
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Ok(FeasibilityResult {
                verdict: Verdict::Undecided,
                residual: obj,
                iterations: pivots,
            });
        }
    }

    if obj > tol {
        // duals u_r = 1 - reduced cost of artificial r, undoing the row sign
        let mut y = vec![0.0; m_eq];
        for (r, (_, _, orig)) in rows.iter().enumerate() {
            if *orig != usize::MAX {
                y[*orig] = (1.0 - red[n + r]) * sign[r];
            }
        }
        let cert = FarkasCertificate { y };
        if system.verify_certificate(&cert) {
            return Ok(FeasibilityResult {
                verdict: Verdict::Infeasible(cert),
                residual: obj,
                iterations: pivots,
            });
        }
        return Ok(FeasibilityResult {
            verdict: Verdict::Undecided,
            residual: obj,
            iterations: pivots,
        });
    }

    let mut x = vec![0.0; n];
    for (r, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = rhs[r].max(0.0);
        }
    }
    // renormalize blocks against round-off
    let mut off = 0;
    for &bs in &system.blocks {
        let s: f64 = x[off..off + bs].iter().sum();
        if s > 0.0 {
            x[off..off + bs].iter_mut().for_each(|v| *v /= s);
        }
        off += bs;
    }
    let residual = system.residual(&x);
    if residual <= tol {
        Ok(FeasibilityResult {
            verdict: Verdict::Feasible(x),
            residual,
            iterations: pivots,
        })
    } else {
        Ok(FeasibilityResult {
            verdict: Verdict::Undecided,
            residual,
            iterations: pivots,
        })
    }
}

#[allow(clippy::too_many_arguments)]
fn pivot(
    tab: &mut [f64],
    rhs: &mut [f64],
    red: &mut [f64],
    obj: &mut f64,
    width: usize,
    m: usize,
    pr: usize,
    pc: usize,
) {
    let p = tab[pr * width + pc];
    for j in 0..width {
        tab[pr * width + j] /= p;
    }
    rhs[pr] /= p;
    let prow: Vec<f64> = tab[pr * width..(pr + 1) * width].to_vec();
    for r in 0..m {
        if r == pr {
            continue;
        }
        let f = tab[r * width + pc];
        if f == 0.0 {
            continue;
        }
        for j in 0..width {
            tab[r * width + j] -= f * prow[j];
        }
        tab[r * width + pc] = 0.0;
        rhs[r] -= f * rhs[pr];
    }
    let f = red[pc];
    for j in 0..width {
        red[j] -= f * prow[j];
    }
    red[pc] = 0.0;
    *obj += f * rhs[pr];
}
