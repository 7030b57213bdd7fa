//! Method of types: type classes, the multinomial lower bound and the
//! robustification check.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symmetrizability::{all_sequences, sequence_index, DEFAULT_SEQUENCE_BUDGET};

/// All letter-count vectors of sequences in `{0..n}^l`, lexicographic.
pub fn enumerate_types(l: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in (0..=left).rev() {
            cur.push(k);
            rec(n - 1, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, l, &mut Vec::new(), &mut out);
    }
    out
}

/// `|T_q^l| = l! / Π c_i!`.
pub fn type_class_size(counts: &[usize]) -> f64 {
    let mut size = 1.0;
    let mut placed = 0usize;
    for &c in counts {
        // multiply by C(placed + c, c) incrementally
        for j in 1..=c {
            placed += 1;
            size = size * placed as f64 / j as f64;
        }
    }
    size
}

/// `q^{⊗l}(T_q^l)` for the type `q = counts / l`.
pub fn type_class_prob(counts: &[usize]) -> f64 {
    let l: usize = counts.iter().sum();
    if l == 0 {
        return 1.0;
    }
    let log_p: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| c as f64 * (c as f64 / l as f64).ln())
        .sum();
    type_class_size(counts) * log_p.exp()
}

/// `q^{⊗l}(T_{q'}^l)` for an arbitrary distribution `q`.
fn class_weight(counts: &[usize], q: &[f64]) -> f64 {
    let mut w = type_class_size(counts);
    for (&c, &p) in counts.iter().zip(q) {
        if c > 0 {
            w *= p.powi(c as i32);
        }
    }
    w
}

/// Members of the type class with the given counts, lexicographic.
pub fn type_class(counts: &[usize]) -> Vec<Vec<usize>> {
    fn rec(counts: &mut [usize], left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for s in 0..counts.len() {
            if counts[s] > 0 {
                counts[s] -= 1;
                cur.push(s);
                rec(counts, left - 1, cur, out);
                cur.pop();
                counts[s] += 1;
            }
        }
    }
    let mut c = counts.to_vec();
    let l = c.iter().sum();
    let mut out = Vec::new();
    rec(&mut c, l, &mut Vec::with_capacity(l), &mut out);
    out
}

fn counts_of(seq: &[usize], n: usize) -> Vec<usize> {
    let mut c = vec![0; n];
    for &s in seq {
        c[s] += 1;
    }
    c
}

fn check_table(f: &[f64], n: usize, l: usize) -> Result<()> {
    let want = n.checked_pow(l as u32).unwrap_or(usize::MAX);
    if f.len() != want {
        return Err(Error::Shape(format!("table has {} entries, expected {n}^{l} = {want}", f.len())));
    }
    Ok(())
}

/// `(1/l!) Σ_σ f(σ(s^l))`, computed as the mean of `f` over the type class of
/// `s^l`. `f` is indexed by the lexicographic order of `{0..n}^l`.
pub fn permutation_average(f: &[f64], seq: &[usize], n: usize) -> Result<f64> {
    check_table(f, n, seq.len())?;
    let class = type_class(&counts_of(seq, n));
    Ok(class.iter().map(|s| f[sequence_index(s, n)]).sum::<f64>() / class.len() as f64)
}

/// Type-class means of `f`, one per type of [`enumerate_types`].
fn class_means(f: &[f64], n: usize, l: usize, types: &[Vec<usize>]) -> Vec<f64> {
    types
        .iter()
        .map(|c| {
            let class = type_class(c);
            class.iter().map(|s| f[sequence_index(s, n)]).sum::<f64>() / class.len() as f64
        })
        .collect::<Vec<_>>()
        .into_iter()
        .map(|m| if l == 0 { f[0] } else { m })
        .collect()
}

/// Smallest `γ` for which the hypothesis `Σ f(s^l) q^{⊗l}(s^l) ≥ 1 − γ`
/// holds at every type `q`, and the type attaining it.
pub fn hypothesis_gamma(f: &[f64], n: usize, l: usize) -> Result<(f64, Vec<usize>)> {
    check_table(f, n, l)?;
    let types = enumerate_types(l, n);
    let means = class_means(f, n, l, &types);
    let mut worst = (f64::NEG_INFINITY, types[0].clone());
    for q in &types {
        let qd: Vec<f64> = q.iter().map(|&c| c as f64 / l.max(1) as f64).collect();
        let avg: f64 = types.iter().zip(&means).map(|(c, m)| m * class_weight(c, &qd)).sum();
        if 1.0 - avg > worst.0 {
            worst = (1.0 - avg, q.clone());
        }
    }
    Ok((worst.0.max(0.0), worst.1))
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RobustificationOutcome {
    /// Hypothesis fails at this type; nothing to check.
    HypothesisNotMet { worst_type: Vec<usize>, deficit: f64 },
    Holds { min_average: f64, bound: f64 },
    /// Hypothesis holds and the conclusion fails: a counterexample to the
    /// theorem. Never expected.
    Violation { sequence: Vec<usize>, average: f64, bound: f64 },
}

impl RobustificationOutcome {
    pub fn is_violation(&self) -> bool {
        matches!(self, Self::Violation { .. })
    }
}

/// Checks the hypothesis over all types, then the conclusion
/// `(1/l!) Σ_σ f(σ(s^l)) ≥ 1 − (l+1)^{|S|} γ` over all sequences.
pub fn robustification_check(f: &[f64], gamma: f64, l: usize, n: usize) -> Result<RobustificationOutcome> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!("γ = {gamma} outside [0, 1]")));
    }
    if f.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::Domain("f must take values in [0, 1]".into()));
    }
    let (needed, worst_type) = hypothesis_gamma(f, n, l)?;
    if needed > gamma + 1e-12 {
        return Ok(RobustificationOutcome::HypothesisNotMet {
            worst_type,
            deficit: needed,
        });
    }
    let bound = 1.0 - ((l + 1) as f64).powi(n as i32) * gamma;
    let types = enumerate_types(l, n);
    let means = class_means(f, n, l, &types);
    let (mut min_avg, mut argmin) = (f64::INFINITY, 0);
    for (k, m) in means.iter().enumerate() {
        if *m < min_avg {
            min_avg = *m;
            argmin = k;
        }
    }
    if min_avg < bound - 1e-12 {
        return Ok(RobustificationOutcome::Violation {
            sequence: type_class(&types[argmin]).swap_remove(0),
            average: min_avg,
            bound,
        });
    }
    Ok(RobustificationOutcome::Holds {
        min_average: min_avg,
        bound,
    })
}

/// Random `f` table in one of three shapes (uniform, near-one with sparse
/// dips, type-dependent); callers pair it with its exact hypothesis `γ`.
pub fn random_f_table<R: Rng + ?Sized>(n: usize, l: usize, rng: &mut R) -> Result<Vec<f64>> {
    let seqs = all_sequences(n, l, DEFAULT_SEQUENCE_BUDGET)?;
    let style = rng.random_range(0..3);
    let type_bias: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    Ok(seqs
        .iter()
        .map(|s| match style {
            0 => rng.random::<f64>(),
            1 => {
                if rng.random::<f64>() < 0.1 {
                    1.0 - rng.random::<f64>() * 0.5
                } else {
                    1.0
                }
            }
            _ => {
                let m: f64 = s.iter().map(|&x| type_bias[x]).sum::<f64>() / l.max(1) as f64;
                (1.0 - 0.2 * m * rng.random::<f64>()).clamp(0.0, 1.0)
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RobustificationSweep {
    pub tables: usize,
    pub violations: usize,
    pub hypothesis_not_met: usize,
}

/// `tables` seeded random tables per block length `1..=l_max`, each checked
/// at its exact hypothesis `γ`.
pub fn robustification_sweep<R: Rng + ?Sized>(n: usize, l_max: usize, tables: usize, rng: &mut R) -> Result<RobustificationSweep> {
    let mut out = RobustificationSweep {
        tables: 0,
        violations: 0,
        hypothesis_not_met: 0,
    };
    for l in 1..=l_max {
        for _ in 0..tables {
            let f = random_f_table(n, l, rng)?;
            let (gamma, _) = hypothesis_gamma(&f, n, l)?;
            out.tables += 1;
            match robustification_check(&f, gamma.min(1.0), l, n)? {
                RobustificationOutcome::Violation { .. } => out.violations += 1,
                RobustificationOutcome::HypothesisNotMet { .. } => out.hypothesis_not_met += 1,
                RobustificationOutcome::Holds { .. } => {}
            }
        }
    }
    Ok(out)
}

/// Smallest ratio `q^{⊗l}(T_q^l) · (l+1)^{|S|}` over every type with
/// `l ≤ l_max`, `|S| ≤ n_max`; at least one when the bound holds.
pub fn type_class_bound_margin(l_max: usize, n_max: usize) -> f64 {
    let mut worst = f64::INFINITY;
    for n in 1..=n_max {
        for l in 1..=l_max {
            let scale = ((l + 1) as f64).powi(n as i32);
            for c in enumerate_types(l, n) {
                worst = worst.min(type_class_prob(&c) * scale);
            }
        }
    }
    worst
}
