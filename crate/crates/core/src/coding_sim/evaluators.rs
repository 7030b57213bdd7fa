//! Worst-case evaluation of codes over every state sequence.

use rayon::prelude::*;
use serde::Serialize;

use super::code::{ClassicalCode, RandomCode};
use crate::error::{Error, Result};
use crate::symmetrizability::Avqc;

/// A worst case over `S^l` together with the sequence attaining it.
#[derive(Clone, Debug, Serialize)]
pub struct WorstCase {
    pub value: f64,
    pub sequence: Vec<usize>,
}

/// Evaluates `score` on every sequence in parallel and keeps the worst one
/// under `worse`. Ties go to the lexicographically first sequence.
fn worst_over_sequences<F>(avqc: &Avqc, l: usize, score: F, higher_is_worse: bool) -> Result<WorstCase>
where
    F: Fn(&[usize]) -> Result<f64> + Sync,
{
    let seqs = avqc.sequences(l)?;
    let values: Vec<f64> = seqs.par_iter().map(|s| score(s)).collect::<Result<_>>()?;
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        let better = if higher_is_worse { *v > values[best] } else { *v < values[best] };
        if better {
            best = k;
        }
    }
    Ok(WorstCase {
        value: values[best],
        sequence: seqs[best].clone(),
    })
}

fn check_classical(code: &ClassicalCode, avqc: &Avqc, l: usize) -> Result<()> {
    if code.is_empty() {
        return Err(Error::Domain("empty message code".into()));
    }
    let din = avqc.dim_in().pow(l as u32);
    let dout = avqc.dim_out().pow(l as u32);
    if code.states()[0].dim() != din || code.decoder().dim() != dout {
        return Err(Error::Shape(format!(
            "code on {}→{} does not match block length {l} ({din}→{dout})",
            code.states()[0].dim(),
            code.decoder().dim()
        )));
    }
    Ok(())
}

/// `max_{s^l} (1/M) Σ_i (1 − tr(N_{s^l}(ρ_i) D_i))`.
pub fn evaluate_avg_error(code: &ClassicalCode, avqc: &Avqc, l: usize) -> Result<WorstCase> {
    check_classical(code, avqc, l)?;
    let m = code.len() as f64;
    worst_over_sequences(
        avqc,
        l,
        |s| {
            let t = code.transition(&avqc.sequence_channel(s)?)?;
            Ok((0..t.len()).map(|i| 1.0 - t[i][i]).sum::<f64>() / m)
        },
        true,
    )
}

/// `max_{s^l} max_i (1 − tr(N_{s^l}(ρ_i) D_i))`.
pub fn evaluate_max_error(code: &ClassicalCode, avqc: &Avqc, l: usize) -> Result<WorstCase> {
    check_classical(code, avqc, l)?;
    worst_over_sequences(
        avqc,
        l,
        |s| {
            let t = code.transition(&avqc.sequence_channel(s)?)?;
            Ok((0..t.len()).map(|i| 1.0 - t[i][i]).fold(0.0, f64::max))
        },
        true,
    )
}

/// `inf_{s^l} Σ_i w_i F_e(π_F, R_i ∘ N_{s^l} ∘ P_i)`.
pub fn evaluate_random_code(mu: &RandomCode, avqc: &Avqc, l: usize) -> Result<WorstCase> {
    if mu.entries().is_empty() {
        return Err(Error::Domain("random code with empty support".into()));
    }
    worst_over_sequences(avqc, l, |s| mu.expected_fidelity(&avqc.sequence_channel(s)?), false)
}
