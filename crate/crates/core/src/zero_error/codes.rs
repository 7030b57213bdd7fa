use serde::Serialize;

use crate::channels::QuantumChannel;
use crate::coding_sim::CodePair;
use crate::error::{Error, Result};
use crate::symmetrizability::{all_sequences, Avqc, DEFAULT_SEQUENCE_BUDGET};

/// `F_e ≥ 1 − ZERO_ERROR_TOL` counts as an exact zero-error code.
pub const ZERO_ERROR_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ZeroErrorCheck {
    pub fidelity: f64,
    pub zero_error: bool,
}

/// Checks `F_e(π_F, R ∘ N^{⊗l} ∘ P) ≥ 1 − tol`.
pub fn verify_zero_error_qcode(n: &QuantumChannel, l: usize, code: &CodePair, tol: f64) -> Result<ZeroErrorCheck> {
    let channel = n.tensor_power(l)?;
    check_block(&channel, code, tol)
}

fn check_block(channel: &QuantumChannel, code: &CodePair, tol: f64) -> Result<ZeroErrorCheck> {
    let fidelity = code.fidelity(channel)?;
    Ok(ZeroErrorCheck {
        fidelity,
        zero_error: fidelity >= 1.0 - tol,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum BridgeOutcome {
    /// Zero-error for the uniform mixture and for every `N_{s^l}`; the rate
    /// `(1/l) log dim F` lower-bounds the deterministic AVQC capacity.
    Verified { rate_bits: f64, sequences_checked: usize },
    MixtureFails { fidelity: f64 },
    SequenceFails { sequence: Vec<usize>, fidelity: f64 },
}

/// Verifies a code on the uniform mixture `N_𝕴^{⊗l}`, then re-verifies it on
/// every adversary sequence.
pub fn avqc_zero_error_bridge(avqc: &Avqc, l: usize, code: &CodePair, tol: f64) -> Result<BridgeOutcome> {
    if l == 0 {
        return Err(Error::Domain("block length must be positive".into()));
    }
    let uniform = vec![1.0 / avqc.len() as f64; avqc.len()];
    let mix = verify_zero_error_qcode(&avqc.mixture(&uniform)?, l, code, tol)?;
    if !mix.zero_error {
        return Ok(BridgeOutcome::MixtureFails { fidelity: mix.fidelity });
    }
    let seqs = avqc.sequences(l)?;
    for seq in &seqs {
        let c = check_block(&avqc.sequence_channel(seq)?, code, tol)?;
        if !c.zero_error {
            return Ok(BridgeOutcome::SequenceFails {
                sequence: seq.clone(),
                fidelity: c.fidelity,
            });
        }
    }
    Ok(BridgeOutcome::Verified {
        rate_bits: (code.f_dim() as f64).log2() / l as f64,
        sequences_checked: seqs.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceProbe {
    pub mixture_zero_error: bool,
    pub mixture_fidelity: f64,
    pub all_vertex_sequences_zero_error: bool,
    /// First vertex sequence on which the code fails, if any.
    pub failing_sequence: Option<Vec<usize>>,
    /// Both directions of the equivalence agree.
    pub consistent: bool,
}

/// Compares zero-error behavior on `(Σ w_i V_i)^{⊗l}` with that on every
/// vertex sequence `V_{s_1} ⊗ … ⊗ V_{s_l}`. With strictly positive weights
/// the two must agree.
pub fn face_constancy_probe(
    vertices: &[QuantumChannel],
    weights: &[f64],
    code: &CodePair,
    l: usize,
    tol: f64,
) -> Result<FaceProbe> {
    if weights.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::Domain("face probe needs strictly positive weights".into()));
    }
    let mixture = QuantumChannel::mix(vertices, weights)?;
    let m = verify_zero_error_qcode(&mixture, l, code, tol)?;
    let mut failing = None;
    for seq in all_sequences(vertices.len(), l, DEFAULT_SEQUENCE_BUDGET)? {
        let refs: Vec<&QuantumChannel> = seq.iter().map(|&s| &vertices[s]).collect();
        if !check_block(&QuantumChannel::tensor_all(&refs), code, tol)?.zero_error {
            failing = Some(seq);
            break;
        }
    }
    let all_ok = failing.is_none();
    Ok(FaceProbe {
        mixture_zero_error: m.zero_error,
        mixture_fidelity: m.fidelity,
        all_vertex_sequences_zero_error: all_ok,
        failing_sequence: failing,
        consistent: m.zero_error == all_ok,
    })
}
