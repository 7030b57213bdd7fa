//! One function per subcommand; each returns a finished report.

use std::path::Path;

use avqc::capacity::{erasure_capacity, maximin_ic, single_letter_certificate, SingleLetterCertificate, STATE_DIM_BUDGET};
use avqc::channels::{is_degradable, QuantumChannel, DEFAULT_TENSOR_BUDGET};
use avqc::coding_sim::{
    basis_message_code, derandomize, evaluate_avg_error, evaluate_max_error, evaluate_random_code, haar_twirl_fidelity,
    inner_product_sweep, letter_codes, lipschitz_median_checks, reduce_random_code, robustification_sweep,
    shift_noise_avqc, strong_subspace_equivalence, type_class_bound_margin, RandomCode,
};
use avqc::numerics::{SdpSettings, VerdictKind};
use avqc::symmetrizability::{symmetrizability_report, Avqc, StateSampler, DEFAULT_LP_BUDGET, DEFAULT_SEQUENCE_BUDGET};
use avqc::zero_error::{
    avqc_zero_error_bridge, confusability_space, interior_zero_capacity_check, lovasz_theta_tilde, BridgeOutcome,
    ZERO_ERROR_TOL,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::input::{digest, load_avqc, read_json, CheckName, Code, CodeFile, SimulateConfig, SCHEMA_VERSION};
use crate::report::{Report, Status};

/// Settings shared by every command.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub l: usize,
    pub tol: f64,
    pub seed: u64,
    pub restarts: usize,
    pub extra_states: usize,
}

/// Sampled mixtures per certificate search.
const CERT_SAMPLES: usize = 4;

fn budget(ctx: &Ctx) -> Value {
    json!({
        "sequence_budget": DEFAULT_SEQUENCE_BUDGET,
        "lp_budget": DEFAULT_LP_BUDGET,
        "state_dim_budget": STATE_DIM_BUDGET,
        "tensor_budget": DEFAULT_TENSOR_BUDGET,
        "restarts": ctx.restarts,
        "sdp_max_iter": SdpSettings::default().max_iter,
    })
}

fn report(command: &str, ctx: &Ctx, inputs: &[&[u8]], summary: Value, records: Vec<Value>, status: Status) -> Report {
    Report {
        command: command.into(),
        schema_version: SCHEMA_VERSION,
        inputs_digest: digest(inputs),
        seed: ctx.seed,
        tol: ctx.tol,
        budget: budget(ctx),
        summary,
        records,
        status,
    }
}

fn label(avqc: &Avqc, s: usize) -> String {
    avqc.labels().get(s).cloned().unwrap_or_else(|| s.to_string())
}

fn require<'a>(path: Option<&'a Path>, flag: &str) -> CliResult<&'a Path> {
    path.ok_or_else(|| CliError::Usage(format!("this command needs {flag}")))
}

/// Closed form when every member is an erasure channel with the same `d`.
fn erasure_parameters(avqc: &Avqc) -> Option<Vec<f64>> {
    let d = avqc.dim_in();
    avqc.channels()
        .iter()
        .map(|c| {
            let p = 1.0 - avqc::channels::entanglement_fidelity(&avqc::channels::DensityOperator::maximally_mixed(d), c).ok()?;
            let e = QuantumChannel::erasure(p, d).ok()?;
            (e.choi_distance(c).ok()? < 1e-9).then_some(p)
        })
        .collect()
}

pub fn capacity(channels: Option<&Path>, ctx: &Ctx) -> CliResult<Report> {
    let loaded = load_avqc(require(channels, "--channels")?)?;
    let avqc = &loaded.value;
    let r = maximin_ic(avqc, ctx.l, ctx.restarts, ctx.seed, ctx.tol)?;
    let cert = single_letter_certificate(avqc, CERT_SAMPLES, ctx.seed, &SdpSettings::default())?;
    let closed = erasure_parameters(avqc).and_then(|ps| erasure_capacity(&ps, avqc.dim_in()).ok());
    let record = json!({
        "l": ctx.l,
        "value_bits": r.value,
        "value_per_letter": r.per_letter(),
        "best_state": r.best_state.matrix().as_matrix().to_pairs(),
        "worst_mix": r.worst_mix,
        "certified": r.certified,
        "certificate_kind": cert.kind(),
        "per_restart": r.per_restart,
    });
    let status = if matches!(cert, SingleLetterCertificate::Undecided(_)) { Status::Undecided } else { Status::Ok };
    let summary = json!({
        "value_bits": r.value,
        "certificate_kind": cert.kind(),
        "erasure_closed_form": closed,
    });
    Ok(report("capacity", ctx, &[&loaded.bytes], summary, vec![record], status))
}

pub fn symmetrize(channels: Option<&Path>, ctx: &Ctx) -> CliResult<Report> {
    let loaded = load_avqc(require(channels, "--channels")?)?;
    let sampler = StateSampler::BasisPairAndRandom { extra: ctx.extra_states };
    let rep = symmetrizability_report(&loaded.value, ctx.l, sampler, ctx.seed, ctx.tol)?;
    let undecided = rep.records.iter().any(|r| r.verdict == VerdictKind::Undecided);
    let records = rep
        .records
        .iter()
        .map(|r| serde_json::to_value(r).expect("record serializes"))
        .collect();
    let summary = json!({
        "l_max": rep.l_max,
        "sampler": rep.sampler,
        "average_error": rep.average_error,
        "maximal_error": rep.maximal_error,
        "qc": rep.qc,
        "caveat": rep.caveat,
    });
    let status = if undecided { Status::Undecided } else { Status::Ok };
    Ok(report("symmetrize", ctx, &[&loaded.bytes], summary, records, status))
}

fn load_code(path: &Path) -> CliResult<(Code, Vec<u8>)> {
    let file: crate::input::Loaded<CodeFile> = read_json(path)?;
    Ok((file.value.to_code(path)?, file.bytes))
}

pub fn zero_error(channels: Option<&Path>, code: Option<&Path>, ctx: &Ctx) -> CliResult<Report> {
    let loaded = load_avqc(require(channels, "--channels")?)?;
    let avqc = &loaded.value;
    let mut records = Vec::new();
    let mut undecided = false;
    for (s, ch) in avqc.channels().iter().enumerate() {
        let space = confusability_space(ch);
        let interior = interior_zero_capacity_check(ch);
        let theta = lovasz_theta_tilde(&space, ctx.tol)?;
        undecided |= !theta.converged;
        records.push(json!({
            "channel": label(avqc, s),
            "confusability_dim": space.dimension(),
            "zero_capacities": interior.zero_capacities,
            "explanation": interior.explanation,
            "theta": theta,
        }));
    }
    let mut inputs = vec![loaded.bytes.clone()];
    let mut summary = json!({ "channels": avqc.len() });
    if let Some(path) = code {
        let (code, bytes) = load_code(path)?;
        inputs.push(bytes);
        let pair = match code {
            Code::Random(mu) if mu.entries().len() == 1 => mu.entries()[0].0.clone(),
            _ => return Err(CliError::Usage("zero-error expects a code file of kind \"quantum\"".into())),
        };
        let outcome = avqc_zero_error_bridge(avqc, ctx.l, &pair, ZERO_ERROR_TOL)?;
        summary["bridge"] = serde_json::to_value(&outcome).expect("outcome serializes");
        summary["zero_error_code"] = json!(matches!(outcome, BridgeOutcome::Verified { .. }));
    }
    let refs: Vec<&[u8]> = inputs.iter().map(|b| b.as_slice()).collect();
    let status = if undecided { Status::Undecided } else { Status::Ok };
    Ok(report("zero-error", ctx, &refs, summary, records, status))
}

fn random_code_records(mu: &RandomCode, avqc: &Avqc, l: usize) -> CliResult<Vec<Value>> {
    avqc.sequences(l)?
        .into_iter()
        .map(|s| {
            let f = mu.expected_fidelity(&avqc.sequence_channel(&s)?)?;
            Ok(json!({ "sequence": s, "fidelity": f }))
        })
        .collect()
}

pub fn verify_code(channels: Option<&Path>, code: Option<&Path>, ctx: &Ctx) -> CliResult<Report> {
    let loaded = load_avqc(require(channels, "--channels")?)?;
    let avqc = &loaded.value;
    let (code, bytes) = load_code(require(code, "--code")?)?;
    let (summary, records) = match code {
        Code::Random(mu) => {
            let worst = evaluate_random_code(&mu, avqc, ctx.l)?;
            let summary = json!({
                "kind": if mu.entries().len() == 1 { "quantum" } else { "random" },
                "worst_fidelity": worst.value,
                "worst_sequence": worst.sequence,
                "zero_error": worst.value >= 1.0 - ZERO_ERROR_TOL,
            });
            (summary, random_code_records(&mu, avqc, ctx.l)?)
        }
        Code::Classical(code) => {
            let avg = evaluate_avg_error(&code, avqc, ctx.l)?;
            let max = evaluate_max_error(&code, avqc, ctx.l)?;
            let mut records = Vec::new();
            for s in avqc.sequences(ctx.l)? {
                let t = code.transition(&avqc.sequence_channel(&s)?)?;
                let errs: Vec<f64> = (0..t.len()).map(|i| 1.0 - t[i][i]).collect();
                records.push(json!({
                    "sequence": s,
                    "average_error": errs.iter().sum::<f64>() / errs.len() as f64,
                    "maximal_error": errs.iter().copied().fold(0.0, f64::max),
                }));
            }
            let summary = json!({
                "kind": "classical",
                "messages": code.len(),
                "average_error": avg.value,
                "average_error_sequence": avg.sequence,
                "maximal_error": max.value,
                "maximal_error_sequence": max.sequence,
            });
            (summary, records)
        }
    };
    Ok(report("verify-code", ctx, &[&loaded.bytes, &bytes], summary, records, Status::Ok))
}

pub fn analyze(channels: Option<&Path>, ctx: &Ctx) -> CliResult<Report> {
    let loaded = load_avqc(require(channels, "--channels")?)?;
    let avqc = &loaded.value;
    let settings = SdpSettings::default();
    let mut records = Vec::new();
    let mut undecided = false;
    for (s, ch) in avqc.channels().iter().enumerate() {
        let deg = is_degradable(ch, &settings)?;
        undecided |= deg.kind() == VerdictKind::Undecided;
        let interior = interior_zero_capacity_check(ch);
        records.push(json!({
            "channel": label(avqc, s),
            "dim_in": ch.dim_in(),
            "dim_out": ch.dim_out(),
            "kraus_count": ch.kraus().len(),
            "tp_residual": ch.tp_residual(),
            "degradable": deg.kind(),
            "degradable_residual": deg.residual,
            "confusability_dim": interior.confusability_dim,
            "zero_capacities": interior.zero_capacities,
        }));
    }
    let sym = symmetrizability_report(avqc, 1, StateSampler::BasisPair, ctx.seed, ctx.tol)?;
    undecided |= sym.records.iter().any(|r| r.verdict == VerdictKind::Undecided);
    let cap = maximin_ic(avqc, 1, ctx.restarts, ctx.seed, ctx.tol)?;
    let summary = json!({
        "members": avqc.len(),
        "maximin_ic_l1": cap.value,
        "erasure_closed_form": erasure_parameters(avqc).and_then(|ps| erasure_capacity(&ps, avqc.dim_in()).ok()),
        "average_error": sym.average_error,
        "maximal_error": sym.maximal_error,
        "qc": sym.qc,
    });
    let status = if undecided { Status::Undecided } else { Status::Ok };
    Ok(report("analyze", ctx, &[&loaded.bytes], summary, records, status))
}

pub fn simulate(config: Option<&Path>, channels: Option<&Path>, ctx: &Ctx) -> CliResult<Report> {
    let path = require(config, "--config")?;
    let cfg: crate::input::Loaded<SimulateConfig> = read_json(path)?;
    let mut inputs = vec![cfg.bytes.clone()];
    let c = &cfg.value;
    let avqc = match (&c.avqc, channels) {
        (Some(file), _) => Some(file.to_avqc(path)?),
        (None, Some(p)) => {
            let l = load_avqc(p)?;
            inputs.push(l.bytes);
            Some(l.value)
        }
        (None, None) => None,
    };
    let need_avqc = || avqc.as_ref().ok_or_else(|| CliError::Usage(format!("check {:?} needs channels", c.check)));
    let seed = c.seed.unwrap_or(ctx.seed);
    let l = c.l.unwrap_or(ctx.l);
    let n = c.n_samples;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let code = match &c.code {
        Some(f) => Some(f.to_code(path)?),
        None => None,
    };
    let random_code = || match &code {
        Some(Code::Random(mu)) => Ok(mu),
        _ => Err(CliError::Usage(format!("check {:?} needs a quantum or random code", c.check))),
    };
    let mut records = Vec::new();
    let mut status = Status::Ok;
    let summary = match c.check {
        CheckName::HaarTwirl => {
            let avqc = need_avqc()?;
            let mut all = true;
            for (s, ch) in avqc.channels().iter().enumerate() {
                let t = haar_twirl_fidelity(ch, n.unwrap_or(100_000), seed.wrapping_add(s as u64))?;
                all &= t.agrees();
                records.push(json!({
                    "channel": label(avqc, s),
                    "twirl": t,
                    "agrees": t.agrees(),
                    "agrees_with_general": t.agrees_with_general(),
                }));
            }
            json!({ "all_agree": all })
        }
        CheckName::Lipschitz => {
            let avqc = need_avqc()?;
            let mut violations = 0;
            for (s, ch) in avqc.channels().iter().enumerate() {
                let r = lipschitz_median_checks(ch, n.unwrap_or(10_000), seed.wrapping_add(s as u64))?;
                violations += r.violations;
                records.push(json!({ "channel": label(avqc, s), "report": r }));
            }
            json!({ "violations": violations })
        }
        CheckName::Robustification => {
            let alphabet = c.alphabet.or(avqc.as_ref().map(|a| a.len())).unwrap_or(2);
            let sweep = robustification_sweep(alphabet, l, n.unwrap_or(1000), &mut rng)?;
            json!({ "alphabet": alphabet, "l_max": l, "sweep": sweep })
        }
        CheckName::InnerProduct => {
            let count = n.unwrap_or(10_000);
            json!({ "instances": count, "violations": inner_product_sweep(count, &mut rng)? })
        }
        CheckName::TypeBound => {
            let alphabet = c.alphabet.unwrap_or(3);
            let margin = type_class_bound_margin(l, alphabet);
            json!({ "l_max": l, "alphabet_max": alphabet, "margin": margin, "holds": margin >= 1.0 })
        }
        CheckName::RandomCode => {
            let avqc = need_avqc()?;
            let mu = random_code()?;
            let worst = evaluate_random_code(mu, avqc, l)?;
            records = random_code_records(mu, avqc, l)?;
            json!({ "worst": worst })
        }
        CheckName::Reduce => {
            let avqc = need_avqc()?;
            let mu = random_code()?;
            let r = reduce_random_code(mu, avqc, l, c.eps.unwrap_or(0.05), c.retries.unwrap_or(20), &mut rng)?;
            if matches!(r.outcome, avqc::coding_sim::ReductionOutcome::Exhausted { .. }) {
                status = Status::Undecided;
            }
            serde_json::to_value(&r).expect("reduction serializes")
        }
        CheckName::Derandomize => {
            let m = c.m.unwrap_or(2);
            let avqc = match &avqc {
                Some(a) => a.clone(),
                None => shift_noise_avqc(c.eta.unwrap_or(1.0 - 0.95f64.sqrt()), 3, 2)?,
            };
            let code = derandomize(letter_codes(avqc.dim_in(), l)?, basis_message_code(avqc.dim_in(), m)?, &avqc, l, m)?;
            serde_json::to_value(code.verify(&avqc)?).expect("check serializes")
        }
        CheckName::Equivalence => {
            let avqc = need_avqc()?;
            let mu = random_code()?;
            let e = strong_subspace_equivalence(mu, avqc, l, n.unwrap_or(1000), &mut rng)?;
            serde_json::to_value(e).expect("check serializes")
        }
    };
    let refs: Vec<&[u8]> = inputs.iter().map(|b| b.as_slice()).collect();
    let ctx = Ctx { seed, l, ..ctx.clone() };
    let mut summary = summary;
    summary["check"] = json!(c.check);
    Ok(report("simulate", &ctx, &refs, summary, records, status))
}
