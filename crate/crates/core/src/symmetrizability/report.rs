use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::avqc::Avqc;
use super::classical::{is_l_symmetrizable, maxerror_hull_intersection, HullIntersection};
use super::qc::is_qc_symmetrizable;
use crate::channels::DensityOperator;
use crate::error::Result;
use crate::numerics::feasibility::{Verdict, VerdictKind};
use crate::numerics::sdp::SdpSettings;

/// How the finite state sets fed to the per-set tests are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSampler {
    /// `|e_1⟩⟨e_1|^{⊗l}` and `|e_2⟩⟨e_2|^{⊗l}` only.
    BasisPair,
    /// The basis pair plus `extra` seeded random pure states.
    BasisPairAndRandom { extra: usize },
    /// `count` seeded random mixed states of full rank.
    RandomMixed { count: usize },
}

impl Default for StateSampler {
    fn default() -> Self {
        Self::BasisPairAndRandom { extra: 1 }
    }
}

/// One verdict of one test.
#[derive(Clone, Debug, Serialize)]
pub struct VerdictRecord {
    pub test: String,
    pub l: usize,
    pub states_digest: String,
    pub verdict: VerdictKind,
    pub residual: f64,
    pub certificate: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetrizabilityReport {
    pub l_max: usize,
    pub seed: u64,
    pub sampler: StateSampler,
    pub records: Vec<VerdictRecord>,
    /// Verdict on message transmission with average error.
    pub average_error: String,
    /// Verdict on message transmission with maximal error.
    pub maximal_error: String,
    pub qc: String,
    pub caveat: String,
}

const CAVEAT: &str = "symmetrizability quantifies over every finite state set; \
feasible verdicts here hold for the sampled sets only, infeasible verdicts are genuine counterexamples";

/// SHA-256 over the states' entries, each rounded to 12 significant digits.
pub fn states_digest(states: &[DensityOperator]) -> String {
    let mut h = Sha256::new();
    for r in states {
        h.update((r.dim() as u64).to_le_bytes());
        for z in r.matrix().as_matrix().data() {
            h.update(format!("{:.11e},{:.11e};", z.re, z.im).as_bytes());
        }
    }
    hex::encode(h.finalize())
}

fn sample_states(d: usize, l: usize, sampler: StateSampler, rng: &mut ChaCha8Rng) -> Vec<DensityOperator> {
    let dl = d.pow(l as u32);
    let basis_pair = || {
        vec![
            DensityOperator::basis(d, 0).tensor_power(l),
            DensityOperator::basis(d, 1).tensor_power(l),
        ]
    };
    match sampler {
        StateSampler::BasisPair => basis_pair(),
        StateSampler::BasisPairAndRandom { extra } => {
            let mut v = basis_pair();
            v.extend((0..extra).map(|_| DensityOperator::random(dl, 1, rng)));
            v
        }
        StateSampler::RandomMixed { count } => (0..count.max(2))
            .map(|_| DensityOperator::random(dl, dl, rng))
            .collect(),
    }
}

fn matrix_json(m: &crate::numerics::matrix::HermitianMatrix) -> Value {
    json!(m.as_matrix().to_pairs())
}

/// Runs the per-set LP tests for `l = 1..=l_max` and the qc SDP once.
/// Deterministic for a fixed seed.
pub fn symmetrizability_report(
    avqc: &Avqc,
    l_max: usize,
    sampler: StateSampler,
    seed: u64,
    tol: f64,
) -> Result<SymmetrizabilityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    let mut avg_witness = None;
    let mut max_witness = None;
    for l in 1..=l_max {
        let states = sample_states(avqc.dim_in(), l, sampler, &mut rng);
        let digest = states_digest(&states);

        let res = is_l_symmetrizable(avqc, &states, l, tol)?;
        let certificate = match &res.verdict {
            Verdict::Feasible(map) => json!({ "symmetrizing_map": map.rows }),
            Verdict::Infeasible(c) => json!({ "farkas_y": c.y }),
            Verdict::Undecided => Value::Null,
        };
        if res.is_infeasible() && avg_witness.is_none() {
            avg_witness = Some(l);
        }
        records.push(VerdictRecord {
            test: "l_symmetrizable".into(),
            l,
            states_digest: digest,
            verdict: res.kind(),
            residual: res.residual,
            certificate,
        });

        let pair = &states[..2];
        let hull = maxerror_hull_intersection(avqc, &pair[0], &pair[1], l, tol)?;
        let (verdict, residual, certificate) = match &hull {
            HullIntersection::Intersects { p1, p2, residual } => {
                (VerdictKind::Feasible, *residual, json!({ "p1": p1, "p2": p2 }))
            }
            HullIntersection::Separated { a, margin } => {
                (VerdictKind::Infeasible, *margin, json!({ "separating_operator": matrix_json(a), "margin": margin }))
            }
            HullIntersection::Undecided => (VerdictKind::Undecided, f64::NAN, Value::Null),
        };
        if hull.is_separated() && max_witness.is_none() {
            max_witness = Some(l);
        }
        records.push(VerdictRecord {
            test: "maxerror_hull_intersection".into(),
            l,
            states_digest: states_digest(pair),
            verdict,
            residual,
            certificate,
        });
    }

    let settings = SdpSettings {
        eq_tol: tol.max(1e-10),
        ..SdpSettings::default()
    };
    let qc = is_qc_symmetrizable(avqc, &settings)?;
    let qc_cert = match &qc.verdict {
        Verdict::Feasible(p) => json!({ "povm": p.elements().iter().map(matrix_json).collect::<Vec<_>>() }),
        Verdict::Infeasible(c) => json!({
            "offset": c.offset,
            "max_eig": c.max_eig,
            "distance_floor": if c.distance_floor.is_finite() { json!(c.distance_floor) } else { json!("infinite") },
        }),
        Verdict::Undecided => Value::Null,
    };
    let qc_kind = qc.kind();
    records.push(VerdictRecord {
        test: "qc_symmetrizable".into(),
        l: 1,
        states_digest: String::new(),
        verdict: qc_kind,
        residual: qc.residual,
        certificate: qc_cert,
    });

    let label = |w: Option<usize>, positive: &str| match w {
        Some(l) => format!("non-symmetrizable (witnessed at l={l})"),
        None => format!("{positive} on all sampled sets up to l={l_max}"),
    };
    Ok(SymmetrizabilityReport {
        l_max,
        seed,
        sampler,
        records,
        average_error: label(avg_witness, "symmetrizable"),
        maximal_error: match max_witness {
            Some(l) => format!("hulls separated (witnessed at l={l})"),
            None => format!("hulls intersect on all sampled pairs up to l={l_max}"),
        },
        qc: match qc_kind {
            VerdictKind::Feasible => "qc-symmetrizable (sufficient for zero capacity)".into(),
            VerdictKind::Infeasible => "not qc-symmetrizable".into(),
            VerdictKind::Undecided => "undecided".into(),
        },
        caveat: CAVEAT.into(),
    })
}
