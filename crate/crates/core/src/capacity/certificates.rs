use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::channels::{find_post_processing, is_degradable, QuantumChannel};
use crate::error::Result;
use crate::numerics::feasibility::VerdictKind;
use crate::numerics::sdp::SdpSettings;
use crate::symmetrizability::Avqc;

/// Evidence that every channel in the hull is degradable. Mixtures are
/// sampled, so this is a heuristic certificate.
#[derive(Clone, Debug, Serialize)]
pub struct DegradableHullEvidence {
    pub vertex_residuals: Vec<f64>,
    pub mixtures: Vec<Vec<f64>>,
    pub mixture_residuals: Vec<f64>,
}

/// A member `N_*` to which every member (and every sampled mixture) can be
/// post-processed, and which is itself degradable.
#[derive(Clone, Debug)]
pub struct CommonDegraded {
    pub star: usize,
    /// `maps[s]` sends member `s` to `N_*`.
    pub maps: Vec<QuantumChannel>,
    pub residuals: Vec<f64>,
    pub mixture_residuals: Vec<f64>,
}

#[derive(Clone, Debug)]
pub enum SingleLetterCertificate {
    DegradableHull(DegradableHullEvidence),
    CommonDegraded(CommonDegraded),
    /// Some solver call ran out of budget before a certificate was found.
    Undecided(String),
    None,
}

impl SingleLetterCertificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::DegradableHull(_) => "degradable_hull",
            Self::CommonDegraded(_) => "common_degraded",
            Self::Undecided(_) => "undecided",
            Self::None => "none",
        }
    }

    pub fn holds(&self) -> bool {
        matches!(self, Self::DegradableHull(_) | Self::CommonDegraded(_))
    }
}

enum Check {
    Holds(f64),
    Fails,
    Undecided,
}

fn check(kind: VerdictKind, residual: f64) -> Check {
    match kind {
        VerdictKind::Feasible => Check::Holds(residual),
        VerdictKind::Infeasible => Check::Fails,
        VerdictKind::Undecided => Check::Undecided,
    }
}

/// Flat-Dirichlet samples on the simplex.
fn sample_mixtures(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let t: f64 = w.iter().sum();
            w.into_iter().map(|x| x / t).collect()
        })
        .collect()
}

/// Degradability at every member and at `samples` seeded random mixtures.
pub fn degradable_hull_evidence(
    avqc: &Avqc,
    samples: usize,
    seed: u64,
    settings: &SdpSettings,
) -> Result<std::result::Result<DegradableHullEvidence, SingleLetterCertificate>> {
    let mut vertex_residuals = Vec::new();
    for ch in avqc.channels() {
        let r = is_degradable(ch, settings)?;
        match check(r.kind(), r.residual) {
            Check::Holds(res) => vertex_residuals.push(res),
            Check::Fails => return Ok(Err(SingleLetterCertificate::None)),
            Check::Undecided => return Ok(Err(SingleLetterCertificate::Undecided("vertex degradability".into()))),
        }
    }
    let mixtures = if avqc.len() > 1 { sample_mixtures(avqc.len(), samples, seed) } else { Vec::new() };
    let mut mixture_residuals = Vec::new();
    for q in &mixtures {
        let r = is_degradable(&avqc.mixture(q)?, settings)?;
        match check(r.kind(), r.residual) {
            Check::Holds(res) => mixture_residuals.push(res),
            Check::Fails => return Ok(Err(SingleLetterCertificate::None)),
            Check::Undecided => return Ok(Err(SingleLetterCertificate::Undecided("mixture degradability".into()))),
        }
    }
    Ok(Ok(DegradableHullEvidence {
        vertex_residuals,
        mixtures,
        mixture_residuals,
    }))
}

/// Looks for a degradable member `N_*` such that every member and every
/// sampled mixture post-processes to it.
pub fn common_degraded_certificate(
    avqc: &Avqc,
    samples: usize,
    seed: u64,
    settings: &SdpSettings,
) -> Result<Option<CommonDegraded>> {
    let mixtures = if avqc.len() > 1 { sample_mixtures(avqc.len(), samples, seed) } else { Vec::new() };
    'star: for (s, star) in avqc.channels().iter().enumerate() {
        if !is_degradable(star, settings)?.is_feasible() {
            continue;
        }
        let mut maps = Vec::new();
        let mut residuals = Vec::new();
        for ch in avqc.channels() {
            let r = find_post_processing(ch, star, settings)?;
            match r.verdict {
                crate::numerics::feasibility::Verdict::Feasible(d) => {
                    residuals.push(r.residual);
                    maps.push(d);
                }
                _ => continue 'star,
            }
        }
        let mut mixture_residuals = Vec::new();
        for q in &mixtures {
            let r = find_post_processing(&avqc.mixture(q)?, star, settings)?;
            if !r.is_feasible() {
                continue 'star;
            }
            mixture_residuals.push(r.residual);
        }
        return Ok(Some(CommonDegraded {
            star: s,
            maps,
            residuals,
            mixture_residuals,
        }));
    }
    Ok(None)
}

/// Tries the degradable-hull condition, then the common-degraded one.
pub fn single_letter_certificate(
    avqc: &Avqc,
    samples: usize,
    seed: u64,
    settings: &SdpSettings,
) -> Result<SingleLetterCertificate> {
    let hull = degradable_hull_evidence(avqc, samples, seed, settings)?;
    if let Ok(e) = hull {
        return Ok(SingleLetterCertificate::DegradableHull(e));
    }
    if let Some(c) = common_degraded_certificate(avqc, samples, seed, settings)? {
        return Ok(SingleLetterCertificate::CommonDegraded(c));
    }
    Ok(match hull {
        Err(SingleLetterCertificate::Undecided(why)) => SingleLetterCertificate::Undecided(why),
        _ => SingleLetterCertificate::None,
    })
}
