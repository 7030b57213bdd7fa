//! Capacity expressions at finite block length: maximin coherent information
//! over the convex hull (certified lower bounds), the erasure closed form,
//! the continuity bound and single-letter certificates.

mod bounds;
mod certificates;
mod inner;
mod maximin;

pub use bounds::{binary_entropy, continuity_bound, erasure_capacity};
pub use certificates::{
    common_degraded_certificate, degradable_hull_evidence, single_letter_certificate, CommonDegraded,
    DegradableHullEvidence, SingleLetterCertificate,
};
pub use inner::{ic_min_over_hull, HullObjective, InnerMin};
pub use maximin::{maximin_ic, MaximinResult, DEFAULT_RESTARTS, STATE_DIM_BUDGET};
