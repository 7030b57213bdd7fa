//! Zero-capacity conditions for arbitrarily varying channels as feasibility
//! programs with checkable witnesses and certificates.

mod avqc;
mod classical;
mod qc;
mod report;

pub use avqc::{all_sequences, sequence_index, Avqc, Povm, SymmetrizingMap, DEFAULT_SEQUENCE_BUDGET, POVM_TOL};
pub use classical::{
    is_l_symmetrizable, l_symmetrization_residual, maxerror_hull_intersection, separation_margin,
    HullIntersection, LSymmetrizability, DEFAULT_LP_BUDGET, DEFAULT_LP_TOL,
};
pub use qc::{is_qc_symmetrizable, qc_symmetry_residual, reduce_qc_l_to_1, QcSymmetrizability};
pub use report::{states_digest, symmetrizability_report, StateSampler, SymmetrizabilityReport, VerdictRecord};
