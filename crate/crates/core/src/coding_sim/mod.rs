//! Code evaluation, the method of types, and the random-to-deterministic
//! code transformations.

mod code;
mod concentration;
mod evaluators;
mod reduction;
mod types;

pub use code::{ClassicalCode, CodePair, RandomCode, StateSequence};
pub use concentration::{
    dvoretzky_dimension, haar_twirl_fidelity, lipschitz_median_checks, premise_threshold,
    strong_subspace_dim, strong_subspace_equivalence, EquivalenceCheck, HaarTwirl, LipschitzReport,
};
pub use evaluators::{evaluate_avg_error, evaluate_max_error, evaluate_random_code, WorstCase};
pub use reduction::{
    basis_message_code, derandomize, inner_product_bound, inner_product_sweep, letter_code,
    letter_codes, reduce_random_code, shift_noise_avqc, DerandomizationCheck, DerandomizedCode,
    InnerProductCheck, Reduction, ReductionOutcome,
};
pub use types::{
    enumerate_types, hypothesis_gamma, permutation_average, random_f_table, robustification_check,
    robustification_sweep, type_class, type_class_bound_margin, type_class_prob, type_class_size,
    RobustificationOutcome, RobustificationSweep,
};
