//! Quantum states, channels and their functionals.

mod channel;
mod degradable;
mod descriptor;
mod distance;
mod functionals;
mod state;

pub use channel::{check_distribution, weyl, QuantumChannel, CPTP_TOL, DEFAULT_TENSOR_BUDGET};
pub use degradable::{
    apply_via_choi, degrading_residual, erasure_degrading_map, erasure_flag_preserving,
    find_post_processing, is_degradable, DegradabilityResult,
};
pub use descriptor::{BuiltinChannel, ChannelDescriptor, ExplicitChannel};
pub use distance::{choi_trace_bound, diamond_distance, hausdorff_diamond, DiamondDistance};
pub use functionals::{
    coherent_information, entanglement_fidelity, entropy_exchange, environment_state,
    pure_state_fidelity,
};
pub use state::{DensityOperator, PureStateVector, STATE_TOL};
