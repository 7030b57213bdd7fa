//! Zero-error structure: confusability spaces, the θ̃ program, verification
//! of supplied zero-error codes and the separable-overlap bound.

mod codes;
mod distill;
mod subspace;
mod theta;

pub use codes::{
    avqc_zero_error_bridge, face_constancy_probe, verify_zero_error_qcode, BridgeOutcome, FaceProbe, ZeroErrorCheck,
    ZERO_ERROR_TOL,
};
pub use distill::{entangled_overlap, full_rank_state_check, product_overlap, separable_overlap_bound, FullRankCheck, OverlapStats};
pub use subspace::{confusability_space, interior_zero_capacity_check, InteriorCheck, OperatorSubspace, RANK_CUTOFF};
pub use theta::{lovasz_theta_tilde, ThetaTilde};
