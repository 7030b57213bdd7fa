//! Dense linear algebra and the small convex solvers built on it.

pub mod eig;
pub mod feasibility;
pub mod linalg;
pub mod lp;
pub mod matrix;
pub mod sdp;

pub use eig::{entropy_bits, hermitian_eig, psd_project, trace_norm, Eigen};
pub use feasibility::{FeasibilityResult, Verdict, VerdictKind};
pub use lp::{lp_feasibility, FarkasCertificate, SimplexSystem};
pub use matrix::{ComplexMatrix, HermitianMatrix, Keep, C64};
pub use sdp::{sdp_feasibility, sdp_minimize, ConeSystem, LmiBlock, LmiProblem, SdpSettings, SdpSolution};
