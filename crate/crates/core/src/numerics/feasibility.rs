//! Verdicts shared by the LP and SDP feasibility routines.

use serde::Serialize;

/// Outcome of a feasibility test. `Infeasible` always carries a certificate
/// that can be re-checked independently of the solver.
#[derive(Clone, Debug)]
pub enum Verdict<W, C> {
    Feasible(W),
    Infeasible(C),
    Undecided,
}

#[derive(Clone, Debug)]
pub struct FeasibilityResult<W, C> {
    pub verdict: Verdict<W, C>,
    /// Equality residual of the witness, or the distance floor for an
    /// infeasibility verdict.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Feasible,
    Infeasible,
    Undecided,
}

impl<W, C> FeasibilityResult<W, C> {
    pub fn kind(&self) -> VerdictKind {
        match self.verdict {
            Verdict::Feasible(_) => VerdictKind::Feasible,
            Verdict::Infeasible(_) => VerdictKind::Infeasible,
            Verdict::Undecided => VerdictKind::Undecided,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self.verdict, Verdict::Feasible(_))
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self.verdict, Verdict::Infeasible(_))
    }

    pub fn witness(&self) -> Option<&W> {
        match &self.verdict {
            Verdict::Feasible(w) => Some(w),
            _ => None,
        }
    }

    pub fn certificate(&self) -> Option<&C> {
        match &self.verdict {
            Verdict::Infeasible(c) => Some(c),
            _ => None,
        }
    }

    pub fn map_witness<W2>(self, f: impl FnOnce(W) -> W2) -> FeasibilityResult<W2, C> {
        FeasibilityResult {
            verdict: match self.verdict {
                Verdict::Feasible(w) => Verdict::Feasible(f(w)),
                Verdict::Infeasible(c) => Verdict::Infeasible(c),
                Verdict::Undecided => Verdict::Undecided,
            },
            residual: self.residual,
            iterations: self.iterations,
        }
    }
}
