use serde::Serialize;

use super::channel::QuantumChannel;
use crate::error::{Error, Result};
use crate::numerics::eig::{hermitian_eig, max_eigenvalue, trace_norm};
use crate::numerics::linalg::{hermitian_basis, hermitian_coords};
use crate::numerics::matrix::{HermitianMatrix, Keep};
use crate::numerics::sdp::{sdp_minimize, LmiBlock, LmiProblem};

/// Diamond-norm distance `||N − M||_◊` with a certified bracket.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiamondDistance {
    /// Best estimate; equals `upper` when the solver converged.
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub converged: bool,
}

/// Lower bound `||J_N − J_M||_1 / d_in` from the Choi matrices.
pub fn choi_trace_bound(n: &QuantumChannel, m: &QuantumChannel) -> Result<f64> {
    n.check_same_dims(m)?;
    Ok(trace_norm(&n.choi().sub(m.choi())) / n.dim_in() as f64)
}

/// `||N − M||_◊ = 2 min { λ_max(tr_out Z) : Z ⪰ J_N − J_M, Z ⪰ 0 }`.
///
/// The semidefinite form restricts the stabilizing ancilla to the input
/// dimension, which suffices for the supremum. On solver failure the result
/// brackets the distance between the Choi bound and 2.
pub fn diamond_distance(n: &QuantumChannel, m: &QuantumChannel, tol: f64) -> Result<DiamondDistance> {
    let choi_bound = choi_trace_bound(n, m)?;
    let j = n.choi().sub(m.choi());
    if j.as_matrix().max_abs() <= 1e-15 {
        return Ok(DiamondDistance {
            value: 0.0,
            lower: 0.0,
            upper: 0.0,
            converged: true,
        });
    }
    let din = n.dim_in();
    let dout = n.dim_out();
    let big = din * dout;
    let basis = hermitian_basis(big);
    let nz = basis.len();

    let mut tr_block = vec![HermitianMatrix::identity(din)];
    let mut excess_block = vec![HermitianMatrix::zeros(big)];
    let mut pos_block = vec![HermitianMatrix::zeros(big)];
    for b in &basis {
        tr_block.push(b.partial_trace(din, dout, Keep::A)?.scale(-1.0));
        excess_block.push(b.clone());
        pos_block.push(b.clone());
    }
    let mut objective = vec![0.0; nz + 1];
    objective[0] = 1.0;
    let problem = LmiProblem {
        num_vars: nz + 1,
        objective,
        blocks: vec![
            LmiBlock {
                constant: HermitianMatrix::zeros(din),
                coeffs: tr_block,
            },
            LmiBlock {
                constant: j.scale(-1.0),
                coeffs: excess_block,
            },
            LmiBlock {
                constant: HermitianMatrix::zeros(big),
                coeffs: pos_block,
            },
        ],
        eq_rows: vec![],
        eq_rhs: vec![],
    };

    // strictly feasible start: Z = |J| + I
    let z0 = hermitian_eig(&j)
        .map(|x| x.abs())
        .add(&HermitianMatrix::identity(big));
    let t0 = max_eigenvalue(&z0.partial_trace(din, dout, Keep::A)?) + 1.0;
    let mut x0 = vec![t0];
    x0.extend(hermitian_coords(&z0));

    match sdp_minimize(&problem, tol / 4.0, Some(&x0)) {
        Ok(sol) => {
            let upper = (2.0 * sol.value).min(2.0);
            let lower = (2.0 * sol.lower_bound).max(choi_bound).min(upper);
            Ok(DiamondDistance {
                value: upper,
                lower,
                upper,
                converged: upper - lower <= tol,
            })
        }
        Err(Error::Solver(_)) => Ok(DiamondDistance {
            value: 0.5 * (choi_bound + 2.0),
            lower: choi_bound,
            upper: 2.0,
            converged: false,
        }),
        Err(e) => Err(e),
    }
}

/// Hausdorff distance between two finite channel sets under the diamond norm.
pub fn hausdorff_diamond(a: &[QuantumChannel], b: &[QuantumChannel], tol: f64) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("Hausdorff distance of an empty set".into()));
    }
    let mut table = vec![vec![0.0; b.len()]; a.len()];
    for (i, x) in a.iter().enumerate() {
        for (k, y) in b.iter().enumerate() {
            table[i][k] = diamond_distance(x, y, tol)?.value;
        }
    }
    let ab = table
        .iter()
        .map(|row| row.iter().copied().fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let ba = (0..b.len())
        .map(|k| table.iter().map(|row| row[k]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Ok(ab.max(ba))
}
