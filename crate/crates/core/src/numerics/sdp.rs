//! Small dense semidefinite programs.
//!
//! Two entry points:
//! * [`sdp_feasibility`] decides `{X_k ⪰ 0} ∩ {A x = b}` with Dykstra
//!   alternating projections, where `x` stacks the Hermitian coordinates of
//!   the blocks `X_k`.
//! * [`sdp_minimize`] minimizes a linear objective over a spectrahedron
//!   `{x : F_k(x) ⪰ 0, A x = b}` by logarithmic-barrier path following, with
//!   a bisection-over-feasibility fallback when Newton steps break down.

use super::eig::{cholesky, hermitian_eig, lower_triangular_inverse, min_eigenvalue, psd_project};
use super::feasibility::{FeasibilityResult, Verdict};
use super::linalg::{
    dot, hermitian_basis, hermitian_coords, hermitian_from_coords, norm, solve_dense, solve_spd,
    AffineProjector, AffineSet,
};
use super::matrix::{ComplexMatrix, HermitianMatrix, C64};
use crate::error::{Error, Result};

/// Default equality residual tolerance.
pub const DEFAULT_EQ_TOL: f64 = 1e-8;
/// Default PSD slack.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SdpSettings {
    pub eq_tol: f64,
    pub psd_tol: f64,
    pub max_iter: usize,
    /// Iterations per stall-detection window.
    pub stall_window: usize,
    /// Relative decrease of the projection distance below which a window
    /// counts as stalled.
    pub stall_rel: f64,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self {
            eq_tol: DEFAULT_EQ_TOL,
            psd_tol: DEFAULT_PSD_TOL,
            max_iter: 50_000,
            stall_window: 500,
            stall_rel: 1e-12,
        }
    }
}

/// `{X_1 ⪰ 0, …, X_p ⪰ 0} ∩ {A x = b}` with `x` the concatenated
/// [`hermitian_coords`] of the blocks.
#[derive(Clone, Debug)]
pub struct ConeSystem {
    pub block_dims: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

impl ConeSystem {
    pub fn num_vars(&self) -> usize {
        self.block_dims.iter().map(|d| d * d).sum()
    }

    pub fn split(&self, x: &[f64]) -> Vec<HermitianMatrix> {
        let mut off = 0;
        self.block_dims
            .iter()
            .map(|&d| {
                let h = hermitian_from_coords(d, &x[off..off + d * d]);
                off += d * d;
                h
            })
            .collect()
    }

    pub fn join(&self, blocks: &[HermitianMatrix]) -> Vec<f64> {
        blocks.iter().flat_map(hermitian_coords).collect()
    }

    /// Max-norm equality residual.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, b)| (dot(r, x) - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn residual_blocks(&self, blocks: &[HermitianMatrix]) -> f64 {
        self.residual(&self.join(blocks))
    }

    /// Equality system `L(X_1, …, X_p) = target` for a complex-linear map
    /// `L`, encoded by evaluating `L` on every basis element. Real and
    /// imaginary parts become separate rows; identically zero rows are dropped.
    pub fn from_linear_map(
        block_dims: Vec<usize>,
        map: impl Fn(&[HermitianMatrix]) -> Vec<C64>,
        target: &[C64],
    ) -> Self {
        let mut zero: Vec<HermitianMatrix> =
            block_dims.iter().map(|&d| HermitianMatrix::zeros(d)).collect();
        let mut columns: Vec<Vec<C64>> = Vec::new();
        for (b, &d) in block_dims.iter().enumerate() {
            for e in hermitian_basis(d) {
                zero[b] = e;
                let col = map(&zero);
                assert_eq!(col.len(), target.len(), "linear map output length");
                columns.push(col);
            }
            zero[b] = HermitianMatrix::zeros(d);
        }
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (r, t) in target.iter().enumerate() {
            let re: Vec<f64> = columns.iter().map(|c| c[r].re).collect();
            let im: Vec<f64> = columns.iter().map(|c| c[r].im).collect();
            for (row, b) in [(re, t.re), (im, t.im)] {
                if row.iter().any(|v| v.abs() > 1e-15) || b.abs() > 1e-15 {
                    rows.push(row);
                    rhs.push(b);
                }
            }
        }
        Self {
            block_dims,
            rows,
            rhs,
        }
    }

    fn project_cone(&self, x: &[f64]) -> Vec<f64> {
        let blocks = self.split(x);
        let projected: Vec<HermitianMatrix> = blocks.iter().map(psd_project).collect();
        self.join(&projected)
    }

    fn min_eig(&self, x: &[f64]) -> f64 {
        self.split(x)
            .iter()
            .map(min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Separating direction for an infeasible cone system: `direction` lies in the
/// row space of `A` (so `<direction, x> = offset` on the affine set) and is
/// negative semidefinite up to `max_eig`, while `offset > 0`.
#[derive(Clone, Debug)]
pub struct SeparatingDirection {
    pub blocks: Vec<HermitianMatrix>,
    pub offset: f64,
    pub max_eig: f64,
    /// Distance between the affine set and the cone at which Dykstra stalled.
    pub distance_floor: f64,
}

impl SeparatingDirection {
    /// Checks the sign conditions: offset strictly positive and every block
    /// negative semidefinite within `1e-6` of its norm.
    pub fn verify(&self) -> bool {
        let scale: f64 = self
            .blocks
            .iter()
            .map(|b| b.as_matrix().frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt();
        scale > 0.0 && self.offset > 0.0 && self.max_eig <= 1e-6 * scale
    }
}

pub type ConeResult = FeasibilityResult<Vec<HermitianMatrix>, SeparatingDirection>;

/// Dykstra alternating projections between the affine set and the PSD cone.
///
/// Feasible when an iterate satisfies both constraint families within
/// tolerance; Infeasible when the affine–cone distance stalls (relative
/// progress below `stall_rel` over a full window) above `10·eq_tol`;
/// Undecided when the iteration budget runs out.
pub fn sdp_feasibility(system: &ConeSystem, settings: &SdpSettings) -> Result<ConeResult> {
    let n = system.num_vars();
    if system.rows.iter().any(|r| r.len() != n) || system.rows.len() != system.rhs.len() {
        return Err(Error::IllPosed("cone system rows do not match variable count".into()));
    }
    let projector = match AffineProjector::build(n, &system.rows, &system.rhs, 1e-10, settings.eq_tol)
    {
        AffineSet::Consistent(p) => p,
        AffineSet::Inconsistent { y, gap } => {
            // A^T y = 0 with y^T b != 0: the affine set itself is empty.
            return Ok(FeasibilityResult {
                verdict: Verdict::Infeasible(SeparatingDirection {
                    blocks: system.split(&vec![0.0; n]),
                    offset: gap.abs(),
                    max_eig: 0.0,
                    distance_floor: f64::INFINITY,
                }),
                residual: gap.abs() / norm(&y).max(1e-300),
                iterations: 0,
            });
        }
    };

    let mut a = projector.project(&vec![0.0; n]);
    let mut q = vec![0.0; n];
    let mut window_start = f64::INFINITY;
    let mut distance = f64::INFINITY;
    for iter in 0..settings.max_iter {
        // cone step with Dykstra correction
        let shifted: Vec<f64> = a.iter().zip(&q).map(|(x, c)| x + c).collect();
        let c = system.project_cone(&shifted);
        for i in 0..n {
            q[i] = shifted[i] - c[i];
        }
        // affine step (no correction needed for an affine set)
        let next = projector.project(&c);
        distance = norm(&next.iter().zip(&c).map(|(x, y)| x - y).collect::<Vec<_>>());
        a = next;

        if distance <= settings.eq_tol {
            let cone_res = system.residual(&c);
            if cone_res <= settings.eq_tol {
                return Ok(FeasibilityResult {
                    verdict: Verdict::Feasible(system.split(&c)),
                    residual: cone_res,
                    iterations: iter + 1,
                });
            }
            if system.min_eig(&a) >= -settings.psd_tol {
                let res = system.residual(&a);
                return Ok(FeasibilityResult {
                    verdict: Verdict::Feasible(system.split(&a)),
                    residual: res,
                    iterations: iter + 1,
                });
            }
        }

        if (iter + 1) % settings.stall_window == 0 {
            let progress = (window_start - distance) / window_start;
            if distance > 10.0 * settings.eq_tol
                && window_start.is_finite()
                && progress < settings.stall_rel
            {
                let direction = separating_direction(system, &projector, &a, distance);
                return Ok(FeasibilityResult {
                    verdict: Verdict::Infeasible(direction),
                    residual: distance,
                    iterations: iter + 1,
                });
            }
            window_start = distance;
        }
    }
    Ok(FeasibilityResult {
        verdict: Verdict::Undecided,
        residual: distance,
        iterations: settings.max_iter,
    })
}

fn separating_direction(
    system: &ConeSystem,
    projector: &AffineProjector,
    affine_point: &[f64],
    distance: f64,
) -> SeparatingDirection {
    let n = affine_point.len();
    // negative part of the affine point, moved into the row space of A
    let c = system.project_cone(affine_point);
    let w: Vec<f64> = affine_point.iter().zip(&c).map(|(a, b)| a - b).collect();
    let origin = projector.project(&vec![0.0; n]);
    let shifted: Vec<f64> = w.iter().zip(&origin).map(|(a, b)| a + b).collect();
    let in_null: Vec<f64> = projector
        .project(&shifted)
        .iter()
        .zip(&origin)
        .map(|(a, b)| a - b)
        .collect();
    let row_part: Vec<f64> = w.iter().zip(&in_null).map(|(a, b)| a - b).collect();
    // On the affine set <row_part, x> is constant; for the nearest pair it
    // equals |w|^2 > 0 while the NSD direction is nonpositive on the cone.
    let offset = dot(&row_part, affine_point);
    let blocks = system.split(&row_part);
    let max_eig = blocks
        .iter()
        .map(|b| hermitian_eig(b).values[0])
        .fold(f64::NEG_INFINITY, f64::max);
    SeparatingDirection {
        blocks,
        offset,
        max_eig,
        distance_floor: distance,
    }
}

/// One linear matrix inequality `F(x) = constant + Σ_i x_i coeffs[i] ⪰ 0`.
#[derive(Clone, Debug)]
pub struct LmiBlock {
    pub constant: HermitianMatrix,
    pub coeffs: Vec<HermitianMatrix>,
}

impl LmiBlock {
    pub fn dim(&self) -> usize {
        self.constant.dim()
    }

    pub fn eval(&self, x: &[f64]) -> ComplexMatrix {
        let mut m = self.constant.as_matrix().clone();
        for (c, &xi) in self.coeffs.iter().zip(x) {
            if xi != 0.0 {
                m.axpy(xi.into(), c.as_matrix());
            }
        }
        m
    }
}

/// minimize `objective · x` subject to every block `⪰ 0` and `A x = b`.
#[derive(Clone, Debug)]
pub struct LmiProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub blocks: Vec<LmiBlock>,
    pub eq_rows: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// Barrier path followed until the duality gap fell below tolerance.
    Converged,
    /// Barrier lost conditioning; bounds come from bisection over feasibility.
    Bisection,
    /// Bounds did not close to tolerance within the budget.
    Partial,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    /// Objective at a strictly feasible point (an upper bound on the optimum).
    pub value: f64,
    /// Lower bound on the optimum from the barrier duality gap or bisection.
    pub lower_bound: f64,
    pub x: Vec<f64>,
    pub status: SolveStatus,
}

impl SdpSolution {
    pub fn gap(&self) -> f64 {
        self.value - self.lower_bound
    }
}

/// Problem restricted to the affine set: `x = x0 + N z`.
struct Reduced {
    x0: Vec<f64>,
    basis: Vec<Vec<f64>>,
    c: Vec<f64>,
    c0: f64,
    blocks: Vec<(ComplexMatrix, Vec<ComplexMatrix>)>,
    barrier_weight: f64,
}

impl Reduced {
    fn new(p: &LmiProblem) -> Result<Self> {
        let n = p.num_vars;
        if p.objective.len() != n || p.blocks.iter().any(|b| b.coeffs.len() != n) {
            return Err(Error::IllPosed("LMI data does not match variable count".into()));
        }
        let proj = match AffineProjector::build(n, &p.eq_rows, &p.eq_rhs, 1e-10, 1e-9) {
            AffineSet::Consistent(pr) => pr,
            AffineSet::Inconsistent { .. } => {
                return Err(Error::Infeasible("inconsistent equality constraints".into()))
            }
        };
        let x0 = proj.project(&vec![0.0; n]);
        let basis = proj.null_space();
        let c: Vec<f64> = basis.iter().map(|v| dot(v, &p.objective)).collect();
        let c0 = dot(&p.objective, &x0);
        let blocks = p
            .blocks
            .iter()
            .map(|b| {
                let g0 = b.eval(&x0);
                let gs = basis
                    .iter()
                    .map(|v| {
                        let mut g = ComplexMatrix::zeros(b.dim(), b.dim());
                        for (ci, &vi) in b.coeffs.iter().zip(v) {
                            if vi != 0.0 {
                                g.axpy(vi.into(), ci.as_matrix());
                            }
                        }
                        g
                    })
                    .collect();
                (g0, gs)
            })
            .collect();
        Ok(Self {
            x0,
            basis,
            c,
            c0,
            blocks,
            barrier_weight: p.blocks.iter().map(|b| b.dim() as f64).sum(),
        })
    }

    fn lift(&self, z: &[f64]) -> Vec<f64> {
        let mut x = self.x0.clone();
        for (v, &zi) in self.basis.iter().zip(z) {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += zi * vi;
            }
        }
        x
    }
}

/// Barrier subproblem data: blocks `G_k0 + Σ_j z_j G_kj + s·shift_k·I`
/// where `s` is an optional trailing variable used by phase one.
struct BarrierData<'a> {
    blocks: &'a [(ComplexMatrix, Vec<ComplexMatrix>)],
    c: Vec<f64>,
    /// Extra scalar constraints `level - c·z ≥ 0` (bisection cuts).
    cut: Option<(Vec<f64>, f64)>,
    /// Whether the last variable is the phase-one shift.
    phase_one: bool,
}

impl BarrierData<'_> {
    fn nz(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.1.len())
    }

    fn block_value(&self, k: usize, v: &[f64]) -> ComplexMatrix {
        let (g0, gs) = &self.blocks[k];
        let mut m = g0.clone();
        for (g, &zi) in gs.iter().zip(v) {
            if zi != 0.0 {
                m.axpy(zi.into(), g);
            }
        }
        if self.phase_one {
            let s = v[self.nz()];
            for i in 0..m.rows() {
                m[(i, i)] += s;
            }
        }
        m
    }

    fn block_dir(&self, k: usize, dv: &[f64]) -> ComplexMatrix {
        let (g0, gs) = &self.blocks[k];
        let mut m = ComplexMatrix::zeros(g0.rows(), g0.cols());
        for (g, &zi) in gs.iter().zip(dv) {
            if zi != 0.0 {
                m.axpy(zi.into(), g);
            }
        }
        if self.phase_one {
            let s = dv[self.nz()];
            for i in 0..m.rows() {
                m[(i, i)] += s;
            }
        }
        m
    }

    fn cut_value(&self, v: &[f64]) -> Option<f64> {
        self.cut
            .as_ref()
            .map(|(cc, level)| level - dot(cc, &v[..cc.len()]))
    }

    /// Barrier objective `t c·v - Σ log det F_k(v) - log(cut)`, or `None`
    /// outside the domain.
    fn phi(&self, t: f64, v: &[f64]) -> Option<f64> {
        let mut val = t * dot(&self.c, v);
        for k in 0..self.blocks.len() {
            let f = self.block_value(k, v);
            let l = cholesky(&f)?;
            val -= (0..f.rows()).map(|i| 2.0 * l[(i, i)].re.ln()).sum::<f64>();
        }
        if let Some(cv) = self.cut_value(v) {
            if cv <= 0.0 {
                return None;
            }
            val -= cv.ln();
        }
        Some(val)
    }

    fn generator(&self, k: usize, j: usize) -> ComplexMatrix {
        if j < self.nz() {
            self.blocks[k].1[j].clone()
        } else {
            ComplexMatrix::identity(self.blocks[k].0.rows())
        }
    }

    /// Newton direction and decrement squared at `v`.
    fn newton(&self, t: f64, v: &[f64]) -> Option<(Vec<f64>, f64)> {
        let dim = v.len();
        let mut grad: Vec<f64> = self.c.iter().map(|ci| t * ci).collect();
        let mut hess = vec![0.0; dim * dim];
        for k in 0..self.blocks.len() {
            let f = self.block_value(k, v);
            let l = cholesky(&f)?;
            let li = lower_triangular_inverse(&l);
            // P_j = L^{-1} G_j L^{-†} keeps the products Hermitian
            let ps: Vec<ComplexMatrix> = (0..dim)
                .map(|j| li.matmul(&self.generator(k, j)).matmul(&li.adjoint()))
                .collect();
            for i in 0..dim {
                grad[i] -= ps[i].trace().re;
                for j in i..dim {
                    let h = ps[i].trace_product(&ps[j]).re;
                    hess[i * dim + j] += h;
                    if i != j {
                        hess[j * dim + i] += h;
                    }
                }
            }
        }
        if let Some((cc, level)) = &self.cut {
            let cv = level - dot(cc, &v[..cc.len()]);
            for i in 0..cc.len() {
                grad[i] += cc[i] / cv;
                for j in 0..cc.len() {
                    hess[i * dim + j] += cc[i] * cc[j] / (cv * cv);
                }
            }
        }
        let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
        let dir = solve_spd(&hess, &neg).or_else(|| {
            let tr: f64 = (0..dim).map(|i| hess[i * dim + i]).sum::<f64>().max(1e-300);
            let mut reg = hess.clone();
            for i in 0..dim {
                reg[i * dim + i] += 1e-12 * tr;
            }
            solve_spd(&reg, &neg).or_else(|| solve_dense(&reg, &neg))
        })?;
        let dec = -dot(&grad, &dir);
        Some((dir, dec))
    }

    /// Largest step keeping every block positive definite.
    fn max_step(&self, v: &[f64], dv: &[f64]) -> f64 {
        let mut amax = f64::INFINITY;
        for k in 0..self.blocks.len() {
            let f = self.block_value(k, v);
            let Some(l) = cholesky(&f) else { return 0.0 };
            let li = lower_triangular_inverse(&l);
            let d = li.matmul(&self.block_dir(k, dv)).matmul(&li.adjoint());
            let w = hermitian_eig(&HermitianMatrix::from_hermitian_part(&d));
            let lmin = *w.values.last().unwrap_or(&0.0);
            if lmin < 0.0 {
                amax = amax.min(-1.0 / lmin);
            }
        }
        if let Some((cc, level)) = &self.cut {
            let cv = level - dot(cc, &v[..cc.len()]);
            let dc = dot(cc, &dv[..cc.len()]);
            if dc > 0.0 {
                amax = amax.min(cv / dc);
            }
        }
        amax
    }

    /// Newton centering at parameter `t`.
    fn center(&self, t: f64, v: &mut Vec<f64>, stop: &dyn Fn(&[f64]) -> bool) -> Center {
        for _ in 0..200 {
            if stop(v) {
                return Center::Done;
            }
            let Some((dir, dec)) = self.newton(t, v) else {
                return Center::Breakdown;
            };
            if !dec.is_finite() || dec < 0.0 {
                return Center::Breakdown;
            }
            if dec / 2.0 <= 1e-11 {
                return Center::Done;
            }
            let amax = self.max_step(v, &dir);
            if amax.is_infinite() && dot(&self.c, &dir) < 0.0 {
                // the whole ray stays feasible while the objective decreases
                return Center::Unbounded;
            }
            let mut alpha = if amax.is_finite() { (0.99 * amax).min(1.0) } else { 1.0 };
            let Some(phi0) = self.phi(t, v) else { return Center::Breakdown };
            let mut accepted = false;
            for _ in 0..60 {
                let cand: Vec<f64> = v.iter().zip(&dir).map(|(a, d)| a + alpha * d).collect();
                if let Some(phi1) = self.phi(t, &cand) {
                    if phi1 <= phi0 - 0.25 * alpha * dec || phi1 < phi0 && alpha < 1e-6 {
                        *v = cand;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                // no descent possible at machine precision
                return if dec < 1e-6 { Center::Done } else { Center::Breakdown };
            }
        }
        Center::Done
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Center {
    Done,
    Breakdown,
    Unbounded,
}

/// Finds a strictly feasible reduced point `z` (all blocks ≻ 0, optional cut
/// satisfied) starting from `start`, or `None` if phase one certifies that
/// no strictly feasible point exists.
fn phase_one(
    red: &Reduced,
    start: &[f64],
    cut: Option<(Vec<f64>, f64)>,
) -> Option<Vec<f64>> {
    let nz = red.basis.len();
    let probe = BarrierData {
        blocks: &red.blocks,
        c: vec![0.0; nz],
        cut: None,
        phase_one: false,
    };
    let inside = |v: &[f64], cut: &Option<(Vec<f64>, f64)>| {
        (0..red.blocks.len()).all(|k| cholesky(&probe.block_value(k, v)).is_some())
            && cut.as_ref().is_none_or(|(cc, lv)| lv - dot(cc, v) > 0.0)
    };
    if inside(start, &cut) {
        return Some(start.to_vec());
    }
    if red.blocks.is_empty() {
        return None;
    }
    // F(z) + s I ⪰ 0, minimize s; the cut is kept as a hard constraint by
    // relaxing its level as well
    let mut smin = f64::INFINITY;
    for k in 0..red.blocks.len() {
        let f = HermitianMatrix::from_hermitian_part(&probe.block_value(k, start));
        smin = smin.min(min_eigenvalue(&f));
    }
    let s0 = (-smin).max(0.0) + 1.0;
    let mut c = vec![0.0; nz + 1];
    c[nz] = 1.0;
    let mut v: Vec<f64> = start.iter().copied().chain([s0]).collect();
    let cut_relaxed = cut.as_ref().map(|(cc, lv)| {
        let excess = (dot(cc, start) - lv).max(0.0) + 1.0;
        (cc.clone(), lv + excess)
    });
    let data = BarrierData {
        blocks: &red.blocks,
        c,
        cut: cut_relaxed,
        phase_one: true,
    };
    let scale = red
        .blocks
        .iter()
        .map(|(g0, _)| g0.frobenius_norm())
        .fold(1.0, f64::max);
    let target = -1e-7 * scale;
    let stop = |v: &[f64]| v[nz] < target && inside(&v[..nz], &cut);
    let mut t = 1.0;
    for _ in 0..80 {
        match data.center(t, &mut v, &stop) {
            Center::Done => {}
            // an unbounded phase-one ray drives the shift negative
            Center::Unbounded => return unbounded_phase_one(&data, &v, &stop),
            Center::Breakdown => break,
        }
        if stop(&v) {
            return Some(v[..nz].to_vec());
        }
        let m = data.barrier_weight_phase_one();
        if m / t < 1e-10 * scale {
            break;
        }
        t *= 10.0;
    }
    stop(&v).then(|| v[..nz].to_vec())
}

/// Follows a feasible phase-one recession ray until the stop rule fires.
fn unbounded_phase_one(
    data: &BarrierData<'_>,
    v: &[f64],
    stop: &dyn Fn(&[f64]) -> bool,
) -> Option<Vec<f64>> {
    let nz = data.nz();
    let (dir, _) = data.newton(1.0, v)?;
    let mut step = 1.0;
    for _ in 0..200 {
        let cand: Vec<f64> = v.iter().zip(&dir).map(|(a, d)| a + step * d).collect();
        if stop(&cand) {
            return Some(cand[..nz].to_vec());
        }
        step *= 2.0;
    }
    None
}

impl BarrierData<'_> {
    fn barrier_weight_phase_one(&self) -> f64 {
        self.blocks.iter().map(|b| b.0.rows() as f64).sum::<f64>() + self.cut.is_some() as u8 as f64
    }
}

/// Minimizes a linear objective over a spectrahedron.
///
/// `initial`, when supplied, should be a point satisfying the equalities with
/// all blocks positive definite; otherwise a phase-one problem finds one.
/// The returned `value` is attained at a feasible `x`; `lower_bound` comes
/// from the barrier duality gap (or bisection after a breakdown).
pub fn sdp_minimize(problem: &LmiProblem, tol: f64, initial: Option<&[f64]>) -> Result<SdpSolution> {
    let red = Reduced::new(problem)?;
    let nz = red.basis.len();
    if nz == 0 {
        // single feasible point
        let x = red.x0.clone();
        for b in &problem.blocks {
            let m = HermitianMatrix::from_hermitian_part(&b.eval(&x));
            if min_eigenvalue(&m) < -DEFAULT_PSD_TOL {
                return Err(Error::Infeasible("unique affine point violates an LMI".into()));
            }
        }
        let value = dot(&problem.objective, &x);
        return Ok(SdpSolution {
            value,
            lower_bound: value,
            x,
            status: SolveStatus::Converged,
        });
    }
    let start: Vec<f64> = match initial {
        Some(x) => red
            .basis
            .iter()
            .map(|v| dot(v, &x.iter().zip(&red.x0).map(|(a, b)| a - b).collect::<Vec<_>>()))
            .collect(),
        None => vec![0.0; nz],
    };
    let mut z = phase_one(&red, &start, None)
        .ok_or_else(|| Error::Infeasible("no strictly feasible point".into()))?;

    let data = BarrierData {
        blocks: &red.blocks,
        c: red.c.clone(),
        cut: None,
        phase_one: false,
    };
    let m = red.barrier_weight;
    let never = |_: &[f64]| false;
    let obj_scale = norm(&red.c).max(1e-300);
    let mut t = 1.0 / obj_scale;
    let mut lower = f64::NEG_INFINITY;
    let mut broke_down = false;
    for _ in 0..200 {
        let mut trial = z.clone();
        match data.center(t, &mut trial, &never) {
            Center::Done => {}
            Center::Unbounded => return Err(Error::Unbounded),
            Center::Breakdown => {
                broke_down = true;
                break;
            }
        }
        z = trial;
        let value = dot(&red.c, &z) + red.c0;
        if !value.is_finite() || value < -1e12 * (1.0 + red.c0.abs()) {
            return Err(Error::Unbounded);
        }
        lower = lower.max(value - m / t);
        if m / t <= tol {
            return Ok(SdpSolution {
                value,
                lower_bound: lower,
                x: red.lift(&z),
                status: SolveStatus::Converged,
            });
        }
        t *= 8.0;
    }

    let upper = dot(&red.c, &z) + red.c0;
    if !broke_down && upper - lower <= tol {
        return Ok(SdpSolution {
            value: upper,
            lower_bound: lower,
            x: red.lift(&z),
            status: SolveStatus::Converged,
        });
    }
    bisect(&red, z, upper, lower, tol)
}

/// Bisection over the objective level using phase-one feasibility checks.
fn bisect(red: &Reduced, mut z: Vec<f64>, mut upper: f64, mut lower: f64, tol: f64) -> Result<SdpSolution> {
    if !lower.is_finite() {
        lower = upper - 1.0_f64.max(upper.abs());
        // walk the lower bound down until infeasible
        for _ in 0..60 {
            let level = lower - red.c0;
            if phase_one(red, &z, Some((red.c.clone(), level))).is_none() {
                break;
            }
            lower -= 2.0 * (upper - lower);
        }
    }
    for _ in 0..100 {
        if upper - lower <= tol {
            break;
        }
        let mid = 0.5 * (upper + lower);
        match phase_one(red, &z, Some((red.c.clone(), mid - red.c0))) {
            Some(found) => {
                upper = dot(&red.c, &found) + red.c0;
                z = found;
            }
            None => lower = mid,
        }
    }
    Ok(SdpSolution {
        value: upper,
        lower_bound: lower,
        x: red.lift(&z),
        status: if upper - lower <= tol {
            SolveStatus::Bisection
        } else {
            SolveStatus::Partial
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::eig::eigenvalues;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn trace_row(d: usize) -> Vec<f64> {
        hermitian_basis(d).iter().map(|b| b.trace()).collect()
    }

    #[test]
    fn unit_trace_psd_is_feasible() {
        let d = 3;
        let sys = ConeSystem {
            block_dims: vec![d],
            rows: vec![trace_row(d)],
            rhs: vec![1.0],
        };
        let res = sdp_feasibility(&sys, &SdpSettings::default()).unwrap();
        let w = res.witness().expect("feasible");
        assert!((w[0].trace() - 1.0).abs() < 1e-8);
        assert!(min_eigenvalue(&w[0]) >= -1e-9);
        // projection of the origin's affine image is I/d
        let expect = HermitianMatrix::identity(d).scale(1.0 / d as f64);
        assert!((w[0].as_matrix() - expect.as_matrix()).frobenius_norm() < 1e-8);
    }

    #[test]
    fn negative_trace_psd_is_infeasible() {
        let d = 2;
        let sys = ConeSystem {
            block_dims: vec![d],
            rows: vec![trace_row(d)],
            rhs: vec![-1.0],
        };
        let res = sdp_feasibility(&sys, &SdpSettings::default()).unwrap();
        let cert = res.certificate().expect("infeasible");
        assert!(cert.verify(), "{cert:?}");
        assert!(cert.distance_floor > 0.1);
    }

    #[test]
    fn inconsistent_equalities_are_infeasible() {
        let sys = ConeSystem {
            block_dims: vec![2],
            rows: vec![trace_row(2), trace_row(2)],
            rhs: vec![1.0, 2.0],
        };
        let res = sdp_feasibility(&sys, &SdpSettings::default()).unwrap();
        assert!(res.is_infeasible());
    }

    /// min tr X  s.t.  X ⪰ A, X ⪰ 0
    fn trace_over_shift(a: &HermitianMatrix) -> LmiProblem {
        let d = a.dim();
        let basis = hermitian_basis(d);
        LmiProblem {
            num_vars: d * d,
            objective: basis.iter().map(|b| b.trace()).collect(),
            blocks: vec![
                LmiBlock {
                    constant: a.scale(-1.0),
                    coeffs: basis.clone(),
                },
                LmiBlock {
                    constant: HermitianMatrix::zeros(d),
                    coeffs: basis,
                },
            ],
            eq_rows: vec![],
            eq_rhs: vec![],
        }
    }

    #[test]
    fn trace_minimization_matches_positive_eigenvalue_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            let g = ComplexMatrix::from_fn(3, 3, |_, _| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let a = HermitianMatrix::from_hermitian_part(&g);
            let oracle: f64 = eigenvalues(&a).iter().map(|x| x.max(0.0)).sum();
            let sol = sdp_minimize(&trace_over_shift(&a), 1e-9, None).unwrap();
            assert!((sol.value - oracle).abs() < 1e-7, "{} vs {}", sol.value, oracle);
            assert!(sol.lower_bound <= oracle + 1e-9);
        }
    }

    #[test]
    fn scalar_lp_is_exact() {
        // min x s.t. x - 2 ≥ 0 as a 1x1 LMI
        let p = LmiProblem {
            num_vars: 1,
            objective: vec![1.0],
            blocks: vec![LmiBlock {
                constant: HermitianMatrix::from_real_diag(&[-2.0]),
                coeffs: vec![HermitianMatrix::from_real_diag(&[1.0])],
            }],
            eq_rows: vec![],
            eq_rhs: vec![],
        };
        let sol = sdp_minimize(&p, 1e-10, None).unwrap();
        assert!((sol.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_and_infeasible_are_reported() {
        let unbounded = LmiProblem {
            num_vars: 1,
            objective: vec![-1.0],
            blocks: vec![LmiBlock {
                constant: HermitianMatrix::from_real_diag(&[0.0]),
                coeffs: vec![HermitianMatrix::from_real_diag(&[1.0])],
            }],
            eq_rows: vec![],
            eq_rhs: vec![],
        };
        assert!(matches!(sdp_minimize(&unbounded, 1e-8, None), Err(Error::Unbounded)));

        // x ≥ 1 and -x ≥ 0
        let infeasible = LmiProblem {
            num_vars: 1,
            objective: vec![1.0],
            blocks: vec![
                LmiBlock {
                    constant: HermitianMatrix::from_real_diag(&[-1.0]),
                    coeffs: vec![HermitianMatrix::from_real_diag(&[1.0])],
                },
                LmiBlock {
                    constant: HermitianMatrix::from_real_diag(&[0.0]),
                    coeffs: vec![HermitianMatrix::from_real_diag(&[-1.0])],
                },
            ],
            eq_rows: vec![],
            eq_rhs: vec![],
        };
        assert!(matches!(sdp_minimize(&infeasible, 1e-8, None), Err(Error::Infeasible(_))));
    }

    #[test]
    fn equality_constrained_minimization() {
        // min x0 s.t. [[x0, 1],[1, x1]] ⪰ 0, x0 + x1 = 4  → x0 = 2 - √3
        let e = |i, j| {
            let mut m = ComplexMatrix::zeros(2, 2);
            m[(i, j)] = C64::new(1.0, 0.0);
            HermitianMatrix::from_hermitian_part(&m)
        };
        let mut off = ComplexMatrix::zeros(2, 2);
        off[(0, 1)] = C64::new(1.0, 0.0);
        off[(1, 0)] = C64::new(1.0, 0.0);
        let p = LmiProblem {
            num_vars: 2,
            objective: vec![1.0, 0.0],
            blocks: vec![LmiBlock {
                constant: HermitianMatrix::from_hermitian_part(&off),
                coeffs: vec![e(0, 0), e(1, 1)],
            }],
            eq_rows: vec![vec![1.0, 1.0]],
            eq_rhs: vec![4.0],
        };
        let sol = sdp_minimize(&p, 1e-10, None).unwrap();
        assert!((sol.value - (2.0 - 3f64.sqrt())).abs() < 1e-8, "{}", sol.value);
        assert!((sol.x[0] + sol.x[1] - 4.0).abs() < 1e-10);
    }
}
