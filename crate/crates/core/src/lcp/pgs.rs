use nalgebra::DVector;

use super::refine::polish;
use super::{verify_solution, LcpError, LcpInstance, LcpSolution, SolverKind};

/// Projected Gauss-Seidel for symmetric PSD instances.
///
/// Each sweep updates `z_i <- max(0, z_i - (Tz + b)_i / T_ii)` in order.
/// Coordinates whose diagonal is within `rank_tol` of zero have a zero row
/// (PSD), so `w_i = b_i`: they are pinned to `z_i = 0`, and `b_i < -tol`
/// makes the instance infeasible.
///
/// On convergence the iterate is refined to the basic solution on its
/// support.
pub fn solve_pgs(inst: &LcpInstance, tol: f64, max_iters: usize) -> Result<LcpSolution, LcpError> {
    let n = inst.dim();
    let t = inst.operator().matrix();
    let rank_tol = inst.operator().rank_tol();
    let b = inst.b();

    let mut pinned = vec![false; n];
    for i in 0..n {
        if t[(i, i)] <= rank_tol {
            if b[i] < -tol {
                return Err(LcpError::StructuralInfeasibility {
                    coordinate: i,
                    value: b[i],
                });
            }
            pinned[i] = true;
        }
    }

    let mut z = DVector::zeros(n);
    for sweep in 1..=max_iters {
        for i in 0..n {
            if pinned[i] {
                continue;
            }
            let r = t.row(i).transpose().dot(&z) + b[i];
            z[i] = (z[i] - r / t[(i, i)]).max(0.0);
        }
        if verify_solution(inst, &z, tol).pass {
            let z = polish(inst, z, tol);
            return Ok(LcpSolution::from_z(inst, z, SolverKind::Pgs, sweep));
        }
    }
    Err(LcpError::NoConvergence {
        best: Box::new(LcpSolution::from_z(inst, z, SolverKind::Pgs, max_iters)),
    })
}
