use nalgebra::DVector;
use serde::Serialize;

use super::{split_solution, verify_solution, LcpInstance, LcpSolution, ResidualReport};

/// Scalings of the ray direction checked by every certificate.
pub const RAY_SCALES: [f64; 3] = [1.0, 10.0, 100.0];

const NONNEG_SLOP: f64 = 1e-9;

/// Witness that `SOL(T, b)` is unbounded: `z + t d` solves for all `t >= 0`
/// because `Td = 0`, `d >= 0` and `<d, b> = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayCertificate {
    pub base: LcpSolution,
    /// Unit, nonnegative direction in `N(T)`.
    #[serde(serialize_with = "crate::report::ser_vector")]
    pub direction: DVector<f64>,
    pub null_residual: f64,
    pub b_inner: f64,
    /// Verification of `base.z + t d` for each `t` in [`RAY_SCALES`].
    pub checks: Vec<(f64, ResidualReport)>,
}

impl RayCertificate {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|(_, r)| r.pass)
    }
}

fn try_direction(inst: &LcpInstance, sol: &LcpSolution, raw: &DVector<f64>, tol: f64) -> Option<RayCertificate> {
    let scale = raw.amax();
    if scale == 0.0 || raw.min() < -NONNEG_SLOP * scale {
        return None;
    }
    let mut d = raw.map(|v| v.max(0.0));
    let norm = d.norm();
    if norm == 0.0 {
        return None;
    }
    d /= norm;
    let t = inst.operator();
    let null_residual = t.apply(&d).norm();
    let b_inner = d.dot(inst.b());
    if null_residual > tol * t.frobenius_norm().max(1.0) || b_inner.abs() > tol * inst.b().norm().max(1.0) {
        return None;
    }
    let checks: Vec<(f64, ResidualReport)> = RAY_SCALES
        .iter()
        .map(|&s| (s, verify_solution(inst, &(&sol.z + &d * s), tol)))
        .collect();
    if !checks.iter().all(|(_, r)| r.pass) {
        return None;
    }
    Some(RayCertificate {
        base: sol.clone(),
        direction: d,
        null_residual,
        b_inner,
        checks,
    })
}

/// Searches `N(T)` for a nonnegative direction orthogonal to `b`.
///
/// Candidates, in order: the null component of `sol.z`, each null-space
/// eigenvector (both signs), and the null projections of the coordinate
/// vectors. `None` does not prove that the solution set is bounded.
pub fn detect_null_ray(inst: &LcpInstance, sol: &LcpSolution, tol: f64) -> Option<RayCertificate> {
    let t = inst.operator();
    let null_idx = t.null_indices();
    if null_idx.is_empty() {
        return None;
    }
    let split = split_solution(t, &sol.z);
    if !split.in_range {
        if let Some(c) = try_direction(inst, sol, &split.null, tol) {
            return Some(c);
        }
    }
    for &k in &null_idx {
        let v: DVector<f64> = t.eigenvectors().column(k).into_owned();
        for cand in [v.clone(), -v] {
            if let Some(c) = try_direction(inst, sol, &cand, tol) {
                return Some(c);
            }
        }
    }
    let null_proj = t.range_decomposition().null_projector;
    for i in 0..t.dim() {
        let cand: DVector<f64> = null_proj.matrix().column(i).into_owned();
        if let Some(c) = try_direction(inst, sol, &cand, tol) {
            return Some(c);
        }
    }
    None
}
