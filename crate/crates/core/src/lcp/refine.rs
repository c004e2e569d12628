//! Support-based refinement shared by the iterative and pivoting solvers.
//!
//! Given an approximate solution with support `S`, the exact basic solution
//! is `z_S = -T_SS⁻¹ b_S`. When `T_SS` is singular the support is first
//! shrunk along null directions of `T_SS`; for PSD `T` such a direction is
//! also in `N(T)`, so the slack `w` does not move.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{verify_solution, LcpInstance};

fn principal(t: &DMatrix<f64>, support: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(support.len(), support.len(), |i, j| t[(support[i], support[j])])
}

fn singular_threshold(eig: &DVector<f64>, rank_tol: f64) -> f64 {
    let max_abs = eig.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    (eig.len() as f64 * f64::EPSILON * max_abs).max(rank_tol) * 10.0
}

/// Exact basic solution on `support`, after purifying a singular support.
pub(crate) fn refine_on_support(inst: &LcpInstance, z: &DVector<f64>, tol: f64) -> Option<DVector<f64>> {
    let t = inst.operator().matrix();
    let rank_tol = inst.operator().rank_tol();
    let n = inst.dim();
    let mut z = z.map(|v| if v > tol { v } else { 0.0 });

    for _ in 0..=n {
        let support: Vec<usize> = (0..n).filter(|&i| z[i] > 0.0).collect();
        if support.is_empty() {
            return Some(z);
        }
        let eig = SymmetricEigen::new(principal(t, &support));
        let threshold = singular_threshold(&eig.eigenvalues, rank_tol);
        let (k, min_abs) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(k, v)| (k, v.abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        if min_abs > threshold {
            let mut zs = DVector::zeros(support.len());
            for (k, lambda) in eig.eigenvalues.iter().enumerate() {
                let v = eig.eigenvectors.column(k);
                let coef = -support
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| v[i] * inst.b()[s])
                    .sum::<f64>()
                    / lambda;
                zs += v * coef;
            }
            let mut out = DVector::zeros(n);
            for (i, &s) in support.iter().enumerate() {
                out[s] = zs[i];
            }
            return Some(out);
        }
        // step along the null direction until a support coordinate hits zero
        let mut y: DVector<f64> = eig.eigenvectors.column(k).into_owned();
        if y.iter().all(|&v| v >= 0.0) {
            y = -y;
        }
        let (blocking, step) = support
            .iter()
            .enumerate()
            .filter(|(i, _)| y[*i] < 0.0)
            .map(|(i, &s)| (s, z[s] / -y[i]))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        for (i, &s) in support.iter().enumerate() {
            z[s] = (z[s] + step * y[i]).max(0.0);
        }
        z[blocking] = 0.0;
    }
    None
}

/// Replaces the raw iterate with its refinement when that verifies and is
/// no worse.
pub(crate) fn polish(inst: &LcpInstance, raw: DVector<f64>, tol: f64) -> DVector<f64> {
    let raw_report = verify_solution(inst, &raw, tol);
    let Some(refined) = refine_on_support(inst, &raw, tol) else {
        return raw;
    };
    let report = verify_solution(inst, &refined, tol);
    let score = |r: &super::ResidualReport| r.complementarity.max(-r.min_z).max(-r.min_w).max(0.0);
    if report.pass && (!raw_report.pass || score(&report) <= score(&raw_report)) {
        refined
    } else {
        raw
    }
}
