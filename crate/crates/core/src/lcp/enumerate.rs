//! Brute-force oracle over all `2^n` complementary bases.
//!
//! Deliberately shares no numerics with the solvers: nonsingular principal
//! systems go through LU, singular ones through an SVD least-squares
//! solve.

use nalgebra::{DMatrix, DVector};

use super::{verify_solution, LcpError, LcpInstance, LcpSolution, SolverKind};

pub const DEFAULT_DIM_LIMIT: usize = 12;
const DEDUP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedSolution {
    pub solution: LcpSolution,
    /// Index subset `S` whose principal system produced the solution.
    pub support: Vec<usize>,
    /// `T_SS` was singular and a least-squares solution was used.
    pub singular: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Enumeration {
    /// Verified solutions, deduplicated within `1e-6` (max-abs).
    pub solutions: Vec<EnumeratedSolution>,
    /// Every subset whose principal submatrix was singular.
    pub singular_subsets: Vec<Vec<usize>>,
}

impl Enumeration {
    /// Position of the listed solution within `tol` (max-abs) of `z`.
    pub fn position(&self, z: &DVector<f64>, tol: f64) -> Option<usize> {
        self.solutions.iter().position(|s| (&s.solution.z - z).amax() <= tol)
    }

    pub fn contains(&self, z: &DVector<f64>, tol: f64) -> bool {
        self.position(z, tol).is_some()
    }
}

fn principal_solve(t: &DMatrix<f64>, b: &DVector<f64>, support: &[usize]) -> (DVector<f64>, bool) {
    let k = support.len();
    let sub = DMatrix::from_fn(k, k, |i, j| t[(support[i], support[j])]);
    let rhs = DVector::from_fn(k, |i, _| -b[support[i]]);
    let svd = sub.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().copied().fold(f64::MAX, f64::min);
    let cutoff = k as f64 * f64::EPSILON * smax * 10.0;
    if smin > cutoff {
        if let Some(x) = sub.lu().solve(&rhs) {
            return (x, false);
        }
    }
    let x = svd
        .solve(&rhs, cutoff.max(f64::MIN_POSITIVE))
        .unwrap_or_else(|_| DVector::zeros(k));
    (x, true)
}

/// Enumerates basic solutions of `LCP(T, b)` for `n <= dim_limit`.
///
/// For every subset `S` the system `T_SS z_S = -b_S` is solved (least
/// squares when singular), `z` is zero off `S`, and the candidate is kept
/// when it passes [`verify_solution`] at `tol`.
pub fn enumerate_solutions(inst: &LcpInstance, dim_limit: usize, tol: f64) -> Result<Enumeration, LcpError> {
    let n = inst.dim();
    if n > dim_limit || n >= usize::BITS as usize {
        return Err(LcpError::DimensionLimit {
            dim: n,
            limit: dim_limit,
        });
    }
    let t = inst.operator().matrix();
    let mut out = Enumeration::default();
    for mask in 0u64..(1u64 << n) {
        let support: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let (zs, singular) = if support.is_empty() {
            (DVector::zeros(0), false)
        } else {
            principal_solve(t, inst.b(), &support)
        };
        if singular {
            out.singular_subsets.push(support.clone());
        }
        let mut z = DVector::zeros(n);
        for (i, &s) in support.iter().enumerate() {
            z[s] = zs[i];
        }
        if !verify_solution(inst, &z, tol).pass || out.contains(&z, DEDUP_TOL) {
            continue;
        }
        out.solutions.push(EnumeratedSolution {
            solution: LcpSolution::from_z(inst, z, SolverKind::Enumeration, mask as usize),
            support,
            singular,
        });
    }
    Ok(out)
}
