// Lemke's complementary pivoting with covering vector e = (1, ..., 1).
//
// Tableau rows encode  w - T z - e z0 = b  with columns
//   [0, n)      w
//   [n, 2n)     z
//   2n          z0
// The w columns start as the identity, so they always hold B⁻¹ and give
// the lexicographic tie-break rows. After every pivot the tableau is
// recomputed from the original columns of the current basis, which keeps
// roundoff from accumulating on singular operators.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};

use super::refine::polish;
use super::{LcpError, LcpInstance, LcpSolution, SolverKind};

const PIVOT_FLOOR: f64 = 1e-12;
const CANDIDATE_FLOOR: f64 = 1e-9;
const LEX_EPS: f64 = 1e-12;

struct Tableau {
    n: usize,
    orig: DMatrix<f64>,
    b: DVector<f64>,
    a: DMatrix<f64>,
    rhs: DVector<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(inst: &LcpInstance) -> Self {
        let n = inst.dim();
        let t = inst.operator().matrix();
        let mut a = DMatrix::zeros(n, 2 * n + 1);
        for i in 0..n {
            a[(i, i)] = 1.0;
            for j in 0..n {
                a[(i, n + j)] = -t[(i, j)];
            }
            a[(i, 2 * n)] = -1.0;
        }
        Self {
            n,
            orig: a.clone(),
            b: inst.b().clone(),
            a,
            rhs: inst.b().clone(),
            basis: (0..n).collect(),
        }
    }

    fn lex_row(&self, row: usize, divisor: f64) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.rhs[row] / divisor).chain((0..self.n).map(move |j| self.a[(row, j)] / divisor))
    }

    fn pivot(&mut self, row: usize, col: usize) -> usize {
        let p = self.a[(row, col)];
        let width = self.a.ncols();
        for j in 0..width {
            self.a[(row, j)] /= p;
        }
        self.rhs[row] /= p;
        for i in 0..self.n {
            if i == row {
                continue;
            }
            let f = self.a[(i, col)];
            if f == 0.0 {
                continue;
            }
            for j in 0..width {
                let v = self.a[(row, j)];
                self.a[(i, j)] -= f * v;
            }
            self.rhs[i] -= f * self.rhs[row];
        }
        std::mem::replace(&mut self.basis[row], col)
    }

    /// Replaces the updated tableau by `B⁻¹ [A | b]` for the current basis.
    fn refresh(&mut self) -> Result<(), LcpError> {
        let b = self.orig.select_columns(&self.basis);
        let lu = b.lu();
        match (lu.solve(&self.orig), lu.solve(&self.b)) {
            (Some(a), Some(rhs)) if a.iter().chain(rhs.iter()).all(|v| v.is_finite()) => {
                self.a = a;
                self.rhs = rhs;
                Ok(())
            }
            _ => Err(LcpError::NumericalBreakdown { pivot: 0.0 }),
        }
    }

    fn complement(&self, var: usize) -> usize {
        if var < self.n {
            var + self.n
        } else {
            var - self.n
        }
    }
}

fn lex_cmp(a: impl Iterator<Item = f64>, b: impl Iterator<Item = f64>) -> Ordering {
    for (x, y) in a.zip(b) {
        let scale = 1.0_f64.max(x.abs()).max(y.abs());
        if (x - y).abs() > LEX_EPS * scale {
            return x.total_cmp(&y);
        }
    }
    Ordering::Equal
}

/// Solves `LCP(T, b)` by Lemke's method with a lexicographic ratio test.
///
/// The basic solution is re-solved on its support before residuals are
/// computed.
pub fn solve_lemke(inst: &LcpInstance, tol: f64, max_pivots: usize) -> Result<LcpSolution, LcpError> {
    let n = inst.dim();
    if inst.b().iter().all(|&v| v >= 0.0) {
        return Ok(LcpSolution::from_z(inst, DVector::zeros(n), SolverKind::Lemke, 0));
    }
    let mut tab = Tableau::new(inst);
    let z0 = 2 * n;

    // z0 enters; the leaving row is the lexicographic minimum of (b_i, e_i)
    let first = (0..n)
        .min_by(|&i, &k| lex_cmp(tab.lex_row(i, 1.0), tab.lex_row(k, 1.0)))
        .expect("n >= 1");
    let mut leaving = tab.pivot(first, z0);
    tab.refresh()?;
    let mut pivots = 1;

    while tab.basis.contains(&z0) {
        if pivots >= max_pivots {
            return Err(LcpError::PivotLimit { limit: max_pivots });
        }
        let entering = tab.complement(leaving);
        let col_scale = (0..n).map(|i| tab.a[(i, entering)].abs()).fold(1.0_f64, f64::max);
        let candidates: Vec<usize> = (0..n)
            .filter(|&i| tab.a[(i, entering)] > CANDIDATE_FLOOR * col_scale)
            .collect();
        let Some(row) = candidates.iter().copied().min_by(|&i, &k| {
            lex_cmp(
                tab.lex_row(i, tab.a[(i, entering)]),
                tab.lex_row(k, tab.a[(k, entering)]),
            )
        }) else {
            return Err(LcpError::RayTermination { pivots });
        };
        let p = tab.a[(row, entering)];
        if p < PIVOT_FLOOR {
            return Err(LcpError::NumericalBreakdown { pivot: p });
        }
        leaving = tab.pivot(row, entering);
        tab.refresh()?;
        pivots += 1;
        if leaving == z0 {
            break;
        }
    }

    let mut z = DVector::zeros(n);
    for (row, &var) in tab.basis.iter().enumerate() {
        if (n..2 * n).contains(&var) {
            z[var - n] = tab.rhs[row].max(0.0);
        }
    }
    let z = polish(inst, z, tol);
    Ok(LcpSolution::from_z(inst, z, SolverKind::Lemke, pivots))
}
