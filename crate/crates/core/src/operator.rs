//! Symmetric operators on a finite-dimensional real Hilbert space.
//!
//! A [`SymOperator`] stores a symmetrized matrix together with its spectral
//! decomposition (eigenvalues sorted descending, orthonormal eigenvectors)
//! and an absolute eigenvalue threshold `rank_tol`. Eigenvalues with
//! `|λ| <= rank_tol` are treated as the null cluster; everything in this
//! module that talks about the range `R(T)` means the span of the
//! remaining eigenvectors.
//!
//! Because every matrix has closed range, "closed range with `m_r > 0`"
//! is modeled as a spectral gap: an operator is *rank unstable* when some
//! eigenvalue magnitude falls inside `(rank_tol, 2 rank_tol)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

/// Relative tolerance used by the duality, Penrose and square-root checks.
pub const IDENTITY_TOL: f64 = 1e-8;

/// Tolerance for the sup-variant equalities when `m_r > 0`.
pub const SUP_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("operator must have at least one row")]
    Empty,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not symmetric: |A - A^T|_inf = {deviation:e} exceeds {threshold:e}")]
    Asymmetric { deviation: f64, threshold: f64 },
    #[error("rank tolerance must be finite and nonnegative, got {0}")]
    BadRankTol(f64),
    #[error("operator is not positive semidefinite: eigenvalue {value:e} (index {index}) is below -{rank_tol:e}")]
    NotPsd { index: usize, value: f64, rank_tol: f64 },
}

/// Symmetric `n x n` operator with a cached spectral decomposition.
#[derive(Debug, Clone)]
pub struct SymOperator {
    entries: DMatrix<f64>,
    rank_tol: f64,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

/// Default numerical-rank threshold `n * eps * max|λ|`.
pub fn default_rank_tol(n: usize, eigenvalues: &DVector<f64>) -> f64 {
    let max_abs = eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    n as f64 * f64::EPSILON * max_abs
}

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `|a - b|_F / max(1, |scale|_F)`.
pub fn rel_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>, scale: &DMatrix<f64>) -> f64 {
    (a - b).norm() / scale.norm().max(1.0)
}

impl SymOperator {
    /// Builds an operator from a square, numerically symmetric matrix.
    ///
    /// The stored matrix is `(A + A^T) / 2`. When `rank_tol` is `None` the
    /// default `n * eps * max|λ|` is used.
    pub fn new(entries: DMatrix<f64>, rank_tol: Option<f64>) -> Result<Self, OperatorError> {
        let (rows, cols) = entries.shape();
        if rows == 0 || cols == 0 {
            return Err(OperatorError::Empty);
        }
        if rows != cols {
            return Err(OperatorError::NotSquare { rows, cols });
        }
        for j in 0..cols {
            for i in 0..rows {
                if !entries[(i, j)].is_finite() {
                    return Err(OperatorError::NonFinite { row: i, col: j });
                }
            }
        }
        if let Some(tol) = rank_tol {
            if !tol.is_finite() || tol < 0.0 {
                return Err(OperatorError::BadRankTol(tol));
            }
        }
        let transposed = entries.transpose();
        let deviation = inf_norm(&(&entries - &transposed));
        let threshold = 1e-8 * inf_norm(&entries).max(1.0);
        if deviation > threshold {
            return Err(OperatorError::Asymmetric { deviation, threshold });
        }
        let sym = (&entries + &transposed) * 0.5;
        let eig = SymmetricEigen::new(sym.clone());
        let (eigenvalues, eigenvectors) = sort_descending(eig.eigenvalues, eig.eigenvectors);
        let rank_tol = rank_tol.unwrap_or_else(|| default_rank_tol(rows, &eigenvalues));
        Ok(Self {
            entries: sym,
            rank_tol,
            eigenvalues,
            eigenvectors,
        })
    }

    /// Builds an operator from row slices.
    pub fn from_rows(rows: &[Vec<f64>], rank_tol: Option<f64>) -> Result<Self, OperatorError> {
        let n = rows.len();
        if n == 0 {
            return Err(OperatorError::Empty);
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(OperatorError::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]), rank_tol)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self, OperatorError> {
        Self::new(DMatrix::from_diagonal(&DVector::from_row_slice(diag)), None)
    }

    pub fn identity(n: usize) -> Result<Self, OperatorError> {
        Self::new(DMatrix::identity(n, n), None)
    }

    pub fn zeros(n: usize) -> Result<Self, OperatorError> {
        Self::new(DMatrix::zeros(n, n), None)
    }

    /// Assembles `V diag(values) V^T` from an orthonormal eigenbasis whose
    /// spectrum is already known exactly. The decomposition is kept as-is
    /// (re-sorted descending) instead of being recomputed.
    pub(crate) fn from_spectral(values: DVector<f64>, vectors: DMatrix<f64>, rank_tol: Option<f64>) -> Self {
        let n = values.len();
        let (values, vectors) = sort_descending(values, vectors);
        let mut scaled = vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= values[j];
        }
        let m = &scaled * vectors.transpose();
        let entries = (&m + m.transpose()) * 0.5;
        let rank_tol = rank_tol.unwrap_or_else(|| default_rank_tol(n, &values));
        Self {
            entries,
            rank_tol,
            eigenvalues: values,
            eigenvectors: vectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    /// Same matrix with a different rank threshold.
    pub fn with_rank_tol(&self, rank_tol: f64) -> Result<Self, OperatorError> {
        if !rank_tol.is_finite() || rank_tol < 0.0 {
            return Err(OperatorError::BadRankTol(rank_tol));
        }
        Ok(Self {
            rank_tol,
            ..self.clone()
        })
    }

    /// Eigenvalues, sorted descending.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns, matching [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    fn in_range_cluster(&self, lambda: f64) -> bool {
        lambda.abs() > self.rank_tol
    }

    /// Indices of eigenpairs spanning `R(T)`.
    pub fn range_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.in_range_cluster(self.eigenvalues[i]))
            .collect()
    }

    /// Indices of eigenpairs spanning `N(T)`.
    pub fn null_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| !self.in_range_cluster(self.eigenvalues[i]))
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.range_indices().len()
    }

    /// True when an eigenvalue magnitude lies in `(rank_tol, 2 rank_tol)`.
    pub fn is_rank_unstable(&self) -> bool {
        self.eigenvalues
            .iter()
            .any(|l| l.abs() > self.rank_tol && l.abs() < 2.0 * self.rank_tol)
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.entries * x
    }

    /// `<Tx, x>`.
    pub fn quadratic_form(&self, x: &DVector<f64>) -> f64 {
        self.apply(x).dot(x)
    }

    /// Frobenius norm of the stored matrix.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Moore-Penrose inverse `Σ_{|λ|>tol} λ⁻¹ v vᵀ`.
    ///
    /// The zero operator maps to the zero operator.
    pub fn pseudoinverse(&self) -> SymOperator {
        let values = self
            .eigenvalues
            .map(|l| if self.in_range_cluster(l) { 1.0 / l } else { 0.0 });
        SymOperator::from_spectral(values, self.eigenvectors.clone(), None)
    }

    /// Positive square root `Σ max(λ, 0)^{1/2} v vᵀ`.
    ///
    /// Eigenvalues inside the null cluster map to zero so that
    /// `R(T^{1/2}) = R(T)` holds exactly at the operator's rank threshold.
    pub fn sqrt_psd(&self) -> Result<SymOperator, OperatorError> {
        if let Some((index, &value)) = self.eigenvalues.iter().enumerate().find(|(_, &l)| l < -self.rank_tol) {
            return Err(OperatorError::NotPsd {
                index,
                value,
                rank_tol: self.rank_tol,
            });
        }
        let values = self.eigenvalues.map(|l| {
            if self.in_range_cluster(l) {
                l.max(0.0).sqrt()
            } else {
                0.0
            }
        });
        Ok(SymOperator::from_spectral(values, self.eigenvectors.clone(), None))
    }

    /// Orthogonal projectors onto `R(T)` and `N(T)`.
    pub fn range_decomposition(&self) -> RangeDecomposition {
        let n = self.dim();
        let ones = self
            .eigenvalues
            .map(|l| if self.in_range_cluster(l) { 1.0 } else { 0.0 });
        let range = SymOperator::from_spectral(ones.clone(), self.eigenvectors.clone(), None);
        let zeros_ones = ones.map(|v| 1.0 - v);
        let null = SymOperator::from_spectral(zeros_ones, self.eigenvectors.clone(), None);
        debug_assert_eq!(range.dim(), n);
        RangeDecomposition {
            range_projector: range,
            null_projector: null,
        }
    }

    /// Orthogonal projection of `x` onto `R(T)`.
    pub fn project_range(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        for i in self.range_indices() {
            let v = self.eigenvectors.column(i);
            out += v * v.dot(x);
        }
        out
    }

    /// `M(T)`, `m(T)`, `m_r(T)` and the flags derived from them.
    pub fn spectral_summary(&self) -> SpectralSummary {
        let n = self.dim();
        let big_m = self.eigenvalues[0];
        let small_m = self.eigenvalues[n - 1];
        let range = self.range_indices();
        let m_r = range
            .iter()
            .map(|&i| self.eigenvalues[i])
            .fold(None, |acc: Option<f64>, l| Some(acc.map_or(l, |a| a.min(l))));
        let is_psd = small_m >= -self.rank_tol;
        let mr_positive = m_r.is_some_and(|v| v > self.rank_tol);
        SpectralSummary {
            big_m,
            small_m,
            m_r,
            rank: range.len(),
            rank_tol: self.rank_tol,
            is_psd,
            mr_positive,
            rank_unstable: self.is_rank_unstable(),
            sup_variants: self.sup_variants(),
        }
    }

    /// Suprema of `<Tx, x>` over the range sphere, range ball, full sphere
    /// and full ball.
    pub fn sup_variants(&self) -> SupVariants {
        let range_max = self
            .range_indices()
            .iter()
            .map(|&i| self.eigenvalues[i])
            .fold(None, |acc: Option<f64>, l| Some(acc.map_or(l, |a| a.max(l))));
        let sphere_max = self.eigenvalues[0];
        SupVariants {
            r1: range_max,
            // the ball contains x = 0
            r2: range_max.unwrap_or(0.0).max(0.0),
            r3: sphere_max,
            r4: sphere_max.max(0.0),
        }
    }

    pub fn classify(&self) -> Classification {
        let s = self.spectral_summary();
        let closed_range = !s.rank_unstable;
        let positive_closed = s.is_psd && s.rank > 0 && closed_range;
        Classification {
            is_psd: s.is_psd,
            mr_positive: s.mr_positive,
            closed_range,
            equivalence_holds: s.mr_positive == positive_closed,
        }
    }

    /// Residuals of the four Penrose identities for a candidate inverse `s`.
    pub fn penrose_residuals(&self, s: &DMatrix<f64>) -> PenroseResiduals {
        let t = &self.entries;
        let ts = t * s;
        let st = s * t;
        PenroseResiduals {
            tst: rel_frobenius(&(&ts * t), t, t),
            sts: rel_frobenius(&(&st * s), s, s),
            ts_symmetric: rel_frobenius(&ts.transpose(), &ts, &ts),
            st_symmetric: rel_frobenius(&st.transpose(), &st, &st),
        }
    }

    /// Checks `M(T†) m_r(T) = 1`, `m_r(T†) M(T) = 1`, `‖T†‖₂ m_r(T) = 1`
    /// and the sign/PSD transfer laws.
    ///
    /// The functionals of `T†` are recomputed from its matrix with a fresh
    /// eigendecomposition and an SVD, not read back from the spectral data
    /// used to build it.
    pub fn verify_duality(&self) -> DualityReport {
        let summary = self.spectral_summary();
        let pinv = self.pseudoinverse();
        let fresh = SymmetricEigen::new(pinv.matrix().clone());
        let mut by_magnitude: Vec<f64> = fresh.eigenvalues.iter().copied().collect();
        by_magnitude.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        let pinv_big_m = fresh.eigenvalues.iter().copied().fold(f64::MIN, f64::max);
        let pinv_small_m = fresh.eigenvalues.iter().copied().fold(f64::MAX, f64::min);
        let pinv_m_r = by_magnitude[..summary.rank]
            .iter()
            .copied()
            .fold(None, |acc: Option<f64>, l| Some(acc.map_or(l, |a| a.min(l))));
        let pinv_norm2 = pinv
            .matrix()
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .fold(0.0, f64::max);
        let pinv_tol = pinv.rank_tol();
        let pinv_is_psd = pinv_small_m >= -pinv_tol;
        let pinv_mr_positive = pinv_m_r.is_some_and(|v| v > pinv_tol);

        let mut hypotheses = Vec::new();
        if !summary.mr_positive {
            hypotheses.push(match summary.m_r {
                None => "m_r(T) not applicable (zero operator)".to_string(),
                Some(v) => format!("m_r(T) = {v:e} <= rank_tol"),
            });
        }
        if summary.rank_unstable {
            hypotheses.push("rank unstable (no spectral gap)".to_string());
        }
        let applicable = hypotheses.is_empty();
        let (res_sup, res_inf, res_norm) = match (summary.m_r, pinv_m_r) {
            (Some(mr), Some(pmr)) if applicable => (
                (pinv_big_m * mr - 1.0).abs(),
                (pmr * summary.big_m - 1.0).abs(),
                (pinv_norm2 * mr - 1.0).abs(),
            ),
            _ => (f64::NAN, f64::NAN, f64::NAN),
        };
        let psd_transfer = summary.is_psd == pinv_is_psd;
        let sign_agreement = summary.mr_positive == pinv_mr_positive;
        let holds = applicable
            && res_sup <= IDENTITY_TOL
            && res_inf <= IDENTITY_TOL
            && res_norm <= IDENTITY_TOL
            && psd_transfer
            && sign_agreement;
        DualityReport {
            applicable,
            hypotheses: hypotheses.join("; "),
            big_m: summary.big_m,
            m_r: summary.m_r,
            pinv_big_m,
            pinv_m_r,
            pinv_norm2,
            residual_pinv_sup: res_sup,
            residual_pinv_inf: res_inf,
            residual_pinv_norm: res_norm,
            is_psd: summary.is_psd,
            pinv_is_psd,
            sign_agreement,
            holds,
        }
    }
}

fn sort_descending(values: DVector<f64>, vectors: DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let sorted_values = DVector::from_fn(n, |i, _| values[order[i]]);
    let sorted_vectors = DMatrix::from_fn(vectors.nrows(), n, |r, c| vectors[(r, order[c])]);
    (sorted_values, sorted_vectors)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupVariants {
    /// Sup over unit vectors in `R(T)`; `None` when `R(T) = {0}`.
    pub r1: Option<f64>,
    /// Sup over the unit ball of `R(T)`.
    pub r2: f64,
    /// Sup over the unit sphere.
    pub r3: f64,
    /// Sup over the unit ball.
    pub r4: f64,
}

impl SupVariants {
    /// Largest pairwise gap among the four values, or `None` when `r1` is
    /// undefined.
    pub fn max_spread(&self) -> Option<f64> {
        let r1 = self.r1?;
        let vals = [r1, self.r2, self.r3, self.r4];
        let hi = vals.iter().copied().fold(f64::MIN, f64::max);
        let lo = vals.iter().copied().fold(f64::MAX, f64::min);
        Some(hi - lo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub big_m: f64,
    pub small_m: f64,
    /// `None` for the zero operator.
    pub m_r: Option<f64>,
    pub rank: usize,
    pub rank_tol: f64,
    pub is_psd: bool,
    pub mr_positive: bool,
    pub rank_unstable: bool,
    pub sup_variants: SupVariants,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub is_psd: bool,
    pub mr_positive: bool,
    /// Spectral-gap model of a closed range.
    pub closed_range: bool,
    /// `mr_positive <=> (is_psd && rank > 0 && closed_range)`.
    pub equivalence_holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PenroseResiduals {
    pub tst: f64,
    pub sts: f64,
    pub ts_symmetric: f64,
    pub st_symmetric: f64,
}

impl PenroseResiduals {
    pub fn max(&self) -> f64 {
        self.tst.max(self.sts).max(self.ts_symmetric).max(self.st_symmetric)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    pub applicable: bool,
    /// Unmet hypotheses, empty when applicable.
    pub hypotheses: String,
    pub big_m: f64,
    pub m_r: Option<f64>,
    pub pinv_big_m: f64,
    pub pinv_m_r: Option<f64>,
    pub pinv_norm2: f64,
    /// `|M(T†) m_r(T) - 1|`
    pub residual_pinv_sup: f64,
    /// `|m_r(T†) M(T) - 1|`
    pub residual_pinv_inf: f64,
    /// `|‖T†‖₂ m_r(T) - 1|`
    pub residual_pinv_norm: f64,
    pub is_psd: bool,
    pub pinv_is_psd: bool,
    pub sign_agreement: bool,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct RangeDecomposition {
    /// `T T†`
    pub range_projector: SymOperator,
    /// `I - T T†`
    pub null_projector: SymOperator,
}
