//! Linear complementarity problems over the nonnegative orthant.
//!
//! `LCP(T, b)`: find `z >= 0` with `w = Tz + b >= 0` and `<z, w> = 0`.
//! The cone is fixed to the orthant, which is closed and self-dual.

mod enumerate;
mod lemke;
mod pgs;
mod ray;
mod refine;

pub use enumerate::{enumerate_solutions, EnumeratedSolution, Enumeration, DEFAULT_DIM_LIMIT};
pub use lemke::solve_lemke;
pub use pgs::solve_pgs;
pub use ray::{detect_null_ray, RayCertificate, RAY_SCALES};

use std::fmt;

use nalgebra::DVector;
use serde::Serialize;
use thiserror::Error;

use crate::operator::SymOperator;

/// Default residual tolerance for solvers and verification.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default sweep cap for projected Gauss-Seidel.
pub const DEFAULT_MAX_ITERS: usize = 100_000;

/// Default pivot cap for Lemke's method, `50 n`.
pub fn default_max_pivots(n: usize) -> usize {
    50 * n.max(1)
}

/// Threshold for declaring `z` a member of `R(T)`.
pub const RANGE_MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LcpError {
    #[error("b has length {b_len} but the operator has dimension {dim}")]
    DimensionMismatch { dim: usize, b_len: usize },
    #[error("b has a non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("Lemke's method terminated on a secondary ray after {pivots} pivots")]
    RayTermination { pivots: usize },
    #[error("pivot limit of {limit} exceeded")]
    PivotLimit { limit: usize },
    #[error("numerical breakdown: pivot element {pivot:e} is below 1e-12")]
    NumericalBreakdown { pivot: f64 },
    #[error("no convergence after {iterations} sweeps (complementarity {comp:e}, feasibility {feas:e})", iterations = best.iterations, comp = best.comp_residual, feas = best.feas_residual)]
    NoConvergence { best: Box<LcpSolution> },
    #[error("coordinate {coordinate} has a zero row but b = {value:e} < 0; the instance is infeasible")]
    StructuralInfeasibility { coordinate: usize, value: f64 },
    #[error("dimension {dim} exceeds the enumeration limit {limit}")]
    DimensionLimit { dim: usize, limit: usize },
}

/// `LCP(T, b)` over the nonnegative orthant of dimension `n`.
#[derive(Debug, Clone)]
pub struct LcpInstance {
    pub label: String,
    operator: SymOperator,
    b: DVector<f64>,
}

impl LcpInstance {
    pub fn new(operator: SymOperator, b: DVector<f64>) -> Result<Self, LcpError> {
        if b.len() != operator.dim() {
            return Err(LcpError::DimensionMismatch {
                dim: operator.dim(),
                b_len: b.len(),
            });
        }
        if let Some(i) = b.iter().position(|v| !v.is_finite()) {
            return Err(LcpError::NonFinite(i));
        }
        Ok(Self {
            label: "instance".to_string(),
            operator,
            b,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn operator(&self) -> &SymOperator {
        &self.operator
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `w = Tz + b`.
    pub fn slack(&self, z: &DVector<f64>) -> DVector<f64> {
        self.operator.apply(z) + &self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Lemke,
    Pgs,
    Enumeration,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Lemke => "lemke",
            SolverKind::Pgs => "pgs",
            SolverKind::Enumeration => "enumeration",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LcpSolution {
    #[serde(serialize_with = "crate::report::ser_vector")]
    pub z: DVector<f64>,
    #[serde(serialize_with = "crate::report::ser_vector")]
    pub w: DVector<f64>,
    /// `|<z, w>|`
    pub comp_residual: f64,
    /// Largest violation of `z >= 0` and `w >= 0`.
    pub feas_residual: f64,
    pub solver: SolverKind,
    pub iterations: usize,
}

impl LcpSolution {
    /// Wraps `z` with a freshly computed slack and residuals.
    pub fn from_z(inst: &LcpInstance, z: DVector<f64>, solver: SolverKind, iterations: usize) -> Self {
        let w = inst.slack(&z);
        let comp_residual = z.dot(&w).abs();
        let feas_residual = (-z.min()).max(-w.min()).max(0.0);
        Self {
            z,
            w,
            comp_residual,
            feas_residual,
            solver,
            iterations,
        }
    }

    pub fn id(&self) -> String {
        format!("{}-{}", self.solver, self.iterations)
    }

    pub fn worst_residual(&self) -> f64 {
        self.comp_residual.max(self.feas_residual)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub min_z: f64,
    pub min_w: f64,
    pub complementarity: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks `z >= -tol`, `Tz + b >= -tol` and `|<z, Tz + b>| <= tol`.
pub fn verify_solution(inst: &LcpInstance, z: &DVector<f64>, tol: f64) -> ResidualReport {
    assert_eq!(z.len(), inst.dim(), "solution dimension mismatch");
    let w = inst.slack(z);
    let min_z = z.min();
    let min_w = w.min();
    let complementarity = z.dot(&w).abs();
    ResidualReport {
        min_z,
        min_w,
        complementarity,
        tol,
        pass: min_z >= -tol && min_w >= -tol && complementarity <= tol,
    }
}

/// Orthogonal split `z = z_range + z_null` along `R(T) ⊕ N(T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSolution {
    pub range: DVector<f64>,
    pub null: DVector<f64>,
    /// `‖z_null‖ <= 1e-8 max(1, ‖z‖)`
    pub in_range: bool,
}

pub fn split_solution(t: &SymOperator, z: &DVector<f64>) -> SplitSolution {
    let range = t.project_range(z);
    let null = z - &range;
    let in_range = null.norm() <= RANGE_MEMBERSHIP_TOL * z.norm().max(1.0);
    SplitSolution { range, null, in_range }
}

/// Solver choice plus its limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverChoice {
    Lemke { max_pivots: Option<usize> },
    Pgs { max_iters: usize },
    Enumeration { dim_limit: usize },
}

/// Runs the chosen solver. Enumeration returns the first verified basic
/// solution; an empty oracle list is reported as `NoConvergence`.
pub fn solve(inst: &LcpInstance, choice: SolverChoice, tol: f64) -> Result<LcpSolution, LcpError> {
    match choice {
        SolverChoice::Lemke { max_pivots } => {
            solve_lemke(inst, tol, max_pivots.unwrap_or_else(|| default_max_pivots(inst.dim())))
        }
        SolverChoice::Pgs { max_iters } => solve_pgs(inst, tol, max_iters),
        SolverChoice::Enumeration { dim_limit } => {
            let found = enumerate_solutions(inst, dim_limit, tol)?;
            match found.solutions.into_iter().next() {
                Some(s) => Ok(s.solution),
                None => Err(LcpError::NoConvergence {
                    best: Box::new(LcpSolution::from_z(
                        inst,
                        DVector::zeros(inst.dim()),
                        SolverKind::Enumeration,
                        1 << inst.dim(),
                    )),
                }),
            }
        }
    }
}
