//! Solution-set bounds for `LCP(T, b)` with self-adjoint `T`.
//!
//! Every check takes the operator, `b` and a verified solution `z` and
//! reports whether the theorem's hypotheses hold (`applicable`) before
//! comparing the two sides. Unmet hypotheses never count as failures.
//!
//! | check            | hypotheses                         | claim                                   |
//! |------------------|------------------------------------|-----------------------------------------|
//! | `T4.1-ray`       | ray found in `N(T)`                | `z + t d` solves for all `t >= 0`       |
//! | `T4.2-ball`      | `m_r > 0`, `z ∈ R(T)`              | `‖z‖ <= ‖b‖ / m_r`                      |
//! | `T4.3-ratio`     | `m_r > 0`, `b, z ∈ R(T)`           | `‖z‖ <= (M / m_r) ‖T†b‖`                |
//! | `C4.4-invertible`| `m > 0` (full rank)                | `‖z‖ <= (M / m) ‖T⁻¹b‖`                 |
//! | `T4.5-identity`  | `b ∈ R(T)`                         | `<z-x_b, T(z-x_b)> = <b, T†b> / 4`      |
//! | `T4.6-annulus`   | `m_r > 0`, `b, z ∈ R(T)`, `z ≠ x_b`| `‖b‖/2M <= ‖z-x_b‖ <= ‖b‖/2m_r`         |
//!
//! Here `x_b = -T†b / 2`.

use std::fmt;

use nalgebra::DVector;
use serde::Serialize;
use thiserror::Error;

use crate::lcp::{
    detect_null_ray, split_solution, verify_solution, LcpInstance, LcpSolution, RayCertificate, ResidualReport,
};
use crate::operator::{SpectralSummary, SymOperator};

/// Additive slack for inequality checks.
pub const INEQUALITY_SLACK: f64 = 1e-8;
/// Relative tolerance for the quadratic identity.
pub const IDENTITY_REL_TOL: f64 = 1e-8;
/// `z` and `x_b` closer than this are treated as equal.
pub const CENTER_COINCIDENCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Theorem {
    #[serde(rename = "T4.1-ray")]
    Ray,
    #[serde(rename = "T4.2-ball")]
    Ball,
    #[serde(rename = "T4.3-ratio")]
    Ratio,
    #[serde(rename = "C4.4-invertible")]
    Invertible,
    #[serde(rename = "T4.5-identity")]
    Identity,
    #[serde(rename = "T4.6-annulus")]
    Annulus,
}

impl Theorem {
    /// Fixed certificate order.
    pub const ALL: [Theorem; 6] = [
        Theorem::Ray,
        Theorem::Ball,
        Theorem::Ratio,
        Theorem::Invertible,
        Theorem::Identity,
        Theorem::Annulus,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Theorem::Ray => "T4.1-ray",
            Theorem::Ball => "T4.2-ball",
            Theorem::Ratio => "T4.3-ratio",
            Theorem::Invertible => "C4.4-invertible",
            Theorem::Identity => "T4.5-identity",
            Theorem::Annulus => "T4.6-annulus",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Right-hand side of a check: a single bound or an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Bound {
    Value(f64),
    Interval { lower: f64, upper: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub theorem: Theorem,
    pub applicable: bool,
    /// Failed hypotheses, empty when applicable.
    pub hypotheses: String,
    pub lhs: f64,
    pub rhs: Bound,
    /// `rhs - lhs` for one-sided checks, distance to the nearer end for the
    /// annulus, `-|lhs - rhs|` for the identity.
    pub slack: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub instance_id: String,
    pub solution_id: String,
    pub checks: Vec<BoundCheck>,
    #[serde(skip)]
    pub ray: Option<RayCertificate>,
}

impl BoundCertificate {
    /// Every applicable check passes.
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| !c.applicable || c.pass)
    }

    pub fn check(&self, theorem: Theorem) -> &BoundCheck {
        self.checks
            .iter()
            .find(|c| c.theorem == theorem)
            .expect("certificate holds every theorem")
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("solution does not verify (min z {min_z:e}, min w {min_w:e}, complementarity {complementarity:e})", min_z = .0.min_z, min_w = .0.min_w, complementarity = .0.complementarity)]
    Unverified(ResidualReport),
}

/// `x_b = -T†b / 2`.
pub fn center_point(t: &SymOperator, b: &DVector<f64>) -> DVector<f64> {
    t.pseudoinverse().apply(b) * -0.5
}

struct Context<'a> {
    t: &'a SymOperator,
    b: &'a DVector<f64>,
    z: &'a DVector<f64>,
    summary: SpectralSummary,
    pinv_b: DVector<f64>,
    b_in_range: bool,
    z_in_range: bool,
}

impl<'a> Context<'a> {
    fn new(t: &'a SymOperator, b: &'a DVector<f64>, z: &'a DVector<f64>) -> Self {
        Self {
            t,
            b,
            z,
            summary: t.spectral_summary(),
            pinv_b: t.pseudoinverse().apply(b),
            b_in_range: split_solution(t, b).in_range,
            z_in_range: split_solution(t, z).in_range,
        }
    }

    fn center(&self) -> DVector<f64> {
        &self.pinv_b * -0.5
    }

    fn require(&self, flags: &[Hypothesis]) -> Vec<&'static str> {
        let mut failed = Vec::new();
        if self.summary.rank_unstable {
            failed.push("rank unstable");
        }
        for h in flags {
            let ok = match h {
                Hypothesis::MrPositive => self.summary.mr_positive,
                Hypothesis::BInRange => self.b_in_range,
                Hypothesis::ZInRange => self.z_in_range,
                Hypothesis::FullRankPositive => {
                    self.summary.rank == self.t.dim() && self.summary.small_m > self.t.rank_tol()
                }
            };
            if !ok {
                failed.push(h.describe());
            }
        }
        failed
    }

    fn m_r(&self) -> f64 {
        self.summary.m_r.unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Copy)]
enum Hypothesis {
    MrPositive,
    BInRange,
    ZInRange,
    FullRankPositive,
}

impl Hypothesis {
    fn describe(self) -> &'static str {
        match self {
            Hypothesis::MrPositive => "m_r(T) <= 0",
            Hypothesis::BInRange => "b not in R(T)",
            Hypothesis::ZInRange => "z not in R(T)",
            Hypothesis::FullRankPositive => "m(T) <= 0",
        }
    }
}

fn one_sided(theorem: Theorem, failed: Vec<&'static str>, lhs: f64, rhs: f64) -> BoundCheck {
    let applicable = failed.is_empty();
    BoundCheck {
        theorem,
        applicable,
        hypotheses: failed.join("; "),
        lhs,
        rhs: Bound::Value(rhs),
        slack: rhs - lhs,
        tol: INEQUALITY_SLACK,
        pass: applicable && lhs <= rhs + INEQUALITY_SLACK,
    }
}

fn ball(c: &Context) -> BoundCheck {
    let failed = c.require(&[Hypothesis::MrPositive, Hypothesis::ZInRange]);
    one_sided(Theorem::Ball, failed, c.z.norm(), c.b.norm() / c.m_r())
}

fn ratio(c: &Context) -> BoundCheck {
    let failed = c.require(&[Hypothesis::MrPositive, Hypothesis::BInRange, Hypothesis::ZInRange]);
    let rhs = c.summary.big_m / c.m_r() * c.pinv_b.norm();
    one_sided(Theorem::Ratio, failed, c.z.norm(), rhs)
}

fn invertible(c: &Context) -> BoundCheck {
    let failed = c.require(&[Hypothesis::FullRankPositive]);
    if !failed.is_empty() {
        return one_sided(Theorem::Invertible, failed, c.z.norm(), f64::NAN);
    }
    // T⁻¹b through an LU solve, independent of the spectral pseudoinverse
    let inv_b =
        c.t.matrix()
            .clone()
            .lu()
            .solve(c.b)
            .map(|x| x.norm())
            .unwrap_or(f64::NAN);
    let rhs = c.summary.big_m / c.summary.small_m * inv_b;
    one_sided(Theorem::Invertible, failed, c.z.norm(), rhs)
}

fn identity(c: &Context) -> BoundCheck {
    let failed = c.require(&[Hypothesis::BInRange]);
    let applicable = failed.is_empty();
    let d = c.z - c.center();
    let lhs = d.dot(&c.t.apply(&d));
    let rhs = 0.25 * c.b.dot(&c.pinv_b);
    let gap = (lhs - rhs).abs();
    BoundCheck {
        theorem: Theorem::Identity,
        applicable,
        hypotheses: failed.join("; "),
        lhs,
        rhs: Bound::Value(rhs),
        slack: -gap,
        tol: IDENTITY_REL_TOL,
        pass: applicable && gap <= IDENTITY_REL_TOL * rhs.abs().max(1.0),
    }
}

fn annulus(c: &Context) -> BoundCheck {
    let mut failed = c.require(&[Hypothesis::MrPositive, Hypothesis::BInRange, Hypothesis::ZInRange]);
    let dist = (c.z - c.center()).norm();
    if dist <= CENTER_COINCIDENCE {
        failed.push("z = x_b");
    }
    let applicable = failed.is_empty();
    let bn = c.b.norm();
    let lower = bn / (2.0 * c.summary.big_m);
    let upper = bn / (2.0 * c.m_r());
    BoundCheck {
        theorem: Theorem::Annulus,
        applicable,
        hypotheses: failed.join("; "),
        lhs: dist,
        rhs: Bound::Interval { lower, upper },
        slack: (dist - lower).min(upper - dist),
        tol: INEQUALITY_SLACK,
        pass: applicable && lower - INEQUALITY_SLACK <= dist && dist <= upper + INEQUALITY_SLACK,
    }
}

fn ray_check(ray: Option<&RayCertificate>) -> BoundCheck {
    match ray {
        Some(r) => {
            let worst = r
                .checks
                .iter()
                .map(|(_, rep)| rep.complementarity.max(-rep.min_z).max(-rep.min_w))
                .fold(0.0, f64::max);
            let tol = r.checks.first().map_or(0.0, |(_, rep)| rep.tol);
            BoundCheck {
                theorem: Theorem::Ray,
                applicable: true,
                hypotheses: String::new(),
                lhs: worst,
                rhs: Bound::Value(tol),
                slack: tol - worst,
                tol,
                pass: r.all_pass(),
            }
        }
        None => BoundCheck {
            theorem: Theorem::Ray,
            applicable: false,
            hypotheses: "no ray found".to_string(),
            lhs: f64::NAN,
            rhs: Bound::Value(f64::NAN),
            slack: f64::NAN,
            tol: f64::NAN,
            pass: false,
        },
    }
}

pub fn check_ball_bound(t: &SymOperator, b: &DVector<f64>, z: &DVector<f64>) -> BoundCheck {
    ball(&Context::new(t, b, z))
}

pub fn check_ratio_bound(t: &SymOperator, b: &DVector<f64>, z: &DVector<f64>) -> BoundCheck {
    ratio(&Context::new(t, b, z))
}

pub fn check_invertible_bound(t: &SymOperator, b: &DVector<f64>, z: &DVector<f64>) -> BoundCheck {
    invertible(&Context::new(t, b, z))
}

pub fn check_quadratic_identity(t: &SymOperator, b: &DVector<f64>, z: &DVector<f64>) -> BoundCheck {
    identity(&Context::new(t, b, z))
}

pub fn check_annulus_bound(t: &SymOperator, b: &DVector<f64>, z: &DVector<f64>) -> BoundCheck {
    annulus(&Context::new(t, b, z))
}

/// Runs the ray search and every bound check against a verified solution.
pub fn certify(inst: &LcpInstance, sol: &LcpSolution, tol: f64) -> Result<BoundCertificate, CertifyError> {
    let report = verify_solution(inst, &sol.z, tol);
    if !report.pass {
        return Err(CertifyError::Unverified(report));
    }
    let ray = detect_null_ray(inst, sol, tol);
    let ctx = Context::new(inst.operator(), inst.b(), &sol.z);
    let checks = Theorem::ALL
        .iter()
        .map(|th| match th {
            Theorem::Ray => ray_check(ray.as_ref()),
            Theorem::Ball => ball(&ctx),
            Theorem::Ratio => ratio(&ctx),
            Theorem::Invertible => invertible(&ctx),
            Theorem::Identity => identity(&ctx),
            Theorem::Annulus => annulus(&ctx),
        })
        .collect();
    Ok(BoundCertificate {
        instance_id: inst.label.clone(),
        solution_id: sol.id(),
        checks,
        ray,
    })
}
