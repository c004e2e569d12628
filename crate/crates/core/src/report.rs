//! Structured key-value reports with a fixed field order.

use std::fmt::Write as _;

use nalgebra::DVector;
use serde::{Serialize, Serializer};

use crate::bounds::{Bound, BoundCertificate};
use crate::io::{fmt_real, fmt_vector};
use crate::lcp::LcpSolution;
use crate::operator::{Classification, DualityReport, PenroseResiduals, SpectralSummary, SymOperator};

pub(crate) fn ser_vector<S: Serializer>(v: &DVector<f64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}

/// Renders as newline-delimited `key = value` text.
pub trait TextReport {
    fn to_text(&self) -> String;
}

fn opt_real(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), fmt_real)
}

fn kv(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key} = {value}");
}

impl TextReport for LcpSolution {
    fn to_text(&self) -> String {
        let mut out = String::new();
        kv(&mut out, "solver", self.solver);
        kv(&mut out, "iterations", self.iterations);
        kv(&mut out, "z", fmt_vector(&self.z));
        kv(&mut out, "w", fmt_vector(&self.w));
        kv(&mut out, "comp_residual", fmt_real(self.comp_residual));
        kv(&mut out, "feas_residual", fmt_real(self.feas_residual));
        out
    }
}

impl TextReport for BoundCertificate {
    fn to_text(&self) -> String {
        let mut out = String::new();
        kv(&mut out, "instance", &self.instance_id);
        kv(&mut out, "solution", &self.solution_id);
        kv(&mut out, "overall", if self.passes() { "pass" } else { "fail" });
        for c in &self.checks {
            let _ = writeln!(out, "\n[{}]", c.theorem);
            kv(&mut out, "theorem", c.theorem);
            kv(&mut out, "applicable", c.applicable);
            kv(
                &mut out,
                "hypotheses",
                if c.hypotheses.is_empty() { "ok" } else { &c.hypotheses },
            );
            kv(&mut out, "lhs", fmt_real(c.lhs));
            match c.rhs {
                Bound::Value(v) => kv(&mut out, "rhs", fmt_real(v)),
                Bound::Interval { lower, upper } => {
                    kv(&mut out, "lower", fmt_real(lower));
                    kv(&mut out, "upper", fmt_real(upper));
                }
            }
            kv(&mut out, "slack", fmt_real(c.slack));
            kv(&mut out, "tol", fmt_real(c.tol));
            kv(&mut out, "pass", c.pass);
            if c.theorem == crate::bounds::Theorem::Ray {
                if let Some(r) = &self.ray {
                    kv(&mut out, "direction", fmt_vector(&r.direction));
                }
            }
        }
        out
    }
}

/// Spectral functionals, classification, duality and Penrose residuals of
/// one operator.
#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub dim: usize,
    pub summary: SpectralSummary,
    pub classification: Classification,
    pub duality: DualityReport,
    pub penrose: PenroseResiduals,
    /// `‖(T^{1/2})² - T‖_F / max(1, ‖T‖_F)`, when `T` is PSD.
    pub sqrt_residual: Option<f64>,
}

impl Analysis {
    pub fn of(op: &SymOperator) -> Self {
        let pinv = op.pseudoinverse();
        let sqrt_residual = op.sqrt_psd().ok().map(|s| {
            let sq = s.matrix() * s.matrix();
            crate::operator::rel_frobenius(&sq, op.matrix(), op.matrix())
        });
        Self {
            dim: op.dim(),
            summary: op.spectral_summary(),
            classification: op.classify(),
            duality: op.verify_duality(),
            penrose: op.penrose_residuals(pinv.matrix()),
            sqrt_residual,
        }
    }

    /// Every identity whose hypotheses hold is satisfied.
    pub fn identities_hold(&self) -> bool {
        use crate::operator::IDENTITY_TOL;
        let duality_ok = !self.duality.applicable || self.duality.holds;
        let sup_ok = !self.summary.mr_positive
            || self
                .summary
                .sup_variants
                .max_spread()
                .is_some_and(|s| s <= crate::operator::SUP_TOL * self.summary.big_m.abs().max(1.0));
        let sqrt_ok = self.sqrt_residual.is_none_or(|r| r <= IDENTITY_TOL);
        duality_ok && sup_ok && sqrt_ok && self.penrose.max() <= IDENTITY_TOL && self.classification.equivalence_holds
    }
}

impl TextReport for Analysis {
    fn to_text(&self) -> String {
        let s = &self.summary;
        let mut out = format!(
            "M={} m={} m_r={} rank={} psd={}\n",
            s.big_m,
            s.small_m,
            s.m_r.map_or_else(|| "n/a".to_string(), |v| v.to_string()),
            s.rank,
            s.is_psd
        );
        kv(&mut out, "dim", self.dim);
        kv(&mut out, "M", fmt_real(s.big_m));
        kv(&mut out, "m", fmt_real(s.small_m));
        kv(&mut out, "m_r", opt_real(s.m_r));
        kv(&mut out, "rank", s.rank);
        kv(&mut out, "rank_tol", fmt_real(s.rank_tol));
        kv(&mut out, "psd", s.is_psd);
        kv(&mut out, "mr_positive", s.mr_positive);
        kv(&mut out, "rank_unstable", s.rank_unstable);
        kv(&mut out, "R1", opt_real(s.sup_variants.r1));
        kv(&mut out, "R2", fmt_real(s.sup_variants.r2));
        kv(&mut out, "R3", fmt_real(s.sup_variants.r3));
        kv(&mut out, "R4", fmt_real(s.sup_variants.r4));
        kv(&mut out, "equivalence_holds", self.classification.equivalence_holds);
        let d = &self.duality;
        kv(&mut out, "duality_applicable", d.applicable);
        if !d.applicable {
            kv(&mut out, "duality_hypotheses", &d.hypotheses);
        }
        kv(&mut out, "M_pinv", fmt_real(d.pinv_big_m));
        kv(&mut out, "m_r_pinv", opt_real(d.pinv_m_r));
        kv(&mut out, "norm2_pinv", fmt_real(d.pinv_norm2));
        kv(&mut out, "residual_M_pinv_m_r", fmt_real(d.residual_pinv_sup));
        kv(&mut out, "residual_m_r_pinv_M", fmt_real(d.residual_pinv_inf));
        kv(&mut out, "residual_norm_pinv_m_r", fmt_real(d.residual_pinv_norm));
        kv(&mut out, "pinv_psd", d.pinv_is_psd);
        kv(&mut out, "sign_agreement", d.sign_agreement);
        kv(&mut out, "penrose_tst", fmt_real(self.penrose.tst));
        kv(&mut out, "penrose_sts", fmt_real(self.penrose.sts));
        kv(&mut out, "penrose_ts_sym", fmt_real(self.penrose.ts_symmetric));
        kv(&mut out, "penrose_st_sym", fmt_real(self.penrose.st_symmetric));
        kv(&mut out, "sqrt_residual", opt_real(self.sqrt_residual));
        kv(&mut out, "identities_hold", self.identities_hold());
        out
    }
}

/// JSON rendering of any serializable report.
pub fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}
