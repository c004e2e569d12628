//! Randomized solve + certify sweeps.
//!
//! Instance parameters are drawn sequentially from the sweep seed before
//! any work is distributed, and results are aggregated in instance order,
//! so the summary does not depend on the number of worker threads.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{certify, Theorem};
use crate::gallery::{random_psd_instance, rng_from_seed, BPolicy};
use crate::io::fmt_real;
use crate::lcp::{
    default_max_pivots, enumerate_solutions, solve_lemke, solve_pgs, split_solution, verify_solution, LcpInstance,
    LcpSolution, DEFAULT_MAX_ITERS,
};
use crate::report::TextReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RankPolicy {
    Full,
    Deficient,
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub count: usize,
    pub dim_min: usize,
    pub dim_max: usize,
    pub rank_policy: RankPolicy,
    pub seed: u64,
    pub tol: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Worker threads; `0` uses the rayon default.
    pub threads: usize,
    /// Instances up to this dimension are also checked against the
    /// enumeration oracle (with both Lemke and PGS).
    pub oracle_dim: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            count: 100,
            dim_min: 1,
            dim_max: 10,
            rank_policy: RankPolicy::Mixed,
            seed: 0,
            tol: crate::lcp::DEFAULT_TOL,
            lambda_min: 0.1,
            lambda_max: 10.0,
            threads: 0,
            oracle_dim: 6,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.count == 0 {
            return Err("count must be at least 1".into());
        }
        if self.dim_min == 0 || self.dim_min > self.dim_max {
            return Err(format!(
                "need 1 <= dim_min <= dim_max, got [{}, {}]",
                self.dim_min, self.dim_max
            ));
        }
        if !(self.lambda_min > 0.0 && self.lambda_min <= self.lambda_max) {
            return Err("need 0 < lambda_min <= lambda_max".into());
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err("tol must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Plan {
    n: usize,
    rank: usize,
    seed: u64,
}

fn plans(cfg: &SweepConfig) -> Vec<Plan> {
    let mut rng = rng_from_seed(cfg.seed);
    (0..cfg.count)
        .map(|_| {
            let n = rng.random_range(cfg.dim_min..=cfg.dim_max);
            let rank = match cfg.rank_policy {
                RankPolicy::Full => n,
                RankPolicy::Deficient if n > 1 => rng.random_range(1..n),
                RankPolicy::Deficient => 1,
                RankPolicy::Mixed => rng.random_range(1..=n),
            };
            Plan {
                n,
                rank,
                seed: rng.random(),
            }
        })
        .collect()
}

/// Replaces `sol` by its `R(T)` component when that component is itself a
/// verified solution (same slack, since `T z_null = 0`).
pub fn range_representative(inst: &LcpInstance, sol: &LcpSolution, tol: f64) -> LcpSolution {
    let split = split_solution(inst.operator(), &sol.z);
    if split.in_range || !verify_solution(inst, &split.range, tol).pass {
        return sol.clone();
    }
    LcpSolution::from_z(inst, split.range, sol.solver, sol.iterations)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TheoremTally {
    pub applicable: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub count: usize,
    pub seed: u64,
    pub solved: usize,
    pub solver_failures: usize,
    pub in_range_solutions: usize,
    pub certificates_passed: usize,
    pub certificates_failed: usize,
    pub theorems: BTreeMap<Theorem, TheoremTally>,
    pub oracle_checked: usize,
    pub oracle_matched: usize,
    /// Smallest slack among applicable inequality checks.
    pub worst_slack: f64,
    /// Largest relative residual of the quadratic identity.
    pub worst_identity_residual: f64,
    /// Largest solution residual (complementarity or feasibility).
    pub worst_solution_residual: f64,
}

impl SweepSummary {
    pub fn any_check_failed(&self) -> bool {
        self.certificates_failed > 0 || self.oracle_matched < self.oracle_checked
    }
}

#[derive(Debug, Default)]
struct Outcome {
    solved: bool,
    in_range: bool,
    cert_pass: Option<bool>,
    checks: Vec<(Theorem, bool, bool, f64)>,
    identity_residual: f64,
    solution_residual: f64,
    oracle: Option<bool>,
}

fn run_one(cfg: &SweepConfig, plan: Plan) -> Outcome {
    let ri = random_psd_instance(
        plan.n,
        plan.rank,
        cfg.lambda_min,
        cfg.lambda_max,
        plan.seed,
        BPolicy::Planted,
    )
    .expect("validated parameters");
    let inst = ri.instance;
    let mut out = Outcome::default();
    let sol = match solve_lemke(&inst, cfg.tol, default_max_pivots(inst.dim())) {
        Ok(s) => s,
        Err(_) => return out,
    };
    out.solved = true;
    if plan.n <= cfg.oracle_dim {
        let matched = enumerate_solutions(&inst, cfg.oracle_dim, cfg.tol).is_ok_and(|e| {
            let pgs_ok = solve_pgs(&inst, cfg.tol, DEFAULT_MAX_ITERS).is_ok_and(|p| e.contains(&p.z, 1e-6));
            e.contains(&sol.z, 1e-6) && pgs_ok
        });
        out.oracle = Some(matched);
    }
    let sol = range_representative(&inst, &sol, cfg.tol);
    out.in_range = split_solution(inst.operator(), &sol.z).in_range;
    out.solution_residual = sol.worst_residual();
    let Ok(cert) = certify(&inst, &sol, cfg.tol) else {
        out.cert_pass = Some(false);
        return out;
    };
    out.cert_pass = Some(cert.passes());
    for c in &cert.checks {
        out.checks.push((c.theorem, c.applicable, c.pass, c.slack));
        if c.theorem == Theorem::Identity && c.applicable {
            if let crate::bounds::Bound::Value(rhs) = c.rhs {
                out.identity_residual = (c.lhs - rhs).abs() / rhs.abs().max(1.0);
            }
        }
    }
    out
}

pub fn run_sweep(cfg: &SweepConfig) -> SweepSummary {
    let plans = plans(cfg);
    let work = || -> Vec<Outcome> { plans.par_iter().map(|&p| run_one(cfg, p)).collect() };
    let outcomes = if cfg.threads == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .expect("thread pool")
            .install(work)
    };

    let mut theorems: BTreeMap<Theorem, TheoremTally> =
        Theorem::ALL.iter().map(|&t| (t, TheoremTally::default())).collect();
    let mut s = SweepSummary {
        count: cfg.count,
        seed: cfg.seed,
        solved: 0,
        solver_failures: 0,
        in_range_solutions: 0,
        certificates_passed: 0,
        certificates_failed: 0,
        theorems: BTreeMap::new(),
        oracle_checked: 0,
        oracle_matched: 0,
        worst_slack: f64::INFINITY,
        worst_identity_residual: 0.0,
        worst_solution_residual: 0.0,
    };
    for o in &outcomes {
        if !o.solved {
            s.solver_failures += 1;
            continue;
        }
        s.solved += 1;
        s.in_range_solutions += usize::from(o.in_range);
        match o.cert_pass {
            Some(true) => s.certificates_passed += 1,
            _ => s.certificates_failed += 1,
        }
        if let Some(m) = o.oracle {
            s.oracle_checked += 1;
            s.oracle_matched += usize::from(m);
        }
        for &(th, applicable, pass, slack) in &o.checks {
            let tally = theorems.get_mut(&th).expect("all theorems tallied");
            if applicable {
                tally.applicable += 1;
                if pass {
                    tally.passed += 1;
                } else {
                    tally.failed += 1;
                }
                if matches!(
                    th,
                    Theorem::Ball | Theorem::Ratio | Theorem::Invertible | Theorem::Annulus
                ) {
                    s.worst_slack = s.worst_slack.min(slack);
                }
            }
        }
        s.worst_identity_residual = s.worst_identity_residual.max(o.identity_residual);
        s.worst_solution_residual = s.worst_solution_residual.max(o.solution_residual);
    }
    s.theorems = theorems;
    s
}

impl TextReport for SweepSummary {
    fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "count = {}", self.count);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "solved = {}", self.solved);
        let _ = writeln!(out, "solver_failures = {}", self.solver_failures);
        let _ = writeln!(out, "in_range_solutions = {}", self.in_range_solutions);
        let _ = writeln!(out, "certificates_passed = {}", self.certificates_passed);
        let _ = writeln!(out, "certificates_failed = {}", self.certificates_failed);
        let _ = writeln!(out, "oracle_checked = {}", self.oracle_checked);
        let _ = writeln!(out, "oracle_matched = {}", self.oracle_matched);
        let _ = writeln!(out, "worst_slack = {}", fmt_real(self.worst_slack));
        let _ = writeln!(
            out,
            "worst_identity_residual = {}",
            fmt_real(self.worst_identity_residual)
        );
        let _ = writeln!(
            out,
            "worst_solution_residual = {}",
            fmt_real(self.worst_solution_residual)
        );
        let _ = writeln!(out, "\ntheorem            applicable   passed   failed");
        for (th, t) in &self.theorems {
            let _ = writeln!(
                out,
                "{:<18} {:>10} {:>8} {:>8}",
                th.label(),
                t.applicable,
                t.passed,
                t.failed
            );
        }
        out
    }
}
