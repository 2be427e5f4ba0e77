//! Mirror descent for variational inequalities with relatively bounded,
//! sigma-monotone operators.
//!
//! With step `h = eps / M^2` and `N = ceil(2 R_sq M^2 / eps^2)` iterations
//! of `x_{k+1} = Mirr_{x_k}(h g(x_k))`, the uniform average of the iterates
//! is an `(eps + sigma)`-solution in the restricted-gap sense whenever
//! `V(x*, x_0) <= R_sq`.

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::VIOperator;
use crate::prox::{mirror_step, ProxSetup};
use crate::report::SolveReport;
use crate::set::FeasibleSet;
use std::time::Instant;

/// Inputs of the relative-boundedness mirror descent run.
#[derive(Debug, Clone)]
pub struct MDConfig {
    /// Target accuracy.
    pub epsilon: f64,
    /// Relative-boundedness constant M of the operator.
    pub rel_bound: f64,
    /// Bound on the divergence to a solution: `V(x*, x_0) <= r_sq`.
    pub r_sq: f64,
    /// Monotonicity defect sigma (0 for monotone operators).
    pub sigma: f64,
    /// Feasible start point.
    pub x0: Vec<f64>,
    /// Probe points for the per-step descent-inequality audit; empty
    /// disables the audit.
    pub audit_probes: Vec<Vec<f64>>,
}

impl MDConfig {
    pub fn new(epsilon: f64, rel_bound: f64, r_sq: f64, x0: Vec<f64>) -> Self {
        MDConfig {
            epsilon,
            rel_bound,
            r_sq,
            sigma: 0.0,
            x0,
            audit_probes: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.epsilon <= 0.0 {
            return Err(Error::RejectedInput("epsilon must be positive".into()));
        }
        if self.rel_bound <= 0.0 {
            return Err(Error::RejectedInput(
                "relative-boundedness constant must be positive".into(),
            ));
        }
        if self.r_sq < 0.0 || self.sigma < 0.0 {
            return Err(Error::RejectedInput(
                "r_sq and sigma must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Step size `h = eps / M^2`.
pub fn md_step_size(cfg: &MDConfig) -> f64 {
    cfg.epsilon / (cfg.rel_bound * cfg.rel_bound)
}

/// Iteration count `N = ceil(2 R_sq M^2 / eps^2)`, reading the paper's R as
/// the divergence bound itself (the choice under which the averaged-gap
/// bound reaches eps).
pub fn md_iterations(cfg: &MDConfig) -> usize {
    let n = 2.0 * cfg.r_sq * cfg.rel_bound * cfg.rel_bound / (cfg.epsilon * cfg.epsilon);
    (n.ceil() as usize).max(1)
}

/// Run the fixed-step mirror descent recursion and return the averaged
/// iterate. The probe audit, when enabled, verifies at every iteration that
/// `h <g(x_k), x_k - x> <= h^2 M^2 / 2 + V(x, x_k) - V(x, x_{k+1}) + 1e-8`
/// for every probe `x`, recording the worst violation.
pub fn md_solve(
    op: &VIOperator,
    setup: &ProxSetup,
    set: &FeasibleSet,
    cfg: &MDConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    if !set.contains(&cfg.x0, 1e-9) {
        return Err(Error::RejectedInput("start point is infeasible".into()));
    }
    let started = Instant::now();
    let h = md_step_size(cfg);
    let n = md_iterations(cfg);
    let dim = op.dim();

    let mut x = cfg.x0.clone();
    let mut sum = vec![0.0; dim];
    let mut audit_worst: f64 = 0.0;
    let slack = 1e-8;
    for k in 0..n {
        let g = op.eval(&x);
        if !linalg::all_finite(&g) {
            return Err(Error::NonFinite {
                iteration: k,
                what: "operator value".into(),
            });
        }
        for (s, xi) in sum.iter_mut().zip(&x) {
            *s += xi;
        }
        let x_next = mirror_step(setup, set, &x, &linalg::scale(&g, h))?;
        if !cfg.audit_probes.is_empty() {
            let bound = 0.5 * h * h * cfg.rel_bound * cfg.rel_bound;
            for probe in &cfg.audit_probes {
                let lhs = h * linalg::dot(&g, &linalg::sub(&x, probe));
                let rhs = bound + setup.bregman(probe, &x)? - setup.bregman(probe, &x_next)?;
                let violation = lhs - rhs;
                if violation > audit_worst {
                    audit_worst = violation;
                }
                if violation > slack {
                    return Err(Error::ConstantsMisdeclared(format!(
                        "per-step descent inequality violated at iteration {k}: excess {violation:e}"
                    )));
                }
            }
        }
        x = x_next;
    }
    let avg: Vec<f64> = sum.iter().map(|s| s / n as f64).collect();

    let mut report = SolveReport::new("md-rb");
    report.output = avg;
    report.iterations = n;
    report.planned_iterations = Some(n);
    report.oracle_calls = n;
    report.step_size = Some(h);
    report.wall_time = started.elapsed();
    if !cfg.audit_probes.is_empty() {
        report.audit_max_violation = Some(audit_worst);
    }
    report.notes.push(format!("sigma = {}", cfg.sigma));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap::vi_gap;
    use crate::linalg::dist2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_operator_fixes_start() {
        let op = VIOperator::zeros(2);
        let setup = ProxSetup::euclidean(2);
        let set = FeasibleSet::unit_ball(2);
        let cfg = MDConfig::new(0.5, 1.0, 0.5, vec![0.3, -0.4]);
        let report = md_solve(&op, &setup, &set, &cfg).unwrap();
        assert!(dist2(&report.output, &[0.3, -0.4]) < 1e-12);
        let cert = vi_gap(&op, &set, &report.output, 100).unwrap();
        assert!(cert.value.abs() < 1e-12);
    }

    #[test]
    fn step_and_iteration_laws() {
        let cfg = MDConfig::new(0.1, 2.0, 0.5, vec![0.0]);
        assert_eq!(md_step_size(&cfg), 0.1 / 4.0);
        assert_eq!(md_iterations(&cfg), (2.0 * 0.5 * 4.0 / 0.01_f64).ceil() as usize);
    }

    #[test]
    fn constant_operator_matches_clip_recursion_oracle() {
        // g = 1 on [-1, 1] from 0 with eps = 0.1, M = 1, R_sq = 1/2:
        // h = 0.1, N = 100; the recursion x <- clip(x - 0.1) reaches -1 at
        // k = 10 and stays, so the average is -0.945.
        let op = VIOperator::constant(vec![1.0]);
        let setup = ProxSetup::euclidean(1);
        let set = FeasibleSet::symmetric_box(1, 1.0);
        let cfg = MDConfig::new(0.1, 1.0, 0.5, vec![0.0]);
        let report = md_solve(&op, &setup, &set, &cfg).unwrap();
        assert_eq!(report.iterations, 100);

        // Independent recursion oracle.
        let mut x = 0.0f64;
        let mut sum = 0.0;
        for _ in 0..100 {
            sum += x;
            x = (x - 0.1).max(-1.0);
        }
        let oracle_avg = sum / 100.0;
        assert!((oracle_avg + 0.945).abs() < 1e-12);
        assert!((report.output[0] - oracle_avg).abs() < 1e-12);

        // Certified gap <1, avg - (-1)> <= eps.
        let cert = vi_gap(&op, &set, &report.output, 1000).unwrap();
        assert!(cert.certified);
        assert!(cert.value <= 0.1 + 1e-9, "gap = {}", cert.value);
    }

    #[test]
    fn affine_strongly_monotone_reaches_epsilon_gap() {
        let set = FeasibleSet::unit_ball(2);
        let op = VIOperator::strongly_monotone_affine(1.0, 0.0, vec![0.0, 0.0], Some(&set), 3);
        let setup = ProxSetup::euclidean(2);
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let probes: Vec<Vec<f64>> = (0..10).map(|_| set.sample(&mut rng)).collect();
        let mut cfg = MDConfig::new(0.05, 1.0, 0.5, vec![1.0, 0.0]);
        cfg.audit_probes = probes;
        let report = md_solve(&op, &setup, &set, &cfg).unwrap();
        assert_eq!(report.iterations, 400);
        assert!(report.audit_max_violation.unwrap() <= 1e-8);
        let cert = vi_gap(&op, &set, &report.output, 4000).unwrap();
        assert!(cert.certified);
        assert!(cert.value <= 0.05, "gap = {}", cert.value);
    }

    #[test]
    fn averaged_gap_obeys_proof_bound() {
        // gap <= M^2 h / 2 + R_sq / (N h) + sigma for the certified gap.
        let set = FeasibleSet::unit_ball(2);
        let op = VIOperator::strongly_monotone_affine(1.0, 0.5, vec![0.1, 0.2], Some(&set), 13);
        let setup = ProxSetup::euclidean(2);
        let cfg = MDConfig::new(0.1, 2.0, 1.0, vec![-0.5, 0.5]);
        let report = md_solve(&op, &setup, &set, &cfg).unwrap();
        let h = report.step_size.unwrap();
        let n = report.iterations as f64;
        let bound = 2.0_f64.powi(2) * h / 2.0 + 1.0 / (n * h) + 0.0;
        let cert = vi_gap(&op, &set, &report.output, 4000).unwrap();
        assert!(cert.certified);
        assert!(
            cert.value <= bound + 1e-6,
            "gap {} exceeds bound {bound}",
            cert.value
        );
    }

    #[test]
    fn non_finite_operator_is_reported_with_iteration() {
        let op = VIOperator::new(1, |x| vec![if x[0] < -0.35 { f64::NAN } else { 1.0 }]);
        let setup = ProxSetup::euclidean(1);
        let set = FeasibleSet::symmetric_box(1, 1.0);
        let cfg = MDConfig::new(0.1, 1.0, 0.5, vec![0.0]);
        match md_solve(&op, &setup, &set, &cfg) {
            Err(Error::NonFinite { iteration, .. }) => assert!(iteration > 0),
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_start_rejected() {
        let op = VIOperator::zeros(1);
        let setup = ProxSetup::euclidean(1);
        let set = FeasibleSet::symmetric_box(1, 1.0);
        let cfg = MDConfig::new(0.1, 1.0, 0.5, vec![2.0]);
        assert!(md_solve(&op, &setup, &set, &cfg).is_err());
    }
}
