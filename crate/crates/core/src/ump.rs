//! Universal mirror prox with doubling line search, and its restarted
//! variant for strongly monotone operators.
//!
//! Each iteration takes two mirror steps from `z_k` with a trial constant
//! `M_k` that doubles until the extragradient acceptance inequality holds
//! with slack `eps/2 + delta`; accepted trials seed the next iteration at
//! half their value. The output is the `1/M`-weighted average of the
//! extragradient points. The restarted variant reruns the loop on
//! prox-functions rescaled around the latest output with radii following a
//! closed-form halving schedule, which upgrades the sublinear rate to a
//! linear one under strong monotonicity.

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::VIOperator;
use crate::prox::{mirror_step, ProxSetup};
use crate::report::{RestartRecord, SolveReport, Trace, TraceEntry};
use crate::set::FeasibleSet;
use std::time::Instant;

/// Maximum doublings within one line search before declaring divergence.
pub const MAX_DOUBLINGS: u32 = 60;

/// Termination rule of the monotone-case loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// Run exactly this many accepted iterations.
    MaxIterations(usize),
    /// Stop once `sum 1/M_i` reaches the threshold.
    InvMSum(f64),
}

#[derive(Debug, Clone)]
pub struct UMPConfig {
    pub epsilon: f64,
    /// Initial smoothness guess L_0.
    pub l0: f64,
    /// Oracle inexactness delta; `None` defaults to `epsilon / 2`.
    pub delta: Option<f64>,
    pub stop: StopRule,
    /// Keep `(w_k, z_{k+1})` in the trace (memory-heavy on long runs).
    pub store_points: bool,
}

impl UMPConfig {
    pub fn new(epsilon: f64, stop: StopRule) -> Self {
        UMPConfig {
            epsilon,
            l0: 1.0,
            delta: None,
            stop,
            store_points: false,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(self.epsilon / 2.0)
    }

    fn validate(&self) -> Result<()> {
        if self.epsilon <= 0.0 {
            return Err(Error::RejectedInput("epsilon must be positive".into()));
        }
        if self.l0 <= 0.0 {
            return Err(Error::RejectedInput("L0 must be positive".into()));
        }
        if self.delta() < 0.0 {
            return Err(Error::RejectedInput("delta must be nonnegative".into()));
        }
        match self.stop {
            StopRule::MaxIterations(k) if k == 0 => {
                Err(Error::RejectedInput("iteration cap must be positive".into()))
            }
            StopRule::InvMSum(t) if t <= 0.0 => {
                Err(Error::RejectedInput("inverse-M threshold must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

/// One adaptive extragradient run from `z_0 = argmin d`.
pub fn ump_solve(
    op: &VIOperator,
    setup: &ProxSetup,
    set: &FeasibleSet,
    cfg: &UMPConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    let started = Instant::now();
    let delta = cfg.delta();
    let slack = cfg.epsilon / 2.0 + delta;
    let dim = op.dim();

    let mut z = setup.argmin_d(set)?;
    let mut l_k = cfg.l0;
    let mut inv_m_sum = 0.0;
    let mut weighted = vec![0.0; dim];
    let mut trace = Trace {
        entries: Vec::new(),
        points: if cfg.store_points { Some(Vec::new()) } else { None },
    };
    let mut oracle_calls = 0usize;

    let mut k = 0usize;
    loop {
        if let StopRule::MaxIterations(cap) = cfg.stop {
            if k >= cap {
                break;
            }
        }
        let g_z = op.eval_inexact(&z, delta);
        oracle_calls += 1;
        if !linalg::all_finite(&g_z) {
            return Err(Error::NonFinite {
                iteration: k,
                what: "operator value at z".into(),
            });
        }

        let mut m = l_k / 2.0;
        let mut trials = 0u32;
        let (w, z_next) = loop {
            trials += 1;
            if trials > MAX_DOUBLINGS {
                return Err(Error::LineSearchDiverged {
                    iteration: k,
                    max_doublings: MAX_DOUBLINGS,
                    last_m: m,
                });
            }
            m *= 2.0;
            let w = mirror_step(setup, set, &z, &linalg::scale(&g_z, 1.0 / m))?;
            let g_w = op.eval_inexact(&w, delta);
            oracle_calls += 1;
            if !linalg::all_finite(&g_w) {
                return Err(Error::NonFinite {
                    iteration: k,
                    what: "operator value at w".into(),
                });
            }
            let z_next = mirror_step(setup, set, &z, &linalg::scale(&g_w, 1.0 / m))?;
            let lhs = linalg::dot(
                &linalg::sub(&g_w, &g_z),
                &linalg::sub(&w, &z_next),
            );
            let nw_z = setup.norm(&linalg::sub(&w, &z));
            let nw_zn = setup.norm(&linalg::sub(&w, &z_next));
            let rhs = 0.5 * m * (nw_z * nw_z + nw_zn * nw_zn) + slack;
            if lhs <= rhs {
                break (w, z_next);
            }
        };

        inv_m_sum += 1.0 / m;
        for (acc, wi) in weighted.iter_mut().zip(&w) {
            *acc += wi / m;
        }
        trace.entries.push(TraceEntry {
            m,
            trials,
            inv_m_sum,
        });
        if let Some(points) = trace.points.as_mut() {
            points.push((w.clone(), z_next.clone()));
        }
        l_k = m / 2.0;
        z = z_next;
        k += 1;
        if let StopRule::InvMSum(threshold) = cfg.stop {
            if inv_m_sum >= threshold {
                break;
            }
        }
    }

    let output: Vec<f64> = weighted.iter().map(|v| v / inv_m_sum).collect();
    let mut report = SolveReport::new("ump");
    report.output = output;
    report.iterations = k;
    report.oracle_calls = oracle_calls;
    report.trace = Some(trace);
    report.wall_time = started.elapsed();
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct RestartConfig {
    pub epsilon: f64,
    /// Strong monotonicity modulus of the operator.
    pub mu: f64,
    /// `Omega` with `d(x) <= Omega/2` on the unit ball of the base setup.
    pub omega: f64,
    /// Bound `|x_0 - x*|^2 <= r0_sq`.
    pub r0_sq: f64,
    pub x0: Vec<f64>,
    /// Oracle inexactness passed through to the inner runs.
    pub delta: f64,
    /// Initial smoothness guess for the first restart; later restarts warm
    /// start from the last accepted trial.
    pub l0: f64,
}

impl RestartConfig {
    pub fn new(epsilon: f64, mu: f64, omega: f64, r0_sq: f64, x0: Vec<f64>) -> Self {
        RestartConfig {
            epsilon,
            mu,
            omega,
            r0_sq,
            x0,
            delta: 0.0,
            l0: 1.0,
        }
    }
}

/// Number of restarts the schedule performs: `floor(log2(2 r0_sq/eps)) + 1`.
pub fn restart_count(r0_sq: f64, epsilon: f64) -> usize {
    let bound = (2.0 * r0_sq / epsilon).log2();
    (bound.floor().max(0.0) as usize) + 1
}

/// Closed-form restart radius `R_p^2` for `p >= 0` (`p = 0` is the input).
pub fn restart_radius_sq(r0_sq: f64, epsilon: f64, mu: f64, p: usize) -> f64 {
    let pow = 2f64.powi(-(p as i32));
    r0_sq * pow + 2.0 * (1.0 - pow) * epsilon / (4.0 * mu)
}

/// Restarted universal mirror prox for mu-strongly monotone operators.
///
/// Each restart runs `ump_solve` under the prox-function rescaled around
/// the previous output with radius `R_p`, stopping at
/// `sum 1/M_i >= Omega/mu`. The inner runs use accuracy `epsilon/2`, which
/// makes their per-iteration slack `epsilon/4 + delta`: exactly the amount
/// the halving schedule absorbs, so the final point satisfies
/// `|x_p - x*|^2 <= epsilon + 2 delta / mu`.
pub fn restarted_ump(
    op: &VIOperator,
    setup: &ProxSetup,
    set: &FeasibleSet,
    cfg: &RestartConfig,
) -> Result<SolveReport> {
    if cfg.epsilon <= 0.0 || cfg.mu <= 0.0 || cfg.omega <= 0.0 || cfg.r0_sq <= 0.0 {
        return Err(Error::RejectedInput(
            "epsilon, mu, omega and r0_sq must be positive".into(),
        ));
    }
    if cfg.delta < 0.0 {
        return Err(Error::RejectedInput("delta must be nonnegative".into()));
    }
    if !set.contains(&cfg.x0, 1e-9) {
        return Err(Error::RejectedInput("start point is infeasible".into()));
    }
    let started = Instant::now();
    let mut x = cfg.x0.clone();
    let mut r_sq = cfg.r0_sq;
    let mut l_warm = cfg.l0;
    let mut records = Vec::new();
    let mut combined = Trace::default();
    let mut total_iterations = 0usize;
    let mut oracle_calls = 0usize;
    let threshold = cfg.omega / cfg.mu;

    let mut p = 0usize;
    loop {
        let prox_p = setup.scaled(&x, r_sq.sqrt())?;
        let inner_cfg = UMPConfig {
            epsilon: cfg.epsilon / 2.0,
            l0: l_warm,
            delta: Some(cfg.delta),
            stop: StopRule::InvMSum(threshold),
            store_points: false,
        };
        let inner = ump_solve(op, &prox_p, set, &inner_cfg).map_err(|e| match e {
            Error::LineSearchDiverged {
                iteration,
                max_doublings,
                last_m,
            } => Error::LineSearchDiverged {
                iteration: total_iterations + iteration,
                max_doublings,
                last_m,
            },
            other => other,
        })?;
        let inner_trace = inner.trace.as_ref().expect("ump always traces");
        records.push(RestartRecord {
            r_sq,
            inner_iterations: inner.iterations,
            inv_m_sum: inner_trace.entries.last().map(|e| e.inv_m_sum).unwrap_or(0.0),
        });
        combined.entries.extend(inner_trace.entries.iter().cloned());
        total_iterations += inner.iterations;
        oracle_calls += inner.oracle_calls;
        if let Some(last) = inner_trace.entries.last() {
            l_warm = last.m;
        }
        x = inner.output;
        p += 1;
        r_sq = restart_radius_sq(cfg.r0_sq, cfg.epsilon, cfg.mu, p);
        if (p as f64) > (2.0 * cfg.r0_sq / cfg.epsilon).log2() {
            break;
        }
    }

    let mut report = SolveReport::new("rump");
    report.output = x;
    report.iterations = total_iterations;
    report.oracle_calls = oracle_calls;
    report.restarts = records;
    report.trace = Some(combined);
    report.wall_time = started.elapsed();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist2, norm2, DenseMat};
    use crate::saddle::{saddle_to_vi, SaddleProblem};

    fn euclidean_ball(dim: usize) -> (ProxSetup, FeasibleSet) {
        (ProxSetup::euclidean(dim), FeasibleSet::unit_ball(dim))
    }

    #[test]
    fn zero_operator_accepts_first_trial_and_stays() {
        let (setup, set) = euclidean_ball(2);
        let op = VIOperator::zeros(2);
        let cfg = UMPConfig::new(1e-2, StopRule::MaxIterations(5));
        let report = ump_solve(&op, &setup, &set, &cfg).unwrap();
        let trace = report.trace.as_ref().unwrap();
        assert!(trace.entries.iter().all(|e| e.trials == 1));
        // z_0 = argmin d = origin; the output never moves.
        assert!(norm2(&report.output) < 1e-15);
        // M halves every iteration: L0, L0/2, L0/4, ...
        for (k, e) in trace.entries.iter().enumerate() {
            assert!((e.m - 1.0 / 2f64.powi(k as i32)).abs() < 1e-15);
        }
    }

    #[test]
    fn line_search_trials_reconstruct_doubling_sequence() {
        let (setup, set) = euclidean_ball(2);
        let op = VIOperator::skew_rotation();
        let mut cfg = UMPConfig::new(1e-3, StopRule::MaxIterations(50));
        cfg.delta = Some(0.0);
        cfg.l0 = 0.125;
        let report = ump_solve(&op, &setup, &set, &cfg).unwrap();
        let trace = report.trace.as_ref().unwrap();
        let mut l_k = cfg.l0;
        for e in &trace.entries {
            // Accepted m equals (L_k / 2) * 2^trials.
            let expect = l_k / 2.0 * 2f64.powi(e.trials as i32);
            assert!((e.m - expect).abs() <= 1e-12 * expect);
            l_k = e.m / 2.0;
        }
    }

    #[test]
    fn accepted_m_bounded_by_twice_lipschitz() {
        // A = [[1, 1], [-1, 1]] has spectral norm sqrt(2).
        let a = DenseMat::new(2, 2, vec![1.0, 1.0, -1.0, 1.0]);
        let set = FeasibleSet::unit_ball(2);
        let op = VIOperator::affine(a, vec![0.0, 0.0], Some(&set));
        let setup = ProxSetup::euclidean(2);
        let lip = 2f64.sqrt();
        for l0 in [0.1, 1.0, 10.0] {
            let mut cfg = UMPConfig::new(1e-4, StopRule::MaxIterations(100));
            cfg.delta = Some(0.0);
            cfg.l0 = l0;
            let report = ump_solve(&op, &setup, &set, &cfg).unwrap();
            let max_m = report
                .trace
                .as_ref()
                .unwrap()
                .entries
                .iter()
                .map(|e| e.m)
                .fold(0.0, f64::max);
            assert!(
                max_m <= 2.0 * lip.max(l0) + 1e-12,
                "max accepted M {max_m} with L0 {l0}"
            );
        }
    }

    #[test]
    fn skew_operator_converges_to_origin() {
        let op = VIOperator::skew_rotation();
        let setup = ProxSetup::euclidean(2).scaled(&[1.0, 0.0], 1.0).unwrap();
        let set = FeasibleSet::unit_ball(2);
        let mut cfg = UMPConfig::new(1e-2, StopRule::MaxIterations(500));
        cfg.delta = Some(0.0);
        let report = ump_solve(&op, &setup, &set, &cfg).unwrap();
        assert!(
            norm2(&report.output) <= 1e-2,
            "|z| = {}",
            norm2(&report.output)
        );
    }

    #[test]
    fn weighted_average_identity_from_trace() {
        let op = VIOperator::skew_rotation();
        let (setup, set) = euclidean_ball(2);
        let mut cfg = UMPConfig::new(1e-2, StopRule::MaxIterations(40));
        cfg.store_points = true;
        let report = ump_solve(&op, &setup, &set, &cfg).unwrap();
        let trace = report.trace.as_ref().unwrap();
        let points = trace.points.as_ref().unwrap();
        let mut inv_sum = 0.0;
        let mut acc = vec![0.0; 2];
        for (e, (w, _)) in trace.entries.iter().zip(points) {
            inv_sum += 1.0 / e.m;
            for i in 0..2 {
                acc[i] += w[i] / e.m;
            }
        }
        let recomputed: Vec<f64> = acc.iter().map(|v| v / inv_sum).collect();
        assert!(dist2(&recomputed, &report.output) < 1e-14);
        let last = trace.entries.last().unwrap();
        assert!((last.inv_m_sum - inv_sum).abs() < 1e-14);
    }

    #[test]
    fn inv_m_sum_stop_rule_triggers() {
        let op = VIOperator::zeros(2);
        let (setup, set) = euclidean_ball(2);
        let cfg = UMPConfig::new(0.5, StopRule::InvMSum(10.0));
        let report = ump_solve(&op, &setup, &set, &cfg).unwrap();
        let last = report.trace.as_ref().unwrap().entries.last().unwrap();
        assert!(last.inv_m_sum >= 10.0);
        // Previous iteration had not crossed it.
        let prev = &report.trace.as_ref().unwrap().entries[report.iterations - 2];
        assert!(prev.inv_m_sum < 10.0);
    }

    #[test]
    fn restart_count_and_radius_schedule() {
        assert_eq!(restart_count(4.0, 1e-3), 13);
        // p = 0 returns the input radius.
        assert_eq!(restart_radius_sq(4.0, 1e-3, 1.0, 0), 4.0);
        // The schedule is decreasing and floors at eps/(2 mu).
        let mut prev = 4.0;
        for p in 1..20 {
            let r = restart_radius_sq(4.0, 1e-3, 1.0, p);
            assert!(r < prev);
            assert!(r >= 1e-3 / 2.0);
            prev = r;
        }
    }

    #[test]
    fn restarted_ump_reaches_distance_guarantee() {
        let x_star = vec![0.3, -0.2];
        let set = FeasibleSet::centered_ball(2, 3.0);
        let op = VIOperator::strongly_monotone_affine(1.0, 0.0, x_star.clone(), Some(&set), 2);
        let setup = ProxSetup::euclidean(2);
        let x0 = vec![2.3, -0.2];
        let cfg = RestartConfig::new(1e-3, 1.0, setup.omega(), 4.0, x0);
        let report = restarted_ump(&op, &setup, &set, &cfg).unwrap();
        let d2 = dist2(&report.output, &x_star).powi(2);
        assert!(d2 <= 1e-3, "distance^2 = {d2:e}");
        assert_eq!(report.restarts.len(), restart_count(4.0, 1e-3));
        for (p, rec) in report.restarts.iter().enumerate() {
            assert_eq!(rec.r_sq, restart_radius_sq(4.0, 1e-3, 1.0, p));
            assert!(rec.inv_m_sum >= setup.omega() / 1.0);
        }
    }

    #[test]
    fn restarted_ump_on_reduced_saddle() {
        let problem = SaddleProblem::quadratic_bilinear(
            1.0,
            1.0,
            vec![0.3, -0.1],
            vec![0.2],
            DenseMat::new(2, 1, vec![0.5, -0.25]),
            FeasibleSet::centered_ball(2, 2.0),
            FeasibleSet::centered_ball(1, 2.0),
        )
        .unwrap();
        let (op, set) = saddle_to_vi(&problem);
        let (xs, ys) = problem.analytic_saddle().unwrap();
        let z_star: Vec<f64> = xs.iter().chain(&ys).cloned().collect();
        let setup = ProxSetup::euclidean(3);
        let x0 = vec![0.0; 3];
        let r0_sq = linalg::norm2_sq(&z_star) + 1.0;
        let cfg = RestartConfig::new(1e-2, 1.0, setup.omega(), r0_sq, x0);
        let report = restarted_ump(&op, &setup, &set, &cfg).unwrap();
        let d2 = dist2(&report.output, &z_star).powi(2);
        assert!(d2 <= 1e-2, "distance^2 = {d2:e}");
    }

    #[test]
    fn divergence_error_carries_last_m() {
        // A monotone operator with an enormous jump at the origin: the
        // acceptance check needs M of order of the squared jump, far beyond
        // 60 doublings.
        let op = VIOperator::new(1, |x| vec![if x[0] >= 0.0 { 1e30 } else { -1e30 }]);
        let setup = ProxSetup::euclidean(1);
        let set = FeasibleSet::symmetric_box(1, 1.0);
        let mut cfg = UMPConfig::new(1e-6, StopRule::MaxIterations(3));
        cfg.delta = Some(0.0);
        match ump_solve(&op, &setup, &set, &cfg) {
            Err(Error::LineSearchDiverged { last_m, .. }) => assert!(last_m > 1e15),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let (setup, set) = euclidean_ball(1);
        let op = VIOperator::zeros(1);
        assert!(ump_solve(&op, &setup, &set, &UMPConfig::new(0.0, StopRule::MaxIterations(1))).is_err());
        assert!(ump_solve(&op, &setup, &set, &UMPConfig::new(1.0, StopRule::MaxIterations(0))).is_err());
        let mut cfg = UMPConfig::new(1.0, StopRule::InvMSum(0.0));
        assert!(ump_solve(&op, &setup, &set, &cfg).is_err());
        cfg = UMPConfig::new(1.0, StopRule::MaxIterations(1));
        cfg.l0 = 0.0;
        assert!(ump_solve(&op, &setup, &set, &cfg).is_err());
    }
}
