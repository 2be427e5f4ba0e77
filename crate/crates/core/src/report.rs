//! Solver run reports and iteration traces.

use crate::accel::TolerancePlan;
use crate::gap::GapCertificate;
use std::time::Duration;

/// Per-iteration record of the adaptive extragradient loop.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    /// Accepted smoothness trial M_k.
    pub m: f64,
    /// Number of line-search trials this iteration (>= 1).
    pub trials: u32,
    /// Running sum of 1/M_i through this iteration.
    pub inv_m_sum: f64,
}

/// Iteration trace of a mirror-prox run. Extragradient points are retained
/// only when requested; long runs keep the scalar columns only.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub entries: Vec<TraceEntry>,
    /// `(w_k, z_{k+1})` pairs when point storage was enabled.
    pub points: Option<Vec<(Vec<f64>, Vec<f64>)>>,
}

impl Trace {
    /// CSV dump with columns `k,M_k,trials,inv_M_sum`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,M_k,trials,inv_M_sum\n");
        for (k, e) in self.entries.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", k, e.m, e.trials, e.inv_m_sum));
        }
        out
    }
}

/// One restart of the restarted mirror-prox scheme.
#[derive(Debug, Clone)]
pub struct RestartRecord {
    /// Squared radius R_p^2 governing this restart's prox scaling.
    pub r_sq: f64,
    pub inner_iterations: usize,
    pub inv_m_sum: f64,
}

/// Outcome of one solver run.
#[derive(Debug, Clone, Default)]
pub struct SolveReport {
    pub solver: String,
    /// Output point (for saddle solvers, the x block).
    pub output: Vec<f64>,
    /// Second block for saddle solvers.
    pub output_y: Option<Vec<f64>>,
    pub iterations: usize,
    pub oracle_calls: usize,
    pub wall_time: Duration,
    /// Fixed step size, when the method uses one.
    pub step_size: Option<f64>,
    /// Predetermined iteration budget, when the method fixes one up front.
    pub planned_iterations: Option<usize>,
    pub gap: Option<GapCertificate>,
    pub restarts: Vec<RestartRecord>,
    pub trace: Option<Trace>,
    /// Largest violation seen by the per-step inequality audit, if enabled.
    pub audit_max_violation: Option<f64>,
    pub plan: Option<TolerancePlan>,
    /// Outer iterate trajectory, kept only on request.
    pub trajectory: Option<Vec<Vec<f64>>>,
    pub notes: Vec<String>,
}

impl SolveReport {
    pub fn new(solver: &str) -> Self {
        SolveReport {
            solver: solver.to_string(),
            ..Default::default()
        }
    }

    /// Human-readable multi-line rendering.
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("solver: {}\n", self.solver));
        s.push_str(&format!("iterations: {}\n", self.iterations));
        s.push_str(&format!("oracle_calls: {}\n", self.oracle_calls));
        s.push_str(&format!("wall_time_s: {}\n", self.wall_time.as_secs_f64()));
        if let Some(h) = self.step_size {
            s.push_str(&format!("step_size: {h}\n"));
        }
        if let Some(n) = self.planned_iterations {
            s.push_str(&format!("planned_iterations: {n}\n"));
        }
        if let Some(g) = &self.gap {
            s.push_str(&g.render());
        }
        if !self.restarts.is_empty() {
            s.push_str(&format!("restarts: {}\n", self.restarts.len()));
            for (p, r) in self.restarts.iter().enumerate() {
                s.push_str(&format!(
                    "  restart {}: r_sq = {}, inner_iterations = {}, inv_m_sum = {}\n",
                    p, r.r_sq, r.inner_iterations, r.inv_m_sum
                ));
            }
        }
        if let Some(plan) = &self.plan {
            s.push_str(&plan.render());
        }
        if let Some(v) = self.audit_max_violation {
            s.push_str(&format!("audit_max_violation: {v:e}\n"));
        }
        for n in &self.notes {
            s.push_str(&format!("note: {n}\n"));
        }
        s.push_str("output:");
        for v in &self.output {
            s.push_str(&format!(" {v}"));
        }
        s.push('\n');
        if let Some(y) = &self.output_y {
            s.push_str("output_y:");
            for v in y {
                s.push_str(&format!(" {v}"));
            }
            s.push('\n');
        }
        s
    }
}
