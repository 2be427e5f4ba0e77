//! Constrained smallest-covering-ball benchmark.
//!
//! Minimize `f(x) = max_k |x - A_k|^2` over a ball subject to quadratic
//! constraints `phi_p(x) = sum_i alpha_pi x_i^2 - 5 <= 0`, attacked through
//! the Tikhonov-regularized Lagrange saddle problem
//! `min_x max_{lambda >= 0} f(x) + sum lambda_p phi_p(x) - |lambda|^2 / 2`
//! and its monotone operator. Coefficients `alpha` come from four random
//! families; all randomness is derived from explicit seeds through
//! inverse-CDF / Box-Muller / Michael-Schucany-Haas constructions on a
//! ChaCha stream, so instances are reproducible bit for bit.

use crate::error::{Error, Result};
use crate::operator::{OperatorConstants, VIOperator};
use crate::prox::ProxSetup;
use crate::report::SolveReport;
use crate::set::FeasibleSet;
use crate::ump::{restarted_ump, RestartConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::Instant;

// ---------------------------------------------------------------------------
// Samplers over an explicit uniform stream.

pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Standard exponential via the inverse CDF.
pub fn sample_exponential<R: Rng>(rng: &mut R) -> f64 {
    -(1.0 - rng.gen::<f64>()).ln()
}

/// Gumbel with mode 0 and scale 1 via the inverse CDF.
pub fn sample_gumbel<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen::<f64>().clamp(1e-300, 1.0 - 1e-16);
    -(-u.ln()).ln()
}

/// Inverse Gaussian by the Michael-Schucany-Haas transform.
pub fn sample_inverse_gaussian<R: Rng>(rng: &mut R, mean: f64, shape: f64) -> f64 {
    let nu = standard_normal(rng);
    let y = nu * nu;
    let x = mean + mean * mean * y / (2.0 * shape)
        - mean / (2.0 * shape) * (4.0 * mean * shape * y + mean * mean * y * y).sqrt();
    let x = x.max(1e-12);
    let u: f64 = rng.gen();
    if u <= mean / (mean + x) {
        x
    } else {
        mean * mean / x
    }
}

/// Discrete uniform over the half-open interval [1, 6): values 1..=5.
pub fn sample_discrete_uniform<R: Rng>(rng: &mut R) -> f64 {
    (1.0 + rng.gen::<f64>() * 5.0).floor()
}

// ---------------------------------------------------------------------------
// Instances.

/// One randomized benchmark instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringInstance {
    /// Covered points, `n_points x dim`, row-major, coordinates in [0, 1).
    pub points: Vec<f64>,
    /// Constraint coefficients, `m x dim`, row-major, nonnegative.
    pub alpha: Vec<f64>,
    pub dim: usize,
    pub m: usize,
    pub n_points: usize,
    pub case_id: u8,
    pub seed: u64,
    /// Radius of the x ball (defaults to sqrt(dim)).
    pub x_radius: f64,
    /// Radius cap of the multiplier block.
    pub lambda_cap: f64,
    /// Constant subtracted in every constraint (the problem fixes 5).
    pub offset: f64,
}

/// Draw an instance for one of the four coefficient distributions:
/// 1 exponential(1), 2 Gumbel(0, 1), 3 inverse Gaussian(1, 2),
/// 4 discrete uniform over [1, 6). Points are uniform over [0, 1)^dim.
pub fn gen_case(case_id: u8, dim: usize, m: usize, n_points: usize, seed: u64) -> Result<CoveringInstance> {
    if !(1..=4).contains(&case_id) {
        return Err(Error::RejectedInput(format!("unknown case id {case_id}")));
    }
    if dim == 0 || m == 0 || n_points == 0 {
        return Err(Error::RejectedInput("sizes must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<f64> = (0..n_points * dim).map(|_| rng.gen::<f64>()).collect();
    let alpha: Vec<f64> = (0..m * dim)
        .map(|_| match case_id {
            1 => sample_exponential(&mut rng),
            2 => sample_gumbel(&mut rng),
            3 => sample_inverse_gaussian(&mut rng, 1.0, 2.0),
            _ => sample_discrete_uniform(&mut rng),
        })
        .collect();
    Ok(CoveringInstance {
        points,
        alpha,
        dim,
        m,
        n_points,
        case_id,
        seed,
        x_radius: (dim as f64).sqrt(),
        lambda_cap: 10.0,
        offset: 5.0,
    })
}

impl CoveringInstance {
    pub fn point(&self, k: usize) -> &[f64] {
        &self.points[k * self.dim..(k + 1) * self.dim]
    }

    pub fn alpha_row(&self, p: usize) -> &[f64] {
        &self.alpha[p * self.dim..(p + 1) * self.dim]
    }

    /// `max_k |x - A_k|^2` with the lowest attaining index.
    pub fn objective(&self, x: &[f64]) -> (f64, usize) {
        assert_eq!(x.len(), self.dim);
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for k in 0..self.n_points {
            let a = self.point(k);
            let d: f64 = x
                .iter()
                .zip(a)
                .map(|(xi, ai)| (xi - ai) * (xi - ai))
                .sum();
            if d > best {
                best = d;
                arg = k;
            }
        }
        (best, arg)
    }

    /// `phi_p(x) = sum_i alpha_pi x_i^2 - offset`.
    pub fn constraint(&self, p: usize, x: &[f64]) -> Result<f64> {
        if p >= self.m {
            return Err(Error::RejectedInput(format!(
                "constraint index {p} out of range ({} constraints)",
                self.m
            )));
        }
        let row = self.alpha_row(p);
        Ok(x.iter().zip(row).map(|(xi, a)| a * xi * xi).sum::<f64>() - self.offset)
    }

    /// Largest constraint value; the feasibility measure reported as g_out.
    pub fn max_constraint(&self, x: &[f64]) -> f64 {
        (0..self.m)
            .map(|p| self.constraint(p, x).unwrap())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Regularized Lagrangian `f(x) + sum lambda phi(x) - |lambda|^2 / 2`.
    pub fn lagrangian(&self, x: &[f64], lambda: &[f64]) -> Result<f64> {
        assert_eq!(lambda.len(), self.m);
        if lambda.iter().any(|&l| l < 0.0) {
            return Err(Error::RejectedInput(
                "multipliers must be nonnegative".into(),
            ));
        }
        let (f, _) = self.objective(x);
        let mut v = f;
        for (p, &l) in lambda.iter().enumerate() {
            v += l * self.constraint(p, x)?;
            v -= 0.5 * l * l;
        }
        Ok(v)
    }

    /// Feasible set of the saddle pair: the x ball times the nonnegative
    /// part of the multiplier ball.
    pub fn feasible_set(&self) -> FeasibleSet {
        FeasibleSet::Product {
            parts: vec![
                FeasibleSet::centered_ball(self.dim, self.x_radius),
                FeasibleSet::NonnegBall {
                    dim: self.m,
                    radius: self.lambda_cap,
                },
            ],
        }
    }

    /// Prescribed start point `(x^0, lambda^0) = 1/sqrt(m + n) * ones`.
    pub fn start_point(&self) -> Vec<f64> {
        vec![1.0 / ((self.dim + self.m) as f64).sqrt(); self.dim + self.m]
    }

    /// The Lagrange saddle operator
    /// `G(x, lambda) = (df(x) + sum lambda_p dphi_p(x); (-phi_p(x) + lambda_p)_p)`
    /// with `df(x) = 2 (x - A_k*)` for the lowest attaining index and
    /// `dphi_p(x) = 2 alpha_p . x` componentwise. 1-strongly monotone on the
    /// feasible product set (the objective contributes modulus 2, the
    /// multiplier regularizer modulus 1).
    pub fn lagrangian_operator(&self) -> VIOperator {
        let inst = Arc::new(self.clone());
        let dim = self.dim;
        let m = self.m;
        let mut op = VIOperator::new(dim + m, move |z| {
            let (x, lambda) = z.split_at(dim);
            let (_, k_star) = inst.objective(x);
            let a_star = inst.point(k_star);
            // s_i = sum_p lambda_p alpha_pi
            let mut s = vec![0.0; dim];
            for (p, &l) in lambda.iter().enumerate() {
                if l == 0.0 {
                    continue;
                }
                let row = inst.alpha_row(p);
                for i in 0..dim {
                    s[i] += l * row[i];
                }
            }
            let mut g = Vec::with_capacity(dim + m);
            for i in 0..dim {
                g.push(2.0 * (x[i] - a_star[i]) + 2.0 * s[i] * x[i]);
            }
            for p in 0..m {
                g.push(-inst.constraint(p, x).unwrap() + lambda[p]);
            }
            g
        });
        op.constants = OperatorConstants {
            rel_bound: None,
            sigma: Some(0.0),
            mu: Some(1.0),
            holder: Vec::new(),
        };
        op
    }

    /// Flat text dump: a header block, then one coefficient per line.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        s.push_str("covering-instance v1\n");
        s.push_str(&format!("case {}\n", self.case_id));
        s.push_str(&format!("n {}\n", self.dim));
        s.push_str(&format!("m {}\n", self.m));
        s.push_str(&format!("N {}\n", self.n_points));
        s.push_str(&format!("seed {}\n", self.seed));
        s.push_str(&format!("x_radius {}\n", self.x_radius));
        s.push_str(&format!("lambda_cap {}\n", self.lambda_cap));
        s.push_str(&format!("offset {}\n", self.offset));
        s.push_str("A\n");
        for v in &self.points {
            s.push_str(&format!("{v}\n"));
        }
        s.push_str("alpha\n");
        for v in &self.alpha {
            s.push_str(&format!("{v}\n"));
        }
        s
    }

    pub fn parse(text: &str) -> Result<CoveringInstance> {
        let bad = |msg: &str| Error::RejectedInput(format!("instance parse: {msg}"));
        let mut lines = text.lines();
        if lines.next() != Some("covering-instance v1") {
            return Err(bad("missing header"));
        }
        let mut header = std::collections::HashMap::new();
        let mut saw_a = false;
        for line in lines.by_ref() {
            if line == "A" {
                saw_a = true;
                break;
            }
            let (key, value) = line.split_once(' ').ok_or_else(|| bad("malformed header line"))?;
            header.insert(key.to_string(), value.to_string());
        }
        if !saw_a {
            return Err(bad("missing A block"));
        }
        let get = |k: &str| -> Result<f64> {
            header
                .get(k)
                .ok_or_else(|| bad(&format!("missing key {k}")))?
                .parse::<f64>()
                .map_err(|_| bad(&format!("bad value for {k}")))
        };
        let dim = get("n")? as usize;
        let m = get("m")? as usize;
        let n_points = get("N")? as usize;
        let mut points = Vec::with_capacity(n_points * dim);
        let mut alpha = Vec::with_capacity(m * dim);
        let mut in_alpha = false;
        for line in lines {
            if line == "alpha" {
                in_alpha = true;
                continue;
            }
            let v: f64 = line.parse().map_err(|_| bad("bad coefficient"))?;
            if in_alpha {
                alpha.push(v);
            } else {
                points.push(v);
            }
        }
        if points.len() != n_points * dim || alpha.len() != m * dim {
            return Err(bad("coefficient counts do not match the header"));
        }
        Ok(CoveringInstance {
            points,
            alpha,
            dim,
            m,
            n_points,
            case_id: get("case")? as u8,
            seed: get("seed")? as u64,
            x_radius: get("x_radius")?,
            lambda_cap: get("lambda_cap")?,
            offset: get("offset")?,
        })
    }
}

// ---------------------------------------------------------------------------
// The benchmark harness.

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub case_id: u8,
    pub dim: usize,
    pub m: usize,
    pub n_points: usize,
    /// Accuracy grid; the canonical grid is 1/2^i for i = 1..=6.
    pub epsilons: Vec<f64>,
    pub repetitions: usize,
    /// Master seed; repetition r draws its instance from `seed + r`.
    pub seed: u64,
    pub lambda_cap: f64,
    /// `None` defaults to sqrt(dim).
    pub x_radius: Option<f64>,
    pub constraint_offset: f64,
}

impl BenchConfig {
    pub fn new(case_id: u8, dim: usize, m: usize, n_points: usize) -> Self {
        BenchConfig {
            case_id,
            dim,
            m,
            n_points,
            epsilons: default_epsilon_grid(),
            repetitions: 5,
            seed: 0,
            lambda_cap: 10.0,
            x_radius: None,
            constraint_offset: 5.0,
        }
    }
}

pub fn default_epsilon_grid() -> Vec<f64> {
    (1..=6).map(|i| 1.0 / 2f64.powi(i)).collect()
}

/// One averaged table row.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub inv_epsilon: f64,
    pub iterations: f64,
    pub time_seconds: f64,
    pub f_best: f64,
    pub g_out: f64,
}

#[derive(Debug, Clone, Default)]
pub struct BenchOutcome {
    pub rows: Vec<BenchRow>,
    /// Per-repetition failures, if any; the run continues past them.
    pub notes: Vec<String>,
}

/// Solve one instance at one accuracy with the restarted mirror prox from
/// the prescribed start point.
pub fn solve_instance(inst: &CoveringInstance, epsilon: f64) -> Result<SolveReport> {
    let op = inst.lagrangian_operator();
    let set = inst.feasible_set();
    let setup = ProxSetup::euclidean(inst.dim + inst.m);
    let z0 = inst.start_point();
    let r0_sq = set
        .diameter()
        .expect("product of balls is bounded")
        .powi(2);
    let cfg = RestartConfig::new(epsilon, 1.0, setup.omega(), r0_sq, z0);
    restarted_ump(&op, &setup, &set, &cfg)
}

/// Run the grid: for each epsilon, draw `repetitions` instances from
/// `seed + r`, solve, and average iterations / time / f_best / g_out.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchOutcome> {
    if cfg.repetitions == 0 || cfg.epsilons.is_empty() {
        return Err(Error::RejectedInput(
            "benchmark needs at least one repetition and one epsilon".into(),
        ));
    }
    let mut outcome = BenchOutcome::default();
    for &eps in &cfg.epsilons {
        let mut iterations = 0.0;
        let mut time = 0.0;
        let mut f_best = 0.0;
        let mut g_out = 0.0;
        let mut successes = 0usize;
        for rep in 0..cfg.repetitions {
            let mut inst = gen_case(cfg.case_id, cfg.dim, cfg.m, cfg.n_points, cfg.seed + rep as u64)?;
            inst.lambda_cap = cfg.lambda_cap;
            inst.offset = cfg.constraint_offset;
            if let Some(r) = cfg.x_radius {
                inst.x_radius = r;
            }
            let started = Instant::now();
            match solve_instance(&inst, eps) {
                Ok(report) => {
                    let elapsed = started.elapsed().as_secs_f64();
                    let x = &report.output[..cfg.dim];
                    iterations += report.iterations as f64;
                    time += elapsed;
                    f_best += inst.objective(x).0;
                    g_out += inst.max_constraint(x);
                    successes += 1;
                }
                Err(e) => outcome
                    .notes
                    .push(format!("eps {eps}, repetition {rep} failed: {e}")),
            }
        }
        let denom = successes.max(1) as f64;
        outcome.rows.push(BenchRow {
            inv_epsilon: 1.0 / eps,
            iterations: if successes > 0 { iterations / denom } else { f64::NAN },
            time_seconds: if successes > 0 { time / denom } else { f64::NAN },
            f_best: if successes > 0 { f_best / denom } else { f64::NAN },
            g_out: if successes > 0 { g_out / denom } else { f64::NAN },
        });
    }
    Ok(outcome)
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from("inv_epsilon,iterations,time_seconds,f_best,g_out\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.inv_epsilon, r.iterations, r.time_seconds, r.f_best, r.g_out
        ));
    }
    s
}

pub fn rows_to_markdown(title: &str, rows: &[BenchRow]) -> String {
    let mut s = format!("### {title}\n\n");
    s.push_str("| 1/eps | Iter. | Time (sec.) | f_best | g_out |\n");
    s.push_str("|---|---|---|---|---|\n");
    for r in rows {
        s.push_str(&format!(
            "| {} | {:.1} | {:.3} | {:.6} | {:.6} |\n",
            r.inv_epsilon, r.iterations, r.time_seconds, r.f_best, r.g_out
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::audit_strong_monotonicity;

    fn tiny_instance() -> CoveringInstance {
        gen_case(1, 3, 2, 2, 42).unwrap()
    }

    #[test]
    fn objective_examples() {
        let mut inst = tiny_instance();
        inst.dim = 2;
        inst.n_points = 2;
        inst.points = vec![0.0, 0.0, 1.0, 1.0];
        inst.m = 1;
        inst.alpha = vec![1.0, 1.0];
        // Single point at itself.
        let single = CoveringInstance {
            points: vec![0.3, 0.7],
            n_points: 1,
            ..inst.clone()
        };
        assert_eq!(single.objective(&[0.3, 0.7]).0, 0.0);
        // Farther point wins with its index.
        let (v, k) = inst.objective(&[0.0, 0.0]);
        assert_eq!(v, 2.0);
        assert_eq!(k, 1);
        // Ties break to the lowest index.
        let tied = CoveringInstance {
            points: vec![0.5, 0.5, 0.5, 0.5],
            ..inst.clone()
        };
        assert_eq!(tied.objective(&[0.1, 0.9]).1, 0);
    }

    #[test]
    fn constraint_examples() {
        let mut inst = tiny_instance();
        inst.dim = 2;
        inst.m = 1;
        inst.alpha = vec![2.0, 3.0];
        inst.points = vec![0.0; 2 * inst.n_points];
        assert_eq!(inst.constraint(0, &[0.0, 0.0]).unwrap(), -5.0);
        assert_eq!(inst.constraint(0, &[1.0, 1.0]).unwrap(), 0.0);
        assert!(inst.constraint(1, &[0.0, 0.0]).is_err());
        // All-ones row and point in dimension 5.
        let inst5 = CoveringInstance {
            dim: 5,
            m: 1,
            n_points: 1,
            points: vec![0.0; 5],
            alpha: vec![1.0; 5],
            ..tiny_instance()
        };
        assert_eq!(inst5.constraint(0, &[1.0; 5]).unwrap(), 0.0);
    }

    #[test]
    fn lagrangian_identities() {
        let inst = tiny_instance();
        let x = vec![0.2, 0.1, 0.4];
        // lambda = 0 reduces to the objective.
        assert_eq!(
            inst.lagrangian(&x, &[0.0, 0.0]).unwrap(),
            inst.objective(&x).0
        );
        // x = 0, lambda = e_1: f(0) - 5 - 1/2.
        let zero = vec![0.0; 3];
        let expect = inst.objective(&zero).0 - inst.offset - 0.5;
        assert!((inst.lagrangian(&zero, &[1.0, 0.0]).unwrap() - expect).abs() < 1e-12);
        // Doubling identity: L(x, 2l) - L(x, l) = sum l phi - (3/2) sum l^2.
        let l = vec![0.7, 0.3];
        let double: Vec<f64> = l.iter().map(|v| 2.0 * v).collect();
        let mut phi_term = 0.0;
        for (p, lp) in l.iter().enumerate() {
            phi_term += lp * inst.constraint(p, &x).unwrap();
        }
        let lhs = inst.lagrangian(&x, &double).unwrap() - inst.lagrangian(&x, &l).unwrap();
        let rhs = phi_term - 1.5 * l.iter().map(|v| v * v).sum::<f64>();
        assert!((lhs - rhs).abs() < 1e-12);
        // Negative multipliers rejected.
        assert!(inst.lagrangian(&x, &[-0.1, 0.0]).is_err());
    }

    #[test]
    fn operator_blocks() {
        let inst = tiny_instance();
        let op = inst.lagrangian_operator();
        let x = vec![0.3, -0.1, 0.2];
        // lambda = 0: x block is the objective subgradient, lambda block -phi.
        let z: Vec<f64> = x.iter().cloned().chain([0.0, 0.0]).collect();
        let g = op.eval(&z);
        let (_, k) = inst.objective(&x);
        let a = inst.point(k);
        for i in 0..3 {
            assert!((g[i] - 2.0 * (x[i] - a[i])).abs() < 1e-12);
        }
        for p in 0..2 {
            assert!((g[3 + p] + inst.constraint(p, &x).unwrap()).abs() < 1e-12);
        }
        // lambda_p = phi_p(x) (when nonnegative) zeroes the lambda block.
        let lam: Vec<f64> = (0..2)
            .map(|p| inst.constraint(p, &x).unwrap().max(0.0))
            .collect();
        let z: Vec<f64> = x.iter().cloned().chain(lam.iter().cloned()).collect();
        let g = op.eval(&z);
        for p in 0..2 {
            let phi = inst.constraint(p, &x).unwrap();
            if phi >= 0.0 {
                assert!(g[3 + p].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn x_block_matches_finite_differences_at_unique_argmax() {
        let inst = gen_case(2, 4, 3, 5, 7).unwrap();
        let op = inst.lagrangian_operator();
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let mut checked = 0;
        while checked < 50 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.5..1.5)).collect();
            let lam: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..2.0)).collect();
            // Skip near-ties of the max: the Lagrangian is not differentiable
            // there.
            let dists: Vec<f64> = (0..inst.n_points)
                .map(|k| {
                    x.iter()
                        .zip(inst.point(k))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum()
                })
                .collect();
            let mut sorted = dists.clone();
            sorted.sort_by(f64::total_cmp);
            if sorted[inst.n_points - 1] - sorted[inst.n_points - 2] < 1e-3 {
                continue;
            }
            checked += 1;
            let z: Vec<f64> = x.iter().cloned().chain(lam.iter().cloned()).collect();
            let g = op.eval(&z);
            let h = 1e-6;
            for i in 0..4 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (inst.lagrangian(&xp, &lam).unwrap()
                    - inst.lagrangian(&xm, &lam).unwrap())
                    / (2.0 * h);
                let scale = g[i].abs().max(1.0);
                assert!(
                    (fd - g[i]).abs() <= 1e-5 * scale,
                    "coordinate {i}: fd {fd} vs analytic {}",
                    g[i]
                );
            }
        }
    }

    #[test]
    fn case_properties_and_determinism() {
        for case in 1..=4u8 {
            let a = gen_case(case, 5, 4, 3, 11).unwrap();
            let b = gen_case(case, 5, 4, 3, 11).unwrap();
            assert_eq!(a, b);
            assert!(a.points.iter().all(|&v| (0.0..1.0).contains(&v)));
            match case {
                1 | 3 => assert!(a.alpha.iter().all(|&v| v >= 0.0)),
                4 => assert!(a
                    .alpha
                    .iter()
                    .all(|&v| [1.0, 2.0, 3.0, 4.0, 5.0].contains(&v))),
                _ => {}
            }
        }
        assert!(gen_case(5, 2, 2, 2, 0).is_err());
        assert!(gen_case(0, 2, 2, 2, 0).is_err());
    }

    #[test]
    fn sampler_statistics_are_plausible() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let n = 20_000;
        let mean = |f: &mut dyn FnMut(&mut ChaCha8Rng) -> f64, rng: &mut ChaCha8Rng| {
            (0..n).map(|_| f(rng)).sum::<f64>() / n as f64
        };
        let exp_mean = mean(&mut sample_exponential, &mut rng);
        assert!((exp_mean - 1.0).abs() < 0.05, "exp mean {exp_mean}");
        // Gumbel(0,1) mean is the Euler-Mascheroni constant.
        let gum_mean = mean(&mut sample_gumbel, &mut rng);
        assert!((gum_mean - 0.5772).abs() < 0.05, "gumbel mean {gum_mean}");
        let ig_mean = mean(&mut |r| sample_inverse_gaussian(r, 1.0, 2.0), &mut rng);
        assert!((ig_mean - 1.0).abs() < 0.05, "invgauss mean {ig_mean}");
        let du_mean = mean(&mut sample_discrete_uniform, &mut rng);
        assert!((du_mean - 3.0).abs() < 0.05, "discrete mean {du_mean}");
    }

    #[test]
    fn operator_is_monotone_on_feasible_set() {
        let inst = gen_case(1, 6, 3, 4, 5).unwrap();
        let op = inst.lagrangian_operator();
        let set = inst.feasible_set();
        // Declared modulus 1 with a scale-aware slack.
        audit_strong_monotonicity(&op, &set, 1000, 71, 1e-6 * inst.dim as f64).unwrap();
    }

    #[test]
    fn instance_dump_round_trips() {
        let inst = gen_case(3, 4, 2, 3, 99).unwrap();
        let text = inst.dump();
        let back = CoveringInstance::parse(&text).unwrap();
        assert_eq!(inst, back);
        assert!(CoveringInstance::parse("garbage").is_err());
    }

    #[test]
    fn bench_rows_and_determinism() {
        let mut cfg = BenchConfig::new(1, 4, 2, 2);
        cfg.epsilons = vec![0.5, 0.25];
        cfg.repetitions = 2;
        cfg.seed = 3;
        let a = run_bench(&cfg).unwrap();
        let b = run_bench(&cfg).unwrap();
        assert_eq!(a.rows.len(), 2);
        assert!(a.notes.is_empty(), "{:?}", a.notes);
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.inv_epsilon, rb.inv_epsilon);
            assert_eq!(ra.iterations, rb.iterations);
            assert_eq!(ra.f_best, rb.f_best);
            assert_eq!(ra.g_out, rb.g_out);
        }
        let csv = rows_to_csv(&a.rows);
        assert!(csv.starts_with("inv_epsilon,iterations,time_seconds,f_best,g_out\n"));
        assert_eq!(csv.lines().count(), 3);
        let md = rows_to_markdown("case 1", &a.rows);
        assert!(md.contains("| 1/eps |"));
    }

    #[test]
    fn grid_is_the_six_halvings() {
        let g = default_epsilon_grid();
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], 0.5);
        assert_eq!(g[5], 1.0 / 64.0);
    }
}
