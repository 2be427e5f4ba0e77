//! Variational-inequality operators and their declared constants.
//!
//! The solution concept throughout is the Minty inequality: find `x*` with
//! `<g(x), x* - x> <= 0` for all feasible `x`. Operators carry optional
//! constants (relative boundedness, sigma-monotonicity, strong
//! monotonicity, Holder/Lipschitz levels) that solvers and sampled audits
//! consume.

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMat};
use crate::prox::ProxSetup;
use crate::set::FeasibleSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

type EvalFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type InexactFn = Arc<dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync>;

/// Declared analytic constants of an operator. All optional; audits and
/// solvers check for what they need.
#[derive(Debug, Clone, Default)]
pub struct OperatorConstants {
    /// Relative-boundedness constant: `<g(x), y-x> <= M sqrt(2 V(y,x))`.
    pub rel_bound: Option<f64>,
    /// sigma-monotonicity: `<g(y)-g(x), y-x> >= -sigma`.
    pub sigma: Option<f64>,
    /// Strong monotonicity modulus.
    pub mu: Option<f64>,
    /// Holder levels of the operator: pairs `(nu, L_nu)`; `(1, L)` is the
    /// Lipschitz case.
    pub holder: Vec<(f64, f64)>,
}

impl OperatorConstants {
    pub fn lipschitz(&self) -> Option<f64> {
        self.holder
            .iter()
            .find(|(nu, _)| (*nu - 1.0).abs() < 1e-12)
            .map(|(_, l)| *l)
    }
}

/// Affine structure `g(x) = A x + b`, kept alongside the closure so gap
/// certification can use exact maximization.
#[derive(Debug, Clone)]
pub struct AffineForm {
    pub matrix: DenseMat,
    pub offset: Vec<f64>,
}

/// A (possibly inexact) monotone operator oracle.
#[derive(Clone)]
pub struct VIOperator {
    dim: usize,
    eval: EvalFn,
    eval_inexact: Option<InexactFn>,
    pub constants: OperatorConstants,
    affine: Option<AffineForm>,
}

impl std::fmt::Debug for VIOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VIOperator")
            .field("dim", &self.dim)
            .field("constants", &self.constants)
            .field("affine", &self.affine.is_some())
            .finish()
    }
}

impl VIOperator {
    pub fn new(dim: usize, eval: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        VIOperator {
            dim,
            eval: Arc::new(eval),
            eval_inexact: None,
            constants: OperatorConstants::default(),
            affine: None,
        }
    }

    pub fn with_constants(mut self, constants: OperatorConstants) -> Self {
        self.constants = constants;
        self
    }

    pub fn with_inexact(
        mut self,
        oracle: impl Fn(&[f64], f64) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.eval_inexact = Some(Arc::new(oracle));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        (self.eval)(x)
    }

    /// Inexact oracle `g~(x, delta)`; falls back to the exact oracle, which
    /// satisfies any inexactness level trivially.
    pub fn eval_inexact(&self, x: &[f64], delta: f64) -> Vec<f64> {
        match &self.eval_inexact {
            Some(f) => f(x, delta),
            None => self.eval(x),
        }
    }

    pub fn affine_form(&self) -> Option<&AffineForm> {
        self.affine.as_ref()
    }

    /// Zero operator: every feasible point solves the VI.
    pub fn zeros(dim: usize) -> Self {
        let mut op = VIOperator::new(dim, move |_| vec![0.0; dim]);
        op.constants = OperatorConstants {
            rel_bound: Some(0.0),
            sigma: Some(0.0),
            mu: Some(0.0),
            holder: vec![(1.0, 0.0)],
        };
        op.affine = Some(AffineForm {
            matrix: DenseMat::zeros(dim, dim),
            offset: vec![0.0; dim],
        });
        op
    }

    /// Constant operator `g(x) = c`.
    pub fn constant(c: Vec<f64>) -> Self {
        let dim = c.len();
        let c2 = c.clone();
        let mut op = VIOperator::new(dim, move |_| c2.clone());
        op.constants = OperatorConstants {
            rel_bound: Some(linalg::norm2(&c)),
            sigma: Some(0.0),
            mu: Some(0.0),
            holder: vec![(1.0, 0.0)],
        };
        op.affine = Some(AffineForm {
            matrix: DenseMat::zeros(dim, dim),
            offset: c,
        });
        op
    }

    /// Affine operator `g(x) = A x + b` with constants derived from the
    /// matrix and an optional bounding set (for the relative-boundedness
    /// constant under the Euclidean setup).
    pub fn affine(matrix: DenseMat, offset: Vec<f64>, set: Option<&FeasibleSet>) -> Self {
        assert_eq!(matrix.rows, matrix.cols);
        assert_eq!(matrix.rows, offset.len());
        let dim = matrix.rows;
        let m = matrix.clone();
        let b = offset.clone();
        let mut op = VIOperator::new(dim, move |x| linalg::add(&m.matvec(x), &b));
        let lip = matrix.spectral_norm_bound();
        // mu = smallest eigenvalue of the symmetric part, estimated from the
        // sampled Rayleigh quotient; declared only if clearly positive.
        let mu = sym_part_min_eig(&matrix);
        let rel = set.and_then(|s|

            // sup over the set of |A x + b|, bounded via |A| * (radius-ish)
            // + |A c + b| when a center/diameter is available.
            s.diameter().map(|diam| {
                let c = s.interior_point();
                let gc = linalg::add(&matrix.matvec(&c), &offset);
                linalg::norm2(&gc) + lip * diam
            }));
        op.constants = OperatorConstants {
            rel_bound: rel,
            sigma: Some(0.0),
            mu: if mu > 1e-12 { Some(mu) } else { None },
            holder: vec![(1.0, lip)],
        };
        op.affine = Some(AffineForm { matrix, offset });
        op
    }

    /// Strongly monotone affine test operator `g(x) = (mu I + S)(x - x*)`
    /// with `S` a seeded skew-symmetric part of the given magnitude. The VI
    /// solution on any set containing `x*` is `x*` itself.
    pub fn strongly_monotone_affine(
        mu: f64,
        skew_scale: f64,
        x_star: Vec<f64>,
        set: Option<&FeasibleSet>,
        seed: u64,
    ) -> Self {
        let dim = x_star.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = DenseMat::zeros(dim, dim);
        for i in 0..dim {
            a.set(i, i, mu);
            for j in (i + 1)..dim {
                let s = skew_scale * rng.gen_range(-1.0..1.0);
                a.set(i, j, s);
                a.set(j, i, -s);
            }
        }
        let b = linalg::scale(&a.matvec(&x_star), -1.0);
        let mut op = VIOperator::affine(a, b, set);
        op.constants.mu = Some(mu);
        op
    }

    /// The planar rotation operator `g(x, y) = (y, -x)`; monotone (skew)
    /// with the unique VI solution at the origin on symmetric sets.
    pub fn skew_rotation() -> Self {
        let a = DenseMat::new(2, 2, vec![0.0, 1.0, -1.0, 0.0]);
        let mut op = VIOperator::affine(a, vec![0.0, 0.0], Some(&FeasibleSet::unit_ball(2)));
        op.constants.sigma = Some(0.0);
        op
    }
}

/// Smallest eigenvalue of `(A + A^T)/2` via inverse-free deterministic
/// sampling: exact for the sizes used by the built-ins.
fn sym_part_min_eig(a: &DenseMat) -> f64 {
    let n = a.rows;
    // Power iteration on shift * I - sym(A) gives the smallest eigenvalue.
    let shift = a.spectral_norm_bound() + 1.0;
    let sym = {
        let mut s = DenseMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                s.set(i, j, shift * f64::from(i == j) - 0.5 * (a.at(i, j) + a.at(j, i)));
            }
        }
        s
    };
    let mut v = vec![1.0; n];
    let mut lam = 0.0;
    for _ in 0..500 {
        let w = sym.matvec(&v);
        let nw = linalg::norm2(&w);
        if nw == 0.0 {
            return shift;
        }
        lam = nw;
        v = linalg::scale(&w, 1.0 / nw);
    }
    shift - lam
}

/// Sampled audit of declared sigma-monotonicity:
/// `<g(y) - g(x), y - x> >= -sigma - slack` over seeded feasible pairs.
pub fn audit_sigma_monotonicity(
    op: &VIOperator,
    set: &FeasibleSet,
    pairs: usize,
    seed: u64,
) -> Result<()> {
    let sigma = op.constants.sigma.ok_or_else(|| {
        Error::RejectedInput("sigma-monotonicity audit requires a declared sigma".into())
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..pairs {
        let x = set.sample(&mut rng);
        let y = set.sample(&mut rng);
        let gx = op.eval(&x);
        let gy = op.eval(&y);
        let lhs = linalg::dot(&linalg::sub(&gy, &gx), &linalg::sub(&y, &x));
        if lhs < -sigma - 1e-8 {
            return Err(Error::ConstantsMisdeclared(format!(
                "sigma-monotonicity violated on pair {k}: {lhs} < -{sigma}"
            )));
        }
    }
    Ok(())
}

/// Sampled audit of declared relative boundedness:
/// `<g(x), y - x> <= M sqrt(2 V(y, x)) + slack` over seeded feasible pairs.
pub fn audit_relative_boundedness(
    op: &VIOperator,
    setup: &ProxSetup,
    set: &FeasibleSet,
    pairs: usize,
    seed: u64,
) -> Result<()> {
    let m = op.constants.rel_bound.ok_or_else(|| {
        Error::RejectedInput("relative-boundedness audit requires a declared M".into())
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..pairs {
        let x = set.sample(&mut rng);
        let y = set.sample(&mut rng);
        let gx = op.eval(&x);
        let lhs = linalg::dot(&gx, &linalg::sub(&y, &x));
        let rhs = m * (2.0 * setup.bregman(&y, &x)?).sqrt();
        if lhs > rhs + 1e-8 {
            return Err(Error::ConstantsMisdeclared(format!(
                "relative boundedness violated on pair {k}: {lhs} > {rhs}"
            )));
        }
    }
    Ok(())
}

/// Sampled audit of strong monotonicity with the declared modulus.
pub fn audit_strong_monotonicity(
    op: &VIOperator,
    set: &FeasibleSet,
    pairs: usize,
    seed: u64,
    slack: f64,
) -> Result<()> {
    let mu = op.constants.mu.ok_or_else(|| {
        Error::RejectedInput("strong-monotonicity audit requires a declared mu".into())
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..pairs {
        let x = set.sample(&mut rng);
        let y = set.sample(&mut rng);
        let gx = op.eval(&x);
        let gy = op.eval(&y);
        let d = linalg::sub(&y, &x);
        let lhs = linalg::dot(&linalg::sub(&gy, &gx), &d);
        if lhs < mu * linalg::norm2_sq(&d) - slack {
            return Err(Error::ConstantsMisdeclared(format!(
                "strong monotonicity violated on pair {k}: {lhs}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_operator_evaluates() {
        let a = DenseMat::new(2, 2, vec![1.0, 2.0, 0.0, 1.0]);
        let op = VIOperator::affine(a, vec![1.0, -1.0], None);
        assert_eq!(op.eval(&[1.0, 1.0]), vec![4.0, 0.0]);
    }

    #[test]
    fn strongly_monotone_affine_vanishes_at_solution() {
        let x_star = vec![0.3, -0.2];
        let op = VIOperator::strongly_monotone_affine(1.0, 0.5, x_star.clone(), None, 5);
        let g = op.eval(&x_star);
        assert!(linalg::norm2(&g) < 1e-12);
    }

    #[test]
    fn skew_is_zero_sigma_monotone() {
        let op = VIOperator::skew_rotation();
        let set = FeasibleSet::unit_ball(2);
        audit_sigma_monotonicity(&op, &set, 1000, 17).unwrap();
    }

    #[test]
    fn declared_rel_bound_passes_audit_on_ball() {
        let set = FeasibleSet::unit_ball(2);
        let op = VIOperator::strongly_monotone_affine(1.0, 0.0, vec![0.0, 0.0], Some(&set), 1);
        let setup = ProxSetup::euclidean(2);
        audit_relative_boundedness(&op, &setup, &set, 1000, 23).unwrap();
    }

    #[test]
    fn misdeclared_sigma_is_caught() {
        // g(x) = -x is not sigma-monotone for small sigma on the unit ball.
        let a = DenseMat::new(1, 1, vec![-1.0]);
        let mut op = VIOperator::affine(a, vec![0.0], None);
        op.constants.sigma = Some(0.01);
        let set = FeasibleSet::unit_ball(1);
        assert!(audit_sigma_monotonicity(&op, &set, 1000, 3).is_err());
    }

    #[test]
    fn strong_monotonicity_modulus_estimated_for_identity_plus_skew() {
        let set = FeasibleSet::unit_ball(3);
        let op =
            VIOperator::strongly_monotone_affine(0.7, 2.0, vec![0.0, 0.0, 0.0], Some(&set), 11);
        audit_strong_monotonicity(&op, &set, 1000, 29, 1e-8).unwrap();
    }
}
