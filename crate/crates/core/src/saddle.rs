//! Saddle point problems `min_x max_y f(x, y)` on products of compact
//! convex sets, and their reduction to variational inequalities.

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMat};
use crate::operator::{OperatorConstants, VIOperator};
use crate::set::FeasibleSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

type ValueFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;

/// Smoothness/convexity data of a saddle problem.
///
/// `f` is `mu_x`-strongly convex in `x` and `mu_y`-strongly concave in `y`;
/// the partial gradients satisfy Holder conditions of exponent `nu` with
/// constants `l_xx` (x vs x), `l_xy` (both cross terms) and Lipschitz
/// constant `l_yy` (y vs y).
#[derive(Debug, Clone, Copy)]
pub struct SaddleConstants {
    pub mu_x: f64,
    pub mu_y: f64,
    pub l_xx: f64,
    pub l_xy: f64,
    pub l_yy: f64,
    pub nu: f64,
}

/// Value and partial-gradient oracles for `f` on `Q_x x Q_y`.
#[derive(Clone)]
pub struct SaddleProblem {
    pub value: ValueFn,
    pub grad_x: GradFn,
    pub grad_y: GradFn,
    pub constants: SaddleConstants,
    pub set_x: FeasibleSet,
    pub set_y: FeasibleSet,
    /// Analytic saddle point when the construction knows one.
    analytic_saddle: Option<(Vec<f64>, Vec<f64>)>,
    /// Closed-form inner maximizer `y*(x)` when available.
    argmax_y: Option<GradFn>,
}

impl std::fmt::Debug for SaddleProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SaddleProblem")
            .field("constants", &self.constants)
            .field("dim_x", &self.set_x.dim())
            .field("dim_y", &self.set_y.dim())
            .finish()
    }
}

impl SaddleProblem {
    pub fn dim_x(&self) -> usize {
        self.set_x.dim()
    }

    pub fn dim_y(&self) -> usize {
        self.set_y.dim()
    }

    pub fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.value)(x, y)
    }

    pub fn grad_x(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        (self.grad_x)(x, y)
    }

    pub fn grad_y(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        (self.grad_y)(x, y)
    }

    pub fn analytic_saddle(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        self.analytic_saddle.clone()
    }

    /// Exact inner maximizer `y*(x)` for problems that carry one.
    pub fn argmax_y(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.argmax_y.as_ref().map(|f| f(x, &[]))
    }

    /// Bilinear problem `f(x, y) = x^T B y` on the given sets (mu = 0).
    pub fn bilinear(b: DenseMat, set_x: FeasibleSet, set_y: FeasibleSet) -> Self {
        assert_eq!(b.rows, set_x.dim());
        assert_eq!(b.cols, set_y.dim());
        let l_xy = b.spectral_norm_bound();
        let b1 = b.clone();
        let b2 = b.clone();
        let b3 = b;
        SaddleProblem {
            value: Arc::new(move |x, y| linalg::dot(x, &b1.matvec(y))),
            grad_x: Arc::new(move |_, y| b2.matvec(y)),
            grad_y: Arc::new(move |x, _| b3.matvec_t(x)),
            constants: SaddleConstants {
                mu_x: 0.0,
                mu_y: 0.0,
                l_xx: 0.0,
                l_xy,
                l_yy: 0.0,
                nu: 1.0,
            },
            set_x,
            set_y,
            analytic_saddle: None,
            argmax_y: None,
        }
    }

    /// Strongly convex-concave quadratic-bilinear test problem
    /// `f = (mu_x/2)|x - a|^2 + x^T B y - (mu_y/2)|y - b|^2`.
    ///
    /// The interior saddle solves a small linear system and is stored for
    /// use as an oracle; the caller must pick sets large enough to contain
    /// it (this is asserted).
    pub fn quadratic_bilinear(
        mu_x: f64,
        mu_y: f64,
        a: Vec<f64>,
        b: Vec<f64>,
        bmat: DenseMat,
        set_x: FeasibleSet,
        set_y: FeasibleSet,
    ) -> Result<Self> {
        if mu_x <= 0.0 || mu_y <= 0.0 {
            return Err(Error::RejectedInput(
                "quadratic-bilinear problem requires mu_x, mu_y > 0".into(),
            ));
        }
        assert_eq!(bmat.rows, a.len());
        assert_eq!(bmat.cols, b.len());
        assert_eq!(set_x.dim(), a.len());
        assert_eq!(set_y.dim(), b.len());
        let nx = a.len();

        // Interior saddle: mu_x (x - a) + B y = 0 and B^T x - mu_y (y - b) = 0
        // => (mu_x I + B B^T / mu_y) x = mu_x a - B b, y = b + B^T x / mu_y.
        let mut sys = DenseMat::zeros(nx, nx);
        let bt = bmat.transpose();
        for i in 0..nx {
            for j in 0..nx {
                let mut v = if i == j { mu_x } else { 0.0 };
                for k in 0..bmat.cols {
                    v += bmat.at(i, k) * bt.at(k, j) / mu_y;
                }
                sys.set(i, j, v);
            }
        }
        let rhs = linalg::sub(&linalg::scale(&a, mu_x), &bmat.matvec(&b));
        let x_star = linalg::solve_dense(&sys, &rhs)
            .ok_or_else(|| Error::Numerical {
                what: "quadratic-bilinear saddle system".into(),
                residual: f64::NAN,
            })?;
        let y_star = linalg::axpy(&b, 1.0 / mu_y, &bmat.matvec_t(&x_star));
        assert!(
            set_x.contains(&x_star, 1e-9) && set_y.contains(&y_star, 1e-9),
            "sets must contain the analytic saddle"
        );

        let l_xy = bmat.spectral_norm_bound();
        let (a1, b1, m1) = (a.clone(), b.clone(), bmat.clone());
        let (a2, m2) = (a.clone(), bmat.clone());
        let (b3, m3) = (b.clone(), bmat.clone());
        let (b4, m4) = (b.clone(), bmat);
        let value = move |x: &[f64], y: &[f64]| {
            let dx = linalg::sub(x, &a1);
            let dy = linalg::sub(y, &b1);
            0.5 * mu_x * linalg::norm2_sq(&dx) + linalg::dot(x, &m1.matvec(y))
                - 0.5 * mu_y * linalg::norm2_sq(&dy)
        };
        let grad_x = move |x: &[f64], y: &[f64]| {
            linalg::add(&linalg::scale(&linalg::sub(x, &a2), mu_x), &m2.matvec(y))
        };
        let grad_y = move |x: &[f64], y: &[f64]| {
            linalg::sub(&m3.matvec_t(x), &linalg::scale(&linalg::sub(y, &b3), mu_y))
        };
        let argmax = move |x: &[f64], _: &[f64]| linalg::axpy(&b4, 1.0 / mu_y, &m4.matvec_t(x));
        Ok(SaddleProblem {
            value: Arc::new(value),
            grad_x: Arc::new(grad_x),
            grad_y: Arc::new(grad_y),
            constants: SaddleConstants {
                mu_x,
                mu_y,
                l_xx: mu_x,
                l_xy,
                l_yy: mu_y,
                nu: 1.0,
            },
            set_x,
            set_y,
            analytic_saddle: Some((x_star, y_star)),
            argmax_y: Some(Arc::new(argmax)),
        })
    }

    /// Decoupled test problem `f = (mu_x/2)|x|^2 - (mu_y/2)|y|^2` with
    /// saddle at the origin.
    pub fn separable_quadratic(
        mu_x: f64,
        mu_y: f64,
        set_x: FeasibleSet,
        set_y: FeasibleSet,
    ) -> Self {
        let nx = set_x.dim();
        let ny = set_y.dim();
        SaddleProblem {
            value: Arc::new(move |x, y| {
                0.5 * mu_x * linalg::norm2_sq(x) - 0.5 * mu_y * linalg::norm2_sq(y)
            }),
            grad_x: Arc::new(move |x, _| linalg::scale(x, mu_x)),
            grad_y: Arc::new(move |_, y| linalg::scale(y, -mu_y)),
            constants: SaddleConstants {
                mu_x,
                mu_y,
                l_xx: mu_x,
                l_xy: 0.0,
                l_yy: mu_y,
                nu: 1.0,
            },
            set_x,
            set_y,
            analytic_saddle: Some((vec![0.0; nx], vec![0.0; ny])),
            argmax_y: Some(Arc::new(move |_, _| vec![0.0; ny])),
        }
    }

    /// One-dimensional `f(x, y) = x y` on symmetric boxes; the canonical
    /// skew example.
    pub fn scalar_bilinear(half_width: f64) -> Self {
        Self::bilinear(
            DenseMat::new(1, 1, vec![1.0]),
            FeasibleSet::symmetric_box(1, half_width),
            FeasibleSet::symmetric_box(1, half_width),
        )
    }
}

/// Reduce a saddle problem to the VI operator
/// `G(x, y) = (grad_x f(x, y), -grad_y f(x, y))` on `Q_x x Q_y`.
pub fn saddle_to_vi(problem: &SaddleProblem) -> (VIOperator, FeasibleSet) {
    let dim_x = problem.dim_x();
    let dim = dim_x + problem.dim_y();
    let gx = problem.grad_x.clone();
    let gy = problem.grad_y.clone();
    let mut op = VIOperator::new(dim, move |z| {
        let (x, y) = z.split_at(dim_x);
        let mut g = gx(x, y);
        g.extend(gy(x, y).iter().map(|v| -v));
        g
    });
    let c = problem.constants;
    // The saddle operator of a (mu_x, mu_y)-strongly convex-concave function
    // is min(mu_x, mu_y)-strongly monotone; cross terms cancel.
    let mu = c.mu_x.min(c.mu_y);
    // Lipschitz bound for nu = 1: block rows are bounded by the row sums of
    // the 2x2 block constant matrix [[l_xx, l_xy], [l_xy, l_yy]].
    let lip = if (c.nu - 1.0).abs() < 1e-12 {
        Some(((c.l_xx + c.l_xy).powi(2) as f64).max((c.l_xy + c.l_yy).powi(2)).sqrt())
    } else {
        None
    };
    op.constants = OperatorConstants {
        rel_bound: None,
        sigma: Some(0.0),
        mu: if mu > 0.0 { Some(mu) } else { None },
        holder: lip.map(|l| vec![(1.0, l)]).unwrap_or_default(),
    };
    let set = FeasibleSet::Product {
        parts: vec![problem.set_x.clone(), problem.set_y.clone()],
    };
    (op, set)
}

/// Central finite-difference check of both partial gradients at sampled
/// interior points. `rel_tol` is relative to the gradient magnitude.
pub fn audit_gradients_fd(
    problem: &SaddleProblem,
    points: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-6;
    for k in 0..points {
        // Shrink samples toward the interior so the stencil stays feasible.
        let cx = problem.set_x.interior_point();
        let cy = problem.set_y.interior_point();
        let sx = problem.set_x.sample(&mut rng);
        let sy = problem.set_y.sample(&mut rng);
        let x: Vec<f64> = cx.iter().zip(&sx).map(|(c, s)| c + 0.9 * (s - c)).collect();
        let y: Vec<f64> = cy.iter().zip(&sy).map(|(c, s)| c + 0.9 * (s - c)).collect();
        let gx = problem.grad_x(&x, &y);
        let gy = problem.grad_y(&x, &y);
        let scale_x = linalg::norm2(&gx).max(1.0);
        let scale_y = linalg::norm2(&gy).max(1.0);
        for i in 0..x.len() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (problem.value(&xp, &y) - problem.value(&xm, &y)) / (2.0 * h);
            if (fd - gx[i]).abs() > rel_tol * scale_x {
                return Err(Error::ConstantsMisdeclared(format!(
                    "grad_x[{i}] disagrees with finite differences at sample {k}: {} vs {fd}",
                    gx[i]
                )));
            }
        }
        for j in 0..y.len() {
            let mut yp = y.to_vec();
            let mut ym = y.to_vec();
            yp[j] += h;
            ym[j] -= h;
            let fd = (problem.value(&x, &yp) - problem.value(&x, &ym)) / (2.0 * h);
            if (fd - gy[j]).abs() > rel_tol * scale_y {
                return Err(Error::ConstantsMisdeclared(format!(
                    "grad_y[{j}] disagrees with finite differences at sample {k}: {} vs {fd}",
                    gy[j]
                )));
            }
        }
    }
    Ok(())
}

/// Sampled audit of the declared strong convexity in x and concavity in y.
pub fn audit_strong_convexity(
    problem: &SaddleProblem,
    pairs: usize,
    seed: u64,
    slack: f64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = problem.constants;
    for k in 0..pairs {
        let y = problem.set_y.sample(&mut rng);
        let x1 = problem.set_x.sample(&mut rng);
        let x2 = problem.set_x.sample(&mut rng);
        let d = linalg::sub(&x1, &x2);
        let lhs = linalg::dot(
            &linalg::sub(&problem.grad_x(&x1, &y), &problem.grad_x(&x2, &y)),
            &d,
        );
        if lhs < c.mu_x * linalg::norm2_sq(&d) - slack {
            return Err(Error::ConstantsMisdeclared(format!(
                "strong convexity in x violated on pair {k}: {lhs}"
            )));
        }
        let x = problem.set_x.sample(&mut rng);
        let y1 = problem.set_y.sample(&mut rng);
        let y2 = problem.set_y.sample(&mut rng);
        let d = linalg::sub(&y1, &y2);
        let lhs = linalg::dot(
            &linalg::sub(&problem.grad_y(&x, &y1), &problem.grad_y(&x, &y2)),
            &d,
        );
        if lhs > -c.mu_y * linalg::norm2_sq(&d) + slack {
            return Err(Error::ConstantsMisdeclared(format!(
                "strong concavity in y violated on pair {k}: {lhs}"
            )));
        }
    }
    Ok(())
}

/// Sampled audit of the four Holder conditions with the declared constants.
pub fn audit_holder_conditions(
    problem: &SaddleProblem,
    pairs: usize,
    seed: u64,
    slack: f64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = problem.constants;
    for k in 0..pairs {
        let x1 = problem.set_x.sample(&mut rng);
        let x2 = problem.set_x.sample(&mut rng);
        let y1 = problem.set_y.sample(&mut rng);
        let y2 = problem.set_y.sample(&mut rng);
        let dxn = linalg::dist2(&x1, &x2);
        let dyn_ = linalg::dist2(&y1, &y2);
        let checks = [
            (
                linalg::dist2(&problem.grad_x(&x1, &y1), &problem.grad_x(&x2, &y1)),
                c.l_xx * dxn.powf(c.nu),
                "grad_x in x",
            ),
            (
                linalg::dist2(&problem.grad_x(&x1, &y1), &problem.grad_x(&x1, &y2)),
                c.l_xy * dyn_.powf(c.nu),
                "grad_x in y",
            ),
            (
                linalg::dist2(&problem.grad_y(&x1, &y1), &problem.grad_y(&x2, &y1)),
                c.l_xy * dxn.powf(c.nu),
                "grad_y in x",
            ),
            (
                linalg::dist2(&problem.grad_y(&x1, &y1), &problem.grad_y(&x1, &y2)),
                c.l_yy * dyn_,
                "grad_y in y",
            ),
        ];
        for (lhs, rhs, what) in checks {
            if lhs > rhs + slack {
                return Err(Error::ConstantsMisdeclared(format!(
                    "Holder condition {what} violated on pair {k}: {lhs} > {rhs}"
                )));
            }
        }
    }
    Ok(())
}
