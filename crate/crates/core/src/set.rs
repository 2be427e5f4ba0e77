//! Feasible sets with closed-form Euclidean projections.
//!
//! Every solver subproblem in this crate reduces to either a Euclidean
//! projection or a separable multiplicative update over one of these sets,
//! so each variant carries its own exact projection.

use crate::error::{Error, Result};
use crate::linalg::{dist2, norm2};
use rand::Rng;

/// A closed convex feasible set.
#[derive(Debug, Clone)]
pub enum FeasibleSet {
    /// All of R^dim.
    FullSpace { dim: usize },
    /// Euclidean ball of given center and radius.
    Ball { center: Vec<f64>, radius: f64 },
    /// Axis-aligned box `lo <= x <= hi`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Nonnegative orthant.
    Orthant { dim: usize },
    /// Probability simplex: x >= 0, sum x = 1.
    Simplex { dim: usize },
    /// Nonnegative part of the origin-centered ball: x >= 0, |x| <= radius.
    NonnegBall { dim: usize, radius: f64 },
    /// Cartesian product of blocks, in order.
    Product { parts: Vec<FeasibleSet> },
}

impl FeasibleSet {
    pub fn unit_ball(dim: usize) -> Self {
        FeasibleSet::Ball {
            center: vec![0.0; dim],
            radius: 1.0,
        }
    }

    pub fn centered_ball(dim: usize, radius: f64) -> Self {
        FeasibleSet::Ball {
            center: vec![0.0; dim],
            radius,
        }
    }

    pub fn symmetric_box(dim: usize, half_width: f64) -> Self {
        FeasibleSet::Box {
            lo: vec![-half_width; dim],
            hi: vec![half_width; dim],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::FullSpace { dim }
            | FeasibleSet::Orthant { dim }
            | FeasibleSet::Simplex { dim }
            | FeasibleSet::NonnegBall { dim, .. } => *dim,
            FeasibleSet::Ball { center, .. } => center.len(),
            FeasibleSet::Box { lo, .. } => lo.len(),
            FeasibleSet::Product { parts } => parts.iter().map(|p| p.dim()).sum(),
        }
    }

    /// Membership test with an absolute slack for round-off.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            FeasibleSet::FullSpace { .. } => true,
            FeasibleSet::Ball { center, radius } => dist2(x, center) <= radius + tol,
            FeasibleSet::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *v >= l - tol && *v <= h + tol),
            FeasibleSet::Orthant { .. } => x.iter().all(|v| *v >= -tol),
            FeasibleSet::Simplex { .. } => {
                x.iter().all(|v| *v >= -tol) && (x.iter().sum::<f64>() - 1.0).abs() <= tol
            }
            FeasibleSet::NonnegBall { radius, .. } => {
                x.iter().all(|v| *v >= -tol) && norm2(x) <= radius + tol
            }
            FeasibleSet::Product { parts } => {
                let mut off = 0;
                parts.iter().all(|p| {
                    let d = p.dim();
                    let ok = p.contains(&x[off..off + d], tol);
                    off += d;
                    ok
                })
            }
        }
    }

    /// Declared Euclidean diameter bound, `None` for unbounded sets.
    /// Products compose as the norm of component diameters.
    pub fn diameter(&self) -> Option<f64> {
        match self {
            FeasibleSet::FullSpace { .. } | FeasibleSet::Orthant { .. } => None,
            FeasibleSet::Ball { radius, .. } => Some(2.0 * radius),
            FeasibleSet::Box { lo, hi } => Some(norm2(&crate::linalg::sub(hi, lo))),
            FeasibleSet::Simplex { dim } => Some(if *dim > 1 { 2f64.sqrt() } else { 0.0 }),
            // Conservative: the true diameter is sqrt(2) * radius for dim >= 2.
            FeasibleSet::NonnegBall { radius, .. } => Some(2.0 * radius),
            FeasibleSet::Product { parts } => {
                let mut acc = 0.0;
                for p in parts {
                    acc += p.diameter()?.powi(2);
                }
                Some(acc.sqrt())
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.diameter().is_some()
    }

    /// Exact Euclidean projection onto the set.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim(), "projection dimension mismatch");
        match self {
            FeasibleSet::FullSpace { .. } => x.to_vec(),
            FeasibleSet::Ball { center, radius } => {
                let d = dist2(x, center);
                if d <= *radius {
                    x.to_vec()
                } else {
                    let t = radius / d;
                    center
                        .iter()
                        .zip(x)
                        .map(|(c, v)| c + t * (v - c))
                        .collect()
                }
            }
            FeasibleSet::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (l, h))| v.max(*l).min(*h))
                .collect(),
            FeasibleSet::Orthant { .. } => x.iter().map(|v| v.max(0.0)).collect(),
            FeasibleSet::Simplex { .. } => project_simplex(x),
            FeasibleSet::NonnegBall { radius, .. } => {
                // Clip to the orthant first; radial shrinking preserves
                // nonnegativity, so the composition is the exact projection.
                let clipped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
                let n = norm2(&clipped);
                if n <= *radius {
                    clipped
                } else {
                    let t = radius / n;
                    clipped.iter().map(|v| v * t).collect()
                }
            }
            FeasibleSet::Product { parts } => {
                let mut out = Vec::with_capacity(x.len());
                let mut off = 0;
                for p in parts {
                    let d = p.dim();
                    out.extend(p.project(&x[off..off + d]));
                    off += d;
                }
                out
            }
        }
    }

    /// A strictly feasible point when one exists (boundary for Simplex dim 1).
    pub fn interior_point(&self) -> Vec<f64> {
        match self {
            FeasibleSet::FullSpace { dim } => vec![0.0; *dim],
            FeasibleSet::Ball { center, .. } => center.clone(),
            FeasibleSet::Box { lo, hi } => {
                lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect()
            }
            FeasibleSet::Orthant { dim } => vec![1.0; *dim],
            FeasibleSet::Simplex { dim } => vec![1.0 / *dim as f64; *dim],
            FeasibleSet::NonnegBall { dim, radius } => {
                vec![0.5 * radius / (*dim as f64).sqrt(); *dim]
            }
            FeasibleSet::Product { parts } => {
                parts.iter().flat_map(|p| p.interior_point()).collect()
            }
        }
    }

    /// Random feasible point for sampled audits. Unbounded sets are sampled
    /// from a bounded window around the origin.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            FeasibleSet::FullSpace { dim } => (0..*dim).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            FeasibleSet::Ball { center, radius } => {
                let dim = center.len();
                let dir: Vec<f64> = (0..dim).map(|_| standard_normal(rng)).collect();
                let n = norm2(&dir).max(1e-300);
                let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
                center.iter().zip(&dir).map(|(c, d)| c + r * d / n).collect()
            }
            FeasibleSet::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| if l == h { *l } else { rng.gen_range(*l..*h) })
                .collect(),
            FeasibleSet::Orthant { dim } => (0..*dim).map(|_| rng.gen_range(0.0..2.0)).collect(),
            FeasibleSet::Simplex { dim } => {
                // Exponential spacings normalize to a uniform simplex point.
                let e: Vec<f64> = (0..*dim)
                    .map(|_| -(1.0 - rng.gen::<f64>()).ln().max(1e-300))
                    .collect();
                let s: f64 = e.iter().sum();
                e.iter().map(|v| v / s).collect()
            }
            FeasibleSet::NonnegBall { dim, radius } => {
                let inner = FeasibleSet::centered_ball(*dim, *radius);
                inner.sample(rng).iter().map(|v| v.abs()).collect()
            }
            FeasibleSet::Product { parts } => parts.iter().flat_map(|p| p.sample(rng)).collect(),
        }
    }

    /// Maximize a linear functional over the set: `max_{z in set} <c, z>`,
    /// returning the value and a maximizer. Errors on unbounded sets.
    pub fn linear_max(&self, c: &[f64]) -> Result<(f64, Vec<f64>)> {
        assert_eq!(c.len(), self.dim());
        match self {
            FeasibleSet::FullSpace { .. } | FeasibleSet::Orthant { .. } => Err(Error::Capability(
                "linear maximization over an unbounded set".into(),
            )),
            FeasibleSet::Ball { center, radius } => {
                let n = norm2(c);
                let z: Vec<f64> = if n == 0.0 {
                    center.clone()
                } else {
                    center.iter().zip(c).map(|(a, v)| a + radius * v / n).collect()
                };
                Ok((crate::linalg::dot(c, &z), z))
            }
            FeasibleSet::Box { lo, hi } => {
                let z: Vec<f64> = c
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(v, (l, h))| if *v >= 0.0 { *h } else { *l })
                    .collect();
                Ok((crate::linalg::dot(c, &z), z))
            }
            FeasibleSet::Simplex { dim } => {
                let (mut best, mut arg) = (c[0], 0);
                for i in 1..*dim {
                    if c[i] > best {
                        best = c[i];
                        arg = i;
                    }
                }
                let mut z = vec![0.0; *dim];
                z[arg] = 1.0;
                Ok((best, z))
            }
            FeasibleSet::NonnegBall { dim, radius } => {
                let pos: Vec<f64> = c.iter().map(|v| v.max(0.0)).collect();
                let n = norm2(&pos);
                if n == 0.0 {
                    return Ok((0.0, vec![0.0; *dim]));
                }
                let z: Vec<f64> = pos.iter().map(|v| radius * v / n).collect();
                Ok((crate::linalg::dot(c, &z), z))
            }
            FeasibleSet::Product { parts } => {
                let mut val = 0.0;
                let mut z = Vec::with_capacity(c.len());
                let mut off = 0;
                for p in parts {
                    let d = p.dim();
                    let (v, zp) = p.linear_max(&c[off..off + d])?;
                    val += v;
                    z.extend(zp);
                    off += d;
                }
                Ok((val, z))
            }
        }
    }
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; the second variate is discarded.
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Euclidean projection onto the probability simplex (Held et al. pivot rule).
fn project_simplex(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut u = x.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut rho = 0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            rho = i;
            theta = t;
        }
    }
    let _ = rho;
    (0..n).map(|i| (x[i] - theta).max(0.0)).collect()
}
