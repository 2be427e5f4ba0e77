//! Small dense vector/matrix helpers shared by the solvers.
//!
//! Points and dual vectors are plain `Vec<f64>` slices; matrices are
//! row-major `Vec<f64>` with an explicit row count.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2_sq(v: &[f64]) -> f64 {
    dot(v, v)
}

pub fn norm2(v: &[f64]) -> f64 {
    norm2_sq(v).sqrt()
}

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + s * b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Row-major dense matrix with square or rectangular shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMat {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        DenseMat { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| dot(&self.data[r * self.cols..(r + 1) * self.cols], x))
            .collect()
    }

    /// `A^T x` without forming the transpose.
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for r in 0..self.rows {
            let xr = x[r];
            for c in 0..self.cols {
                out[c] += self.data[r * self.cols + c] * xr;
            }
        }
        out
    }

    pub fn transpose(&self) -> DenseMat {
        let mut t = DenseMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.at(r, c));
            }
        }
        t
    }

    /// Spectral norm upper estimate via power iteration on `A^T A`,
    /// inflated by a small factor so it is safe to declare as a bound.
    pub fn spectral_norm_bound(&self) -> f64 {
        if self.data.iter().all(|&v| v == 0.0) {
            return 0.0;
        }
        let mut v = vec![1.0; self.cols];
        let mut sigma = 0.0;
        for _ in 0..500 {
            let av = self.matvec(&v);
            let atav = self.matvec_t(&av);
            let n = norm2(&atav);
            if n == 0.0 {
                break;
            }
            sigma = n.sqrt();
            v = scale(&atav, 1.0 / n);
        }
        sigma * (1.0 + 1e-9)
    }
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
/// Intended for the small dense systems behind analytic test solutions.
pub fn solve_dense(a: &DenseMat, b: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(a.rows, a.cols);
    assert_eq!(b.len(), a.rows);
    let n = a.rows;
    let mut m = a.data.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| m[r1 * n + col].abs().total_cmp(&m[r2 * n + col].abs()))
            .unwrap();
        if m[pivot_row * n + col].abs() < 1e-14 {
            return None;
        }
        if pivot_row != col {
            for c in 0..n {
                m.swap(col * n + c, pivot_row * n + c);
            }
            rhs.swap(col, pivot_row);
        }
        let piv = m[col * n + col];
        for row in (col + 1)..n {
            let f = m[row * n + col] / piv;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[row * n + c] -= f * m[col * n + c];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = rhs[row];
        for c in (row + 1)..n {
            s -= m[row * n + c] * x[c];
        }
        x[row] = s / m[row * n + row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_dense_recovers_known_solution() {
        let a = DenseMat::new(2, 2, vec![2.0, 1.0, 1.0, 3.0]);
        let x_true = vec![0.7, -1.3];
        let b = a.matvec(&x_true);
        let x = solve_dense(&a, &b).unwrap();
        assert!(dist2(&x, &x_true) < 1e-12);
    }

    #[test]
    fn solve_dense_rejects_singular() {
        let a = DenseMat::new(2, 2, vec![1.0, 2.0, 2.0, 4.0]);
        assert!(solve_dense(&a, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn spectral_norm_of_rotation_like_matrix() {
        // [[1,1],[-1,1]] has singular values sqrt(2), sqrt(2).
        let a = DenseMat::new(2, 2, vec![1.0, 1.0, -1.0, 1.0]);
        let s = a.spectral_norm_bound();
        assert!((s - 2f64.sqrt()).abs() < 1e-6, "sigma = {s}");
    }

    #[test]
    fn matvec_t_matches_explicit_transpose() {
        let a = DenseMat::new(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let x = vec![-1.0, 0.5];
        assert_eq!(a.matvec_t(&x), a.transpose().matvec(&x));
    }
}
