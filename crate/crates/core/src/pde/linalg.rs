//! Sparse symmetric matrices and preconditioned conjugate gradients.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a symmetric matrix from upper-triangle entries `(i, j, v)` with `i <= j`;
    /// duplicates are summed in input order.
    pub fn from_upper_triplets(n: usize, mut upper: Vec<(usize, usize, f64)>) -> Self {
        upper.sort_by_key(|a| (a.0, a.1));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(upper.len());
        for (i, j, v) in upper {
            debug_assert!(i <= j && j < n);
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        let mut full: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * merged.len());
        for &(i, j, v) in &merged {
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        full.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = alloc::vec![0usize; n + 1];
        for &(i, _, _) in &full {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let cols = full.iter().map(|e| e.1).collect();
        let vals = full.iter().map(|e| e.2).collect();
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `(col, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(p) => self.vals[r.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut acc = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[p] * x[self.cols[p]];
            }
            *yi = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `true` when `A = A^T` entry by entry.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| self.get(j, i) == v))
    }
}

/// Dense lower-triangular Cholesky factor of a small SPD block.
#[derive(Clone, Debug)]
pub struct DenseCholesky {
    n: usize,
    l: Vec<f64>,
}

impl DenseCholesky {
    /// Factors the row-major SPD matrix `a`.
    pub fn factor(n: usize, a: &[f64]) -> Result<Self> {
        let mut l = alloc::vec![0.0; n * n];
        for j in 0..n {
            let mut d = a[j * n + j];
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) {
                return Err(Error::InvalidParameter("preconditioner block is not positive definite".into()));
            }
            let d = math::sqrt(d);
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        Ok(Self { n, l })
    }

    /// Solves `L L^T x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.l[i * n + k] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
    }
}

/// Preconditioner choice for [`conjugate_gradient`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Preconditioner {
    #[default]
    None,
    Jacobi,
    /// Exact inverse of the diagonal blocks grouped by parametric index `s`.
    MeanBlockDiagonal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Relative residual target `||F - A x|| <= tol ||F||`.
    pub tol: f64,
    /// Iteration cap; `None` means `10 n + 100`.
    pub max_iter: Option<usize>,
    pub preconditioner: Preconditioner,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: None, preconditioner: Preconditioner::None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Conjugate gradients for SPD `a`, with `apply_m` applying the preconditioner inverse.
pub fn conjugate_gradient(
    a: &CsrMatrix,
    rhs: &[f64],
    opts: &SolveOptions,
    mut apply_m: impl FnMut(&[f64], &mut [f64]),
) -> Result<(Vec<f64>, SolveStats)> {
    let n = a.dim();
    let max_iter = opts.max_iter.unwrap_or(10 * n + 100);
    let mut x = alloc::vec![0.0; n];
    let norm_f = math::sqrt(dot(rhs, rhs));
    if norm_f == 0.0 {
        return Ok((x, SolveStats { iterations: 0, relative_residual: 0.0 }));
    }
    let mut r = rhs.to_vec();
    let mut z = alloc::vec![0.0; n];
    apply_m(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = alloc::vec![0.0; n];
    let mut res = 1.0;
    for it in 0..max_iter {
        res = math::sqrt(dot(&r, &r)) / norm_f;
        if res <= opts.tol {
            return Ok((x, SolveStats { iterations: it, relative_residual: res }));
        }
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NonConvergence { iterations: it, residual: res });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        // Recompute the true residual periodically to stop drift.
        if (it + 1) % 50 == 0 {
            a.matvec(&x, &mut ap);
            for i in 0..n {
                r[i] = rhs[i] - ap[i];
            }
        }
        apply_m(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    a.matvec(&x, &mut ap);
    let true_res = math::sqrt(rhs.iter().zip(&ap).map(|(f, v)| (f - v) * (f - v)).sum::<f64>()) / norm_f;
    if true_res <= opts.tol {
        return Ok((x, SolveStats { iterations: max_iter, relative_residual: true_res }));
    }
    Err(Error::NonConvergence { iterations: max_iter, residual: res.max(true_res) })
}
