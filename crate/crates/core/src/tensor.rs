//! Row-major 2-D tensor with the handful of dense kernels the network code needs.
//!
//! All training math is carried out in `f64`. The three multiply kernels are
//! arranged so the innermost loop always walks contiguous memory, which lets
//! the compiler vectorize them; that is all the performance this crate needs.

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64` values.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2D {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Tensor2D {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor2D {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                op: "Tensor2D::from_vec",
                expected: format!("{} values", rows * cols),
                got: format!("{} values", data.len()),
            });
        }
        Ok(Tensor2D { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::ShapeMismatch {
                    op: "Tensor2D::from_rows",
                    expected: format!("{cols} columns"),
                    got: format!("{} columns in row {i}", r.len()),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Tensor2D {
            rows: n,
            cols,
            data,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Copies the given rows into a new tensor, preserving order.
    pub fn select_rows(&self, indices: &[usize]) -> Tensor2D {
        let mut out = Tensor2D::zeros(indices.len(), self.cols);
        for (dst, &src) in indices.iter().enumerate() {
            out.row_mut(dst).copy_from_slice(self.row(src));
        }
        out
    }

    /// Horizontal concatenation: `[self | other]` row by row.
    pub fn hcat(&self, other: &Tensor2D) -> Result<Tensor2D> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch {
                op: "Tensor2D::hcat",
                expected: format!("{} rows", self.rows),
                got: format!("{} rows", other.rows),
            });
        }
        let cols = self.cols + other.cols;
        let mut out = Tensor2D::zeros(self.rows, cols);
        for r in 0..self.rows {
            out.row_mut(r)[..self.cols].copy_from_slice(self.row(r));
            out.row_mut(r)[self.cols..].copy_from_slice(other.row(r));
        }
        Ok(out)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn check_finite(&self, context: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(context))
        }
    }

    /// `self (n x k) * other (k x m) -> n x m`.
    pub fn matmul(&self, other: &Tensor2D) -> Result<Tensor2D> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                op: "Tensor2D::matmul",
                expected: format!("{} inner rows", self.cols),
                got: format!("{} inner rows", other.rows),
            });
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = Tensor2D::zeros(n, m);
        for i in 0..n {
            let a_row = self.row(i);
            let out_row = out.row_mut(i);
            accumulate_rows(out_row, a_row, &other.data, k, m);
        }
        Ok(out)
    }

    /// `self^T (n x k, stored k x n) * other (k x m) -> n x m`.
    ///
    /// Both operands are walked row-contiguously; used for weight gradients
    /// `dW = X^T dZ`.
    pub fn matmul_at_b(&self, other: &Tensor2D) -> Result<Tensor2D> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch {
                op: "Tensor2D::matmul_at_b",
                expected: format!("{} shared rows", self.rows),
                got: format!("{} shared rows", other.rows),
            });
        }
        let (k, n, m) = (self.rows, self.cols, other.cols);
        let mut out = Tensor2D::zeros(n, m);
        let mut a_col = vec![0.0; k];
        for i in 0..n {
            // Gather column i of self so the accumulation kernel sees a
            // contiguous coefficient stream.
            for (p, c) in a_col.iter_mut().enumerate() {
                *c = self.data[p * n + i];
            }
            let out_row = &mut out.data[i * m..(i + 1) * m];
            accumulate_rows(out_row, &a_col, &other.data, k, m);
        }
        Ok(out)
    }

    /// `self (n x k) * other^T (k x m, stored m x k) -> n x m`.
    ///
    /// Dot products of contiguous rows; used for input gradients `dX = dZ W^T`.
    pub fn matmul_abt(&self, other: &Tensor2D) -> Result<Tensor2D> {
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                op: "Tensor2D::matmul_abt",
                expected: format!("{} shared cols", self.cols),
                got: format!("{} shared cols", other.cols),
            });
        }
        let (n, m) = (self.rows, other.rows);
        let mut out = Tensor2D::zeros(n, m);
        for i in 0..n {
            let a_row = self.row(i);
            let out_row = out.row_mut(i);
            for (j, o) in out_row.iter_mut().enumerate() {
                *o = dot(a_row, other.row(j));
            }
        }
        Ok(out)
    }

    /// Adds `v` to every row in place.
    pub fn add_row_vector(&mut self, v: &[f64]) -> Result<()> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch {
                op: "Tensor2D::add_row_vector",
                expected: format!("{} cols", self.cols),
                got: format!("{} values", v.len()),
            });
        }
        for r in 0..self.rows {
            for (x, &b) in self.row_mut(r).iter_mut().zip(v) {
                *x += b;
            }
        }
        Ok(())
    }

    /// Column sums, length `cols`.
    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for r in 0..self.rows {
            for (s, &x) in sums.iter_mut().zip(self.row(r)) {
                *s += x;
            }
        }
        sums
    }
}

/// `out += sum_p coeffs[p] * rows[p]` over `k` rows of width `m`, unrolled
/// four deep so each pass over `out` folds in four source rows.
#[inline]
fn accumulate_rows(out: &mut [f64], coeffs: &[f64], rows: &[f64], k: usize, m: usize) {
    let mut p = 0;
    while p + 4 <= k {
        let (a0, a1, a2, a3) = (coeffs[p], coeffs[p + 1], coeffs[p + 2], coeffs[p + 3]);
        let r0 = &rows[p * m..(p + 1) * m];
        let r1 = &rows[(p + 1) * m..(p + 2) * m];
        let r2 = &rows[(p + 2) * m..(p + 3) * m];
        let r3 = &rows[(p + 3) * m..(p + 4) * m];
        for (j, o) in out.iter_mut().enumerate() {
            let t0 = a0.mul_add(r0[j], *o);
            let t1 = a1.mul_add(r1[j], t0);
            let t2 = a2.mul_add(r2[j], t1);
            *o = a3.mul_add(r3[j], t2);
        }
        p += 4;
    }
    while p < k {
        let a = coeffs[p];
        let row = &rows[p * m..(p + 1) * m];
        for (o, &b) in out.iter_mut().zip(row) {
            *o = a.mul_add(b, *o);
        }
        p += 1;
    }
}

/// Dot product with four independent accumulators.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = c * 4;
        acc[0] = a[i].mul_add(b[i], acc[0]);
        acc[1] = a[i + 1].mul_add(b[i + 1], acc[1]);
        acc[2] = a[i + 2].mul_add(b[i + 2], acc[2]);
        acc[3] = a[i + 3].mul_add(b[i + 3], acc[3]);
    }
    let mut sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in chunks * 4..a.len() {
        sum = a[i].mul_add(b[i], sum);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_matches_scalar_loop() {
        let a = Tensor2D::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let b = Tensor2D::from_rows(&[vec![7.0, 8.0], vec![9.0, 10.0], vec![11.0, 12.0]]).unwrap();
        let c = a.matmul(&b).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut expect = 0.0;
                for k in 0..3 {
                    expect += a.get(i, k) * b.get(k, j);
                }
                assert_eq!(c.get(i, j), expect);
            }
        }
    }

    #[test]
    fn transpose_variants_agree_with_plain_matmul() {
        let a = Tensor2D::from_rows(&[vec![1.0, -2.0], vec![0.5, 3.0], vec![2.0, 2.0]]).unwrap();
        let b = Tensor2D::from_rows(&[
            vec![1.0, 0.0, 2.0],
            vec![-1.0, 1.0, 0.5],
            vec![3.0, 1.0, 1.0],
        ])
        .unwrap();

        // a^T (2x3) * b (3x3)
        let atb = a.matmul_at_b(&b).unwrap();
        let mut at = Tensor2D::zeros(2, 3);
        for i in 0..3 {
            for j in 0..2 {
                at.set(j, i, a.get(i, j));
            }
        }
        assert_eq!(atb, at.matmul(&b).unwrap());

        // a (3x2) * b'^T where b' is 4x2
        let bp = Tensor2D::from_rows(&[
            vec![1.0, 2.0],
            vec![0.0, 1.0],
            vec![-1.0, 0.5],
            vec![2.0, -2.0],
        ])
        .unwrap();
        let abt = a.matmul_abt(&bp).unwrap();
        let mut bt = Tensor2D::zeros(2, 4);
        for i in 0..4 {
            for j in 0..2 {
                bt.set(j, i, bp.get(i, j));
            }
        }
        assert_eq!(abt, a.matmul(&bt).unwrap());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = Tensor2D::zeros(2, 3);
        let b = Tensor2D::zeros(2, 3);
        assert!(a.matmul(&b).is_err());
        assert!(Tensor2D::from_vec(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn hcat_concatenates_rows() {
        let a = Tensor2D::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = Tensor2D::from_rows(&[vec![5.0], vec![6.0]]).unwrap();
        let c = a.hcat(&b).unwrap();
        assert_eq!(c.row(0), &[1.0, 2.0, 5.0]);
        assert_eq!(c.row(1), &[3.0, 4.0, 6.0]);
    }

    #[test]
    fn finiteness_check_catches_nan() {
        let mut t = Tensor2D::zeros(1, 2);
        assert!(t.check_finite("test").is_ok());
        t.set(0, 1, f64::NAN);
        assert!(t.check_finite("test").is_err());
    }
}
