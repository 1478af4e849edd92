//! Checked integer arithmetic and a small dense integer matrix.
//!
//! Every computation runs on `i128`. Any operation that would overflow
//! returns [`Error::Overflow`], which callers surface as a capacity error.

use std::fmt;

use crate::error::{Error, Result};

pub type Int = i128;
pub type Vector = Vec<Int>;

#[inline]
pub fn add(a: Int, b: Int) -> Result<Int> {
    a.checked_add(b).ok_or(Error::Overflow)
}

#[inline]
pub fn sub(a: Int, b: Int) -> Result<Int> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

#[inline]
pub fn mul(a: Int, b: Int) -> Result<Int> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

pub fn gcd(a: Int, b: Int) -> Int {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended gcd: returns `(g, x, y)` with `x*a + y*b = g >= 0`.
pub fn egcd(a: Int, b: Int) -> (Int, Int, Int) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1, 0);
    let (mut old_t, mut t) = (0, 1);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn dot(a: &[Int], b: &[Int]) -> Result<Int> {
    debug_assert_eq!(a.len(), b.len());
    let mut acc: Int = 0;
    for (x, y) in a.iter().zip(b) {
        acc = add(acc, mul(*x, *y)?)?;
    }
    Ok(acc)
}

pub fn vec_add(a: &[Int], b: &[Int]) -> Result<Vector> {
    a.iter().zip(b).map(|(x, y)| add(*x, *y)).collect()
}

pub fn vec_sub(a: &[Int], b: &[Int]) -> Result<Vector> {
    a.iter().zip(b).map(|(x, y)| sub(*x, *y)).collect()
}

pub fn vec_scale(a: &[Int], k: Int) -> Result<Vector> {
    a.iter().map(|x| mul(*x, k)).collect()
}

/// `ka * a + kb * b`, entrywise.
pub fn vec_comb(ka: Int, a: &[Int], kb: Int, b: &[Int]) -> Result<Vector> {
    a.iter().zip(b).map(|(x, y)| add(mul(ka, *x)?, mul(kb, *y)?)).collect()
}

pub fn is_zero(v: &[Int]) -> bool {
    v.iter().all(|x| *x == 0)
}

pub fn content(v: &[Int]) -> Int {
    v.iter().fold(0, |g, x| gcd(g, *x))
}

/// Divide out the content of `v`; the zero vector is returned unchanged.
pub fn primitive(v: &[Int]) -> Vector {
    let g = content(v);
    if g <= 1 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Build from rows; all rows must have length `cols`.
    pub fn from_rows(rows: &[Vector], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::dim(format!("row of length {} in a matrix with {} columns", r.len(), cols)));
            }
            data.extend_from_slice(r);
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    /// Build from columns; all columns must have length `rows`.
    pub fn from_cols(cols: &[Vector], rows: usize) -> Result<Self> {
        Ok(Self::from_rows(cols, rows)?.transpose())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Int {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_cols(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| *x == 0)
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::dim(format!("cannot multiply {}x{} by {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = add(out.get(i, j), mul(a, other.get(k, j))?)?;
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[Int]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::dim(format!("vector of length {} for a matrix with {} columns", v.len(), self.cols)));
        }
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// Row vector times matrix.
    pub fn apply_left(&self, v: &[Int]) -> Result<Vector> {
        if v.len() != self.rows {
            return Err(Error::dim(format!("vector of length {} for a matrix with {} rows", v.len(), self.rows)));
        }
        let mut out = vec![0; self.cols];
        for (i, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = add(*o, mul(c, self.get(i, j))?)?;
            }
        }
        Ok(out)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] += k * row[src]`
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, k: Int) -> Result<()> {
        if k == 0 {
            return Ok(());
        }
        for j in 0..self.cols {
            let v = add(self.get(dst, j), mul(k, self.get(src, j))?)?;
            self.set(dst, j, v);
        }
        Ok(())
    }

    /// `col[dst] += k * col[src]`
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, k: Int) -> Result<()> {
        if k == 0 {
            return Ok(());
        }
        for i in 0..self.rows {
            let v = add(self.get(i, dst), mul(k, self.get(i, src))?)?;
            self.set(i, dst, v);
        }
        Ok(())
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    /// Replace rows `a`, `b` by `(x*a + y*b, z*a + w*b)`.
    pub fn combine_rows(&mut self, a: usize, b: usize, x: Int, y: Int, z: Int, w: Int) -> Result<()> {
        for j in 0..self.cols {
            let (ra, rb) = (self.get(a, j), self.get(b, j));
            self.set(a, j, add(mul(x, ra)?, mul(y, rb)?)?);
            self.set(b, j, add(mul(z, ra)?, mul(w, rb)?)?);
        }
        Ok(())
    }

    /// Replace columns `a`, `b` by `(x*a + y*b, z*a + w*b)`.
    pub fn combine_cols(&mut self, a: usize, b: usize, x: Int, y: Int, z: Int, w: Int) -> Result<()> {
        for i in 0..self.rows {
            let (ca, cb) = (self.get(i, a), self.get(i, b));
            self.set(i, a, add(mul(x, ca)?, mul(y, cb)?)?);
            self.set(i, b, add(mul(z, ca)?, mul(w, cb)?)?);
        }
        Ok(())
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows {
            return Err(Error::dim("hstack with different row counts"));
        }
        let rows: Vec<Vector> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend_from_slice(other.row(i));
                r
            })
            .collect();
        IntMatrix::from_rows(&rows, self.cols + other.cols)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn egcd_bezout() {
        for a in -12..12 {
            for b in -12..12 {
                let (g, x, y) = egcd(a, b);
                assert_eq!(g, gcd(a, b));
                assert_eq!(x * a + y * b, g);
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(mul(Int::MAX, 2), Err(Error::Overflow));
        assert_eq!(dot(&[Int::MAX, 1], &[1, 1]), Err(Error::Overflow));
    }

    #[test]
    fn matrix_products() {
        let a = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]], 2).unwrap();
        let b = IntMatrix::identity(2);
        assert_eq!(a.mul(&b).unwrap(), a);
        assert_eq!(a.apply(&[1, 1]).unwrap(), vec![3, 7]);
        assert_eq!(a.apply_left(&[1, 1]).unwrap(), vec![4, 6]);
        assert_eq!(a.transpose().row(0), &[1, 3]);
    }
}
