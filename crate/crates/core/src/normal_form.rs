//! Hermite and Smith normal forms and the lattice operations built on them.

use crate::arith::{self, Int, IntMatrix, Vector};
use crate::error::{Error, Result};

/// Row-style Hermite normal form `reduced = transform * m`.
///
/// `transform` is unimodular; `reduced` is in row echelon form with positive
/// pivots, entries above each pivot reduced into `[0, pivot)`, zero rows last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hermite {
    pub reduced: IntMatrix,
    pub transform: IntMatrix,
    /// Column index of the pivot of each nonzero row.
    pub pivots: Vec<usize>,
}

impl Hermite {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Nonzero rows of the reduced matrix: a canonical basis of the row lattice.
    pub fn basis(&self) -> Vec<Vector> {
        (0..self.rank()).map(|i| self.reduced.row(i).to_vec()).collect()
    }
}

pub fn hermite_normal_form(m: &IntMatrix) -> Result<Hermite> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        for i in (r + 1)..rows {
            let b = a.get(i, c);
            if b == 0 {
                continue;
            }
            let p = a.get(r, c);
            let (g, x, y) = arith::egcd(p, b);
            let (pg, bg) = (p / g, b / g);
            a.combine_rows(r, i, x, y, -bg, pg)?;
            u.combine_rows(r, i, x, y, -bg, pg)?;
        }
        let p = a.get(r, c);
        if p == 0 {
            continue;
        }
        if p < 0 {
            a.negate_row(r);
            u.negate_row(r);
        }
        let p = a.get(r, c);
        for i in 0..r {
            let q = a.get(i, c).div_euclid(p);
            if q != 0 {
                a.add_row_multiple(i, r, -q)?;
                u.add_row_multiple(i, r, -q)?;
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(Hermite { reduced: a, transform: u, pivots })
}

/// Smith normal form `left * m * right = diagonal`, with the diagonal
/// entries nonnegative and each dividing the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub diagonal: IntMatrix,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl Smith {
    /// Nonzero diagonal entries in order.
    pub fn invariants(&self) -> Vec<Int> {
        let n = self.diagonal.nrows().min(self.diagonal.ncols());
        (0..n).map(|i| self.diagonal.get(i, i)).filter(|d| *d != 0).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariants().len()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Result<Smith> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut a = m.clone();
    let mut l = IntMatrix::identity(rows);
    let mut r = IntMatrix::identity(cols);
    let n = rows.min(cols);
    let mut t = 0;
    while t < n {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let v = a.get(i, j);
                if v != 0 && best.is_none_or(|(bi, bj)| v.abs() < a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap_rows(t, bi);
        l.swap_rows(t, bi);
        a.swap_cols(t, bj);
        r.swap_cols(t, bj);

        let mut clean = true;
        let p = a.get(t, t);
        for i in (t + 1)..rows {
            let q = a.get(i, t).div_euclid(p);
            if q != 0 {
                a.add_row_multiple(i, t, -q)?;
                l.add_row_multiple(i, t, -q)?;
            }
            if a.get(i, t) != 0 {
                clean = false;
            }
        }
        for j in (t + 1)..cols {
            let q = a.get(t, j).div_euclid(p);
            if q != 0 {
                a.add_col_multiple(j, t, -q)?;
                r.add_col_multiple(j, t, -q)?;
            }
            if a.get(t, j) != 0 {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility of the trailing block
        let mut bad_row = None;
        'outer: for i in (t + 1)..rows {
            for j in (t + 1)..cols {
                if a.get(i, j) % p != 0 {
                    bad_row = Some(i);
                    break 'outer;
                }
            }
        }
        if let Some(i) = bad_row {
            a.add_row_multiple(t, i, 1)?;
            l.add_row_multiple(t, i, 1)?;
            continue;
        }
        if p < 0 {
            a.negate_row(t);
            l.negate_row(t);
        }
        t += 1;
    }
    Ok(Smith { diagonal: a, left: l, right: r })
}

/// Basis (as rows) of the integer kernel `{x : m x = 0}`; saturated by construction.
pub fn kernel(m: &IntMatrix) -> Result<Vec<Vector>> {
    let h = hermite_normal_form(&m.transpose())?;
    let rank = h.rank();
    let rows: Vec<Vector> = (rank..h.transform.nrows()).map(|i| h.transform.row(i).to_vec()).collect();
    // canonical basis of the kernel lattice
    canonical_basis(&rows, m.ncols())
}

/// Hermite basis of the lattice spanned by `rows`.
pub fn canonical_basis(rows: &[Vector], n: usize) -> Result<Vec<Vector>> {
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    Ok(hermite_normal_form(&IntMatrix::from_rows(rows, n)?)?.basis())
}

pub fn rank(rows: &[Vector], n: usize) -> Result<usize> {
    if rows.is_empty() {
        return Ok(0);
    }
    Ok(hermite_normal_form(&IntMatrix::from_rows(rows, n)?)?.rank())
}

/// Orthogonal complement `{y : y . r = 0 for all rows r}` as a saturated basis.
pub fn orthogonal_complement(rows: &[Vector], n: usize) -> Result<Vec<Vector>> {
    if rows.is_empty() {
        return Ok((0..n).map(|i| arith::unit_vector(n, i)).collect());
    }
    kernel(&IntMatrix::from_rows(rows, n)?)
}

/// Saturation `(span_Q(rows)) ∩ Z^n`, as a Hermite basis.
pub fn saturate_lattice(rows: &[Vector], n: usize) -> Result<Vec<Vector>> {
    let perp = orthogonal_complement(rows, n)?;
    orthogonal_complement(&perp, n)
}

/// Membership and coordinates in a fixed lattice, with the Hermite form
/// computed once.
#[derive(Clone, Debug)]
pub struct LatticeSolver {
    hermite: Option<Hermite>,
}

impl LatticeSolver {
    pub fn new(basis: &[Vector], n: usize) -> Result<Self> {
        let hermite = if basis.is_empty() { None } else { Some(hermite_normal_form(&IntMatrix::from_rows(basis, n)?)?) };
        Ok(LatticeSolver { hermite })
    }

    /// Coefficients of `x` in terms of the original basis rows, if any.
    pub fn solve(&self, x: &[Int]) -> Result<Option<Vector>> {
        let Some(h) = &self.hermite else {
            return Ok(if arith::is_zero(x) { Some(Vec::new()) } else { None });
        };
        let mut rest = x.to_vec();
        let mut coeffs = vec![0; h.reduced.nrows()];
        for (i, &c) in h.pivots.iter().enumerate() {
            let p = h.reduced.get(i, c);
            if rest[c] % p != 0 {
                return Ok(None);
            }
            let q = rest[c] / p;
            coeffs[i] = q;
            if q != 0 {
                rest = arith::vec_comb(1, &rest, -q, h.reduced.row(i))?;
            }
        }
        if !arith::is_zero(&rest) {
            return Ok(None);
        }
        Ok(Some(h.transform.apply_left(&coeffs)?))
    }

    pub fn contains(&self, x: &[Int]) -> Result<bool> {
        Ok(self.solve(x)?.is_some())
    }
}

/// Express `x` as an integer combination of the rows of `basis`.
/// Returns `None` when `x` is not in their lattice span.
pub fn solve_in_lattice(basis: &[Vector], x: &[Int]) -> Result<Option<Vector>> {
    LatticeSolver::new(basis, x.len())?.solve(x)
}

pub fn in_lattice(basis: &[Vector], x: &[Int]) -> Result<bool> {
    Ok(solve_in_lattice(basis, x)?.is_some())
}

/// All integer solutions of `m x = b`: a particular solution and a Hermite
/// basis of the kernel, or `None` when there is none.
pub fn solve_integer_system(m: &IntMatrix, b: &[Int]) -> Result<Option<(Vector, Vec<Vector>)>> {
    let (rows, cols) = (m.nrows(), m.ncols());
    if b.len() != rows {
        return Err(Error::dim("right-hand side has the wrong length"));
    }
    let s = smith_normal_form(m)?;
    let lb = s.left.apply(b)?;
    let mut y = vec![0; cols];
    let mut free = Vec::new();
    for j in 0..cols {
        if j >= rows || s.diagonal.get(j, j) == 0 {
            free.push(j);
        }
    }
    for i in 0..rows {
        let d = if i < cols { s.diagonal.get(i, i) } else { 0 };
        if d == 0 {
            if lb[i] != 0 {
                return Ok(None);
            }
        } else {
            if lb[i] % d != 0 {
                return Ok(None);
            }
            y[i] = lb[i] / d;
        }
    }
    let x = s.right.apply(&y)?;
    let ker: Vec<Vector> = free.iter().map(|&j| s.right.col(j)).collect();
    Ok(Some((x, canonical_basis(&ker, cols)?)))
}

/// Inverse of a unimodular square matrix.
pub fn unimodular_inverse(m: &IntMatrix) -> Result<IntMatrix> {
    let h = hermite_normal_form(m)?;
    if h.reduced != IntMatrix::identity(m.nrows()) {
        return Err(Error::Internal("matrix is not unimodular".into()));
    }
    Ok(h.transform)
}

/// Integer determinant by Bareiss fraction-free elimination.
pub fn determinant(m: &IntMatrix) -> Result<Int> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::dim("determinant of a non-square matrix"));
    }
    if n == 0 {
        return Ok(1);
    }
    let mut u = m.clone();
    let mut sign = 1;
    let mut prev: Int = 1;
    for k in 0..n {
        if u.get(k, k) == 0 {
            let Some(p) = (k + 1..n).find(|&i| u.get(i, k) != 0) else { return Ok(0) };
            u.swap_rows(k, p);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let v = arith::sub(arith::mul(u.get(k, k), u.get(i, j))?, arith::mul(u.get(i, k), u.get(k, j))?)?;
                u.set(i, j, v / prev);
            }
            u.set(i, k, 0);
        }
        prev = u.get(k, k);
    }
    Ok(sign * prev)
}

/// A surjection `Z^n -> Z^r` whose kernel is the saturated sublattice spanned
/// by `rows`, in Hermite form (so coordinates of pivot columns survive), and
/// an integer section of it.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    pub projection: IntMatrix,
    pub section: IntMatrix,
}

pub fn quotient_map(rows: &[Vector], n: usize) -> Result<QuotientMap> {
    let perp = orthogonal_complement(rows, n)?;
    let r = perp.len();
    let projection = if r == 0 { IntMatrix::zeros(0, n) } else { IntMatrix::from_rows(&perp, n)? };
    let section = if r == 0 {
        IntMatrix::zeros(n, 0)
    } else {
        let h = hermite_normal_form(&projection.transpose())?;
        let top: Vec<Vector> = (0..r).map(|i| h.transform.row(i).to_vec()).collect();
        // transform * projection^T = [I; 0] because the projection is primitive
        for i in 0..r {
            for j in 0..r {
                if h.reduced.get(i, j) != Int::from(i == j) {
                    return Err(Error::Internal("projection is not primitive".into()));
                }
            }
        }
        IntMatrix::from_rows(&top, n)?.transpose()
    };
    Ok(QuotientMap { projection, section })
}
