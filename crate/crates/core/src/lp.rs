//! Exact rational feasibility for small linear systems.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{Int, Vector};
use crate::error::{Error, Result};

/// A linear constraint `coeffs . x (= or >=) rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vector,
    pub rhs: Int,
}

impl Constraint {
    pub fn new(coeffs: Vector, rhs: Int) -> Self {
        Constraint { coeffs, rhs }
    }
}

fn q(x: Int) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// A point of `{x in Q^n : E x = f, G x >= h}` found by the two-phase simplex
/// method with Bland's rule, or `None` when the system is infeasible.
pub fn feasible_point(eqs: &[Constraint], ineqs: &[Constraint], n: usize) -> Result<Option<Vec<BigRational>>> {
    for c in eqs.iter().chain(ineqs) {
        if c.coeffs.len() != n {
            return Err(Error::dim("constraint of wrong length"));
        }
    }
    // columns: p (n), q (n), slack (ineqs), artificial (rows)
    let m = eqs.len() + ineqs.len();
    let ns = ineqs.len();
    let nvar = 2 * n + ns;
    let width = nvar + m + 1;
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m + 1);
    for (i, c) in eqs.iter().chain(ineqs).enumerate() {
        let mut row = vec![BigRational::zero(); width];
        for j in 0..n {
            row[j] = q(c.coeffs[j]);
            row[n + j] = -q(c.coeffs[j]);
        }
        if i >= eqs.len() {
            row[2 * n + (i - eqs.len())] = -BigRational::one();
        }
        row[width - 1] = q(c.rhs);
        if row[width - 1].is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        row[nvar + i] = BigRational::one();
        t.push(row);
    }
    // phase one objective: minimize the sum of artificials, stored as reduced costs
    let mut obj = vec![BigRational::zero(); width];
    for row in &t {
        for j in 0..nvar {
            obj[j] -= &row[j];
        }
        obj[width - 1] -= &row[width - 1];
    }
    t.push(obj);
    let mut basis: Vec<usize> = (0..m).map(|i| nvar + i).collect();
    loop {
        let cost = &t[m];
        let Some(enter) = (0..nvar + m).find(|&j| cost[j].is_negative()) else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((l, r)) => ratio < *r || (ratio == *r && basis[i] < basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            return Err(Error::Internal("phase one objective is unbounded".into()));
        };
        let pivot = t[row][enter].clone();
        for x in t[row].iter_mut() {
            *x /= &pivot;
        }
        let prow = t[row].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != row && !r[enter].is_zero() {
                let f = r[enter].clone();
                for (x, p) in r.iter_mut().zip(&prow) {
                    *x -= &f * p;
                }
            }
        }
        basis[row] = enter;
    }
    if !t[m][width - 1].is_zero() {
        return Ok(None);
    }
    let mut vals = vec![BigRational::zero(); nvar + m];
    for (i, &b) in basis.iter().enumerate() {
        vals[b] = t[i][width - 1].clone();
    }
    Ok(Some((0..n).map(|j| &vals[j] - &vals[n + j]).collect()))
}

/// Feasibility of `{E x = f, G x >= h}` by Fourier–Motzkin elimination.
/// Exponential in the worst case; intended for small systems.
pub fn fourier_motzkin_feasible(eqs: &[Constraint], ineqs: &[Constraint], n: usize) -> Result<bool> {
    // rows are (a, b) meaning a . x >= b
    let mut rows: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
    for c in eqs {
        let a: Vec<BigRational> = c.coeffs.iter().map(|x| q(*x)).collect();
        rows.push((a.clone(), q(c.rhs)));
        rows.push((a.iter().map(|x| -x).collect(), -q(c.rhs)));
    }
    for c in ineqs {
        rows.push((c.coeffs.iter().map(|x| q(*x)).collect(), q(c.rhs)));
    }
    for v in 0..n {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.0[v].is_positive() {
                pos.push(r);
            } else if r.0[v].is_negative() {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        for (pa, pb) in &pos {
            for (na, nb) in &neg {
                let fp = -&na[v];
                let fnn = pa[v].clone();
                let a: Vec<BigRational> = pa.iter().zip(na).map(|(x, y)| x * &fp + y * &fnn).collect();
                let b = pb * &fp + nb * &fnn;
                rest.push((a, b));
            }
        }
        rows = rest;
        rows.sort();
        rows.dedup();
        if rows.len() > 100_000 {
            return Err(Error::Capacity("Fourier–Motzkin elimination grew too large".into()));
        }
    }
    Ok(rows.iter().all(|(_, b)| !b.is_positive()))
}

/// Smallest positive integer multiple of a rational vector.
pub fn clear_denominators(x: &[BigRational]) -> Result<Vector> {
    let mut l = BigInt::one();
    for v in x {
        let d = v.denom();
        l = num_integer_lcm(&l, d);
    }
    x.iter()
        .map(|v| {
            let scaled = v * BigRational::from_integer(l.clone());
            scaled.to_integer().to_i128().ok_or(Error::Overflow)
        })
        .collect()
}

fn num_integer_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let r = &x % &y;
        x = y;
        y = r;
    }
    (a * b).abs() / x
}
