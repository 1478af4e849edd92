//! Rational polyhedral cones in `Z^n`: double description conversion between
//! generators and inequalities, pulling triangulations and Hilbert bases.

use std::collections::BTreeSet;

use crate::arith::{self, Int, IntMatrix, Vector};
use crate::error::{Error, Result};
use crate::normal_form;

/// Largest total number of fundamental-parallelepiped points examined by one
/// Hilbert basis computation.
pub const MAX_PARALLELEPIPED_POINTS: Int = 2_000_000;

/// Largest lattice rank accepted by the Hilbert basis routine.
pub const MAX_RANK: usize = 10;

/// Output of the double description method.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VRep {
    pub lineality: Vec<Vector>,
    pub rays: Vec<Vector>,
}

#[derive(Clone, Debug)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
}

fn zero_set(v: &[Int], constraints: &[Vector]) -> Result<Bits> {
    let mut b = Bits::new(constraints.len());
    for (i, c) in constraints.iter().enumerate() {
        if arith::dot(c, v)? == 0 {
            b.set(i);
        }
    }
    Ok(b)
}

/// Generators of `{y in Q^n : a.y >= 0 for a in ineqs, e.y = 0 for e in eqs}`.
///
/// Rays are primitive integer vectors, extreme modulo the lineality space.
pub fn double_description(ineqs: &[Vector], eqs: &[Vector], n: usize) -> Result<VRep> {
    let mut lin: Vec<Vector> = normal_form::orthogonal_complement(eqs, n)?;
    let mut rays: Vec<Vector> = Vec::new();
    let mut processed: Vec<Vector> = Vec::new();
    for a in ineqs {
        if a.len() != n {
            return Err(Error::dim("inequality of wrong length"));
        }
        if arith::is_zero(a) {
            continue;
        }
        let mut hit = None;
        for (k, l) in lin.iter().enumerate() {
            let v = arith::dot(a, l)?;
            if v != 0 {
                hit = Some((k, v));
                break;
            }
        }
        if let Some((k, mut al)) = hit {
            let mut l = lin.remove(k);
            if al < 0 {
                l = l.iter().map(|x| -x).collect();
                al = -al;
            }
            for other in lin.iter_mut() {
                let t = arith::dot(a, other)?;
                if t != 0 {
                    *other = arith::primitive(&arith::vec_comb(al, other, -t, &l)?);
                }
            }
            for r in rays.iter_mut() {
                let t = arith::dot(a, r)?;
                if t != 0 {
                    *r = arith::primitive(&arith::vec_comb(al, r, -t, &l)?);
                }
            }
            rays.push(arith::primitive(&l));
            processed.push(a.clone());
            continue;
        }
        let vals: Vec<Int> = rays.iter().map(|r| arith::dot(a, r)).collect::<Result<_>>()?;
        if vals.iter().all(|v| *v >= 0) {
            processed.push(a.clone());
            continue;
        }
        let zs: Vec<Bits> = rays.iter().map(|r| zero_set(r, &processed)).collect::<Result<_>>()?;
        let mut next: Vec<Vector> = Vec::new();
        for (i, r) in rays.iter().enumerate() {
            if vals[i] >= 0 {
                next.push(r.clone());
            }
        }
        for p in 0..rays.len() {
            if vals[p] <= 0 {
                continue;
            }
            for q in 0..rays.len() {
                if vals[q] >= 0 {
                    continue;
                }
                let common = zs[p].and(&zs[q]);
                let adjacent = (0..rays.len()).all(|r| r == p || r == q || !common.subset_of(&zs[r]));
                if adjacent {
                    let v = arith::vec_comb(vals[p], &rays[q], -vals[q], &rays[p])?;
                    next.push(arith::primitive(&v));
                }
            }
        }
        let set: BTreeSet<Vector> = next.into_iter().filter(|v| !arith::is_zero(v)).collect();
        rays = set.into_iter().collect();
        processed.push(a.clone());
    }
    let lineality = normal_form::canonical_basis(&lin, n)?;
    let set: BTreeSet<Vector> = rays.into_iter().map(|r| arith::primitive(&r)).collect();
    Ok(VRep { lineality, rays: set.into_iter().collect() })
}

/// A cone with both of its descriptions.
///
/// `x` lies in the cone iff every equation vanishes on it and every facet
/// functional is nonnegative on it. The cone equals
/// `span(lineality) + cone(rays)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub ambient: usize,
    pub equations: Vec<Vector>,
    pub facets: Vec<Vector>,
    pub lineality: Vec<Vector>,
    pub rays: Vec<Vector>,
}

impl Cone {
    pub fn from_generators(gens: &[Vector], n: usize) -> Result<Cone> {
        for g in gens {
            if g.len() != n {
                return Err(Error::dim(format!("generator of length {} in ambient rank {}", g.len(), n)));
            }
        }
        let dual = double_description(gens, &[], n)?;
        let primal = double_description(&dual.rays, &dual.lineality, n)?;
        Ok(Cone { ambient: n, equations: dual.lineality, facets: dual.rays, lineality: primal.lineality, rays: primal.rays })
    }

    pub fn from_inequalities(ineqs: &[Vector], eqs: &[Vector], n: usize) -> Result<Cone> {
        let v = double_description(ineqs, eqs, n)?;
        let mut gens = v.rays.clone();
        for l in &v.lineality {
            gens.push(l.clone());
            gens.push(l.iter().map(|x| -x).collect());
        }
        Cone::from_generators(&gens, n)
    }

    pub fn contains(&self, x: &[Int]) -> Result<bool> {
        for e in &self.equations {
            if arith::dot(e, x)? != 0 {
                return Ok(false);
            }
        }
        for f in &self.facets {
            if arith::dot(f, x)? < 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether `x` lies in the relative interior.
    pub fn contains_relint(&self, x: &[Int]) -> Result<bool> {
        for e in &self.equations {
            if arith::dot(e, x)? != 0 {
                return Ok(false);
            }
        }
        for f in &self.facets {
            if arith::dot(f, x)? <= 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether `x` lies in the lineality space.
    pub fn in_lineality(&self, x: &[Int]) -> Result<bool> {
        for e in &self.equations {
            if arith::dot(e, x)? != 0 {
                return Ok(false);
            }
        }
        for f in &self.facets {
            if arith::dot(f, x)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.ambient - self.equations.len()
    }

    /// A functional strictly positive on every nonzero point of a pointed cone.
    pub fn positive_functional(&self) -> Result<Vector> {
        let mut w = vec![0; self.ambient];
        for f in &self.facets {
            w = arith::vec_add(&w, f)?;
        }
        Ok(w)
    }
}

/// Pulling triangulation of the pointed cone spanned by `rays` (its extreme rays).
pub fn triangulate(rays: &[Vector], n: usize) -> Result<Vec<Vec<Vector>>> {
    let d = normal_form::rank(rays, n)?;
    if rays.len() == d {
        return Ok(vec![rays.to_vec()]);
    }
    let apex = &rays[0];
    let cone = Cone::from_generators(rays, n)?;
    let mut out = Vec::new();
    for f in &cone.facets {
        if arith::dot(f, apex)? <= 0 {
            continue;
        }
        let face: Vec<Vector> = rays.iter().filter(|r| arith::dot(f, r).map(|v| v == 0).unwrap_or(false)).cloned().collect();
        for simplex in triangulate(&face, n)? {
            let mut s = vec![apex.clone()];
            s.extend(simplex);
            out.push(s);
        }
    }
    Ok(out)
}

/// Nonzero lattice points of the half-open parallelepiped spanned by the
/// linearly independent vectors `simplex`, which must span `Q^m`.
pub fn parallelepiped_points(simplex: &[Vector], m: usize) -> Result<Vec<Vector>> {
    let v = IntMatrix::from_rows(simplex, m)?;
    let snf = normal_form::smith_normal_form(&v)?;
    let d: Vec<Int> = (0..m).map(|i| snf.diagonal.get(i, i)).collect();
    if d.contains(&0) {
        return Err(Error::Internal("degenerate simplex".into()));
    }
    let volume = d.iter().try_fold(1 as Int, |acc, x| arith::mul(acc, *x))?;
    if volume > MAX_PARALLELEPIPED_POINTS {
        return Err(Error::Capacity(format!("simplicial cone of index {volume}")));
    }
    let dm = *d.last().unwrap_or(&1);
    let mut out = Vec::new();
    let mut y = vec![0 as Int; m];
    loop {
        if !arith::is_zero(&y) {
            let mut lam = vec![0 as Int; m];
            for i in 0..m {
                if y[i] == 0 {
                    continue;
                }
                let k = arith::mul(y[i], dm / d[i])?;
                lam = arith::vec_add(&lam, &arith::vec_scale(snf.left.row(i), k)?)?;
            }
            let mu: Vector = lam.iter().map(|c| c.rem_euclid(dm)).collect();
            let p = v.apply_left(&mu)?;
            let point: Vector = p.iter().map(|c| c / dm).collect();
            debug_assert!(p.iter().all(|c| c % dm == 0));
            out.push(point);
        }
        // odometer over the finite group
        let mut i = 0;
        loop {
            if i == m {
                return Ok(out);
            }
            y[i] += 1;
            if y[i] < d[i] {
                break;
            }
            y[i] = 0;
            i += 1;
        }
    }
}

fn pointed_hilbert_basis(gens: &[Vector], m: usize) -> Result<Vec<Vector>> {
    if m == 0 {
        return Ok(Vec::new());
    }
    let cone = Cone::from_generators(gens, m)?;
    debug_assert!(cone.is_pointed() && cone.equations.is_empty());
    let mut candidates: BTreeSet<Vector> = cone.rays.iter().cloned().collect();
    let mut total: Int = 0;
    for simplex in triangulate(&cone.rays, m)? {
        let det = normal_form::determinant(&IntMatrix::from_rows(&simplex, m)?)?.abs();
        total = arith::add(total, det)?;
        if total > MAX_PARALLELEPIPED_POINTS {
            return Err(Error::Capacity(format!("more than {MAX_PARALLELEPIPED_POINTS} candidate lattice points")));
        }
        candidates.extend(parallelepiped_points(&simplex, m)?);
    }
    let w = cone.positive_functional()?;
    let mut ordered: Vec<(Int, Vector)> = candidates.into_iter().map(|c| Ok((arith::dot(&w, &c)?, c))).collect::<Result<_>>()?;
    ordered.sort();
    let mut basis: Vec<(Int, Vector)> = Vec::new();
    for (deg, x) in ordered {
        let mut reducible = false;
        for (hdeg, h) in &basis {
            if *hdeg < deg && cone.contains(&arith::vec_sub(&x, h)?)? {
                reducible = true;
                break;
            }
        }
        if !reducible {
            basis.push((deg, x));
        }
    }
    Ok(basis.into_iter().map(|(_, x)| x).collect())
}

/// Minimal generating set of `cone(gens) ∩ Z^n`, lexicographically sorted.
///
/// The lattice is the full ambient lattice intersected with the linear span
/// of the generators. When the cone contains a line, the result is a lattice
/// basis of the lineality space with both signs, followed by lifts of the
/// Hilbert basis of the pointed quotient along a fixed integer section.
pub fn hilbert_basis(gens: &[Vector], n: usize) -> Result<Vec<Vector>> {
    let gens: Vec<Vector> = gens.iter().filter(|g| !arith::is_zero(g)).cloned().collect();
    for g in &gens {
        if g.len() != n {
            return Err(Error::dim("generator of wrong length"));
        }
    }
    if gens.is_empty() {
        return Ok(Vec::new());
    }
    let lattice = normal_form::saturate_lattice(&gens, n)?;
    let k = lattice.len();
    if k > MAX_RANK {
        return Err(Error::Capacity(format!("cone of rank {k} exceeds the limit of {MAX_RANK}")));
    }
    let coords: Vec<Vector> = gens
        .iter()
        .map(|g| normal_form::solve_in_lattice(&lattice, g)?.ok_or_else(|| Error::Internal("generator outside its span".into())))
        .collect::<Result<_>>()?;
    let cone = Cone::from_generators(&coords, k)?;
    let mut result: Vec<Vector> = Vec::new();
    if cone.is_pointed() {
        result = pointed_hilbert_basis(&coords, k)?;
    } else {
        let q = normal_form::quotient_map(&cone.lineality, k)?;
        let r = q.projection.nrows();
        let projected: Vec<Vector> =
            coords.iter().map(|c| q.projection.apply(c)).collect::<Result<Vec<_>>>()?.into_iter().filter(|v| !arith::is_zero(v)).collect();
        for l in &cone.lineality {
            result.push(l.clone());
            result.push(l.iter().map(|x| -x).collect());
        }
        for h in pointed_hilbert_basis(&projected, r)? {
            result.push(q.section.apply(&h)?);
        }
    }
    let basis = IntMatrix::from_rows(&lattice, n)?;
    let mut out: Vec<Vector> = result.iter().map(|c| basis.apply_left(c)).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}
