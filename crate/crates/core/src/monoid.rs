//! Affine monoids embedded in `Z^n` and homomorphisms between them.

use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;

use crate::arith::{self, Int, IntMatrix, Vector};
use crate::cone::{self, Cone};
use crate::error::{Error, Result};
use crate::normal_form;

/// Largest number of search states visited by [`ToricMonoid::generated_contains`].
const MEMBERSHIP_BUDGET: usize = 200_000;

/// A finitely generated submonoid of `Z^ambient`.
///
/// Generators are stored sorted and without zeros. The group completion, cone
/// and Hilbert basis are computed on first use.
#[derive(Clone, Debug)]
pub struct ToricMonoid {
    ambient: usize,
    generators: Vec<Vector>,
    group: OnceLock<Vec<Vector>>,
    cone: OnceLock<Cone>,
    hilbert: OnceLock<Vec<Vector>>,
}

impl PartialEq for ToricMonoid {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.generators == other.generators
    }
}

impl Eq for ToricMonoid {}

impl ToricMonoid {
    pub fn new(ambient: usize, generators: &[Vector]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for g in generators {
            if g.len() != ambient {
                return Err(Error::dim(format!("generator {g:?} in ambient rank {ambient}")));
            }
            if !arith::is_zero(g) {
                set.insert(g.clone());
            }
        }
        Ok(ToricMonoid {
            ambient,
            generators: set.into_iter().collect(),
            group: OnceLock::new(),
            cone: OnceLock::new(),
            hilbert: OnceLock::new(),
        })
    }

    /// `N^n` with the unit vectors as generators.
    pub fn free(n: usize) -> Self {
        let gens: Vec<Vector> = (0..n).map(|i| arith::unit_vector(n, i)).collect();
        ToricMonoid::new(n, &gens).expect("unit vectors")
    }

    pub fn trivial(n: usize) -> Self {
        ToricMonoid::new(n, &[]).expect("empty generator list")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    /// Hermite basis of the group completion.
    pub fn group_basis(&self) -> Result<&[Vector]> {
        if let Some(g) = self.group.get() {
            return Ok(g);
        }
        let g = normal_form::canonical_basis(&self.generators, self.ambient)?;
        Ok(self.group.get_or_init(|| g))
    }

    pub fn group_rank(&self) -> Result<usize> {
        Ok(self.group_basis()?.len())
    }

    /// Whether the group completion is all of `Z^ambient`.
    pub fn is_full_rank(&self) -> Result<bool> {
        let g = self.group_basis()?;
        Ok(g.len() == self.ambient && normal_form::determinant(&IntMatrix::from_rows(g, self.ambient)?)?.abs() == 1)
    }

    pub fn cone(&self) -> Result<&Cone> {
        if let Some(c) = self.cone.get() {
            return Ok(c);
        }
        let c = Cone::from_generators(&self.generators, self.ambient)?;
        Ok(self.cone.get_or_init(|| c))
    }

    /// Hilbert basis of the saturation of the monoid in its own group.
    pub fn hilbert_basis(&self) -> Result<&[Vector]> {
        if let Some(h) = self.hilbert.get() {
            return Ok(h);
        }
        let basis = self.group_basis()?.to_vec();
        let h = if basis.is_empty() {
            Vec::new()
        } else {
            let coords: Vec<Vector> = self
                .generators
                .iter()
                .map(|g| normal_form::solve_in_lattice(&basis, g)?.ok_or_else(|| Error::Internal("generator outside its group".into())))
                .collect::<Result<_>>()?;
            let b = IntMatrix::from_rows(&basis, self.ambient)?;
            let mut out: Vec<Vector> = cone::hilbert_basis(&coords, basis.len())?.iter().map(|c| b.apply_left(c)).collect::<Result<_>>()?;
            out.sort();
            out
        };
        Ok(self.hilbert.get_or_init(|| h))
    }

    /// `{v in p^gp : k v in p for some k >= 1}`, presented by its Hilbert basis.
    pub fn saturate(&self) -> Result<ToricMonoid> {
        ToricMonoid::new(self.ambient, self.hilbert_basis()?)
    }

    pub fn is_saturated(&self) -> Result<bool> {
        for h in self.hilbert_basis()? {
            if !self.generators.contains(h) && !self.generated_contains(h)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The only invertible element is zero.
    pub fn is_sharp(&self) -> Result<bool> {
        Ok(self.cone()?.is_pointed())
    }

    /// Membership in the saturation: `x` lies in the group and in the cone.
    pub fn contains(&self, x: &[Int]) -> Result<bool> {
        if x.len() != self.ambient {
            return Err(Error::dim("vector of wrong length"));
        }
        if arith::is_zero(x) {
            return Ok(true);
        }
        Ok(self.cone()?.contains(x)? && normal_form::in_lattice(self.group_basis()?, x)?)
    }

    /// Whether `x` lies in the relative interior of the cone.
    pub fn contains_interior(&self, x: &[Int]) -> Result<bool> {
        Ok(self.cone()?.contains_relint(x)? && normal_form::in_lattice(self.group_basis()?, x)?)
    }

    /// Whether `x` is invertible (in the saturation).
    pub fn is_unit(&self, x: &[Int]) -> Result<bool> {
        if arith::is_zero(x) {
            return Ok(true);
        }
        Ok(self.cone()?.in_lineality(x)? && normal_form::in_lattice(self.group_basis()?, x)?)
    }

    /// Exact membership in the monoid generated by the stored generators.
    /// Requires a sharp monoid so that the search is finite.
    pub fn generated_contains(&self, x: &[Int]) -> Result<bool> {
        if arith::is_zero(x) {
            return Ok(true);
        }
        if !self.contains(x)? {
            return Ok(false);
        }
        if !self.is_sharp()? {
            return Err(Error::invalid("generated membership needs a sharp monoid"));
        }
        let w = self.cone()?.positive_functional()?;
        let degs: Vec<Int> = self.generators.iter().map(|g| arith::dot(&w, g)).collect::<Result<_>>()?;
        let mut failed: HashSet<(Vector, usize)> = HashSet::new();
        let mut visits = 0usize;
        fn search(
            x: &[Int],
            from: usize,
            gens: &[Vector],
            degs: &[Int],
            w: &[Int],
            failed: &mut HashSet<(Vector, usize)>,
            visits: &mut usize,
        ) -> Result<bool> {
            if arith::is_zero(x) {
                return Ok(true);
            }
            let d = arith::dot(w, x)?;
            if d <= 0 || failed.contains(&(x.to_vec(), from)) {
                return Ok(false);
            }
            *visits += 1;
            if *visits > MEMBERSHIP_BUDGET {
                return Err(Error::Capacity("monoid membership search".into()));
            }
            for i in from..gens.len() {
                if degs[i] <= d {
                    let rest = arith::vec_sub(x, &gens[i])?;
                    if search(&rest, i, gens, degs, w, failed, visits)? {
                        return Ok(true);
                    }
                }
            }
            failed.insert((x.to_vec(), from));
            Ok(false)
        }
        search(x, 0, &self.generators, &degs, &w, &mut failed, &mut visits)
    }

    /// The dual monoid `{f in Z^ambient : f . g >= 0 for all generators}`.
    pub fn dual(&self) -> Result<ToricMonoid> {
        let n = self.ambient;
        let v = cone::double_description(&self.generators, &[], n)?;
        let mut gens = v.rays.clone();
        for l in &v.lineality {
            gens.push(l.clone());
            gens.push(l.iter().map(|x| -x).collect());
        }
        ToricMonoid::new(n, &cone::hilbert_basis(&gens, n)?)
    }

    /// All faces of the saturation, each presented by the Hilbert basis
    /// elements it contains. Ordered by rank, then lexicographically.
    pub fn faces(&self) -> Result<Vec<ToricMonoid>> {
        let hb = self.hilbert_basis()?.to_vec();
        let facets = self.cone()?.facets.clone();
        let full: Vec<usize> = (0..hb.len()).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        seen.insert(full.clone());
        let mut queue = vec![full];
        while let Some(face) = queue.pop() {
            for f in &facets {
                let sub: Vec<usize> = face.iter().copied().filter(|&i| arith::dot(f, &hb[i]).map(|v| v == 0).unwrap_or(false)).collect();
                if seen.insert(sub.clone()) {
                    queue.push(sub);
                }
            }
        }
        let mut faces: Vec<(usize, Vec<Vector>)> = Vec::new();
        for s in seen {
            let gens: Vec<Vector> = s.iter().map(|&i| hb[i].clone()).collect();
            let r = normal_form::rank(&gens, self.ambient)?;
            faces.push((r, gens));
        }
        faces.sort();
        faces.into_iter().map(|(_, g)| ToricMonoid::new(self.ambient, &g)).collect()
    }

    /// The smallest face of the saturation containing every vector of `xs`.
    pub fn face_containing(&self, xs: &[Vector]) -> Result<ToricMonoid> {
        for x in xs {
            if !self.contains(x)? {
                return Err(Error::NotAFace(format!("{x:?} is not in the monoid")));
            }
        }
        let hb = self.hilbert_basis()?;
        let cone = self.cone()?;
        let mut gens = Vec::new();
        'outer: for h in hb {
            for f in &cone.facets {
                let vanishes = xs.iter().map(|x| arith::dot(f, x)).collect::<Result<Vec<_>>>()?.iter().all(|v| *v == 0);
                if vanishes && arith::dot(f, h)? != 0 {
                    continue 'outer;
                }
            }
            gens.push(h.clone());
        }
        ToricMonoid::new(self.ambient, &gens)
    }

    /// Whether the monoid generated by `xs` has the same cone as a face.
    pub fn is_face(&self, xs: &[Vector]) -> Result<bool> {
        let face = match self.face_containing(xs) {
            Ok(f) => f,
            Err(Error::NotAFace(_)) => return Ok(false),
            Err(e) => return Err(e),
        };
        let c = Cone::from_generators(xs, self.ambient)?;
        for g in face.generators() {
            if !c.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A homomorphism given by an integer matrix of shape
/// `target.ambient x source.ambient`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidHom {
    pub source: ToricMonoid,
    pub target: ToricMonoid,
    pub matrix: IntMatrix,
}

impl MonoidHom {
    pub fn new(source: ToricMonoid, target: ToricMonoid, matrix: IntMatrix) -> Result<Self> {
        if matrix.nrows() != target.ambient() || matrix.ncols() != source.ambient() {
            return Err(Error::dim(format!(
                "hom matrix is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                target.ambient(),
                source.ambient()
            )));
        }
        for g in source.generators() {
            let img = matrix.apply(g)?;
            if !target.contains(&img)? {
                return Err(Error::invalid(format!("generator {g:?} maps to {img:?}, outside the target")));
            }
        }
        Ok(MonoidHom { source, target, matrix })
    }

    pub fn identity(m: &ToricMonoid) -> Self {
        MonoidHom { source: m.clone(), target: m.clone(), matrix: IntMatrix::identity(m.ambient()) }
    }

    pub fn apply(&self, x: &[Int]) -> Result<Vector> {
        self.matrix.apply(x)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &MonoidHom) -> Result<MonoidHom> {
        if first.target.ambient() != self.source.ambient() {
            return Err(Error::dim("composition of incompatible homs"));
        }
        Ok(MonoidHom { source: first.source.clone(), target: self.target.clone(), matrix: self.matrix.mul(&first.matrix)? })
    }

    /// Local means the preimage of the units is exactly the units.
    pub fn is_local(&self) -> Result<bool> {
        Ok(self.non_local_witness()?.is_none())
    }

    /// A source generator that is not a unit but maps to a unit.
    pub fn non_local_witness(&self) -> Result<Option<Vector>> {
        for g in self.source.generators() {
            let img = self.apply(g)?;
            if self.target.is_unit(&img)? && !self.source.is_unit(g)? {
                return Ok(Some(g.clone()));
            }
        }
        Ok(None)
    }
}

/// A subgroup of `Z^ambient` given by spanning rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub ambient: usize,
    pub basis: Vec<Vector>,
}

impl Subgroup {
    pub fn new(ambient: usize, rows: &[Vector]) -> Result<Self> {
        Ok(Subgroup { ambient, basis: normal_form::canonical_basis(rows, ambient)? })
    }

    pub fn saturate(&self) -> Result<Subgroup> {
        Ok(Subgroup { ambient: self.ambient, basis: normal_form::saturate_lattice(&self.basis, self.ambient)? })
    }

    /// Invariant factors greater than one of `Z^ambient / self`.
    pub fn torsion(&self) -> Result<Vec<Int>> {
        if self.basis.is_empty() {
            return Ok(Vec::new());
        }
        let s = normal_form::smith_normal_form(&IntMatrix::from_rows(&self.basis, self.ambient)?)?;
        Ok(s.invariants().into_iter().map(|d| d.abs()).filter(|d| *d > 1).collect())
    }

    pub fn is_saturated(&self) -> Result<bool> {
        Ok(self.torsion()?.is_empty())
    }

    pub fn contains(&self, x: &[Int]) -> Result<bool> {
        normal_form::in_lattice(&self.basis, x)
    }
}

/// Result of dividing a monoid by a subgroup and saturating.
#[derive(Clone, Debug)]
pub struct Quotient {
    /// The saturated quotient monoid.
    pub monoid: ToricMonoid,
    /// The image of the generators before saturation.
    pub image: ToricMonoid,
    /// Projection `p -> monoid`.
    pub projection: MonoidHom,
    /// An integer section of the projection on the lattice level.
    pub section: IntMatrix,
    /// The saturated subgroup actually divided out.
    pub relations: Subgroup,
    /// Invariant factors of the torsion killed by saturating the subgroup.
    pub torsion: Vec<Int>,
}

/// `[p / r]^sat`, computed in the ambient lattice of `p`.
pub fn quotient_by_subgroup_saturated(p: &ToricMonoid, r: &Subgroup) -> Result<Quotient> {
    let n = p.ambient();
    if r.ambient != n {
        return Err(Error::dim("subgroup in a different lattice"));
    }
    let q = normal_form::quotient_map(&r.basis, n)?;
    let k = q.projection.nrows();
    let images: Vec<Vector> = p.generators().iter().map(|g| q.projection.apply(g)).collect::<Result<_>>()?;
    let image = ToricMonoid::new(k, &images)?;
    let monoid = image.saturate()?;
    let projection = MonoidHom { source: p.clone(), target: monoid.clone(), matrix: q.projection.clone() };
    Ok(Quotient { monoid, image, projection, section: q.section, relations: r.saturate()?, torsion: r.torsion()? })
}

/// The node stalk `{(m1, m2) in Q x Q : m1 - m2 in Z rho}` with its two
/// branch projections.
#[derive(Clone, Debug)]
pub struct NodeMonoid {
    pub monoid: ToricMonoid,
    pub branch1: MonoidHom,
    pub branch2: MonoidHom,
}

pub fn node_monoid(q: &ToricMonoid, rho: &[Int]) -> Result<NodeMonoid> {
    let n = q.ambient();
    if arith::is_zero(rho) {
        return Err(Error::invalid("rho = 0: the node is not pre-stable"));
    }
    if !q.contains(rho)? {
        return Err(Error::invalid(format!("rho {rho:?} is not in the monoid")));
    }
    let mut gens = Vec::new();
    for m in q.hilbert_basis()? {
        let mut v = m.clone();
        v.extend_from_slice(m);
        gens.push(v);
    }
    let zero = vec![0; n];
    gens.push([rho, &zero[..]].concat());
    gens.push([&zero[..], rho].concat());
    let monoid = ToricMonoid::new(2 * n, &gens)?.saturate()?;
    let target = q.saturate()?;
    let mut p1 = IntMatrix::zeros(n, 2 * n);
    let mut p2 = IntMatrix::zeros(n, 2 * n);
    for i in 0..n {
        p1.set(i, i, 1);
        p2.set(i, n + i, 1);
    }
    Ok(NodeMonoid {
        branch1: MonoidHom { source: monoid.clone(), target: target.clone(), matrix: p1 },
        branch2: MonoidHom { source: monoid.clone(), target, matrix: p2 },
        monoid,
    })
}

/// Localize the saturation of `p` at the face spanned by `face` and divide
/// out the units. The returned hom has preimage of zero equal to the face.
pub fn localize_and_sharpen(p: &ToricMonoid, face: &[Vector]) -> Result<(ToricMonoid, MonoidHom)> {
    if !p.is_face(face)? {
        return Err(Error::NotAFace(format!("{face:?} does not span a face")));
    }
    let sat = p.saturate()?;
    let r = Subgroup::new(p.ambient(), face)?;
    let q = quotient_by_subgroup_saturated(&sat, &r)?;
    Ok((q.monoid, q.projection))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: usize, gens: &[&[Int]]) -> ToricMonoid {
        ToricMonoid::new(n, &gens.iter().map(|g| g.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn quadric() -> ToricMonoid {
        m(3, &[&[1, 0, 0], &[0, 1, 0], &[-1, 0, 1], &[0, -1, 1]])
    }

    #[test]
    fn saturation_examples() {
        let p = m(2, &[&[1, -6], &[1, 0], &[0, 3], &[0, 2]]);
        assert!(!p.is_saturated().unwrap());
        assert!(p.saturate().unwrap().generated_contains(&[0, 1]).unwrap());
        assert!(!p.generated_contains(&[0, 1]).unwrap());
        assert_eq!(ToricMonoid::free(2).saturate().unwrap(), ToricMonoid::free(2));
        assert_eq!(m(1, &[&[2], &[3]]).saturate().unwrap(), ToricMonoid::free(1));
        let s2 = m(2, &[&[2, 0], &[0, 2], &[1, 1]]);
        assert_eq!(s2.saturate().unwrap(), s2);
    }

    #[test]
    fn duals() {
        assert_eq!(ToricMonoid::free(2).dual().unwrap(), ToricMonoid::free(2));
        let s2 = m(2, &[&[2, 0], &[0, 2], &[1, 1]]);
        assert_eq!(s2.dual().unwrap().generators(), &[vec![0, 1], vec![1, 0]]);
        let d = quadric().dual().unwrap();
        assert_eq!(d.generators().len(), 4);
        assert_eq!(d.faces().unwrap().len(), 10);
    }

    #[test]
    fn face_counts() {
        assert_eq!(ToricMonoid::free(1).faces().unwrap().len(), 2);
        assert_eq!(ToricMonoid::free(2).faces().unwrap().len(), 4);
        assert_eq!(quadric().faces().unwrap().len(), 10);
    }

    #[test]
    fn locality() {
        let n1 = ToricMonoid::free(1);
        assert!(MonoidHom::identity(&n1).is_local().unwrap());
        let h = MonoidHom::new(ToricMonoid::free(2), n1, IntMatrix::from_rows(&[vec![1, 0]], 2).unwrap()).unwrap();
        assert_eq!(h.non_local_witness().unwrap(), Some(vec![0, 1]));
    }

    #[test]
    fn quotients() {
        let p = ToricMonoid::free(4);
        let r = Subgroup::new(4, &[vec![1, -1, 0, 0], vec![1, -1, 0, 1]]).unwrap();
        let q = quotient_by_subgroup_saturated(&p, &r).unwrap();
        assert!(arith::is_zero(&q.projection.apply(&[0, 0, 0, 1]).unwrap()));
        let r = Subgroup::new(4, &[vec![1, 0, 1, 0], vec![0, -1, 1, 0], vec![1, -1, 0, 2]]).unwrap();
        assert!(!r.contains(&[0, 0, 1, -1]).unwrap());
        let q = quotient_by_subgroup_saturated(&p, &r).unwrap();
        assert!(q.relations.contains(&[0, 0, 1, -1]).unwrap());
        assert_eq!(q.torsion, vec![2]);
        let q = quotient_by_subgroup_saturated(&p, &Subgroup::new(4, &[]).unwrap()).unwrap();
        assert_eq!(q.monoid, p);
    }

    #[test]
    fn node_monoids() {
        let n1 = ToricMonoid::free(1);
        let s3 = node_monoid(&n1, &[3]).unwrap();
        assert_eq!(s3.monoid.generators(), &[vec![0, 3], vec![1, 1], vec![3, 0]]);
        assert_eq!(s3.branch1.apply(&[3, 0]).unwrap(), vec![3]);
        assert_eq!(s3.branch2.apply(&[3, 0]).unwrap(), vec![0]);
        assert_eq!(node_monoid(&n1, &[1]).unwrap().monoid.generators(), &[vec![0, 1], vec![1, 0]]);
        assert!(node_monoid(&n1, &[0]).is_err());
    }

    #[test]
    fn localization() {
        let n2 = ToricMonoid::free(2);
        let (q, h) = localize_and_sharpen(&n2, &[]).unwrap();
        assert_eq!(q.generators().len(), 2);
        assert!(h.is_local().unwrap());
        let (q, h) = localize_and_sharpen(&n2, &[vec![1, 0]]).unwrap();
        assert_eq!(q, ToricMonoid::free(1));
        assert_eq!(h.apply(&[0, 1]).unwrap(), vec![1]);
        let s2 = m(2, &[&[2, 0], &[0, 2], &[1, 1]]);
        let (q, _) = localize_and_sharpen(&s2, &[vec![2, 0]]).unwrap();
        assert_eq!(q, ToricMonoid::free(1));
        assert!(matches!(localize_and_sharpen(&n2, &[vec![1, 1]]), Err(Error::NotAFace(_))));
    }
}
