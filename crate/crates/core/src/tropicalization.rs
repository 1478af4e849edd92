//! Cone complexes glued from the stalks of a log space.

use std::collections::BTreeMap;

use crate::arith::{self, Int, IntMatrix, Vector};
use crate::error::{Error, Result};
use crate::ghost::{self, GhostCurve, MapType, Point};
use crate::monoid::{MonoidHom, ToricMonoid};
use crate::normal_form::{self, LatticeSolver};
use crate::tropical::TropicalData;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonPoint {
    pub name: String,
    pub stalk: ToricMonoid,
}

/// `from` is the special point, `to` the generic one and `hom: M̄_from -> M̄_to`
/// the generization map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Specialization {
    pub from: usize,
    pub to: usize,
    pub hom: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogSpaceSkeleton {
    pub points: Vec<SkeletonPoint>,
    pub specializations: Vec<Specialization>,
}

impl LogSpaceSkeleton {
    pub fn validate(&self) -> Result<()> {
        for p in &self.points {
            if let Some(msg) = ghost::check_stalk(&p.stalk)? {
                return Err(Error::invalid(format!("stalk at {}: {msg}", p.name)));
            }
        }
        for s in &self.specializations {
            if s.from >= self.points.len() || s.to >= self.points.len() {
                return Err(Error::invalid("specialization refers to an unknown point"));
            }
            if s.from == s.to {
                return Err(Error::invalid(format!("{} specializes to itself", self.points[s.from].name)));
            }
            let (a, b) = (&self.points[s.from], &self.points[s.to]);
            if let Some(msg) = ghost::check_face_quotient(&a.stalk, &b.stalk, &s.hom)? {
                return Err(Error::NotAFace(format!("generization {} -> {}: {msg}", a.name, b.name)));
            }
        }
        // the specialization relation must be acyclic
        let n = self.points.len();
        let mut state = vec![0u8; n];
        fn visit(v: usize, sk: &LogSpaceSkeleton, state: &mut [u8]) -> bool {
            state[v] = 1;
            for s in sk.specializations.iter().filter(|s| s.from == v) {
                if state[s.to] == 1 || (state[s.to] == 0 && !visit(s.to, sk, state)) {
                    return false;
                }
            }
            state[v] = 2;
            true
        }
        for v in 0..n {
            if state[v] == 0 && !visit(v, self, &mut state) {
                return Err(Error::invalid("specialization relation has a cycle"));
            }
        }
        Ok(())
    }

    /// Composites `M̄_x -> M̄_y` along every chain of specializations from
    /// `x` to `y`; the identity when `x == y`.
    pub fn generizations(&self, x: usize, y: usize) -> Result<Vec<IntMatrix>> {
        if x == y {
            return Ok(vec![IntMatrix::identity(self.points[x].stalk.ambient())]);
        }
        let mut out = Vec::new();
        for s in self.specializations.iter().filter(|s| s.from == x) {
            for rest in self.generizations(s.to, y)? {
                let m = rest.mul(&s.hom)?;
                if !out.contains(&m) {
                    out.push(m);
                }
            }
        }
        Ok(out)
    }

    /// Whether the Hasse diagram of the specialization relation is a forest.
    pub fn is_forest(&self) -> bool {
        let n = self.points.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for s in &self.specializations {
            let (a, b) = (root(&mut parent, s.from), root(&mut parent, s.to));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }
}

/// A face of `σ_x`, recorded by the face `G` of `M̄_x` it is orthogonal to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceNode {
    pub point: usize,
    /// Hilbert basis of `G`, sorted.
    pub face: Vec<Vector>,
    /// Basis of `G^⊥`, the lattice of the cone face.
    pub lattice: Vec<Vector>,
}

/// Identification of face `from` with face `to` by the dual of a generization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceMap {
    pub specialization: usize,
    pub from: usize,
    pub to: usize,
    /// Lattice coordinates of `from` to lattice coordinates of `to`.
    pub matrix: IntMatrix,
}

/// A face glued to itself by a non-identity map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyWitness {
    pub node: usize,
    pub point: String,
    pub face: Vec<Vector>,
    /// The self-map in the lattice coordinates of the face.
    pub map: IntMatrix,
    /// Specializations whose gluing closes the loop.
    pub via: usize,
}

#[derive(Clone, Debug)]
pub struct ConeComplex {
    pub names: Vec<String>,
    /// `σ_x ∩ (Z^r)^*` for every point.
    pub cones: Vec<ToricMonoid>,
    pub nodes: Vec<FaceNode>,
    pub maps: Vec<FaceMap>,
    /// Representative node of each node's class.
    pub class: Vec<usize>,
    /// Node coordinates to representative coordinates.
    pub to_class: Vec<IntMatrix>,
    pub monodromy: Vec<MonodromyWitness>,
    index: BTreeMap<(usize, Vec<Vector>), usize>,
}

fn face_key(m: &ToricMonoid) -> Vec<Vector> {
    let mut g = m.generators().to_vec();
    g.sort();
    g
}

fn coordinates(solver: &LatticeSolver, x: &[Int]) -> Result<Vector> {
    solver.solve(x)?.ok_or_else(|| Error::Internal(format!("{x:?} is not in the face lattice")))
}

pub fn build_trop(s: &LogSpaceSkeleton) -> Result<ConeComplex> {
    s.validate()?;
    let mut nodes = Vec::new();
    let mut index = BTreeMap::new();
    let mut cones = Vec::new();
    for (x, p) in s.points.iter().enumerate() {
        let r = p.stalk.ambient();
        cones.push(p.stalk.dual()?);
        for f in p.stalk.faces()? {
            let face = face_key(&f);
            let lattice = normal_form::orthogonal_complement(&face, r)?;
            index.insert((x, face.clone()), nodes.len());
            nodes.push(FaceNode { point: x, face, lattice });
        }
    }
    let solvers: Vec<LatticeSolver> =
        nodes.iter().map(|n| LatticeSolver::new(&n.lattice, s.points[n.point].stalk.ambient())).collect::<Result<_>>()?;
    let mut maps = Vec::new();
    for (si, sp) in s.specializations.iter().enumerate() {
        let src = &s.points[sp.from].stalk;
        let dst = &s.points[sp.to].stalk;
        let hb = src.hilbert_basis()?;
        for h_face in dst.faces()? {
            let key = face_key(&h_face);
            let from = index[&(sp.to, key.clone())];
            // χ^{-1}(H) is generated by the Hilbert basis elements landing in H
            let pre: Vec<Vector> =
                hb.iter().filter(|h| sp.hom.apply(h).and_then(|img| h_face.contains(&img)).unwrap_or(false)).cloned().collect();
            let pre_face = src.face_containing(&pre)?;
            let to =
                *index.get(&(sp.from, face_key(&pre_face))).ok_or_else(|| Error::Internal("preimage of a face is not a face".into()))?;
            let mut cols = Vec::new();
            for b in &nodes[from].lattice {
                cols.push(coordinates(&solvers[to], &sp.hom.apply_left(b)?)?);
            }
            let d_to = nodes[to].lattice.len();
            let matrix = if cols.is_empty() { IntMatrix::zeros(d_to, 0) } else { IntMatrix::from_cols(&cols, d_to)? };
            if matrix.nrows() != matrix.ncols() || normal_form::determinant(&matrix)?.abs() != 1 {
                return Err(Error::NotAFace(format!(
                    "dual of {} -> {} is not an isomorphism onto a face",
                    s.points[sp.from].name, s.points[sp.to].name
                )));
            }
            maps.push(FaceMap { specialization: si, from, to, matrix });
        }
    }
    let n = nodes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut up: Vec<IntMatrix> = nodes.iter().map(|nd| IntMatrix::identity(nd.lattice.len())).collect();
    fn find(i: usize, parent: &[usize], up: &[IntMatrix]) -> Result<(usize, IntMatrix)> {
        let mut m = up[i].clone();
        let mut j = i;
        while parent[j] != j {
            j = parent[j];
            m = up[j].mul(&m)?;
        }
        Ok((j, m))
    }
    let mut monodromy = Vec::new();
    for fm in &maps {
        let (ra, ma) = find(fm.from, &parent, &up)?;
        let (rb, mb) = find(fm.to, &parent, &up)?;
        let link = mb.mul(&fm.matrix)?.mul(&normal_form::unimodular_inverse(&ma)?)?;
        if ra != rb {
            parent[ra] = rb;
            up[ra] = link;
        } else if link != IntMatrix::identity(link.nrows()) {
            monodromy.push(MonodromyWitness {
                node: ra,
                point: s.points[nodes[ra].point].name.clone(),
                face: nodes[ra].face.clone(),
                map: link,
                via: fm.specialization,
            });
        }
    }
    let mut class = Vec::new();
    let mut to_class = Vec::new();
    for i in 0..n {
        let (r, m) = find(i, &parent, &up)?;
        class.push(r);
        to_class.push(m);
    }
    Ok(ConeComplex { names: s.points.iter().map(|p| p.name.clone()).collect(), cones, nodes, maps, class, to_class, monodromy, index })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyReport {
    pub monodromy_free: bool,
    pub witness: Option<MonodromyWitness>,
}

pub fn is_monodromy_free(c: &ConeComplex) -> MonodromyReport {
    MonodromyReport { monodromy_free: c.monodromy.is_empty(), witness: c.monodromy.first().cloned() }
}

/// A point of the complex: the representative face containing it in its
/// relative interior and its coordinates there.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Location {
    pub class: usize,
    pub coords: Vector,
}

impl ConeComplex {
    /// Locate `y ∈ σ_x`.
    pub fn locate(&self, x: usize, y: &[Int]) -> Result<Location> {
        let cone = &self.cones[x];
        if !cone.contains(y)? {
            return Err(Error::invalid(format!("{y:?} is not in the cone of {}", self.names[x])));
        }
        let dual = cone.dual()?;
        let zero: Vec<Vector> =
            dual.hilbert_basis()?.iter().filter(|h| arith::dot(h, y).map(|v| v == 0).unwrap_or(false)).cloned().collect();
        let face = face_key(&ToricMonoid::new(dual.ambient(), &zero)?);
        let node = *self
            .index
            .get(&(x, face))
            .ok_or_else(|| Error::Internal(format!("no face of {} contains {y:?} in its interior", self.names[x])))?;
        let solver = LatticeSolver::new(&self.nodes[node].lattice, y.len())?;
        let local = coordinates(&solver, y)?;
        Ok(Location { class: self.class[node], coords: self.to_class[node].apply(&local)? })
    }

    /// Every face map is injective with image a face: rank and containment.
    pub fn check_face_maps(&self, s: &LogSpaceSkeleton) -> Result<bool> {
        for sp in &s.specializations {
            let t = sp.hom.transpose();
            let src = &self.cones[sp.to];
            if normal_form::rank(&t.to_cols(), t.nrows())? != t.ncols() {
                return Ok(false);
            }
            let images: Vec<Vector> = src.hilbert_basis()?.iter().map(|h| t.apply(h)).collect::<Result<_>>()?;
            for img in &images {
                if !self.cones[sp.from].contains(img)? {
                    return Ok(false);
                }
            }
            if !self.cones[sp.from].is_face(&images)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A morphism of log spaces at the level of skeletons: a point map and, for
/// each source point `x`, the pullback `M̄_{f(x)} -> M̄_x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonMap {
    pub point_map: Vec<usize>,
    pub homs: Vec<IntMatrix>,
}

impl SkeletonMap {
    pub fn identity(s: &LogSpaceSkeleton) -> SkeletonMap {
        SkeletonMap {
            point_map: (0..s.points.len()).collect(),
            homs: s.points.iter().map(|p| IntMatrix::identity(p.stalk.ambient())).collect(),
        }
    }

    /// `second ∘ self`.
    pub fn then(&self, second: &SkeletonMap) -> Result<SkeletonMap> {
        let point_map = self.point_map.iter().map(|&y| second.point_map[y]).collect();
        let homs = self.homs.iter().zip(&self.point_map).map(|(h, &y)| h.mul(&second.homs[y])).collect::<Result<_>>()?;
        Ok(SkeletonMap { point_map, homs })
    }
}

/// Cone-wise linear maps `σ_x -> σ_{f(x)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexMap {
    pub point_map: Vec<usize>,
    pub matrices: Vec<IntMatrix>,
}

impl ComplexMap {
    pub fn apply(&self, x: usize, y: &[Int]) -> Result<(usize, Vector)> {
        Ok((self.point_map[x], self.matrices[x].apply(y)?))
    }

    /// `second ∘ self`.
    pub fn then(&self, second: &ComplexMap) -> Result<ComplexMap> {
        let point_map = self.point_map.iter().map(|&y| second.point_map[y]).collect();
        let matrices = self.matrices.iter().zip(&self.point_map).map(|(m, &y)| second.matrices[y].mul(m)).collect::<Result<_>>()?;
        Ok(ComplexMap { point_map, matrices })
    }
}

/// Check that `h_x: M̄_{f(x)} -> M̄_x` commutes with generization along
/// `x -> x'`. Returns a description of the failure.
fn check_square(
    src: &LogSpaceSkeleton,
    dst: &LogSpaceSkeleton,
    x: usize,
    x2: usize,
    chi: &IntMatrix,
    f: &[usize],
    homs: &[IntMatrix],
) -> Result<Option<String>> {
    let (y, y2) = (f[x], f[x2]);
    let paths = dst.generizations(y, y2)?;
    if paths.is_empty() {
        return Ok(Some(format!(
            "{} does not specialize to {} although {} specializes to {}",
            dst.points[y].name, dst.points[y2].name, src.points[x].name, src.points[x2].name
        )));
    }
    let lhs = chi.mul(&homs[x])?;
    for p in paths {
        if lhs == homs[x2].mul(&p)? {
            return Ok(None);
        }
    }
    Ok(Some(format!("square at {} -> {} does not commute", src.points[x].name, src.points[x2].name)))
}

pub fn trop_functor(map: &SkeletonMap, src: &LogSpaceSkeleton, dst: &LogSpaceSkeleton) -> Result<ComplexMap> {
    if map.point_map.len() != src.points.len() || map.homs.len() != src.points.len() {
        return Err(Error::dim("skeleton map does not cover the source points"));
    }
    for (x, (&y, h)) in map.point_map.iter().zip(&map.homs).enumerate() {
        if y >= dst.points.len() {
            return Err(Error::invalid(format!("{} maps to an unknown point", src.points[x].name)));
        }
        MonoidHom::new(dst.points[y].stalk.clone(), src.points[x].stalk.clone(), h.clone())
            .map_err(|e| Error::invalid(format!("pullback at {}: {e}", src.points[x].name)))?;
    }
    for sp in &src.specializations {
        if let Some(msg) = check_square(src, dst, sp.from, sp.to, &sp.hom, &map.point_map, &map.homs)? {
            return Err(Error::invalid(msg));
        }
    }
    Ok(ComplexMap { point_map: map.point_map.clone(), matrices: map.homs.iter().map(|h| h.transpose()).collect() })
}

/// Where each point of the curve goes: a target point and the pullback
/// `M̄_target -> P_x`.
pub type ImageAssignment = BTreeMap<Point, (usize, IntMatrix)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappedVertex {
    pub name: String,
    pub point: usize,
    pub position: Vector,
    pub location: Location,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappedEdge {
    pub name: String,
    pub point: usize,
    pub ends: [Vector; 2],
    pub direction: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappedLeg {
    pub name: String,
    pub point: usize,
    pub base: Vector,
    pub direction: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappedCurve {
    pub vertices: Vec<MappedVertex>,
    pub edges: Vec<MappedEdge>,
    pub legs: Vec<MappedLeg>,
}

/// The tropical curve of a stable map inside `Trop` of the target.
pub fn trop_of_stable_map(
    g: &GhostCurve,
    t: &MapType,
    d: &TropicalData,
    target: &LogSpaceSkeleton,
    complex: &ConeComplex,
    assignment: &ImageAssignment,
) -> Result<MappedCurve> {
    let get = |p: Point| -> Result<&(usize, IntMatrix)> {
        let (y, h) = assignment.get(&p).ok_or_else(|| Error::invalid(format!("no image for {}", g.point_name(p))))?;
        if *y >= target.points.len() {
            return Err(Error::invalid(format!("{} maps to an unknown point", g.point_name(p))));
        }
        MonoidHom::new(target.points[*y].stalk.clone(), g.stalk(p).clone(), h.clone())
            .map_err(|e| Error::invalid(format!("pullback at {}: {e}", g.point_name(p))))?;
        Ok(assignment.get(&p).unwrap())
    };
    let consistent = |x: Point, eta: Point, chi: &IntMatrix| -> Result<()> {
        let (y, hx) = get(x)?;
        let (y2, he) = get(eta)?;
        let paths = target.generizations(*y, *y2)?;
        let lhs = chi.mul(hx)?;
        for p in &paths {
            if lhs == he.mul(p)? {
                return Ok(());
            }
        }
        Err(Error::invalid(format!("image of {} is not compatible with {}", g.point_name(x), g.point_name(eta))))
    };
    for (i, e) in g.edges.iter().enumerate() {
        for s in 0..2 {
            consistent(Point::Edge(i), Point::Vertex(e.ends[s]), &e.chi[s])?;
        }
    }
    for (i, l) in g.legs.iter().enumerate() {
        consistent(Point::Leg(i), Point::Vertex(l.vertex), &l.chi)?;
    }
    let mut vertices = Vec::new();
    for (i, v) in g.vertices.iter().enumerate() {
        let (y, h) = get(Point::Vertex(i))?;
        let position = h.apply_left(&d.v[i])?;
        let location = complex.locate(*y, &position)?;
        vertices.push(MappedVertex { name: v.name.clone(), point: *y, position, location });
    }
    let mut edges = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        let (y, h) = get(Point::Edge(i))?;
        let a = h.apply_left(&e.chi[0].apply_left(&d.v[e.ends[0]])?)?;
        let b = h.apply_left(&e.chi[1].apply_left(&d.v[e.ends[1]])?)?;
        let direction = h.apply_left(t.u_q[i].known()?)?;
        edges.push(MappedEdge { name: e.name.clone(), point: *y, ends: [a, b], direction });
    }
    let mut legs = Vec::new();
    for (i, l) in g.legs.iter().enumerate() {
        let (y, h) = get(Point::Leg(i))?;
        let base = h.apply_left(&l.chi.apply_left(&d.v[l.vertex])?)?;
        let direction = h.apply_left(&t.u_p[i])?;
        legs.push(MappedLeg { name: l.name.clone(), point: *y, base, direction });
    }
    Ok(MappedCurve { vertices, edges, legs })
}
