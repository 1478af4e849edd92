//! Dual graphs decorated with ghost-sheaf stalks and generization maps.

use std::collections::BTreeMap;
use std::fmt;

use crate::arith::{self, Int, IntMatrix, Vector};
use crate::cone::{self, Cone};
use crate::error::{Error, Result};
use crate::monoid::ToricMonoid;
use crate::normal_form;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub genus: Option<u32>,
    pub stalk: ToricMonoid,
}

/// A node joining `ends[0]` (first branch) and `ends[1]` (second branch).
/// `chi[i]` is the generization `P_q -> P_{ends[i]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub ends: [usize; 2],
    pub stalk: ToricMonoid,
    pub chi: [IntMatrix; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leg {
    pub name: String,
    pub vertex: usize,
    pub stalk: ToricMonoid,
    pub chi: IntMatrix,
}

/// A point of the curve carrying a stalk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Vertex(usize),
    Edge(usize),
    Leg(usize),
}

/// A point of the normalization of one component: its generic point, a
/// marking, or one branch (side 1 or 2) of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpecialPoint {
    Generic,
    Leg(usize),
    EdgeEnd { edge: usize, side: u8 },
}

impl fmt::Display for SpecialPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecialPoint::Generic => write!(f, "generic"),
            SpecialPoint::Leg(i) => write!(f, "leg {i}"),
            SpecialPoint::EdgeEnd { edge, side } => write!(f, "edge {edge} side {side}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhostCurve {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub legs: Vec<Leg>,
}

/// `u_q` for one node; unknown when the node does not come from the generic fibre.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeContact {
    Known(Vector),
    Undetermined,
}

impl NodeContact {
    pub fn known(&self) -> Result<&Vector> {
        match self {
            NodeContact::Known(v) => Ok(v),
            NodeContact::Undetermined => Err(Error::Undetermined("node contact order".into())),
        }
    }
}

/// Degree data `(tau_x)` of one component, keyed by special point. Missing
/// entries are zero.
pub type Tau = BTreeMap<SpecialPoint, Vector>;

/// Contact orders `u_p`, node discrepancies `u_q` (for the stored edge
/// orientation) and per-component degree data.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MapType {
    pub u_p: Vec<Vector>,
    pub u_q: Vec<NodeContact>,
    pub tau: Vec<Tau>,
}

impl MapType {
    pub fn edge_part(&self) -> Result<Vec<Vector>> {
        self.u_q.iter().enumerate().map(|(i, u)| u.known().cloned().map_err(|_| Error::Undetermined(format!("u_q of edge {i}")))).collect()
    }

    /// The type with the orientation of `edge` reversed.
    pub fn reversed(&self, edge: usize) -> MapType {
        let mut t = self.clone();
        if let NodeContact::Known(v) = &t.u_q[edge] {
            t.u_q[edge] = NodeContact::Known(v.iter().map(|x| -x).collect());
        }
        for tau in t.tau.iter_mut() {
            let a = tau.remove(&SpecialPoint::EdgeEnd { edge, side: 1 });
            let b = tau.remove(&SpecialPoint::EdgeEnd { edge, side: 2 });
            if let Some(a) = a {
                tau.insert(SpecialPoint::EdgeEnd { edge, side: 2 }, a);
            }
            if let Some(b) = b {
                tau.insert(SpecialPoint::EdgeEnd { edge, side: 1 }, b);
            }
        }
        t
    }
}

impl GhostCurve {
    pub fn rank(&self, p: Point) -> usize {
        self.stalk(p).ambient()
    }

    pub fn stalk(&self, p: Point) -> &ToricMonoid {
        match p {
            Point::Vertex(i) => &self.vertices[i].stalk,
            Point::Edge(i) => &self.edges[i].stalk,
            Point::Leg(i) => &self.legs[i].stalk,
        }
    }

    pub fn point_name(&self, p: Point) -> String {
        match p {
            Point::Vertex(i) => format!("vertex {}", self.vertices[i].name),
            Point::Edge(i) => format!("edge {}", self.edges[i].name),
            Point::Leg(i) => format!("leg {}", self.legs[i].name),
        }
    }

    pub fn points(&self) -> Vec<Point> {
        let mut v: Vec<Point> = (0..self.vertices.len()).map(Point::Vertex).collect();
        v.extend((0..self.edges.len()).map(Point::Edge));
        v.extend((0..self.legs.len()).map(Point::Leg));
        v
    }

    /// Special points on the normalization of component `v`, in the order
    /// legs, then edge ends by edge index.
    pub fn special_points(&self, v: usize) -> Vec<SpecialPoint> {
        let mut out = Vec::new();
        for (i, l) in self.legs.iter().enumerate() {
            if l.vertex == v {
                out.push(SpecialPoint::Leg(i));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            for side in 0..2 {
                if e.ends[side] == v {
                    out.push(SpecialPoint::EdgeEnd { edge: i, side: side as u8 + 1 });
                }
            }
        }
        out
    }

    /// Stalk and generization to the component for a special point of `v`.
    pub fn special_stalk(&self, v: usize, x: SpecialPoint) -> Result<(&ToricMonoid, IntMatrix)> {
        match x {
            SpecialPoint::Generic => Ok((&self.vertices[v].stalk, IntMatrix::identity(self.vertices[v].stalk.ambient()))),
            SpecialPoint::Leg(i) => {
                let l = self.legs.get(i).ok_or_else(|| Error::invalid(format!("no leg {i}")))?;
                if l.vertex != v {
                    return Err(Error::invalid(format!("leg {i} is not on vertex {v}")));
                }
                Ok((&l.stalk, l.chi.clone()))
            }
            SpecialPoint::EdgeEnd { edge, side } => {
                let e = self.edges.get(edge).ok_or_else(|| Error::invalid(format!("no edge {edge}")))?;
                if !(side == 1 || side == 2) || e.ends[side as usize - 1] != v {
                    return Err(Error::invalid(format!("edge {edge} side {side} is not on vertex {v}")));
                }
                Ok((&e.stalk, e.chi[side as usize - 1].clone()))
            }
        }
    }

    /// First Betti number of the dual graph.
    pub fn cycle_rank(&self) -> usize {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut components = n;
        for e in &self.edges {
            let a = find(&mut parent, e.ends[0]);
            let b = find(&mut parent, e.ends[1]);
            if a != b {
                parent[a] = b;
                components -= 1;
            }
        }
        self.edges.len() + components - n
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                for s in 0..2 {
                    if e.ends[s] == v && !seen[e.ends[1 - s]] {
                        seen[e.ends[1 - s]] = true;
                        stack.push(e.ends[1 - s]);
                    }
                }
            }
        }
        seen.into_iter().all(|b| b)
    }
}

/// One problem found by [`validate_ghost`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub location: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue { location: location.into(), message: message.into() });
    }

    pub fn into_result(self) -> Result<()> {
        match self.issues.first() {
            None => Ok(()),
            Some(i) => Err(Error::invalid(format!("{}: {}", i.location, i.message))),
        }
    }
}

/// Check that a stalk is a full-rank, saturated, sharp monoid.
pub fn check_stalk(m: &ToricMonoid) -> Result<Option<String>> {
    if !m.is_full_rank()? {
        return Ok(Some("stalk does not generate its ambient lattice".into()));
    }
    if !m.is_sharp()? {
        return Ok(Some("stalk is not sharp".into()));
    }
    if !m.is_saturated()? {
        return Ok(Some("stalk is not saturated".into()));
    }
    Ok(None)
}

/// Check that `chi: source -> target` is a localization at a face followed
/// by sharpening. Returns a description of the first failure.
pub fn check_face_quotient(source: &ToricMonoid, target: &ToricMonoid, chi: &IntMatrix) -> Result<Option<String>> {
    if chi.nrows() != target.ambient() || chi.ncols() != source.ambient() {
        return Ok(Some(format!("matrix is {}x{}, expected {}x{}", chi.nrows(), chi.ncols(), target.ambient(), source.ambient())));
    }
    let hb = source.hilbert_basis()?;
    let mut images = Vec::new();
    let mut face = Vec::new();
    for h in hb {
        let img = chi.apply(h)?;
        if !target.contains(&img)? {
            return Ok(Some(format!("{h:?} maps to {img:?}, outside the target stalk")));
        }
        if arith::is_zero(&img) {
            face.push(h.clone());
        }
        images.push(img);
    }
    if !source.is_face(&face)? {
        return Ok(Some("the preimage of zero is not a face".into()));
    }
    let kernel = normal_form::kernel(chi)?;
    let face_span = normal_form::saturate_lattice(&face, source.ambient())?;
    if kernel != face_span {
        return Ok(Some("kernel is larger than the span of the face".into()));
    }
    let image_lattice = normal_form::canonical_basis(&chi.to_cols(), target.ambient())?;
    if image_lattice.len() != target.ambient()
        || normal_form::determinant(&IntMatrix::from_rows(&image_lattice, target.ambient())?)?.abs() != 1
    {
        return Ok(Some("map is not surjective on groups".into()));
    }
    let image_cone = Cone::from_generators(&images, target.ambient())?;
    for t in target.hilbert_basis()? {
        if !image_cone.contains(t)? {
            return Ok(Some(format!("target element {t:?} is not in the image")));
        }
    }
    Ok(None)
}

/// Check the graph structure, stalks and generization maps.
pub fn validate_ghost(g: &GhostCurve) -> Result<ValidationReport> {
    let mut r = ValidationReport::default();
    if g.vertices.is_empty() {
        r.push("graph", "no vertices");
        return Ok(r);
    }
    let nv = g.vertices.len();
    for (i, e) in g.edges.iter().enumerate() {
        if e.ends.iter().any(|&v| v >= nv) {
            r.push(format!("edge {}", e.name), format!("endpoint out of range (edge {i})"));
        }
    }
    for l in &g.legs {
        if l.vertex >= nv {
            r.push(format!("leg {}", l.name), "anchor vertex out of range");
        }
    }
    if !r.is_valid() {
        return Ok(r);
    }
    if !g.is_connected() {
        r.push("graph", "dual graph is not connected");
    }
    for p in g.points() {
        if let Some(msg) = check_stalk(g.stalk(p))? {
            r.push(g.point_name(p), msg);
        }
    }
    if !r.is_valid() {
        return Ok(r);
    }
    for e in &g.edges {
        for s in 0..2 {
            let target = &g.vertices[e.ends[s]].stalk;
            if let Some(msg) = check_face_quotient(&e.stalk, target, &e.chi[s])? {
                r.push(format!("edge {}", e.name), format!("generization chi{}: {msg}", s + 1));
            }
        }
    }
    for l in &g.legs {
        let target = &g.vertices[l.vertex].stalk;
        if let Some(msg) = check_face_quotient(&l.stalk, target, &l.chi)? {
            r.push(format!("leg {}", l.name), format!("generization: {msg}"));
        }
    }
    Ok(r)
}

/// Check that a type fits the graph: lengths, `u_p` in the dual of `P_p`,
/// and degree data keyed by special points of the right component.
pub fn validate_type(g: &GhostCurve, t: &MapType) -> Result<ValidationReport> {
    let mut r = ValidationReport::default();
    if t.u_p.len() != g.legs.len() {
        r.push("type", format!("{} contact orders for {} legs", t.u_p.len(), g.legs.len()));
    }
    if t.u_q.len() != g.edges.len() {
        r.push("type", format!("{} node entries for {} edges", t.u_q.len(), g.edges.len()));
    }
    if !t.tau.is_empty() && t.tau.len() != g.vertices.len() {
        r.push("type", format!("degree data for {} of {} vertices", t.tau.len(), g.vertices.len()));
    }
    if !r.is_valid() {
        return Ok(r);
    }
    for (i, u) in t.u_p.iter().enumerate() {
        let l = &g.legs[i];
        if u.len() != l.stalk.ambient() {
            r.push(format!("leg {}", l.name), "contact order of wrong length");
            continue;
        }
        for h in l.stalk.hilbert_basis()? {
            if arith::dot(u, h)? < 0 {
                r.push(format!("leg {}", l.name), "contact order is negative on the stalk");
                break;
            }
        }
    }
    for (i, u) in t.u_q.iter().enumerate() {
        if let NodeContact::Known(u) = u {
            if u.len() != g.edges[i].stalk.ambient() {
                r.push(format!("edge {}", g.edges[i].name), "node contact of wrong length");
            }
        }
    }
    for (v, tau) in t.tau.iter().enumerate() {
        for (x, val) in tau {
            match g.special_stalk(v, *x) {
                Ok((m, _)) if m.ambient() == val.len() => {}
                Ok(_) => r.push(format!("vertex {}", g.vertices[v].name), format!("degree entry at {x} has wrong length")),
                Err(_) => r.push(format!("vertex {}", g.vertices[v].name), format!("degree entry at {x} is not a special point")),
            }
        }
    }
    Ok(r)
}

/// Global sections `Γ` of the ghost sheaf, in coordinates of the lattice of
/// compatible tuples `Γ(M̄^gp)`.
#[derive(Clone, Debug)]
pub struct GlobalSections {
    /// `Γ` inside `Z^k`, `k` the rank of the group-level sections.
    pub monoid: ToricMonoid,
    /// Basis of the compatible tuples inside `∏ P_x^gp` (rows).
    pub lattice: Vec<Vector>,
    /// Restriction `Z^k -> P_x^gp` for every point, in [`GhostCurve::points`] order.
    pub restrictions: BTreeMap<Point, IntMatrix>,
}

impl GlobalSections {
    pub fn restriction(&self, p: Point) -> &IntMatrix {
        &self.restrictions[&p]
    }

    /// Rank of `Γ(M̄^gp)`.
    pub fn group_rank(&self) -> usize {
        self.lattice.len()
    }
}

pub fn global_sections(g: &GhostCurve) -> Result<GlobalSections> {
    let points = g.points();
    let mut offset = BTreeMap::new();
    let mut n = 0;
    for p in &points {
        offset.insert(*p, n);
        n += g.rank(*p);
    }
    let mut eqs: Vec<Vector> = Vec::new();
    let mut link = |src: Point, dst: Point, chi: &IntMatrix| {
        for i in 0..chi.nrows() {
            let mut row = vec![0; n];
            for j in 0..chi.ncols() {
                row[offset[&src] + j] = chi.get(i, j);
            }
            row[offset[&dst] + i] -= 1;
            eqs.push(row);
        }
    };
    for (i, e) in g.edges.iter().enumerate() {
        for s in 0..2 {
            link(Point::Edge(i), Point::Vertex(e.ends[s]), &e.chi[s]);
        }
    }
    for (i, l) in g.legs.iter().enumerate() {
        link(Point::Leg(i), Point::Vertex(l.vertex), &l.chi);
    }
    let lattice = normal_form::orthogonal_complement(&eqs, n)?;
    let k = lattice.len();
    let basis_t = if k == 0 { IntMatrix::zeros(n, 0) } else { IntMatrix::from_rows(&lattice, n)?.transpose() };
    let mut restrictions = BTreeMap::new();
    let mut ineqs = Vec::new();
    for p in &points {
        let r = g.rank(*p);
        let mut m = IntMatrix::zeros(r, k);
        for i in 0..r {
            for j in 0..k {
                m.set(i, j, basis_t.get(offset[p] + i, j));
            }
        }
        for f in &g.stalk(*p).cone()?.facets {
            ineqs.push(m.transpose().apply(f)?);
        }
        restrictions.insert(*p, m);
    }
    let v = cone::double_description(&ineqs, &[], k)?;
    let mut gens = v.rays.clone();
    for l in &v.lineality {
        gens.push(l.clone());
        gens.push(l.iter().map(|x| -x).collect());
    }
    let monoid = ToricMonoid::new(k, &cone::hilbert_basis(&gens, k)?)?;
    Ok(GlobalSections { monoid, lattice, restrictions })
}

/// Result of a span check: the first point whose stalk is not spanned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanCheck {
    pub holds: bool,
    pub witness: Option<Point>,
}

/// Whether the image of `Γ` spans every stalk rationally.
pub fn check_almost_generated(g: &GhostCurve, s: &GlobalSections) -> Result<SpanCheck> {
    for p in g.points() {
        let res = s.restriction(p);
        let images: Vec<Vector> = s.monoid.generators().iter().map(|h| res.apply(h)).collect::<Result<_>>()?;
        if normal_form::rank(&images, res.nrows())? < res.nrows() {
            return Ok(SpanCheck { holds: false, witness: Some(p) });
        }
    }
    Ok(SpanCheck { holds: true, witness: None })
}

/// Whether the image of `Γ(M̄^gp)` spans every stalk rationally.
pub fn check_quasi_generated(g: &GhostCurve, s: &GlobalSections) -> Result<SpanCheck> {
    for p in g.points() {
        let res = s.restriction(p);
        if normal_form::rank(&res.to_cols(), res.nrows())? < res.nrows() {
            return Ok(SpanCheck { holds: false, witness: Some(p) });
        }
    }
    Ok(SpanCheck { holds: true, witness: None })
}

/// `N_D` for one component: the direct sum of `(P_x^gp)^*` over the generic
/// and special points of its normalization, modulo identifying the images
/// of `(P_η^gp)^*`. Torsion is kept.
#[derive(Clone, Debug)]
pub struct ColimitGroup {
    pub vertex: usize,
    pub points: Vec<SpecialPoint>,
    pub offsets: Vec<usize>,
    pub ranks: Vec<usize>,
    pub dimension: usize,
    /// Hermite basis of the relation lattice.
    pub relations: Vec<Vector>,
    /// Rank of the free part of `N_D`.
    pub rank: usize,
    /// Invariant factors of the torsion part of `N_D`.
    pub torsion: Vec<Int>,
}

impl ColimitGroup {
    fn index(&self, x: SpecialPoint) -> Result<usize> {
        self.points.iter().position(|p| *p == x).ok_or_else(|| Error::invalid(format!("{x} is not a point of this component")))
    }

    /// `ι_x(a)` in the ambient direct sum.
    pub fn embed(&self, x: SpecialPoint, a: &[Int]) -> Result<Vector> {
        let i = self.index(x)?;
        if a.len() != self.ranks[i] {
            return Err(Error::dim(format!("element of length {} at {x}", a.len())));
        }
        let mut v = vec![0; self.dimension];
        v[self.offsets[i]..self.offsets[i] + a.len()].copy_from_slice(a);
        Ok(v)
    }

    pub fn is_zero(&self, v: &[Int]) -> Result<bool> {
        normal_form::in_lattice(&self.relations, v)
    }
}

pub fn colimit_group(g: &GhostCurve, v: usize) -> Result<ColimitGroup> {
    if v >= g.vertices.len() {
        return Err(Error::invalid(format!("no vertex {v}")));
    }
    let mut points = vec![SpecialPoint::Generic];
    points.extend(g.special_points(v));
    let mut offsets = Vec::new();
    let mut ranks = Vec::new();
    let mut chis = Vec::new();
    let mut dimension = 0;
    for x in &points {
        let (m, chi) = g.special_stalk(v, *x)?;
        offsets.push(dimension);
        ranks.push(m.ambient());
        dimension += m.ambient();
        chis.push(chi);
    }
    let r_eta = g.vertices[v].stalk.ambient();
    let mut rels = Vec::new();
    for i in 1..points.len() {
        for a in 0..r_eta {
            let unit = arith::unit_vector(r_eta, a);
            let mut row = vec![0; dimension];
            row[a] = 1;
            let img = chis[i].transpose().apply(&unit)?;
            for (j, c) in img.iter().enumerate() {
                row[offsets[i] + j] -= c;
            }
            rels.push(row);
        }
    }
    let relations = normal_form::canonical_basis(&rels, dimension)?;
    let torsion = if relations.is_empty() {
        Vec::new()
    } else {
        let s = normal_form::smith_normal_form(&IntMatrix::from_rows(&relations, dimension)?)?;
        s.invariants().into_iter().map(|d| d.abs()).filter(|d| *d > 1).collect()
    };
    Ok(ColimitGroup { vertex: v, rank: dimension - relations.len(), points, offsets, ranks, dimension, relations, torsion })
}

/// How one special point of the special curve sits in the generic curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generization {
    /// Marking `leg` of the generic curve, with `chi: P_x -> P_leg`.
    Leg { leg: usize, chi: IntMatrix },
    /// Node `edge` of the generic curve; `reversed` when branch order flips.
    Edge { edge: usize, chi: IntMatrix, reversed: bool },
    /// The node is smoothed in the generic fibre.
    Smoothed,
}

/// The type at a special fibre from the type at a generic fibre, pulling
/// each contact order back along the generization maps.
pub fn induced_type_under_generization(generic: &MapType, legs: &[Generization], edges: &[Generization]) -> Result<MapType> {
    let mut u_p = Vec::new();
    for (i, gz) in legs.iter().enumerate() {
        match gz {
            Generization::Leg { leg, chi } => {
                let u = generic.u_p.get(*leg).ok_or_else(|| Error::invalid(format!("no generic leg {leg}")))?;
                u_p.push(chi.transpose().apply(u)?);
            }
            _ => return Err(Error::invalid(format!("marking {i} must generize to a marking"))),
        }
    }
    let mut u_q = Vec::new();
    for (i, gz) in edges.iter().enumerate() {
        match gz {
            Generization::Edge { edge, chi, reversed } => {
                let u = generic.u_q.get(*edge).ok_or_else(|| Error::invalid(format!("no generic edge {edge}")))?;
                u_q.push(match u {
                    NodeContact::Known(u) => {
                        let mut v = chi.transpose().apply(u)?;
                        if *reversed {
                            v = v.iter().map(|x| -x).collect();
                        }
                        NodeContact::Known(v)
                    }
                    NodeContact::Undetermined => NodeContact::Undetermined,
                });
            }
            Generization::Smoothed => u_q.push(NodeContact::Undetermined),
            Generization::Leg { .. } => return Err(Error::invalid(format!("node {i} cannot generize to a marking"))),
        }
    }
    Ok(MapType { u_p, u_q, tau: Vec::new() })
}
