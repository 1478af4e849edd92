//! The basic monoid of a type and its universal property.

use crate::arith::{self, Int, IntMatrix, Vector};
use crate::cone::{self, Cone};
use crate::error::{Error, Result};
use crate::ghost::{GhostCurve, MapType};
use crate::monoid::{self, MonoidHom, Subgroup, ToricMonoid};
use crate::normal_form;

/// Largest L1 norm searched for a torsion witness.
const TORSION_SEARCH_NORM: Int = 4;
/// Largest number of candidates of one norm examined for a torsion witness.
const TORSION_SEARCH_SIZE: usize = 200_000;

/// One generator `a_q(m)` of the relation subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub edge: usize,
    pub m: Vector,
    pub vector: Vector,
}

/// Coordinates of `∏ P_η^gp × ∏ Z`: one block per vertex, then one
/// coordinate per edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub vertex_offsets: Vec<usize>,
    pub vertex_ranks: Vec<usize>,
    pub edge_offset: usize,
    pub dimension: usize,
}

impl Layout {
    pub fn of(g: &GhostCurve) -> Layout {
        let mut vertex_offsets = Vec::new();
        let mut vertex_ranks = Vec::new();
        let mut d = 0;
        for v in &g.vertices {
            vertex_offsets.push(d);
            vertex_ranks.push(v.stalk.ambient());
            d += v.stalk.ambient();
        }
        Layout { vertex_offsets, vertex_ranks, edge_offset: d, dimension: d + g.edges.len() }
    }

    pub fn vertex_block<'a>(&self, v: usize, x: &'a [Int]) -> &'a [Int] {
        &x[self.vertex_offsets[v]..self.vertex_offsets[v] + self.vertex_ranks[v]]
    }
}

#[derive(Clone, Debug)]
pub struct BasicResult {
    pub layout: Layout,
    pub relation_vectors: Vec<Relation>,
    /// The saturated relation subgroup `R`.
    pub relations: Subgroup,
    /// Invariant factors of `(∏ P_η^gp × ∏ Z) / span(a_q(m))` torsion.
    pub torsion: Vec<Int>,
    /// A short vector of `R` not in the span of the `a_q(m)`, if torsion exists.
    pub torsion_witness: Option<Vector>,
    /// Image of `∏ P_η × ∏ N` before saturation.
    pub image: ToricMonoid,
    /// Hilbert basis elements of `Q` missing from the image monoid.
    pub saturation_adds: Vec<Vector>,
    pub q: ToricMonoid,
    /// `Z^n -> Q^gp`, kernel `R`.
    pub projection: IntMatrix,
    pub section: IntMatrix,
    pub phi: Vec<IntMatrix>,
    pub rho: Vec<Vector>,
}

/// `a_q(m)` for every edge `q` and Hilbert basis element `m` of `P_q`.
pub fn relation_vectors(g: &GhostCurve, t: &MapType) -> Result<Vec<Relation>> {
    let layout = Layout::of(g);
    if t.u_q.len() != g.edges.len() {
        return Err(Error::invalid("type does not match the number of edges"));
    }
    let mut out = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        let u = t.u_q[i].known().map_err(|_| Error::Undetermined(format!("u_q of edge {}", e.name)))?;
        if u.len() != e.stalk.ambient() {
            return Err(Error::dim(format!("u_q of edge {} has wrong length", e.name)));
        }
        for m in e.stalk.hilbert_basis()? {
            let mut a = vec![0; layout.dimension];
            for s in 0..2 {
                let v = e.ends[s];
                let img = e.chi[s].apply(m)?;
                let sign = if s == 0 { 1 } else { -1 };
                for (j, c) in img.iter().enumerate() {
                    let k = layout.vertex_offsets[v] + j;
                    a[k] = arith::add(a[k], sign * c)?;
                }
            }
            a[layout.edge_offset + i] = arith::dot(u, m)?;
            out.push(Relation { edge: i, m: m.clone(), vector: a });
        }
    }
    Ok(out)
}

/// Generators of `∏ P_η × ∏ N` in the layout coordinates.
pub fn ambient_generators(g: &GhostCurve) -> Result<Vec<Vector>> {
    let layout = Layout::of(g);
    let mut gens = Vec::new();
    for (v, vert) in g.vertices.iter().enumerate() {
        for h in vert.stalk.hilbert_basis()? {
            let mut x = vec![0; layout.dimension];
            x[layout.vertex_offsets[v]..layout.vertex_offsets[v] + h.len()].copy_from_slice(h);
            gens.push(x);
        }
    }
    for i in 0..g.edges.len() {
        gens.push(arith::unit_vector(layout.dimension, layout.edge_offset + i));
    }
    Ok(gens)
}

fn sign_normalize(v: Vector) -> Vector {
    match v.iter().find(|x| **x != 0) {
        Some(x) if *x < 0 => v.iter().map(|y| -y).collect(),
        _ => v,
    }
}

/// Vectors of `Z^n` with L1 norm exactly `norm`, first nonzero entry positive.
fn vectors_of_norm(n: usize, norm: Int, out: &mut Vec<Vector>) {
    fn rec(prefix: &mut Vector, n: usize, left: Int, started: bool, out: &mut Vec<Vector>) {
        if prefix.len() == n {
            if left == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for c in -left..=left {
            if !started && c < 0 {
                continue;
            }
            prefix.push(c);
            rec(prefix, n, left - c.abs(), started || c != 0, out);
            prefix.pop();
        }
    }
    rec(&mut Vec::new(), n, norm, false, out);
}

fn torsion_witness(span: &[Vector], saturated: &[Vector], n: usize) -> Result<Option<Vector>> {
    let sat = normal_form::LatticeSolver::new(saturated, n)?;
    let sub = normal_form::LatticeSolver::new(span, n)?;
    for norm in 1..=TORSION_SEARCH_NORM {
        let mut cands = Vec::new();
        vectors_of_norm(n, norm, &mut cands);
        if cands.len() > TORSION_SEARCH_SIZE {
            break;
        }
        let mut found: Vec<Vector> = Vec::new();
        for v in cands {
            if sat.contains(&v)? && !sub.contains(&v)? {
                found.push(sign_normalize(v));
            }
        }
        if let Some(best) = found.into_iter().min() {
            return Ok(Some(best));
        }
    }
    Ok(None)
}

/// `Q = [∏ P_η × ∏ N / R]^sat` with its structural maps.
///
/// The projection is the Hermite basis of `R^⊥`, so when the relations let
/// the edge coordinates be eliminated, vertex unit vectors map to unit
/// vectors of `Q^gp`.
pub fn compute_basic_monoid(g: &GhostCurve, t: &MapType) -> Result<BasicResult> {
    let layout = Layout::of(g);
    let n = layout.dimension;
    let rels = relation_vectors(g, t)?;
    let rel_rows: Vec<Vector> = rels.iter().map(|r| r.vector.clone()).collect();
    let span = Subgroup::new(n, &rel_rows)?;
    let torsion = span.torsion()?;
    let relations = span.saturate()?;
    let torsion_witness = if torsion.is_empty() { None } else { torsion_witness(&span.basis, &relations.basis, n)? };
    let ambient = ToricMonoid::new(n, &ambient_generators(g)?)?;
    let quotient = monoid::quotient_by_subgroup_saturated(&ambient, &relations)?;
    let image = quotient.image;
    let q = quotient.monoid;
    let mut saturation_adds = Vec::new();
    if image.is_sharp()? {
        for h in q.hilbert_basis()? {
            if !image.generated_contains(h)? {
                saturation_adds.push(h.clone());
            }
        }
    }
    let projection = quotient.projection.matrix;
    let k = projection.nrows();
    let mut phi = Vec::new();
    for v in 0..g.vertices.len() {
        let mut m = IntMatrix::zeros(k, layout.vertex_ranks[v]);
        for i in 0..k {
            for j in 0..layout.vertex_ranks[v] {
                m.set(i, j, projection.get(i, layout.vertex_offsets[v] + j));
            }
        }
        phi.push(m);
    }
    let rho = (0..g.edges.len()).map(|i| projection.col(layout.edge_offset + i)).collect();
    Ok(BasicResult {
        layout,
        relation_vectors: rels,
        relations,
        torsion,
        torsion_witness,
        image,
        saturation_adds,
        q,
        projection,
        section: quotient.section,
        phi,
        rho,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrestableReport {
    pub prestable: bool,
    pub witnesses: Vec<String>,
}

/// `Q` sharp, every `ρ_q ≠ 0`, and all structural maps local.
pub fn check_prestable_ghost(g: &GhostCurve, r: &BasicResult) -> Result<PrestableReport> {
    let mut w = Vec::new();
    if !r.q.is_sharp()? {
        w.push("Q has nontrivial units".to_string());
    }
    for (i, rho) in r.rho.iter().enumerate() {
        let name = &g.edges[i].name;
        if arith::is_zero(rho) {
            w.push(format!("rho[{name}] = 0"));
        } else if r.q.is_unit(rho)? {
            w.push(format!("rho[{name}] is a unit, so N -> Q is not local"));
        }
    }
    for (v, vert) in g.vertices.iter().enumerate() {
        for h in vert.stalk.hilbert_basis()? {
            let img = r.phi[v].apply(h)?;
            if r.q.is_unit(&img)? {
                w.push(format!("phi[{}] is not local: {h:?} maps to a unit", vert.name));
                break;
            }
        }
    }
    Ok(PrestableReport { prestable: w.is_empty(), witnesses: w })
}

/// `Q^∨` described directly: tuples `((V_η), (e_q))` with `V_η ∈ P_η^∨`,
/// `e_q ≥ 0`, and `V_{η2} ∘ χ2 − V_{η1} ∘ χ1 = e_q u_q` at every node.
pub fn dual_basic_cone(g: &GhostCurve, t: &MapType) -> Result<ToricMonoid> {
    let layout = Layout::of(g);
    let n = layout.dimension;
    let mut ineqs = Vec::new();
    for (v, vert) in g.vertices.iter().enumerate() {
        for h in vert.stalk.hilbert_basis()? {
            let mut x = vec![0; n];
            x[layout.vertex_offsets[v]..layout.vertex_offsets[v] + h.len()].copy_from_slice(h);
            ineqs.push(x);
        }
    }
    for i in 0..g.edges.len() {
        ineqs.push(arith::unit_vector(n, layout.edge_offset + i));
    }
    let eqs: Vec<Vector> = relation_vectors(g, t)?.into_iter().map(|r| r.vector).collect();
    let c = Cone::from_inequalities(&ineqs, &eqs, n)?;
    let mut gens = c.rays.clone();
    for l in &c.lineality {
        gens.push(l.clone());
        gens.push(l.iter().map(|x| -x).collect());
    }
    ToricMonoid::new(n, &cone::hilbert_basis(&gens, n)?)
}

/// Another object of the same type: a monoid with maps from each `P_η`
/// and elements for each node.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub q: ToricMonoid,
    pub phi: Vec<IntMatrix>,
    pub rho: Vec<Vector>,
}

impl Candidate {
    /// The candidate `(N, point ∘ φ_η, point(ρ_q))` from a point of `Q^∨`.
    pub fn from_point(r: &BasicResult, point: &[Int]) -> Result<Candidate> {
        let row = IntMatrix::from_rows(&[point.to_vec()], r.q.ambient())?;
        Ok(Candidate {
            q: ToricMonoid::free(1),
            phi: r.phi.iter().map(|p| row.mul(p)).collect::<Result<_>>()?,
            rho: r.rho.iter().map(|x| Ok(vec![arith::dot(point, x)?])).collect::<Result<_>>()?,
        })
    }

    /// The candidate obtained by pushing `r` along a unimodular change of coordinates.
    pub fn relabel(r: &BasicResult, u: &IntMatrix) -> Result<Candidate> {
        let gens: Vec<Vector> = r.q.generators().iter().map(|h| u.apply(h)).collect::<Result<_>>()?;
        Ok(Candidate {
            q: ToricMonoid::new(u.nrows(), &gens)?,
            phi: r.phi.iter().map(|p| u.mul(p)).collect::<Result<_>>()?,
            rho: r.rho.iter().map(|x| u.apply(x)).collect::<Result<_>>()?,
        })
    }

    pub fn of(r: &BasicResult) -> Candidate {
        Candidate { q: r.q.clone(), phi: r.phi.clone(), rho: r.rho.clone() }
    }
}

/// The unique `h: Q -> Q'` with `φ'_η = h ∘ φ_η` and `ρ'_q = h(ρ_q)`.
pub fn factor_through_basic(g: &GhostCurve, r: &BasicResult, c: &Candidate) -> Result<MonoidHom> {
    let k2 = c.q.ambient();
    if c.phi.len() != r.phi.len() || c.rho.len() != r.rho.len() {
        return Err(Error::invalid("candidate has a different number of vertices or edges"));
    }
    let n = r.layout.dimension;
    let mut psi = IntMatrix::zeros(k2, n);
    for (v, p) in c.phi.iter().enumerate() {
        if p.nrows() != k2 || p.ncols() != r.layout.vertex_ranks[v] {
            return Err(Error::dim(format!("candidate map for vertex {} has the wrong shape", g.vertices[v].name)));
        }
        for i in 0..k2 {
            for j in 0..p.ncols() {
                psi.set(i, r.layout.vertex_offsets[v] + j, p.get(i, j));
            }
        }
    }
    for (e, x) in c.rho.iter().enumerate() {
        if x.len() != k2 {
            return Err(Error::dim(format!("candidate element for edge {} has the wrong length", g.edges[e].name)));
        }
        for (i, val) in x.iter().enumerate() {
            psi.set(i, r.layout.edge_offset + e, *val);
        }
    }
    for rel in &r.relation_vectors {
        if !arith::is_zero(&psi.apply(&rel.vector)?) {
            return Err(Error::invalid(format!("node equation fails at edge {} for m = {:?}", g.edges[rel.edge].name, rel.m)));
        }
    }
    let h = psi.mul(&r.section)?;
    for x in r.q.hilbert_basis()? {
        let img = h.apply(x)?;
        if !c.q.contains(&img)? {
            return Err(Error::invalid(format!("{x:?} maps to {img:?}, outside the candidate monoid")));
        }
    }
    Ok(MonoidHom { source: r.q.clone(), target: c.q.clone(), matrix: h })
}

/// Whether the factorization is an isomorphism.
pub fn is_basic(g: &GhostCurve, r: &BasicResult, c: &Candidate) -> Result<bool> {
    let h = match factor_through_basic(g, r, c) {
        Ok(h) => h,
        Err(Error::Invalid(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    if h.matrix.nrows() != h.matrix.ncols() || normal_form::determinant(&h.matrix)?.abs() != 1 {
        return Ok(false);
    }
    let mut imgs: Vec<Vector> = r.q.hilbert_basis()?.iter().map(|x| h.apply(x)).collect::<Result<_>>()?;
    imgs.sort();
    Ok(imgs == c.q.hilbert_basis()?.to_vec())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::ghost::tests::mat;
    use crate::ghost::{Edge, Leg, NodeContact, Vertex};

    fn vertex(name: &str, k: usize) -> Vertex {
        Vertex { name: name.into(), genus: None, stalk: ToricMonoid::free(k) }
    }

    fn edge(name: &str, ends: [usize; 2], k: usize, chi: [IntMatrix; 2]) -> Edge {
        Edge { name: name.into(), ends, stalk: ToricMonoid::free(k), chi }
    }

    /// Two components meeting in two nodes, everything `N`.
    pub fn two_nodes(u1: Int, u2: Int) -> (GhostCurve, MapType) {
        let id = IntMatrix::identity(1);
        let g = GhostCurve {
            vertices: vec![vertex("eta1", 1), vertex("eta2", 1)],
            edges: vec![edge("q1", [0, 1], 1, [id.clone(), id.clone()]), edge("q2", [0, 1], 1, [id.clone(), id])],
            legs: vec![],
        };
        let t = MapType { u_p: vec![], u_q: vec![NodeContact::Known(vec![u1]), NodeContact::Known(vec![u2])], tau: vec![] };
        (g, t)
    }

    pub fn square() -> (GhostCurve, MapType) {
        let one = IntMatrix::identity(1);
        let zero = IntMatrix::zeros(0, 1);
        let leg = |name: &str, v: usize| Leg { name: name.into(), vertex: v, stalk: ToricMonoid::free(1), chi: IntMatrix::identity(1) };
        let g = GhostCurve {
            vertices: vec![vertex("D1", 1), vertex("D2", 1), vertex("D3", 1), vertex("D4", 0), vertex("D5", 0)],
            edges: vec![
                edge("q1", [3, 0], 1, [zero.clone(), one.clone()]),
                edge("q2", [0, 2], 1, [one.clone(), one.clone()]),
                edge("q3", [1, 2], 1, [one.clone(), one.clone()]),
                edge("q4", [4, 1], 1, [zero, one]),
            ],
            legs: vec![leg("p1", 0), leg("p2", 1), leg("p3", 2)],
        };
        let t = MapType { u_p: vec![vec![0], vec![0], vec![2]], u_q: (0..4).map(|_| NodeContact::Known(vec![1])).collect(), tau: vec![] };
        (g, t)
    }

    #[test]
    fn relation_vectors_of_small_examples() {
        let (g, t) = two_nodes(0, 1);
        let r: Vec<Vector> = relation_vectors(&g, &t).unwrap().into_iter().map(|r| r.vector).collect();
        assert_eq!(r, vec![vec![1, -1, 0, 0], vec![1, -1, 0, 1]]);
        let (g, t) = two_nodes(2, 3);
        let r: Vec<Vector> = relation_vectors(&g, &t).unwrap().into_iter().map(|r| r.vector).collect();
        assert_eq!(r, vec![vec![1, -1, 2, 0], vec![1, -1, 0, 3]]);
        let (g, t) = square();
        let r: Vec<Vector> = relation_vectors(&g, &t).unwrap().into_iter().map(|r| r.vector).collect();
        assert_eq!(r, vec![vec![-1, 0, 0, 1, 0, 0, 0], vec![1, 0, -1, 0, 1, 0, 0], vec![0, 1, -1, 0, 0, 1, 0], vec![0, -1, 0, 0, 0, 0, 1]]);
    }

    #[test]
    fn quadric_cone() {
        let (g, t) = square();
        let r = compute_basic_monoid(&g, &t).unwrap();
        assert_eq!(r.q.ambient(), 3);
        assert_eq!(r.q.hilbert_basis().unwrap().len(), 4);
        assert_eq!(r.rho, vec![vec![1, 0, 0], vec![-1, 0, 1], vec![0, -1, 1], vec![0, 1, 0]]);
        assert!(check_prestable_ghost(&g, &r).unwrap().prestable);
        assert!(r.torsion.is_empty() && r.saturation_adds.is_empty());
    }

    #[test]
    fn degenerate_node() {
        let (g, t) = two_nodes(0, 1);
        let r = compute_basic_monoid(&g, &t).unwrap();
        assert!(arith::is_zero(&r.rho[1]));
        let rep = check_prestable_ghost(&g, &r).unwrap();
        assert!(!rep.prestable);
        assert!(rep.witnesses.iter().any(|w| w == "rho[q2] = 0"));
    }

    #[test]
    fn saturation_is_needed() {
        let (g, t) = two_nodes(2, 3);
        let r = compute_basic_monoid(&g, &t).unwrap();
        assert_eq!(r.saturation_adds, vec![vec![0, 1]]);
    }

    #[test]
    fn torsion_is_killed() {
        let g = GhostCurve {
            vertices: vec![vertex("eta1", 1), vertex("eta2", 1)],
            edges: vec![
                edge("q1", [0, 1], 2, [mat(&[&[1, 0]], 2), mat(&[&[0, 1]], 2)]),
                edge("q2", [0, 1], 1, [IntMatrix::identity(1), IntMatrix::identity(1)]),
            ],
            legs: vec![],
        };
        let t = MapType { u_p: vec![], u_q: vec![NodeContact::Known(vec![1, 1]), NodeContact::Known(vec![2])], tau: vec![] };
        let r = compute_basic_monoid(&g, &t).unwrap();
        assert_eq!(r.torsion, vec![2]);
        assert_eq!(r.torsion_witness, Some(vec![0, 0, 1, -1]));
        assert!(r.relations.contains(&[0, 0, 1, -1]).unwrap());
    }

    #[test]
    fn dual_matches_projection() {
        let (g, t) = square();
        let r = compute_basic_monoid(&g, &t).unwrap();
        let d = dual_basic_cone(&g, &t).unwrap();
        let pt = r.projection.transpose();
        let mut pulled: Vec<Vector> = r.q.dual().unwrap().generators().iter().map(|f| pt.apply(f).unwrap()).collect();
        pulled.sort();
        assert_eq!(pulled, d.generators().to_vec());
    }

    #[test]
    fn universal_property() {
        let (g, t) = square();
        let r = compute_basic_monoid(&g, &t).unwrap();
        let c = Candidate::of(&r);
        assert!(is_basic(&g, &r, &c).unwrap());
        let point = vec![1, 1, 2];
        let h = factor_through_basic(&g, &r, &Candidate::from_point(&r, &point).unwrap()).unwrap();
        assert_eq!(h.matrix.row(0), &point[..]);
        let u = mat(&[&[0, 1, 0], &[1, 0, 0], &[1, 1, 1]], 3);
        assert!(is_basic(&g, &r, &Candidate::relabel(&r, &u).unwrap()).unwrap());
        assert!(!is_basic(&g, &r, &Candidate::from_point(&r, &point).unwrap()).unwrap());
        let mut bad = Candidate::of(&r);
        bad.rho[2] = vec![0, 0, 0];
        let err = factor_through_basic(&g, &r, &bad).unwrap_err();
        assert!(err.to_string().contains("edge q"));
    }
}
