//! Tropical data, tropical curves and the balancing conditions.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith::{self, Int, IntMatrix, Vector};
use crate::basic::BasicResult;
use crate::error::{Error, Result};
use crate::ghost::{self, GhostCurve, MapType, Point, SpecialPoint};
use crate::normal_form;

/// `((V_η), (e_q))` from a pullback to the standard log point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TropicalData {
    #[serde(serialize_with = "crate::io::wide")]
    pub v: Vec<Vector>,
    #[serde(serialize_with = "crate::io::wide")]
    pub e: Vec<Int>,
}

/// `V_η = point ∘ φ_η`, `e_q = point(ρ_q)` for a local `point: Q -> N`.
pub fn tropical_data_from_point(r: &BasicResult, point: &[Int]) -> Result<TropicalData> {
    if point.len() != r.q.ambient() {
        return Err(Error::dim(format!("point has length {}, Q has rank {}", point.len(), r.q.ambient())));
    }
    for h in r.q.hilbert_basis()? {
        let d = arith::dot(point, h)?;
        if d < 0 {
            return Err(Error::invalid(format!("point is negative on {h:?}, so it is not a map Q -> N")));
        }
        if d == 0 && !r.q.is_unit(h)? {
            return Err(Error::invalid(format!("point is not local: it vanishes on {h:?}")));
        }
    }
    let v = r.phi.iter().map(|p| p.apply_left(point)).collect::<Result<_>>()?;
    let e = r.rho.iter().map(|x| arith::dot(point, x)).collect::<Result<Vec<_>>>()?;
    Ok(TropicalData { v, e })
}

/// `u_q = (χ2^T V_{η2} − χ1^T V_{η1}) / e_q` for every edge.
pub fn type_from_tropical_data(g: &GhostCurve, d: &TropicalData) -> Result<Vec<Vector>> {
    if d.v.len() != g.vertices.len() || d.e.len() != g.edges.len() {
        return Err(Error::dim("tropical data does not match the graph"));
    }
    let mut out = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        if d.e[i] <= 0 {
            return Err(Error::invalid(format!("edge length of {} is not positive", e.name)));
        }
        let a = e.chi[0].apply_left(&d.v[e.ends[0]])?;
        let b = e.chi[1].apply_left(&d.v[e.ends[1]])?;
        let diff = arith::vec_sub(&b, &a)?;
        if diff.iter().any(|x| x % d.e[i] != 0) {
            return Err(Error::Infeasible(format!("{diff:?} at edge {} is not divisible by {}", e.name, d.e[i])));
        }
        out.push(diff.iter().map(|x| x / d.e[i]).collect());
    }
    Ok(out)
}

/// Degree of the torsor induced on one component by a section with value
/// `b` at the generic point, `(a_q, e_q)` at each node and `n_p` at each
/// marking: `−Σ n_p + Σ (b − a_q) / e_q`.
pub fn torsor_degree(b: Int, nodes: &[(Int, Int)], markings: &[Int]) -> Result<Int> {
    let mut total: Int = 0;
    for n in markings {
        total = arith::sub(total, *n)?;
    }
    for (a, e) in nodes {
        let diff = arith::sub(b, *a)?;
        if *e <= 0 || diff % e != 0 {
            return Err(Error::invalid(format!("b - a = {diff} is not divisible by e = {e}")));
        }
        total = arith::add(total, diff / e)?;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceReport {
    pub balanced: bool,
    /// Representative of `Σ ι_x(u_x + τ_x)` in the direct sum when nonzero.
    pub defect: Option<Vector>,
}

/// Outward contact order of the type at a special point of `v`.
pub fn contact_at(g: &GhostCurve, t: &MapType, x: SpecialPoint) -> Result<Vector> {
    match x {
        SpecialPoint::Generic => Err(Error::invalid("the generic point carries no contact order")),
        SpecialPoint::Leg(i) => {
            let u = t.u_p.get(i).ok_or_else(|| Error::invalid(format!("no contact order for leg {i}")))?;
            if u.len() != g.legs[i].stalk.ambient() {
                return Err(Error::dim(format!("u_p of leg {} has wrong length", g.legs[i].name)));
            }
            Ok(u.clone())
        }
        SpecialPoint::EdgeEnd { edge, side } => {
            let u = t.u_q.get(edge).ok_or_else(|| Error::invalid(format!("no u_q for edge {edge}")))?;
            let u = u.known().map_err(|_| Error::Undetermined(format!("u_q of edge {}", g.edges[edge].name)))?;
            if u.len() != g.edges[edge].stalk.ambient() {
                return Err(Error::dim(format!("u_q of edge {} has wrong length", g.edges[edge].name)));
            }
            Ok(if side == 1 { u.clone() } else { u.iter().map(|a| -a).collect() })
        }
    }
}

/// `(u_x)_x + (τ_x)_x = 0` in `N_D` for the component `v`.
pub fn check_component_balancing(g: &GhostCurve, t: &MapType, v: usize) -> Result<BalanceReport> {
    let cg = ghost::colimit_group(g, v)?;
    let mut sum = vec![0; cg.dimension];
    for x in g.special_points(v) {
        sum = arith::vec_add(&sum, &cg.embed(x, &contact_at(g, t, x)?)?)?;
    }
    if let Some(tau) = t.tau.get(v) {
        for (x, val) in tau {
            sum = arith::vec_add(&sum, &cg.embed(*x, val)?)?;
        }
    }
    if cg.is_zero(&sum)? {
        Ok(BalanceReport { balanced: true, defect: None })
    } else {
        Ok(BalanceReport { balanced: false, defect: Some(sum) })
    }
}

/// Which lattice `M` the tropical curve lives dually to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveLattice {
    /// `M = Γ^gp`; needs the curve to be almost generated.
    Sections,
    /// `M = Γ(M̄^gp)`; needs the curve to be quasi-generated.
    GroupSections,
    /// A user lattice `Z^rank` with maps `M -> P_x^gp` for every point.
    Characters { rank: usize, maps: BTreeMap<Point, IntMatrix> },
}

/// Maps `C_x: M -> P_x^gp` for every point, compatible with generization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeMaps {
    pub rank: usize,
    pub maps: BTreeMap<Point, IntMatrix>,
}

impl LatticeMaps {
    /// `C_x^T a` in `N`.
    pub fn push(&self, p: Point, a: &[Int]) -> Result<Vector> {
        self.maps[&p].apply_left(a)
    }
}

pub fn lattice_maps(g: &GhostCurve, mode: &CurveLattice) -> Result<LatticeMaps> {
    match mode {
        CurveLattice::Sections => {
            let s = ghost::global_sections(g)?;
            let chk = ghost::check_almost_generated(g, &s)?;
            if !chk.holds {
                let w = chk.witness.map(|p| g.point_name(p)).unwrap_or_default();
                return Err(Error::invalid(format!("not almost generated: sections do not span the stalk at {w}")));
            }
            let basis = s.monoid.group_basis()?.to_vec();
            let k = s.group_rank();
            let bt = if basis.is_empty() { IntMatrix::zeros(k, 0) } else { IntMatrix::from_rows(&basis, k)?.transpose() };
            let maps = s.restrictions.iter().map(|(p, r)| Ok((*p, r.mul(&bt)?))).collect::<Result<_>>()?;
            Ok(LatticeMaps { rank: basis.len(), maps })
        }
        CurveLattice::GroupSections => {
            let s = ghost::global_sections(g)?;
            let chk = ghost::check_quasi_generated(g, &s)?;
            if !chk.holds {
                let w = chk.witness.map(|p| g.point_name(p)).unwrap_or_default();
                return Err(Error::invalid(format!("not quasi-generated: group sections do not span the stalk at {w}")));
            }
            Ok(LatticeMaps { rank: s.group_rank(), maps: s.restrictions })
        }
        CurveLattice::Characters { rank, maps } => {
            for p in g.points() {
                let c = maps.get(&p).ok_or_else(|| Error::invalid(format!("no character map for {}", g.point_name(p))))?;
                if c.nrows() != g.rank(p) || c.ncols() != *rank {
                    return Err(Error::dim(format!("character map for {} has the wrong shape", g.point_name(p))));
                }
                if normal_form::rank(&c.to_cols(), c.nrows())? < c.nrows() {
                    return Err(Error::invalid(format!("characters do not span the stalk at {}", g.point_name(p))));
                }
            }
            let check = |src: Point, dst: Point, chi: &IntMatrix| -> Result<()> {
                if chi.mul(&maps[&src])? != maps[&dst] {
                    return Err(Error::invalid(format!(
                        "character maps at {} and {} are not compatible",
                        g.point_name(src),
                        g.point_name(dst)
                    )));
                }
                Ok(())
            };
            for (i, e) in g.edges.iter().enumerate() {
                for s in 0..2 {
                    check(Point::Edge(i), Point::Vertex(e.ends[s]), &e.chi[s])?;
                }
            }
            for (i, l) in g.legs.iter().enumerate() {
                check(Point::Leg(i), Point::Vertex(l.vertex), &l.chi)?;
            }
            Ok(LatticeMaps { rank: *rank, maps: maps.clone() })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveVertex {
    pub name: String,
    #[serde(serialize_with = "crate::io::wide")]
    pub position: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveEdge {
    pub name: String,
    pub ends: [usize; 2],
    /// Flag weights `u_{(v,E)}` at `ends[0]` and `ends[1]`.
    #[serde(serialize_with = "crate::io::wide")]
    pub weights: [Vector; 2],
    #[serde(serialize_with = "crate::io::wide")]
    pub length: Int,
    pub contracted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveLeg {
    pub name: String,
    pub vertex: usize,
    #[serde(serialize_with = "crate::io::wide")]
    pub direction: Vector,
    /// Added at a vertex to carry the image of `τ_η`.
    pub correction: bool,
    pub contracted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TropicalCurve {
    pub rank: usize,
    pub vertices: Vec<CurveVertex>,
    pub edges: Vec<CurveEdge>,
    pub legs: Vec<CurveLeg>,
}

pub fn build_tropical_curve(g: &GhostCurve, t: &MapType, d: &TropicalData, mode: &CurveLattice) -> Result<TropicalCurve> {
    let lm = lattice_maps(g, mode)?;
    build_with_maps(g, t, d, &lm)
}

/// The tropical curve for precomputed lattice maps.
pub fn build_with_maps(g: &GhostCurve, t: &MapType, d: &TropicalData, lm: &LatticeMaps) -> Result<TropicalCurve> {
    if d.v.len() != g.vertices.len() || d.e.len() != g.edges.len() {
        return Err(Error::dim("tropical data does not match the graph"));
    }
    if t.u_p.len() != g.legs.len() || t.u_q.len() != g.edges.len() {
        return Err(Error::dim("type does not match the graph"));
    }
    let vertices = g
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| Ok(CurveVertex { name: v.name.clone(), position: lm.push(Point::Vertex(i), &d.v[i])? }))
        .collect::<Result<Vec<_>>>()?;
    let mut edges = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        let u = lm.push(Point::Edge(i), t.u_q[i].known()?)?;
        let neg: Vector = u.iter().map(|x| -x).collect();
        let contracted = arith::is_zero(&u);
        edges.push(CurveEdge { name: e.name.clone(), ends: e.ends, weights: [u, neg], length: d.e[i], contracted });
    }
    let mut legs = Vec::new();
    for (i, l) in g.legs.iter().enumerate() {
        let u = lm.push(Point::Leg(i), &t.u_p[i])?;
        let contracted = arith::is_zero(&u);
        legs.push(CurveLeg { name: l.name.clone(), vertex: l.vertex, direction: u, correction: false, contracted });
    }
    for v in 0..g.vertices.len() {
        let Some(tau) = t.tau.get(v) else { continue };
        let mut total = vec![0; lm.rank];
        for (x, val) in tau {
            let p = match *x {
                SpecialPoint::Generic => Point::Vertex(v),
                SpecialPoint::Leg(i) => Point::Leg(i),
                SpecialPoint::EdgeEnd { edge, .. } => Point::Edge(edge),
            };
            total = arith::vec_add(&total, &lm.push(p, val)?)?;
        }
        if !arith::is_zero(&total) {
            legs.push(CurveLeg {
                name: format!("tau[{}]", g.vertices[v].name),
                vertex: v,
                direction: total,
                correction: true,
                contracted: false,
            });
        }
    }
    Ok(TropicalCurve { rank: lm.rank, vertices, edges, legs })
}

/// Whether the flag weights sum to zero, vertex by vertex.
pub fn check_tropical_balancing(c: &TropicalCurve) -> Result<Vec<bool>> {
    let mut sums = vec![vec![0; c.rank]; c.vertices.len()];
    for e in &c.edges {
        for s in 0..2 {
            sums[e.ends[s]] = arith::vec_add(&sums[e.ends[s]], &e.weights[s])?;
        }
    }
    for l in &c.legs {
        sums[l.vertex] = arith::vec_add(&sums[l.vertex], &l.direction)?;
    }
    Ok(sums.iter().map(|s| arith::is_zero(s)).collect())
}

/// `h(v_{ends[1]}) − h(v_{ends[0]}) = length · weight` at every edge.
pub fn check_edge_geometry(c: &TropicalCurve) -> Result<bool> {
    for e in &c.edges {
        let diff = arith::vec_sub(&c.vertices[e.ends[1]].position, &c.vertices[e.ends[0]].position)?;
        if diff != arith::vec_scale(&e.weights[0], e.length)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every vertex lies on `⟨ρ, ·⟩ = b` and every marking leg is parallel to it.
pub fn check_hyperplane(c: &TropicalCurve, rho: &[Int], b: Int) -> Result<bool> {
    if rho.len() != c.rank {
        return Err(Error::dim("hyperplane functional has the wrong length"));
    }
    for v in &c.vertices {
        if arith::dot(rho, &v.position)? != b {
            return Ok(false);
        }
    }
    for l in c.legs.iter().filter(|l| !l.correction) {
        if arith::dot(rho, &l.direction)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::basic::{self, tests::square};
    use crate::ghost::{Leg, NodeContact, Tau, Vertex};
    use crate::monoid::ToricMonoid;

    /// One rank-0 component with markings of tangency `mu`.
    pub fn basic_relative(mu: &[Int]) -> (GhostCurve, MapType) {
        let g = GhostCurve {
            vertices: vec![Vertex { name: "eta".into(), genus: Some(0), stalk: ToricMonoid::free(0) }],
            edges: vec![],
            legs: (0..mu.len())
                .map(|i| Leg { name: format!("x{}", i + 1), vertex: 0, stalk: ToricMonoid::free(1), chi: IntMatrix::zeros(0, 1) })
                .collect(),
        };
        let tau: Tau = (0..mu.len()).map(|i| (SpecialPoint::Leg(i), vec![-mu[i]])).collect();
        let t = MapType { u_p: mu.iter().map(|m| vec![*m]).collect(), u_q: vec![], tau: vec![tau] };
        (g, t)
    }

    pub fn square_tau() -> (GhostCurve, MapType) {
        let (g, mut t) = square();
        let mut tau = vec![Tau::new(); 5];
        tau[3].insert(SpecialPoint::EdgeEnd { edge: 0, side: 1 }, vec![-1]);
        tau[4].insert(SpecialPoint::EdgeEnd { edge: 3, side: 1 }, vec![-1]);
        t.tau = tau;
        (g, t)
    }

    #[test]
    fn torsor_degrees() {
        assert_eq!(torsor_degree(3, &[(3, 2), (3, 5)], &[0, 0]).unwrap(), 0);
        assert_eq!(torsor_degree(0, &[], &[1, 2, 3]).unwrap(), -6);
        assert_eq!(torsor_degree(4, &[(0, 2)], &[]).unwrap(), 2);
        assert!(torsor_degree(3, &[(0, 2)], &[]).is_err());
    }

    #[test]
    fn balancing_forces_tangency() {
        let (g, t) = basic_relative(&[1, 1]);
        assert!(check_component_balancing(&g, &t, 0).unwrap().balanced);
        let mut bad = t.clone();
        bad.u_p = vec![vec![2], vec![0]];
        let rep = check_component_balancing(&g, &bad, 0).unwrap();
        assert!(!rep.balanced && rep.defect.is_some());
    }

    #[test]
    fn square_balances_everywhere() {
        let (g, t) = square_tau();
        for v in 0..5 {
            assert!(check_component_balancing(&g, &t, v).unwrap().balanced, "vertex {v}");
        }
        let mut u = t.clone();
        u.u_q[1] = NodeContact::Undetermined;
        assert!(matches!(check_component_balancing(&g, &u, 0), Err(Error::Undetermined(_))));
    }

    #[test]
    fn square_round_trip_and_curve() {
        let (g, t) = square_tau();
        let r = basic::compute_basic_monoid(&g, &t).unwrap();
        let point = r.q.cone().unwrap().positive_functional().unwrap();
        let d = tropical_data_from_point(&r, &point).unwrap();
        assert!(d.e.iter().all(|e| *e > 0));
        assert_eq!(type_from_tropical_data(&g, &d).unwrap(), t.edge_part().unwrap());
        let c = build_tropical_curve(&g, &t, &d, &CurveLattice::Sections).unwrap();
        assert_eq!(c.rank, 1);
        assert!(check_tropical_balancing(&c).unwrap().iter().all(|b| *b));
        assert!(check_edge_geometry(&c).unwrap());
        assert_eq!(c.legs.iter().filter(|l| l.correction).count(), 2);
        assert!(!c.edges.iter().any(|e| e.contracted));
        assert!(tropical_data_from_point(&r, &vec![0; r.q.ambient()]).is_err());
    }

    #[test]
    fn non_divisible_difference() {
        let (g, _) = square();
        let d = TropicalData { v: vec![vec![1], vec![1], vec![2], vec![], vec![]], e: vec![1, 2, 1, 1] };
        assert!(matches!(type_from_tropical_data(&g, &d), Err(Error::Infeasible(_))));
        let d = TropicalData { v: vec![vec![1], vec![1], vec![1], vec![], vec![]], e: vec![1, 3, 3, 1] };
        let u = type_from_tropical_data(&g, &d).unwrap();
        assert_eq!(u[1], vec![0]);
    }

    #[test]
    fn zero_type_gives_point_curve() {
        let (g, mut t) = square();
        t.u_p = vec![vec![0]; 3];
        t.u_q = vec![NodeContact::Known(vec![0]); 4];
        let d = TropicalData { v: vec![vec![0], vec![0], vec![0], vec![], vec![]], e: vec![1; 4] };
        let c = build_tropical_curve(&g, &t, &d, &CurveLattice::GroupSections).unwrap();
        assert!(c.vertices.iter().all(|v| arith::is_zero(&v.position)));
        assert!(c.edges.iter().all(|e| e.contracted));
        assert!(check_tropical_balancing(&c).unwrap().iter().all(|b| *b));
    }

    #[test]
    fn hand_built_balancing() {
        let mk = |dirs: &[Vector]| TropicalCurve {
            rank: 2,
            vertices: vec![CurveVertex { name: "v".into(), position: vec![0, 0] }],
            edges: vec![],
            legs: dirs
                .iter()
                .map(|d| CurveLeg { name: "l".into(), vertex: 0, direction: d.clone(), correction: false, contracted: false })
                .collect(),
        };
        assert_eq!(check_tropical_balancing(&mk(&[vec![1, 0], vec![-1, 0]])).unwrap(), vec![true]);
        assert_eq!(check_tropical_balancing(&mk(&[vec![1, 0]])).unwrap(), vec![false]);
        assert!(check_hyperplane(&mk(&[vec![1, 0], vec![-1, 0]]), &[0, 1], 0).unwrap());
        assert!(!check_hyperplane(&mk(&[vec![1, 0]]), &[1, 0], 0).unwrap());
    }

    #[test]
    fn elliptic_sections_mode_is_rejected() {
        let g = crate::ghost::tests::elliptic();
        let t = MapType { u_p: vec![], u_q: vec![NodeContact::Known(vec![0; 4]), NodeContact::Known(vec![0; 4])], tau: vec![] };
        let d = TropicalData { v: vec![vec![1; 3], vec![1; 3]], e: vec![1, 1] };
        assert!(build_tropical_curve(&g, &t, &d, &CurveLattice::Sections).is_err());
    }
}
