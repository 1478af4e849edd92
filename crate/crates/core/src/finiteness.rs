//! Enumeration of the types a fixed stable map can carry.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::arith::{self, Int, IntMatrix, Vector};
use crate::basic::{self, BasicResult, Layout};
use crate::error::{Error, Result};
use crate::ghost::{self, GhostCurve, MapType, NodeContact, Point, SpecialPoint, Tau};
use crate::lp::{self, Constraint};
use crate::monoid::ToricMonoid;
use crate::normal_form::{self, LatticeSolver};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumerationMode {
    /// Contact orders are enumerated from `Γ`; needs an almost generated curve.
    AlmostGenerated,
    /// Contact orders are given; needs a quasi-generated curve.
    QuasiGeneratedFixedContacts,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationConfig {
    pub mode: EnumerationMode,
    /// Coefficient radius in the lattice of balanced edge deformations;
    /// `None` picks `10 · (max |u_p| + max |τ|)`.
    pub cycle_bound: Option<Int>,
    /// Largest number of candidates examined before giving up.
    pub cap: usize,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig { mode: EnumerationMode::AlmostGenerated, cycle_bound: None, cap: 1_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Completeness {
    /// Every admissible type is listed.
    Exact,
    /// Every admissible type within the coefficient bound is listed.
    BoundLimited { bound: Int },
}

impl Completeness {
    fn join(self, other: Completeness) -> Completeness {
        match (self, other) {
            (Completeness::Exact, c) | (c, Completeness::Exact) => c,
            (Completeness::BoundLimited { bound: a }, Completeness::BoundLimited { bound: b }) => {
                Completeness::BoundLimited { bound: a.min(b) }
            }
        }
    }
}

/// Everything needed to push contact data into `N = (Γ^gp)^*`.
struct SectionData {
    /// `C_x: Γ^gp -> P_x^gp` for every point.
    maps: std::collections::BTreeMap<Point, IntMatrix>,
    /// Hilbert basis of `Γ` in coordinates of `Γ^gp`.
    gamma: Vec<Vector>,
    rank: usize,
}

fn section_data(g: &GhostCurve) -> Result<SectionData> {
    let s = ghost::global_sections(g)?;
    let chk = ghost::check_almost_generated(g, &s)?;
    if !chk.holds {
        let w = chk.witness.map(|p| g.point_name(p)).unwrap_or_default();
        return Err(Error::invalid(format!("not almost generated: sections do not span the stalk at {w}")));
    }
    let basis = s.monoid.group_basis()?.to_vec();
    let k = s.group_rank();
    let m = basis.len();
    let bt = if m == 0 { IntMatrix::zeros(k, 0) } else { IntMatrix::from_rows(&basis, k)?.transpose() };
    let maps = s.restrictions.iter().map(|(p, r)| Ok((*p, r.mul(&bt)?))).collect::<Result<_>>()?;
    let solver = LatticeSolver::new(&basis, k)?;
    let gamma = s
        .monoid
        .hilbert_basis()?
        .iter()
        .map(|h| solver.solve(h)?.ok_or_else(|| Error::Internal("section outside its own group".into())))
        .collect::<Result<_>>()?;
    Ok(SectionData { maps, gamma, rank: m })
}

fn tau_point(v: usize, x: SpecialPoint) -> Point {
    match x {
        SpecialPoint::Generic => Point::Vertex(v),
        SpecialPoint::Leg(i) => Point::Leg(i),
        SpecialPoint::EdgeEnd { edge, .. } => Point::Edge(edge),
    }
}

/// All `(u_p)` with `u_p ∈ P_p^∨` and `Σ_p ũ_p = −Σ_η τ̃_η` in `N`.
/// Fails with [`Error::Infeasible`] when the target is outside `K = Γ^∨`.
pub fn enumerate_contact_assignments(g: &GhostCurve, tau: &[Tau], cap: usize) -> Result<Vec<Vec<Vector>>> {
    let sd = section_data(g)?;
    let m = sd.rank;
    let k_dual = ToricMonoid::new(m, &sd.gamma)?.dual()?;
    if !k_dual.is_sharp()? {
        return Err(Error::invalid("the cone dual to the sections is not strictly convex"));
    }
    let mut target = vec![0; m];
    for (v, t) in tau.iter().enumerate() {
        for (x, val) in t {
            let img = sd.maps[&tau_point(v, *x)].apply_left(val)?;
            target = arith::vec_sub(&target, &img)?;
        }
    }
    if g.legs.is_empty() {
        return Ok(if arith::is_zero(&target) { vec![Vec::new()] } else { Vec::new() });
    }
    let in_k = |y: &[Int]| -> Result<bool> {
        for h in &sd.gamma {
            if arith::dot(y, h)? < 0 {
                return Ok(false);
            }
        }
        Ok(true)
    };
    if !in_k(&target)? {
        return Err(Error::Infeasible(format!("target {target:?} is outside the dual cone of the sections")));
    }
    let interior = sd.gamma.iter().try_fold(vec![0; m], |acc, h| arith::vec_add(&acc, h))?;
    let height = arith::dot(&target, &interior)?;
    // per leg: (u_p, ũ_p) with deg ũ_p ≤ height
    let mut options: Vec<Vec<(Vector, Vector)>> = Vec::new();
    let mut count = 0usize;
    for (i, leg) in g.legs.iter().enumerate() {
        let c = &sd.maps[&Point::Leg(i)];
        let t = c.apply(&interior)?;
        let hb = leg.stalk.dual()?.hilbert_basis()?.to_vec();
        for d in &hb {
            if arith::dot(d, &t)? <= 0 {
                return Err(Error::Internal(format!("dual generator {d:?} of leg {} has no positive degree", leg.name)));
            }
        }
        let mut seen: BTreeSet<Vector> = BTreeSet::new();
        let mut frontier = vec![vec![0; leg.stalk.ambient()]];
        seen.insert(frontier[0].clone());
        while let Some(u) = frontier.pop() {
            for d in &hb {
                let w = arith::vec_add(&u, d)?;
                if arith::dot(&w, &t)? <= height && seen.insert(w.clone()) {
                    count += 1;
                    if count > cap {
                        return Err(Error::CapExceeded(cap));
                    }
                    frontier.push(w);
                }
            }
        }
        options.push(seen.into_iter().map(|u| Ok((c.apply_left(&u)?, u))).collect::<Result<_>>()?);
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn search(
        i: usize,
        remaining: &[Int],
        options: &[Vec<(Vector, Vector)>],
        in_k: &dyn Fn(&[Int]) -> Result<bool>,
        current: &mut Vec<Vector>,
        out: &mut Vec<Vec<Vector>>,
        cap: usize,
    ) -> Result<()> {
        if i == options.len() {
            if arith::is_zero(remaining) {
                out.push(current.clone());
                if out.len() > cap {
                    return Err(Error::CapExceeded(cap));
                }
            }
            return Ok(());
        }
        for (img, u) in &options[i] {
            let rest = arith::vec_sub(remaining, img)?;
            if in_k(&rest)? {
                current.push(u.clone());
                search(i + 1, &rest, options, in_k, current, out, cap)?;
                current.pop();
            }
        }
        Ok(())
    }
    search(0, &target, &options, &in_k, &mut current, &mut out, cap)?;
    out.sort();
    Ok(out)
}

/// A complete edge part with an integral interior point of the dual
/// cone: `((V_η), (e_q))` in [`Layout`] coordinates with every `e_q ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeType {
    pub u_q: Vec<Vector>,
    pub certificate: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeEnumeration {
    pub types: Vec<EdgeType>,
    pub completeness: Completeness,
    pub candidates: usize,
}

fn max_abs<'a>(vs: impl Iterator<Item = &'a Vector>) -> Int {
    vs.flat_map(|v| v.iter()).map(|x| x.abs()).max().unwrap_or(0)
}

/// The default coefficient radius `10 · (max |u_p| + max |τ|)`.
pub fn default_cycle_bound(u_p: &[Vector], tau: &[Tau]) -> Result<Int> {
    let a = max_abs(u_p.iter());
    let b = max_abs(tau.iter().flat_map(|t| t.values()));
    arith::mul(10, arith::add(a, b)?)
}

/// Integer points `u` of the affine lattice of edge parts balancing every
/// component in `N_D`: a particular solution and a basis of directions.
pub fn balanced_edge_lattice(g: &GhostCurve, u_p: &[Vector], tau: &[Tau]) -> Result<Option<(Vector, Vec<Vector>)>> {
    let mut edge_off = Vec::new();
    let mut d = 0;
    for e in &g.edges {
        edge_off.push(d);
        d += e.stalk.ambient();
    }
    let partial = MapType { u_p: u_p.to_vec(), u_q: vec![NodeContact::Undetermined; g.edges.len()], tau: tau.to_vec() };
    let mut blocks = Vec::new();
    let mut lambdas = 0;
    for v in 0..g.vertices.len() {
        let cg = ghost::colimit_group(g, v)?;
        let mut c = vec![0; cg.dimension];
        let mut a = IntMatrix::zeros(cg.dimension, d);
        for x in g.special_points(v) {
            match x {
                SpecialPoint::Leg(_) => c = arith::vec_add(&c, &cg.embed(x, &crate::tropical::contact_at(g, &partial, x)?)?)?,
                SpecialPoint::EdgeEnd { edge, side } => {
                    let r = g.edges[edge].stalk.ambient();
                    let sign = if side == 1 { 1 } else { -1 };
                    for j in 0..r {
                        let col = cg.embed(x, &arith::unit_vector(r, j))?;
                        for (i, val) in col.iter().enumerate() {
                            if *val != 0 {
                                a.set(i, edge_off[edge] + j, a.get(i, edge_off[edge] + j) + sign * val);
                            }
                        }
                    }
                }
                SpecialPoint::Generic => {}
            }
        }
        if let Some(t) = tau.get(v) {
            for (x, val) in t {
                c = arith::vec_add(&c, &cg.embed(*x, val)?)?;
            }
        }
        lambdas += cg.relations.len();
        blocks.push((cg, c, a));
    }
    let rows: usize = blocks.iter().map(|b| b.0.dimension).sum();
    let cols = d + lambdas;
    let mut m = IntMatrix::zeros(rows, cols);
    let mut rhs = vec![0; rows];
    let (mut r0, mut l0) = (0, d);
    for (cg, c, a) in &blocks {
        for i in 0..cg.dimension {
            for j in 0..d {
                m.set(r0 + i, j, a.get(i, j));
            }
            rhs[r0 + i] = -c[i];
        }
        for (k, rel) in cg.relations.iter().enumerate() {
            for (i, val) in rel.iter().enumerate() {
                m.set(r0 + i, l0 + k, -val);
            }
        }
        r0 += cg.dimension;
        l0 += cg.relations.len();
    }
    let Some((x, ker)) = normal_form::solve_integer_system(&m, &rhs)? else { return Ok(None) };
    let dirs: Vec<Vector> = ker.iter().map(|k| k[..d].to_vec()).filter(|k| !arith::is_zero(k)).collect();
    let dirs = normal_form::canonical_basis(&dirs, d)?;
    let particular = reduce(&x[..d], &dirs)?;
    Ok(Some((particular, dirs)))
}

/// Reduces `x` against a Hermite basis so the particular solution is canonical.
fn reduce(x: &[Int], basis: &[Vector]) -> Result<Vector> {
    let mut x = x.to_vec();
    for b in basis {
        let Some(p) = b.iter().position(|v| *v != 0) else { continue };
        let q = x[p].div_euclid(b[p]);
        if q != 0 {
            x = arith::vec_comb(1, &x, -q, b)?;
        }
    }
    Ok(x)
}

fn split_edges(g: &GhostCurve, u: &[Int]) -> Vec<Vector> {
    let mut out = Vec::new();
    let mut off = 0;
    for e in &g.edges {
        let r = e.stalk.ambient();
        out.push(u[off..off + r].to_vec());
        off += r;
    }
    out
}

/// An integral point `((V_η), (e_q))` with `V_η` positive on `P_η \ 0`, all
/// `e_q ≥ 1` and `V_{η2} ∘ χ2 − V_{η1} ∘ χ1 = e_q u_q`, if one exists.
pub fn interior_dual_point(g: &GhostCurve, u_q: &[Vector]) -> Result<Option<Vector>> {
    let layout = Layout::of(g);
    let n = layout.dimension;
    let (eqs, ineqs) = dual_constraints(g, &layout, u_q)?;
    match lp::feasible_point(&eqs, &ineqs, n)? {
        Some(x) => Ok(Some(lp::clear_denominators(&x)?)),
        None => Ok(None),
    }
}

/// The constraints of [`interior_dual_point`] in [`Layout`] coordinates.
pub fn dual_constraints(g: &GhostCurve, layout: &Layout, u_q: &[Vector]) -> Result<(Vec<Constraint>, Vec<Constraint>)> {
    let n = layout.dimension;
    let mut eqs = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        for (j, &uj) in u_q[i].iter().enumerate().take(e.stalk.ambient()) {
            let mut row = vec![0; n];
            for s in 0..2 {
                let v = e.ends[s];
                let sign = if s == 0 { -1 } else { 1 };
                for a in 0..layout.vertex_ranks[v] {
                    let k = layout.vertex_offsets[v] + a;
                    row[k] = arith::add(row[k], sign * e.chi[s].get(a, j))?;
                }
            }
            row[layout.edge_offset + i] = -uj;
            eqs.push(Constraint::new(row, 0));
        }
    }
    let mut ineqs = Vec::new();
    for (v, vert) in g.vertices.iter().enumerate() {
        for h in vert.stalk.hilbert_basis()? {
            let mut row = vec![0; n];
            row[layout.vertex_offsets[v]..layout.vertex_offsets[v] + h.len()].copy_from_slice(h);
            ineqs.push(Constraint::new(row, 1));
        }
    }
    for i in 0..g.edges.len() {
        ineqs.push(Constraint::new(arith::unit_vector(n, layout.edge_offset + i), 1));
    }
    Ok((eqs, ineqs))
}

fn box_points(k: usize, bound: Int, cap: usize) -> Result<Vec<Vector>> {
    let side = usize::try_from(2 * bound + 1).map_err(|_| Error::CapExceeded(cap))?;
    let mut total = 1usize;
    for _ in 0..k {
        total = total.checked_mul(side).filter(|t| *t <= cap).ok_or(Error::CapExceeded(cap))?;
    }
    let mut out = Vec::with_capacity(total);
    let mut c = vec![-bound; k];
    loop {
        out.push(c.clone());
        let mut i = 0;
        loop {
            if i == k {
                return Ok(out);
            }
            if c[i] < bound {
                c[i] += 1;
                break;
            }
            c[i] = -bound;
            i += 1;
        }
    }
}

/// All edge parts `(u_q)` that balance every component and admit an
/// interior point of the dual cone, for fixed `u_p` and `τ`.
pub fn enumerate_edge_types(g: &GhostCurve, u_p: &[Vector], tau: &[Tau], cfg: &EnumerationConfig) -> Result<EdgeEnumeration> {
    if u_p.len() != g.legs.len() {
        return Err(Error::dim("one contact order per leg is required"));
    }
    let Some((base, dirs)) = balanced_edge_lattice(g, u_p, tau)? else {
        return Ok(EdgeEnumeration { types: Vec::new(), completeness: Completeness::Exact, candidates: 0 });
    };
    let (coeffs, completeness) = if dirs.is_empty() {
        (vec![Vec::new()], Completeness::Exact)
    } else {
        let bound = match cfg.cycle_bound {
            Some(b) => b,
            None => default_cycle_bound(u_p, tau)?,
        };
        (box_points(dirs.len(), bound, cfg.cap)?, Completeness::BoundLimited { bound })
    };
    let candidates = coeffs.len();
    let found: Vec<Option<EdgeType>> = coeffs
        .par_iter()
        .map(|c| {
            let mut u = base.clone();
            for (ci, d) in c.iter().zip(&dirs) {
                if *ci != 0 {
                    u = arith::vec_comb(1, &u, *ci, d)?;
                }
            }
            let u_q = split_edges(g, &u);
            Ok(interior_dual_point(g, &u_q)?.map(|certificate| EdgeType { u_q, certificate }))
        })
        .collect::<Result<_>>()?;
    let mut types: Vec<EdgeType> = found.into_iter().flatten().collect();
    types.sort_by_key(|a| a.u_q.concat());
    Ok(EdgeEnumeration { types, completeness, candidates })
}

#[derive(Clone, Debug)]
pub struct TypeEntry {
    pub map_type: MapType,
    pub basic: BasicResult,
    pub certificate: Vector,
}

#[derive(Clone, Debug)]
pub struct TypeEnumeration {
    pub entries: Vec<TypeEntry>,
    pub completeness: Completeness,
    pub assignments: usize,
}

/// Contact assignments, then edge parts, then the basic monoid of each,
/// keeping the pre-stable ones.
pub fn enumerate_types(g: &GhostCurve, tau: &[Tau], contacts: Option<&[Vector]>, cfg: &EnumerationConfig) -> Result<TypeEnumeration> {
    let assignments = match (cfg.mode, contacts) {
        (_, Some(u)) => {
            if cfg.mode == EnumerationMode::QuasiGeneratedFixedContacts {
                let s = ghost::global_sections(g)?;
                let chk = ghost::check_quasi_generated(g, &s)?;
                if !chk.holds {
                    let w = chk.witness.map(|p| g.point_name(p)).unwrap_or_default();
                    return Err(Error::invalid(format!("not quasi-generated: group sections do not span the stalk at {w}")));
                }
            }
            vec![u.to_vec()]
        }
        (EnumerationMode::QuasiGeneratedFixedContacts, None) => {
            return Err(Error::invalid("quasi-generated mode needs the contact orders as input"));
        }
        (EnumerationMode::AlmostGenerated, None) => match enumerate_contact_assignments(g, tau, cfg.cap) {
            Ok(a) => a,
            Err(Error::Infeasible(_)) => Vec::new(),
            Err(e) => return Err(e),
        },
    };
    let per: Vec<EdgeEnumeration> = assignments.iter().map(|u| enumerate_edge_types(g, u, tau, cfg)).collect::<Result<_>>()?;
    let total: usize = per.iter().map(|p| p.candidates).sum();
    if total > cfg.cap {
        return Err(Error::CapExceeded(cfg.cap));
    }
    let completeness = per.iter().fold(Completeness::Exact, |c, p| c.join(p.completeness));
    let jobs: Vec<(MapType, Vector)> = assignments
        .iter()
        .zip(&per)
        .flat_map(|(u, p)| {
            p.types.iter().map(move |et| {
                let t = MapType { u_p: u.clone(), u_q: et.u_q.iter().cloned().map(NodeContact::Known).collect(), tau: tau.to_vec() };
                (t, et.certificate.clone())
            })
        })
        .collect();
    let results: Vec<Option<TypeEntry>> = jobs
        .into_par_iter()
        .map(|(map_type, certificate)| {
            let b = basic::compute_basic_monoid(g, &map_type)?;
            if !basic::check_prestable_ghost(g, &b)?.prestable {
                return Ok(None);
            }
            Ok(Some(TypeEntry { map_type, basic: b, certificate }))
        })
        .collect::<Result<_>>()?;
    let mut entries: Vec<TypeEntry> = results.into_iter().flatten().collect();
    entries.sort_by(|a, b| {
        let ka = (a.map_type.u_p.concat(), a.map_type.edge_part().unwrap_or_default().concat());
        let kb = (b.map_type.u_p.concat(), b.map_type.edge_part().unwrap_or_default().concat());
        ka.cmp(&kb)
    });
    Ok(TypeEnumeration { entries, completeness, assignments: assignments.len() })
}
