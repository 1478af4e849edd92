//! JSON input formats and the versioned output document.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::{Int, IntMatrix, Vector};
use crate::error::{Error, Result};
use crate::ghost::{Edge, GhostCurve, Leg, MapType, NodeContact, Point, SpecialPoint, Tau, Vertex};
use crate::monoid::ToricMonoid;
use crate::tropical::TropicalData;
use crate::tropicalization::{LogSpaceSkeleton, SkeletonPoint, Specialization};

pub const SCHEMA: &str = "loggw/1";

/// An integer given as a JSON number or as a decimal string.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JsonInt(pub Int);

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = JsonInt;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<JsonInt, E> {
                Ok(JsonInt(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<JsonInt, E> {
                Ok(JsonInt(v.into()))
            }
            fn visit_i128<E: de::Error>(self, v: i128) -> std::result::Result<JsonInt, E> {
                Ok(JsonInt(v))
            }
            fn visit_u128<E: de::Error>(self, v: u128) -> std::result::Result<JsonInt, E> {
                Int::try_from(v).map(JsonInt).map_err(|_| E::custom("integer out of range"))
            }
            fn visit_f64<E: de::Error>(self, _: f64) -> std::result::Result<JsonInt, E> {
                Err(E::custom("expected an integer, found a float; use a string for large integers"))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<JsonInt, E> {
                v.trim().parse::<Int>().map(JsonInt).map_err(|_| E::custom(format!("{v:?} is not an integer")))
            }
        }
        d.deserialize_any(V)
    }
}

type JVec = Vec<JsonInt>;

fn vector(v: &[JsonInt]) -> Vector {
    v.iter().map(|x| x.0).collect()
}

fn matrix(rows: &[JVec], nrows: usize, ncols: usize, what: &str) -> Result<IntMatrix> {
    if rows.len() != nrows {
        return Err(Error::dim(format!("{what}: expected {nrows} rows, found {}", rows.len())));
    }
    let rows: Vec<Vector> = rows.iter().map(|r| vector(r)).collect();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::dim(format!("{what}: expected {ncols} columns")));
    }
    if nrows == 0 {
        return Ok(IntMatrix::zeros(0, ncols));
    }
    IntMatrix::from_rows(&rows, ncols)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonoidDoc {
    pub ambient_rank: usize,
    pub generators: Vec<JVec>,
}

impl MonoidDoc {
    pub fn build(&self) -> Result<ToricMonoid> {
        let gens: Vec<Vector> = self.generators.iter().map(|g| vector(g)).collect();
        ToricMonoid::new(self.ambient_rank, &gens)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDoc {
    name: Option<String>,
    genus: Option<u32>,
    stalk: MonoidDoc,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    name: Option<String>,
    ends: [usize; 2],
    stalk: MonoidDoc,
    chi1: Vec<JVec>,
    chi2: Vec<JVec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LegDoc {
    name: Option<String>,
    vertex: usize,
    stalk: MonoidDoc,
    chi: Vec<JVec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: Vec<VertexDoc>,
    #[serde(default)]
    edges: Vec<EdgeDoc>,
    #[serde(default)]
    legs: Vec<LegDoc>,
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::invalid(format!("{what}: {e}")))
}

pub fn parse_graph(text: &str) -> Result<GhostCurve> {
    let doc: GraphDoc = parse(text, "graph file")?;
    let mut vertices = Vec::new();
    for (i, v) in doc.vertices.iter().enumerate() {
        vertices.push(Vertex { name: v.name.clone().unwrap_or_else(|| format!("v{i}")), genus: v.genus, stalk: v.stalk.build()? });
    }
    let rank =
        |v: usize| -> Result<usize> { vertices.get(v).map(|x| x.stalk.ambient()).ok_or_else(|| Error::invalid(format!("no vertex {v}"))) };
    let mut edges = Vec::new();
    for (i, e) in doc.edges.iter().enumerate() {
        let name = e.name.clone().unwrap_or_else(|| format!("q{}", i + 1));
        let stalk = e.stalk.build()?;
        let r = stalk.ambient();
        let chi1 = matrix(&e.chi1, rank(e.ends[0])?, r, &format!("chi1 of edge {name}"))?;
        let chi2 = matrix(&e.chi2, rank(e.ends[1])?, r, &format!("chi2 of edge {name}"))?;
        edges.push(Edge { name, ends: e.ends, stalk, chi: [chi1, chi2] });
    }
    let mut legs = Vec::new();
    for (i, l) in doc.legs.iter().enumerate() {
        let name = l.name.clone().unwrap_or_else(|| format!("p{}", i + 1));
        let stalk = l.stalk.build()?;
        let chi = matrix(&l.chi, rank(l.vertex)?, stalk.ambient(), &format!("chi of leg {name}"))?;
        legs.push(Leg { name, vertex: l.vertex, stalk, chi });
    }
    Ok(GhostCurve { vertices, edges, legs })
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum PointKey {
    Named(String),
    Leg { leg: usize },
    End { edge: usize, side: u8 },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TauEntry {
    point: PointKey,
    value: JVec,
}

fn tau_from(doc: &[Vec<TauEntry>]) -> Result<Vec<Tau>> {
    let mut out = Vec::new();
    for entries in doc {
        let mut tau = Tau::new();
        for e in entries {
            let x = match &e.point {
                PointKey::Named(s) if s == "generic" => SpecialPoint::Generic,
                PointKey::Named(s) => return Err(Error::invalid(format!("unknown special point {s:?}"))),
                PointKey::Leg { leg } => SpecialPoint::Leg(*leg),
                PointKey::End { edge, side } => {
                    if *side != 1 && *side != 2 {
                        return Err(Error::invalid("edge side must be 1 or 2"));
                    }
                    SpecialPoint::EdgeEnd { edge: *edge, side: *side }
                }
            };
            if tau.insert(x, vector(&e.value)).is_some() {
                return Err(Error::invalid(format!("duplicate degree entry at {x}")));
            }
        }
        out.push(tau);
    }
    Ok(out)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum ContactDoc {
    Known(JVec),
    Marker(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TypeDoc {
    #[serde(default)]
    u_p: Vec<JVec>,
    #[serde(default)]
    u_q: Vec<ContactDoc>,
    #[serde(default)]
    tau: Vec<Vec<TauEntry>>,
}

pub fn parse_type(text: &str) -> Result<MapType> {
    let doc: TypeDoc = parse(text, "type file")?;
    let u_q = doc
        .u_q
        .iter()
        .map(|c| match c {
            ContactDoc::Known(v) => Ok(NodeContact::Known(vector(v))),
            ContactDoc::Marker(s) if s == "undetermined" => Ok(NodeContact::Undetermined),
            ContactDoc::Marker(s) => Err(Error::invalid(format!("unknown node contact marker {s:?}"))),
        })
        .collect::<Result<_>>()?;
    Ok(MapType { u_p: doc.u_p.iter().map(|v| vector(v)).collect(), u_q, tau: tau_from(&doc.tau)? })
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TauDoc {
    tau: Vec<Vec<TauEntry>>,
}

pub fn parse_tau(text: &str) -> Result<Vec<Tau>> {
    let doc: TauDoc = parse(text, "degree file")?;
    tau_from(&doc.tau)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContactsDoc {
    u_p: Vec<JVec>,
}

pub fn parse_contacts(text: &str) -> Result<Vec<Vector>> {
    let doc: ContactsDoc = parse(text, "contacts file")?;
    Ok(doc.u_p.iter().map(|v| vector(v)).collect())
}

/// How the point of `Q^∨` is chosen for a tropical curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointSpec {
    /// An explicit local map `Q -> N`.
    Point(Vector),
    /// The sum of the rays of `Q^∨`.
    Interior,
    /// Tropical data given directly.
    Data(TropicalData),
}

/// A point specification with optional character maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointFile {
    pub point: PointSpec,
    pub characters: Option<(usize, BTreeMap<Point, IntMatrix>)>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum PointValue {
    Vector(JVec),
    Word(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DataDoc {
    v: Vec<JVec>,
    e: JVec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CharactersDoc {
    rank: usize,
    vertices: Vec<Vec<JVec>>,
    #[serde(default)]
    edges: Vec<Vec<JVec>>,
    #[serde(default)]
    legs: Vec<Vec<JVec>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    point: Option<PointValue>,
    tropical_data: Option<DataDoc>,
    characters: Option<CharactersDoc>,
}

type CharacterGroup<'a> = (&'a Vec<Vec<JVec>>, fn(usize) -> Point);

pub fn parse_point(text: &str, g: &GhostCurve) -> Result<PointFile> {
    let doc: PointDoc = parse(text, "point file")?;
    let point = match (&doc.point, &doc.tropical_data) {
        (Some(PointValue::Vector(v)), None) => PointSpec::Point(vector(v)),
        (Some(PointValue::Word(w)), None) if w == "interior" => PointSpec::Interior,
        (Some(PointValue::Word(w)), None) => return Err(Error::invalid(format!("unknown point {w:?}"))),
        (None, Some(d)) => PointSpec::Data(TropicalData { v: d.v.iter().map(|x| vector(x)).collect(), e: vector(&d.e) }),
        _ => return Err(Error::invalid("point file needs exactly one of `point` and `tropical_data`")),
    };
    let characters = match &doc.characters {
        None => None,
        Some(c) => {
            if c.vertices.len() != g.vertices.len() || c.edges.len() != g.edges.len() || c.legs.len() != g.legs.len() {
                return Err(Error::dim("one character map per vertex, edge and leg is required"));
            }
            let mut maps = BTreeMap::new();
            let groups: [CharacterGroup; 3] = [(&c.vertices, Point::Vertex), (&c.edges, Point::Edge), (&c.legs, Point::Leg)];
            for (list, mk) in groups {
                for (i, m) in list.iter().enumerate() {
                    let p = mk(i);
                    maps.insert(p, matrix(m, g.rank(p), c.rank, &format!("character map of {}", g.point_name(p)))?);
                }
            }
            Some((c.rank, maps))
        }
    };
    Ok(PointFile { point, characters })
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum PointRef {
    Index(usize),
    Name(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SkeletonPointDoc {
    name: String,
    stalk: MonoidDoc,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecializationDoc {
    from: PointRef,
    to: PointRef,
    hom: Vec<JVec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SkeletonDoc {
    points: Vec<SkeletonPointDoc>,
    #[serde(default)]
    specializations: Vec<SpecializationDoc>,
}

pub fn parse_skeleton(text: &str) -> Result<LogSpaceSkeleton> {
    let doc: SkeletonDoc = parse(text, "skeleton file")?;
    let points: Vec<SkeletonPoint> =
        doc.points.iter().map(|p| Ok(SkeletonPoint { name: p.name.clone(), stalk: p.stalk.build()? })).collect::<Result<_>>()?;
    let resolve = |r: &PointRef| -> Result<usize> {
        match r {
            PointRef::Index(i) if *i < points.len() => Ok(*i),
            PointRef::Index(i) => Err(Error::invalid(format!("no point {i}"))),
            PointRef::Name(n) => points.iter().position(|p| &p.name == n).ok_or_else(|| Error::invalid(format!("no point named {n:?}"))),
        }
    };
    let mut specializations = Vec::new();
    for s in &doc.specializations {
        let (from, to) = (resolve(&s.from)?, resolve(&s.to)?);
        let hom = matrix(&s.hom, points[to].stalk.ambient(), points[from].stalk.ambient(), "specialization hom")?;
        specializations.push(Specialization { from, to, hom });
    }
    Ok(LogSpaceSkeleton { points, specializations })
}

/// Output conversion for integer data. Values outside the `i64` range are
/// written as decimal strings, mirroring what the input formats accept.
pub trait Wide {
    fn wide(&self) -> Value;
}

impl Wide for Int {
    fn wide(&self) -> Value {
        match i64::try_from(*self) {
            Ok(x) => Value::from(x),
            Err(_) => Value::String(self.to_string()),
        }
    }
}

impl<T: Wide> Wide for [T] {
    fn wide(&self) -> Value {
        Value::Array(self.iter().map(Wide::wide).collect())
    }
}

impl<T: Wide> Wide for Vec<T> {
    fn wide(&self) -> Value {
        self.as_slice().wide()
    }
}

impl<T: Wide, const N: usize> Wide for [T; N] {
    fn wide(&self) -> Value {
        self.as_slice().wide()
    }
}

impl<T: Wide> Wide for Option<T> {
    fn wide(&self) -> Value {
        self.as_ref().map_or(Value::Null, Wide::wide)
    }
}

impl Wide for IntMatrix {
    fn wide(&self) -> Value {
        self.to_rows().wide()
    }
}

/// `serialize_with` adapter for [`Wide`] fields.
pub fn wide<T: Wide, S: serde::Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    x.wide().serialize(s)
}

pub fn monoid_json(m: &ToricMonoid) -> Result<Value> {
    Ok(json!({ "ambient_rank": m.ambient(), "hilbert_basis": m.hilbert_basis()?.wide() }))
}

pub fn tau_json(tau: &[Tau]) -> Value {
    Value::Array(
        tau.iter()
            .map(|t| {
                Value::Array(
                    t.iter()
                        .map(|(x, v)| {
                            let point = match x {
                                SpecialPoint::Generic => json!("generic"),
                                SpecialPoint::Leg(i) => json!({ "leg": i }),
                                SpecialPoint::EdgeEnd { edge, side } => json!({ "edge": edge, "side": side }),
                            };
                            json!({ "point": point, "value": v.wide() })
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn contact_json(u: &NodeContact) -> Value {
    match u {
        NodeContact::Known(v) => v.wide(),
        NodeContact::Undetermined => json!("undetermined"),
    }
}

/// The self-describing output document.
#[derive(Clone, Debug, Serialize)]
pub struct Document {
    pub schema: &'static str,
    pub command: String,
    pub result: Value,
}

impl Document {
    pub fn new(command: &str, result: Value) -> Self {
        Document { schema: SCHEMA, command: command.into(), result }
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_as_strings() {
        let m: MonoidDoc =
            serde_json::from_str(r#"{"ambient_rank": 2, "generators": [["1", 0], [0, "170141183460469231731687303715884105727"]]}"#)
                .unwrap();
        assert_eq!(m.generators[1][1].0, i128::MAX);
        assert!(serde_json::from_str::<MonoidDoc>(r#"{"ambient_rank": 1, "generators": [[1.5]]}"#).is_err());
        assert!(serde_json::from_str::<MonoidDoc>(r#"{"ambient_rank": 1, "generators": [], "extra": 1}"#).is_err());
        assert_eq!(vec![1, i128::MAX].wide(), json!([1, "170141183460469231731687303715884105727"]));
        assert_eq!((-(1i128 << 63)).wide(), json!(i64::MIN));
    }

    #[test]
    fn graph_and_type() {
        let g = parse_graph(
            r#"{"vertices": [{"stalk": {"ambient_rank": 1, "generators": [[1]]}}, {"name": "D4", "stalk": {"ambient_rank": 0, "generators": []}}],
                "edges": [{"ends": [1, 0], "stalk": {"ambient_rank": 1, "generators": [[1]]}, "chi1": [], "chi2": [[1]]}],
                "legs": [{"vertex": 0, "stalk": {"ambient_rank": 1, "generators": [[1]]}, "chi": [[1]]}]}"#,
        )
        .unwrap();
        assert_eq!(g.edges[0].chi[0].nrows(), 0);
        assert_eq!(g.edges[0].chi[0].ncols(), 1);
        assert_eq!(g.vertices[0].name, "v0");
        let t = parse_type(r#"{"u_p": [[2]], "u_q": ["undetermined"], "tau": [[], [{"point": {"edge": 0, "side": 1}, "value": [-1]}]]}"#)
            .unwrap();
        assert_eq!(t.u_q[0], NodeContact::Undetermined);
        assert_eq!(t.tau[1][&SpecialPoint::EdgeEnd { edge: 0, side: 1 }], vec![-1]);
        assert!(parse_type(r#"{"u_q": ["maybe"]}"#).is_err());
        assert!(parse_graph(r#"{"vertices": [], "bogus": []}"#).is_err());
    }

    #[test]
    fn skeleton_by_name() {
        let s = parse_skeleton(
            r#"{"points": [{"name": "x", "stalk": {"ambient_rank": 2, "generators": [[1,0],[0,1]]}}, {"name": "y", "stalk": {"ambient_rank": 1, "generators": [[1]]}}],
                "specializations": [{"from": "x", "to": 1, "hom": [[1, 0]]}]}"#,
        )
        .unwrap();
        assert_eq!(s.specializations[0].from, 0);
        assert_eq!(s.specializations[0].hom.ncols(), 2);
    }
}
