//! The `loggw` command line.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::arith::{Int, IntMatrix, Vector};
use crate::basic::{self, BasicResult, Layout};
use crate::error::{Error, Result};
use crate::finiteness::{self, Completeness, EnumerationConfig, EnumerationMode};
use crate::ghost::{self, GhostCurve, MapType};
use crate::io::{self, Document, PointSpec, Wide};
use crate::normal_form;
use crate::tropical::{self, CurveLattice, TropicalData};
use crate::tropicalization;

#[derive(Debug, Parser)]
#[command(name = "loggw", version, about = "Basic monoids, type enumeration and tropicalization of log curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads for parallel steps.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Write the output document here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenerationMode {
    AlmostGenerated,
    QuasiGenerated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LatticeMode {
    Sections,
    GroupSections,
    Characters,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Basic monoid of a type.
    BasicMonoid {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long = "type")]
        type_: PathBuf,
    },
    /// All pre-stable types with given degree data.
    EnumerateTypes {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        tau: PathBuf,
        #[arg(long)]
        contacts: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = GenerationMode::AlmostGenerated)]
        mode: GenerationMode,
        #[arg(long)]
        cycle_bound: Option<Int>,
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// Cone complex of a log space skeleton.
    Tropicalize {
        #[arg(long)]
        skeleton: PathBuf,
    },
    /// Tropical curve of a type at a point of the dual basic cone.
    TropCurve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long = "type")]
        type_: PathBuf,
        #[arg(long)]
        point: PathBuf,
        #[arg(long, value_enum, default_value_t = LatticeMode::Sections)]
        mode: LatticeMode,
    },
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invalid(_) | Error::Dimension(_) | Error::NotAFace(_) | Error::Undetermined(_) | Error::Infeasible(_) => 2,
        Error::Overflow | Error::Capacity(_) => 3,
        Error::CapExceeded(_) => 4,
        Error::Internal(_) => 5,
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn load_graph(text: &str) -> Result<GhostCurve> {
    let g = io::parse_graph(text)?;
    ghost::validate_ghost(&g)?.into_result()?;
    Ok(g)
}

fn load_type(g: &GhostCurve, text: &str) -> Result<MapType> {
    let t = io::parse_type(text)?;
    ghost::validate_type(g, &t)?.into_result()?;
    Ok(t)
}

fn named<T: Wide>(names: impl Iterator<Item = String>, values: &[T]) -> Value {
    Value::Array(names.zip(values).map(|(n, v)| json!({ "name": n, "value": v.wide() })).collect())
}

fn basic_json(g: &GhostCurve, r: &BasicResult) -> Result<Value> {
    let hb = r.q.hilbert_basis()?.to_vec();
    let hb_relations =
        if hb.is_empty() { Vec::new() } else { normal_form::kernel(&IntMatrix::from_rows(&hb, r.q.ambient())?.transpose())? };
    let pre = basic::check_prestable_ghost(g, r)?;
    Ok(json!({
        "Q_rank": r.q.ambient(),
        "Q_hilbert_basis": hb.wide(),
        "Q_hilbert_basis_relations": hb_relations.wide(),
        "relation_vectors": r.relation_vectors.iter().map(|a| a.vector.wide()).collect::<Vec<_>>(),
        "relations": r.relations.basis.wide(),
        "torsion": r.torsion.wide(),
        "torsion_witness": r.torsion_witness.wide(),
        "image_generators": r.image.generators().wide(),
        "saturation_adds": r.saturation_adds.wide(),
        "rho": named(g.edges.iter().map(|e| e.name.clone()), &r.rho),
        "phi": named(g.vertices.iter().map(|v| v.name.clone()), &r.phi),
        "prestable": pre.prestable,
        "prestable_witnesses": pre.witnesses,
    }))
}

pub fn cmd_basic_monoid(graph: &str, typ: &str) -> Result<Document> {
    let g = load_graph(graph)?;
    let t = load_type(&g, typ)?;
    let r = basic::compute_basic_monoid(&g, &t)?;
    Ok(Document::new("basic-monoid", basic_json(&g, &r)?))
}

fn certificate_json(g: &GhostCurve, x: &[Int]) -> Value {
    let layout = Layout::of(g);
    let v: Vec<Vector> = (0..g.vertices.len()).map(|i| layout.vertex_block(i, x).to_vec()).collect();
    json!({ "v": v.wide(), "e": x[layout.edge_offset..].wide() })
}

pub fn cmd_enumerate_types(
    graph: &str,
    tau: &str,
    contacts: Option<&str>,
    mode: GenerationMode,
    cycle_bound: Option<Int>,
    cap: usize,
) -> Result<Document> {
    let g = load_graph(graph)?;
    let tau = io::parse_tau(tau)?;
    if tau.len() != g.vertices.len() {
        return Err(Error::invalid(format!("degree data for {} of {} vertices", tau.len(), g.vertices.len())));
    }
    let contacts = contacts.map(io::parse_contacts).transpose()?;
    if let Some(u) = &contacts {
        let t = MapType { u_p: u.clone(), u_q: vec![ghost::NodeContact::Undetermined; g.edges.len()], tau: tau.clone() };
        ghost::validate_type(&g, &t)?.into_result()?;
    }
    let cfg = EnumerationConfig {
        mode: match mode {
            GenerationMode::AlmostGenerated => EnumerationMode::AlmostGenerated,
            GenerationMode::QuasiGenerated => EnumerationMode::QuasiGeneratedFixedContacts,
        },
        cycle_bound,
        cap,
    };
    let e = finiteness::enumerate_types(&g, &tau, contacts.as_deref(), &cfg)?;
    let (status, bound) = match e.completeness {
        Completeness::Exact => ("exact", Value::Null),
        Completeness::BoundLimited { bound } => ("bound_limited", bound.wide()),
    };
    let mut types = Vec::new();
    for entry in &e.entries {
        types.push(json!({
            "u_p": entry.map_type.u_p.wide(),
            "u_q": entry.map_type.edge_part()?.wide(),
            "Q_hilbert_basis": entry.basic.q.hilbert_basis()?.wide(),
            "rho": named(g.edges.iter().map(|x| x.name.clone()), &entry.basic.rho),
            "certificate": certificate_json(&g, &entry.certificate),
        }));
    }
    Ok(Document::new(
        "enumerate-types",
        json!({
            "completeness": status,
            "cycle_bound": bound,
            "contact_assignments": e.assignments,
            "count": types.len(),
            "types": types,
        }),
    ))
}

pub fn cmd_tropicalize(skeleton: &str) -> Result<Document> {
    let s = io::parse_skeleton(skeleton)?;
    let c = tropicalization::build_trop(&s)?;
    let rep = tropicalization::is_monodromy_free(&c);
    let face = |i: usize| json!({ "point": c.names[c.nodes[i].point], "face": c.nodes[i].face.wide() });
    let mut classes: Vec<usize> = c.class.clone();
    classes.sort();
    classes.dedup();
    let points: Vec<Value> = s
        .points
        .iter()
        .zip(&c.cones)
        .map(|(p, cone)| Ok(json!({ "name": p.name, "cone_hilbert_basis": cone.hilbert_basis()?.wide() })))
        .collect::<Result<_>>()?;
    let witness = match &rep.witness {
        None => Value::Null,
        Some(w) => json!({
            "point": w.point,
            "face": w.face.wide(),
            "self_map": w.map.wide(),
            "specialization": w.via,
        }),
    };
    Ok(Document::new(
        "tropicalize",
        json!({
            "points": points,
            "faces": c.nodes.len(),
            "face_classes": classes.len(),
            "face_maps": c.maps.iter().map(|m| json!({
                "specialization": m.specialization,
                "from": face(m.from),
                "to": face(m.to),
                "matrix": m.matrix.wide(),
            })).collect::<Vec<_>>(),
            "face_maps_valid": c.check_face_maps(&s)?,
            "monodromy_free": rep.monodromy_free,
            "witness": witness,
        }),
    ))
}

pub fn cmd_trop_curve(graph: &str, typ: &str, point: &str, mode: LatticeMode) -> Result<Document> {
    let g = load_graph(graph)?;
    let t = load_type(&g, typ)?;
    let pf = io::parse_point(point, &g)?;
    let d = match &pf.point {
        PointSpec::Data(d) => {
            if tropical::type_from_tropical_data(&g, d)? != t.edge_part()? {
                return Err(Error::invalid("tropical data does not realize the node contact orders of the type"));
            }
            d.clone()
        }
        PointSpec::Point(p) => tropical::tropical_data_from_point(&basic::compute_basic_monoid(&g, &t)?, p)?,
        PointSpec::Interior => {
            let r = basic::compute_basic_monoid(&g, &t)?;
            let p = r.q.cone()?.positive_functional()?;
            tropical::tropical_data_from_point(&r, &p)?
        }
    };
    let lattice = match (mode, pf.characters) {
        (LatticeMode::Sections, _) => CurveLattice::Sections,
        (LatticeMode::GroupSections, _) => CurveLattice::GroupSections,
        (LatticeMode::Characters, Some((rank, maps))) => CurveLattice::Characters { rank, maps },
        (LatticeMode::Characters, None) => return Err(Error::invalid("characters mode needs `characters` in the point file")),
    };
    let c = tropical::build_tropical_curve(&g, &t, &d, &lattice)?;
    let balanced = tropical::check_tropical_balancing(&c)?;
    Ok(Document::new(
        "trop-curve",
        json!({
            "denominator": 1,
            "tropical_data": tropical_json(&d),
            "curve": c,
            "balanced": balanced,
            "edge_geometry": tropical::check_edge_geometry(&c)?,
        }),
    ))
}

fn tropical_json(d: &TropicalData) -> Value {
    json!({ "v": d.v.wide(), "e": d.e.wide() })
}

fn dispatch(cli: &Cli) -> Result<Document> {
    match &cli.command {
        Command::BasicMonoid { graph, type_ } => cmd_basic_monoid(&read(graph)?, &read(type_)?),
        Command::EnumerateTypes { graph, tau, contacts, mode, cycle_bound, cap } => {
            let contacts = contacts.as_deref().map(read).transpose()?;
            cmd_enumerate_types(&read(graph)?, &read(tau)?, contacts.as_deref(), *mode, *cycle_bound, *cap)
        }
        Command::Tropicalize { skeleton } => cmd_tropicalize(&read(skeleton)?),
        Command::TropCurve { graph, type_, point, mode } => cmd_trop_curve(&read(graph)?, &read(type_)?, &read(point)?, *mode),
    }
}

/// Run one job with `threads` workers and return the rendered document.
pub fn execute(cli: &Cli) -> Result<String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli)).map(|d| d.render())
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let written = match &cli.out {
                Some(p) => std::fs::write(p, &text).map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) => 0,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    2
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
