//! The tropical curve of a conic in the projective plane, with balancing.

use loggw::basic;
use loggw::io::{self, PointSpec};
use loggw::tropical::{self, CurveLattice};

fn main() -> loggw::Result<()> {
    let g = io::parse_graph(include_str!("../fixtures/toric_conic/graph.json"))?;
    let t = io::parse_type(include_str!("../fixtures/toric_conic/type.json"))?;
    let pf = io::parse_point(include_str!("../fixtures/toric_conic/point.json"), &g)?;
    let r = basic::compute_basic_monoid(&g, &t)?;
    let point = match pf.point {
        PointSpec::Point(p) => p,
        _ => r.q.cone()?.positive_functional()?,
    };
    let d = tropical::tropical_data_from_point(&r, &point)?;
    let (rank, maps) = pf.characters.expect("the fixture carries characters");
    let c = tropical::build_tropical_curve(&g, &t, &d, &CurveLattice::Characters { rank, maps })?;
    for v in &c.vertices {
        println!("vertex {:<3} at {:?}", v.name, v.position);
    }
    for e in &c.edges {
        println!("edge {:<4} {:?} -> {:?}, length {}, weight {:?}", e.name, e.ends[0], e.ends[1], e.length, e.weights[0]);
    }
    for l in &c.legs {
        println!("leg {:<4} at {} direction {:?}", l.name, c.vertices[l.vertex].name, l.direction);
    }
    println!("balanced: {:?}", tropical::check_tropical_balancing(&c)?);
    println!("edge geometry: {}", tropical::check_edge_geometry(&c)?);
    Ok(())
}
