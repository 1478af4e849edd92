//! The basic monoid of a type on a ghost curve: four nodes forming a square.

use loggw::{basic, io};

fn main() -> loggw::Result<()> {
    let g = io::parse_graph(include_str!("../fixtures/squaremonoideg/graph.json"))?;
    let t = io::parse_type(include_str!("../fixtures/squaremonoideg/type.json"))?;
    let r = basic::compute_basic_monoid(&g, &t)?;
    println!("Q has rank {} and Hilbert basis {:?}", r.q.ambient(), r.q.hilbert_basis()?);
    for (e, rho) in g.edges.iter().zip(&r.rho) {
        println!("rho[{}] = {:?}", e.name, rho);
    }
    let pre = basic::check_prestable_ghost(&g, &r)?;
    println!("prestable: {}", pre.prestable);

    // a type where one node collapses: rho vanishes and the witness names it
    let g = io::parse_graph(include_str!("../fixtures/example1/graph.json"))?;
    let t = io::parse_type(include_str!("../fixtures/example1/type.json"))?;
    let r = basic::compute_basic_monoid(&g, &t)?;
    let pre = basic::check_prestable_ghost(&g, &r)?;
    println!("degenerate case prestable: {} {:?}", pre.prestable, pre.witnesses);
    Ok(())
}
