//! Enumerating the pre-stable types with given degree data.

use loggw::finiteness::{self, EnumerationConfig};
use loggw::io;

fn main() -> loggw::Result<()> {
    let g = io::parse_graph(include_str!("../fixtures/basicrelative_11/graph.json"))?;
    let tau = io::parse_tau(include_str!("../fixtures/basicrelative_11/tau.json"))?;
    let res = finiteness::enumerate_types(&g, &tau, None, &EnumerationConfig::default())?;
    println!("{} types, {:?}, {} contact assignments", res.entries.len(), res.completeness, res.assignments);
    for e in &res.entries {
        println!("  u_p = {:?}  Q = {:?}", e.map_type.u_p, e.basic.q.hilbert_basis()?);
    }

    let g = io::parse_graph(include_str!("../fixtures/squaremonoideg/graph.json"))?;
    let tau = io::parse_tau(include_str!("../fixtures/squaremonoideg/tau.json"))?;
    let contacts = io::parse_contacts(include_str!("../fixtures/squaremonoideg/contacts.json"))?;
    let res = finiteness::enumerate_types(&g, &tau, Some(&contacts), &EnumerationConfig::default())?;
    println!("square: {} types, {:?}", res.entries.len(), res.completeness);
    for e in &res.entries {
        println!("  u_q = {:?}  certificate {:?}", e.map_type.edge_part()?, e.certificate);
    }
    Ok(())
}
