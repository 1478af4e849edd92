//! Almost and quasi generation of ghost sheaves by global sections.

use loggw::{ghost, io};

fn main() -> loggw::Result<()> {
    for (name, text) in [
        ("A_2 singularity", include_str!("../fixtures/a_singularity/graph.json")),
        ("two components", include_str!("../fixtures/twocomponent/graph.json")),
        ("square", include_str!("../fixtures/squaremonoideg/graph.json")),
    ] {
        let g = io::parse_graph(text)?;
        let s = ghost::global_sections(&g)?;
        let almost = ghost::check_almost_generated(&g, &s)?;
        let quasi = ghost::check_quasi_generated(&g, &s)?;
        println!("{name}: sections {:?}, almost generated {}, quasi generated {}", s.monoid.hilbert_basis()?, almost.holds, quasi.holds);
    }
    Ok(())
}
