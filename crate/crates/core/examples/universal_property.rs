//! Every local point of the dual cone is tropical data, and factors uniquely
//! through the basic monoid.

use loggw::basic::{self, Candidate};
use loggw::{io, tropical};

fn main() -> loggw::Result<()> {
    let g = io::parse_graph(include_str!("../fixtures/twocomponent/graph.json"))?;
    let t = io::parse_type(include_str!("../fixtures/twocomponent/type.json"))?;
    let r = basic::compute_basic_monoid(&g, &t)?;
    println!("Q = {:?}", r.q.hilbert_basis()?);
    for k in 1..=3 {
        let point = vec![k];
        let d = tropical::tropical_data_from_point(&r, &point)?;
        println!("point {point:?}: V = {:?}, e = {:?}", d.v, d.e);
        println!("  recovered u_q = {:?}", tropical::type_from_tropical_data(&g, &d)?);
        let h = basic::factor_through_basic(&g, &r, &Candidate::from_point(&r, &point)?)?;
        println!("  factorization Q -> N: {:?}", h.matrix.to_rows());
    }
    println!("basic: {}", basic::is_basic(&g, &r, &Candidate::of(&r))?);
    Ok(())
}
