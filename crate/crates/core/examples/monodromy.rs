//! Cone complexes of log spaces and the monodromy of their face gluings.

use loggw::{io, tropicalization};

fn main() -> loggw::Result<()> {
    for (name, text) in [
        ("swapped gluing", include_str!("../fixtures/elliptic/skeleton.json")),
        ("identity gluing", include_str!("../fixtures/elliptic/skeleton_identity.json")),
    ] {
        let s = io::parse_skeleton(text)?;
        let c = tropicalization::build_trop(&s)?;
        let rep = tropicalization::is_monodromy_free(&c);
        println!(
            "{name}: {} faces, {} classes, monodromy free: {}",
            c.nodes.len(),
            c.class.iter().collect::<std::collections::BTreeSet<_>>().len(),
            rep.monodromy_free
        );
        if let Some(w) = rep.witness {
            println!("  face self map {:?}", w.map.to_rows());
        }
    }
    Ok(())
}
