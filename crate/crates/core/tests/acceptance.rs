//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test --test acceptance`.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use loggw::arith::{Int, Vector};
use loggw::basic::{self, Candidate};
use loggw::cli::{self, GenerationMode};
use loggw::ghost::{MapType, NodeContact};
use loggw::{cone, io, tropical, tropicalization};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use common::*;

const SEED: u64 = 0x5eed_2013;
const RANDOM_BASIC_INSTANCES: usize = 200;
const RANDOM_CONES: usize = 500;
const ROUND_TRIP_INSTANCES: usize = 100;
const POINTS_PER_INSTANCE: usize = 5;
const BALANCING_SCAN: Int = 5;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn check(cond: bool, what: &str, failures: &mut Vec<String>) {
    if !cond {
        failures.push(what.to_string());
    }
}

fn conclude(failures: Vec<String>, ok_detail: String) -> Outcome {
    if failures.is_empty() {
        pass(ok_detail)
    } else {
        fail(failures.join("; "))
    }
}

fn basic_doc(case: &str) -> Value {
    let doc = cli::cmd_basic_monoid(&fixture(&format!("{case}/graph.json")), &fixture(&format!("{case}/type.json"))).unwrap();
    doc.result
}

fn vecs(v: &Value) -> Vec<Vec<i64>> {
    serde_json::from_value(v.clone()).unwrap()
}

fn rho_of(doc: &Value, name: &str) -> Vec<i64> {
    let entry = doc["rho"].as_array().unwrap().iter().find(|e| e["name"] == name).unwrap();
    serde_json::from_value(entry["value"].clone()).unwrap()
}

fn criterion_1() -> Outcome {
    let doc = basic_doc("squaremonoideg");
    let mut f = Vec::new();
    let hb = vecs(&doc["Q_hilbert_basis"]);
    check(hb.len() == 4, "Hilbert basis size is not 4", &mut f);
    let rel = vecs(&doc["Q_hilbert_basis_relations"]);
    check(rel.len() == 1, "not exactly one relation", &mut f);
    if rel.len() == 1 && hb.len() == 4 {
        let r = &rel[0];
        let mut signs: Vec<i64> = r.clone();
        signs.sort();
        check(signs == vec![-1, -1, 1, 1], "relation is not of the form e1 + e2 = e3 + e4", &mut f);
        let combo: Vec<i64> = (0..3).map(|j| (0..4).map(|i| r[i] * hb[i][j]).sum()).collect();
        check(combo == vec![0, 0, 0], "reported relation does not hold", &mut f);
        // independent oracle: no other small relation among the four generators
        let mut count = 0;
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                for c in -2i64..=2 {
                    for d in -2i64..=2 {
                        let k = [a, b, c, d];
                        if k == [0; 4] {
                            continue;
                        }
                        if (0..3).all(|j| (0..4).map(|i| k[i] * hb[i][j]).sum::<i64>() == 0) {
                            count += 1;
                            check(k.iter().zip(r).all(|(x, y)| x * r[0] == y * k[0]), "second independent relation found", &mut f);
                        }
                    }
                }
            }
        }
        check(count == 4, "relations with coefficients in [-2,2] are not the multiples of one vector", &mut f);
    }
    let expected = [("q1", vec![1, 0, 0]), ("q2", vec![-1, 0, 1]), ("q3", vec![0, -1, 1]), ("q4", vec![0, 1, 0])];
    for (name, v) in &expected {
        check(&rho_of(&doc, name) == v, &format!("rho[{name}] differs from the printed generator"), &mut f);
    }
    check(doc["prestable"] == true, "not prestable", &mut f);
    conclude(f, "Hilbert basis 4, one relation, images (1,0,0) (-1,0,1) (0,-1,1) (0,1,0)".into())
}

fn criterion_2() -> Outcome {
    let mut f = Vec::new();
    let d1 = basic_doc("example1");
    check(rho_of(&d1, "q2") == vec![0, 0], "example 1: rho[q2] is not 0", &mut f);
    check(d1["prestable"] == false, "example 1: reported prestable", &mut f);
    check(
        d1["prestable_witnesses"].as_array().unwrap().iter().any(|w| w.as_str().unwrap().contains("q2")),
        "example 1: no witness naming q2",
        &mut f,
    );

    let d2 = basic_doc("example2");
    let image = vecs(&d2["image_generators"]);
    check(image.contains(&vec![0, 2]) && image.contains(&vec![0, 3]), "example 2: image lacks (0,2) or (0,3)", &mut f);
    // the image monoid does not contain (0,1): every generator with first entry 0
    // has second entry at least 2
    check(!image.iter().any(|g| g == &vec![0, 1]), "example 2: (0,1) already generated", &mut f);
    check(vecs(&d2["saturation_adds"]) == vec![vec![0, 1]], "example 2: saturation does not add exactly (0,1)", &mut f);

    let d3 = basic_doc("example3");
    let witness: Option<Vec<i64>> = serde_json::from_value(d3["torsion_witness"].clone()).unwrap();
    check(witness == Some(vec![0, 0, 1, -1]), "example 3: torsion witness is not (0,0,1,-1)", &mut f);
    let rv: Vec<Vector> = serde_json::from_value::<Vec<Vec<i64>>>(d3["relation_vectors"].clone())
        .unwrap()
        .into_iter()
        .map(|v| v.into_iter().map(Int::from).collect())
        .collect();
    // oracle: (0,0,1,-1) is a rational but not an integral combination
    match rational_row_solve(&rv, &[0, 0, 1, -1]) {
        Some((_, den)) => check(den > 1, "example 3: (0,0,1,-1) already in the span of the relation vectors", &mut f),
        None => f.push("example 3: (0,0,1,-1) outside the rational span".into()),
    }
    match rational_row_solve(&rv, &[0, 0, 2, -2]) {
        Some((_, den)) => check(den == 1, "example 3: (0,0,2,-2) not in the span", &mut f),
        None => f.push("example 3: (0,0,2,-2) outside the rational span".into()),
    }
    let relations: Vec<Vector> = serde_json::from_value::<Vec<Vec<i64>>>(d3["relations"].clone())
        .unwrap()
        .into_iter()
        .map(|v| v.into_iter().map(Int::from).collect())
        .collect();
    match rational_row_solve(&relations, &[0, 0, 1, -1]) {
        Some((_, den)) => check(den == 1, "example 3: saturated R misses (0,0,1,-1)", &mut f),
        None => f.push("example 3: saturated R misses (0,0,1,-1)".into()),
    }
    conclude(f, "rho[q2] = 0 and not prestable; saturation adds (0,1); R-saturation adds (0,0,1,-1)".into())
}

fn criterion_3() -> Outcome {
    let mut f = Vec::new();
    let d = basic_doc("twocomponent");
    check(vecs(&d["Q_hilbert_basis"]) == vec![vec![1]], "two components: Q is not N", &mut f);
    check(vecs(&d["Q_hilbert_basis_relations"]).is_empty(), "two components: relations present", &mut f);
    let d = basic_doc("toric_conic");
    let hb = vecs(&d["Q_hilbert_basis"]);
    check(hb.len() == 5 && d["Q_rank"] == 5, "toric conic: Hilbert basis size is not 5 in rank 5", &mut f);
    check(vecs(&d["Q_hilbert_basis_relations"]).is_empty(), "toric conic: relations present", &mut f);
    if hb.len() == 5 {
        let m: Vec<Vector> = hb.iter().map(|v| v.iter().map(|&x| Int::from(x)).collect()).collect();
        check(det(&m).abs() == 1, "toric conic: generators are not a lattice basis", &mut f);
    }
    conclude(f, "Q = N and Q = N^5, no relations".into())
}

fn det(m: &[Vector]) -> Int {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vector> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det(&minor)
        })
        .sum()
}

fn criterion_4() -> Outcome {
    let mut f = Vec::new();
    for (case, expected) in [("twocomponent", json!([[1, 1], [1, 1]])), ("squaremonoideg", json!([[1], [1], [1], [1]]))] {
        let doc = cli::cmd_enumerate_types(
            &fixture(&format!("{case}/graph.json")),
            &fixture(&format!("{case}/tau.json")),
            Some(&fixture(&format!("{case}/contacts.json"))),
            GenerationMode::AlmostGenerated,
            None,
            1_000_000,
        )
        .unwrap()
        .result;
        check(doc["completeness"] == "exact", &format!("{case}: status is not exact"), &mut f);
        check(doc["count"] == 1, &format!("{case}: {} types", doc["count"]), &mut f);
        if doc["count"] == 1 {
            check(doc["types"][0]["u_q"] == expected, &format!("{case}: u_q = {}", doc["types"][0]["u_q"]), &mut f);
        }
    }
    conclude(f, "one type each, u_q = (1,1) and u_q = 1, status exact".into())
}

fn criterion_5() -> Outcome {
    let mut f = Vec::new();
    let mut scanned = 0;
    for (case, mu) in [("basicrelative_11", vec![1, 1]), ("basicrelative_2", vec![2])] {
        let g = io::parse_graph(&fixture(&format!("{case}/graph.json"))).unwrap();
        let tau = io::parse_tau(&fixture(&format!("{case}/tau.json"))).unwrap();
        let n = mu.len();
        let mut accepted: Vec<Vector> = Vec::new();
        let total = (2 * BALANCING_SCAN + 1).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let u: Vector = (0..n)
                .map(|_| {
                    let x = c % (2 * BALANCING_SCAN + 1) - BALANCING_SCAN;
                    c /= 2 * BALANCING_SCAN + 1;
                    x
                })
                .collect();
            let t = MapType { u_p: u.iter().map(|&x| vec![x]).collect(), u_q: Vec::<NodeContact>::new(), tau: tau.clone() };
            scanned += 1;
            if let Ok(rep) = tropical::check_component_balancing(&g, &t, 0) {
                if rep.balanced {
                    accepted.push(u);
                }
            }
        }
        check(accepted == vec![mu.clone()], &format!("{case}: accepted {accepted:?}"), &mut f);
    }
    conclude(f, format!("only u = mu balances among {scanned} assignments with |u| <= {BALANCING_SCAN}"))
}

fn sorted(mut v: Vec<Vector>) -> Vec<Vector> {
    v.sort();
    v
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut f = Vec::new();
    let mut done = 0;
    let mut skipped = 0;
    while done < RANDOM_BASIC_INSTANCES {
        let (g, t) = random_instance(&mut rng);
        let r = match basic::compute_basic_monoid(&g, &t) {
            Ok(r) => r,
            Err(loggw::Error::Overflow) => {
                skipped += 1;
                continue;
            }
            Err(e) => {
                f.push(format!("instance {done}: {e}"));
                done += 1;
                continue;
            }
        };
        let direct = basic::dual_basic_cone(&g, &t).unwrap();
        let pt = r.projection.transpose();
        let pulled: Vec<Vector> = r.q.dual().unwrap().generators().iter().map(|x| pt.apply(x).unwrap()).collect();
        if sorted(pulled) != sorted(direct.generators().to_vec()) {
            f.push(format!("instance {done}: dual cones differ"));
        }
        done += 1;
    }
    f.truncate(5);
    conclude(f, format!("{done} random instances agree ({skipped} skipped on overflow)"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let mut f = Vec::new();
    for i in 0..RANDOM_CONES {
        let (n, gens, func) = random_cone(&mut rng);
        let oracle = brute_force_hilbert_basis(n, &gens, &func);
        let got = cone::hilbert_basis(&gens, n);
        match got {
            Ok(h) if sorted(h.clone()) == oracle => {}
            Ok(h) => f.push(format!("cone {i} {gens:?}: got {h:?}, oracle {oracle:?}")),
            Err(e) => f.push(format!("cone {i} {gens:?}: {e}")),
        }
    }
    f.truncate(3);
    conclude(f, format!("{RANDOM_CONES} random cones match the exhaustive oracle"))
}

fn criterion_8() -> Outcome {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let mut f = Vec::new();
    let mut instances = 0;
    let mut points = 0;
    let mut attempts = 0;
    while instances < ROUND_TRIP_INSTANCES && attempts < 100_000 {
        attempts += 1;
        let (g, t) = random_instance(&mut rng);
        let Ok(r) = basic::compute_basic_monoid(&g, &t) else { continue };
        if !basic::check_prestable_ghost(&g, &r).map(|p| p.prestable).unwrap_or(false) {
            continue;
        }
        instances += 1;
        let dual = r.q.dual().unwrap();
        let hb = dual.hilbert_basis().unwrap().to_vec();
        for _ in 0..POINTS_PER_INSTANCE {
            let k = r.q.ambient();
            let mut p: Vector = vec![0; k];
            for h in &hb {
                let c: Int = rng.gen_range(1..=3);
                for (x, y) in p.iter_mut().zip(h) {
                    *x += c * y;
                }
            }
            points += 1;
            // the point is interior: positive on every Hilbert basis element of Q
            if !r.q.hilbert_basis().unwrap().iter().all(|q| dot(q, &p) > 0) {
                f.push(format!("instance {instances}: sampled point {p:?} not interior"));
                continue;
            }
            let d = match tropical::tropical_data_from_point(&r, &p) {
                Ok(d) => d,
                Err(e) => {
                    f.push(format!("instance {instances}: {e}"));
                    continue;
                }
            };
            // oracle: node equations and V in the dual cones, checked directly
            for (q, e) in g.edges.iter().enumerate() {
                let u = t.u_q[q].known().unwrap();
                for m in e.stalk.generators() {
                    let lhs = dot(&d.v[e.ends[1]], &e.chi[1].apply(m).unwrap()) - dot(&d.v[e.ends[0]], &e.chi[0].apply(m).unwrap());
                    if lhs != d.e[q] * dot(u, m) {
                        f.push(format!("instance {instances}: node equation fails at {}", e.name));
                    }
                }
            }
            for (v, vert) in g.vertices.iter().enumerate() {
                if vert.stalk.generators().iter().any(|m| dot(&d.v[v], m) < 0) {
                    f.push(format!("instance {instances}: V outside the dual cone"));
                }
            }
            match tropical::type_from_tropical_data(&g, &d) {
                Ok(u) if u == t.edge_part().unwrap() => {}
                Ok(u) => f.push(format!("instance {instances}: recovered {u:?}")),
                Err(e) => f.push(format!("instance {instances}: {e}")),
            }
            match Candidate::from_point(&r, &p).and_then(|c| basic::factor_through_basic(&g, &r, &c)) {
                Ok(h) if h.matrix.row(0) == &p[..] => {}
                Ok(h) => f.push(format!("instance {instances}: factored through {:?}", h.matrix.row(0))),
                Err(e) => f.push(format!("instance {instances}: {e}")),
            }
        }
    }
    if instances < ROUND_TRIP_INSTANCES {
        f.push(format!("only {instances} prestable instances found"));
    }
    f.truncate(5);
    conclude(f, format!("{instances} prestable instances, {points} interior points"))
}

fn criterion_9() -> Outcome {
    let mut f = Vec::new();
    let s = io::parse_skeleton(&fixture("elliptic/skeleton.json")).unwrap();
    let c = tropicalization::build_trop(&s).unwrap();
    let rep = tropicalization::is_monodromy_free(&c);
    check(!rep.monodromy_free, "swap variant reported monodromy free", &mut f);
    match &rep.witness {
        Some(w) => {
            let rows = w.map.to_rows();
            check(rows == vec![vec![0, 1], vec![1, 0]], &format!("witness map {rows:?} is not the swap"), &mut f);
        }
        None => f.push("no witness".into()),
    }
    let s = io::parse_skeleton(&fixture("elliptic/skeleton_identity.json")).unwrap();
    let rep = tropicalization::is_monodromy_free(&tropicalization::build_trop(&s).unwrap());
    check(rep.monodromy_free && rep.witness.is_none(), "identity variant has monodromy", &mut f);
    conclude(f, "swap witness found; identity variant monodromy free".into())
}

fn criterion_10() -> Outcome {
    let corpus: Value = serde_json::from_str(&fixture("corpus.json")).unwrap();
    let mut f = Vec::new();
    let runs = corpus.as_array().unwrap();
    for r in runs {
        let args: Vec<String> = r["args"].as_array().unwrap().iter().map(|a| a.as_str().unwrap().to_string()).collect();
        let outputs: Vec<Vec<u8>> = ["1", "8"]
            .iter()
            .map(|th| {
                Command::new(env!("CARGO_BIN_EXE_loggw"))
                    .current_dir(fixture_path(""))
                    .args(&args)
                    .args(["--threads", th])
                    .output()
                    .unwrap()
                    .stdout
            })
            .collect();
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            f.push(format!("{} differs", r["name"]));
        }
    }
    conclude(f, format!("{} commands byte-identical with 1 and 8 threads", runs.len()))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        ("quadric cone", criterion_1, Duration::from_secs(1)),
        ("degeneracy detection", criterion_2, Duration::from_secs(1)),
        ("Q = N and Q = N^5", criterion_3, Duration::from_secs(1)),
        ("forced types", criterion_4, Duration::from_secs(5)),
        ("balancing forces tangency", criterion_5, Duration::from_secs(5)),
        ("duality on random instances", criterion_6, Duration::from_secs(60)),
        ("Hilbert bases against exhaustion", criterion_7, Duration::from_secs(60)),
        ("tropical data round trip", criterion_8, Duration::from_secs(60)),
        ("monodromy detection", criterion_9, Duration::from_secs(1)),
        ("determinism across thread counts", criterion_10, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = std::panic::catch_unwind(run).unwrap_or_else(|_| fail("panicked"));
        let elapsed = start.elapsed();
        let in_time = elapsed <= *limit;
        let ok = out.ok && in_time;
        if !ok {
            failed += 1;
        }
        let timing = format!("{:.3} s, limit {} s", elapsed.as_secs_f64(), limit.as_secs());
        let detail = if in_time { out.detail } else { format!("{}; over time", out.detail) };
        println!("criterion {:>2} {}: {} ({timing}) {detail}", i + 1, name, if ok { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
