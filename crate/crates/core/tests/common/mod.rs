#![allow(dead_code)]

use std::path::{Path, PathBuf};

use loggw::arith::{Int, IntMatrix, Vector};
use loggw::ghost::{self, Edge, GhostCurve, Leg, MapType, NodeContact, Vertex};
use loggw::monoid::ToricMonoid;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture(rel: &str) -> String {
    std::fs::read_to_string(fixture_path(rel)).unwrap()
}

pub fn fixture_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Coordinate projection `N^k -> N^r` onto `r` distinct random coordinates.
fn projection<R: Rng>(rng: &mut R, r: usize, k: usize) -> IntMatrix {
    let mut idx: Vec<usize> = (0..k).collect();
    idx.shuffle(rng);
    let mut m = IntMatrix::zeros(r, k);
    for (row, &j) in idx.iter().take(r).enumerate() {
        m.set(row, j, 1);
    }
    m
}

/// A random valid ghost curve with at most 4 vertices and 4 edges, stalks
/// of rank at most 2, and a type with entries in `[-3, 3]`.
pub fn random_instance<R: Rng>(rng: &mut R) -> (GhostCurve, MapType) {
    random_shaped(rng, 4, false)
}

/// As [`random_instance`], with a tree as dual graph.
pub fn random_tree<R: Rng>(rng: &mut R, max_vertices: usize) -> (GhostCurve, MapType) {
    random_shaped(rng, max_vertices, true)
}

fn random_shaped<R: Rng>(rng: &mut R, max_vertices: usize, tree: bool) -> (GhostCurve, MapType) {
    loop {
        let nv = rng.gen_range(1..=max_vertices);
        let ranks: Vec<usize> = (0..nv).map(|_| rng.gen_range(0..=2)).collect();
        let vertices =
            ranks.iter().enumerate().map(|(i, &r)| Vertex { name: format!("v{i}"), genus: None, stalk: ToricMonoid::free(r) }).collect();
        let ne = if tree { nv - 1 } else { rng.gen_range(0..=4) };
        let mut edges = Vec::new();
        let mut u_q = Vec::new();
        for i in 0..ne {
            let ends = if tree { [rng.gen_range(0..=i), i + 1] } else { [rng.gen_range(0..nv), rng.gen_range(0..nv)] };
            let k = rng.gen_range(ranks[ends[0]].max(ranks[ends[1]]).max(1)..=2);
            let chi = [projection(rng, ranks[ends[0]], k), projection(rng, ranks[ends[1]], k)];
            edges.push(Edge { name: format!("q{}", i + 1), ends, stalk: ToricMonoid::free(k), chi });
            u_q.push(NodeContact::Known((0..k).map(|_| rng.gen_range(-3..=3)).collect()));
        }
        let nl = rng.gen_range(0..=2);
        let mut legs = Vec::new();
        let mut u_p = Vec::new();
        for i in 0..nl {
            let v = rng.gen_range(0..nv);
            let k = rng.gen_range(ranks[v]..=2);
            legs.push(Leg { name: format!("p{}", i + 1), vertex: v, stalk: ToricMonoid::free(k), chi: projection(rng, ranks[v], k) });
            u_p.push((0..k).map(|_| rng.gen_range(0..=3)).collect());
        }
        let g = GhostCurve { vertices, edges, legs };
        let t = MapType { u_p, u_q, tau: vec![] };
        if ghost::validate_ghost(&g).unwrap().is_valid() && ghost::validate_type(&g, &t).unwrap().is_valid() {
            return (g, t);
        }
    }
}

/// Degree data making every component of `t` balanced: `τ_x = -u_x`.
pub fn balancing_tau(g: &GhostCurve, t: &MapType) -> Vec<ghost::Tau> {
    (0..g.vertices.len())
        .map(|v| {
            g.special_points(v)
                .into_iter()
                .map(|x| (x, loggw::tropical::contact_at(g, t, x).unwrap().iter().map(|a| -a).collect()))
                .collect()
        })
        .collect()
}

/// A random full-dimensional pointed cone in `Z^n`, `n <= 3`, with
/// generators in `[-5, 5]^n`, together with a functional positive on it.
pub fn random_cone<R: Rng>(rng: &mut R) -> (usize, Vec<Vector>, Vector) {
    loop {
        let n = rng.gen_range(1..=3);
        let f: Vector = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        if f.iter().all(|&x| x == 0) {
            continue;
        }
        let count = rng.gen_range(1..=4);
        let mut gens = Vec::new();
        let mut tries = 0;
        while gens.len() < count && tries < 200 {
            tries += 1;
            let g: Vector = (0..n).map(|_| rng.gen_range(-5..=5)).collect();
            if dot(&f, &g) > 0 && !gens.contains(&g) {
                gens.push(g);
            }
        }
        if !gens.is_empty() && spans(n, &gens) {
            return (n, gens, f);
        }
    }
}

fn cross(a: &[Int], b: &[Int]) -> Vector {
    vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn spans(n: usize, gens: &[Vector]) -> bool {
    match n {
        1 => true,
        2 => gens.iter().any(|a| gens.iter().any(|b| a[0] * b[1] - a[1] * b[0] != 0)),
        _ => gens.iter().any(|a| gens.iter().any(|b| gens.iter().any(|c| dot(&cross(a, b), c) != 0))),
    }
}

/// Inequalities cutting out a full-dimensional cone in dimension at most 3,
/// taken from all normals of hyperplanes spanned by generators.
pub fn facet_normals(n: usize, gens: &[Vector]) -> Vec<Vector> {
    let mut cands: Vec<Vector> = Vec::new();
    match n {
        1 => cands.extend([vec![1], vec![-1]]),
        2 => {
            for g in gens {
                cands.push(vec![-g[1], g[0]]);
                cands.push(vec![g[1], -g[0]]);
            }
        }
        _ => {
            for a in gens {
                for b in gens {
                    let c = cross(a, b);
                    if c.iter().any(|&x| x != 0) {
                        cands.push(c.iter().map(|x| -x).collect());
                        cands.push(c);
                    }
                }
            }
        }
    }
    cands.retain(|a| gens.iter().all(|g| dot(a, g) >= 0));
    cands.sort();
    cands.dedup();
    cands
}

/// Hilbert basis by exhaustion: all lattice points of degree at most the sum
/// of generator degrees, kept greedily when not a sum of earlier elements.
pub fn brute_force_hilbert_basis(n: usize, gens: &[Vector], f: &[Int]) -> Vec<Vector> {
    let normals = facet_normals(n, gens);
    let inside = |x: &[Int]| normals.iter().all(|a| dot(a, x) >= 0);
    let max_deg: Int = gens.iter().map(|g| dot(f, g)).sum();
    let bound: Vec<Int> = (0..n).map(|i| gens.iter().map(|g| g[i].abs()).sum()).collect();
    let mut points = Vec::new();
    let mut x = vec![0; n];
    fn rec(i: usize, x: &mut Vector, bound: &[Int], out: &mut Vec<Vector>) {
        if i == x.len() {
            out.push(x.clone());
            return;
        }
        for v in -bound[i]..=bound[i] {
            x[i] = v;
            rec(i + 1, x, bound, out);
        }
    }
    let mut all = Vec::new();
    rec(0, &mut x, &bound, &mut all);
    for p in all {
        let d = dot(f, &p);
        if d > 0 && d <= max_deg && inside(&p) {
            points.push((d, p));
        }
    }
    points.sort();
    let mut basis: Vec<Vector> = Vec::new();
    for (_, p) in points {
        let reducible = basis.iter().any(|h| {
            let rest: Vector = p.iter().zip(h).map(|(a, b)| a - b).collect();
            inside(&rest)
        });
        if !reducible {
            basis.push(p);
        }
    }
    basis.sort();
    basis
}

/// Solutions of `x * a = b` with `x` rational, as `(numerators, denominator)`,
/// for `a` with independent rows; `None` when `b` is outside the row span.
pub fn rational_row_solve(a: &[Vector], b: &[Int]) -> Option<(Vec<i128>, i128)> {
    use num_rational::Ratio;
    type Q = Ratio<i128>;
    let m = a.len();
    let n = b.len();
    // columns of the augmented system a^T x = b
    let mut rows: Vec<Vec<Q>> = (0..n)
        .map(|j| {
            let mut r: Vec<Q> = (0..m).map(|i| Q::from_integer(a[i][j])).collect();
            r.push(Q::from_integer(b[j]));
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m {
        let Some(p) = (r..n).find(|&i| rows[i][c] != Q::from_integer(0)) else { continue };
        rows.swap(r, p);
        let pv = rows[r][c];
        for x in rows[r].iter_mut() {
            *x /= pv;
        }
        for i in 0..n {
            if i != r && rows[i][c] != Q::from_integer(0) {
                let k = rows[i][c];
                let src = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(src) {
                    *x -= k * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| row[m] != Q::from_integer(0)) {
        return None;
    }
    let mut x = vec![Q::from_integer(0); m];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rows[i][m];
    }
    let den = x.iter().fold(1i128, |acc, v| num_integer_lcm(acc, *v.denom()));
    Some((x.iter().map(|v| (*v * Q::from_integer(den)).to_integer()).collect(), den))
}

fn num_integer_lcm(a: i128, b: i128) -> i128 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}
