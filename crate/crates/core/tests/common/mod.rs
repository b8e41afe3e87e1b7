#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::Rng;
use stabrel::diag::{self, Diagram, ParseOptions};
use stabrel::stab::{self, DoubledSystem, GradedRelation, Phase, WireType, WireVars};
use stabrel::{AffineRelation, Error, Prime, Subspace};

pub fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixtures_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn resolve(name: &str) -> stabrel::Result<String> {
    std::fs::read_to_string(fixtures_dir().join(format!("{name}.diag")))
        .map_err(|e| Error::Diagram(format!("box `{name}`: {e}")))
}

/// Parses a fixture diagram, optionally over another field.
pub fn load(name: &str, p: Option<u64>) -> Diagram {
    let opts = ParseOptions {
        p: p.map(prime),
        resolver: Some(&resolve),
    };
    diag::parse_with(&read_fixture(name), &opts).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn load_affine(name: &str, p: u64) -> AffineRelation {
    load(name, Some(p)).evaluate_affine().unwrap()
}

pub fn load_doubled(name: &str, p: u64) -> GradedRelation {
    load(name, Some(p)).evaluate_doubled().unwrap()
}

/// Names of every `<name>.lhs.diag` / `<name>.rhs.diag` pair.
pub fn equation_pairs() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(fixtures_dir().join("equations"))
        .unwrap()
        .filter_map(|e| {
            let f = e.ok()?.file_name().into_string().ok()?;
            f.strip_suffix(".lhs.diag").map(str::to_string)
        })
        .collect();
    names.sort();
    names
}

// ------------------------------------------------------------ brute force

/// All vectors of `F_p^n`, in lexicographic order.
pub fn all_vectors(p: Prime, n: usize) -> Vec<Vec<u32>> {
    let q = p.get();
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..q).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

pub type PointSet = BTreeSet<Vec<u32>>;

/// The relation as an explicit set, by membership tests over the whole space.
pub fn enumerate(r: &AffineRelation) -> PointSet {
    all_vectors(r.prime(), r.arity())
        .into_iter()
        .filter(|v| r.contains(v))
        .collect()
}

/// `{(x, z) : ∃y. (x, y) ∈ a, (y, z) ∈ b}`.
pub fn set_compose(a: &PointSet, b: &PointSet, dom: usize, mid: usize) -> PointSet {
    let mut out = BTreeSet::new();
    for u in a {
        for w in b {
            if u[dom..dom + mid] == w[..mid] {
                let mut v = u[..dom].to_vec();
                v.extend_from_slice(&w[mid..]);
                out.insert(v);
            }
        }
    }
    out
}

/// `{(x₁x₂, y₁y₂)}` for `(x₁,y₁) ∈ a` and `(x₂,y₂) ∈ b`.
pub fn set_tensor(a: &PointSet, b: &PointSet, dom_a: usize, dom_b: usize) -> PointSet {
    let mut out = BTreeSet::new();
    for u in a {
        for w in b {
            let mut v = u[..dom_a].to_vec();
            v.extend_from_slice(&w[..dom_b]);
            v.extend_from_slice(&u[dom_a..]);
            v.extend_from_slice(&w[dom_b..]);
            out.insert(v);
        }
    }
    out
}

pub fn set_converse(a: &PointSet, dom: usize) -> PointSet {
    a.iter()
        .map(|u| u[dom..].iter().chain(&u[..dom]).copied().collect())
        .collect()
}

/// `{v : vᵀw = 0 for all w ∈ a}`.
pub fn set_complement(p: Prime, a: &PointSet, n: usize) -> PointSet {
    all_vectors(p, n)
        .into_iter()
        .filter(|v| {
            a.iter().all(|w| {
                v.iter()
                    .zip(w)
                    .fold(0u64, |acc, (&x, &y)| (acc + u64::from(x) * u64::from(y)) % u64::from(p.get()))
                    == 0
            })
        })
        .collect()
}

// ------------------------------------------------------------ random data

pub fn random_vector(rng: &mut StdRng, p: Prime, n: usize) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..p.get())).collect()
}

pub fn random_subspace(rng: &mut StdRng, p: Prime, n: usize) -> Subspace {
    let k = rng.gen_range(0..=n);
    let rows: Vec<Vec<u32>> = (0..k).map(|_| random_vector(rng, p, n)).collect();
    Subspace::span(p, n, &rows).unwrap()
}

/// A random relation; roughly one in ten is empty, and about half are linear.
pub fn random_relation(rng: &mut StdRng, p: Prime, dom: usize, cod: usize) -> AffineRelation {
    let n = dom + cod;
    if rng.gen_ratio(1, 10) {
        return AffineRelation::empty(p, dom, cod);
    }
    let lin = random_subspace(rng, p, n);
    let point = if rng.gen_bool(0.5) {
        vec![0; n]
    } else {
        random_vector(rng, p, n)
    };
    AffineRelation::from_parts(p, dom, cod, &point, &lin).unwrap()
}

pub fn random_linear_relation(rng: &mut StdRng, p: Prime, dom: usize, cod: usize) -> AffineRelation {
    let lin = random_subspace(rng, p, dom + cod);
    AffineRelation::from_parts(p, dom, cod, &vec![0; dom + cod], &lin).unwrap()
}

pub fn random_phase(rng: &mut StdRng, p: Prime) -> Phase {
    Phase {
        affine: rng.gen_range(0..p.get()),
        linear: rng.gen_range(0..p.get()),
    }
}

/// A random circuit on quantum wires built from pure generators, optionally
/// with discards, codiscards and Z projectors mixed in.
pub fn random_circuit(rng: &mut StdRng, p: Prime, with_discard: bool) -> GradedRelation {
    let q = WireType::Quantum;
    let mut s = DoubledSystem::new(p);
    let n_in = rng.gen_range(1..=3);
    let inputs = s.wires(&vec![q; n_in]);
    let mut cur: Vec<WireVars> = inputs.clone();
    let steps = rng.gen_range(1..=8);
    for _ in 0..steps {
        let choice = rng.gen_range(0..if with_discard { 13 } else { 10 });
        let (gate, arity_in): (GradedRelation, usize) = match choice {
            0 => {
                let (i, o) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
                (stab::z_spider(p, i, o, random_phase(rng, p)), i)
            }
            1 => {
                let (i, o) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
                (stab::x_spider(p, i, o, random_phase(rng, p)), i)
            }
            2 => (stab::fourier(p), 1),
            3 => (stab::fourier_dagger(p), 1),
            4 => (stab::scaling_gate(p, rng.gen_range(1..p.get())).unwrap(), 1),
            5 => (stab::swap(p), 2),
            6 => (stab::controlled_add(p, rng.gen_range(1..p.get())).unwrap(), 2),
            7 => (stab::weyl(p, &[rng.gen_range(0..p.get())], &[rng.gen_range(0..p.get())]).unwrap(), 1),
            8 => (stab::cup(p), 0),
            9 => (stab::cap(p), 2),
            10 => (stab::discard(p), 1),
            11 => (stab::codiscard(p), 0),
            _ => (stab::projector_z(p), 1),
        };
        if arity_in > cur.len() {
            continue;
        }
        let start = rng.gen_range(0..=cur.len() - arity_in);
        let ins: Vec<WireVars> = cur[start..start + arity_in].to_vec();
        let outs = s.wires(gate.cod());
        s.constrain(&gate, &ins, &outs).unwrap();
        cur.splice(start..start + arity_in, outs);
    }
    s.project(&inputs, &cur)
}
