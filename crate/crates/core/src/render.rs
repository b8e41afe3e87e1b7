//! Human-readable forms of relations.
//!
//! Equations are read off the RREF of the defining equations. Rows of the
//! form `u − v = 0` are merged into chains `a1 = a2 = b1` named after their
//! lowest variable. Every other row has those names substituted in and is
//! printed as `inputs + constant = outputs`.

use crate::affrel::AffineRelation;
use crate::fplinalg::Prime;
use crate::stab::WireType;

/// `a1 … an` for inputs and `b1 … bm` for outputs.
pub fn affine_names(dom: usize, cod: usize) -> Vec<String> {
    (1..=dom)
        .map(|i| format!("a{i}"))
        .chain((1..=cod).map(|i| format!("b{i}")))
        .collect()
}

/// Names following the doubled coordinate layout: for each boundary, the
/// z-coordinates of its quantum wires, then their x-coordinates, then the
/// classical wires (`a1.z`, `a1.x`, `a2.c`, …).
pub fn doubled_names(dom: &[WireType], cod: &[WireType]) -> Vec<String> {
    let side = |prefix: char, types: &[WireType]| -> Vec<String> {
        let quantum: Vec<usize> = (0..types.len()).filter(|&i| types[i] == WireType::Quantum).collect();
        let classical = (0..types.len()).filter(|&i| types[i] == WireType::Classical);
        quantum
            .iter()
            .map(|i| format!("{prefix}{}.z", i + 1))
            .chain(quantum.iter().map(|i| format!("{prefix}{}.x", i + 1)))
            .chain(classical.map(|i| format!("{prefix}{}.c", i + 1)))
            .collect()
    };
    let mut names = side('a', dom);
    names.extend(side('b', cod));
    names
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn term(p: Prime, coeff: u32, name: &str, first: bool) -> String {
    let c = p.signed(coeff);
    let (neg, mag) = (c < 0, c.unsigned_abs());
    let body = if mag == 1 { name.to_string() } else { format!("{mag}*{name}") };
    match (first, neg) {
        (true, false) => body,
        (true, true) => format!("-{body}"),
        (false, false) => format!(" + {body}"),
        (false, true) => format!(" - {body}"),
    }
}

fn side_text(p: Prime, terms: &[(usize, u32)], constant: u32, names: &[String]) -> String {
    let mut s = String::new();
    for &(v, c) in terms {
        s.push_str(&term(p, c, &names[v], s.is_empty()));
    }
    if constant != 0 || s.is_empty() {
        let c = p.signed(constant);
        if s.is_empty() {
            s = c.to_string();
        } else if c < 0 {
            s.push_str(&format!(" - {}", c.unsigned_abs()));
        } else {
            s.push_str(&format!(" + {c}"));
        }
    }
    s
}

/// Defining equations, one per line; `EMPTY` or `TOTAL` for the extreme cases.
pub fn equations(rel: &AffineRelation, names: &[String]) -> Vec<String> {
    if rel.is_empty() {
        return vec!["EMPTY".into()];
    }
    let p = rel.prime();
    let (dom, n) = (rel.dom(), rel.arity());
    assert_eq!(names.len(), n, "one name per coordinate");
    let eqs = rel.equations();
    if eqs.rows() == 0 {
        return vec!["TOTAL".into()];
    }
    let rows = eqs.row_vecs();
    let minus_one = p.neg(1);
    let mut parent: Vec<usize> = (0..n).collect();
    let mut rest = Vec::new();
    for row in &rows {
        let nz: Vec<usize> = (0..n).filter(|&j| row[j] != 0).collect();
        if row[n] == 0 && nz.len() == 2 && row[nz[0]] == 1 && row[nz[1]] == minus_one {
            let (a, b) = (find(&mut parent, nz[0]), find(&mut parent, nz[1]));
            let (lo, hi) = (a.min(b), a.max(b));
            parent[hi] = lo;
        } else {
            rest.push(row.clone());
        }
    }
    let mut out = Vec::new();
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        let r = find(&mut parent, v);
        groups[r].push(v);
    }
    for g in groups.iter().filter(|g| g.len() > 1) {
        let parts: Vec<&str> = g.iter().map(|&v| names[v].as_str()).collect();
        out.push(parts.join(" = "));
    }
    for row in rest {
        let mut coeff = vec![0u32; n];
        for j in 0..n {
            if row[j] != 0 {
                let r = find(&mut parent, j);
                coeff[r] = p.add(coeff[r], row[j]);
            }
        }
        let lhs: Vec<(usize, u32)> = (0..dom).filter(|&j| coeff[j] != 0).map(|j| (j, coeff[j])).collect();
        let rhs: Vec<(usize, u32)> = (dom..n)
            .filter(|&j| coeff[j] != 0)
            .map(|j| (j, p.neg(coeff[j])))
            .collect();
        let constant = row[n];
        if lhs.is_empty() && rhs.is_empty() && constant == 0 {
            continue;
        }
        let line = if lhs.is_empty() && !rhs.is_empty() {
            let outs: Vec<(usize, u32)> = rhs.iter().map(|&(j, c)| (j, p.neg(c))).collect();
            format!("{} = {}", side_text(p, &outs, 0, names), p.signed(p.neg(constant)))
        } else {
            format!("{} = {}", side_text(p, &lhs, constant, names), side_text(p, &rhs, 0, names))
        };
        out.push(line);
    }
    out
}

fn row_text(v: &[u32], dom: usize) -> String {
    let a: Vec<String> = v[..dom].iter().map(u32::to_string).collect();
    let b: Vec<String> = v[dom..].iter().map(u32::to_string).collect();
    format!("{} | {}", a.join(" "), b.join(" ")).trim().to_string()
}

/// Point and RREF basis of the linear part, one row per line.
pub fn basis(rel: &AffineRelation) -> Vec<String> {
    let Some(point) = rel.point() else {
        return vec!["EMPTY".into()];
    };
    let dom = rel.dom();
    let mut out = vec![format!("point: {}", row_text(&point, dom))];
    let lin = rel.linear_part();
    out.push(format!("dim: {}", lin.dim()));
    for v in lin.basis().row_vecs() {
        out.push(row_text(&v, dom));
    }
    out
}
