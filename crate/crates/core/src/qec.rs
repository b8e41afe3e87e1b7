//! Stabilizer codes as coisotropic affine subspaces, syndromes, and correction checks.
//!
//! File formats (`#` starts a comment, blank lines are ignored):
//!
//! ```text
//! # subspace: spanning rows and an optional shift
//! p=2; n=3
//! 1 1 0 | 0 0 0
//! shift 0 0 0 | 1 0 0
//!
//! # code: stabilizer generators g with S = { v : ω(g, v) = phase }
//! p=2; n=3; k=1
//! 1 1 0 | 0 0 0
//! 1 0 1 | 0 0 0 | 0
//!
//! # correction table
//! 1 1 -> 0 0 0 | 1 0 0
//!
//! # error list
//! 0 0 0 | 1 0 0
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::affrel::AffineRelation;
use crate::error::{Error, Result};
use crate::fplinalg::{solve_affine, FpMatrix, Prime, Subspace};
use crate::stab::{self, DoubledSystem, GradedRelation, WireType};
use crate::symp::{stinespring_dilate, Classification, Dilation, GradedSubspace, SymplecticSpace};

/// An `[n, k]` stabilizer code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerCode {
    subspace: GradedSubspace,
    dilation: Dilation,
    encoder: GradedRelation,
    /// Basis of `L^ω`.
    stabilizers: Subspace,
}

impl StabilizerCode {
    /// Builds a code from a coisotropic subspace `S = L + a`.
    pub fn from_subspace(s: &GradedSubspace) -> Result<Self> {
        match s.classify() {
            Classification::Coisotropic | Classification::Lagrangian => {}
            other => return Err(Error::NotCoisotropic(other.to_string())),
        }
        let dilation = stinespring_dilate(s)?;
        let encoder = dilation.encoder();
        let stabilizers = s.space().complement(s.linear_part())?;
        Ok(StabilizerCode {
            subspace: s.clone(),
            dilation,
            encoder,
            stabilizers,
        })
    }

    /// `S = { v : ω(gᵢ, v) = φᵢ }` for isotropic generators `gᵢ`.
    pub fn from_generators<R: AsRef<[u32]>>(space: SymplecticSpace, gens: &[R], phases: &[u32]) -> Result<Self> {
        let p = space.prime();
        if phases.len() != gens.len() {
            return Err(Error::DimensionMismatch {
                context: "generator phases",
                expected: gens.len(),
                found: phases.len(),
            });
        }
        for (i, g) in gens.iter().enumerate() {
            for (j, h) in gens[..i].iter().enumerate() {
                if space.omega(g.as_ref(), h.as_ref())? != 0 {
                    return Err(Error::Code(format!("generators {} and {} do not commute", j + 1, i + 1)));
                }
            }
        }
        // ω(g, v) = gᵀ Ω v, so each generator contributes the row (−g_x | g_z).
        let n = space.n();
        let mut m = FpMatrix::zeros(p, gens.len(), 2 * n);
        for (i, g) in gens.iter().enumerate() {
            let g = g.as_ref();
            space_check(space, g)?;
            for j in 0..n {
                m.set(i, j, p.neg(g[n + j]));
                m.set(i, n + j, g[j]);
            }
        }
        let Some(a) = solve_affine(&m, phases)? else {
            return Err(Error::Code("generator phases are inconsistent".into()));
        };
        let l = m.kernel();
        Self::from_subspace(&GradedSubspace::affine(space, l, &a)?)
    }

    pub fn prime(&self) -> Prime {
        self.subspace.space().prime()
    }

    pub fn n(&self) -> usize {
        self.dilation.n()
    }

    pub fn k(&self) -> usize {
        self.dilation.k()
    }

    pub fn subspace(&self) -> &GradedSubspace {
        &self.subspace
    }

    pub fn dilation(&self) -> &Dilation {
        &self.dilation
    }

    /// The isometry `k → n` onto the code space.
    pub fn encoder(&self) -> &GradedRelation {
        &self.encoder
    }

    /// `L^ω`.
    pub fn stabilizers(&self) -> &Subspace {
        &self.stabilizers
    }

    /// `b₁ … b_{n−k}`, ordered by the ancilla wires of the dilation.
    pub fn syndrome_basis(&self) -> Vec<Vec<u32>> {
        self.dilation.syndrome_basis()
    }

    /// `Q^n → Q^n ⊗ C^{n−k}`: undo the encoding unitary, measure the ancillas
    /// non-destructively, and redo the unitary.
    pub fn syndrome_measurement(&self) -> GradedRelation {
        let p = self.prime();
        let (n, k) = (self.n(), self.k());
        let u = self.dilation.unitary_relation();
        let nd = stab::nd_measure_z(p);
        let mut s = DoubledSystem::new(p);
        let ins = s.wires(&vec![WireType::Quantum; n]);
        let mid = s.wires(&vec![WireType::Quantum; n]);
        s.constrain(&u, &ins, &mid).expect("arity");
        let mut measured = mid.clone();
        let outcomes = s.wires(&vec![WireType::Classical; n - k]);
        for j in 0..n - k {
            let w = s.wire(WireType::Quantum);
            s.constrain(&nd, &mid[k + j..k + j + 1], &[w, outcomes[j]]).expect("arity");
            measured[k + j] = w;
        }
        let outs = s.wires(&vec![WireType::Quantum; n]);
        s.constrain(&u.dagger(), &measured, &outs).expect("arity");
        s.project(&ins, &[outs, outcomes].concat())
    }

    fn check_error(&self, e: &[u32]) -> Result<()> {
        space_check(self.subspace.space(), e)
    }

    /// The measured syndrome of `W(e)` applied to the code space.
    ///
    /// Computed by composing relations, and checked against `ω(bᵢ, e)`.
    pub fn syndrome(&self, e: &[u32]) -> Result<Vec<u32>> {
        self.check_error(e)?;
        let p = self.prime();
        let (n, k) = (self.n(), self.k());
        let mixed = (0..k).try_fold(GradedRelation::classical(AffineRelation::total(p, 0, 0)), |r, _| {
            r.tensor(&stab::codiscard(p))
        })?;
        let mut discard_all = GradedRelation::classical(AffineRelation::total(p, 0, 0));
        for _ in 0..n {
            discard_all = discard_all.tensor(&stab::discard(p))?;
        }
        let tail = discard_all.tensor(&stab::identity_of(p, &vec![WireType::Classical; n - k]))?;
        let outcome = mixed
            .compose(&self.encoder)?
            .compose(&stab::weyl_vec(p, e)?)?
            .compose(&self.syndrome_measurement())?
            .compose(&tail)?;
        let points = outcome.relation().points();
        let [d] = points.as_slice() else {
            return Err(Error::Internal(format!("syndrome measurement produced {} outcomes", points.len())));
        };
        let expected = self.dilation.syndrome(e)?;
        if *d != expected {
            return Err(Error::Internal(format!(
                "measured syndrome {d:?} differs from symplectic pairing {expected:?}"
            )));
        }
        Ok(expected)
    }

    /// `true` iff `W(e)` leaves no syndrome. Since the syndrome pairs `e`
    /// with a basis of `L^ω`, this is cross-checked against `e ∈ (L^ω)^ω = L`.
    pub fn undetectable(&self, e: &[u32]) -> Result<bool> {
        let zero = self.syndrome(e)?.iter().all(|&v| v == 0);
        if zero != self.subspace.linear_part().contains(e) {
            return Err(Error::Internal("syndrome and commutant membership disagree".into()));
        }
        Ok(zero)
    }

    /// `e ∈ L^ω`: the error acts on the code space as a stabilizer.
    pub fn is_stabilizer(&self, e: &[u32]) -> bool {
        self.stabilizers.contains(e)
    }

    /// The protocol for one error and one chosen correction:
    /// encode, apply `W(e)`, measure the syndrome, apply `W(−c)`, decode.
    /// A relation `k → k ⊗ C^{n−k}`.
    pub fn correction_branch(&self, e: &[u32], correction: &[u32]) -> Result<GradedRelation> {
        self.check_error(e)?;
        self.check_error(correction)?;
        let p = self.prime();
        let m = self.n() - self.k();
        let classical = stab::identity_of(p, &vec![WireType::Classical; m]);
        let undo: Vec<u32> = correction.iter().map(|&v| p.neg(v)).collect();
        self.encoder
            .compose(&stab::weyl_vec(p, e)?)?
            .compose(&self.syndrome_measurement())?
            .compose(&stab::weyl_vec(p, &undo)?.tensor(&classical)?)?
            .compose(&self.encoder.dagger().tensor(&classical)?)
    }

    /// `id_k ⊗ d`, the outcome of a successful correction with syndrome `d`.
    pub fn expected_branch(&self, d: &[u32]) -> Result<GradedRelation> {
        stab::identity(self.prime(), self.k()).tensor(&stab::classical_point(self.prime(), d))
    }
}

fn space_check(space: SymplecticSpace, v: &[u32]) -> Result<()> {
    if v.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            context: "symplectic vector",
            expected: space.dim(),
            found: v.len(),
        });
    }
    Ok(())
}

/// An affine map `d ↦ M·d + c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub matrix: FpMatrix,
    pub shift: Vec<u32>,
}

impl AffineMap {
    pub fn apply(&self, d: &[u32]) -> Result<Vec<u32>> {
        let p = self.matrix.prime();
        let v = self.matrix.mul_vec(d)?;
        Ok(v.iter().zip(&self.shift).map(|(&a, &b)| p.add(a, b)).collect())
    }
}

/// A decoder: syndrome `d` to the error `f(d)` to undo.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionTable {
    p: Prime,
    syndrome_len: usize,
    error_len: usize,
    entries: BTreeMap<Vec<u32>, Vec<u32>>,
    affine: Option<AffineMap>,
}

impl CorrectionTable {
    /// Adds `0 → 0` when absent; rejects any other image of the zero syndrome.
    pub fn new(p: Prime, syndrome_len: usize, error_len: usize, entries: BTreeMap<Vec<u32>, Vec<u32>>) -> Result<Self> {
        let mut entries = entries;
        for (d, e) in &entries {
            if d.len() != syndrome_len || e.len() != error_len {
                return Err(Error::DimensionMismatch {
                    context: "correction table entry",
                    expected: syndrome_len + error_len,
                    found: d.len() + e.len(),
                });
            }
        }
        let zero_d = vec![0; syndrome_len];
        match entries.get(&zero_d) {
            Some(e) if e.iter().any(|&v| v != 0) => {
                return Err(Error::Code("the zero syndrome must map to the zero error".into()));
            }
            Some(_) => {}
            None => {
                entries.insert(zero_d, vec![0; error_len]);
            }
        }
        let affine = fit_affine(p, syndrome_len, error_len, &entries)?;
        Ok(CorrectionTable {
            p,
            syndrome_len,
            error_len,
            entries,
            affine,
        })
    }

    /// The table of an affine map on every syndrome.
    pub fn from_affine(map: &AffineMap) -> Result<Self> {
        let p = map.matrix.prime();
        let m = map.matrix.cols();
        let mut entries = BTreeMap::new();
        let total = (p.get() as usize).pow(m as u32);
        for idx in 0..total {
            let d = digits(p, idx, m);
            entries.insert(d.clone(), map.apply(&d)?);
        }
        Self::new(p, m, map.matrix.rows(), entries)
    }

    pub fn get(&self, d: &[u32]) -> Option<&[u32]> {
        self.entries.get(d).map(Vec::as_slice)
    }

    pub fn entries(&self) -> &BTreeMap<Vec<u32>, Vec<u32>> {
        &self.entries
    }

    pub fn syndrome_len(&self) -> usize {
        self.syndrome_len
    }

    pub fn error_len(&self) -> usize {
        self.error_len
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    /// The affine map agreeing with every entry, if one exists.
    pub fn affine(&self) -> Option<&AffineMap> {
        self.affine.as_ref()
    }
}

fn digits(p: Prime, mut idx: usize, len: usize) -> Vec<u32> {
    let base = p.get() as usize;
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = (idx % base) as u32;
        idx /= base;
    }
    out
}

fn fit_affine(
    p: Prime,
    m: usize,
    out: usize,
    entries: &BTreeMap<Vec<u32>, Vec<u32>>,
) -> Result<Option<AffineMap>> {
    let rows: Vec<Vec<u32>> = entries
        .keys()
        .map(|d| d.iter().copied().chain(std::iter::once(1)).collect())
        .collect();
    let a = FpMatrix::from_residue_rows(p, m + 1, &rows)?;
    let mut matrix = FpMatrix::zeros(p, out, m);
    let mut shift = vec![0; out];
    for i in 0..out {
        let rhs: Vec<u32> = entries.values().map(|e| e[i]).collect();
        let Some(sol) = solve_affine(&a, &rhs)? else {
            return Ok(None);
        };
        for j in 0..m {
            matrix.set(i, j, sol[j]);
        }
        shift[i] = sol[m];
    }
    Ok(Some(AffineMap { matrix, shift }))
}

/// The result of checking one error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorOutcome {
    pub error: Vec<u32>,
    pub syndrome: Vec<u32>,
    pub correction: Option<Vec<u32>>,
    pub passed: bool,
    pub reason: Option<String>,
}

/// Per-error results, sorted by error vector.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub outcomes: Vec<ErrorOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ErrorOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            write!(
                f,
                "{} -> {} {}",
                fmt_tuple(&o.error),
                fmt_tuple(&o.syndrome),
                if o.passed { "PASS" } else { "FAIL" }
            )?;
            if let Some(r) = &o.reason {
                write!(f, " ({r})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `(a,b,c)`.
pub fn fmt_tuple(v: &[u32]) -> String {
    let parts: Vec<String> = v.iter().map(u32::to_string).collect();
    format!("({})", parts.join(","))
}

/// Runs the correction protocol once per error, each with its own syndrome branch.
pub fn verify_correction(code: &StabilizerCode, errors: &[Vec<u32>], table: &CorrectionTable) -> Result<VerifyReport> {
    if table.prime() != code.prime()
        || table.syndrome_len() != code.n() - code.k()
        || table.error_len() != 2 * code.n()
    {
        return Err(Error::Code(format!(
            "table shape F_{}: {} -> {} does not fit an [{}, {}] code over F_{}",
            table.prime(),
            table.syndrome_len(),
            table.error_len(),
            code.n(),
            code.k(),
            code.prime()
        )));
    }
    let mut outcomes = Vec::with_capacity(errors.len());
    for e in errors {
        let d = code.syndrome(e)?;
        let Some(c) = table.get(&d) else {
            outcomes.push(ErrorOutcome {
                error: e.clone(),
                syndrome: d.clone(),
                correction: None,
                passed: false,
                reason: Some(format!("no table entry for syndrome {}", fmt_tuple(&d))),
            });
            continue;
        };
        let got = code.correction_branch(e, c)?;
        let passed = got == code.expected_branch(&d)?;
        outcomes.push(ErrorOutcome {
            error: e.clone(),
            syndrome: d,
            correction: Some(c.to_vec()),
            passed,
            reason: (!passed).then(|| "residual logical error".to_string()),
        });
    }
    outcomes.sort_by(|a, b| a.error.cmp(&b.error));
    Ok(VerifyReport { outcomes })
}

/// The whole protocol as one relation `k ⊗ C^{2n} → k ⊗ C^{n−k}`: the
/// classical input selects the error `W(e)`, and the correction `W(−f(d))`
/// is driven by the syndrome through the graph of `f`.
pub fn affine_correction_protocol(code: &StabilizerCode, f: &AffineMap) -> Result<GradedRelation> {
    let p = code.prime();
    let (n, k) = (code.n(), code.k());
    let m = n - k;
    if f.matrix.prime() != p || f.matrix.cols() != m || f.matrix.rows() != 2 * n || f.shift.len() != 2 * n {
        return Err(Error::Code(format!(
            "correction map must be F_{p}^{m} -> F_{p}^{}",
            2 * n
        )));
    }
    if f.shift.iter().any(|&v| v != 0) {
        return Err(Error::Code("correction map must send the zero syndrome to zero".into()));
    }
    let neg_m = {
        let mut out = FpMatrix::zeros(p, 2 * n, m);
        for i in 0..2 * n {
            for j in 0..m {
                out.set(i, j, p.neg(f.matrix.get(i, j)));
            }
        }
        out
    };
    let neg_shift: Vec<u32> = f.shift.iter().map(|&v| p.neg(v)).collect();
    let undo = GradedRelation::classical(AffineRelation::from_affine_map(&neg_m, &neg_shift)?);
    let q = |k: usize| vec![WireType::Quantum; k];
    let c = |k: usize| vec![WireType::Classical; k];

    let mut s = DoubledSystem::new(p);
    let logical_in = s.wires(&q(k));
    let error = s.wires(&c(2 * n));
    let encoded = s.wires(&q(n));
    s.constrain(code.encoder(), &logical_in, &encoded)?;
    let noisy = s.wires(&q(n));
    s.constrain(&stab::controlled_weyl(p, n), &[encoded, error.clone()].concat(), &noisy)?;
    let measured = s.wires(&q(n));
    let d = s.wires(&c(m));
    s.constrain(&code.syndrome_measurement(), &noisy, &[measured.clone(), d.clone()].concat())?;
    let d_out = s.wires(&c(m));
    let d_ctl = s.wires(&c(m));
    let copy = stab::classical_z_spider(p, 1, 2);
    for j in 0..m {
        s.constrain(&copy, &d[j..=j], &[d_out[j], d_ctl[j]])?;
    }
    let correction = s.wires(&c(2 * n));
    s.constrain(&undo, &d_ctl, &correction)?;
    let corrected = s.wires(&q(n));
    s.constrain(&stab::controlled_weyl(p, n), &[measured, correction].concat(), &corrected)?;
    let logical_out = s.wires(&q(k));
    s.constrain(&code.encoder().dagger(), &corrected, &logical_out)?;
    Ok(s.project(&[logical_in, error].concat(), &[logical_out, d_out].concat()))
}

// ---------------------------------------------------------------- parsing

struct Header {
    p: Option<Prime>,
    n: Option<usize>,
    k: Option<usize>,
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_header_line(line: &str, line_no: usize, h: &mut Header) -> Result<()> {
    for part in line.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::parse(line_no, 1, format!("expected key=value, found `{part}`")))?;
        let v: u64 = value
            .trim()
            .parse()
            .map_err(|_| Error::parse(line_no, 1, format!("bad number `{}`", value.trim())))?;
        match key.trim() {
            "p" => h.p = Some(Prime::new(v).map_err(|_| Error::parse(line_no, 1, format!("p={v} is not prime")))?),
            "n" => h.n = Some(v as usize),
            "k" => h.k = Some(v as usize),
            other => return Err(Error::parse(line_no, 1, format!("unknown header key `{other}`"))),
        }
    }
    Ok(())
}

fn parse_numbers(s: &str, p: Prime, line_no: usize) -> Result<Vec<u32>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<i64>()
                .map(|v| p.reduce(v))
                .map_err(|_| Error::parse(line_no, 1, format!("bad number `{t}`")))
        })
        .collect()
}

/// Parses `z₁ … zₙ | x₁ … xₙ [| tail…]`, returning the vector and the tail.
fn parse_symplectic(s: &str, n: usize, p: Prime, line_no: usize) -> Result<(Vec<u32>, Vec<u32>)> {
    let parts: Vec<&str> = s.split('|').collect();
    if parts.len() < 2 || parts.len() > 3 {
        return Err(Error::parse(line_no, 1, "expected `z-vector | x-vector`"));
    }
    let z = parse_numbers(parts[0], p, line_no)?;
    let x = parse_numbers(parts[1], p, line_no)?;
    if z.len() != n || x.len() != n {
        return Err(Error::parse(
            line_no,
            1,
            format!("expected {n} z and {n} x entries, found {} and {}", z.len(), x.len()),
        ));
    }
    let tail = match parts.get(2) {
        Some(t) => parse_numbers(t, p, line_no)?,
        None => Vec::new(),
    };
    Ok(([z, x].concat(), tail))
}

fn require_header(h: &Header, p_override: Option<Prime>) -> Result<(Prime, usize)> {
    let p = p_override
        .or(h.p)
        .ok_or_else(|| Error::parse(1, 1, "missing p"))?;
    let n = h.n.ok_or_else(|| Error::parse(1, 1, "missing n"))?;
    Ok((p, n))
}

/// Reads header lines (`key=value` pairs) until the first data line.
fn split_header(text: &str) -> Result<(Header, Vec<(usize, &str)>)> {
    let mut h = Header { p: None, n: None, k: None };
    let mut data = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if data.is_empty() && line.contains('=') && !line.contains('|') {
            parse_header_line(line, i + 1, &mut h)?;
        } else {
            data.push((i + 1, line));
        }
    }
    Ok((h, data))
}

/// Parses a subspace file: spanning rows plus an optional `shift` row.
pub fn parse_subspace(text: &str, p_override: Option<Prime>) -> Result<GradedSubspace> {
    let (h, data) = split_header(text)?;
    let (p, n) = require_header(&h, p_override)?;
    let space = SymplecticSpace::new(p, n);
    let mut rows = Vec::new();
    let mut shift = None;
    for (line_no, line) in data {
        if let Some(rest) = line.strip_prefix("shift") {
            if shift.is_some() {
                return Err(Error::parse(line_no, 1, "duplicate shift"));
            }
            shift = Some(parse_symplectic(rest, n, p, line_no)?.0);
        } else if line == "empty" {
            return Ok(GradedSubspace::empty(space));
        } else {
            let (v, tail) = parse_symplectic(line, n, p, line_no)?;
            if !tail.is_empty() {
                return Err(Error::parse(line_no, 1, "subspace rows take no phase"));
            }
            rows.push(v);
        }
    }
    GradedSubspace::from_rows(space, &rows, shift.as_deref())
}

/// Renders a subspace in the format read by [`parse_subspace`].
/// `z₁ … zₙ | x₁ … xₙ` for a vector of even length.
pub fn format_vector(v: &[u32]) -> String {
    let n = v.len() / 2;
    let z: Vec<String> = v[..n].iter().map(u32::to_string).collect();
    let x: Vec<String> = v[n..].iter().map(u32::to_string).collect();
    format!("{} | {}", z.join(" "), x.join(" "))
}

pub fn format_subspace(s: &GradedSubspace) -> String {
    let space = s.space();
    let mut out = format!("p={}; n={}\n", space.prime(), space.n());
    let row = format_vector;
    let Some(shift) = s.shift() else {
        out.push_str("empty\n");
        return out;
    };
    for v in s.linear_part().basis().row_vecs() {
        out.push_str(&row(&v));
        out.push('\n');
    }
    if shift.iter().any(|&v| v != 0) {
        out.push_str(&format!("shift {}\n", row(shift)));
    }
    out
}

/// Parses a code file; `k` in the header is checked against the generators.
pub fn parse_code(text: &str, p_override: Option<Prime>) -> Result<StabilizerCode> {
    let (h, data) = split_header(text)?;
    let (p, n) = require_header(&h, p_override)?;
    let space = SymplecticSpace::new(p, n);
    let mut gens = Vec::new();
    let mut phases = Vec::new();
    for (line_no, line) in data {
        let (v, tail) = parse_symplectic(line, n, p, line_no)?;
        if tail.len() > 1 {
            return Err(Error::parse(line_no, 1, "a generator has at most one phase"));
        }
        gens.push(v);
        phases.push(tail.first().copied().unwrap_or(0));
    }
    let code = StabilizerCode::from_generators(space, &gens, &phases)?;
    if let Some(k) = h.k {
        if k != code.k() {
            return Err(Error::Code(format!("header says k={k} but the generators give k={}", code.k())));
        }
    }
    Ok(code)
}

/// Parses `d₁ … d_m -> z | x` lines.
pub fn parse_table(text: &str, code: &StabilizerCode) -> Result<CorrectionTable> {
    let p = code.prime();
    let (n, m) = (code.n(), code.n() - code.k());
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| Error::parse(line_no, 1, "expected `syndrome -> error`"))?;
        let d = parse_numbers(lhs, p, line_no)?;
        if d.len() != m {
            return Err(Error::parse(line_no, 1, format!("syndrome needs {m} entries, found {}", d.len())));
        }
        let (e, tail) = parse_symplectic(rhs, n, p, line_no)?;
        if !tail.is_empty() {
            return Err(Error::parse(line_no, 1, "unexpected phase in table entry"));
        }
        if entries.insert(d, e).is_some() {
            return Err(Error::parse(line_no, 1, "duplicate syndrome"));
        }
    }
    CorrectionTable::new(p, m, 2 * n, entries)
}

/// Parses one `z | x` error per line.
pub fn parse_errors(text: &str, p: Prime, n: usize) -> Result<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (e, tail) = parse_symplectic(line, n, p, i + 1)?;
        if !tail.is_empty() {
            return Err(Error::parse(i + 1, 1, "unexpected phase in error"));
        }
        out.push(e);
    }
    Ok(out)
}

/// Parses `z | x` (or a bare list of `2n` numbers) as one symplectic vector.
pub fn parse_vector(s: &str, p: Prime, n: usize) -> Result<Vec<u32>> {
    let s = s.replace(',', " ");
    if s.contains('|') {
        let (v, tail) = parse_symplectic(&s, n, p, 1)?;
        if !tail.is_empty() {
            return Err(Error::parse(1, 1, "unexpected phase"));
        }
        return Ok(v);
    }
    let v = parse_numbers(&s, p, 1)?;
    if v.len() != 2 * n {
        return Err(Error::parse(1, 1, format!("expected {} entries, found {}", 2 * n, v.len())));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    const REP: &str = "p=2; n=3; k=1\n1 1 0 | 0 0 0\n1 0 1 | 0 0 0\n";

    fn x_err(n: usize, bits: &[usize]) -> Vec<u32> {
        let mut e = vec![0; 2 * n];
        for &b in bits {
            e[n + b] = 1;
        }
        e
    }

    #[test]
    fn repetition_syndromes() {
        let code = parse_code(REP, None).unwrap();
        assert_eq!((code.n(), code.k()), (3, 1));
        assert_eq!(code.syndrome(&x_err(3, &[0])).unwrap(), vec![1, 1]);
        assert_eq!(code.syndrome(&x_err(3, &[1])).unwrap(), vec![1, 0]);
        assert_eq!(code.syndrome(&x_err(3, &[2])).unwrap(), vec![0, 1]);
        assert_eq!(code.syndrome(&[0; 6]).unwrap(), vec![0, 0]);
        assert!(code.undetectable(&[0; 6]).unwrap());
        assert!(!code.undetectable(&x_err(3, &[1])).unwrap());
        // The logical X is undetectable without being a stabilizer.
        let logical = x_err(3, &[0, 1, 2]);
        assert!(code.undetectable(&logical).unwrap());
        assert!(!code.is_stabilizer(&logical));
    }

    #[test]
    fn repetition_correction() {
        let code = parse_code(REP, None).unwrap();
        let table = parse_table(
            "1 1 -> 0 0 0 | 1 0 0\n1 0 -> 0 0 0 | 0 1 0\n0 1 -> 0 0 0 | 0 0 1\n",
            &code,
        )
        .unwrap();
        assert!(table.affine().is_none());
        let singles: Vec<Vec<u32>> = (0..3).map(|i| x_err(3, &[i])).chain([vec![0; 6]]).collect();
        assert!(verify_correction(&code, &singles, &table).unwrap().all_passed());
        let doubles = vec![x_err(3, &[0, 1])];
        assert!(!verify_correction(&code, &doubles, &table).unwrap().all_passed());
        assert!(verify_correction(&code, &[], &table).unwrap().all_passed());
    }

    #[test]
    fn missing_entry_is_reported() {
        let code = parse_code(REP, None).unwrap();
        let table = parse_table("1 1 -> 0 0 0 | 1 0 0\n", &code).unwrap();
        let report = verify_correction(&code, &[x_err(3, &[1])], &table).unwrap();
        assert!(!report.all_passed());
        assert!(report.outcomes[0].reason.as_deref().unwrap().contains("no table entry"));
    }

    #[test]
    fn inconsistent_inputs_rejected() {
        assert!(parse_code("p=2; n=2\n1 0 | 0 0\n0 0 | 1 0\n", None).is_err());
        assert!(parse_code("p=2; n=3; k=2\n1 1 0 | 0 0 0\n1 0 1 | 0 0 0\n", None).is_err());
        assert!(parse_code("p=3; n=1\n1 | 0 | 1\n2 | 0 | 1\n", None).is_err());
        let code = parse_code(REP, None).unwrap();
        assert!(parse_table("0 0 -> 0 0 0 | 1 0 0\n", &code).is_err());
    }

    #[test]
    fn subspace_roundtrip() {
        let s = parse_subspace("p=3; n=2\n1 0 | 0 2\nshift 0 1 | 0 0\n", None).unwrap();
        assert_eq!(parse_subspace(&format_subspace(&s), None).unwrap(), s);
        let zero = parse_subspace("p=5; n=2\n", None).unwrap();
        assert_eq!(zero.classify(), Classification::Isotropic);
    }
}
