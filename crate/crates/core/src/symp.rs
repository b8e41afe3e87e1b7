//! Symplectic geometry on F_p^{2n}.
//!
//! Vectors are ordered `(z₁…z_n, x₁…x_n)` and the form is
//! `ω(v, w) = Σ v_zᵢ·w_xᵢ − v_xᵢ·w_zᵢ`.

use std::fmt;

use rand::Rng;

use crate::affrel::AffineRelation;
use crate::error::{Error, Result};
use crate::fplinalg::{check_field, FpMatrix, Prime, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymplecticSpace {
    p: Prime,
    n: usize,
}

impl SymplecticSpace {
    pub fn new(p: Prime, n: usize) -> Self {
        SymplecticSpace { p, n }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    /// Number of qudits.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Ambient dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// The block matrix `[[0, I], [−I, 0]]`.
    pub fn form_matrix(&self) -> FpMatrix {
        let n = self.n;
        let mut m = FpMatrix::zeros(self.p, 2 * n, 2 * n);
        for i in 0..n {
            m.set(i, n + i, 1);
            m.set(n + i, i, self.p.neg(1));
        }
        m
    }

    fn check_len(&self, v: &[u32]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "symplectic vector",
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    pub fn omega(&self, v: &[u32], w: &[u32]) -> Result<u32> {
        self.check_len(v)?;
        self.check_len(w)?;
        Ok(omega_unchecked(self.p, self.n, v, w))
    }

    /// Symplectic complement `L^ω` of a linear subspace.
    pub fn complement(&self, l: &Subspace) -> Result<Subspace> {
        check_field(self.p, l.prime())?;
        self.check_len(&vec![0; l.ambient()])?;
        let n = self.n;
        let p = self.p;
        // ω(w, v) = 0 is the functional (−w_x | w_z) applied to v.
        let mut m = FpMatrix::zeros(p, l.dim(), 2 * n);
        for i in 0..l.dim() {
            let w = l.basis().row(i);
            for j in 0..n {
                m.set(i, j, p.neg(w[n + j]));
                m.set(i, n + j, w[j]);
            }
        }
        Ok(m.kernel())
    }

    pub fn classify(&self, l: &Subspace) -> Result<Classification> {
        let comp = self.complement(l)?;
        let iso = l.is_subspace_of(&comp)?;
        let coiso = comp.is_subspace_of(l)?;
        Ok(match (iso, coiso) {
            (true, true) => Classification::Lagrangian,
            (true, false) => Classification::Isotropic,
            (false, true) => Classification::Coisotropic,
            (false, false) => Classification::Neither,
        })
    }

    /// A random isotropic subspace of the given dimension, grown one
    /// ω-orthogonal vector at a time.
    pub fn random_isotropic<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Result<Subspace> {
        if dim > self.n {
            return Err(Error::DimensionMismatch {
                context: "isotropic dimension",
                expected: self.n,
                found: dim,
            });
        }
        let p = self.p;
        let mut w = Subspace::zero(p, self.dim());
        while w.dim() < dim {
            let comp = self.complement(&w)?;
            let mut v = vec![0u32; self.dim()];
            for i in 0..comp.dim() {
                let c = rng.gen_range(0..p.get());
                for (o, &b) in v.iter_mut().zip(comp.basis().row(i)) {
                    *o = p.add(*o, p.mul(c, b));
                }
            }
            if !w.contains(&v) {
                w = Subspace::span(p, self.dim(), &[v])?.sum(&w)?;
            }
        }
        Ok(w)
    }

    /// A random coisotropic subspace (dimension between `n` and `2n`), taken
    /// as the complement of a random isotropic one.
    pub fn random_coisotropic<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Result<Subspace> {
        if dim < self.n || dim > self.dim() {
            return Err(Error::DimensionMismatch {
                context: "coisotropic dimension",
                expected: self.n,
                found: dim,
            });
        }
        let iso = self.random_isotropic(self.dim() - dim, rng)?;
        self.complement(&iso)
    }

    pub fn random_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u32> {
        (0..self.dim()).map(|_| rng.gen_range(0..self.p.get())).collect()
    }
}

fn omega_unchecked(p: Prime, n: usize, v: &[u32], w: &[u32]) -> u32 {
    let mut acc = 0u32;
    for i in 0..n {
        acc = p.add(acc, p.mul(v[i], w[n + i]));
        acc = p.sub(acc, p.mul(v[n + i], w[i]));
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Isotropic,
    Coisotropic,
    Lagrangian,
    Neither,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Isotropic => "isotropic",
            Classification::Coisotropic => "coisotropic",
            Classification::Lagrangian => "lagrangian",
            Classification::Neither => "none",
        })
    }
}

/// An affine subspace `L + a` of a symplectic space, or the empty set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedSubspace {
    space: SymplecticSpace,
    linear: Subspace,
    /// Reduced modulo `linear`; `None` for the empty set.
    shift: Option<Vec<u32>>,
}

impl GradedSubspace {
    pub fn affine(space: SymplecticSpace, linear: Subspace, shift: &[u32]) -> Result<Self> {
        check_field(space.p, linear.prime())?;
        space.check_len(shift)?;
        if linear.ambient() != space.dim() {
            return Err(Error::DimensionMismatch {
                context: "graded subspace",
                expected: space.dim(),
                found: linear.ambient(),
            });
        }
        let shift = Some(linear.reduce(shift));
        Ok(GradedSubspace { space, linear, shift })
    }

    pub fn linear(space: SymplecticSpace, linear: Subspace) -> Result<Self> {
        let zero = vec![0; space.dim()];
        Self::affine(space, linear, &zero)
    }

    pub fn empty(space: SymplecticSpace) -> Self {
        GradedSubspace {
            space,
            linear: Subspace::zero(space.p, space.dim()),
            shift: None,
        }
    }

    /// Span of `rows` (each of length `2n`) plus an optional shift.
    pub fn from_rows<R: AsRef<[u32]>>(space: SymplecticSpace, rows: &[R], shift: Option<&[u32]>) -> Result<Self> {
        let l = Subspace::span(space.p, space.dim(), rows)?;
        match shift {
            Some(a) => Self::affine(space, l, a),
            None => Self::linear(space, l),
        }
    }

    /// Reads a relation's coordinates as one vector `(z…, x…)`; the arity must be even.
    pub fn from_state(rel: &AffineRelation) -> Result<Self> {
        let d = rel.arity();
        if !d.is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                context: "symplectic state arity",
                expected: d + 1,
                found: d,
            });
        }
        let space = SymplecticSpace::new(rel.prime(), d / 2);
        match rel.point() {
            None => Ok(Self::empty(space)),
            Some(a) => Self::affine(space, rel.linear_part(), &a),
        }
    }

    /// The subspace as a state `0 → 2n` of affine relations.
    pub fn to_state(&self) -> AffineRelation {
        let (p, d) = (self.space.p, self.space.dim());
        match &self.shift {
            None => AffineRelation::empty(p, 0, d),
            Some(a) => AffineRelation::from_parts(p, 0, d, a, &self.linear).expect("consistent sizes"),
        }
    }

    pub fn space(&self) -> SymplecticSpace {
        self.space
    }

    pub fn linear_part(&self) -> &Subspace {
        &self.linear
    }

    pub fn shift(&self) -> Option<&[u32]> {
        self.shift.as_deref()
    }

    pub fn is_empty(&self) -> bool {
        self.shift.is_none()
    }

    pub fn dim(&self) -> usize {
        self.linear.dim()
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        match &self.shift {
            None => false,
            Some(a) => {
                if v.len() != self.space.dim() {
                    return false;
                }
                let p = self.space.p;
                let d: Vec<u32> = v.iter().zip(a).map(|(&x, &y)| p.sub(x, y)).collect();
                self.linear.contains(&d)
            }
        }
    }

    /// Complement of the linear part; the shift is kept.
    pub fn symp_complement(&self) -> GradedSubspace {
        let comp = self.space.complement(&self.linear).expect("validated on construction");
        match &self.shift {
            None => GradedSubspace {
                space: self.space,
                linear: comp,
                shift: None,
            },
            Some(a) => Self::affine(self.space, comp, a).expect("validated on construction"),
        }
    }

    /// Classification of the linear part. The empty set classifies as `Neither`.
    pub fn classify(&self) -> Classification {
        if self.is_empty() {
            return Classification::Neither;
        }
        self.space.classify(&self.linear).expect("validated on construction")
    }
}

/// Elementary symplectomorphisms used to build dilations.
/// Each acts on `(z, x)` vectors as documented on the variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymplecticOp {
    /// `(z_j, x_j) ↦ (x_j, −z_j)`.
    Fourier(usize),
    /// Exchanges wires `i` and `j`.
    Swap(usize, usize),
    /// Controlled addition: `x_t += f·x_c`, `z_c −= f·z_t`.
    Cx { control: usize, target: usize, factor: u32 },
    /// `x_w += b·z_w`.
    XPhase { wire: usize, b: u32 },
    /// `x_a += f·z_b`, `x_b += f·z_a` for `a ≠ b`.
    XCoupling { a: usize, b: usize, factor: u32 },
}

impl SymplecticOp {
    /// Applies the operation in place to a vector `(z₁…z_n, x₁…x_n)`.
    pub fn apply(&self, p: Prime, n: usize, v: &mut [u32]) {
        match *self {
            SymplecticOp::Fourier(j) => {
                let (z, x) = (v[j], v[n + j]);
                v[j] = x;
                v[n + j] = p.neg(z);
            }
            SymplecticOp::Swap(i, j) => {
                v.swap(i, j);
                v.swap(n + i, n + j);
            }
            SymplecticOp::Cx { control, target, factor } => {
                let (zt, xc) = (v[target], v[n + control]);
                v[n + target] = p.add(v[n + target], p.mul(factor, xc));
                v[control] = p.sub(v[control], p.mul(factor, zt));
            }
            SymplecticOp::XPhase { wire, b } => {
                v[n + wire] = p.add(v[n + wire], p.mul(b, v[wire]));
            }
            SymplecticOp::XCoupling { a, b, factor } => {
                let (za, zb) = (v[a], v[b]);
                v[n + a] = p.add(v[n + a], p.mul(factor, zb));
                v[n + b] = p.add(v[n + b], p.mul(factor, za));
            }
        }
    }

    /// The wires this operation touches.
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            SymplecticOp::Fourier(j) | SymplecticOp::XPhase { wire: j, .. } => vec![j],
            SymplecticOp::Swap(a, b)
            | SymplecticOp::Cx { control: a, target: b, .. }
            | SymplecticOp::XCoupling { a, b, .. } => vec![a, b],
        }
    }

    /// Matrix acting on column vectors of F_p^{2n}.
    pub fn matrix(&self, p: Prime, n: usize) -> FpMatrix {
        ops_matrix(p, n, std::slice::from_ref(self))
    }
}

/// Matrix of `ops` applied in order (first op first).
pub fn ops_matrix(p: Prime, n: usize, ops: &[SymplecticOp]) -> FpMatrix {
    let mut m = FpMatrix::zeros(p, 2 * n, 2 * n);
    for j in 0..2 * n {
        let mut e = vec![0u32; 2 * n];
        e[j] = 1;
        for op in ops {
            op.apply(p, n, &mut e);
        }
        for (i, &v) in e.iter().enumerate() {
            m.set(i, j, v);
        }
    }
    m
}

/// The data of a Stinespring dilation of a coisotropic subspace `S = L + a`.
///
/// With `U` the recorded symplectomorphism, the encoder is
/// `weyl(a) ∘ U⁻¹ ∘ (id_k ⊗ |0⟩^{n−k})`: logical wires come first and the
/// ancilla wires `k..n` are prepared with `x = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dilation {
    space: SymplecticSpace,
    k: usize,
    shift: Vec<u32>,
    ops: Vec<SymplecticOp>,
    unitary: FpMatrix,
    inverse: FpMatrix,
}

impl Dilation {
    pub fn space(&self) -> SymplecticSpace {
        self.space
    }

    /// Number of logical wires.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.space.n
    }

    pub fn shift(&self) -> &[u32] {
        &self.shift
    }

    /// The elementary operations composing `U`, in application order.
    pub fn ops(&self) -> &[SymplecticOp] {
        &self.ops
    }

    /// `U`, which maps `L^ω` onto the z-directions of the ancilla wires.
    pub fn unitary(&self) -> &FpMatrix {
        &self.unitary
    }

    pub fn inverse_unitary(&self) -> &FpMatrix {
        &self.inverse
    }

    /// `bᵢ = U⁻¹ ẑ_{k+i}`, a basis of `L^ω` ordered by ancilla.
    pub fn syndrome_basis(&self) -> Vec<Vec<u32>> {
        let n = self.space.n;
        (self.k..n)
            .map(|w| (0..2 * n).map(|i| self.inverse.get(i, w)).collect())
            .collect()
    }

    /// `dᵢ = ω(bᵢ, e)`.
    pub fn syndrome(&self, e: &[u32]) -> Result<Vec<u32>> {
        self.syndrome_basis()
            .iter()
            .map(|b| self.space.omega(b, e))
            .collect()
    }
}

/// Constructs the dilation of a coisotropic (or Lagrangian) affine subspace.
pub fn stinespring_dilate(s: &GradedSubspace) -> Result<Dilation> {
    let class = s.classify();
    let Some(shift) = s.shift() else {
        return Err(Error::NotCoisotropic("empty".into()));
    };
    if !matches!(class, Classification::Coisotropic | Classification::Lagrangian) {
        return Err(Error::NotCoisotropic(class.to_string()));
    }
    let space = s.space();
    let (p, n) = (space.p, space.n);
    let k = s.dim() - n;
    let r = n - k;

    let v = space.complement(s.linear_part())?;
    let mut rows = v.basis().row_vecs();
    let mut ops = Vec::new();
    let push = |op: SymplecticOp, rows: &mut Vec<Vec<u32>>, ops: &mut Vec<SymplecticOp>| {
        for row in rows.iter_mut() {
            op.apply(p, n, row);
        }
        ops.push(op);
    };

    // Rows with no z-part: Fourier on their x-pivots makes the z-block full rank.
    let fourier_wires: Vec<usize> = rows
        .iter()
        .filter_map(|row| row.iter().position(|&c| c != 0))
        .filter(|&c| c >= n)
        .map(|c| c - n)
        .collect();
    for j in fourier_wires {
        push(SymplecticOp::Fourier(j), &mut rows, &mut ops);
    }

    // Reduce the z-block choosing pivots from the right.
    let mut pivot_of_row = vec![usize::MAX; r];
    let mut assigned = 0;
    for c in (0..n).rev() {
        let Some(sel) = (assigned..r).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(assigned, sel);
        pivot_of_row.swap(assigned, sel);
        let inv = p.inv(rows[assigned][c]).expect("nonzero pivot");
        for e in rows[assigned].iter_mut() {
            *e = p.mul(*e, inv);
        }
        let pivot_row = rows[assigned].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != assigned && row[c] != 0 {
                let f = p.neg(row[c]);
                for (e, &b) in row.iter_mut().zip(&pivot_row) {
                    *e = p.add(*e, p.mul(f, b));
                }
            }
        }
        pivot_of_row[assigned] = c;
        assigned += 1;
    }
    if assigned != r {
        return Err(Error::Internal(format!(
            "z-block has rank {assigned} after Fourier step, expected {r}"
        )));
    }
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by_key(|&i| pivot_of_row[i]);
    rows = order.iter().map(|&i| rows[i].clone()).collect();
    let pivots: Vec<usize> = order.iter().map(|&i| pivot_of_row[i]).collect();

    // Move logical wires to the front and ancilla (pivot) wires to the back.
    let target: Vec<usize> = (0..n)
        .filter(|w| !pivots.contains(w))
        .chain(pivots.iter().copied())
        .collect();
    let mut wire_at: Vec<usize> = (0..n).collect();
    for pos in 0..n {
        let cur = wire_at.iter().position(|&w| w == target[pos]).expect("permutation");
        if cur != pos {
            push(SymplecticOp::Swap(pos, cur), &mut rows, &mut ops);
            wire_at.swap(pos, cur);
        }
    }

    // Clear the logical part of the z-block.
    for i in 0..r {
        for t in 0..k {
            let c = rows[i][t];
            if c != 0 {
                push(
                    SymplecticOp::Cx {
                        control: t,
                        target: k + i,
                        factor: c,
                    },
                    &mut rows,
                    &mut ops,
                );
            }
        }
    }

    // Graph-state step: subtract the symmetric matrix M from the x-block.
    let mut m = vec![vec![0u32; n]; n];
    for i in 0..r {
        for t in 0..k {
            m[k + i][t] = rows[i][n + t];
            m[t][k + i] = rows[i][n + t];
        }
        for j in 0..r {
            if rows[i][n + k + j] != rows[j][n + k + i] {
                return Err(Error::Internal(
                    "ancilla block of the reduced complement is not symmetric".into(),
                ));
            }
            m[k + i][k + j] = rows[i][n + k + j];
        }
    }
    for a in 0..n {
        if m[a][a] != 0 {
            push(
                SymplecticOp::XPhase {
                    wire: a,
                    b: p.neg(m[a][a]),
                },
                &mut rows,
                &mut ops,
            );
        }
        for b in a + 1..n {
            if m[a][b] != 0 {
                push(
                    SymplecticOp::XCoupling {
                        a,
                        b,
                        factor: p.neg(m[a][b]),
                    },
                    &mut rows,
                    &mut ops,
                );
            }
        }
    }
    for (i, row) in rows.iter().enumerate() {
        let ok = row
            .iter()
            .enumerate()
            .all(|(c, &e)| e == u32::from(c == k + i));
        if !ok {
            return Err(Error::Internal(format!("row {i} did not reduce to an ancilla z-direction")));
        }
    }

    let unitary = ops_matrix(p, n, &ops);
    let inverse = unitary
        .inverse()
        .ok_or_else(|| Error::Internal("recorded symplectomorphism is singular".into()))?;
    Ok(Dilation {
        space,
        k,
        shift: shift.to_vec(),
        ops,
        unitary,
        inverse,
    })
}
