//! The doubled layer: stabilizer processes as affine relations on graded wires.
//!
//! A quantum wire carries two coordinates `(z, x)`, a classical wire carries
//! one. Each boundary is flattened as: the z-coordinates of its quantum wires,
//! then their x-coordinates, then its classical wires, each in wire order.
//!
//! Measurement outcomes are x-coordinates: `measure_z` reads `c = x`.
//!
//! At `p = 2` the relations are computed exactly as for odd primes; the
//! correspondence with qubit stabilizer circuits only holds for the CSS
//! fragment there.

use std::fmt;

use crate::affrel::{self, AffineRelation, LinearSystem};
use crate::error::{Error, Result};
use crate::fplinalg::{check_field, FpMatrix, Prime};
use crate::symp::{stinespring_dilate, Classification, Dilation, GradedSubspace, SymplecticOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WireType {
    Quantum,
    Classical,
}

impl WireType {
    pub fn width(self) -> usize {
        match self {
            WireType::Quantum => 2,
            WireType::Classical => 1,
        }
    }
}

impl fmt::Display for WireType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WireType::Quantum => "quantum",
            WireType::Classical => "classical",
        })
    }
}

/// A spider phase `(affine, linear)` in F_p².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase {
    pub affine: u32,
    pub linear: u32,
}

impl Phase {
    pub fn new(p: Prime, affine: i64, linear: i64) -> Self {
        Phase {
            affine: p.reduce(affine),
            linear: p.reduce(linear),
        }
    }

    pub fn zero() -> Self {
        Phase::default()
    }
}

/// Variables carrying one wire's coordinates inside a [`DoubledSystem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WireVars {
    Quantum { z: usize, x: usize },
    Classical(usize),
}

impl WireVars {
    pub fn ty(self) -> WireType {
        match self {
            WireVars::Quantum { .. } => WireType::Quantum,
            WireVars::Classical(_) => WireType::Classical,
        }
    }
}

/// Flattens wire variables in boundary layout order.
pub fn flatten(wires: &[WireVars]) -> Vec<usize> {
    let zs = wires.iter().filter_map(|w| match w {
        WireVars::Quantum { z, .. } => Some(*z),
        _ => None,
    });
    let xs = wires.iter().filter_map(|w| match w {
        WireVars::Quantum { x, .. } => Some(*x),
        _ => None,
    });
    let cs = wires.iter().filter_map(|w| match w {
        WireVars::Classical(c) => Some(*c),
        _ => None,
    });
    zs.chain(xs).chain(cs).collect()
}

fn width(types: &[WireType]) -> usize {
    types.iter().map(|t| t.width()).sum()
}

/// Coordinate indices (within one boundary) of the z-coordinates of quantum wires.
fn z_positions(types: &[WireType]) -> Vec<usize> {
    (0..types.iter().filter(|&&t| t == WireType::Quantum).count()).collect()
}

/// A linear system whose variables are grouped into graded wires.
#[derive(Clone, Debug)]
pub struct DoubledSystem {
    sys: LinearSystem,
}

impl DoubledSystem {
    pub fn new(p: Prime) -> Self {
        DoubledSystem {
            sys: LinearSystem::new(p),
        }
    }

    pub fn prime(&self) -> Prime {
        self.sys.prime()
    }

    pub fn var(&mut self) -> usize {
        self.sys.add_var()
    }

    pub fn wire(&mut self, ty: WireType) -> WireVars {
        match ty {
            WireType::Quantum => WireVars::Quantum {
                z: self.sys.add_var(),
                x: self.sys.add_var(),
            },
            WireType::Classical => WireVars::Classical(self.sys.add_var()),
        }
    }

    pub fn wires(&mut self, types: &[WireType]) -> Vec<WireVars> {
        types.iter().map(|&t| self.wire(t)).collect()
    }

    /// Constrains raw variables by an affine relation.
    pub fn constrain_affine(&mut self, rel: &AffineRelation, vars: &[usize]) -> Result<()> {
        self.sys.constrain(rel, vars)
    }

    pub fn constrain(&mut self, r: &GradedRelation, ins: &[WireVars], outs: &[WireVars]) -> Result<()> {
        check_types("constraint inputs", &r.dom, ins)?;
        check_types("constraint outputs", &r.cod, outs)?;
        let vars = [flatten(ins), flatten(outs)].concat();
        self.sys.constrain(&r.rel, &vars)
    }

    pub fn project(&self, ins: &[WireVars], outs: &[WireVars]) -> GradedRelation {
        let rel = self.sys.project(&flatten(ins), &flatten(outs));
        GradedRelation {
            p: self.prime(),
            dom: ins.iter().map(|w| w.ty()).collect(),
            cod: outs.iter().map(|w| w.ty()).collect(),
            rel,
        }
    }
}

fn check_types(context: &'static str, expected: &[WireType], wires: &[WireVars]) -> Result<()> {
    let found: Vec<WireType> = wires.iter().map(|w| w.ty()).collect();
    if found != expected {
        return Err(Error::BoundaryMismatch {
            context,
            detail: format!("expected {}, found {}", fmt_types(expected), fmt_types(&found)),
        });
    }
    Ok(())
}

pub fn fmt_types(types: &[WireType]) -> String {
    let s: Vec<&str> = types
        .iter()
        .map(|t| match t {
            WireType::Quantum => "Q",
            WireType::Classical => "C",
        })
        .collect();
    format!("[{}]", s.join(","))
}

/// A process between lists of quantum and classical wires.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GradedRelation {
    p: Prime,
    dom: Vec<WireType>,
    cod: Vec<WireType>,
    rel: AffineRelation,
}

impl fmt::Debug for GradedRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GradedRelation({} → {}, {:?})",
            fmt_types(&self.dom),
            fmt_types(&self.cod),
            self.rel
        )
    }
}

impl GradedRelation {
    pub fn new(dom: Vec<WireType>, cod: Vec<WireType>, rel: AffineRelation) -> Result<Self> {
        if rel.dom() != width(&dom) || rel.cod() != width(&cod) {
            return Err(Error::BoundaryMismatch {
                context: "graded relation",
                detail: format!(
                    "{} → {} needs {}→{} coordinates, relation has {}→{}",
                    fmt_types(&dom),
                    fmt_types(&cod),
                    width(&dom),
                    width(&cod),
                    rel.dom(),
                    rel.cod()
                ),
            });
        }
        Ok(GradedRelation {
            p: rel.prime(),
            dom,
            cod,
            rel,
        })
    }

    /// An affine relation on classical wires only.
    pub fn classical(rel: AffineRelation) -> Self {
        let dom = vec![WireType::Classical; rel.dom()];
        let cod = vec![WireType::Classical; rel.cod()];
        GradedRelation {
            p: rel.prime(),
            dom,
            cod,
            rel,
        }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn dom(&self) -> &[WireType] {
        &self.dom
    }

    pub fn cod(&self) -> &[WireType] {
        &self.cod
    }

    pub fn relation(&self) -> &AffineRelation {
        &self.rel
    }

    pub fn is_empty(&self) -> bool {
        self.rel.is_empty()
    }

    pub fn is_all_quantum(&self) -> bool {
        self.dom.iter().chain(&self.cod).all(|&t| t == WireType::Quantum)
    }

    fn check_same_boundary(&self, other: &GradedRelation, context: &'static str) -> Result<()> {
        check_field(self.p, other.p)?;
        if self.dom != other.dom || self.cod != other.cod {
            return Err(Error::BoundaryMismatch {
                context,
                detail: format!(
                    "{} → {} vs {} → {}",
                    fmt_types(&self.dom),
                    fmt_types(&self.cod),
                    fmt_types(&other.dom),
                    fmt_types(&other.cod)
                ),
            });
        }
        Ok(())
    }

    /// First `self`, then `next`.
    pub fn compose(&self, next: &GradedRelation) -> Result<GradedRelation> {
        check_field(self.p, next.p)?;
        if self.cod != next.dom {
            return Err(Error::BoundaryMismatch {
                context: "compose",
                detail: format!("{} vs {}", fmt_types(&self.cod), fmt_types(&next.dom)),
            });
        }
        let rel = self.rel.compose(&next.rel)?;
        Ok(GradedRelation {
            p: self.p,
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            rel,
        })
    }

    pub fn tensor(&self, other: &GradedRelation) -> Result<GradedRelation> {
        check_field(self.p, other.p)?;
        let mut s = DoubledSystem::new(self.p);
        let i1 = s.wires(&self.dom);
        let i2 = s.wires(&other.dom);
        let o1 = s.wires(&self.cod);
        let o2 = s.wires(&other.cod);
        s.constrain(self, &i1, &o1)?;
        s.constrain(other, &i2, &o2)?;
        Ok(s.project(&[i1, i2].concat(), &[o1, o2].concat()))
    }

    /// Relational converse, which is the dagger of a process.
    pub fn dagger(&self) -> GradedRelation {
        GradedRelation {
            p: self.p,
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            rel: self.rel.converse(),
        }
    }

    /// Negates every z-coordinate.
    pub fn conjugate(&self) -> GradedRelation {
        let nd = width(&self.dom);
        let coords: Vec<usize> = z_positions(&self.dom)
            .into_iter()
            .chain(z_positions(&self.cod).into_iter().map(|i| nd + i))
            .collect();
        GradedRelation {
            p: self.p,
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            rel: self.rel.negate_coordinates(&coords),
        }
    }

    /// `dagger ∘ conjugate`: the process bent around with cups on both sides.
    pub fn transpose(&self) -> GradedRelation {
        self.conjugate().dagger()
    }

    pub fn equal(&self, other: &GradedRelation) -> Result<bool> {
        self.check_same_boundary(other, "equal")?;
        Ok(self.rel == other.rel)
    }

    pub fn subset(&self, other: &GradedRelation) -> Result<bool> {
        self.check_same_boundary(other, "subset")?;
        self.rel.subset(&other.rel)
    }

    /// Strict containment `self ⊂ other`.
    pub fn coarse_grains(&self, other: &GradedRelation) -> Result<bool> {
        Ok(self.subset(other)? && self.rel != other.rel)
    }

    fn require_quantum(&self, context: &'static str) -> Result<()> {
        if !self.is_all_quantum() {
            return Err(Error::BoundaryMismatch {
                context,
                detail: "all wires must be quantum".into(),
            });
        }
        Ok(())
    }

    /// The state `(−z_in, z_out | x_in, x_out)` obtained by bending inputs to outputs.
    pub fn bent_state(&self) -> Result<GradedSubspace> {
        self.require_quantum("bent state")?;
        let (ni, no) = (self.dom.len(), self.cod.len());
        let neg: Vec<usize> = (0..ni).collect();
        let r = self.rel.negate_coordinates(&neg);
        let order: Vec<usize> = (0..ni)
            .chain(2 * ni..2 * ni + no)
            .chain(ni..2 * ni)
            .chain(2 * ni + no..2 * ni + 2 * no)
            .collect();
        GradedSubspace::from_state(&r.reindex(0, &order)?)
    }

    /// Inverse of [`bent_state`](Self::bent_state): the first `n_in` wires become inputs.
    pub fn from_bent_state(state: &GradedSubspace, n_in: usize) -> Result<GradedRelation> {
        let total = state.space().n();
        if n_in > total {
            return Err(Error::DimensionMismatch {
                context: "unbending",
                expected: total,
                found: n_in,
            });
        }
        let no = total - n_in;
        let order: Vec<usize> = (0..n_in)
            .chain(total..total + n_in)
            .chain(n_in..total)
            .chain(total + n_in..2 * total)
            .collect();
        let rel = state.to_state().reindex(2 * n_in, &order)?;
        let neg: Vec<usize> = (0..n_in).collect();
        GradedRelation::new(
            vec![WireType::Quantum; n_in],
            vec![WireType::Quantum; no],
            rel.negate_coordinates(&neg),
        )
    }

    /// Classification of the bent state; requires all-quantum boundaries.
    pub fn classify(&self) -> Result<Classification> {
        Ok(self.bent_state()?.classify())
    }
}

fn q(n: usize) -> Vec<WireType> {
    vec![WireType::Quantum; n]
}

fn c(n: usize) -> Vec<WireType> {
    vec![WireType::Classical; n]
}

fn z_vars(ws: &[WireVars]) -> Vec<usize> {
    ws.iter()
        .filter_map(|w| match w {
            WireVars::Quantum { z, .. } => Some(*z),
            _ => None,
        })
        .collect()
}

fn x_vars(ws: &[WireVars]) -> Vec<usize> {
    ws.iter()
        .filter_map(|w| match w {
            WireVars::Quantum { x, .. } => Some(*x),
            _ => None,
        })
        .collect()
}

fn c_var(w: WireVars) -> usize {
    match w {
        WireVars::Classical(c) => c,
        WireVars::Quantum { .. } => unreachable!("classical wire expected"),
    }
}

/// Identity on the given wire list.
pub fn identity_of(p: Prime, types: &[WireType]) -> GradedRelation {
    let mut s = DoubledSystem::new(p);
    let w = s.wires(types);
    s.project(&w, &w)
}

/// Identity on `n` quantum wires.
pub fn identity(p: Prime, n: usize) -> GradedRelation {
    identity_of(p, &q(n))
}

/// Wire permutation: output `i` is input `perm[i]`.
pub fn permutation(p: Prime, types: &[WireType], perm: &[usize]) -> Result<GradedRelation> {
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..types.len()).collect::<Vec<_>>() {
        return Err(Error::Internal(format!("not a permutation: {perm:?}")));
    }
    let mut s = DoubledSystem::new(p);
    let w = s.wires(types);
    let out: Vec<WireVars> = perm.iter().map(|&i| w[i]).collect();
    Ok(s.project(&w, &out))
}

pub fn swap(p: Prime) -> GradedRelation {
    permutation(p, &q(2), &[1, 0]).expect("valid permutation")
}

/// Z spider: the x-grading is copied through a shared leg `t`, which is scaled
/// by the linear phase and fed into an additive spider with the affine phase
/// on the z-grading. Result: all x equal `t` and `Σz_out − Σz_in = a + b·t`.
pub fn z_spider(p: Prime, n_in: usize, n_out: usize, phase: Phase) -> GradedRelation {
    let mut s = DoubledSystem::new(p);
    let ins = s.wires(&q(n_in));
    let outs = s.wires(&q(n_out));
    let t = s.var();
    let u = s.var();
    let xs = [x_vars(&ins), x_vars(&outs), vec![t]].concat();
    let zs = [z_vars(&ins), vec![u], z_vars(&outs)].concat();
    s.constrain_affine(&affrel::z_spider(p, n_in, n_out + 1), &xs).expect("arity");
    s.constrain_affine(&affrel::scalar(p, phase.linear), &[t, u]).expect("arity");
    s.constrain_affine(&affrel::x_spider(p, n_in + 1, n_out, phase.affine), &zs)
        .expect("arity");
    s.project(&ins, &outs)
}

/// X spider, the colour-swapped counterpart: all z equal `s` and
/// `Σx_out − Σx_in = a + b·s`.
pub fn x_spider(p: Prime, n_in: usize, n_out: usize, phase: Phase) -> GradedRelation {
    let mut s = DoubledSystem::new(p);
    let ins = s.wires(&q(n_in));
    let outs = s.wires(&q(n_out));
    let t = s.var();
    let u = s.var();
    let zs = [z_vars(&ins), z_vars(&outs), vec![t]].concat();
    let xs = [x_vars(&ins), vec![u], x_vars(&outs)].concat();
    s.constrain_affine(&affrel::z_spider(p, n_in, n_out + 1), &zs).expect("arity");
    s.constrain_affine(&affrel::scalar(p, phase.linear), &[t, u]).expect("arity");
    s.constrain_affine(&affrel::x_spider(p, n_in + 1, n_out, phase.affine), &xs)
        .expect("arity");
    s.project(&ins, &outs)
}

/// `(z, x) ↦ (a⁻¹·z, a·x)`: co-scalar on the z-grading, scalar on the x-grading.
pub fn scaling_gate(p: Prime, a: u32) -> Result<GradedRelation> {
    let a = a % p.get();
    if p.inv(a).is_none() {
        return Err(Error::NotInvertible(a, p.get()));
    }
    let mut s = DoubledSystem::new(p);
    let i = s.wires(&q(1));
    let o = s.wires(&q(1));
    s.constrain_affine(&affrel::co_scalar(p, a), &[z_vars(&i)[0], z_vars(&o)[0]])?;
    s.constrain_affine(&affrel::scalar(p, a), &[x_vars(&i)[0], x_vars(&o)[0]])?;
    Ok(s.project(&i, &o))
}

/// Euler decomposition `Z(0,1); X(0,−1); Z(0,1)`, acting as `(z, x) ↦ (x, −z)`.
pub fn fourier(p: Prime) -> GradedRelation {
    let z = z_spider(p, 1, 1, Phase::new(p, 0, 1));
    let x = x_spider(p, 1, 1, Phase::new(p, 0, -1));
    z.compose(&x).and_then(|r| r.compose(&z)).expect("arity")
}

/// `(z, x) ↦ (−x, z)`.
pub fn fourier_dagger(p: Prime) -> GradedRelation {
    fourier(p).dagger()
}

/// Shift `(z, x) ↦ (z + u_z, x + u_x)` on `u_z.len()` wires.
pub fn weyl(p: Prime, uz: &[u32], ux: &[u32]) -> Result<GradedRelation> {
    if uz.len() != ux.len() {
        return Err(Error::DimensionMismatch {
            context: "weyl shift",
            expected: uz.len(),
            found: ux.len(),
        });
    }
    let n = uz.len();
    let mut s = DoubledSystem::new(p);
    let i = s.wires(&q(n));
    let o = s.wires(&q(n));
    let (iz, ix, oz, ox) = (z_vars(&i), x_vars(&i), z_vars(&o), x_vars(&o));
    for w in 0..n {
        s.constrain_affine(&affrel::x_spider(p, 1, 1, uz[w]), &[iz[w], oz[w]])?;
        s.constrain_affine(&affrel::x_spider(p, 1, 1, ux[w]), &[ix[w], ox[w]])?;
    }
    Ok(s.project(&i, &o))
}

/// Shift by a vector `(z₁…z_n, x₁…x_n)`.
pub fn weyl_vec(p: Prime, u: &[u32]) -> Result<GradedRelation> {
    if !u.len().is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            context: "weyl shift",
            expected: u.len() + 1,
            found: u.len(),
        });
    }
    let n = u.len() / 2;
    weyl(p, &u[..n], &u[n..])
}

/// Total relation on one quantum wire, `1 → 0`.
pub fn discard(p: Prime) -> GradedRelation {
    let mut s = DoubledSystem::new(p);
    let i = s.wires(&q(1));
    s.project(&i, &[])
}

pub fn codiscard(p: Prime) -> GradedRelation {
    discard(p).dagger()
}

/// `{((z,x),(z',x))}`.
pub fn projector_z(p: Prime) -> GradedRelation {
    let mut s = DoubledSystem::new(p);
    let i = s.wires(&q(1));
    let o = s.wires(&q(1));
    s.constrain_affine(&affrel::identity(p, 1), &[x_vars(&i)[0], x_vars(&o)[0]])
        .expect("arity");
    s.project(&i, &o)
}

/// `{((z,x),(z,x'))}`.
pub fn projector_x(p: Prime) -> GradedRelation {
    let mut s = DoubledSystem::new(p);
    let i = s.wires(&q(1));
    let o = s.wires(&q(1));
    s.constrain_affine(&affrel::identity(p, 1), &[z_vars(&i)[0], z_vars(&o)[0]])
        .expect("arity");
    s.project(&i, &o)
}

/// `{((z,x), c) : c = x}`.
pub fn measure_z(p: Prime) -> GradedRelation {
    let mut s = DoubledSystem::new(p);
    let i = s.wires(&q(1));
    let o = s.wires(&c(1));
    s.constrain_affine(&affrel::identity(p, 1), &[x_vars(&i)[0], c_var(o[0])])
        .expect("arity");
    s.project(&i, &o)
}

/// `{(c, (z',x)) : x = c}`.
pub fn prep_z(p: Prime) -> GradedRelation {
    measure_z(p).dagger()
}

pub fn measure_x(p: Prime) -> GradedRelation {
    fourier_dagger(p).compose(&measure_z(p)).expect("arity")
}

pub fn prep_x(p: Prime) -> GradedRelation {
    prep_z(p).compose(&fourier(p)).expect("arity")
}

/// Classical point `v` as a state on `len(v)` classical wires.
pub fn classical_point(p: Prime, v: &[u32]) -> GradedRelation {
    GradedRelation::classical(AffineRelation::point_state(p, v))
}

/// The Z-basis state with x-coordinate `c`.
pub fn prep_z_point(p: Prime, c: u32) -> GradedRelation {
    classical_point(p, &[c]).compose(&prep_z(p)).expect("arity")
}

pub fn classical_z_spider(p: Prime, n_in: usize, n_out: usize) -> GradedRelation {
    GradedRelation::classical(affrel::z_spider(p, n_in, n_out))
}

pub fn classical_x_spider(p: Prime, n_in: usize, n_out: usize, a: u32) -> GradedRelation {
    GradedRelation::classical(affrel::x_spider(p, n_in, n_out, a))
}

/// Bell state: the Z spider `0 → 2`, `{z₁ = −z₂, x₁ = x₂}`.
pub fn cup(p: Prime) -> GradedRelation {
    z_spider(p, 0, 2, Phase::zero())
}

pub fn cap(p: Prime) -> GradedRelation {
    z_spider(p, 2, 0, Phase::zero())
}

/// `X^c`: a classical wire controls an x-shift, `Q ⊗ C → Q`.
pub fn controlled_x(p: Prime) -> GradedRelation {
    identity(p, 1)
        .tensor(&prep_z(p))
        .and_then(|r| r.compose(&x_spider(p, 2, 1, Phase::zero())))
        .expect("arity")
}

/// `Z^c`: a classical wire controls a z-shift, `Q ⊗ C → Q`.
pub fn controlled_z(p: Prime) -> GradedRelation {
    identity(p, 1)
        .tensor(&prep_x(p))
        .and_then(|r| r.compose(&z_spider(p, 2, 1, Phase::zero())))
        .expect("arity")
}

/// `Q^n ⊗ C^{2n} → Q^n`: shifts `(z, x)` by the classical vector.
pub fn controlled_weyl(p: Prime, n: usize) -> GradedRelation {
    let mut s = DoubledSystem::new(p);
    let i = s.wires(&q(n));
    let ctl = s.wires(&c(2 * n));
    let o = s.wires(&q(n));
    let (iv, ov) = (flatten(&i), flatten(&o));
    let add = affrel::x_spider(p, 2, 1, 0);
    for j in 0..2 * n {
        s.constrain_affine(&add, &[iv[j], c_var(ctl[j]), ov[j]]).expect("arity");
    }
    s.project(&[i, ctl].concat(), &o)
}

/// Non-destructive Z measurement `Q → Q ⊗ C`: measure, copy the outcome, re-prepare.
pub fn nd_measure_z(p: Prime) -> GradedRelation {
    measure_z(p)
        .compose(&classical_z_spider(p, 1, 2))
        .and_then(|r| r.compose(&prep_z(p).tensor(&identity_of(p, &c(1)))?))
        .expect("arity")
}

/// Graph of a linear map on `(z…, x…)` followed by a shift.
pub fn symplectic_map(m: &FpMatrix, shift: &[u32]) -> Result<GradedRelation> {
    if m.rows() != m.cols() || !m.rows().is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            context: "symplectic matrix",
            expected: m.cols(),
            found: m.rows(),
        });
    }
    let n = m.rows() / 2;
    GradedRelation::new(q(n), q(n), AffineRelation::from_affine_map(m, shift)?)
}

/// `g` applied to the listed wires of an `n`-wire register; `g` must be all-quantum `k → k`.
pub fn embed(g: &GradedRelation, wires: &[usize], n: usize) -> Result<GradedRelation> {
    if g.dom.len() != wires.len() || g.cod.len() != wires.len() || !g.is_all_quantum() {
        return Err(Error::BoundaryMismatch {
            context: "embed",
            detail: format!("gate {} → {} on {} wires", fmt_types(&g.dom), fmt_types(&g.cod), wires.len()),
        });
    }
    if wires.iter().any(|&w| w >= n) {
        return Err(Error::DimensionMismatch {
            context: "embed wire index",
            expected: n,
            found: wires.iter().copied().max().unwrap_or(0),
        });
    }
    let mut s = DoubledSystem::new(g.p);
    let ins = s.wires(&q(n));
    let mut outs = ins.clone();
    let gi: Vec<WireVars> = wires.iter().map(|&w| ins[w]).collect();
    let go = s.wires(&q(wires.len()));
    for (&w, &o) in wires.iter().zip(&go) {
        outs[w] = o;
    }
    s.constrain(g, &gi, &go)?;
    Ok(s.project(&ins, &outs))
}

/// `x_t += f·x_c`, `z_c −= f·z_t` from spiders: `Z(1,2)` on the control,
/// a scaling gate on the connecting leg, `X(2,1)` on the target.
pub fn controlled_add(p: Prime, factor: u32) -> Result<GradedRelation> {
    let mut s = DoubledSystem::new(p);
    let ins = s.wires(&q(2));
    let outs = s.wires(&q(2));
    let leg = s.wires(&q(1));
    let leg2 = s.wires(&q(1));
    s.constrain(&z_spider(p, 1, 2, Phase::zero()), &ins[..1], &[outs[0], leg[0]])?;
    s.constrain(&scaling_gate(p, factor)?, &leg, &leg2)?;
    s.constrain(&x_spider(p, 2, 1, Phase::zero()), &[ins[1], leg2[0]], &outs[1..])?;
    Ok(s.project(&ins, &outs))
}

/// `x_a += f·z_b`, `x_b += f·z_a` from spiders: `X(1,2)` on the first wire,
/// `S_f ∘ F†` on the leg, `X(2,1)` on the second wire.
pub fn x_coupling(p: Prime, factor: u32) -> Result<GradedRelation> {
    let mut s = DoubledSystem::new(p);
    let ins = s.wires(&q(2));
    let outs = s.wires(&q(2));
    let leg = s.wires(&q(1));
    let leg2 = s.wires(&q(1));
    let connector = fourier_dagger(p).compose(&scaling_gate(p, factor)?)?;
    s.constrain(&x_spider(p, 1, 2, Phase::zero()), &ins[..1], &[outs[0], leg[0]])?;
    s.constrain(&connector, &leg, &leg2)?;
    s.constrain(&x_spider(p, 2, 1, Phase::zero()), &[ins[1], leg2[0]], &outs[1..])?;
    Ok(s.project(&ins, &outs))
}

/// An elementary symplectomorphism on `n` wires, assembled from generators.
pub fn op_relation(p: Prime, n: usize, op: &SymplecticOp) -> Result<GradedRelation> {
    match *op {
        SymplecticOp::Fourier(j) => embed(&fourier(p), &[j], n),
        SymplecticOp::Swap(a, b) => embed(&swap(p), &[a, b], n),
        SymplecticOp::Cx {
            control,
            target,
            factor,
        } => embed(&controlled_add(p, factor)?, &[control, target], n),
        SymplecticOp::XPhase { wire, b } => embed(&x_spider(p, 1, 1, Phase { affine: 0, linear: b }), &[wire], n),
        SymplecticOp::XCoupling { a, b, factor } => embed(&x_coupling(p, factor)?, &[a, b], n),
    }
}

impl Dilation {
    fn ancilla_preparation(&self) -> GradedRelation {
        let p = self.space().prime();
        let mut r = identity(p, self.k());
        for _ in self.k()..self.n() {
            r = r.tensor(&prep_z_point(p, 0)).expect("same field");
        }
        r
    }

    /// `U` followed by the inverse shift: maps the code space onto `{x_anc = 0}`.
    pub fn unitary_relation(&self) -> GradedRelation {
        let p = self.space().prime();
        let neg: Vec<u32> = self.shift().iter().map(|&a| p.neg(a)).collect();
        weyl_vec(p, &neg)
            .and_then(|w| w.compose(&symplectic_map(self.unitary(), &vec![0; 2 * self.n()])?))
            .expect("consistent sizes")
    }

    /// The isometry `k → n` whose image is the dilated subspace.
    pub fn encoder(&self) -> GradedRelation {
        let inv = symplectic_map(self.inverse_unitary(), self.shift()).expect("consistent sizes");
        self.ancilla_preparation().compose(&inv).expect("arity")
    }

    /// The encoder assembled gate by gate from the recorded operations.
    pub fn encoder_circuit(&self) -> Result<GradedRelation> {
        let p = self.space().prime();
        let n = self.n();
        let mut r = self.ancilla_preparation();
        for op in self.ops().iter().rev() {
            r = r.compose(&op_relation(p, n, op)?.dagger())?;
        }
        r.compose(&weyl_vec(p, self.shift())?)
    }
}

/// Splits an all-quantum coisotropic process into a pure process with `k`
/// extra outputs, such that discarding those outputs gives back `r`.
pub fn purify(r: &GradedRelation) -> Result<(GradedRelation, usize)> {
    if r.is_empty() {
        return Err(Error::NotCoisotropic("empty".into()));
    }
    let state = r.bent_state()?;
    let dil = stinespring_dilate(&state)?;
    let k = dil.k();
    let big = state.space().n();
    let bent = dil.encoder().bent_state()?;
    // Logical wires of the encoder come first; move them after the physical ones.
    let order: Vec<usize> = (k..k + big).chain(0..k).collect();
    let total = k + big;
    let coords: Vec<usize> = order
        .iter()
        .copied()
        .chain(order.iter().map(|&w| total + w))
        .collect();
    let moved = GradedSubspace::from_state(&bent.to_state().reindex(0, &coords)?)?;
    let pure = GradedRelation::from_bent_state(&moved, r.dom.len())?;
    Ok((pure, k))
}

/// `discard^k` on the last `k` of `n_keep + k` quantum wires.
pub fn discard_tail(p: Prime, n_keep: usize, k: usize) -> GradedRelation {
    let mut s = DoubledSystem::new(p);
    let ins = s.wires(&q(n_keep + k));
    s.project(&ins, &ins[..n_keep])
}
