//! The prop of affine relations over F_p.
//!
//! A relation `n → m` is a possibly-empty affine subspace of F_p^n ⊕ F_p^m.
//! Non-empty relations are stored homogenized: the affine set `A` becomes the
//! linear subspace `{(t·a + l, t)}` of F_p^(n+m+1), with coordinates ordered
//! inputs, outputs, then the homogenizing coordinate `h`. The stored basis is
//! in RREF, so equality of relations is equality of the stored values.
//!
//! All operations go through [`LinearSystem`]: constraints are collected over
//! named variables and the unwanted ones are eliminated exactly.

use std::fmt;

use crate::error::{Error, Result};
use crate::fplinalg::{check_field, FpMatrix, Prime, Subspace};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AffineRelation {
    p: Prime,
    dom: usize,
    cod: usize,
    /// Homogenized RREF representation; `None` is the empty relation.
    hom: Option<Subspace>,
}

impl fmt::Debug for AffineRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.hom {
            None => write!(f, "AffineRelation(F_{}, {}→{}, empty)", self.p, self.dom, self.cod),
            Some(h) => write!(
                f,
                "AffineRelation(F_{}, {}→{}, {:?})",
                self.p,
                self.dom,
                self.cod,
                h.basis()
            ),
        }
    }
}

/// A system of affine equations over a growing set of variables.
///
/// Each equation reads `Σ cᵢ·vᵢ + c = 0`.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    p: Prime,
    nvars: usize,
    equations: Vec<(Vec<(usize, u32)>, u32)>,
}

impl LinearSystem {
    pub fn new(p: Prime) -> Self {
        LinearSystem {
            p,
            nvars: 0,
            equations: Vec::new(),
        }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    pub fn add_var(&mut self) -> usize {
        self.nvars += 1;
        self.nvars - 1
    }

    pub fn add_vars(&mut self, k: usize) -> Vec<usize> {
        (0..k).map(|_| self.add_var()).collect()
    }

    pub fn add_equation(&mut self, terms: Vec<(usize, u32)>, constant: u32) {
        self.equations.push((terms, constant % self.p.get()));
    }

    /// Forces the variables `vars` (inputs then outputs of `rel`) to lie in `rel`.
    /// A variable may appear more than once, which identifies the two coordinates.
    pub fn constrain(&mut self, rel: &AffineRelation, vars: &[usize]) -> Result<()> {
        check_field(self.p, rel.p)?;
        if vars.len() != rel.arity() {
            return Err(Error::DimensionMismatch {
                context: "constraint arity",
                expected: rel.arity(),
                found: vars.len(),
            });
        }
        if let Some(&v) = vars.iter().find(|&&v| v >= self.nvars) {
            return Err(Error::Internal(format!("unknown variable {v}")));
        }
        let eqs = rel.equations();
        let n = rel.arity();
        for i in 0..eqs.rows() {
            let row = eqs.row(i);
            let terms = (0..n)
                .filter(|&j| row[j] != 0)
                .map(|j| (vars[j], row[j]))
                .collect();
            self.add_equation(terms, row[n]);
        }
        Ok(())
    }

    fn matrix(&self) -> FpMatrix {
        let p = self.p;
        let cols = self.nvars + 1;
        let mut m = FpMatrix::zeros(p, self.equations.len(), cols);
        for (i, (terms, c)) in self.equations.iter().enumerate() {
            for &(v, a) in terms {
                m.set(i, v, p.add(m.get(i, v), a));
            }
            m.set(i, self.nvars, *c);
        }
        m
    }

    /// The relation on `dom_vars → cod_vars` obtained by existentially
    /// quantifying every other variable.
    pub fn project(&self, dom_vars: &[usize], cod_vars: &[usize]) -> AffineRelation {
        let sol = self.matrix().kernel();
        let h = self.nvars;
        let consistent = (0..sol.dim()).any(|i| sol.basis().get(i, h) != 0);
        let (dom, cod) = (dom_vars.len(), cod_vars.len());
        if !consistent {
            return AffineRelation::empty(self.p, dom, cod);
        }
        let mut keep: Vec<usize> = dom_vars.iter().chain(cod_vars).copied().collect();
        keep.push(h);
        AffineRelation {
            p: self.p,
            dom,
            cod,
            hom: Some(sol.project(&keep)),
        }
    }
}

fn total_rows(p: Prime, n: usize) -> Subspace {
    Subspace::full(p, n + 1)
}

impl AffineRelation {
    pub fn empty(p: Prime, dom: usize, cod: usize) -> Self {
        AffineRelation {
            p,
            dom,
            cod,
            hom: None,
        }
    }

    /// All of F_p^dom ⊕ F_p^cod.
    pub fn total(p: Prime, dom: usize, cod: usize) -> Self {
        AffineRelation {
            p,
            dom,
            cod,
            hom: Some(total_rows(p, dom + cod)),
        }
    }

    /// `point + linear`, where `point` and `linear` live in F_p^(dom+cod).
    pub fn from_parts(p: Prime, dom: usize, cod: usize, point: &[u32], linear: &Subspace) -> Result<Self> {
        check_field(p, linear.prime())?;
        let n = dom + cod;
        for (what, len) in [("relation point", point.len()), ("relation linear part", linear.ambient())] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    context: what,
                    expected: n,
                    found: len,
                });
            }
        }
        let mut m = FpMatrix::zeros(p, 0, n + 1);
        for i in 0..linear.dim() {
            let mut row = linear.basis().row(i).to_vec();
            row.push(0);
            m.push_row(&row)?;
        }
        let mut row = point.to_vec();
        row.push(1);
        m.push_row(&row)?;
        Ok(AffineRelation {
            p,
            dom,
            cod,
            hom: Some(Subspace::from_matrix(&m)),
        })
    }

    /// Solutions of the affine equations `rows`, each of length `dom+cod+1`
    /// where the last entry is the constant term: `Σ cᵢ·vᵢ + c = 0`.
    pub fn from_equations<R: AsRef<[i64]>>(p: Prime, dom: usize, cod: usize, rows: &[R]) -> Result<Self> {
        let m = FpMatrix::from_rows(p, dom + cod + 1, rows)?;
        let mut sys = LinearSystem::new(p);
        let vars = sys.add_vars(dom + cod);
        for i in 0..m.rows() {
            let row = m.row(i);
            let terms = (0..dom + cod)
                .filter(|&j| row[j] != 0)
                .map(|j| (vars[j], row[j]))
                .collect();
            sys.add_equation(terms, row[dom + cod]);
        }
        Ok(sys.project(&vars[..dom], &vars[dom..]))
    }

    /// The single point `v` as a state `0 → len(v)`.
    pub fn point_state(p: Prime, v: &[u32]) -> Self {
        Self::from_parts(p, 0, v.len(), v, &Subspace::zero(p, v.len())).expect("consistent sizes")
    }

    /// Graph `{(x, M·x + b)}` of an affine map given by an `m × n` matrix.
    pub fn from_affine_map(m: &FpMatrix, shift: &[u32]) -> Result<Self> {
        let p = m.prime();
        let (n, k) = (m.cols(), m.rows());
        if shift.len() != k {
            return Err(Error::DimensionMismatch {
                context: "affine map shift",
                expected: k,
                found: shift.len(),
            });
        }
        let mut sys = LinearSystem::new(p);
        let x = sys.add_vars(n);
        let y = sys.add_vars(k);
        for i in 0..k {
            let mut terms: Vec<(usize, u32)> = (0..n)
                .filter(|&j| m.get(i, j) != 0)
                .map(|j| (x[j], m.get(i, j)))
                .collect();
            terms.push((y[i], p.neg(1)));
            sys.add_equation(terms, shift[i]);
        }
        Ok(sys.project(&x, &y))
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn dom(&self) -> usize {
        self.dom
    }

    #[inline]
    pub fn cod(&self) -> usize {
        self.cod
    }

    /// Total number of coordinates, `dom + cod`.
    #[inline]
    pub fn arity(&self) -> usize {
        self.dom + self.cod
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.hom.is_none()
    }

    /// Homogenized RREF basis, or `None` for the empty relation.
    pub fn homogenized(&self) -> Option<&Subspace> {
        self.hom.as_ref()
    }

    /// The linear part `{v : v + a ∈ R}`; the zero space for the empty relation.
    pub fn linear_part(&self) -> Subspace {
        let n = self.arity();
        match &self.hom {
            None => Subspace::zero(self.p, n),
            Some(h) => {
                let mut hyper = FpMatrix::zeros(self.p, 1, n + 1);
                hyper.set(0, n, 1);
                let at_infinity = h
                    .intersect(&hyper.kernel())
                    .expect("same ambient");
                let cols: Vec<usize> = (0..n).collect();
                at_infinity.project(&cols)
            }
        }
    }

    /// Canonical point of the relation (reduced modulo the linear part).
    pub fn point(&self) -> Option<Vec<u32>> {
        let h = self.hom.as_ref()?;
        let n = self.arity();
        let basis = h.basis();
        let i = (0..basis.rows()).find(|&i| basis.get(i, n) != 0)?;
        let inv = self.p.inv(basis.get(i, n)).expect("nonzero");
        let v: Vec<u32> = basis.row(i)[..n].iter().map(|&x| self.p.mul(x, inv)).collect();
        Some(self.linear_part().reduce(&v))
    }

    /// Whether the relation is a linear subspace (contains the origin).
    pub fn is_linear(&self) -> bool {
        self.point().is_some_and(|a| a.iter().all(|&x| x == 0))
    }

    /// Defining equations as rows `(c₁…c_{n+m}, c)` meaning `Σ cᵢ·vᵢ + c = 0`,
    /// in RREF. The empty relation is the single equation `1 = 0`.
    pub fn equations(&self) -> FpMatrix {
        let n = self.arity();
        match &self.hom {
            None => {
                let mut m = FpMatrix::zeros(self.p, 1, n + 1);
                m.set(0, n, 1);
                m
            }
            Some(h) => h.orthogonal_complement().basis().clone(),
        }
    }

    /// Membership of a point `(x, y)` given as one vector of length `dom+cod`.
    pub fn contains(&self, v: &[u32]) -> bool {
        match &self.hom {
            None => false,
            Some(h) => {
                if v.len() != self.arity() {
                    return false;
                }
                let mut w = v.to_vec();
                w.push(1);
                h.contains(&w)
            }
        }
    }

    /// Every point of the relation. Exponential in the dimension; meant for small cases.
    pub fn points(&self) -> Vec<Vec<u32>> {
        let Some(a) = self.point() else {
            return Vec::new();
        };
        let lin = self.linear_part();
        let q = self.p.get() as usize;
        let count = q.pow(lin.dim() as u32);
        (0..count)
            .map(|mut k| {
                let mut v = a.clone();
                for i in 0..lin.dim() {
                    let c = (k % q) as u32;
                    k /= q;
                    for (o, &b) in v.iter_mut().zip(lin.basis().row(i)) {
                        *o = self.p.add(*o, self.p.mul(c, b));
                    }
                }
                v
            })
            .collect()
    }

    fn check_same_shape(&self, other: &AffineRelation, context: &'static str) -> Result<()> {
        check_field(self.p, other.p)?;
        if self.dom != other.dom || self.cod != other.cod {
            return Err(Error::BoundaryMismatch {
                context,
                detail: format!("{}→{} vs {}→{}", self.dom, self.cod, other.dom, other.cod),
            });
        }
        Ok(())
    }

    /// Relational composition: first `self`, then `next`.
    pub fn compose(&self, next: &AffineRelation) -> Result<AffineRelation> {
        check_field(self.p, next.p)?;
        if self.cod != next.dom {
            return Err(Error::BoundaryMismatch {
                context: "compose",
                detail: format!("codomain {} vs domain {}", self.cod, next.dom),
            });
        }
        if self.is_empty() || next.is_empty() {
            return Ok(Self::empty(self.p, self.dom, next.cod));
        }
        let mut sys = LinearSystem::new(self.p);
        let x = sys.add_vars(self.dom);
        let y = sys.add_vars(self.cod);
        let z = sys.add_vars(next.cod);
        sys.constrain(self, &[x.clone(), y.clone()].concat())?;
        sys.constrain(next, &[y, z.clone()].concat())?;
        Ok(sys.project(&x, &z))
    }

    /// Direct sum: inputs `(x₁, x₂)`, outputs `(y₁, y₂)`.
    pub fn tensor(&self, other: &AffineRelation) -> Result<AffineRelation> {
        check_field(self.p, other.p)?;
        let (dom, cod) = (self.dom + other.dom, self.cod + other.cod);
        if self.is_empty() || other.is_empty() {
            return Ok(Self::empty(self.p, dom, cod));
        }
        let mut sys = LinearSystem::new(self.p);
        let x1 = sys.add_vars(self.dom);
        let x2 = sys.add_vars(other.dom);
        let y1 = sys.add_vars(self.cod);
        let y2 = sys.add_vars(other.cod);
        sys.constrain(self, &[x1.clone(), y1.clone()].concat())?;
        sys.constrain(other, &[x2.clone(), y2.clone()].concat())?;
        Ok(sys.project(&[x1, x2].concat(), &[y1, y2].concat()))
    }

    /// Reorders coordinates: new coordinate `i` is old coordinate `order[i]`.
    /// `order` must be a permutation of `0..dom+cod`; the first `dom` entries
    /// become the new inputs.
    pub fn reindex(&self, dom: usize, order: &[usize]) -> Result<AffineRelation> {
        let n = self.arity();
        let mut seen = vec![false; n];
        if order.len() != n || dom > n {
            return Err(Error::DimensionMismatch {
                context: "reindex",
                expected: n,
                found: order.len(),
            });
        }
        for &o in order {
            if o >= n || seen[o] {
                return Err(Error::Internal(format!("reindex order is not a permutation: {order:?}")));
            }
            seen[o] = true;
        }
        let cod = n - dom;
        Ok(match &self.hom {
            None => Self::empty(self.p, dom, cod),
            Some(h) => {
                let mut cols = order.to_vec();
                cols.push(n);
                AffineRelation {
                    p: self.p,
                    dom,
                    cod,
                    hom: Some(h.project(&cols)),
                }
            }
        })
    }

    /// Relational converse `{(y, x) : (x, y) ∈ R}`.
    pub fn converse(&self) -> AffineRelation {
        let order: Vec<usize> = (self.dom..self.arity()).chain(0..self.dom).collect();
        self.reindex(self.cod, &order).expect("valid permutation")
    }

    /// Orthogonal complement `V^⊥` with respect to the dot product on F_p^(n+m).
    ///
    /// Only linear relations have a complement; the empty relation maps to itself.
    pub fn ortho_complement(&self) -> Result<AffineRelation> {
        if self.is_empty() {
            return Ok(self.clone());
        }
        if !self.is_linear() {
            return Err(Error::UnsupportedShift);
        }
        let comp = self.linear_part().orthogonal_complement();
        Self::from_parts(self.p, self.dom, self.cod, &vec![0; self.arity()], &comp)
    }

    pub fn subset(&self, other: &AffineRelation) -> Result<bool> {
        self.check_same_shape(other, "subset")?;
        Ok(match (&self.hom, &other.hom) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a.is_subspace_of(b)?,
        })
    }

    pub fn equal(&self, other: &AffineRelation) -> Result<bool> {
        self.check_same_shape(other, "equal")?;
        Ok(self == other)
    }

    /// `{y : ∃x. (x, y) ∈ R}` as a state `0 → cod`.
    pub fn image(&self) -> AffineRelation {
        let order: Vec<usize> = (self.dom..self.arity()).chain(0..self.dom).collect();
        self.project_onto(&order[..self.cod], 0)
    }

    /// `{x : ∃y. (x, y) ∈ R}` as a state `0 → dom`.
    pub fn coimage(&self) -> AffineRelation {
        self.converse().image()
    }

    /// Existential projection onto the coordinates `keep`, the first `dom` of
    /// which become inputs.
    pub fn project_onto(&self, keep: &[usize], dom: usize) -> AffineRelation {
        let cod = keep.len() - dom;
        match &self.hom {
            None => Self::empty(self.p, dom, cod),
            Some(h) => {
                let mut cols = keep.to_vec();
                cols.push(self.arity());
                AffineRelation {
                    p: self.p,
                    dom,
                    cod,
                    hom: Some(h.project(&cols)),
                }
            }
        }
    }

    /// Moves all outputs to the input side, producing a state `0 → dom+cod` with
    /// the same coordinates (no sign change).
    pub fn as_state(&self) -> AffineRelation {
        AffineRelation {
            p: self.p,
            dom: 0,
            cod: self.arity(),
            hom: self.hom.clone(),
        }
    }

    /// Reinterprets the coordinates of a relation with a different split into
    /// inputs and outputs.
    pub fn with_boundary(&self, dom: usize) -> Result<AffineRelation> {
        if dom > self.arity() {
            return Err(Error::DimensionMismatch {
                context: "boundary split",
                expected: self.arity(),
                found: dom,
            });
        }
        Ok(AffineRelation {
            p: self.p,
            dom,
            cod: self.arity() - dom,
            hom: self.hom.clone(),
        })
    }

    /// Negates the listed coordinates.
    pub fn negate_coordinates(&self, coords: &[usize]) -> AffineRelation {
        match &self.hom {
            None => self.clone(),
            Some(h) => {
                let mut m = h.basis().clone();
                for i in 0..m.rows() {
                    for &c in coords {
                        let v = m.get(i, c);
                        m.set(i, c, self.p.neg(v));
                    }
                }
                AffineRelation {
                    p: self.p,
                    dom: self.dom,
                    cod: self.cod,
                    hom: Some(Subspace::from_matrix(&m)),
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

pub fn identity(p: Prime, n: usize) -> AffineRelation {
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut r = vec![0i64; 2 * n + 1];
            r[i] = 1;
            r[n + i] = -1;
            r
        })
        .collect();
    AffineRelation::from_equations(p, n, n, &rows).expect("well-formed")
}

/// Z spider: every wire carries the same value.
pub fn z_spider(p: Prime, n_in: usize, n_out: usize) -> AffineRelation {
    let n = n_in + n_out;
    let rows: Vec<Vec<i64>> = (1..n)
        .map(|i| {
            let mut r = vec![0i64; n + 1];
            r[0] = 1;
            r[i] = -1;
            r
        })
        .collect();
    AffineRelation::from_equations(p, n_in, n_out, &rows).expect("well-formed")
}

/// X spider with affine phase `a`: `Σ outputs − Σ inputs = a`.
pub fn x_spider(p: Prime, n_in: usize, n_out: usize, a: u32) -> AffineRelation {
    let n = n_in + n_out;
    let mut row = vec![0i64; n + 1];
    for r in row.iter_mut().take(n_in) {
        *r = -1;
    }
    for r in row.iter_mut().take(n).skip(n_in) {
        *r = 1;
    }
    row[n] = -i64::from(a % p.get());
    AffineRelation::from_equations(p, n_in, n_out, &[row]).expect("well-formed")
}

/// Multiplication by `a`: `{(x, a·x)}`.
pub fn scalar(p: Prime, a: u32) -> AffineRelation {
    AffineRelation::from_equations(p, 1, 1, &[[i64::from(a % p.get()), -1, 0]]).expect("well-formed")
}

/// The vertically flipped scalar: `{(a·y, y)}`.
pub fn co_scalar(p: Prime, a: u32) -> AffineRelation {
    scalar(p, a).converse()
}

/// The affine shift: the point `1` as a state `0 → 1`.
pub fn affine_unit(p: Prime) -> AffineRelation {
    AffineRelation::point_state(p, &[1])
}

pub fn swap(p: Prime) -> AffineRelation {
    AffineRelation::from_equations(p, 2, 2, &[[1, 0, 0, -1, 0], [0, 1, -1, 0, 0]]).expect("well-formed")
}

/// Z-coloured cup `0 → 2`: `{(a, a)}`.
pub fn cup_z(p: Prime) -> AffineRelation {
    z_spider(p, 0, 2)
}

/// Z-coloured cap `2 → 0`: `{(a, a)}`.
pub fn cap_z(p: Prime) -> AffineRelation {
    z_spider(p, 2, 0)
}

/// X-coloured cup `0 → 2`: `{(a, −a)}`.
pub fn cup_x(p: Prime) -> AffineRelation {
    x_spider(p, 0, 2, 0)
}

/// X-coloured cap `2 → 0`: `{(a, −a)}`.
pub fn cap_x(p: Prime) -> AffineRelation {
    x_spider(p, 2, 0, 0)
}

/// Named generators of the affine-relation prop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    ZSpider { n_in: usize, n_out: usize },
    XSpider { n_in: usize, n_out: usize, phase: u32 },
    Scalar(u32),
    CoScalar(u32),
    AffineUnit,
    CupZ,
    CapZ,
    CupX,
    CapX,
    Swap,
}

impl Generator {
    pub fn relation(self, p: Prime) -> AffineRelation {
        match self {
            Generator::ZSpider { n_in, n_out } => z_spider(p, n_in, n_out),
            Generator::XSpider { n_in, n_out, phase } => x_spider(p, n_in, n_out, phase),
            Generator::Scalar(a) => scalar(p, a),
            Generator::CoScalar(a) => co_scalar(p, a),
            Generator::AffineUnit => affine_unit(p),
            Generator::CupZ => cup_z(p),
            Generator::CapZ => cap_z(p),
            Generator::CupX => cup_x(p),
            Generator::CapX => cap_x(p),
            Generator::Swap => swap(p),
        }
    }

    pub fn arity(self) -> (usize, usize) {
        match self {
            Generator::ZSpider { n_in, n_out } | Generator::XSpider { n_in, n_out, .. } => (n_in, n_out),
            Generator::Scalar(_) | Generator::CoScalar(_) => (1, 1),
            Generator::AffineUnit => (0, 1),
            Generator::CupZ | Generator::CupX => (0, 2),
            Generator::CapZ | Generator::CapX => (2, 0),
            Generator::Swap => (2, 2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn identity_shapes() {
        let p = f(3);
        let id0 = identity(p, 0);
        assert!(!id0.is_empty());
        assert_eq!(id0, AffineRelation::total(p, 0, 0));
        let id1 = identity(p, 1);
        assert_eq!(id1.linear_part().dim(), 1);
        for a in 0..3 {
            assert!(id1.contains(&[a, a]));
            assert!(!id1.contains(&[a, (a + 1) % 3]));
        }
    }

    #[test]
    fn x_phase_state_into_x_effect_is_empty() {
        for q in [2, 3, 5, 7] {
            let p = f(q);
            let state = x_spider(p, 0, 1, 1);
            let effect = x_spider(p, 1, 0, 0);
            let r = state.compose(&effect).unwrap();
            assert!(r.is_empty());
            assert!(x_spider(p, 0, 0, 1).is_empty());
            assert!(!x_spider(p, 0, 0, 0).is_empty());
        }
    }

    #[test]
    fn generator_examples() {
        let p = f(3);
        assert_eq!(x_spider(p, 1, 1, 0), identity(p, 1));
        let copy = z_spider(p, 2, 1);
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    assert_eq!(copy.contains(&[a, b, c]), a == b && b == c);
                }
            }
        }
    }

    #[test]
    fn converse_of_shift() {
        let p = f(5);
        let r = AffineRelation::from_equations(p, 1, 1, &[[1, -1, 1]]).unwrap(); // y = x + 1
        let c = r.converse();
        let expected = AffineRelation::from_equations(p, 1, 1, &[[1, -1, -1]]).unwrap(); // y = x - 1
        assert_eq!(c, expected);
        assert_eq!(identity(p, 2).converse(), identity(p, 2));
    }

    #[test]
    fn tensor_identities() {
        let p = f(5);
        assert_eq!(identity(p, 1).tensor(&identity(p, 1)).unwrap(), identity(p, 2));
        let e = AffineRelation::empty(p, 1, 0);
        assert!(e.tensor(&identity(p, 2)).unwrap().is_empty());
    }

    #[test]
    fn complement_of_full_and_shifted() {
        let p = f(3);
        let full = AffineRelation::total(p, 1, 1);
        let c = full.ortho_complement().unwrap();
        assert_eq!(c.linear_part().dim(), 0);
        assert!(c.contains(&[0, 0]));
        let shifted = x_spider(p, 1, 1, 1);
        assert_eq!(shifted.ortho_complement(), Err(Error::UnsupportedShift));
        let e = AffineRelation::empty(p, 1, 1);
        assert!(e.ortho_complement().unwrap().is_empty());
    }

    #[test]
    fn image_examples() {
        let p = f(3);
        assert_eq!(identity(p, 2).image(), AffineRelation::total(p, 0, 2));
        assert!(AffineRelation::empty(p, 1, 2).image().is_empty());
        assert_eq!(x_spider(p, 1, 1, 2).image(), AffineRelation::total(p, 0, 1));
        assert_eq!(scalar(p, 0).image(), AffineRelation::point_state(p, &[0]));
    }

    #[test]
    fn minus_one_bending() {
        for q in [3, 5] {
            let p = f(q);
            // wire bent down with a Z cup, unbent with an X cap
            let left = cup_z(p).tensor(&identity(p, 1)).unwrap();
            let right = identity(p, 1).tensor(&cap_x(p)).unwrap();
            let bent = left.compose(&right).unwrap();
            assert_eq!(bent, scalar(p, q as u32 - 1));
            // same colour on both ends gives the plain identity
            let right_z = identity(p, 1).tensor(&cap_z(p)).unwrap();
            assert_eq!(left.compose(&right_z).unwrap(), identity(p, 1));
        }
    }

    #[test]
    fn point_and_linear_part() {
        let p = f(5);
        let r = x_spider(p, 1, 1, 3);
        assert_eq!(r.point().unwrap().len(), 2);
        assert!(r.contains(&r.point().unwrap()));
        assert!(!r.is_linear());
        assert_eq!(r.points().len(), 5);
        assert!(r.points().iter().all(|v| r.contains(v)));
    }

    #[test]
    fn mismatched_shapes_rejected() {
        let p = f(3);
        assert!(identity(p, 1).compose(&identity(p, 2)).is_err());
        assert!(identity(p, 1).subset(&identity(p, 2)).is_err());
        assert!(identity(p, 1).compose(&identity(f(5), 1)).is_err());
    }
}
