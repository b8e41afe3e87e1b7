//! Exact linear algebra over a prime field F_p.
//!
//! Residues are stored as least non-negative representatives and every
//! operation reduces eagerly, so two values are equal iff their stored
//! representations are equal. Subspaces are kept as the row space of a
//! matrix in reduced row echelon form, which makes subspace equality a plain
//! comparison of bases.

use std::fmt;

use crate::error::{Error, Result};

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A prime modulus, validated at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u64) -> Result<Prime> {
        if p > u64::from(u32::MAX) || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(i64::from(self.0)) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) + u64::from(b)) % u64::from(self.0)) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) * u64::from(b)) % u64::from(self.0)) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.0;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        let a = a % self.0;
        if a == 0 {
            None
        } else {
            Some(self.pow(a, u64::from(self.0) - 2))
        }
    }

    /// Representative in `(-p/2, p/2]`, used for display.
    pub fn signed(self, a: u32) -> i64 {
        let a = i64::from(a % self.0);
        let p = i64::from(self.0);
        if a > p / 2 {
            a - p
        } else {
            a
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn check_field(a: Prime, b: Prime) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::FieldMismatch {
            left: a.get(),
            right: b.get(),
        })
    }
}

/// Dense row-major matrix of residues mod p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: Prime,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpMatrix(F_{}, {}x{}) [", self.p, self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "{:?}", self.row(i))?;
            if i + 1 < self.rows {
                write!(f, ", ")?;
            }
        }
        write!(f, "]")
    }
}

impl FpMatrix {
    pub fn zeros(p: Prime, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from signed rows, reducing every entry mod p.
    pub fn from_rows<R: AsRef<[i64]>>(p: Prime, cols: usize, rows: &[R]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "matrix row",
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r.iter().map(|&v| p.reduce(v)));
        }
        Ok(FpMatrix {
            p,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from rows that are already residues (entries are reduced anyway).
    pub fn from_residue_rows<R: AsRef<[u32]>>(p: Prime, cols: usize, rows: &[R]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "matrix row",
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r.iter().map(|&v| v % p.get()));
        }
        Ok(FpMatrix {
            p,
            rows: rows.len(),
            cols,
            data,
        })
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.p.get();
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        check_field(self.p, other.p)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                expected: self.cols,
                found: other.rows,
            });
        }
        let p = u64::from(self.p.get());
        let mut out = Self::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = u64::from(self.get(i, k));
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] =
                        ((u64::from(out.data[idx]) + a * u64::from(other.get(k, j))) % p) as u32;
                }
            }
        }
        Ok(out)
    }

    /// `self · v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[u32]) -> Result<Vec<u32>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix-vector product",
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.p, self.row(i), v)).collect())
    }

    pub fn select_columns(&self, cols: &[usize]) -> FpMatrix {
        let mut out = Self::zeros(self.p, self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out.data[i * cols.len() + jj] = self.get(i, j);
            }
        }
        out
    }

    pub fn vstack(&self, other: &FpMatrix) -> Result<FpMatrix> {
        check_field(self.p, other.p)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "vertical stack",
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FpMatrix {
            p: self.p,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn push_row(&mut self, row: &[u32]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix row",
                expected: self.cols,
                found: row.len(),
            });
        }
        self.data.extend(row.iter().map(|&v| v % self.p.get()));
        self.rows += 1;
        Ok(())
    }

    /// Reduced row echelon form with leftmost pivots; zero rows are dropped.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(sel) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            m.swap_rows(r, sel);
            let inv = p.inv(m.get(r, c)).expect("nonzero pivot");
            m.scale_row(r, inv);
            for i in 0..m.rows {
                if i != r {
                    let f = m.get(i, c);
                    if f != 0 {
                        m.add_row_multiple(i, r, p.neg(f));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        m.data.truncate(r * m.cols);
        m.rows = r;
        (m, pivots)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<FpMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let mut aug = FpMatrix::zeros(self.p, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(r.select_columns(&cols))
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Right kernel `{v : self · vᵀ = 0}`.
    pub fn kernel(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = FpMatrix::zeros(p, 0, self.cols);
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = p.neg(r.get(i, free));
            }
            basis.data.extend_from_slice(&v);
            basis.rows += 1;
        }
        Subspace::from_matrix(&basis)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, f: u32) {
        let p = self.p;
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            self.data[idx] = p.mul(self.data[idx], f);
        }
    }

    /// row[dst] += f · row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, f: u32) {
        let p = self.p;
        for j in 0..self.cols {
            let s = self.data[src * self.cols + j];
            if s != 0 {
                let idx = dst * self.cols + j;
                self.data[idx] = p.add(self.data[idx], p.mul(f, s));
            }
        }
    }
}

pub fn dot(p: Prime, a: &[u32], b: &[u32]) -> u32 {
    let m = u64::from(p.get());
    (a.iter()
        .zip(b)
        .fold(0u64, |acc, (&x, &y)| (acc + u64::from(x) * u64::from(y)) % m)) as u32
}

/// A linear subspace of F_p^n, stored as an RREF basis without zero rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: FpMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(p: Prime, ambient: usize) -> Self {
        Subspace {
            basis: FpMatrix::zeros(p, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(p: Prime, ambient: usize) -> Self {
        Self::from_matrix(&FpMatrix::identity(p, ambient))
    }

    /// Row space of `m`.
    pub fn from_matrix(m: &FpMatrix) -> Self {
        let (basis, pivots) = m.rref();
        Subspace { basis, pivots }
    }

    pub fn span<R: AsRef<[u32]>>(p: Prime, ambient: usize, vectors: &[R]) -> Result<Self> {
        Ok(Self::from_matrix(&FpMatrix::from_residue_rows(
            p, ambient, vectors,
        )?))
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.basis.p
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.basis.cols
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    #[inline]
    pub fn basis(&self) -> &FpMatrix {
        &self.basis
    }

    #[inline]
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_compatible(&self, other: &Subspace, context: &'static str) -> Result<()> {
        check_field(self.prime(), other.prime())?;
        if self.ambient() != other.ambient() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.ambient(),
                found: other.ambient(),
            });
        }
        Ok(())
    }

    /// Canonical coset representative of `v` modulo this subspace:
    /// the unique element of `v + self` vanishing on every pivot column.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let p = self.prime();
        let mut out: Vec<u32> = v.iter().map(|&x| x % p.get()).collect();
        for (i, &pc) in self.pivots.iter().enumerate() {
            let f = out[pc];
            if f != 0 {
                let nf = p.neg(f);
                for (o, &b) in out.iter_mut().zip(self.basis.row(i)) {
                    *o = p.add(*o, p.mul(nf, b));
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        v.len() == self.ambient() && self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.check_compatible(other, "subspace inclusion")?;
        Ok((0..self.dim()).all(|i| other.contains(self.basis.row(i))))
    }

    /// `{v : v·w = 0 for all w in self}` with respect to the dot product.
    pub fn orthogonal_complement(&self) -> Subspace {
        self.basis.kernel()
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other, "intersection")?;
        let constraints = self
            .orthogonal_complement()
            .basis
            .vstack(&other.orthogonal_complement().basis)?;
        Ok(constraints.kernel())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other, "sum")?;
        Ok(Self::from_matrix(&self.basis.vstack(&other.basis)?))
    }

    /// Image under the coordinate projection onto `cols` (in that order).
    pub fn project(&self, cols: &[usize]) -> Subspace {
        Self::from_matrix(&self.basis.select_columns(cols))
    }

    /// Image under a linear map given as a matrix acting on column vectors.
    pub fn map(&self, m: &FpMatrix) -> Result<Subspace> {
        Ok(Self::from_matrix(&self.basis.mul(&m.transpose())?))
    }
}

/// Sum of two subspaces.
pub fn sum_spaces(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.sum(b)
}

/// Intersection of two subspaces.
pub fn intersect(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.intersect(b)
}

/// A particular solution of `m · x = rhs`, or `None` when the system is inconsistent.
pub fn solve_affine(m: &FpMatrix, rhs: &[u32]) -> Result<Option<Vec<u32>>> {
    if rhs.len() != m.rows() {
        return Err(Error::DimensionMismatch {
            context: "affine solve",
            expected: m.rows(),
            found: rhs.len(),
        });
    }
    let p = m.prime();
    let n = m.cols();
    let mut aug = FpMatrix::zeros(p, m.rows(), n + 1);
    for i in 0..m.rows() {
        for j in 0..n {
            aug.set(i, j, m.get(i, j));
        }
        aug.set(i, n, rhs[i]);
    }
    let (r, pivots) = aug.rref();
    if pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut x = vec![0u32; n];
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = r.get(i, n);
    }
    Ok(Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn all_vectors(p: Prime, n: usize) -> Vec<Vec<u32>> {
        let q = p.get();
        let total = (q as usize).pow(n as u32);
        (0..total)
            .map(|mut k| {
                (0..n)
                    .map(|_| {
                        let d = (k % q as usize) as u32;
                        k /= q as usize;
                        d
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn primality_checked() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(7).is_ok());
        assert_eq!(Prime::new(9), Err(Error::NotPrime(9)));
        assert_eq!(Prime::new(1), Err(Error::NotPrime(1)));
        assert_eq!(Prime::new(0), Err(Error::NotPrime(0)));
    }

    #[test]
    fn rref_examples() {
        let f5 = p(5);
        let m = FpMatrix::from_rows(f5, 2, &[[2, 4], [1, 2]]).unwrap();
        let (r, piv) = m.rref();
        assert_eq!(r.row_vecs(), vec![vec![1, 2]]);
        assert_eq!(piv, vec![0]);

        let id = FpMatrix::identity(f5, 3);
        let (r, piv) = id.rref();
        assert_eq!(r, id);
        assert_eq!(piv, vec![0, 1, 2]);

        let z = FpMatrix::zeros(f5, 3, 2);
        let (r, piv) = z.rref();
        assert_eq!(r.rows(), 0);
        assert_eq!(r.cols(), 2);
        assert!(piv.is_empty());
    }

    #[test]
    fn kernel_examples() {
        let f2 = p(2);
        let k = FpMatrix::from_rows(f2, 2, &[[1, 1]]).unwrap().kernel();
        assert_eq!(k, Subspace::span(f2, 2, &[[1, 1]]).unwrap());

        let f3 = p(3);
        let inv = FpMatrix::from_rows(f3, 2, &[[1, 2], [0, 1]]).unwrap();
        assert_eq!(inv.kernel().dim(), 0);

        let m = FpMatrix::from_rows(f3, 3, &[[1, 2, 0]]).unwrap();
        let k = m.kernel();
        assert_eq!(k.dim(), 2);
        for i in 0..k.dim() {
            assert_eq!(m.mul_vec(k.basis().row(i)).unwrap(), vec![0]);
        }
        // brute force: the kernel has exactly 9 points, all of them solutions
        let sols: Vec<_> = all_vectors(f3, 3)
            .into_iter()
            .filter(|v| m.mul_vec(v).unwrap() == vec![0])
            .collect();
        assert_eq!(sols.len(), 9);
        assert!(sols.iter().all(|v| k.contains(v)));
    }

    #[test]
    fn intersect_and_sum_trivial_cases() {
        let f3 = p(3);
        let a = Subspace::span(f3, 2, &[[1, 0]]).unwrap();
        let b = Subspace::span(f3, 2, &[[0, 1]]).unwrap();
        assert_eq!(a.intersect(&b).unwrap(), Subspace::zero(f3, 2));
        assert_eq!(a.sum(&b).unwrap(), Subspace::full(f3, 2));
        assert_eq!(a.intersect(&Subspace::full(f3, 2)).unwrap(), a);
        assert_eq!(a.sum(&Subspace::zero(f3, 2)).unwrap(), a);
        assert!(matches!(
            a.intersect(&Subspace::zero(f3, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn solve_affine_examples() {
        let f5 = p(5);
        let m = FpMatrix::from_rows(f5, 1, &[[1]]).unwrap();
        assert_eq!(solve_affine(&m, &[2]).unwrap(), Some(vec![2]));
        let z = FpMatrix::from_rows(f5, 1, &[[0]]).unwrap();
        assert_eq!(solve_affine(&z, &[1]).unwrap(), None);
    }

    #[test]
    fn zero_dimensional_ambient() {
        let f3 = p(3);
        let z = Subspace::zero(f3, 0);
        assert_eq!(z, Subspace::full(f3, 0));
        assert_eq!(z.dim(), 0);
        let m = FpMatrix::zeros(f3, 2, 0);
        assert_eq!(m.kernel(), z);
        assert_eq!(solve_affine(&m, &[0, 0]).unwrap(), Some(vec![]));
        assert_eq!(solve_affine(&m, &[0, 1]).unwrap(), None);
    }

    #[test]
    fn inverse_and_signed() {
        let f7 = p(7);
        for a in 1..7 {
            assert_eq!(f7.mul(a, f7.inv(a).unwrap()), 1);
        }
        assert_eq!(f7.inv(0), None);
        assert_eq!(f7.signed(6), -1);
        assert_eq!(f7.signed(3), 3);
        assert_eq!(f7.reduce(-8), 6);
    }
}
