//! Exact linear algebra over the rationals.
//!
//! Everything downstream (cochain complexes, spectral sequence pages, torus
//! certificates) is phrased in terms of [`RatMatrix`] and [`Subspace`]. All
//! elimination uses the leftmost available pivot, so results are a pure function
//! of the input bits.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = BigRational;
pub type QVec = Vec<Rational>;

/// Default bound for trial division when factoring integers.
pub const DEFAULT_PRIME_BOUND: u64 = 1_000_000;

/// Trial-division bound, overridable through `SOLVCOH_PRIME_BOUND`.
pub fn prime_bound() -> u64 {
    std::env::var("SOLVCOH_PRIME_BOUND")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_PRIME_BOUND)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("operators {0} and {1} do not commute")]
    NotCommuting(usize, usize),
    #[error("not Q-split: operator {index} {reason}")]
    NotQSplit { index: usize, reason: String },
    #[error("subspace containment fails: small-basis vector {0} is not in the big subspace")]
    NotContained(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("integer {0} has a prime factor above the trial-division bound {1}")]
    FactorBound(String, u64),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero_vec(n: usize) -> QVec {
    vec![Rational::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> QVec {
    let mut v = zero_vec(n);
    v[i] = Rational::one();
    v
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// `acc += c * v`
pub fn axpy(acc: &mut [Rational], c: &Rational, v: &[Rational]) {
    if c.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += c * x;
        }
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |s, (x, y)| s + x * y)
}

pub fn scale_vec(c: &Rational, v: &[Rational]) -> QVec {
    v.iter().map(|x| c * x).collect()
}

pub fn parse_rational(s: &str) -> Result<Rational, LinAlgError> {
    let t = s.trim();
    let bad = || LinAlgError::Parse(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

/// Serde adapter: rationals as strings, accepting JSON integers on input.
pub mod serde_rational {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Str(String),
        Int(i64),
    }

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Str(s) => parse_rational(&s).map_err(de::Error::custom),
            Raw::Int(n) => Ok(int(n)),
        }
    }
}

/// String-serialized rational for use inside serde containers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RatStr(#[serde(with = "serde_rational")] pub Rational);

pub fn to_ratstr(v: &[Rational]) -> Vec<RatStr> {
    v.iter().cloned().map(RatStr).collect()
}

pub fn from_ratstr(v: &[RatStr]) -> QVec {
    v.iter().map(|r| r.0.clone()).collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Builds from row vectors; `cols` is needed for the zero-row case.
    pub fn from_rows(rows: Vec<QVec>, cols: usize) -> Result<Self, LinAlgError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(LinAlgError::Dimension(format!(
                    "row {i} has length {} but expected {cols}",
                    r.len()
                )));
            }
            data.extend(r);
        }
        Ok(RatMatrix { rows: n, cols, data })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let v = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::from_rows(v, cols).expect("ragged literal matrix")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[QVec], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> QVec {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<QVec> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> QVec {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &Rational) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| c * x).collect() }
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &RatMatrix) -> RatMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn select_columns(&self, cols: &[usize]) -> RatMatrix {
        let mut m = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                m[(i, jj)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> RatMatrix {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (ii, &i) in rows.iter().enumerate() {
            for (jj, &j) in cols.iter().enumerate() {
                m[(ii, jj)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn hstack(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn rank(&self) -> usize {
        rref(self).rank
    }

    pub fn det(&self) -> Rational {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[(r, c)].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let piv = a[(c, c)].clone();
            det *= &piv;
            for r in c + 1..n {
                if a[(r, c)].is_zero() {
                    continue;
                }
                let f = &a[(r, c)] / &piv;
                for k in c..n {
                    let t = &f * &a[(c, k)];
                    a[(r, k)] -= t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&RatMatrix::identity(n));
        let r = rref(&aug);
        if r.pivots.iter().take(n).cloned().ne(0..n) || r.rank < n {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(r.matrix.select_columns(&cols))
    }

    pub fn pow(&self, e: u32) -> RatMatrix {
        let mut out = RatMatrix::identity(self.rows);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<RatStr>> = (0..self.rows).map(|i| to_ratstr(self.row(i))).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<RatStr>> = Vec::deserialize(d)?;
        let cols = rows.first().map_or(0, Vec::len);
        RatMatrix::from_rows(rows.iter().map(|r| from_ratstr(r)).collect(), cols)
            .map_err(de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: RatMatrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

/// Reduced row echelon form with the leftmost-pivot rule.
pub fn rref(m: &RatMatrix) -> Rref {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a[(r, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(p, row);
        let inv = a[(row, c)].recip();
        for k in c..a.cols {
            if !a[(row, k)].is_zero() {
                a[(row, k)] *= &inv;
            }
        }
        for r in 0..a.rows {
            if r == row || a[(r, c)].is_zero() {
                continue;
            }
            let f = a[(r, c)].clone();
            for k in c..a.cols {
                if a[(row, k)].is_zero() {
                    continue;
                }
                let t = &f * &a[(row, k)];
                a[(r, k)] -= t;
            }
        }
        pivots.push(c);
        row += 1;
    }
    let rank = pivots.len();
    Rref { matrix: a, pivots, rank }
}

/// A linear subspace of `Q^n`, stored by its reduced echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<QVec>,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in Q^{}) [", self.dim(), self.ambient_dim)?;
        for b in &self.basis {
            let v: Vec<String> = b.iter().map(format_rational).collect();
            write!(f, "({})", v.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace { ambient_dim: n, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Subspace { ambient_dim: n, basis: (0..n).map(|i| unit_vec(n, i)).collect(), pivots: (0..n).collect() }
    }

    pub fn span(n: usize, vectors: &[QVec]) -> Self {
        if vectors.is_empty() {
            return Self::zero(n);
        }
        let m = RatMatrix::from_rows(vectors.to_vec(), n).expect("vector length mismatch");
        let r = rref(&m);
        let basis = (0..r.rank).map(|i| r.matrix.row(i).to_vec()).collect();
        Subspace { ambient_dim: n, basis, pivots: r.pivots }
    }

    /// Span of the coordinate vectors `e_i` for `i` in `indices`.
    pub fn coordinate(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let vs: Vec<QVec> = indices.into_iter().map(|i| unit_vec(n, i)).collect();
        Self::span(n, &vs)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[QVec] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Residual of `v` after elimination against the echelon basis.
    pub fn reduce(&self, v: &[Rational]) -> QVec {
        let mut r = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if !r[p].is_zero() {
                let c = -r[p].clone();
                axpy(&mut r, &c, b);
            }
        }
        r
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.ambient_dim, "membership test dimension mismatch");
        is_zero_vec(&self.reduce(v))
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Rational]) -> Option<QVec> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient_dim, &vs)
    }

    pub fn with_vectors(&self, extra: &[QVec]) -> Subspace {
        let mut vs = self.basis.clone();
        vs.extend(extra.iter().cloned());
        Subspace::span(self.ambient_dim, &vs)
    }

    /// Rows spanning the orthogonal complement under the standard pairing, so
    /// that `v` is in the subspace iff `annihilator * v = 0`.
    pub fn annihilator(&self) -> RatMatrix {
        let n = self.ambient_dim;
        let b = RatMatrix::from_rows(self.basis.clone(), n).unwrap();
        let k = kernel_basis(&b);
        RatMatrix::from_rows(k.basis, n).unwrap()
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        if self.is_zero() || other.is_zero() {
            return Subspace::zero(self.ambient_dim);
        }
        self.preimage_within(&RatMatrix::identity(self.ambient_dim), other)
    }

    /// `{x in self : map * x in target}`.
    pub fn preimage_within(&self, map: &RatMatrix, target: &Subspace) -> Subspace {
        let n = self.ambient_dim;
        if self.is_zero() {
            return Subspace::zero(n);
        }
        let ann = target.annihilator();
        let s = RatMatrix::from_columns(&self.basis, n);
        let cond = ann.mul(&map.mul(&s));
        let k = kernel_basis(&cond);
        let vs: Vec<QVec> = k.basis.iter().map(|c| s.mul_vec(c)).collect();
        Subspace::span(n, &vs)
    }

    /// Image of the subspace under `map`.
    pub fn image_under(&self, map: &RatMatrix) -> Subspace {
        let vs: Vec<QVec> = self.basis.iter().map(|b| map.mul_vec(b)).collect();
        Subspace::span(map.rows(), &vs)
    }

    pub fn basis_matrix(&self) -> RatMatrix {
        RatMatrix::from_rows(self.basis.clone(), self.ambient_dim).unwrap()
    }
}

/// Canonical basis of `{v : m v = 0}`.
pub fn kernel_basis(m: &RatMatrix) -> Subspace {
    let n = m.cols();
    let r = rref(m);
    let free: Vec<usize> = (0..n).filter(|c| !r.pivots.contains(c)).collect();
    let mut vs = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = zero_vec(n);
        v[f] = Rational::one();
        for (i, &p) in r.pivots.iter().enumerate() {
            v[p] = -r.matrix[(i, f)].clone();
        }
        vs.push(v);
    }
    Subspace::span(n, &vs)
}

/// Column space of `m`.
pub fn image_basis(m: &RatMatrix) -> Subspace {
    Subspace::span(m.rows(), &m.transpose().to_rows())
}

/// Representatives of a basis of `big / small`, obtained by greedily extending
/// the basis of `small` with echelon vectors of `big`.
pub fn quotient_basis(big: &Subspace, small: &Subspace) -> Result<Vec<QVec>, LinAlgError> {
    if let Some(i) = small.basis.iter().position(|v| !big.contains(v)) {
        return Err(LinAlgError::NotContained(i));
    }
    let mut acc = small.clone();
    let mut reps = Vec::new();
    for v in &big.basis {
        if acc.dim() == big.dim() {
            break;
        }
        if !acc.contains(v) {
            acc = acc.with_vectors(std::slice::from_ref(v));
            reps.push(v.clone());
        }
    }
    Ok(reps)
}

/// One particular solution of `a x = b` (free variables set to zero).
pub fn solve(a: &RatMatrix, b: &[Rational]) -> Option<QVec> {
    let n = a.cols();
    let aug = a.hstack(&RatMatrix::from_columns(&[b.to_vec()], a.rows()));
    let r = rref(&aug);
    if r.pivots.last() == Some(&n) {
        return None;
    }
    let mut x = zero_vec(n);
    for (i, &p) in r.pivots.iter().enumerate() {
        x[p] = r.matrix[(i, n)].clone();
    }
    Some(x)
}

/// Solves `a x = b` for several right-hand sides at once; `None` if any is inconsistent.
pub fn solve_many(a: &RatMatrix, bs: &[QVec]) -> Option<Vec<QVec>> {
    let n = a.cols();
    if bs.is_empty() {
        return Some(Vec::new());
    }
    let aug = a.hstack(&RatMatrix::from_columns(bs, a.rows()));
    let r = rref(&aug);
    if r.pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some(
        (0..bs.len())
            .map(|k| {
                let mut x = zero_vec(n);
                for (i, &p) in r.pivots.iter().enumerate() {
                    x[p] = r.matrix[(i, n + k)].clone();
                }
                x
            })
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Polynomials and eigenvalues

/// Dense polynomial, coefficients from the constant term up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(pub QVec);

impl Poly {
    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn derivative(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect()).trim()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.clone().trim();
        let lead = d.0[dd].clone();
        let mut q = zero_vec(r.0.len().saturating_sub(dd).max(1));
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let c = &r.0[rd] / &lead;
            for i in 0..=dd {
                let t = &c * &d.0[i];
                r.0[rd - dd + i] -= t;
            }
            q[rd - dd] = c;
            r = r.trim();
        }
        (Poly(q).trim(), r)
    }

    pub fn monic(&self) -> Poly {
        match self.degree() {
            None => self.clone(),
            Some(d) => {
                let l = self.0[d].recip();
                Poly(self.0[..=d].iter().map(|c| c * &l).collect())
            }
        }
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone().trim(), other.clone().trim());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

/// Characteristic polynomial `det(x I - m)` by Faddeev-LeVerrier.
pub fn char_poly(m: &RatMatrix) -> Poly {
    let n = m.rows();
    let mut coeffs = zero_vec(n + 1);
    coeffs[n] = Rational::one();
    let mut mk = RatMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(A M_k)/k
        let mut next = m.mul(&mk);
        for i in 0..n {
            next[(i, i)] += &coeffs[n - k + 1];
        }
        mk = next;
        let am = m.mul(&mk);
        let tr = (0..n).fold(Rational::zero(), |s, i| s + &am[(i, i)]);
        coeffs[n - k] = -tr / int(k as i64);
    }
    Poly(coeffs)
}

/// Prime factorization by trial division up to `bound`.
pub fn factor_integer(n: &BigInt, bound: u64) -> Result<Vec<(BigInt, u32)>, LinAlgError> {
    let mut rest = n.abs();
    let mut out = Vec::new();
    if rest.is_zero() {
        return Err(LinAlgError::Parse("cannot factor zero".into()));
    }
    let mut p: u64 = 2;
    while rest > BigInt::one() && p <= bound {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        let b = BigInt::from(bound);
        if rest > &b * &b {
            return Err(LinAlgError::FactorBound(n.to_string(), bound));
        }
        out.push((rest, 1));
    }
    out.sort();
    Ok(out)
}

fn divisors(n: &BigInt, bound: u64) -> Result<Vec<BigInt>, LinAlgError> {
    let mut ds = vec![BigInt::one()];
    for (p, e) in factor_integer(n, bound)? {
        let mut next = Vec::new();
        for d in &ds {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        ds = next;
    }
    ds.sort();
    Ok(ds)
}

/// Distinct rational roots of `p`, ascending.
pub fn rational_roots(p: &Poly, bound: u64) -> Result<Vec<Rational>, LinAlgError> {
    let Some(deg) = p.degree() else {
        return Ok(Vec::new());
    };
    let mut roots = Vec::new();
    // strip x^k
    let low = p.0.iter().position(|c| !c.is_zero()).unwrap();
    if low > 0 {
        roots.push(Rational::zero());
    }
    let coeffs = &p.0[low..=deg];
    if coeffs.len() > 1 {
        let lcm = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let a0 = ints[0].clone();
        let an = ints[ints.len() - 1].clone();
        let num_div = divisors(&a0, bound)?;
        let den_div = divisors(&an, bound)?;
        let shifted = Poly(coeffs.to_vec());
        let mut cands: Vec<Rational> = Vec::new();
        for a in &num_div {
            for b in &den_div {
                for s in [BigInt::one(), -BigInt::one()] {
                    cands.push(Rational::new(a * &s, b.clone()));
                }
            }
        }
        cands.sort();
        cands.dedup();
        roots.extend(cands.into_iter().filter(|c| shifted.eval(c).is_zero()));
    }
    roots.sort();
    Ok(roots)
}

/// Eigenvalues of a Q-diagonalizable matrix, ascending.
pub fn rational_eigenvalues(m: &RatMatrix, index: usize, bound: u64) -> Result<Vec<Rational>, LinAlgError> {
    let n = m.rows();
    let p = char_poly(m);
    let sqfree = p.div_rem(&p.gcd(&p.derivative())).0;
    let roots = rational_roots(&sqfree, bound)?;
    if roots.len() != sqfree.degree().unwrap_or(0) {
        return Err(LinAlgError::NotQSplit {
            index,
            reason: "has eigenvalues outside Q".into(),
        });
    }
    let total: usize = roots.iter().map(|r| kernel_basis(&shift(m, r)).dim()).sum();
    if total != n {
        return Err(LinAlgError::NotQSplit {
            index,
            reason: "is not diagonalizable".into(),
        });
    }
    Ok(roots)
}

/// `m - c I`
pub fn shift(m: &RatMatrix, c: &Rational) -> RatMatrix {
    let mut out = m.clone();
    for i in 0..m.rows() {
        out[(i, i)] -= c;
    }
    out
}

/// Joint eigenspace decomposition of commuting Q-diagonalizable operators.
/// Weights are listed in lexicographic order.
pub fn simultaneous_eigenspaces(ops: &[RatMatrix], ambient: usize) -> Result<Vec<(QVec, Subspace)>, LinAlgError> {
    simultaneous_eigenspaces_bounded(ops, ambient, prime_bound())
}

pub fn simultaneous_eigenspaces_bounded(
    ops: &[RatMatrix],
    ambient: usize,
    bound: u64,
) -> Result<Vec<(QVec, Subspace)>, LinAlgError> {
    for (i, a) in ops.iter().enumerate() {
        if a.rows() != ambient || a.cols() != ambient {
            return Err(LinAlgError::Dimension(format!("operator {i} is not {ambient}x{ambient}")));
        }
    }
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            if !ops[i].commutator(&ops[j]).is_zero() {
                return Err(LinAlgError::NotCommuting(i, j));
            }
        }
    }
    let mut parts: Vec<(QVec, Subspace)> = vec![(Vec::new(), Subspace::full(ambient))];
    for (i, a) in ops.iter().enumerate() {
        let eig = rational_eigenvalues(a, i, bound)?;
        let spaces: Vec<(Rational, Subspace)> = eig.into_iter().map(|r| {
            let k = kernel_basis(&shift(a, &r));
            (r, k)
        }).collect();
        let mut next = Vec::new();
        for (w, s) in &parts {
            for (r, e) in &spaces {
                let x = s.intersection(e);
                if !x.is_zero() {
                    let mut w2 = w.clone();
                    w2.push(r.clone());
                    next.push((w2, x));
                }
            }
        }
        parts = next;
    }
    parts.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(parts)
}

/// `p`-adic valuation of a nonzero rational.
pub fn valuation(q: &Rational, p: &BigInt) -> i64 {
    let count = |n: &BigInt| {
        let mut n = n.abs();
        let mut e = 0;
        while (&n % p).is_zero() {
            n /= p;
            e += 1;
        }
        e
    };
    count(q.numer()) - count(q.denom())
}

/// Exact power with integer exponent.
pub fn rat_pow(q: &Rational, e: i64) -> Rational {
    let base = if e < 0 { q.recip() } else { q.clone() };
    let mut out = Rational::one();
    for _ in 0..e.unsigned_abs() {
        out *= &base;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_i64(rows)
    }

    #[test]
    fn rref_examples() {
        let r = rref(&RatMatrix::identity(2));
        assert_eq!(r.matrix, RatMatrix::identity(2));
        assert_eq!(r.rank, 2);

        let r = rref(&m(&[&[2, 4], &[1, 2]]));
        assert_eq!(r.matrix, m(&[&[1, 2], &[0, 0]]));
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);

        let r = rref(&m(&[&[1, 2], &[3, 4]]));
        assert_eq!(r.matrix, RatMatrix::identity(2));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&RatMatrix::zeros(3, 3)).dim(), 3);
        assert!(kernel_basis(&RatMatrix::identity(3)).is_zero());
        let k = kernel_basis(&m(&[&[1, 1]]));
        assert_eq!(k, Subspace::span(2, &[vec![int(1), int(-1)]]));
    }

    #[test]
    fn image_examples() {
        assert_eq!(image_basis(&RatMatrix::identity(2)), Subspace::full(2));
        assert!(image_basis(&RatMatrix::zeros(2, 2)).is_zero());
        assert_eq!(image_basis(&m(&[&[1, 2], &[2, 4]])), Subspace::span(2, &[vec![int(1), int(2)]]));
    }

    #[test]
    fn quotient_examples() {
        let full = Subspace::full(2);
        assert_eq!(quotient_basis(&full, &Subspace::zero(2)).unwrap(), full.basis().to_vec());
        assert!(quotient_basis(&full, &full).unwrap().is_empty());
        let diag = Subspace::span(2, &[vec![int(1), int(1)]]);
        assert_eq!(quotient_basis(&full, &diag).unwrap(), vec![vec![int(1), int(0)]]);
        assert_eq!(quotient_basis(&diag, &full), Err(LinAlgError::NotContained(0)));
    }

    #[test]
    fn eigenspace_examples() {
        let d = RatMatrix::diagonal(&[int(1), int(2), int(1)]);
        let es = simultaneous_eigenspaces(&[d], 3).unwrap();
        assert_eq!(es.len(), 2);
        assert_eq!(es[0].0, vec![int(1)]);
        assert_eq!(es[0].1.dim(), 2);
        assert_eq!(es[1].0, vec![int(2)]);
        assert_eq!(es[1].1.dim(), 1);

        let es = simultaneous_eigenspaces(&[], 3).unwrap();
        assert_eq!(es, vec![(vec![], Subspace::full(3))]);

        let err = simultaneous_eigenspaces(&[m(&[&[2, 1], &[1, 1]])], 2).unwrap_err();
        assert!(err.to_string().contains("not Q-split"), "{err}");
    }

    #[test]
    fn eigenspace_errors() {
        let jordan = m(&[&[1, 1], &[0, 1]]);
        assert!(matches!(
            simultaneous_eigenspaces(&[jordan], 2),
            Err(LinAlgError::NotQSplit { .. })
        ));
        let a = m(&[&[1, 1], &[0, 2]]);
        let b = m(&[&[1, 0], &[0, 3]]);
        assert_eq!(simultaneous_eigenspaces(&[a, b], 2), Err(LinAlgError::NotCommuting(0, 1)));
    }

    #[test]
    fn char_poly_and_roots() {
        let a = m(&[&[2, 1], &[1, 1]]);
        // x^2 - 3x + 1
        assert_eq!(char_poly(&a), Poly(vec![int(1), int(-3), int(1)]));
        let p = Poly(vec![int(-2), int(3), int(-1)]);
        // -x^2 + 3x - 2 = -(x-1)(x-2)
        assert_eq!(rational_roots(&p, 100).unwrap(), vec![int(1), int(2)]);
        let p = Poly(vec![rat(-1, 4), int(0), int(1)]);
        assert_eq!(rational_roots(&p, 100).unwrap(), vec![rat(-1, 2), rat(1, 2)]);
    }

    #[test]
    fn factor_and_valuation() {
        let f = factor_integer(&BigInt::from(360), 1000).unwrap();
        assert_eq!(f, vec![(BigInt::from(2), 3), (BigInt::from(3), 2), (BigInt::from(5), 1)]);
        assert!(factor_integer(&BigInt::from(1_000_003u64 * 1_000_033u64), 1000).is_err());
        assert_eq!(valuation(&rat(12, 5), &BigInt::from(2)), 2);
        assert_eq!(valuation(&rat(3, 8), &BigInt::from(2)), -3);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational(" -7 ").unwrap(), int(-7));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&rat(3, 2)), "3/2");
        assert_eq!(format_rational(&int(-4)), "-4");
        let mm: RatMatrix = serde_json::from_str(r#"[["1/2", 3], ["0", "-1"]]"#).unwrap();
        assert_eq!(serde_json::to_string(&mm).unwrap(), r#"[["1/2","3"],["0","-1"]]"#);
    }

    #[test]
    fn det_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.det(), int(1));
        assert_eq!(a.mul(&a.inverse().unwrap()), RatMatrix::identity(2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn subspace_ops() {
        let a = Subspace::coordinate(3, [0, 1]);
        let b = Subspace::coordinate(3, [1, 2]);
        assert_eq!(a.intersection(&b), Subspace::coordinate(3, [1]));
        assert_eq!(a.sum(&b), Subspace::full(3));
        assert!(a.contains_subspace(&Subspace::coordinate(3, [0])));
        let v = vec![int(3), int(5), int(0)];
        assert_eq!(a.coordinates(&v), Some(vec![int(3), int(5)]));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix() -> impl Strategy<Value = RatMatrix> {
            (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
                proptest::collection::vec(-3i64..4, r * c).prop_map(move |v| {
                    let rows = v.chunks(c).map(|ch| ch.iter().map(|&x| int(x)).collect()).collect();
                    RatMatrix::from_rows(rows, c).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn rank_nullity(a in small_matrix()) {
                let k = kernel_basis(&a);
                prop_assert_eq!(a.rank() + k.dim(), a.cols());
                for v in k.basis() {
                    prop_assert!(is_zero_vec(&a.mul_vec(v)));
                }
                prop_assert_eq!(image_basis(&a).dim(), a.rank());
            }

            #[test]
            fn quotient_length(a in small_matrix(), b in small_matrix()) {
                let big = image_basis(&a);
                let n = big.ambient_dim();
                let small_vecs: Vec<QVec> = (0..b.cols()).map(|j| {
                    let mut v = zero_vec(n);
                    for (i, bb) in big.basis().iter().enumerate() {
                        axpy(&mut v, &b[(i % b.rows(), j)], bb);
                    }
                    v
                }).collect();
                let small = Subspace::span(n, &small_vecs);
                let q = quotient_basis(&big, &small).unwrap();
                prop_assert_eq!(q.len(), big.dim() - small.dim());
                prop_assert_eq!(small.with_vectors(&q), big);
            }

            #[test]
            fn eigenvectors_scale(diag in proptest::collection::vec(-3i64..4, 1..5), seed in 0i64..5) {
                // conjugate a diagonal matrix by a unipotent upper-triangular one
                let n = diag.len();
                let d = RatMatrix::diagonal(&diag.iter().map(|&x| int(x)).collect::<Vec<_>>());
                let mut p = RatMatrix::identity(n);
                for i in 0..n { for j in i+1..n { p[(i, j)] = int((seed + (i * 3 + j) as i64) % 3 - 1); } }
                let a = p.mul(&d).mul(&p.inverse().unwrap());
                let es = simultaneous_eigenspaces(&[a.clone()], n).unwrap();
                let total: usize = es.iter().map(|(_, s)| s.dim()).sum();
                prop_assert_eq!(total, n);
                let mut all = Subspace::zero(n);
                for (w, s) in &es {
                    for v in s.basis() {
                        prop_assert_eq!(a.mul_vec(v), scale_vec(&w[0], v));
                    }
                    all = all.sum(s);
                }
                prop_assert_eq!(all.dim(), n);
            }
        }
    }
}
