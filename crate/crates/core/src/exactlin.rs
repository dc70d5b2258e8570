//! Exact rational linear algebra: matrices, canonical subspaces, rank
//! decompositions, stability and the stable-identity projector.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational scalar. Always reduced with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not stable (rank drops on squaring)")]
    NotStable,
    #[error("invalid rational literal {0:?}")]
    Parse(String),
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, `"p"` or a plain integer with optional sign.
pub fn parse_rational(s: &str) -> Result<Rational, LinAlgError> {
    let t = s.trim();
    let bad = || LinAlgError::Parse(s.to_string());
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = t.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
    }
}

/// Renders as `"p/q"`, or `"p"` for integers.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

/// Dense row-major matrix over the rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, LinAlgError> {
        if entries.len() != rows * cols {
            return Err(LinAlgError::Dimension(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    pub fn scalar(q: Rational) -> Self {
        Self { rows: 1, cols: 1, entries: vec![q] }
    }

    /// Builds a matrix from rows of rationals; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinAlgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinAlgError::Dimension("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    /// Convenience constructor from integer rows. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
            .expect("rectangular integer rows")
    }

    /// Parses rows of `"p/q"` strings.
    pub fn from_strings(rows: &[Vec<String>]) -> Result<Self, LinAlgError> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(parsed)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(format_rational).collect()).collect()
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

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, q: Rational) {
        self.entries[i * self.cols + j] = q;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix product; panics on incompatible shapes.
    pub fn mul(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("compatible shapes")
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|a| a * q).collect() }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Product of a nonempty list of square matrices of equal size.
    pub fn product<'a>(ms: impl IntoIterator<Item = &'a RationalMatrix>, dim: usize) -> Self {
        ms.into_iter().fold(Self::identity(dim), |acc, m| acc.mul(m))
    }

    /// Rank by fraction-free elimination over the integers.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<BigInt>> = (0..self.rows).map(|i| clear_denominators(self.row(i))).collect();
        bareiss_rank(&mut rows, self.cols)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                r
            })
            .collect();
        let pivots = rref_in_place(&mut aug, 2 * n);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let entries = aug.into_iter().flat_map(|r| r.into_iter().skip(n)).collect();
        Some(Self { rows: n, cols: n, entries })
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_strings())
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.to_strings().into_iter().map(|r| format!("[{}]", r.join(", "))).collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        Self::from_strings(&rows).map_err(D::Error::custom)
    }
}

/// Multiplies a row by the lcm of its denominators, yielding integers.
pub fn clear_denominators(row: &[Rational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    row.iter().map(|q| q.numer() * (&l / q.denom())).collect()
}

fn bareiss_rank(rows: &mut [Vec<BigInt>], ncols: usize) -> usize {
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        for r in rank + 1..rows.len() {
            for c in col + 1..ncols {
                let v = &rows[rank][col] * &rows[r][c] - &rows[r][col] * &rows[rank][c];
                rows[r][c] = v / &prev;
            }
            rows[r][col] = BigInt::zero();
        }
        prev = rows[rank][col].clone();
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Gauss-Jordan elimination to reduced row-echelon form, pivoting on the
/// first nonzero entry in column order. Zero rows are dropped; returns the
/// pivot columns.
pub fn rref_in_place(rows: &mut Vec<Vec<Rational>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut().skip(col) {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(col) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// A subspace of Q^n stored by its unique reduced row-echelon basis, so
/// structural equality coincides with equality of subspaces.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Subspace {
    ambient_dim: usize,
    #[serde(serialize_with = "ser_vectors", deserialize_with = "de_vectors")]
    basis: Vec<Vec<Rational>>,
}

fn ser_vectors<S: Serializer>(vs: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
    let strings: Vec<Vec<String>> = vs.iter().map(|v| v.iter().map(format_rational).collect()).collect();
    strings.serialize(s)
}

fn de_vectors<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
    let strings = Vec::<Vec<String>>::deserialize(d)?;
    strings
        .iter()
        .map(|v| v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(D::Error::custom)
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Self { ambient_dim: n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        let basis = (0..n).map(|i| unit_vector(n, i)).collect();
        Self { ambient_dim: n, basis }
    }

    /// Span of arbitrary vectors of length `n`.
    pub fn span(n: usize, vectors: impl IntoIterator<Item = Vec<Rational>>) -> Self {
        let mut rows: Vec<Vec<Rational>> = vectors.into_iter().collect();
        debug_assert!(rows.iter().all(|r| r.len() == n));
        rref_in_place(&mut rows, n);
        Self { ambient_dim: n, basis: rows }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.iter().map(|r| r.iter().position(|x| !x.is_zero()).expect("nonzero row")).collect()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut w = v.to_vec();
        for (row, p) in self.basis.iter().zip(self.pivots()) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (x, y) in w.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        w.iter().all(Zero::is_zero)
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim && self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Self) -> Self {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        Self::span(self.ambient_dim, self.basis.iter().chain(&other.basis).cloned())
    }

    /// Intersection through the kernel of the stacked system `[A^T | -B^T]`.
    pub fn intersect(&self, other: &Self) -> Self {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let n = self.ambient_dim;
        let (a, b) = (self.dim(), other.dim());
        if a == 0 || b == 0 {
            return Self::zero(n);
        }
        let mut stacked = RationalMatrix::zeros(n, a + b);
        for (j, v) in self.basis.iter().enumerate() {
            for i in 0..n {
                stacked.set(i, j, v[i].clone());
            }
        }
        for (j, v) in other.basis.iter().enumerate() {
            for i in 0..n {
                stacked.set(i, a + j, -v[i].clone());
            }
        }
        let kernel = null_space(&stacked);
        let vectors = kernel.into_iter().map(|coeffs| {
            let mut v = vec![Rational::zero(); n];
            for (c, b) in coeffs.iter().take(a).zip(&self.basis) {
                if c.is_zero() {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(b) {
                    *x += c * y;
                }
            }
            v
        });
        Self::span(n, vectors)
    }

    /// The annihilator under the standard dot product.
    pub fn orthogonal_complement(&self) -> Self {
        let n = self.ambient_dim;
        if self.basis.is_empty() {
            return Self::full(n);
        }
        let m = RationalMatrix::from_rows(self.basis.clone()).expect("rectangular basis");
        Self::span(n, null_space(&m))
    }
}

pub fn unit_vector(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

/// Basis of `{v : m v = 0}` read off the reduced row-echelon form.
fn null_space(m: &RationalMatrix) -> Vec<Vec<Rational>> {
    let n = m.cols();
    let mut rows: Vec<Vec<Rational>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    let pivots = rref_in_place(&mut rows, n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Incrementally maintained reduced echelon basis with cheap membership
/// tests; used by the fixpoint engines.
#[derive(Clone, Debug)]
pub struct SpanBuilder {
    n: usize,
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl SpanBuilder {
    pub fn new(n: usize) -> Self {
        Self { n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.n
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// Residual of `v` after eliminating every pivot column.
    pub fn reduce(&self, mut v: Vec<Rational>) -> Vec<Rational> {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.is_full() || self.reduce(v.to_vec()).iter().all(Zero::is_zero)
    }

    /// Adds `v`; returns the normalized new basis row when the span grew.
    pub fn insert(&mut self, v: Vec<Rational>) -> Option<Vec<Rational>> {
        debug_assert_eq!(v.len(), self.n);
        if self.is_full() {
            return None;
        }
        let mut w = self.reduce(v);
        let p = w.iter().position(|x| !x.is_zero())?;
        let inv = w[p].recip();
        for x in w.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, y) in row.iter_mut().zip(&w) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.rows.push(w.clone());
        self.pivots.push(p);
        Some(w)
    }

    pub fn to_subspace(&self) -> Subspace {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| self.pivots[i]);
        Subspace { ambient_dim: self.n, basis: order.into_iter().map(|i| self.rows[i].clone()).collect() }
    }
}

impl From<&Subspace> for SpanBuilder {
    fn from(s: &Subspace) -> Self {
        Self { n: s.ambient_dim, pivots: s.pivots(), rows: s.basis.clone() }
    }
}

fn require_square(m: &RationalMatrix) -> Result<usize, LinAlgError> {
    if m.is_square() {
        Ok(m.rows())
    } else {
        Err(LinAlgError::Dimension(format!("expected a square matrix, got {}x{}", m.rows(), m.cols())))
    }
}

/// Rank, column space and null space of a square matrix.
pub fn rank_decomp(m: &RationalMatrix) -> Result<(usize, Subspace, Subspace), LinAlgError> {
    let d = require_square(m)?;
    let image = Subspace::span(d, (0..d).map(|j| m.column(j)));
    let kernel = Subspace::span(d, null_space(m));
    let rank = image.dim();
    debug_assert_eq!(rank, m.rank());
    debug_assert_eq!(rank + kernel.dim(), d);
    Ok((rank, image, kernel))
}

/// `rank(m) == rank(m^2)`, equivalently `im(m) ∩ ker(m) = {0}`.
pub fn is_stable(m: &RationalMatrix) -> Result<bool, LinAlgError> {
    require_square(m)?;
    let stable = m.rank() == m.mul(m).rank();
    #[cfg(debug_assertions)]
    {
        let (_, image, kernel) = rank_decomp(m)?;
        debug_assert_eq!(stable, image.intersect(&kernel).is_zero());
    }
    Ok(stable)
}

/// The idempotent `Y diag(I_r, 0) Y^-1` with `Y = [image basis | kernel basis]`:
/// the projector onto `im(m)` along `ker(m)`.
pub fn stable_identity(m: &RationalMatrix) -> Result<RationalMatrix, LinAlgError> {
    let d = require_square(m)?;
    if !is_stable(m)? {
        return Err(LinAlgError::NotStable);
    }
    let (rank, image, kernel) = rank_decomp(m)?;
    let mut y = RationalMatrix::zeros(d, d);
    for (j, v) in image.basis().iter().chain(kernel.basis()).enumerate() {
        for i in 0..d {
            y.set(i, j, v[i].clone());
        }
    }
    let y_inv = y.inverse().expect("image and kernel are complementary");
    let mut diag = RationalMatrix::zeros(d, d);
    for i in 0..rank {
        diag.set(i, i, Rational::one());
    }
    Ok(y.mul(&diag).mul(&y_inv))
}

/// Sign of a rational as -1, 0 or 1.
pub fn signum(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_i64(rows)
    }

    #[test]
    fn rank_decomp_invertible() {
        let (r, im, ker) = rank_decomp(&m(&[&[1, 1], &[0, 1]])).unwrap();
        assert_eq!(r, 2);
        assert_eq!(im, Subspace::full(2));
        assert_eq!(ker, Subspace::zero(2));
    }

    #[test]
    fn rank_decomp_jordan_block() {
        let (r, im, ker) = rank_decomp(&m(&[&[0, 1], &[0, 0]])).unwrap();
        assert_eq!(r, 1);
        let e1 = Subspace::span(2, vec![unit_vector(2, 0)]);
        assert_eq!(im, e1);
        assert_eq!(ker, e1);
    }

    #[test]
    fn rank_decomp_zero() {
        let (r, im, ker) = rank_decomp(&RationalMatrix::zeros(2, 2)).unwrap();
        assert_eq!(r, 0);
        assert!(im.is_zero());
        assert_eq!(ker, Subspace::full(2));
    }

    #[test]
    fn rank_decomp_rejects_rectangular() {
        assert!(matches!(rank_decomp(&RationalMatrix::zeros(2, 3)), Err(LinAlgError::Dimension(_))));
        assert!(is_stable(&RationalMatrix::zeros(1, 2)).is_err());
    }

    #[test]
    fn stability_examples() {
        assert!(!is_stable(&m(&[&[0, 1], &[0, 0]])).unwrap());
        assert!(is_stable(&m(&[&[2, 0], &[0, 4]])).unwrap());
        // M^2 = [[4,0],[2,0]] keeps rank 1.
        let a = m(&[&[2, 0], &[1, 0]]);
        assert_eq!(a.mul(&a), m(&[&[4, 0], &[2, 0]]));
        assert!(is_stable(&a).unwrap());
    }

    #[test]
    fn stable_identity_examples() {
        assert_eq!(stable_identity(&m(&[&[1, 1], &[0, 1]])).unwrap(), RationalMatrix::identity(2));
        let p = m(&[&[1, 0], &[0, 0]]);
        assert_eq!(stable_identity(&p).unwrap(), p);
        let a = m(&[&[2, 0], &[1, 0]]);
        let expected =
            RationalMatrix::from_rows(vec![vec![rat(1), rat(0)], vec![ratio(1, 2), rat(0)]]).unwrap();
        let got = stable_identity(&a).unwrap();
        assert_eq!(got, expected);
        assert_eq!(got.mul(&a), a);
        assert_eq!(a.mul(&got), a);
        assert_eq!(stable_identity(&m(&[&[0, 1], &[0, 0]])), Err(LinAlgError::NotStable));
    }

    #[test]
    fn rational_round_trip() {
        for s in ["-3/2", "5", "0", "7/9"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(format_rational(&parse_rational("4/6").unwrap()), "2/3");
        assert_eq!(format_rational(&parse_rational("3/-6").unwrap()), "-1/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn matrix_json_round_trip() {
        let a = RationalMatrix::from_rows(vec![vec![ratio(-3, 2), rat(5)], vec![rat(0), ratio(1, 7)]]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"[["-3/2","5"],["0","1/7"]]"#);
        assert_eq!(serde_json::from_str::<RationalMatrix>(&s).unwrap(), a);
    }

    #[test]
    fn span_builder_matches_span() {
        let vs = vec![vec![rat(1), rat(2), rat(3)], vec![rat(2), rat(4), rat(6)], vec![rat(0), rat(1), rat(1)]];
        let mut b = SpanBuilder::new(3);
        let grew: Vec<bool> = vs.iter().map(|v| b.insert(v.clone()).is_some()).collect();
        assert_eq!(grew, vec![true, false, true]);
        assert_eq!(b.to_subspace(), Subspace::span(3, vs));
    }

    #[test]
    fn intersection_and_complement() {
        let a = Subspace::span(3, vec![unit_vector(3, 0), unit_vector(3, 1)]);
        let b = Subspace::span(3, vec![unit_vector(3, 1), unit_vector(3, 2)]);
        assert_eq!(a.intersect(&b), Subspace::span(3, vec![unit_vector(3, 1)]));
        assert_eq!(a.orthogonal_complement(), Subspace::span(3, vec![unit_vector(3, 2)]));
        assert_eq!(Subspace::zero(3).orthogonal_complement(), Subspace::full(3));
    }

    #[test]
    fn inverse_and_pow() {
        let a = m(&[&[1, 1], &[0, 1]]);
        assert_eq!(a.pow(5), m(&[&[1, 5], &[0, 1]]));
        assert_eq!(a.inverse().unwrap(), m(&[&[1, -1], &[0, 1]]));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }
}
