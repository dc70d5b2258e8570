//! Exterior algebra of Q^d with subset-indexed coordinates.
//!
//! Index sets are 0-based sorted lists; greedy basis positions are 0-based.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactlin::{rref_in_place, Rational, SpanBuilder, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExteriorError {
    #[error("ambient dimensions differ: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("greedy basis of an empty list")]
    Empty,
}

/// A (possibly mixed-grade) element of Λ(Q^d), stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtVector {
    dim: usize,
    coords: BTreeMap<Vec<usize>, Rational>,
}

impl ExtVector {
    pub fn zero(dim: usize) -> Self {
        Self { dim, coords: BTreeMap::new() }
    }

    /// The grade-0 unit.
    pub fn one(dim: usize) -> Self {
        let mut v = Self::zero(dim);
        v.coords.insert(Vec::new(), Rational::one());
        v
    }

    /// Embeds a vector of Q^d as a grade-1 element.
    pub fn from_vector(v: &[Rational]) -> Self {
        let coords =
            v.iter().enumerate().filter(|(_, q)| !q.is_zero()).map(|(i, q)| (vec![i], q.clone())).collect();
        Self { dim: v.len(), coords }
    }

    /// Builds from explicit coordinates, dropping zeros and sorting keys.
    pub fn from_coords(dim: usize, coords: impl IntoIterator<Item = (Vec<usize>, Rational)>) -> Self {
        let mut v = Self::zero(dim);
        for (mut key, q) in coords {
            key.sort_unstable();
            key.dedup();
            debug_assert!(key.iter().all(|&i| i < dim));
            v.add_term(key, q);
        }
        v
    }

    fn add_term(&mut self, key: Vec<usize>, q: Rational) {
        if q.is_zero() {
            return;
        }
        match self.coords.entry(key) {
            Entry::Vacant(slot) => {
                slot.insert(q);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += q;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &BTreeMap<Vec<usize>, Rational> {
        &self.coords
    }

    pub fn coeff(&self, key: &[usize]) -> Rational {
        self.coords.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// The common grade of all stored terms, if homogeneous and nonzero.
    pub fn grade(&self) -> Option<usize> {
        let mut grades = self.coords.keys().map(Vec::len);
        let g = grades.next()?;
        grades.all(|h| h == g).then_some(g)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero(self.dim);
        }
        Self { dim: self.dim, coords: self.coords.iter().map(|(k, v)| (k.clone(), v * q)).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (k, v) in &other.coords {
            out.add_term(k.clone(), v.clone());
        }
        Ok(out)
    }

    fn check_dim(&self, other: &Self) -> Result<(), ExteriorError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(ExteriorError::Dimension(self.dim, other.dim))
        }
    }

    /// Coordinates as a dense vector indexed by the bitmask of each subset.
    pub fn to_dense(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); 1usize << self.dim];
        for (k, v) in &self.coords {
            out[mask(k)] = v.clone();
        }
        out
    }
}

fn mask(key: &[usize]) -> usize {
    key.iter().fold(0, |m, &i| m | (1usize << i))
}

/// Sign of the permutation sorting `a ++ b`, or `None` when they overlap.
fn merge_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut inversions = 0usize;
    let mut merged = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            merged.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            inversions += a.len() - i;
            merged.push(b[j]);
            j += 1;
        } else {
            return None;
        }
    }
    Some((merged, inversions % 2 == 1))
}

/// Bilinear, associative, antisymmetric product.
pub fn wedge(a: &ExtVector, b: &ExtVector) -> Result<ExtVector, ExteriorError> {
    a.check_dim(b)?;
    let mut out = ExtVector::zero(a.dim);
    for (ka, va) in &a.coords {
        for (kb, vb) in &b.coords {
            if let Some((key, negative)) = merge_sign(ka, kb) {
                let prod = va * vb;
                out.add_term(key, if negative { -prod } else { prod });
            }
        }
    }
    Ok(out)
}

/// Wedge of the canonical basis of `w`, scaled so that the first nonzero
/// coordinate in key order is 1. The zero subspace maps to the unit.
pub fn iota(w: &Subspace) -> ExtVector {
    let d = w.ambient_dim();
    let mut acc = ExtVector::one(d);
    for v in w.basis() {
        acc = wedge(&acc, &ExtVector::from_vector(v)).expect("same ambient space");
    }
    let first = acc.coords.values().next().cloned().expect("independent basis has nonzero wedge");
    acc.scale(&first.recip())
}

/// `w1 ∩ w2 = {0}` decided through the wedge of their embeddings.
pub fn trivially_intersects(w1: &Subspace, w2: &Subspace) -> Result<bool, ExteriorError> {
    if w1.ambient_dim() != w2.ambient_dim() {
        return Err(ExteriorError::Dimension(w1.ambient_dim(), w2.ambient_dim()));
    }
    let nonzero = !wedge(&iota(w1), &iota(w2))?.is_zero();
    debug_assert_eq!(nonzero, w1.intersect(w2).is_zero());
    Ok(nonzero)
}

/// Positions of the left-to-right maximal independent subsequence; the first
/// position is always 0.
pub fn greedy_basis(vs: &[ExtVector]) -> Result<Vec<usize>, ExteriorError> {
    let first = vs.first().ok_or(ExteriorError::Empty)?;
    if let Some(bad) = vs.iter().find(|v| v.dim != first.dim) {
        return Err(ExteriorError::Dimension(first.dim, bad.dim));
    }
    let mut span = SpanBuilder::new(1usize << first.dim);
    let mut picked = Vec::new();
    for (i, v) in vs.iter().enumerate() {
        if span.insert(v.to_dense()).is_some() || (i == 0 && v.is_zero()) {
            picked.push(i);
        }
    }
    Ok(picked)
}

/// Coefficients expressing `target` in terms of `basis`, if it lies in their span.
pub fn express_in(target: &ExtVector, basis: &[ExtVector]) -> Option<Vec<Rational>> {
    let n = 1usize << target.dim;
    let k = basis.len();
    let dense: Vec<Vec<Rational>> = basis.iter().map(ExtVector::to_dense).collect();
    let t = target.to_dense();
    // Rows are coordinates; columns are basis vectors followed by the target.
    let mut rows: Vec<Vec<Rational>> = (0..n)
        .filter(|&i| !t[i].is_zero() || dense.iter().any(|b| !b[i].is_zero()))
        .map(|i| {
            let mut r: Vec<Rational> = dense.iter().map(|b| b[i].clone()).collect();
            r.push(t[i].clone());
            r
        })
        .collect();
    let pivots = rref_in_place(&mut rows, k + 1);
    if pivots.contains(&k) {
        return None;
    }
    let mut coeffs = vec![Rational::zero(); k];
    for (row, &p) in rows.iter().zip(&pivots) {
        coeffs[p] = row[k].clone();
    }
    Some(coeffs)
}
