//! Linear actions of matrix multiplication on Veronese coordinates.
//!
//! Every monomial of `M * A` is a polynomial in the entries of `M` of the
//! same degree, so right multiplication by a fixed `A` is a linear map on
//! Veronese vectors that preserves degree; likewise for left multiplication.
//! The product `X * Y` is bilinear in the Veronese vectors of `X` and `Y`.

use std::collections::HashMap;

use num_traits::Zero;

use super::poly::MonomialBasis;
use crate::exactlin::{Rational, RationalMatrix};

/// Sparse linear map given by rows: `out[i] = sum of c * v[j]` over `(j, c)` in row `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMap {
    rows: Vec<Vec<(usize, Rational)>>,
}

impl SparseMap {
    pub fn identity(n: usize) -> Self {
        Self { rows: (0..n).map(|i| vec![(i, Rational::from_integer(1.into()))]).collect() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<(usize, Rational)>] {
        &self.rows
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        self.rows
            .iter()
            .map(|row| {
                let mut acc = Rational::zero();
                for (j, c) in row {
                    if !v[*j].is_zero() {
                        acc += c * &v[*j];
                    }
                }
                acc
            })
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: HashMap<usize, Rational> = HashMap::new();
                for (k, c) in row {
                    for (j, d) in &other.rows[*k] {
                        *acc.entry(*j).or_insert_with(Rational::zero) += c * d;
                    }
                }
                let mut out: Vec<(usize, Rational)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                out.sort_by_key(|(j, _)| *j);
                out
            })
            .collect();
        Self { rows }
    }
}

/// Sparse polynomial over basis indices.
type Poly = HashMap<usize, Rational>;

/// Expands every basis monomial evaluated at linear forms `forms[v]` (one
/// per variable, each a list of `(variable, coefficient)`), giving the
/// linear map on Veronese coordinates.
fn substitution_map(basis: &MonomialBasis, forms: &[Vec<(usize, Rational)>]) -> SparseMap {
    let mut polys: Vec<Option<Poly>> = vec![None; basis.len()];
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by_key(|&i| basis.degree_of(i));
    for i in order {
        let p = match basis.split(i) {
            None => Poly::from([(i, Rational::from_integer(1.into()))]),
            Some((parent, v)) => {
                let mut out = Poly::new();
                for (m, c) in polys[parent].as_ref().expect("parents first") {
                    for (w, a) in &forms[v] {
                        let target = basis.times_var(*m, *w).expect("degree preserved");
                        *out.entry(target).or_insert_with(Rational::zero) += c * a;
                    }
                }
                out.retain(|_, c| !c.is_zero());
                out
            }
        };
        polys[i] = Some(p);
    }
    let rows = polys
        .into_iter()
        .map(|p| {
            let mut row: Vec<(usize, Rational)> = p.expect("all filled").into_iter().collect();
            row.sort_by_key(|(j, _)| *j);
            row
        })
        .collect();
    SparseMap { rows }
}

/// Map `T` with `ν(M * a) = T ν(M)`.
pub fn right_map(basis: &MonomialBasis, a: &RationalMatrix) -> SparseMap {
    let d = basis.dim();
    // (M a)_{ij} = sum_k M_{ik} a_{kj}.
    let forms: Vec<Vec<(usize, Rational)>> = (0..d * d)
        .map(|v| {
            let (i, j) = (v / d, v % d);
            (0..d).filter(|&k| !a.get(k, j).is_zero()).map(|k| (i * d + k, a.get(k, j).clone())).collect()
        })
        .collect();
    substitution_map(basis, &forms)
}

/// Map `T` with `ν(a * M) = T ν(M)`.
pub fn left_map(basis: &MonomialBasis, a: &RationalMatrix) -> SparseMap {
    let d = basis.dim();
    // (a M)_{ij} = sum_k a_{ik} M_{kj}.
    let forms: Vec<Vec<(usize, Rational)>> = (0..d * d)
        .map(|v| {
            let (i, j) = (v / d, v % d);
            (0..d).filter(|&k| !a.get(i, k).is_zero()).map(|k| (k * d + j, a.get(i, k).clone())).collect()
        })
        .collect();
    substitution_map(basis, &forms)
}

/// Coefficients `c` with `ν(X Y)_m = sum c * ν(X)_b * ν(Y)_g` over the
/// triples `(b, g, c)` stored for `m`; `b` and `g` have the degree of `m`.
#[derive(Clone, Debug)]
pub struct ProductTable {
    triples: Vec<Vec<(usize, usize, Rational)>>,
}

impl ProductTable {
    pub fn new(basis: &MonomialBasis) -> Self {
        let d = basis.dim();
        let mut polys: Vec<Option<HashMap<(usize, usize), Rational>>> = vec![None; basis.len()];
        let mut order: Vec<usize> = (0..basis.len()).collect();
        order.sort_by_key(|&i| basis.degree_of(i));
        let constant = basis.constant();
        for m in order {
            let p = match basis.split(m) {
                None => HashMap::from([((constant, constant), Rational::from_integer(1.into()))]),
                Some((parent, v)) => {
                    let (i, j) = (v / d, v % d);
                    let mut out = HashMap::new();
                    for ((b, g), c) in polys[parent].as_ref().expect("parents first") {
                        for k in 0..d {
                            let b2 = basis.times_var(*b, i * d + k).expect("degree preserved");
                            let g2 = basis.times_var(*g, k * d + j).expect("degree preserved");
                            *out.entry((b2, g2)).or_insert_with(Rational::zero) += c;
                        }
                    }
                    out.retain(|_, c: &mut Rational| !c.is_zero());
                    out
                }
            };
            polys[m] = Some(p);
        }
        let triples = polys
            .into_iter()
            .map(|p| {
                let mut t: Vec<(usize, usize, Rational)> =
                    p.expect("all filled").into_iter().map(|((b, g), c)| (b, g, c)).collect();
                t.sort_by_key(|x| (x.0, x.1));
                t
            })
            .collect();
        Self { triples }
    }

    pub fn triples(&self, m: usize) -> &[(usize, usize, Rational)] {
        &self.triples[m]
    }

    pub fn len(&self) -> usize {
        self.triples.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The bilinear product of two Veronese-coordinate vectors.
    pub fn apply(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        self.triples
            .iter()
            .map(|row| {
                let mut acc = Rational::zero();
                for (b, g, c) in row {
                    if !x[*b].is_zero() && !y[*g].is_zero() {
                        acc += c * &x[*b] * &y[*g];
                    }
                }
                acc
            })
            .collect()
    }

    /// The linear map `y -> apply(x, y)` for a fixed left factor.
    pub fn left_operator(&self, x: &[Rational]) -> SparseMap {
        let rows = self
            .triples
            .iter()
            .map(|row| {
                let mut acc: HashMap<usize, Rational> = HashMap::new();
                for (b, g, c) in row {
                    if !x[*b].is_zero() {
                        *acc.entry(*g).or_insert_with(Rational::zero) += c * &x[*b];
                    }
                }
                let mut out: Vec<(usize, Rational)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                out.sort_by_key(|(j, _)| *j);
                out
            })
            .collect();
        SparseMap { rows }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_match_embedding() {
        let basis = MonomialBasis::new(2, 3, usize::MAX).unwrap();
        let m = RationalMatrix::from_i64(&[&[1, -2], &[3, 5]]);
        let a = RationalMatrix::from_i64(&[&[2, 1], &[0, -1]]);
        assert_eq!(right_map(&basis, &a).apply(&basis.embed(&m)), basis.embed(&m.mul(&a)));
        assert_eq!(left_map(&basis, &a).apply(&basis.embed(&m)), basis.embed(&a.mul(&m)));
        let table = ProductTable::new(&basis);
        assert_eq!(table.apply(&basis.embed(&m), &basis.embed(&a)), basis.embed(&m.mul(&a)));
        let op = table.left_operator(&basis.embed(&m));
        assert_eq!(op.apply(&basis.embed(&a)), basis.embed(&m.mul(&a)));
        let both = right_map(&basis, &a).compose(&left_map(&basis, &m));
        assert_eq!(both.apply(&basis.embed(&a)), basis.embed(&m.mul(&a).mul(&a)));
    }
}
