//! Monomial bases in the matrix-entry variables, polynomial rendering and
//! parsing, and degree-bounded polynomial spaces.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::ClosureError;
use crate::exactlin::{clear_denominators, parse_rational, Rational, RationalMatrix, SpanBuilder, Subspace};

/// Number of monomials of degree at most `degree` in `nvars` variables,
/// saturating on overflow.
pub fn monomial_count(nvars: usize, degree: usize) -> usize {
    // C(nvars + degree, degree), built incrementally so each step is exact.
    let mut acc: u128 = 1;
    for k in 1..=degree as u128 {
        acc = acc.saturating_mul(nvars as u128 + k) / k;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Graded reverse lexicographic comparison with `x11` the smallest
/// variable: higher degree wins, then the smaller exponent at the first
/// differing variable in row-major order.
pub fn grevlex_cmp(a: &[u8], b: &[u8]) -> Ordering {
    let da: u32 = a.iter().map(|&e| u32::from(e)).sum();
    let db: u32 = b.iter().map(|&e| u32::from(e)).sum();
    da.cmp(&db).then_with(|| {
        a.iter().zip(b).find(|(x, y)| x != y).map_or(Ordering::Equal, |(x, y)| y.cmp(x))
    })
}

/// All monomials of degree at most `degree` in the `d*d` entries of a
/// matrix, sorted in descending grevlex order (index 0 is the largest; the
/// constant monomial is last).
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    dim: usize,
    degree: usize,
    exps: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    degrees: Vec<usize>,
    /// `times_var[m][v]` is the index of `m * x_v`, or `usize::MAX` past the degree.
    times_var: Vec<Vec<usize>>,
    /// `(parent, v)` with `parent * x_v` equal to the monomial, for nonconstant ones.
    split: Vec<Option<(usize, usize)>>,
}

impl MonomialBasis {
    pub fn new(dim: usize, degree: usize, cap: usize) -> Result<Self, ClosureError> {
        let nvars = dim * dim;
        let count = monomial_count(nvars, degree);
        if count > cap {
            return Err(ClosureError::Infeasible(format!(
                "Veronese dimension {count} (d = {dim}, degree {degree}) exceeds the cap of {cap}"
            )));
        }
        let mut exps = Vec::with_capacity(count);
        let mut current = vec![0u8; nvars];
        fill(&mut exps, &mut current, 0, degree);
        exps.sort_by(|a, b| grevlex_cmp(b, a));
        let index: HashMap<Vec<u8>, usize> = exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let degrees = exps.iter().map(|e| e.iter().map(|&x| usize::from(x)).sum()).collect();
        let mut times_var = vec![vec![usize::MAX; nvars]; exps.len()];
        let mut split = vec![None; exps.len()];
        for (i, e) in exps.iter().enumerate() {
            let mut f = e.clone();
            for v in 0..nvars {
                f[v] += 1;
                if let Some(&j) = index.get(&f) {
                    times_var[i][v] = j;
                }
                f[v] -= 1;
            }
            if let Some(v) = e.iter().position(|&x| x > 0) {
                let mut parent = e.clone();
                parent[v] -= 1;
                split[i] = Some((index[&parent], v));
            }
        }
        Ok(Self { dim, degree, exps, index, degrees, times_var, split })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.dim * self.dim
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self, i: usize) -> &[u8] {
        &self.exps[i]
    }

    pub fn degree_of(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    pub fn constant(&self) -> usize {
        self.exps.len() - 1
    }

    /// Index of `m * x_v`, if within the degree bound.
    pub fn times_var(&self, m: usize, v: usize) -> Option<usize> {
        let j = self.times_var[m][v];
        (j != usize::MAX).then_some(j)
    }

    pub fn split(&self, m: usize) -> Option<(usize, usize)> {
        self.split[m]
    }

    /// Indices of the monomials of exact degree `e`, in basis order.
    pub fn of_degree(&self, e: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.degrees[i] == e).collect()
    }

    /// Veronese vector of all monomial values at a matrix.
    pub fn embed(&self, m: &RationalMatrix) -> Vec<Rational> {
        debug_assert_eq!(m.rows(), self.dim);
        let mut out = vec![Rational::zero(); self.len()];
        // Ascending degree so that parents are evaluated first.
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| self.degrees[i]);
        for i in order {
            out[i] = match self.split[i] {
                None => Rational::one(),
                Some((p, v)) => &out[p] * m.get(v / self.dim, v % self.dim),
            };
        }
        out
    }

    pub fn var_name(&self, v: usize) -> String {
        var_name(self.dim, v)
    }
}

fn fill(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, var: usize, budget: usize) {
    if var == current.len() {
        out.push(current.clone());
        return;
    }
    for e in 0..=budget {
        current[var] = e as u8;
        fill(out, current, var + 1, budget - e);
    }
    current[var] = 0;
}

/// `x11`-style names for `d <= 9`, `x_{i}_{j}` otherwise; 1-based.
pub fn var_name(dim: usize, v: usize) -> String {
    let (i, j) = (v / dim + 1, v % dim + 1);
    if dim <= 9 {
        format!("x{i}{j}")
    } else {
        format!("x_{i}_{j}")
    }
}

/// A polynomial in the `d*d` matrix-entry variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Vec<u8>, Rational>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Vec<u8>, Rational)>) -> Self {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u8>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u8>, Rational> {
        &self.terms
    }

    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().map(|&x| usize::from(x)).sum()).max().unwrap_or(0)
    }

    pub fn from_vector(basis: &MonomialBasis, coeffs: &[Rational]) -> Self {
        Self::from_terms(basis.dim, coeffs.iter().enumerate().map(|(i, c)| (basis.exps[i].clone(), c.clone())))
    }

    pub fn to_vector(&self, basis: &MonomialBasis) -> Result<Vec<Rational>, ClosureError> {
        let mut out = vec![Rational::zero(); basis.len()];
        for (e, c) in &self.terms {
            let i = basis
                .index_of(e)
                .ok_or_else(|| ClosureError::Argument("polynomial degree exceeds the basis degree".into()))?;
            out[i] = c.clone();
        }
        Ok(out)
    }

    pub fn eval(&self, m: &RationalMatrix) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t *= m.get(v / self.dim, v % self.dim);
                }
            }
            acc += t;
        }
        acc
    }

    /// Scaled to coprime integers with a positive leading coefficient.
    pub fn normalized(&self) -> Self {
        let mut keys: Vec<&Vec<u8>> = self.terms.keys().collect();
        keys.sort_by(|a, b| grevlex_cmp(b, a));
        let coeffs: Vec<Rational> = keys.iter().map(|k| self.terms[*k].clone()).collect();
        let ints = clear_denominators(&coeffs);
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if g.is_zero() {
            return self.clone();
        }
        let g = if ints[0].is_negative() { -g } else { g };
        let terms = keys.into_iter().zip(ints).map(|(k, c)| (k.clone(), Rational::from_integer(c / &g))).collect();
        Self { dim: self.dim, terms }
    }

    /// ASCII rendering after normalization, terms in descending grevlex order.
    pub fn render(&self) -> String {
        let p = self.normalized();
        if p.is_zero() {
            return "0".into();
        }
        let mut keys: Vec<&Vec<u8>> = p.terms.keys().collect();
        keys.sort_by(|a, b| grevlex_cmp(b, a));
        let mut out = String::new();
        for (n, e) in keys.into_iter().enumerate() {
            let c = &p.terms[e];
            let negative = c.is_negative();
            let mag = c.abs();
            if n == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| {
                    let name = var_name(p.dim, v);
                    if k == 1 {
                        name
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            if vars.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    out.push_str(&mag.to_string());
                    out.push('*');
                }
                out.push_str(&vars.join("*"));
            }
        }
        out
    }

    /// Parses the rendering grammar: signed terms of an optional rational
    /// coefficient and `*`-separated variables with optional `^k`.
    pub fn parse(dim: usize, s: &str) -> Result<Self, ClosureError> {
        let bad = |why: &str| ClosureError::Argument(format!("cannot parse polynomial {s:?}: {why}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        let mut p = Self::zero(dim);
        let mut chunks = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
                chunks.push(&compact[start..i]);
                start = i;
            }
        }
        chunks.push(&compact[start..]);
        for chunk in chunks {
            let (sign, body) = match chunk.as_bytes()[0] {
                b'-' => (-Rational::one(), &chunk[1..]),
                b'+' => (Rational::one(), &chunk[1..]),
                _ => (Rational::one(), chunk),
            };
            if body.is_empty() {
                return Err(bad("dangling sign"));
            }
            let mut coeff = sign;
            let mut exps = vec![0u8; dim * dim];
            for factor in body.split('*') {
                if factor.starts_with('x') {
                    let (name, power) = match factor.split_once('^') {
                        Some((n, k)) => (n, k.parse::<u8>().map_err(|_| bad("bad exponent"))?),
                        None => (factor, 1),
                    };
                    let v = parse_var(dim, name).ok_or_else(|| bad("unknown variable"))?;
                    exps[v] = exps[v].checked_add(power).ok_or_else(|| bad("exponent overflow"))?;
                } else {
                    coeff *= parse_rational(factor).map_err(|_| bad("bad coefficient"))?;
                }
            }
            p.add_term(exps, coeff);
        }
        Ok(p)
    }
}

fn parse_var(dim: usize, name: &str) -> Option<usize> {
    let rest = name.strip_prefix('x')?;
    let (i, j) = if let Some(r) = rest.strip_prefix('_') {
        let (a, b) = r.split_once('_')?;
        (a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)
    } else {
        if rest.len() != 2 {
            return None;
        }
        let mut cs = rest.chars();
        (cs.next()?.to_digit(10)? as usize, cs.next()?.to_digit(10)? as usize)
    };
    (1..=dim).contains(&i).then_some(())?;
    (1..=dim).contains(&j).then_some(())?;
    Some((i - 1) * dim + (j - 1))
}

/// The degree-`<= degree` slice of a vanishing ideal, as coefficient vectors
/// over the descending grevlex monomial basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySpace {
    dim: usize,
    degree: usize,
    space: Subspace,
}

impl PolySpace {
    pub fn new(dim: usize, degree: usize, space: Subspace) -> Self {
        debug_assert_eq!(space.ambient_dim(), monomial_count(dim * dim, degree));
        Self { dim, degree, space }
    }

    pub fn full(dim: usize, degree: usize) -> Self {
        Self::new(dim, degree, Subspace::full(monomial_count(dim * dim, degree)))
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        Self::new(dim, degree, Subspace::zero(monomial_count(dim * dim, degree)))
    }

    /// Vanishing space of the points whose Veronese vectors span `evals`.
    pub fn from_evaluations(dim: usize, degree: usize, evals: &Subspace) -> Self {
        Self::new(dim, degree, evals.orthogonal_complement())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_zero()
    }

    pub fn basis(&self, cap: usize) -> Result<MonomialBasis, ClosureError> {
        MonomialBasis::new(self.dim, self.degree, cap)
    }

    pub fn polynomials(&self) -> Vec<Polynomial> {
        let basis = MonomialBasis::new(self.dim, self.degree, usize::MAX).expect("no cap");
        self.space.basis().iter().map(|v| Polynomial::from_vector(&basis, v)).collect()
    }

    /// Canonical generator strings of the RREF basis.
    pub fn generators(&self) -> Vec<String> {
        self.polynomials().iter().map(Polynomial::render).collect()
    }

    pub fn vanishes_on(&self, m: &RationalMatrix) -> bool {
        self.polynomials().iter().all(|p| p.eval(m).is_zero())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree));
        Self::new(self.dim, self.degree, self.space.intersect(&other.space))
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        (self.dim, self.degree) == (other.dim, other.degree) && self.space.is_subspace_of(&other.space)
    }

    /// The polynomials of degree at most `degree` inside this space.
    pub fn restrict_degree(&self, degree: usize) -> Result<Self, ClosureError> {
        if degree > self.degree {
            return Err(ClosureError::Argument("cannot restrict to a larger degree".into()));
        }
        let big = MonomialBasis::new(self.dim, self.degree, usize::MAX)?;
        let small = MonomialBasis::new(self.dim, degree, usize::MAX)?;
        let low: Vec<usize> = (0..big.len()).filter(|&i| big.degree_of(i) <= degree).collect();
        let coordinate = Subspace::span(
            big.len(),
            low.iter().map(|&i| crate::exactlin::unit_vector(big.len(), i)),
        );
        let inside = self.space.intersect(&coordinate);
        let vectors = inside.basis().iter().map(|v| {
            let mut out = vec![Rational::zero(); small.len()];
            for &i in &low {
                out[small.index_of(big.exponents(i)).expect("low degree")] = v[i].clone();
            }
            out
        });
        Ok(Self::new(self.dim, degree, Subspace::span(small.len(), vectors)))
    }
}

impl Serialize for PolySpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IdealGens { dim: self.dim, degree: Some(self.degree), generators: self.generators() }.serialize(s)
    }
}

/// Rendered generators of an ideal or of a degree slice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealGens {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    pub generators: Vec<String>,
}

impl IdealGens {
    pub fn new(dim: usize, generators: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self { dim, degree: None, generators: generators.into_iter().map(Into::into).collect() }
    }

    pub fn polynomials(&self) -> Result<Vec<Polynomial>, ClosureError> {
        self.generators.iter().map(|g| Polynomial::parse(self.dim, g)).collect()
    }
}

/// Generators of a space: its canonical basis, rendered.
pub fn space_to_generators(s: &PolySpace) -> IdealGens {
    IdealGens { dim: s.dim, degree: Some(s.degree), generators: s.generators() }
}

/// Span of all multiples `g * m` with `deg(g * m) <= degree`.
pub fn ideal_slice(gens: &IdealGens, degree: usize) -> Result<PolySpace, ClosureError> {
    let basis = MonomialBasis::new(gens.dim, degree, usize::MAX)?;
    let mut span = SpanBuilder::new(basis.len());
    for g in gens.polynomials()? {
        let gd = g.total_degree();
        if gd > degree {
            return Err(ClosureError::Argument(format!("generator of degree {gd} exceeds the slice degree {degree}")));
        }
        let gv = g.to_vector(&basis)?;
        for m in (0..basis.len()).filter(|&m| basis.degree_of(m) + gd <= degree) {
            let mut shifted = vec![Rational::zero(); basis.len()];
            for (i, c) in gv.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let target: Vec<u8> = basis.exponents(i).iter().zip(basis.exponents(m)).map(|(a, b)| a + b).collect();
                shifted[basis.index_of(&target).expect("degree checked")] = c.clone();
            }
            span.insert(shifted);
        }
    }
    Ok(PolySpace::new(gens.dim, degree, span.to_subspace()))
}

/// Vanishing space of a finite point set.
pub fn finite_vanishing_space(dim: usize, points: &[RationalMatrix], degree: usize) -> Result<PolySpace, ClosureError> {
    if points.iter().any(|p| p.rows() != dim || p.cols() != dim) {
        return Err(ClosureError::Argument("points must all be square of the given dimension".into()));
    }
    let basis = MonomialBasis::new(dim, degree, usize::MAX)?;
    let mut span = SpanBuilder::new(basis.len());
    for p in points {
        span.insert(basis.embed(p));
    }
    Ok(PolySpace::from_evaluations(dim, degree, &span.to_subspace()))
}
