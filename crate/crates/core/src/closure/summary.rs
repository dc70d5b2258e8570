//! Exact Veronese spans of one-counter languages intersected with a
//! regular language.
//!
//! Words of weight zero are generated by `Z -> ε | σ0 Z | σ+ Z σ- Z | σ- Z σ+ Z`;
//! dropping the last rule gives the reach words (all prefixes nonnegative),
//! and cover words are `R (σ+ R)*`. Per automaton state pair we keep the span
//! of Veronese vectors of the derived words; since `ν(XY)` is bilinear in
//! `ν(X)` and `ν(Y)`, the least solution of the grammar equations over
//! subspaces is exactly the span of the language image.

use std::collections::VecDeque;

use super::poly::MonomialBasis;
use super::veronese::{left_map, right_map, ProductTable, SparseMap};
use crate::automata::Nfa;
use crate::exactlin::{Rational, RationalMatrix, SpanBuilder, Subspace};

/// Which counter condition the words must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CounterKind {
    /// Total weight zero.
    Zero,
    /// Total weight zero with nonnegative prefixes.
    Reach,
    /// Nonnegative prefixes.
    Cover,
}

struct Grid {
    n: usize,
    dim: usize,
    cells: Vec<Option<SpanBuilder>>,
}

impl Grid {
    fn new(n: usize, dim: usize) -> Self {
        Self { n, dim, cells: (0..n * n).map(|_| None).collect() }
    }

    fn insert(&mut self, p: usize, q: usize, v: Vec<Rational>) -> Option<Vec<Rational>> {
        let dim = self.dim;
        self.cells[p * self.n + q].get_or_insert_with(|| SpanBuilder::new(dim)).insert(v)
    }

    fn basis(&self, p: usize, q: usize) -> &[Vec<Rational>] {
        self.cells[p * self.n + q].as_ref().map_or(&[], |s| s.basis())
    }
}

enum Item {
    Z(usize, usize, Vec<Rational>),
    Up(usize, usize, Vec<Rational>),
    Down(usize, usize, Vec<Rational>),
}

/// Span of `ν(φ(w))` over `w ∈ L(nfa)` satisfying the counter condition,
/// where letter `a` has matrix `mats[a]` and weight `weights[a] ∈ {-1,0,1}`.
pub fn counter_span<L: Clone + Eq>(
    nfa: &Nfa<L>,
    mats: &[RationalMatrix],
    weights: &[i32],
    kind: CounterKind,
    basis: &MonomialBasis,
    table: &ProductTable,
) -> Subspace {
    let nfa = nfa.trim();
    let n = nfa.num_states();
    let dim = basis.len();
    if n == 0 {
        return Subspace::zero(dim);
    }
    let lefts: Vec<SparseMap> = mats.iter().map(|m| left_map(basis, m)).collect();
    let rights: Vec<SparseMap> = mats.iter().map(|m| right_map(basis, m)).collect();
    let mut incoming: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut outgoing: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for p in 0..n {
        for &(a, q) in nfa.transitions_from(p) {
            incoming[q].push((p, a));
            outgoing[p].push((a, q));
        }
    }

    let balanced = balanced_grid(n, dim, basis, table, &lefts, &rights, &incoming, &outgoing, weights, kind);
    let result = if kind == CounterKind::Cover {
        cover_grid(n, dim, table, &lefts, &incoming, weights, &balanced)
    } else {
        balanced
    };
    let mut total = SpanBuilder::new(dim);
    for &i in nfa.initial() {
        for f in nfa.accepting_states() {
            for v in result.basis(i, f) {
                total.insert(v.clone());
            }
        }
    }
    total.to_subspace()
}

#[allow(clippy::too_many_arguments)]
fn balanced_grid(
    n: usize,
    dim: usize,
    basis: &MonomialBasis,
    table: &ProductTable,
    lefts: &[SparseMap],
    rights: &[SparseMap],
    incoming: &[Vec<(usize, usize)>],
    outgoing: &[Vec<(usize, usize)>],
    weights: &[i32],
    kind: CounterKind,
) -> Grid {
    let two_sided = kind == CounterKind::Zero;
    let mut z = Grid::new(n, dim);
    let mut up = Grid::new(n, dim);
    let mut down = Grid::new(n, dim);
    let mut queue: VecDeque<Item> = VecDeque::new();
    let identity = basis.embed(&RationalMatrix::identity(basis.dim()));
    for p in 0..n {
        if let Some(row) = z.insert(p, p, identity.clone()) {
            queue.push_back(Item::Z(p, p, row));
        }
    }
    while let Some(item) = queue.pop_front() {
        match item {
            Item::Z(p1, q, v) => {
                for &(p, a) in &incoming[p1] {
                    let lv = lefts[a].apply(&v);
                    match weights[a] {
                        0 => {
                            if let Some(row) = z.insert(p, q, lv) {
                                queue.push_back(Item::Z(p, q, row));
                            }
                        }
                        1 => {
                            for &(b, r1) in outgoing[q].iter().filter(|(b, _)| weights[*b] == -1) {
                                if let Some(row) = up.insert(p, r1, rights[b].apply(&lv)) {
                                    queue.push_back(Item::Up(p, r1, row));
                                }
                            }
                        }
                        _ if two_sided => {
                            for &(b, r1) in outgoing[q].iter().filter(|(b, _)| weights[*b] == 1) {
                                if let Some(row) = down.insert(p, r1, rights[b].apply(&lv)) {
                                    queue.push_back(Item::Down(p, r1, row));
                                }
                            }
                        }
                        _ => {}
                    }
                }
                for p in 0..n {
                    let lefts_here: Vec<Vec<Rational>> =
                        up.basis(p, p1).iter().chain(down.basis(p, p1)).cloned().collect();
                    for e in lefts_here {
                        if let Some(row) = z.insert(p, q, table.apply(&e, &v)) {
                            queue.push_back(Item::Z(p, q, row));
                        }
                    }
                }
            }
            Item::Up(p, r1, e) | Item::Down(p, r1, e) => {
                for q in 0..n {
                    let rights_here: Vec<Vec<Rational>> = z.basis(r1, q).to_vec();
                    for v in rights_here {
                        if let Some(row) = z.insert(p, q, table.apply(&e, &v)) {
                            queue.push_back(Item::Z(p, q, row));
                        }
                    }
                }
            }
        }
    }
    z
}

fn cover_grid(
    n: usize,
    dim: usize,
    table: &ProductTable,
    lefts: &[SparseMap],
    incoming: &[Vec<(usize, usize)>],
    weights: &[i32],
    reach: &Grid,
) -> Grid {
    let mut c = Grid::new(n, dim);
    let mut queue: VecDeque<(usize, usize, Vec<Rational>)> = VecDeque::new();
    for p in 0..n {
        for q in 0..n {
            for v in reach.basis(p, q) {
                if let Some(row) = c.insert(p, q, v.clone()) {
                    queue.push_back((p, q, row));
                }
            }
        }
    }
    // C(p, q) ⊇ R(p, r) · σ+ · C(r1, q) for σ+ : r -> r1.
    while let Some((r1, q, v)) = queue.pop_front() {
        for &(r, a) in incoming[r1].iter().filter(|(_, a)| weights[*a] == 1) {
            let lv = lefts[a].apply(&v);
            for p in 0..n {
                for b in reach.basis(p, r) {
                    if let Some(row) = c.insert(p, q, table.apply(b, &lv)) {
                        queue.push_back((p, q, row));
                    }
                }
            }
        }
    }
    c
}
