//! Factorization trees over M_d(Q): the rank-level segment construction, the
//! strata construction, validation, and stable-factor extraction.
//!
//! Spans are half-open, 0-based `(start, end)` ranges into the input sequence.

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::exactlin::{is_stable, rank_decomp, RationalMatrix};
use crate::exterior::{express_in, greedy_basis, iota, wedge, ExtVector};
use crate::lang::{default_eta, MorphismPair};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("empty sequence")]
    Empty,
    #[error("matrices must all be square of one size")]
    Shape,
    #[error("not a rank-{rank} sequence: {detail}")]
    NotRankSequence { rank: usize, detail: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no factor with a stable image and the requested weight sign")]
    NoStableFactor,
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Ordered tree whose node labels are products of their children's labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactTree {
    pub label: RationalMatrix,
    pub span: (usize, usize),
    pub children: Vec<FactTree>,
}

impl FactTree {
    pub fn leaf(label: RationalMatrix, position: usize) -> Self {
        Self { label, span: (position, position + 1), children: Vec::new() }
    }

    /// Internal node over contiguous children; the label is their product.
    pub fn node(children: Vec<FactTree>) -> Self {
        assert!(children.len() >= 2, "internal nodes need at least two children");
        let dim = children[0].label.rows();
        let label = RationalMatrix::product(children.iter().map(|c| &c.label), dim);
        let span = (children[0].span.0, children[children.len() - 1].span.1);
        Self { label, span, children }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn is_wide(&self) -> bool {
        self.children.len() >= 3
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(FactTree::node_count).sum::<usize>()
    }

    /// Leaf labels left to right.
    pub fn yield_labels(&self) -> Vec<&RationalMatrix> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a RationalMatrix>) {
        if self.is_leaf() {
            out.push(&self.label);
        }
        for c in &self.children {
            c.collect_leaves(out);
        }
    }

    /// Nodes in preorder.
    pub fn preorder(&self) -> Vec<&FactTree> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }

    /// Indented text dump, one node per line.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        let kind = match self.children.len() {
            0 => "leaf",
            2 => "binary",
            _ => "wide",
        };
        out.push_str(&format!(
            "{}[{}, {}) {} {}\n",
            "  ".repeat(depth),
            self.span.0,
            self.span.1,
            kind,
            self.label
        ));
        for c in &self.children {
            c.render_into(depth + 1, out);
        }
    }
}

/// Which labels must be stable below a node with three or more children.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StabilityRule {
    /// The wide node's own label is stable.
    #[default]
    NodeLabel,
    /// Every child label of the wide node is stable.
    AllChildren,
}

/// Checks yield, spans, the product condition and the default stability rule.
pub fn validate_tree(t: &FactTree, ms: &[RationalMatrix]) -> bool {
    validate_tree_with(t, ms, StabilityRule::NodeLabel).is_ok()
}

/// Like [`validate_tree`], reporting the first violated condition.
pub fn validate_tree_with(t: &FactTree, ms: &[RationalMatrix], rule: StabilityRule) -> Result<(), String> {
    if t.span != (0, ms.len()) {
        return Err(format!("root span {:?} does not cover 0..{}", t.span, ms.len()));
    }
    check_node(t, ms, rule)
}

fn check_node(t: &FactTree, ms: &[RationalMatrix], rule: StabilityRule) -> Result<(), String> {
    let (start, end) = t.span;
    if t.is_leaf() {
        if end != start + 1 {
            return Err(format!("leaf span {:?} is not a singleton", t.span));
        }
        if ms.get(start) != Some(&t.label) {
            return Err(format!("leaf at {start} does not match the input"));
        }
        return Ok(());
    }
    if t.children.len() < 2 {
        return Err(format!("node {:?} has a single child", t.span));
    }
    let mut cursor = start;
    for c in &t.children {
        if c.span.0 != cursor || c.span.1 <= c.span.0 {
            return Err(format!("child span {:?} is not contiguous at {cursor}", c.span));
        }
        cursor = c.span.1;
    }
    if cursor != end {
        return Err(format!("children of {:?} end at {cursor}", t.span));
    }
    let dim = t.label.rows();
    let product = RationalMatrix::product(t.children.iter().map(|c| &c.label), dim);
    if product != t.label {
        return Err(format!("label of {:?} is not the product of its children", t.span));
    }
    if t.is_wide() {
        let ok = match rule {
            StabilityRule::NodeLabel => is_stable(&t.label).unwrap_or(false),
            StabilityRule::AllChildren => t.children.iter().all(|c| is_stable(&c.label).unwrap_or(false)),
        };
        if !ok {
            return Err(format!("wide node {:?} violates the stability condition", t.span));
        }
    }
    t.children.iter().try_for_each(|c| check_node(c, ms, rule))
}

fn check_shapes(ms: &[RationalMatrix]) -> Result<usize, TreeError> {
    let first = ms.first().ok_or(TreeError::Empty)?;
    let d = first.rows();
    if ms.iter().any(|m| m.rows() != d || m.cols() != d) {
        return Err(TreeError::Shape);
    }
    Ok(d)
}

fn leaves(ms: &[RationalMatrix]) -> Vec<FactTree> {
    ms.iter().enumerate().map(|(i, m)| FactTree::leaf(m.clone(), i)).collect()
}

/// Tree of height at most `d + 2` for a rank-r sequence.
pub fn build_rank_tree(ms: &[RationalMatrix]) -> Result<FactTree, TreeError> {
    let d = check_shapes(ms)?;
    let rank = ms[0].rank();
    let mut prefix = RationalMatrix::identity(d);
    for (i, m) in ms.iter().enumerate() {
        let r = m.rank();
        if r != rank {
            return Err(TreeError::NotRankSequence { rank, detail: format!("matrix {i} has rank {r}") });
        }
        prefix = prefix.mul(m);
        let pr = prefix.rank();
        if pr != rank {
            return Err(TreeError::NotRankSequence {
                rank,
                detail: format!("the product of the prefix 0..{} has rank {pr}", i + 1),
            });
        }
    }
    rank_tree_over(leaves(ms))
}

/// Segment construction over subtrees whose labels form a rank-r sequence.
fn rank_tree_over(items: Vec<FactTree>) -> Result<FactTree, TreeError> {
    let m = items.len();
    if m == 1 {
        return Ok(items.into_iter().next().expect("one item"));
    }
    let rank = items[0].label.rank();
    if rank == 0 || m == 2 {
        // Zero labels are stable, so one wide node is valid.
        return Ok(FactTree::node(items));
    }
    let images: Vec<ExtVector> = items
        .iter()
        .map(|t| iota(&rank_decomp(&t.label).expect("square").1))
        .collect();
    let basis = greedy_basis(&images).map_err(|e| TreeError::Invariant(e.to_string()))?;
    let mut bounds = basis.clone();
    bounds.push(m);

    let mut slots: Vec<Option<FactTree>> = items.into_iter().map(Some).collect();
    let take = |slots: &mut Vec<Option<FactTree>>, i: usize| slots[i].take().expect("each item used once");
    let mut segments = Vec::new();
    let mut ell = basis.len();
    while ell > 0 {
        let last = bounds[ell] - 1;
        if bounds[ell - 1] == last {
            segments.push(take(&mut slots, last));
            ell -= 1;
            continue;
        }
        let span_basis: Vec<ExtVector> = bounds[..ell].iter().map(|&j| images[j].clone()).collect();
        let coeffs = express_in(&images[last], &span_basis)
            .ok_or_else(|| TreeError::Invariant("image outside the greedy span".into()))?;
        let before_last = slots[last - 1].as_ref().expect("unused item");
        let kernel = iota(&rank_decomp(&before_last.label).expect("square").2);
        let k = (0..ell)
            .find(|&p| !coeffs[p].is_zero() && !wedge(&span_basis[p], &kernel).expect("same dim").is_zero())
            .ok_or_else(|| TreeError::Invariant("no stable segment witness".into()))?;
        let start = bounds[k];
        let mut inner: Vec<FactTree> = (start..last).map(|i| take(&mut slots, i)).collect();
        let stable_part = if inner.len() == 1 { inner.pop().expect("one item") } else { FactTree::node(inner) };
        if stable_part.is_wide() && !is_stable(&stable_part.label).expect("square") {
            return Err(TreeError::Invariant(format!("segment {:?} is not stable", stable_part.span)));
        }
        segments.push(FactTree::node(vec![stable_part, take(&mut slots, last)]));
        ell = k;
    }
    segments.reverse();
    Ok(balanced(segments))
}

/// Balanced binary combination of height `ceil(log2 n)`.
fn balanced(mut parts: Vec<FactTree>) -> FactTree {
    if parts.len() == 1 {
        return parts.pop().expect("one part");
    }
    let right = parts.split_off(parts.len().div_ceil(2));
    FactTree::node(vec![balanced(parts), balanced(right)])
}

/// Tree of height at most `d(d+3)` for any nonempty sequence, built in
/// strata of maximal equal-rank groups combined pairwise.
pub fn build_tree(ms: &[RationalMatrix]) -> Result<FactTree, TreeError> {
    check_shapes(ms)?;
    let mut items = leaves(ms);
    loop {
        if items.len() == 1 {
            return Ok(items.pop().expect("one item"));
        }
        // After d strata every node but the rightmost has rank 0; their
        // product with it is zero, hence stable, so one node closes the tree.
        if items[..items.len() - 1].iter().all(|t| t.label.is_zero()) {
            return Ok(FactTree::node(items));
        }
        let groups = maximal_groups(items);
        let mut built = groups.into_iter().map(rank_tree_over).collect::<Result<Vec<_>, _>>()?;
        if built.len() == 1 {
            return Ok(built.pop().expect("one group"));
        }
        let mut paired = Vec::with_capacity(built.len().div_ceil(2));
        let mut iter = built.into_iter();
        while let Some(left) = iter.next() {
            match iter.next() {
                Some(right) => paired.push(FactTree::node(vec![left, right])),
                None => paired.push(left),
            }
        }
        items = paired;
    }
}

/// Splits into lexicographically maximal runs whose product keeps the rank
/// of every factor.
fn maximal_groups(items: Vec<FactTree>) -> Vec<Vec<FactTree>> {
    let mut groups: Vec<Vec<FactTree>> = Vec::new();
    let mut current: Vec<FactTree> = Vec::new();
    let mut product: Option<RationalMatrix> = None;
    let mut rank = 0;
    for item in items {
        if let Some(p) = &product {
            let r = item.label.rank();
            let extended = p.mul(&item.label);
            if r == rank && extended.rank() == rank {
                product = Some(extended);
                current.push(item);
                continue;
            }
            groups.push(std::mem::take(&mut current));
        }
        rank = item.label.rank();
        product = Some(item.label.clone());
        current.push(item);
    }
    groups.push(current);
    groups
}

/// Span of a factor `u` of `w` with `φ(u)` stable and `sign·ω(u) > 0`, found
/// by scanning a factorization tree of the letter images in preorder: wide
/// nodes first, then any node. When `sign·ω(w) ≥ η(d)` such a factor
/// exists, so failure there is an invariant violation.
pub fn extract_stable_factor(w: &[usize], mp: &MorphismPair, sign: i32) -> Result<(usize, usize), TreeError> {
    if sign != 1 && sign != -1 {
        return Err(TreeError::Precondition("sign must be +1 or -1".into()));
    }
    if w.iter().any(|&a| a >= mp.len()) {
        return Err(TreeError::Precondition("word uses an unknown letter".into()));
    }
    let total = i64::from(sign) * mp.weight(w);
    if total <= 0 {
        return Err(TreeError::Precondition(format!("signed weight {total} is not positive")));
    }
    let ms: Vec<RationalMatrix> = w.iter().map(|&a| mp.phi(a).clone()).collect();
    let tree = build_tree(&ms)?;
    let mut prefix = vec![0i64; w.len() + 1];
    for (i, &a) in w.iter().enumerate() {
        prefix[i + 1] = prefix[i] + i64::from(mp.omega(a));
    }
    let signed = |n: &FactTree| i64::from(sign) * (prefix[n.span.1] - prefix[n.span.0]);
    let qualifies = |n: &FactTree| signed(n) > 0 && is_stable(&n.label).expect("square");
    let nodes = tree.preorder();
    if let Some(n) = nodes.iter().find(|n| n.is_wide() && qualifies(n)) {
        return Ok(n.span);
    }
    if let Some(n) = nodes.iter().find(|n| qualifies(n)) {
        return Ok(n.span);
    }
    if u64::try_from(total).unwrap_or(0) >= default_eta(mp.dim()) {
        Err(TreeError::Invariant("height-bounded tree without a qualifying node".into()))
    } else {
        Err(TreeError::NoStableFactor)
    }
}
