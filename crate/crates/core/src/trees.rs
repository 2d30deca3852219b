//! Finite plane trees and one-ended infinite trees ("sin-trees").
//!
//! A [`PlaneTree`] is stored as its depth-first child-count sequence
//! `k(v^0), k(v^1), ...`, with vertices listed in lexicographic order (children
//! left to right). Every other view of a tree (vertex words, coding paths,
//! generation sizes) is derived from this sequence.
//!
//! A [`SinTree`] keeps its backbone explicit: for every materialized backbone
//! vertex `BB_i` it stores the finite subtrees hanging to the left and to the
//! right of `BB_{i+1}`. Only the first `height` levels exist; asking for
//! anything above them is an error, never a silent extension.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A finite rooted ordered tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlaneTree {
    child_counts: Vec<u32>,
}

impl PlaneTree {
    /// Builds a tree from its depth-first child counts, checking that the
    /// sequence describes exactly one finite tree.
    pub fn from_child_counts(child_counts: Vec<u32>) -> Result<Self> {
        if child_counts.is_empty() {
            return Err(Error::invalid("a plane tree has at least one vertex"));
        }
        let n = child_counts.len();
        let mut open: i64 = 1;
        for (i, &k) in child_counts.iter().enumerate() {
            if open <= 0 {
                return Err(Error::invalid(format!(
                    "child counts describe a complete tree after {i} of {n} vertices"
                )));
            }
            open += k as i64 - 1;
        }
        if open != 0 {
            return Err(Error::invalid(format!("child counts leave {open} unexplored vertices")));
        }
        Ok(PlaneTree { child_counts })
    }

    /// Unchecked constructor for sequences produced by this crate.
    pub(crate) fn from_counts_unchecked(child_counts: Vec<u32>) -> Self {
        debug_assert!(PlaneTree::from_child_counts(child_counts.clone()).is_ok());
        PlaneTree { child_counts }
    }

    /// The tree with a single vertex.
    pub fn singleton() -> Self {
        PlaneTree { child_counts: vec![0] }
    }

    /// A path with `edges` edges.
    pub fn path(edges: usize) -> Self {
        let mut counts = vec![1; edges];
        counts.push(0);
        PlaneTree { child_counts: counts }
    }

    pub fn child_counts(&self) -> &[u32] {
        &self.child_counts
    }

    pub fn into_child_counts(self) -> Vec<u32> {
        self.child_counts
    }

    /// Number of vertices `#θ`.
    pub fn n_vertices(&self) -> usize {
        self.child_counts.len()
    }

    pub fn n_edges(&self) -> usize {
        self.child_counts.len() - 1
    }

    /// Vertex words in lexicographic order. The root is the empty word and
    /// the `i`-th child of `v` is `v` followed by `i` (1-based).
    pub fn lex_vertices(&self) -> LexVertices<'_> {
        LexVertices {
            counts: &self.child_counts,
            idx: 0,
            word: Vec::new(),
            frames: Vec::new(),
        }
    }

    /// Depth of every vertex, in depth-first order.
    pub fn depths(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.child_counts.len());
        let mut remaining: Vec<u32> = Vec::new();
        for (i, &k) in self.child_counts.iter().enumerate() {
            if i > 0 {
                while remaining.last() == Some(&0) {
                    remaining.pop();
                }
                *remaining.last_mut().expect("valid tree") -= 1;
            }
            out.push(remaining.len() as u32);
            remaining.push(k);
        }
        out
    }

    /// Size of the subtree rooted at every vertex, in depth-first order.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let n = self.child_counts.len();
        let mut sizes = vec![0usize; n];
        let mut stack: Vec<usize> = Vec::new();
        for i in (0..n).rev() {
            let mut size = 1;
            for _ in 0..self.child_counts[i] {
                size += stack.pop().expect("valid tree");
            }
            sizes[i] = size;
            stack.push(size);
        }
        sizes
    }

    /// Mirror image: the same tree with the order of children reversed at
    /// every vertex.
    pub fn reflect(&self) -> PlaneTree {
        let sizes = self.subtree_sizes();
        let mut out = Vec::with_capacity(self.child_counts.len());
        let mut stack = vec![0usize];
        let mut children = Vec::new();
        while let Some(v) = stack.pop() {
            let k = self.child_counts[v];
            out.push(k);
            children.clear();
            let mut c = v + 1;
            for _ in 0..k {
                children.push(c);
                c += sizes[c];
            }
            // pushed in original order, so the last child is visited first
            stack.extend_from_slice(&children);
        }
        PlaneTree { child_counts: out }
    }

    /// Right-grafting `self ⊕ s`: the root of `s` is identified with the
    /// rightmost leaf of `self` (its last vertex in lexicographic order).
    pub fn right_graft(&self, s: &PlaneTree) -> PlaneTree {
        let mut counts = Vec::with_capacity(self.child_counts.len() + s.child_counts.len() - 1);
        counts.extend_from_slice(&self.child_counts[..self.child_counts.len() - 1]);
        counts.extend_from_slice(&s.child_counts);
        PlaneTree { child_counts: counts }
    }

    /// The subtrees rooted at the children of the root, left to right.
    pub fn root_subtrees(&self) -> Vec<PlaneTree> {
        let sizes = self.subtree_sizes();
        let mut out = Vec::with_capacity(self.child_counts[0] as usize);
        let mut c = 1;
        for _ in 0..self.child_counts[0] {
            out.push(PlaneTree {
                child_counts: self.child_counts[c..c + sizes[c]].to_vec(),
            });
            c += sizes[c];
        }
        out
    }

    /// Number of vertices at each depth `0..=max depth`.
    pub fn generation_sizes(&self) -> Vec<u64> {
        let mut sizes: Vec<u64> = Vec::new();
        for d in self.depths() {
            let d = d as usize;
            if sizes.len() <= d {
                sizes.resize(d + 1, 0);
            }
            sizes[d] += 1;
        }
        sizes
    }

    /// Serializes to the `.pt` text format.
    pub fn to_pt_string(&self) -> String {
        let mut s = String::with_capacity(8 + 3 * self.child_counts.len());
        let _ = writeln!(s, "pt1 {}", self.child_counts.len());
        for (i, k) in self.child_counts.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{k}");
        }
        s.push('\n');
        s
    }

    /// Parses the `.pt` text format: `pt1 <n_vertices>` on the first line and
    /// the space-separated child counts on the second.
    pub fn parse_pt(text: &str) -> Result<PlaneTree> {
        let mut lines = text.split('\n');
        let header = lines.next().unwrap_or("");
        let mut fields = header.split(' ');
        if fields.next() != Some("pt1") {
            return Err(Error::parse(1, 1, "expected header `pt1 <n_vertices>`"));
        }
        let n_field = fields
            .next()
            .ok_or_else(|| Error::parse(1, 5, "missing vertex count"))?;
        let n: usize = n_field
            .parse()
            .map_err(|_| Error::parse(1, 5, format!("invalid vertex count `{n_field}`")))?;
        if fields.next().is_some() {
            return Err(Error::parse(1, 6 + n_field.len(), "trailing data after vertex count"));
        }
        let body = lines
            .next()
            .ok_or_else(|| Error::parse(2, 1, "missing child-count line"))?;
        let mut counts = Vec::with_capacity(n);
        let mut column = 1;
        for tok in body.split(' ') {
            let k: u32 = tok
                .parse()
                .map_err(|_| Error::parse(2, column, format!("invalid child count `{tok}`")))?;
            counts.push(k);
            column += tok.len() + 1;
        }
        for (extra, rest) in lines.enumerate() {
            if !rest.is_empty() {
                return Err(Error::parse(3 + extra, 1, "unexpected trailing content"));
            }
        }
        if counts.len() != n {
            return Err(Error::parse(
                2,
                1,
                format!("header announces {n} vertices, found {}", counts.len()),
            ));
        }
        PlaneTree::from_child_counts(counts).map_err(|e| Error::parse(2, 1, e.to_string()))
    }
}

/// Iterator over the vertex words of a [`PlaneTree`] in lexicographic order.
pub struct LexVertices<'a> {
    counts: &'a [u32],
    idx: usize,
    word: Vec<u32>,
    // (number of children, children not yet visited) along the current path
    frames: Vec<(u32, u32)>,
}

impl Iterator for LexVertices<'_> {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.idx >= self.counts.len() {
            return None;
        }
        if self.idx > 0 {
            loop {
                let (total, remaining) = self.frames.last_mut()?;
                if *remaining > 0 {
                    self.word.push(*total - *remaining + 1);
                    *remaining -= 1;
                    break;
                }
                self.frames.pop();
                self.word.pop();
            }
        }
        let k = self.counts[self.idx];
        self.frames.push((k, k));
        self.idx += 1;
        Some(self.word.clone())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.counts.len() - self.idx;
        (left, Some(left))
    }
}

/// The subtrees hanging off one backbone vertex `BB_i`, split by their
/// position relative to the next backbone vertex `BB_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BackboneLevel {
    /// Subtrees whose roots precede `BB_{i+1}` in the child order.
    pub left: Vec<PlaneTree>,
    /// Subtrees whose roots follow `BB_{i+1}`, in child order.
    pub right: Vec<PlaneTree>,
}

impl BackboneLevel {
    pub fn degree(&self) -> usize {
        self.left.len() + 1 + self.right.len()
    }
}

/// A one-ended infinite tree materialized up to a backbone height.
///
/// Levels `0..height` carry their off-backbone subtrees; `BB_height` exists
/// as a vertex but nothing above it is known.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SinTree {
    levels: Vec<BackboneLevel>,
}

impl SinTree {
    pub fn from_levels(levels: Vec<BackboneLevel>) -> Self {
        SinTree { levels }
    }

    /// A bare backbone ray materialized to `height`.
    pub fn bare(height: usize) -> Self {
        SinTree {
            levels: vec![BackboneLevel::default(); height],
        }
    }

    pub(crate) fn push_level(&mut self, level: BackboneLevel) {
        self.levels.push(level);
    }

    /// Materialized backbone height.
    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[BackboneLevel] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> Option<&BackboneLevel> {
        self.levels.get(i)
    }

    /// True when every off-backbone child precedes the backbone child.
    pub fn is_backbone_rightmost(&self) -> bool {
        self.levels.iter().all(|l| l.right.is_empty())
    }

    /// Vertices in the materialized part (backbone up to `BB_height` included).
    pub fn n_vertices(&self) -> usize {
        self.levels
            .iter()
            .flat_map(|l| l.left.iter().chain(l.right.iter()))
            .map(PlaneTree::n_vertices)
            .sum::<usize>()
            + self.levels.len()
            + 1
    }

    /// The `i`-truncation `{v : v ≤ BB_i}`: the backbone up to `BB_i` together
    /// with the subtrees attached to its left strictly below level `i`.
    /// `BB_i` is the rightmost leaf of the result.
    pub fn truncate(&self, i: usize) -> Result<PlaneTree> {
        if i > self.levels.len() {
            return Err(Error::InsufficientMaterialization {
                requested: i,
                available: self.levels.len(),
            });
        }
        let mut counts = Vec::new();
        for level in &self.levels[..i] {
            counts.push(level.left.len() as u32 + 1);
            for t in &level.left {
                counts.extend_from_slice(t.child_counts());
            }
        }
        counts.push(0);
        Ok(PlaneTree::from_counts_unchecked(counts))
    }

    /// The whole materialized part as a finite tree in which `BB_height` is a
    /// leaf.
    pub fn to_plane_tree(&self) -> PlaneTree {
        let mut counts = Vec::with_capacity(self.n_vertices());
        for level in &self.levels {
            counts.push(level.degree() as u32);
            for t in &level.left {
                counts.extend_from_slice(t.child_counts());
            }
        }
        counts.push(0);
        for level in self.levels.iter().rev() {
            for t in &level.right {
                counts.extend_from_slice(t.child_counts());
            }
        }
        PlaneTree::from_counts_unchecked(counts)
    }

    /// Left and right parts `(T_G, T_D)`. The left part keeps every vertex on
    /// or to the left of the backbone; the right part is the left part of the
    /// mirror image. Both have their backbone as rightmost branch.
    pub fn split_sides(&self) -> (SinTree, SinTree) {
        let left = self
            .levels
            .iter()
            .map(|l| BackboneLevel {
                left: l.left.clone(),
                right: Vec::new(),
            })
            .collect();
        let right = self
            .levels
            .iter()
            .map(|l| BackboneLevel {
                left: l.right.iter().rev().map(PlaneTree::reflect).collect(),
                right: Vec::new(),
            })
            .collect();
        (SinTree { levels: left }, SinTree { levels: right })
    }

    /// Inverse of [`SinTree::split_sides`].
    pub fn merge_sides(left: &SinTree, right: &SinTree) -> Result<SinTree> {
        if !left.is_backbone_rightmost() || !right.is_backbone_rightmost() {
            return Err(Error::invalid("both sides must have their backbone rightmost"));
        }
        if left.height() != right.height() {
            return Err(Error::invalid(format!(
                "side heights differ: {} vs {}",
                left.height(),
                right.height()
            )));
        }
        let levels = left
            .levels
            .iter()
            .zip(&right.levels)
            .map(|(l, r)| BackboneLevel {
                left: l.left.clone(),
                right: r.left.iter().rev().map(PlaneTree::reflect).collect(),
            })
            .collect();
        Ok(SinTree { levels })
    }

    /// The mirror image of the materialized tree.
    pub fn reflect(&self) -> SinTree {
        let levels = self
            .levels
            .iter()
            .map(|l| BackboneLevel {
                left: l.right.iter().rev().map(PlaneTree::reflect).collect(),
                right: l.left.iter().rev().map(PlaneTree::reflect).collect(),
            })
            .collect();
        SinTree { levels }
    }
}
