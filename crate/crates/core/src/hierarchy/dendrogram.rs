use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Reference to a dendrogram node: a terminal by zero-based index, or an
/// internal node by its merge rank (1 for the first agglomeration).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeRef {
    Terminal(usize),
    Internal(usize),
}

impl NodeRef {
    /// Position in the combined numbering: terminals `0..n`, then internal nodes
    /// by rank starting at `n`.
    pub fn id(self, n: usize) -> usize {
        match self {
            NodeRef::Terminal(i) => i,
            NodeRef::Internal(r) => n - 1 + r,
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, NodeRef::Terminal(_))
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRef::Terminal(i) => write!(f, "t{}", i + 1),
            NodeRef::Internal(r) => write!(f, "q{r}"),
        }
    }
}

impl FromStr for NodeRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::parse(s, "expected a node reference like t3 or q2");
        let (kind, num) = s.split_at_checked(1).ok_or_else(bad)?;
        let k: usize = num.parse().map_err(|_| bad())?;
        match (kind, k) {
            ("t", 1..) => Ok(NodeRef::Terminal(k - 1)),
            ("q", 1..) => Ok(NodeRef::Internal(k)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// One agglomeration step.
#[derive(Debug, Clone, PartialEq)]
pub struct Merge<T> {
    pub rank: usize,
    pub left: NodeRef,
    pub right: NodeRef,
    pub height: T,
}

/// Rooted binary tree over `n` labelled terminals with `n - 1` ranked merges.
///
/// Children of every merge have lower rank than the merge itself, so the
/// merge list doubles as a bottom-up schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram<T> {
    labels: Vec<String>,
    merges: Vec<Merge<T>>,
}

impl<T: Scalar> Dendrogram<T> {
    /// Validates and builds a dendrogram. Merges may be given in any order.
    pub fn new(labels: Vec<String>, mut merges: Vec<Merge<T>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidTree("no terminals".into()));
        }
        if merges.len() != n - 1 {
            return Err(Error::InvalidTree(format!(
                "{} terminals need {} merges, got {}",
                n,
                n - 1,
                merges.len()
            )));
        }
        merges.sort_by_key(|m| m.rank);
        let mut terminal_used = vec![false; n];
        let mut internal_used = vec![false; n];
        for (k, m) in merges.iter().enumerate() {
            if m.rank != k + 1 {
                return Err(Error::InvalidTree(format!("ranks must be 1..{}, found q{}", n - 1, m.rank)));
            }
            if !m.height.is_finite() || m.height < T::zero() {
                return Err(Error::InvalidTree(format!("q{} has invalid height {}", m.rank, m.height)));
            }
            for child in [m.left, m.right] {
                let slot = match child {
                    NodeRef::Terminal(i) if i < n => &mut terminal_used[i],
                    NodeRef::Internal(r) if r >= 1 && r < m.rank => &mut internal_used[r],
                    _ => {
                        return Err(Error::InvalidTree(format!("q{} has invalid child {child}", m.rank)));
                    }
                };
                if std::mem::replace(slot, true) {
                    return Err(Error::InvalidTree(format!("{child} has more than one parent")));
                }
            }
        }
        Ok(Dendrogram { labels, merges })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn merges(&self) -> &[Merge<T>] {
        &self.merges
    }

    pub fn merge(&self, rank: usize) -> Option<&Merge<T>> {
        rank.checked_sub(1).and_then(|k| self.merges.get(k))
    }

    pub fn root(&self) -> NodeRef {
        match self.merges.len() {
            0 => NodeRef::Terminal(0),
            k => NodeRef::Internal(k),
        }
    }

    pub fn height(&self, node: NodeRef) -> T {
        match node {
            NodeRef::Terminal(_) => T::zero(),
            NodeRef::Internal(r) => self.merges[r - 1].height,
        }
    }

    pub fn children(&self, node: NodeRef) -> Option<(NodeRef, NodeRef)> {
        match node {
            NodeRef::Terminal(_) => None,
            NodeRef::Internal(r) => self.merge(r).map(|m| (m.left, m.right)),
        }
    }

    /// Replaces the terminal labels.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::Shape(format!("{} labels for {} terminals", labels.len(), self.n())));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Terminals below `node` in left-to-right order.
    pub fn terminals_under(&self, node: NodeRef) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(v) = stack.pop() {
            match v {
                NodeRef::Terminal(i) => out.push(i),
                NodeRef::Internal(r) => {
                    let m = &self.merges[r - 1];
                    stack.push(m.right);
                    stack.push(m.left);
                }
            }
        }
        out
    }

    /// Terminals in drawing order.
    pub fn leaf_order(&self) -> Vec<usize> {
        self.terminals_under(self.root())
    }

    /// For every terminal, the rank of its parent and which side it hangs on.
    fn terminal_parents(&self) -> Vec<(usize, Side)> {
        let mut parent = vec![(0, Side::Left); self.n()];
        for m in &self.merges {
            for (child, side) in [(m.left, Side::Left), (m.right, Side::Right)] {
                if let NodeRef::Terminal(i) = child {
                    parent[i] = (m.rank, side);
                }
            }
        }
        parent
    }

    /// Parent of each internal rank (index `r`), with the root mapping to 0.
    fn internal_parents(&self) -> Vec<(usize, Side)> {
        let mut parent = vec![(0, Side::Left); self.n()];
        for m in &self.merges {
            for (child, side) in [(m.left, Side::Left), (m.right, Side::Right)] {
                if let NodeRef::Internal(r) = child {
                    parent[r] = (m.rank, side);
                }
            }
        }
        parent
    }

    /// Merges on the way from `terminal` to the root, bottom first, with the
    /// side from which the path enters each one.
    pub fn path_to_root(&self, terminal: usize) -> Result<Vec<(usize, Side)>> {
        if terminal >= self.n() {
            return Err(Error::Index(format!("terminal {terminal} of {}", self.n())));
        }
        if self.n() == 1 {
            return Ok(Vec::new());
        }
        let up = self.internal_parents();
        let mut path = vec![self.terminal_parents()[terminal]];
        while let Some(&(r, _)) = path.last() {
            match up[r] {
                (0, _) => break,
                step => path.push(step),
            }
        }
        Ok(path)
    }

    /// Rank of the lowest common ancestor of two terminals, 0 when they coincide.
    pub fn lca_rank(&self, a: usize, b: usize) -> Result<usize> {
        if a == b {
            if a >= self.n() {
                return Err(Error::Index(format!("terminal {a} of {}", self.n())));
            }
            return Ok(0);
        }
        let pa = self.path_to_root(a)?;
        let pb = self.path_to_root(b)?;
        let on_a: std::collections::HashSet<usize> = pa.iter().map(|&(r, _)| r).collect();
        Ok(pb.iter().map(|&(r, _)| r).find(|r| on_a.contains(r)).unwrap_or(self.merges.len()))
    }

    /// True when no merge sits below one of its children.
    pub fn is_monotone(&self) -> bool {
        self.merges
            .iter()
            .all(|m| m.height >= self.height(m.left) && m.height >= self.height(m.right))
    }

    /// The same tree with the two children of merge `rank` exchanged.
    pub fn swap_children(&self, rank: usize) -> Result<Self> {
        if rank == 0 || rank > self.merges.len() {
            return Err(Error::Index(format!("no merge of rank {rank}")));
        }
        let mut out = self.clone();
        let m = &mut out.merges[rank - 1];
        std::mem::swap(&mut m.left, &mut m.right);
        Ok(out)
    }

    /// Orientation representative of the swap orbit: at every merge the child
    /// holding the earliest agglomeration goes left, and two terminals are
    /// ordered by index.
    pub fn canonicalize(&self) -> Self {
        let mut earliest = vec![usize::MAX; self.n()];
        for m in &self.merges {
            let mut e = m.rank;
            for child in [m.left, m.right] {
                if let NodeRef::Internal(r) = child {
                    e = e.min(earliest[r]);
                }
            }
            earliest[m.rank] = e;
        }
        let key = |node: NodeRef| match node {
            NodeRef::Internal(r) => (0, earliest[r]),
            NodeRef::Terminal(i) => (1, i),
        };
        let mut out = self.clone();
        for m in &mut out.merges {
            if key(m.left) > key(m.right) {
                std::mem::swap(&mut m.left, &mut m.right);
            }
        }
        out
    }

    /// Renumbers terminals so that index equals drawing position.
    pub fn with_terminals_in_leaf_order(&self) -> Self {
        let order = self.leaf_order();
        let mut position = vec![0; self.n()];
        for (pos, &t) in order.iter().enumerate() {
            position[t] = pos;
        }
        let relabel = |node: NodeRef| match node {
            NodeRef::Terminal(i) => NodeRef::Terminal(position[i]),
            other => other,
        };
        Dendrogram {
            labels: order.iter().map(|&t| self.labels[t].clone()).collect(),
            merges: self
                .merges
                .iter()
                .map(|m| Merge {
                    rank: m.rank,
                    left: relabel(m.left),
                    right: relabel(m.right),
                    height: m.height,
                })
                .collect(),
        }
    }

    pub fn map_heights<U: Scalar>(&self, mut f: impl FnMut(T) -> U) -> Dendrogram<U> {
        Dendrogram {
            labels: self.labels.clone(),
            merges: self
                .merges
                .iter()
                .map(|m| Merge {
                    rank: m.rank,
                    left: m.left,
                    right: m.right,
                    height: f(m.height),
                })
                .collect(),
        }
    }
}

/// Child of a merge that has not been ranked yet.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Part {
    Leaf(usize),
    Step(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct RawMerge<T> {
    pub a: Part,
    pub b: Part,
    pub height: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Orientation {
    /// `a` left, `b` right.
    AsGiven,
    /// Child with the larger combined id goes left.
    LargerIdLeft,
}

/// Ranks a child-before-parent list of merges. With `by_height`, steps are
/// stably sorted by height after lifting each height to at least those of
/// its children.
pub(crate) fn assemble<T: Scalar>(
    labels: Vec<String>,
    mut raw: Vec<RawMerge<T>>,
    by_height: bool,
    orientation: Orientation,
) -> Result<Dendrogram<T>> {
    let n = labels.len();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    if by_height {
        for k in 0..raw.len() {
            let mut h = raw[k].height;
            for p in [raw[k].a, raw[k].b] {
                if let Part::Step(s) = p {
                    h = h.max(raw[s].height);
                }
            }
            raw[k].height = h;
        }
        order.sort_by(|&x, &y| raw[x].height.partial_cmp(&raw[y].height).unwrap_or(Ordering::Equal));
    }
    let mut rank_of = vec![0; raw.len()];
    for (pos, &k) in order.iter().enumerate() {
        rank_of[k] = pos + 1;
    }
    let node = |p: Part| match p {
        Part::Leaf(i) => NodeRef::Terminal(i),
        Part::Step(s) => NodeRef::Internal(rank_of[s]),
    };
    let merges = raw
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let (mut left, mut right) = (node(m.a), node(m.b));
            if orientation == Orientation::LargerIdLeft && left.id(n) < right.id(n) {
                std::mem::swap(&mut left, &mut right);
            }
            Merge {
                rank: rank_of[k],
                left,
                right,
                height: m.height,
            }
        })
        .collect();
    Dendrogram::new(labels, merges)
}
