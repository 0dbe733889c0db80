//! Haar wavelet transform over a dendrogram.
//!
//! Each merge replaces its two child vectors by their unweighted mean (the
//! smooth) and half their difference (the detail, `smooth - left`). The root
//! smooth and the `n - 1` details reconstruct the data exactly: descending
//! from the root, the left child is `smooth - detail` and the right child
//! `smooth + detail`.

use crate::error::{Error, Result};
use crate::hierarchy::{Dendrogram, NodeRef};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct HaarTransform<T> {
    tree: Dendrogram<T>,
    root_smooth: Vec<T>,
    details: Vec<Vec<T>>,
}

impl<T: Scalar> HaarTransform<T> {
    /// Assembles a transform from its parts; `details[k]` belongs to rank `k + 1`.
    pub fn new(tree: Dendrogram<T>, root_smooth: Vec<T>, details: Vec<Vec<T>>) -> Result<Self> {
        if root_smooth.is_empty() {
            return Err(Error::Shape("root smooth is empty".into()));
        }
        if details.len() != tree.n() - 1 {
            return Err(Error::Shape(format!(
                "{} detail vectors for {} merges",
                details.len(),
                tree.n() - 1
            )));
        }
        if let Some(k) = details.iter().position(|d| d.len() != root_smooth.len()) {
            return Err(Error::Shape(format!(
                "detail q{} has {} coordinates, expected {}",
                k + 1,
                details[k].len(),
                root_smooth.len()
            )));
        }
        Ok(HaarTransform { tree, root_smooth, details })
    }

    pub fn tree(&self) -> &Dendrogram<T> {
        &self.tree
    }

    pub fn dim(&self) -> usize {
        self.root_smooth.len()
    }

    pub fn root_smooth(&self) -> &[T] {
        &self.root_smooth
    }

    /// All details, rank 1 first.
    pub fn details(&self) -> &[Vec<T>] {
        &self.details
    }

    pub fn detail(&self, rank: usize) -> Option<&[T]> {
        rank.checked_sub(1).and_then(|k| self.details.get(k)).map(Vec::as_slice)
    }
}

/// Decomposes `data` (one row per terminal, in terminal index order).
pub fn haar_forward<T: Scalar>(tree: &Dendrogram<T>, data: &[Vec<T>]) -> Result<HaarTransform<T>> {
    let n = tree.n();
    if data.len() != n {
        return Err(Error::Alignment { expected: n, found: data.len() });
    }
    let m = data[0].len();
    if m == 0 {
        return Err(Error::Shape("rows have no coordinates".into()));
    }
    if let Some(i) = data.iter().position(|r| r.len() != m) {
        return Err(Error::Shape(format!("row {} has {} coordinates, expected {m}", i + 1, data[i].len())));
    }
    let half = T::of(0.5);
    let mut smooth: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut details = Vec::with_capacity(n - 1);
    let value = |node: NodeRef, smooth: &[Vec<T>]| -> Vec<T> {
        match node {
            NodeRef::Terminal(i) => data[i].clone(),
            NodeRef::Internal(r) => smooth[r - 1].clone(),
        }
    };
    for merge in tree.merges() {
        let (l, r) = (value(merge.left, &smooth), value(merge.right, &smooth));
        smooth.push(l.iter().zip(&r).map(|(&a, &b)| (a + b) * half).collect());
        // (right - left) / 2 negates exactly when the children are swapped.
        details.push(l.iter().zip(&r).map(|(&a, &b)| (b - a) * half).collect());
    }
    let root_smooth = smooth.pop().unwrap_or_else(|| data[0].clone());
    HaarTransform::new(tree.clone(), root_smooth, details)
}

/// Rebuilds the data rows in terminal index order.
pub fn haar_inverse<T: Scalar>(t: &HaarTransform<T>) -> Vec<Vec<T>> {
    let n = t.tree.n();
    let mut internal: Vec<Vec<T>> = vec![Vec::new(); n];
    let mut rows: Vec<Vec<T>> = vec![Vec::new(); n];
    let mut place = |node: NodeRef, v: Vec<T>, internal: &mut Vec<Vec<T>>| match node {
        NodeRef::Terminal(i) => rows[i] = v,
        NodeRef::Internal(r) => internal[r] = v,
    };
    place(t.tree.root(), t.root_smooth.clone(), &mut internal);
    for merge in t.tree.merges().iter().rev() {
        let s = std::mem::take(&mut internal[merge.rank]);
        let d = &t.details[merge.rank - 1];
        let left = s.iter().zip(d).map(|(&s, &d)| s - d).collect();
        let right = s.iter().zip(d).map(|(&s, &d)| s + d).collect();
        place(merge.left, left, &mut internal);
        place(merge.right, right, &mut internal);
    }
    rows
}

/// Zeroes every detail coefficient whose magnitude is below `epsilon`.
pub fn haar_threshold<T: Scalar>(t: &HaarTransform<T>, epsilon: T) -> Result<HaarTransform<T>> {
    if !(epsilon >= T::zero()) {
        return Err(Error::Domain(format!("threshold must be non-negative, got {epsilon}")));
    }
    let details = t
        .details
        .iter()
        .map(|d| d.iter().map(|&x| if x.abs() < epsilon { T::zero() } else { x }).collect())
        .collect();
    Ok(HaarTransform {
        tree: t.tree.clone(),
        root_smooth: t.root_smooth.clone(),
        details,
    })
}
