//! Ultrametric matrices: reading them off dendrograms, checking the strong
//! triangle inequality, putting them in canonical order, and measuring how
//! close arbitrary dissimilarities come to being ultrametric.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{Dendrogram, NodeRef};
use crate::matrix::DissimilarityMatrix;
use crate::scalar::Scalar;

/// Default absolute tolerance for [`verify_ultrametric`].
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Default relative tolerance for the ultrametricity coefficient.
pub const DEFAULT_TRIANGLE_TOLERANCE: f64 = 0.02;
pub const DEFAULT_SAMPLE: usize = 2000;

/// Matrix of merge heights: entry `(i, j)` is the height of the lowest merge
/// joining terminals `i` and `j`.
pub fn cophenetic_matrix<T: Scalar>(tree: &Dendrogram<T>) -> DissimilarityMatrix<T> {
    let n = tree.n();
    let mut values = vec![T::zero(); n * n];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    let take = |node: NodeRef, members: &mut Vec<Vec<usize>>| match node {
        NodeRef::Terminal(i) => vec![i],
        NodeRef::Internal(r) => std::mem::take(&mut members[r]),
    };
    for m in tree.merges() {
        let mut left = take(m.left, &mut members);
        let right = take(m.right, &mut members);
        for &a in &left {
            for &b in &right {
                values[a * n + b] = m.height;
                values[b * n + a] = m.height;
            }
        }
        left.extend(right);
        members[m.rank] = left;
    }
    DissimilarityMatrix::new(n, values)
        .and_then(|d| d.with_labels(tree.labels().to_vec()))
        .expect("merge heights are finite and non-negative")
}

/// A triple breaking the strong triangle inequality: `d(i, k) = lhs` exceeds
/// `max(d(i, j), d(j, k)) = rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation<T> {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub lhs: T,
    pub rhs: T,
}

impl<T: Scalar> From<Violation<T>> for Error {
    fn from(v: Violation<T>) -> Self {
        Error::NotUltrametric {
            i: v.i,
            j: v.j,
            k: v.k,
            lhs: v.lhs.as_f64(),
            rhs: v.rhs.as_f64(),
        }
    }
}

fn triple_violation<T: Scalar>(m: &DissimilarityMatrix<T>, a: usize, b: usize, c: usize, tol: T) -> Option<Violation<T>> {
    // Longest side last; its endpoints are reported as (i, k), the apex as j.
    let mut sides = [(m.get(a, b), a, b, c), (m.get(a, c), a, c, b), (m.get(b, c), b, c, a)];
    sides.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));
    let (lhs, i, k, j) = sides[2];
    let rhs = sides[1].0;
    (lhs > rhs + tol).then_some(Violation { i, j, k, lhs, rhs })
}

/// Every triple violating the strong triangle inequality by more than `tol`
/// (absolute), one report per unordered triple.
pub fn verify_ultrametric<T: Scalar>(m: &DissimilarityMatrix<T>, tol: T) -> Vec<Violation<T>> {
    let n = m.size();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                out.extend(triple_violation(m, a, b, c, tol));
            }
        }
    }
    out
}

fn first_violation<T: Scalar>(m: &DissimilarityMatrix<T>, tol: T) -> Option<Violation<T>> {
    let n = m.size();
    (0..n).find_map(|a| (a + 1..n).find_map(|b| (b + 1..n).find_map(|c| triple_violation(m, a, b, c, tol))))
}

/// A dissimilarity matrix known to satisfy the strong triangle inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct UltrametricMatrix<T>(DissimilarityMatrix<T>);

impl<T: Scalar> UltrametricMatrix<T> {
    pub fn new(m: DissimilarityMatrix<T>, tol: T) -> Result<Self> {
        match first_violation(&m, tol) {
            Some(v) => Err(v.into()),
            None => Ok(UltrametricMatrix(m)),
        }
    }

    pub fn as_matrix(&self) -> &DissimilarityMatrix<T> {
        &self.0
    }

    pub fn into_inner(self) -> DissimilarityMatrix<T> {
        self.0
    }
}

impl<T: Scalar> From<&Dendrogram<T>> for UltrametricMatrix<T> {
    fn from(tree: &Dendrogram<T>) -> Self {
        UltrametricMatrix(cophenetic_matrix(tree))
    }
}

/// The two ordering conditions of a canonically arranged ultrametric matrix:
/// rows are non-decreasing to the right of the diagonal, and whenever row `k`
/// starts with a run of equal entries up to column `k + l + 1`, row `k + 1`
/// is no larger inside that run and identical beyond it.
pub fn satisfies_canonical_conditions<T: Scalar>(m: &DissimilarityMatrix<T>, tol: T) -> bool {
    let n = m.size();
    let eq = |a: T, b: T| (a - b).abs() <= tol;
    let rows_sorted = (0..n).all(|k| (k + 1..n.saturating_sub(1)).all(|j| m.get(k, j) <= m.get(k, j + 1) + tol));
    let runs_ok = (0..n.saturating_sub(2)).all(|k| {
        let first = m.get(k, k + 1);
        let end = (k + 1..n).take_while(|&j| eq(m.get(k, j), first)).last().unwrap_or(k + 1);
        (k + 2..=end).all(|j| m.get(k + 1, j) <= m.get(k, j) + tol) && (end + 1..n).all(|j| eq(m.get(k + 1, j), m.get(k, j)))
    });
    rows_sorted && runs_ok
}

/// Class tree of an ultrametric: each class splits into the classes of its
/// strictly-lower dissimilarities.
struct Class<T> {
    size: usize,
    height: T,
    children: Vec<Class<T>>,
    members: Vec<usize>,
}

impl<T: Scalar> Class<T> {
    fn build(m: &DissimilarityMatrix<T>, members: Vec<usize>, tol: T) -> Self {
        if members.len() == 1 {
            return Class {
                size: 1,
                height: T::zero(),
                children: Vec::new(),
                members,
            };
        }
        let height = members
            .iter()
            .flat_map(|&a| members.iter().map(move |&b| m.get(a, b)))
            .fold(T::zero(), T::max);
        let mut root: Vec<usize> = (0..members.len()).collect();
        fn find(root: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while root[r] != r {
                r = root[r];
            }
            root[x] = r;
            r
        }
        for x in 0..members.len() {
            for y in x + 1..members.len() {
                if m.get(members[x], members[y]) < height - tol {
                    let (rx, ry) = (find(&mut root, x), find(&mut root, y));
                    root[rx.max(ry)] = rx.min(ry);
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; members.len()];
        for x in 0..members.len() {
            let r = find(&mut root, x);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(members[x]);
        }
        if groups.len() == 1 {
            groups = members.iter().map(|&x| vec![x]).collect();
        }
        let mut children: Vec<Class<T>> = groups.into_iter().map(|g| Class::build(m, g, tol)).collect();
        children.sort_by(Class::shape_cmp);
        let members = children.iter().flat_map(|c| c.members.iter().copied()).collect();
        Class {
            size: children.iter().map(|c| c.size).sum(),
            height,
            children,
            members,
        }
    }

    /// Order that depends only on the shape of the class tree, never on labels.
    fn shape_cmp(a: &Self, b: &Self) -> Ordering {
        a.size
            .cmp(&b.size)
            .then_with(|| a.height.partial_cmp(&b.height).unwrap_or(Ordering::Equal))
            .then_with(|| a.children.len().cmp(&b.children.len()))
            .then_with(|| {
                a.children
                    .iter()
                    .zip(&b.children)
                    .map(|(x, y)| Class::shape_cmp(x, y))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
    }
}

/// Reorders an ultrametric matrix so that it satisfies
/// [`satisfies_canonical_conditions`]. The order is a function of the matrix
/// up to relabelling: permuting the input and canonicalizing again yields the
/// same values. Returns the order (new position to old index) and the matrix.
pub fn canonical_form<T: Scalar>(
    m: &DissimilarityMatrix<T>,
    tol: T,
) -> Result<(Vec<usize>, DissimilarityMatrix<T>)> {
    if let Some(v) = first_violation(m, tol) {
        return Err(v.into());
    }
    let order = if m.size() == 0 {
        Vec::new()
    } else {
        Class::build(m, (0..m.size()).collect(), tol).members
    };
    let out = m.permuted(&order)?;
    if !satisfies_canonical_conditions(&out, tol) {
        return Err(Error::Domain("canonical ordering failed its own check".into()));
    }
    Ok((order, out))
}

/// Shape of a triangle with respect to the strong triangle inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TriangleClass {
    Equilateral,
    IsoscelesSmallBase,
    MetricOnly,
}

impl fmt::Display for TriangleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriangleClass::Equilateral => "equilateral",
            TriangleClass::IsoscelesSmallBase => "isosceles-small-base",
            TriangleClass::MetricOnly => "metric-only",
        })
    }
}

fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Classifies a triangle by its side lengths, comparing with relative tolerance.
pub fn classify_triangle<T: Scalar>(a: T, b: T, c: T, tol: T) -> Result<TriangleClass> {
    let mut s = [a.as_f64(), b.as_f64(), c.as_f64()];
    if s.iter().any(|x| x.is_nan() || *x < 0.0) {
        return Err(Error::Domain(format!("triangle sides must be non-negative, got {a}, {b}, {c}")));
    }
    s.sort_by(f64::total_cmp);
    let tol = tol.as_f64();
    Ok(if rel_eq(s[2], s[0], tol) {
        TriangleClass::Equilateral
    } else if rel_eq(s[2], s[1], tol) {
        TriangleClass::IsoscelesSmallBase
    } else {
        TriangleClass::MetricOnly
    })
}

/// Fraction of sampled triangles that are equilateral or isosceles with small base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UltrametricityReport {
    pub sampled: usize,
    pub coefficient: f64,
    pub seed: u64,
    pub tolerance: f64,
}

fn triple_count(n: usize) -> u128 {
    let n = n as u128;
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Estimates the share of ultrametric triangles in `m`. Draws `sample`
/// distinct triples with a seeded generator, or uses all triples when there
/// are no more than `sample` of them.
pub fn ultrametricity_coefficient<T: Scalar>(
    m: &DissimilarityMatrix<T>,
    sample: usize,
    seed: u64,
    tol: f64,
) -> Result<UltrametricityReport> {
    let n = m.size();
    if n < 3 {
        return Err(Error::Degenerate(format!("need at least 3 points, got {n}")));
    }
    if sample == 0 {
        return Err(Error::Domain("sample size must be positive".into()));
    }
    if !(tol >= 0.0) {
        return Err(Error::Domain("tolerance must be non-negative".into()));
    }
    let triples: Vec<[usize; 3]> = if triple_count(n) <= sample as u128 {
        (0..n)
            .flat_map(|a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| [a, b, c])))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = BTreeSet::new();
        let mut picked = Vec::with_capacity(sample);
        while picked.len() < sample {
            let mut t = [rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n)];
            t.sort_unstable();
            if t[0] != t[1] && t[1] != t[2] && seen.insert(t) {
                picked.push(t);
            }
        }
        picked
    };
    let tol_t = T::of(tol);
    let mut hits = 0usize;
    for &[a, b, c] in &triples {
        if classify_triangle(m.get(a, b), m.get(a, c), m.get(b, c), tol_t)? != TriangleClass::MetricOnly {
            hits += 1;
        }
    }
    Ok(UltrametricityReport {
        sampled: triples.len(),
        coefficient: hits as f64 / triples.len() as f64,
        seed,
        tolerance: tol,
    })
}

/// Distribution of generated point clouds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CloudLaw {
    /// Independent coordinates uniform on [0, 1).
    #[default]
    Uniform,
    /// Independent standard normal coordinates.
    Gaussian,
}

impl FromStr for CloudLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(CloudLaw::Uniform),
            "gaussian" | "normal" => Ok(CloudLaw::Gaussian),
            other => Err(Error::Domain(format!("unknown distribution {other:?}"))),
        }
    }
}

/// Seeded random point cloud of `n` points in `dim` dimensions.
pub fn generate_cloud<T: Scalar>(n: usize, dim: usize, law: CloudLaw, seed: u64) -> Result<Vec<Vec<T>>> {
    if n == 0 || dim == 0 {
        return Err(Error::Degenerate(format!("cloud needs positive size, got {n} points in {dim} dimensions")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    T::of(match law {
                        CloudLaw::Uniform => rng.random::<f64>(),
                        CloudLaw::Gaussian => rng.sample::<f64, _>(StandardNormal),
                    })
                })
                .collect()
        })
        .collect())
}
