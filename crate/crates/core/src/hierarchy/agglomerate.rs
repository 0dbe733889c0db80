use std::fmt;
use std::str::FromStr;

use super::dendrogram::{assemble, Dendrogram, Orientation, Part, RawMerge};
use crate::error::{Error, Result};
use crate::matrix::DissimilarityMatrix;
use crate::scalar::Scalar;

/// Between-cluster dissimilarity used when agglomerating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Linkage {
    /// Minimum pairwise dissimilarity.
    Single,
    /// Maximum pairwise dissimilarity.
    Complete,
    /// Minimum-variance criterion, on squared dissimilarities.
    Ward,
    /// Weighted centroid (Gower) criterion, on squared dissimilarities. Can
    /// produce inversions.
    Median,
}

impl Linkage {
    pub const ALL: [Linkage; 4] = [Linkage::Single, Linkage::Complete, Linkage::Ward, Linkage::Median];

    /// Whether merge heights are guaranteed non-decreasing.
    pub fn is_monotone(self) -> bool {
        !matches!(self, Linkage::Median)
    }

    fn squared(self) -> bool {
        matches!(self, Linkage::Ward | Linkage::Median)
    }

    /// Lance-Williams update: dissimilarity from `k` to the union of `i` and `j`.
    fn update<T: Scalar>(self, d_ik: T, d_jk: T, d_ij: T, n_i: usize, n_j: usize, n_k: usize) -> T {
        match self {
            Linkage::Single => d_ik.min(d_jk),
            Linkage::Complete => d_ik.max(d_jk),
            Linkage::Ward => {
                let (ni, nj, nk) = (T::of_usize(n_i), T::of_usize(n_j), T::of_usize(n_k));
                ((ni + nk) * d_ik + (nj + nk) * d_jk - nk * d_ij) / (ni + nj + nk)
            }
            Linkage::Median => {
                let half = T::of(0.5);
                half * d_ik + half * d_jk - T::of(0.25) * d_ij
            }
        }
    }

    fn height<T: Scalar>(self, work: T) -> T {
        if self.squared() {
            work.max(T::zero()).sqrt()
        } else {
            work
        }
    }
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "ward" | "minvar" | "min-variance" => Ok(Linkage::Ward),
            "median" | "gower" => Ok(Linkage::Median),
            other => Err(Error::Domain(format!("unknown linkage {other:?}"))),
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Ward => "ward",
            Linkage::Median => "median",
        })
    }
}

/// Working state shared by the agglomeration strategies.
struct Work<T> {
    n: usize,
    d: Vec<T>,
    size: Vec<usize>,
    part: Vec<Part>,
    raw: Vec<RawMerge<T>>,
    linkage: Linkage,
}

impl<T: Scalar> Work<T> {
    fn new(diss: &DissimilarityMatrix<T>, linkage: Linkage) -> Result<Self> {
        let n = diss.size();
        if n < 2 {
            return Err(Error::Degenerate(format!("need at least 2 items, got {n}")));
        }
        let d = diss
            .as_slice()
            .iter()
            .map(|&v| if linkage.squared() { v * v } else { v })
            .collect();
        Ok(Work {
            n,
            d,
            size: vec![1; n],
            part: (0..n).map(Part::Leaf).collect(),
            raw: Vec::with_capacity(n - 1),
            linkage,
        })
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> T {
        self.d[i * self.n + j]
    }

    /// Merges slot `hi` into slot `lo`, updating dissimilarities to `others`.
    fn merge(&mut self, lo: usize, hi: usize, others: impl Iterator<Item = usize>) {
        let d_ij = self.get(lo, hi);
        for k in others {
            if k == lo || k == hi {
                continue;
            }
            let v = self
                .linkage
                .update(self.get(lo, k), self.get(hi, k), d_ij, self.size[lo], self.size[hi], self.size[k]);
            self.d[lo * self.n + k] = v;
            self.d[k * self.n + lo] = v;
        }
        self.raw.push(RawMerge {
            a: self.part[lo],
            b: self.part[hi],
            height: self.linkage.height(d_ij),
        });
        self.part[lo] = Part::Step(self.raw.len() - 1);
        self.size[lo] += self.size[hi];
    }
}

/// Agglomerates with the given linkage. Ties go to the lexicographically
/// smallest pair of slot indices, a slot being named by its smallest terminal.
///
/// Single, complete and Ward use the nearest-neighbour chain; median uses the
/// repeated global minimum search because it is not reducible.
pub fn agglomerate<T: Scalar>(diss: &DissimilarityMatrix<T>, linkage: Linkage) -> Result<Dendrogram<T>> {
    if linkage.is_monotone() {
        nn_chain(diss, linkage)
    } else {
        agglomerate_naive(diss, linkage)
    }
}

fn nn_chain<T: Scalar>(diss: &DissimilarityMatrix<T>, linkage: Linkage) -> Result<Dendrogram<T>> {
    let mut w = Work::new(diss, linkage)?;
    let n = w.n;
    let mut active = vec![true; n];
    let mut chain: Vec<usize> = Vec::with_capacity(n);
    for _ in 0..n - 1 {
        if chain.is_empty() {
            chain.push(active.iter().position(|&a| a).expect("two active slots remain"));
        }
        loop {
            let a = chain[chain.len() - 1];
            let prev = chain.len().checked_sub(2).map(|k| chain[k]);
            let mut best = prev.map(|p| (p, w.get(a, p)));
            for x in (0..n).filter(|&x| active[x] && x != a) {
                let v = w.get(a, x);
                if best.is_none_or(|(_, b)| v < b) {
                    best = Some((x, v));
                }
            }
            let (b, _) = best.expect("another active slot exists");
            if Some(b) == prev {
                break;
            }
            chain.push(b);
        }
        let a = chain.pop().expect("chain holds a pair");
        let b = chain.pop().expect("chain holds a pair");
        let (lo, hi) = (a.min(b), a.max(b));
        let others: Vec<usize> = (0..n).filter(|&k| active[k]).collect();
        w.merge(lo, hi, others.into_iter());
        active[hi] = false;
    }
    assemble(diss.labels().to_vec(), w.raw, true, Orientation::LargerIdLeft)
}

/// Reference agglomeration by repeated search for the globally closest pair.
/// Cubic, but valid for every linkage including non-monotone ones.
pub fn agglomerate_naive<T: Scalar>(diss: &DissimilarityMatrix<T>, linkage: Linkage) -> Result<Dendrogram<T>> {
    let mut w = Work::new(diss, linkage)?;
    let mut active: Vec<usize> = (0..w.n).collect();
    while active.len() > 1 {
        let mut best: Option<(usize, usize, T)> = None;
        for (x, &i) in active.iter().enumerate() {
            for &j in &active[x + 1..] {
                let v = w.get(i, j);
                if best.is_none_or(|(_, _, b)| v < b) {
                    best = Some((i, j, v));
                }
            }
        }
        let (lo, hi, _) = best.expect("at least one pair");
        w.merge(lo, hi, active.clone().into_iter());
        active.retain(|&k| k != hi);
    }
    assemble(diss.labels().to_vec(), w.raw, false, Orientation::LargerIdLeft)
}

/// Agglomeration restricted to clusters that are adjacent in the input order,
/// so every cluster is a run of consecutive items. The left child is always
/// the earlier run.
pub fn agglomerate_contiguous<T: Scalar>(
    diss: &DissimilarityMatrix<T>,
    linkage: Linkage,
) -> Result<Dendrogram<T>> {
    let mut w = Work::new(diss, linkage)?;
    let mut active: Vec<usize> = (0..w.n).collect();
    while active.len() > 1 {
        let x = (0..active.len() - 1)
            .min_by(|&x, &y| {
                let vx = w.get(active[x], active[x + 1]);
                let vy = w.get(active[y], active[y + 1]);
                vx.partial_cmp(&vy).unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("at least one adjacent pair");
        let (lo, hi) = (active[x], active[x + 1]);
        w.merge(lo, hi, active.clone().into_iter());
        active.remove(x + 1);
    }
    assemble(diss.labels().to_vec(), w.raw, false, Orientation::AsGiven)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::NodeRef;

    fn line(points: &[f64]) -> DissimilarityMatrix<f64> {
        DissimilarityMatrix::from_upper(points.len(), |i, j| (points[i] - points[j]).abs())
    }

    #[test]
    fn parses_linkage_names() {
        for l in Linkage::ALL {
            assert_eq!(l.to_string().parse::<Linkage>().unwrap(), l);
        }
        assert_eq!("minvar".parse::<Linkage>().unwrap(), Linkage::Ward);
        assert!("average".parse::<Linkage>().is_err());
    }

    #[test]
    fn two_items() {
        let t = agglomerate(&line(&[0.0, 2.0]), Linkage::Single).unwrap();
        assert_eq!(t.merges()[0].height, 2.0);
        assert_eq!(t.merges()[0].left, NodeRef::Terminal(1));
        assert!(agglomerate(&line(&[0.0]), Linkage::Single).is_err());
    }

    #[test]
    fn single_and_complete_on_a_line() {
        let d = line(&[0.0, 1.0, 3.0, 7.0]);
        let s = agglomerate(&d, Linkage::Single).unwrap();
        let hs: Vec<f64> = s.merges().iter().map(|m| m.height).collect();
        assert_eq!(hs, vec![1.0, 2.0, 4.0]);
        let c = agglomerate(&d, Linkage::Complete).unwrap();
        let hc: Vec<f64> = c.merges().iter().map(|m| m.height).collect();
        assert_eq!(hc, vec![1.0, 3.0, 7.0]);
    }

    #[test]
    fn ward_height_is_centroid_criterion() {
        let d = line(&[0.0, 2.0, 5.0]);
        let t = agglomerate(&d, Linkage::Ward).unwrap();
        assert!((t.merges()[0].height - 2.0).abs() < 1e-12);
        // ((1+1)*25 + (1+1)*9 - 1*4) / 3 = 64/3
        assert!((t.merges()[1].height - (64.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ties_break_by_smallest_pair() {
        let d = line(&[0.0, 1.0, 2.0, 3.0]);
        for l in Linkage::ALL {
            let t = agglomerate(&d, l).unwrap();
            assert_eq!(t.terminals_under(NodeRef::Internal(1)), vec![1, 0], "{l}");
        }
    }

    #[test]
    fn contiguous_only_joins_neighbours() {
        // 0 and 3 are identical but not adjacent.
        let d = line(&[0.0, 5.0, 9.0, 0.0]);
        let t = agglomerate_contiguous(&d, Linkage::Complete).unwrap();
        assert_eq!(t.leaf_order(), vec![0, 1, 2, 3]);
        let free = agglomerate(&d, Linkage::Complete).unwrap();
        assert_eq!(free.merges()[0].height, 0.0);
    }
}
