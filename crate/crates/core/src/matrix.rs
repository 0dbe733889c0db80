//! Symmetric dissimilarity matrices and their construction from data rows.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A square, symmetric, zero-diagonal matrix of non-negative dissimilarities.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix<T> {
    n: usize,
    values: Vec<T>,
    labels: Vec<String>,
}

fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

impl<T: Scalar> DissimilarityMatrix<T> {
    /// Builds a matrix from row-major values, checking every invariant.
    pub fn new(n: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::Shape(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                values.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let v = values[i * n + j];
                if !v.is_finite() {
                    return Err(Error::Domain(format!("entry ({i},{j}) is not finite")));
                }
                if v < T::zero() {
                    return Err(Error::Domain(format!("entry ({i},{j}) is negative")));
                }
                if i == j && v != T::zero() {
                    return Err(Error::Domain(format!("diagonal entry ({i},{i}) is nonzero")));
                }
                if j > i && v != values[j * n + i] {
                    return Err(Error::Domain(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(DissimilarityMatrix {
            n,
            values,
            labels: default_labels(n),
        })
    }

    /// Builds a matrix from rows of equal length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Shape(format!(
                "row {} has {} entries, expected {n}",
                bad + 1,
                rows[bad].len()
            )));
        }
        Self::new(n, rows.iter().flatten().copied().collect())
    }

    /// Fills the upper triangle from `f(i, j)` with `i < j` and mirrors it.
    /// Callers must return finite non-negative values.
    pub(crate) fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut values = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        DissimilarityMatrix {
            n,
            values,
            labels: default_labels(n),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Shape(format!(
                "{} labels for a matrix of size {}",
                labels.len(),
                self.n
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.values.chunks(self.n.max(1)).take(self.n)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    /// Returns the matrix with rows and columns reordered so that new index `i`
    /// holds old index `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.n)?;
        let mut out = Self::from_upper(self.n, |i, j| self.get(order[i], order[j]));
        out.labels = order.iter().map(|&k| self.labels[k].clone()).collect();
        Ok(out)
    }

    /// Largest absolute entry-wise difference to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> Option<T> {
        (self.n == other.n).then(|| {
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| (a - b).abs())
                .fold(T::zero(), T::max)
        })
    }
}

pub(crate) fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::Shape(format!("permutation of length {} for size {n}", order.len())));
    }
    let mut seen = vec![false; n];
    for &k in order {
        if k >= n || std::mem::replace(&mut seen[k], true) {
            return Err(Error::Domain(format!("{order:?} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

/// Distance used to turn data rows into dissimilarities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Euclidean,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Metric::Euclidean),
            other => Err(Error::Domain(format!("unknown metric {other:?}"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("euclidean")
    }
}

fn euclidean<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>().sqrt()
}

/// Pairwise dissimilarities between the rows of `data`.
pub fn pairwise_distances<T: Scalar>(data: &[Vec<T>], metric: Metric) -> Result<DissimilarityMatrix<T>> {
    let n = data.len();
    if n < 2 {
        return Err(Error::Degenerate(format!("need at least 2 rows, got {n}")));
    }
    let m = data[0].len();
    if m == 0 {
        return Err(Error::Shape("rows have no coordinates".into()));
    }
    for (i, row) in data.iter().enumerate() {
        if row.len() != m {
            return Err(Error::Shape(format!(
                "row {} has {} coordinates, expected {m}",
                i + 1,
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("missing or non-finite value at row {}, column {}", i + 1, j + 1)));
        }
    }
    Ok(match metric {
        Metric::Euclidean => DissimilarityMatrix::from_upper(n, |i, j| euclidean(&data[i], &data[j])),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric() {
        let err = DissimilarityMatrix::<f64>::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap_err();
        assert_eq!(err.code(), "E_DOMAIN");
    }

    #[test]
    fn rejects_ragged_and_nan_rows() {
        let ragged = pairwise_distances(&[vec![1.0, 2.0], vec![1.0]], Metric::Euclidean);
        assert_eq!(ragged.unwrap_err().code(), "E_SHAPE");
        let nan = pairwise_distances(&[vec![1.0], vec![f64::NAN]], Metric::Euclidean);
        assert_eq!(nan.unwrap_err().code(), "E_DOMAIN");
        let single = pairwise_distances(&[vec![1.0]], Metric::Euclidean);
        assert_eq!(single.unwrap_err().code(), "E_DEGENERATE");
    }

    #[test]
    fn euclidean_of_3_4_5() {
        let d = pairwise_distances(&[vec![0.0f32, 0.0], vec![3.0, 4.0]], Metric::Euclidean).unwrap();
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(1, 0), 5.0);
    }

    #[test]
    fn permuted_relabels() {
        let d = DissimilarityMatrix::from_rows(&[
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 3.0],
            vec![2.0, 3.0, 0.0],
        ])
        .unwrap();
        let p = d.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.get(0, 1), 2.0);
        assert_eq!(p.get(1, 2), 1.0);
        assert_eq!(p.labels(), ["3", "1", "2"]);
        assert!(d.permuted(&[0, 0, 1]).is_err());
    }
}
