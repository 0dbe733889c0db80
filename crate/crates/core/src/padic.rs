//! p-adic coding of ranked dendrograms.
//!
//! Terminal `i` gets the code `x_i = sum_j c_ij p^j` over merge levels
//! `j = 1..n-1`, with `c_ij = +1` when its path to the root enters merge `j`
//! from the left, `-1` from the right and `0` when the merge is off its path.
//! For `p >= 3` the integers are pairwise distinct and the tree can be rebuilt
//! from them.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{Dendrogram, Merge, NodeRef, Side};
use crate::scalar::Scalar;

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{p} is not prime")))
    }
}

fn check_coefficients(c: &[i8]) -> Result<()> {
    match c.iter().find(|v| !(-1..=1).contains(*v)) {
        Some(v) => Err(Error::MalformedEncoding(format!("coefficient {v} is not -1, 0 or +1"))),
        None => Ok(()),
    }
}

/// One terminal's coefficients, level 1 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicCode {
    p: u64,
    coefficients: Vec<i8>,
}

impl PadicCode {
    pub fn new(p: u64, coefficients: Vec<i8>) -> Result<Self> {
        check_prime(p)?;
        check_coefficients(&coefficients)?;
        Ok(PadicCode { p, coefficients })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coefficients(&self) -> &[i8] {
        &self.coefficients
    }

    pub fn levels(&self) -> usize {
        self.coefficients.len()
    }

    /// The all-zero code.
    pub fn is_null(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0)
    }

    /// Exact value `sum_j c_j p^j`.
    pub fn evaluate(&self) -> BigInt {
        evaluate_code(self)
    }
}

/// Exact value `sum_j c_j p^j` with levels starting at 1.
pub fn evaluate_code(code: &PadicCode) -> BigInt {
    let p = BigInt::from(code.p);
    code.coefficients
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, &c| (acc + BigInt::from(c)) * &p)
}

/// Rows of the coefficient matrix of a dendrogram, with labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicEncoding {
    p: u64,
    labels: Vec<String>,
    rows: Vec<Vec<i8>>,
}

impl PadicEncoding {
    /// Checks every structural invariant by rebuilding the tree.
    pub fn new(p: u64, labels: Vec<String>, rows: Vec<Vec<i8>>) -> Result<Self> {
        let enc = PadicEncoding { p, labels, rows };
        decode::<f64>(&enc)?;
        Ok(enc)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Row-major coefficient matrix, one row per terminal.
    pub fn rows(&self) -> &[Vec<i8>] {
        &self.rows
    }

    pub fn code(&self, terminal: usize) -> Option<PadicCode> {
        self.rows.get(terminal).map(|r| PadicCode {
            p: self.p,
            coefficients: r.clone(),
        })
    }

    pub fn codes(&self) -> Vec<PadicCode> {
        (0..self.n()).filter_map(|i| self.code(i)).collect()
    }

    pub fn decimal_codes(&self) -> Vec<BigInt> {
        self.codes().iter().map(evaluate_code).collect()
    }

    /// Reconstructs the merges, heights set to ranks.
    fn merges(&self) -> Result<Vec<Merge<f64>>> {
        if self.p < 3 || !is_prime(self.p) {
            return Err(Error::Domain(format!(
                "p = {} must be a prime of at least 3 for the coding to be unique",
                self.p
            )));
        }
        let n = self.rows.len();
        if n == 0 {
            return Err(Error::MalformedEncoding("no rows".into()));
        }
        if self.labels.len() != n {
            return Err(Error::Shape(format!("{} labels for {n} rows", self.labels.len())));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n - 1 {
                return Err(Error::Shape(format!("row {} has {} levels, expected {}", i + 1, row.len(), n - 1)));
            }
            check_coefficients(row)?;
            if n > 1 && row[n - 2] == 0 {
                return Err(Error::MalformedEncoding(format!("row {} never reaches the root", i + 1)));
            }
        }
        let mut cluster_rank: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut merges = Vec::with_capacity(n - 1);
        for level in 1..n {
            let side = |s: i8| -> Vec<usize> { (0..n).filter(|&i| self.rows[i][level - 1] == s).collect() };
            let (left, right) = (side(1), side(-1));
            if left.is_empty() || right.is_empty() {
                return Err(Error::MalformedEncoding(format!("level {level} lacks a {} branch", if left.is_empty() { "+1" } else { "-1" })));
            }
            let node = |members: &[usize]| -> Result<NodeRef> {
                if let [only] = members {
                    return Ok(NodeRef::Terminal(*only));
                }
                cluster_rank
                    .get(members)
                    .map(|&r| NodeRef::Internal(r))
                    .ok_or_else(|| Error::MalformedEncoding(format!("level {level}: branch {members:?} is not an earlier cluster")))
            };
            merges.push(Merge {
                rank: level,
                left: node(&left)?,
                right: node(&right)?,
                height: level as f64,
            });
            let mut all = left;
            all.extend(right);
            all.sort_unstable();
            cluster_rank.insert(all, level);
        }
        Ok(merges)
    }
}

/// Codes every terminal of `tree` in base `p`, following the stored
/// orientation.
pub fn encode_dendrogram<T: Scalar>(tree: &Dendrogram<T>, p: u64) -> Result<PadicEncoding> {
    if p < 3 || !is_prime(p) {
        return Err(Error::Domain(format!(
            "p = {p} must be a prime of at least 3 for the coding to be unique"
        )));
    }
    let n = tree.n();
    let mut rows = vec![vec![0i8; n - 1]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for (rank, side) in tree.path_to_root(i)? {
            row[rank - 1] = if side == Side::Left { 1 } else { -1 };
        }
    }
    Ok(PadicEncoding {
        p,
        labels: tree.labels().to_vec(),
        rows,
    })
}

/// The ranked tree behind an encoding; heights equal ranks.
pub fn decode<T: Scalar>(enc: &PadicEncoding) -> Result<Dendrogram<T>> {
    let merges = enc
        .merges()?
        .into_iter()
        .map(|m| Merge {
            rank: m.rank,
            left: m.left,
            right: m.right,
            height: T::of_usize(m.rank),
        })
        .collect();
    Dendrogram::new(enc.labels.clone(), merges).map_err(|e| Error::MalformedEncoding(e.to_string()))
}

fn check_compatible(a: &PadicCode, b: &PadicCode) -> Result<()> {
    if a.p != b.p || a.levels() != b.levels() {
        return Err(Error::Domain(format!(
            "codes differ in base or length: p={} with {} levels vs p={} with {} levels",
            a.p,
            a.levels(),
            b.p,
            b.levels()
        )));
    }
    Ok(())
}

/// Highest level at which two codes differ, 0 when equal. This is the rank
/// of the lowest merge joining the two terminals.
pub fn divergence_level(a: &PadicCode, b: &PadicCode) -> Result<usize> {
    check_compatible(a, b)?;
    Ok(a.coefficients
        .iter()
        .zip(&b.coefficients)
        .rposition(|(x, y)| x != y)
        .map_or(0, |k| k + 1))
}

/// `p^-r` where `r` is the divergence level; 1 for equal codes.
pub fn padic_similarity(a: &PadicCode, b: &PadicCode) -> Result<BigRational> {
    let r = divergence_level(a, b)?;
    let denom = Pow::pow(BigInt::from(a.p), r);
    Ok(BigRational::new(BigInt::one(), denom))
}

/// `1 - padic_similarity`, an ultrametric bounded by 1.
pub fn padic_distance(a: &PadicCode, b: &PadicCode) -> Result<BigRational> {
    Ok(BigRational::one() - padic_similarity(a, b)?)
}

/// Moves every coefficient one level towards the root, dropping level 1.
/// Repeating it `levels` times reaches the null code.
pub fn scale_operator(code: &PadicCode) -> PadicCode {
    let mut coefficients = code.coefficients.clone();
    if !coefficients.is_empty() {
        coefficients.remove(0);
        coefficients.push(0);
    }
    PadicCode { p: code.p, coefficients }
}

/// Groups of terminals sharing identical codes, each group in index order,
/// groups ordered by their first member.
pub fn clusters_from_codes(codes: &[PadicCode]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<&PadicCode, usize> = HashMap::new();
    for (i, c) in codes.iter().enumerate() {
        let g = *index.entry(c).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}

/// `2^-v` where `v` is the exponent of `p` in `x - y`; 0 when `x = y`.
pub fn valuation_distance(x: &BigInt, y: &BigInt, p: u64) -> Result<f64> {
    check_prime(p)?;
    let mut diff = x - y;
    if diff.is_zero() {
        return Ok(0.0);
    }
    let p = BigInt::from(p);
    let mut v = 0i32;
    loop {
        let (q, r) = diff.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        diff = q;
        v += 1;
    }
    Ok(2f64.powi(-v))
}

/// Serialized form: `{p, n, labels, C}` with `C` as nested rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PadicEncodingDoc {
    pub p: u64,
    pub n: usize,
    pub labels: Vec<String>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<i8>>,
}

impl From<&PadicEncoding> for PadicEncodingDoc {
    fn from(enc: &PadicEncoding) -> Self {
        PadicEncodingDoc {
            p: enc.p,
            n: enc.n(),
            labels: enc.labels.clone(),
            c: enc.rows.clone(),
        }
    }
}

impl TryFrom<PadicEncodingDoc> for PadicEncoding {
    type Error = Error;

    fn try_from(doc: PadicEncodingDoc) -> Result<Self> {
        if doc.n != doc.c.len() {
            return Err(Error::Shape(format!("n = {} but C has {} rows", doc.n, doc.c.len())));
        }
        PadicEncoding::new(doc.p, doc.labels, doc.c)
    }
}
