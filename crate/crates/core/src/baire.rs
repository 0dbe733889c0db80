//! Longest-common-prefix (Baire) distance and prefix-tree clustering.
//!
//! Two digit strings agreeing on their first `r` digits are at distance
//! `base^-r`; identical strings are at distance 0. The hierarchy of all
//! strings is read off a trie in one pass over the digits, without forming
//! pairwise distances.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, One, Pow, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hierarchy::{assemble, Dendrogram, Orientation, Part, RawMerge};
use crate::scalar::Scalar;

/// A finite digit string in a fixed base, optionally labelled.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaireString {
    base: u32,
    digits: Vec<u32>,
    label: Option<String>,
}

fn check_base(base: u32) -> Result<()> {
    if base < 2 {
        return Err(Error::Domain(format!("base must be at least 2, got {base}")));
    }
    Ok(())
}

impl BaireString {
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self> {
        check_base(base)?;
        if digits.is_empty() {
            return Err(Error::Domain("digit string is empty".into()));
        }
        if let Some(pos) = digits.iter().position(|&d| d >= base) {
            return Err(Error::Domain(format!(
                "digit {} at position {} is not below base {base}",
                digits[pos],
                pos + 1
            )));
        }
        Ok(BaireString { base, digits, label: None })
    }

    /// Parses one character per digit (`0-9`, then letters, for bases up to 36).
    pub fn parse(base: u32, text: &str) -> Result<Self> {
        check_base(base)?;
        if base > 36 {
            return Err(Error::Domain(format!("text digits only cover bases up to 36, got {base}")));
        }
        let digits = text
            .chars()
            .enumerate()
            .map(|(pos, c)| {
                c.to_digit(base)
                    .ok_or_else(|| Error::parse(format!("position {}", pos + 1), format!("{c:?} is not a base-{base} digit")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, digits)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }
}

impl fmt::Display for BaireString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.base <= 36 {
            for &d in &self.digits {
                write!(f, "{}", char::from_digit(d, self.base).expect("digit below base"))?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.digits.iter().map(u32::to_string).collect();
            f.write_str(&parts.join("."))
        }
    }
}

fn check_same_base(s: &BaireString, t: &BaireString) -> Result<()> {
    if s.base != t.base {
        return Err(Error::Domain(format!("bases differ: {} vs {}", s.base, t.base)));
    }
    Ok(())
}

/// Length of the longest common prefix.
pub fn lcp_radius(s: &BaireString, t: &BaireString) -> Result<usize> {
    check_same_base(s, t)?;
    Ok(s.digits.iter().zip(&t.digits).take_while(|(a, b)| a == b).count())
}

/// Height of a trie node at `depth`; shared by the distance and the
/// clustering so that the two agree bit for bit.
fn level_height(base: u32, depth: usize) -> f64 {
    f64::from(base).powi(-(depth.min(i32::MAX as usize) as i32))
}

/// `base^-r` for longest common prefix `r`; 0 for identical strings.
pub fn baire_distance(s: &BaireString, t: &BaireString) -> Result<f64> {
    let r = lcp_radius(s, t)?;
    Ok(if s.digits == t.digits { 0.0 } else { level_height(s.base, r) })
}

/// [`baire_distance`] as an exact rational.
pub fn baire_distance_exact(s: &BaireString, t: &BaireString) -> Result<BigRational> {
    let r = lcp_radius(s, t)?;
    Ok(if s.digits == t.digits {
        BigRational::zero()
    } else {
        BigRational::new(BigInt::one(), Pow::pow(BigInt::from(s.base), r))
    })
}

/// Values with an exact rational form.
pub trait ExactReal {
    /// `None` for non-finite values.
    fn to_exact(&self) -> Option<BigRational>;
}

impl ExactReal for f64 {
    fn to_exact(&self) -> Option<BigRational> {
        BigRational::from_f64(*self)
    }
}

impl ExactReal for f32 {
    fn to_exact(&self) -> Option<BigRational> {
        BigRational::from_f32(*self)
    }
}

impl ExactReal for Ratio<i64> {
    fn to_exact(&self) -> Option<BigRational> {
        Some(BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom())))
    }
}

impl ExactReal for BigRational {
    fn to_exact(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

/// First `precision` fractional digits of each value, truncated. Values
/// must lie in `[0, 1)`. Floats are expanded exactly, so `1.0f64 / 3.0` in
/// base 3 starts `0222`, while the rational `1/3` gives `1000`.
pub fn digitize_reals<V: ExactReal>(values: &[V], precision: usize, base: u32) -> Result<Vec<BaireString>> {
    check_base(base)?;
    if precision == 0 {
        return Err(Error::Domain("precision must be at least 1".into()));
    }
    let b = BigInt::from(base);
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut x = v
                .to_exact()
                .ok_or_else(|| Error::Domain(format!("value {} is not finite", i + 1)))?;
            if x < BigRational::zero() || x >= BigRational::one() {
                return Err(Error::Domain(format!(
                    "value {} is outside [0, 1); normalize the data first",
                    i + 1
                )));
            }
            let mut digits = Vec::with_capacity(precision);
            for _ in 0..precision {
                x *= BigRational::from_integer(b.clone());
                let d = x.to_integer();
                digits.push(d.to_u32().expect("digit below base"));
                x -= BigRational::from_integer(d);
            }
            BaireString::new(base, digits)
        })
        .collect()
}

/// Parses decimal text such as `0.241` or `1e-3` into an exact rational.
pub fn parse_decimal(text: &str) -> Result<BigRational> {
    let bad = || Error::parse(text, "not a decimal number");
    let t = text.trim();
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(k) => (&t[..k], t[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigUint = format!("{int}{frac}0").parse().map_err(|_| bad())?;
    let scale = exponent - frac.len() as i32 - 1;
    let ten = BigInt::from(10);
    let mut x = BigRational::from_integer(BigInt::from(digits));
    x = if scale >= 0 {
        x * BigRational::from_integer(Pow::pow(&ten, scale as u32))
    } else {
        x / BigRational::from_integer(Pow::pow(&ten, scale.unsigned_abs()))
    };
    Ok(if neg { -x } else { x })
}

/// Nucleotide-to-digit schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DnaScheme {
    /// A, C, G, T/U to 1, 2, 3, 4 in base 5; 0 stays free as a gap symbol.
    FiveAdic,
    /// A, C, G, T/U to 0, 1, 2, 3 in base 4.
    FourAdic,
    /// A, C, G, T/U to the bit pairs 00, 01, 10, 11.
    TwoAdicPairs,
}

impl FromStr for DnaScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "5-adic" | "5" => Ok(DnaScheme::FiveAdic),
            "4-adic" | "4" => Ok(DnaScheme::FourAdic),
            "2-adic-pairs" | "2-adic" | "2" => Ok(DnaScheme::TwoAdicPairs),
            other => Err(Error::Domain(format!("unknown DNA scheme {other:?}"))),
        }
    }
}

pub fn encode_dna(sequence: &str, scheme: DnaScheme) -> Result<BaireString> {
    let mut digits = Vec::with_capacity(sequence.len() * 2);
    for (pos, c) in sequence.chars().enumerate() {
        let k = match c.to_ascii_uppercase() {
            'A' => 0,
            'C' => 1,
            'G' => 2,
            'T' | 'U' => 3,
            _ => {
                return Err(Error::parse(
                    format!("position {}", pos + 1),
                    format!("{c:?} is not a nucleotide"),
                ))
            }
        };
        match scheme {
            DnaScheme::FiveAdic => digits.push(k + 1),
            DnaScheme::FourAdic => digits.push(k),
            DnaScheme::TwoAdicPairs => digits.extend([k >> 1, k & 1]),
        }
    }
    let base = match scheme {
        DnaScheme::FiveAdic => 5,
        DnaScheme::FourAdic => 4,
        DnaScheme::TwoAdicPairs => 2,
    };
    BaireString::new(base, digits)
}

#[derive(Debug, Clone, Default)]
struct TrieNode {
    children: BTreeMap<u32, usize>,
    /// Strings ending exactly here.
    ending: Vec<usize>,
    count: usize,
}

/// Trie of digit prefixes over a set of strings.
#[derive(Debug, Clone)]
pub struct PrefixHierarchy {
    base: u32,
    depth: usize,
    nodes: Vec<TrieNode>,
    strings: Vec<BaireString>,
}

impl PrefixHierarchy {
    pub fn build(strings: &[BaireString]) -> Result<Self> {
        let first = strings
            .first()
            .ok_or_else(|| Error::Degenerate("no strings to cluster".into()))?;
        let base = first.base;
        let mut nodes = vec![TrieNode::default()];
        for (i, s) in strings.iter().enumerate() {
            check_same_base(first, s)?;
            let mut v = 0;
            nodes[0].count += 1;
            for &d in &s.digits {
                v = match nodes[v].children.get(&d) {
                    Some(&c) => c,
                    None => {
                        nodes.push(TrieNode::default());
                        let c = nodes.len() - 1;
                        nodes[v].children.insert(d, c);
                        c
                    }
                };
                nodes[v].count += 1;
            }
            nodes[v].ending.push(i);
        }
        Ok(PrefixHierarchy {
            base,
            depth: strings.iter().map(BaireString::len).max().unwrap_or(0),
            nodes,
            strings: strings.to_vec(),
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Longest ingested string.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Trie nodes including the root.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn member_count(&self) -> usize {
        self.nodes[0].count
    }

    /// Whether `prefix` is a path in the trie.
    pub fn contains_prefix(&self, prefix: &[u32]) -> bool {
        let mut v = 0;
        prefix.iter().all(|d| match self.nodes[v].children.get(d) {
            Some(&c) => {
                v = c;
                true
            }
            None => false,
        })
    }

    fn label(&self, i: usize) -> String {
        self.strings[i].label.clone().unwrap_or_else(|| (i + 1).to_string())
    }

    /// Binary dendrogram whose cophenetic matrix equals the pairwise Baire
    /// distances. Wide trie nodes are split left to right in digit order,
    /// all at the node's height; duplicate strings join at height 0.
    pub fn to_dendrogram<T: Scalar>(&self) -> Result<Dendrogram<T>> {
        let labels = (0..self.strings.len()).map(|i| self.label(i)).collect();
        let mut raw: Vec<RawMerge<T>> = Vec::with_capacity(self.strings.len().saturating_sub(1));
        let chain = |parts: Vec<Part>, height: T, raw: &mut Vec<RawMerge<T>>| -> Option<Part> {
            parts.into_iter().reduce(|acc, p| {
                raw.push(RawMerge { a: acc, b: p, height });
                Part::Step(raw.len() - 1)
            })
        };
        // Post-order walk with an explicit stack: (node, depth, expanded).
        let mut result: Vec<Option<Part>> = vec![None; self.nodes.len()];
        let mut stack = vec![(0usize, 0usize, false)];
        while let Some((v, depth, expanded)) = stack.pop() {
            let node = &self.nodes[v];
            if !expanded {
                stack.push((v, depth, true));
                stack.extend(node.children.values().rev().map(|&c| (c, depth + 1, false)));
                continue;
            }
            let mut groups = Vec::new();
            let dups = node.ending.iter().map(|&i| Part::Leaf(i)).collect();
            groups.extend(chain(dups, T::zero(), &mut raw));
            groups.extend(node.children.values().filter_map(|&c| result[c]));
            result[v] = chain(groups, T::of(level_height(self.base, depth)), &mut raw);
        }
        assemble(labels, raw, true, Orientation::AsGiven)
    }

    /// Indented listing of prefixes with member counts and the strings ending at each.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![(0usize, String::new(), 0usize)];
        while let Some((v, prefix, depth)) = stack.pop() {
            let node = &self.nodes[v];
            let name = if depth == 0 { "*".to_string() } else { prefix.clone() };
            out.push_str(&format!("{}{} ({})", "  ".repeat(depth), name, node.count));
            if !node.ending.is_empty() {
                let labels: Vec<String> = node.ending.iter().map(|&i| self.label(i)).collect();
                out.push_str(&format!(": {}", labels.join(" ")));
            }
            out.push('\n');
            for (&d, &c) in node.children.iter().rev() {
                let digit = match char::from_digit(d, self.base.min(36)) {
                    Some(ch) if self.base <= 36 => ch.to_string(),
                    _ => format!("[{d}]"),
                };
                stack.push((c, format!("{prefix}{digit}"), depth + 1));
            }
        }
        out
    }
}

/// Builds the prefix trie and its binary dendrogram.
pub fn baire_cluster<T: Scalar>(strings: &[BaireString]) -> Result<(PrefixHierarchy, Dendrogram<T>)> {
    let h = PrefixHierarchy::build(strings)?;
    let tree = h.to_dendrogram()?;
    Ok((h, tree))
}
