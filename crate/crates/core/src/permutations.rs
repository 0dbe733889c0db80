//! Permutations read off data streams and off dendrograms.
//!
//! Streams give ordinal patterns (the order in which the values of each
//! window rise) and rank permutations. Dendrograms give the packed
//! representation: the in-order sequence of merge ranks of the canonically
//! drawn tree, with `n` appended. Up to the swap of children, ranked
//! dendrograms on `n` terminals are counted by the zigzag numbers, and
//! [`updown_code`] realizes that correspondence explicitly.

use std::fmt;

use crate::error::{Error, Result};
use crate::hierarchy::{Dendrogram, Merge, NodeRef};
use crate::scalar::Scalar;

/// Terminal-count limit for [`enumerate_nlr`].
pub const MAX_NLR_TERMINALS: usize = 10;

/// How equal values are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieRule {
    /// The earlier of two equal values counts as smaller.
    #[default]
    EarlierLower,
    /// The later of two equal values counts as smaller.
    LaterLower,
}

/// Positions of a window listed by increasing value, so `(9, 10, 6)` gives `201`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrdinalPattern {
    symbols: Vec<usize>,
}

impl OrdinalPattern {
    pub fn new(symbols: Vec<usize>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Domain("empty pattern".into()));
        }
        let mut seen = vec![false; symbols.len()];
        for &s in &symbols {
            if s >= symbols.len() || std::mem::replace(&mut seen[s], true) {
                return Err(Error::Domain(format!("{symbols:?} is not a permutation of 0..{}", symbols.len())));
            }
        }
        Ok(OrdinalPattern { symbols })
    }

    /// Pattern order `d`; the window holds `d + 1` values.
    pub fn order(&self) -> usize {
        self.symbols.len() - 1
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    /// The inverse view: entry `k` is the rank of the `k`-th value.
    pub fn ranks(&self) -> Vec<usize> {
        let mut r = vec![0; self.symbols.len()];
        for (rank, &pos) in self.symbols.iter().enumerate() {
            r[pos] = rank;
        }
        r
    }
}

fn digits(values: &[usize]) -> String {
    if values.iter().all(|&v| v < 10) {
        values.iter().map(usize::to_string).collect()
    } else {
        values.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for OrdinalPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&digits(&self.symbols))
    }
}

fn check_values<T: Scalar>(values: &[T]) -> Result<()> {
    match values.iter().position(|v| v.is_nan()) {
        Some(k) => Err(Error::Domain(format!("value {} is not a number", k + 1))),
        None => Ok(()),
    }
}

/// Positions of `window` sorted by increasing value.
pub fn ordinal_pattern<T: Scalar>(window: &[T], tie: TieRule) -> Result<OrdinalPattern> {
    if window.is_empty() {
        return Err(Error::Domain("empty window".into()));
    }
    check_values(window)?;
    let mut symbols: Vec<usize> = (0..window.len()).collect();
    symbols.sort_by(|&a, &b| {
        window[a].partial_cmp(&window[b]).expect("no NaN").then(match tie {
            TieRule::EarlierLower => a.cmp(&b),
            TieRule::LaterLower => b.cmp(&a),
        })
    });
    Ok(OrdinalPattern { symbols })
}

/// Patterns of all delay-embedded windows, in temporal order, with the
/// distinct patterns and their counts in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalSequence {
    pub patterns: Vec<OrdinalPattern>,
    pub classes: Vec<(OrdinalPattern, usize)>,
}

/// Windows `(x[t - d*delay], ..., x[t - delay], x[t])` for every valid `t`.
pub fn ordinal_sequence<T: Scalar>(stream: &[T], order: usize, delay: usize, tie: TieRule) -> Result<OrdinalSequence> {
    if order == 0 || delay == 0 {
        return Err(Error::Domain("order and delay must be at least 1".into()));
    }
    let span = order * delay;
    if stream.len() < span + 1 {
        return Err(Error::Domain(format!(
            "stream of length {} is too short: order {order} with delay {delay} needs at least {}",
            stream.len(),
            span + 1
        )));
    }
    let patterns = (span..stream.len())
        .map(|t| {
            let window: Vec<T> = (0..=order).map(|k| stream[t - span + k * delay]).collect();
            ordinal_pattern(&window, tie)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut classes: Vec<(OrdinalPattern, usize)> = Vec::new();
    for p in &patterns {
        match classes.iter_mut().find(|(q, _)| q == p) {
            Some((_, c)) => *c += 1,
            None => classes.push((p.clone(), 1)),
        }
    }
    Ok(OrdinalSequence { patterns, classes })
}

/// Sampled positions ordered by decreasing value. Position label `j` stands
/// for the value `j * delay` steps before the last one, so 0 is the latest.
/// Equal values list the later observation first.
pub fn rank_permutation<T: Scalar>(stream: &[T], delay: usize) -> Result<Vec<usize>> {
    if stream.is_empty() {
        return Err(Error::Domain("empty stream".into()));
    }
    if delay == 0 {
        return Err(Error::Domain("delay must be at least 1".into()));
    }
    check_values(stream)?;
    let m = stream.len();
    let mut labels: Vec<usize> = (0..=(m - 1) / delay).collect();
    let value = |j: usize| stream[m - 1 - j * delay];
    labels.sort_by(|&a, &b| value(b).partial_cmp(&value(a)).expect("no NaN").then(a.cmp(&b)));
    Ok(labels)
}

/// `(1345260)`, or comma separated when some entry has several digits.
pub fn format_permutation(values: &[usize]) -> String {
    format!("({})", digits(values))
}

/// Reads `(13625748)`, `13625748` or `(1,3,10,...)`.
pub fn parse_permutation(text: &str) -> Result<Vec<usize>> {
    let t = text.trim();
    let inner = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(t);
    let bad = || Error::parse(text, "expected a permutation like (1342)");
    if inner.is_empty() {
        return Err(bad());
    }
    if inner.contains(',') {
        inner.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
    } else {
        inner
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
            .collect()
    }
}

/// Permutation of `1..=n` ending in `n`: merge ranks between neighbouring
/// terminals of a canonically drawn dendrogram.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PackedPermutation {
    values: Vec<usize>,
}

impl PackedPermutation {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::Domain("empty permutation".into()));
        }
        let mut seen = vec![false; n + 1];
        for &v in &values {
            if v == 0 || v > n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::Domain(format!("{} is not a permutation of 1..{n}", format_permutation(&values))));
            }
        }
        if values[n - 1] != n {
            return Err(Error::Domain(format!(
                "{} must end with {n}, the rightmost terminal",
                format_permutation(&values)
            )));
        }
        Ok(PackedPermutation { values })
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }
}

impl fmt::Display for PackedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_permutation(&self.values))
    }
}

/// In-order merge ranks of the canonical drawing, then `n`.
pub fn packed_representation<T: Scalar>(tree: &Dendrogram<T>) -> PackedPermutation {
    let canon = tree.canonicalize();
    let mut values = Vec::with_capacity(tree.n());
    // In-order walk; an internal node emits its rank on the second visit.
    let mut stack: Vec<(NodeRef, bool)> = vec![(canon.root(), false)];
    while let Some((node, visited)) = stack.pop() {
        match (node, visited) {
            (NodeRef::Terminal(_), _) => {}
            (NodeRef::Internal(r), true) => values.push(r),
            (NodeRef::Internal(r), false) => {
                let m = &canon.merges()[r - 1];
                stack.push((m.right, false));
                stack.push((node, true));
                stack.push((m.left, false));
            }
        }
    }
    values.push(tree.n());
    PackedPermutation { values }
}

/// The canonical ranked tree with the given packed representation.
/// Terminals are labelled `1..n` in drawing order and heights equal ranks.
pub fn unpack<T: Scalar>(perm: &PackedPermutation) -> Result<Dendrogram<T>> {
    let n = perm.n();
    let gaps = &perm.values[..n - 1];
    let mut left: Vec<Option<usize>> = vec![None; gaps.len()];
    let mut right: Vec<Option<usize>> = vec![None; gaps.len()];
    let mut stack: Vec<usize> = Vec::new();
    for i in 0..gaps.len() {
        let mut last = None;
        while let Some(&top) = stack.last() {
            if gaps[top] < gaps[i] {
                last = stack.pop();
            } else {
                break;
            }
        }
        left[i] = last;
        if let Some(&top) = stack.last() {
            right[top] = Some(i);
        }
        stack.push(i);
    }
    let merges = (0..gaps.len())
        .map(|i| Merge {
            rank: gaps[i],
            left: left[i].map_or(NodeRef::Terminal(i), |c| NodeRef::Internal(gaps[c])),
            right: right[i].map_or(NodeRef::Terminal(i + 1), |c| NodeRef::Internal(gaps[c])),
            height: T::of_usize(gaps[i]),
        })
        .collect();
    let tree = Dendrogram::new((1..=n).map(|i| i.to_string()).collect(), merges)?;
    let repacked = packed_representation(&tree);
    if let Some(k) = (0..n).find(|&k| repacked.values[k] != perm.values[k]) {
        return Err(Error::Domain(format!(
            "{perm} is not a packed representation: prefix {} is inconsistent with a canonical drawing",
            format_permutation(&perm.values[..=k])
        )));
    }
    Ok(tree.canonicalize().with_terminals_in_leaf_order())
}

/// Strictly alternating, starting with a rise. Vacuously true below length 2.
pub fn is_up_down(perm: &[usize]) -> bool {
    perm.windows(2).enumerate().all(|(k, w)| (w[0] < w[1]) == (k % 2 == 0) && w[0] != w[1])
}

/// Strictly alternating, starting with a fall. Vacuously true below length 2.
pub fn is_down_up(perm: &[usize]) -> bool {
    perm.windows(2).enumerate().all(|(k, w)| (w[0] > w[1]) == (k % 2 == 0) && w[0] != w[1])
}

fn internal_count<T: Scalar>(tree: &Dendrogram<T>, node: NodeRef) -> usize {
    match tree.children(node) {
        None => 0,
        Some((l, r)) => 1 + internal_count(tree, l) + internal_count(tree, r),
    }
}

/// Alternating word of the subtree's merge ranks ending in a fall,
/// independent of child orientation.
fn alternating_word<T: Scalar>(tree: &Dendrogram<T>, node: NodeRef) -> Vec<usize> {
    let Some((l, r)) = tree.children(node) else {
        return Vec::new();
    };
    let NodeRef::Internal(rank) = node else { unreachable!() };
    let k = internal_count(tree, node);
    if k == 1 {
        return vec![rank];
    }
    let mut w = alternating_word(tree, l);
    w.push(rank);
    w.extend(alternating_word(tree, r).into_iter().rev());
    let rw: Vec<usize> = w.iter().rev().copied().collect();
    if k % 2 == 0 {
        return if w[k - 2] > w[k - 1] { w } else { rw };
    }
    let up_down = is_up_down(&w);
    let least = w.min(rw);
    if up_down {
        least
    } else {
        // Order-reversing relabel within the subtree's rank set.
        let mut sorted = least.clone();
        sorted.sort_unstable();
        least
            .iter()
            .map(|v| sorted[k - 1 - sorted.binary_search(v).expect("own value")])
            .collect()
    }
}

/// Up-down permutation of the merge ranks `1..n-1` attached to a ranked
/// tree. Two trees get the same code exactly when one is obtained from the
/// other by swapping children, and every up-down permutation arises.
pub fn updown_code<T: Scalar>(tree: &Dendrogram<T>) -> Vec<usize> {
    let mut w = alternating_word(tree, tree.root());
    if w.len() % 2 == 0 {
        w.reverse();
    }
    w
}

#[derive(Clone)]
enum Shape {
    Leaf,
    Node(usize, Box<Shape>, Box<Shape>),
}

/// All unordered decreasing trees on the ascending rank set `ranks`.
fn shapes(ranks: &[usize]) -> Vec<Shape> {
    let (&top, rest) = ranks.split_last().expect("non-empty rank set");
    if rest.is_empty() {
        return vec![Shape::Node(top, Box::new(Shape::Leaf), Box::new(Shape::Leaf))];
    }
    let mut out: Vec<Shape> = shapes(rest)
        .into_iter()
        .map(|t| Shape::Node(top, Box::new(t), Box::new(Shape::Leaf)))
        .collect();
    let (&least, others) = rest.split_first().expect("non-empty");
    for mask in 0..(1u32 << others.len()) - 1 {
        let mut a = vec![least];
        let mut b = Vec::new();
        for (k, &x) in others.iter().enumerate() {
            if mask >> k & 1 == 1 {
                a.push(x);
            } else {
                b.push(x);
            }
        }
        let tb = shapes(&b);
        for ta in shapes(&a) {
            for t in &tb {
                out.push(Shape::Node(top, Box::new(ta.clone()), Box::new(t.clone())));
            }
        }
    }
    out
}

fn shape_to_tree<T: Scalar>(shape: &Shape, n: usize) -> Result<Dendrogram<T>> {
    let mut merges = Vec::with_capacity(n - 1);
    let mut next_terminal = 0;
    fn walk<T: Scalar>(s: &Shape, merges: &mut Vec<Merge<T>>, next: &mut usize) -> NodeRef {
        match s {
            Shape::Leaf => {
                *next += 1;
                NodeRef::Terminal(*next - 1)
            }
            Shape::Node(r, a, b) => {
                let left = walk(a, merges, next);
                let right = walk(b, merges, next);
                merges.push(Merge { rank: *r, left, right, height: T::of_usize(*r) });
                NodeRef::Internal(*r)
            }
        }
    }
    walk(shape, &mut merges, &mut next_terminal);
    let tree = Dendrogram::new((1..=n).map(|i| i.to_string()).collect(), merges)?;
    Ok(tree.canonicalize().with_terminals_in_leaf_order())
}

/// Every ranked binary topology on `n` terminals up to child swaps, in
/// canonical form with terminals `1..n` in drawing order.
pub fn enumerate_nlr<T: Scalar>(n: usize) -> Result<Vec<Dendrogram<T>>> {
    if n == 0 {
        return Err(Error::Domain("need at least one terminal".into()));
    }
    if n > MAX_NLR_TERMINALS {
        return Err(Error::ResourceGuard(format!(
            "enumerating ranked topologies is limited to {MAX_NLR_TERMINALS} terminals, got {n}"
        )));
    }
    if n == 1 {
        return Ok(vec![Dendrogram::new(vec!["1".into()], Vec::new())?]);
    }
    let ranks: Vec<usize> = (1..n).collect();
    shapes(&ranks).iter().map(|s| shape_to_tree(s, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const STREAM: [f64; 7] = [4.0, 7.0, 9.0, 10.0, 6.0, 11.0, 3.0];

    fn pattern(w: &[f64]) -> String {
        ordinal_pattern(w, TieRule::default()).unwrap().to_string()
    }

    #[test]
    fn pattern_examples() {
        assert_eq!(pattern(&[4.0, 7.0, 9.0]), "012");
        assert_eq!(pattern(&[9.0, 10.0, 6.0]), "201");
        assert_eq!(pattern(&[10.0, 6.0, 11.0]), "102");
        assert_eq!(pattern(&[3.0, 2.0, 1.0]), "210");
        assert_eq!(pattern(&[5.0, 5.0, 1.0]), "201");
        let p = ordinal_pattern(&[5.0, 5.0, 1.0], TieRule::default()).unwrap();
        assert_eq!(p.ranks(), vec![1, 2, 0]);
        let later = ordinal_pattern(&[5.0, 5.0, 1.0], TieRule::LaterLower).unwrap();
        assert_eq!(later.to_string(), "210");
        assert!(ordinal_pattern::<f64>(&[], TieRule::default()).is_err());
        assert!(ordinal_pattern(&[1.0, f64::NAN], TieRule::default()).is_err());
    }

    #[test]
    fn sequence_of_the_seven_values() {
        let seq = ordinal_sequence(&STREAM, 2, 1, TieRule::default()).unwrap();
        let text: Vec<String> = seq.patterns.iter().map(ToString::to_string).collect();
        assert_eq!(text, ["012", "012", "201", "102", "201"]);
        let classes: Vec<(String, usize)> = seq.classes.iter().map(|(p, c)| (p.to_string(), *c)).collect();
        assert_eq!(classes, [("012".to_string(), 2), ("201".to_string(), 2), ("102".to_string(), 1)]);
        let err = ordinal_sequence(&STREAM[..2], 2, 1, TieRule::default()).unwrap_err();
        assert!(err.to_string().contains("at least 3"), "{err}");
    }

    #[test]
    fn sequence_edge_cases() {
        let flat = ordinal_sequence(&[2.0; 5], 2, 1, TieRule::default()).unwrap();
        assert_eq!(flat.classes.len(), 1);
        assert_eq!(flat.classes[0].0.to_string(), "012");
        let moves = ordinal_sequence(&STREAM, 1, 2, TieRule::default()).unwrap();
        assert_eq!(moves.patterns.len(), STREAM.len() - 2);
    }

    #[test]
    fn rank_permutation_examples() {
        assert_eq!(format_permutation(&rank_permutation(&STREAM, 1).unwrap()), "(1345260)");
        assert_eq!(rank_permutation(&[1.0, 2.0, 3.0, 4.0], 1).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(rank_permutation(&[5.0], 1).unwrap(), vec![0]);
        assert_eq!(rank_permutation(&STREAM, 2).unwrap(), vec![2, 1, 3, 0]);
    }

    #[test]
    fn permutation_text() {
        assert_eq!(parse_permutation("(13625748)").unwrap(), vec![1, 3, 6, 2, 5, 7, 4, 8]);
        assert_eq!(parse_permutation("(1,10,2)").unwrap(), vec![1, 10, 2]);
        assert_eq!(format_permutation(&[1, 10, 2]), "(1,10,2)");
        assert!(parse_permutation("(1a)").is_err());
        assert!(parse_permutation("()").is_err());
    }

    #[test]
    fn packed_needs_n_last() {
        assert!(PackedPermutation::new(vec![2, 1]).is_err());
        assert!(PackedPermutation::new(vec![1, 1]).is_err());
        assert!(PackedPermutation::new(vec![1, 2]).is_ok());
    }

    #[test]
    fn two_leaves() {
        let t: Dendrogram<f64> = unpack(&PackedPermutation::new(vec![1, 2]).unwrap()).unwrap();
        assert_eq!(t.n(), 2);
        assert_eq!(packed_representation(&t).to_string(), "(12)");
    }

    #[test]
    fn unrealizable_is_reported_with_prefix() {
        // Rank 1 sits between rank 2 and 3 on its right: its subtree would
        // need the later merge on the left.
        let perm = PackedPermutation::new(vec![2, 1, 3]).unwrap();
        let err = unpack::<f64>(&perm).unwrap_err();
        assert!(err.to_string().contains("prefix (2"), "{err}");
    }

    #[test]
    fn alternation() {
        assert!(is_up_down(&[1, 3, 2]));
        assert!(is_down_up(&[2, 1, 3]));
        assert!(!is_up_down(&[1, 2, 3]) && !is_down_up(&[1, 2, 3]));
        assert!(is_up_down(&[]) && is_down_up(&[1]));
    }

    #[test]
    fn small_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| enumerate_nlr::<f64>(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 5, 16]);
        assert_eq!(enumerate_nlr::<f64>(11).unwrap_err().code(), "E_RESOURCE");
    }
}
