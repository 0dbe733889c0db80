//! Text formats: CSV tables and matrices, dendrogram JSON and Newick, and
//! the wavelet coefficient table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::HaarTransform;
use crate::hierarchy::{Dendrogram, Merge, NodeRef};
use crate::lattice::BooleanTable;
use crate::matrix::DissimilarityMatrix;
use crate::scalar::Scalar;
use crate::ultrametric::Violation;

/// Significant digits used unless full precision is requested.
pub const SIGNIFICANT_DIGITS: usize = 7;

/// Number formatting policy for text output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Seven significant digits.
    #[default]
    Short,
    /// Shortest representation that reads back to the same value.
    Full,
}

pub fn format_number(x: f64, precision: Precision) -> String {
    if precision == Precision::Full || x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..16).contains(&exponent) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.prec$e}", prec = SIGNIFICANT_DIGITS - 1)
    }
}

/// Rows of numbers with optional row labels and column names.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericTable<T> {
    pub columns: Option<Vec<String>>,
    pub labels: Vec<String>,
    pub rows: Vec<Vec<T>>,
}

fn records(text: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(format!("line {line}"), e.to_string())
        })?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let line = rec.position().map_or(0, |p| p.line() as usize);
        out.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

fn is_number(s: &str) -> bool {
    s.parse::<f64>().is_ok()
}

/// Reads a numeric CSV. A first row containing non-numbers is a header; a
/// first column containing non-numbers holds row labels (or always, with
/// `labels_first`). Rows are labelled `1..n` when no labels are given.
pub fn read_numeric_table<T: Scalar>(text: &str, labels_first: bool) -> Result<NumericTable<T>> {
    let mut recs = records(text)?;
    if recs.is_empty() {
        return Err(Error::Degenerate("no rows".into()));
    }
    let header_row = recs[0].1.iter().skip(usize::from(labels_first)).any(|f| !is_number(f));
    let header = header_row.then(|| recs.remove(0).1);
    // An empty top-left header cell marks a row-name column, even if numeric.
    let has_labels = labels_first
        || header.as_ref().is_some_and(|h| h.first().is_some_and(|f| f.is_empty()))
        || recs.iter().any(|(_, r)| r.first().is_some_and(|f| !is_number(f)));
    let skip = usize::from(has_labels);
    let mut labels = Vec::with_capacity(recs.len());
    let mut rows = Vec::with_capacity(recs.len());
    for (k, (line, rec)) in recs.iter().enumerate() {
        labels.push(if has_labels { rec[0].clone() } else { (k + 1).to_string() });
        let row = rec
            .iter()
            .enumerate()
            .skip(skip)
            .map(|(col, f)| {
                f.parse::<f64>()
                    .map(T::of)
                    .map_err(|_| Error::parse(format!("line {line}, column {}", col + 1), format!("{f:?} is not a number")))
            })
            .collect::<Result<Vec<T>>>()?;
        rows.push(row);
    }
    let columns = header.map(|h| h.into_iter().skip(skip).collect());
    Ok(NumericTable { columns, labels, rows })
}

/// Reads a square dissimilarity matrix, labels taken from the row labels or
/// else from the header.
pub fn read_matrix<T: Scalar>(text: &str) -> Result<DissimilarityMatrix<T>> {
    let table: NumericTable<T> = read_numeric_table(text, false)?;
    let m = DissimilarityMatrix::from_rows(&table.rows)?;
    let labels = match table.columns {
        Some(c) if table.labels.iter().enumerate().all(|(k, l)| *l == (k + 1).to_string()) => c,
        _ => table.labels,
    };
    m.with_labels(labels)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn matrix_to_csv<T: Scalar>(m: &DissimilarityMatrix<T>, precision: Precision) -> String {
    let mut out = String::new();
    let header: Vec<String> = m.labels().iter().map(|l| csv_field(l)).collect();
    out.push_str(&format!(",{}\n", header.join(",")));
    for (label, row) in m.labels().iter().zip(m.rows()) {
        let cells: Vec<String> = row.iter().map(|v| format_number(v.as_f64(), precision)).collect();
        out.push_str(&format!("{},{}\n", csv_field(label), cells.join(",")));
    }
    out
}

pub fn violations_to_csv<T: Scalar>(violations: &[Violation<T>], precision: Precision) -> String {
    let mut out = String::from("i,j,k,lhs,rhs\n");
    for v in violations {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            v.i + 1,
            v.j + 1,
            v.k + 1,
            format_number(v.lhs.as_f64(), precision),
            format_number(v.rhs.as_f64(), precision)
        ));
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeDoc {
    rank: usize,
    height: f64,
    left: String,
    right: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct DendrogramDoc {
    n: usize,
    labels: Vec<String>,
    nodes: Vec<NodeDoc>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string())
}

pub fn dendrogram_to_json<T: Scalar>(tree: &Dendrogram<T>) -> String {
    let doc = DendrogramDoc {
        n: tree.n(),
        labels: tree.labels().to_vec(),
        nodes: tree
            .merges()
            .iter()
            .map(|m| NodeDoc {
                rank: m.rank,
                height: m.height.as_f64(),
                left: m.left.to_string(),
                right: m.right.to_string(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes") + "\n"
}

pub fn dendrogram_from_json<T: Scalar>(text: &str) -> Result<Dendrogram<T>> {
    let doc: DendrogramDoc = serde_json::from_str(text).map_err(json_error)?;
    if doc.n != doc.labels.len() {
        return Err(Error::InvalidTree(format!("n = {} but {} labels", doc.n, doc.labels.len())));
    }
    let merges = doc
        .nodes
        .into_iter()
        .map(|node| {
            Ok(Merge {
                rank: node.rank,
                left: node.left.parse::<NodeRef>()?,
                right: node.right.parse::<NodeRef>()?,
                height: T::of(node.height),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dendrogram::new(doc.labels, merges)
}

/// Serializes any value as pretty JSON with a trailing newline.
pub fn to_json<S: Serialize>(value: &S) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes") + "\n"
}

pub fn from_json<D: for<'de> Deserialize<'de>>(text: &str) -> Result<D> {
    serde_json::from_str(text).map_err(json_error)
}

fn newick_label(s: &str) -> String {
    if s.is_empty() || s.contains(|c: char| "()[]':;,".contains(c) || c.is_whitespace()) {
        format!("'{}'", s.replace('\'', "''"))
    } else {
        s.to_string()
    }
}

/// Newick text with branch lengths equal to height differences.
pub fn to_newick<T: Scalar>(tree: &Dendrogram<T>, precision: Precision) -> String {
    fn walk<T: Scalar>(tree: &Dendrogram<T>, node: NodeRef, parent: T, precision: Precision, out: &mut String) {
        match tree.children(node) {
            None => {
                let NodeRef::Terminal(i) = node else { unreachable!() };
                out.push_str(&newick_label(&tree.labels()[i]));
            }
            Some((l, r)) => {
                let h = tree.height(node);
                out.push('(');
                walk(tree, l, h, precision, out);
                out.push(',');
                walk(tree, r, h, precision, out);
                out.push(')');
            }
        }
        if node != tree.root() {
            out.push(':');
            out.push_str(&format_number((parent - tree.height(node)).as_f64(), precision));
        }
    }
    let mut out = String::new();
    walk(tree, tree.root(), tree.height(tree.root()), precision, &mut out);
    out.push_str(";\n");
    out
}

/// Coefficient table: one row per coordinate, columns root smooth, then
/// details from the top merge down to rank 1.
pub fn haar_to_csv<T: Scalar>(t: &HaarTransform<T>, coordinates: &[String], precision: Precision) -> String {
    let top = t.details().len();
    let mut header = vec!["coordinate".to_string(), format!("s{top}")];
    header.extend((1..=top).rev().map(|r| format!("d{r}")));
    let mut out = header.join(",") + "\n";
    for c in 0..t.dim() {
        let name = coordinates.get(c).cloned().unwrap_or_else(|| format!("v{}", c + 1));
        let mut cells = vec![csv_field(&name), format_number(t.root_smooth()[c].as_f64(), precision)];
        cells.extend(t.details().iter().rev().map(|d| format_number(d[c].as_f64(), precision)));
        out.push_str(&(cells.join(",") + "\n"));
    }
    out
}

/// Reads a coefficient table written by [`haar_to_csv`]. Returns the
/// transform and the coordinate names.
pub fn haar_from_csv<T: Scalar>(text: &str, tree: Dendrogram<T>) -> Result<(HaarTransform<T>, Vec<String>)> {
    let table: NumericTable<T> = read_numeric_table(text, true)?;
    let width = tree.n();
    if let Some(k) = table.rows.iter().position(|r| r.len() != width) {
        return Err(Error::Shape(format!(
            "coefficient row {} has {} values, expected {width} for {} terminals",
            k + 1,
            table.rows[k].len(),
            tree.n()
        )));
    }
    let root_smooth = table.rows.iter().map(|r| r[0]).collect();
    let details = (1..width)
        .map(|rank| table.rows.iter().map(|r| r[width - rank]).collect())
        .collect();
    Ok((HaarTransform::new(tree, root_smooth, details)?, table.labels))
}

/// Reads 0/1 cells with object labels in the first column and an optional
/// header of attribute names.
pub fn read_boolean_table(text: &str) -> Result<BooleanTable> {
    let mut recs = records(text)?;
    if recs.is_empty() {
        return Err(Error::Degenerate("no rows".into()));
    }
    let is_bit = |f: &str| f == "0" || f == "1";
    let header = recs[0].1.iter().skip(1).any(|f| !is_number(f)).then(|| recs.remove(0).1);
    let width = recs[0].1.len().saturating_sub(1);
    let attributes = match header {
        Some(h) => h.into_iter().skip(1).collect(),
        None => (1..=width).map(|j| format!("d{j}")).collect(),
    };
    let mut objects = Vec::new();
    let mut cells = Vec::new();
    for (line, rec) in recs {
        objects.push(rec[0].clone());
        cells.push(
            rec.iter()
                .enumerate()
                .skip(1)
                .map(|(col, f)| {
                    if is_bit(f) {
                        Ok(f == "1")
                    } else {
                        Err(Error::parse(format!("line {line}, column {}", col + 1), format!("{f:?} is not 0 or 1")))
                    }
                })
                .collect::<Result<Vec<bool>>>()?,
        );
    }
    BooleanTable::new(objects, attributes, cells)
}
