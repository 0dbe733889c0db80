//! Set-valued dissimilarities on boolean data.
//!
//! Objects `x` and `y` differ on attribute `j` unless both have it. The
//! dissimilarity is the set of such attributes; it obeys the strong triangle
//! inequality with union as the maximum, `d(x, z) ⊆ d(x, y) ∪ d(y, z)`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};

/// Clique enumeration is limited to this many objects.
pub const MAX_CLIQUE_OBJECTS: usize = 64;

pub type AttributeSet = BTreeSet<usize>;

/// Objects described by presence/absence of attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanTable {
    objects: Vec<String>,
    attributes: Vec<String>,
    cells: Vec<Vec<bool>>,
}

impl BooleanTable {
    pub fn new(objects: Vec<String>, attributes: Vec<String>, cells: Vec<Vec<bool>>) -> Result<Self> {
        if cells.len() != objects.len() {
            return Err(Error::Shape(format!("{} rows for {} objects", cells.len(), objects.len())));
        }
        if let Some(i) = cells.iter().position(|r| r.len() != attributes.len()) {
            return Err(Error::Shape(format!(
                "row {} has {} cells, expected {}",
                i + 1,
                cells[i].len(),
                attributes.len()
            )));
        }
        Ok(BooleanTable { objects, attributes, cells })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.cells[i]
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Attribute names of a subset, in index order.
    pub fn subset_names(&self, subset: &AttributeSet) -> Vec<String> {
        subset.iter().map(|&j| self.attributes[j].clone()).collect()
    }
}

/// Attributes not shared by both rows.
pub fn set_dissimilarity(a: &[bool], b: &[bool]) -> Result<AttributeSet> {
    if a.len() != b.len() {
        return Err(Error::Domain(format!("rows have {} and {} attributes", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).enumerate().filter(|(_, (&x, &y))| !(x && y)).map(|(j, _)| j).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeVertex {
    pub subset: AttributeSet,
    pub level: usize,
    /// Object pairs whose dissimilarity is exactly this subset.
    pub pairs: Vec<(usize, usize)>,
    /// False for subsets added only to close the set under union.
    pub realized: bool,
}

/// Dissimilarity values ordered by inclusion, with covering edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Semilattice {
    /// Sorted by level, then subset.
    pub vertices: Vec<LatticeVertex>,
    /// `(lower, upper)` vertex indices where `upper` covers `lower`.
    pub edges: Vec<(usize, usize)>,
}

impl Semilattice {
    /// Indented listing, one vertex per line under a level heading.
    pub fn to_text(&self, table: &BooleanTable) -> String {
        let mut out = String::new();
        let mut level = None;
        for v in &self.vertices {
            if level != Some(v.level) {
                out.push_str(&format!("level {}\n", v.level));
                level = Some(v.level);
            }
            let pairs: Vec<String> = v
                .pairs
                .iter()
                .map(|&(i, j)| format!("({},{})", table.objects[i], table.objects[j]))
                .collect();
            out.push_str(&format!(
                "  {{{}}}{}: {}\n",
                table.subset_names(&v.subset).join(","),
                if v.realized { "" } else { " [join]" },
                if pairs.is_empty() { "-".to_string() } else { pairs.join(" ") }
            ));
        }
        out
    }
}

fn pairwise(table: &BooleanTable) -> Vec<((usize, usize), AttributeSet)> {
    let n = table.len();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| ((i, j), set_dissimilarity(&table.cells[i], &table.cells[j]).expect("rectangular table")))
        .collect()
}

/// All realized dissimilarity values, closed under union, with their pairs
/// and the covering relation.
pub fn build_semilattice(table: &BooleanTable) -> Result<Semilattice> {
    if table.len() < 2 {
        return Err(Error::Degenerate(format!("need at least 2 objects, got {}", table.len())));
    }
    let pairs = pairwise(table);
    let realized: BTreeSet<AttributeSet> = pairs.iter().map(|(_, s)| s.clone()).collect();
    let mut all = realized.clone();
    loop {
        let joins: Vec<AttributeSet> = all
            .iter()
            .flat_map(|a| all.iter().map(move |b| a.union(b).copied().collect::<AttributeSet>()))
            .filter(|u| !all.contains(u))
            .collect();
        if joins.is_empty() {
            break;
        }
        all.extend(joins);
    }
    let mut subsets: Vec<AttributeSet> = all.into_iter().collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let vertices: Vec<LatticeVertex> = subsets
        .into_iter()
        .map(|s| LatticeVertex {
            level: s.len(),
            pairs: pairs.iter().filter(|(_, d)| *d == s).map(|(p, _)| *p).collect(),
            realized: realized.contains(&s),
            subset: s,
        })
        .collect();
    let below = |a: &AttributeSet, b: &AttributeSet| a != b && a.is_subset(b);
    let mut edges = Vec::new();
    for (x, lo) in vertices.iter().enumerate() {
        for (y, hi) in vertices.iter().enumerate() {
            if below(&lo.subset, &hi.subset)
                && !vertices
                    .iter()
                    .any(|mid| below(&lo.subset, &mid.subset) && below(&mid.subset, &hi.subset))
            {
                edges.push((x, y));
            }
        }
    }
    Ok(Semilattice { vertices, edges })
}

/// Maximal sets of objects whose pairwise dissimilarities all have at most
/// `k` attributes (maximal cliques of the threshold graph; they may overlap).
/// Each cluster lists object indices in order; clusters are sorted by their
/// member labels.
pub fn clusters_at_level(table: &BooleanTable, k: usize) -> Result<Vec<Vec<usize>>> {
    let n = table.len();
    if n > MAX_CLIQUE_OBJECTS {
        return Err(Error::ResourceGuard(format!(
            "clique enumeration is limited to {MAX_CLIQUE_OBJECTS} objects, got {n}"
        )));
    }
    if k > table.attributes.len() {
        return Err(Error::Domain(format!(
            "level {k} exceeds the {} attributes",
            table.attributes.len()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut adjacent = vec![0u64; n];
    for ((i, j), d) in pairwise(table) {
        if d.len() <= k {
            adjacent[i] |= 1 << j;
            adjacent[j] |= 1 << i;
        }
    }
    let mut cliques = Vec::new();
    let everyone = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    bron_kerbosch(&adjacent, 0, everyone, 0, &mut cliques);
    let mut clusters: Vec<Vec<usize>> = cliques
        .into_iter()
        .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
        .collect();
    clusters.sort_by(|a: &Vec<usize>, b: &Vec<usize>| {
        let names = |c: &Vec<usize>| c.iter().map(|&i| table.objects[i].clone()).collect::<Vec<_>>();
        names(a).cmp(&names(b))
    });
    Ok(clusters)
}

fn bron_kerbosch(adjacent: &[u64], r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    let pivot = (p | x).trailing_zeros() as usize;
    let mut candidates = p & !adjacent[pivot];
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        let bit = 1u64 << v;
        bron_kerbosch(adjacent, r | bit, p & adjacent[v], x & adjacent[v], out);
        p &= !bit;
        x |= bit;
        candidates &= !bit;
    }
}
