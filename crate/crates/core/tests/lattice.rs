use std::collections::BTreeSet;

use proptest::prelude::*;

use ultrahier::lattice::{build_semilattice, clusters_at_level, set_dissimilarity, BooleanTable};

fn table(cells: Vec<Vec<bool>>) -> BooleanTable {
    let width = cells[0].len();
    BooleanTable::new(
        (0..cells.len()).map(|i| format!("o{i:02}")).collect(),
        (0..width).map(|j| format!("d{}", j + 1)).collect(),
        cells,
    )
    .unwrap()
}

fn cells() -> impl Strategy<Value = Vec<Vec<bool>>> {
    (1usize..6).prop_flat_map(|width| prop::collection::vec(prop::collection::vec(any::<bool>(), width), 2..9))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn strong_triangle_with_union(cells in cells()) {
        let n = cells.len();
        for x in 0..n {
            for y in 0..n {
                let xy = set_dissimilarity(&cells[x], &cells[y]).unwrap();
                prop_assert_eq!(&xy, &set_dissimilarity(&cells[y], &cells[x]).unwrap());
                for z in 0..n {
                    let xz = set_dissimilarity(&cells[x], &cells[z]).unwrap();
                    let yz = set_dissimilarity(&cells[y], &cells[z]).unwrap();
                    let join: BTreeSet<usize> = xy.union(&yz).copied().collect();
                    prop_assert!(xz.is_subset(&join));
                }
            }
        }
    }

    #[test]
    fn pairs_partition_and_vertices_close(cells in cells()) {
        let t = table(cells);
        let l = build_semilattice(&t).unwrap();
        let mut seen = BTreeSet::new();
        for v in &l.vertices {
            prop_assert_eq!(v.realized, !v.pairs.is_empty());
            for &p in &v.pairs {
                prop_assert!(seen.insert(p), "pair {:?} listed twice", p);
            }
            for w in &l.vertices {
                let u: BTreeSet<usize> = v.subset.union(&w.subset).copied().collect();
                prop_assert!(l.vertices.iter().any(|x| x.subset == u));
            }
        }
        let n = t.len();
        prop_assert_eq!(seen.len(), n * (n - 1) / 2);
        for &(lo, hi) in &l.edges {
            prop_assert!(l.vertices[lo].subset.is_subset(&l.vertices[hi].subset));
            prop_assert!(l.vertices[lo].level < l.vertices[hi].level);
        }
    }

    #[test]
    fn levels_refine(cells in cells()) {
        let t = table(cells);
        for k in 0..t.attributes().len() {
            let fine = clusters_at_level(&t, k).unwrap();
            let coarse = clusters_at_level(&t, k + 1).unwrap();
            for c in &fine {
                prop_assert!(coarse.iter().any(|d| c.iter().all(|x| d.contains(x))));
            }
        }
    }
}

#[test]
fn guard_on_large_tables() {
    let t = table(vec![vec![true]; 65]);
    assert_eq!(clusters_at_level(&t, 0).unwrap_err().code(), "E_RESOURCE");
}
