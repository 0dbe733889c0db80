use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ultrahier::hierarchy::random_dendrogram;
use ultrahier::ultrametric::{
    canonical_form, cophenetic_matrix, generate_cloud, satisfies_canonical_conditions, ultrametricity_coefficient,
    verify_ultrametric, CloudLaw,
};
use ultrahier::{agglomerate, agglomerate_naive, pairwise_distances, Dendrogram64, Linkage, Metric};

fn cloud(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..dim).map(|_| rng.random_range(-10.0..10.0)).collect()).collect()
}

fn sorted_heights(t: &Dendrogram64) -> Vec<f64> {
    let mut h: Vec<f64> = t.merges().iter().map(|m| m.height).collect();
    h.sort_by(f64::total_cmp);
    h
}

fn orbit(tree: &Dendrogram64) -> impl Iterator<Item = Dendrogram64> + '_ {
    let k = tree.n() - 1;
    (0u32..1 << k).map(move |mask| {
        (1..=k)
            .filter(|r| mask >> (r - 1) & 1 == 1)
            .fold(tree.clone(), |t, r| t.swap_children(r).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nn_chain_matches_global_search(n in 2usize..64, seed in any::<u64>(), single in any::<bool>()) {
        let linkage = if single { Linkage::Single } else { Linkage::Complete };
        let d = pairwise_distances(&cloud(n, 3, seed), Metric::Euclidean).unwrap();
        let fast = sorted_heights(&agglomerate(&d, linkage).unwrap());
        let slow = sorted_heights(&agglomerate_naive(&d, linkage).unwrap());
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn canonicalize_is_idempotent_and_orbit_invariant(n in 1usize..8, seed in any::<u64>()) {
        let tree: Dendrogram64 = random_dendrogram(n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let c = tree.canonicalize();
        prop_assert_eq!(&c.canonicalize(), &c);
        for t in orbit(&tree) {
            prop_assert_eq!(&t.canonicalize(), &c);
        }
    }

    #[test]
    fn cophenetic_ignores_swaps(n in 2usize..10, seed in any::<u64>(), rank in 1usize..9) {
        let tree: Dendrogram64 = random_dendrogram(n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let rank = 1 + (rank - 1) % (n - 1);
        prop_assert_eq!(cophenetic_matrix(&tree.swap_children(rank).unwrap()), cophenetic_matrix(&tree));
    }

    #[test]
    fn monotone_linkages_give_ultrametrics(n in 2usize..33, seed in any::<u64>(), which in 0usize..3) {
        let linkage = [Linkage::Single, Linkage::Complete, Linkage::Ward][which];
        let d = pairwise_distances(&cloud(n, 4, seed), Metric::Euclidean).unwrap();
        let tree = agglomerate(&d, linkage).unwrap();
        prop_assert!(tree.is_monotone());
        prop_assert!(verify_ultrametric(&cophenetic_matrix(&tree), 0.0).is_empty());
    }

    #[test]
    fn canonical_form_ignores_input_order(n in 1usize..16, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree: Dendrogram64 = random_dendrogram(n, &mut rng).unwrap();
        let u = cophenetic_matrix(&tree);
        let mut shuffle: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            shuffle.swap(i, rng.random_range(0..=i));
        }
        let (_, a) = canonical_form(&u, 0.0).unwrap();
        let (_, b) = canonical_form(&u.permuted(&shuffle).unwrap(), 0.0).unwrap();
        prop_assert!(satisfies_canonical_conditions(&a, 0.0));
        prop_assert_eq!(a.as_slice(), b.as_slice());
    }

    #[test]
    fn coefficient_grows_with_tolerance(seed in any::<u64>(), t1 in 0.0f64..0.5, t2 in 0.0f64..0.5) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let d = pairwise_distances(&cloud(20, 5, seed), Metric::Euclidean).unwrap();
        let a = ultrametricity_coefficient(&d, 500, seed, lo).unwrap();
        let b = ultrametricity_coefficient(&d, 500, seed, hi).unwrap();
        prop_assert!(a.coefficient <= b.coefficient);
    }
}

#[test]
fn ultrametric_inputs_score_one() {
    let tree: Dendrogram64 = random_dendrogram(12, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let r = ultrametricity_coefficient(&cophenetic_matrix(&tree), 2000, 0, 0.0).unwrap();
    assert_eq!(r.sampled, 220);
    assert_eq!(r.coefficient, 1.0);
}

#[test]
fn coefficient_is_reproducible() {
    let pts: Vec<Vec<f64>> = generate_cloud(40, 10, CloudLaw::Gaussian, 9).unwrap();
    let d = pairwise_distances(&pts, Metric::Euclidean).unwrap();
    let a = ultrametricity_coefficient(&d, 300, 1, 0.02).unwrap();
    assert_eq!(a, ultrametricity_coefficient(&d, 300, 1, 0.02).unwrap());
}

#[test]
fn median_linkage_may_invert() {
    // Three points where the median update drops below the first merge.
    let d = ultrahier::DissimilarityMatrix::from_rows(&[
        vec![0.0, 1.0, 1.1],
        vec![1.0, 0.0, 1.1],
        vec![1.1, 1.1, 0.0],
    ])
    .unwrap();
    let tree = agglomerate(&d, Linkage::Median).unwrap();
    assert_eq!(tree.merges()[0].height, 1.0);
    assert!((tree.merges()[1].height - 0.96f64.sqrt()).abs() < 1e-12);
    assert!(!tree.is_monotone());
    assert!(!Linkage::Median.is_monotone());
}
