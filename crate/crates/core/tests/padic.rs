use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ultrahier::hierarchy::random_dendrogram;
use ultrahier::padic::{
    clusters_from_codes, decode, divergence_level, encode_dendrogram, padic_distance, padic_similarity,
    scale_operator, valuation_distance, PadicCode, PadicEncoding, PadicEncodingDoc,
};
use ultrahier::Dendrogram64;

fn tree(n: usize, seed: u64) -> Dendrogram64 {
    random_dendrogram(n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

#[test]
fn decode_inverts_encode_on_random_trees() {
    for seed in 0..200u64 {
        let n = 1 + (seed as usize % 12);
        let t = tree(n, seed);
        for p in [3, 5, 7] {
            let enc = encode_dendrogram(&t, p).unwrap();
            let back: Dendrogram64 = decode(&enc).unwrap();
            assert_eq!(back, t, "seed {seed}, p {p}");
        }
    }
}

#[test]
fn base_two_is_ambiguous_and_base_three_is_not() {
    // +1 p^1 against -1 p^1 + 1 p^2.
    let a = [1, 0, 0];
    let b = [-1, 1, 0];
    let at = |p, c: [i8; 3]| PadicCode::new(p, c.to_vec()).unwrap().evaluate();
    assert_eq!(at(2, a), at(2, b));
    assert_eq!(at(2, a), BigInt::from(2));
    assert_ne!(at(3, a), at(3, b));
}

#[test]
fn serialized_encoding_round_trips() {
    let enc = encode_dendrogram(&tree(9, 4), 3).unwrap();
    let doc = PadicEncodingDoc::from(&enc);
    let json = serde_json::to_string(&doc).unwrap();
    assert!(json.contains("\"C\":"));
    let back: PadicEncoding = serde_json::from_str::<PadicEncodingDoc>(&json).unwrap().try_into().unwrap();
    assert_eq!(back, enc);
}

/// Exponent of p in a nonzero integer, by repeated division.
fn order(mut x: BigInt, p: u64) -> i32 {
    let p = BigInt::from(p);
    let mut v = 0;
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn base_three_values_are_distinct(n in 1usize..30, seed in any::<u64>()) {
        let enc = encode_dendrogram(&tree(n, seed), 3).unwrap();
        let values: HashSet<BigInt> = enc.decimal_codes().into_iter().collect();
        prop_assert_eq!(values.len(), n);
    }

    #[test]
    fn divergence_is_the_joining_rank(n in 2usize..20, seed in any::<u64>(), p in prop::sample::select(vec![3u64, 5, 11])) {
        let t = tree(n, seed);
        let codes = encode_dendrogram(&t, p).unwrap().codes();
        for i in 0..n {
            for j in 0..n {
                let r = t.lca_rank(i, j).unwrap();
                prop_assert_eq!(divergence_level(&codes[i], &codes[j]).unwrap(), r);
                let want = BigRational::new(BigInt::one(), Pow::pow(BigInt::from(p), r));
                prop_assert_eq!(padic_similarity(&codes[i], &codes[j]).unwrap(), want);
            }
        }
    }

    #[test]
    fn distance_is_exactly_ultrametric(n in 3usize..14, seed in any::<u64>()) {
        let codes = encode_dendrogram(&tree(n, seed), 3).unwrap().codes();
        let d = |a: usize, b: usize| padic_distance(&codes[a], &codes[b]).unwrap();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    prop_assert!(d(i, k) <= d(i, j).max(d(j, k)));
                }
            }
        }
    }

    #[test]
    fn scaling_coarsens_to_the_partition_at_each_level(n in 2usize..14, seed in any::<u64>()) {
        let t = tree(n, seed);
        let mut codes = encode_dendrogram(&t, 3).unwrap().codes();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let same = codes[i] == codes[j];
                    prop_assert_eq!(same, t.lca_rank(i, j).unwrap() <= k, "k {}, terminals {} {}", k, i, j);
                }
            }
            let groups = clusters_from_codes(&codes);
            prop_assert_eq!(groups.len(), n - k);
            codes = codes.iter().map(scale_operator).collect();
        }
        prop_assert!(codes.iter().all(PadicCode::is_null));
    }

    #[test]
    fn valuation_distance_matches_factorization(x in -10_000i64..10_000, y in -10_000i64..10_000, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let got = valuation_distance(&BigInt::from(x), &BigInt::from(y), p).unwrap();
        if x == y {
            prop_assert_eq!(got, 0.0);
        } else {
            prop_assert_eq!(got, 2f64.powi(-order(BigInt::from(x - y), p)));
        }
    }
}

#[test]
fn valuation_example() {
    assert_eq!(valuation_distance(&BigInt::from(12), &BigInt::from(4), 2).unwrap(), 0.125);
}
