use cf4cf_core::metafeatures::{extract_full, extract_selected, FULL_COUNT, SELECTED};
use cf4cf_core::BaseRatingMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn triples() -> impl Strategy<Value = Vec<(String, String, f64)>> {
    proptest::collection::btree_map((0u8..15, 0u8..12), 1u8..=5, 1..80).prop_map(|m| {
        m.into_iter()
            .map(|((u, i), r)| (format!("u{u}"), format!("i{i}"), f64::from(r)))
            .collect()
    })
}

fn flip(id: &str) -> String {
    let n: u32 = id[1..].parse().unwrap();
    format!("x{:03}", 999 - n)
}

proptest! {
    #[test]
    fn shuffling_triples_changes_nothing(t in triples(), seed in any::<u64>()) {
        let a = extract_full(&BaseRatingMatrix::from_triples(t.clone()).unwrap()).unwrap();
        let mut s = t;
        s.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let b = extract_full(&BaseRatingMatrix::from_triples(s).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn renaming_ids_changes_nothing(t in triples()) {
        let a = extract_full(&BaseRatingMatrix::from_triples(t.clone()).unwrap()).unwrap();
        let renamed = t
            .into_iter()
            // reverses the id order of both users and items
            .map(|(u, i, r)| (flip(&u), flip(&i), r))
            .collect::<Vec<_>>();
        let b = extract_full(&BaseRatingMatrix::from_triples(renamed).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn counts_and_bounds(t in triples()) {
        let base = BaseRatingMatrix::from_triples(t).unwrap();
        let full = extract_full(&base).unwrap();
        prop_assert_eq!(full.len(), FULL_COUNT);
        prop_assert!(full.values().all(f64::is_finite));
        let sel = extract_selected(&base).unwrap();
        prop_assert!(sel.names().eq(SELECTED.iter().copied()));
        let sparsity = full.get("sparsity").unwrap();
        prop_assert!((0.0..=1.0).contains(&sparsity));
        let (nu, ni, nr) = (full.get("nusers").unwrap(), full.get("nitems").unwrap(), full.get("nratings").unwrap());
        prop_assert!(nu * ni >= nr);
    }
}

#[test]
fn uniform_entropy_and_constant_gini_on_hand_built_matrices() {
    // five distinct ratings, each used by exactly two cells
    let t: Vec<_> = (0..10)
        .map(|k| {
            (
                format!("u{}", k / 2),
                format!("i{}", k % 2),
                (k % 5 + 1) as f64,
            )
        })
        .collect();
    let f = extract_full(&BaseRatingMatrix::from_triples(t).unwrap()).unwrap();
    assert!((f.get("R.ratings.entropy").unwrap() - 5f64.ln()).abs() < 1e-12);
    assert_eq!(f.get("sparsity").unwrap(), 0.0);
    // every user rates two items
    assert_eq!(f.get("U.count.gini").unwrap(), 0.0);
    assert_eq!(f.get("U.count.entropy").unwrap(), 0.0);
}
