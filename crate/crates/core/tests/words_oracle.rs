use std::collections::HashMap;

use entropyforge_core::group_model::{act_ray, build_group, GroupConfig, GroupSpec};
use entropyforge_core::testkit::{all_words, oracle_depth, random_word, BruteForce};
use entropyforge_core::words::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn specs() -> Vec<GroupSpec> {
    [
        GroupConfig::dinfty(2),
        GroupConfig::constant(2, 2),
        GroupConfig::pattern(&[2, 3], 2),
        GroupConfig::mother(3, 2),
        GroupConfig::constant(3, 3),
    ]
    .iter()
    .map(|c| build_group(c).unwrap())
    .collect()
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 { 0 } else { (usize::BITS - (n - 1).leading_zeros()) as usize }
}

#[test]
fn exhaustive_dinfty_short_words() {
    let spec = build_group(&GroupConfig::dinfty(2)).unwrap();
    let bf = BruteForce::new(&spec, 0, oracle_depth(&spec, 8));
    let mut by_sig: HashMap<_, usize> = HashMap::new();
    let mut by_key: HashMap<_, usize> = HashMap::new();
    let mut pairs: HashMap<(usize, usize), ()> = HashMap::new();
    let mut words = Vec::new();
    for n in 0..=4 {
        words.extend(all_words(&spec, 0, n));
    }
    for w in &words {
        let sig = bf.signature(w);
        let key = canonical_key(&spec, w, DEFAULT_STATE_BUDGET).unwrap();
        let triv = is_trivial(&spec, w, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(triv, bf.is_trivial(w), "{}", w.display(&spec));
        assert_eq!(triv, key.is_identity());
        let ns = by_sig.len();
        let a = *by_sig.entry(sig).or_insert(ns);
        let nk = by_key.len();
        let b = *by_key.entry(key).or_insert(nk);
        pairs.insert((a, b), ());
    }
    // the two partitions coincide
    assert_eq!(by_sig.len(), by_key.len());
    assert_eq!(pairs.len(), by_sig.len());
}

#[test]
fn random_words_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for spec in specs() {
        let bf = BruteForce::new(&spec, 0, oracle_depth(&spec, 24));
        for _ in 0..150 {
            let n = rand::Rng::random_range(&mut rng, 0..12);
            let w = random_word(&spec, 0, n, &mut rng);
            // quotient against a random short word
            let u = random_word(&spec, 0, rand::Rng::random_range(&mut rng, 0..12), &mut rng);
            for x in [w.concat(&spec, &w.inverse(&spec)), w.clone(), w.concat(&spec, &u.inverse(&spec))] {
                assert_eq!(is_trivial(&spec, &x, DEFAULT_STATE_BUDGET).unwrap(), bf.is_trivial(&x));
            }
            let kw = canonical_key(&spec, &w, DEFAULT_STATE_BUDGET).unwrap();
            let ku = canonical_key(&spec, &u, DEFAULT_STATE_BUDGET).unwrap();
            assert_eq!(kw == ku, bf.signature(&w) == bf.signature(&u));
        }
    }
}

#[test]
fn rewriting_invariants_and_activity_routes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for spec in specs() {
        for _ in 0..60 {
            let n = rand::Rng::random_range(&mut rng, 0..80);
            let w = random_word(&spec, 0, n, &mut rng);
            let (children, _) = rewrite_step(&spec, &w);
            let sum: usize = children.iter().map(|c| c.len()).sum();
            assert!(sum <= n);
            assert!(children.iter().all(|c| c.len() <= (n + 1) / 2));
            let a = activity(&spec, &w);
            assert_eq!(a, children.iter().map(|c| activity(&spec, c)).sum::<usize>());
            let tree = minimal_tree(&spec, &w);
            assert!(tree.depth() <= ceil_log2(n.max(1)) + 1);
            assert_eq!(tree.active_leaves().count(), a);
            assert_eq!(active_boundary(&spec, &w).len(), a);
            let forest = ascendance_forest(&spec, &w);
            assert!(forest.acyclic);
            assert_eq!(forest.components, a);
            assert_eq!(inverted_orbit_activity(&spec, &w).unwrap(), a);
            // labels through the forest agree with direct evaluation
            for (x, f) in boundary_function(&spec, &w) {
                assert_eq!(act_ray(&spec, &w, &x).unwrap().1, f);
            }
            let d = spec.valency.d_max();
            let key = canonical_key(&spec, &w, DEFAULT_STATE_BUDGET).unwrap();
            assert!(key.size() <= (2 * d + 2) * (a + 1));
        }
    }
}
