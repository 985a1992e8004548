use davinci_core::playout::advance_to_guess;
use davinci_core::{merge_trees, observe, run_parallel_search, run_search, Budget, Observation, ParallelParams, RuleSet, GameState, SearchParams, SearchTree};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn opening(seed: u64) -> Observation {
    let mut g = GameState::new(RuleSet::default(), seed).unwrap();
    advance_to_guess(&mut g, &mut ChaCha8Rng::seed_from_u64(seed));
    observe(&g, 0)
}

fn grow(obs: &Observation, seed: u64, sims: u64) -> SearchTree {
    run_search(obs, &SearchParams { budget: Budget::Simulations(sims), seed, ..SearchParams::default() }).unwrap()
}

#[test]
fn parallel_equals_sequential_merge() {
    let obs = opening(7);
    for k in [1usize, 2, 4, 8] {
        let per_worker = SearchParams { budget: Budget::Simulations(200), seed: 40, ..SearchParams::default() };
        let parallel = run_parallel_search(&obs, &ParallelParams { workers: k, per_worker }).unwrap();
        let sequential: Vec<SearchTree> = (0..k as u64).map(|i| grow(&obs, 40 + i, 200)).collect();
        assert_eq!(parallel, merge_trees(&sequential).unwrap(), "k = {k}");
        assert_eq!(parallel.root.visits, 200 * k as u64);
    }
}

#[test]
fn merged_tree_serializes_identically_across_runs() {
    let obs = opening(8);
    let params = ParallelParams { workers: 4, per_worker: SearchParams { budget: Budget::Simulations(150), ..SearchParams::default() } };
    let a = serde_json::to_string(&run_parallel_search(&obs, &params).unwrap()).unwrap();
    let b = serde_json::to_string(&run_parallel_search(&obs, &params).unwrap()).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn merge_is_associative_and_commutative(s1 in 0u64..1000, s2 in 0u64..1000, s3 in 0u64..1000, n in 1u64..60) {
        let obs = opening(9);
        let (a, b, c) = (grow(&obs, s1, n), grow(&obs, s2, n + 7), grow(&obs, s3, 2 * n));
        let ab = merge_trees(&[a.clone(), b.clone()]).unwrap();
        let ba = merge_trees(&[b.clone(), a.clone()]).unwrap();
        prop_assert_eq!(&ab, &ba);
        let left = merge_trees(&[ab, c.clone()]).unwrap();
        let right = merge_trees(&[a.clone(), merge_trees(&[b.clone(), c.clone()]).unwrap()]).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(&left, &merge_trees(&[a, b, c]).unwrap());
    }
}
