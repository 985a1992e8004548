//! Determinized Monte Carlo Tree Search for a single guess decision.
//!
//! Every iteration samples a fresh full state consistent with the root
//! observation, then runs the four classic steps on the guess-keyed tree:
//! select by UCB1 among children legal in that state, expand one untried
//! guess while the node is shallower than `max_depth`, play the rest of the
//! game out uniformly at random, and back up a win/loss for the root player.
//! Inside the tree and the playout every turn ends after one guess.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::determinize::Determinizer;
use crate::error::{Error, Result};
use crate::observation::{legal_guesses, Observation};
use crate::playout::{advance_to_guess, current_legal_guesses, random_playout};
use crate::state::{GameState, Phase};
use crate::tree::{ucb1, NodeKey, SearchNode, SearchTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Simulations(u64),
    WallMillis(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// UCB1 tree down to `max_depth`.
    Uct,
    /// Root children only; everything after the first guess is random.
    FlatRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchParams {
    pub exploration_c: f64,
    /// Nodes at this depth are simulated from but never expanded.
    pub max_depth: u32,
    pub budget: Budget,
    pub policy: Policy,
    pub seed: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            exploration_c: std::f64::consts::SQRT_2,
            max_depth: 4,
            budget: Budget::Simulations(1000),
            policy: Policy::Uct,
            seed: 0,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.exploration_c > 0.0 && self.exploration_c.is_finite()) {
            return Err(Error::Config(format!("exploration constant must be positive, got {}", self.exploration_c)));
        }
        if self.max_depth == 0 {
            return Err(Error::Config("max_depth must be at least 1".into()));
        }
        match self.budget {
            Budget::Simulations(0) | Budget::WallMillis(0) => Err(Error::Config("search budget must be positive".into())),
            _ => Ok(()),
        }
    }

    fn depth_cap(&self) -> u32 {
        match self.policy {
            Policy::Uct => self.max_depth,
            Policy::FlatRoot => 1,
        }
    }
}

/// Searches from `obs` with an RNG seeded from `params.seed`.
pub fn run_search(obs: &Observation, params: &SearchParams) -> Result<SearchTree> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    run_search_with_rng(obs, params, &mut rng)
}

pub fn run_search_with_rng<R: Rng + ?Sized>(obs: &Observation, params: &SearchParams, rng: &mut R) -> Result<SearchTree> {
    params.validate()?;
    let root_guesses = legal_guesses(obs)?;
    if root_guesses.is_empty() {
        return Err(Error::Protocol("no legal guess at the root".into()));
    }
    let determinizer = Determinizer::new(obs)?;
    let mut tree = SearchTree::new(obs);
    let search = Search { params, root_player: obs.viewer, cap: params.depth_cap() };

    let iterate = |tree: &mut SearchTree, rng: &mut R| {
        let mut state = determinizer.sample(rng);
        state.rules.consecutive_guessing = false;
        search.descend(&mut tree.root, state, rng);
    };
    match params.budget {
        Budget::Simulations(n) => {
            for _ in 0..n {
                iterate(&mut tree, rng);
            }
        }
        Budget::WallMillis(ms) => {
            let deadline = Instant::now() + Duration::from_millis(ms);
            loop {
                iterate(&mut tree, rng);
                if Instant::now() >= deadline {
                    break;
                }
            }
        }
    }
    Ok(tree)
}

struct Search<'a> {
    params: &'a SearchParams,
    root_player: usize,
    cap: u32,
}

impl Search<'_> {
    /// One iteration below `node`; returns whether the root player won.
    fn descend<R: Rng + ?Sized>(&self, node: &mut SearchNode, mut state: GameState, rng: &mut R) -> bool {
        advance_to_guess(&mut state, rng);
        let won = if state.phase == Phase::Terminal {
            state.winner() == Some(self.root_player)
        } else if node.depth >= self.cap {
            random_playout(&mut state, rng).winner == self.root_player
        } else {
            let legal = current_legal_guesses(&state);
            let untried: Vec<_> = legal.iter().filter(|g| !node.children.contains_key(&NodeKey::from(**g))).collect();
            if let Some(&&guess) = untried.choose(rng) {
                state.apply_guess(guess).expect("legal in this determinization");
                let key = NodeKey::from(guess);
                let child = node.children.entry(key).or_insert_with(|| SearchNode::child(key, node.depth + 1));
                let won = if state.phase == Phase::Terminal {
                    state.winner() == Some(self.root_player)
                } else {
                    random_playout(&mut state, rng).winner == self.root_player
                };
                child.visits += 1;
                child.wins += won as u64;
                won
            } else {
                let actor_is_root = state.current_player == self.root_player;
                let parent_visits = node.visits;
                let c = self.params.exploration_c;
                // children not legal in this determinization are skipped, not removed
                let key = legal
                    .iter()
                    .map(|g| NodeKey::from(*g))
                    .max_by(|a, b| {
                        let score = |k: &NodeKey| {
                            let ch = &node.children[k];
                            let wins = if actor_is_root { ch.wins } else { ch.visits - ch.wins };
                            ucb1(wins, ch.visits, parent_visits.max(1), c)
                        };
                        score(a).total_cmp(&score(b)).then(b.cmp(a))
                    })
                    .expect("non-terminal state has a legal guess");
                state.apply_guess(key.into()).expect("legal in this determinization");
                self.descend(node.children.get_mut(&key).expect("selected among existing children"), state, rng)
            }
        };
        node.visits += 1;
        node.wins += won as u64;
        won
    }
}

/// Root branching of the guess-keyed tree versus a tree whose keys also
/// carried the sampled hidden assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootBranching {
    pub guesses: usize,
    pub consistent_determinizations: u128,
    pub full_model: u128,
}

pub fn root_branching(obs: &Observation) -> Result<RootBranching> {
    let guesses = legal_guesses(obs)?.len();
    let consistent_determinizations = Determinizer::new(obs)?.consistent_assignments();
    Ok(RootBranching { guesses, consistent_determinizations, full_model: guesses as u128 * consistent_determinizations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observation::observe;
    use crate::rules::RuleSet;
    use crate::state::Guess;
    use crate::tile::{Color::*, Line, Tile, TileEntry, Value};
    use crate::tree::best_guess;

    fn opening(rules: RuleSet, seed: u64) -> Observation {
        let mut g = GameState::new(rules, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        advance_to_guess(&mut g, &mut rng);
        observe(&g, 0)
    }

    fn sims(n: u64) -> SearchParams {
        SearchParams { budget: Budget::Simulations(n), ..SearchParams::default() }
    }

    #[test]
    fn root_visits_equal_budget() {
        let obs = opening(RuleSet::default(), 1);
        let tree = run_search(&obs, &sims(1000)).unwrap();
        assert_eq!(tree.root.visits, 1000);
        assert_eq!(tree.children().map(|c| c.visits).sum::<u64>(), 1000);
    }

    #[test]
    fn max_depth_one_has_no_grandchildren() {
        let obs = opening(RuleSet::default(), 2);
        let params = SearchParams { max_depth: 1, ..sims(2000) };
        let tree = run_search(&obs, &params).unwrap();
        assert!(tree.children().all(|c| c.children.is_empty()));
        let flat = run_search(&obs, &SearchParams { policy: Policy::FlatRoot, ..sims(2000) }).unwrap();
        assert_eq!(flat.root.max_depth(), 1);
    }

    #[test]
    fn depth_cap_and_visit_bounds_hold_everywhere() {
        let obs = opening(RuleSet::simplified(), 3);
        for max_depth in [1, 2, 3, 5] {
            let tree = run_search(&obs, &SearchParams { max_depth, ..sims(3000) }).unwrap();
            tree.root.walk(&mut |n| {
                assert!(n.wins <= n.visits);
                assert!(n.visits >= n.children.values().map(|c| c.visits).sum::<u64>());
                if n.depth >= max_depth {
                    assert!(n.children.is_empty());
                }
                for c in n.children.values() {
                    assert_eq!(c.depth, n.depth + 1);
                }
            });
            assert!(tree.root.max_depth() <= max_depth);
        }
    }

    #[test]
    fn same_seed_same_tree() {
        let obs = opening(RuleSet::default(), 4);
        let a = run_search(&obs, &sims(500)).unwrap();
        let b = run_search(&obs, &sims(500)).unwrap();
        assert_eq!(a, b);
        let c = run_search(&obs, &SearchParams { seed: 1, ..sims(500) }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn wall_clock_budget_runs() {
        let obs = opening(RuleSet::default(), 5);
        let tree = run_search(&obs, &SearchParams { budget: Budget::WallMillis(20), ..SearchParams::default() }).unwrap();
        assert!(tree.root.visits >= 1);
    }

    #[test]
    fn bad_params_are_config_errors() {
        let obs = opening(RuleSet::default(), 6);
        for p in [sims(0), SearchParams { max_depth: 0, ..sims(1) }, SearchParams { exploration_c: 0.0, ..sims(1) }] {
            assert!(matches!(run_search(&obs, &p), Err(Error::Config(_))));
        }
        let g = GameState::new(RuleSet::default(), 6).unwrap();
        assert!(matches!(run_search(&observe(&g, 0), &sims(10)), Err(Error::Protocol(_))));
    }

    /// Opponent keeps one hidden tile and exactly one value fits it: that
    /// guess wins on the spot in every determinization.
    #[test]
    fn forced_endgame_guess() {
        let rules = RuleSet { include_jokers: false, ..RuleSet::simplified() };
        let mut own: Vec<Tile> = (0..12).map(|r| Tile::rank(Black, r)).collect();
        own.extend((0..6).map(|r| Tile::rank(White, r)));
        own.sort_by_key(|t| t.order_index());
        let mut opp = Line { entries: (6..12).map(|r| TileEntry { tile: Tile::rank(White, r), revealed: r != 9 }).collect() };
        opp.entries[3].revealed = false;
        let g = GameState {
            rules,
            pool: vec![],
            lines: vec![Line { entries: own.into_iter().map(TileEntry::hidden).collect() }, opp],
            current_player: 0,
            pending_drawn: None,
            eliminated: vec![false, false],
            phase: Phase::AwaitGuess,
            correct_this_turn: 0,
        };
        let obs = observe(&g, 0);
        let forced = Guess { target: 1, position: 3, value: Value::Rank(9) };
        assert_eq!(legal_guesses(&obs).unwrap(), [forced]);
        let tree = run_search(&obs, &sims(200)).unwrap();
        assert_eq!(best_guess(&tree).unwrap(), forced);
        let child = tree.children().next().unwrap();
        assert_eq!(child.win_rate(), 1.0);
        let rb = root_branching(&obs).unwrap();
        assert_eq!((rb.guesses, rb.consistent_determinizations, rb.full_model), (1, 1, 1));
    }

    #[test]
    fn wins_count_only_root_player_victories() {
        // Replays every iteration with the same RNG stream and tallies outcomes separately.
        let obs = opening(RuleSet { include_jokers: false, tiles_per_player: 2, ranks: 4, ..RuleSet::simplified() }, 8);
        let params = SearchParams { max_depth: 1, ..sims(400) };
        let tree = run_search(&obs, &params).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let det = Determinizer::new(&obs).unwrap();
        let mut per_child = std::collections::BTreeMap::<NodeKey, (u64, u64)>::new();
        let mut root_wins = 0;
        let search = Search { params: &params, root_player: obs.viewer, cap: 1 };
        let mut shadow = SearchNode::root();
        for _ in 0..400 {
            let mut state = det.sample(&mut rng);
            state.rules.consecutive_guessing = false;
            let before: std::collections::BTreeMap<_, _> = shadow.children.iter().map(|(k, c)| (*k, c.visits)).collect();
            let won = search.descend(&mut shadow, state, &mut rng);
            root_wins += won as u64;
            let touched = shadow.children.iter().find(|(k, c)| before.get(*k).copied().unwrap_or(0) != c.visits).unwrap().0;
            let e = per_child.entry(*touched).or_default();
            e.0 += 1;
            e.1 += won as u64;
        }
        assert_eq!(tree.root.wins, root_wins);
        for (k, (v, w)) in per_child {
            assert_eq!((tree.root.children[&k].visits, tree.root.children[&k].wins), (v, w));
        }
    }

    #[test]
    fn branching_counts_for_black_opener() {
        let rules = RuleSet { include_jokers: false, ..RuleSet::simplified() };
        let own: Vec<Tile> = (0..4).map(|r| Tile::rank(Black, r)).collect();
        let mut g = GameState::new(rules, 0).unwrap();
        let rest: Vec<Tile> = rules.tile_set().into_iter().filter(|t| !own.contains(t)).collect();
        let opp = [4, 6, 8, 10].map(|r| Tile::rank(Black, r));
        g.lines = vec![
            Line { entries: own.iter().copied().map(TileEntry::hidden).collect() },
            Line { entries: opp.iter().copied().map(TileEntry::hidden).collect() },
        ];
        g.pool = rest.into_iter().filter(|t| !opp.contains(t)).collect();
        g.phase = Phase::AwaitGuess;
        let rb = root_branching(&observe(&g, 0)).unwrap();
        assert_eq!(rb.guesses, 32);
        // 4 ascending black ranks out of the 8 unaccounted: C(8, 4)
        assert_eq!(rb.consistent_determinizations, 70);
        assert_eq!(rb.full_model, 32 * 70);
    }
}
