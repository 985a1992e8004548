//! Independent oracles shared by the integration and acceptance tests.
//! Nothing here calls the determinizer or the search.

#![allow(dead_code)]

use std::collections::BTreeMap;

use davinci_core::playout::advance_to_guess;
use davinci_core::{legal_guesses, observe, Color, GameState, Guess, Line, Observation, Phase, RuleSet, Tile, TileEntry};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Hidden opponent slots of an observation, in (opponent line, position) order.
pub fn hidden_slots(obs: &Observation) -> Vec<(usize, usize, Color)> {
    let mut out = Vec::new();
    for (l, line) in obs.opponent_lines.iter().enumerate() {
        for (p, s) in line.entries.iter().enumerate() {
            if s.value.is_none() {
                out.push((l, p, s.color));
            }
        }
    }
    out
}

pub fn unaccounted(obs: &Observation) -> Vec<Tile> {
    let mut known: Vec<Tile> = obs.own_line.tiles().collect();
    for line in &obs.opponent_lines {
        for s in &line.entries {
            if let Some(v) = s.value {
                known.push(Tile::new(s.color, v));
            }
        }
    }
    if let Some(c) = obs.drawn_joker {
        known.push(Tile::joker(c));
    }
    obs.rules.tile_set().into_iter().filter(|t| !known.contains(t)).collect()
}

fn lines_sorted(obs: &Observation, slots: &[(usize, usize, Color)], assignment: &[Tile]) -> bool {
    obs.opponent_lines.iter().enumerate().all(|(l, line)| {
        let entries = line
            .entries
            .iter()
            .enumerate()
            .map(|(p, s)| {
                let tile = match s.value {
                    Some(v) => Tile::new(s.color, v),
                    None => {
                        let i = slots.iter().position(|&(sl, sp, _)| sl == l && sp == p).unwrap();
                        assignment[i]
                    }
                };
                TileEntry { tile, revealed: s.value.is_some() }
            })
            .collect();
        Line { entries }.is_sorted()
    })
}

/// Every consistent assignment of tiles to hidden slots, by exhaustive search.
pub fn enumerate_assignments(obs: &Observation) -> Vec<Vec<Tile>> {
    let slots = hidden_slots(obs);
    let free = unaccounted(obs);
    let mut out = Vec::new();
    let mut current = Vec::new();
    let mut used = vec![false; free.len()];
    fn rec(
        obs: &Observation,
        slots: &[(usize, usize, Color)],
        free: &[Tile],
        used: &mut [bool],
        current: &mut Vec<Tile>,
        out: &mut Vec<Vec<Tile>>,
    ) {
        if current.len() == slots.len() {
            if lines_sorted(obs, slots, current) {
                out.push(current.clone());
            }
            return;
        }
        let color = slots[current.len()].2;
        for i in 0..free.len() {
            if !used[i] && free[i].color == color {
                used[i] = true;
                current.push(free[i]);
                rec(obs, slots, free, used, current, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    rec(obs, &slots, &free, &mut used, &mut current, &mut out);
    out
}

/// Draws uniformly among color-respecting injective assignments and keeps the
/// first sorted one, up to `cap` attempts.
pub fn rejection_sample<R: Rng>(obs: &Observation, rng: &mut R, cap: usize) -> Option<Vec<Tile>> {
    let slots = hidden_slots(obs);
    let free = unaccounted(obs);
    for _ in 0..cap {
        let mut by_color: BTreeMap<Color, Vec<Tile>> = BTreeMap::new();
        for t in &free {
            by_color.entry(t.color).or_default().push(*t);
        }
        for v in by_color.values_mut() {
            v.shuffle(rng);
        }
        let mut assignment = Vec::with_capacity(slots.len());
        let mut ok = true;
        for &(_, _, c) in &slots {
            match by_color.get_mut(&c).and_then(|v| v.pop()) {
                Some(t) => assignment.push(t),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && lines_sorted(obs, &slots, &assignment) {
            return Some(assignment);
        }
    }
    None
}

/// The hidden-slot tiles of a full state, in [`hidden_slots`] order.
pub fn assignment_of(state: &GameState, obs: &Observation) -> Vec<Tile> {
    hidden_slots(obs)
        .into_iter()
        .map(|(l, p, _)| state.lines[obs.opponent_lines[l].player].entries[p].tile)
        .collect()
}

/// Upper critical value of chi-square with `dof` degrees of freedom.
pub fn chi_square_critical(dof: usize, alpha: f64) -> f64 {
    ChiSquared::new(dof as f64).unwrap().inverse_cdf(1.0 - alpha)
}

pub fn chi_square_stat(observed: &[u64], expected_each: f64) -> f64 {
    observed.iter().map(|&o| (o as f64 - expected_each).powi(2) / expected_each).sum()
}

/// Random rules, a random number of uniformly random turns, and the
/// observation of the player then to guess. `None` when the game ended first.
pub fn random_midgame<R: Rng>(rng: &mut R) -> Option<(GameState, Observation)> {
    let players = rng.gen_range(2..=4);
    let rules = RuleSet {
        consecutive_guessing: rng.gen(),
        include_jokers: rng.gen(),
        tiles_per_player: rng.gen_range(1..=(if players == 4 { 5 } else { 6 })),
        players,
        ranks: 12,
    };
    let mut g = GameState::new(rules, rng.gen()).ok()?;
    let turns = rng.gen_range(0..12);
    for _ in 0..turns {
        advance_to_guess(&mut g, rng);
        if g.phase == Phase::Terminal {
            return None;
        }
        let legal = legal_guesses(&observe(&g, g.current_player)).unwrap();
        g.apply_guess(*legal.choose(rng).unwrap()).unwrap();
        if g.phase == Phase::AwaitGuess && rng.gen_bool(0.5) {
            g.stop_guessing().unwrap();
        }
        if g.phase == Phase::Terminal {
            return None;
        }
    }
    advance_to_guess(&mut g, rng);
    if g.phase == Phase::Terminal {
        return None;
    }
    let obs = observe(&g, g.current_player);
    Some((g, obs))
}

pub fn tiny_rules() -> RuleSet {
    RuleSet { consecutive_guessing: false, include_jokers: false, tiles_per_player: 1, players: 2, ranks: 3 }
}

/// Exact win probability of the root player from `state` when every later
/// action is uniformly random among the mover's legal guesses.
fn random_continuation_value(state: &GameState, root: usize) -> f64 {
    let mut s = state.clone();
    if s.phase == Phase::AwaitDraw {
        s.draw().unwrap();
    }
    if let Some(w) = s.winner() {
        return (w == root) as u8 as f64;
    }
    let legal = legal_guesses(&observe(&s, s.current_player)).unwrap();
    let total: f64 = legal
        .iter()
        .map(|g| {
            let mut next = s.clone();
            next.apply_guess(*g).unwrap();
            random_continuation_value(&next, root)
        })
        .sum();
    total / legal.len() as f64
}

fn permutations(items: &[Tile]) -> Vec<Vec<Tile>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Exact value of every root guess, averaged over all consistent hidden
/// assignments and all pool orders (jokerless games only).
pub fn exhaustive_root_values(obs: &Observation) -> BTreeMap<Guess, f64> {
    let slots = hidden_slots(obs);
    let free = unaccounted(obs);
    let root_guesses = legal_guesses(obs).unwrap();
    let mut sums: BTreeMap<Guess, f64> = root_guesses.iter().map(|g| (*g, 0.0)).collect();
    let mut worlds = 0usize;
    for assignment in enumerate_assignments(obs) {
        let pool: Vec<Tile> = free.iter().copied().filter(|t| !assignment.contains(t)).collect();
        for order in permutations(&pool) {
            let mut lines: Vec<Line> = Vec::new();
            let mut opp = 0;
            for p in 0..obs.players() {
                if p == obs.viewer {
                    lines.push(obs.own_line.clone());
                } else {
                    let view = &obs.opponent_lines[opp];
                    let entries = view
                        .entries
                        .iter()
                        .enumerate()
                        .map(|(pos, s)| match s.value {
                            Some(v) => TileEntry { tile: Tile::new(s.color, v), revealed: true },
                            None => {
                                let i = slots.iter().position(|&(sl, sp, _)| sl == opp && sp == pos).unwrap();
                                TileEntry::hidden(assignment[i])
                            }
                        })
                        .collect();
                    lines.push(Line { entries });
                    opp += 1;
                }
            }
            let mut rules = obs.rules;
            rules.consecutive_guessing = false;
            let state = GameState {
                rules,
                pool: order,
                lines,
                current_player: obs.current_player,
                pending_drawn: obs.pending_drawn,
                eliminated: obs.eliminated.clone(),
                phase: obs.phase,
                correct_this_turn: 0,
            };
            worlds += 1;
            for g in &root_guesses {
                let mut next = state.clone();
                next.apply_guess(*g).unwrap();
                *sums.get_mut(g).unwrap() += random_continuation_value(&next, obs.viewer);
            }
        }
    }
    sums.values_mut().for_each(|v| *v /= worlds as f64);
    sums
}

/// A tiny-game position awaiting a guess, with the exact value of every
/// legal guess for the player to move.
pub struct TinyPosition {
    pub obs: Observation,
    pub values: BTreeMap<Guess, f64>,
}

impl TinyPosition {
    pub fn best_value(&self) -> f64 {
        self.values.values().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Best value minus the best value among non-optimal guesses.
    pub fn margin(&self) -> f64 {
        let best = self.best_value();
        let runner = self.values.values().copied().filter(|v| *v < best - 1e-9).fold(f64::NEG_INFINITY, f64::max);
        best - runner
    }

    pub fn is_optimal(&self, guess: &Guess) -> bool {
        self.values.get(guess).is_some_and(|v| *v >= self.best_value() - 1e-9)
    }
}

/// Distinct tiny-game positions reached by uniformly random play, keeping
/// those where some guess is worse than the best by at least `margin`.
pub fn tiny_positions(margin: f64, limit: usize, seed: u64) -> Vec<TinyPosition> {
    let mut r = rng(seed);
    let mut out: Vec<TinyPosition> = Vec::new();
    for game_seed in 0..20_000u64 {
        let mut g = GameState::new(tiny_rules(), game_seed).unwrap();
        while !g.is_terminal() {
            advance_to_guess(&mut g, &mut r);
            if g.is_terminal() {
                break;
            }
            let obs = observe(&g, g.current_player);
            if !out.iter().any(|p| p.obs == obs) {
                let values = exhaustive_root_values(&obs);
                let pos = TinyPosition { obs, values };
                if pos.margin() >= margin {
                    out.push(pos);
                    if out.len() >= limit {
                        return out;
                    }
                }
            }
            let legal = legal_guesses(&observe(&g, g.current_player)).unwrap();
            g.apply_guess(*legal.choose(&mut r).unwrap()).unwrap();
        }
    }
    out
}

/// Exact expectations for a warp whose lanes draw i.i.d. from `lengths`:
/// (mean per-warp efficiency, mean per-warp cycle count).
pub fn closed_form_warp(lengths: &[u32], width: usize) -> (f64, f64) {
    let n = lengths.len() as f64;
    let mut pmf: BTreeMap<u32, f64> = BTreeMap::new();
    for &l in lengths {
        *pmf.entry(l).or_default() += 1.0 / n;
    }
    let support: Vec<u32> = pmf.keys().copied().collect();
    let cdf = |x: u32| -> f64 { pmf.range(..=x).map(|(_, p)| p).sum() };
    let below = |x: u32| -> f64 { pmf.range(..x).map(|(_, p)| p).sum() };
    // P(max of k lanes == m)
    let max_pmf = |k: usize, m: u32| -> f64 { cdf(m).powi(k as i32) - below(m).powi(k as i32) };

    let cycles: f64 = support.iter().map(|&m| m as f64 * max_pmf(width, m)).sum();
    let efficiency = if width == 1 {
        1.0
    } else {
        support
            .iter()
            .map(|&a| {
                let pa = pmf[&a];
                let inner: f64 = support.iter().map(|&m| max_pmf(width - 1, m) * a as f64 / a.max(m) as f64).sum();
                pa * inner
            })
            .sum()
    };
    (efficiency, cycles)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
