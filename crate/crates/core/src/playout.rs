//! Uniform-random play on full-information states.

use rand::Rng;

use crate::state::{Drawn, GameState, Guess, Phase};
use crate::tile::Value;

/// Summary of one random game played to the end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlayoutResult {
    pub winner: usize,
    /// Guesses resolved; with one guess per turn this is the turn count.
    pub turns: u32,
    pub correct_guesses: u32,
}

/// Draws and, for a joker, places it at a uniformly random slot, so that the
/// state ends up waiting for a guess (or terminal).
pub fn advance_to_guess<R: Rng + ?Sized>(state: &mut GameState, rng: &mut R) {
    if state.phase == Phase::AwaitDraw {
        if let Ok(Drawn::Joker { slots, .. }) = state.draw() {
            let slot = rng.gen_range(0..slots);
            state.place_joker(slot).expect("slot drawn from the legal range");
        }
    } else if state.phase == Phase::AwaitJokerPlacement {
        let slots = state.lines[state.current_player].len() + 1;
        state.place_joker(rng.gen_range(0..slots)).expect("slot drawn from the legal range");
    }
}

/// Number of guesses the current player can make given what they see.
pub fn legal_guess_count(state: &GameState) -> usize {
    let me = state.current_player;
    let known = state.known_to(me);
    let per_color = [crate::tile::Color::Black, crate::tile::Color::White]
        .map(|c| known.unknown_mask(c, &state.rules).count_ones() as usize);
    state
        .lines
        .iter()
        .enumerate()
        .filter(|(p, _)| *p != me)
        .flat_map(|(_, line)| line.entries.iter())
        .filter(|e| !e.revealed)
        .map(|e| per_color[e.tile.color.index()])
        .sum()
}

/// The current player's legal guesses, in the same order as
/// [`crate::observation::legal_guesses`].
pub fn current_legal_guesses(state: &GameState) -> Vec<Guess> {
    let me = state.current_player;
    let known = state.known_to(me);
    let mut out = Vec::new();
    for (target, line) in state.lines.iter().enumerate() {
        if target == me {
            continue;
        }
        for (position, e) in line.entries.iter().enumerate() {
            if !e.revealed {
                for value in known.candidates(e.tile.color, &state.rules) {
                    out.push(Guess { target, position, value });
                }
            }
        }
    }
    out
}

/// A guess drawn uniformly from the current player's legal guesses, without
/// materialising the list.
pub fn random_guess<R: Rng + ?Sized>(state: &GameState, rng: &mut R) -> Option<Guess> {
    let me = state.current_player;
    let known = state.known_to(me);
    let masks = [crate::tile::Color::Black, crate::tile::Color::White].map(|c| known.unknown_mask(c, &state.rules));
    let total = legal_guess_count(state);
    if total == 0 {
        return None;
    }
    let mut pick = rng.gen_range(0..total);
    for (target, line) in state.lines.iter().enumerate() {
        if target == me {
            continue;
        }
        for (position, e) in line.entries.iter().enumerate() {
            if e.revealed {
                continue;
            }
            let mask = masks[e.tile.color.index()];
            let n = mask.count_ones() as usize;
            if pick < n {
                return Some(Guess { target, position, value: nth_value(mask, pick) });
            }
            pick -= n;
        }
    }
    unreachable!("pick is below the total count")
}

fn nth_value(mask: u16, n: usize) -> Value {
    let mut seen = 0;
    for bit in 0..16u8 {
        if mask & (1 << bit) != 0 {
            if seen == n {
                return if bit == 15 { Value::Joker } else { Value::Rank(bit) };
            }
            seen += 1;
        }
    }
    unreachable!("mask has more than n bits set")
}

/// Plays uniformly random legal actions until the game ends.
pub fn random_playout<R: Rng + ?Sized>(state: &mut GameState, rng: &mut R) -> PlayoutResult {
    let mut turns = 0;
    let mut correct_guesses = 0;
    loop {
        advance_to_guess(state, rng);
        if state.phase == Phase::Terminal {
            break;
        }
        let guess = random_guess(state, rng).expect("a live opponent always has a hidden tile");
        let outcome = state.apply_guess(guess).expect("random guesses are legal");
        turns += 1;
        if outcome.correct {
            correct_guesses += 1;
        }
        if state.phase == Phase::Terminal {
            break;
        }
    }
    PlayoutResult { winner: state.winner().expect("terminal state has a winner"), turns, correct_guesses }
}
