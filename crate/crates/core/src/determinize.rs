//! Sampling full game states consistent with an observation.
//!
//! Hidden opponent slots must receive unaccounted tiles of their color such
//! that every line stays sorted. Sortedness couples the two colors (a black
//! slot left of a white slot bounds both), so the sampler works on the single
//! total order B0 < W0 < B1 < ... and counts completions with a dynamic
//! program whose state is how far each opponent line has been filled.
//! Jokers sit outside that order: every way of placing the unaccounted jokers
//! (pool or a hidden slot of their color) gets its own table, and placements
//! are chosen in proportion to their completion counts. The result is exactly
//! uniform over consistent assignments; pool order is a uniform shuffle.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::observation::Observation;
use crate::state::{GameState, Phase};
use crate::tile::{Color, Line, Tile, TileEntry};

/// A hidden opponent slot: index into `opponent_lines`, position, color.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct HiddenSlot {
    line: usize,
    position: usize,
    color: Color,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Item {
    Fixed,
    Hidden { slot: usize, color: Color },
}

#[derive(Debug, Clone, Copy)]
enum TileStatus {
    Free,
    Fixed { line: usize, item: usize },
    Absent,
}

/// Completion counts for one joker placement.
#[derive(Debug, Clone)]
struct RankedTable {
    items: Vec<Vec<Item>>,
    strides: Vec<usize>,
    states: usize,
    /// `counts[t * states + s]`: completions from tile `t` with fill state `s`.
    counts: Vec<u128>,
}

impl RankedTable {
    fn build(items: Vec<Vec<Item>>, status: &[TileStatus]) -> Self {
        let mut strides = Vec::with_capacity(items.len());
        let mut states = 1;
        for line in &items {
            strides.push(states);
            states *= line.len() + 1;
        }
        let tiles = status.len();
        let mut counts = vec![0u128; (tiles + 1) * states];
        let full: usize = items.iter().zip(&strides).map(|(l, s)| l.len() * s).sum();
        counts[tiles * states + full] = 1;

        let mut fill = vec![0usize; items.len()];
        for t in (0..tiles).rev() {
            let color = order_color(t);
            for s in 0..states {
                decode(s, &items, &mut fill);
                let next = |delta: usize| counts[(t + 1) * states + s + delta];
                let c = match status[t] {
                    TileStatus::Absent => next(0),
                    TileStatus::Fixed { line, item } => {
                        if fill[line] == item {
                            next(strides[line])
                        } else {
                            0
                        }
                    }
                    TileStatus::Free => {
                        let mut c = next(0);
                        for (l, line) in items.iter().enumerate() {
                            if let Some(Item::Hidden { color: slot_color, .. }) = line.get(fill[l]) {
                                if *slot_color == color {
                                    c += next(strides[l]);
                                }
                            }
                        }
                        c
                    }
                };
                counts[t * states + s] = c;
            }
        }
        RankedTable { items, strides, states, counts }
    }

    fn total(&self) -> u128 {
        self.counts[0]
    }

    /// Walks the table forward, returning `(hidden slot index, tile)` pairs.
    fn sample<R: Rng + ?Sized>(&self, status: &[TileStatus], rng: &mut R, out: &mut Vec<(usize, Tile)>) {
        let mut fill = vec![0usize; self.items.len()];
        let mut s = 0;
        for (t, st) in status.iter().enumerate() {
            let next = |delta: usize| self.counts[(t + 1) * self.states + s + delta];
            match *st {
                TileStatus::Absent => {}
                TileStatus::Fixed { line, .. } => {
                    fill[line] += 1;
                    s += self.strides[line];
                }
                TileStatus::Free => {
                    let here = self.counts[t * self.states + s];
                    let mut pick = rng.gen_range(0..here);
                    let to_pool = next(0);
                    if pick < to_pool {
                        continue;
                    }
                    pick -= to_pool;
                    let color = order_color(t);
                    for (l, line) in self.items.iter().enumerate() {
                        if let Some(&Item::Hidden { slot, color: slot_color }) = line.get(fill[l]) {
                            if slot_color != color {
                                continue;
                            }
                            let w = next(self.strides[l]);
                            if pick < w {
                                out.push((slot, order_tile(t)));
                                fill[l] += 1;
                                s += self.strides[l];
                                break;
                            }
                            pick -= w;
                        }
                    }
                }
            }
        }
    }
}

fn decode(mut s: usize, items: &[Vec<Item>], fill: &mut [usize]) {
    for (l, line) in items.iter().enumerate() {
        let radix = line.len() + 1;
        fill[l] = s % radix;
        s /= radix;
    }
}

fn order_color(t: usize) -> Color {
    if t.is_multiple_of(2) {
        Color::Black
    } else {
        Color::White
    }
}

fn order_tile(t: usize) -> Tile {
    Tile::rank(order_color(t), (t / 2) as u8)
}

#[derive(Debug, Clone)]
struct JokerPlacement {
    /// Each unaccounted joker with the hidden slot it fills, or `None` for the pool.
    jokers: Vec<(Tile, Option<usize>)>,
    status: Vec<TileStatus>,
    table: RankedTable,
}

/// Precomputed sampler for one observation.
#[derive(Debug, Clone)]
pub struct Determinizer {
    obs: Observation,
    slots: Vec<HiddenSlot>,
    unaccounted: Vec<Tile>,
    placements: Vec<JokerPlacement>,
    total: u128,
}

impl Determinizer {
    pub fn new(obs: &Observation) -> Result<Self> {
        if obs.phase == Phase::Terminal {
            return Err(Error::Protocol("cannot determinize a finished game".into()));
        }
        if obs.viewer != obs.current_player {
            return Err(Error::Protocol("determinization is only defined for the player to move".into()));
        }
        let known = obs.known_tiles();
        let unaccounted: Vec<Tile> = obs.rules.tile_set().into_iter().filter(|t| !known.contains(*t)).collect();

        let mut slots = Vec::new();
        for (l, line) in obs.opponent_lines.iter().enumerate() {
            for (position, s) in line.entries.iter().enumerate() {
                if s.value.is_none() {
                    slots.push(HiddenSlot { line: l, position, color: s.color });
                }
            }
        }
        let on_pool = obs.pool_size.checked_sub(obs.drawn_joker.is_some() as usize);
        if on_pool != unaccounted.len().checked_sub(slots.len()) {
            return Err(Error::Inconsistent(format!(
                "{} unaccounted tiles cannot fill {} hidden slots and a pool of {}",
                unaccounted.len(),
                slots.len(),
                obs.pool_size
            )));
        }

        let jokers: Vec<Tile> = unaccounted.iter().copied().filter(Tile::is_joker).collect();
        let mut combos: Vec<Vec<(Tile, Option<usize>)>> = vec![Vec::new()];
        for j in &jokers {
            let mut options = vec![None];
            options.extend(slots.iter().enumerate().filter(|(_, s)| s.color == j.color).map(|(i, _)| Some(i)));
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    options.iter().map(move |o| {
                        let mut c = c.clone();
                        c.push((*j, *o));
                        c
                    })
                })
                .collect();
        }

        let mut placements = Vec::new();
        let mut total = 0u128;
        for combo in combos {
            let joker_slots: Vec<usize> = combo.iter().filter_map(|(_, s)| *s).collect();
            let (items, status) = Self::ranked_problem(obs, &slots, &joker_slots, &unaccounted);
            let table = RankedTable::build(items, &status);
            if table.total() > 0 {
                total += table.total();
                placements.push(JokerPlacement { jokers: combo, status, table });
            }
        }
        if total == 0 {
            return Err(Error::Inconsistent("no assignment of hidden tiles keeps every line sorted".into()));
        }
        Ok(Determinizer { obs: obs.clone(), slots, unaccounted, placements, total })
    }

    fn ranked_problem(
        obs: &Observation,
        slots: &[HiddenSlot],
        joker_slots: &[usize],
        unaccounted: &[Tile],
    ) -> (Vec<Vec<Item>>, Vec<TileStatus>) {
        let tiles = 2 * obs.rules.ranks as usize;
        let mut status = vec![TileStatus::Absent; tiles];
        for t in unaccounted {
            if let Some(i) = t.order_index() {
                status[i] = TileStatus::Free;
            }
        }
        let mut items = Vec::with_capacity(obs.opponent_lines.len());
        let mut slot_iter = 0;
        for (l, line) in obs.opponent_lines.iter().enumerate() {
            let mut row = Vec::new();
            for s in &line.entries {
                match s.value {
                    Some(value) => {
                        let tile = Tile::new(s.color, value);
                        if let Some(i) = tile.order_index() {
                            if i < tiles {
                                status[i] = TileStatus::Fixed { line: l, item: row.len() };
                            }
                            row.push(Item::Fixed);
                        }
                    }
                    None => {
                        let slot = slot_iter;
                        slot_iter += 1;
                        debug_assert_eq!(slots[slot].line, l);
                        if !joker_slots.contains(&slot) {
                            row.push(Item::Hidden { slot, color: s.color });
                        }
                    }
                }
            }
            items.push(row);
        }
        (items, status)
    }

    /// Number of consistent hidden-slot assignments (pool order not counted).
    pub fn consistent_assignments(&self) -> u128 {
        self.total
    }

    /// Draws one full state uniformly among the consistent assignments.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> GameState {
        let mut pick = rng.gen_range(0..self.total);
        let placement = self
            .placements
            .iter()
            .find(|p| {
                if pick < p.table.total() {
                    true
                } else {
                    pick -= p.table.total();
                    false
                }
            })
            .expect("pick is below the total weight");

        let mut assigned: Vec<(usize, Tile)> = placement.jokers.iter().filter_map(|(t, s)| s.map(|s| (s, *t))).collect();
        placement.table.sample(&placement.status, rng, &mut assigned);

        let obs = &self.obs;
        let mut lines: Vec<Line> = Vec::with_capacity(obs.players());
        let mut opponent_entries: Vec<Vec<Option<TileEntry>>> = obs
            .opponent_lines
            .iter()
            .map(|l| {
                l.entries
                    .iter()
                    .map(|s| s.value.map(|v| TileEntry { tile: Tile::new(s.color, v), revealed: true }))
                    .collect()
            })
            .collect();
        let mut used = Vec::with_capacity(assigned.len());
        for (slot, tile) in assigned {
            let s = self.slots[slot];
            opponent_entries[s.line][s.position] = Some(TileEntry::hidden(tile));
            used.push(tile);
        }
        let mut opponents = opponent_entries
            .into_iter()
            .map(|entries| Line { entries: entries.into_iter().map(|e| e.expect("every hidden slot assigned")).collect() });
        for p in 0..obs.players() {
            if p == obs.viewer {
                lines.push(obs.own_line.clone());
            } else {
                lines.push(opponents.next().expect("one line per opponent"));
            }
        }

        let mut pool: Vec<Tile> = self.unaccounted.iter().copied().filter(|t| !used.contains(t)).collect();
        pool.shuffle(rng);
        if let Some(color) = obs.drawn_joker {
            pool.insert(0, Tile::joker(color));
        }

        let eliminated = if obs.eliminated.len() == lines.len() {
            obs.eliminated.clone()
        } else {
            lines.iter().map(|l| l.hidden_count() == 0).collect()
        };
        GameState {
            rules: obs.rules,
            pool,
            lines,
            current_player: obs.current_player,
            pending_drawn: obs.pending_drawn,
            eliminated,
            phase: obs.phase,
            correct_this_turn: obs.correct_this_turn,
        }
    }
}

/// One consistent full state for `obs`, uniform over hidden assignments.
pub fn sample_determinization<R: Rng + ?Sized>(obs: &Observation, rng: &mut R) -> Result<GameState> {
    Ok(Determinizer::new(obs)?.sample(rng))
}
