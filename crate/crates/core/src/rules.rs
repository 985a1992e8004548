use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tile::{Color, Tile, MAX_RANK};

fn default_tiles_per_player() -> usize {
    4
}

fn default_players() -> usize {
    2
}

fn default_ranks() -> u8 {
    MAX_RANK + 1
}

/// Rule flags for one game.
///
/// `consecutive_guessing = true` is the original game where a correct guess
/// lets the player keep guessing; `false` is the simplified variant in which
/// every turn ends after its single guess. `ranks` shrinks the numbered tiles
/// to `0..ranks`, which is only meant for tiny exhaustively-solvable games.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleSet {
    pub consecutive_guessing: bool,
    pub include_jokers: bool,
    #[serde(default = "default_tiles_per_player")]
    pub tiles_per_player: usize,
    #[serde(default = "default_players")]
    pub players: usize,
    #[serde(default = "default_ranks")]
    pub ranks: u8,
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet {
            consecutive_guessing: true,
            include_jokers: true,
            tiles_per_player: default_tiles_per_player(),
            players: default_players(),
            ranks: default_ranks(),
        }
    }
}

impl RuleSet {
    /// One guess per turn, the variant the search plays internally.
    pub fn simplified() -> Self {
        RuleSet { consecutive_guessing: false, ..RuleSet::default() }
    }

    pub fn tile_count(&self) -> usize {
        2 * self.ranks as usize + if self.include_jokers { 2 } else { 0 }
    }

    /// Every tile of the configured set, ranked tiles in comparator order, jokers last.
    pub fn tile_set(&self) -> Vec<Tile> {
        let mut tiles = Vec::with_capacity(self.tile_count());
        for r in 0..self.ranks {
            for c in Color::ALL {
                tiles.push(Tile::rank(c, r));
            }
        }
        if self.include_jokers {
            tiles.extend(Color::ALL.map(Tile::joker));
        }
        tiles
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=4).contains(&self.players) {
            return Err(Error::Config(format!("players must be 2, 3 or 4, got {}", self.players)));
        }
        if self.tiles_per_player == 0 {
            return Err(Error::Config("tiles_per_player must be at least 1".into()));
        }
        if self.ranks == 0 || self.ranks > MAX_RANK + 1 {
            return Err(Error::Config(format!("ranks must be in 1..=12, got {}", self.ranks)));
        }
        if self.players * self.tiles_per_player > self.tile_count() {
            return Err(Error::Config(format!(
                "{} players x {} tiles exceeds the {}-tile set",
                self.players,
                self.tiles_per_player,
                self.tile_count()
            )));
        }
        Ok(())
    }
}
