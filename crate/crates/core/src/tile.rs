//! Tiles, their comparator and the line they are kept in.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Highest rank a tile can carry in the full game.
pub const MAX_RANK: u8 = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Color {
    #[serde(rename = "B")]
    Black,
    #[serde(rename = "W")]
    White,
}

impl Color {
    pub const ALL: [Color; 2] = [Color::Black, Color::White];

    pub fn index(self) -> usize {
        match self {
            Color::Black => 0,
            Color::White => 1,
        }
    }
}

/// A tile face. `Rank` orders before `Joker`, which is the order guesses are listed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Rank(u8),
    Joker,
}

impl Value {
    /// Bit used for this value in per-color tile masks.
    pub(crate) fn bit(self) -> u16 {
        match self {
            Value::Rank(r) => 1 << r,
            Value::Joker => JOKER_BIT,
        }
    }
}

pub(crate) const JOKER_BIT: u16 = 1 << 15;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValueRepr {
    Rank(u8),
    Joker(String),
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match *self {
            Value::Rank(r) => serializer.serialize_u8(r),
            Value::Joker => serializer.serialize_str("J"),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match ValueRepr::deserialize(deserializer)? {
            ValueRepr::Rank(r) if r <= MAX_RANK => Ok(Value::Rank(r)),
            ValueRepr::Rank(r) => Err(serde::de::Error::custom(format!("rank {r} out of range"))),
            ValueRepr::Joker(s) if s == "J" => Ok(Value::Joker),
            ValueRepr::Joker(s) => Err(serde::de::Error::custom(format!("unknown tile value {s:?}"))),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Rank(r) => write!(f, "{r}"),
            Value::Joker => f.write_str("J"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tile {
    pub color: Color,
    pub value: Value,
}

impl Tile {
    pub const fn new(color: Color, value: Value) -> Self {
        Tile { color, value }
    }

    pub const fn rank(color: Color, rank: u8) -> Self {
        Tile { color, value: Value::Rank(rank) }
    }

    pub const fn joker(color: Color) -> Self {
        Tile { color, value: Value::Joker }
    }

    pub fn is_joker(&self) -> bool {
        self.value == Value::Joker
    }

    /// Position of a ranked tile in the total order B0 < W0 < B1 < W1 < ...
    pub(crate) fn order_index(&self) -> Option<usize> {
        match self.value {
            Value::Rank(r) => Some(2 * r as usize + self.color.index()),
            Value::Joker => None,
        }
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.color {
            Color::Black => 'B',
            Color::White => 'W',
        };
        write!(f, "{c}{}", self.value)
    }
}

/// Result of comparing two tiles for placement in a line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotOrdering {
    Less,
    /// The pair imposes no order; jokers may sit anywhere.
    EqualSlot,
    Greater,
}

/// Placement comparator: ranks ascend, Black precedes White on equal ranks,
/// and a joker compares as [`SlotOrdering::EqualSlot`] against everything.
pub fn compare_tiles(a: Tile, b: Tile) -> SlotOrdering {
    match (a.order_index(), b.order_index()) {
        (Some(x), Some(y)) if x < y => SlotOrdering::Less,
        (Some(x), Some(y)) if x > y => SlotOrdering::Greater,
        _ => SlotOrdering::EqualSlot,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TileEntry {
    pub tile: Tile,
    pub revealed: bool,
}

impl TileEntry {
    pub fn hidden(tile: Tile) -> Self {
        TileEntry { tile, revealed: false }
    }
}

/// One player's row of tiles, left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Line {
    pub entries: Vec<TileEntry>,
}

impl Line {
    pub fn new() -> Self {
        Line::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn hidden_count(&self) -> usize {
        self.entries.iter().filter(|e| !e.revealed).count()
    }

    pub fn revealed_count(&self) -> usize {
        self.entries.iter().filter(|e| e.revealed).count()
    }

    /// Slot a ranked tile goes to: directly before the first strictly greater
    /// ranked entry, i.e. after any equal-slot entries preceding it.
    pub fn sorted_slot(&self, tile: Tile) -> usize {
        self.entries
            .iter()
            .position(|e| compare_tiles(e.tile, tile) == SlotOrdering::Greater)
            .unwrap_or(self.entries.len())
    }

    /// Inserts a ranked tile at its sorted slot and returns the index used.
    pub fn insert_sorted(&mut self, tile: Tile) -> usize {
        debug_assert!(!tile.is_joker());
        let slot = self.sorted_slot(tile);
        self.entries.insert(slot, TileEntry::hidden(tile));
        slot
    }

    pub fn insert_at(&mut self, slot: usize, tile: Tile) {
        self.entries.insert(slot, TileEntry::hidden(tile));
    }

    /// True when ranked entries ascend strictly under the comparator.
    pub fn is_sorted(&self) -> bool {
        let mut last: Option<usize> = None;
        for e in &self.entries {
            if let Some(idx) = e.tile.order_index() {
                if last.is_some_and(|l| l >= idx) {
                    return false;
                }
                last = Some(idx);
            }
        }
        true
    }

    pub fn tiles(&self) -> impl Iterator<Item = Tile> + '_ {
        self.entries.iter().map(|e| e.tile)
    }
}
