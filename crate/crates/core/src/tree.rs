//! Guess-keyed search tree.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::observation::Observation;
use crate::state::Guess;
use crate::tile::Value;

/// A tree edge: the guess alone. The hidden-tile assignment a simulation ran
/// under is deliberately not part of the key, so every determinization shares
/// the same children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeKey {
    pub target: usize,
    pub position: usize,
    pub value: Value,
}

impl From<Guess> for NodeKey {
    fn from(g: Guess) -> Self {
        NodeKey { target: g.target, position: g.position, value: g.value }
    }
}

impl From<NodeKey> for Guess {
    fn from(k: NodeKey) -> Self {
        Guess { target: k.target, position: k.position, value: k.value }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchNode {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<NodeKey>,
    pub visits: u64,
    /// Simulations through this node won by the root player.
    pub wins: u64,
    pub depth: u32,
    #[serde(serialize_with = "children_as_list", deserialize_with = "children_from_list", default)]
    pub children: BTreeMap<NodeKey, SearchNode>,
}

fn children_as_list<S: Serializer>(children: &BTreeMap<NodeKey, SearchNode>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(children.values())
}

fn children_from_list<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<NodeKey, SearchNode>, D::Error> {
    let list = Vec::<SearchNode>::deserialize(d)?;
    list.into_iter()
        .map(|n| n.key.map(|k| (k, n)).ok_or_else(|| serde::de::Error::custom("child node without a key")))
        .collect()
}

impl SearchNode {
    pub fn root() -> Self {
        SearchNode::default()
    }

    pub fn child(key: NodeKey, depth: u32) -> Self {
        SearchNode { key: Some(key), depth, ..SearchNode::default() }
    }

    pub fn win_rate(&self) -> f64 {
        if self.visits == 0 {
            0.0
        } else {
            self.wins as f64 / self.visits as f64
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.values().map(SearchNode::node_count).sum::<usize>()
    }

    /// Depth of the deepest node below (and including) this one.
    pub fn max_depth(&self) -> u32 {
        self.children.values().map(SearchNode::max_depth).max().unwrap_or(self.depth)
    }

    /// Visits `f` on every node, parents before children.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a SearchNode)) {
        f(self);
        for c in self.children.values() {
            c.walk(f);
        }
    }
}

/// Result of one search: the tree plus enough identity to refuse merging
/// trees grown from different positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchTree {
    pub root_player: usize,
    pub observation_digest: u64,
    pub root: SearchNode,
}

impl SearchTree {
    pub fn new(obs: &Observation) -> Self {
        SearchTree { root_player: obs.viewer, observation_digest: observation_digest(obs), root: SearchNode::root() }
    }

    pub fn children(&self) -> impl Iterator<Item = &SearchNode> {
        self.root.children.values()
    }
}

/// FNV-1a over the observation's JSON encoding.
pub fn observation_digest(obs: &Observation) -> u64 {
    let bytes = serde_json::to_vec(obs).expect("observations always serialize");
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ *b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// UCB1 score; unvisited children score `+inf`.
pub fn ucb1(child_wins: u64, child_visits: u64, parent_visits: u64, c: f64) -> f64 {
    if child_visits == 0 {
        return f64::INFINITY;
    }
    let n = child_visits as f64;
    child_wins as f64 / n + c * ((parent_visits as f64).ln() / n).sqrt()
}

/// Most-visited root child; ties go to more wins, then the smallest key.
pub fn best_guess(tree: &SearchTree) -> Result<Guess> {
    tree.root
        .children
        .values()
        .filter(|c| c.visits > 0)
        .min_by(|a, b| b.visits.cmp(&a.visits).then(b.wins.cmp(&a.wins)).then(a.key.cmp(&b.key)))
        .and_then(|c| c.key)
        .map(Guess::from)
        .ok_or_else(|| Error::Protocol("search tree has no visited root child".into()))
}
