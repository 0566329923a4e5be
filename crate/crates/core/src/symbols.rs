//! Unit-interval symbol identifiers.
//!
//! Every generator column of a symbolic set is labelled by the identifier of
//! the symbol it multiplies. Two sets share a dependency exactly when they
//! share an identifier, so identifiers handed out for independent quantities
//! (neuron errors, disturbances, reduction boxes) must never collide.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

/// Identifier of a symbol valued in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u64);

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// Hands out fresh identifiers from a monotone counter.
///
/// One provider backs one verification session. The counter is atomic, so a
/// shared `&SymbolProvider` may be used from several threads.
#[derive(Debug, Default)]
pub struct SymbolProvider {
    next: AtomicU64,
}

impl SymbolProvider {
    pub fn new() -> Self {
        Self::starting_at(0)
    }

    pub fn starting_at(first: u64) -> Self {
        Self {
            next: AtomicU64::new(first),
        }
    }

    /// A provider whose identifiers are all larger than every id in `ids`.
    pub fn after<'a>(ids: impl IntoIterator<Item = &'a SymbolId>) -> Self {
        let first = ids.into_iter().map(|id| id.0 + 1).max().unwrap_or(0);
        Self::starting_at(first)
    }

    pub fn fresh(&self) -> SymbolId {
        self.fresh_ids(1)[0]
    }

    pub fn fresh_ids(&self, n: usize) -> Vec<SymbolId> {
        if n == 0 {
            return Vec::new();
        }
        let n = n as u64;
        let start = self
            .next
            .fetch_update(Ordering::Relaxed, Ordering::Relaxed, |cur| cur.checked_add(n))
            .expect("symbol identifier space exhausted");
        (start..start + n).map(SymbolId).collect()
    }

    /// Next identifier that would be issued.
    pub fn peek(&self) -> u64 {
        self.next.load(Ordering::Relaxed)
    }
}

/// Common symbol ordering for two identifier vectors.
///
/// `ids` is `[I ∩ J; I \ J; J \ I]`, each block in order of first appearance
/// in the left (resp. right) operand. `left[k]` is the position in `ids` of
/// the `k`-th column of the left operand; `right` likewise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub ids: Vec<SymbolId>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

pub fn align(left: &[SymbolId], right: &[SymbolId]) -> Alignment {
    if left == right {
        let idx: Vec<usize> = (0..left.len()).collect();
        return Alignment {
            ids: left.to_vec(),
            left: idx.clone(),
            right: idx,
        };
    }
    let right_pos: HashMap<SymbolId, usize> =
        right.iter().enumerate().map(|(k, &id)| (id, k)).collect();

    let mut ids = Vec::with_capacity(left.len() + right.len());
    let mut left_map = vec![usize::MAX; left.len()];
    let mut right_map = vec![usize::MAX; right.len()];

    for (k, id) in left.iter().enumerate() {
        if let Some(&rk) = right_pos.get(id) {
            left_map[k] = ids.len();
            right_map[rk] = ids.len();
            ids.push(*id);
        }
    }
    for (k, id) in left.iter().enumerate() {
        if !right_pos.contains_key(id) {
            left_map[k] = ids.len();
            ids.push(*id);
        }
    }
    for (k, id) in right.iter().enumerate() {
        if right_map[k] == usize::MAX {
            right_map[k] = ids.len();
            ids.push(*id);
        }
    }
    Alignment {
        ids,
        left: left_map,
        right: right_map,
    }
}
