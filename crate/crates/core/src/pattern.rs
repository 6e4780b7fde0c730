//! Fixed-length patterns with wildcard slots, exact matching, and the
//! generalization lattice.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::{Alphabet, Symbol, SymbolSequence, WILDCARD};

/// One position of a [`Pattern`].
///
/// Concrete symbols order before the wildcard, which fixes the
/// slot-lexicographic order used to sort miner output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Slot {
    Symbol(Symbol),
    Wildcard,
}

impl Slot {
    pub fn symbol(self) -> Option<Symbol> {
        match self {
            Slot::Symbol(s) => Some(s),
            Slot::Wildcard => None,
        }
    }

    pub fn is_wildcard(self) -> bool {
        matches!(self, Slot::Wildcard)
    }
}

/// A tuple of slots. Its length is the period; at least one slot is concrete.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pattern {
    slots: Vec<Slot>,
}

impl Pattern {
    pub fn new(slots: Vec<Slot>) -> Result<Self> {
        if slots.iter().all(|s| s.is_wildcard()) {
            return Err(Error::EmptyPattern);
        }
        Ok(Pattern { slots })
    }

    /// Builds a pattern from raw ids, `None` standing for a wildcard.
    pub fn from_ids(ids: &[Option<u32>]) -> Result<Self> {
        Pattern::new(
            ids.iter()
                .map(|id| id.map_or(Slot::Wildcard, |i| Slot::Symbol(Symbol(i))))
                .collect(),
        )
    }

    /// A wildcard-free pattern.
    pub fn concrete(symbols: &[Symbol]) -> Result<Self> {
        Pattern::new(symbols.iter().copied().map(Slot::Symbol).collect())
    }

    /// `symbol` at `offset`, wildcards elsewhere.
    pub fn single(symbol: Symbol, offset: usize, period: usize) -> Self {
        assert!(offset < period, "offset {offset} outside period {period}");
        let mut slots = vec![Slot::Wildcard; period];
        slots[offset] = Slot::Symbol(symbol);
        Pattern { slots }
    }

    /// Parses `a b *`, `a,b,*` or `(a,b,*)` against an alphabet.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let trimmed = text.trim();
        let inner = trimmed
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .unwrap_or(trimmed);
        let slots = inner
            .split(|c: char| c == ',' || c.is_ascii_whitespace())
            .filter(|t| !t.is_empty())
            .map(|tok| {
                if tok == WILDCARD {
                    Ok(Slot::Wildcard)
                } else {
                    alphabet.lookup(tok).map(Slot::Symbol)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Pattern::new(slots)
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn period(&self) -> usize {
        self.slots.len()
    }

    /// Number of concrete slots.
    pub fn arity(&self) -> usize {
        self.slots.iter().filter(|s| !s.is_wildcard()).count()
    }

    pub fn has_wildcards(&self) -> bool {
        self.slots.iter().any(|s| s.is_wildcard())
    }

    /// `(offset, symbol)` for every concrete slot.
    pub fn concrete_slots(&self) -> impl Iterator<Item = (usize, Symbol)> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.symbol().map(|sym| (i, sym)))
    }

    /// Union of two same-period patterns that agree wherever both are concrete.
    pub fn join(&self, other: &Pattern) -> Option<Pattern> {
        if self.period() != other.period() {
            return None;
        }
        let mut slots = Vec::with_capacity(self.period());
        for (a, b) in self.slots.iter().zip(&other.slots) {
            slots.push(match (a, b) {
                (Slot::Wildcard, x) | (x, Slot::Wildcard) => *x,
                (x, y) if x == y => *x,
                _ => return None,
            });
        }
        Some(Pattern { slots })
    }

    /// The pattern with the concrete slot at `offset` replaced by a wildcard,
    /// or `None` if that would leave no concrete slot.
    pub fn without_slot(&self, offset: usize) -> Option<Pattern> {
        let mut slots = self.slots.clone();
        slots[offset] = Slot::Wildcard;
        Pattern::new(slots).ok()
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        let parts: Vec<&str> = self
            .slots
            .iter()
            .map(|s| match s {
                Slot::Symbol(sym) => alphabet.name(*sym),
                Slot::Wildcard => WILDCARD,
            })
            .collect();
        format!("({})", parts.join(","))
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match s {
                Slot::Symbol(sym) => write!(f, "{}", sym.0)?,
                Slot::Wildcard => f.write_str(WILDCARD)?,
            }
        }
        f.write_str(")")
    }
}

/// Whether the window of `p` starting at `pos` satisfies every concrete slot.
pub fn matches_at(p: &Pattern, s: &SymbolSequence, pos: usize) -> Result<bool> {
    if pos + p.period() > s.len() {
        return Err(Error::Range {
            pos,
            period: p.period(),
            len: s.len(),
        });
    }
    Ok(window_matches(p, s.symbols(), pos))
}

#[inline]
pub(crate) fn window_matches(p: &Pattern, symbols: &[Symbol], pos: usize) -> bool {
    p.slots
        .iter()
        .zip(&symbols[pos..])
        .all(|(slot, sym)| match slot {
            Slot::Symbol(c) => c == sym,
            Slot::Wildcard => true,
        })
}

/// Every start position where `p` matches, ascending. Matches may overlap.
pub fn find_matches(p: &Pattern, s: &SymbolSequence) -> Vec<usize> {
    if p.period() > s.len() {
        return Vec::new();
    }
    let symbols = s.symbols();
    // Anchor on the first concrete slot to skip most windows cheaply.
    let (anchor_off, anchor) = p
        .concrete_slots()
        .next()
        .expect("pattern has a concrete slot");
    (0..=s.len() - p.period())
        .filter(|&pos| symbols[pos + anchor_off] == anchor && window_matches(p, symbols, pos))
        .collect()
}

/// Every pattern obtained by turning one or more concrete slots of `p` into
/// wildcards, excluding the all-wildcard pattern.
pub fn generalizations(p: &Pattern) -> BTreeSet<Pattern> {
    let offsets: Vec<usize> = p.concrete_slots().map(|(i, _)| i).collect();
    let n = offsets.len();
    let mut out = BTreeSet::new();
    // `keep` is the subset of concrete slots left in place: proper and non-empty.
    for keep in 1u64..(1u64 << n) - 1 {
        let mut slots = vec![Slot::Wildcard; p.period()];
        for (bit, &off) in offsets.iter().enumerate() {
            if keep & (1 << bit) != 0 {
                slots[off] = p.slots[off];
            }
        }
        out.insert(Pattern { slots });
    }
    out
}
