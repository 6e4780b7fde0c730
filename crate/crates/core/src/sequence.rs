//! Symbols, alphabets and interned symbol sequences.
//!
//! Every miner works on dense integer ids. Text is interned once at ingestion
//! and the resulting [`Alphabet`] is immutable afterwards: a second file parsed
//! against it with [`parse_sequence_with`] must only use names it already knows.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Token reserved for wildcard slots in rendered patterns.
pub const WILDCARD: &str = "*";

/// Index of a symbol within its [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol(pub u32);

impl Symbol {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Ordered set of distinct symbol names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl Alphabet {
    /// Builds an alphabet from names in the given order.
    ///
    /// Duplicates, the wildcard token and an empty list are rejected.
    pub fn from_names<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut alphabet = Alphabet {
            names: Vec::new(),
            index: HashMap::new(),
        };
        for name in names {
            let name = name.into();
            if alphabet.index.contains_key(&name) {
                return Err(Error::Shape(format!("duplicate symbol name `{name}`")));
            }
            alphabet.push(name)?;
        }
        if alphabet.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(alphabet)
    }

    /// `a`, `b`, ..., `z`, `aa`, `ab`, ... (bijective base 26).
    pub fn letters(size: usize) -> Self {
        let names = (0..size).map(|i| {
            let mut n = i + 1;
            let mut name = Vec::new();
            while n > 0 {
                n -= 1;
                name.push(b'a' + (n % 26) as u8);
                n /= 26;
            }
            name.reverse();
            String::from_utf8(name).expect("ascii")
        });
        Alphabet::from_names(names).expect("generated names are distinct")
    }

    fn push(&mut self, name: String) -> Result<Symbol> {
        if name == WILDCARD {
            return Err(Error::ReservedSymbol);
        }
        let sym = Symbol(self.names.len() as u32);
        self.index.insert(name.clone(), sym);
        self.names.push(name);
        Ok(sym)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    /// Looks a name up, failing with [`Error::UnknownSymbol`].
    pub fn lookup(&self, name: &str) -> Result<Symbol> {
        self.get(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_owned()))
    }

    pub fn name(&self, sym: Symbol) -> &str {
        &self.names[sym.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.names.len() as u32).map(Symbol)
    }
}

/// An interned sequence of symbols over an alphabet of known size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    symbols: Vec<Symbol>,
    alphabet_size: usize,
}

impl SymbolSequence {
    /// Wraps already-interned symbols. Every id must be below `alphabet_size`.
    pub fn new(symbols: Vec<Symbol>, alphabet_size: usize) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some(bad) = symbols.iter().find(|s| s.index() >= alphabet_size) {
            return Err(Error::UnknownSymbol(bad.to_string()));
        }
        Ok(SymbolSequence {
            symbols,
            alphabet_size,
        })
    }

    /// Convenience constructor from raw ids; the alphabet size is `max id + 1`.
    pub fn from_ids(ids: &[u32]) -> Result<Self> {
        let size = ids.iter().max().map_or(0, |m| *m as usize + 1);
        SymbolSequence::new(ids.iter().copied().map(Symbol).collect(), size)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Occurrence count of every symbol, indexed by id.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.alphabet_size];
        for s in &self.symbols {
            counts[s.index()] += 1;
        }
        counts
    }

    /// Renders the sequence back to text with single-space separation.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        let mut out = String::with_capacity(self.symbols.len() * 3);
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(alphabet.name(*s));
        }
        out
    }
}

impl std::ops::Index<usize> for SymbolSequence {
    type Output = Symbol;

    fn index(&self, pos: usize) -> &Symbol {
        &self.symbols[pos]
    }
}

/// Whitespace-separated tokens with `#` comments stripped.
pub(crate) fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|line| line.split_once('#').map_or(line, |(body, _)| body))
        .flat_map(str::split_ascii_whitespace)
}

/// Interns a token stream, building the alphabet in first-appearance order.
pub fn parse_sequence(text: &str) -> Result<(Alphabet, SymbolSequence)> {
    let mut alphabet = Alphabet {
        names: Vec::new(),
        index: HashMap::new(),
    };
    let mut symbols = Vec::new();
    for tok in tokens(text) {
        let sym = match alphabet.get(tok) {
            Some(sym) => sym,
            None => alphabet.push(tok.to_owned())?,
        };
        symbols.push(sym);
    }
    let seq = SymbolSequence::new(symbols, alphabet.len())?;
    Ok((alphabet, seq))
}

/// Interns a token stream against a fixed alphabet.
pub fn parse_sequence_with(text: &str, alphabet: &Alphabet) -> Result<SymbolSequence> {
    let symbols = tokens(text)
        .map(|tok| alphabet.lookup(tok))
        .collect::<Result<Vec<_>>>()?;
    SymbolSequence::new(symbols, alphabet.len())
}
