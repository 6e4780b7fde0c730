//! Approximate patterns under a compatibility matrix.
//!
//! `C[t][o]` is the probability that true symbol `t` was observed as `o`.
//! The match of a pattern against an equally long window is the product of
//! `C[pattern_i][window_i]`; against a longer sequence it is the maximum over
//! every order-preserving selection of positions (not necessarily contiguous).
//! That maximum is found with a max-product dynamic program over
//! (sequence position, pattern slot) in `O(ls * lp)`.
//!
//! Match never increases when a symbol is inserted into a pattern, because
//! every factor is at most one. Mining uses that for Apriori-style pruning.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::{Pattern, Slot};
use crate::sequence::{Alphabet, Symbol, SymbolSequence};

const ROW_SUM_TOLERANCE: f64 = 1e-9;
/// Patterns longer than this are scored in log space.
const LINEAR_MAX_LEN: usize = 32;
const HEADER_CORNER: &str = "true\\observed";

/// Row-stochastic matrix from true symbols to observed symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityMatrix {
    alphabet: Alphabet,
    entries: Vec<f64>,
}

impl CompatibilityMatrix {
    /// `rows[t][o]` in alphabet order.
    pub fn new(alphabet: Alphabet, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = alphabet.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(format!(
                "compatibility matrix must be {n}x{n}"
            )));
        }
        for (t, row) in rows.iter().enumerate() {
            for (o, &value) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::Probability {
                        row: alphabet.names()[t].clone(),
                        observed: alphabet.names()[o].clone(),
                        value,
                    });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::Stochasticity {
                    row: alphabet.names()[t].clone(),
                    sum,
                });
            }
        }
        Ok(CompatibilityMatrix {
            alphabet,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// The noise-free channel.
    pub fn identity(alphabet: Alphabet) -> Self {
        let n = alphabet.len();
        let rows = (0..n)
            .map(|t| (0..n).map(|o| if t == o { 1.0 } else { 0.0 }).collect())
            .collect();
        CompatibilityMatrix::new(alphabet, rows).expect("identity is stochastic")
    }

    /// Parses the CSV form; the alphabet is taken from the header in order.
    ///
    /// ```text
    /// true\observed,I1,I2
    /// I1,0.9,0.1
    /// I2,0.2,0.8
    /// ```
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (header_line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let mut fields = header.split(',').map(str::trim);
        if fields.next() != Some(HEADER_CORNER) {
            return Err(Error::Parse {
                line: header_line,
                msg: format!("header must start with `{HEADER_CORNER}`"),
            });
        }
        let alphabet = Alphabet::from_names(fields).map_err(|e| match e {
            Error::EmptySequence => Error::Shape("matrix header lists no symbols".into()),
            other => other,
        })?;
        let n = alphabet.len();

        let mut rows: Vec<Option<Vec<f64>>> = vec![None; n];
        for (line, text) in lines {
            let mut fields = text.split(',').map(str::trim);
            let name = fields.next().unwrap_or_default();
            let t = alphabet.get(name).ok_or_else(|| {
                Error::Shape(format!(
                    "line {line}: row `{name}` is not an observed column"
                ))
            })?;
            let values = fields
                .map(|f| {
                    f.parse::<f64>().map_err(|_| Error::Parse {
                        line,
                        msg: format!("`{f}` is not a number"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if values.len() != n {
                return Err(Error::Shape(format!(
                    "line {line}: row `{name}` has {} values, expected {n}",
                    values.len()
                )));
            }
            if rows[t.index()].replace(values).is_some() {
                return Err(Error::Shape(format!("line {line}: duplicate row `{name}`")));
            }
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(t, r)| {
                r.ok_or_else(|| Error::Shape(format!("missing row for `{}`", alphabet.names()[t])))
            })
            .collect::<Result<Vec<_>>>()?;
        CompatibilityMatrix::new(alphabet, rows)
    }

    /// Renders the CSV form accepted by [`CompatibilityMatrix::from_csv`].
    pub fn to_csv(&self) -> String {
        let mut out = String::from(HEADER_CORNER);
        for name in self.alphabet.names() {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for t in self.alphabet.symbols() {
            out.push_str(self.alphabet.name(t));
            for o in self.alphabet.symbols() {
                out.push(',');
                out.push_str(&self.get(t, o).to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    /// `C(true, observed)`.
    #[inline]
    pub fn get(&self, truth: Symbol, observed: Symbol) -> f64 {
        self.entries[truth.index() * self.alphabet.len() + observed.index()]
    }
}

/// Loads a matrix and reorders it to `alphabet`, which it must cover exactly.
pub fn load_matrix(text: &str, alphabet: &Alphabet) -> Result<CompatibilityMatrix> {
    let parsed = CompatibilityMatrix::from_csv(text)?;
    for name in parsed.alphabet.names() {
        alphabet.lookup(name)?;
    }
    if parsed.len() != alphabet.len() {
        return Err(Error::Shape(format!(
            "matrix covers {} symbols, alphabet has {}",
            parsed.len(),
            alphabet.len()
        )));
    }
    let rows = alphabet
        .symbols()
        .map(|t| {
            let pt = parsed.alphabet.lookup(alphabet.name(t))?;
            alphabet
                .symbols()
                .map(|o| Ok(parsed.get(pt, parsed.alphabet.lookup(alphabet.name(o))?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    CompatibilityMatrix::new(alphabet.clone(), rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxConfig {
    pub min_match: f64,
    pub max_len: usize,
}

impl ApproxConfig {
    pub fn new(min_match: f64, max_len: usize) -> Result<Self> {
        let cfg = ApproxConfig { min_match, max_len };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_match > 0.0 && self.min_match <= 1.0) {
            return Err(Error::InvalidConfig("min_match must be in (0, 1]".into()));
        }
        if self.max_len < 1 {
            return Err(Error::InvalidConfig("max_len must be >= 1".into()));
        }
        Ok(())
    }
}

/// Best match of a pattern in one sequence, with the aligned positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub pattern: Pattern,
    pub value: f64,
    /// Sequence positions aligned to each slot; empty when the sequence is
    /// shorter than the pattern.
    pub alignment: Vec<usize>,
}

/// A mined pattern with its aggregate (mean) match and per-sequence values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxPattern {
    pub pattern: Pattern,
    pub value: f64,
    pub per_sequence: Vec<f64>,
}

/// Match and exact support of one pattern over a database.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub pattern: Pattern,
    pub per_sequence: Vec<f64>,
    pub aggregate: f64,
    /// Sequences containing the pattern as a contiguous window.
    pub support: usize,
}

fn pattern_symbols(p: &Pattern) -> Result<Vec<Symbol>> {
    p.slots()
        .iter()
        .map(|s| match s {
            Slot::Symbol(sym) => Ok(*sym),
            Slot::Wildcard => Err(Error::Shape(
                "approximate patterns cannot contain wildcards".into(),
            )),
        })
        .collect()
}

fn check_alphabet(s: &SymbolSequence, c: &CompatibilityMatrix) -> Result<()> {
    if s.alphabet_size() != c.len() {
        return Err(Error::Shape(format!(
            "sequence alphabet has {} symbols, matrix has {}",
            s.alphabet_size(),
            c.len()
        )));
    }
    Ok(())
}

fn window_product(pattern: &[Symbol], window: &[Symbol], c: &CompatibilityMatrix) -> f64 {
    if pattern.len() > LINEAR_MAX_LEN {
        let log: f64 = pattern
            .iter()
            .zip(window)
            .map(|(t, o)| c.get(*t, *o).ln())
            .sum();
        log.exp()
    } else {
        pattern
            .iter()
            .zip(window)
            .fold(1.0, |acc, (t, o)| acc * c.get(*t, *o))
    }
}

/// Product of `C[p_i][w_i]` over an equally long window.
pub fn window_match(p: &Pattern, w: &[Symbol], c: &CompatibilityMatrix) -> Result<f64> {
    let syms = pattern_symbols(p)?;
    if syms.len() != w.len() {
        return Err(Error::Shape(format!(
            "window of length {} against pattern of length {}",
            w.len(),
            syms.len()
        )));
    }
    Ok(window_product(&syms, w, c))
}

/// Score in whichever domain the pattern length calls for: a plain product
/// or a sum of logarithms.
#[derive(Clone, Copy)]
struct Domain {
    log: bool,
}

impl Domain {
    fn for_len(len: usize) -> Self {
        Domain {
            log: len > LINEAR_MAX_LEN,
        }
    }

    #[inline]
    fn unit(self) -> f64 {
        if self.log {
            0.0
        } else {
            1.0
        }
    }

    #[inline]
    fn combine(self, acc: f64, factor: f64) -> f64 {
        if self.log {
            acc + factor.ln()
        } else {
            acc * factor
        }
    }

    fn finish(self, score: f64) -> f64 {
        if self.log {
            score.exp()
        } else {
            score
        }
    }
}

/// Max-product alignment score without a witness.
fn best_score(pattern: &[Symbol], seq: &[Symbol], c: &CompatibilityMatrix) -> f64 {
    let (lp, ls) = (pattern.len(), seq.len());
    if lp > ls {
        return 0.0;
    }
    let dom = Domain::for_len(lp);
    let mut dp: Vec<Option<f64>> = vec![None; lp + 1];
    dp[0] = Some(dom.unit());
    for (i, &obs) in seq.iter().enumerate() {
        // Slot j (1-based) at position i still needs lp - j later positions.
        let lo = (lp + i + 1).saturating_sub(ls).max(1);
        for j in (lo..=lp.min(i + 1)).rev() {
            if let Some(prev) = dp[j - 1] {
                let v = dom.combine(prev, c.get(pattern[j - 1], obs));
                if dp[j].is_none_or(|cur| v > cur) {
                    dp[j] = Some(v);
                }
            }
        }
    }
    dom.finish(dp[lp].expect("lp <= ls"))
}

/// `M(p, s)`: the best match over all order-preserving length-`lp`
/// selections of `s`, with one maximizing alignment.
pub fn match_value(
    p: &Pattern,
    s: &SymbolSequence,
    c: &CompatibilityMatrix,
) -> Result<MatchResult> {
    check_alphabet(s, c)?;
    let pattern = pattern_symbols(p)?;
    let seq = s.symbols();
    let (lp, ls) = (pattern.len(), seq.len());
    if lp > ls {
        return Ok(MatchResult {
            pattern: p.clone(),
            value: 0.0,
            alignment: Vec::new(),
        });
    }

    // Witness arena: each node records the position chosen for a slot and
    // the node of the previous slot.
    let mut nodes: Vec<(usize, Option<usize>)> = Vec::new();
    let dom = Domain::for_len(lp);
    let mut dp: Vec<Option<(f64, Option<usize>)>> = vec![None; lp + 1];
    dp[0] = Some((dom.unit(), None));
    for (i, &obs) in seq.iter().enumerate() {
        let lo = (lp + i + 1).saturating_sub(ls).max(1);
        for j in (lo..=lp.min(i + 1)).rev() {
            if let Some((prev, prev_node)) = dp[j - 1] {
                let v = dom.combine(prev, c.get(pattern[j - 1], obs));
                if dp[j].is_none_or(|(cur, _)| v > cur) {
                    nodes.push((i, prev_node));
                    dp[j] = Some((v, Some(nodes.len() - 1)));
                }
            }
        }
    }
    let (score, mut node) = dp[lp].expect("lp <= ls");
    let mut alignment = Vec::with_capacity(lp);
    while let Some(n) = node {
        alignment.push(nodes[n].0);
        node = nodes[n].1;
    }
    alignment.reverse();
    Ok(MatchResult {
        pattern: p.clone(),
        value: dom.finish(score),
        alignment,
    })
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn evaluate(pattern: &[Symbol], db: &[SymbolSequence], c: &CompatibilityMatrix) -> Vec<f64> {
    db.iter()
        .map(|s| best_score(pattern, s.symbols(), c))
        .collect()
}

/// Every wildcard-free pattern of length `1..=max_len` whose mean match over
/// `db` is at least `min_match`, best first.
pub fn mine_approximate(
    db: &[SymbolSequence],
    c: &CompatibilityMatrix,
    cfg: &ApproxConfig,
) -> Result<Vec<ApproxPattern>> {
    cfg.validate()?;
    if db.is_empty() {
        return Err(Error::EmptySequence);
    }
    for s in db {
        check_alphabet(s, c)?;
    }

    let mut found: Vec<ApproxPattern> = Vec::new();
    let mut level: Vec<Vec<Symbol>> = c.alphabet().symbols().map(|s| vec![s]).collect();
    for len in 1..=cfg.max_len {
        let frequent: Vec<(Vec<Symbol>, Vec<f64>)> = level
            .into_par_iter()
            .filter_map(|cand| {
                let per_sequence = evaluate(&cand, db, c);
                (mean(&per_sequence) >= cfg.min_match).then_some((cand, per_sequence))
            })
            .collect();
        if frequent.is_empty() || len == cfg.max_len {
            found.extend(frequent.into_iter().map(to_result(db)));
            break;
        }
        level = apriori_join(frequent.iter().map(|(p, _)| p.as_slice()));
        found.extend(frequent.into_iter().map(to_result(db)));
    }
    found.sort_by(|a, b| {
        b.value
            .total_cmp(&a.value)
            .then_with(|| a.pattern.cmp(&b.pattern))
    });
    Ok(found)
}

fn to_result(db: &[SymbolSequence]) -> impl Fn((Vec<Symbol>, Vec<f64>)) -> ApproxPattern + '_ {
    move |(syms, per_sequence)| {
        debug_assert_eq!(per_sequence.len(), db.len());
        ApproxPattern {
            pattern: Pattern::concrete(&syms).expect("non-empty"),
            value: mean(&per_sequence),
            per_sequence,
        }
    }
}

/// Joins `p` and `q` when `p` without its first symbol equals `q` without its
/// last, keeping candidates whose every one-symbol deletion is frequent.
fn apriori_join<'a>(frequent: impl Iterator<Item = &'a [Symbol]>) -> Vec<Vec<Symbol>> {
    let frequent: Vec<&[Symbol]> = frequent.collect();
    let known: HashSet<&[Symbol]> = frequent.iter().copied().collect();
    let mut out = Vec::new();
    for p in &frequent {
        for q in &frequent {
            if p[1..] != q[..q.len() - 1] {
                continue;
            }
            let mut cand = p.to_vec();
            cand.push(*q.last().expect("non-empty"));
            let all_subs_frequent = (0..cand.len()).all(|skip| {
                let sub: Vec<Symbol> = cand
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, s)| *s)
                    .collect();
                known.contains(sub.as_slice())
            });
            if all_subs_frequent {
                out.push(cand);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Per-sequence and mean match next to the exact (contiguous) support.
pub fn match_and_support_report(
    p: &Pattern,
    db: &[SymbolSequence],
    c: &CompatibilityMatrix,
) -> Result<MatchReport> {
    if db.is_empty() {
        return Err(Error::EmptySequence);
    }
    let syms = pattern_symbols(p)?;
    for s in db {
        check_alphabet(s, c)?;
    }
    let per_sequence = evaluate(&syms, db, c);
    let support = db
        .iter()
        .filter(|s| {
            s.symbols()
                .windows(syms.len())
                .any(|w| w == syms.as_slice())
        })
        .count();
    Ok(MatchReport {
        pattern: p.clone(),
        aggregate: mean(&per_sequence),
        per_sequence,
        support,
    })
}
