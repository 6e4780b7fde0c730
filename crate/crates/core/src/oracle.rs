//! Brute-force reference implementations.
//!
//! Each oracle works straight from the definitions, enumerating the whole
//! space, and shares no search code with the miners it checks. They refuse
//! inputs beyond small size guards because their cost is exponential.

use std::collections::BTreeMap;

use crate::approx::{ApproxConfig, ApproxPattern, CompatibilityMatrix};
use crate::error::{Error, Result};
use crate::pattern::{Pattern, Slot};
use crate::periodic::{PeriodicConfig, PeriodicResult, Segment, ValidSubsequence};
use crate::sequence::{Symbol, SymbolSequence};
use crate::surprise::ScoredPattern;

pub const MAX_SEQUENCE_LEN: usize = 40;
pub const MAX_ALPHABET: usize = 4;
pub const MAX_PERIOD: usize = 4;
pub const MAX_MATCH_LEN: usize = 8;
pub const MAX_DATABASE: usize = 3;

fn guard(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::OracleTooLarge(what()))
    }
}

fn guard_sequence(s: &SymbolSequence, max_len: usize, period: usize) -> Result<()> {
    guard(s.len() <= max_len, || {
        format!("sequence length {} > {max_len}", s.len())
    })?;
    guard(s.alphabet_size() <= MAX_ALPHABET, || {
        format!("alphabet size {} > {MAX_ALPHABET}", s.alphabet_size())
    })?;
    guard(period <= MAX_PERIOD, || {
        format!("period {period} > {MAX_PERIOD}")
    })
}

/// Every slot tuple of length `period` over the alphabet and the wildcard,
/// at least one slot concrete.
fn all_patterns(alphabet_size: usize, period: usize, wildcards: bool) -> Vec<Pattern> {
    let choices: Vec<Slot> = (0..alphabet_size as u32)
        .map(|i| Slot::Symbol(Symbol(i)))
        .chain(wildcards.then_some(Slot::Wildcard))
        .collect();
    let mut out = Vec::new();
    let total = choices.len().pow(period as u32);
    for mut code in 0..total {
        let mut slots = Vec::with_capacity(period);
        for _ in 0..period {
            slots.push(choices[code % choices.len()]);
            code /= choices.len();
        }
        if let Ok(p) = Pattern::new(slots) {
            out.push(p);
        }
    }
    out
}

fn naive_matches(p: &Pattern, s: &[Symbol]) -> Vec<usize> {
    let l = p.period();
    if l > s.len() {
        return Vec::new();
    }
    (0..=s.len() - l)
        .filter(|&pos| {
            (0..l).all(|j| match p.slots()[j] {
                Slot::Symbol(c) => s[pos + j] == c,
                Slot::Wildcard => true,
            })
        })
        .collect()
}

type ChainScore = (usize, std::cmp::Reverse<usize>, std::cmp::Reverse<usize>);

/// Best chain over an explicit list of every valid segment. `best_from[k]`
/// is the best chain whose first segment is `k`, found by trying every
/// admissible successor.
fn best_chain(segments: &[Segment], period: usize, max_dist: usize) -> Option<Vec<Segment>> {
    let n = segments.len();
    // (total reps, segment count, successor)
    let mut best_from: Vec<(usize, usize, Option<usize>)> = vec![(0, 0, None); n];
    for k in (0..n).rev() {
        let end = segments[k].end(period);
        let mut best = (segments[k].reps, 1, None);
        for (next, seg) in segments.iter().enumerate() {
            if seg.start >= end && seg.start - end <= max_dist {
                let (t, c, _) = best_from[next];
                let cand = (segments[k].reps + t, c + 1, Some(next));
                if (cand.0, std::cmp::Reverse(cand.1)) > (best.0, std::cmp::Reverse(best.1)) {
                    best = cand;
                }
            }
        }
        best_from[k] = best;
    }
    let score = |k: usize| -> ChainScore {
        (
            best_from[k].0,
            std::cmp::Reverse(segments[k].start),
            std::cmp::Reverse(best_from[k].1),
        )
    };
    let first = (0..n).reduce(|a, b| if score(b) > score(a) { b } else { a })?;
    let mut chain = vec![segments[first]];
    let mut cursor = best_from[first].2;
    while let Some(k) = cursor {
        chain.push(segments[k]);
        cursor = best_from[k].2;
    }
    Some(chain)
}

/// Exhaustive periodic mining: every pattern, every valid segment, every
/// chain of segments.
pub fn oracle_periodic(s: &SymbolSequence, cfg: &PeriodicConfig) -> Result<Vec<PeriodicResult>> {
    cfg.validate()?;
    guard_sequence(s, MAX_SEQUENCE_LEN, cfg.l_max)?;
    let seq = s.symbols();
    let mut out = Vec::new();
    for l in 1..=cfg.l_max {
        for p in all_patterns(s.alphabet_size(), l, true) {
            let matches = naive_matches(&p, seq);
            let mut segments = Vec::new();
            for &start in &matches {
                let mut reps = 0;
                while matches.contains(&(start + reps * l)) {
                    reps += 1;
                    if reps >= cfg.min_rep {
                        segments.push(Segment { start, reps });
                    }
                }
            }
            segments.sort_by_key(|s| (s.start, s.reps));
            if let Some(chain) = best_chain(&segments, l, cfg.max_dist) {
                let total_reps = chain.iter().map(|s| s.reps).sum();
                out.push(PeriodicResult {
                    pattern: p,
                    best: ValidSubsequence {
                        period: l,
                        segments: chain,
                        total_reps,
                    },
                });
            }
        }
    }
    crate::periodic::sort_results(&mut out);
    Ok(out)
}

/// Gain of every pattern that occurs at least once, straight from the
/// definitions, sorted by gain descending then slot order.
pub fn oracle_info_gain(s: &SymbolSequence, max_len: usize) -> Result<Vec<ScoredPattern>> {
    guard_sequence(s, MAX_SEQUENCE_LEN, max_len)?;
    let seq = s.symbols();
    let base = s.alphabet_size() as f64;
    let mut info = BTreeMap::new();
    for sym in 0..s.alphabet_size() as u32 {
        let count = seq.iter().filter(|x| x.0 == sym).count();
        if count > 0 {
            let prob = count as f64 / seq.len() as f64;
            let v = if prob == 1.0 {
                0.0
            } else {
                -prob.ln() / base.ln()
            };
            info.insert(Symbol(sym), v);
        }
    }
    let mut out = Vec::new();
    for l in 1..=max_len.min(seq.len()) {
        for p in all_patterns(s.alphabet_size(), l, true) {
            let matches = naive_matches(&p, seq);
            let mut support = 0;
            let mut next_free = 0;
            for m in matches {
                if m >= next_free {
                    support += 1;
                    next_free = m + l;
                }
            }
            if support == 0 {
                continue;
            }
            let mut total = 0.0;
            for slot in p.slots() {
                if let Slot::Symbol(c) = slot {
                    total += info[c];
                }
            }
            out.push(ScoredPattern {
                pattern: p,
                support,
                info: total,
                gain: total * support as f64,
            });
        }
    }
    out.sort_by(crate::surprise::cmp_scored);
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Every length-`lp` subsequence of `s` (as positions) with its product.
pub fn oracle_match_all(
    p: &Pattern,
    s: &SymbolSequence,
    c: &CompatibilityMatrix,
) -> Result<Vec<(Vec<usize>, f64)>> {
    guard(s.len() <= MAX_MATCH_LEN, || {
        format!("sequence length {} > {MAX_MATCH_LEN}", s.len())
    })?;
    if p.has_wildcards() {
        return Err(Error::Shape(
            "approximate patterns cannot contain wildcards".into(),
        ));
    }
    let seq = s.symbols();
    Ok(combinations(seq.len(), p.period())
        .into_iter()
        .map(|positions| {
            let mut value = 1.0;
            for (slot, &i) in p.slots().iter().zip(&positions) {
                let truth = slot.symbol().expect("checked above");
                value *= c.get(truth, seq[i]);
            }
            (positions, value)
        })
        .collect())
}

/// Maximum of [`oracle_match_all`]; zero when `s` is shorter than `p`.
pub fn oracle_match(p: &Pattern, s: &SymbolSequence, c: &CompatibilityMatrix) -> Result<f64> {
    Ok(oracle_match_all(p, s, c)?
        .into_iter()
        .map(|(_, v)| v)
        .fold(0.0, f64::max))
}

/// Approximate mining by scoring every wildcard-free pattern.
pub fn oracle_approx(
    db: &[SymbolSequence],
    c: &CompatibilityMatrix,
    cfg: &ApproxConfig,
) -> Result<Vec<ApproxPattern>> {
    cfg.validate()?;
    guard(db.len() <= MAX_DATABASE, || {
        format!("database of {} sequences > {MAX_DATABASE}", db.len())
    })?;
    guard(c.len() <= MAX_ALPHABET, || {
        format!("alphabet size {} > {MAX_ALPHABET}", c.len())
    })?;
    guard(cfg.max_len <= MAX_PERIOD, || {
        format!("max_len {} > {MAX_PERIOD}", cfg.max_len)
    })?;
    let mut out = Vec::new();
    for len in 1..=cfg.max_len {
        for p in all_patterns(c.len(), len, false) {
            let per_sequence = db
                .iter()
                .map(|s| oracle_match(&p, s, c))
                .collect::<Result<Vec<_>>>()?;
            let value = per_sequence.iter().sum::<f64>() / per_sequence.len() as f64;
            if value >= cfg.min_match {
                out.push(ApproxPattern {
                    pattern: p,
                    value,
                    per_sequence,
                });
            }
        }
    }
    out.sort_by(|a, b| {
        b.value
            .total_cmp(&a.value)
            .then_with(|| a.pattern.cmp(&b.pattern))
    });
    Ok(out)
}
