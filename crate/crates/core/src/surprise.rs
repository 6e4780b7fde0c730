//! Surprising patterns ranked by information gain.
//!
//! The information of a symbol is `-log_|I| prob(I)` with `|I|` the alphabet
//! size, so rare symbols carry more of it. A pattern's information is the sum
//! over its concrete slots (wildcards carry none) and its gain is information
//! times support, where support counts non-overlapping matches taken greedily
//! from the left.
//!
//! Gain is not anti-monotone: `(a,b)` can clear a threshold that neither
//! `(a,*)` nor `(*,b)` reaches. The search therefore never prunes on a
//! parent's gain. It walks every period slot by slot and only cuts a branch
//! when an upper bound on every completion falls below the threshold: support
//! can only shrink as slots are fixed, and each remaining slot adds at most
//! the information of the rarest symbol.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::{find_matches, Pattern, Slot};
use crate::sequence::{Symbol, SymbolSequence};

/// How [`mine_surprising`] filters its output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SurpriseMode {
    /// Every pattern whose gain is at least the threshold.
    MinGain(f64),
    /// The `k` patterns with the highest gain.
    TopK(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurpriseConfig {
    pub mode: SurpriseMode,
    /// Longest pattern period searched.
    pub max_len: usize,
}

impl SurpriseConfig {
    pub fn min_gain(min_gain: f64, max_len: usize) -> Result<Self> {
        let cfg = SurpriseConfig {
            mode: SurpriseMode::MinGain(min_gain),
            max_len,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn top_k(k: usize, max_len: usize) -> Result<Self> {
        let cfg = SurpriseConfig {
            mode: SurpriseMode::TopK(k),
            max_len,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_len < 1 {
            return Err(Error::InvalidConfig("max_len must be >= 1".into()));
        }
        match self.mode {
            SurpriseMode::MinGain(g) if !(g >= 0.0 && g.is_finite()) => Err(Error::InvalidConfig(
                "min_gain must be a finite value >= 0".into(),
            )),
            SurpriseMode::TopK(0) => Err(Error::InvalidConfig("top_k must be >= 1".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPattern {
    pub pattern: Pattern,
    pub support: usize,
    pub info: f64,
    pub gain: f64,
}

/// One row of the per-symbol table: count, probability, information and the
/// gain of the single-symbol pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolStat {
    pub symbol: Symbol,
    pub count: usize,
    pub prob: f64,
    pub info: f64,
    pub gain: f64,
}

/// Gain descending, then slot-lexicographic.
pub fn cmp_scored(a: &ScoredPattern, b: &ScoredPattern) -> Ordering {
    b.gain
        .total_cmp(&a.gain)
        .then_with(|| a.pattern.cmp(&b.pattern))
}

pub fn symbol_prob(s: &SymbolSequence, sym: Symbol) -> f64 {
    let count = s.symbols().iter().filter(|&&x| x == sym).count();
    count as f64 / s.len() as f64
}

fn info_from_prob(prob: f64, alphabet_size: usize) -> f64 {
    if prob >= 1.0 {
        // Also covers the single-symbol alphabet, where the base would be 1.
        0.0
    } else {
        -prob.ln() / (alphabet_size as f64).ln()
    }
}

/// `-log_|I| prob(sym)`.
pub fn info_symbol(s: &SymbolSequence, sym: Symbol) -> Result<f64> {
    let prob = symbol_prob(s, sym);
    if prob == 0.0 {
        return Err(Error::InfiniteInfo(sym.to_string()));
    }
    Ok(info_from_prob(prob, s.alphabet_size()))
}

/// Per-symbol information, `None` for symbols that never occur.
fn symbol_infos(s: &SymbolSequence) -> Vec<Option<f64>> {
    let n = s.len() as f64;
    s.counts()
        .into_iter()
        .map(|c| (c > 0).then(|| info_from_prob(c as f64 / n, s.alphabet_size())))
        .collect()
}

/// Greedy left-to-right count of non-overlapping windows.
fn greedy_count(positions: &[usize], period: usize) -> usize {
    let mut count = 0;
    let mut free = 0;
    for &p in positions {
        if p >= free {
            count += 1;
            free = p + period;
        }
    }
    count
}

/// Number of non-overlapping matches of `p`.
pub fn support(s: &SymbolSequence, p: &Pattern) -> usize {
    greedy_count(&find_matches(p, s), p.period())
}

/// Sum of the information of the concrete slots.
pub fn pattern_info(s: &SymbolSequence, p: &Pattern) -> Result<f64> {
    p.concrete_slots()
        .try_fold(0.0, |acc, (_, sym)| Ok(acc + info_symbol(s, sym)?))
}

/// Information times support.
pub fn info_gain(s: &SymbolSequence, p: &Pattern) -> Result<f64> {
    Ok(pattern_info(s, p)? * support(s, p) as f64)
}

/// Scores a single pattern.
pub fn score(s: &SymbolSequence, p: &Pattern) -> Result<ScoredPattern> {
    let info = pattern_info(s, p)?;
    let support = support(s, p);
    Ok(ScoredPattern {
        pattern: p.clone(),
        support,
        info,
        gain: info * support as f64,
    })
}

/// Count, probability, information and single-symbol gain for every symbol
/// that occurs in `s`, in alphabet order.
pub fn symbol_stats(s: &SymbolSequence) -> Vec<SymbolStat> {
    let n = s.len() as f64;
    s.counts()
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(id, count)| {
            let prob = count as f64 / n;
            let info = info_from_prob(prob, s.alphabet_size());
            SymbolStat {
                symbol: Symbol(id as u32),
                count,
                prob,
                info,
                gain: info * count as f64,
            }
        })
        .collect()
}

/// Bounded collection of the best patterns seen so far.
struct TopK {
    k: usize,
    best: Vec<ScoredPattern>,
}

impl TopK {
    fn threshold(&self) -> f64 {
        if self.best.len() < self.k {
            f64::NEG_INFINITY
        } else {
            self.best[self.k - 1].gain
        }
    }

    fn offer(&mut self, cand: ScoredPattern) {
        if self.best.len() == self.k && cmp_scored(&cand, &self.best[self.k - 1]) != Ordering::Less
        {
            return;
        }
        let at = self
            .best
            .partition_point(|x| cmp_scored(x, &cand) == Ordering::Less);
        self.best.insert(at, cand);
        self.best.truncate(self.k);
    }
}

enum Sink<'a> {
    Threshold(f64, &'a mut Vec<ScoredPattern>),
    Top(&'a mut TopK),
}

impl Sink<'_> {
    fn threshold(&self) -> f64 {
        match self {
            Sink::Threshold(t, _) => *t,
            Sink::Top(top) => top.threshold(),
        }
    }

    fn offer(&mut self, cand: ScoredPattern) {
        match self {
            Sink::Threshold(t, out) => {
                if cand.gain >= *t {
                    out.push(cand);
                }
            }
            Sink::Top(top) => top.offer(cand),
        }
    }
}

struct Search<'a> {
    symbols: &'a [Symbol],
    infos: &'a [Option<f64>],
    info_max: f64,
    period: usize,
}

impl Search<'_> {
    fn walk(
        &self,
        slots: &mut Vec<Slot>,
        positions: &[usize],
        info: f64,
        arity: usize,
        sink: &mut Sink<'_>,
    ) {
        let depth = slots.len();
        let support = greedy_count(positions, self.period);
        if depth == self.period {
            if arity > 0 {
                sink.offer(ScoredPattern {
                    pattern: Pattern::new(slots.clone()).expect("arity checked"),
                    support,
                    info,
                    gain: info * support as f64,
                });
            }
            return;
        }
        let bound = (info + (self.period - depth) as f64 * self.info_max) * support as f64;
        // Slack absorbs rounding differences between the bound and exact sums.
        if bound * (1.0 + 1e-9) + 1e-12 < sink.threshold() {
            return;
        }
        for (id, sym_info) in self.infos.iter().enumerate() {
            let Some(sym_info) = sym_info else { continue };
            let sym = Symbol(id as u32);
            let next: Vec<usize> = positions
                .iter()
                .copied()
                .filter(|&p| self.symbols[p + depth] == sym)
                .collect();
            if next.is_empty() {
                continue;
            }
            slots.push(Slot::Symbol(sym));
            self.walk(slots, &next, info + sym_info, arity + 1, sink);
            slots.pop();
        }
        slots.push(Slot::Wildcard);
        self.walk(slots, positions, info, arity, sink);
        slots.pop();
    }
}

fn run_search(s: &SymbolSequence, period: usize, sink: &mut Sink<'_>) {
    let infos = symbol_infos(s);
    let info_max = infos.iter().flatten().copied().fold(0.0, f64::max);
    let search = Search {
        symbols: s.symbols(),
        infos: &infos,
        info_max,
        period,
    };
    let positions: Vec<usize> = (0..=s.len() - period).collect();
    search.walk(&mut Vec::with_capacity(period), &positions, 0.0, 0, sink);
}

/// Every occurring pattern with period up to `max_len` that passes the
/// configured filter, sorted by gain descending then slot order.
pub fn mine_surprising(s: &SymbolSequence, cfg: &SurpriseConfig) -> Result<Vec<ScoredPattern>> {
    cfg.validate()?;
    let periods = 1..=cfg.max_len.min(s.len());
    let mut out = match cfg.mode {
        SurpriseMode::MinGain(t) => periods
            .into_par_iter()
            .flat_map_iter(|period| {
                let mut found = Vec::new();
                run_search(s, period, &mut Sink::Threshold(t, &mut found));
                found
            })
            .collect::<Vec<_>>(),
        SurpriseMode::TopK(k) => {
            let mut top = TopK {
                k,
                best: Vec::with_capacity(k + 1),
            };
            for period in periods {
                run_search(s, period, &mut Sink::Top(&mut top));
            }
            top.best
        }
    };
    out.sort_by(cmp_scored);
    Ok(out)
}

/// The `k` most surprising patterns with period up to `max_len`.
pub fn top_k_surprising(
    s: &SymbolSequence,
    k: usize,
    max_len: usize,
) -> Result<Vec<ScoredPattern>> {
    mine_surprising(s, &SurpriseConfig::top_k(k, max_len)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::parse_sequence;

    const SKEWED: &str = "I1 I2 I1 I3 I1 I4 I1 I2 I1 I3 I1 I4 I1 I2 I1 I3 I1 I4 I1 I2";

    fn skewed() -> SymbolSequence {
        parse_sequence(SKEWED).unwrap().1
    }

    #[test]
    fn probabilities() {
        let s = skewed();
        assert_eq!(symbol_prob(&s, Symbol(0)), 0.5);
        assert_eq!(symbol_prob(&s, Symbol(1)), 0.2);
        let s1 = SymbolSequence::from_ids(&[0, 0, 0]).unwrap();
        assert_eq!(symbol_prob(&s1, Symbol(0)), 1.0);
    }

    #[test]
    fn information() {
        let s = skewed();
        assert!((info_symbol(&s, Symbol(0)).unwrap() - 0.5).abs() < 1e-12);
        assert!((info_symbol(&s, Symbol(2)).unwrap() - 1.37).abs() < 0.005);
        let s1 = SymbolSequence::from_ids(&[0, 0, 0]).unwrap();
        assert_eq!(info_symbol(&s1, Symbol(0)).unwrap(), 0.0);
    }

    #[test]
    fn absent_symbol_is_an_error() {
        let s = SymbolSequence::new(vec![Symbol(0), Symbol(0)], 2).unwrap();
        assert!(matches!(
            info_symbol(&s, Symbol(1)),
            Err(Error::InfiniteInfo(_))
        ));
        let p = Pattern::from_ids(&[Some(1)]).unwrap();
        assert!(info_gain(&s, &p).is_err());
    }

    #[test]
    fn support_examples() {
        let s = skewed();
        assert_eq!(support(&s, &Pattern::from_ids(&[Some(0)]).unwrap()), 10);
        let aaa = SymbolSequence::from_ids(&[0, 0, 0]).unwrap();
        assert_eq!(
            support(&aaa, &Pattern::from_ids(&[Some(0), Some(0)]).unwrap()),
            1
        );
        let ab = SymbolSequence::from_ids(&[0, 1, 0, 1, 0, 1]).unwrap();
        assert_eq!(
            support(&ab, &Pattern::from_ids(&[Some(0), Some(1)]).unwrap()),
            3
        );
    }

    #[test]
    fn gain_examples() {
        let s = skewed();
        let g1 = info_gain(&s, &Pattern::from_ids(&[Some(0)]).unwrap()).unwrap();
        assert!((g1 - 5.0).abs() < 1e-9);
        let g2 = info_gain(&s, &Pattern::from_ids(&[Some(1)]).unwrap()).unwrap();
        assert!((g2 - 4.64).abs() < 0.02);
        let zero = info_gain(&s, &Pattern::from_ids(&[Some(1), Some(1)]).unwrap()).unwrap();
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn zero_threshold_admits_all_singles() {
        let s = SymbolSequence::from_ids(&[0, 1]).unwrap();
        let r = mine_surprising(&s, &SurpriseConfig::min_gain(0.0, 1).unwrap()).unwrap();
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn top_one_on_skewed() {
        let r = top_k_surprising(&skewed(), 1, 1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].pattern, Pattern::from_ids(&[Some(0)]).unwrap());
        assert!((r[0].gain - 5.0).abs() < 1e-9);
    }

    #[test]
    fn top_k_larger_than_space() {
        let s = SymbolSequence::from_ids(&[0, 1]).unwrap();
        let r = top_k_surprising(&s, 100, 2).unwrap();
        let all = mine_surprising(&s, &SurpriseConfig::min_gain(0.0, 2).unwrap()).unwrap();
        assert_eq!(r, all);
    }

    #[test]
    fn config_validation() {
        assert!(SurpriseConfig::top_k(0, 2).is_err());
        assert!(SurpriseConfig::min_gain(-1.0, 2).is_err());
        assert!(SurpriseConfig::min_gain(1.0, 0).is_err());
    }

    #[test]
    fn stats_table() {
        let stats = symbol_stats(&skewed());
        let counts: Vec<_> = stats.iter().map(|r| r.count).collect();
        assert_eq!(counts, vec![10, 4, 3, 3]);
        assert!((stats[3].gain - 4.11).abs() < 0.05);
    }
}
