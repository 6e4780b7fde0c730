//! Asynchronous partial periodic patterns.
//!
//! A pattern of period `l` *matches* at every window whose concrete slots
//! agree with the sequence. Matches spaced exactly `l` apart form runs; a
//! *segment* is a contiguous piece of such a run, *valid* once it has at least
//! `min_rep` repetitions. A *valid subsequence* chains disjoint valid segments
//! in position order, each gap (from the end of one segment to the start of
//! the next) at most `max_dist` positions. For every pattern with period up to
//! `l_max` that admits a valid subsequence, the miner reports the one with the
//! most repetitions.
//!
//! Mining proceeds in three phases:
//!
//! 1. [`phase1_candidates`] scans each symbol's occurrences for chains of
//!    repeats at distance `l` long enough to ever reach `min_rep`.
//! 2. [`phase2_single_patterns`] validates the single-symbol patterns
//!    `(I,*,...,*)` of each surviving `(I, l)` at every offset.
//! 3. [`phase3_extend`] joins valid `(i-1)`-patterns into `i`-patterns,
//!    keeping only candidates whose generalizations are all valid.
//!
//! Validity is closed under generalization (a generalization matches
//! everywhere its specialization does), which makes the pruning in phase 3
//! exact rather than heuristic.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::{find_matches, Pattern};
use crate::sequence::{Symbol, SymbolSequence};

/// Parameters of the periodic model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicConfig {
    /// Minimum repetitions in every segment.
    pub min_rep: usize,
    /// Maximum gap, in positions, between successive segments.
    pub max_dist: usize,
    /// Longest period considered.
    pub l_max: usize,
}

impl PeriodicConfig {
    pub fn new(min_rep: usize, max_dist: usize, l_max: usize) -> Result<Self> {
        let cfg = PeriodicConfig {
            min_rep,
            max_dist,
            l_max,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_rep < 1 {
            return Err(Error::InvalidConfig("min_rep must be >= 1".into()));
        }
        if self.l_max < 1 {
            return Err(Error::InvalidConfig("l_max must be >= 1".into()));
        }
        Ok(())
    }
}

/// `reps` back-to-back matches starting at `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub reps: usize,
}

impl Segment {
    /// One past the last covered position.
    pub fn end(&self, period: usize) -> usize {
        self.start + self.reps * period
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidSubsequence {
    pub period: usize,
    pub segments: Vec<Segment>,
    pub total_reps: usize,
}

impl ValidSubsequence {
    /// Gaps between consecutive segments.
    pub fn gaps(&self) -> impl Iterator<Item = usize> + '_ {
        self.segments
            .windows(2)
            .map(|w| w[1].start - w[0].end(self.period))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicResult {
    pub pattern: Pattern,
    pub best: ValidSubsequence,
}

/// Periods worth validating for each symbol.
///
/// `l` is kept for symbol `I` when some occurrence of `I` ends a chain of at
/// least `min_rep` occurrences, each exactly `l` after the previous one, which
/// is the least evidence any segment of a period-`l` pattern on `I` needs.
pub fn phase1_candidates(
    s: &SymbolSequence,
    cfg: &PeriodicConfig,
) -> BTreeMap<Symbol, BTreeSet<usize>> {
    let symbols = s.symbols();
    let n = symbols.len();
    let mut out: BTreeMap<Symbol, BTreeSet<usize>> = BTreeMap::new();
    let mut chain = vec![0usize; n];
    for l in 1..=cfg.l_max.min(n) {
        let mut hit = vec![false; s.alphabet_size()];
        for i in 0..n {
            chain[i] = if i >= l && symbols[i - l] == symbols[i] {
                chain[i - l] + 1
            } else {
                1
            };
            if chain[i] >= cfg.min_rep {
                hit[symbols[i].index()] = true;
            }
        }
        for (id, _) in hit.iter().enumerate().filter(|(_, h)| **h) {
            out.entry(Symbol(id as u32)).or_default().insert(l);
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct ChainKey {
    total: usize,
    start: usize,
    segments: usize,
}

impl ChainKey {
    /// More repetitions, then earlier start, then fewer segments.
    fn beats(&self, other: &ChainKey) -> bool {
        (
            self.total,
            std::cmp::Reverse(self.start),
            std::cmp::Reverse(self.segments),
        ) > (
            other.total,
            std::cmp::Reverse(other.start),
            std::cmp::Reverse(other.segments),
        )
    }
}

#[derive(Clone, Copy, Debug)]
enum Link {
    /// Last segment continues from the match one period earlier.
    Extend(usize),
    /// Last segment is exactly `min_rep` long, optionally chained after the
    /// segment ending at the given match.
    Open(Option<usize>),
}

#[derive(Clone, Copy, Debug)]
struct ChainNode {
    key: ChainKey,
    link: Link,
}

/// The valid subsequence with the most repetitions over `match_positions`.
///
/// Runs in a single pass: for each match `m` it keeps the best chain whose
/// last segment ends with `m`, either extending the chain ending one period
/// earlier or opening a new `min_rep` segment after the best chain that ends
/// within `max_dist` of it (a sliding-window maximum). Ties are broken by
/// earliest start, then fewest segments.
pub fn best_valid_subsequence(
    match_positions: &[usize],
    period: usize,
    cfg: &PeriodicConfig,
) -> Option<ValidSubsequence> {
    assert!(period >= 1, "period must be positive");
    debug_assert!(match_positions.windows(2).all(|w| w[0] < w[1]));
    let pos = match_positions;
    let n = pos.len();
    let min_rep = cfg.min_rep.max(1);
    let span = (min_rep - 1) * period;

    let mut run = vec![0usize; n];
    let mut best: Vec<Option<ChainNode>> = vec![None; n];
    let mut back = 0usize;
    // Chains eligible to precede a new segment, best first.
    let mut window: VecDeque<usize> = VecDeque::new();
    let mut next_in = 0usize;
    let mut overall: Option<usize> = None;

    for i in 0..n {
        let m = pos[i];
        let prev = if m >= period {
            while pos[back] < m - period {
                back += 1;
            }
            (pos[back] == m - period).then_some(back)
        } else {
            None
        };
        run[i] = prev.map_or(1, |j| run[j] + 1);

        let mut node: Option<ChainNode> = prev.and_then(|j| best[j]).map(|p| ChainNode {
            key: ChainKey {
                total: p.key.total + 1,
                ..p.key
            },
            link: Link::Extend(prev.unwrap()),
        });

        if run[i] >= min_rep {
            let seg_start = m - span;
            while next_in < i && pos[next_in] + period <= seg_start {
                if let Some(c) = best[next_in] {
                    while let Some(&b) = window.back() {
                        if best[b].unwrap().key.beats(&c.key) {
                            break;
                        }
                        window.pop_back();
                    }
                    window.push_back(next_in);
                }
                next_in += 1;
            }
            while let Some(&f) = window.front() {
                if pos[f] + period + cfg.max_dist < seg_start {
                    window.pop_front();
                } else {
                    break;
                }
            }
            let opened = match window.front() {
                Some(&f) => {
                    let k = best[f].unwrap().key;
                    ChainNode {
                        key: ChainKey {
                            total: k.total + min_rep,
                            start: k.start,
                            segments: k.segments + 1,
                        },
                        link: Link::Open(Some(f)),
                    }
                }
                None => ChainNode {
                    key: ChainKey {
                        total: min_rep,
                        start: seg_start,
                        segments: 1,
                    },
                    link: Link::Open(None),
                },
            };
            if node.is_none_or(|n| opened.key.beats(&n.key)) {
                node = Some(opened);
            }
        }

        best[i] = node;
        if let Some(c) = node {
            if overall.is_none_or(|o| c.key.beats(&best[o].unwrap().key)) {
                overall = Some(i);
            }
        }
    }

    let last = overall?;
    let total_reps = best[last].unwrap().key.total;
    let mut segments = Vec::new();
    let mut cursor = Some(last);
    while let Some(end) = cursor {
        let mut i = end;
        let mut reps = 0;
        loop {
            match best[i].unwrap().link {
                Link::Extend(j) => {
                    reps += 1;
                    i = j;
                }
                Link::Open(before) => {
                    reps += min_rep;
                    segments.push(Segment {
                        start: pos[i] - span,
                        reps,
                    });
                    cursor = before;
                    break;
                }
            }
        }
    }
    segments.reverse();
    Some(ValidSubsequence {
        period,
        segments,
        total_reps,
    })
}

struct Validated {
    pattern: Pattern,
    matches: Vec<usize>,
    best: ValidSubsequence,
}

fn validate(pattern: Pattern, matches: Vec<usize>, cfg: &PeriodicConfig) -> Option<Validated> {
    let best = best_valid_subsequence(&matches, pattern.period(), cfg)?;
    Some(Validated {
        pattern,
        matches,
        best,
    })
}

fn single_symbol_level(
    s: &SymbolSequence,
    cfg: &PeriodicConfig,
    cands: &BTreeMap<Symbol, BTreeSet<usize>>,
) -> Vec<Validated> {
    let n = s.len();
    let mut occurrences: HashMap<Symbol, Vec<usize>> = HashMap::new();
    for (i, sym) in s.symbols().iter().enumerate() {
        if cands.contains_key(sym) {
            occurrences.entry(*sym).or_default().push(i);
        }
    }
    let jobs: Vec<(Symbol, usize, usize)> = cands
        .iter()
        .flat_map(|(sym, periods)| {
            periods
                .iter()
                .filter(move |&&l| l <= n)
                .flat_map(move |&l| (0..l).map(move |off| (*sym, l, off)))
        })
        .collect();
    let mut out: Vec<Validated> = jobs
        .par_iter()
        .filter_map(|&(sym, l, off)| {
            let matches: Vec<usize> = occurrences[&sym]
                .iter()
                .filter(|&&q| q >= off && q - off + l <= n)
                .map(|&q| q - off)
                .collect();
            validate(Pattern::single(sym, off, l), matches, cfg)
        })
        .collect();
    out.sort_by(|a, b| a.pattern.cmp(&b.pattern));
    out
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// One level of candidate generation for patterns sharing a period.
fn extend_level(prev: &[Validated], cfg: &PeriodicConfig) -> Vec<Validated> {
    let Some(first) = prev.first() else {
        return Vec::new();
    };
    let arity = first.pattern.arity() + 1;
    let by_pattern: HashMap<&Pattern, usize> = prev
        .iter()
        .enumerate()
        .map(|(i, v)| (&v.pattern, i))
        .collect();

    let mut candidates = BTreeSet::new();
    for (i, a) in prev.iter().enumerate() {
        for b in &prev[i + 1..] {
            if let Some(j) = a.pattern.join(&b.pattern) {
                if j.arity() == arity {
                    candidates.insert(j);
                }
            }
        }
    }

    let mut out: Vec<Validated> = candidates
        .into_par_iter()
        .filter_map(|cand| {
            // Every (arity-1)-generalization must itself be valid.
            let parents = cand
                .concrete_slots()
                .map(|(off, _)| {
                    cand.without_slot(off)
                        .and_then(|g| by_pattern.get(&g).copied())
                })
                .collect::<Option<Vec<usize>>>()?;
            let mut matches = prev[parents[0]].matches.clone();
            for &p in &parents[1..] {
                matches = intersect(&matches, &prev[p].matches);
            }
            validate(cand, matches, cfg)
        })
        .collect();
    out.sort_by(|a, b| a.pattern.cmp(&b.pattern));
    out
}

impl From<Validated> for PeriodicResult {
    fn from(v: Validated) -> Self {
        PeriodicResult {
            pattern: v.pattern,
            best: v.best,
        }
    }
}

/// Validates every offset of every single-symbol candidate from phase 1.
pub fn phase2_single_patterns(
    s: &SymbolSequence,
    cfg: &PeriodicConfig,
    cands: &BTreeMap<Symbol, BTreeSet<usize>>,
) -> Vec<PeriodicResult> {
    single_symbol_level(s, cfg, cands)
        .into_iter()
        .map(PeriodicResult::from)
        .collect()
}

/// Grows valid `(i-1)`-patterns of one period into valid `i`-patterns.
///
/// All of `valid_prev` must share a period and an arity.
pub fn phase3_extend(
    s: &SymbolSequence,
    cfg: &PeriodicConfig,
    valid_prev: &[Pattern],
) -> Vec<PeriodicResult> {
    let prev: Vec<Validated> = valid_prev
        .iter()
        .filter_map(|p| validate(p.clone(), find_matches(p, s), cfg))
        .collect();
    debug_assert!(prev.windows(2).all(|w| {
        w[0].pattern.period() == w[1].pattern.period()
            && w[0].pattern.arity() == w[1].pattern.arity()
    }));
    extend_level(&prev, cfg)
        .into_iter()
        .map(PeriodicResult::from)
        .collect()
}

/// Orders results by period, then arity, then slots.
pub fn sort_results(results: &mut [PeriodicResult]) {
    results.sort_by(|a, b| {
        (a.pattern.period(), a.pattern.arity(), &a.pattern).cmp(&(
            b.pattern.period(),
            b.pattern.arity(),
            &b.pattern,
        ))
    });
}

/// Every pattern with period at most `l_max` that admits a valid subsequence,
/// each with its best subsequence.
pub fn mine_periodic(s: &SymbolSequence, cfg: &PeriodicConfig) -> Result<Vec<PeriodicResult>> {
    cfg.validate()?;
    let cands = phase1_candidates(s, cfg);
    let singles = single_symbol_level(s, cfg, &cands);

    let mut by_period: BTreeMap<usize, Vec<Validated>> = BTreeMap::new();
    for v in singles {
        by_period.entry(v.pattern.period()).or_default().push(v);
    }

    let mut results = Vec::new();
    for (_, mut level) in by_period {
        while !level.is_empty() {
            let next = extend_level(&level, cfg);
            results.extend(level.into_iter().map(PeriodicResult::from));
            level = next;
        }
    }
    sort_results(&mut results);
    Ok(results)
}
