//! Grids and randomized checks shared by the acceptance suite and the
//! oracle-equivalence tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqpat::oracle::{oracle_approx, oracle_info_gain, oracle_match, oracle_periodic};
use seqpat::*;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_sequence(rng: &mut ChaCha8Rng, alphabet: usize, len: usize) -> SymbolSequence {
    let ids: Vec<Symbol> = (0..len)
        .map(|_| Symbol(rng.random_range(0..alphabet as u32)))
        .collect();
    SymbolSequence::new(ids, alphabet).unwrap()
}

/// Every sequence of length `len` over `alphabet` symbols.
pub fn all_sequences(alphabet: usize, len: usize) -> impl Iterator<Item = SymbolSequence> {
    let total = alphabet.pow(len as u32);
    (0..total).map(move |mut code| {
        let mut ids = Vec::with_capacity(len);
        for _ in 0..len {
            ids.push(Symbol((code % alphabet) as u32));
            code /= alphabet;
        }
        SymbolSequence::new(ids, alphabet).unwrap()
    })
}

/// Row-stochastic matrix with a few exact zeros.
pub fn random_matrix(rng: &mut ChaCha8Rng, size: usize) -> CompatibilityMatrix {
    let rows = (0..size)
        .map(|_| {
            let w: Vec<f64> = (0..size)
                .map(|_| {
                    if rng.random_bool(0.25) {
                        0.0
                    } else {
                        rng.random_range(0.01..1.0)
                    }
                })
                .collect();
            let sum: f64 = w.iter().sum();
            if sum == 0.0 {
                let mut one = vec![0.0; size];
                one[rng.random_range(0..size)] = 1.0;
                one
            } else {
                w.into_iter().map(|x| x / sum).collect()
            }
        })
        .collect();
    CompatibilityMatrix::new(Alphabet::letters(size), rows).unwrap()
}

pub fn random_concrete(rng: &mut ChaCha8Rng, alphabet: usize, len: usize) -> Pattern {
    let syms: Vec<Symbol> = (0..len)
        .map(|_| Symbol(rng.random_range(0..alphabet as u32)))
        .collect();
    Pattern::concrete(&syms).unwrap()
}

pub const EXHAUSTIVE_BINARY: usize = 13;
pub const EXHAUSTIVE_TERNARY: usize = 8;
pub const RANDOM_PER_LENGTH: usize = 200;

/// Sequences used by the periodic and surprise grids: exhaustive for short
/// lengths, seeded random (half of them with a planted pattern) up to 20.
pub fn grid_sequences() -> Vec<SymbolSequence> {
    let mut out = Vec::new();
    for len in 1..=20 {
        out.extend(all_sequences(1, len));
    }
    for len in 1..=EXHAUSTIVE_BINARY {
        out.extend(all_sequences(2, len));
    }
    for len in 1..=EXHAUSTIVE_TERNARY {
        out.extend(all_sequences(3, len));
    }
    let mut r = rng(0x5e9);
    for alphabet in 2..=3 {
        let from = if alphabet == 2 {
            EXHAUSTIVE_BINARY
        } else {
            EXHAUSTIVE_TERNARY
        } + 1;
        for len in from..=20 {
            for k in 0..RANDOM_PER_LENGTH {
                if k % 2 == 0 {
                    out.push(random_sequence(&mut r, alphabet, len));
                } else {
                    out.push(planted(&mut r, alphabet, len));
                }
            }
        }
    }
    out
}

fn planted(r: &mut ChaCha8Rng, alphabet: usize, len: usize) -> SymbolSequence {
    let period = r.random_range(1..=3usize.min(len));
    let reps = r.random_range(1..=len / period);
    let start = r.random_range(0..=len - reps * period);
    let ids: Vec<Option<u32>> = loop {
        let ids: Vec<Option<u32>> = (0..period)
            .map(|_| {
                if r.random_bool(0.3) {
                    None
                } else {
                    Some(r.random_range(0..alphabet as u32))
                }
            })
            .collect();
        if ids.iter().any(Option::is_some) {
            break ids;
        }
    };
    let spec = GeneratorSpec {
        alphabet_size: alphabet,
        length: len,
        seed: r.random(),
        plants: vec![Plant {
            pattern: Pattern::from_ids(&ids).unwrap(),
            period,
            start,
            reps,
            noise_rate: if alphabet < 2 || r.random_bool(0.5) {
                0.0
            } else {
                0.1
            },
        }],
    };
    generate_synthetic(&spec).unwrap()
}

pub struct GridReport {
    pub cases: usize,
    pub discrepancies: Vec<String>,
}

impl GridReport {
    fn new() -> Self {
        GridReport {
            cases: 0,
            discrepancies: Vec::new(),
        }
    }

    fn fail(&mut self, msg: String) {
        if self.discrepancies.len() < 20 {
            self.discrepancies.push(msg);
        }
    }

    pub fn ok(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

fn ids(s: &SymbolSequence) -> Vec<u32> {
    s.symbols().iter().map(|x| x.0).collect()
}

pub fn periodic_grid(seqs: &[SymbolSequence]) -> GridReport {
    let mut report = GridReport::new();
    for s in seqs {
        for min_rep in 1..=3 {
            for max_dist in [0, 1, 3] {
                let cfg = PeriodicConfig::new(min_rep, max_dist, 3).unwrap();
                let mined = mine_periodic(s, &cfg).unwrap();
                let oracle = oracle_periodic(s, &cfg).unwrap();
                report.cases += 1;
                let a: Vec<_> = mined
                    .iter()
                    .map(|r| (r.pattern.clone(), r.best.total_reps))
                    .collect();
                let b: Vec<_> = oracle
                    .iter()
                    .map(|r| (r.pattern.clone(), r.best.total_reps))
                    .collect();
                if a != b {
                    report.fail(format!(
                        "periodic {:?} {cfg:?}: miner {} results, oracle {}",
                        ids(s),
                        a.len(),
                        b.len()
                    ));
                }
            }
        }
    }
    report
}

pub fn surprise_grid(seqs: &[SymbolSequence]) -> GridReport {
    let mut report = GridReport::new();
    for s in seqs {
        for max_len in 1..=3 {
            let all = oracle_info_gain(s, max_len).unwrap();
            let top_gain = all.first().map_or(0.0, |p| p.gain);
            for t in [0.0, 1.0, top_gain / 2.0, top_gain] {
                let mined =
                    mine_surprising(s, &SurpriseConfig::min_gain(t, max_len).unwrap()).unwrap();
                let expected: Vec<_> = all.iter().filter(|p| p.gain >= t).cloned().collect();
                report.cases += 1;
                if mined != expected {
                    report.fail(format!(
                        "surprise {:?} max_len={max_len} min_gain={t}: miner {} oracle {}",
                        ids(s),
                        mined.len(),
                        expected.len()
                    ));
                }
            }
            for k in [1, 3, 7] {
                let mined = top_k_surprising(s, k, max_len).unwrap();
                let expected: Vec<_> = all.iter().take(k).cloned().collect();
                report.cases += 1;
                if mined != expected {
                    report.fail(format!(
                        "top-{k} {:?} max_len={max_len}: differs from oracle",
                        ids(s)
                    ));
                }
            }
        }
    }
    report
}

/// `match_value` against enumeration for every sequence and pattern on the
/// grid, plus witness consistency.
pub fn match_grid() -> GridReport {
    let mut report = GridReport::new();
    let mut r = rng(0x3a7c);
    for alphabet in 1..=3usize {
        let mut matrices = vec![CompatibilityMatrix::identity(Alphabet::letters(alphabet))];
        matrices.extend((0..3).map(|_| random_matrix(&mut r, alphabet)));
        let max_exhaustive = match alphabet {
            1 => 8,
            2 => 8,
            _ => 5,
        };
        let mut seqs: Vec<SymbolSequence> = (1..=max_exhaustive)
            .flat_map(|len| all_sequences(alphabet, len))
            .collect();
        for len in max_exhaustive + 1..=8 {
            seqs.extend((0..40).map(|_| random_sequence(&mut r, alphabet, len)));
        }
        let mut patterns: Vec<Pattern> = (1..=3)
            .flat_map(|len| all_sequences(alphabet, len))
            .map(|s| Pattern::concrete(s.symbols()).unwrap())
            .collect();
        patterns.extend((0..4).map(|_| random_concrete(&mut r, alphabet, 4)));
        for c in &matrices {
            for s in &seqs {
                for p in &patterns {
                    report.cases += 1;
                    let got = match_value(p, s, c).unwrap();
                    let want = oracle_match(p, s, c).unwrap();
                    if (got.value - want).abs() > 1e-12 {
                        report.fail(format!(
                            "match {p} in {:?}: dp {} oracle {want}",
                            ids(s),
                            got.value
                        ));
                    }
                    if !got.alignment.is_empty() {
                        let w: Vec<Symbol> = got.alignment.iter().map(|&i| s[i]).collect();
                        let again = window_match(p, &w, c).unwrap();
                        if (again - got.value).abs() > 1e-12 {
                            report.fail(format!("witness for {p} in {:?} scores {again}", ids(s)));
                        }
                    }
                }
            }
        }
    }
    report
}

/// `mine_approximate` against full enumeration over small databases.
pub fn approx_grid(cases: usize) -> GridReport {
    let mut report = GridReport::new();
    let mut r = rng(0xa11);
    for _ in 0..cases {
        let alphabet = r.random_range(1..=4);
        let c = if r.random_bool(0.2) {
            CompatibilityMatrix::identity(Alphabet::letters(alphabet))
        } else {
            random_matrix(&mut r, alphabet)
        };
        let db: Vec<SymbolSequence> = (0..r.random_range(1..=3))
            .map(|_| {
                let len = r.random_range(1..=8);
                random_sequence(&mut r, alphabet, len)
            })
            .collect();
        let max_len = r.random_range(1..=3);
        let min_match = [0.01, 0.1, 0.3, 0.7, 1.0][r.random_range(0..5)];
        let cfg = ApproxConfig::new(min_match, max_len).unwrap();
        let mined = mine_approximate(&db, &c, &cfg).unwrap();
        let oracle = oracle_approx(&db, &c, &cfg).unwrap();
        report.cases += 1;
        let a: Vec<_> = mined.iter().map(|p| (&p.pattern, p.value)).collect();
        let b: Vec<_> = oracle.iter().map(|p| (&p.pattern, p.value)).collect();
        let same = a.len() == b.len()
            && a.iter()
                .zip(&b)
                .all(|((pa, va), (pb, vb))| pa == pb && (va - vb).abs() <= 1e-12);
        if !same {
            report.fail(format!(
                "approx min_match={min_match} max_len={max_len}: miner {} oracle {}",
                a.len(),
                b.len()
            ));
        }
    }
    report
}

/// Inserting one symbol anywhere never raises the match.
pub fn match_anti_monotone(cases: usize, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    for _ in 0..cases {
        let alphabet = r.random_range(1..=4);
        let c = random_matrix(&mut r, alphabet);
        let len = r.random_range(1..=12);
        let s = random_sequence(&mut r, alphabet, len);
        let plen = r.random_range(1..=4);
        let p = random_concrete(&mut r, alphabet, plen);
        let mut ext: Vec<Symbol> = p.slots().iter().map(|x| x.symbol().unwrap()).collect();
        ext.insert(
            r.random_range(0..=ext.len()),
            Symbol(r.random_range(0..alphabet as u32)),
        );
        let ext = Pattern::concrete(&ext).unwrap();
        let base = match_value(&p, &s, &c).unwrap().value;
        let grown = match_value(&ext, &s, &c).unwrap().value;
        if grown > base {
            return Err(format!("{ext} scores {grown} above {p} at {base}"));
        }
    }
    Ok(())
}

fn periodic_case(r: &mut ChaCha8Rng) -> (SymbolSequence, PeriodicConfig) {
    let alphabet = r.random_range(1..=3);
    let len = r.random_range(1..=30);
    let s = if r.random_bool(0.5) {
        random_sequence(r, alphabet, len)
    } else {
        planted(r, alphabet, len)
    };
    let cfg = PeriodicConfig::new(
        r.random_range(1..=4),
        r.random_range(0..=4),
        r.random_range(1..=4),
    )
    .unwrap();
    (s, cfg)
}

/// Every generalization of a reported pattern is reported, with at least as
/// many repetitions.
pub fn periodic_generalization_closure(cases: usize, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    for _ in 0..cases {
        let (s, cfg) = periodic_case(&mut r);
        let results = mine_periodic(&s, &cfg).unwrap();
        let reps: std::collections::HashMap<_, _> = results
            .iter()
            .map(|r| (r.pattern.clone(), r.best.total_reps))
            .collect();
        for res in &results {
            for g in generalizations(&res.pattern) {
                match reps.get(&g) {
                    None => return Err(format!("{} reported but not {g}", res.pattern)),
                    Some(&t) if t < res.best.total_reps => {
                        return Err(format!("{g} has {t} reps, fewer than {}", res.pattern))
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(())
}

/// Raising `min_rep` or lowering `max_dist` never adds patterns.
pub fn periodic_config_monotone(cases: usize, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    for _ in 0..cases {
        let (s, cfg) = periodic_case(&mut r);
        let patterns = |c: &PeriodicConfig| -> BTreeSet<Pattern> {
            mine_periodic(&s, c)
                .unwrap()
                .into_iter()
                .map(|r| r.pattern)
                .collect()
        };
        let base = patterns(&cfg);
        let stricter_rep = PeriodicConfig {
            min_rep: cfg.min_rep + r.random_range(1..=2),
            ..cfg
        };
        let stricter_dist = PeriodicConfig {
            max_dist: cfg.max_dist.saturating_sub(r.random_range(1..=2)),
            ..cfg
        };
        if !patterns(&stricter_rep).is_subset(&base) {
            return Err(format!("raising min_rep grew the result set: {cfg:?}"));
        }
        if !patterns(&stricter_dist).is_subset(&base) {
            return Err(format!("lowering max_dist grew the result set: {cfg:?}"));
        }
    }
    Ok(())
}

pub fn probabilities_sum_to_one(cases: usize, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    for _ in 0..cases {
        let alphabet = r.random_range(1..=50);
        let len = r.random_range(1..=2000);
        let s = random_sequence(&mut r, alphabet, len);
        let total: f64 = (0..alphabet as u32)
            .map(|i| symbol_prob(&s, Symbol(i)))
            .sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(format!("probabilities sum to {total}"));
        }
    }
    Ok(())
}

fn is_subsequence(p: &[Symbol], s: &[Symbol]) -> bool {
    let mut it = s.iter();
    p.iter().all(|x| it.any(|y| y == x))
}

/// Under the identity matrix the match is exactly the containment predicate.
pub fn identity_match_is_binary(cases: usize, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    for _ in 0..cases {
        let alphabet = r.random_range(1..=5);
        let c = CompatibilityMatrix::identity(Alphabet::letters(alphabet));
        let len = r.random_range(1..=40);
        let s = random_sequence(&mut r, alphabet, len);
        let plen = r.random_range(1..=6);
        let p = random_concrete(&mut r, alphabet, plen);
        let v = match_value(&p, &s, &c).unwrap().value;
        let syms: Vec<Symbol> = p.slots().iter().map(|x| x.symbol().unwrap()).collect();
        let want = if is_subsequence(&syms, s.symbols()) {
            1.0
        } else {
            0.0
        };
        if v != want {
            return Err(format!("{p} in {:?}: {v}, expected {want}", ids(&s)));
        }
    }
    Ok(())
}

/// Searches random sequences for a pair `(x,y)` whose gain clears a
/// threshold that both `(x,*)` and `(*,y)` miss. Returns the sequence, the
/// pattern and the threshold.
pub fn find_gain_witness(seed: u64) -> Option<(SymbolSequence, Pattern, f64)> {
    let mut r = rng(seed);
    for _ in 0..5000 {
        let len = r.random_range(6..=20);
        let s = random_sequence(&mut r, 3, len);
        let all = oracle_info_gain(&s, 2).unwrap();
        let gain = |p: &Pattern| all.iter().find(|x| &x.pattern == p).map_or(0.0, |x| x.gain);
        for cand in all
            .iter()
            .filter(|p| p.pattern.period() == 2 && p.pattern.arity() == 2)
        {
            let left = cand.pattern.without_slot(1).unwrap();
            let right = cand.pattern.without_slot(0).unwrap();
            let threshold = gain(&left).max(gain(&right));
            if cand.gain > threshold + 1e-9 {
                // Any threshold strictly between works; use the midpoint.
                return Some((s, cand.pattern.clone(), (cand.gain + threshold) / 2.0));
            }
        }
    }
    None
}
