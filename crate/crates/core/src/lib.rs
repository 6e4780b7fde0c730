//! Pattern mining over long symbol sequences.
//!
//! Three models share one set of sequence and pattern types:
//!
//! - [`periodic`]: asynchronous partial periodic patterns, validated by
//!   `min_rep` repetitions per segment and `max_dist` disturbance between
//!   segments.
//! - [`surprise`]: patterns ranked by information gain, so rare but recurring
//!   patterns surface ahead of merely frequent ones.
//! - [`approx`]: approximate patterns, scored by their best match through a
//!   compatibility matrix that models observation noise.
//!
//! [`generator`] produces synthetic sequences with planted patterns, and the
//! `oracle` module (default feature `oracle`) holds brute-force versions of
//! every miner for checking results on small inputs.
//!
//! ```
//! use seqpat::{mine_periodic, parse_sequence, PeriodicConfig};
//!
//! let (alphabet, seq) = parse_sequence("a x b a y b a z b a w b").unwrap();
//! let cfg = PeriodicConfig::new(3, 0, 3).unwrap();
//! let found = mine_periodic(&seq, &cfg).unwrap();
//! let rendered: Vec<String> = found.iter().map(|r| r.pattern.render(&alphabet)).collect();
//! assert!(rendered.contains(&"(a,*,b)".to_string()));
//! ```

pub mod approx;
pub mod cli;
pub mod error;
pub mod generator;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod pattern;
pub mod periodic;
pub mod sequence;
pub mod surprise;

pub use approx::{
    load_matrix, match_and_support_report, match_value, mine_approximate, window_match,
    ApproxConfig, ApproxPattern, CompatibilityMatrix, MatchReport, MatchResult,
};
pub use error::{Error, Result};
pub use generator::{generate_synthetic, GeneratorSpec, Plant};
pub use pattern::{find_matches, generalizations, matches_at, Pattern, Slot};
pub use periodic::{
    best_valid_subsequence, mine_periodic, phase1_candidates, phase2_single_patterns,
    phase3_extend, PeriodicConfig, PeriodicResult, Segment, ValidSubsequence,
};
pub use sequence::{parse_sequence, parse_sequence_with, Alphabet, Symbol, SymbolSequence};
pub use surprise::{
    info_gain, info_symbol, mine_surprising, support, symbol_prob, symbol_stats, top_k_surprising,
    ScoredPattern, SurpriseConfig, SurpriseMode, SymbolStat,
};

#[cfg(doctest)]
pub mod guide {
    #[doc = include_str!("../../../book/src/intro.md")]
    pub mod intro {}
    #[doc = include_str!("../../../book/src/sequences.md")]
    pub mod sequences {}
    #[doc = include_str!("../../../book/src/periodic.md")]
    pub mod periodic {}
    #[doc = include_str!("../../../book/src/surprise.md")]
    pub mod surprise {}
    #[doc = include_str!("../../../book/src/approximate.md")]
    pub mod approximate {}
    #[doc = include_str!("../../../book/src/verification.md")]
    pub mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
