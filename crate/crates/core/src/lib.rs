//! Rank-frequency analysis where delimiters are tokens too.
//!
//! The pipeline: [`tokenizer`] turns text into words *and* non-words
//! (space, punctuation) without losing a byte; [`rankfreq`] ranks both
//! views of the frequency table and maps word ranks between them;
//! [`zm`] fits the rank-translation parameter of a fixed-exponent
//! Zipf-Mandelbrot law in closed form; [`simon`] simulates the
//! preferential-selection process whose refined frequency law predicts a
//! negative translation and a rank-1 outlier; [`experiment`] and
//! [`corpus`] run the whole thing over text collections and summarize
//! how the word-only shift tracks the count of non-words that outrank
//! the top word.

pub mod corpus;
pub mod experiment;
pub mod rankfreq;
pub mod report;
pub mod simon;
pub mod stats;
pub mod synth;
pub mod tokenizer;
pub mod zm;

pub use rankfreq::{build_dist, rank_map, DistMode, RankFreqDist, RankMap};
pub use tokenizer::{classify_char, tokenize, tokenize_bytes, Token, TokenKind, TokenizerConfig};
pub use zm::{fit_at_cutoffs, fit_shift, quotient_series, FitResult};
