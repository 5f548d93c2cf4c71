//! Request and response types for the rankshift HTTP service, shared by
//! the server and the client so both sides agree on the wire format.
//! Domain payloads reuse the core types' serde shapes directly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rankshift_core::corpus::{RunOutcome, RunProgress};
use rankshift_core::experiment::ScanResult;
use rankshift_core::rankfreq::{DistMode, RankFreqDist, RankMap};
use rankshift_core::simon::ComparisonReport;
use rankshift_core::tokenizer::{ContractionRule, Token, TokenizerConfig};
use rankshift_core::zm::FitResult;

#[derive(Debug, Error)]
pub enum OptionsError {
    #[error("contraction rule `{pattern}`: parts must concatenate to the pattern")]
    BadRule { pattern: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleDto {
    pub pattern: String,
    pub parts: Vec<String>,
}

/// Tokenizer settings as they travel over the wire.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TokenizerOptions {
    pub collapse_delimiter_runs: bool,
    /// Extra rules merged into the default table.
    pub contraction_rules: Vec<RuleDto>,
    /// Drop the built-in English rules before merging.
    pub no_default_contractions: bool,
    /// Characters forced to count as word characters.
    pub extra_word_chars: String,
    /// Characters forced to count as delimiters.
    pub extra_delimiters: String,
}

impl TokenizerOptions {
    pub fn to_config(&self) -> Result<TokenizerConfig, OptionsError> {
        let mut config = if self.no_default_contractions {
            TokenizerConfig::without_contractions()
        } else {
            TokenizerConfig::default()
        };
        if !self.contraction_rules.is_empty() {
            let rules: Result<Vec<ContractionRule>, _> = self
                .contraction_rules
                .iter()
                .map(|r| {
                    ContractionRule::new(r.pattern.clone(), r.parts.clone()).map_err(|_| {
                        OptionsError::BadRule {
                            pattern: r.pattern.clone(),
                        }
                    })
                })
                .collect();
            config = config.with_rules(rules?);
        }
        config = config
            .with_word_chars(self.extra_word_chars.chars())
            .with_delimiters(self.extra_delimiters.chars())
            .with_collapsed_runs(self.collapse_delimiter_runs);
        Ok(config)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub service: String,
    pub version: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TokenizeRequest {
    pub text: String,
    #[serde(default)]
    pub options: TokenizerOptions,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TokenizeResponse {
    pub count: usize,
    pub tokens: Vec<Token>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankFreqRequest {
    pub text: String,
    #[serde(default)]
    pub options: TokenizerOptions,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankFreqResponse {
    pub integrated: RankFreqDist,
    /// Absent when the text contains no word tokens.
    pub word_only: Option<RankFreqDist>,
    pub rank_map: Option<RankMap>,
    pub n1: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitRequest {
    /// Exactly one source: raw text to tokenize, or ready frequencies.
    pub text: Option<String>,
    pub freqs: Option<Vec<u64>>,
    /// Which distribution to fit when the source is text.
    #[serde(default = "default_fit_mode")]
    pub mode: DistMode,
    /// Single cutoff; defaults to the full series.
    pub r_cut: Option<usize>,
    /// Sweep over several cutoffs instead.
    pub cutoffs: Option<Vec<usize>>,
    #[serde(default)]
    pub options: TokenizerOptions,
}

fn default_fit_mode() -> DistMode {
    DistMode::WordOnly
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitEntry {
    pub r_cut: usize,
    pub fit: Option<FitResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResponse {
    /// Ranks available in the fitted distribution.
    pub available_ranks: usize,
    pub fits: Vec<FitEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimonRequest {
    pub alpha: f64,
    pub steps: u64,
    pub seed: u64,
    /// Also score the run against the refined frequency law.
    #[serde(default)]
    pub compare: bool,
    /// Include the per-word arrays in the response.
    #[serde(default = "default_true")]
    pub include_series: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimonResponse {
    pub alpha: f64,
    pub theta: f64,
    pub steps: u64,
    pub seed: u64,
    pub rng: String,
    pub n: usize,
    pub freqs: Option<Vec<u64>>,
    pub innovation_steps: Option<Vec<u64>>,
    pub report: Option<ComparisonReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanRequest {
    /// Directory of per-text record JSON files (server-side path).
    pub records_dir: String,
    /// Cutoffs to scan; defaults to every cutoff the records carry.
    pub cutoffs: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanResponse {
    pub n_records: usize,
    pub scan: ScanResult,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub min: Option<usize>,
    pub max: Option<usize>,
    pub count: Option<usize>,
    /// Explicit list; wins over min/max/count.
    pub list: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusRunRequest {
    /// Manifest CSV path (server-side).
    pub manifest: String,
    /// Output directory (server-side).
    pub out_dir: String,
    pub cutoffs: Option<CutoffSpec>,
    pub workers: Option<usize>,
    pub resume: Option<bool>,
    #[serde(default)]
    pub options: TokenizerOptions,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunAccepted {
    pub run_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunState {
    Running,
    Done,
    Failed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunStatus {
    pub run_id: String,
    pub state: RunState,
    pub progress: RunProgress,
    pub error: Option<String>,
    pub outcome: Option<RunOutcome>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRequest {
    pub records_dir: String,
    pub out_dir: String,
    /// Cutoffs for the scan behind the figures; defaults to the records'.
    pub cutoffs: Option<Vec<usize>>,
    /// Cutoff for the scatter and histogram panels; defaults to the
    /// scan's correlation-optimal cutoff.
    pub r_cut: Option<usize>,
    pub bins: Option<usize>,
    /// Optional text file for the rank-translation figure.
    pub fig1_text: Option<String>,
    #[serde(default)]
    pub options: TokenizerOptions,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportResponse {
    pub files: Vec<String>,
    pub r_cut_used: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenCorpusRequest {
    /// Directory to create (server-side).
    pub out_dir: String,
    pub texts: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenCorpusResponse {
    pub manifest: String,
    pub texts: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenTextRequest {
    /// File to write (server-side).
    pub out_path: String,
    /// Fixed reference novel when true; otherwise a seeded sample.
    #[serde(default)]
    pub reference: bool,
    pub seed: Option<u64>,
    pub words: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenTextResponse {
    pub path: String,
    pub bytes: u64,
}

/// Body of every non-2xx response.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

/// Core payload types re-exported so clients can use this crate alone.
pub mod payload {
    pub use rankshift_core::corpus::{FailedText, RunOutcome, RunProgress};
    pub use rankshift_core::experiment::{CutoffStats, ScanResult, TextRecord};
    pub use rankshift_core::rankfreq::{DistEntry, DistMode, RankFreqDist, RankMap};
    pub use rankshift_core::simon::{ComparisonReport, RankComparison};
    pub use rankshift_core::tokenizer::{Span, Token, TokenKind};
    pub use rankshift_core::zm::FitResult;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn options_default_roundtrip() {
        let opts: TokenizerOptions = serde_json::from_str("{}").unwrap();
        assert_eq!(opts, TokenizerOptions::default());
        let config = opts.to_config().unwrap();
        assert!(!config.collapse_delimiter_runs());
        assert!(!config.rules().is_empty());
    }

    #[test]
    fn options_build_custom_config() {
        let opts = TokenizerOptions {
            collapse_delimiter_runs: true,
            contraction_rules: vec![RuleDto {
                pattern: "gonna".into(),
                parts: vec!["gon".into(), "na".into()],
            }],
            no_default_contractions: true,
            extra_word_chars: "-".into(),
            extra_delimiters: String::new(),
        };
        let config = opts.to_config().unwrap();
        assert!(config.collapse_delimiter_runs());
        assert_eq!(config.rules().len(), 1);

        let bad = TokenizerOptions {
            contraction_rules: vec![RuleDto {
                pattern: "abc".into(),
                parts: vec!["zzz".into()],
            }],
            ..Default::default()
        };
        assert!(bad.to_config().is_err());
    }
}
