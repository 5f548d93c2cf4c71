//! Per-text analysis records and the corpus-level cutoff scan.
//!
//! Each text yields shift fits on both the word-only and the integrated
//! distribution across a ladder of rank cutoffs, plus the integrated rank
//! of its top word. The scan then correlates the word-only shift with
//! `n1 - 1` across texts at every cutoff and summarizes the offset and
//! integrated-shift distributions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rankfreq::{build_dist, rank_map, DistMode, RankFreqError};
use crate::stats::{self, StatsError};
use crate::tokenizer::{tokenize, TokenizerConfig};
use crate::zm::{fit_at_cutoffs, FitResult};

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("text has {found} word type(s); need at least 2 to fit")]
    TooFewWordTypes { found: usize },
    #[error(transparent)]
    RankFreq(#[from] RankFreqError),
}

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("scan needs at least 3 records, got {got}")]
    TooFewRecords { got: usize },
}

/// One fit slot in a record: the cutoff that was requested, the cutoff
/// that was actually used (capped at the number of available ranks), and
/// either the fit or the reason it failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffRecord {
    pub requested: usize,
    pub effective: usize,
    pub k_hat: Option<f64>,
    pub sse: Option<f64>,
    pub error: Option<String>,
}

impl CutoffRecord {
    fn from_outcome(requested: usize, effective: usize, outcome: &Result<FitResult, crate::zm::FitError>) -> Self {
        match outcome {
            Ok(fit) => Self {
                requested,
                effective,
                k_hat: Some(fit.k_hat),
                sse: Some(fit.sse),
                error: None,
            },
            Err(e) => Self {
                requested,
                effective,
                k_hat: None,
                sse: None,
                error: Some(e.to_string()),
            },
        }
    }
}

/// Analysis output for one text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextRecord {
    pub text_id: String,
    /// Word-type count R.
    pub r_types: usize,
    /// Integrated-type count N.
    pub n_types: usize,
    /// Integrated rank of the top word.
    pub n1: usize,
    pub total_tokens: u64,
    /// Word-only fits, one per requested cutoff.
    pub fits_zm: Vec<CutoffRecord>,
    /// Integrated fits, one per requested cutoff.
    pub fits_s: Vec<CutoffRecord>,
    /// Processing notes (e.g. missing boilerplate markers, partial fits).
    #[serde(default)]
    pub flags: Vec<String>,
}

impl TextRecord {
    fn lookup(fits: &[CutoffRecord], requested: usize) -> Option<&CutoffRecord> {
        fits.iter().find(|c| c.requested == requested)
    }

    pub fn k_zm_at(&self, requested: usize) -> Option<f64> {
        Self::lookup(&self.fits_zm, requested).and_then(|c| c.k_hat)
    }

    pub fn k_s_at(&self, requested: usize) -> Option<f64> {
        Self::lookup(&self.fits_s, requested).and_then(|c| c.k_hat)
    }
}

/// Geometrically spaced integer cutoffs, deduplicated and ascending.
/// `min == max` collapses to a single value.
pub fn log_spaced_cutoffs(min: usize, max: usize, count: usize) -> Result<Vec<usize>, ScanError> {
    assert!(min >= 2, "cutoffs start at 2");
    assert!(max >= min, "max must be >= min");
    assert!(count >= 1, "need at least one cutoff");
    if min == max {
        return Ok(vec![min]);
    }
    let (lo, hi) = ((min as f64).ln(), (max as f64).ln());
    let mut cutoffs: Vec<usize> = (0..count)
        .map(|i| {
            let t = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
            (lo + t * (hi - lo)).exp().round() as usize
        })
        .collect();
    cutoffs.sort_unstable();
    cutoffs.dedup();
    Ok(cutoffs)
}

pub const DEFAULT_CUTOFF_MIN: usize = 2;
pub const DEFAULT_CUTOFF_COUNT: usize = 676;

/// Fits one distribution at every requested cutoff, capping each at the
/// available rank count and computing each distinct effective cutoff only
/// once.
fn fits_for(dist: &crate::rankfreq::RankFreqDist, cutoffs: &[usize]) -> Vec<CutoffRecord> {
    let effectives: Vec<usize> = cutoffs.iter().map(|&c| c.min(dist.len())).collect();
    let mut unique: Vec<usize> = effectives.clone();
    unique.sort_unstable();
    unique.dedup();
    let sweep = fit_at_cutoffs(dist, &unique);
    cutoffs
        .iter()
        .zip(&effectives)
        .map(|(&requested, &effective)| {
            let slot = sweep
                .iter()
                .find(|c| c.r_cut == effective)
                .expect("every effective cutoff was swept");
            CutoffRecord::from_outcome(requested, effective, &slot.outcome)
        })
        .collect()
}

/// Tokenizes a text and fits both distributions at every cutoff. Texts
/// with fewer than two word types are not fittable at all and are
/// rejected; per-cutoff failures (flat series etc.) are recorded in place
/// and flagged as partial.
pub fn analyze_text(
    text_id: &str,
    text: &str,
    config: &TokenizerConfig,
    cutoffs: &[usize],
) -> Result<TextRecord, AnalyzeError> {
    let tokens = tokenize(text, config);
    let word_only = match build_dist(&tokens, DistMode::WordOnly) {
        Ok(d) => d,
        Err(RankFreqError::Empty { .. }) => {
            return Err(AnalyzeError::TooFewWordTypes { found: 0 })
        }
        Err(e) => return Err(e.into()),
    };
    if word_only.len() < 2 {
        return Err(AnalyzeError::TooFewWordTypes {
            found: word_only.len(),
        });
    }
    let integrated = build_dist(&tokens, DistMode::Integrated)?;
    let map = rank_map(&integrated, &word_only)?;

    let fits_zm = fits_for(&word_only, cutoffs);
    let fits_s = fits_for(&integrated, cutoffs);
    let mut flags = Vec::new();
    if fits_zm.iter().any(|c| c.error.is_some()) || fits_s.iter().any(|c| c.error.is_some()) {
        flags.push("partial: some cutoffs failed to fit".to_string());
    }

    Ok(TextRecord {
        text_id: text_id.to_string(),
        r_types: word_only.len(),
        n_types: integrated.len(),
        n1: map.n1(),
        total_tokens: integrated.total_tokens,
        fits_zm,
        fits_s,
        flags,
    })
}

pub use crate::stats::{bonferroni_significant, pearson};

/// Per-cutoff scan row: correlation between the word-only shift and
/// `n1 - 1` across texts, offset summaries, and integrated-shift
/// summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffStats {
    pub r_cut: usize,
    /// Texts contributing a valid word-only fit at this cutoff.
    pub n_texts: usize,
    pub rho: f64,
    pub p_value: f64,
    /// Median of k_zm - (n1 - 1).
    pub offset_median: f64,
    /// Middle-decile envelope of the offsets.
    pub offset_p45: f64,
    pub offset_p55: f64,
    pub offset_mean: f64,
    /// Texts contributing a valid integrated fit at this cutoff.
    pub ks_n_texts: usize,
    pub ks_median: Option<f64>,
    pub ks_q1: Option<f64>,
    pub ks_q3: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedCutoff {
    pub r_cut: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    /// Percentile convention used for every summary in this result.
    pub percentile_method: String,
    pub n_records: usize,
    pub stats: Vec<CutoffStats>,
    pub excluded: Vec<ExcludedCutoff>,
    pub rho_max: Option<f64>,
    pub r_cut_star: Option<usize>,
}

impl ScanResult {
    pub fn stats_at(&self, r_cut: usize) -> Option<&CutoffStats> {
        self.stats.iter().find(|s| s.r_cut == r_cut)
    }
}

/// Correlates `k_zm` with `n1 - 1` across records at every cutoff.
/// Cutoffs with fewer than 3 valid fits, or with degenerate (constant)
/// series, are excluded with a reason instead of failing the scan. The
/// result is a pure function of the record set: records are ordered by
/// text id internally, so input order cannot change any output bit.
pub fn scan(records: &[TextRecord], cutoffs: &[usize]) -> Result<ScanResult, ScanError> {
    if records.len() < 3 {
        return Err(ScanError::TooFewRecords {
            got: records.len(),
        });
    }
    let mut ordered: Vec<&TextRecord> = records.iter().collect();
    ordered.sort_by(|a, b| a.text_id.cmp(&b.text_id));

    let mut stats_rows = Vec::new();
    let mut excluded = Vec::new();
    for &r_cut in cutoffs {
        let mut k_zm = Vec::new();
        let mut n1m1 = Vec::new();
        let mut offsets = Vec::new();
        let mut ks = Vec::new();
        for rec in &ordered {
            if let Some(k) = rec.k_zm_at(r_cut) {
                k_zm.push(k);
                n1m1.push((rec.n1 - 1) as f64);
                offsets.push(k - (rec.n1 as f64 - 1.0));
            }
            if let Some(k) = rec.k_s_at(r_cut) {
                ks.push(k);
            }
        }
        if k_zm.len() < 3 {
            excluded.push(ExcludedCutoff {
                r_cut,
                reason: format!("only {} text(s) with a valid fit; need 3", k_zm.len()),
            });
            continue;
        }
        let (rho, p_value) = match stats::pearson(&k_zm, &n1m1) {
            Ok(v) => v,
            Err(e @ StatsError::ConstantSeries) => {
                excluded.push(ExcludedCutoff {
                    r_cut,
                    reason: e.to_string(),
                });
                continue;
            }
            Err(e) => {
                excluded.push(ExcludedCutoff {
                    r_cut,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        offsets.sort_by(|a, b| a.partial_cmp(b).expect("finite offsets"));
        ks.sort_by(|a, b| a.partial_cmp(b).expect("finite shifts"));
        let (ks_median, ks_q1, ks_q3) = if ks.is_empty() {
            (None, None, None)
        } else {
            (
                Some(stats::median_sorted(&ks)),
                Some(stats::quantile_sorted(&ks, 0.25)),
                Some(stats::quantile_sorted(&ks, 0.75)),
            )
        };
        stats_rows.push(CutoffStats {
            r_cut,
            n_texts: k_zm.len(),
            rho,
            p_value,
            offset_median: stats::median_sorted(&offsets),
            offset_p45: stats::quantile_sorted(&offsets, 0.45),
            offset_p55: stats::quantile_sorted(&offsets, 0.55),
            offset_mean: offsets.iter().sum::<f64>() / offsets.len() as f64,
            ks_n_texts: ks.len(),
            ks_median,
            ks_q1,
            ks_q3,
        });
    }

    let best = stats_rows
        .iter()
        .max_by(|a, b| a.rho.partial_cmp(&b.rho).expect("finite rho"));
    let (rho_max, r_cut_star) = match best {
        Some(row) => (Some(row.rho), Some(row.r_cut)),
        None => (None, None),
    };
    Ok(ScanResult {
        percentile_method: "linear interpolation between order statistics".to_string(),
        n_records: records.len(),
        stats: stats_rows,
        excluded,
        rho_max,
        r_cut_star,
    })
}
