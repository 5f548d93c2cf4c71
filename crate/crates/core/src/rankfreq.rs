//! Frequency-ranked token distributions and the rank map between the
//! integrated (words + non-words) and word-only views.
//!
//! Ranks are 1-based. Ordering is deterministic: frequency descending,
//! then surface ascending, then word before non-word, so identical token
//! sequences always produce identical ranks.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tokenizer::{Token, TokenKind};

#[derive(Debug, Error)]
pub enum RankFreqError {
    #[error("no rankable tokens after {mode:?} filtering")]
    Empty { mode: DistMode },
    #[error("distributions are inconsistent: word `{surface}` (freq {freq}) has no matching integrated entry")]
    Inconsistent { surface: String, freq: u64 },
    #[error("expected a {expected:?} distribution, got {got:?}")]
    WrongMode { expected: DistMode, got: DistMode },
    #[error("bad escape sequence `{escape}` in surface field")]
    BadEscape { escape: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistMode {
    Integrated,
    WordOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistEntry {
    pub surface: String,
    pub kind: TokenKind,
    pub freq: u64,
}

/// Rank-frequency table: `entries[r-1]` is the rank-`r` type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankFreqDist {
    pub mode: DistMode,
    pub entries: Vec<DistEntry>,
    pub total_tokens: u64,
}

impl RankFreqDist {
    /// Number of distinct types (R for word-only, N for integrated).
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Frequency at 1-based rank.
    pub fn freq(&self, rank: usize) -> Option<u64> {
        self.entries.get(rank.checked_sub(1)?).map(|e| e.freq)
    }
}

fn rank_order(a: &DistEntry, b: &DistEntry) -> Ordering {
    b.freq
        .cmp(&a.freq)
        .then_with(|| a.surface.cmp(&b.surface))
        .then_with(|| a.kind.cmp(&b.kind))
}

/// Counts exact surface multiplicities (kind-aware) and ranks them.
/// Word-only mode drops non-word tokens first.
pub fn build_dist(tokens: &[Token], mode: DistMode) -> Result<RankFreqDist, RankFreqError> {
    let mut counts: HashMap<(&str, TokenKind), u64> = HashMap::new();
    let mut total = 0u64;
    for t in tokens {
        if mode == DistMode::WordOnly && t.kind != TokenKind::Word {
            continue;
        }
        *counts.entry((t.surface.as_str(), t.kind)).or_insert(0) += 1;
        total += 1;
    }
    if counts.is_empty() {
        return Err(RankFreqError::Empty { mode });
    }
    let mut entries: Vec<DistEntry> = counts
        .into_iter()
        .map(|((surface, kind), freq)| DistEntry {
            surface: surface.to_string(),
            kind,
            freq,
        })
        .collect();
    entries.sort_by(rank_order);
    Ok(RankFreqDist {
        mode,
        entries,
        total_tokens: total,
    })
}

/// Per-word-rank translation into integrated ranks: `n_of_r[r-1]` is the
/// integrated rank of the rank-`r` word. Strictly increasing, with
/// `n_of_r[r-1] >= r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankMap {
    n_of_r: Vec<usize>,
}

impl RankMap {
    /// Integrated rank of the highest-frequency word.
    pub fn n1(&self) -> usize {
        self.n_of_r[0]
    }

    /// Integrated rank for 1-based word rank `r`.
    pub fn get(&self, r: usize) -> Option<usize> {
        self.n_of_r.get(r.checked_sub(1)?).copied()
    }

    pub fn len(&self) -> usize {
        self.n_of_r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_of_r.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.n_of_r
    }

    pub fn from_raw(n_of_r: Vec<usize>) -> Option<Self> {
        if n_of_r.is_empty() || n_of_r.windows(2).any(|w| w[0] >= w[1]) {
            return None;
        }
        Some(Self { n_of_r })
    }
}

/// Builds the rank map between two distributions of the same token
/// sequence. Deleting non-words changes ranks, never frequencies, so each
/// word entry must reappear in the integrated table with an identical
/// (surface, freq) pair and in the same relative order.
pub fn rank_map(
    integrated: &RankFreqDist,
    word_only: &RankFreqDist,
) -> Result<RankMap, RankFreqError> {
    if integrated.mode != DistMode::Integrated {
        return Err(RankFreqError::WrongMode {
            expected: DistMode::Integrated,
            got: integrated.mode,
        });
    }
    if word_only.mode != DistMode::WordOnly {
        return Err(RankFreqError::WrongMode {
            expected: DistMode::WordOnly,
            got: word_only.mode,
        });
    }
    let mut n_of_r = Vec::with_capacity(word_only.len());
    let mut words = word_only.entries.iter();
    let mut pending = words.next();
    for (idx, entry) in integrated.entries.iter().enumerate() {
        if entry.kind != TokenKind::Word {
            continue;
        }
        match pending {
            Some(w) if w.surface == entry.surface && w.freq == entry.freq => {
                n_of_r.push(idx + 1);
                pending = words.next();
            }
            _ => {
                return Err(RankFreqError::Inconsistent {
                    surface: entry.surface.clone(),
                    freq: entry.freq,
                })
            }
        }
    }
    if let Some(w) = pending {
        return Err(RankFreqError::Inconsistent {
            surface: w.surface.clone(),
            freq: w.freq,
        });
    }
    Ok(RankMap { n_of_r })
}

/// Renders a surface for CSV output: space becomes `\s`, other whitespace
/// and control characters become named or `\u{...}` escapes, so delimiter
/// tokens stay visible in the table.
pub fn escape_surface(surface: &str) -> String {
    let mut out = String::with_capacity(surface.len());
    for c in surface.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            ' ' => out.push_str("\\s"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c.is_control() || c.is_whitespace() => {
                out.push_str(&format!("\\u{{{:04X}}}", c as u32));
            }
            c => out.push(c),
        }
    }
    out
}

/// Inverse of [`escape_surface`].
pub fn unescape_surface(escaped: &str) -> Result<String, RankFreqError> {
    let mut out = String::with_capacity(escaped.len());
    let mut chars = escaped.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('s') => out.push(' '),
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            Some('r') => out.push('\r'),
            Some('u') => {
                let rest: String = chars.clone().collect();
                let inner = rest
                    .strip_prefix('{')
                    .and_then(|r| r.split_once('}'))
                    .ok_or_else(|| RankFreqError::BadEscape {
                        escape: format!("\\u{rest}"),
                    })?;
                let (hex, _) = inner;
                let code = u32::from_str_radix(hex, 16).map_err(|_| RankFreqError::BadEscape {
                    escape: format!("\\u{{{hex}}}"),
                })?;
                let c = char::from_u32(code).ok_or_else(|| RankFreqError::BadEscape {
                    escape: format!("\\u{{{hex}}}"),
                })?;
                out.push(c);
                for _ in 0..hex.len() + 2 {
                    chars.next();
                }
            }
            other => {
                return Err(RankFreqError::BadEscape {
                    escape: other.map(|c| format!("\\{c}")).unwrap_or_else(|| "\\".into()),
                })
            }
        }
    }
    Ok(out)
}

pub fn kind_label(kind: TokenKind) -> &'static str {
    match kind {
        TokenKind::Word => "word",
        TokenKind::NonWord => "nonword",
    }
}

/// Writes `rank,surface,kind,freq` rows, surfaces escaped.
pub fn write_dist_csv<W: io::Write>(dist: &RankFreqDist, writer: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["rank", "surface", "kind", "freq"])?;
    for (idx, e) in dist.entries.iter().enumerate() {
        w.write_record([
            (idx + 1).to_string(),
            escape_surface(&e.surface),
            kind_label(e.kind).to_string(),
            e.freq.to_string(),
        ])?;
    }
    w.flush()
}

/// Writes `r,n_r,surface,freq` rows pairing word ranks with their
/// integrated ranks.
pub fn write_rank_map_csv<W: io::Write>(
    map: &RankMap,
    word_only: &RankFreqDist,
    writer: W,
) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["r", "n_r", "surface", "freq"])?;
    for (idx, e) in word_only.entries.iter().enumerate() {
        w.write_record([
            (idx + 1).to_string(),
            map.as_slice()[idx].to_string(),
            escape_surface(&e.surface),
            e.freq.to_string(),
        ])?;
    }
    w.flush()
}
