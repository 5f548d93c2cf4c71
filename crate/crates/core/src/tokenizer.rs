//! Delimiter-preserving tokenization.
//!
//! Text is split into a lossless sequence of word and non-word tokens:
//! every maximal run of word characters becomes one word token (possibly
//! split further by contraction rules), and every delimiter character
//! becomes its own single-character non-word token. Concatenating the
//! token surfaces in order always reproduces the input exactly.

use std::collections::BTreeSet;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

#[derive(Debug, Error)]
pub enum TokenizeError {
    #[error("invalid UTF-8 at byte offset {offset}")]
    Encoding { offset: usize },
    #[error("contraction rule `{pattern}`: parts must be non-empty and concatenate to the pattern")]
    InvalidRule { pattern: String },
    #[error("contraction rule line {line}: expected `pattern<TAB>part|part|...`")]
    InvalidRuleLine { line: usize },
    #[error("failed to read contraction rules: {0}")]
    RuleIo(#[from] std::io::Error),
}

/// Token class. A token is a word iff its surface contains at least one
/// word character; otherwise it consists entirely of delimiters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Word,
    NonWord,
}

/// Byte-offset interval into the source text, end exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharClass {
    WordChar,
    Delimiter,
}

/// Default character policy: Unicode letters, numbers, and combining
/// marks count as word characters; everything else (whitespace,
/// punctuation, symbols, controls) is a delimiter. Apostrophes are
/// delimiters here; their word-interior treatment is context-dependent
/// and handled by [`tokenize`].
pub fn classify_char(c: char) -> CharClass {
    if is_default_word_char(c) {
        CharClass::WordChar
    } else {
        CharClass::Delimiter
    }
}

fn is_default_word_char(c: char) -> bool {
    matches!(
        c.general_category_group(),
        GeneralCategoryGroup::Letter | GeneralCategoryGroup::Number | GeneralCategoryGroup::Mark
    )
}

/// A suffix-split rule: when a word token ends with `pattern`, the match
/// is replaced by `parts` and the remaining stem is examined again, so
/// rules compose (`shouldn't've` peels `'ve`, then `n't`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionRule {
    pattern: String,
    parts: Vec<String>,
}

impl ContractionRule {
    pub fn new(pattern: impl Into<String>, parts: Vec<String>) -> Result<Self, TokenizeError> {
        let pattern = pattern.into();
        let ok = !pattern.is_empty()
            && !parts.is_empty()
            && parts.iter().all(|p| !p.is_empty())
            && parts.concat() == pattern;
        if !ok {
            return Err(TokenizeError::InvalidRule { pattern });
        }
        Ok(Self { pattern, parts })
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    pub fn parts(&self) -> &[String] {
        &self.parts
    }
}

/// Immutable tokenizer settings; construct once and share freely across
/// threads.
#[derive(Debug, Clone)]
pub struct TokenizerConfig {
    rules: Vec<ContractionRule>,
    word_char_overrides: BTreeSet<char>,
    delimiter_overrides: BTreeSet<char>,
    apostrophes: BTreeSet<char>,
    collapse_delimiter_runs: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            rules: default_rules(),
            word_char_overrides: BTreeSet::new(),
            delimiter_overrides: BTreeSet::new(),
            apostrophes: ['\'', '\u{2019}'].into_iter().collect(),
            collapse_delimiter_runs: false,
        }
    }
}

/// English suffix rules, longest-match-first. The table is data: callers
/// can extend or replace it, e.g. from a rule file.
fn default_rules() -> Vec<ContractionRule> {
    let base: &[(&str, &[&str])] = &[
        ("n'tcha", &["n't", "cha"]),
        ("n't", &["n't"]),
        ("'re", &["'re"]),
        ("'ve", &["'ve"]),
        ("'ll", &["'ll"]),
        ("'s", &["'s"]),
        ("'d", &["'d"]),
        ("'m", &["'m"]),
    ];
    let mut rules = Vec::with_capacity(base.len() * 2);
    for &(pattern, parts) in base {
        let parts: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
        rules.push(ContractionRule::new(pattern, parts.clone()).expect("static rule"));
        // curly-apostrophe variant, common in typeset e-texts
        let curly = |s: &str| s.replace('\'', "\u{2019}");
        rules.push(
            ContractionRule::new(curly(pattern), parts.iter().map(|p| curly(p)).collect())
                .expect("static rule"),
        );
    }
    sort_rules(&mut rules);
    rules
}

fn sort_rules(rules: &mut [ContractionRule]) {
    rules.sort_by_key(|r| std::cmp::Reverse(r.pattern.len()));
}

impl TokenizerConfig {
    /// Config with no contraction rules at all.
    pub fn without_contractions() -> Self {
        Self {
            rules: Vec::new(),
            ..Self::default()
        }
    }

    /// Adds rules on top of the current table, keeping longest-match-first
    /// order.
    pub fn with_rules(mut self, extra: impl IntoIterator<Item = ContractionRule>) -> Self {
        self.rules.extend(extra);
        sort_rules(&mut self.rules);
        self
    }

    /// Replaces the rule table entirely.
    pub fn with_rules_only(mut self, rules: Vec<ContractionRule>) -> Self {
        self.rules = rules;
        sort_rules(&mut self.rules);
        self
    }

    /// Forces characters to classify as word characters.
    pub fn with_word_chars(mut self, chars: impl IntoIterator<Item = char>) -> Self {
        self.word_char_overrides.extend(chars);
        self
    }

    /// Forces characters to classify as delimiters.
    pub fn with_delimiters(mut self, chars: impl IntoIterator<Item = char>) -> Self {
        self.delimiter_overrides.extend(chars);
        self
    }

    /// When set, a maximal run of one repeated delimiter character becomes
    /// a single token instead of one token per character. Off by default:
    /// per-character counting gives each delimiter a well-defined frequency.
    pub fn with_collapsed_runs(mut self, collapse: bool) -> Self {
        self.collapse_delimiter_runs = collapse;
        self
    }

    pub fn collapse_delimiter_runs(&self) -> bool {
        self.collapse_delimiter_runs
    }

    pub fn rules(&self) -> &[ContractionRule] {
        &self.rules
    }

    /// Character policy with overrides applied; word-char overrides win
    /// over delimiter overrides.
    pub fn classify(&self, c: char) -> CharClass {
        if self.word_char_overrides.contains(&c) {
            CharClass::WordChar
        } else if self.delimiter_overrides.contains(&c) {
            CharClass::Delimiter
        } else {
            classify_char(c)
        }
    }

    pub fn kind_of(&self, surface: &str) -> TokenKind {
        if surface.chars().any(|c| self.classify(c) == CharClass::WordChar) {
            TokenKind::Word
        } else {
            TokenKind::NonWord
        }
    }

    fn is_apostrophe(&self, c: char) -> bool {
        self.apostrophes.contains(&c)
    }

    /// Reads rules in `pattern<TAB>part|part|...` format, one per line.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn load_rules(reader: impl BufRead) -> Result<Vec<ContractionRule>, TokenizeError> {
        let mut rules = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim_end_matches(['\r', '\n']);
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (pattern, parts) = trimmed
                .split_once('\t')
                .ok_or(TokenizeError::InvalidRuleLine { line: idx + 1 })?;
            let parts: Vec<String> = parts.split('|').map(|p| p.to_string()).collect();
            rules.push(ContractionRule::new(pattern, parts)?);
        }
        Ok(rules)
    }

    /// Interior split offsets (relative byte positions) for a word-run
    /// surface, from iterated longest-suffix rule application.
    fn contraction_cuts(&self, surface: &str) -> Vec<usize> {
        let mut cuts = Vec::new();
        let mut rest_end = surface.len();
        while rest_end > 0 {
            let rest = &surface[..rest_end];
            let Some(rule) = self.rules.iter().find(|r| rest.ends_with(r.pattern.as_str()))
            else {
                break;
            };
            let stem_end = rest_end - rule.pattern.len();
            let mut off = stem_end;
            for part in &rule.parts[..rule.parts.len() - 1] {
                off += part.len();
                cuts.push(off);
            }
            if stem_end > 0 {
                cuts.push(stem_end);
            }
            rest_end = stem_end;
        }
        cuts.sort_unstable();
        cuts
    }
}

/// Splits text into a lossless token sequence: concatenating the surfaces
/// reproduces `text` exactly. An apostrophe flanked by word characters is
/// kept inside the word run and then subject to contraction rules;
/// leading or trailing apostrophes act as delimiters.
pub fn tokenize(text: &str, config: &TokenizerConfig) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    let mut word_start: Option<usize> = None;
    let mut prev_word_char = false;

    while let Some((i, c)) = chars.next() {
        if config.classify(c) == CharClass::WordChar {
            word_start.get_or_insert(i);
            prev_word_char = true;
            continue;
        }
        if config.is_apostrophe(c) && prev_word_char {
            if let Some(&(_, next)) = chars.peek() {
                if config.classify(next) == CharClass::WordChar {
                    // interior apostrophe: stays in the run
                    prev_word_char = false;
                    continue;
                }
            }
        }
        flush_word_run(&mut tokens, text, word_start.take(), i, config);
        prev_word_char = false;
        push_delimiter(&mut tokens, i, c, config);
    }
    flush_word_run(&mut tokens, text, word_start.take(), text.len(), config);
    tokens
}

/// Validating entry point for raw bytes; reports the offset of the first
/// invalid UTF-8 sequence.
pub fn tokenize_bytes(bytes: &[u8], config: &TokenizerConfig) -> Result<Vec<Token>, TokenizeError> {
    let text = std::str::from_utf8(bytes).map_err(|e| TokenizeError::Encoding {
        offset: e.valid_up_to(),
    })?;
    Ok(tokenize(text, config))
}

fn flush_word_run(
    tokens: &mut Vec<Token>,
    text: &str,
    start: Option<usize>,
    end: usize,
    config: &TokenizerConfig,
) {
    let Some(start) = start else { return };
    let surface = &text[start..end];
    let cuts = config.contraction_cuts(surface);
    let mut piece_start = 0;
    for cut in cuts.into_iter().chain(std::iter::once(surface.len())) {
        let piece = &surface[piece_start..cut];
        tokens.push(Token {
            surface: piece.to_string(),
            kind: config.kind_of(piece),
            span: Span {
                start: start + piece_start,
                end: start + cut,
            },
        });
        piece_start = cut;
    }
}

fn push_delimiter(tokens: &mut Vec<Token>, i: usize, c: char, config: &TokenizerConfig) {
    let end = i + c.len_utf8();
    if config.collapse_delimiter_runs {
        if let Some(last) = tokens.last_mut() {
            if last.kind == TokenKind::NonWord
                && last.span.end == i
                && last.surface.chars().all(|x| x == c)
            {
                last.surface.push(c);
                last.span.end = end;
                return;
            }
        }
    }
    tokens.push(Token {
        surface: c.to_string(),
        kind: config.kind_of(&c.to_string()),
        span: Span { start: i, end },
    });
}
