//! Corpus ingestion, batch orchestration, and persistence.
//!
//! A manifest names the texts; the runner strips e-text boilerplate,
//! analyzes each text on a bounded worker pool, persists one JSON record
//! per text through a single writer (so a crash loses at most the
//! in-flight text), and finishes with the corpus CSV and the scan.
//! Re-runs on unchanged inputs are byte-identical, and a resumed run
//! skips texts whose records already exist.

use std::borrow::Cow;
use std::collections::BTreeSet;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::experiment::{analyze_text, scan, ScanResult, TextRecord};
use crate::tokenizer::TokenizerConfig;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("manifest entry `{text_id}`: path does not exist: {path}")]
    MissingPath { text_id: String, path: PathBuf },
    #[error("duplicate text_id `{0}` in manifest")]
    DuplicateId(String),
    #[error("text_id `{0}` must match [A-Za-z0-9._-]+ so it can name a record file")]
    BadId(String),
    #[error("no texts produced a usable record")]
    NoRecords,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("record {path}: {message}")]
    BadRecord { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub text_id: String,
    pub path: PathBuf,
    pub language: Option<String>,
    pub byte_size: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
    pub source_notes: String,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'))
}

/// Loads a `text_id,path[,language]` CSV. A leading header row is
/// accepted and skipped. Paths are resolved relative to the manifest's
/// directory and must exist.
pub fn load_manifest(path: &Path) -> Result<CorpusManifest, CorpusError> {
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| CorpusError::Manifest(e.to_string()))?;
    let mut entries = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row.map_err(|e| CorpusError::Manifest(e.to_string()))?;
        if row.len() < 2 {
            return Err(CorpusError::Manifest(format!(
                "row {}: expected text_id,path[,language]",
                idx + 1
            )));
        }
        let text_id = row[0].trim().to_string();
        if idx == 0 && text_id == "text_id" {
            continue;
        }
        if !valid_id(&text_id) {
            return Err(CorpusError::BadId(text_id));
        }
        if !seen.insert(text_id.clone()) {
            return Err(CorpusError::DuplicateId(text_id));
        }
        let raw_path = PathBuf::from(row[1].trim());
        let resolved = if raw_path.is_absolute() {
            raw_path
        } else {
            base.join(raw_path)
        };
        let meta = fs::metadata(&resolved).map_err(|_| CorpusError::MissingPath {
            text_id: text_id.clone(),
            path: resolved.clone(),
        })?;
        let language = row
            .get(2)
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| s.to_string());
        entries.push(ManifestEntry {
            text_id,
            path: resolved,
            language,
            byte_size: meta.len(),
        });
    }
    if entries.is_empty() {
        return Err(CorpusError::Manifest("manifest is empty".into()));
    }
    Ok(CorpusManifest {
        entries,
        source_notes: format!("loaded from {}", path.display()),
    })
}

/// Cuts license boilerplate out of a Project Gutenberg style file: the
/// body between the `*** START OF ...` and `*** END OF ...` marker lines.
/// Returns the text unchanged (flagged) when the markers are absent.
pub fn strip_boilerplate(raw: &str) -> (Cow<'_, str>, bool) {
    let mut body_start = None;
    let mut body_end = None;
    let mut offset = 0;
    for line in raw.split_inclusive('\n') {
        let line_start = offset;
        offset += line.len();
        if body_start.is_none() {
            if line.contains("*** START OF") {
                body_start = Some(offset);
            }
        } else if line.contains("*** END OF") {
            body_end = Some(line_start);
            break;
        }
    }
    match (body_start, body_end) {
        (Some(s), Some(e)) if s <= e => (Cow::Borrowed(&raw[s..e]), true),
        _ => (Cow::Borrowed(raw), false),
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub cutoffs: Vec<usize>,
    /// Worker threads; 0 means available parallelism.
    pub workers: usize,
    /// Skip texts whose record file already exists.
    pub resume: bool,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>, cutoffs: Vec<usize>) -> Self {
        Self {
            out_dir: out_dir.into(),
            cutoffs,
            workers: 0,
            resume: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunProgress {
    pub total: usize,
    pub completed: usize,
    pub failed: usize,
    pub resumed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    /// Records produced in this invocation.
    pub processed: usize,
    /// Records reused from a previous run.
    pub resumed: usize,
    pub failed: Vec<FailedText>,
    pub scan: Option<ScanResult>,
    /// Why the scan was skipped, when it was.
    pub scan_error: Option<String>,
    pub records_dir: PathBuf,
    pub corpus_csv: PathBuf,
    pub scan_json: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailedText {
    pub text_id: String,
    pub reason: String,
}

impl RunOutcome {
    /// 0 = clean, 1 = partial (some texts failed), 2 is reserved for
    /// fatal errors at the call site.
    pub fn exit_status(&self) -> i32 {
        if self.failed.is_empty() {
            0
        } else {
            1
        }
    }
}

fn record_path(records_dir: &Path, text_id: &str) -> PathBuf {
    records_dir.join(format!("{text_id}.json"))
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), CorpusError> {
    let tmp = path.with_extension("json.tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn load_record(path: &Path) -> Result<TextRecord, CorpusError> {
    let bytes = fs::read(path)?;
    serde_json::from_slice(&bytes).map_err(|e| CorpusError::BadRecord {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Serialization used for every record file: pretty JSON with a trailing
/// newline, no timestamps, so identical inputs yield identical bytes.
pub fn record_bytes(record: &TextRecord) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(record).expect("record serializes");
    bytes.push(b'\n');
    bytes
}

fn process_entry(
    entry: &ManifestEntry,
    config: &TokenizerConfig,
    cutoffs: &[usize],
) -> Result<TextRecord, String> {
    let bytes = fs::read(&entry.path).map_err(|e| format!("read failed: {e}"))?;
    let raw = std::str::from_utf8(&bytes)
        .map_err(|e| format!("invalid UTF-8 at byte offset {}", e.valid_up_to()))?;
    let (body, stripped) = strip_boilerplate(raw);
    let mut record =
        analyze_text(&entry.text_id, &body, config, cutoffs).map_err(|e| e.to_string())?;
    if !stripped {
        record.flags.push("no boilerplate markers found".to_string());
    }
    record.flags.sort();
    Ok(record)
}

/// Runs the full pipeline over a manifest. Per-text failures are
/// recorded and skipped; the call fails only when zero records exist at
/// the end. `progress` is invoked after every completed or failed text.
pub fn run_corpus(
    manifest: &CorpusManifest,
    config: &TokenizerConfig,
    options: &RunOptions,
    progress: &(dyn Fn(RunProgress) + Sync),
) -> Result<RunOutcome, CorpusError> {
    let records_dir = options.out_dir.join("records");
    fs::create_dir_all(&records_dir)?;

    let mut pending: Vec<&ManifestEntry> = Vec::new();
    let mut records: Vec<TextRecord> = Vec::new();
    let mut resumed = 0usize;
    for entry in &manifest.entries {
        if !valid_id(&entry.text_id) {
            return Err(CorpusError::BadId(entry.text_id.clone()));
        }
        let path = record_path(&records_dir, &entry.text_id);
        if options.resume && path.exists() {
            records.push(load_record(&path)?);
            resumed += 1;
        } else {
            pending.push(entry);
        }
    }

    let total = manifest.entries.len();
    let workers = if options.workers == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        options.workers
    }
    .min(pending.len().max(1));

    let completed = AtomicUsize::new(resumed);
    let failed_count = AtomicUsize::new(0);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(String, Result<TextRecord, String>)>> = Mutex::new(Vec::new());
    progress(RunProgress {
        total,
        completed: resumed,
        failed: 0,
        resumed,
    });

    std::thread::scope(|scope| {
        let (tx, rx) = std::sync::mpsc::channel::<(String, Result<TextRecord, String>)>();
        for _ in 0..workers {
            let tx = tx.clone();
            let pending = &pending;
            let next = &next;
            scope.spawn(move || {
                loop {
                    let idx = next.fetch_add(1, Ordering::Relaxed);
                    let Some(entry) = pending.get(idx) else { break };
                    let outcome = process_entry(entry, config, &options.cutoffs);
                    if tx.send((entry.text_id.clone(), outcome)).is_err() {
                        break;
                    }
                }
            });
        }
        drop(tx);

        // single writer: records land on disk one at a time, atomically
        for (text_id, outcome) in rx {
            if let Ok(record) = &outcome {
                if write_atomically(
                    &record_path(&records_dir, &text_id),
                    &record_bytes(record),
                )
                .is_err()
                {
                    // fall through; the failure is recorded below
                }
            }
            match &outcome {
                Ok(_) => completed.fetch_add(1, Ordering::Relaxed),
                Err(_) => failed_count.fetch_add(1, Ordering::Relaxed),
            };
            results.lock().expect("writer lock").push((text_id, outcome));
            progress(RunProgress {
                total,
                completed: completed.load(Ordering::Relaxed),
                failed: failed_count.load(Ordering::Relaxed),
                resumed,
            });
        }
    });

    let mut failed = Vec::new();
    for (text_id, outcome) in results.into_inner().expect("writer lock") {
        match outcome {
            Ok(record) => records.push(record),
            Err(reason) => failed.push(FailedText { text_id, reason }),
        }
    }
    failed.sort_by(|a, b| a.text_id.cmp(&b.text_id));
    if records.is_empty() {
        return Err(CorpusError::NoRecords);
    }
    records.sort_by(|a, b| a.text_id.cmp(&b.text_id));

    let corpus_csv = options.out_dir.join("corpus.csv");
    write_corpus_csv(&records, &corpus_csv)?;

    let (scan_result, scan_error, scan_json) = match scan(&records, &options.cutoffs) {
        Ok(s) => {
            let path = options.out_dir.join("scan.json");
            let mut bytes = serde_json::to_vec_pretty(&s).expect("scan serializes");
            bytes.push(b'\n');
            write_atomically(&path, &bytes)?;
            (Some(s), None, Some(path))
        }
        Err(e) => (None, Some(e.to_string()), None),
    };

    Ok(RunOutcome {
        processed: records.len() - resumed,
        resumed,
        failed,
        scan: scan_result,
        scan_error,
        records_dir,
        corpus_csv,
        scan_json,
    })
}

/// Corpus-level table: one row per text and requested cutoff, empty
/// fields where a fit failed.
pub fn write_corpus_csv(records: &[TextRecord], path: &Path) -> Result<(), CorpusError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["text_id", "R", "N", "n1", "r_cut", "k_zm", "k_s", "offset"])
        .map_err(io_of_csv)?;
    for record in records {
        for (zm, s) in record.fits_zm.iter().zip(&record.fits_s) {
            debug_assert_eq!(zm.requested, s.requested);
            let k_zm = zm.k_hat;
            let k_s = s.k_hat;
            if k_zm.is_none() && k_s.is_none() {
                continue;
            }
            let offset = k_zm.map(|k| k - (record.n1 as f64 - 1.0));
            let fmt = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
            w.write_record([
                record.text_id.clone(),
                record.r_types.to_string(),
                record.n_types.to_string(),
                record.n1.to_string(),
                zm.requested.to_string(),
                fmt(k_zm),
                fmt(k_s),
                fmt(offset),
            ])
            .map_err(io_of_csv)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CorpusError::Manifest(e.to_string()))?;
    write_atomically(path, &bytes)
}

fn io_of_csv(e: csv::Error) -> CorpusError {
    CorpusError::Io(std::io::Error::other(e))
}

/// Reads every record JSON under a directory (sorted by file name).
pub fn load_records(records_dir: &Path) -> Result<Vec<TextRecord>, CorpusError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(records_dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut records = Vec::with_capacity(paths.len());
    for p in paths {
        records.push(load_record(&p)?);
    }
    Ok(records)
}
