//! HTTP service exposing the analysis operations over JSON.
//!
//! Stateless compute endpoints run on the blocking pool; corpus runs are
//! long-lived jobs tracked in shared state and polled by id. Paths in
//! requests (manifests, record stores, output directories) are resolved
//! on the server's filesystem.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::extract::{DefaultBodyLimit, Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};

use rankshift_api as api;
use rankshift_core::corpus::{
    load_manifest, load_records, run_corpus, RunOptions, RunOutcome, RunProgress,
};
use rankshift_core::experiment::{
    log_spaced_cutoffs, scan, DEFAULT_CUTOFF_COUNT, DEFAULT_CUTOFF_MIN,
};
use rankshift_core::rankfreq::{build_dist, rank_map, DistMode};
use rankshift_core::simon::{run_vs_analytic, simulate, SimonConfig};
use rankshift_core::tokenizer::tokenize;
use rankshift_core::zm::fit_at_cutoffs;
use rankshift_core::{report, synth};

/// Upper bound of the default cutoff ladder; novel-length texts rarely
/// exceed this many word types, and larger requested cutoffs clamp to
/// each text's rank count anyway.
pub const DEFAULT_CUTOFF_MAX: usize = 20_000;

const BODY_LIMIT: usize = 64 * 1024 * 1024;

struct RunSlot {
    state: api::RunState,
    progress: RunProgress,
    error: Option<String>,
    outcome: Option<RunOutcome>,
}

impl Default for RunSlot {
    fn default() -> Self {
        Self {
            state: api::RunState::Running,
            progress: RunProgress {
                total: 0,
                completed: 0,
                failed: 0,
                resumed: 0,
            },
            error: None,
            outcome: None,
        }
    }
}

#[derive(Default)]
pub struct AppState {
    runs: Mutex<BTreeMap<String, Arc<Mutex<RunSlot>>>>,
    next_run: AtomicU64,
}

type Shared = Arc<AppState>;

struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::NOT_FOUND,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(api::ErrorBody {
                error: self.message,
            }),
        )
            .into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker panicked: {e}")))?
}

async fn health() -> Json<api::HealthResponse> {
    Json(api::HealthResponse {
        status: "ok".into(),
        service: "rankshift".into(),
        version: env!("CARGO_PKG_VERSION").into(),
    })
}

async fn tokenize_handler(
    Json(req): Json<api::TokenizeRequest>,
) -> ApiResult<api::TokenizeResponse> {
    let tokens = blocking(move || {
        let config = req
            .options
            .to_config()
            .map_err(|e| ApiError::bad_request(e.to_string()))?;
        Ok(tokenize(&req.text, &config))
    })
    .await?;
    Ok(Json(api::TokenizeResponse {
        count: tokens.len(),
        tokens,
    }))
}

async fn rankfreq_handler(
    Json(req): Json<api::RankFreqRequest>,
) -> ApiResult<api::RankFreqResponse> {
    let response = blocking(move || {
        let config = req
            .options
            .to_config()
            .map_err(|e| ApiError::bad_request(e.to_string()))?;
        let tokens = tokenize(&req.text, &config);
        let integrated = build_dist(&tokens, DistMode::Integrated)
            .map_err(|e| ApiError::bad_request(e.to_string()))?;
        let word_only = build_dist(&tokens, DistMode::WordOnly).ok();
        let map = word_only
            .as_ref()
            .map(|w| rank_map(&integrated, w))
            .transpose()
            .map_err(|e| ApiError::internal(e.to_string()))?;
        Ok(api::RankFreqResponse {
            n1: map.as_ref().map(|m| m.n1()),
            integrated,
            word_only,
            rank_map: map,
        })
    })
    .await?;
    Ok(Json(response))
}

async fn fit_handler(Json(req): Json<api::FitRequest>) -> ApiResult<api::FitResponse> {
    let response = blocking(move || {
        let dist = match (&req.text, &req.freqs) {
            (Some(text), None) => {
                let config = req
                    .options
                    .to_config()
                    .map_err(|e| ApiError::bad_request(e.to_string()))?;
                let tokens = tokenize(text, &config);
                build_dist(&tokens, req.mode).map_err(|e| ApiError::bad_request(e.to_string()))?
            }
            (None, Some(freqs)) => {
                if freqs.is_empty() || freqs.contains(&0) {
                    return Err(ApiError::bad_request(
                        "freqs must be non-empty positive counts",
                    ));
                }
                let mut sorted = freqs.clone();
                sorted.sort_unstable_by(|a, b| b.cmp(a));
                rankshift_core::rankfreq::RankFreqDist {
                    mode: req.mode,
                    total_tokens: sorted.iter().sum(),
                    entries: sorted
                        .iter()
                        .enumerate()
                        .map(|(i, &freq)| rankshift_core::rankfreq::DistEntry {
                            surface: format!("#{}", i + 1),
                            kind: rankshift_core::tokenizer::TokenKind::Word,
                            freq,
                        })
                        .collect(),
                }
            }
            _ => {
                return Err(ApiError::bad_request(
                    "provide exactly one of `text` or `freqs`",
                ))
            }
        };
        let cutoffs = match (&req.cutoffs, req.r_cut) {
            (Some(list), _) if !list.is_empty() => list.clone(),
            (_, Some(r)) => vec![r],
            _ => vec![dist.len()],
        };
        let fits = fit_at_cutoffs(&dist, &cutoffs)
            .into_iter()
            .map(|c| match c.outcome {
                Ok(fit) => api::FitEntry {
                    r_cut: c.r_cut,
                    fit: Some(fit),
                    error: None,
                },
                Err(e) => api::FitEntry {
                    r_cut: c.r_cut,
                    fit: None,
                    error: Some(e.to_string()),
                },
            })
            .collect();
        Ok(api::FitResponse {
            available_ranks: dist.len(),
            fits,
        })
    })
    .await?;
    Ok(Json(response))
}

async fn simon_handler(Json(req): Json<api::SimonRequest>) -> ApiResult<api::SimonResponse> {
    let response = blocking(move || {
        let config = SimonConfig {
            alpha: req.alpha,
            steps: req.steps,
            seed: req.seed,
        };
        let run = simulate(&config).map_err(|e| ApiError::bad_request(e.to_string()))?;
        let report = if req.compare {
            Some(
                run_vs_analytic(&run, config.theta())
                    .map_err(|e| ApiError::internal(e.to_string()))?,
            )
        } else {
            None
        };
        Ok(api::SimonResponse {
            alpha: run.alpha,
            theta: config.theta(),
            steps: run.steps,
            seed: run.seed,
            rng: run.rng.clone(),
            n: run.n(),
            freqs: req.include_series.then_some(run.freqs),
            innovation_steps: req.include_series.then_some(run.innovation_steps),
            report,
        })
    })
    .await?;
    Ok(Json(response))
}

/// Cutoffs actually present in a record set: the union of requested
/// cutoffs, so a scan defaults to everything the records can answer.
fn cutoffs_in_records(records: &[rankshift_core::experiment::TextRecord]) -> Vec<usize> {
    let mut cutoffs: Vec<usize> = records
        .iter()
        .flat_map(|r| r.fits_zm.iter().map(|c| c.requested))
        .collect();
    cutoffs.sort_unstable();
    cutoffs.dedup();
    cutoffs
}

async fn scan_handler(Json(req): Json<api::ScanRequest>) -> ApiResult<api::ScanResponse> {
    let response = blocking(move || {
        let records = load_records(Path::new(&req.records_dir))
            .map_err(|e| ApiError::bad_request(e.to_string()))?;
        let cutoffs = match req.cutoffs {
            Some(c) if !c.is_empty() => c,
            _ => cutoffs_in_records(&records),
        };
        let scan = scan(&records, &cutoffs).map_err(|e| ApiError::bad_request(e.to_string()))?;
        Ok(api::ScanResponse {
            n_records: records.len(),
            scan,
        })
    })
    .await?;
    Ok(Json(response))
}

fn resolve_cutoffs(spec: &Option<api::CutoffSpec>) -> Result<Vec<usize>, ApiError> {
    if let Some(spec) = spec {
        if let Some(list) = &spec.list {
            if list.is_empty() {
                return Err(ApiError::bad_request("cutoff list is empty"));
            }
            let mut list = list.clone();
            list.sort_unstable();
            list.dedup();
            return Ok(list);
        }
        let min = spec.min.unwrap_or(DEFAULT_CUTOFF_MIN);
        let max = spec.max.unwrap_or(DEFAULT_CUTOFF_MAX);
        let count = spec.count.unwrap_or(DEFAULT_CUTOFF_COUNT);
        if min < 2 || max < min || count == 0 {
            return Err(ApiError::bad_request(format!(
                "bad cutoff spec: min {min}, max {max}, count {count}"
            )));
        }
        return log_spaced_cutoffs(min, max, count)
            .map_err(|e| ApiError::bad_request(e.to_string()));
    }
    log_spaced_cutoffs(DEFAULT_CUTOFF_MIN, DEFAULT_CUTOFF_MAX, DEFAULT_CUTOFF_COUNT)
        .map_err(|e| ApiError::bad_request(e.to_string()))
}

async fn corpus_run_start(
    State(state): State<Shared>,
    Json(req): Json<api::CorpusRunRequest>,
) -> Result<(StatusCode, Json<api::RunAccepted>), ApiError> {
    let config = req
        .options
        .to_config()
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    let cutoffs = resolve_cutoffs(&req.cutoffs)?;
    let run_id = format!("run-{}", state.next_run.fetch_add(1, Ordering::Relaxed) + 1);
    let slot = Arc::new(Mutex::new(RunSlot::default()));
    state
        .runs
        .lock()
        .expect("runs lock")
        .insert(run_id.clone(), slot.clone());

    let options = RunOptions {
        out_dir: PathBuf::from(&req.out_dir),
        cutoffs,
        workers: req.workers.unwrap_or(0),
        resume: req.resume.unwrap_or(true),
    };
    let manifest_path = PathBuf::from(&req.manifest);
    tokio::task::spawn_blocking(move || {
        let progress_slot = slot.clone();
        let result = load_manifest(&manifest_path).and_then(|manifest| {
            run_corpus(&manifest, &config, &options, &move |p: RunProgress| {
                progress_slot.lock().expect("slot lock").progress = p;
            })
        });
        let mut guard = slot.lock().expect("slot lock");
        match result {
            Ok(outcome) => {
                guard.state = api::RunState::Done;
                guard.outcome = Some(outcome);
            }
            Err(e) => {
                guard.state = api::RunState::Failed;
                guard.error = Some(e.to_string());
            }
        }
    });

    Ok((StatusCode::ACCEPTED, Json(api::RunAccepted { run_id })))
}

fn run_slot(state: &Shared, run_id: &str) -> Result<Arc<Mutex<RunSlot>>, ApiError> {
    state
        .runs
        .lock()
        .expect("runs lock")
        .get(run_id)
        .cloned()
        .ok_or_else(|| ApiError::not_found(format!("no such run: {run_id}")))
}

async fn corpus_run_status(
    State(state): State<Shared>,
    UrlPath(run_id): UrlPath<String>,
) -> ApiResult<api::RunStatus> {
    let slot = run_slot(&state, &run_id)?;
    let guard = slot.lock().expect("slot lock");
    Ok(Json(api::RunStatus {
        run_id,
        state: guard.state,
        progress: guard.progress,
        error: guard.error.clone(),
        outcome: guard.outcome.clone(),
    }))
}

async fn corpus_run_scan(
    State(state): State<Shared>,
    UrlPath(run_id): UrlPath<String>,
) -> ApiResult<rankshift_core::experiment::ScanResult> {
    let slot = run_slot(&state, &run_id)?;
    let guard = slot.lock().expect("slot lock");
    match (&guard.state, &guard.outcome) {
        (api::RunState::Done, Some(outcome)) => outcome
            .scan
            .clone()
            .map(Json)
            .ok_or_else(|| ApiError::not_found(outcome.scan_error.clone().unwrap_or_default())),
        (api::RunState::Failed, _) => Err(ApiError::not_found(
            guard.error.clone().unwrap_or_else(|| "run failed".into()),
        )),
        _ => Err(ApiError {
            status: StatusCode::CONFLICT,
            message: "run still in progress".into(),
        }),
    }
}

async fn report_handler(Json(req): Json<api::ReportRequest>) -> ApiResult<api::ReportResponse> {
    let response = blocking(move || {
        let records = load_records(Path::new(&req.records_dir))
            .map_err(|e| ApiError::bad_request(e.to_string()))?;
        let cutoffs = match req.cutoffs {
            Some(c) if !c.is_empty() => c,
            _ => cutoffs_in_records(&records),
        };
        let scan_result =
            scan(&records, &cutoffs).map_err(|e| ApiError::bad_request(e.to_string()))?;
        let out_dir = PathBuf::from(&req.out_dir);
        std::fs::create_dir_all(&out_dir).map_err(|e| ApiError::internal(e.to_string()))?;
        let bins = req.bins.unwrap_or(40);
        let r_cut = req.r_cut.or(scan_result.r_cut_star);
        let mut files = Vec::new();

        let mut write = |name: &str, bytes: Vec<u8>| -> Result<(), ApiError> {
            let path = out_dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| ApiError::internal(e.to_string()))?;
            files.push(path.display().to_string());
            Ok(())
        };

        let mut buf = Vec::new();
        report::write_scan_csv(&scan_result, &mut buf)
            .map_err(|e| ApiError::internal(e.to_string()))?;
        write("scan.csv", std::mem::take(&mut buf))?;

        report::write_fig_correlation_csv(&scan_result, &mut buf)
            .map_err(|e| ApiError::internal(e.to_string()))?;
        write("fig_correlation.csv", std::mem::take(&mut buf))?;

        report::write_fig_offsets_csv(&scan_result, &mut buf)
            .map_err(|e| ApiError::internal(e.to_string()))?;
        write("fig_offsets.csv", std::mem::take(&mut buf))?;

        if let Some(r_cut) = r_cut {
            report::write_fig_scatter_csv(&records, r_cut, 50, &mut buf)
                .map_err(|e| ApiError::internal(e.to_string()))?;
            write("fig_scatter.csv", std::mem::take(&mut buf))?;

            report::write_fig_hist_csv(&records, r_cut, bins, &mut buf)
                .map_err(|e| ApiError::internal(e.to_string()))?;
            write("fig_histogram.csv", std::mem::take(&mut buf))?;
        }

        if let Some(text_path) = &req.fig1_text {
            let config = req
                .options
                .to_config()
                .map_err(|e| ApiError::bad_request(e.to_string()))?;
            let bytes =
                std::fs::read(text_path).map_err(|e| ApiError::bad_request(e.to_string()))?;
            let text = String::from_utf8(bytes)
                .map_err(|e| ApiError::bad_request(format!("fig1 text: {e}")))?;
            let (body, _) = rankshift_core::corpus::strip_boilerplate(&text);
            let tokens = tokenize(&body, &config);
            let integrated = build_dist(&tokens, DistMode::Integrated)
                .map_err(|e| ApiError::bad_request(e.to_string()))?;
            let word_only = build_dist(&tokens, DistMode::WordOnly)
                .map_err(|e| ApiError::bad_request(e.to_string()))?;
            let map = rank_map(&integrated, &word_only)
                .map_err(|e| ApiError::internal(e.to_string()))?;
            report::write_fig_rank_translation_csv(&integrated, &word_only, &map, &mut buf)
                .map_err(|e| ApiError::internal(e.to_string()))?;
            write("fig_rank_translation.csv", std::mem::take(&mut buf))?;
        }

        Ok(api::ReportResponse {
            files,
            r_cut_used: r_cut,
        })
    })
    .await?;
    Ok(Json(response))
}

async fn gen_corpus_handler(
    Json(req): Json<api::GenCorpusRequest>,
) -> ApiResult<api::GenCorpusResponse> {
    let response = blocking(move || {
        if req.texts == 0 {
            return Err(ApiError::bad_request("texts must be at least 1"));
        }
        let manifest = synth::write_corpus(Path::new(&req.out_dir), req.seed, req.texts)
            .map_err(|e| ApiError::internal(e.to_string()))?;
        Ok(api::GenCorpusResponse {
            manifest: manifest.display().to_string(),
            texts: req.texts,
        })
    })
    .await?;
    Ok(Json(response))
}

async fn gen_text_handler(Json(req): Json<api::GenTextRequest>) -> ApiResult<api::GenTextResponse> {
    let response = blocking(move || {
        let text = if req.reference {
            synth::reference_novel()
        } else {
            synth::generate_text(&synth::TextProfile {
                seed: req.seed.unwrap_or(0),
                words: req.words.unwrap_or(50_000),
                ..Default::default()
            })
        };
        let path = PathBuf::from(&req.out_path);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| ApiError::internal(e.to_string()))?;
        }
        std::fs::write(&path, &text).map_err(|e| ApiError::internal(e.to_string()))?;
        Ok(api::GenTextResponse {
            path: path.display().to_string(),
            bytes: text.len() as u64,
        })
    })
    .await?;
    Ok(Json(response))
}

/// Builds the service router with fresh state.
pub fn app() -> Router {
    let state: Shared = Arc::new(AppState::default());
    Router::new()
        .route("/health", get(health))
        .route("/v1/tokenize", post(tokenize_handler))
        .route("/v1/rankfreq", post(rankfreq_handler))
        .route("/v1/fit", post(fit_handler))
        .route("/v1/simon", post(simon_handler))
        .route("/v1/scan", post(scan_handler))
        .route("/v1/report", post(report_handler))
        .route("/v1/corpus/runs", post(corpus_run_start))
        .route("/v1/corpus/runs/:id", get(corpus_run_status))
        .route("/v1/corpus/runs/:id/scan", get(corpus_run_scan))
        .route("/v1/gen/corpus", post(gen_corpus_handler))
        .route("/v1/gen/text", post(gen_text_handler))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

/// Binds and serves until the process exits.
pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    let bound = listener.local_addr()?;
    tracing::info!("listening on {bound}");
    eprintln!("rankshift server listening on http://{bound}");
    axum::serve(listener, app()).await
}

/// Spawns the service on an OS-assigned local port; used by the CLI when
/// no external server is configured, and by tests.
pub async fn spawn_ephemeral() -> std::io::Result<SocketAddr> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", 0)).await?;
    let bound = listener.local_addr()?;
    tokio::spawn(async move {
        if let Err(e) = axum::serve(listener, app()).await {
            tracing::error!("ephemeral server stopped: {e}");
        }
    });
    Ok(bound)
}
