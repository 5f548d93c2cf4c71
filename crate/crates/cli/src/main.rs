//! Command-line front end. Every analysis subcommand talks to the HTTP
//! service: either an external one named by `--server`, or an ephemeral
//! in-process instance bound to a loopback port for the duration of the
//! command.
//!
//! Exit codes: 0 success, 1 partial (some corpus texts failed), 2 fatal.

mod config;

use std::io::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use rankshift_api as api;
use rankshift_client::Client;
use rankshift_core::rankfreq::escape_surface;

use config::FileConfig;

#[derive(Parser)]
#[command(name = "rankshift", version, about = "Rank-frequency analysis with delimiters as first-class tokens")]
struct Cli {
    /// Base URL of a running service; when absent an in-process server
    /// is started for this invocation.
    #[arg(long, global = true)]
    server: Option<String>,

    /// Optional TOML config file; flags win over file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct TokenizerArgs {
    /// Merge a run of one repeated delimiter into a single token.
    #[arg(long)]
    collapse_runs: bool,

    /// Extra contraction rules, one `pattern<TAB>part|part` per line.
    #[arg(long, value_name = "FILE")]
    contractions: Option<PathBuf>,

    /// Strip e-text boilerplate between `*** START OF` / `*** END OF`
    /// markers before analysis.
    #[arg(long)]
    strip: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service in the foreground.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },

    /// Tokenize a text file into a token CSV.
    Tokenize {
        input: PathBuf,
        /// Output CSV; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tokenizer: TokenizerArgs,
    },

    /// Build both rank-frequency tables and the rank map for a text.
    Rankfreq {
        input: PathBuf,
        /// Directory for integrated.csv, word_only.csv, rank_map.csv.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        tokenizer: TokenizerArgs,
    },

    /// Fit the rank-translation shift of a text or a distribution CSV.
    Fit {
        input: PathBuf,
        /// Treat the input as a `rank,surface,kind,freq` CSV.
        #[arg(long)]
        dist: bool,
        #[arg(long, value_parser = parse_mode, default_value = "word-only")]
        mode: api::payload::DistMode,
        /// Rank cutoff; full series when omitted.
        #[arg(long)]
        rcut: Option<usize>,
        /// Sweep several cutoffs (comma-separated) instead.
        #[arg(long, value_delimiter = ',')]
        cutoffs: Option<Vec<usize>>,
        /// Output JSON; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tokenizer: TokenizerArgs,
    },

    /// Simulate the preferential-selection process.
    Simon {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also score the run against the refined frequency law.
        #[arg(long)]
        compare: bool,
        /// Directory for simon_run.csv (and simon_report.json with
        /// --compare).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },

    /// Run the full pipeline over a manifest of texts.
    Corpus {
        manifest: PathBuf,
        /// Output directory for records/, corpus.csv, scan.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        cutoff_min: Option<usize>,
        #[arg(long)]
        cutoff_max: Option<usize>,
        #[arg(long)]
        cutoff_count: Option<usize>,
        /// Explicit cutoff list; wins over min/max/count.
        #[arg(long, value_delimiter = ',')]
        cutoffs: Option<Vec<usize>>,
        #[arg(long)]
        workers: Option<usize>,
        /// Reprocess texts even when their record file exists.
        #[arg(long)]
        no_resume: bool,
        #[command(flatten)]
        tokenizer: TokenizerArgs,
    },

    /// Scan persisted records and write scan.json + scan.csv.
    Scan {
        records_dir: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Cutoffs to scan; defaults to every cutoff in the records.
        #[arg(long, value_delimiter = ',')]
        cutoffs: Option<Vec<usize>>,
    },

    /// Emit plot-ready CSVs for each figure panel.
    Report {
        records_dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cutoff for the scatter/histogram panels; defaults to the
        /// correlation-optimal one.
        #[arg(long)]
        rcut: Option<usize>,
        #[arg(long)]
        bins: Option<usize>,
        /// Text file for the rank-translation figure.
        #[arg(long)]
        fig1_text: Option<PathBuf>,
    },

    /// Generate synthetic inputs.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Subcommand)]
enum GenCommand {
    /// A corpus of boilerplate-wrapped synthetic texts plus manifest.csv.
    Corpus {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        texts: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// A single synthetic text file.
    Text {
        #[arg(long)]
        out: PathBuf,
        /// Emit the fixed bundled reference novel.
        #[arg(long)]
        reference: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50_000)]
        words: usize,
    },
}

fn parse_mode(s: &str) -> Result<api::payload::DistMode, String> {
    match s {
        "integrated" => Ok(api::payload::DistMode::Integrated),
        "word-only" | "word_only" => Ok(api::payload::DistMode::WordOnly),
        other => Err(format!("unknown mode `{other}`; use integrated or word-only")),
    }
}

fn tokenizer_options(args: &TokenizerArgs, file: &FileConfig) -> anyhow::Result<api::TokenizerOptions> {
    let mut options = api::TokenizerOptions {
        collapse_delimiter_runs: args.collapse_runs || file.collapse_runs.unwrap_or(false),
        ..Default::default()
    };
    let rules_path = args.contractions.as_ref().or(file.contractions.as_ref());
    if let Some(path) = rules_path {
        let raw = std::fs::read(path)
            .with_context(|| format!("reading contraction rules {}", path.display()))?;
        let rules = rankshift_core::tokenizer::TokenizerConfig::load_rules(raw.as_slice())
            .with_context(|| format!("parsing contraction rules {}", path.display()))?;
        options.contraction_rules = rules
            .into_iter()
            .map(|r| api::RuleDto {
                pattern: r.pattern().to_string(),
                parts: r.parts().to_vec(),
            })
            .collect();
    }
    Ok(options)
}

fn read_text(path: &Path, strip: bool) -> anyhow::Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let text = String::from_utf8(bytes).map_err(|e| {
        anyhow::anyhow!(
            "{}: invalid UTF-8 at byte offset {}",
            path.display(),
            e.utf8_error().valid_up_to()
        )
    })?;
    if strip {
        let (body, _) = rankshift_core::corpus::strip_boilerplate(&text);
        Ok(body.into_owned())
    } else {
        Ok(text)
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match path {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn tokens_csv(tokens: &[api::payload::Token]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "surface", "kind", "start", "end"])?;
    for (i, t) in tokens.iter().enumerate() {
        let kind = match t.kind {
            api::payload::TokenKind::Word => "word",
            api::payload::TokenKind::NonWord => "nonword",
        };
        w.write_record([
            (i + 1).to_string(),
            escape_surface(&t.surface),
            kind.to_string(),
            t.span.start.to_string(),
            t.span.end.to_string(),
        ])?;
    }
    Ok(w.into_inner()?)
}

fn dist_csv_freqs(path: &Path) -> anyhow::Result<Vec<u64>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("reading distribution CSV {}", path.display()))?;
    let mut freqs = Vec::new();
    for row in reader.records() {
        let row = row?;
        let freq: u64 = row
            .get(3)
            .with_context(|| "distribution CSV needs a 4th `freq` column")?
            .parse()
            .with_context(|| "freq column must hold positive integers")?;
        freqs.push(freq);
    }
    if freqs.is_empty() {
        bail!("distribution CSV {} has no data rows", path.display());
    }
    Ok(freqs)
}

fn out_dir_or(file: &FileConfig, flag: Option<PathBuf>, what: &str) -> anyhow::Result<PathBuf> {
    file.resolve_out_dir(flag).with_context(|| {
        format!("{what} needs an output directory: pass --out/--out-dir, set out_dir in the config file, or set RANKSHIFT_OUT")
    })
}

fn pretty_json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    bytes
}

async fn connect(cli_server: Option<String>, file: &FileConfig) -> anyhow::Result<Client> {
    let base = match cli_server.or_else(|| file.server.clone()) {
        Some(base) => base,
        None => {
            let addr = rankshift_server::spawn_ephemeral()
                .await
                .context("starting in-process server")?;
            format!("http://{addr}")
        }
    };
    let client = Client::new(base);
    client
        .health()
        .await
        .with_context(|| format!("service not reachable at {}", client.base_url()))?;
    Ok(client)
}

async fn run(cli: Cli) -> anyhow::Result<i32> {
    let file = FileConfig::load(cli.config.as_deref())?;

    if let Command::Serve { addr } = cli.command {
        rankshift_server::serve(addr).await?;
        return Ok(0);
    }

    let client = connect(cli.server.clone(), &file).await?;

    match cli.command {
        Command::Serve { .. } => unreachable!("handled above"),

        Command::Tokenize { input, out, tokenizer } => {
            let text = read_text(&input, tokenizer.strip)?;
            let options = tokenizer_options(&tokenizer, &file)?;
            let resp = client
                .tokenize(&api::TokenizeRequest { text, options })
                .await?;
            write_output(out.as_deref(), &tokens_csv(&resp.tokens)?)?;
            eprintln!("{} tokens", resp.count);
            Ok(0)
        }

        Command::Rankfreq { input, out_dir, tokenizer } => {
            let out_dir = out_dir_or(&file, out_dir, "rankfreq")?;
            let text = read_text(&input, tokenizer.strip)?;
            let options = tokenizer_options(&tokenizer, &file)?;
            let resp = client
                .rankfreq(&api::RankFreqRequest { text, options })
                .await?;
            std::fs::create_dir_all(&out_dir)?;

            let mut buf = Vec::new();
            rankshift_core::rankfreq::write_dist_csv(&resp.integrated, &mut buf)?;
            write_output(Some(&out_dir.join("integrated.csv")), &buf)?;

            if let (Some(word_only), Some(map)) = (&resp.word_only, &resp.rank_map) {
                buf.clear();
                rankshift_core::rankfreq::write_dist_csv(word_only, &mut buf)?;
                write_output(Some(&out_dir.join("word_only.csv")), &buf)?;
                buf.clear();
                rankshift_core::rankfreq::write_rank_map_csv(map, word_only, &mut buf)?;
                write_output(Some(&out_dir.join("rank_map.csv")), &buf)?;
                eprintln!(
                    "N = {}, R = {}, n1 = {}",
                    resp.integrated.len(),
                    word_only.len(),
                    resp.n1.unwrap_or(0)
                );
            } else {
                eprintln!("no word tokens: wrote integrated.csv only");
            }
            Ok(0)
        }

        Command::Fit { input, dist, mode, rcut, cutoffs, out, tokenizer } => {
            let request = if dist {
                api::FitRequest {
                    text: None,
                    freqs: Some(dist_csv_freqs(&input)?),
                    mode,
                    r_cut: rcut,
                    cutoffs,
                    options: Default::default(),
                }
            } else {
                api::FitRequest {
                    text: Some(read_text(&input, tokenizer.strip)?),
                    freqs: None,
                    mode,
                    r_cut: rcut,
                    cutoffs,
                    options: tokenizer_options(&tokenizer, &file)?,
                }
            };
            let resp = client.fit(&request).await?;
            let bytes = if resp.fits.len() == 1 {
                match (&resp.fits[0].fit, &resp.fits[0].error) {
                    (Some(fit), _) => pretty_json(fit),
                    (None, Some(error)) => bail!("fit failed: {error}"),
                    (None, None) => unreachable!("entry carries a fit or an error"),
                }
            } else {
                pretty_json(&resp)
            };
            write_output(out.as_deref(), &bytes)?;
            Ok(0)
        }

        Command::Simon { alpha, steps, seed, compare, out_dir } => {
            let out_dir = out_dir_or(&file, out_dir, "simon")?;
            let resp = client
                .simon(&api::SimonRequest {
                    alpha,
                    steps,
                    seed,
                    compare,
                    include_series: true,
                })
                .await?;
            std::fs::create_dir_all(&out_dir)?;
            let run = rankshift_core::simon::SimonRun {
                alpha: resp.alpha,
                steps: resp.steps,
                seed: resp.seed,
                rng: resp.rng.clone(),
                freqs: resp.freqs.clone().unwrap_or_default(),
                innovation_steps: resp.innovation_steps.clone().unwrap_or_default(),
            };
            let mut buf = Vec::new();
            rankshift_core::simon::write_run_csv(&run, &mut buf)?;
            write_output(Some(&out_dir.join("simon_run.csv")), &buf)?;
            if let Some(report) = &resp.report {
                write_output(Some(&out_dir.join("simon_report.json")), &pretty_json(report))?;
                if let (Some(measured), Some(predicted)) =
                    (report.first_mover_measured, report.first_mover_predicted)
                {
                    eprintln!(
                        "N = {}, first mover measured {measured:.3} vs predicted {predicted:.3}",
                        resp.n
                    );
                }
            } else {
                eprintln!("N = {} distinct words over {} steps [rng {}]", resp.n, steps, resp.rng);
            }
            Ok(0)
        }

        Command::Corpus {
            manifest,
            out,
            cutoff_min,
            cutoff_max,
            cutoff_count,
            cutoffs,
            workers,
            no_resume,
            tokenizer,
        } => {
            let out = out_dir_or(&file, out, "corpus")?;
            let options = tokenizer_options(&tokenizer, &file)?;
            let spec = api::CutoffSpec {
                min: cutoff_min.or(file.cutoff_min),
                max: cutoff_max.or(file.cutoff_max),
                count: cutoff_count.or(file.cutoff_count),
                list: cutoffs,
            };
            let accepted = client
                .corpus_run_start(&api::CorpusRunRequest {
                    manifest: absolute(&manifest)?,
                    out_dir: absolute_lenient(&out),
                    cutoffs: Some(spec),
                    workers: workers.or(file.workers),
                    resume: Some(!no_resume),
                    options,
                })
                .await?;

            let status = loop {
                let status = client.corpus_run_status(&accepted.run_id).await?;
                eprint!(
                    "\r{} / {} analyzed ({} failed, {} resumed)   ",
                    status.progress.completed,
                    status.progress.total,
                    status.progress.failed,
                    status.progress.resumed
                );
                match status.state {
                    api::RunState::Running => tokio::time::sleep(Duration::from_millis(250)).await,
                    _ => break status,
                }
            };
            eprintln!();

            match status.state {
                api::RunState::Failed => {
                    bail!("corpus run failed: {}", status.error.unwrap_or_default())
                }
                api::RunState::Done => {
                    let outcome = status.outcome.expect("done run has an outcome");
                    for f in &outcome.failed {
                        eprintln!("skipped {}: {}", f.text_id, f.reason);
                    }
                    match (&outcome.scan, &outcome.scan_error) {
                        (Some(scan), _) => {
                            if let (Some(rho), Some(star)) = (scan.rho_max, scan.r_cut_star) {
                                let at_star = scan.stats_at(star);
                                eprintln!(
                                    "rho_max = {rho:.4} at r_cut = {star} (p = {:.3e}); median k_s there = {}",
                                    at_star.map(|s| s.p_value).unwrap_or(f64::NAN),
                                    at_star
                                        .and_then(|s| s.ks_median)
                                        .map(|v| format!("{v:.4}"))
                                        .unwrap_or_else(|| "n/a".into()),
                                );
                            }
                        }
                        (None, Some(reason)) => eprintln!("scan skipped: {reason}"),
                        (None, None) => {}
                    }
                    eprintln!(
                        "records: {} | corpus table: {}",
                        outcome.records_dir.display(),
                        outcome.corpus_csv.display()
                    );
                    Ok(outcome.exit_status())
                }
                api::RunState::Running => unreachable!("loop exits on terminal states"),
            }
        }

        Command::Scan { records_dir, out_dir, cutoffs } => {
            let out_dir = out_dir_or(&file, out_dir, "scan")?;
            let resp = client
                .scan(&api::ScanRequest {
                    records_dir: absolute(&records_dir)?,
                    cutoffs,
                })
                .await?;
            std::fs::create_dir_all(&out_dir)?;
            write_output(Some(&out_dir.join("scan.json")), &pretty_json(&resp.scan))?;
            let mut buf = Vec::new();
            rankshift_core::report::write_scan_csv(&resp.scan, &mut buf)?;
            write_output(Some(&out_dir.join("scan.csv")), &buf)?;
            if let (Some(rho), Some(star)) = (resp.scan.rho_max, resp.scan.r_cut_star) {
                eprintln!("{} records; rho_max = {rho:.4} at r_cut = {star}", resp.n_records);
            } else {
                eprintln!(
                    "{} records; no cutoff produced a valid correlation ({} excluded)",
                    resp.n_records,
                    resp.scan.excluded.len()
                );
            }
            Ok(0)
        }

        Command::Report { records_dir, out, rcut, bins, fig1_text } => {
            let out = out_dir_or(&file, out, "report")?;
            let resp = client
                .report(&api::ReportRequest {
                    records_dir: absolute(&records_dir)?,
                    out_dir: absolute_lenient(&out),
                    cutoffs: None,
                    r_cut: rcut,
                    bins: bins.or(file.bins),
                    fig1_text: fig1_text.map(|p| absolute(&p)).transpose()?,
                    options: Default::default(),
                })
                .await?;
            for f in &resp.files {
                eprintln!("wrote {f}");
            }
            Ok(0)
        }

        Command::Gen(GenCommand::Corpus { out, texts, seed }) => {
            let out = out_dir_or(&file, out, "gen corpus")?;
            let resp = client
                .gen_corpus(&api::GenCorpusRequest {
                    out_dir: absolute_lenient(&out),
                    texts,
                    seed,
                })
                .await?;
            eprintln!("wrote {} texts; manifest: {}", resp.texts, resp.manifest);
            Ok(0)
        }

        Command::Gen(GenCommand::Text { out, reference, seed, words }) => {
            let resp = client
                .gen_text(&api::GenTextRequest {
                    out_path: absolute_lenient(&out),
                    reference,
                    seed: Some(seed),
                    words: Some(words),
                })
                .await?;
            eprintln!("wrote {} ({} bytes)", resp.path, resp.bytes);
            Ok(0)
        }
    }
}

/// Paths travel to the server as strings, so relative paths must be
/// anchored to this process's working directory first.
fn absolute(path: &Path) -> anyhow::Result<String> {
    let abs = std::fs::canonicalize(path)
        .with_context(|| format!("path not found: {}", path.display()))?;
    Ok(abs.display().to_string())
}

/// Like [`absolute`] for paths that may not exist yet.
fn absolute_lenient(path: &Path) -> String {
    if path.is_absolute() {
        path.display().to_string()
    } else {
        std::env::current_dir()
            .map(|cwd| cwd.join(path))
            .unwrap_or_else(|_| path.to_path_buf())
            .display()
            .to_string()
    }
}

#[tokio::main]
async fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).await {
        Ok(code) => ExitCode::from(code.clamp(0, u8::MAX as i32) as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
