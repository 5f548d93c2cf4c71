//! End-to-end runs of the `rankshift` binary: each invocation starts its
//! own in-process service and goes through the HTTP surface.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rankshift(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankshift"))
        .args(args)
        .current_dir(dir)
        .env_remove("RANKSHIFT_OUT")
        .output()
        .expect("binary runs")
}

fn assert_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn tokenize_writes_token_csv() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in.txt"), "It's fine.").unwrap();
    let out = rankshift(&["tokenize", "in.txt", "-o", "tokens.csv"], dir.path());
    assert_code(&out, 0);
    let csv = fs::read_to_string(dir.path().join("tokens.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "index,surface,kind,start,end");
    assert_eq!(lines[1], "1,It,word,0,2");
    assert_eq!(lines[2], "2,'s,word,2,4");
    assert_eq!(lines[3], "3,\\s,nonword,4,5");
    assert_eq!(lines.len(), 6);
}

#[test]
fn rankfreq_writes_three_tables() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in.txt"), "a a b").unwrap();
    let out = rankshift(&["rankfreq", "in.txt", "--out-dir", "rf"], dir.path());
    assert_code(&out, 0);
    let integrated = fs::read_to_string(dir.path().join("rf/integrated.csv")).unwrap();
    assert_eq!(
        integrated,
        "rank,surface,kind,freq\n1,\\s,nonword,2\n2,a,word,2\n3,b,word,1\n"
    );
    let map = fs::read_to_string(dir.path().join("rf/rank_map.csv")).unwrap();
    assert_eq!(map, "r,n_r,surface,freq\n1,2,a,2\n2,3,b,1\n");
    assert!(dir.path().join("rf/word_only.csv").exists());
}

#[test]
fn fit_text_and_distribution_agree() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::new();
    for (word, n) in [("the", 40), ("of", 20), ("to", 10), ("and", 5)] {
        for _ in 0..n {
            text.push_str(word);
            text.push(' ');
        }
    }
    fs::write(dir.path().join("in.txt"), &text).unwrap();

    let out = rankshift(
        &["fit", "in.txt", "--mode", "word-only", "-o", "fit.json"],
        dir.path(),
    );
    assert_code(&out, 0);
    let from_text: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    assert_eq!(from_text["gamma"], 1.0);
    assert_eq!(from_text["r_cut"], 4);

    // same fit through the distribution CSV path
    let rf = rankshift(&["rankfreq", "in.txt", "--out-dir", "rf"], dir.path());
    assert_code(&rf, 0);
    let out = rankshift(
        &["fit", "rf/word_only.csv", "--dist", "-o", "fit2.json"],
        dir.path(),
    );
    assert_code(&out, 0);
    let from_dist: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fit2.json")).unwrap()).unwrap();
    assert_eq!(from_text["k_hat"], from_dist["k_hat"]);

    // out-of-range cutoff is a fatal error for a single fit
    let bad = rankshift(&["fit", "in.txt", "--rcut", "99"], dir.path());
    assert_code(&bad, 2);
}

#[test]
fn simon_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["a", "b"] {
        let out = rankshift(
            &[
                "simon", "--alpha", "0.2", "--steps", "20000", "--seed", "7", "--compare",
                "--out-dir", sub,
            ],
            dir.path(),
        );
        assert_code(&out, 0);
    }
    let a = fs::read(dir.path().join("a/simon_run.csv")).unwrap();
    let b = fs::read(dir.path().join("b/simon_run.csv")).unwrap();
    assert_eq!(a, b);
    let report: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("a/simon_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["rng"], "chacha8");
    assert_eq!(report["alpha"], 0.2);
}

#[test]
fn corpus_scan_report_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let gen = rankshift(
        &["gen", "corpus", "--out", "texts", "--texts", "6", "--seed", "5"],
        dir.path(),
    );
    assert_code(&gen, 0);
    assert!(dir.path().join("texts/manifest.csv").exists());

    let corpus = rankshift(
        &[
            "corpus", "texts/manifest.csv", "--out", "out",
            "--cutoff-min", "2", "--cutoff-max", "400", "--cutoff-count", "30",
        ],
        dir.path(),
    );
    assert_code(&corpus, 0);
    assert!(dir.path().join("out/records/synth-000.json").exists());
    assert!(dir.path().join("out/corpus.csv").exists());
    assert!(dir.path().join("out/scan.json").exists());

    let scan = rankshift(&["scan", "out/records", "--out-dir", "scan"], dir.path());
    assert_code(&scan, 0);
    assert!(dir.path().join("scan/scan.csv").exists());

    let report = rankshift(
        &[
            "report", "out/records", "--out", "figs",
            "--fig1-text", "texts/synth-000.txt",
        ],
        dir.path(),
    );
    assert_code(&report, 0);
    for f in [
        "scan.csv",
        "fig_correlation.csv",
        "fig_offsets.csv",
        "fig_scatter.csv",
        "fig_histogram.csv",
        "fig_rank_translation.csv",
    ] {
        assert!(dir.path().join("figs").join(f).exists(), "missing {f}");
    }
}

#[test]
fn corpus_partial_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("good.txt"), "the cat sat on the mat and the dog ran ").unwrap();
    fs::write(dir.path().join("alsogood.txt"), "a b c a b c a a ").unwrap();
    // only punctuation: fails the word-types precondition during analysis
    fs::write(dir.path().join("bad.txt"), ", . ; , .").unwrap();
    fs::write(
        dir.path().join("manifest.csv"),
        "g,good.txt\nh,alsogood.txt\nbad,bad.txt\n",
    )
    .unwrap();
    let out = rankshift(
        &["corpus", "manifest.csv", "--out", "out", "--cutoffs", "2,3"],
        dir.path(),
    );
    assert_code(&out, 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("skipped bad"), "stderr: {stderr}");

    // a manifest naming a missing file is fatal
    fs::write(dir.path().join("broken.csv"), "x,nope.txt\n").unwrap();
    let out = rankshift(&["corpus", "broken.csv", "--out", "out2"], dir.path());
    assert_code(&out, 2);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in.txt"), "x y x ").unwrap();
    fs::write(dir.path().join("rankshift.toml"), "out_dir = \"from_config\"\n").unwrap();

    let out = rankshift(
        &["--config", "rankshift.toml", "rankfreq", "in.txt"],
        dir.path(),
    );
    assert_code(&out, 0);
    assert!(dir.path().join("from_config/integrated.csv").exists());

    // the flag overrides the file value
    let out = rankshift(
        &[
            "--config", "rankshift.toml", "rankfreq", "in.txt", "--out-dir", "from_flag",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    assert!(dir.path().join("from_flag/integrated.csv").exists());
}

#[test]
fn env_var_supplies_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in.txt"), "x y x ").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rankshift"))
        .args(["rankfreq", "in.txt"])
        .current_dir(dir.path())
        .env("RANKSHIFT_OUT", "from_env")
        .output()
        .unwrap();
    assert_code(&out, 0);
    assert!(dir.path().join("from_env/integrated.csv").exists());
}

#[test]
fn custom_contraction_rules_apply() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in.txt"), "gonna").unwrap();
    fs::write(dir.path().join("rules.tsv"), "gonna\tgon|na\n").unwrap();
    let out = rankshift(
        &[
            "tokenize", "in.txt", "--contractions", "rules.tsv", "-o", "t.csv",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    let csv = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(csv.contains("1,gon,word"), "csv: {csv}");
    assert!(csv.contains("2,na,word"), "csv: {csv}");
}
