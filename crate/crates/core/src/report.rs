//! Plot-ready CSV emission for the scan figures and the rank-translation
//! figure. Rendering is out of scope; these tables are shaped so any
//! plotting tool can draw the panels directly.

use std::io;

use crate::experiment::{ScanResult, TextRecord};
use crate::rankfreq::{escape_surface, RankFreqDist, RankMap};
use crate::tokenizer::TokenKind;

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

/// Per-cutoff stats table (`scan` output): every summary the scan
/// computed, one row per included cutoff.
pub fn write_scan_csv<W: io::Write>(scan: &ScanResult, writer: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "r_cut",
        "n_texts",
        "rho",
        "p_value",
        "offset_median",
        "offset_p45",
        "offset_p55",
        "offset_mean",
        "ks_n_texts",
        "ks_median",
        "ks_q1",
        "ks_q3",
    ])?;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    for row in &scan.stats {
        w.write_record([
            row.r_cut.to_string(),
            row.n_texts.to_string(),
            num(row.rho),
            num(row.p_value),
            num(row.offset_median),
            num(row.offset_p45),
            num(row.offset_p55),
            num(row.offset_mean),
            row.ks_n_texts.to_string(),
            opt(row.ks_median),
            opt(row.ks_q1),
            opt(row.ks_q3),
        ])?;
    }
    w.flush()
}

/// Correlation panel: `(cutoff, rho, p)`.
pub fn write_fig_correlation_csv<W: io::Write>(scan: &ScanResult, writer: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["r_cut", "rho", "p_value"])?;
    for row in &scan.stats {
        w.write_record([row.r_cut.to_string(), num(row.rho), num(row.p_value)])?;
    }
    w.flush()
}

/// Scatter panel at one cutoff: `(k_zm, n1 - 1)` per text plus the count
/// of texts in the same 2-D bin, for density shading. `n1 - 1` is already
/// integer-valued; `k_zm` is binned into `k_bins` equal cells.
pub fn write_fig_scatter_csv<W: io::Write>(
    records: &[TextRecord],
    r_cut: usize,
    k_bins: usize,
    writer: W,
) -> io::Result<()> {
    let mut points: Vec<(f64, usize)> = Vec::new();
    for record in records {
        if let Some(k) = record.k_zm_at(r_cut) {
            points.push((k, record.n1 - 1));
        }
    }
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)));
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(k, _)| {
            (lo.min(k), hi.max(k))
        });
    let bins = k_bins.max(1);
    let width = ((hi - lo) / bins as f64).max(f64::MIN_POSITIVE);
    let bin_of = |k: f64| (((k - lo) / width) as usize).min(bins - 1);
    let mut counts = std::collections::BTreeMap::<(usize, usize), usize>::new();
    for &(k, n1m1) in &points {
        *counts.entry((bin_of(k), n1m1)).or_insert(0) += 1;
    }

    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["k_zm", "n1_minus_1", "density"])?;
    for &(k, n1m1) in &points {
        let density = counts[&(bin_of(k), n1m1)];
        w.write_record([num(k), n1m1.to_string(), density.to_string()])?;
    }
    w.flush()
}

/// Offset-vs-cutoff panel: offset median with its middle-decile envelope
/// next to the integrated-shift median with its interquartile range.
pub fn write_fig_offsets_csv<W: io::Write>(scan: &ScanResult, writer: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "r_cut",
        "offset_median",
        "offset_p45",
        "offset_p55",
        "ks_median",
        "ks_q1",
        "ks_q3",
    ])?;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    for row in &scan.stats {
        w.write_record([
            row.r_cut.to_string(),
            num(row.offset_median),
            num(row.offset_p45),
            num(row.offset_p55),
            opt(row.ks_median),
            opt(row.ks_q1),
            opt(row.ks_q3),
        ])?;
    }
    w.flush()
}

/// Histogram panel at one cutoff: shared equal-width bins over the
/// offsets `k_zm - n1 + 1` and the integrated shifts `k_s`, plus each
/// series' count per bin. Returns the mean offset (the red reference
/// line) alongside.
pub fn write_fig_hist_csv<W: io::Write>(
    records: &[TextRecord],
    r_cut: usize,
    bins: usize,
    writer: W,
) -> io::Result<Option<f64>> {
    let mut offsets = Vec::new();
    let mut shifts = Vec::new();
    for record in records {
        if let Some(k) = record.k_zm_at(r_cut) {
            offsets.push(k - (record.n1 as f64 - 1.0));
        }
        if let Some(k) = record.k_s_at(r_cut) {
            shifts.push(k);
        }
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["bin_low", "bin_high", "offset_count", "ks_count"])?;
    if offsets.is_empty() && shifts.is_empty() {
        w.flush()?;
        return Ok(None);
    }
    let all = offsets.iter().chain(&shifts);
    let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let bins = bins.max(1);
    let width = ((hi - lo) / bins as f64).max(f64::MIN_POSITIVE);
    let mut offset_counts = vec![0usize; bins];
    let mut ks_counts = vec![0usize; bins];
    let bin_of = |v: f64| (((v - lo) / width) as usize).min(bins - 1);
    for &v in &offsets {
        offset_counts[bin_of(v)] += 1;
    }
    for &v in &shifts {
        ks_counts[bin_of(v)] += 1;
    }
    for b in 0..bins {
        w.write_record([
            num(lo + b as f64 * width),
            num(lo + (b + 1) as f64 * width),
            offset_counts[b].to_string(),
            ks_counts[b].to_string(),
        ])?;
    }
    w.flush()?;
    let mean = if offsets.is_empty() {
        None
    } else {
        Some(offsets.iter().sum::<f64>() / offsets.len() as f64)
    };
    Ok(mean)
}

/// Rank-translation figure for one text: the integrated curve, the
/// word-only curve, and for each word both of its ranks, so the
/// translation segments can be drawn.
pub fn write_fig_rank_translation_csv<W: io::Write>(
    integrated: &RankFreqDist,
    word_only: &RankFreqDist,
    map: &RankMap,
    writer: W,
) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["series", "rank", "integrated_rank", "surface", "kind", "freq"])?;
    for (idx, e) in integrated.entries.iter().enumerate() {
        let kind = match e.kind {
            TokenKind::Word => "word",
            TokenKind::NonWord => "nonword",
        };
        w.write_record([
            "integrated".to_string(),
            (idx + 1).to_string(),
            (idx + 1).to_string(),
            escape_surface(&e.surface),
            kind.to_string(),
            e.freq.to_string(),
        ])?;
    }
    for (idx, e) in word_only.entries.iter().enumerate() {
        w.write_record([
            "word_only".to_string(),
            (idx + 1).to_string(),
            map.as_slice()[idx].to_string(),
            escape_surface(&e.surface),
            "word".to_string(),
            e.freq.to_string(),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::CutoffRecord;

    fn record(id: &str, n1: usize, k_zm: f64, k_s: f64) -> TextRecord {
        let cut = |k: f64| CutoffRecord {
            requested: 10,
            effective: 10,
            k_hat: Some(k),
            sse: Some(0.0),
            error: None,
        };
        TextRecord {
            text_id: id.to_string(),
            r_types: 100,
            n_types: 104,
            n1,
            total_tokens: 1_000,
            fits_zm: vec![cut(k_zm)],
            fits_s: vec![cut(k_s)],
            flags: vec![],
        }
    }

    #[test]
    fn scatter_density_counts_cell_mates() {
        let records = vec![
            record("a", 3, 2.0, -0.8),
            record("b", 3, 2.0, -0.8),
            record("c", 5, 4.0, -0.9),
        ];
        let mut buf = Vec::new();
        write_fig_scatter_csv(&records, 10, 4, &mut buf).unwrap();
        let out = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = out.lines().collect();
        assert_eq!(rows[0], "k_zm,n1_minus_1,density");
        assert_eq!(rows.len(), 4);
        assert!(rows[1].ends_with(",2,2"));
        assert!(rows[3].ends_with(",4,1"));
    }

    #[test]
    fn histogram_covers_both_series() {
        let records = vec![
            record("a", 3, 2.1, -0.8),
            record("b", 4, 3.4, -0.85),
            record("c", 2, 1.2, -0.86),
        ];
        let mut buf = Vec::new();
        let mean = write_fig_hist_csv(&records, 10, 8, &mut buf).unwrap();
        let out = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = out.lines().skip(1).collect();
        assert_eq!(rows.len(), 8);
        let total_offsets: usize = rows
            .iter()
            .map(|r| r.split(',').nth(2).unwrap().parse::<usize>().unwrap())
            .sum();
        let total_ks: usize = rows
            .iter()
            .map(|r| r.split(',').nth(3).unwrap().parse::<usize>().unwrap())
            .sum();
        assert_eq!(total_offsets, 3);
        assert_eq!(total_ks, 3);
        let expect_mean = ((2.1 - 2.0) + (3.4 - 3.0) + (1.2 - 1.0)) / 3.0;
        assert!((mean.unwrap() - expect_mean).abs() < 1e-12);
    }

    #[test]
    fn rank_translation_lists_both_curves() {
        use crate::rankfreq::{build_dist, rank_map, DistMode};
        use crate::tokenizer::{tokenize, TokenizerConfig};
        let tokens = tokenize("the cat, the hat ", &TokenizerConfig::default());
        let integrated = build_dist(&tokens, DistMode::Integrated).unwrap();
        let word_only = build_dist(&tokens, DistMode::WordOnly).unwrap();
        let map = rank_map(&integrated, &word_only).unwrap();
        let mut buf = Vec::new();
        write_fig_rank_translation_csv(&integrated, &word_only, &map, &mut buf).unwrap();
        let out = String::from_utf8(buf).unwrap();
        assert_eq!(
            out.lines().count(),
            1 + integrated.len() + word_only.len()
        );
        assert!(out.contains("integrated,1,1,\\s,nonword"));
    }
}
