//! Report emission: the analysis JSON, per-section CSV exports, SVG
//! histograms and the run manifest.
//!
//! Every writer is deterministic — fixed field order, fixed float
//! formatting, no timestamps — so identical inputs produce byte-identical
//! bundles.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::personality::TraitId;
use crate::stats::{CorrMatrix, PmFrequency, TestMethod, TestResult};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot render a histogram of zero values")]
    EmptyHistogram,
}

fn io_error(path: &Path) -> impl Fn(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// A value for each of the two chambers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChamberPair<T> {
    pub science: T,
    pub conspiracy: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraitDescriptive {
    pub trait_id: char,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraitTestRow {
    pub trait_id: char,
    #[serde(flatten)]
    pub result: TestResult,
}

/// Mantel section: either a result or an explanation of why it was not
/// applicable (e.g. a constant trait made a matrix incomplete).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MantelSection {
    Result(TestResult),
    NotApplicable { not_applicable: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmRow {
    pub rank: usize,
    pub pm: String,
    pub count: u64,
    pub percent: f64,
}

impl PmRow {
    pub fn from_frequencies(rows: &[PmFrequency]) -> Vec<PmRow> {
        rows.iter()
            .enumerate()
            .map(|(i, r)| PmRow {
                rank: i + 1,
                pm: r.model.to_string(),
                count: r.count,
                percent: r.percent,
            })
            .collect()
    }
}

/// Correlation matrix as an ordered map for stable JSON output; `null`
/// marks not-applicable entries.
pub fn corr_matrix_rows(matrix: &CorrMatrix) -> Vec<BTreeMap<String, serde_json::Value>> {
    let mut rows = Vec::new();
    for (i, ti) in TraitId::ALL.into_iter().enumerate() {
        let mut row = BTreeMap::new();
        row.insert(
            "trait".to_string(),
            serde_json::Value::String(ti.letter().to_string()),
        );
        for (j, tj) in TraitId::ALL.into_iter().enumerate() {
            let value = match matrix.get(i, j) {
                Some(v) => serde_json::json!(v),
                None => serde_json::Value::Null,
            };
            row.insert(tj.letter().to_string(), value);
        }
        rows.push(row);
    }
    rows
}

/// The full analysis report serialized to `analysis.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub descriptives: ChamberPair<Vec<TraitDescriptive>>,
    pub mann_whitney: Vec<TraitTestRow>,
    pub corr_matrices: ChamberPair<Vec<BTreeMap<String, serde_json::Value>>>,
    pub mantel: MantelSection,
    pub pm_ranking: ChamberPair<Vec<PmRow>>,
    pub activity_corr: ChamberPair<Vec<ActivityCorrRow>>,
    pub histograms: ChamberPair<Vec<Histogram>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityCorrRow {
    pub trait_id: char,
    pub r: Option<f64>,
}

/// Integer-binned histogram of one trait's scores in one chamber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub trait_id: char,
    pub bins: Vec<HistogramBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub count: u64,
}

impl Histogram {
    /// One bin per integer value present in [min, max].
    pub fn of_scores(trait_id: TraitId, values: &[i32]) -> Result<Histogram, ReportError> {
        if values.is_empty() {
            return Err(ReportError::EmptyHistogram);
        }
        let min = *values.iter().min().expect("non-empty");
        let max = *values.iter().max().expect("non-empty");
        let mut counts = vec![0u64; (max - min + 1) as usize];
        for &v in values {
            counts[(v - min) as usize] += 1;
        }
        let bins = counts
            .into_iter()
            .enumerate()
            .map(|(i, count)| {
                let center = f64::from(min + i as i32);
                HistogramBin {
                    bin_left: center - 0.5,
                    bin_right: center + 0.5,
                    count,
                }
            })
            .collect();
        Ok(Histogram {
            trait_id: trait_id.letter(),
            bins,
        })
    }
}

/// Render an integer-score histogram to an SVG file: one bar per integer
/// value in [min, max], labeled axes.
pub fn render_histogram(
    values: &[i32],
    trait_id: TraitId,
    chamber: &str,
    out: &Path,
) -> Result<(), ReportError> {
    let histogram = Histogram::of_scores(trait_id, values)?;
    let svg = histogram_svg(&histogram, &format!("{} — {chamber}", trait_id.name()));
    std::fs::write(out, svg).map_err(io_error(out))
}

fn histogram_svg(histogram: &Histogram, title: &str) -> String {
    const WIDTH: f64 = 640.0;
    const HEIGHT: f64 = 400.0;
    const LEFT: f64 = 60.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 50.0;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let max_count = histogram
        .bins
        .iter()
        .map(|b| b.count)
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let n_bins = histogram.bins.len() as f64;
    let bar_w = plot_w / n_bins;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"16\">{title}</text>\n",
        WIDTH / 2.0
    ));
    // Axes.
    svg.push_str(&format!(
        "  <line x1=\"{LEFT}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    ));
    svg.push_str(&format!(
        "  <line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        TOP + plot_h
    ));
    // Y axis labels: zero and max.
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" \
         font-size=\"11\">0</text>\n",
        LEFT - 6.0,
        TOP + plot_h + 4.0
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" \
         font-size=\"11\">{}</text>\n",
        LEFT - 6.0,
        TOP + 4.0,
        max_count as u64
    ));
    svg.push_str(&format!(
        "  <text x=\"14\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\" transform=\"rotate(-90 14 {:.1})\">frequency</text>\n",
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    ));

    let label_every = (histogram.bins.len() / 16).max(1);
    for (i, bin) in histogram.bins.iter().enumerate() {
        let x = LEFT + i as f64 * bar_w;
        let h = bin.count as f64 / max_count * plot_h;
        let y = TOP + plot_h - h;
        svg.push_str(&format!(
            "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
             fill=\"#4878a8\" stroke=\"white\" stroke-width=\"0.5\"/>\n",
            x,
            y,
            bar_w,
            h
        ));
        if i % label_every == 0 {
            let center = (bin.bin_left + bin.bin_right) / 2.0;
            svg.push_str(&format!(
                "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" \
                 font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                x + bar_w / 2.0,
                TOP + plot_h + 16.0,
                center.round() as i64
            ));
        }
    }
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\">score</text>\n",
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str("</svg>\n");
    svg
}

/// Pretty-printed JSON plus trailing newline.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), ReportError> {
    let mut out = BufWriter::new(File::create(path).map_err(io_error(path))?);
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| ReportError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e),
    })?;
    out.write_all(b"\n").map_err(io_error(path))?;
    out.flush().map_err(io_error(path))
}

pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<(), ReportError> {
    let mut out = BufWriter::new(File::create(path).map_err(io_error(path))?);
    writeln!(out, "{header}").map_err(io_error(path))?;
    for row in rows {
        writeln!(out, "{row}").map_err(io_error(path))?;
    }
    out.flush().map_err(io_error(path))
}

/// Write every per-section CSV and SVG of an analysis report into `dir`.
pub fn write_section_files(report: &AnalysisReport, dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    let mut written = Vec::new();
    let emit_csv = |name: &str, header: &str, rows: Vec<String>| -> Result<PathBuf, ReportError> {
        let path = dir.join(name);
        write_csv(&path, header, &rows)?;
        Ok(path)
    };

    let mut rows = Vec::new();
    for (chamber, list) in [
        ("science", &report.descriptives.science),
        ("conspiracy", &report.descriptives.conspiracy),
    ] {
        for d in list {
            rows.push(format!("{chamber},{},{},{}", d.trait_id, fmt(d.mean), fmt(d.sd)));
        }
    }
    written.push(emit_csv("descriptives.csv", "chamber,trait,mean,sd", rows)?);

    let rows = report
        .mann_whitney
        .iter()
        .map(|t| {
            format!(
                "{},{},{},{}",
                t.trait_id,
                fmt(t.result.statistic),
                fmt(t.result.p_value),
                method_tag(&t.result.method)
            )
        })
        .collect();
    written.push(emit_csv("mann_whitney.csv", "trait,u,p_value,method", rows)?);

    for (chamber, matrix_rows) in [
        ("science", &report.corr_matrices.science),
        ("conspiracy", &report.corr_matrices.conspiracy),
    ] {
        let rows = matrix_rows
            .iter()
            .map(|row| {
                let cells: Vec<String> = TraitId::ALL
                    .into_iter()
                    .map(|t| match &row[&t.letter().to_string()] {
                        serde_json::Value::Number(n) => fmt(n.as_f64().unwrap_or(f64::NAN)),
                        _ => "NA".to_string(),
                    })
                    .collect();
                format!(
                    "{},{}",
                    row["trait"].as_str().unwrap_or("?"),
                    cells.join(",")
                )
            })
            .collect();
        written.push(emit_csv(
            &format!("corr_matrix_{chamber}.csv"),
            "trait,E,S,A,C,O",
            rows,
        )?);
    }

    let mantel_rows = match &report.mantel {
        MantelSection::Result(r) => {
            let (replicates, seed) = match r.method {
                TestMethod::Permutation { replicates, seed } => {
                    (replicates.to_string(), seed.to_string())
                }
                _ => ("".to_string(), "".to_string()),
            };
            vec![format!(
                "{},{},{replicates},{seed}",
                fmt(r.statistic),
                fmt(r.p_value)
            )]
        }
        MantelSection::NotApplicable { not_applicable } => {
            vec![format!("NA,NA,,{}", not_applicable.replace(',', ";"))]
        }
    };
    written.push(emit_csv("mantel.csv", "r,p_value,replicates,seed", mantel_rows)?);

    for (chamber, list) in [
        ("science", &report.pm_ranking.science),
        ("conspiracy", &report.pm_ranking.conspiracy),
    ] {
        let rows = list
            .iter()
            .map(|r| format!("{},{},{},{:.2}", r.rank, r.pm, r.count, r.percent))
            .collect();
        written.push(emit_csv(
            &format!("pm_ranking_{chamber}.csv"),
            "rank,pm,count,percent",
            rows,
        )?);
    }

    let mut rows = Vec::new();
    for (chamber, list) in [
        ("science", &report.activity_corr.science),
        ("conspiracy", &report.activity_corr.conspiracy),
    ] {
        let cells: Vec<String> = list
            .iter()
            .map(|r| r.r.map_or("NA".to_string(), fmt))
            .collect();
        rows.push(format!("{chamber},{}", cells.join(",")));
    }
    written.push(emit_csv("activity_corr.csv", "chamber,E,S,A,C,O", rows)?);

    for (chamber, histograms) in [
        ("science", &report.histograms.science),
        ("conspiracy", &report.histograms.conspiracy),
    ] {
        for h in histograms {
            let rows = h
                .bins
                .iter()
                .map(|b| format!("{},{},{}", fmt(b.bin_left), fmt(b.bin_right), b.count))
                .collect();
            written.push(emit_csv(
                &format!("hist_{}_{chamber}.csv", h.trait_id),
                "bin_left,bin_right,count",
                rows,
            )?);
            let svg_path = dir.join(format!("hist_{}_{chamber}.svg", h.trait_id));
            let trait_id = TraitId::from_letter(h.trait_id).expect("valid trait letter");
            let title = format!("{} — {chamber}", trait_id.name());
            std::fs::write(&svg_path, histogram_svg(h, &title)).map_err(io_error(&svg_path))?;
            written.push(svg_path);
        }
    }

    Ok(written)
}

fn method_tag(method: &TestMethod) -> String {
    match method {
        TestMethod::Exact => "exact".to_string(),
        TestMethod::NormalApprox => "normal-approx".to_string(),
        TestMethod::Permutation { .. } => "permutation".to_string(),
    }
}

/// Shortest round-trip float formatting; keeps CSV output deterministic.
fn fmt(v: f64) -> String {
    if v.is_nan() {
        "NA".to_string()
    } else {
        format!("{v}")
    }
}

/// FNV-1a 64-bit content hash, hex encoded. Not cryptographic; it only
/// anchors the run manifest to its input bytes.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}
