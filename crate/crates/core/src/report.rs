//! Renders an evaluation output directory into `roc.svg` and
//! `top_features.txt`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// ROC points per classifier label, in file order.
pub type RocSeries = Vec<(String, Vec<(f64, f64)>)>;

pub fn read_roc_csv(path: &Path) -> Result<RocSeries> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut out: RocSeries = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::MalformedCsv(e.to_string()))?;
        if rec.len() != 4 {
            return Err(Error::MalformedCsv(format!(
                "{}: expected 4 columns",
                path.display()
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::MalformedCsv(format!("{}: bad number `{s}`", path.display())))
        };
        let point = (parse(&rec[2])?, parse(&rec[3])?);
        match out.last_mut() {
            Some((label, pts)) if label == &rec[0] => pts.push(point),
            _ => out.push((rec[0].to_string(), vec![point])),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedFeature {
    pub rank: usize,
    pub feature: String,
    pub score: f64,
}

pub fn read_importance_csv(path: &Path) -> Result<Vec<(String, Vec<RankedFeature>)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut out: Vec<(String, Vec<RankedFeature>)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::MalformedCsv(e.to_string()))?;
        if rec.len() != 4 {
            return Err(Error::MalformedCsv(
                "importance.csv: expected 4 columns".into(),
            ));
        }
        let bad = |s: &str| Error::MalformedCsv(format!("importance.csv: bad value `{s}`"));
        let f = RankedFeature {
            rank: rec[1].parse().map_err(|_| bad(&rec[1]))?,
            feature: rec[2].to_string(),
            score: rec[3].parse().map_err(|_| bad(&rec[3]))?,
        };
        match out.last_mut() {
            Some((label, v)) if label == &rec[0] => v.push(f),
            _ => out.push((rec[0].to_string(), vec![f])),
        }
    }
    Ok(out)
}

#[derive(Deserialize)]
struct MetricsFile {
    classifiers: Vec<ClassifierAuc>,
}

#[derive(Deserialize)]
struct ClassifierAuc {
    label: String,
    mean_auc: f64,
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const SIZE: f64 = 480.0;
const MARGIN: f64 = 60.0;

fn path_data(points: &[(f64, f64)]) -> String {
    let mut d = String::new();
    for (i, (x, y)) in points.iter().enumerate() {
        let _ = write!(d, "{}{x},{y}", if i == 0 { "M" } else { " L" });
    }
    d
}

/// Self-contained SVG: faint per-fold curves, a solid pooled curve per
/// classifier, the chance diagonal, axes and a legend with mean AUC.
pub fn render_roc_svg(
    folds: &[RocSeries],
    pooled: &RocSeries,
    mean_auc: &BTreeMap<String, f64>,
) -> String {
    let width = SIZE + 2.0 * MARGIN + 200.0;
    let height = SIZE + 2.0 * MARGIN;
    let color_of = |label: &str| {
        let i = pooled.iter().position(|(l, _)| l == label).unwrap_or(0);
        COLORS[i % COLORS.len()]
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#
    );
    for t in 0..=5 {
        let v = t as f64 / 5.0;
        let x = MARGIN + v * SIZE;
        let y = MARGIN + SIZE - v * SIZE;
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" text-anchor="middle">{v:.1}</text><text x="{}" y="{}" text-anchor="end">{v:.1}</text>"#,
            MARGIN + SIZE + 16.0,
            MARGIN - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">False positive rate</text>"#,
        MARGIN + SIZE / 2.0,
        MARGIN + SIZE + 36.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate({},{}) rotate(-90)" text-anchor="middle">True positive rate</text>"#,
        MARGIN - 36.0,
        MARGIN + SIZE / 2.0
    );
    // plot group in unit coordinates, origin bottom-left
    let _ = writeln!(
        s,
        r#"<g transform="translate({MARGIN},{}) scale({SIZE},-{SIZE})" fill="none">"#,
        MARGIN + SIZE
    );
    let _ = writeln!(
        s,
        r#"<path class="chance" d="M0,0 L1,1" stroke="gray" stroke-dasharray="4 4" vector-effect="non-scaling-stroke"/>"#
    );
    for (k, fold) in folds.iter().enumerate() {
        for (label, pts) in fold {
            let _ = writeln!(
                s,
                r#"<path class="fold" data-fold="{}" d="{}" stroke="{}" stroke-opacity="0.3" vector-effect="non-scaling-stroke"/>"#,
                k + 1,
                path_data(pts),
                color_of(label)
            );
        }
    }
    for (label, pts) in pooled {
        let _ = writeln!(
            s,
            r#"<path class="pooled" d="{}" stroke="{}" stroke-width="2" vector-effect="non-scaling-stroke"/>"#,
            path_data(pts),
            color_of(label)
        );
    }
    let _ = writeln!(s, "</g>");
    for (i, (label, _)) in pooled.iter().enumerate() {
        let y = MARGIN + 16.0 + 20.0 * i as f64;
        let x = MARGIN + SIZE + 20.0;
        let auc = mean_auc
            .get(label)
            .map(|a| format!(" (AUC {a:.2})"))
            .unwrap_or_default();
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{}{auc}</text>"#,
            x + 20.0,
            color_of(label),
            x + 26.0,
            y + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn top_features_text(ranked: &[(String, Vec<RankedFeature>)], top_k: usize) -> String {
    let mut out = String::new();
    for (label, feats) in ranked {
        let shown: Vec<&RankedFeature> = feats.iter().take(top_k).collect();
        let _ = writeln!(
            out,
            "{label}: top {} features by mean importance across folds",
            shown.len()
        );
        let width = shown.iter().map(|f| f.feature.len()).max().unwrap_or(0);
        for f in shown {
            let _ = writeln!(out, "{:>3}. {:<width$}  {:.4}", f.rank, f.feature, f.score);
        }
        out.push('\n');
    }
    out
}

/// Reads an evaluation directory and writes `roc.svg` and `top_features.txt` into it.
pub fn write_report(dir: &Path, top_k: usize) -> Result<()> {
    let metrics_path = dir.join("metrics.json");
    let metrics_text =
        fs::read_to_string(&metrics_path).map_err(|e| Error::io(&metrics_path, e))?;
    let metrics: MetricsFile = serde_json::from_str(&metrics_text)?;
    let mean_auc = metrics
        .classifiers
        .into_iter()
        .map(|c| (c.label, c.mean_auc))
        .collect();

    let mut folds = Vec::new();
    for k in 1.. {
        let path = dir.join(format!("roc_fold{k}.csv"));
        if !path.exists() {
            break;
        }
        folds.push(read_roc_csv(&path)?);
    }
    let pooled = read_roc_csv(&dir.join("roc_pooled.csv"))?;
    let svg = render_roc_svg(&folds, &pooled, &mean_auc);
    let svg_path = dir.join("roc.svg");
    fs::write(&svg_path, svg).map_err(|e| Error::io(&svg_path, e))?;

    let ranked = read_importance_csv(&dir.join("importance.csv"))?;
    let txt_path = dir.join("top_features.txt");
    fs::write(&txt_path, top_features_text(&ranked, top_k)).map_err(|e| Error::io(&txt_path, e))
}
