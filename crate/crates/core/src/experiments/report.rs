//! CSV, SVG and JSON artifacts for experiment batches and enumerations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::exact::to_f64;
use crate::experiments::enumerate::EnumerationReport;
use crate::experiments::generate::ExperimentRecord;
use crate::geometry::io::{write_atomic, write_polytope};
use crate::Result;

pub const CSV_HEADER: [&str; 7] = [
    "seed",
    "k",
    "iterations",
    "volume_exact",
    "volume_float",
    "vertex_count",
    "self_polar",
];

/// Histogram bin width in volume units.
pub const BIN_WIDTH: f64 = 0.05;

/// One row per run; failed runs keep their seed and `k` and read `failed` in the last column.
pub fn batch_csv(k: usize, records: &[(u64, Result<ExperimentRecord>)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for (seed, rec) in records {
        match rec {
            Ok(r) => w.write_record([
                r.seed.to_string(),
                r.k.to_string(),
                r.iterations.to_string(),
                r.volume.to_string(),
                format!("{}", to_f64(&r.volume)),
                r.vertex_count.to_string(),
                r.self_polar.to_string(),
            ])?,
            Err(_) => w.write_record([
                seed.to_string(),
                k.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                "failed".to_string(),
            ])?,
        }
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Bars of width `BIN_WIDTH` aligned to multiples of it. `None` for fewer than two samples.
pub fn volume_histogram_svg(volumes: &[f64], title: &str) -> Option<String> {
    if volumes.len() < 2 {
        return None;
    }
    let lo_bin = volumes.iter().map(|v| (v / BIN_WIDTH).floor() as i64).min()?;
    let hi_bin = volumes.iter().map(|v| (v / BIN_WIDTH).floor() as i64).max()?;
    let bins = (hi_bin - lo_bin + 1) as usize;
    let mut counts = vec![0usize; bins];
    for v in volumes {
        counts[((v / BIN_WIDTH).floor() as i64 - lo_bin) as usize] += 1;
    }
    let peak = *counts.iter().max()?;
    let (width, height, margin) = (640.0, 360.0, 40.0);
    let bar_w = (width - 2.0 * margin) / bins as f64;
    let scale = (height - 2.0 * margin) / peak as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        width / 2.0,
        escape(title)
    );
    let base = height - margin;
    for (i, &c) in counts.iter().enumerate() {
        let x = margin + i as f64 * bar_w;
        let h = c as f64 * scale;
        let _ = writeln!(
            svg,
            r##"<rect x="{x:.2}" y="{:.2}" width="{:.2}" height="{h:.2}" fill="#4878a8" stroke="#203040"><title>{:.2}-{:.2}: {c}</title></rect>"##,
            base - h,
            bar_w,
            (lo_bin + i as i64) as f64 * BIN_WIDTH,
            (lo_bin + i as i64 + 1) as f64 * BIN_WIDTH,
        );
    }
    let _ = writeln!(
        svg,
        r#"<line x1="{margin}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#,
        width - margin
    );
    let label_every = bins.div_ceil(10).max(1);
    for i in (0..=bins).step_by(label_every) {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="10">{:.2}</text>"#,
            margin + i as f64 * bar_w,
            base + 14.0,
            (lo_bin + i as i64) as f64 * BIN_WIDTH
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="12" y="{}" font-family="sans-serif" font-size="10">max {peak}</text>"#,
        margin
    );
    svg.push_str("</svg>\n");
    Some(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[derive(Serialize)]
struct ClassEntry {
    vertices: usize,
    volume: String,
    count: usize,
    representative_file: String,
}

/// Writes each class representative plus `classes.json` into `dir`; returns the report path.
pub fn write_clique_report(report: &EnumerationReport, dir: &Path) -> Result<PathBuf> {
    let mut entries = Vec::with_capacity(report.classes.len());
    for (i, class) in report.classes.iter().enumerate() {
        let file = dir.join(format!("class_{}_{i}.json", class.vertex_count));
        write_polytope(&file, &class.representative)?;
        entries.push(ClassEntry {
            vertices: class.vertex_count,
            volume: class.volume.to_string(),
            count: class.count,
            representative_file: file.display().to_string(),
        });
    }
    let path = dir.join("classes.json");
    write_atomic(&path, &serde_json::to_string_pretty(&entries)?)?;
    Ok(path)
}
