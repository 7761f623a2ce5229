//! Report file emission: JSON, CSV, and self-contained SVG histograms.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use stopgame::monte_carlo::Histogram;

/// Output directory: `--out` flag, else `STOPGAME_OUT`, else the cwd.
pub fn out_dir(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os("STOPGAME_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value)?;
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn write_csv(dir: &Path, name: &str, header: &str, rows: &[String]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut text = String::with_capacity(rows.len() * 24 + header.len() + 2);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn histogram_rows(hist: &Histogram) -> Vec<String> {
    hist.bins
        .iter()
        .map(|b| format!("{},{}", b.k_over_n, b.count))
        .collect()
}

/// Single-series bar chart of sample counts against locations k/n.
/// No external assets; axes match the library's histogram reports.
pub fn render_svg(hist: &Histogram) -> String {
    let (w, h) = (800.0f64, 500.0f64);
    let (ml, mr, mt, mb) = (70.0, 20.0, 20.0, 60.0);
    let plot_w = w - ml - mr;
    let plot_h = h - mt - mb;
    let max_count = hist.bins.iter().map(|b| b.count).max().unwrap_or(1).max(1) as f64;
    let bar_w = (plot_w / 200.0).clamp(1.0, 8.0);

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"14\">\n"
    ));
    s.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    ));
    for b in &hist.bins {
        let x = ml + b.k_over_n.clamp(0.0, 1.0) * plot_w - bar_w / 2.0;
        let bh = (b.count as f64 / max_count) * plot_h;
        let y = mt + plot_h - bh;
        s.push_str(&format!(
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{bar_w:.2}\" height=\"{bh:.2}\" fill=\"#4878b0\"/>\n"
        ));
    }
    // axes
    s.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n",
        mt + plot_h,
        ml + plot_w
    ));
    s.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n",
        mt + plot_h
    ));
    for i in 0..=4 {
        let frac = i as f64 / 4.0;
        let x = ml + frac * plot_w;
        s.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{0}\" x2=\"{x:.1}\" y2=\"{1}\" stroke=\"black\"/>\n",
            mt + plot_h,
            mt + plot_h + 6.0
        ));
        s.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{}\" text-anchor=\"middle\">{frac}</text>\n",
            mt + plot_h + 24.0
        ));
        let y = mt + plot_h - frac * plot_h;
        let val = (frac * max_count).round();
        s.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{y:.1}\" x2=\"{ml}\" y2=\"{y:.1}\" stroke=\"black\"/>\n",
            ml - 6.0
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{val}</text>\n",
            ml - 10.0,
            y + 5.0
        ));
    }
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">Locations k/n</text>\n",
        ml + plot_w / 2.0,
        h - 14.0
    ));
    s.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">number of samples</text>\n",
        mt + plot_h / 2.0
    ));
    s.push_str("</svg>\n");
    s
}

pub fn write_svg(dir: &Path, name: &str, hist: &Histogram) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, render_svg(hist)).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
