//! Edge-list ingestion and the file formats written by a run: surface CSVs,
//! the summary CSV and the PPM heatmap.

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, Link};
use crate::surface::{self, RobustnessSurface, SurfaceSummary};

/// Parses a whitespace-separated edge list, one `u v` pair per line. Blank
/// lines and lines starting with `#` are skipped. Node labels are numbered in
/// order of first appearance.
pub fn parse_edge_list<'a>(text: &'a str) -> Result<Graph> {
    let mut index: HashMap<&'a str, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut seen: HashMap<Link, usize> = HashMap::new();
    let mut links = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let [u, v] = tokens[..] else {
            return Err(Error::Parse {
                line,
                message: format!("expected two node labels, found {}", tokens.len()),
            });
        };
        if u == v {
            return Err(Error::Parse {
                line,
                message: format!("self-loop on node '{u}'"),
            });
        }
        let mut id = |label: &'a str| -> usize {
            let next = labels.len();
            *index.entry(label).or_insert_with(|| {
                labels.push(label.to_string());
                next
            })
        };
        let link = Link::new(id(u), id(v));
        if let Some(first) = seen.insert(link, line) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate link {u} {v} (first given on line {first})"),
            });
        }
        links.push(link);
    }

    let n = labels.len();
    Graph::from_links(n, links.into_iter().map(|l| l.endpoints()))?.with_labels(labels)
}

pub fn load_edge_list(path: &Path) -> Result<Graph> {
    parse_edge_list(&read_to_string(path)?)
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    let mut text = String::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| with_path(e, path))?;
    Ok(text)
}

pub(crate) fn with_path(e: std::io::Error, path: &Path) -> Error {
    Error::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}

/// 17 significant digits, enough to reproduce every f64 exactly.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes one row per percentage: `p, value_1, ..., value_m`, with a header
/// `p,1,...,m` naming the configuration ranks.
pub fn write_surface_csv<W: Write>(out: W, percentages: &[u32], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let m = rows.first().map_or(0, Vec::len);
    let mut header = vec!["p".to_string()];
    header.extend((1..=m).map(|j| j.to_string()));
    w.write_record(&header)?;
    for (p, row) in percentages.iter().zip(rows) {
        let mut record = vec![p.to_string()];
        record.extend(row.iter().map(|&x| format_real(x)));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_surface_csv`].
pub fn read_surface_csv<R: Read>(input: R) -> Result<(Vec<u32>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(input);
    let mut percentages = Vec::new();
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        // Header is line 1.
        let line = i + 2;
        let bad = |what: &str| Error::Parse {
            line,
            message: format!("invalid {what}"),
        };
        let mut fields = record.iter();
        let p = fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("percentage"))?;
        let row = fields
            .map(|s| s.parse::<f64>().map_err(|_| bad("value")))
            .collect::<Result<Vec<_>>>()?;
        percentages.push(p);
        rows.push(row);
    }
    Ok((percentages, rows))
}

/// `p, mean, variance, cumulative_area` per percentage.
pub fn write_summary_csv<W: Write>(
    out: W,
    percentages: &[u32],
    summary: &SurfaceSummary,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "mean", "variance", "cumulative_area"])?;
    let areas = surface::cumulative_area(percentages, &summary.mean_per_p);
    for i in 0..percentages.len() {
        w.write_record([
            percentages[i].to_string(),
            format_real(summary.mean_per_p[i]),
            format_real(summary.variance_per_p[i]),
            format_real(areas[i]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Color of value `v` on a surface whose largest value is `max`: a linear
/// ramp from blue (0) to red (`max`), clamped at both ends.
pub fn ramp_color(v: f64, max: f64) -> [u8; 3] {
    let t = if max > 0.0 && v.is_finite() {
        (v / max).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let r = (255.0 * t).round() as u8;
    [r, 0, 255 - r]
}

/// Binary PPM (P6) of the sorted surface: one pixel per cell, configuration
/// rank along x, the first percentage in the top row.
pub fn render_heatmap(surface: &RobustnessSurface) -> Result<Vec<u8>> {
    let h = surface.omega.len();
    let w = surface.config_count();
    if h == 0 || w == 0 {
        return Err(Error::Input("cannot render an empty surface".into()));
    }
    let max = surface.max_value();
    let mut bytes = format!("P6 {w} {h} 255\n").into_bytes();
    bytes.reserve(3 * w * h);
    for row in &surface.omega {
        for &v in row {
            bytes.extend_from_slice(&ramp_color(v, max));
        }
    }
    Ok(bytes)
}

pub fn write_heatmap(surface: &RobustnessSurface, path: &Path) -> Result<()> {
    let bytes = render_heatmap(surface)?;
    fs::write(path, bytes).map_err(|e| with_path(e, path))
}
