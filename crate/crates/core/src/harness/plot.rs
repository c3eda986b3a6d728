//! Minimal self-contained SVG plots of harness CSV output.
//!
//! Three CSV layouts are recognized by their columns:
//! - summary or trial tables (`kind,size,variation,rho,...`): error against
//!   variation (one curve per size) and median iterations against ρ;
//! - PCA scores (`pc1,pc2[,label]`): scatter colored by label;
//! - recovered signals (`index,truth,recovered`): stem plot.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Scatter,
    Stem,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<Series>,
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn render(&self) -> String {
        let tx = |x: f64| if self.log_x { x.log10() } else { x };
        let all = || self.series.iter().flat_map(|s| s.points.iter()).filter(|(x, _)| !self.log_x || *x > 0.0);
        let (x0, x1) = range(all().map(|p| tx(p.0)));
        let (mut y0, mut y1) = range(all().map(|p| p.1));
        if self.series.iter().any(|s| s.style == Style::Stem) {
            y0 = y0.min(0.0);
            y1 = y1.max(0.0);
        }
        let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let px = |x: f64| MARGIN_LEFT + (tx(x) - x0) / (x1 - x0) * pw;
        let py = |y: f64| MARGIN_TOP + (y1 - y) / (y1 - y0) * ph;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            MARGIN_LEFT + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            svg,
            r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for i in 0..=4 {
            let f = f64::from(i) / 4.0;
            let xv = x0 + f * (x1 - x0);
            let yv = y0 + f * (y1 - y0);
            let gx = MARGIN_LEFT + f * pw;
            let gy = MARGIN_TOP + (1.0 - f) * ph;
            let xtext = if self.log_x { format!("{:.3}", 10f64.powf(xv)) } else { format!("{xv:.3}") };
            let _ = writeln!(
                svg,
                r#"<line x1="{gx}" y1="{}" x2="{gx}" y2="{}" stroke="black"/>"#,
                MARGIN_TOP + ph,
                MARGIN_TOP + ph + 5.0
            );
            let _ =
                writeln!(svg, r#"<text x="{gx}" y="{}" text-anchor="middle">{xtext}</text>"#, MARGIN_TOP + ph + 18.0);
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{gy}" x2="{MARGIN_LEFT}" y2="{gy}" stroke="black"/>"#,
                MARGIN_LEFT - 5.0
            );
            let _ =
                writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{yv:.3e}</text>"#, MARGIN_LEFT - 8.0, gy + 4.0);
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + pw / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
            MARGIN_TOP + ph / 2.0,
            escape(&self.y_label)
        );

        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<(f64, f64)> = s
                .points
                .iter()
                .copied()
                .filter(|(x, y)| x.is_finite() && y.is_finite() && (!self.log_x || *x > 0.0))
                .collect();
            match s.style {
                Style::Line => {
                    let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
                    let _ = writeln!(
                        svg,
                        r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                        path.join(" ")
                    );
                    for &(x, y) in &pts {
                        let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, px(x), py(y));
                    }
                }
                Style::Scatter => {
                    for &(x, y) in &pts {
                        let _ = writeln!(
                            svg,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}" fill-opacity="0.7"/>"#,
                            px(x),
                            py(y)
                        );
                    }
                }
                Style::Stem => {
                    for &(x, y) in &pts {
                        let _ = writeln!(
                            svg,
                            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="{color}"/>"#,
                            px(x),
                            py(0.0),
                            py(y)
                        );
                        let _ = writeln!(
                            svg,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="none" stroke="{color}"/>"#,
                            px(x),
                            py(y)
                        );
                    }
                }
            }
            let ly = MARGIN_TOP + 14.0 + 18.0 * i as f64;
            let lx = MARGIN_LEFT + pw + 12.0;
            let _ = writeln!(svg, r#"<rect x="{lx}" y="{}" width="12" height="12" fill="{color}"/>"#, ly - 10.0);
            let _ = writeln!(svg, r#"<text x="{}" y="{ly}">{}</text>"#, lx + 18.0, escape(&s.name));
        }
        svg.push_str("</svg>\n");
        svg
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

struct Table {
    headers: Vec<String>,
    rows: Vec<csv::StringRecord>,
}

impl Table {
    fn read(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).flexible(true).from_path(path)?;
        let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let rows = reader.records().collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self { headers, rows })
    }

    fn has(&self, name: &str) -> bool {
        self.headers.iter().any(|h| h == name)
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    fn number(record: &csv::StringRecord, i: usize) -> f64 {
        record.get(i).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN)
    }
}

/// Renders every plot derivable from `csv` into `out_dir` and returns the paths.
pub fn emit_plots(csv: impl AsRef<Path>, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let csv = csv.as_ref();
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir)?;
    let table = Table::read(csv)?;
    if table.headers.iter().all(|h| h.is_empty()) || table.rows.is_empty() {
        log::warn!("{} has no data rows; writing empty axes", csv.display());
        let path = out_dir.join("error_vs_variation.svg");
        Plot { title: "no data".into(), x_label: "variation".into(), y_label: "error".into(), ..Plot::default() }
            .write(&path)?;
        return Ok(vec![path]);
    }
    if table.has("pc1") || table.has("pc2") {
        return scatter_from(&table, out_dir).map(|p| vec![p]);
    }
    if table.has("index") {
        return stem_from(&table, out_dir).map(|p| vec![p]);
    }
    sweep_plots(&table, out_dir)
}

fn sweep_plots(table: &Table, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let [kind_i, size_i, var_i, rho_i, metric_i, value_i, iters_i] =
        ["kind", "size", "variation", "rho", "metric", "value", "iters"].map(|c| table.index(c));
    let (kind_i, size_i, var_i, rho_i, metric_i, value_i, iters_i) =
        (kind_i?, size_i?, var_i?, rho_i?, metric_i?, value_i?, iters_i?);
    let kind: crate::harness::Kind = table.rows[0].get(kind_i).unwrap_or("").parse()?;
    let metric = kind.primary_metric();
    let rows: Vec<&csv::StringRecord> = table.rows.iter().filter(|r| r.get(metric_i) == Some(metric)).collect();
    let has_best = rows.iter().any(|r| r.get(rho_i).is_some_and(|v| v.starts_with("best:")));
    let numeric_rho = |r: &csv::StringRecord| r.get(rho_i).and_then(|v| v.parse::<f64>().ok());

    let mut by_size: BTreeMap<usize, BTreeMap<u64, (f64, usize)>> = BTreeMap::new();
    for r in rows.iter().filter(|r| if has_best { r.get(rho_i).is_some_and(|v| v.starts_with("best:")) } else { true })
    {
        let size: usize = r.get(size_i).and_then(|v| v.parse().ok()).unwrap_or(0);
        let var = Table::number(r, var_i);
        let e = by_size.entry(size).or_default().entry(var.to_bits()).or_insert((0.0, 0));
        e.0 += Table::number(r, value_i);
        e.1 += 1;
    }
    let mut error_plot = Plot {
        title: format!("{kind}: {metric} vs hardware variation"),
        x_label: "variation ‖Σ‖F / ‖C‖F".into(),
        y_label: metric.into(),
        ..Plot::default()
    };
    for (size, cells) in &by_size {
        let points = cells.iter().map(|(v, (sum, n))| (f64::from_bits(*v), sum / *n as f64)).collect();
        error_plot.series.push(Series { name: format!("size {size}"), points, style: Style::Line });
    }
    let error_path = out_dir.join("error_vs_variation.svg");
    error_plot.write(&error_path)?;

    let max_var =
        rows.iter().map(|r| Table::number(r, var_i)).filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    let mut by_rho: BTreeMap<usize, BTreeMap<u64, (f64, usize)>> = BTreeMap::new();
    for r in rows.iter().filter(|r| Table::number(r, var_i) == max_var) {
        let Some(rho) = numeric_rho(r) else { continue };
        let size: usize = r.get(size_i).and_then(|v| v.parse().ok()).unwrap_or(0);
        let e = by_rho.entry(size).or_default().entry(rho.to_bits()).or_insert((0.0, 0));
        e.0 += Table::number(r, iters_i);
        e.1 += 1;
    }
    let mut iter_plot = Plot {
        title: format!("{kind}: iterations vs rho (variation {max_var})"),
        x_label: "rho".into(),
        y_label: "iterations".into(),
        log_x: true,
        ..Plot::default()
    };
    for (size, cells) in &by_rho {
        let mut points: Vec<(f64, f64)> =
            cells.iter().map(|(r, (sum, n))| (f64::from_bits(*r), sum / *n as f64)).collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        iter_plot.series.push(Series { name: format!("size {size}"), points, style: Style::Line });
    }
    let iter_path = out_dir.join("iterations_vs_rho.svg");
    iter_plot.write(&iter_path)?;
    Ok(vec![error_path, iter_path])
}

fn scatter_from(table: &Table, out_dir: &Path) -> Result<PathBuf> {
    let (x_i, y_i) = (table.index("pc1")?, table.index("pc2")?);
    let label_i = table.index("label").ok();
    let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in &table.rows {
        let label = label_i.and_then(|i| r.get(i)).unwrap_or("samples").to_string();
        groups.entry(label).or_default().push((Table::number(r, x_i), Table::number(r, y_i)));
    }
    let plot = Plot {
        title: "PCA scores".into(),
        x_label: "PC1".into(),
        y_label: "PC2".into(),
        log_x: false,
        series: groups.into_iter().map(|(name, points)| Series { name, points, style: Style::Scatter }).collect(),
    };
    let path = out_dir.join("pca_scatter.svg");
    plot.write(&path)?;
    Ok(path)
}

fn stem_from(table: &Table, out_dir: &Path) -> Result<PathBuf> {
    let (i_i, t_i, r_i) = (table.index("index")?, table.index("truth")?, table.index("recovered")?);
    let column = |c: usize| table.rows.iter().map(|r| (Table::number(r, i_i), Table::number(r, c))).collect::<Vec<_>>();
    let plot = Plot {
        title: "recovered sparse signal".into(),
        x_label: "index".into(),
        y_label: "value".into(),
        log_x: false,
        series: vec![
            Series { name: "true".into(), points: column(t_i), style: Style::Stem },
            Series { name: "recovered".into(), points: column(r_i), style: Style::Stem },
        ],
    };
    let path = out_dir.join("cs_stem.svg");
    plot.write(&path)?;
    Ok(path)
}

/// Writes `index,truth,recovered` rows for [`emit_plots`].
pub fn write_signal_csv(path: impl AsRef<Path>, truth: &[f64], recovered: &[f64]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "index,truth,recovered")?;
    for (i, (t, r)) in truth.iter().zip(recovered).enumerate() {
        writeln!(out, "{i},{t},{r}")?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_contains_series() {
        let plot = Plot {
            title: "t".into(),
            series: vec![Series { name: "a<b".into(), points: vec![(0.0, 1.0), (1.0, 2.0)], style: Style::Line }],
            ..Plot::default()
        };
        let svg = plot.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("polyline"));
        assert!(svg.contains("a&lt;b"));
    }

    #[test]
    fn empty_csv_gives_empty_axes() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("empty.csv");
        std::fs::write(&csv, "").unwrap();
        let out = emit_plots(&csv, dir.path()).unwrap();
        assert_eq!(out.len(), 1);
        assert!(std::fs::read_to_string(&out[0]).unwrap().contains("no data"));
    }

    #[test]
    fn missing_column_reported() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("bad.csv");
        std::fs::write(&csv, "kind,size,variation\nlp,5,0.1\n").unwrap();
        assert!(matches!(emit_plots(&csv, dir.path()), Err(Error::MissingColumn(c)) if c == "rho"));
    }

    #[test]
    fn stem_and_scatter() {
        let dir = tempfile::tempdir().unwrap();
        let sig = dir.path().join("signal.csv");
        write_signal_csv(&sig, &[0.0, 1.0], &[0.0, 0.9]).unwrap();
        assert!(emit_plots(&sig, dir.path()).unwrap()[0].ends_with("cs_stem.svg"));
        let scores = dir.path().join("scores.csv");
        std::fs::write(&scores, "pc1,pc2,label\n1,2,a\n2,1,b\n").unwrap();
        let svg = std::fs::read_to_string(&emit_plots(&scores, dir.path()).unwrap()[0]).unwrap();
        assert_eq!(svg.matches("<circle").count(), 2);
    }
}
