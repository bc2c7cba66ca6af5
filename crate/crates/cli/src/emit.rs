//! CSV and SVG output.
//!
//! Numbers are written with the shortest decimal that parses back to the
//! same `f64`, so a CSV re-read reproduces every value exactly.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use crate::report::{Cell, RunReport, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Svg,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    fn svg(self) -> bool {
        matches!(self, Format::Svg | Format::Both)
    }
}

pub fn format_number(x: f64) -> String {
    format!("{x:?}")
}

fn cell_text(cell: &Cell) -> String {
    match cell {
        Cell::Number(x) => format_number(*x),
        Cell::Text(s) => s.clone(),
    }
}

pub fn write_csv<W: io::Write>(table: &Table, out: W) -> csv::Result<()> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    writer.write_record(&table.columns)?;
    for row in &table.rows {
        writer.write_record(row.iter().map(cell_text))?;
    }
    writer.flush()?;
    Ok(())
}

/// Header and records of a CSV file.
pub fn read_csv(path: impl AsRef<Path>) -> csv::Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|record| record.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<csv::Result<_>>()?;
    Ok((header, rows))
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 450.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

fn series_of(table: &Table) -> Option<Vec<Series>> {
    let plot = table.plot.as_ref()?;
    let mut series: Vec<Series> = Vec::new();
    match plot.group {
        Some(group) => {
            let y = *plot.y.first()?;
            for row in &table.rows {
                let label = cell_text(&row[group]);
                let point = (row[plot.x].as_number()?, row[y].as_number()?);
                match series.iter_mut().find(|s| s.label == label) {
                    Some(s) => s.points.push(point),
                    None => series.push(Series {
                        label,
                        points: vec![point],
                    }),
                }
            }
        }
        None => {
            for &y in &plot.y {
                let points = table
                    .rows
                    .iter()
                    .map(|row| Some((row[plot.x].as_number()?, row[y].as_number()?)))
                    .collect::<Option<Vec<_>>>()?;
                series.push(Series {
                    label: table.columns[y].clone(),
                    points,
                });
            }
        }
    }
    Some(series)
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * lo.abs().max(1.0) {
        let pad = 0.05 * lo.abs().max(1.0);
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Static line plot of a table with a [`Plot`](crate::report::Plot), or
/// `None` when it has none.
pub fn render_svg(table: &Table) -> Option<String> {
    let plot = table.plot.as_ref()?;
    let series = series_of(table)?;
    let all = || series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = bounds(all().map(|p| p.0));
    let (y0, y1) = bounds(all().map(|p| p.1));
    let (w, h) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * w;
    let sy = |y: f64| TOP + h - (y - y0) / (y1 - y0) * h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + w / 2.0,
        escape(&plot.title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{w}" height="{h}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let (x, y) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let _ = writeln!(
            svg,
            r#"<line x1="{0:.2}" y1="{1}" x2="{0:.2}" y2="{2}" stroke="black"/><text x="{0:.2}" y="{3}" text-anchor="middle">{4:.4}</text>"#,
            sx(x),
            TOP + h,
            TOP + h + 5.0,
            TOP + h + 20.0,
            x
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{1:.2}" x2="{2}" y2="{1:.2}" stroke="black"/><text x="{3}" y="{4:.2}" text-anchor="end">{5:.4}</text>"#,
            LEFT - 5.0,
            sy(y),
            LEFT,
            LEFT - 8.0,
            sy(y) + 4.0,
            y
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + w / 2.0,
        HEIGHT - 15.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        TOP + h / 2.0,
        escape(&plot.y_label)
    );
    for (index, s) in series.iter().enumerate() {
        let colour = PALETTE[index % PALETTE.len()];
        let points: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 10.0 + 20.0 * index as f64;
        let lx = LEFT + w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 25.0,
            lx + 32.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Some(svg)
}

fn io_error(path: &Path, error: impl std::fmt::Display) -> io::Error {
    io::Error::other(format!("{}: {error}", path.display()))
}

/// Writes every table of `report` into `dir` in the requested format(s),
/// plus `report.txt` and, for a JSA dump, `jsa.txt`. Returns the paths
/// written.
pub fn emit(report: &RunReport, format: Format, dir: &Path) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mut written = Vec::new();
    for table in &report.tables {
        if format.csv() {
            let path = dir.join(format!("{}.csv", table.name));
            let file = std::fs::File::create(&path).map_err(|e| io_error(&path, e))?;
            write_csv(table, io::BufWriter::new(file)).map_err(|e| io_error(&path, e))?;
            written.push(path);
        }
        if format.svg() {
            if let Some(svg) = render_svg(table) {
                let path = dir.join(format!("{}.svg", table.name));
                std::fs::write(&path, svg).map_err(|e| io_error(&path, e))?;
                written.push(path);
            }
        }
    }
    if let Some(jsa) = &report.jsa {
        let path = dir.join("jsa.txt");
        jsa.save(&path).map_err(|e| io_error(&path, e))?;
        written.push(path);
    }
    let path = dir.join("report.txt");
    std::fs::write(&path, report.summary()).map_err(|e| io_error(&path, e))?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Plot;

    fn sample() -> Table {
        let mut table = Table::new("demo", &["x", "y", "label"]).with_plot(Plot {
            title: "demo".into(),
            x: 0,
            y: vec![1],
            group: Some(2),
            x_label: "x".into(),
            y_label: "y".into(),
        });
        for k in 0..5 {
            let x = k as f64 / 3.0;
            table.push(vec![x.into(), (x.sin() * 1e-7).into(), if k < 3 { "a" } else { "b, \"quoted\"" }.into()]);
        }
        table
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let table = sample();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("demo.csv");
        write_csv(&table, std::fs::File::create(&path).unwrap()).unwrap();
        let (header, rows) = read_csv(&path).unwrap();
        assert_eq!(header, table.columns);
        for (row, original) in rows.iter().zip(&table.rows) {
            for (text, cell) in row.iter().zip(original) {
                match cell {
                    Cell::Number(x) => assert_eq!(text.parse::<f64>().unwrap(), *x),
                    Cell::Text(s) => assert_eq!(text, s),
                }
            }
        }
    }

    #[test]
    fn svg_has_one_polyline_per_group() {
        let svg = render_svg(&sample()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("b, \"quoted\""));
        assert!(svg.starts_with("<svg"));
    }

    #[test]
    fn tables_without_plot_have_no_svg() {
        let mut table = sample();
        table.plot = None;
        assert!(render_svg(&table).is_none());
    }
}
