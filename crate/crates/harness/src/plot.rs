//! Minimal SVG rendering of curve and simulation CSVs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::curves::{run_curves, CURVE_COLUMNS, SCHEMA_LINE};
use crate::error::{runtime, Result};
use crate::simulate::SIMULATION_COLUMNS;
use crate::spec::parse_model_label;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Curves,
    Simulation,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// Header and rows of a CSV written by this tool, after checking the schema line.
fn read_table(path: &Path, expected: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let text = fs::read_to_string(path).map_err(|e| runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(SCHEMA_LINE) {
        return Err(runtime(format!("{}: missing `{SCHEMA_LINE}` line", path.display())));
    }
    let body: String = lines.filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != expected {
        return Err(runtime(format!(
            "{}: schema mismatch, expected columns {}",
            path.display(),
            expected.join(",")
        )));
    }
    let rows = reader.records().collect::<std::result::Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return Err(runtime(format!("{}: no data rows", path.display())));
    }
    Ok(rows)
}

fn num(rec: &csv::StringRecord, i: usize) -> Result<f64> {
    rec[i].parse().map_err(|_| runtime(format!("`{}` is not a number", &rec[i])))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Frame {
    x_max: f64,
    y_max: f64,
    svg: String,
}

impl Frame {
    fn new(x_max: f64, y_max: f64, y_label: &str) -> Self {
        let x_max = if x_max > 0.0 { x_max } else { 1.0 };
        let y_max = if y_max > 0.0 { y_max * 1.05 } else { 1.0 };
        let mut f = Frame {
            x_max,
            y_max,
            svg: String::new(),
        };
        let (x0, y0, x1, y1) = (LEFT, H - BOTTOM, W - RIGHT, TOP);
        let _ = write!(
            f.svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" \
             font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
             <path d=\"M{x0} {y1} L{x0} {y0} L{x1} {y0}\" stroke=\"black\" fill=\"none\"/>\n"
        );
        for i in 0..=5 {
            let t = i as f64 / 5.0;
            let (px, _) = f.map(t * x_max, 0.0);
            let (_, py) = f.map(0.0, t * y_max);
            let _ = writeln!(
                f.svg,
                "<text x=\"{px:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{:.2}</text>\
                 <text x=\"{:.1}\" y=\"{py:.1}\" text-anchor=\"end\" dy=\"4\">{:.3}</text>",
                y0 + 16.0,
                t * x_max,
                x0 - 6.0,
                t * y_max
            );
        }
        let _ = writeln!(
            f.svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">alpha</text>\
             <text x=\"14\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.1})\">{y_label}</text>",
            (x0 + x1) / 2.0,
            H - 12.0,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0
        );
        f
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = LEFT + x / self.x_max * (W - LEFT - RIGHT);
        let py = H - BOTTOM - y / self.y_max * (H - TOP - BOTTOM);
        (px, py)
    }

    fn path(&mut self, pts: &[(f64, f64)], color: &str, dashed: bool, label: &str) {
        let d: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(i, (x, y))| {
                let (px, py) = self.map(*x, *y);
                format!("{}{px:.2} {py:.2}", if i == 0 { "M" } else { "L" })
            })
            .collect();
        let dash = if dashed { " stroke-dasharray=\"6 4\"" } else { "" };
        let _ = writeln!(
            self.svg,
            "<path d=\"{}\" stroke=\"{color}\" stroke-width=\"1.5\" fill=\"none\"{dash}><title>{}</title></path>",
            d.join(" "),
            escape(label)
        );
    }

    fn markers(&mut self, pts: &[(f64, f64)], color: &str, label: &str) {
        let _ = writeln!(self.svg, "<g class=\"series\" fill=\"{color}\"><title>{}</title>", escape(label));
        for (x, y) in pts {
            let (px, py) = self.map(*x, *y);
            let _ = writeln!(self.svg, "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"3\"/>");
        }
        self.svg.push_str("</g>\n");
    }

    fn legend(&mut self, entries: &[(String, String, bool)]) {
        for (i, (label, color, dashed)) in entries.iter().enumerate() {
            let y = TOP + 10.0 + i as f64 * 16.0;
            let x = W - RIGHT + 12.0;
            let dash = if *dashed { " stroke-dasharray=\"6 4\"" } else { "" };
            let _ = writeln!(
                self.svg,
                "<line x1=\"{x}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"{color}\" stroke-width=\"2\"{dash}/>\
                 <text x=\"{}\" y=\"{}\">{}</text>",
                x + 20.0,
                x + 24.0,
                y + 4.0,
                escape(label)
            );
        }
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

fn curves_svg(path: &Path) -> Result<String> {
    let rows = read_table(path, &CURVE_COLUMNS)?;
    let mut mfnr = Vec::new();
    let mut fnr = Vec::new();
    for r in &rows {
        let a = num(r, 0)?;
        mfnr.push((a, num(r, 1)?));
        fnr.push((a, num(r, 2)?));
    }
    let x_max = mfnr.iter().map(|p| p.0).fold(0.0, f64::max);
    let y_max = mfnr.iter().chain(&fnr).map(|p| p.1).fold(0.0, f64::max);
    let mut f = Frame::new(x_max, y_max, "FNR");
    f.path(&mfnr, COLORS[1], false, "mFNR*");
    f.path(&fnr, COLORS[0], true, "FNR*");
    f.legend(&[
        ("mFNR*".into(), COLORS[1].into(), false),
        ("FNR*".into(), COLORS[0].into(), true),
    ]);
    Ok(f.finish())
}

fn simulation_svg(path: &Path) -> Result<String> {
    let rows = read_table(path, &SIMULATION_COLUMNS)?;
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for r in &rows {
        let (proc, a, fnr) = (r[2].to_string(), num(r, 1)?, num(r, 7)?);
        match series.iter_mut().find(|s| s.0 == proc) {
            Some(s) => s.1.push((a, fnr)),
            None => series.push((proc, vec![(a, fnr)])),
        }
    }
    let x_max = rows.iter().map(|r| num(r, 1)).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
    // theory overlay when the model label can be rebuilt
    let base = path.parent().unwrap_or(Path::new("."));
    let theory = parse_model_label(&rows[0][0], base).ok().and_then(|m| {
        let grid: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0 * x_max).collect();
        run_curves(&m, &grid).ok()
    });
    let mut y_max = series.iter().flat_map(|s| s.1.iter().map(|p| p.1)).fold(0.0, f64::max);
    if let Some(t) = &theory {
        y_max = t.iter().map(|r| r.mfnr_star).fold(y_max, f64::max);
    }
    let mut f = Frame::new(x_max, y_max, "FNR");
    let mut legend = Vec::new();
    if let Some(t) = &theory {
        let mfnr: Vec<(f64, f64)> = t.iter().map(|r| (r.alpha, r.mfnr_star)).collect();
        let fnr: Vec<(f64, f64)> = t.iter().map(|r| (r.alpha, r.fnr_star)).collect();
        f.path(&mfnr, "#555555", false, "mFNR*");
        f.path(&fnr, "#555555", true, "FNR*");
        legend.push(("mFNR*".to_string(), "#555555".to_string(), false));
        legend.push(("FNR*".to_string(), "#555555".to_string(), true));
    }
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        f.markers(pts, color, label);
        legend.push((label.clone(), color.to_string(), false));
    }
    f.legend(&legend);
    Ok(f.finish())
}

/// Renders `input` as SVG at `out`. Nothing is written on error.
pub fn emit_plot(input: &Path, kind: PlotKind, out: &Path) -> Result<()> {
    let svg = match kind {
        PlotKind::Curves => curves_svg(input)?,
        PlotKind::Simulation => simulation_svg(input)?,
    };
    fs::write(out, svg)?;
    Ok(())
}
