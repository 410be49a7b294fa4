//! Deterministic report figures.
//!
//! Static SVG 1.1 on a fixed 800x600 canvas plus a CSV companion per figure,
//! named `<kind>.<svg|csv>` under a caller-chosen directory. Rendering is a
//! pure function of the spec: no clocks, no locale, fixed decimal coordinate
//! formatting, so repeated renders are byte-identical.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::eval::EvalReport;
use crate::importance::ImportanceReport;
use crate::scalar::Real;
use crate::textfmt::{fmt_coord, fmt_real, fmt_sig4};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 90.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;
const MARKER_COLOR: &str = "#4878a8";
const LINE_COLOR: &str = "#999999";
const TICKS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    ScatterPredActual,
    Residuals,
    ImportanceBars,
}

impl FigureKind {
    pub fn file_stem(&self) -> &'static str {
        match self {
            FigureKind::ScatterPredActual => "scatter_pred_actual",
            FigureKind::Residuals => "residuals",
            FigureKind::ImportanceBars => "importance_bars",
        }
    }
}

/// X axis of the residual plot: residual vs predicted by default; a sample
/// index variant is available behind the flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResidualAxis {
    #[default]
    Predicted,
    Index,
}

#[derive(Debug)]
pub enum FigureSource<'a, F> {
    Eval(&'a EvalReport<F>),
    Importance(&'a ImportanceReport<F>),
}

#[derive(Debug)]
pub struct FigureSpec<'a, F> {
    pub kind: FigureKind,
    pub title: String,
    pub source: FigureSource<'a, F>,
    pub out_dir: PathBuf,
    pub residual_axis: ResidualAxis,
}

impl<'a, F: Real> FigureSpec<'a, F> {
    fn eval(&self) -> Result<&'a EvalReport<F>> {
        match self.source {
            FigureSource::Eval(report) => {
                if report.pairs.is_empty() {
                    return Err(Error::Figure { msg: "evaluation report has no pairs".into() });
                }
                Ok(report)
            }
            FigureSource::Importance(_) => Err(Error::Figure {
                msg: format!("{} needs an evaluation report", self.kind.file_stem()),
            }),
        }
    }

    fn importance(&self) -> Result<&'a ImportanceReport<F>> {
        match self.source {
            FigureSource::Importance(report) => {
                if report.scores.is_empty() {
                    return Err(Error::Figure { msg: "importance report has no scores".into() });
                }
                Ok(report)
            }
            FigureSource::Eval(_) => Err(Error::Figure {
                msg: format!("{} needs an importance report", self.kind.file_stem()),
            }),
        }
    }
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Data range padded so a degenerate span still renders.
fn span(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

struct Axes {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Axes {
    fn x(&self, v: f64) -> f64 {
        MARGIN_LEFT + (v - self.x_lo) / (self.x_hi - self.x_lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT
            - MARGIN_BOTTOM
            - (v - self.y_lo) / (self.y_hi - self.y_lo) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn svg_header(title: &str) -> String {
    let mut out = String::new();
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n",
    );
    out.push_str("<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n");
    let _ = writeln!(
        out,
        "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"16\">{}</text>",
        xml_escape(title)
    );
    out
}

fn draw_axes(out: &mut String, axes: &Axes, x_label: &str, y_label: &str) {
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    let _ = writeln!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        fmt_coord(x0),
        fmt_coord(y0),
        fmt_coord(x1),
        fmt_coord(y0)
    );
    let _ = writeln!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        fmt_coord(x0),
        fmt_coord(y0),
        fmt_coord(x0),
        fmt_coord(y1)
    );
    for i in 0..TICKS {
        let t = i as f64 / (TICKS - 1) as f64;
        let xv = axes.x_lo + t * (axes.x_hi - axes.x_lo);
        let yv = axes.y_lo + t * (axes.y_hi - axes.y_lo);
        let xp = axes.x(xv);
        let yp = axes.y(yv);
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
            fmt_coord(xp),
            fmt_coord(y0),
            fmt_coord(xp),
            fmt_coord(y0 + 5.0)
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">{}</text>",
            fmt_coord(xp),
            fmt_coord(y0 + 18.0),
            fmt_sig4(xv)
        );
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
            fmt_coord(x0 - 5.0),
            fmt_coord(yp),
            fmt_coord(x0),
            fmt_coord(yp)
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">{}</text>",
            fmt_coord(x0 - 8.0),
            fmt_coord(yp + 4.0),
            fmt_sig4(yv)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">{}</text>",
        fmt_coord((x0 + x1) / 2.0),
        fmt_coord(HEIGHT - 18.0),
        xml_escape(x_label)
    );
    let _ = writeln!(
        out,
        "<text x=\"20\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\" transform=\"rotate(-90 20 {})\">{}</text>",
        fmt_coord((y0 + y1) / 2.0),
        fmt_coord((y0 + y1) / 2.0),
        xml_escape(y_label)
    );
}

fn render_scatter<F: Real>(spec: &FigureSpec<'_, F>) -> Result<String> {
    let report = spec.eval()?;
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for &(a, p) in &report.pairs {
        lo = lo.min(a.as_f64()).min(p.as_f64());
        hi = hi.max(a.as_f64()).max(p.as_f64());
    }
    let (lo, hi) = span(lo, hi);
    let axes = Axes { x_lo: lo, x_hi: hi, y_lo: lo, y_hi: hi };

    let mut out = svg_header(&spec.title);
    draw_axes(&mut out, &axes, "actual", "predicted");
    let _ = writeln!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-dasharray=\"4 3\"/>",
        fmt_coord(axes.x(lo)),
        fmt_coord(axes.y(lo)),
        fmt_coord(axes.x(hi)),
        fmt_coord(axes.y(hi)),
        LINE_COLOR
    );
    for &(a, p) in &report.pairs {
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\" fill-opacity=\"0.6\"/>",
            fmt_coord(axes.x(a.as_f64())),
            fmt_coord(axes.y(p.as_f64())),
            MARKER_COLOR
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn render_residuals<F: Real>(spec: &FigureSpec<'_, F>) -> Result<String> {
    let report = spec.eval()?;
    let xs: Vec<f64> = match spec.residual_axis {
        ResidualAxis::Predicted => report.pairs.iter().map(|&(_, p)| p.as_f64()).collect(),
        ResidualAxis::Index => (0..report.pairs.len()).map(|i| i as f64).collect(),
    };
    let x_label = match spec.residual_axis {
        ResidualAxis::Predicted => "predicted",
        ResidualAxis::Index => "sample index",
    };
    let (x_lo, x_hi) = span(
        xs.iter().cloned().fold(f64::MAX, f64::min),
        xs.iter().cloned().fold(f64::MIN, f64::max),
    );
    // Always include zero so the reference line is visible.
    let r_lo = report.residuals.iter().map(|r| r.as_f64()).fold(0.0f64, f64::min);
    let r_hi = report.residuals.iter().map(|r| r.as_f64()).fold(0.0f64, f64::max);
    let (y_lo, y_hi) = span(r_lo, r_hi);
    let axes = Axes { x_lo, x_hi, y_lo, y_hi };

    let mut out = svg_header(&spec.title);
    draw_axes(&mut out, &axes, x_label, "residual (predicted - actual)");
    let zero_y = axes.y(0.0);
    let _ = writeln!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-dasharray=\"4 3\"/>",
        fmt_coord(axes.x(x_lo)),
        fmt_coord(zero_y),
        fmt_coord(axes.x(x_hi)),
        fmt_coord(zero_y),
        LINE_COLOR
    );
    for (x, r) in xs.iter().zip(&report.residuals) {
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\" fill-opacity=\"0.6\"/>",
            fmt_coord(axes.x(*x)),
            fmt_coord(axes.y(r.as_f64())),
            MARKER_COLOR
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Scores sorted descending; ties keep canonical feature order.
fn sorted_scores<F: Real>(report: &ImportanceReport<F>) -> Vec<(String, f64)> {
    let mut scores: Vec<(String, f64)> =
        report.scores.iter().map(|(n, s)| (n.clone(), s.as_f64())).collect();
    scores.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    scores
}

fn render_importance<F: Real>(spec: &FigureSpec<'_, F>) -> Result<String> {
    let report = spec.importance()?;
    let scores = sorted_scores(report);
    let lo = scores.iter().map(|(_, s)| *s).fold(0.0f64, f64::min);
    let hi = scores.iter().map(|(_, s)| *s).fold(0.0f64, f64::max);
    let (x_lo, x_hi) = span(lo, hi);
    let axes = Axes { x_lo, x_hi, y_lo: 0.0, y_hi: 1.0 };

    let mut out = svg_header(&spec.title);
    let plot_top = MARGIN_TOP;
    let plot_bottom = HEIGHT - MARGIN_BOTTOM;
    let band = (plot_bottom - plot_top) / scores.len() as f64;
    let zero_x = axes.x(0.0);

    // x axis with ticks only (categories label themselves).
    let _ = writeln!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        fmt_coord(MARGIN_LEFT),
        fmt_coord(plot_bottom),
        fmt_coord(WIDTH - MARGIN_RIGHT),
        fmt_coord(plot_bottom)
    );
    for i in 0..TICKS {
        let t = i as f64 / (TICKS - 1) as f64;
        let xv = x_lo + t * (x_hi - x_lo);
        let xp = axes.x(xv);
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
            fmt_coord(xp),
            fmt_coord(plot_bottom),
            fmt_coord(xp),
            fmt_coord(plot_bottom + 5.0)
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">{}</text>",
            fmt_coord(xp),
            fmt_coord(plot_bottom + 18.0),
            fmt_sig4(xv)
        );
    }
    let _ = writeln!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\"/>",
        fmt_coord(zero_x),
        fmt_coord(plot_top),
        fmt_coord(zero_x),
        fmt_coord(plot_bottom),
        LINE_COLOR
    );
    for (i, (name, score)) in scores.iter().enumerate() {
        let y_top = plot_top + i as f64 * band + band * 0.15;
        let height = band * 0.7;
        let sx = axes.x(*score);
        let (bar_x, bar_w) = if *score >= 0.0 { (zero_x, sx - zero_x) } else { (sx, zero_x - sx) };
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
            fmt_coord(bar_x),
            fmt_coord(y_top),
            fmt_coord(bar_w),
            fmt_coord(height),
            MARKER_COLOR
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"12\">{}</text>",
            fmt_coord(MARGIN_LEFT - 8.0),
            fmt_coord(y_top + height / 2.0 + 4.0),
            xml_escape(name)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">importance ({})</text>",
        fmt_coord((MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0),
        fmt_coord(HEIGHT - 18.0),
        report.method.as_str()
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// Render the SVG for a spec, returning the file path written.
pub fn render_svg<F: Real>(spec: &FigureSpec<'_, F>) -> Result<PathBuf> {
    let svg = match spec.kind {
        FigureKind::ScatterPredActual => render_scatter(spec)?,
        FigureKind::Residuals => render_residuals(spec)?,
        FigureKind::ImportanceBars => render_importance(spec)?,
    };
    let path = spec.out_dir.join(format!("{}.svg", spec.kind.file_stem()));
    std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Write the CSV companion mirroring the figure's data series losslessly.
pub fn render_csv<F: Real>(spec: &FigureSpec<'_, F>) -> Result<PathBuf> {
    let mut out = String::new();
    match spec.kind {
        FigureKind::ScatterPredActual => {
            let report = spec.eval()?;
            out.push_str("actual,predicted\n");
            for &(a, p) in &report.pairs {
                let _ = writeln!(out, "{},{}", fmt_real(a), fmt_real(p));
            }
        }
        FigureKind::Residuals => {
            let report = spec.eval()?;
            out.push_str("index,predicted,residual\n");
            for (i, (&(_, p), r)) in report.pairs.iter().zip(&report.residuals).enumerate() {
                let _ = writeln!(out, "{},{},{}", i, fmt_real(p), fmt_real(*r));
            }
        }
        FigureKind::ImportanceBars => {
            let report = spec.importance()?;
            out.push_str("feature,score\n");
            for (name, score) in sorted_scores(report) {
                let _ = writeln!(out, "{},{}", name, crate::textfmt::fmt_f64(score));
            }
        }
    }
    let path = spec.out_dir.join(format!("{}.csv", spec.kind.file_stem()));
    std::fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
