//! Deterministic SVG output: lineup small multiples, the density-with-rug
//! view of an empirical distribution, and the bin-sweep tile plot.
//!
//! Coordinates are written with two decimals. Output depends only on the
//! inputs, so the same lineup always produces the same bytes.

use std::fmt::Write as _;

use crate::binsweep::SweepResult;
use crate::dataset::{Dataset, Lineup, PlotType};
use crate::error::{Error, Result};
use crate::inference::{EmpiricalDistribution, MeanDistances};
use crate::stats::{self, combined_range};

const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];
const POINT: &str = "#333333";
const HIGHLIGHT: &str = "#e6550d";
const TRUE_RUG: &str = "#ff7f00";
const NULL_RUG: &str = "#000000";

/// Grid of panels sharing one data→pixel transform.
#[derive(Clone, Debug, PartialEq)]
pub struct PanelLayout {
    pub rows: usize,
    pub cols: usize,
    pub panel_width: f64,
    pub panel_height: f64,
    pub gap: f64,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

impl PanelLayout {
    /// `cols = ceil(√m)`, `rows = ceil(m / cols)`; 4×5 for m = 20.
    pub fn grid_shape(m: usize) -> (usize, usize) {
        let cols = (m as f64).sqrt().ceil() as usize;
        let cols = cols.max(1);
        (m.div_ceil(cols), cols)
    }

    /// Default layout with axis ranges covering every panel (5% padding).
    pub fn for_lineup(lineup: &Lineup) -> Result<Self> {
        let (rows, cols) = Self::grid_shape(lineup.m());
        let roles = Roles::of(lineup.panels().first().expect("m >= 2"), lineup.plot_type())?;
        let x_range = pad(roles.x_range(lineup.panels()));
        let y_range = pad(roles.y_range(lineup.panels()));
        Ok(PanelLayout {
            rows,
            cols,
            panel_width: 160.0,
            panel_height: 160.0,
            gap: 8.0,
            x_range,
            y_range,
        })
    }

    fn validate(&self, lineup: &Lineup) -> Result<()> {
        if self.rows * self.cols < lineup.m() {
            return Err(Error::Precondition(format!(
                "{}x{} layout cannot hold {} panels",
                self.rows,
                self.cols,
                lineup.m()
            )));
        }
        if !(self.panel_width > 0.0 && self.panel_height > 0.0) {
            return Err(Error::Precondition("panel size must be positive".into()));
        }
        Ok(())
    }

    fn width(&self) -> f64 {
        self.cols as f64 * (self.panel_width + self.gap) + self.gap
    }

    fn height(&self) -> f64 {
        self.rows as f64 * (self.panel_height + self.gap) + self.gap
    }

    /// Top-left corner of 0-based panel `k`, row-major.
    fn origin(&self, k: usize) -> (f64, f64) {
        let (r, c) = (k / self.cols, k % self.cols);
        (
            self.gap + c as f64 * (self.panel_width + self.gap),
            self.gap + r as f64 * (self.panel_height + self.gap),
        )
    }

    fn sx(&self, x: f64) -> f64 {
        scale(x, self.x_range, INSET, self.panel_width - INSET)
    }

    fn sy(&self, y: f64) -> f64 {
        scale(y, self.y_range, self.panel_height - INSET, INSET + LABEL)
    }
}

const INSET: f64 = 6.0;
const LABEL: f64 = 14.0;

fn scale(v: f64, (lo, hi): (f64, f64), a: f64, b: f64) -> f64 {
    if hi == lo {
        return (a + b) / 2.0;
    }
    a + (v - lo) / (hi - lo) * (b - a)
}

fn pad((lo, hi): (f64, f64)) -> (f64, f64) {
    let w = hi - lo;
    if w == 0.0 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo - 0.05 * w, hi + 0.05 * w)
    }
}

/// Which columns a plot type draws.
struct Roles {
    plot: PlotType,
    x: usize,
    y: Option<usize>,
    group: Option<usize>,
    levels: usize,
}

impl Roles {
    fn of(d: &Dataset, plot: PlotType) -> Result<Self> {
        let cont = d.continuous_indices();
        let cat = d.categorical_indices();
        let levels = cat
            .first()
            .and_then(|&g| d.variables()[g].levels())
            .map_or(0, <[String]>::len);
        let unsupported = || {
            Error::Structure(format!(
                "plot type {plot:?} does not fit variables {:?}",
                d.variables().iter().map(|v| (v.name(), v.kind())).collect::<Vec<_>>()
            ))
        };
        let roles = match plot {
            PlotType::Scatter | PlotType::ScatterWithRegression => match cont[..] {
                [x, y, ..] => Roles { plot, x, y: Some(y), group: None, levels: 0 },
                _ => return Err(unsupported()),
            },
            PlotType::BoxplotPair => match (cat.first(), cont.first()) {
                (Some(&g), Some(&y)) if levels >= 1 => Roles { plot, x: g, y: Some(y), group: Some(g), levels },
                _ => return Err(unsupported()),
            },
            PlotType::Projection1d => match (cat.first(), cont.first()) {
                (Some(&g), Some(&x)) => Roles { plot, x, y: None, group: Some(g), levels },
                _ => return Err(unsupported()),
            },
            PlotType::Projection2d => match (cat.first(), &cont[..]) {
                (Some(&g), [x, y, ..]) => Roles { plot, x: *x, y: Some(*y), group: Some(g), levels },
                _ => return Err(unsupported()),
            },
        };
        Ok(roles)
    }

    fn column(d: &Dataset, i: usize) -> &[f64] {
        d.variables()[i].as_continuous().unwrap_or(&[])
    }

    fn x_range(&self, panels: &[Dataset]) -> (f64, f64) {
        match self.plot {
            PlotType::BoxplotPair => (0.0, self.levels as f64 + 1.0),
            _ => combined_range(panels.iter().map(|d| Self::column(d, self.x))),
        }
    }

    fn y_range(&self, panels: &[Dataset]) -> (f64, f64) {
        match (self.plot, self.y) {
            (PlotType::Projection1d, _) | (_, None) => (0.0, self.levels.max(1) as f64 + 1.0),
            (_, Some(y)) => combined_range(panels.iter().map(|d| Self::column(d, y))),
        }
    }
}

/// Tukey boxplot summary; quartiles come from [`stats::quartiles`].
#[derive(Clone, Debug, PartialEq)]
pub struct BoxStats {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub lower_whisker: f64,
    pub upper_whisker: f64,
    pub outliers: Vec<f64>,
}

pub fn box_stats(values: &[f64]) -> BoxStats {
    let [q1, median, q3] = stats::quartiles(values);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside = values.iter().copied().filter(|v| (lo_fence..=hi_fence).contains(v));
    let lower_whisker = inside.clone().fold(f64::INFINITY, f64::min);
    let upper_whisker = inside.fold(f64::NEG_INFINITY, f64::max);
    let mut outliers: Vec<f64> = values
        .iter()
        .copied()
        .filter(|v| !(lo_fence..=hi_fence).contains(v))
        .collect();
    outliers.sort_by(f64::total_cmp);
    BoxStats {
        q1,
        median,
        q3,
        lower_whisker,
        upper_whisker,
        outliers,
    }
}

fn f(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn svg_open(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = f(w),
        h = f(h)
    );
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##, f(w), f(h));
}

/// One SVG with the m panels numbered 1..m in row-major order. The true
/// panel is outlined only when `reveal` is set.
pub fn render_lineup(lineup: &Lineup, layout: &PanelLayout, reveal: bool) -> Result<String> {
    layout.validate(lineup)?;
    let roles = Roles::of(lineup.true_panel(), lineup.plot_type())?;
    let mut out = String::new();
    svg_open(&mut out, layout.width(), layout.height());
    let domain = format!(
        "{} {} {} {}",
        f(layout.x_range.0),
        f(layout.x_range.1),
        f(layout.y_range.0),
        f(layout.y_range.1)
    );
    for (k, panel) in lineup.panels().iter().enumerate() {
        let (x0, y0) = layout.origin(k);
        let is_true = reveal && k + 1 == lineup.true_position();
        let _ = writeln!(
            out,
            r#"<g class="panel" id="panel-{n}" data-panel="{n}" data-x="{x}" data-y="{y}" data-width="{w}" data-height="{h}" data-domain="{domain}" transform="translate({x},{y})"{t}>"#,
            n = k + 1,
            x = f(x0),
            y = f(y0),
            w = f(layout.panel_width),
            h = f(layout.panel_height),
            t = if is_true { r#" data-true="true""# } else { "" }
        );
        let stroke = if is_true {
            format!(r#" stroke="{HIGHLIGHT}" stroke-width="3""#)
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            r##"<rect class="panel-bg" x="0" y="0" width="{}" height="{}" fill="#ebebeb"{stroke}/>"##,
            f(layout.panel_width),
            f(layout.panel_height)
        );
        let _ = writeln!(
            out,
            r##"<text class="panel-label" x="{}" y="12" font-size="11" font-family="sans-serif" text-anchor="end" fill="#000000">{}</text>"##,
            f(layout.panel_width - 4.0),
            k + 1
        );
        draw_panel(&mut out, panel, &roles, layout);
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

fn draw_panel(out: &mut String, d: &Dataset, roles: &Roles, layout: &PanelLayout) {
    let vars = d.variables();
    let codes = roles.group.and_then(|g| vars[g].codes());
    match roles.plot {
        PlotType::Scatter | PlotType::ScatterWithRegression | PlotType::Projection2d => {
            let xs = Roles::column(d, roles.x);
            let ys = Roles::column(d, roles.y.expect("two axes"));
            for i in 0..d.n() {
                let color = codes.map_or(POINT, |c| PALETTE[c[i] as usize % PALETTE.len()]);
                let _ = writeln!(
                    out,
                    r#"<circle cx="{}" cy="{}" r="2" fill="{color}"/>"#,
                    f(layout.sx(xs[i])),
                    f(layout.sy(ys[i]))
                );
            }
            if roles.plot == PlotType::ScatterWithRegression {
                if let Ok(fit) = stats::ols(xs, ys) {
                    let (lo, hi) = combined_range([xs]);
                    let _ = writeln!(
                        out,
                        r##"<line class="fit" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#3366cc" stroke-width="1.5"/>"##,
                        f(layout.sx(lo)),
                        f(layout.sy(fit.intercept + fit.slope * lo)),
                        f(layout.sx(hi)),
                        f(layout.sy(fit.intercept + fit.slope * hi))
                    );
                }
            }
        }
        PlotType::Projection1d => {
            let xs = Roles::column(d, roles.x);
            let codes = codes.expect("group");
            for i in 0..d.n() {
                let lane = codes[i] as f64 + 1.0;
                let _ = writeln!(
                    out,
                    r#"<circle cx="{}" cy="{}" r="2" fill="{}"/>"#,
                    f(layout.sx(xs[i])),
                    f(layout.sy(lane)),
                    PALETTE[codes[i] as usize % PALETTE.len()]
                );
            }
        }
        PlotType::BoxplotPair => {
            let ys = Roles::column(d, roles.y.expect("value axis"));
            let codes = codes.expect("group");
            let half = 0.3 * (layout.sx(1.0) - layout.sx(0.0)).abs();
            for level in 0..roles.levels {
                let vals: Vec<f64> = ys
                    .iter()
                    .zip(codes)
                    .filter(|(_, &c)| c as usize == level)
                    .map(|(&y, _)| y)
                    .collect();
                if vals.is_empty() {
                    continue;
                }
                let b = box_stats(&vals);
                let cx = layout.sx(level as f64 + 1.0);
                let color = PALETTE[level % PALETTE.len()];
                let _ = writeln!(
                    out,
                    r##"<line class="whisker" x1="{cx}" y1="{}" x2="{cx}" y2="{}" stroke="#000000"/>"##,
                    f(layout.sy(b.lower_whisker)),
                    f(layout.sy(b.upper_whisker)),
                    cx = f(cx)
                );
                let _ = writeln!(
                    out,
                    r##"<rect class="box" x="{}" y="{}" width="{}" height="{}" fill="{color}" fill-opacity="0.5" stroke="#000000" data-q1="{}" data-median="{}" data-q3="{}"/>"##,
                    f(cx - half),
                    f(layout.sy(b.q3)),
                    f(2.0 * half),
                    f(layout.sy(b.q1) - layout.sy(b.q3)),
                    b.q1,
                    b.median,
                    b.q3
                );
                let _ = writeln!(
                    out,
                    r##"<line class="median" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#000000" stroke-width="2"/>"##,
                    f(cx - half),
                    f(cx + half),
                    y = f(layout.sy(b.median))
                );
                for o in &b.outliers {
                    let _ = writeln!(
                        out,
                        r#"<circle class="outlier" cx="{}" cy="{}" r="2" fill="{POINT}"/>"#,
                        f(cx),
                        f(layout.sy(*o))
                    );
                }
            }
        }
    }
}

/// Density curve of the samples with rug marks for the lineup's mean
/// distances: the true panel in orange, nulls in black.
pub fn render_distribution(dist: &EmpiricalDistribution, marks: Option<&MeanDistances>) -> String {
    let (w, h) = (640.0, 320.0);
    let (left, right, top, bottom) = (40.0, 620.0, 20.0, 280.0);
    let mut all: Vec<f64> = dist.samples.clone();
    if let Some(md) = marks {
        all.push(md.d_true);
        all.extend(&md.d_null);
    }
    let (lo, hi) = pad(combined_range([all.as_slice()]));

    let n = dist.samples.len() as f64;
    let sd = if dist.samples.len() > 1 {
        stats::sample_variance(&dist.samples).sqrt()
    } else {
        0.0
    };
    // Silverman's rule; fall back to a narrow kernel for degenerate samples
    let mut bw = 1.06 * sd * n.powf(-0.2);
    if bw <= 0.0 {
        bw = (hi - lo) / 100.0;
    }
    const GRID: usize = 200;
    let xs: Vec<f64> = (0..=GRID).map(|i| lo + (hi - lo) * i as f64 / GRID as f64).collect();
    let dens: Vec<f64> = xs
        .iter()
        .map(|&x| {
            dist.samples
                .iter()
                .map(|s| {
                    let z = (x - s) / bw;
                    (-0.5 * z * z).exp()
                })
                .sum::<f64>()
                / (n * bw * (2.0 * std::f64::consts::PI).sqrt())
        })
        .collect();
    let dmax = dens.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);

    let mut out = String::new();
    svg_open(&mut out, w, h);
    let _ = writeln!(
        out,
        r##"<line class="axis" x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="#000000"/>"##
    );
    let points: Vec<String> = xs
        .iter()
        .zip(&dens)
        .map(|(&x, &d)| {
            format!(
                "{},{}",
                f(scale(x, (lo, hi), left, right)),
                f(scale(d, (0.0, dmax), bottom, top))
            )
        })
        .collect();
    let _ = writeln!(
        out,
        r##"<polyline class="density" fill="none" stroke="#555555" stroke-width="1.5" points="{}"/>"##,
        points.join(" ")
    );
    if let Some(md) = marks {
        for d in &md.d_null {
            let x = f(scale(*d, (lo, hi), left, right));
            let _ = writeln!(
                out,
                r#"<line class="rug rug-null" x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="{NULL_RUG}" stroke-width="1"/>"#,
                f(bottom),
                f(bottom + 14.0)
            );
        }
        let x = f(scale(md.d_true, (lo, hi), left, right));
        let _ = writeln!(
            out,
            r#"<line class="rug rug-true" x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="{TRUE_RUG}" stroke-width="2"/>"#,
            f(bottom),
            f(bottom + 18.0)
        );
    }
    let _ = writeln!(
        out,
        r##"<text x="{}" y="{}" font-size="11" font-family="sans-serif" text-anchor="middle" fill="#000000">{} mean distance (N = {}, m = {})</text>"##,
        f((left + right) / 2.0),
        f(h - 4.0),
        escape(&dist.metric.label()),
        dist.n,
        dist.m
    );
    let _ = writeln!(out, "</svg>");
    out
}

fn blend(t: f64) -> String {
    // white to #08306b
    let t = t.clamp(0.0, 1.0);
    let c = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", c(255.0, 8.0), c(255.0, 48.0), c(255.0, 107.0))
}

/// Tile plot of a sweep: one tile per (p, q), darker for larger δ.
pub fn render_sweep(sweep: &SweepResult) -> String {
    let cell = 36.0;
    let (left, top) = (40.0, 10.0);
    let (np, nq) = (sweep.p_values.len(), sweep.q_values.len());
    let w = left + np as f64 * cell + 10.0;
    let h = top + nq as f64 * cell + 30.0;
    let (lo, hi) = (
        sweep.worst.unwrap_or(0.0),
        sweep.best.map_or(0.0, |b| b.delta),
    );
    let mut out = String::new();
    svg_open(&mut out, w, h);
    for (i, &p) in sweep.p_values.iter().enumerate() {
        for (j, &q) in sweep.q_values.iter().enumerate() {
            let x = left + i as f64 * cell;
            // q increases upward
            let y = top + (nq - 1 - j) as f64 * cell;
            let (fill, delta) = match sweep.delta_at(p, q) {
                Some(d) => (blend(if hi > lo { (d - lo) / (hi - lo) } else { 0.0 }), crate::dataset::format_number(d)),
                None => ("#bdbdbd".to_string(), String::new()),
            };
            let _ = writeln!(
                out,
                r##"<rect class="tile" x="{}" y="{}" width="{c}" height="{c}" fill="{fill}" stroke="#ffffff" data-p="{p}" data-q="{q}" data-delta="{delta}"/>"##,
                f(x),
                f(y),
                c = f(cell)
            );
        }
    }
    for (i, p) in sweep.p_values.iter().enumerate() {
        let _ = writeln!(
            out,
            r##"<text x="{}" y="{}" font-size="10" font-family="sans-serif" text-anchor="middle" fill="#000000">{p}</text>"##,
            f(left + (i as f64 + 0.5) * cell),
            f(top + nq as f64 * cell + 14.0)
        );
    }
    for (j, q) in sweep.q_values.iter().enumerate() {
        let _ = writeln!(
            out,
            r##"<text x="{}" y="{}" font-size="10" font-family="sans-serif" text-anchor="end" fill="#000000">{q}</text>"##,
            f(left - 6.0),
            f(top + (nq - 1 - j) as f64 * cell + cell / 2.0 + 3.0)
        );
    }
    let _ = writeln!(out, "</svg>");
    out
}

/// Whether `plot` can draw datasets shaped like `d`.
pub fn supports(plot: PlotType, d: &Dataset) -> bool {
    Roles::of(d, plot).is_ok()
}
