//! Static SVG plots: heatmaps, curve bundles, score scatter matrices and the
//! energy-test and energy-breakdown summaries.

pub mod color;
pub mod kde;
pub mod svg;

use centerlab_core::{pearson_correlation, DMatrix, EnergyBreakdown, EnergyTestResult};
use clap::ValueEnum;

use crate::error::{CliError, Result};
use color::{categorical, diverging, rainbow, Rgb};
use svg::{Scale, Svg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Heatmap,
    Curves,
    ScatterMatrix,
    EnergyTest,
    EnergyBreakdown,
}

#[derive(Debug, Clone)]
pub enum PlotData {
    /// Traits × objects.
    Matrix(DMatrix<f64>),
    /// One curve per column, drawn against `x` (trait index by default).
    Curves {
        x: Option<Vec<f64>>,
        curves: DMatrix<f64>,
    },
    /// Objects × components.
    Scores {
        scores: DMatrix<f64>,
        names: Vec<String>,
    },
    EnergyTest(EnergyTestResult),
    EnergyBreakdown(EnergyBreakdown),
}

#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub kind: PlotKind,
    pub title: Option<String>,
    pub x_label: Option<String>,
    pub y_label: Option<String>,
    /// Heatmap color-bar half range; defaults to `max |value|`.
    pub color_max: Option<f64>,
    /// Group per object; colors curves and scatter points when present.
    pub groups: Option<Vec<Option<String>>>,
    /// Join scatter points in object order.
    pub connect: bool,
}

impl PlotSpec {
    pub fn new(kind: PlotKind) -> Self {
        PlotSpec {
            kind,
            title: None,
            x_label: None,
            y_label: None,
            color_max: None,
            groups: None,
            connect: true,
        }
    }
}

const MARGIN: f64 = 60.0;
const UNGROUPED: Rgb = Rgb(160, 160, 160);
const OBSERVED: &str = "#d62728";

pub fn render_plot(data: &PlotData, spec: &PlotSpec) -> Result<String> {
    let empty = match data {
        PlotData::Matrix(m) | PlotData::Curves { curves: m, .. } | PlotData::Scores { scores: m, .. } => m.is_empty(),
        PlotData::EnergyTest(r) => r.null_samples.is_empty(),
        PlotData::EnergyBreakdown(b) => b.object_centered_shares.is_empty() && b.constant_direction_share == 0.0,
    };
    if empty {
        return Err(CliError::Validation(format!(
            "nothing to plot: {:?} data is empty",
            spec.kind
        )));
    }
    match (spec.kind, data) {
        (PlotKind::Heatmap, PlotData::Matrix(m)) => Ok(heatmap(m, spec)),
        (PlotKind::Curves, PlotData::Curves { x, curves }) => curves_plot(x.as_deref(), curves, spec),
        (PlotKind::Curves, PlotData::Matrix(m)) => curves_plot(None, m, spec),
        (PlotKind::ScatterMatrix, PlotData::Scores { scores, names }) => scatter_matrix(scores, names, spec),
        (PlotKind::EnergyTest, PlotData::EnergyTest(r)) => Ok(energy_test(r, spec)),
        (PlotKind::EnergyBreakdown, PlotData::EnergyBreakdown(b)) => Ok(energy_breakdown(b, spec)),
        (kind, _) => Err(CliError::Validation(format!("data does not match plot kind {kind:?}"))),
    }
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        "0".into()
    } else if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_owned()
    } else {
        format!("{v:.2e}")
    }
}

fn header(svg: &mut Svg, width: f64, spec: &PlotSpec) {
    if let Some(title) = &spec.title {
        svg.text(width / 2.0, 24.0, 14.0, "middle", title);
    }
}

struct Area {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
}

fn axes(svg: &mut Svg, area: &Area, xs: &Scale, ys: &Scale, spec: &PlotSpec) {
    let bottom = area.y0 + area.h;
    svg.line(area.x0, bottom, area.x0 + area.w, bottom, "#000000", 1.0, None);
    svg.line(area.x0, area.y0, area.x0, bottom, "#000000", 1.0, None);
    for k in 0..=4 {
        let (lo, hi) = xs.domain();
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let px = xs.map(v);
        svg.line(px, bottom, px, bottom + 4.0, "#000000", 1.0, None);
        svg.text(px, bottom + 16.0, 10.0, "middle", &tick(v));
        let (lo, hi) = ys.domain();
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let py = ys.map(v);
        svg.line(area.x0 - 4.0, py, area.x0, py, "#000000", 1.0, None);
        svg.text(area.x0 - 6.0, py + 3.0, 10.0, "end", &tick(v));
    }
    if let Some(label) = &spec.x_label {
        svg.text(area.x0 + area.w / 2.0, bottom + 34.0, 12.0, "middle", label);
    }
    if let Some(label) = &spec.y_label {
        svg.rotated_text(area.x0 - 46.0, area.y0 + area.h / 2.0, 12.0, label);
    }
}

/// Group index by first appearance; `None` for ungrouped objects.
fn group_indices(groups: &[Option<String>]) -> (Vec<Option<usize>>, Vec<String>) {
    let mut names: Vec<String> = Vec::new();
    let idx = groups
        .iter()
        .map(|g| {
            g.as_ref().map(|g| match names.iter().position(|n| n == g) {
                Some(k) => k,
                None => {
                    names.push(g.clone());
                    names.len() - 1
                }
            })
        })
        .collect();
    (idx, names)
}

type Legend = Vec<(String, Rgb)>;

/// Colors per object plus legend entries when grouped.
fn object_colors(n: usize, spec: &PlotSpec) -> Result<(Vec<Rgb>, Legend)> {
    match &spec.groups {
        Some(groups) => {
            if groups.len() != n {
                return Err(CliError::Validation(format!(
                    "label file covers {} objects but the plot has {n}",
                    groups.len()
                )));
            }
            let (idx, names) = group_indices(groups);
            let colors = idx.iter().map(|k| k.map_or(UNGROUPED, categorical)).collect();
            let legend = names
                .into_iter()
                .enumerate()
                .map(|(k, name)| (name, categorical(k)))
                .collect();
            Ok((colors, legend))
        }
        None => Ok(((0..n).map(|i| rainbow(i, n)).collect(), Vec::new())),
    }
}

fn legend(svg: &mut Svg, x: f64, y: f64, entries: &[(String, Rgb)]) {
    for (k, (name, c)) in entries.iter().enumerate() {
        let yy = y + 16.0 * k as f64;
        svg.rect(x, yy - 9.0, 10.0, 10.0, &c.hex(), None);
        svg.text(x + 14.0, yy, 10.0, "start", name);
    }
}

fn heatmap(m: &DMatrix<f64>, spec: &PlotSpec) -> String {
    let (d, n) = m.shape();
    let cw = (600.0 / n as f64).clamp(1.0, 20.0);
    let ch = (400.0 / d as f64).clamp(1.0, 20.0);
    let (pw, ph) = (cw * n as f64, ch * d as f64);
    let width = MARGIN * 2.0 + pw + 80.0;
    let height = MARGIN * 2.0 + ph;
    let max = spec.color_max.unwrap_or_else(|| m.amax());
    let mut svg = Svg::new(width, height);
    header(&mut svg, width, spec);
    for i in 0..d {
        for j in 0..n {
            let c = diverging(m[(i, j)], max).hex();
            svg.rect(MARGIN + j as f64 * cw, MARGIN + i as f64 * ch, cw, ch, &c, None);
        }
    }
    svg.rect(MARGIN, MARGIN, pw, ph, "none", Some("#000000"));
    if let Some(label) = &spec.x_label {
        svg.text(MARGIN + pw / 2.0, MARGIN + ph + 24.0, 12.0, "middle", label);
    }
    if let Some(label) = &spec.y_label {
        svg.rotated_text(MARGIN - 20.0, MARGIN + ph / 2.0, 12.0, label);
    }

    // Color bar, +max at the top.
    let bx = MARGIN + pw + 24.0;
    let strips = 64;
    let sh = ph / strips as f64;
    for k in 0..strips {
        let v = max * (1.0 - 2.0 * (k as f64 + 0.5) / strips as f64);
        svg.rect(bx, MARGIN + k as f64 * sh, 14.0, sh, &diverging(v, max).hex(), None);
    }
    svg.rect(bx, MARGIN, 14.0, ph, "none", Some("#000000"));
    for (frac, v) in [(0.0, max), (0.5, 0.0), (1.0, -max)] {
        svg.text(bx + 18.0, MARGIN + frac * ph + 3.0, 10.0, "start", &tick(v));
    }
    svg.finish()
}

fn curves_plot(x: Option<&[f64]>, curves: &DMatrix<f64>, spec: &PlotSpec) -> Result<String> {
    let (d, n) = curves.shape();
    let xs_data: Vec<f64> = match x {
        Some(x) if x.len() == d => x.to_vec(),
        Some(x) => {
            return Err(CliError::Validation(format!(
                "{} x positions for curves of length {d}",
                x.len()
            )))
        }
        None => (0..d).map(|i| i as f64).collect(),
    };
    let (colors, entries) = object_colors(n, spec)?;
    let area = Area {
        x0: MARGIN,
        y0: MARGIN,
        w: 600.0,
        h: 400.0,
    };
    let width = area.w + MARGIN * 2.0 + if entries.is_empty() { 0.0 } else { 100.0 };
    let height = area.h + MARGIN * 2.0;
    let xs = Scale::padded(xs_data.iter().copied(), area.x0, area.x0 + area.w);
    let ys = Scale::padded(curves.iter().copied(), area.y0 + area.h, area.y0);
    let mut svg = Svg::new(width, height);
    header(&mut svg, width, spec);
    axes(&mut svg, &area, &xs, &ys, spec);
    for j in 0..n {
        let pts: Vec<(f64, f64)> = (0..d).map(|i| (xs.map(xs_data[i]), ys.map(curves[(i, j)]))).collect();
        svg.polyline(&pts, &colors[j].hex(), 1.0, 0.8);
    }
    legend(&mut svg, area.x0 + area.w + 16.0, area.y0 + 10.0, &entries);
    Ok(svg.finish())
}

/// Correlation label; prints `0.00` rather than `-0.00`.
fn correlation_label(a: &[f64], b: &[f64]) -> String {
    match pearson_correlation(a, b) {
        Ok(r) => {
            let s = format!("{r:.2}");
            if s == "-0.00" {
                "r = 0.00".into()
            } else {
                format!("r = {s}")
            }
        }
        Err(_) => "r = n/a".into(),
    }
}

fn scatter_matrix(scores: &DMatrix<f64>, names: &[String], spec: &PlotSpec) -> Result<String> {
    let (n, k) = scores.shape();
    let (colors, entries) = object_colors(n, spec)?;
    let panel = 150.0;
    let gap = 12.0;
    let side = k as f64 * (panel + gap) - gap;
    let width = side + MARGIN * 2.0 + if entries.is_empty() { 0.0 } else { 100.0 };
    let height = side + MARGIN * 2.0;
    let mut svg = Svg::new(width, height);
    header(&mut svg, width, spec);
    let cols: Vec<Vec<f64>> = (0..k).map(|c| scores.column(c).iter().copied().collect()).collect();

    for row in 0..k {
        for col in 0..k {
            let x0 = MARGIN + col as f64 * (panel + gap);
            let y0 = MARGIN + row as f64 * (panel + gap);
            svg.rect(x0, y0, panel, panel, "none", Some("#000000"));
            let xs = Scale::padded(cols[col].iter().copied(), x0, x0 + panel);
            if row == col {
                let data = &cols[col];
                let (lo, hi) = xs.domain();
                let grid = kde::linspace(lo, hi, 100);
                let dens = kde::density(data, kde::silverman_bandwidth(data), &grid);
                let top = dens.iter().copied().fold(0.0, f64::max);
                let ys = Scale::new(0.0, top * 1.1, y0 + panel - 12.0, y0);
                let pts: Vec<(f64, f64)> = grid.iter().zip(&dens).map(|(&g, &p)| (xs.map(g), ys.map(p))).collect();
                svg.polyline(&pts, "#000000", 1.2, 1.0);
                for (i, &v) in data.iter().enumerate() {
                    svg.circle(xs.map(v), y0 + panel - 6.0, 1.5, &colors[i].hex());
                }
            } else {
                let ys = Scale::padded(cols[row].iter().copied(), y0 + panel, y0);
                let pts: Vec<(f64, f64)> = (0..n).map(|i| (xs.map(cols[col][i]), ys.map(cols[row][i]))).collect();
                if spec.connect {
                    svg.polyline(&pts, "#999999", 0.5, 0.6);
                }
                for (i, &(px, py)) in pts.iter().enumerate() {
                    svg.circle(px, py, 2.0, &colors[i].hex());
                }
                svg.text(
                    x0 + 4.0,
                    y0 + 12.0,
                    10.0,
                    "start",
                    &correlation_label(&cols[col], &cols[row]),
                );
            }
        }
        let name = names
            .get(row)
            .cloned()
            .unwrap_or_else(|| format!("component {}", row + 1));
        svg.rotated_text(
            MARGIN - 12.0,
            MARGIN + row as f64 * (panel + gap) + panel / 2.0,
            11.0,
            &name,
        );
        svg.text(
            MARGIN + row as f64 * (panel + gap) + panel / 2.0,
            MARGIN + side + 20.0,
            11.0,
            "middle",
            &name,
        );
    }
    legend(&mut svg, MARGIN + side + 16.0, MARGIN + 10.0, &entries);
    Ok(svg.finish())
}

fn energy_test(r: &EnergyTestResult, spec: &PlotSpec) -> String {
    let area = Area {
        x0: MARGIN,
        y0: MARGIN,
        w: 600.0,
        h: 300.0,
    };
    let width = area.w + MARGIN * 2.0;
    let height = area.h + MARGIN * 2.0;
    let nulls = &r.null_samples;
    let xs = Scale::padded(nulls.iter().copied().chain([r.observed]), area.x0, area.x0 + area.w);
    let (lo, hi) = xs.domain();
    let grid = kde::linspace(lo, hi, 200);
    let dens = kde::density(nulls, kde::silverman_bandwidth(nulls), &grid);
    let top = dens.iter().copied().fold(0.0, f64::max);
    let ys = Scale::new(0.0, top * 1.1, area.y0 + area.h, area.y0);

    let mut svg = Svg::new(width, height);
    header(&mut svg, width, spec);
    let spec = PlotSpec {
        x_label: spec.x_label.clone().or_else(|| Some("energy fraction".into())),
        y_label: spec.y_label.clone().or_else(|| Some("density".into())),
        ..spec.clone()
    };
    axes(&mut svg, &area, &xs, &ys, &spec);

    // Null values as dots in the lower band with a fixed low-discrepancy jitter.
    let band = area.h * 0.25;
    for (i, &v) in nulls.iter().enumerate() {
        let jitter = (i as f64 * 0.618_033_988_749_895).fract();
        svg.circle(xs.map(v), area.y0 + area.h - 4.0 - jitter * band, 1.5, "#1f77b4");
    }
    let pts: Vec<(f64, f64)> = grid.iter().zip(&dens).map(|(&g, &p)| (xs.map(g), ys.map(p))).collect();
    svg.polyline(&pts, "#000000", 1.5, 1.0);
    let q = xs.map(r.null_quantile);
    svg.line(q, area.y0, q, area.y0 + area.h, "#7f7f7f", 1.0, Some("4,4"));
    let o = xs.map(r.observed);
    svg.line(o, area.y0, o, area.y0 + area.h, OBSERVED, 2.0, Some("8,3,2,3"));
    svg.text(
        area.x0 + area.w,
        area.y0 - 8.0,
        10.0,
        "end",
        &format!(
            "observed {} | p = {} | reject = {}",
            tick(r.observed),
            tick(r.p_value),
            r.reject
        ),
    );
    svg.finish()
}

fn energy_breakdown(b: &EnergyBreakdown, spec: &PlotSpec) -> String {
    let k = b.object_centered_shares.len();
    let area = Area {
        x0: MARGIN,
        y0: MARGIN,
        w: 120.0 + 100.0 * k as f64,
        h: 300.0,
    };
    let width = area.w + MARGIN * 2.0 + 140.0;
    let height = area.h + MARGIN * 2.0;
    let ys = Scale::new(0.0, 1.0, area.y0 + area.h, area.y0);
    let mut svg = Svg::new(width, height);
    header(&mut svg, width, spec);
    let spec = PlotSpec {
        y_label: spec
            .y_label
            .clone()
            .or_else(|| Some("share of object-centered energy".into())),
        ..spec.clone()
    };
    let bottom = area.y0 + area.h;
    svg.line(area.x0, bottom, area.x0 + area.w, bottom, "#000000", 1.0, None);
    svg.line(area.x0, area.y0, area.x0, bottom, "#000000", 1.0, None);
    for t in 0..=4 {
        let v = t as f64 / 4.0;
        svg.line(area.x0 - 4.0, ys.map(v), area.x0, ys.map(v), "#000000", 1.0, None);
        svg.text(area.x0 - 6.0, ys.map(v) + 3.0, 10.0, "end", &tick(v));
    }
    if let Some(label) = &spec.y_label {
        svg.rotated_text(area.x0 - 40.0, area.y0 + area.h / 2.0, 12.0, label);
    }

    let bar = |svg: &mut Svg, x: f64, v: f64, fill: &str| {
        let top = ys.map(v);
        svg.rect(x, top, 30.0, bottom - top, fill, None);
        svg.text(x + 15.0, top - 4.0, 9.0, "middle", &format!("{v:.3}"));
    };
    let obj = categorical(0).hex();
    let dbl = categorical(1).hex();
    bar(&mut svg, area.x0 + 30.0, b.constant_direction_share, OBSERVED);
    svg.text(area.x0 + 45.0, bottom + 16.0, 10.0, "middle", "constant");
    for j in 0..k {
        let x = area.x0 + 120.0 + 100.0 * j as f64;
        bar(&mut svg, x, b.object_centered_shares[j], &obj);
        bar(&mut svg, x + 34.0, b.double_centered_shares[j], &dbl);
        svg.text(x + 32.0, bottom + 16.0, 10.0, "middle", &format!("component {}", j + 1));
    }
    legend(
        &mut svg,
        area.x0 + area.w + 16.0,
        area.y0 + 10.0,
        &[
            ("constant direction".into(), color::NEGATIVE),
            ("object centered".into(), categorical(0)),
            ("double centered".into(), categorical(1)),
        ],
    );
    svg.finish()
}
