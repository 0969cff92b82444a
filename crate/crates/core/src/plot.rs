//! Standalone SVG scatter of (capacity factor, demand) pairs colored by
//! cluster.

use std::fmt::Write;

use thiserror::Error;

use crate::clustering::ClusterModel;
use crate::data_io::SeriesData;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 55.0;

const PALETTE: [&str; 12] = [
    "#1f77b4", "#222222", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
    "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8",
];

#[derive(Debug, Error, PartialEq)]
pub enum PlotError {
    #[error("series has {series} hours but the cluster model covers {clusters}")]
    LengthMismatch { series: usize, clusters: usize },
    #[error("series has no capacity-factor column to plot")]
    NoCapacityFactor,
    #[error("cluster model is empty")]
    Empty,
}

/// Fill color of cluster `id`.
pub fn cluster_color(id: usize) -> String {
    match PALETTE.get(id) {
        Some(c) => (*c).to_string(),
        None => {
            let hue = (id as f64 * 137.507_764) % 360.0;
            format!("hsl({hue:.1},65%,45%)")
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn nice_range(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.03 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Scatter with the first capacity-factor series on x and demand on y,
/// one circle per hour and a cross at each cluster mean.
pub fn render_scatter(series: &SeriesData, model: &ClusterModel, title: &str) -> Result<String, PlotError> {
    if model.k == 0 || model.assignment.is_empty() {
        return Err(PlotError::Empty);
    }
    if series.horizon() != model.horizon() {
        return Err(PlotError::LengthMismatch {
            series: series.horizon(),
            clusters: model.horizon(),
        });
    }
    let (cf_name, xs) = series
        .capacity_factors
        .iter()
        .next()
        .ok_or(PlotError::NoCapacityFactor)?;
    let ys = &series.demand;

    let (x0, x1) = nice_range(
        xs.iter().copied().fold(f64::INFINITY, f64::min),
        xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    let (y0, y1) = nice_range(
        ys.iter().copied().fold(f64::INFINITY, f64::min),
        ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| TOP + plot_h - (y - y0) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    let w = &mut svg;
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(w, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(w, r#"<text x="{:.2}" y="18" text-anchor="middle" font-size="14">{}</text>"#, LEFT + plot_w / 2.0, escape(title)).unwrap();

    // axes and ticks
    writeln!(
        w,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let (tx, ty) = (px(xv), py(yv));
        writeln!(w, r#"<line x1="{tx:.2}" y1="{:.2}" x2="{tx:.2}" y2="{:.2}" stroke="black"/>"#, TOP + plot_h, TOP + plot_h + 5.0).unwrap();
        writeln!(w, r#"<text x="{tx:.2}" y="{:.2}" text-anchor="middle">{xv:.2}</text>"#, TOP + plot_h + 18.0).unwrap();
        writeln!(w, r#"<line x1="{:.2}" y1="{ty:.2}" x2="{LEFT}" y2="{ty:.2}" stroke="black"/>"#, LEFT - 5.0).unwrap();
        writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.1}</text>"#, LEFT - 8.0, ty + 4.0).unwrap();
    }
    writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{} capacity factor</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0,
        escape(cf_name)
    )
    .unwrap();
    writeln!(
        w,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">demand [MW]</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    )
    .unwrap();

    writeln!(w, r#"<g fill-opacity="0.6">"#).unwrap();
    for ((&x, &y), &c) in xs.iter().zip(ys).zip(&model.assignment) {
        writeln!(w, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{}"/>"#, px(x), py(y), cluster_color(c)).unwrap();
    }
    writeln!(w, "</g>").unwrap();

    // cluster means in physical units
    let mut sums = vec![(0.0, 0.0, 0usize); model.k];
    for ((&x, &y), &c) in xs.iter().zip(ys).zip(&model.assignment) {
        sums[c].0 += x;
        sums[c].1 += y;
        sums[c].2 += 1;
    }
    for (j, &(sx, sy, n)) in sums.iter().enumerate() {
        if n == 0 {
            continue;
        }
        let (cx, cy) = (px(sx / n as f64), py(sy / n as f64));
        writeln!(
            w,
            r#"<path class="centroid" d="M{:.2},{:.2}L{:.2},{:.2}M{:.2},{:.2}L{:.2},{:.2}" stroke="{}" stroke-width="3"/>"#,
            cx - 7.0, cy - 7.0, cx + 7.0, cy + 7.0, cx - 7.0, cy + 7.0, cx + 7.0, cy - 7.0,
            cluster_color(j)
        )
        .unwrap();
    }

    let lx = WIDTH - RIGHT + 15.0;
    for j in 0..model.k {
        let ly = TOP + 10.0 + 20.0 * j as f64;
        writeln!(w, r#"<rect x="{lx:.2}" y="{:.2}" width="12" height="12" fill="{}"/>"#, ly - 10.0, cluster_color(j)).unwrap();
        let label = model.labels.get(j).map_or_else(|| format!("cluster {j}"), |l| l.clone());
        writeln!(
            w,
            r#"<text class="legend" x="{:.2}" y="{ly:.2}">{} ({})</text>"#,
            lx + 18.0,
            escape(&label),
            model.weights.get(j).copied().unwrap_or(0)
        )
        .unwrap();
    }
    writeln!(w, "</svg>").unwrap();
    Ok(svg)
}
