//! Hand-rolled SVG plots of relevance functions: the step function overlaid
//! with its polygonal form, axes labeled `t` and `R_f(t)`.

use std::fmt::Write;

use funshap::{relevance_polygonal, RelevanceFunction};

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 420.0;
pub const MARGIN: f64 = 60.0;

/// Affine map from data coordinates to pixel coordinates.
#[derive(Debug, Clone, Copy)]
pub struct PlotFrame {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl PlotFrame {
    pub fn x_pixel(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2.0 * MARGIN)
    }

    pub fn y_pixel(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn frame_for(rf: &RelevanceFunction) -> PlotFrame {
    let (x_min, x_max) = rf.partition().domain();
    let lo = rf.heights().iter().copied().fold(0.0f64, f64::min);
    let hi = rf.heights().iter().copied().fold(0.0f64, f64::max);
    let pad = 0.1 * (hi - lo).max(1e-12);
    PlotFrame {
        x_min,
        x_max,
        y_min: lo - pad,
        y_max: hi + pad,
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

/// Render one relevance function as a standalone SVG document.
pub fn relevance_svg(rf: &RelevanceFunction, title: &str) -> String {
    let frame = frame_for(rf);
    let poly = relevance_polygonal(rf);
    let partition = rf.partition();
    let n = partition.len();

    // step path: horizontal segment per interval, vertical risers between
    let mut d = String::new();
    for i in 0..n {
        let (a, b) = partition.interval(i);
        let y = frame.y_pixel(rf.heights()[i]);
        if i == 0 {
            write!(d, "M {} {}", fmt(frame.x_pixel(a)), fmt(y)).unwrap();
        } else {
            write!(d, " L {} {}", fmt(frame.x_pixel(a)), fmt(y)).unwrap();
        }
        write!(d, " L {} {}", fmt(frame.x_pixel(b)), fmt(y)).unwrap();
    }

    let points: String = poly
        .vertices()
        .iter()
        .map(|&(x, y)| format!("{},{}", fmt(frame.x_pixel(x)), fmt(frame.y_pixel(y))))
        .collect::<Vec<_>>()
        .join(" ");

    let axis_y = frame.y_pixel(frame.y_min);
    let axis_x = frame.x_pixel(frame.x_min);
    let zero_y = frame.y_pixel(0.0);
    let mut svg = String::new();
    write!(
        svg,
        concat!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" "#,
            r#"viewBox="0 0 {w} {h}">"#,
            "\n",
        ),
        w = WIDTH,
        h = HEIGHT
    )
    .unwrap();
    write!(
        svg,
        r##"  <rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>
  <text x="{tx}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{title}</text>
  <line x1="{axis_x}" y1="{axis_y}" x2="{x_end}" y2="{axis_y}" stroke="black" stroke-width="1"/>
  <line x1="{axis_x}" y1="{axis_y}" x2="{axis_x}" y2="{y_end}" stroke="black" stroke-width="1"/>
  <line x1="{axis_x}" y1="{zero_y}" x2="{x_end}" y2="{zero_y}" stroke="#bbbbbb" stroke-width="0.5" stroke-dasharray="4 3"/>
  <text x="{tx}" y="{label_y}" text-anchor="middle" font-family="sans-serif" font-size="13">t</text>
  <text x="16" y="{ylabel_y}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 {ylabel_y})">R_f(t)</text>
  <text x="{axis_x}" y="{tick_y}" text-anchor="middle" font-family="sans-serif" font-size="11">{x0}</text>
  <text x="{x_end}" y="{tick_y}" text-anchor="middle" font-family="sans-serif" font-size="11">{x1}</text>
  <text x="{ytick_x}" y="{y_end}" text-anchor="end" font-family="sans-serif" font-size="11">{ymax}</text>
  <path id="relevance-step" fill="none" stroke="#1f77b4" stroke-width="2" d="{d}"/>
  <polyline id="relevance-polygonal" fill="none" stroke="#d62728" stroke-width="1.5" stroke-dasharray="6 3" points="{points}"/>
</svg>
"##,
        tx = WIDTH / 2.0,
        x_end = frame.x_pixel(frame.x_max),
        y_end = frame.y_pixel(frame.y_max),
        label_y = HEIGHT - 18.0,
        ylabel_y = HEIGHT / 2.0,
        tick_y = axis_y + 18.0,
        x0 = frame.x_min,
        x1 = frame.x_max,
        ytick_x = axis_x - 6.0,
        ymax = fmt(frame.y_max),
    )
    .unwrap();
    svg
}

/// The step path's horizontal segments as `(x_start, x_end, y)` pixel triples;
/// the inverse view of what [`relevance_svg`] draws, for tests.
pub fn parse_step_segments(svg: &str) -> Vec<(f64, f64, f64)> {
    let Some(start) = svg.find(r#"id="relevance-step""#) else {
        return Vec::new();
    };
    let Some(d_start) = svg[start..].find(" d=\"") else {
        return Vec::new();
    };
    let from = start + d_start + 4;
    let Some(d_len) = svg[from..].find('"') else {
        return Vec::new();
    };
    let d = &svg[from..from + d_len];
    let coords: Vec<(f64, f64)> = d
        .split(['M', 'L'])
        .filter(|s| !s.trim().is_empty())
        .filter_map(|pair| {
            let mut it = pair.split_whitespace();
            let x: f64 = it.next()?.parse().ok()?;
            let y: f64 = it.next()?.parse().ok()?;
            Some((x, y))
        })
        .collect();
    coords
        .windows(2)
        .filter(|w| (w[0].1 - w[1].1).abs() < 1e-9 && (w[1].0 - w[0].0).abs() > 1e-9)
        .map(|w| (w[0].0, w[1].0, w[0].1))
        .collect()
}
