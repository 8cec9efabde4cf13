//! Self-contained SVG rendering of mean-error curves.
//!
//! One polyline per method over training size: random sampling in red,
//! controlled sampling in blue.

use std::fs;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::{CurvePoint, Method};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 62.0;

fn stroke(method: Method) -> &'static str {
    match method {
        Method::Random => "red",
        Method::Controlled => "blue",
    }
}

fn legend_text(method: Method) -> &'static str {
    match method {
        Method::Random => "random sampling",
        Method::Controlled => "controlled sampling",
    }
}

/// Render mean curves to an SVG document string.
///
/// Fails on an empty curve list; a single point per method renders as a
/// single-vertex polyline.
pub fn render_plot(curves: &[CurvePoint]) -> Result<String> {
    if curves.is_empty() {
        return Err(Error::Config("no curve points to plot".into()));
    }

    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y_max = f64::NEG_INFINITY;
    for point in curves {
        x_min = x_min.min(point.training_size as f64);
        x_max = x_max.max(point.training_size as f64);
        y_max = y_max.max(point.mean_error);
    }
    if x_min == x_max {
        x_min -= 1.0;
        x_max += 1.0;
    }
    if y_max <= 0.0 {
        y_max = 1.0;
    }
    y_max *= 1.08;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_x = |size: f64| MARGIN_LEFT + (size - x_min) / (x_max - x_min) * plot_w;
    let to_y = |error: f64| MARGIN_TOP + (1.0 - error / y_max) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"13\">"
    );
    let _ = writeln!(
        svg,
        "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );

    // Axes.
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    let _ = writeln!(
        svg,
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{:.2}\" y2=\"{y0}\" stroke=\"black\"/>",
        MARGIN_LEFT + plot_w
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{x0}\" y1=\"{MARGIN_TOP}\" x2=\"{x0}\" y2=\"{y0}\" stroke=\"black\"/>"
    );

    // Horizontal ticks at integer training sizes.
    let x_step = (((x_max - x_min) / 6.0).round() as usize).max(1);
    let mut size = x_min.ceil() as usize;
    while size as f64 <= x_max {
        let x = to_x(size as f64);
        let _ = writeln!(
            svg,
            "  <line x1=\"{x:.2}\" y1=\"{y0}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{size}</text>",
            y0 + 20.0
        );
        size += x_step;
    }

    // Vertical ticks.
    for i in 0..=5 {
        let error = y_max * i as f64 / 5.0;
        let y = to_y(error);
        let _ = writeln!(
            svg,
            "  <line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{x0}\" y2=\"{y:.2}\" stroke=\"black\"/>",
            x0 - 5.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{error:.3}</text>",
            x0 - 9.0,
            y + 4.0
        );
    }

    // Axis labels.
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">training set size</text>",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        svg,
        "  <text x=\"18\" y=\"{:.2}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 18 {:.2})\">mean classification error</text>",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    // Curves.
    for method in Method::BOTH {
        let mut points = String::new();
        for point in curves.iter().filter(|point| point.method == method) {
            let _ = write!(
                points,
                "{:.2},{:.2} ",
                to_x(point.training_size as f64),
                to_y(point.mean_error)
            );
        }
        if points.is_empty() {
            continue;
        }
        let _ = writeln!(
            svg,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>",
            points.trim_end(),
            stroke(method)
        );
    }

    // Legend, top right inside the plot area.
    let legend_x = MARGIN_LEFT + plot_w - 190.0;
    for (i, method) in Method::BOTH.into_iter().enumerate() {
        let y = MARGIN_TOP + 16.0 + 20.0 * i as f64;
        let _ = writeln!(
            svg,
            "  <line x1=\"{legend_x:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
             stroke=\"{}\" stroke-width=\"2\"/>",
            legend_x + 26.0,
            stroke(method)
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            legend_x + 34.0,
            y + 4.0,
            legend_text(method)
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Render the curves and write them to `path`.
pub fn emit_plot(curves: &[CurvePoint], path: &Path) -> Result<()> {
    let svg = render_plot(curves)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}
