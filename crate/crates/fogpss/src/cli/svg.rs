//! Self-contained static line charts as standalone SVG documents. No
//! renderer dependencies: axes, ticks, one polyline per plot, optional
//! horizontal guide lines (used for terminal-ball radii on error plots).

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

/// Long traces are decimated for display; the CSV keeps every sample.
const MAX_PLOT_POINTS: usize = 2000;

pub struct LinePlot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
    /// Horizontal guide levels drawn as dashed lines.
    pub guides: &'a [f64],
}

fn nice_ticks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect()
}

fn fmt(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1000.0 || v.abs() < 0.01 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Renders one line chart as a complete SVG document.
pub fn line_plot(plot: &LinePlot) -> String {
    assert_eq!(plot.xs.len(), plot.ys.len(), "mismatched series lengths");
    let stride = (plot.xs.len() / MAX_PLOT_POINTS).max(1);

    let xs: Vec<f64> = plot.xs.iter().copied().step_by(stride).collect();
    let ys: Vec<f64> = plot.ys.iter().copied().step_by(stride).collect();

    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in &xs {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
    }
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &y in ys.iter().chain(plot.guides) {
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if !x_lo.is_finite() || x_lo == x_hi {
        x_hi = x_lo + 1.0;
    }
    if !y_lo.is_finite() {
        y_lo = 0.0;
        y_hi = 1.0;
    }
    if y_lo == y_hi {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w,
            MARGIN_TOP + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h,
        )
    };

    let mut svg = String::with_capacity(32 * 1024);
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"13\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        plot.title
    ));

    // frame
    svg.push_str(&format!(
        "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"black\"/>\n"
    ));

    for tick in nice_ticks(x_lo, x_hi, 6) {
        let (px, _) = to_px(tick, y_lo);
        svg.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{}\" x2=\"{px:.1}\" y2=\"{}\" stroke=\"black\"/>\n",
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{px:.1}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_TOP + plot_h + 20.0,
            fmt(tick)
        ));
    }
    for tick in nice_ticks(y_lo, y_hi, 5) {
        let (_, py) = to_px(x_lo, tick);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{py:.1}\" x2=\"{MARGIN_LEFT}\" y2=\"{py:.1}\" stroke=\"black\"/>\n",
            MARGIN_LEFT - 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
            MARGIN_LEFT - 9.0,
            py + 4.0,
            fmt(tick)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0,
        plot.x_label
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        plot.y_label
    ));

    for &guide in plot.guides {
        let (_, py) = to_px(x_lo, guide);
        svg.push_str(&format!(
            "<line x1=\"{MARGIN_LEFT}\" y1=\"{py:.1}\" x2=\"{}\" y2=\"{py:.1}\" \
             stroke=\"crimson\" stroke-dasharray=\"6 4\"/>\n",
            MARGIN_LEFT + plot_w
        ));
    }

    let points: Vec<String> = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| {
            let (px, py) = to_px(x, y);
            format!("{px:.1},{py:.1}")
        })
        .collect();
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n",
        points.join(" ")
    ));
    svg.push_str("</svg>\n");
    svg
}
