//! Self-contained SVG 1.1 figures: inline attributes only, no external
//! assets or scripts.

use std::fmt::Write;

const FONT: &str = "font-family=\"Helvetica, Arial, sans-serif\"";

fn document(width: f64, height: f64, body: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n\
         <rect x=\"0\" y=\"0\" width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>\n\
         {body}</svg>\n"
    )
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn text(out: &mut String, x: f64, y: f64, size: f64, anchor: &str, content: &str) {
    let _ = writeln!(
        out,
        "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"{size}\" text-anchor=\"{anchor}\" {FONT}>{}</text>",
        escape(content)
    );
}

/// Inverse grayscale: probability 1 is black, 0 is white.
pub fn gray(p: f64) -> String {
    let level = (255.0 * (1.0 - p.clamp(0.0, 1.0))).round() as u8;
    format!("#{level:02x}{level:02x}{level:02x}")
}

/// A point of the MDS plot.
pub struct ScatterPoint {
    pub x: f64,
    pub y: f64,
    pub initial: bool,
    pub label: String,
}

/// Embedding of initial (red diamonds) and final (blue circles) codes.
pub fn mds_plot(points: &[ScatterPoint], title: &str) -> String {
    let (w, h, margin) = (520.0, 520.0, 50.0);
    let span = |f: fn(&ScatterPoint) -> f64| {
        let lo = points.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() {
            (lo, hi)
        } else {
            (0.0, 0.0)
        }
    };
    let (x_lo, x_hi) = span(|p| p.x);
    let (y_lo, y_hi) = span(|p| p.y);
    // equal scaling on both axes so distances stay comparable
    let range = (x_hi - x_lo).max(y_hi - y_lo);
    let scale = if range > 1e-12 {
        (w - 2.0 * margin) / range
    } else {
        0.0
    };
    let (cx, cy) = ((x_lo + x_hi) / 2.0, (y_lo + y_hi) / 2.0);
    let to_px = |x: f64, y: f64| (w / 2.0 + (x - cx) * scale, h / 2.0 - (y - cy) * scale);

    let mut body = String::new();
    text(&mut body, w / 2.0, 24.0, 15.0, "middle", title);
    let _ = writeln!(
        body,
        "<rect x=\"{m}\" y=\"{m}\" width=\"{iw}\" height=\"{ih}\" fill=\"none\" stroke=\"#999999\"/>",
        m = margin - 10.0,
        iw = w - 2.0 * margin + 20.0,
        ih = h - 2.0 * margin + 20.0
    );
    for p in points.iter().filter(|p| p.initial) {
        let (x, y) = to_px(p.x, p.y);
        let r = 5.0;
        let _ = writeln!(
            body,
            "<polygon points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" fill=\"#d62728\" fill-opacity=\"0.8\"><title>{}</title></polygon>",
            x, y - r, x + r, y, x, y + r, x - r, y,
            escape(&p.label)
        );
    }
    for p in points.iter().filter(|p| !p.initial) {
        let (x, y) = to_px(p.x, p.y);
        let _ = writeln!(
            body,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"5\" fill=\"#1f77b4\" fill-opacity=\"0.8\"><title>{}</title></circle>",
            escape(&p.label)
        );
    }
    let ly = h - 18.0;
    let _ = writeln!(
        body,
        "<polygon points=\"60,{a:.0} 65,{b:.0} 60,{c:.0} 55,{b:.0}\" fill=\"#d62728\"/>",
        a = ly - 5.0,
        b = ly,
        c = ly + 5.0
    );
    text(&mut body, 72.0, ly + 4.0, 12.0, "start", "initial codes");
    let _ = writeln!(
        body,
        "<circle cx=\"200\" cy=\"{ly:.0}\" r=\"5\" fill=\"#1f77b4\"/>"
    );
    text(&mut body, 212.0, ly + 4.0, 12.0, "start", "final codes");
    document(w, h, &body)
}

/// One matrix of a heatmap panel, row-major.
pub struct Panel {
    pub title: String,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

/// Panels side by side (wrapping), each cell shaded in inverse grayscale.
pub fn heatmaps(panels: &[Panel], title: &str, cell: f64, per_row: usize) -> String {
    let per_row = per_row.max(1);
    let label_w = panels
        .iter()
        .flat_map(|p| &p.row_labels)
        .map(|l| l.chars().count())
        .max()
        .unwrap_or(0) as f64
        * 7.0
        + 12.0;
    let max_cols = panels.iter().map(|p| p.cols).max().unwrap_or(0) as f64;
    let max_rows = panels.iter().map(|p| p.rows).max().unwrap_or(0) as f64;
    let panel_w = label_w + max_cols * cell + 24.0;
    let panel_h = 40.0 + max_rows * cell + 24.0;
    let grid_cols = panels.len().clamp(1, per_row);
    let grid_rows = panels.len().div_ceil(per_row).max(1);
    let width = (grid_cols as f64 * panel_w + 20.0).max(260.0);
    let height = 40.0 + grid_rows as f64 * panel_h;

    let mut body = String::new();
    text(&mut body, width / 2.0, 24.0, 15.0, "middle", title);
    for (k, panel) in panels.iter().enumerate() {
        let ox = 10.0 + (k % per_row) as f64 * panel_w;
        let oy = 40.0 + (k / per_row) as f64 * panel_h;
        text(
            &mut body,
            ox + label_w,
            oy + 14.0,
            12.0,
            "start",
            &panel.title,
        );
        let top = oy + 36.0;
        for (c, label) in panel.col_labels.iter().enumerate() {
            text(
                &mut body,
                ox + label_w + (c as f64 + 0.5) * cell,
                top - 4.0,
                10.0,
                "middle",
                label,
            );
        }
        for r in 0..panel.rows {
            if let Some(label) = panel.row_labels.get(r) {
                text(
                    &mut body,
                    ox + label_w - 6.0,
                    top + (r as f64 + 0.5) * cell + 4.0,
                    10.0,
                    "end",
                    label,
                );
            }
            for c in 0..panel.cols {
                let v = panel.values[r * panel.cols + c];
                let _ = writeln!(
                    body,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{cell}\" height=\"{cell}\" fill=\"{}\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"><title>{v:.6}</title></rect>",
                    ox + label_w + c as f64 * cell,
                    top + r as f64 * cell,
                    gray(v)
                );
            }
        }
    }
    document(width, height, &body)
}
