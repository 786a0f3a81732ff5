//! Self-rendered SVG charts, no plotting dependency. Styling is
//! incidental; the data are authoritative and every mark embeds its values
//! as `data-*` attributes so charts can be checked mechanically.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::yield_engine::YieldReport;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn series_key(r: &YieldReport) -> (u32, u32) {
    (r.distance, r.num_spares)
}

fn point_attrs(r: &YieldReport) -> String {
    format!(
        "data-distance=\"{}\" data-logical=\"{}\" data-spares=\"{}\" data-error-rate=\"{:.6}\" data-yield=\"{:.2}\" data-analytic=\"{:.2}\"",
        r.distance, r.num_logical, r.num_spares, r.error_rate, r.yield_mean_pct, r.analytic_pct
    )
}

/// Picks a chart for the sweep shape: one error rate gives a line chart of
/// yield vs size (one series per distance/spares pair), several rates give
/// stacked heatmap panels.
pub fn render_chart(rows: &[YieldReport]) -> String {
    let mut rates: Vec<f64> = rows.iter().map(|r| r.error_rate).collect();
    rates.sort_by(f64::total_cmp);
    rates.dedup();
    if rates.len() <= 1 {
        line_chart(rows)
    } else {
        heatmap(rows)
    }
}

/// Yield (%) against logical-qubit count, one polyline per (distance,
/// spares) series, log₂-spaced x positions.
pub fn line_chart(rows: &[YieldReport]) -> String {
    let width = 800.0;
    let height = 500.0;
    let (left, right, top, bottom) = (70.0, 180.0, 30.0, 60.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;

    let mut sizes: Vec<u32> = rows.iter().map(|r| r.num_logical).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let x_of = |n: u32| {
        let idx = sizes.iter().position(|&s| s == n).unwrap() as f64;
        let span = (sizes.len().max(2) - 1) as f64;
        left + plot_w * idx / span
    };
    let y_of = |pct: f64| top + plot_h * (1.0 - pct / 100.0);

    let mut series: BTreeMap<(u32, u32), Vec<&YieldReport>> = BTreeMap::new();
    for r in rows {
        series.entry(series_key(r)).or_default().push(r);
    }

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>"
    );

    // Axes and gridlines.
    for tick in (0..=10).map(|t| t as f64 * 10.0) {
        let y = y_of(tick);
        let _ = writeln!(
            svg,
            "<line x1=\"{left}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>",
            left + plot_w
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{tick:.0}</text>",
            left - 6.0,
            y + 4.0
        );
    }
    for &n in &sizes {
        let x = x_of(n);
        let _ = writeln!(
            svg,
            "<text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{n}</text>",
            top + plot_h + 16.0
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">number of logical qubits</text>",
        left + plot_w / 2.0,
        height - 18.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"18\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">yield (%)</text>",
        top + plot_h / 2.0,
        top + plot_h / 2.0
    );

    for (i, ((d, x), points)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = points.clone();
        points.sort_by_key(|r| r.num_logical);
        let path: Vec<String> = points
            .iter()
            .map(|r| format!("{:.1},{:.1}", x_of(r.num_logical), y_of(r.yield_mean_pct)))
            .collect();
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            path.join(" ")
        );
        for r in &points {
            let _ = writeln!(
                svg,
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{color}\" {}/>",
                x_of(r.num_logical),
                y_of(r.yield_mean_pct),
                point_attrs(r)
            );
        }
        let ly = top + 14.0 * i as f64;
        let _ = writeln!(
            svg,
            "<rect x=\"{:.1}\" y=\"{ly:.1}\" width=\"10\" height=\"10\" fill=\"{color}\"/>",
            left + plot_w + 12.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\">d={d}, spares={x}</text>",
            left + plot_w + 26.0,
            ly + 9.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Four-stop indigo-to-yellow ramp over yield 0..100%.
fn colormap(pct: f64) -> String {
    const STOPS: [(f64, [f64; 3]); 4] = [
        (0.0, [63.0, 0.0, 125.0]),
        (0.35, [49.0, 54.0, 149.0]),
        (0.70, [26.0, 152.0, 80.0]),
        (1.0, [255.0, 235.0, 59.0]),
    ];
    let t = (pct / 100.0).clamp(0.0, 1.0);
    let mut rgb = STOPS[STOPS.len() - 1].1;
    for w in STOPS.windows(2) {
        let (t0, c0) = w[0];
        let (t1, c1) = w[1];
        if t <= t1 {
            let u = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
            rgb = [
                c0[0] + (c1[0] - c0[0]) * u,
                c0[1] + (c1[1] - c0[1]) * u,
                c0[2] + (c1[2] - c0[2]) * u,
            ];
            break;
        }
    }
    format!(
        "rgb({},{},{})",
        rgb[0].round() as u8,
        rgb[1].round() as u8,
        rgb[2].round() as u8
    )
}

/// Size × error-rate yield grid, one panel per (distance, spares) series.
pub fn heatmap(rows: &[YieldReport]) -> String {
    let mut sizes: Vec<u32> = rows.iter().map(|r| r.num_logical).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut rates: Vec<f64> = rows.iter().map(|r| r.error_rate).collect();
    rates.sort_by(f64::total_cmp);
    rates.dedup();

    let mut series: BTreeMap<(u32, u32), Vec<&YieldReport>> = BTreeMap::new();
    for r in rows {
        series.entry(series_key(r)).or_default().push(r);
    }

    let cell = 48.0;
    let (left, top_margin) = (90.0, 40.0);
    let panel_w = cell * sizes.len() as f64;
    let panel_h = cell * rates.len() as f64;
    let panel_gap = 50.0;
    let width = left + panel_w + 120.0;
    let height = top_margin + (panel_h + panel_gap) * series.len() as f64;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>"
    );

    for (panel, ((d, x), points)) in series.iter().enumerate() {
        let oy = top_margin + (panel_h + panel_gap) * panel as f64;
        let _ = writeln!(
            svg,
            "<text x=\"{left}\" y=\"{:.1}\" font-size=\"13\">yield (%), d={d}, spares={x}</text>",
            oy - 8.0
        );
        for r in points {
            let col = sizes.iter().position(|&s| s == r.num_logical).unwrap() as f64;
            let row = rates.iter().position(|&p| p == r.error_rate).unwrap() as f64;
            let cx = left + col * cell;
            let cy = oy + row * cell;
            let _ = writeln!(
                svg,
                "<rect x=\"{cx:.1}\" y=\"{cy:.1}\" width=\"{cell}\" height=\"{cell}\" fill=\"{}\" {}/>",
                colormap(r.yield_mean_pct),
                point_attrs(r)
            );
            let bright = r.yield_mean_pct > 55.0;
            let _ = writeln!(
                svg,
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"middle\" fill=\"{}\">{:.1}</text>",
                cx + cell / 2.0,
                cy + cell / 2.0 + 3.0,
                if bright { "#222222" } else { "#eeeeee" },
                r.yield_mean_pct
            );
        }
        for (i, &n) in sizes.iter().enumerate() {
            let _ = writeln!(
                svg,
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{n}</text>",
                left + cell * (i as f64 + 0.5),
                oy + panel_h + 14.0
            );
        }
        for (i, &p) in rates.iter().enumerate() {
            let _ = writeln!(
                svg,
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{:.1}%</text>",
                left - 6.0,
                oy + cell * (i as f64 + 0.5) + 4.0,
                p * 100.0
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::yield_engine::{simulate_yield, ChipSpec};

    fn report(d: u32, n: u32, x: u32, p: f64) -> YieldReport {
        simulate_yield(&ChipSpec::new(n, x, d, p).unwrap(), 10, 2, 5).unwrap()
    }

    #[test]
    fn line_chart_embeds_data() {
        let rows = vec![report(3, 16, 0, 0.0), report(3, 32, 0, 0.0)];
        let svg = render_chart(&rows);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("data-logical=\"16\""));
        assert!(svg.contains("data-yield=\"100.00\""));
        assert!(svg.contains("<polyline"));
    }

    #[test]
    fn heatmap_for_multi_rate_grids() {
        let rows = vec![report(3, 16, 0, 0.0), report(3, 16, 0, 1.0)];
        let svg = render_chart(&rows);
        assert!(svg.contains("<rect"));
        assert!(svg.contains("data-error-rate=\"1.000000\""));
        assert!(svg.contains("data-yield=\"0.00\""));
    }

    #[test]
    fn colormap_endpoints() {
        assert_eq!(colormap(0.0), "rgb(63,0,125)");
        assert_eq!(colormap(100.0), "rgb(255,235,59)");
    }
}
