//! Log-log SVG plot of the distances in a CLT report.

use std::fmt::Write;

use willslab::cltlab::CltReport;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

struct Axes {
    x: (f64, f64),
    y: (f64, f64),
}

impl Axes {
    fn px(&self, lx: f64) -> f64 {
        LEFT + (lx - self.x.0) / (self.x.1 - self.x.0) * (W - LEFT - RIGHT)
    }

    fn py(&self, ly: f64) -> f64 {
        H - BOTTOM - (ly - self.y.0) / (self.y.1 - self.y.0) * (H - TOP - BOTTOM)
    }
}

pub fn clt_svg(report: &CltReport) -> String {
    let rows = &report.rows;
    let lx: Vec<f64> = rows.iter().map(|r| (r.d as f64).log10()).collect();
    let series: [(&str, &str, Vec<f64>); 3] = [
        ("KS", "#1f77b4", rows.iter().map(|r| r.ks).collect()),
        ("TV proxy", "#d62728", rows.iter().map(|r| r.tv_proxy).collect()),
        ("W1", "#2ca02c", rows.iter().map(|r| r.w1).collect()),
    ];
    let positive = series.iter().flat_map(|s| s.2.iter().copied()).filter(|v| *v > 0.0);
    let (lo, hi) = positive.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (1e-3, 1.0) };
    let xmin = lx.iter().copied().fold(f64::INFINITY, f64::min);
    let xmax = lx.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = if xmax > xmin { 0.05 * (xmax - xmin) } else { 0.5 };
    let axes = Axes {
        x: (xmin - pad, xmax + pad),
        y: (lo.log10().floor(), hi.log10().ceil().max(lo.log10().floor() + 1.0)),
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let title = match (report.alpha, report.c) {
        (Some(a), Some(c)) => format!("{} family, c = {c}, alpha = {a}", report.family),
        _ => format!("{} family", report.family),
    };
    let _ = writeln!(s, r#"<text x="{}" y="18" text-anchor="middle">{title}</text>"#, W / 2.0);
    let (x0, x1, y0, y1) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(s, r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y1 - y0);
    for e in axes.y.0 as i32..=axes.y.1 as i32 {
        let y = axes.py(e as f64);
        let _ = writeln!(s, r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#ddd"/>"##);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{e}</text>"#, x0 - 6.0, y + 4.0);
    }
    for r in rows {
        let x = axes.px((r.d as f64).log10());
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, y1 + 16.0, r.d);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">dimension d</text>"#, (x0 + x1) / 2.0, H - 10.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">distance to N(0,1)</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    // DKW band around the KS points
    for (r, x) in rows.iter().zip(&lx) {
        let top = (r.ks + r.ks_band).log10();
        let bottom = (r.ks - r.ks_band).max(10f64.powf(axes.y.0)).log10();
        let px = axes.px(*x);
        let _ = writeln!(
            s,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#1f77b4" stroke-opacity="0.4" stroke-width="6"/>"##,
            axes.py(top),
            axes.py(bottom)
        );
    }
    for (i, (name, color, ys)) in series.iter().enumerate() {
        for (x, y) in lx.iter().zip(ys) {
            if *y > 0.0 {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#, axes.px(*x), axes.py(y.log10()));
            }
        }
        let ly = y0 + 16.0 + 16.0 * i as f64;
        let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="4" fill="{color}"/>"#, x1 - 130.0, ly - 4.0);
        let _ = writeln!(s, r#"<text x="{}" y="{ly}">{name}</text>"#, x1 - 120.0);
    }
    if let Some(fit) = &report.ks_fit {
        let line = |x: f64| fit.intercept / std::f64::consts::LN_10 + fit.slope * x;
        let (a, b) = (lx[0], lx[lx.len() - 1]);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#1f77b4" stroke-dasharray="5,4"/>"##,
            axes.px(a),
            axes.py(line(a)),
            axes.px(b),
            axes.py(line(b))
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">KS slope {:.3} ± {:.3}</text>"#,
            x0 + 10.0,
            y1 - 10.0,
            fit.slope,
            fit.stderr
        );
    }
    s.push_str("</svg>\n");
    s
}
