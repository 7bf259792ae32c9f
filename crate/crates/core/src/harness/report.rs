//! Aggregation of run records and self-contained SVG line plots with
//! interquartile bands.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use statrs::statistics::{Data, OrderStatistics, Statistics};

use super::records::format_float;
use super::run::RunRecord;
use crate::encoding::MethodTag;
use crate::error::{Error, Result};

pub const METRICS: [&str; 8] = [
    "nfev",
    "wall_time_ms",
    "p_best",
    "feasibility_ratio",
    "avg_performance",
    "n_qubits",
    "n_ancilla",
    "two_qubit_gates_per_layer",
];

fn metric_value(r: &RunRecord, metric: &str) -> Option<f64> {
    Some(match metric {
        "nfev" => r.nfev as f64,
        "wall_time_ms" => r.wall_time_ms,
        "p_best" => r.p_best,
        "feasibility_ratio" => r.feasibility_ratio,
        "avg_performance" => return r.avg_performance,
        "n_qubits" => r.n_qubits as f64,
        "n_ancilla" => r.n_ancilla as f64,
        "two_qubit_gates_per_layer" => r.two_qubit_gates_per_layer as f64,
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub method: MethodTag,
    pub m: usize,
    pub p: usize,
    pub metric: &'static str,
    /// Records contributing (missing values excluded).
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single sample.
    pub std: f64,
    pub q25: f64,
    pub q75: f64,
}

/// Summary statistics per (method, m, p, metric), sorted by that key.
pub fn aggregate(records: &[RunRecord]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(MethodTag, usize, usize), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.method, r.m, r.p)).or_default().push(r);
    }
    let mut rows = Vec::new();
    for ((method, m, p), group) in groups {
        for metric in METRICS {
            let values: Vec<f64> = group.iter().filter_map(|r| metric_value(r, metric)).collect();
            if values.is_empty() {
                continue;
            }
            let n = values.len();
            let mean = values.iter().mean();
            let std = if n > 1 { values.iter().std_dev() } else { 0.0 };
            let mut data = Data::new(values);
            rows.push(AggregateRow {
                method,
                m,
                p,
                metric,
                n,
                mean,
                std,
                q25: data.lower_quartile(),
                q75: data.upper_quartile(),
            });
        }
    }
    rows
}

pub fn write_aggregate(rows: &[AggregateRow], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["method", "m", "p", "metric", "n", "mean", "std", "q25", "q75"])?;
    for r in rows {
        w.write_record([
            r.method.to_string(),
            r.m.to_string(),
            r.p.to_string(),
            r.metric.to_string(),
            r.n.to_string(),
            format_float(r.mean),
            format_float(r.std),
            format_float(r.q25),
            format_float(r.q75),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy)]
enum Axis {
    Size,
    Layers,
}

struct Panel {
    file: &'static str,
    title: &'static str,
    metric: &'static str,
    axis: Axis,
    log_y: bool,
}

const PANELS: [Panel; 11] = [
    Panel { file: "fig2a_two_qubit_gates.svg", title: "No. two-qubit gates per layer", metric: "two_qubit_gates_per_layer", axis: Axis::Size, log_y: false },
    Panel { file: "fig2b_ancilla.svg", title: "No. ancilla qubits", metric: "n_ancilla", axis: Axis::Size, log_y: false },
    Panel { file: "fig2c_nfev.svg", title: "No. optimization iterations", metric: "nfev", axis: Axis::Size, log_y: true },
    Panel { file: "fig2d_runtime.svg", title: "Average simulation runtime (ms)", metric: "wall_time_ms", axis: Axis::Size, log_y: true },
    Panel { file: "fig3a_p_best.svg", title: "Prob. of best feasible solution", metric: "p_best", axis: Axis::Size, log_y: false },
    Panel { file: "fig3b_feasibility.svg", title: "Feasibility ratio", metric: "feasibility_ratio", axis: Axis::Size, log_y: false },
    Panel { file: "fig3c_avg_performance.svg", title: "Average performance", metric: "avg_performance", axis: Axis::Size, log_y: false },
    Panel { file: "fig4a_p_best.svg", title: "Prob. of best solution", metric: "p_best", axis: Axis::Layers, log_y: false },
    Panel { file: "fig4b_feasibility.svg", title: "Feasibility ratio", metric: "feasibility_ratio", axis: Axis::Layers, log_y: false },
    Panel { file: "fig4c_avg_performance.svg", title: "Average performance", metric: "avg_performance", axis: Axis::Layers, log_y: false },
    Panel { file: "fig4d_nfev.svg", title: "No. optimization iterations", metric: "nfev", axis: Axis::Layers, log_y: true },
];

fn color(method: MethodTag) -> &'static str {
    match method {
        MethodTag::Qubo => "#1f77b4",
        MethodTag::Dephasing => "#d62728",
        MethodTag::Zeno => "#2ca02c",
    }
}

/// `(x, mean, q25, q75)` points of one method's line.
type Series = Vec<(f64, f64, f64, f64)>;

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|k| k * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let start = (lo / step).ceil() as i64;
    let end = (hi / step).floor() as i64;
    (start..=end).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Renders one panel: a mean line plus shaded 25–75% band per method.
pub fn render_panel(title: &str, x_label: &str, series: &[(MethodTag, Series)], log_y: bool) -> String {
    let (w, h) = (480.0, 360.0);
    let (left, right, top, bottom) = (70.0, 20.0, 40.0, 50.0);
    let (pw, ph) = (w - left - right, h - top - bottom);

    let xs: Vec<f64> = series.iter().flat_map(|(_, s)| s.iter().map(|p| p.0)).collect();
    let ys: Vec<f64> = series
        .iter()
        .flat_map(|(_, s)| s.iter().flat_map(|p| [p.1, p.2, p.3]))
        .filter(|y| y.is_finite() && (!log_y || *y > 0.0))
        .collect();
    let (mut x0, mut x1) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 == x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let tf = |y: f64| if log_y { y.max(f64::MIN_POSITIVE).log10() } else { y };
    let (mut y0, mut y1) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(tf(y)), b.max(tf(y))));
    if !y0.is_finite() {
        (y0, y1) = (0.0, 1.0);
    }
    if log_y {
        (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    } else {
        let pad = ((y1 - y0) * 0.08).max(if y1 == y0 { 0.5 } else { 0.0 });
        (y0, y1) = (y0 - pad, y1 + pad);
    }
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + ph - (tf(y) - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(s, r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);

    let x_ticks: Vec<f64> = {
        let mut t: Vec<f64> = xs.clone();
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    };
    for x in x_ticks {
        let px = sx(x);
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="black"/>"#, top + ph, top + ph + 5.0);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#, top + ph + 18.0, tick_label(x));
    }
    let y_ticks: Vec<f64> = if log_y {
        (y0 as i64..=y1 as i64).map(|e| 10f64.powi(e as i32)).collect()
    } else {
        nice_ticks(y0, y1)
    };
    for y in y_ticks {
        let py = sy(y);
        let _ = writeln!(s, r##"<line x1="{left}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="#dddddd"/>"##, left + pw);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, left - 6.0, py + 4.0, tick_label(y));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, left + pw / 2.0, h - 12.0, escape(x_label));

    for (i, (method, pts)) in series.iter().enumerate() {
        let c = color(*method);
        let visible: Vec<_> = pts.iter().filter(|p| p.1.is_finite()).collect();
        if visible.is_empty() {
            continue;
        }
        let band: Vec<String> = visible
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.3)))
            .chain(visible.iter().rev().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.2))))
            .collect();
        let _ = writeln!(s, r#"<polygon points="{}" fill="{c}" fill-opacity="0.2" stroke="none"/>"#, band.join(" "));
        let line: Vec<String> = visible.iter().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#, line.join(" "));
        for p in &visible {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}"/>"#, sx(p.0), sy(p.1));
        }
        let ly = top + 14.0 + 16.0 * i as f64;
        let _ = writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{c}" stroke-width="2"/>"#, left + 10.0, left + 30.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, left + 36.0, ly + 4.0, method);
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `aggregate.csv` and one SVG per figure panel into `dir`.
///
/// Size panels use `p = 5` when present (otherwise the largest `p`); layer
/// panels use `m = 5` when present (otherwise the largest `m`).
pub fn emit_report(records: &[RunRecord], dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::Validation("cannot report on zero records".into()));
    }
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let rows = aggregate(records);
    let mut written = vec![dir.join("aggregate.csv")];
    write_aggregate(&rows, &written[0])?;

    let pick = |values: Vec<usize>| if values.contains(&5) { 5 } else { values.into_iter().max().unwrap_or(0) };
    let p_ref = pick(records.iter().map(|r| r.p).collect());
    let m_ref = pick(records.iter().map(|r| r.m).collect());

    for panel in &PANELS {
        let mut by_method: BTreeMap<MethodTag, Series> = BTreeMap::new();
        for r in rows.iter().filter(|r| r.metric == panel.metric) {
            let x = match panel.axis {
                Axis::Size if r.p == p_ref => r.m,
                Axis::Layers if r.m == m_ref => r.p,
                _ => continue,
            };
            by_method.entry(r.method).or_default().push((x as f64, r.mean, r.q25, r.q75));
        }
        let series: Vec<(MethodTag, Series)> = by_method.into_iter().collect();
        let (x_label, fixed) = match panel.axis {
            Axis::Size => ("Problem size m", format!("p = {p_ref}")),
            Axis::Layers => ("Layers p", format!("m = {m_ref}")),
        };
        let title = format!("{} ({fixed})", panel.title);
        let path = dir.join(panel.file);
        std::fs::write(&path, render_panel(&title, x_label, &series, panel.log_y))?;
        written.push(path);
    }
    Ok(written)
}
