//! Dependency-free SVG rendering for run and comparison figures.
//!
//! Charts are pure functions of the result data: fixed canvas sizes,
//! axes ranges derived from data extents, deterministic number
//! formatting — identical inputs render identical bytes. Long series
//! are stride-downsampled to keep files compact.

use crate::metrics::MetricsRecord;
use crate::scenario::RunResult;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#7f7f7f",
];
const MAX_POINTS: usize = 800;

/// One polyline on a chart.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.into(),
            points,
            dashed: false,
        }
    }

    pub fn dashed(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.into(),
            points,
            dashed: true,
        }
    }
}

/// Chart frame text and canvas size.
#[derive(Debug, Clone)]
pub struct ChartOpts {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: f64,
    pub height: f64,
}

impl ChartOpts {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        ChartOpts {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            width: 760.0,
            height: 420.0,
        }
    }

    pub fn sized(mut self, width: f64, height: f64) -> Self {
        self.width = width;
        self.height = height;
        self
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Compact, deterministic tick label.
fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.abs() >= 1e4 || v.abs() < 1e-3 {
        return format!("{v:.2e}");
    }
    let s = format!("{v:.3}");
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

struct Extent {
    lo: f64,
    hi: f64,
}

impl Extent {
    fn of(values: impl Iterator<Item = f64>) -> Extent {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Extent { lo: 0.0, hi: 1.0 };
        }
        Extent { lo, hi }
    }

    fn padded(mut self, frac: f64) -> Extent {
        let span = self.hi - self.lo;
        if span <= 0.0 {
            let pad = if self.lo == 0.0 { 1.0 } else { self.lo.abs() * 0.1 };
            self.lo -= pad;
            self.hi += pad;
        } else {
            self.lo -= span * frac;
            self.hi += span * frac;
        }
        self
    }

    fn map(&self, v: f64, out_lo: f64, out_hi: f64) -> f64 {
        out_lo + (v - self.lo) / (self.hi - self.lo) * (out_hi - out_lo)
    }
}

fn downsample(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if points.len() <= MAX_POINTS {
        return points.to_vec();
    }
    let stride = points.len().div_ceil(MAX_POINTS);
    let mut out: Vec<(f64, f64)> = points.iter().copied().step_by(stride).collect();
    if let Some(last) = points.last() {
        if out.last() != Some(last) {
            out.push(*last);
        }
    }
    out
}

/// Shared chart frame: background, plot border, ticks, axis labels,
/// title. Returns the SVG prefix and the plot-area pixel rectangle
/// (left, top, width, height).
fn frame(
    opts: &ChartOpts,
    x_ext: &Extent,
    y_ext: &Extent,
) -> (String, f64, f64, f64, f64) {
    let (ml, mr, mt, mb) = (58.0, 14.0, 30.0, 44.0);
    let pw = opts.width - ml - mr;
    let ph = opts.height - mt - mb;
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
viewBox=\"0 0 {w} {h}\" font-family=\"Helvetica,Arial,sans-serif\">\n",
        w = px(opts.width),
        h = px(opts.height)
    ));
    s.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
        px(opts.width),
        px(opts.height)
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"19\" font-size=\"13\" text-anchor=\"middle\" fill=\"#222222\">{}</text>\n",
        px(opts.width / 2.0),
        esc(&opts.title)
    ));
    s.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n",
        px(ml),
        px(mt),
        px(pw),
        px(ph)
    ));

    // Five ticks per axis.
    for i in 0..5 {
        let f = i as f64 / 4.0;
        let xv = x_ext.lo + f * (x_ext.hi - x_ext.lo);
        let xp = ml + f * pw;
        s.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{y1}\" x2=\"{x}\" y2=\"{y2}\" stroke=\"#444444\" stroke-width=\"1\"/>\n",
            x = px(xp),
            y1 = px(mt + ph),
            y2 = px(mt + ph + 4.0)
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\" fill=\"#222222\">{}</text>\n",
            px(xp),
            px(mt + ph + 16.0),
            fmt_tick(xv)
        ));

        let yv = y_ext.lo + f * (y_ext.hi - y_ext.lo);
        let yp = mt + ph - f * ph;
        s.push_str(&format!(
            "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"#444444\" stroke-width=\"1\"/>\n",
            x1 = px(ml - 4.0),
            x2 = px(ml),
            y = px(yp)
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\" fill=\"#222222\">{}</text>\n",
            px(ml - 7.0),
            px(yp + 3.5),
            fmt_tick(yv)
        ));
        // Light horizontal grid line.
        s.push_str(&format!(
            "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n",
            x1 = px(ml),
            x2 = px(ml + pw),
            y = px(yp)
        ));
    }

    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" fill=\"#222222\">{}</text>\n",
        px(ml + pw / 2.0),
        px(opts.height - 10.0),
        esc(&opts.x_label)
    ));
    s.push_str(&format!(
        "<text x=\"15\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" \
transform=\"rotate(-90 15 {})\" fill=\"#222222\">{}</text>\n",
        px(mt + ph / 2.0),
        px(mt + ph / 2.0),
        esc(&opts.y_label)
    ));
    (s, ml, mt, pw, ph)
}

/// Multi-series line chart.
pub fn line_chart(opts: &ChartOpts, series: &[Series]) -> String {
    let x_ext = Extent::of(
        series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0)),
    );
    let y_ext = Extent::of(
        series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1)),
    )
    .padded(0.06);

    let (mut svg, ml, mt, pw, ph) = frame(opts, &x_ext, &y_ext);
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = downsample(&ser.points)
            .iter()
            .map(|(x, y)| {
                format!(
                    "{},{}",
                    px(x_ext.map(*x, ml, ml + pw)),
                    px(y_ext.map(*y, mt + ph, mt))
                )
            })
            .collect();
        let dash = if ser.dashed {
            " stroke-dasharray=\"6 4\""
        } else {
            ""
        };
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"{}\"/>\n",
            color,
            dash,
            pts.join(" ")
        ));
    }
    // Legend (only for labeled series).
    let labeled: Vec<(usize, &Series)> = series
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.label.is_empty())
        .collect();
    if labeled.len() > 1 {
        for (row, (i, ser)) in labeled.iter().enumerate() {
            let y = mt + 14.0 + 15.0 * row as f64;
            let dash = if ser.dashed {
                " stroke-dasharray=\"6 4\""
            } else {
                ""
            };
            svg.push_str(&format!(
                "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"{c}\" stroke-width=\"1.5\"{dash}/>\n",
                x1 = px(ml + 8.0),
                x2 = px(ml + 30.0),
                y = px(y),
                c = PALETTE[i % PALETTE.len()],
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"10\" fill=\"#222222\">{}</text>\n",
                px(ml + 35.0),
                px(y + 3.5),
                esc(&ser.label)
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Vertical bar chart with value labels.
pub fn bar_chart(opts: &ChartOpts, bars: &[(String, f64)]) -> String {
    let raw = Extent::of(bars.iter().map(|b| b.1));
    let y_ext = Extent {
        lo: raw.lo.min(0.0),
        hi: raw.hi.max(0.0),
    }
    .padded(0.12);
    let x_ext = Extent {
        lo: 0.0,
        hi: bars.len().max(1) as f64,
    };

    let (mut svg, ml, mt, pw, ph) = frame(opts, &x_ext, &y_ext);
    let slot = pw / bars.len().max(1) as f64;
    let bw = slot * 0.55;
    let y0 = y_ext.map(0.0, mt + ph, mt);
    for (i, (label, value)) in bars.iter().enumerate() {
        let cx = ml + (i as f64 + 0.5) * slot;
        let yv = y_ext.map(*value, mt + ph, mt);
        let (top, height) = if *value >= 0.0 {
            (yv, y0 - yv)
        } else {
            (y0, yv - y0)
        };
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
            px(cx - bw / 2.0),
            px(top),
            px(bw),
            px(height.max(0.0)),
            PALETTE[i % PALETTE.len()]
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\" fill=\"#222222\">{}</text>\n",
            px(cx),
            px(top - 4.0),
            fmt_tick(*value)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\" fill=\"#222222\">{}</text>\n",
            px(cx),
            px(mt + ph + 30.0),
            esc(label)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Compose rendered panels into one figure, `cols` per row. Panels keep
/// their own sizes; they are laid out on a uniform grid of the largest
/// panel size.
pub fn panel_grid(title: &str, panels: &[(f64, f64, String)], cols: usize) -> String {
    let cols = cols.max(1);
    let rows = panels.len().div_ceil(cols);
    let cell_w = panels.iter().map(|p| p.0).fold(0.0, f64::max);
    let cell_h = panels.iter().map(|p| p.1).fold(0.0, f64::max);
    let title_h = if title.is_empty() { 0.0 } else { 26.0 };
    let total_w = cell_w * cols as f64;
    let total_h = cell_h * rows as f64 + title_h;

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
viewBox=\"0 0 {w} {h}\" font-family=\"Helvetica,Arial,sans-serif\">\n",
        w = px(total_w),
        h = px(total_h)
    );
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
        px(total_w),
        px(total_h)
    ));
    if !title.is_empty() {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"18\" font-size=\"14\" text-anchor=\"middle\" fill=\"#222222\">{}</text>\n",
            px(total_w / 2.0),
            esc(title)
        ));
    }
    for (i, (w, h, body)) in panels.iter().enumerate() {
        let col = i % cols;
        let row = i / cols;
        svg.push_str(&format!(
            "<svg x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\">\n",
            px(col as f64 * cell_w),
            px(row as f64 * cell_h + title_h),
            px(*w),
            px(*h)
        ));
        // Strip the nested document's own outer tags; reuse its body.
        let inner = body
            .trim_start()
            .trim_start_matches(|c| c != '\n')
            .trim_end()
            .trim_end_matches("</svg>");
        svg.push_str(inner.trim_end());
        svg.push_str("\n</svg>\n");
    }
    svg.push_str("</svg>\n");
    svg
}

// ---------------------------------------------------------------------------
// Standard figures
// ---------------------------------------------------------------------------

fn freq_series(result: &RunResult, label: &str, dashed: bool) -> Series {
    let pts = result.samples.iter().map(|s| (s.t_s, s.f_hz)).collect();
    if dashed {
        Series::dashed(label, pts)
    } else {
        Series::new(label, pts)
    }
}

/// Frequency trace for one run (with the nominal line for reference).
pub fn frequency_figure(result: &RunResult) -> String {
    let nominal = vec![
        (result.samples.first().map_or(0.0, |s| s.t_s), result.nominal_freq_hz),
        (result.samples.last().map_or(1.0, |s| s.t_s), result.nominal_freq_hz),
    ];
    line_chart(
        &ChartOpts::new("System frequency", "time [s]", "frequency [Hz]"),
        &[
            freq_series(result, "f COI", false),
            Series::dashed("nominal", nominal),
        ],
    )
}

/// Per-channel FFR power traces for one run.
pub fn power_figure(result: &RunResult) -> String {
    let pick = |f: fn(&crate::scenario::SampleRow) -> f64| -> Vec<(f64, f64)> {
        result.samples.iter().map(|s| (s.t_s, f(s))).collect()
    };
    line_chart(
        &ChartOpts::new("FFR power by channel", "time [s]", "power [MW]"),
        &[
            Series::new("EV fleet", pick(|s| s.p_ev_mw)),
            Series::new("UPS", pick(|s| s.p_ups_mw)),
            Series::new("IT workload", pick(|s| s.p_it_mw)),
            Series::new("BESS", pick(|s| s.p_bess_mw)),
            Series::dashed("total", pick(|s| s.p_ffr_total_mw)),
        ],
    )
}

/// Participation-weight traces for one run.
pub fn weights_figure(result: &RunResult) -> String {
    let pick = |f: fn(&crate::scenario::SampleRow) -> f64| -> Vec<(f64, f64)> {
        result.samples.iter().map(|s| (s.t_s, f(s))).collect()
    };
    line_chart(
        &ChartOpts::new("Participation weights", "time [s]", "weight [-]"),
        &[
            Series::new("alpha EV", pick(|s| s.alpha_ev)),
            Series::new("alpha DC", pick(|s| s.alpha_dc)),
            Series::new("alpha BESS", pick(|s| s.alpha_bess)),
        ],
    )
}

/// Four single-metric panels for one run.
pub fn metrics_figure(metrics: &MetricsRecord) -> String {
    let half = ChartOpts::new("", "", "").sized(380.0, 260.0);
    let panel = |title: &str, y: &str, label: &str, value: f64| {
        let mut o = half.clone();
        o.title = title.into();
        o.y_label = y.into();
        (o.width, o.height, bar_chart(&o, &[(label.into(), value)]))
    };
    let recovery = metrics.recovery_time_s;
    let panels = vec![
        panel("Nadir", "frequency [Hz]", "nadir", metrics.nadir_hz),
        panel(
            "RoCoF magnitude",
            "[Hz/s]",
            "|rocof|",
            metrics.rocof_hz_per_s.abs(),
        ),
        panel(
            "Recovery time",
            "[s]",
            if recovery.is_some() { "recovery" } else { "not recovered" },
            recovery.unwrap_or(0.0),
        ),
        panel("FFR energy", "[MWh]", "energy", metrics.ffr_energy_mwh),
    ];
    panel_grid("Run metrics", &panels, 2)
}

/// The standard per-run figure set, as (file name, svg body) pairs.
pub fn run_figures(result: &RunResult, metrics: &MetricsRecord) -> Vec<(String, String)> {
    vec![
        ("frequency.svg".to_string(), frequency_figure(result)),
        ("power.svg".to_string(), power_figure(result)),
        ("weights.svg".to_string(), weights_figure(result)),
        ("metrics.svg".to_string(), metrics_figure(metrics)),
    ]
}

/// Strategy comparison: one frequency panel per strategy's case-4 run,
/// each against the unassisted case-1 baseline.
pub fn strategy_frequency_figure(
    runs: &[(String, &RunResult)],
    baseline: Option<&RunResult>,
) -> String {
    let panels: Vec<(f64, f64, String)> = runs
        .iter()
        .map(|(label, run)| {
            let mut series = vec![freq_series(run, label, false)];
            if let Some(b) = baseline {
                series.push(freq_series(b, "no FFR", true));
            }
            let opts = ChartOpts::new(label, "time [s]", "frequency [Hz]").sized(420.0, 300.0);
            (opts.width, opts.height, line_chart(&opts, &series))
        })
        .collect();
    panel_grid("Frequency response by coordination strategy", &panels, 2)
}

/// Strategy comparison: one panel per metric, one bar per strategy.
pub fn strategy_metrics_figure(cells: &[(String, MetricsRecord)]) -> String {
    let size = (420.0, 300.0);
    let mk = |title: &str, y: &str, pickv: &dyn Fn(&MetricsRecord) -> f64| {
        let bars: Vec<(String, f64)> = cells
            .iter()
            .map(|(label, m)| (label.clone(), pickv(m)))
            .collect();
        let opts = ChartOpts::new(title, "", y).sized(size.0, size.1);
        (size.0, size.1, bar_chart(&opts, &bars))
    };
    let panels = vec![
        mk("Nadir", "frequency [Hz]", &|m| m.nadir_hz),
        mk("RoCoF magnitude", "[Hz/s]", &|m| m.rocof_hz_per_s.abs()),
        mk("Recovery time", "[s]", &|m| {
            m.recovery_time_s.unwrap_or(0.0)
        }),
        mk("FFR energy", "[MWh]", &|m| m.ffr_energy_mwh),
    ];
    panel_grid("Case-4 metrics by coordination strategy", &panels, 2)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coordinator::StrategyKind;
    use crate::metrics::MaxPower;
    use crate::scenario::SampleRow;

    fn flat_run() -> RunResult {
        RunResult {
            case_id: 1,
            strategy: StrategyKind::Adaptive,
            nominal_freq_hz: 60.0,
            disturbance_time_s: 5.0,
            samples: (0..2001)
                .map(|i| SampleRow {
                    t_s: i as f64 * 0.01,
                    f_hz: 60.0,
                    p_ev_mw: 0.0,
                    p_ups_mw: 0.0,
                    p_it_mw: 0.0,
                    p_bess_mw: 0.0,
                    p_ffr_total_mw: 0.0,
                    alpha_ev: 0.3,
                    alpha_dc: 0.25,
                    alpha_bess: 0.45,
                    soc_ev: 0.6,
                    soc_bess: 0.5,
                })
                .collect(),
        }
    }

    fn sample_metrics() -> MetricsRecord {
        MetricsRecord {
            nadir_hz: 59.45,
            rocof_hz_per_s: -0.31,
            recovery_time_s: Some(6.1),
            max_power_mw: MaxPower {
                ev: 8.0,
                dc: 7.0,
                bess: 22.0,
            },
            ffr_energy_mwh: 0.41,
        }
    }

    fn assert_wellformed(svg: &str) {
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        // Every opened svg element is closed.
        assert_eq!(svg.matches("<svg").count(), svg.matches("</svg>").count());
    }

    #[test]
    fn flat_series_renders_horizontal_line() {
        let svg = frequency_figure(&flat_run());
        assert_wellformed(&svg);
        assert!(svg.contains("<polyline"));
        // All trace points of a constant series share one y pixel: take
        // the first polyline and check its y coordinates are identical.
        let poly = svg
            .split("points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap();
        let ys: Vec<&str> = poly
            .split_whitespace()
            .map(|p| p.split(',').nth(1).unwrap())
            .collect();
        assert!(ys.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn long_series_are_downsampled() {
        let svg = frequency_figure(&flat_run());
        let poly = svg
            .split("points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap();
        let n = poly.split_whitespace().count();
        assert!(n <= MAX_POINTS + 1, "polyline has {n} points");
        assert!(n > 100);
    }

    #[test]
    fn run_figures_have_contracted_names() {
        let figs = run_figures(&flat_run(), &sample_metrics());
        let names: Vec<&str> = figs.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(
            names,
            vec!["frequency.svg", "power.svg", "weights.svg", "metrics.svg"]
        );
        for (_, svg) in &figs {
            assert_wellformed(svg);
        }
    }

    #[test]
    fn power_figure_draws_all_channels() {
        let svg = power_figure(&flat_run());
        assert_eq!(svg.matches("<polyline").count(), 5);
        for label in ["EV fleet", "UPS", "IT workload", "BESS", "total"] {
            assert!(svg.contains(label), "missing legend entry {label}");
        }
    }

    #[test]
    fn bar_chart_draws_one_rect_per_bar() {
        let opts = ChartOpts::new("t", "x", "y");
        let bars = vec![
            ("a".to_string(), 1.0),
            ("b".to_string(), 2.0),
            ("c".to_string(), 0.5),
        ];
        let svg = bar_chart(&opts, &bars);
        assert_wellformed(&svg);
        // Background + frame + 3 bars.
        assert_eq!(svg.matches("<rect").count(), 5);
    }

    #[test]
    fn strategy_panels_compose_into_grids() {
        let run = flat_run();
        let runs = vec![
            ("adaptive".to_string(), &run),
            ("bess_dominant".to_string(), &run),
            ("dc_dominant".to_string(), &run),
            ("ev_dominant".to_string(), &run),
        ];
        let fig = strategy_frequency_figure(&runs, Some(&run));
        assert_wellformed(&fig);
        assert_eq!(fig.matches("<svg").count(), 5); // outer + 4 panels

        let cells: Vec<(String, MetricsRecord)> = runs
            .iter()
            .map(|(l, _)| (l.clone(), sample_metrics()))
            .collect();
        let fig8 = strategy_metrics_figure(&cells);
        assert_wellformed(&fig8);
        assert_eq!(fig8.matches("<svg").count(), 5);
    }

    #[test]
    fn tick_labels_are_compact_and_stable() {
        assert_eq!(fmt_tick(0.0), "0");
        assert_eq!(fmt_tick(60.0), "60");
        assert_eq!(fmt_tick(59.45), "59.45");
        assert_eq!(fmt_tick(-0.58), "-0.58");
        assert_eq!(fmt_tick(12345.0), "1.23e4");
        assert_eq!(fmt_tick(0.0001), "1.00e-4");
    }

    #[test]
    fn deterministic_rendering() {
        let a = frequency_figure(&flat_run());
        let b = frequency_figure(&flat_run());
        assert_eq!(a, b);
    }
}
