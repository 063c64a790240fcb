//! Static SVG figures rendered from report files. Plots are derived
//! artifacts: they read the CSV tables and never feed back into anything.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::harness::report::parse_csv;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 42.0;
const MARGIN_B: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Symmetric vertical error bars, one entry per point.
    pub y_err: Option<Vec<f64>>,
    pub markers: bool,
}

impl Series {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, y_err: None, markers: false }
    }

    pub fn with_markers(mut self) -> Self {
        self.markers = true;
        self
    }

    pub fn with_errors(mut self, err: Vec<f64>) -> Self {
        self.y_err = Some(err);
        self
    }

    fn finite_points(&self) -> Vec<(f64, f64, f64)> {
        let errs = self.y_err.as_deref();
        self.points
            .iter()
            .enumerate()
            .filter_map(|(i, &(x, y))| {
                let e = errs.map_or(0.0, |v| v.get(i).copied().unwrap_or(0.0));
                let e = if e.is_finite() { e } else { 0.0 };
                (x.is_finite() && y.is_finite()).then_some((x, y, e))
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    series: Vec<Series>,
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn map(&self, v: f64, pix_lo: f64, pix_hi: f64) -> f64 {
        let (v, lo, hi) = if self.log {
            (v.log10(), self.lo.log10(), self.hi.log10())
        } else {
            (v, self.lo, self.hi)
        };
        pix_lo + (v - lo) / (hi - lo) * (pix_hi - pix_lo)
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let first = self.lo.log10().floor() as i32;
            let last = self.hi.log10().ceil() as i32;
            (first..=last)
                .map(|d| 10f64.powi(d))
                .filter(|v| *v >= self.lo * 0.999 && *v <= self.hi * 1.001)
                .collect()
        } else {
            let span = self.hi - self.lo;
            let raw = span / 5.0;
            let mag = 10f64.powf(raw.log10().floor());
            let norm = raw / mag;
            let step = mag
                * if norm <= 1.0 {
                    1.0
                } else if norm <= 2.0 {
                    2.0
                } else if norm <= 5.0 {
                    5.0
                } else {
                    10.0
                };
            let mut v = (self.lo / step).ceil() * step;
            let mut out = Vec::new();
            while v <= self.hi + 1e-9 * span {
                out.push(v);
                v += step;
            }
            out
        }
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if a >= 1e4 || a < 1e-3 {
        format!("{v:.1e}")
    } else {
        // trim float dust without losing the value's shape
        let s = format!("{:.6}", v);
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Figure {
    pub fn new(
        title: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
    ) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_x: false,
            log_y: false,
            series: Vec::new(),
        }
    }

    pub fn log_log(mut self) -> Self {
        self.log_x = true;
        self.log_y = true;
        self
    }

    pub fn push(&mut self, series: Series) {
        self.series.push(series);
    }

    fn axes(&self) -> (Axis, Axis) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for s in &self.series {
            for (x, y, e) in s.finite_points() {
                if self.log_x && x <= 0.0 || self.log_y && y <= 0.0 {
                    continue;
                }
                xs.push(x);
                ys.push(y - e);
                ys.push(y + e);
            }
        }
        let range = |v: &[f64], log: bool| -> (f64, f64) {
            let (mut lo, mut hi) = v
                .iter()
                .filter(|x| !log || **x > 0.0)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                    (lo.min(x), hi.max(x))
                });
            if !lo.is_finite() || !hi.is_finite() {
                return if log { (0.1, 10.0) } else { (0.0, 1.0) };
            }
            if log {
                lo /= 1.5;
                hi *= 1.5;
            } else {
                let pad = 0.05 * (hi - lo).max(hi.abs().max(1e-12) * 0.1);
                lo -= pad;
                hi += pad;
            }
            (lo, hi)
        };
        let (xlo, xhi) = range(&xs, self.log_x);
        let (ylo, yhi) = range(&ys, self.log_y);
        (
            Axis { lo: xlo, hi: xhi, log: self.log_x },
            Axis { lo: ylo, hi: yhi, log: self.log_y },
        )
    }

    pub fn to_svg(&self) -> String {
        let (ax, ay) = self.axes();
        let px = |x: f64| ax.map(x, MARGIN_L, WIDTH - MARGIN_R);
        let py = |y: f64| ay.map(y, HEIGHT - MARGIN_B, MARGIN_T);
        let mut svg = String::new();
        let _ = write!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
             font-family=\"Helvetica,Arial,sans-serif\" font-size=\"13\">\n\
             <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
        );
        // grid and ticks
        for t in ax.ticks() {
            let x = px(t);
            let _ = write!(
                svg,
                "<line x1=\"{x:.1}\" y1=\"{}\" x2=\"{x:.1}\" y2=\"{}\" stroke=\"#e0e0e0\"/>\n\
                 <text x=\"{x:.1}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                MARGIN_T,
                HEIGHT - MARGIN_B,
                HEIGHT - MARGIN_B + 18.0,
                tick_label(t)
            );
        }
        for t in ay.ticks() {
            let y = py(t);
            let _ = write!(
                svg,
                "<line x1=\"{}\" y1=\"{y:.1}\" x2=\"{}\" y2=\"{y:.1}\" stroke=\"#e0e0e0\"/>\n\
                 <text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
                MARGIN_L,
                WIDTH - MARGIN_R,
                MARGIN_L - 8.0,
                y + 4.0,
                tick_label(t)
            );
        }
        // frame
        let _ = write!(
            svg,
            "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{:.1}\" height=\"{:.1}\" \
             fill=\"none\" stroke=\"black\"/>\n",
            WIDTH - MARGIN_L - MARGIN_R,
            HEIGHT - MARGIN_T - MARGIN_B
        );
        // series
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts = s.finite_points();
            let usable: Vec<&(f64, f64, f64)> = pts
                .iter()
                .filter(|(x, y, _)| !(self.log_x && *x <= 0.0 || self.log_y && *y <= 0.0))
                .collect();
            if usable.is_empty() {
                continue;
            }
            let path: Vec<String> = usable
                .iter()
                .map(|(x, y, _)| format!("{:.2},{:.2}", px(*x), py(*y)))
                .collect();
            let _ = write!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
                path.join(" ")
            );
            for (x, y, e) in &usable {
                if *e > 0.0 {
                    let (x0, y0, y1) = (px(*x), py(y - e), py(y + e));
                    let _ = write!(
                        svg,
                        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\" stroke=\"{color}\"/>\n\
                         <line x1=\"{:.2}\" y1=\"{y0:.2}\" x2=\"{:.2}\" y2=\"{y0:.2}\" stroke=\"{color}\"/>\n\
                         <line x1=\"{:.2}\" y1=\"{y1:.2}\" x2=\"{:.2}\" y2=\"{y1:.2}\" stroke=\"{color}\"/>\n",
                        x0 - 4.0, x0 + 4.0, x0 - 4.0, x0 + 4.0
                    );
                }
                if s.markers {
                    let _ = write!(
                        svg,
                        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                        px(*x),
                        py(*y)
                    );
                }
            }
        }
        // legend
        let mut ly = MARGIN_T + 14.0;
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let lx = WIDTH - MARGIN_R - 170.0;
            let _ = write!(
                svg,
                "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
                 <text x=\"{}\" y=\"{}\">{}</text>\n",
                lx + 24.0,
                lx + 30.0,
                ly + 4.0,
                escape(&s.label)
            );
            ly += 18.0;
        }
        // labels
        let _ = write!(
            svg,
            "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n\
             <text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{}</text>\n\
             </svg>\n",
            WIDTH / 2.0,
            escape(&self.title),
            (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label),
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            escape(&self.y_label)
        );
        svg
    }

    pub fn save_svg(&self, path: impl AsRef<Path>) -> Result<PathBuf> {
        let path = path.as_ref().to_path_buf();
        std::fs::write(&path, self.to_svg())?;
        Ok(path)
    }
}

/// Render every figure whose source table exists in `dir`. Returns the
/// figure paths written. Tables that exist but lack expected columns fail
/// with a format error; absent tables are skipped.
pub fn render_reports(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut written = Vec::new();

    let compare = dir.join("compare.csv");
    if compare.exists() {
        let table = parse_csv(&compare)?;
        let n: Vec<f64> = table.f64_column("n_agents")?;

        let mut tau_fig = Figure::new("First passage vs agent count", "agents N", "mean tau");
        for (mean_col, std_col, label) in [
            ("mean_tau_abm", "std_tau_abm", "agent model"),
            ("mean_tau_spde", "std_tau_spde", "field model"),
        ] {
            let mean = table.f64_column(mean_col)?;
            let std = table.f64_column(std_col)?;
            tau_fig.push(
                Series::line(label, n.iter().copied().zip(mean).collect())
                    .with_markers()
                    .with_errors(std),
            );
        }
        written.push(tau_fig.save_svg(dir.join("tau_vs_n.svg"))?);

        let mut err_fig = Figure::new("Model disagreement vs agent count", "agents N", "relative l2 error");
        for col in table.columns.iter().filter(|c| c.starts_with("e_mean_") || c.starts_with("e_std_")) {
            let vals = table.f64_column(col)?;
            err_fig.push(Series::line(col.clone(), n.iter().copied().zip(vals).collect()).with_markers());
        }
        written.push(err_fig.save_svg(dir.join("errors_vs_n.svg"))?);
    }

    let bench = dir.join("bench.csv");
    if bench.exists() {
        let table = parse_csv(&bench)?;
        let models = table.str_column("model")?;
        let n = table.f64_column("n_agents")?;
        let secs = table.f64_column("seconds_per_step")?;
        let mut fig = Figure::new("Cost per step", "agents N", "seconds per step").log_log();
        for kind in ["abm", "spde"] {
            let pts: Vec<(f64, f64)> = models
                .iter()
                .zip(n.iter().zip(&secs))
                .filter(|(m, _)| **m == kind)
                .map(|(_, (&x, &y))| (x, y))
                .collect();
            if !pts.is_empty() {
                fig.push(Series::line(kind, pts).with_markers());
            }
        }
        written.push(fig.save_svg(dir.join("cost_vs_n.svg"))?);
    }

    // density snapshots: one overlay per matching table
    let mut density_files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("density_") && n.ends_with(".csv"))
        })
        .collect();
    density_files.sort();
    if !density_files.is_empty() {
        let mut fig = Figure::new("Density snapshots", "position x", "density");
        for file in &density_files {
            let table = parse_csv(file)?;
            let x = table.f64_column("x")?;
            let mean = table.f64_column("mean")?;
            let label = file
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("density")
                .trim_start_matches("density_")
                .replace('_', " ");
            fig.push(Series::line(label, x.into_iter().zip(mean).collect()));
        }
        written.push(fig.save_svg(dir.join("densities.svg"))?);
    }

    let series = dir.join("adoption_series.csv");
    if series.exists() {
        let table = parse_csv(&series)?;
        let time = table.f64_column("time")?;
        let models = table.str_column("model")?;
        let frac = table.f64_column("fraction")?;
        let mut fig = Figure::new("Adopter share over time", "time", "share");
        for kind in ["abm", "spde"] {
            let pts: Vec<(f64, f64)> = models
                .iter()
                .zip(time.iter().zip(&frac))
                .filter(|(m, _)| **m == kind)
                .map(|(_, (&x, &y))| (x, y))
                .collect();
            if !pts.is_empty() {
                fig.push(Series::line(kind, pts));
            }
        }
        written.push(fig.save_svg(dir.join("adoption.svg"))?);
    }

    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::report::{fmt_f64, ReportWriter};
    use crate::model::RunStamp;

    #[test]
    fn figure_renders_wellformed_svg() {
        let mut fig = Figure::new("t", "x", "y");
        fig.push(
            Series::line("a", vec![(0.0, 1.0), (1.0, 2.0), (2.0, 1.5)])
                .with_markers()
                .with_errors(vec![0.1, 0.2, 0.1]),
        );
        fig.push(Series::line("b", vec![(0.0, 0.5), (2.0, 2.5)]));
        let svg = fig.to_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("polyline"));
        assert!(svg.matches("<circle").count() == 3);
        assert!(svg.contains(">a<") && svg.contains(">b<"));
    }

    #[test]
    fn log_axes_skip_nonpositive_points() {
        let mut fig = Figure::new("t", "x", "y").log_log();
        fig.push(Series::line("s", vec![(10.0, 1e-3), (100.0, 1e-2), (0.0, 5.0)]));
        let svg = fig.to_svg();
        // the (0, 5) point cannot appear on a log axis: only two vertices left
        let start = svg.find("points=\"").expect("series polyline") + "points=\"".len();
        let len = svg[start..].find('"').unwrap();
        assert_eq!(svg[start..start + len].split_whitespace().count(), 2);
    }

    #[test]
    fn empty_series_still_renders_axes() {
        let mut fig = Figure::new("empty", "x", "y");
        fig.push(Series::line("none", vec![(f64::NAN, f64::NAN)]));
        let svg = fig.to_svg();
        assert!(svg.contains("<rect"));
        assert!(!svg.contains("polyline"));
    }

    #[test]
    fn render_reports_from_bench_table() {
        let dir = tempfile::tempdir().unwrap();
        let stamp = RunStamp { config_hash: "ab".into(), master_seed: 1 };
        let writer = ReportWriter::new(dir.path(), stamp).unwrap();
        writer
            .write_csv(
                "bench.csv",
                &["model", "n_agents", "seconds_per_step"],
                vec![
                    vec!["abm".into(), "50".into(), fmt_f64(1e-6)],
                    vec!["abm".into(), "1000".into(), fmt_f64(2e-5)],
                    vec!["spde".into(), "50".into(), fmt_f64(1e-5)],
                    vec!["spde".into(), "1000".into(), fmt_f64(1.1e-5)],
                ],
            )
            .unwrap();
        let figures = render_reports(dir.path()).unwrap();
        assert_eq!(figures.len(), 1);
        let svg = std::fs::read_to_string(&figures[0]).unwrap();
        assert!(svg.contains(">abm<") && svg.contains(">spde<"), "legend has both series");
    }

    #[test]
    fn missing_columns_fail_with_format_error() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("bench.csv"),
            "# config=x seed=1\nwrong,cols\n1,2\n",
        )
        .unwrap();
        let err = render_reports(dir.path()).unwrap_err();
        assert!(matches!(err, crate::error::Error::Format { .. }), "{err}");
    }

    #[test]
    fn absent_tables_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        assert!(render_reports(dir.path()).unwrap().is_empty());
    }
}
