//! CSV and SVG output. Time axes in ns, frequency axes in cyclic MHz.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use ndarray::Array2;

use crate::correlation::{CorrelationTrace, Pair, SweepRow};
use crate::grid::UniformAxis;
use crate::params::to_mhz_cyclic;
use crate::susceptibility::SpectralGrid2D;
use crate::waveform::WaveformGrid2D;

/// 17 significant digits, exponent form.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Column table with `#` comment lines ahead of the header row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        CsvTable {
            comments: Vec::new(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        for c in &self.comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        let mut line = String::new();
        for row in &self.rows {
            line.clear();
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&fmt_num(*v));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn write_file(&self, path: &Path) -> io::Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut w = BufWriter::new(fs::File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()
    }
}

fn axis_comment(name: &str, unit: &str, axis: &UniformAxis, scale: impl Fn(f64) -> f64) -> String {
    format!(
        "axis {name} [{unit}]: start={} step={} n={}",
        fmt_num(scale(axis.start)),
        fmt_num(scale(axis.step)),
        axis.len
    )
}

fn ns(t: f64) -> f64 {
    t * 1e9
}

/// Long-format spectral map: one row per `(delta2, delta3)` cell.
pub fn spectral_grid_csv(g: &SpectralGrid2D) -> CsvTable {
    let mut t = CsvTable::new(&["delta2_MHz", "delta3_MHz", "re", "im", "abs"]);
    t.comments.push(format!("{} on a uniform grid; detunings in cyclic MHz", g.label.name()));
    t.comments.push(axis_comment("delta2", "MHz", &g.axis2, to_mhz_cyclic));
    t.comments.push(axis_comment("delta3", "MHz", &g.axis3, to_mhz_cyclic));
    for ((i3, i2), z) in g.values.indexed_iter() {
        t.push(vec![
            to_mhz_cyclic(g.axis2.value(i2)),
            to_mhz_cyclic(g.axis3.value(i3)),
            z.re,
            z.im,
            z.norm(),
        ]);
    }
    t
}

pub fn waveform_grid_csv(g: &WaveformGrid2D) -> CsvTable {
    let mut t = CsvTable::new(&["tau12_ns", "tau13_ns", "rate_normalized"]);
    t.comments.push(format!(
        "threefold coincidence rate ({:?}), peak-normalized; raw peak {}",
        g.source,
        fmt_num(g.normalization)
    ));
    t.comments.push(axis_comment("tau12", "ns", &g.axis12, ns));
    t.comments.push(axis_comment("tau13", "ns", &g.axis13, ns));
    for ((i13, i12), v) in g.rates.indexed_iter() {
        t.push(vec![ns(g.axis12.value(i12)), ns(g.axis13.value(i13)), *v]);
    }
    t
}

/// Traces sharing one delay axis, one column each.
pub fn traces_csv(labels: &[String], traces: &[CorrelationTrace]) -> CsvTable {
    assert_eq!(labels.len(), traces.len());
    let mut cols = vec!["tau_ns".to_string()];
    cols.extend(labels.iter().cloned());
    let mut t = CsvTable {
        comments: vec![format!(
            "conditional coincidence rates for pair {}, each normalized to its maximum",
            traces.first().map_or("-".to_string(), |tr| tr.pair.to_string())
        )],
        columns: cols,
        rows: Vec::new(),
    };
    if traces.is_empty() {
        return t;
    }
    let tau = &traces[0].tau;
    let peaks: Vec<f64> = traces.iter().map(|tr| tr.rate.iter().cloned().fold(0.0, f64::max)).collect();
    for (i, &x) in tau.iter().enumerate() {
        let mut row = vec![ns(x)];
        for (tr, &pk) in traces.iter().zip(&peaks) {
            assert_eq!(tr.tau.len(), tau.len(), "traces must share an axis");
            row.push(if pk > 0.0 { tr.rate[i] / pk } else { 0.0 });
        }
        t.push(row);
    }
    t
}

/// `S_jk` against `omega_c2`; failed points are NaN.
pub fn sweep_csv(rows: &[SweepRow], gamma21: f64) -> CsvTable {
    let mut t = CsvTable::new(&["omega_c2_MHz", "omega_c2_over_gamma21", "S12", "S13", "S23"]);
    t.comments.push("energy-time criterion S_jk = delta_tau * delta_nu, cyclic frequency".into());
    for r in rows {
        let mut row = vec![to_mhz_cyclic(r.omega_c2), r.omega_c2 / gamma21];
        for pair in Pair::ALL {
            row.push(r.s(pair).unwrap_or(f64::NAN));
        }
        t.push(row);
    }
    t
}

// --- SVG ---

pub const MAX_HEATMAP_CELLS: usize = 256;

const W: f64 = 640.0;
const H: f64 = 480.0;
const ML: f64 = 70.0;
const MR: f64 = 20.0;
const MT: f64 = 40.0;
const MB: f64 = 55.0;

fn color(v: f64) -> String {
    // dark blue -> teal -> yellow
    const STOPS: [(f64, [f64; 3]); 4] = [
        (0.0, [68.0, 1.0, 84.0]),
        (0.35, [49.0, 104.0, 142.0]),
        (0.7, [53.0, 183.0, 121.0]),
        (1.0, [253.0, 231.0, 37.0]),
    ];
    let v = if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 };
    let k = STOPS.iter().position(|s| s.0 >= v).unwrap_or(3).max(1);
    let (a, ca) = STOPS[k - 1];
    let (b, cb) = STOPS[k];
    let f = (v - a) / (b - a);
    let c: Vec<u8> = (0..3).map(|i| (ca[i] + f * (cb[i] - ca[i])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Max-pools `values` so neither dimension exceeds `limit`.
pub fn pool(values: &Array2<f64>, limit: usize) -> Array2<f64> {
    let (ny, nx) = values.dim();
    let by = ny.div_ceil(limit).max(1);
    let bx = nx.div_ceil(limit).max(1);
    Array2::from_shape_fn((ny.div_ceil(by), nx.div_ceil(bx)), |(j, i)| {
        let mut m = f64::NEG_INFINITY;
        for y in j * by..((j + 1) * by).min(ny) {
            for x in i * bx..((i + 1) * bx).min(nx) {
                m = m.max(values[[y, x]]);
            }
        }
        m
    })
}

fn frame(s: &mut String, title: &str, xlabel: &str, ylabel: &str, x: (f64, f64), y: (f64, f64)) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, esc(title));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, ML + (W - ML - MR) / 2.0, H - 12.0, esc(xlabel));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        MT + (H - MT - MB) / 2.0,
        esc(ylabel)
    );
    for (k, v) in [(0.0, x.0), (0.5, 0.5 * (x.0 + x.1)), (1.0, x.1)] {
        let px = ML + k * (W - ML - MR);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#, H - MB + 16.0, tick(v));
    }
    for (k, v) in [(0.0, y.0), (0.5, 0.5 * (y.0 + y.1)), (1.0, y.1)] {
        let py = H - MB - k * (H - MT - MB);
        let _ = writeln!(s, r#"<text x="{}" y="{py:.2}" text-anchor="end">{}</text>"#, ML - 6.0, tick(v));
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Heatmap of `values[[iy, ix]]` scaled to its maximum; at most 256 cells per side.
pub fn svg_heatmap(values: &Array2<f64>, x: (f64, f64), y: (f64, f64), title: &str, xlabel: &str, ylabel: &str) -> String {
    let v = pool(values, MAX_HEATMAP_CELLS);
    let peak = v.iter().cloned().fold(0.0, f64::max);
    let (ny, nx) = v.dim();
    let cw = (W - ML - MR) / nx as f64;
    let ch = (H - MT - MB) / ny as f64;
    let mut s = String::new();
    frame(&mut s, title, xlabel, ylabel, x, y);
    for ((j, i), val) in v.indexed_iter() {
        let px = ML + i as f64 * cw;
        let py = H - MB - (j + 1) as f64 * ch;
        let c = color(if peak > 0.0 { val / peak } else { 0.0 });
        let _ = writeln!(
            s,
            r#"<rect x="{px:.2}" y="{py:.2}" width="{:.2}" height="{:.2}" fill="{c}"/>"#,
            cw + 0.05,
            ch + 0.05
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Labelled polylines on shared axes.
pub fn svg_lines(series: &[(String, Vec<f64>, Vec<f64>)], title: &str, xlabel: &str, ylabel: &str) -> String {
    const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
    let finite = |v: &&f64| v.is_finite();
    let xs = series.iter().flat_map(|s| s.1.iter()).filter(finite);
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let ys = series.iter().flat_map(|s| s.2.iter()).filter(finite);
    let (mut y0, mut y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(y1 > y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let (x0, x1) = if x1 > x0 { (x0, x1) } else { (x0 - 0.5, x0 + 0.5) };
    let mut s = String::new();
    frame(&mut s, title, xlabel, ylabel, (x0, x1), (y0, y1));
    let _ = writeln!(
        s,
        r#"<rect x="{ML}" y="{MT}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - ML - MR,
        H - MT - MB
    );
    for (k, (label, xv, yv)) in series.iter().enumerate() {
        let col = PALETTE[k % PALETTE.len()];
        // thin dense traces down to about one vertex per pixel column
        let stride = (xv.len() / 1200).max(1);
        let pts: Vec<String> = xv
            .iter()
            .zip(yv)
            .step_by(stride)
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(a, b)| {
                let px = ML + (a - x0) / (x1 - x0) * (W - ML - MR);
                let py = H - MB - (b - y0) / (y1 - y0) * (H - MT - MB);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{col}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let ly = MT + 16.0 + 16.0 * k as f64;
        let _ = writeln!(s, r#"<text x="{}" y="{ly}" fill="{col}" text-anchor="end">{}</text>"#, W - MR - 8.0, esc(label));
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_text(path: &Path, text: &str) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for v in [0.0, -1.5, std::f64::consts::PI, 1e-300, 6.02214076e23, -2.0f64.sqrt()] {
            let s = fmt_num(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn csv_layout() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.comments.push("note".into());
        t.push(vec![1.0, -2.5]);
        assert_eq!(t.render(), "# note\na,b\n1.0000000000000000e0,-2.5000000000000000e0\n");
    }

    #[test]
    fn pooling_caps_size_and_keeps_max() {
        let a = Array2::from_shape_fn((1000, 300), |(j, i)| (j * 300 + i) as f64);
        let p = pool(&a, 256);
        assert!(p.dim().0 <= 256 && p.dim().1 <= 256);
        assert_eq!(p.iter().cloned().fold(0.0, f64::max), 299_999.0);
    }

    #[test]
    fn colors_cover_range() {
        assert_eq!(color(0.0), "#440154");
        assert_eq!(color(1.0), "#fde725");
        assert_eq!(color(f64::NAN), "#440154");
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let a = Array2::from_shape_fn((4, 5), |(j, i)| (i + j) as f64);
        let s = svg_heatmap(&a, (0.0, 1.0), (0.0, 2.0), "t<1>", "x", "y");
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert_eq!(s.matches("<rect").count(), 21);
        assert!(s.contains("t&lt;1&gt;"));
        let l = svg_lines(&[("a".into(), vec![0.0, 1.0], vec![0.0, 1.0])], "t", "x", "y");
        assert!(l.contains("<polyline"));
    }
}
