//! Field files: `#`-prefixed metadata, then one sample per row, axis 0 fastest.

use std::fmt::Write as _;
use std::str::FromStr;

use ncwig_core::{Complex64, ComplexField2D, Grid1D, Grid2D, Representation};
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Gnuplot,
    Json,
}

/// A sampled 2D field together with the metadata written alongside it.
pub struct Output {
    pub axes: [String; 2],
    pub grid: Grid2D,
    pub values: Vec<Complex64>,
    /// `(key, value)` pairs such as `representation`, `label`, `params`.
    pub meta: Vec<(String, String)>,
}

fn axis_line(a: &Grid1D) -> String {
    format!("{},{:.16e},{:.16e}", a.n, a.origin, a.step)
}

pub fn render(out: &Output, format: Format) -> String {
    match format {
        Format::Csv => render_text(out, ','),
        Format::Gnuplot => render_text(out, ' '),
        Format::Json => render_json(out),
    }
}

fn render_text(out: &Output, sep: char) -> String {
    let g = &out.grid;
    let mut s = String::with_capacity(g.len() * 96);
    let _ = writeln!(s, "# axes: {},{}", out.axes[0], out.axes[1]);
    let _ = writeln!(s, "# axis0: {}", axis_line(&g.axis0));
    let _ = writeln!(s, "# axis1: {}", axis_line(&g.axis1));
    for (k, v) in &out.meta {
        let _ = writeln!(s, "# {k}: {v}");
    }
    let _ = writeln!(s, "# columns: x0{sep}x1{sep}re{sep}im");
    for i1 in 0..g.axis1.n {
        for i0 in 0..g.axis0.n {
            let (x0, x1) = g.coord(i0, i1);
            let v = out.values[g.index(i0, i1)];
            let _ = writeln!(s, "{x0:.16e}{sep}{x1:.16e}{sep}{:.16e}{sep}{:.16e}", v.re, v.im);
        }
        // pm3d wants a blank line between scan lines
        if sep == ' ' {
            s.push('\n');
        }
    }
    s
}

fn render_json(out: &Output) -> String {
    let axis = |a: &Grid1D| json!({"n": a.n, "origin": a.origin, "step": a.step});
    let meta: serde_json::Map<String, serde_json::Value> =
        out.meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let v = json!({
        "axes": out.axes,
        "axis0": axis(&out.grid.axis0),
        "axis1": axis(&out.grid.axis1),
        "meta": meta,
        "re": out.values.iter().map(|c| c.re).collect::<Vec<_>>(),
        "im": out.values.iter().map(|c| c.im).collect::<Vec<_>>(),
    });
    let mut s = v.to_string();
    s.push('\n');
    s
}

fn parse_axis(s: &str) -> Result<Grid1D, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("axis line `{s}` must be n,origin,step"));
    }
    let n = parts[0].parse::<usize>().map_err(|e| format!("axis size `{}`: {e}", parts[0]))?;
    let num = |x: &str| x.parse::<f64>().map_err(|e| format!("axis value `{x}`: {e}"));
    Grid1D::new(n, num(parts[1])?, num(parts[2])?).map_err(|e| e.to_string())
}

/// Reads a state written in the csv or gnuplot layout.
pub fn parse_field(text: &str) -> Result<ComplexField2D, String> {
    let (mut a0, mut a1, mut rep) = (None, None, Representation::Position);
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((k, v)) = meta.split_once(':') {
                match k.trim() {
                    "axis0" => a0 = Some(parse_axis(v)?),
                    "axis1" => a1 = Some(parse_axis(v)?),
                    "representation" => rep = Representation::from_str(v).map_err(|e| e.to_string())?,
                    _ => {}
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|c| !c.is_empty()).collect();
        if cols.len() != 4 {
            return Err(format!("line {}: expected 4 columns, found {}", lineno + 1, cols.len()));
        }
        let num = |x: &str| x.parse::<f64>().map_err(|e| format!("line {}: `{x}`: {e}", lineno + 1));
        values.push(Complex64::new(num(cols[2])?, num(cols[3])?));
    }
    let (a0, a1) = match (a0, a1) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err("missing `# axis0:` or `# axis1:` header".into()),
    };
    ComplexField2D::new(Grid2D::new(a0, a1), values, rep).map_err(|e| e.to_string())
}
