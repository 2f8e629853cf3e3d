//! CSV, JSON and SVG emission. Every file carries the tool version and the
//! config hash; nothing time- or host-dependent is written.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig, VERSION};
use crate::error::{CliError, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

/// CSV with a two-line `#` header, LF line endings.
pub fn csv_bytes<T: Serialize>(cfg: &RunConfig, rows: &[T]) -> Result<Vec<u8>> {
    let mut out = format!("# sphere-ineq {VERSION}\n# command={} config={}\n", cfg.command, cfg.hash()).into_bytes();
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    out.extend(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?);
    Ok(out)
}

pub fn json_bytes<T: Serialize>(cfg: &RunConfig, rows: &[T], extra: Value) -> Result<Vec<u8>> {
    let mut meta = json!({
        "tool": "sphere-ineq",
        "version": VERSION,
        "config_hash": cfg.hash(),
        "config": cfg,
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut meta, extra) {
        m.extend(e);
    }
    let doc = json!({ "meta": meta, "rows": rows });
    let mut bytes = serde_json::to_vec_pretty(&doc)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes every requested format that the command supports and returns the
/// paths written. SVG is only produced when `svg` is given.
pub fn write_all<T: Serialize>(cfg: &RunConfig, rows: &[T], extra: Value, svg: Option<String>) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for &f in &cfg.formats {
        let bytes = match f {
            Format::Csv => csv_bytes(cfg, rows)?,
            Format::Json => json_bytes(cfg, rows, extra.clone())?,
            Format::Svg => match &svg {
                Some(s) => s.clone().into_bytes(),
                None => continue,
            },
        };
        let path = dir.join(format!("{}.{}", cfg.command, f.extension()));
        fs::write(&path, bytes).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}

/// Minimal line chart: frame, zero line, polyline and an optional marker.
pub fn line_chart(cfg: &RunConfig, title: &str, xs: &[f64], ys: &[f64], marker: Option<(f64, &str)>) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let lo = ys.iter().copied().fold(0.0, f64::min);
    let hi = ys.iter().copied().fold(0.0, f64::max);
    let (y0, y1) = (lo - 0.05 * (hi - lo), hi + 0.05 * (hi - lo));
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    s.push_str(&format!("<!-- sphere-ineq {VERSION} config={} -->\n", cfg.hash()));
    s.push_str(&format!("<rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"));
    s.push_str(&format!(
        "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        W - 2.0 * PAD,
        H - 2.0 * PAD
    ));
    s.push_str(&format!(
        "<line x1=\"{PAD}\" y1=\"{0:.2}\" x2=\"{1}\" y2=\"{0:.2}\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n",
        sy(0.0),
        W - PAD
    ));
    let pts: Vec<String> = xs.iter().zip(ys).map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
    s.push_str(&format!("<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"{}\"/>\n", pts.join(" ")));
    if let Some((x, label)) = marker {
        s.push_str(&format!("<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"crimson\"/>\n", sx(x), sy(0.0)));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"crimson\">{label}</text>\n",
            sx(x) + 6.0,
            sy(0.0) - 8.0
        ));
    }
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{}\" font-size=\"12\" text-anchor=\"{anchor}\">{x}</text>\n",
            sx(x),
            H - PAD + 18.0
        ));
    }
    for y in [y0, y1] {
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{y:.4}</text>\n",
            PAD - 4.0,
            sy(y) + 4.0
        ));
    }
    s.push_str(&format!("<text x=\"{}\" y=\"30\" font-size=\"14\" text-anchor=\"middle\">{title}</text>\n", W / 2.0));
    s.push_str("</svg>\n");
    s
}
