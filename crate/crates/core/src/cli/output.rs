use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::geom::PointN;

use super::run::RunReport;

pub const CSV_HEADER: [&str; 5] = ["r", "M_est", "argmax_count", "hausdorff", "in_exceptional"];

/// x rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Decimal text with at most 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x);
    let a = r.abs();
    if r == 0.0 || (1e-6..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            if let Some(x) = num.as_f64() {
                if let Some(n) = serde_json::Number::from_f64(round_sig(x)) {
                    *num = n;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// The report as JSON with every float rounded to 12 significant digits.
pub fn report_json(report: &RunReport) -> Result<String> {
    let mut v = serde_json::to_value(report)?;
    round_value(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

pub fn report_csv(report: &RunReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Csv { path: "<memory>".into(), message: e.to_string() };
    w.write_record(CSV_HEADER).map_err(err)?;
    for row in &report.rows {
        w.write_record([
            fmt_sig(row.r),
            fmt_sig(row.m_est),
            row.argmax_count.to_string(),
            row.hausdorff.map(fmt_sig).unwrap_or_default(),
            row.in_exceptional.to_string(),
        ])
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv { path: "<memory>".into(), message: e.to_string() })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Planar plot: T samples and extracted maximum-modulus samples, drawn
/// with radial coordinate ln(1 + |x|).
pub fn report_svg(target: &[PointN], mset: &[PointN]) -> String {
    let warp = |p: &PointN| {
        let r = p.norm();
        if r == 0.0 {
            (0.0, 0.0)
        } else {
            let s = (1.0 + r).ln() / r;
            (p[0] * s, p[1] * s)
        }
    };
    let extent = target.iter().chain(mset).map(|p| (1.0 + p.norm()).ln()).fold(1e-9, f64::max);
    let scale = 380.0 / extent;
    let mut out = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"-400 -400 800 800\">\n\
         <rect x=\"-400\" y=\"-400\" width=\"800\" height=\"800\" fill=\"white\"/>\n\
         <line x1=\"-390\" y1=\"0\" x2=\"390\" y2=\"0\" stroke=\"#ddd\"/>\n\
         <line x1=\"0\" y1=\"-390\" x2=\"0\" y2=\"390\" stroke=\"#ddd\"/>\n",
    );
    for (pts, colour, rad) in [(target, "#777", 2.5), (mset, "#c00", 1.5)] {
        out.push_str(&format!("<g fill=\"{colour}\">\n"));
        for p in pts {
            let (x, y) = warp(p);
            out.push_str(&format!("<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{rad}\"/>\n", x * scale, -y * scale));
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Paths written by [`emit_outputs`].
#[derive(Clone, Debug, Default)]
pub struct Emitted {
    pub csv: Option<PathBuf>,
    pub json: PathBuf,
    pub svg: Option<PathBuf>,
    pub timings: PathBuf,
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Writes `<stem>.csv` (when radii were processed), `<stem>.json`,
/// `<stem>.svg` (planar runs with extracted sets) and `<stem>.timings.json`.
pub fn emit_outputs(report: &mut RunReport, dir: &Path) -> Result<Emitted> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
    let stem = report.config.output.stem.clone();
    let mut out = Emitted {
        json: dir.join(format!("{stem}.json")),
        timings: dir.join(format!("{stem}.timings.json")),
        ..Default::default()
    };
    if !report.rows.is_empty() {
        let p = dir.join(format!("{stem}.csv"));
        write(&p, &report_csv(report)?)?;
        out.csv = Some(p);
    }
    if report.plot.is_some() || report.config.dimension != 2 {
        if report.config.dimension == 2 {
            let plot = report.plot.as_ref().expect("checked");
            let p = dir.join(format!("{stem}.svg"));
            write(&p, &report_svg(&plot.target, &plot.mset))?;
            report.svg = Some(format!("{stem}.svg"));
            out.svg = Some(p);
        } else if !report.rows.is_empty() {
            report.svg = Some(format!("omitted: plots are drawn for n = 2 only (n = {})", report.config.dimension));
        }
    }
    write(&out.json, &report_json(report)?)?;
    let t = serde_json::to_string_pretty(&report.timings)? + "\n";
    write(&out.timings, &t)?;
    Ok(out)
}
