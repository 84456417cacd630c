//! CSV readers and writers.
//!
//! Floats are written in shortest round-trip form, so every writer here is
//! inverted exactly by the matching reader.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::ItoComparison;
use crate::fractional::ScanRow;
use crate::path::{ComplexPath, Path, SampledPath};
use crate::quantize::ComplexGrid;

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        kind => Error::Format(format!("{kind:?}")),
    }
}

fn read_rows<T: DeserializeOwned>(r: impl Read, header: &[&str]) -> Result<Vec<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(r);
    let found: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_owned)
        .collect();
    if found != header {
        return Err(Error::Format(format!(
            "expected header `{}`, found `{}`",
            header.join(","),
            found.join(",")
        )));
    }
    rdr.deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::Format(format!("row {}: {e}", i + 1))))
        .collect()
}

fn write_rows<T: Serialize>(
    w: impl Write,
    header: &[&str],
    rows: impl IntoIterator<Item = T>,
) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(header).map_err(csv_err)?;
    for row in rows {
        wtr.serialize(row).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Recovers `(t0, dt)` from time stamps, preferring a step that reproduces
/// every stamp exactly as `t0 + i * dt`.
fn uniform_axis(times: &[f64], what: &str) -> Result<(f64, f64)> {
    let t0 = *times
        .first()
        .ok_or_else(|| Error::Format(format!("no {what} samples")))?;
    if times.len() == 1 {
        return Ok((t0, 1.0));
    }
    let exact = |dt: f64| {
        times
            .iter()
            .enumerate()
            .all(|(i, &t)| t0 + i as f64 * dt == t)
    };
    let guess = times[1] - t0;
    if !(guess > 0.0) {
        return Err(Error::Format(format!("{what} stamps must increase")));
    }
    let mut bits = guess.to_bits() - 64;
    while bits <= guess.to_bits() + 64 {
        let dt = f64::from_bits(bits);
        if exact(dt) {
            return Ok((t0, dt));
        }
        bits += 1;
    }
    let n = times.len();
    let dt = (times[n - 1] - t0) / (n - 1) as f64;
    for (i, &t) in times.iter().enumerate() {
        if (t0 + i as f64 * dt - t).abs() > 1e-9 * dt.max(t.abs() * 1e-3) {
            return Err(Error::Format(format!(
                "{what} stamps are not uniform at row {}",
                i + 1
            )));
        }
    }
    Ok((t0, dt))
}

pub fn read_sampled_path(r: impl Read) -> Result<SampledPath> {
    let rows: Vec<(f64, f64)> = read_rows(r, &["t", "value"])?;
    let times: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let (t0, dt) = uniform_axis(&times, "t")?;
    Path::new(t0, dt, rows.into_iter().map(|r| r.1).collect())
}

pub fn write_sampled_path(w: impl Write, f: &SampledPath) -> Result<()> {
    write_rows(
        w,
        &["t", "value"],
        f.times().zip(f.values().iter().copied()),
    )
}

pub fn read_complex_path(r: impl Read) -> Result<ComplexPath> {
    let rows: Vec<(f64, f64, f64)> = read_rows(r, &["t", "re", "im"])?;
    let times: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let (t0, dt) = uniform_axis(&times, "t")?;
    Path::new(
        t0,
        dt,
        rows.into_iter().map(|r| Complex64::new(r.1, r.2)).collect(),
    )
}

pub fn write_complex_path(w: impl Write, f: &ComplexPath) -> Result<()> {
    write_rows(
        w,
        &["t", "re", "im"],
        f.times().zip(f.values()).map(|(t, z)| (t, z.re, z.im)),
    )
}

/// Reads `x,t,re,im` rows ordered by `t`, then `x`.
pub fn read_complex_grid(r: impl Read) -> Result<ComplexGrid> {
    let rows: Vec<(f64, f64, f64, f64)> = read_rows(r, &["x", "t", "re", "im"])?;
    let first_t = rows
        .first()
        .map(|r| r.1)
        .ok_or_else(|| Error::Format("empty grid".into()))?;
    let nx = rows.iter().take_while(|r| r.1 == first_t).count();
    if rows.len() % nx != 0 {
        return Err(Error::Format(format!(
            "{} rows do not fill slices of {nx}",
            rows.len()
        )));
    }
    let nt = rows.len() / nx;
    let xs: Vec<f64> = rows[..nx].iter().map(|r| r.0).collect();
    let ts: Vec<f64> = rows.iter().step_by(nx).map(|r| r.1).collect();
    for (i, r) in rows.iter().enumerate() {
        if r.0 != xs[i % nx] || r.1 != ts[i / nx] {
            return Err(Error::Format(format!(
                "row {} breaks the (t, x) ordering",
                i + 1
            )));
        }
    }
    let x_axis = uniform_axis(&xs, "x")?;
    let t_axis = uniform_axis(&ts, "t")?;
    ComplexGrid::new(
        (x_axis.0, x_axis.1, nx),
        (t_axis.0, t_axis.1, nt),
        rows.into_iter().map(|r| Complex64::new(r.2, r.3)).collect(),
    )
}

pub fn write_complex_grid(w: impl Write, g: &ComplexGrid) -> Result<()> {
    write_rows(
        w,
        &["x", "t", "re", "im"],
        g.rows().map(|(x, t, z)| (x, t, z.re, z.im)),
    )
}

pub fn read_log_rows(r: impl Read) -> Result<Vec<(f64, f64)>> {
    read_rows(r, &["log_eps", "log_length"])
}

pub fn write_log_rows(w: impl Write, rows: &[(f64, f64)]) -> Result<()> {
    write_rows(w, &["log_eps", "log_length"], rows.iter().copied())
}

const ITO_HEADER: [&str; 5] = [
    "t",
    "re_direct",
    "im_direct",
    "re_expansion",
    "im_expansion",
];

pub fn write_ito_comparison(w: impl Write, c: &ItoComparison) -> Result<()> {
    write_rows(
        w,
        &ITO_HEADER,
        c.rows().map(|(t, d, e)| (t, d.re, d.im, e.re, e.im)),
    )
}

/// Rows `(t, direct, expansion)`.
pub fn read_ito_comparison(r: impl Read) -> Result<Vec<(f64, Complex64, Complex64)>> {
    let rows: Vec<(f64, f64, f64, f64, f64)> = read_rows(r, &ITO_HEADER)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.0, Complex64::new(r.1, r.2), Complex64::new(r.3, r.4)))
        .collect())
}

#[derive(Serialize, Deserialize)]
struct ScanRecord {
    t: f64,
    re: Option<f64>,
    im: Option<f64>,
    flag: String,
}

/// Scan rows; divergent and oscillatory points leave `re,im` empty.
pub fn write_scan(w: impl Write, rows: &[ScanRow]) -> Result<()> {
    write_rows(
        w,
        &["t", "re", "im", "flag"],
        rows.iter().map(|r| ScanRecord {
            t: r.t,
            re: r.value.map(|z| z.re),
            im: r.value.map(|z| z.im),
            flag: r.flag.as_str().to_owned(),
        }),
    )
}

pub fn read_scan(r: impl Read) -> Result<Vec<ScanRow>> {
    let rows: Vec<ScanRecord> = read_rows(r, &["t", "re", "im", "flag"])?;
    rows.into_iter()
        .map(|r| {
            let value = match (r.re, r.im) {
                (Some(re), Some(im)) => Some(Complex64::new(re, im)),
                (None, None) => None,
                _ => return Err(Error::Format(format!("half-empty value at t = {}", r.t))),
            };
            Ok(ScanRow {
                t: r.t,
                value,
                flag: r.flag.parse()?,
            })
        })
        .collect()
}
