//! CSV and JSON writers.
//!
//! Floats are written with 12 significant digits in plain decimal notation,
//! so repeated runs produce byte-identical files.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use stimemit::outstate::{Sector, TwoPhotonAmplitude};

use crate::error::Result;
use crate::run::{LifetimeRow, SweepRow};
use crate::spec::Format;

/// `x` with 12 significant digits, no exponent.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = (11 - x.abs().log10().floor() as i32).max(0) as usize;
    let s = format!("{x:.digits$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Opens `--out`, or stdout when absent.
pub fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn write_csv<W: Write>(w: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(header)?;
    for r in rows {
        wtr.write_record(&r)?;
    }
    wtr.flush()?;
    Ok(())
}

fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn write_sweep<W: Write>(w: W, rows: &[SweepRow], format: Format) -> Result<()> {
    match format {
        Format::Json => write_json(w, &rows),
        Format::Csv => write_csv(
            w,
            &["alpha", "p_rr", "p_ll", "p_rl", "loss", "f_factor", "method"],
            rows.iter().map(|r| {
                let mut v: Vec<String> = [r.alpha, r.p_rr, r.p_ll, r.p_rl, r.loss, r.f_factor]
                    .into_iter()
                    .map(fmt_sig)
                    .collect();
                v.push(r.method.clone());
                v
            }),
        ),
    }
}

pub fn write_lifetime<W: Write>(w: W, rows: &[LifetimeRow], format: Format) -> Result<()> {
    match format {
        Format::Json => write_json(w, &rows),
        Format::Csv => write_csv(
            w,
            &["alpha", "gamma_tau"],
            rows.iter().map(|r| vec![fmt_sig(r.alpha), fmt_sig(r.gamma_tau)]),
        ),
    }
}

#[derive(Serialize)]
struct AmplitudePoint {
    x_c_minus_t: f64,
    x_d: f64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct AmplitudeDump {
    sector: &'static str,
    alpha: f64,
    points: Vec<AmplitudePoint>,
}

pub fn write_amplitudes<W: Write>(w: W, grid: &TwoPhotonAmplitude, format: Format) -> Result<()> {
    match format {
        Format::Json => write_json(
            w,
            &AmplitudeDump {
                sector: match grid.sector {
                    Sector::EE => "ee",
                    Sector::EO => "eo",
                },
                alpha: grid.alpha,
                points: grid
                    .points()
                    .map(|(c, d, z)| AmplitudePoint {
                        x_c_minus_t: c,
                        x_d: d,
                        re: z.re,
                        im: z.im,
                    })
                    .collect(),
            },
        ),
        Format::Csv => write_csv(
            w,
            &["x_c_minus_t", "x_d", "re", "im"],
            grid.points()
                .map(|(c, d, z)| [c, d, z.re, z.im].into_iter().map(fmt_sig).collect()),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_sig(100.0), "100");
        assert_eq!(fmt_sig(1.0 / 18.0), "0.0555555555556");
        assert_eq!(fmt_sig(-1234.5678), "-1234.5678");
        assert_eq!(fmt_sig(1e-15), "0.000000000000001");
        assert_eq!(fmt_sig(-1e-30), "-0.000000000000000000000000000001");
    }

    #[test]
    fn sweep_csv_layout() {
        let rows = vec![SweepRow {
            alpha: 2.0,
            p_rr: 2.0 / 3.0,
            p_ll: 1.0 / 18.0,
            p_rl: 5.0 / 18.0,
            loss: 0.0,
            f_factor: 8.0 / 9.0,
            method: "analytic".into(),
        }];
        let mut buf = Vec::new();
        write_sweep(&mut buf, &rows, Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "alpha,p_rr,p_ll,p_rl,loss,f_factor,method\n\
             2,0.666666666667,0.0555555555556,0.277777777778,0,0.888888888889,analytic\n"
        );
        let mut buf = Vec::new();
        write_sweep(&mut buf, &rows, Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0]["method"], "analytic");
    }
}
