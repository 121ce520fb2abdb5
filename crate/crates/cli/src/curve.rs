//! CSV curves: `#` metadata lines, then a fixed header and one row per
//! grid point. Floats are written in shortest round-trip form, so reading
//! a curve back and writing it again reproduces it byte for byte.

use std::fmt::Write as _;

use crate::Invalid;

pub const CSV_HEADER: &str = "snr_db,sigma,raw_value,clamped_value,d_star_opt";

/// Matching tolerance for grid values read from different files.
pub const GRID_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SnrGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> anyhow::Result<Self> {
        if !(start.is_finite() && stop.is_finite()) {
            return Err(Invalid("grid bounds must be finite".into()).into());
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Invalid(format!("snr step must be positive, got {step}")).into());
        }
        if start > stop {
            return Err(Invalid(format!("snr start {start} exceeds stop {stop}")).into());
        }
        Ok(SnrGrid { start, stop, step })
    }

    pub fn single(value: f64) -> anyhow::Result<Self> {
        Self::new(value, value, 1.0)
    }

    /// `start + i·step` up to `stop`, rounded to 12 decimals so that
    /// decimal steps print cleanly.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| {
                let v = self.start + i as f64 * self.step;
                (v * 1e12).round() / 1e12
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub snr_db: f64,
    pub sigma: f64,
    pub raw_value: f64,
    pub clamped_value: f64,
    pub d_star_opt: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Curve {
    /// `key=value` pairs echoed as comment lines.
    pub meta: Vec<(String, String)>,
    pub rows: Vec<CurveRow>,
}

impl Curve {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("# mlbound {}\n", env!("CARGO_PKG_VERSION"));
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}={v}");
        }
        let _ = writeln!(s, "{CSV_HEADER}");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:e},{:e},{:e},{}",
                r.snr_db, r.sigma, r.raw_value, r.clamped_value, r.d_star_opt
            );
        }
        s
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut curve = Curve::default();
        let mut header_seen = false;
        for (i, line) in text.lines().enumerate() {
            let lno = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.trim().split_once('=') {
                    curve.meta.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            if !header_seen {
                if line != CSV_HEADER {
                    return Err(Invalid(format!("line {lno}: expected header `{CSV_HEADER}`")).into());
                }
                header_seen = true;
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            let bad = || Invalid(format!("line {lno}: malformed curve row"));
            if f.len() != 5 {
                return Err(bad().into());
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
            curve.rows.push(CurveRow {
                snr_db: num(f[0])?,
                sigma: num(f[1])?,
                raw_value: num(f[2])?,
                clamped_value: num(f[3])?,
                d_star_opt: f[4].parse().map_err(|_| bad())?,
            });
        }
        if !header_seen {
            return Err(Invalid("curve has no header line".into()).into());
        }
        Ok(curve)
    }
}
