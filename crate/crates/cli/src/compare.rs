//! Merges bound curves and simulation points on one grid and checks
//! declared dominance relations row by row.

use std::fmt::Write as _;

use anyhow::Context;
use serde_json::Value;

use crate::args::MetricArg;
use crate::curve::{Curve, GRID_SLACK};
use crate::Invalid;

#[derive(Debug, Clone, PartialEq)]
pub struct SimSeries {
    pub label: String,
    pub convention: String,
    /// `(snr_db, rate, ci_low, ci_high)`.
    pub points: Vec<(f64, f64, f64, f64)>,
}

impl SimSeries {
    pub fn from_json(label: &str, text: &str, metric: MetricArg) -> anyhow::Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Invalid(format!("{label}: {e}")))?;
        let bad = |what: &str| Invalid(format!("{label}: simulation report lacks {what}"));
        let convention = v["snr_convention"].as_str().ok_or_else(|| bad("snr_convention"))?;
        let key = match metric {
            MetricArg::Word => "word_error_rate",
            MetricArg::Bit => "bit_error_rate",
        };
        let mut points = Vec::new();
        for p in v["points"].as_array().ok_or_else(|| bad("points"))? {
            let snr = p["snr_db"].as_f64().ok_or_else(|| bad("snr_db"))?;
            let r = &p["report"][key];
            let get = |f: &str| r[f].as_f64().ok_or_else(|| bad(f));
            points.push((snr, get("rate")?, get("ci_low")?, get("ci_high")?));
        }
        Ok(SimSeries {
            label: label.to_string(),
            convention: convention.to_string(),
            points,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dominance {
    pub lower: String,
    pub upper: String,
}

impl Dominance {
    pub fn parse(s: &str) -> anyhow::Result<Self> {
        let (a, b) = s
            .split_once("<=")
            .ok_or_else(|| Invalid(format!("dominance `{s}` must look like A<=B")))?;
        Ok(Dominance {
            lower: a.trim().to_string(),
            upper: b.trim().to_string(),
        })
    }
}

pub fn split_label(arg: &str) -> anyhow::Result<(String, String)> {
    let (label, path) = arg
        .split_once('=')
        .ok_or_else(|| Invalid(format!("`{arg}` must look like LABEL=FILE")))?;
    if label.is_empty() || label.contains(',') {
        return Err(Invalid(format!("bad label `{label}`")).into());
    }
    Ok((label.to_string(), path.to_string()))
}

pub fn load_curve(path: &str) -> anyhow::Result<Curve> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading curve {path}"))?;
    Curve::parse(&text).with_context(|| format!("parsing curve {path}"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub text: String,
    pub violations: usize,
}

/// Builds the merged table. Curves must share one grid exactly (within
/// [`GRID_SLACK`]); simulation points must fall on that grid.
pub fn compare(
    curves: &[(String, Curve)],
    sims: &[SimSeries],
    dominance: &[Dominance],
) -> anyhow::Result<Comparison> {
    let (first_label, first) = curves
        .first()
        .ok_or_else(|| Invalid("compare needs at least one curve".into()))?;
    let convention = first.meta("snr_convention").unwrap_or("unknown").to_string();
    let mut labels: Vec<&str> = Vec::new();
    for (label, curve) in curves {
        if labels.contains(&label.as_str()) {
            return Err(Invalid(format!("duplicate label `{label}`")).into());
        }
        labels.push(label);
        let c = curve.meta("snr_convention").unwrap_or("unknown");
        if c != convention {
            return Err(Invalid(format!(
                "`{label}` uses snr convention {c}, `{first_label}` uses {convention}"
            ))
            .into());
        }
        let aligned = curve.rows.len() == first.rows.len()
            && curve
                .rows
                .iter()
                .zip(&first.rows)
                .all(|(a, b)| (a.snr_db - b.snr_db).abs() <= GRID_SLACK);
        if !aligned {
            return Err(Invalid(format!(
                "misaligned grids: `{label}` does not share the grid of `{first_label}`"
            ))
            .into());
        }
    }
    let grid: Vec<f64> = first.rows.iter().map(|r| r.snr_db).collect();
    let mut sim_cols: Vec<Vec<Option<(f64, f64, f64)>>> = Vec::new();
    for s in sims {
        if labels.contains(&s.label.as_str()) {
            return Err(Invalid(format!("duplicate label `{}`", s.label)).into());
        }
        labels.push(&s.label);
        if s.convention != convention {
            return Err(Invalid(format!(
                "`{}` uses snr convention {}, curves use {convention}",
                s.label, s.convention
            ))
            .into());
        }
        let mut col = vec![None; grid.len()];
        for &(snr, rate, lo, hi) in &s.points {
            let i = grid
                .iter()
                .position(|g| (g - snr).abs() <= GRID_SLACK)
                .ok_or_else(|| {
                    Invalid(format!("misaligned grids: `{}` point {snr} is off the curve grid", s.label))
                })?;
            col[i] = Some((rate, lo, hi));
        }
        sim_cols.push(col);
    }
    for d in dominance {
        for l in [&d.lower, &d.upper] {
            if !labels.contains(&l.as_str()) {
                return Err(Invalid(format!("dominance names unknown label `{l}`")).into());
            }
        }
    }

    let value = |label: &str, row: usize| -> Option<f64> {
        if let Some((_, c)) = curves.iter().find(|(l, _)| l == label) {
            return Some(c.rows[row].raw_value);
        }
        let j = sims.iter().position(|s| s.label == label)?;
        sim_cols[j][row].map(|(rate, _, _)| rate)
    };

    let mut out = format!("# mlbound {} compare\n", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# snr_convention={convention}");
    for (label, c) in curves {
        let _ = writeln!(out, "# curve {label} variant={}", c.meta("variant").unwrap_or("unknown"));
    }
    for s in sims {
        let _ = writeln!(out, "# sim {}", s.label);
    }
    for d in dominance {
        let _ = writeln!(out, "# dominance {}<={}", d.lower, d.upper);
    }
    let mut header = vec!["snr_db".to_string(), "sigma".to_string()];
    header.extend(curves.iter().map(|(l, _)| l.clone()));
    for s in sims {
        header.push(s.label.clone());
        header.push(format!("{}_ci_low", s.label));
        header.push(format!("{}_ci_high", s.label));
    }
    header.push("violations".into());
    let _ = writeln!(out, "{}", header.join(","));

    let mut violations = 0;
    for (i, r) in first.rows.iter().enumerate() {
        let mut cells = vec![r.snr_db.to_string(), format!("{:e}", r.sigma)];
        cells.extend(curves.iter().map(|(_, c)| format!("{:e}", c.rows[i].raw_value)));
        for col in &sim_cols {
            match col[i] {
                Some((rate, lo, hi)) => {
                    cells.extend([format!("{rate:e}"), format!("{lo:e}"), format!("{hi:e}")])
                }
                None => cells.extend([String::new(), String::new(), String::new()]),
            }
        }
        let broken: Vec<String> = dominance
            .iter()
            .filter(|d| match (value(&d.lower, i), value(&d.upper, i)) {
                (Some(a), Some(b)) => a > b,
                _ => false,
            })
            .map(|d| format!("{}>{}", d.lower, d.upper))
            .collect();
        violations += broken.len();
        cells.push(broken.join(";"));
        let _ = writeln!(out, "{}", cells.join(","));
    }
    Ok(Comparison { text: out, violations })
}
