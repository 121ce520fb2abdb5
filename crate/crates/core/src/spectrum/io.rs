//! Plain-text spectrum files.
//!
//! ```text
//! # comment
//! weight n=7 k=4 kind=exact
//! 0 1
//! 3 7
//! ```
//!
//! The header names the table (`weight` or `iowe`), the code parameters, the
//! kind (`exact`, `ensemble`, `truncated`) and, for truncated tables,
//! `d_max`. Records are `d A_d` or `i d A_id`; weights that are not listed
//! have count zero.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use super::{InputOutputSpectrum, SpectrumKind, WeightSpectrum};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumFile {
    Weight(WeightSpectrum),
    Iowe(InputOutputSpectrum),
}

impl SpectrumFile {
    pub fn n(&self) -> usize {
        match self {
            SpectrumFile::Weight(s) => s.n(),
            SpectrumFile::Iowe(s) => s.n(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            SpectrumFile::Weight(s) => s.k(),
            SpectrumFile::Iowe(s) => s.k(),
        }
    }

    /// Weight spectrum, marginalizing an IOWE if needed.
    pub fn weight_spectrum(&self) -> Result<WeightSpectrum> {
        match self {
            SpectrumFile::Weight(s) => Ok(s.clone()),
            SpectrumFile::Iowe(s) => s.weight_spectrum(),
        }
    }
}

impl From<WeightSpectrum> for SpectrumFile {
    fn from(s: WeightSpectrum) -> Self {
        SpectrumFile::Weight(s)
    }
}

impl From<InputOutputSpectrum> for SpectrumFile {
    fn from(s: InputOutputSpectrum) -> Self {
        SpectrumFile::Iowe(s)
    }
}

struct Header {
    iowe: bool,
    n: usize,
    k: usize,
    kind: SpectrumKind,
    d_max: Option<usize>,
}

fn parse_header(line: usize, text: &str) -> Result<Header> {
    let mut tokens = text.split_whitespace();
    let iowe = match tokens.next() {
        Some("weight") => false,
        Some("iowe") => true,
        other => {
            return Err(Error::parse(
                line,
                format!("expected `weight` or `iowe` header, found {other:?}"),
            ))
        }
    };
    let (mut n, mut k, mut kind, mut d_max) = (None, None, None, None);
    for tok in tokens {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("header field `{tok}` is not key=value")))?;
        let int = || {
            value
                .parse::<usize>()
                .map_err(|_| Error::parse(line, format!("header field `{key}` needs an integer")))
        };
        match key {
            "n" => n = Some(int()?),
            "k" => k = Some(int()?),
            "d_max" => d_max = Some(int()?),
            "kind" => {
                kind = Some(SpectrumKind::parse(value).ok_or_else(|| {
                    Error::parse(line, format!("unknown spectrum kind `{value}`"))
                })?)
            }
            _ => return Err(Error::parse(line, format!("unknown header field `{key}`"))),
        }
    }
    let missing = |f: &str| Error::parse(line, format!("header is missing `{f}`"));
    Ok(Header {
        iowe,
        n: n.ok_or_else(|| missing("n"))?,
        k: k.ok_or_else(|| missing("k"))?,
        kind: kind.ok_or_else(|| missing("kind"))?,
        d_max,
    })
}

/// Parses a spectrum file held in memory. Diagnostics carry 1-based line
/// numbers.
pub fn parse_spectrum(text: &str) -> Result<SpectrumFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, htext) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty spectrum file"))?;
    let h = parse_header(hline, htext)?;
    if h.n == 0 || h.k > h.n || (h.iowe && h.k == 0) {
        return Err(Error::parse(hline, format!("invalid code parameters [{}, {}]", h.n, h.k)));
    }
    match (h.kind, h.d_max) {
        (SpectrumKind::Truncated, None) => {
            return Err(Error::parse(hline, "truncated spectrum requires d_max"))
        }
        (SpectrumKind::Truncated, Some(m)) if m > h.n => {
            return Err(Error::parse(hline, format!("d_max {m} exceeds n = {}", h.n)))
        }
        (SpectrumKind::Exact | SpectrumKind::EnsembleAverage, Some(_)) => {
            return Err(Error::parse(hline, "d_max is only allowed with kind=truncated"))
        }
        _ => {}
    }
    let limit = h.d_max.unwrap_or(h.n);
    let arity = if h.iowe { 3 } else { 2 };

    let mut table = vec![vec![0.0; h.n + 1]; if h.iowe { h.k + 1 } else { 1 }];
    let mut seen = HashSet::new();
    for (lno, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != arity {
            return Err(Error::parse(
                lno,
                format!("expected {arity} fields, found {}", fields.len()),
            ));
        }
        let index = |s: &str, what: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(lno, format!("{what} `{s}` is not a non-negative integer")))
        };
        let (i, d) = if h.iowe {
            (index(fields[0], "input weight")?, index(fields[1], "weight")?)
        } else {
            (0, index(fields[0], "weight")?)
        };
        let raw = fields[arity - 1];
        let count: f64 = raw
            .parse()
            .map_err(|_| Error::parse(lno, format!("count `{raw}` is not a number")))?;
        if !count.is_finite() {
            return Err(Error::parse(lno, format!("count `{raw}` is not finite")));
        }
        if count < 0.0 {
            return Err(Error::parse(lno, format!("negative count {raw}")));
        }
        if d > limit {
            return Err(Error::parse(lno, format!("weight {d} exceeds {limit}")));
        }
        if h.iowe && i > h.k {
            return Err(Error::parse(lno, format!("input weight {i} exceeds k = {}", h.k)));
        }
        if !seen.insert((i, d)) {
            let key = if h.iowe { format!("({i}, {d})") } else { d.to_string() };
            return Err(Error::parse(lno, format!("duplicate entry for {key}")));
        }
        table[i][d] = count;
    }

    if table[0][0] != 1.0 {
        return Err(Error::parse(hline, "the all-zero codeword must have count 1"));
    }
    let built = if h.iowe {
        InputOutputSpectrum::new(h.n, h.k, table, h.kind, h.d_max).map(SpectrumFile::Iowe)
    } else {
        let counts = table.pop().unwrap_or_default();
        WeightSpectrum::new(h.n, h.k, counts, h.kind, h.d_max).map(SpectrumFile::Weight)
    };
    built.map_err(|e| Error::parse(hline, e.to_string()))
}

fn fmt_count(a: f64) -> String {
    if a.fract() == 0.0 && a.abs() < 9.007_199_254_740_992e15 {
        format!("{a}")
    } else {
        // `{:e}` prints the shortest digits that round-trip
        format!("{a:e}")
    }
}

/// Renders a spectrum in the text format; nonzero entries only.
pub fn format_spectrum(spec: &SpectrumFile) -> String {
    let mut out = String::new();
    let header = |out: &mut String, tag: &str, n: usize, k: usize, kind: SpectrumKind, d_max: Option<usize>| {
        let _ = write!(out, "{tag} n={n} k={k} kind={}", kind.as_str());
        if let Some(m) = d_max {
            let _ = write!(out, " d_max={m}");
        }
        out.push('\n');
    };
    match spec {
        SpectrumFile::Weight(s) => {
            header(&mut out, "weight", s.n(), s.k(), s.kind(), s.d_max());
            for (d, &a) in s.counts().iter().enumerate().filter(|(_, &a)| a != 0.0) {
                let _ = writeln!(out, "{d} {}", fmt_count(a));
            }
        }
        SpectrumFile::Iowe(s) => {
            header(&mut out, "iowe", s.n(), s.k(), s.kind(), s.d_max());
            for i in 0..=s.k() {
                for d in 0..=s.n() {
                    let a = s.get(i, d);
                    if a != 0.0 {
                        let _ = writeln!(out, "{i} {d} {}", fmt_count(a));
                    }
                }
            }
        }
    }
    out
}

pub fn load_spectrum(path: impl AsRef<Path>) -> Result<SpectrumFile> {
    parse_spectrum(&std::fs::read_to_string(path)?)
}

pub fn store_spectrum(spec: &SpectrumFile, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_spectrum(spec))?;
    Ok(())
}
