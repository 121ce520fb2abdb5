//! Weight spectra `{A_d}` and input-output weight enumerators `{A_{i,d}}`
//! for specific codes and code ensembles.

mod code;
mod io;

pub use code::{LinearCode, MAX_LENGTH};
pub(crate) use code::low_mask;
pub use io::{format_spectrum, load_spectrum, parse_spectrum, store_spectrum, SpectrumFile};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default limit on the dimension accepted by exhaustive enumeration.
pub const DEFAULT_MAX_ENUM_K: usize = 28;

/// Counts within this distance of an integer are treated as exact.
const INTEGER_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    Exact,
    EnsembleAverage,
    /// Only `A_d` for `d <= d_max` is known.
    Truncated,
}

impl SpectrumKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumKind::Exact => "exact",
            SpectrumKind::EnsembleAverage => "ensemble",
            SpectrumKind::Truncated => "truncated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exact" => Some(SpectrumKind::Exact),
            "ensemble" => Some(SpectrumKind::EnsembleAverage),
            "truncated" => Some(SpectrumKind::Truncated),
            _ => None,
        }
    }
}

/// Map `d ↦ A_d`, stored densely for `0 <= d <= n`.
///
/// Counts are real so that ensemble averages fit, and so that counts beyond
/// 2^64 (e.g. a `[100, 95]` code) remain representable.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpectrum {
    n: usize,
    k: usize,
    counts: Vec<f64>,
    kind: SpectrumKind,
    d_max: Option<usize>,
}

impl WeightSpectrum {
    /// `counts[d]` for `d <= n`; missing trailing entries are zero. A
    /// truncated spectrum must carry `d_max` and no counts above it.
    pub fn new(
        n: usize,
        k: usize,
        mut counts: Vec<f64>,
        kind: SpectrumKind,
        d_max: Option<usize>,
    ) -> Result<Self> {
        if n == 0 || k > n {
            return Err(Error::invalid(format!("invalid code parameters [{n}, {k}]")));
        }
        if counts.len() > n + 1 {
            return Err(Error::invalid(format!(
                "{} counts given for length {n}",
                counts.len()
            )));
        }
        if let Some(d) = counts.iter().position(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::invalid(format!("A_{d} = {} is not a count", counts[d])));
        }
        match (kind, d_max) {
            (SpectrumKind::Truncated, None) => {
                return Err(Error::invalid("truncated spectrum requires d_max"))
            }
            (SpectrumKind::Truncated, Some(m)) => {
                if m > n {
                    return Err(Error::invalid(format!("d_max {m} exceeds n = {n}")));
                }
                if counts.iter().skip(m + 1).any(|&a| a != 0.0) {
                    return Err(Error::invalid(format!("counts present above d_max = {m}")));
                }
            }
            (_, Some(_)) => {
                return Err(Error::invalid("d_max is only meaningful for truncated spectra"))
            }
            _ => {}
        }
        counts.resize(n + 1, 0.0);
        Ok(WeightSpectrum {
            n,
            k,
            counts,
            kind,
            d_max,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn d_max(&self) -> Option<usize> {
        self.d_max
    }

    pub fn is_truncated(&self) -> bool {
        self.kind == SpectrumKind::Truncated
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// `A_d`; zero for `d > n`.
    pub fn get(&self, d: usize) -> f64 {
        self.counts.get(d).copied().unwrap_or(0.0)
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    /// Largest weight whose count is known.
    pub fn known_up_to(&self) -> usize {
        self.d_max.unwrap_or(self.n)
    }

    /// Smallest nonzero weight with a positive count.
    pub fn min_distance(&self) -> Option<usize> {
        (1..=self.n).find(|&d| self.counts[d] > 0.0)
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Keeps only `A_d` for `d <= d_max`.
    pub fn truncate(&self, d_max: usize) -> Result<Self> {
        let d_max = d_max.min(self.known_up_to());
        let counts = self.counts[..=d_max].to_vec();
        Self::new(self.n, self.k, counts, SpectrumKind::Truncated, Some(d_max))
    }

    /// True when every count is within `1e-6` of an integer.
    pub fn is_integral(&self) -> bool {
        self.counts.iter().all(|&a| is_integral(a))
    }
}

pub(crate) fn is_integral(a: f64) -> bool {
    (a - a.round()).abs() < INTEGER_SLACK
}

/// Map `(i, d) ↦ A_{i,d}`: codewords of weight `d` produced by messages of
/// weight `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputOutputSpectrum {
    n: usize,
    k: usize,
    /// Row-major `(k + 1) x (n + 1)`.
    counts: Vec<f64>,
    kind: SpectrumKind,
    d_max: Option<usize>,
}

impl InputOutputSpectrum {
    /// `counts[i][d]`, shape `(k + 1) x (n + 1)`.
    pub fn new(
        n: usize,
        k: usize,
        counts: Vec<Vec<f64>>,
        kind: SpectrumKind,
        d_max: Option<usize>,
    ) -> Result<Self> {
        if n == 0 || k == 0 || k > n {
            return Err(Error::invalid(format!("invalid code parameters [{n}, {k}]")));
        }
        if counts.len() != k + 1 || counts.iter().any(|r| r.len() != n + 1) {
            return Err(Error::invalid(format!(
                "IOWE table must be {} x {}",
                k + 1,
                n + 1
            )));
        }
        let flat: Vec<f64> = counts.into_iter().flatten().collect();
        if flat.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::invalid("IOWE contains a negative or non-finite count"));
        }
        let iowe = InputOutputSpectrum {
            n,
            k,
            counts: flat,
            kind,
            d_max,
        };
        // shares the kind / d_max validation of the marginal
        iowe.weight_spectrum()?;
        Ok(iowe)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn d_max(&self) -> Option<usize> {
        self.d_max
    }

    pub fn get(&self, i: usize, d: usize) -> f64 {
        if i > self.k || d > self.n {
            return 0.0;
        }
        self.counts[i * (self.n + 1) + d]
    }

    /// `i ↦ A_{i,d}` for `0 <= i <= k`.
    pub fn slice(&self, d: usize) -> Vec<f64> {
        (0..=self.k).map(|i| self.get(i, d)).collect()
    }

    /// Marginal `A_d = Σ_i A_{i,d}`.
    pub fn weight_spectrum(&self) -> Result<WeightSpectrum> {
        let counts = (0..=self.n)
            .map(|d| (0..=self.k).map(|i| self.get(i, d)).sum())
            .collect();
        WeightSpectrum::new(self.n, self.k, counts, self.kind, self.d_max)
    }
}

/// Exact IOWE of `code` by walking all `2^k` messages in Gray-code order,
/// one row XOR per step. The message space is split by its top bits across
/// rayon workers and the partial tables are summed.
pub fn enumerate_spectrum(code: &LinearCode, max_k: usize) -> Result<InputOutputSpectrum> {
    let (n, k) = (code.n(), code.k());
    if k > max_k {
        return Err(Error::ResourceGuard(format!(
            "enumeration of 2^{k} messages exceeds the limit k <= {max_k}"
        )));
    }
    let split = k.min(6);
    let low = k - split;
    let width = n + 1;
    let table = (0..1u64 << split)
        .into_par_iter()
        .map(|prefix| {
            let mut part = vec![0u64; (k + 1) * width];
            gray_walk(code, prefix << low, low, |msg, cw| {
                part[msg.count_ones() as usize * width + cw.count_ones() as usize] += 1;
            });
            part
        })
        .reduce(
            || vec![0u64; (k + 1) * width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let counts = table
        .chunks(width)
        .map(|row| row.iter().map(|&c| c as f64).collect())
        .collect();
    InputOutputSpectrum::new(n, k, counts, SpectrumKind::Exact, None)
}

/// Calls `visit(msg, codeword)` for every message `base | g` where `g`
/// ranges over the low `bits` bits, in Gray-code order.
pub(crate) fn gray_walk<F: FnMut(u64, u64)>(code: &LinearCode, base: u64, bits: usize, mut visit: F) {
    let rows = code.rows();
    let mut msg = base;
    let mut cw = code.encode(base);
    visit(msg, cw);
    for step in 1..1u64 << bits {
        let j = step.trailing_zeros() as usize;
        msg ^= 1 << j;
        cw ^= rows[j];
        visit(msg, cw);
    }
}

/// Minimum nonzero codeword weight, by enumeration.
pub fn minimum_distance(code: &LinearCode, max_k: usize) -> Result<usize> {
    let ws = enumerate_spectrum(code, max_k)?.weight_spectrum()?;
    ws.min_distance()
        .ok_or_else(|| Error::invalid("code has no nonzero codeword"))
}

/// Weight spectrum of the dual code from an exact dual spectrum, through
/// `A_j = 2^{-k'} Σ_i B_i K_j(i)` with Krawtchouk polynomials `K_j`.
///
/// Evaluated in exact integer arithmetic: the Krawtchouk sums cancel
/// massively for long codes.
pub fn macwilliams_transform(dual: &WeightSpectrum) -> Result<WeightSpectrum> {
    if dual.kind() != SpectrumKind::Exact {
        return Err(Error::IncompatibleSpectrum(format!(
            "MacWilliams transform needs an exact spectrum, got {}",
            dual.kind().as_str()
        )));
    }
    if !dual.is_integral() {
        return Err(Error::IncompatibleSpectrum(
            "MacWilliams transform needs integer counts".into(),
        ));
    }
    let n = dual.n();
    let size: BigInt = dual
        .counts()
        .iter()
        .map(|&b| BigInt::from(b.round() as u128))
        .sum();
    if size != BigInt::from(1u8) << dual.k() {
        return Err(Error::IncompatibleSpectrum(format!(
            "counts sum to {size}, expected 2^{}",
            dual.k()
        )));
    }

    let binom = pascal(n);
    let mut out = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut acc = BigInt::zero();
        for (i, &b) in dual.counts().iter().enumerate() {
            if b == 0.0 {
                continue;
            }
            let mut kraw = BigInt::zero();
            for s in 0..=j.min(i) {
                if j - s > n - i {
                    continue;
                }
                let term = &binom[i][s] * &binom[n - i][j - s];
                if s % 2 == 0 {
                    kraw += term;
                } else {
                    kraw -= term;
                }
            }
            acc += kraw * BigInt::from(b.round() as u128);
        }
        if acc.is_negative() {
            return Err(Error::IncompatibleSpectrum(format!(
                "transformed count A_{j} is negative; input is not a code spectrum"
            )));
        }
        if !(&acc % &size).is_zero() {
            return Err(Error::IncompatibleSpectrum(format!(
                "transformed count A_{j} is not an integer; input is not a code spectrum"
            )));
        }
        let a = (acc / &size).to_f64().unwrap_or(f64::INFINITY);
        out.push(a);
    }
    WeightSpectrum::new(n, n - dual.k(), out, SpectrumKind::Exact, None)
}

fn pascal(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut row = vec![BigInt::from(1u8); m + 1];
        for r in 1..m {
            row[r] = &rows[m - 1][r - 1] + &rows[m - 1][r];
        }
        rows.push(row);
    }
    rows
}

/// Average spectrum of the `[n, k]` random linear code ensemble (uniform
/// full-rank parity-check matrix):
/// `A_0 = 1`, `A_d = C(n, d)(2^k - 1)/(2^n - 1)` for `d > 0`.
pub fn ensemble_average(n: usize, k: usize) -> Result<WeightSpectrum> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("ensemble [{n}, {k}] requires 1 <= k <= n")));
    }
    let ln_ratio = ln_two_pow_minus_one(k) - ln_two_pow_minus_one(n);
    let counts = (0..=n)
        .map(|d| {
            if d == 0 {
                1.0
            } else {
                (ln_choose(n, d) + ln_ratio).exp()
            }
        })
        .collect();
    WeightSpectrum::new(n, k, counts, SpectrumKind::EnsembleAverage, None)
}

/// `ln(2^m - 1)` for `m >= 1`.
fn ln_two_pow_minus_one(m: usize) -> f64 {
    m as f64 * std::f64::consts::LN_2 + (-(0.5f64.powi(m as i32))).ln_1p()
}

fn ln_choose(n: usize, d: usize) -> f64 {
    let lg = |x: usize| libm::lgamma(x as f64 + 1.0);
    lg(n) - lg(d) - lg(n - d)
}
