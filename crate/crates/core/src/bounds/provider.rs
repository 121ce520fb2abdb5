//! Base bounds `T_u(C_{2d*})` for the region combinator.

use std::path::Path;

use super::pairwise_error;
use crate::error::{Error, Result};
use crate::numerics::ChannelPoint;
use crate::spectrum::WeightSpectrum;

/// An upper bound on `Pr{∪_{d <= 2d*} E_d}` that depends only on the
/// sub-code of weights `<= 2d*`.
///
/// Implementations must return 0 for an empty sub-code (`d* = 0`).
pub trait BaseBound: Send + Sync {
    fn evaluate(&self, spectrum: &WeightSpectrum, d_star: usize, ch: &ChannelPoint) -> Result<f64>;

    /// Whether curve drivers may call `evaluate` from several threads at
    /// once. Providers returning `false` are driven sequentially.
    fn parallel_safe(&self) -> bool {
        true
    }
}

/// The conventional union bound on the sub-code.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnionBaseBound;

impl BaseBound for UnionBaseBound {
    fn evaluate(&self, spectrum: &WeightSpectrum, d_star: usize, ch: &ChannelPoint) -> Result<f64> {
        let cutoff = (2 * d_star).min(spectrum.n());
        if cutoff > spectrum.known_up_to() {
            return Err(Error::Provider {
                d_star,
                msg: format!("spectrum known only up to weight {}", spectrum.known_up_to()),
            });
        }
        Ok((1..=cutoff)
            .map(|d| spectrum.get(d) * pairwise_error(d, ch.sigma))
            .sum())
    }
}

/// Precomputed base-bound values read from lines `snr_db d_star value`.
///
/// Lets externally computed bounds (tangential-sphere, Divsalar, ...) be
/// refined by the region technique without reimplementing them. Channel
/// points are matched on their axis value within `1e-9`.
#[derive(Debug, Clone, Default)]
pub struct FileBaseBound {
    entries: Vec<(f64, usize, f64)>,
}

impl FileBaseBound {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(f64, usize, f64)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lno = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [snr, ds, value] = fields[..] else {
                return Err(Error::parse(lno, "expected `snr_db d_star value`"));
            };
            let snr: f64 = snr
                .parse()
                .map_err(|_| Error::parse(lno, format!("bad SNR `{snr}`")))?;
            let ds: usize = ds
                .parse()
                .map_err(|_| Error::parse(lno, format!("bad d* `{ds}`")))?;
            let value: f64 = value
                .parse()
                .map_err(|_| Error::parse(lno, format!("bad value `{value}`")))?;
            if !(value >= 0.0 && snr.is_finite()) {
                return Err(Error::parse(lno, "base bound values must be non-negative"));
            }
            if entries
                .iter()
                .any(|&(s, d, _)| d == ds && (s - snr).abs() <= 1e-9)
            {
                return Err(Error::parse(lno, format!("duplicate entry for ({snr}, {ds})")));
            }
            entries.push((snr, ds, value));
        }
        Ok(FileBaseBound { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl BaseBound for FileBaseBound {
    fn evaluate(&self, _spectrum: &WeightSpectrum, d_star: usize, ch: &ChannelPoint) -> Result<f64> {
        if d_star == 0 {
            return Ok(0.0);
        }
        self.entries
            .iter()
            .find(|&&(s, d, _)| d == d_star && (s - ch.snr_db).abs() <= 1e-9)
            .map(|&(_, _, v)| v)
            .ok_or_else(|| Error::Provider {
                d_star,
                msg: format!("no base-bound value for SNR {}", ch.snr_db),
            })
    }
}
