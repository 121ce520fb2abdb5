//! Binary linear block codes given by a generator matrix over GF(2).
//!
//! Vectors of length `n <= 64` are packed into a `u64`; bit `t` holds
//! coordinate `t`.

use crate::error::{Error, Result};

pub const MAX_LENGTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    n: usize,
    rows: Vec<u64>,
}

impl LinearCode {
    /// Builds a code from `k` generator rows; the rows must be linearly
    /// independent.
    pub fn new(n: usize, rows: Vec<u64>) -> Result<Self> {
        if n == 0 || n > MAX_LENGTH {
            return Err(Error::invalid(format!(
                "block length {n} outside [1, {MAX_LENGTH}]"
            )));
        }
        let k = rows.len();
        if k == 0 || k > n {
            return Err(Error::invalid(format!("dimension {k} outside [1, {n}]")));
        }
        let mask = low_mask(n);
        if let Some(r) = rows.iter().position(|&r| r & !mask != 0) {
            return Err(Error::invalid(format!("generator row {r} exceeds length {n}")));
        }
        let rank = rref(&rows, n).0.len();
        if rank != k {
            return Err(Error::invalid(format!(
                "generator has rank {rank}, expected {k}"
            )));
        }
        Ok(LinearCode { n, rows })
    }

    /// Systematic generator of the cyclic code with generator polynomial
    /// `poly` (bit `i` is the coefficient of `x^i`, degree `n - k`).
    ///
    /// Parity occupies coordinates `0..n-k`, the message `n-k..n`.
    pub fn cyclic(n: usize, k: usize, poly: u64) -> Result<Self> {
        if n == 0 || n > MAX_LENGTH || k == 0 || k >= n {
            return Err(Error::invalid(format!("cyclic code [{n}, {k}] not supported")));
        }
        let r = n - k;
        if poly == 0 || 63 - poly.leading_zeros() as usize != r || poly & 1 == 0 {
            return Err(Error::invalid(format!(
                "generator polynomial {poly:#x} must have degree {r} and a constant term"
            )));
        }
        // x^n - 1 must be divisible by g(x)
        if poly_mod(1u128 << n | 1, poly) != 0 {
            return Err(Error::invalid(format!(
                "{poly:#x} does not divide x^{n} + 1"
            )));
        }
        let rows = (0..k)
            .map(|i| {
                let shifted = 1u128 << (r + i);
                (shifted as u64) | poly_mod(shifted, poly)
            })
            .collect();
        Self::new(n, rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n as f64
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Codeword for message `msg` (bit `j` selects row `j`).
    pub fn encode(&self, msg: u64) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .filter(|(j, _)| msg >> j & 1 == 1)
            .fold(0, |acc, (_, &r)| acc ^ r)
    }

    /// A generator matrix of the dual code.
    pub fn dual(&self) -> Result<Self> {
        let (pivots, reduced) = rref(&self.rows, self.n);
        if pivots.len() == self.n {
            return Err(Error::invalid("the dual of the universe code is trivial"));
        }
        let rows = (0..self.n)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = 1u64 << free;
                for (row, &p) in reduced.iter().zip(pivots.iter()) {
                    if row >> free & 1 == 1 {
                        v |= 1 << p;
                    }
                }
                v
            })
            .collect();
        Self::new(self.n, rows)
    }

    /// Parses the generator text format: a header line `n k`, then `k` rows
    /// of `n` characters from `{0, 1}`. Blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing `n k` header"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<Result<_, _>>()
            .map_err(|_| Error::parse(hline, format!("bad header `{header}`")))?;
        let [n, k] = dims[..] else {
            return Err(Error::parse(hline, format!("bad header `{header}`")));
        };
        if n == 0 || n > MAX_LENGTH {
            return Err(Error::parse(hline, format!("block length {n} unsupported")));
        }
        let mut rows = Vec::with_capacity(k);
        for (lno, line) in lines {
            let bits: String = line.chars().filter(|c| !c.is_whitespace()).collect();
            if bits.len() != n || !bits.chars().all(|c| c == '0' || c == '1') {
                return Err(Error::parse(
                    lno,
                    format!("expected {n} characters from {{0,1}}"),
                ));
            }
            let row = bits
                .chars()
                .enumerate()
                .filter(|&(_, c)| c == '1')
                .fold(0u64, |acc, (t, _)| acc | 1 << t);
            rows.push(row);
        }
        if rows.len() != k {
            return Err(Error::parse(
                hline,
                format!("header declares {k} rows, found {}", rows.len()),
            ));
        }
        Self::new(n, rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.k());
        for &row in &self.rows {
            out.extend((0..self.n).map(|t| if row >> t & 1 == 1 { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }
}

pub(crate) fn low_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn poly_mod(mut a: u128, g: u64) -> u64 {
    let g = g as u128;
    let dg = 127 - g.leading_zeros();
    while a != 0 && 127 - a.leading_zeros() >= dg {
        let shift = 127 - a.leading_zeros() - dg;
        a ^= g << shift;
    }
    a as u64
}

/// Reduced row echelon form; returns pivot columns and the reduced rows.
fn rref(rows: &[u64], n: usize) -> (Vec<usize>, Vec<u64>) {
    let mut m: Vec<u64> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| m[i] >> c & 1 == 1) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r];
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && *row >> c & 1 == 1 {
                *row ^= pivot;
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (pivots, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamming74() -> LinearCode {
        LinearCode::cyclic(7, 4, 0b1011).unwrap()
    }

    #[test]
    fn rejects_dependent_rows() {
        assert!(LinearCode::new(4, vec![0b0011, 0b0110, 0b0101]).is_err());
        assert!(LinearCode::new(4, vec![0b10011]).is_err());
        assert!(LinearCode::new(4, vec![]).is_err());
    }

    #[test]
    fn cyclic_generator_is_systematic() {
        let c = hamming74();
        for (i, &row) in c.rows().iter().enumerate() {
            assert_eq!(row >> 3, 1 << i);
        }
        assert!(LinearCode::cyclic(7, 4, 0b1111).is_err());
    }

    #[test]
    fn dual_is_orthogonal() {
        let c = hamming74();
        let d = c.dual().unwrap();
        assert_eq!(d.k(), 3);
        for &a in c.rows() {
            for &b in d.rows() {
                assert_eq!((a & b).count_ones() % 2, 0);
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let c = hamming74();
        assert_eq!(LinearCode::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn parse_diagnostics() {
        let err = LinearCode::parse("3 1\n1021\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = LinearCode::parse("3 2\n101\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(LinearCode::parse("").is_err());
    }
}
