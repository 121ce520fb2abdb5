//! Per-weight contributions `Pr{E_d, W_H(ŷ) <= d*}` upper bounds.
//!
//! Every term uses the factor `B(p_b, m, 0, d*-1)`: the probability that the
//! `m` coordinates outside the competitors' supports carry fewer than `d*`
//! hard-decision errors. A competitor can only win if at least one
//! hard-decision error falls inside its support.

use crate::error::{Error, Result};
use crate::numerics::{
    binomial_tail, q_function, triplet_probability, ChannelPoint, ThetaPolicy, TripletGeometry,
};
use crate::spectrum::is_integral;

/// `Q(√d/σ)`, the pair-wise error probability of one weight-`d` competitor.
pub fn pairwise_error(d: usize, sigma: f64) -> f64 {
    q_function((d as f64).sqrt() / sigma)
}

/// `B(p_b, len, 0, d* - 1)`; `len` may be negative (see `binomial_tail`).
fn outside_band(ch: &ChannelPoint, len: i64, d_star: usize) -> Result<f64> {
    binomial_tail(ch.p_b, len, 0, d_star as i64 - 1)
}

fn check_weight(d: usize, d_star: usize, n: usize) -> Result<()> {
    if d == 0 || d > n {
        return Err(Error::invalid(format!("weight {d} outside [1, {n}]")));
    }
    if d_star > n {
        return Err(Error::invalid(format!("d* = {d_star} exceeds n = {n}")));
    }
    Ok(())
}

fn check_count(a_d: f64) -> Result<()> {
    if !(a_d >= 0.0 && a_d.is_finite()) {
        return Err(Error::invalid(format!("A_d = {a_d} is not a count")));
    }
    Ok(())
}

/// `A_d · Q(√d/σ) · B(p_b, n-d, 0, d*-1)`.
pub fn pairwise_term(a_d: f64, d: usize, d_star: usize, n: usize, ch: &ChannelPoint) -> Result<f64> {
    check_weight(d, d_star, n)?;
    check_count(a_d)?;
    let b = outside_band(ch, n as i64 - d as i64, d_star)?;
    Ok(a_d * pairwise_error(d, ch.sigma) * b)
}

/// Probability that one of two weight-`d` competitors wins, under `policy`.
fn pair_union(d: usize, n: usize, sigma: f64, policy: ThetaPolicy) -> Result<f64> {
    let q = pairwise_error(d, sigma);
    let theta = policy.theta(d, n);
    if theta == std::f64::consts::FRAC_PI_2 {
        Ok(2.0 * q - q * q)
    } else if theta == 0.0 {
        // coincident half-spaces
        Ok(q)
    } else {
        triplet_probability(&TripletGeometry::new(d, n, theta)?, sigma)
    }
}

/// Bound from grouping the `A_d` competitors in pairs.
///
/// Even `A_d`: `(A_d/2)·P₂·B(p_b, n-2d, 0, d*-1)`; odd `A_d`: the unpaired
/// competitor contributes `Q·B(p_b, n-d, 0, d*-1)`. `P₂` is the two-competitor
/// error probability, `2Q - Q²` under the right-angle policy.
pub fn triplet_term(
    a_d: f64,
    d: usize,
    d_star: usize,
    n: usize,
    ch: &ChannelPoint,
    policy: ThetaPolicy,
) -> Result<f64> {
    check_weight(d, d_star, n)?;
    check_count(a_d)?;
    if !is_integral(a_d) {
        return Err(Error::IncompatibleSpectrum(format!(
            "pairing bound needs an integer A_{d}, got {a_d}"
        )));
    }
    let count = a_d.round();
    let pairs = (count / 2.0).floor();
    let pair = pair_union(d, n, ch.sigma, policy)?;
    let b_pair = outside_band(ch, n as i64 - 2 * d as i64, d_star)?;
    let mut value = pairs * pair * b_pair;
    if count % 2.0 == 1.0 {
        value += pairwise_error(d, ch.sigma) * outside_band(ch, n as i64 - d as i64, d_star)?;
    }
    Ok(value)
}

/// The two candidate expressions combined by [`h_term`]:
/// `(A_d·Q·B(n-d), (A_d-1)(Q - Q²/2)·B(n-2d) + Q)`.
pub fn h_branches(
    a_d: f64,
    d: usize,
    d_star: usize,
    n: usize,
    ch: &ChannelPoint,
) -> Result<(f64, f64)> {
    check_weight(d, d_star, n)?;
    check_count(a_d)?;
    let q = pairwise_error(d, ch.sigma);
    let b_single = outside_band(ch, n as i64 - d as i64, d_star)?;
    let b_pair = outside_band(ch, n as i64 - 2 * d as i64, d_star)?;
    let pairwise = a_d * q * b_single;
    let paired = (a_d - 1.0) * (q - 0.5 * q * q) * b_pair + q;
    Ok((pairwise, paired))
}

/// Ensemble-safe per-weight bound: the smaller of the pair-wise term and
/// the paired form whose unpaired competitor is charged `Q` without a band
/// factor. Valid for real-valued (average) `A_d`.
pub fn h_term(a_d: f64, d: usize, d_star: usize, n: usize, ch: &ChannelPoint) -> Result<f64> {
    let (pairwise, paired) = h_branches(a_d, d, d_star, n, ch)?;
    Ok(pairwise.min(paired))
}

/// Bit-error analogue of [`h_term`] from the IOWE slice `i ↦ A_{i,d}`.
///
/// Uses `A'_d = Σ_i (i/k)·A_{i,d}` for the pair-wise branch and scales the
/// paired branch by `î_d/k`, `î_d` being the largest input weight present.
pub fn h_prime_term(
    slice: &[f64],
    d: usize,
    d_star: usize,
    n: usize,
    k: usize,
    ch: &ChannelPoint,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if let Some(a) = slice.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
        return Err(Error::invalid(format!("negative or non-finite IOWE count {a}")));
    }
    if slice.len() > k + 1 && slice[k + 1..].iter().any(|&a| a != 0.0) {
        return Err(Error::invalid(format!("input weight above k = {k}")));
    }
    let Some(i_hat) = slice.iter().rposition(|&a| a > 0.0) else {
        check_weight(d, d_star, n)?;
        return Ok(0.0);
    };
    let a_d: f64 = slice.iter().sum();
    let a_prime: f64 = slice
        .iter()
        .enumerate()
        .map(|(i, &a)| i as f64 / k as f64 * a)
        .sum();
    let (_, paired) = h_branches(a_d, d, d_star, n, ch)?;
    let q = pairwise_error(d, ch.sigma);
    let b_single = outside_band(ch, n as i64 - d as i64, d_star)?;
    let pairwise = a_prime * q * b_single;
    Ok(pairwise.min(i_hat as f64 / k as f64 * paired))
}
