//! Scalar probability kernels: the Gaussian tail, binomial tails, the
//! two-competitor (triplet) error probability and the angle bound for
//! bipolar vectors.

pub mod quadrature;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Gaussian tail `Q(x) = P(Z > x)` for a standard normal `Z`.
///
/// Evaluated through `erfc`, which keeps full relative precision deep into
/// the upper tail. Underflows to zero near `x = 38.5`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Standard normal CDF.
pub fn phi_cdf(x: f64) -> f64 {
    q_function(-x)
}

/// Probability that a Binomial(`n_total`, `p`) count lies in
/// `[n_low, n_high]`.
///
/// The summation range is clamped to `[0, n_total]`; an empty range gives 0.
/// For `n_total <= 0` there are no trials, so the count is zero with
/// certainty: the result is 1 when `n_low <= 0 <= n_high` and 0 otherwise.
/// Terms are accumulated in the log domain so that long blocks with a small
/// crossover probability do not underflow term by term.
pub fn binomial_tail(p: f64, n_total: i64, n_low: i64, n_high: i64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "binomial_tail: probability {p} outside [0, 1]"
        )));
    }
    if n_total <= 0 {
        return Ok(if n_low <= 0 && 0 <= n_high { 1.0 } else { 0.0 });
    }
    let lo = n_low.max(0);
    let hi = n_high.min(n_total);
    if lo > hi {
        return Ok(0.0);
    }
    if lo == 0 && hi == n_total {
        return Ok(1.0);
    }
    if p == 0.0 {
        return Ok(if lo == 0 { 1.0 } else { 0.0 });
    }
    if p == 1.0 {
        return Ok(if hi == n_total { 1.0 } else { 0.0 });
    }

    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let n = n_total as f64;
    let ln_n_fact = ln_factorial(n);
    let ln_pmf = |m: i64| {
        let m = m as f64;
        ln_n_fact - ln_factorial(m) - ln_factorial(n - m) + m * ln_p + (n - m) * ln_q
    };
    let direct = log_sum_exp((lo..=hi).map(ln_pmf)).exp();
    // A one-sided range holding most of the mass is more accurate as
    // 1 - (complement); this also keeps it strictly below 1.
    if direct > 0.5 && (lo == 0 || hi == n_total) {
        let rest = if lo == 0 { hi + 1..=n_total } else { 0..=lo - 1 };
        let complement = log_sum_exp(rest.map(ln_pmf)).exp();
        return Ok((1.0 - complement).clamp(0.0, 1.0));
    }
    Ok(direct.min(1.0))
}

fn ln_factorial(x: f64) -> f64 {
    if x < 2.0 {
        0.0
    } else {
        libm::lgamma(x + 1.0)
    }
}

/// `ln(sum(exp(x_i)))` without overflow; `-inf` for an empty input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

/// Upper bound on the angle at `u` of the triangle formed by three bipolar
/// vectors `u, v, w` with `d_H(u, v) = d1` and `d_H(u, w) = d2`.
pub fn angle_upper_bound(d1: usize, d2: usize, n: usize) -> Result<f64> {
    for d in [d1, d2] {
        if d == 0 || d > n {
            return Err(Error::invalid(format!(
                "angle_upper_bound: distance {d} outside [1, {n}]"
            )));
        }
    }
    let half_angle = |d: usize| (d as f64 / n as f64).sqrt().acos();
    Ok(FRAC_PI_2.min(half_angle(d1) + half_angle(d2)))
}

/// How the angle between two weight-`d` competitors is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaPolicy {
    /// Always use the non-obtuse bound `π/2`; the triplet probability then
    /// has the closed form `2Q - Q²`.
    #[default]
    RightAngle,
    /// Use `2·arccos√(d/n)` whenever it is below `π/2`; requires numerical
    /// integration.
    Tight,
}

impl ThetaPolicy {
    /// Angle to use for two weight-`d` competitors in a length-`n` code.
    /// May return 0 for `d = n` under the tight policy.
    pub fn theta(self, d: usize, n: usize) -> f64 {
        match self {
            ThetaPolicy::RightAngle => FRAC_PI_2,
            ThetaPolicy::Tight => {
                let half = (d as f64 / n as f64).sqrt().min(1.0).acos();
                if half < FRAC_PI_4 {
                    2.0 * half
                } else {
                    FRAC_PI_2
                }
            }
        }
    }
}

/// Two weight-`d` competitors of the all-zero word at angle `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripletGeometry {
    d: usize,
    n: usize,
    theta: f64,
}

impl TripletGeometry {
    pub fn new(d: usize, n: usize, theta: f64) -> Result<Self> {
        if d == 0 || d > n {
            return Err(Error::invalid(format!(
                "triplet geometry: weight {d} outside [1, {n}]"
            )));
        }
        if !(theta > 0.0 && theta <= FRAC_PI_2) {
            return Err(Error::invalid(format!(
                "triplet geometry: angle {theta} outside (0, π/2]"
            )));
        }
        Ok(TripletGeometry { d, n, theta })
    }

    /// Geometry with the angle chosen by `policy`.
    pub fn from_code(d: usize, n: usize, policy: ThetaPolicy) -> Result<Self> {
        Self::new(d, n, policy.theta(d, n))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Probability that at least one of two weight-`d` competitors at angle
/// `theta` is nearer to the received vector than the transmitted word.
///
/// With `a = √d/σ` the region splits into the half-plane of the second
/// competitor, `Q(a)`, plus the part of the first half-plane outside it.
/// The latter is `φ(a)·∫₀^10 exp(-a t - t²/2)·Φ((a - (a+t)cosθ)/sinθ) dt`
/// after the substitution `ξ = a + t` (in units of σ). Factoring `φ(a)` out
/// of the integrand keeps the quadrature tolerance relative even when the
/// whole probability is tiny.
pub fn triplet_probability(geom: &TripletGeometry, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!(
            "triplet_probability: sigma {sigma} must be positive"
        )));
    }
    let a = (geom.d as f64).sqrt() / sigma;
    let q = q_function(a);
    let density = FRAC_1_SQRT_2PI * (-0.5 * a * a).exp();
    if density == 0.0 {
        return Ok(q);
    }
    let (sin, cos) = geom.theta.sin_cos();
    let integrand = |t: f64| {
        let xi = a + t;
        (-a * t - 0.5 * t * t).exp() * phi_cdf((a - xi * cos) / sin)
    };
    let scaled = quadrature::integrate(integrand, 0.0, 10.0, 1e-15, 1e-13);
    Ok(q + density * scaled)
}

/// Axis convention used to turn an SNR value into a noise level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrConvention {
    /// `σ² = 1 / (2·R·10^(snr/10))` with code rate `R = k/n`.
    #[default]
    EbN0,
    /// `σ² = 1 / (2·10^(snr/10))`.
    EsN0,
    /// The axis value is σ itself.
    SigmaDirect,
}

/// One operating point of the BPSK-AWGN channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelPoint {
    /// Noise standard deviation per dimension.
    pub sigma: f64,
    /// Crossover probability of the hard-decision BSC, `Q(1/σ)`.
    pub p_b: f64,
    /// Axis value this point was built from.
    pub snr_db: f64,
    pub convention: SnrConvention,
}

impl ChannelPoint {
    pub fn from_sigma(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma {sigma} must be positive")));
        }
        Ok(ChannelPoint {
            sigma,
            p_b: q_function(1.0 / sigma),
            snr_db: sigma,
            convention: SnrConvention::SigmaDirect,
        })
    }

    /// Builds a point from an axis value under `convention`; `rate` is only
    /// used for Eb/N0.
    pub fn from_snr(value: f64, convention: SnrConvention, rate: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::invalid(format!("SNR value {value} is not finite")));
        }
        let sigma = match convention {
            SnrConvention::SigmaDirect => value,
            SnrConvention::EsN0 => (0.5 / 10f64.powf(value / 10.0)).sqrt(),
            SnrConvention::EbN0 => {
                if !(rate > 0.0 && rate <= 1.0) {
                    return Err(Error::invalid(format!("code rate {rate} outside (0, 1]")));
                }
                (0.5 / (rate * 10f64.powf(value / 10.0))).sqrt()
            }
        };
        let mut point = Self::from_sigma(sigma)?;
        point.snr_db = value;
        point.convention = convention;
        Ok(point)
    }
}
