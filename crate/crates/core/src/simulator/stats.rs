use serde::Serialize;

/// Wilson score interval for `successes` out of `trials` at `z` standard
/// deviations.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// An empirical frequency with its 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rate {
    pub count: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Rate {
    pub fn new(count: u64, trials: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(count, trials, 1.96);
        Rate {
            count,
            trials,
            rate: if trials == 0 { 0.0 } else { count as f64 / trials as f64 },
            ci_low,
            ci_high,
        }
    }

    /// Half-width of the one-sigma Wilson interval.
    pub fn std_error(&self) -> f64 {
        let (lo, hi) = wilson_interval(self.count, self.trials, 1.0);
        0.5 * (hi - lo)
    }

    /// Whether the estimate is consistent with a true rate of at most
    /// `bound`, allowing `sigmas` Wilson standard errors.
    pub fn at_most(&self, bound: f64, sigmas: f64) -> bool {
        self.rate <= bound + sigmas * self.std_error()
    }

    /// Whether `value` lies within `sigmas` Wilson standard errors.
    pub fn agrees_with(&self, value: f64, sigmas: f64) -> bool {
        (self.rate - value).abs() <= sigmas * self.std_error()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_value() {
        // 10 of 100 at z = 1.96
        let (lo, hi) = wilson_interval(10, 100, 1.96);
        assert!((lo - 0.05523).abs() < 1e-4);
        assert!((hi - 0.17437).abs() < 1e-4);
    }

    #[test]
    fn wilson_zero_successes() {
        let (lo, hi) = wilson_interval(0, 1000, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.01);
        let r = Rate::new(0, 1000);
        assert!(r.std_error() > 0.0);
        assert!(r.at_most(0.0, 3.0));
    }
}
