//! Word- and bit-error upper bounds, each minimized over the list radius
//! `d*`.
//!
//! Every bound other than the plain union bound has the shape
//!
//! ```text
//! min over d* of  Σ_{1 <= d <= 2d*} term(d, d*)  +  B(p_b, n, d*+1, n)
//! ```
//!
//! where the binomial tail is the probability that the hard-decision word
//! leaves the radius-`d*` sphere, and the sum bounds the error events of
//! the sub-code of weights `<= 2d*` while it stays inside.

mod provider;
mod terms;

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

pub use provider::{BaseBound, FileBaseBound, UnionBaseBound};
pub use terms::{
    h_branches, h_prime_term, h_term, pairwise_error, pairwise_term, triplet_term,
};

use crate::error::{Error, Result};
use crate::numerics::{binomial_tail, ChannelPoint, ThetaPolicy};
use crate::spectrum::{InputOutputSpectrum, SpectrumKind, WeightSpectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundVariant {
    /// `Σ_d A_d Q(√d/σ)`.
    Union,
    /// Union bound on the sub-code plus the region tail.
    TruncatedUnion,
    /// Pair-wise terms with the outside-band factor.
    PairwiseImproved,
    /// Competitors grouped in pairs (integer spectra only).
    TripletImproved,
    /// `h(A_d)` terms; applies to ensembles.
    UnifiedWord,
    /// `h'(A_d)` terms from the IOWE; bounds the bit-error probability.
    UnifiedBit,
    /// An external base bound on the sub-code plus the region tail.
    GfbtCombined,
}

impl BoundVariant {
    pub const ALL: [BoundVariant; 7] = [
        BoundVariant::Union,
        BoundVariant::TruncatedUnion,
        BoundVariant::PairwiseImproved,
        BoundVariant::TripletImproved,
        BoundVariant::UnifiedWord,
        BoundVariant::UnifiedBit,
        BoundVariant::GfbtCombined,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundVariant::Union => "union",
            BoundVariant::TruncatedUnion => "truncated-union",
            BoundVariant::PairwiseImproved => "pairwise",
            BoundVariant::TripletImproved => "triplet",
            BoundVariant::UnifiedWord => "word",
            BoundVariant::UnifiedBit => "bit",
            BoundVariant::GfbtCombined => "gfbt",
        }
    }
}

/// How `d*` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DStar {
    /// Exhaustive scan over the admissible range.
    #[default]
    Optimize,
    Fixed(usize),
}

/// Value of one bound at one channel point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    /// Raw value; may exceed 1 for the union bound.
    pub value: f64,
    pub d_star_opt: usize,
    /// Nonzero contributions of each weight at the chosen `d*`. For an
    /// opaque base bound the whole base value sits at the cutoff weight.
    pub per_d_terms: BTreeMap<usize, f64>,
    /// `B(p_b, n, d*+1, n)` at the chosen `d*`.
    pub tail_term: f64,
    pub variant: BoundVariant,
}

impl BoundResult {
    pub fn clamped(&self) -> f64 {
        self.value.min(1.0)
    }
}

/// Admissible `d*` values: `[0, n]`, or `[0, d_max/2]` when only weights up
/// to `d_max` are known.
pub fn probe_range(spec: &WeightSpectrum) -> RangeInclusive<usize> {
    match spec.kind() {
        SpectrumKind::Truncated => 0..=spec.known_up_to().min(spec.n()) / 2,
        _ => 0..=spec.n(),
    }
}

/// Exhaustive scan of `objective` over `probe`, returning the minimum and
/// the smallest `d*` attaining it.
pub fn optimize_dstar<F>(mut objective: F, probe: RangeInclusive<usize>) -> Result<(f64, usize)>
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut best: Option<(f64, usize)> = None;
    for d_star in probe {
        let v = objective(d_star)?;
        if best.is_none_or(|(b, _)| v < b) {
            best = Some((v, d_star));
        }
    }
    best.ok_or_else(|| Error::invalid("empty d* probe range"))
}

struct Candidate {
    terms: BTreeMap<usize, f64>,
    tail: f64,
    value: f64,
}

fn assemble<F>(n: usize, d_star: usize, ch: &ChannelPoint, mut term: F) -> Result<Candidate>
where
    F: FnMut(usize) -> Result<f64>,
{
    let cutoff = (2 * d_star).min(n);
    let mut terms = BTreeMap::new();
    let mut sum = 0.0;
    for d in 1..=cutoff {
        let t = term(d)?;
        sum += t;
        if t != 0.0 {
            terms.insert(d, t);
        }
    }
    let tail = binomial_tail(ch.p_b, n as i64, d_star as i64 + 1, n as i64)?;
    Ok(Candidate {
        terms,
        tail,
        value: sum + tail,
    })
}

/// Runs the `d*` selection for an objective built from `term(d, d*)`.
fn minimize<F>(
    n: usize,
    probe: RangeInclusive<usize>,
    ch: &ChannelPoint,
    choice: DStar,
    variant: BoundVariant,
    term: F,
) -> Result<BoundResult>
where
    F: Fn(usize, usize) -> Result<f64>,
{
    let d_star = match choice {
        DStar::Fixed(d) => {
            if !probe.contains(&d) {
                return Err(Error::invalid(format!(
                    "d* = {d} outside the admissible range [{}, {}]",
                    probe.start(),
                    probe.end()
                )));
            }
            d
        }
        DStar::Optimize => {
            optimize_dstar(|ds| Ok(assemble(n, ds, ch, |d| term(d, ds))?.value), probe)?.1
        }
    };
    let c = assemble(n, d_star, ch, |d| term(d, d_star))?;
    Ok(BoundResult {
        value: c.value,
        d_star_opt: d_star,
        per_d_terms: c.terms,
        tail_term: c.tail,
        variant,
    })
}

fn require_untruncated(spec: &WeightSpectrum, what: &str) -> Result<()> {
    if spec.is_truncated() {
        return Err(Error::IncompatibleSpectrum(format!(
            "{what} needs the full weight spectrum, got one truncated at {}",
            spec.known_up_to()
        )));
    }
    Ok(())
}

/// Conventional union bound `Σ_{d>=1} A_d Q(√d/σ)`.
pub fn union_bound(spec: &WeightSpectrum, ch: &ChannelPoint) -> Result<BoundResult> {
    require_untruncated(spec, "the union bound")?;
    let mut terms = BTreeMap::new();
    let mut value = 0.0;
    for d in 1..=spec.n() {
        let t = spec.get(d) * pairwise_error(d, ch.sigma);
        value += t;
        if t != 0.0 {
            terms.insert(d, t);
        }
    }
    Ok(BoundResult {
        value,
        d_star_opt: spec.n(),
        per_d_terms: terms,
        tail_term: 0.0,
        variant: BoundVariant::Union,
    })
}

/// Union bound restricted to weights `<= 2d*`, plus the region tail.
pub fn truncated_union_bound(spec: &WeightSpectrum, ch: &ChannelPoint) -> Result<BoundResult> {
    truncated_union_bound_with(spec, ch, DStar::Optimize)
}

pub fn truncated_union_bound_with(
    spec: &WeightSpectrum,
    ch: &ChannelPoint,
    choice: DStar,
) -> Result<BoundResult> {
    minimize(spec.n(), probe_range(spec), ch, choice, BoundVariant::TruncatedUnion, |d, _| {
        Ok(spec.get(d) * pairwise_error(d, ch.sigma))
    })
}

/// Sum of pair-wise terms with the outside-band factor.
pub fn pairwise_bound(spec: &WeightSpectrum, ch: &ChannelPoint, choice: DStar) -> Result<BoundResult> {
    let n = spec.n();
    minimize(n, probe_range(spec), ch, choice, BoundVariant::PairwiseImproved, |d, ds| {
        pairwise_term(spec.get(d), d, ds, n, ch)
    })
}

/// Sum of paired-competitor terms; the spectrum must hold integer counts.
pub fn triplet_bound(
    spec: &WeightSpectrum,
    ch: &ChannelPoint,
    policy: ThetaPolicy,
    choice: DStar,
) -> Result<BoundResult> {
    if !spec.is_integral() {
        return Err(Error::IncompatibleSpectrum(
            "the paired-competitor bound needs integer counts; use the unified bound for ensembles"
                .into(),
        ));
    }
    let n = spec.n();
    minimize(n, probe_range(spec), ch, choice, BoundVariant::TripletImproved, |d, ds| {
        triplet_term(spec.get(d), d, ds, n, ch, policy)
    })
}

/// Word-error bound from `h(A_d)`; valid for specific codes and ensembles.
pub fn word_error_bound(spec: &WeightSpectrum, ch: &ChannelPoint) -> Result<BoundResult> {
    word_error_bound_with(spec, ch, DStar::Optimize)
}

pub fn word_error_bound_with(
    spec: &WeightSpectrum,
    ch: &ChannelPoint,
    choice: DStar,
) -> Result<BoundResult> {
    let n = spec.n();
    minimize(n, probe_range(spec), ch, choice, BoundVariant::UnifiedWord, |d, ds| {
        h_term(spec.get(d), d, ds, n, ch)
    })
}

/// Bit-error bound from `h'(A_d)`. Ensemble-average IOWEs are refused.
pub fn bit_error_bound(iowe: &InputOutputSpectrum, ch: &ChannelPoint) -> Result<BoundResult> {
    bit_error_bound_with(iowe, ch, DStar::Optimize)
}

pub fn bit_error_bound_with(
    iowe: &InputOutputSpectrum,
    ch: &ChannelPoint,
    choice: DStar,
) -> Result<BoundResult> {
    if iowe.kind() == SpectrumKind::EnsembleAverage {
        return Err(Error::IncompatibleSpectrum(
            "bit-error bounds are not defined for ensemble-average IOWEs".into(),
        ));
    }
    let (n, k) = (iowe.n(), iowe.k());
    let marginal = iowe.weight_spectrum()?;
    minimize(n, probe_range(&marginal), ch, choice, BoundVariant::UnifiedBit, |d, ds| {
        h_prime_term(&iowe.slice(d), d, ds, n, k, ch)
    })
}

/// Combines an arbitrary base bound on the sub-code `C_{2d*}` with the
/// region tail and minimizes over `d*`. Never looser than the base bound on
/// the whole code, and below 1 thanks to the `d* = 0` branch.
pub fn gfbt_combine<P: BaseBound + ?Sized>(
    provider: &P,
    spec: &WeightSpectrum,
    ch: &ChannelPoint,
) -> Result<BoundResult> {
    gfbt_combine_with(provider, spec, ch, DStar::Optimize)
}

pub fn gfbt_combine_with<P: BaseBound + ?Sized>(
    provider: &P,
    spec: &WeightSpectrum,
    ch: &ChannelPoint,
    choice: DStar,
) -> Result<BoundResult> {
    let n = spec.n();
    let probe = probe_range(spec);
    let objective = |d_star: usize| -> Result<Candidate> {
        let base = provider.evaluate(spec, d_star, ch)?;
        if !(base >= 0.0) {
            return Err(Error::Provider {
                d_star,
                msg: format!("base bound returned {base}"),
            });
        }
        let tail = binomial_tail(ch.p_b, n as i64, d_star as i64 + 1, n as i64)?;
        let mut terms = BTreeMap::new();
        if base != 0.0 {
            terms.insert((2 * d_star).min(n), base);
        }
        Ok(Candidate {
            terms,
            tail,
            value: base + tail,
        })
    };
    let d_star = match choice {
        DStar::Fixed(d) if probe.contains(&d) => d,
        DStar::Fixed(d) => {
            return Err(Error::invalid(format!("d* = {d} outside the admissible range")))
        }
        DStar::Optimize => optimize_dstar(|ds| Ok(objective(ds)?.value), probe)?.1,
    };
    let c = objective(d_star)?;
    Ok(BoundResult {
        value: c.value,
        d_star_opt: d_star,
        per_d_terms: c.terms,
        tail_term: c.tail,
        variant: BoundVariant::GfbtCombined,
    })
}
