use std::path::PathBuf;

use anyhow::Context;
use mlbound::bounds::{
    bit_error_bound_with, gfbt_combine_with, pairwise_bound, probe_range, triplet_bound,
    truncated_union_bound_with, union_bound, word_error_bound_with, BaseBound, BoundResult,
    BoundVariant, DStar, FileBaseBound, UnionBaseBound,
};
use mlbound::numerics::{ChannelPoint, SnrConvention, ThetaPolicy};
use mlbound::spectrum::{
    enumerate_spectrum, ensemble_average, load_spectrum, LinearCode, SpectrumFile, WeightSpectrum,
};
use rayon::prelude::*;

use crate::args::{convention_name, theta_name};
use crate::curve::{Curve, CurveRow, SnrGrid};
use crate::Invalid;

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSource {
    File(PathBuf),
    Enumerate(PathBuf),
    Ensemble(usize, usize),
}

impl SpectrumSource {
    pub fn describe(&self) -> String {
        match self {
            SpectrumSource::File(p) => format!("spectrum:{}", p.display()),
            SpectrumSource::Enumerate(p) => format!("enumerate:{}", p.display()),
            SpectrumSource::Ensemble(n, k) => format!("ensemble:{n},{k}"),
        }
    }

    pub fn load(&self, max_k: usize) -> anyhow::Result<SpectrumFile> {
        Ok(match self {
            SpectrumSource::File(p) => {
                load_spectrum(p).with_context(|| format!("reading spectrum {}", p.display()))?
            }
            SpectrumSource::Enumerate(p) => enumerate_spectrum(&load_code(p)?, max_k)?.into(),
            SpectrumSource::Ensemble(n, k) => ensemble_average(*n, *k)?.into(),
        })
    }
}

pub fn load_code(path: &std::path::Path) -> anyhow::Result<LinearCode> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading generator {}", path.display()))?;
    LinearCode::parse(&text).with_context(|| format!("parsing generator {}", path.display()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRequest {
    pub variant: BoundVariant,
    pub source: SpectrumSource,
    pub grid: SnrGrid,
    pub convention: SnrConvention,
    pub theta: ThetaPolicy,
    pub dstar: Option<usize>,
    pub base_bound: Option<PathBuf>,
    pub truncate: Option<usize>,
    pub max_k: usize,
}

/// Evaluates `variant` at one channel point.
pub fn evaluate(
    variant: BoundVariant,
    spectrum: &SpectrumFile,
    weights: &WeightSpectrum,
    ch: &ChannelPoint,
    theta: ThetaPolicy,
    choice: DStar,
    provider: &dyn BaseBound,
) -> mlbound::Result<BoundResult> {
    match variant {
        BoundVariant::Union => union_bound(weights, ch),
        BoundVariant::TruncatedUnion => truncated_union_bound_with(weights, ch, choice),
        BoundVariant::PairwiseImproved => pairwise_bound(weights, ch, choice),
        BoundVariant::TripletImproved => triplet_bound(weights, ch, theta, choice),
        BoundVariant::UnifiedWord => word_error_bound_with(weights, ch, choice),
        BoundVariant::UnifiedBit => match spectrum {
            SpectrumFile::Iowe(iowe) => bit_error_bound_with(iowe, ch, choice),
            SpectrumFile::Weight(_) => Err(mlbound::Error::IncompatibleSpectrum(
                "the bit-error bound needs an input-output weight enumerator (iowe file or --enumerate)"
                    .into(),
            )),
        },
        BoundVariant::GfbtCombined => gfbt_combine_with(provider, weights, ch, choice),
    }
}

pub fn compute_curve(req: &CurveRequest) -> anyhow::Result<Curve> {
    let mut spectrum = req.source.load(req.max_k)?;
    if let Some(d_max) = req.truncate {
        match &spectrum {
            SpectrumFile::Weight(w) => spectrum = w.truncate(d_max)?.into(),
            SpectrumFile::Iowe(_) if req.variant == BoundVariant::UnifiedBit => {
                return Err(Invalid("--truncate applies to weight spectra only".into()).into())
            }
            SpectrumFile::Iowe(_) => spectrum = spectrum.weight_spectrum()?.truncate(d_max)?.into(),
        }
    }
    let weights = spectrum.weight_spectrum()?;
    let n = weights.n();
    if let Some(d) = req.dstar {
        if req.variant == BoundVariant::Union {
            return Err(Invalid("the union bound has no d* parameter".into()).into());
        }
        if d > n {
            return Err(Invalid(format!("d* = {d} outside [0, {n}]")).into());
        }
    }
    if req.base_bound.is_some() && req.variant != BoundVariant::GfbtCombined {
        return Err(Invalid("--base-bound only applies to the gfbt variant".into()).into());
    }
    let provider: Box<dyn BaseBound> = match &req.base_bound {
        Some(p) => Box::new(
            FileBaseBound::load(p).with_context(|| format!("reading base bound {}", p.display()))?,
        ),
        None => Box::new(UnionBaseBound),
    };
    let choice = req.dstar.map_or(DStar::Optimize, DStar::Fixed);
    let rate = weights.rate();
    let point = |snr: &f64| -> anyhow::Result<CurveRow> {
        let ch = ChannelPoint::from_snr(*snr, req.convention, rate)?;
        let r = evaluate(req.variant, &spectrum, &weights, &ch, req.theta, choice, provider.as_ref())
            .with_context(|| format!("evaluating {} at {snr}", req.variant.as_str()))?;
        Ok(CurveRow {
            snr_db: *snr,
            sigma: ch.sigma,
            raw_value: r.value,
            clamped_value: r.clamped(),
            d_star_opt: r.d_star_opt,
        })
    };
    let points = req.grid.points();
    let rows = if provider.parallel_safe() {
        points.par_iter().map(point).collect::<anyhow::Result<Vec<_>>>()?
    } else {
        points.iter().map(point).collect::<anyhow::Result<Vec<_>>>()?
    };

    let probe = probe_range(&weights);
    let mut meta = vec![
        ("command".to_string(), "bound".to_string()),
        ("variant".into(), req.variant.as_str().into()),
        ("source".into(), req.source.describe()),
        ("n".into(), n.to_string()),
        ("k".into(), weights.k().to_string()),
        ("kind".into(), weights.kind().as_str().into()),
    ];
    if let Some(d_max) = weights.d_max() {
        meta.push(("d_max".into(), d_max.to_string()));
    }
    meta.push(("snr_convention".into(), convention_name(req.convention).into()));
    meta.push(("theta_policy".into(), theta_name(req.theta).into()));
    meta.push((
        "dstar".into(),
        req.dstar.map_or("optimize".into(), |d| d.to_string()),
    ));
    meta.push(("probe".into(), format!("{}..={}", probe.start(), probe.end())));
    if let Some(p) = &req.base_bound {
        meta.push(("base_bound".into(), p.display().to_string()));
    }
    Ok(Curve { meta, rows })
}
