//! Command-line front end: spectra, bound curves over SNR grids,
//! simulations and comparison tables.

pub mod args;
pub mod bound;
pub mod compare;
pub mod config;
pub mod curve;
pub mod simulate;

use std::path::{Path, PathBuf};

use anyhow::Context;
use mlbound::spectrum::{
    enumerate_spectrum, ensemble_average, format_spectrum, macwilliams_transform, SpectrumFile,
    DEFAULT_MAX_ENUM_K,
};

pub use args::Cli;
use args::{BoundArgs, Command, CompareArgs, FormatArg, SimulateArgs, SpectrumArgs, ThetaArg};
use bound::{compute_curve, load_code, CurveRequest, SpectrumSource};
use compare::{compare, load_curve, split_label, Dominance, SimSeries};
use config::Config;
use curve::SnrGrid;
use simulate::{run_simulation, SimulateRequest};

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RESOURCE_GUARD: i32 = 3;
pub const EXIT_DOMINANCE: i32 = 4;

/// A rejected argument or input.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

/// Raised by `compare --strict` when a declared relation fails.
#[derive(Debug)]
pub struct DominanceViolated(pub usize);

impl std::fmt::Display for DominanceViolated {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} dominance violation(s)", self.0)
    }
}

impl std::error::Error for DominanceViolated {}

/// Exit status for an error: 2 for invalid input, 3 for resource guards,
/// 4 for strict dominance failures, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<mlbound::Error>() {
            return match e {
                mlbound::Error::ResourceGuard(_) => EXIT_RESOURCE_GUARD,
                mlbound::Error::Io(_) => 1,
                _ => EXIT_VALIDATION,
            };
        }
        if cause.is::<Invalid>() {
            return EXIT_VALIDATION;
        }
        if cause.is::<DominanceViolated>() {
            return EXIT_DOMINANCE;
        }
    }
    1
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(workers) = config.pick(cli.workers, "workers")? {
        if workers == 0 {
            return Err(Invalid("worker count must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match cli.command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Bound(a) => cmd_bound(a, &config),
        Command::Simulate(a) => cmd_simulate(a, &config),
        Command::Compare(a) => cmd_compare(a),
    }
}

fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn cmd_spectrum(a: SpectrumArgs) -> anyhow::Result<()> {
    let max_k = a.max_k.unwrap_or(DEFAULT_MAX_ENUM_K);
    let mut spec: SpectrumFile = if let Some(p) = &a.enumerate {
        enumerate_spectrum(&load_code(p)?, max_k)?.into()
    } else if let Some(p) = &a.macwilliams {
        let dual = enumerate_spectrum(&load_code(p)?, max_k)?.weight_spectrum()?;
        macwilliams_transform(&dual)?.into()
    } else if let Some(nk) = &a.ensemble {
        ensemble_average(nk[0], nk[1])?.into()
    } else {
        return Err(Invalid("no spectrum source given".into()).into());
    };
    if a.weight_only || a.truncate.is_some() {
        spec = spec.weight_spectrum()?.into();
    }
    if let Some(d_max) = a.truncate {
        spec = spec.weight_spectrum()?.truncate(d_max)?.into();
    }
    emit(a.output.as_deref(), &format_spectrum(&spec))
}

pub fn curve_request(a: &BoundArgs, cfg: &Config) -> anyhow::Result<CurveRequest> {
    let cli_sources = [a.spectrum.is_some(), a.enumerate.is_some(), a.ensemble.is_some()];
    let use_cli = cli_sources.iter().any(|&s| s);
    let (spectrum, enumerate, ensemble) = if use_cli {
        (
            a.spectrum.clone(),
            a.enumerate.clone(),
            a.ensemble.as_ref().map(|v| (v[0], v[1])),
        )
    } else {
        (
            cfg.pick::<PathBuf>(None, "spectrum")?,
            cfg.pick::<PathBuf>(None, "enumerate")?,
            cfg.pick_pair(None, "ensemble")?,
        )
    };
    let mut sources = Vec::new();
    if let Some(p) = spectrum {
        sources.push(SpectrumSource::File(p));
    }
    if let Some(p) = enumerate {
        sources.push(SpectrumSource::Enumerate(p));
    }
    if let Some((n, k)) = ensemble {
        sources.push(SpectrumSource::Ensemble(n, k));
    }
    let source = match sources.len() {
        1 => sources.pop().expect("one source"),
        0 => {
            return Err(Invalid("give one of --spectrum, --enumerate or --ensemble".into()).into())
        }
        _ => {
            return Err(Invalid(
                "conflicting spectrum sources: give only one of --spectrum, --enumerate, --ensemble"
                    .into(),
            )
            .into())
        }
    };
    let grid = SnrGrid::new(
        cfg.pick(a.snr_start, "snr_start")?.unwrap_or(0.0),
        cfg.pick(a.snr_stop, "snr_stop")?.unwrap_or(10.0),
        cfg.pick(a.snr_step, "snr_step")?.unwrap_or(0.5),
    )?;
    Ok(CurveRequest {
        variant: cfg
            .pick_enum(a.variant, "variant")?
            .unwrap_or(args::VariantArg::Word)
            .into(),
        source,
        grid,
        convention: cfg
            .pick_enum(a.snr_convention, "snr_convention")?
            .map(Into::into)
            .unwrap_or_default(),
        theta: cfg
            .pick_enum(a.theta_policy, "theta_policy")?
            .unwrap_or(ThetaArg::RightAngle)
            .into(),
        dstar: cfg.pick(a.dstar, "dstar")?,
        base_bound: cfg.pick(a.base_bound.clone(), "base_bound")?,
        truncate: cfg.pick(a.truncate, "truncate")?,
        max_k: cfg.pick(a.max_k, "max_k")?.unwrap_or(DEFAULT_MAX_ENUM_K),
    })
}

pub fn cmd_bound(a: BoundArgs, cfg: &Config) -> anyhow::Result<()> {
    let req = curve_request(&a, cfg)?;
    let curve = compute_curve(&req)?;
    emit(a.output.as_deref(), &curve.to_csv())
}

pub fn simulate_request(a: &SimulateArgs, cfg: &Config) -> anyhow::Result<SimulateRequest> {
    let code = cfg
        .pick(a.code.clone(), "code")?
        .ok_or_else(|| Invalid("--code is required".into()))?;
    let points = match cfg.pick(a.snr, "snr")? {
        Some(v) if a.snr_start.is_none() && a.snr_stop.is_none() => SnrGrid::single(v)?.points(),
        _ => SnrGrid::new(
            cfg.pick(a.snr_start, "snr_start")?
                .ok_or_else(|| Invalid("give --snr or --snr-start/--snr-stop".into()))?,
            cfg.pick(a.snr_stop, "snr_stop")?
                .ok_or_else(|| Invalid("give --snr or --snr-start/--snr-stop".into()))?,
            cfg.pick(a.snr_step, "snr_step")?.unwrap_or(1.0),
        )?
        .points(),
    };
    Ok(SimulateRequest {
        code,
        points,
        convention: cfg
            .pick_enum(a.snr_convention, "snr_convention")?
            .map(Into::into)
            .unwrap_or_default(),
        trials: cfg.pick(a.trials, "trials")?.unwrap_or(10_000),
        seed: cfg.pick(a.seed, "seed")?.unwrap_or(1),
        dstar: cfg.pick(a.dstar, "dstar")?,
        max_k: cfg.pick(a.max_k, "max_k")?.unwrap_or(DEFAULT_MAX_ENUM_K),
    })
}

pub fn cmd_simulate(a: SimulateArgs, cfg: &Config) -> anyhow::Result<()> {
    let req = simulate_request(&a, cfg)?;
    let out = run_simulation(&req)?;
    let text = match cfg.pick_enum(a.format, "format")?.unwrap_or(FormatArg::Text) {
        FormatArg::Text => out.to_text(),
        FormatArg::Json => out.to_json(),
    };
    emit(a.output.as_deref(), &text)
}

pub fn cmd_compare(a: CompareArgs) -> anyhow::Result<()> {
    let curves = a
        .curve
        .iter()
        .map(|arg| {
            let (label, path) = split_label(arg)?;
            Ok((label, load_curve(&path)?))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let sims = a
        .sim
        .iter()
        .map(|arg| {
            let (label, path) = split_label(arg)?;
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading simulation report {path}"))?;
            SimSeries::from_json(&label, &text, a.sim_metric)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let dominance = a
        .dominance
        .iter()
        .map(|d| Dominance::parse(d))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let result = compare(&curves, &sims, &dominance)?;
    emit(a.output.as_deref(), &result.text)?;
    if result.violations > 0 {
        eprintln!("mlbound: {} dominance violation(s)", result.violations);
        if a.strict {
            return Err(DominanceViolated(result.violations).into());
        }
    }
    Ok(())
}
