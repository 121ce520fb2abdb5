use std::fmt::Write as _;
use std::path::PathBuf;

use mlbound::bounds::{bit_error_bound, word_error_bound};
use mlbound::numerics::{ChannelPoint, SnrConvention};
use mlbound::simulator::{simulate, SimConfig, SimReport};
use mlbound::spectrum::enumerate_spectrum;
use serde::Serialize;

use crate::args::convention_name;
use crate::bound::load_code;
use crate::Invalid;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateRequest {
    pub code: PathBuf,
    pub points: Vec<f64>,
    pub convention: SnrConvention,
    pub trials: u64,
    pub seed: u64,
    pub dstar: Option<usize>,
    pub max_k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimPoint {
    pub snr_db: f64,
    pub sigma: f64,
    pub word_error_bound: f64,
    pub word_error_bound_d_star: usize,
    pub bit_error_bound: f64,
    pub report: SimReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationOutput {
    pub tool: String,
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub snr_convention: &'static str,
    pub trials: u64,
    pub seed: u64,
    pub points: Vec<SimPoint>,
}

/// Simulates every grid point in order; each point reuses the same seed,
/// so points differ only through σ.
pub fn run_simulation(req: &SimulateRequest) -> anyhow::Result<SimulationOutput> {
    let code = load_code(&req.code)?;
    if let Some(d) = req.dstar {
        if d > code.n() {
            return Err(Invalid(format!("d* = {d} outside [0, {}]", code.n())).into());
        }
    }
    let iowe = enumerate_spectrum(&code, req.max_k)?;
    let weights = iowe.weight_spectrum()?;
    let mut points = Vec::with_capacity(req.points.len());
    for &snr in &req.points {
        let ch = ChannelPoint::from_snr(snr, req.convention, code.rate())?;
        let word = word_error_bound(&weights, &ch)?;
        let bit = bit_error_bound(&iowe, &ch)?;
        let mut cfg = SimConfig::new(
            code.clone(),
            ch.sigma,
            req.dstar.unwrap_or(word.d_star_opt),
            req.trials,
            req.seed,
        );
        cfg.max_k_for_ml = req.max_k;
        points.push(SimPoint {
            snr_db: snr,
            sigma: ch.sigma,
            word_error_bound: word.value,
            word_error_bound_d_star: word.d_star_opt,
            bit_error_bound: bit.value,
            report: simulate(&cfg)?,
        });
    }
    Ok(SimulationOutput {
        tool: format!("mlbound {}", env!("CARGO_PKG_VERSION")),
        code: req.code.display().to_string(),
        n: code.n(),
        k: code.k(),
        snr_convention: convention_name(req.convention),
        trials: req.trials,
        seed: req.seed,
        points,
    })
}

impl SimulationOutput {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}", self.tool);
        let _ = writeln!(s, "# code={} snr_convention={}", self.code, self.snr_convention);
        for p in &self.points {
            let _ = writeln!(s);
            let _ = writeln!(s, "snr                {}", p.snr_db);
            let _ = writeln!(
                s,
                "word_error_bound   {:e} (d*={})",
                p.word_error_bound, p.word_error_bound_d_star
            );
            let _ = writeln!(s, "bit_error_bound    {:e}", p.bit_error_bound);
            s.push_str(&p.report.to_text());
        }
        s
    }
}
