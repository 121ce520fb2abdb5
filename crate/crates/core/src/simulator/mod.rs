//! Monte Carlo over BPSK-AWGN with brute-force ML decoding and the
//! hard-decision list decoder.
//!
//! Bit 0 maps to `+1`, bit 1 to `-1`. For any received `y` the squared
//! distance to codeword `c` equals a constant plus `4·m(c)` with
//! `m(c) = Σ_{t ∈ supp c} y_t`, so ML decoding is `argmin m(c)`.

mod noise;
mod stats;

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

pub use noise::NoiseSource;
pub use stats::{wilson_interval, Rate};

use crate::error::{Error, Result};
use crate::spectrum::{gray_walk, minimum_distance, LinearCode, DEFAULT_MAX_ENUM_K};

/// Default ceiling on the `2^k · trials` decoding work of one run.
pub const DEFAULT_MAX_WORK: f64 = 1e13;

const TRIALS_PER_TASK: u64 = 1024;

/// Hard decision of Algorithm 1: `y_t <= 0` maps to 1.
pub fn hard_decision(y: &[f64]) -> u64 {
    y.iter()
        .enumerate()
        .filter(|(_, &v)| v <= 0.0)
        .fold(0u64, |acc, (t, _)| acc | 1 << t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MlDecision {
    /// Message index of the decoded codeword.
    pub index: u64,
    pub codeword: u64,
    /// Another codeword attained the same metric.
    pub tie: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListDecision {
    Decoded { index: u64, codeword: u64 },
    Failure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ListOutcome {
    CorrectInListWon,
    CorrectInListLost,
    NotInList,
}

/// Result of one trial with the all-zero codeword transmitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub ml_word_error: bool,
    pub ml_bit_errors: u32,
    pub hard_decision_weight: usize,
    pub list_outcome: ListOutcome,
    pub nearest_competitor_weight: Option<usize>,
    /// Bit `d` set iff some weight-`d` codeword is strictly nearer than
    /// the transmitted one (event `E_d`).
    pub events: u128,
    pub tie: bool,
}

impl TrialOutcome {
    pub fn has_event(&self, d: usize) -> bool {
        self.events >> d & 1 == 1
    }

    pub fn list_error(&self) -> bool {
        self.list_outcome != ListOutcome::CorrectInListWon
    }
}

struct Scan {
    best: (f64, u64, u64),
    tie: bool,
    events: u128,
    list_best: Option<(f64, u64, u64)>,
}

/// Exhaustive decoder over all `2^k` codewords. Immutable once built, so
/// one instance serves every worker.
#[derive(Debug)]
pub struct MlDecoder {
    code: LinearCode,
    /// Generator reduced to the identity on `info`; each row carries the
    /// original message mask it encodes.
    reduced: Vec<(u64, u64)>,
    info: Vec<usize>,
    parity_mask: u64,
    chunk_bits: usize,
    d_min: OnceLock<usize>,
    max_k: usize,
}

impl MlDecoder {
    pub fn new(code: &LinearCode, max_k: usize) -> Result<Self> {
        if code.k() > max_k {
            return Err(Error::ResourceGuard(format!(
                "ML decoding over 2^{} codewords exceeds the limit k <= {max_k}",
                code.k()
            )));
        }
        let (reduced, info) = reduce(code);
        let info_mask = info.iter().fold(0u64, |m, &t| m | 1 << t);
        Ok(MlDecoder {
            code: code.clone(),
            parity_mask: crate::spectrum::low_mask(code.n()) & !info_mask,
            reduced,
            info,
            chunk_bits: if code.k() >= 10 { 8 } else { 4 },
            d_min: OnceLock::new(),
            max_k,
        })
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    /// Minimum distance; `n + 1` for the zero-dimensional code.
    pub fn d_min(&self) -> usize {
        *self.d_min.get_or_init(|| {
            if self.code.k() == 0 {
                self.code.n() + 1
            } else {
                minimum_distance(&self.code, self.max_k).expect("k checked at construction")
            }
        })
    }

    fn check_len(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.code.n() {
            return Err(Error::invalid(format!(
                "received vector has length {}, code length is {}",
                y.len(),
                self.code.n()
            )));
        }
        Ok(())
    }

    pub fn decode(&self, y: &[f64]) -> Result<MlDecision> {
        self.check_len(y)?;
        let s = self.search(y, None);
        Ok(MlDecision {
            index: s.best.1,
            codeword: s.best.2,
            tie: s.tie,
        })
    }

    pub fn list_decode(&self, y: &[f64], d_star: usize) -> Result<ListDecision> {
        self.check_len(y)?;
        let s = self.scan(y, Some((hard_decision(y), d_star)));
        Ok(match s.list_best {
            Some((_, index, codeword)) => ListDecision::Decoded { index, codeword },
            None => ListDecision::Failure,
        })
    }

    /// Classifies one trial, assuming the all-zero codeword was sent.
    pub fn trial(&self, y: &[f64], d_star: usize) -> Result<TrialOutcome> {
        self.check_len(y)?;
        let hard = hard_decision(y);
        let w = hard.count_ones() as usize;
        let in_region = w <= d_star;
        if self.zero_is_unique_ml(y) {
            return Ok(TrialOutcome {
                ml_word_error: false,
                ml_bit_errors: 0,
                hard_decision_weight: w,
                list_outcome: if in_region {
                    ListOutcome::CorrectInListWon
                } else {
                    ListOutcome::NotInList
                },
                nearest_competitor_weight: None,
                events: 0,
                tie: false,
            });
        }
        let s = self.search(y, in_region.then_some((hard, d_star)));
        let (_, index, codeword) = s.best;
        let list_outcome = match s.list_best {
            _ if !in_region => ListOutcome::NotInList,
            Some((_, 0, _)) => ListOutcome::CorrectInListWon,
            _ => ListOutcome::CorrectInListLost,
        };
        Ok(TrialOutcome {
            ml_word_error: index != 0,
            ml_bit_errors: index.count_ones(),
            hard_decision_weight: w,
            list_outcome,
            nearest_competitor_weight: (index != 0).then_some(codeword.count_ones() as usize),
            events: s.events,
            tie: s.tie,
        })
    }

    /// Lower bound on `m(c)` over nonzero codewords: every such `c` covers
    /// at most all negative coordinates and at least `d_min - r` others,
    /// `r` being the number of negative coordinates. A positive bound
    /// means no competitor reaches the zero codeword's metric 0.
    fn zero_is_unique_ml(&self, y: &[f64]) -> bool {
        let d_min = self.d_min();
        let mut neg_sum = 0.0;
        let mut scale = 0.0;
        let mut rest = [0.0f64; 64];
        let mut r = 0usize;
        let mut m = 0usize;
        for &v in y {
            scale += v.abs();
            if v < 0.0 {
                neg_sum += v;
                r += 1;
            } else {
                rest[m] = v;
                m += 1;
            }
        }
        if d_min > self.code.n() {
            return true;
        }
        let need = d_min.saturating_sub(r);
        let rest = &mut rest[..m];
        let low: f64 = if need == 0 {
            0.0
        } else {
            rest.select_nth_unstable_by(need - 1, f64::total_cmp);
            rest[..need].iter().sum()
        };
        neg_sum + low > 1e-12 * scale
    }

    /// Visits exactly the codewords with `m(c) <= 0`, which contain the ML
    /// decision (the zero codeword has `m = 0`), every `E_d` witness, and
    /// every list member that can beat the zero codeword.
    ///
    /// Depth-first over the information set in order of decreasing `|y_t|`;
    /// a node is cut when the fixed part plus every still-reachable
    /// negative coordinate exceeds 0.
    fn search(&self, y: &[f64], list: Option<(u64, usize)>) -> Scan {
        let k = self.info.len();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| y[self.info[b]].abs().total_cmp(&y[self.info[a]].abs()));
        let mut suffix = vec![0.0f64; k + 1];
        for j in (0..k).rev() {
            suffix[j] = suffix[j + 1] + y[self.info[order[j]]].min(0.0);
        }
        let mut parity_neg = 0.0;
        let mut scale = 0.0;
        for (t, &v) in y.iter().enumerate() {
            scale += v.abs();
            if self.parity_mask >> t & 1 == 1 {
                parity_neg += v.min(0.0);
            }
        }
        let mut ctx = Search {
            dec: self,
            y,
            order,
            suffix,
            parity_neg,
            slack: 1e-9 * (1.0 + scale),
            list,
            scan: Scan {
                best: (0.0, 0, 0),
                tie: false,
                events: 0,
                list_best: list
                    .filter(|&(hard, d_star)| hard.count_ones() as usize <= d_star)
                    .map(|_| (0.0, 0, 0)),
            },
        };
        ctx.descend(0, 0.0, 0, 0);
        ctx.scan
    }

    /// Plain Gray-order scan over all `2^k` codewords.
    fn scan(&self, y: &[f64], list: Option<(u64, usize)>) -> Scan {
        let w = self.chunk_bits;
        let size = 1usize << w;
        let chunks = self.code.n().div_ceil(w);
        let mut table = vec![0.0f64; chunks * size];
        for (j, tab) in table.chunks_mut(size).enumerate() {
            for v in 1..size {
                let low = v.trailing_zeros() as usize;
                let t = j * w + low;
                let y_t = if t < y.len() { y[t] } else { 0.0 };
                tab[v] = tab[v & (v - 1)] + y_t;
            }
        }
        let mask = (size - 1) as u64;
        let metric = |cw: u64| -> f64 {
            let mut m = 0.0;
            for j in 0..chunks {
                m += table[j * size + ((cw >> (j * w)) & mask) as usize];
            }
            m
        };

        let mut best = (f64::INFINITY, u64::MAX, 0u64);
        let mut tie = false;
        let mut events = 0u128;
        let mut list_best: Option<(f64, u64, u64)> = None;
        gray_walk(&self.code, 0, self.code.k(), |msg, cw| {
            let m = metric(cw);
            if m < best.0 {
                best = (m, msg, cw);
                tie = false;
            } else if m == best.0 {
                tie = true;
                if msg < best.1 {
                    best = (m, msg, cw);
                }
            }
            if m < 0.0 {
                events |= 1u128 << cw.count_ones();
            }
            if let Some((hard, d_star)) = list {
                if ((cw ^ hard).count_ones() as usize) <= d_star {
                    let better = match list_best {
                        None => true,
                        Some((lm, lmsg, _)) => m < lm || (m == lm && msg < lmsg),
                    };
                    if better {
                        list_best = Some((m, msg, cw));
                    }
                }
            }
        });
        Scan {
            best,
            tie,
            events,
            list_best,
        }
    }
}

struct Search<'a> {
    dec: &'a MlDecoder,
    y: &'a [f64],
    order: Vec<usize>,
    suffix: Vec<f64>,
    parity_neg: f64,
    slack: f64,
    list: Option<(u64, usize)>,
    scan: Scan,
}

impl Search<'_> {
    fn descend(&mut self, j: usize, fixed: f64, cw: u64, msg: u64) {
        if fixed + self.suffix[j] + self.parity_neg > self.slack {
            return;
        }
        if j == self.order.len() {
            if cw != 0 {
                self.leaf(cw, msg);
            }
            return;
        }
        let r = self.order[j];
        let (row_cw, row_msg) = self.dec.reduced[r];
        let y_t = self.y[self.dec.info[r]];
        self.descend(j + 1, fixed, cw, msg);
        self.descend(j + 1, fixed + y_t, cw ^ row_cw, msg ^ row_msg);
    }

    fn leaf(&mut self, cw: u64, msg: u64) {
        let m = metric(self.y, cw);
        if m > 0.0 {
            return;
        }
        let s = &mut self.scan;
        if m < s.best.0 {
            s.best = (m, msg, cw);
            s.tie = false;
        } else if m == s.best.0 {
            s.tie = true;
            if msg < s.best.1 {
                s.best = (m, msg, cw);
            }
        }
        if m < 0.0 {
            s.events |= 1u128 << cw.count_ones();
        }
        if let Some((hard, d_star)) = self.list {
            if ((cw ^ hard).count_ones() as usize) <= d_star {
                let better = match s.list_best {
                    None => true,
                    Some((lm, lmsg, _)) => m < lm || (m == lm && msg < lmsg),
                };
                if better {
                    s.list_best = Some((m, msg, cw));
                }
            }
        }
    }
}

/// `Σ_{t ∈ supp cw} y_t`, summed in coordinate order.
fn metric(y: &[f64], mut cw: u64) -> f64 {
    let mut m = 0.0;
    while cw != 0 {
        m += y[cw.trailing_zeros() as usize];
        cw &= cw - 1;
    }
    m
}

/// Row-reduces the generator to the identity on its pivot columns,
/// tracking for each row the original message that encodes it.
fn reduce(code: &LinearCode) -> (Vec<(u64, u64)>, Vec<usize>) {
    let mut rows: Vec<(u64, u64)> = code
        .rows()
        .iter()
        .enumerate()
        .map(|(i, &r)| (r, 1u64 << i))
        .collect();
    let mut info = Vec::with_capacity(rows.len());
    let mut rank = 0;
    for t in 0..code.n() {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i].0 >> t & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row.0 >> t & 1 == 1 {
                row.0 ^= pivot.0;
                row.1 ^= pivot.1;
            }
        }
        info.push(t);
        rank += 1;
    }
    (rows, info)
}

/// ML decoding of `y` over all codewords; returns the message index.
pub fn ml_decode(code: &LinearCode, y: &[f64]) -> Result<MlDecision> {
    MlDecoder::new(code, DEFAULT_MAX_ENUM_K)?.decode(y)
}

/// Algorithm 1: list all codewords within Hamming distance `d_star` of the
/// hard decision, output the Euclidean-nearest or declare failure.
pub fn list_decode(code: &LinearCode, y: &[f64], d_star: usize) -> Result<ListDecision> {
    MlDecoder::new(code, DEFAULT_MAX_ENUM_K)?.list_decode(y, d_star)
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub code: LinearCode,
    pub sigma: f64,
    pub d_star: usize,
    pub trials: u64,
    pub seed: u64,
    pub max_k_for_ml: usize,
    /// Ceiling on `2^k · trials`.
    pub max_work: f64,
}

impl SimConfig {
    pub fn new(code: LinearCode, sigma: f64, d_star: usize, trials: u64, seed: u64) -> Self {
        SimConfig {
            code,
            sigma,
            d_star,
            trials,
            seed,
            max_k_for_ml: DEFAULT_MAX_ENUM_K,
            max_work: DEFAULT_MAX_WORK,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.d_star > self.code.n() {
            return Err(Error::invalid(format!(
                "d* = {} exceeds the code length {}",
                self.d_star,
                self.code.n()
            )));
        }
        if self.code.k() > self.max_k_for_ml {
            return Err(Error::ResourceGuard(format!(
                "ML decoding over 2^{} codewords exceeds the limit k <= {}",
                self.code.k(),
                self.max_k_for_ml
            )));
        }
        let work = (self.code.k() as f64).exp2() * self.trials as f64;
        if work > self.max_work {
            return Err(Error::ResourceGuard(format!(
                "estimated work 2^{} x {} = {work:e} exceeds the limit {:e}",
                self.code.k(),
                self.trials,
                self.max_work
            )));
        }
        Ok(())
    }
}

/// Additive counters; merging partial sets in any order gives the same
/// totals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimCounters {
    pub trials: u64,
    pub word_errors: u64,
    pub correct_decodings: u64,
    pub bit_errors: u64,
    pub ties: u64,
    pub list_won: u64,
    pub list_lost: u64,
    pub list_not_in_list: u64,
    /// `count{ML error ∧ W_H(ŷ) <= d*}`.
    pub ml_errors_in_region: u64,
    /// Trials whose hard decision has weight `w`, indexed by `w`.
    pub hard_weight_hist: Vec<u64>,
    /// `count{E_d ∧ W_H(ŷ) = w}` at index `[d][w]`.
    pub event_by_hard_weight: Vec<Vec<u64>>,
    /// Trials settled without a codeword scan.
    pub pruned: u64,
}

impl SimCounters {
    pub fn new(n: usize) -> Self {
        SimCounters {
            trials: 0,
            word_errors: 0,
            correct_decodings: 0,
            bit_errors: 0,
            ties: 0,
            list_won: 0,
            list_lost: 0,
            list_not_in_list: 0,
            ml_errors_in_region: 0,
            hard_weight_hist: vec![0; n + 1],
            event_by_hard_weight: vec![vec![0; n + 1]; n + 1],
            pruned: 0,
        }
    }

    pub fn record(&mut self, o: &TrialOutcome, d_star: usize) {
        self.trials += 1;
        if o.ml_word_error {
            self.word_errors += 1;
            if o.hard_decision_weight <= d_star {
                self.ml_errors_in_region += 1;
            }
        } else {
            self.correct_decodings += 1;
        }
        self.bit_errors += o.ml_bit_errors as u64;
        self.ties += o.tie as u64;
        match o.list_outcome {
            ListOutcome::CorrectInListWon => self.list_won += 1,
            ListOutcome::CorrectInListLost => self.list_lost += 1,
            ListOutcome::NotInList => self.list_not_in_list += 1,
        }
        self.hard_weight_hist[o.hard_decision_weight] += 1;
        let mut ev = o.events;
        while ev != 0 {
            let d = ev.trailing_zeros() as usize;
            self.event_by_hard_weight[d][o.hard_decision_weight] += 1;
            ev &= ev - 1;
        }
    }

    pub fn merge(mut self, other: SimCounters) -> SimCounters {
        self.trials += other.trials;
        self.word_errors += other.word_errors;
        self.correct_decodings += other.correct_decodings;
        self.bit_errors += other.bit_errors;
        self.ties += other.ties;
        self.list_won += other.list_won;
        self.list_lost += other.list_lost;
        self.list_not_in_list += other.list_not_in_list;
        self.ml_errors_in_region += other.ml_errors_in_region;
        self.pruned += other.pruned;
        for (a, b) in self.hard_weight_hist.iter_mut().zip(other.hard_weight_hist) {
            *a += b;
        }
        for (row, other_row) in self.event_by_hard_weight.iter_mut().zip(other.event_by_hard_weight) {
            for (a, b) in row.iter_mut().zip(other_row) {
                *a += b;
            }
        }
        self
    }

    /// `count{E_d ∧ W_H(ŷ) <= d_star}` for any `d_star`.
    pub fn joint_count(&self, d: usize, d_star: usize) -> u64 {
        self.event_by_hard_weight
            .get(d)
            .map_or(0, |row| row.iter().take(d_star + 1).sum())
    }

    /// `count{W_H(ŷ) > d_star}` for any `d_star`.
    pub fn region_exits(&self, d_star: usize) -> u64 {
        self.hard_weight_hist.iter().skip(d_star + 1).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointRate {
    pub d: usize,
    #[serde(flatten)]
    pub rate: Rate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub n: usize,
    pub k: usize,
    pub sigma: f64,
    pub d_star: usize,
    pub seed: u64,
    pub trials: u64,
    pub word_error_rate: Rate,
    pub bit_error_rate: Rate,
    pub list_error_rate: Rate,
    pub region_exit_rate: Rate,
    pub tie_rate: Rate,
    /// `Pr{E_d, W_H(ŷ) <= d*}` for every weight with a nonzero count.
    pub joint_event_rates: Vec<JointRate>,
    pub counters: SimCounters,
}

impl SimReport {
    fn new(cfg: &SimConfig, counters: SimCounters) -> Self {
        let t = counters.trials;
        let k = cfg.code.k() as u64;
        let joint_event_rates = (1..=cfg.code.n())
            .filter_map(|d| {
                let c = counters.joint_count(d, cfg.d_star);
                (c > 0).then(|| JointRate { d, rate: Rate::new(c, t) })
            })
            .collect();
        SimReport {
            n: cfg.code.n(),
            k: cfg.code.k(),
            sigma: cfg.sigma,
            d_star: cfg.d_star,
            seed: cfg.seed,
            trials: t,
            word_error_rate: Rate::new(counters.word_errors, t),
            bit_error_rate: Rate::new(counters.bit_errors, t * k.max(1)),
            list_error_rate: Rate::new(counters.list_lost + counters.list_not_in_list, t),
            region_exit_rate: Rate::new(counters.region_exits(cfg.d_star), t),
            tie_rate: Rate::new(counters.ties, t),
            joint_event_rates,
            counters,
        }
    }

    /// `Pr{E_d, W_H(ŷ) <= d_star}` for an arbitrary cutoff.
    pub fn joint_rate(&self, d: usize, d_star: usize) -> Rate {
        Rate::new(self.counters.joint_count(d, d_star), self.trials)
    }

    pub fn region_exit_rate_at(&self, d_star: usize) -> Rate {
        Rate::new(self.counters.region_exits(d_star), self.trials)
    }

    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let line = |s: &mut String, name: &str, r: &Rate| {
            let _ = writeln!(
                s,
                "{name:<18} {:>12} / {:<12} {:.6e}  [{:.6e}, {:.6e}]",
                r.count, r.trials, r.rate, r.ci_low, r.ci_high
            );
        };
        let _ = writeln!(s, "code               [{}, {}]", self.n, self.k);
        let _ = writeln!(s, "sigma              {:e}", self.sigma);
        let _ = writeln!(s, "d_star             {}", self.d_star);
        let _ = writeln!(s, "seed               {}", self.seed);
        let _ = writeln!(s, "trials             {}", self.trials);
        line(&mut s, "word_errors", &self.word_error_rate);
        line(&mut s, "bit_errors", &self.bit_error_rate);
        line(&mut s, "list_errors", &self.list_error_rate);
        line(&mut s, "region_exits", &self.region_exit_rate);
        line(&mut s, "ties", &self.tie_rate);
        for j in &self.joint_event_rates {
            line(&mut s, &format!("joint d={}", j.d), &j.rate);
        }
        s
    }
}

/// Runs `cfg.trials` independent transmissions of the all-zero codeword.
///
/// Trial `i` always sees the same noise, so the counters depend only on
/// the configuration, never on the worker count.
pub fn simulate(cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    let decoder = MlDecoder::new(&cfg.code, cfg.max_k_for_ml)?;
    decoder.d_min();
    let n = cfg.code.n();
    let src = NoiseSource::new(cfg.seed);
    let tasks = cfg.trials.div_ceil(TRIALS_PER_TASK);
    let counters = (0..tasks)
        .into_par_iter()
        .map(|task| -> Result<SimCounters> {
            let mut c = SimCounters::new(n);
            let mut y = vec![0.0; n];
            let start = task * TRIALS_PER_TASK;
            let end = (start + TRIALS_PER_TASK).min(cfg.trials);
            for trial in start..end {
                src.fill(trial, cfg.sigma, &mut y);
                y.iter_mut().for_each(|v| *v += 1.0);
                if decoder.zero_is_unique_ml(&y) {
                    c.pruned += 1;
                }
                let o = decoder.trial(&y, cfg.d_star)?;
                c.record(&o, cfg.d_star);
            }
            Ok(c)
        })
        .try_reduce(|| SimCounters::new(n), |a, b| Ok(a.merge(b)))?;
    Ok(SimReport::new(cfg, counters))
}
