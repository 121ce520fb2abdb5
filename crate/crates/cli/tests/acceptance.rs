//! Acceptance gate: one PASS/FAIL line per criterion, written straight to
//! stderr so it shows up in plain `cargo test` output.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mlbound::bounds::{
    bit_error_bound, pairwise_term, triplet_term, truncated_union_bound,
    truncated_union_bound_with, union_bound, word_error_bound, DStar,
};
use mlbound::numerics::{
    binomial_tail, q_function, triplet_probability, ChannelPoint, SnrConvention, ThetaPolicy,
    TripletGeometry,
};
use mlbound::simulator::{simulate, SimConfig};
use mlbound::spectrum::{
    enumerate_spectrum, ensemble_average, macwilliams_transform, store_spectrum, LinearCode,
};
use mlbound_cli::bound::{compute_curve, CurveRequest, SpectrumSource};
use mlbound_cli::curve::SnrGrid;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn load(name: &str) -> LinearCode {
    LinearCode::parse(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    SnrGrid::new(start, stop, step).unwrap().points()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dominance_chain() -> Outcome {
    let mut union_above_one = 0;
    let mut points = 0;
    for (n, k) in [(100, 95), (100, 50)] {
        let spec = ensemble_average(n, k).map_err(|e| e.to_string())?;
        for snr in grid(0.0, 10.0, 0.25) {
            let ch = ChannelPoint::from_snr(snr, SnrConvention::EbN0, spec.rate()).unwrap();
            let u = union_bound(&spec, &ch).unwrap().value;
            let t = truncated_union_bound(&spec, &ch).unwrap().value;
            let w = word_error_bound(&spec, &ch).unwrap().value;
            ensure(w <= t && t <= u, || format!("[{n},{k}] at {snr} dB: word {w:e}, truncated {t:e}, union {u:e}"))?;
            ensure(w < 1.0 && t < 1.0, || format!("[{n},{k}] at {snr} dB: proposed bound reaches 1"))?;
            union_above_one += (u > 1.0) as usize;
            points += 1;
        }
    }
    ensure(union_above_one > 0, || "grid never exercises a divergent union bound".into())?;
    Ok(format!("{points} points, union > 1 at {union_above_one} of them"))
}

fn union_recovery() -> Outcome {
    let mut worst: f64 = 0.0;
    for (n, k) in [(100, 95), (100, 50)] {
        let spec = ensemble_average(n, k).unwrap();
        for snr in grid(0.0, 10.0, 0.25) {
            let ch = ChannelPoint::from_snr(snr, SnrConvention::EbN0, spec.rate()).unwrap();
            let u = union_bound(&spec, &ch).unwrap().value;
            let t = truncated_union_bound_with(&spec, &ch, DStar::Fixed(n)).unwrap().value;
            let rel = (t - u).abs() / u;
            worst = worst.max(rel);
            ensure(rel <= 1e-12, || format!("[{n},{k}] at {snr} dB: relative gap {rel:e}"))?;
        }
    }
    Ok(format!("max relative gap {worst:e}"))
}

fn pmf_table(p: f64, n_max: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![1.0]];
    for n in 1..=n_max {
        let prev = &rows[n - 1];
        rows.push(
            (0..=n)
                .map(|j| {
                    let stay = if j < n { (1.0 - p) * prev[j] } else { 0.0 };
                    let step = if j > 0 { p * prev[j - 1] } else { 0.0 };
                    stay + step
                })
                .collect(),
        );
    }
    rows
}

fn simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let left = (m - a) / 6.0 * (fa + 4.0 * f(lm) + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * f(rm) + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson(f, a, m, 0.5 * tol, depth - 1) + simpson(f, m, b, 0.5 * tol, depth - 1)
    }
}

fn kernel_oracles() -> Outcome {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for p in [1e-12, 1e-6, 1e-3, 0.02, 0.1587, 0.3, 0.5, 0.8, 0.9999] {
        let table = pmf_table(p, 64);
        for n in 1..=64usize {
            for lo in 0..=n {
                for hi in lo..=n {
                    let oracle: f64 = table[n][lo..=hi].iter().sum();
                    let got = binomial_tail(p, n as i64, lo as i64, hi as i64).map_err(|e| e.to_string())?;
                    checked += 1;
                    if oracle < 1e-290 {
                        // subnormal range: relative error is meaningless for the recursion
                        ensure((got - oracle).abs() < 1e-300, || format!("B({p},{n},{lo},{hi}) = {got:e} vs {oracle:e}"))?;
                        continue;
                    }
                    let rel = (got - oracle).abs() / oracle;
                    worst = worst.max(rel);
                    ensure(rel <= 1e-12, || format!("B({p},{n},{lo},{hi}) = {got:e} vs {oracle:e}"))?;
                }
            }
        }
    }
    let density = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut worst_q: f64 = 0.0;
    for i in 0..=320 {
        let x = i as f64 * 0.025;
        let oracle = simpson(density, x, x + 14.0, 2e-14 * density(x), 40);
        let rel = (q_function(x) - oracle).abs() / oracle;
        worst_q = worst_q.max(rel);
        ensure(rel <= 1e-12, || format!("Q({x}) relative error {rel:e}"))?;
    }
    Ok(format!("{checked} binomial points (max rel {worst:e}), 321 Q points (max rel {worst_q:e})"))
}

fn triplet_integral() -> Outcome {
    let right = std::f64::consts::FRAC_PI_2;
    let mut worst: f64 = 0.0;
    for d in 1..=10usize {
        for sigma in [0.5, 1.0, 2.0] {
            let q = q_function((d as f64).sqrt() / sigma);
            let closed = 2.0 * q - q * q;
            let geom = TripletGeometry::new(d, 20, right).unwrap();
            let got = triplet_probability(&geom, sigma).map_err(|e| e.to_string())?;
            let rel = (got - closed).abs() / closed;
            worst = worst.max(rel);
            ensure(rel <= 1e-10, || format!("d={d} sigma={sigma}: {got:e} vs {closed:e}"))?;

            let mut prev = 0.0;
            for i in 1..=30 {
                let theta = right * i as f64 / 30.0;
                let v = triplet_probability(&TripletGeometry::new(d, 20, theta).unwrap(), sigma).unwrap();
                ensure(v >= prev, || format!("d={d} sigma={sigma}: decreases at theta={theta}"))?;
                ensure(v >= q * (1.0 - 1e-12) && v <= 2.0 * q * (1.0 + 1e-12), || {
                    format!("d={d} sigma={sigma} theta={theta}: {v:e} outside [Q, 2Q]")
                })?;
                prev = v;
            }
        }
    }
    Ok(format!("30 (d, sigma) pairs, max relative gap at right angle {worst:e}"))
}

struct JointRuns {
    code: LinearCode,
    runs: Vec<(f64, mlbound::simulator::SimReport)>,
}

fn joint_runs() -> JointRuns {
    let code = load("code10_5.gen");
    let runs = [0.8, 1.0]
        .into_iter()
        .map(|sigma| {
            let cfg = SimConfig::new(code.clone(), sigma, 3, 1_000_000, 20_240_601);
            (sigma, simulate(&cfg).unwrap())
        })
        .collect();
    JointRuns { code, runs }
}

fn joint_event_validity(j: &JointRuns) -> Outcome {
    let spec = enumerate_spectrum(&j.code, 28).unwrap().weight_spectrum().unwrap();
    let n = j.code.n();
    let mut checks = 0;
    let mut tightest = f64::INFINITY;
    for (sigma, report) in &j.runs {
        let ch = ChannelPoint::from_sigma(*sigma).unwrap();
        for d_star in 1..=3 {
            for d in (1..=n).filter(|&d| spec.get(d) > 0.0) {
                let est = report.joint_rate(d, d_star);
                let pair = pairwise_term(spec.get(d), d, d_star, n, &ch).unwrap();
                let trip = triplet_term(spec.get(d), d, d_star, n, &ch, ThetaPolicy::RightAngle).unwrap();
                for (name, rhs) in [("pairwise", pair), ("triplet", trip)] {
                    checks += 1;
                    let se = est.std_error();
                    if se > 0.0 {
                        tightest = tightest.min((rhs - est.rate) / se);
                    }
                    ensure(est.at_most(rhs, 3.0), || {
                        format!(
                            "sigma={sigma} d*={d_star} d={d}: estimate {:e} exceeds {name} bound {rhs:e} by more than 3 SE",
                            est.rate
                        )
                    })?;
                }
            }
        }
    }
    Ok(format!(
        "{checks} (sigma, d*, d, bound) checks on 10^6 trials each, smallest margin {tightest:.1} SE"
    ))
}

fn region_tail(j: &JointRuns) -> Outcome {
    let n = j.code.n();
    let mut worst: f64 = 0.0;
    for (sigma, report) in &j.runs {
        let ch = ChannelPoint::from_sigma(*sigma).unwrap();
        for d_star in 1..=3 {
            let est = report.region_exit_rate_at(d_star);
            let b = binomial_tail(ch.p_b, n as i64, d_star as i64 + 1, n as i64).unwrap();
            worst = worst.max((est.rate - b).abs() / est.std_error());
            ensure(est.agrees_with(b, 3.0), || {
                format!("sigma={sigma} d*={d_star}: exit frequency {:e} vs tail {b:e}", est.rate)
            })?;
        }
    }
    Ok(format!("6 (sigma, d*) pairs, largest deviation {worst:.2} SE"))
}

fn simulation_under_bound() -> Outcome {
    // trial counts put each ordering several standard errors clear of the bound
    let plan: [(&str, &[(f64, u64)]); 2] = [
        ("bch31_21.gen", &[(4.0, 100_000), (5.0, 2_000_000), (6.0, 10_000_000)]),
        ("bch31_26.gen", &[(4.0, 100_000), (5.0, 200_000), (6.0, 1_000_000)]),
    ];
    let mut parts = Vec::new();
    for (name, points) in plan {
        let code = load(name);
        let spec = enumerate_spectrum(&code, 28).unwrap().weight_spectrum().unwrap();
        for &(snr, trials) in points {
            let ch = ChannelPoint::from_snr(snr, SnrConvention::EbN0, code.rate()).unwrap();
            let bound = word_error_bound(&spec, &ch).unwrap();
            let mut cfg = SimConfig::new(code.clone(), ch.sigma, bound.d_star_opt, trials, 7);
            cfg.max_work = f64::INFINITY;
            let wer = simulate(&cfg).map_err(|e| e.to_string())?.word_error_rate;
            ensure(wer.rate < bound.value, || {
                format!("[31,{}] at {snr} dB: simulated {:e} not below bound {:e}", code.k(), wer.rate, bound.value)
            })?;
            parts.push(format!(
                "[31,{}]@{snr}dB {:.2e}<{:.2e} ({:.1} SE, {trials} trials)",
                code.k(),
                wer.rate,
                bound.value,
                (bound.value - wer.rate) / wer.std_error()
            ));
        }
    }
    Ok(parts.join(", "))
}

fn bit_word_consistency() -> Outcome {
    let mut parts = Vec::new();
    for name in ["hamming74.gen", "bch15_7.gen"] {
        let code = load(name);
        let iowe = enumerate_spectrum(&code, 28).unwrap();
        let weights = iowe.weight_spectrum().unwrap();
        for snr in grid(0.0, 8.0, 0.25) {
            let ch = ChannelPoint::from_snr(snr, SnrConvention::EbN0, code.rate()).unwrap();
            let bit = bit_error_bound(&iowe, &ch).unwrap().value;
            let word = word_error_bound(&weights, &ch).unwrap().value;
            ensure(bit <= word, || format!("{name} at {snr} dB: bit {bit:e} > word {word:e}"))?;
        }
        let ch = ChannelPoint::from_snr(5.0, SnrConvention::EbN0, code.rate()).unwrap();
        let bit = bit_error_bound(&iowe, &ch).unwrap();
        let cfg = SimConfig::new(code.clone(), ch.sigma, bit.d_star_opt, 200_000, 11);
        let ber = simulate(&cfg).unwrap().bit_error_rate;
        ensure(ber.at_most(bit.value, 3.0), || {
            format!("{name} at 5 dB: simulated BER {:e} above bit bound {:e}", ber.rate, bit.value)
        })?;
        parts.push(format!("[{},{}] BER {:.2e} <= {:.2e}", code.n(), code.k(), ber.rate, bit.value));
    }
    Ok(parts.join(", "))
}

fn spectrum_engine() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_909);
    for i in 0..20 {
        let n = rng.gen_range(4..=24usize);
        let k = rng.gen_range(1..=12.min(n - 1));
        let code = loop {
            let rows = (0..k).map(|_| rng.next_u64() & ((1u64 << n) - 1)).collect();
            if let Ok(c) = LinearCode::new(n, rows) {
                break c;
            }
        };
        let direct = enumerate_spectrum(&code, 28).unwrap().weight_spectrum().unwrap();
        let dual = enumerate_spectrum(&code.dual().unwrap(), 28).unwrap().weight_spectrum().unwrap();
        let via = macwilliams_transform(&dual).map_err(|e| e.to_string())?;
        let round = |c: &[f64]| c.iter().map(|x| x.round() as u64).collect::<Vec<_>>();
        ensure(round(direct.counts()) == round(via.counts()), || format!("code {i} [{n},{k}] disagrees"))?;
    }
    let hamming = enumerate_spectrum(&load("hamming74.gen"), 28).unwrap().weight_spectrum().unwrap();
    ensure(hamming.counts() == [1.0, 0.0, 0.0, 7.0, 7.0, 0.0, 0.0, 1.0], || {
        format!("Hamming spectrum {:?}", hamming.counts())
    })?;
    Ok("20 random codes agree; [7,4] Hamming A = (1,0,0,7,7,0,0,1)".into())
}

fn truncated_mode() -> Outcome {
    let dual = enumerate_spectrum(&load("bch63_39_dual.gen"), 28).unwrap().weight_spectrum().unwrap();
    let full = macwilliams_transform(&dual).map_err(|e| e.to_string())?;
    let truncated = full.truncate(20).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bch63_39_d20.spec");
    store_spectrum(&truncated.into(), &path).unwrap();
    let req = CurveRequest {
        variant: mlbound::bounds::BoundVariant::UnifiedWord,
        source: SpectrumSource::File(path),
        grid: SnrGrid::new(0.0, 8.0, 0.5).unwrap(),
        convention: SnrConvention::EbN0,
        theta: ThetaPolicy::RightAngle,
        dstar: None,
        base_bound: None,
        truncate: None,
        max_k: 28,
    };
    let curve = compute_curve(&req).map_err(|e| format!("{e:#}"))?;
    ensure(curve.meta("probe") == Some("0..=10"), || format!("probe {:?}", curve.meta("probe")))?;
    ensure(
        curve.rows.iter().all(|r| r.d_star_opt <= 10 && r.raw_value.is_finite() && r.raw_value < 1.0),
        || "row outside the probe or not finite".into(),
    )?;
    let mut bad = req.clone();
    bad.dstar = Some(11);
    ensure(compute_curve(&bad).is_err(), || "d* = 11 accepted on a d_max = 20 spectrum".into())?;
    let last = curve.rows.last().unwrap();
    Ok(format!(
        "probe 0..=10, {} finite rows, {:e} at {} dB with d* = {}",
        curve.rows.len(),
        last.raw_value,
        last.snr_db,
        last.d_star_opt
    ))
}

#[test]
fn acceptance() {
    let mut failures = 0;
    let mut report = |id: u32, name: &str, start: Instant, outcome: Outcome| {
        let secs = start.elapsed().as_secs_f64();
        let line = match &outcome {
            Ok(detail) => format!("criterion {id:>2} PASS {name} ({secs:.1}s): {detail}"),
            Err(why) => {
                failures += 1;
                format!("criterion {id:>2} FAIL {name} ({secs:.1}s): {why}")
            }
        };
        let _ = writeln!(std::io::stderr(), "{line}");
    };

    let t = Instant::now();
    report(1, "dominance chain", t, dominance_chain());
    let t = Instant::now();
    report(2, "union-bound recovery", t, union_recovery());
    let t = Instant::now();
    report(3, "kernel oracles", t, kernel_oracles());
    let t = Instant::now();
    report(4, "triplet integral", t, triplet_integral());
    let t = Instant::now();
    let runs = joint_runs();
    report(5, "joint-event bound validity", t, joint_event_validity(&runs));
    let t = Instant::now();
    report(6, "region tail", t, region_tail(&runs));
    let t = Instant::now();
    report(7, "simulation under bound", t, simulation_under_bound());
    let t = Instant::now();
    report(8, "bit/word consistency", t, bit_word_consistency());
    let t = Instant::now();
    report(9, "spectrum engine", t, spectrum_engine());
    let t = Instant::now();
    report(10, "truncated-spectrum mode", t, truncated_mode());

    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
