//! The primary acceptance suite: thirteen checks with fixed tolerances and time budgets.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use super::config::ExperimentConfig;
use super::report::{to_json17, ScalingReport};
use super::stochastic::replicate;
use super::{
    exp_boundary_density, exp_coalescence, exp_concentration, exp_drift, exp_hitting, exp_mass_split, exp_uniformity,
};
use crate::error::Result;
use crate::exact::{loc_marginals, simple_relation_guard, site_densities, solve_sector, verify_simple_relation};
use crate::mpa::{
    build_representation, config_probability, loc1_distribution, sigma_left_via_aw, site_densities_mpa, verify_dehp,
    DoubleDouble, LocMethod, MpaRepresentation, Real,
};
use crate::phase::{boundary_to_rates, limiting_densities, sample_boundary, BoundaryParams, Cell, RateParams};
use crate::sim::{
    attractivity_violations, init_rng, pair_ordering, random_pair_setup, simulate_open, window_init, Dynamics,
    SampleSpec, SimState, TrajectoryRecord,
};

/// Below this distance of `ABCD` from 1, representations are evaluated in double-double.
pub const NEAR_GUARD: f64 = 1e-2;

/// Identifier, short name and time budget in seconds.
pub const CRITERIA: [(u8, &str, f64); 13] = [
    (1, "one-light relation", 60.0),
    (2, "mpa vs brute force", 120.0),
    (3, "quadratic algebra residuals", 10.0),
    (4, "askey-wilson boundary density", 5.0),
    (5, "bernoulli line", 10.0),
    (6, "boundary densities", 60.0),
    (7, "light mass split", 120.0),
    (8, "coexistence uniformity", 120.0),
    (9, "concentration near the boundary", 300.0),
    (10, "second-class drift", 300.0),
    (11, "linear mixing", 600.0),
    (12, "coupling invariants", 300.0),
    (13, "determinism", f64::INFINITY),
];

#[derive(Debug, Clone, serde::Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub seconds: f64,
    pub budget: f64,
    pub detail: String,
}

impl CriterionOutcome {
    /// `PASS [ 7] light mass split (12.3 s): ...`
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {} ({:.1} s): {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

struct Check {
    pass: bool,
    detail: String,
}

impl Check {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Check { pass, detail: detail.into() }
    }
}

/// Runs criterion `id` with randomness derived from `seed`.
///
/// Errors from the library count as failures, with the error in the detail.
pub fn run_criterion(id: u8, seed: u64) -> CriterionOutcome {
    let (_, name, budget) = CRITERIA[(id as usize).clamp(1, 13) - 1];
    let start = Instant::now();
    let res = match id {
        1 => relation(seed),
        2 => mpa_vs_exact(seed),
        3 => algebra(seed),
        4 => askey_wilson(seed),
        5 => bernoulli_line(),
        6 => boundary_densities(),
        7 => mass_split(),
        8 => uniformity(),
        9 => concentration(seed),
        10 => drift(seed),
        11 => mixing(seed),
        12 => coupling(seed),
        13 => determinism(seed),
        _ => Ok(Check::new(false, format!("no criterion {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (mut pass, mut detail) = match res {
        Ok(c) => (c.pass, c.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if seconds > budget {
        pass = false;
        detail.push_str(&format!("; over the {budget} s budget"));
    }
    CriterionOutcome { id, name, pass, seconds, budget, detail }
}

/// Runs all criteria in order, calling `progress` after each one.
pub fn run_primary(seed: u64, mut progress: impl FnMut(&CriterionOutcome)) -> Vec<CriterionOutcome> {
    CRITERIA
        .iter()
        .map(|&(id, ..)| {
            let out = run_criterion(id, seed);
            progress(&out);
            out
        })
        .collect()
}

fn rng(seed: u64, stream: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn near_guard(b: &BoundaryParams) -> bool {
    (1.0 - b.abcd()).abs() < NEAR_GUARD
}

fn cell_name(c: Cell) -> &'static str {
    match c {
        Cell::MaxCurrent => "MC",
        Cell::HighDensityFan => "HD fan",
        Cell::HighDensityShock => "HD shock",
        Cell::LowDensityFan => "LD fan",
        Cell::LowDensityShock => "LD shock",
        Cell::Coexistence => "coexistence",
    }
}

fn relation(seed: u64) -> Result<Check> {
    let mut r = rng(seed, 1);
    let mut worst: f64 = 0.0;
    let mut draws = 0;
    for cell in Cell::ALL {
        let mut kept = 0;
        while kept < 20 {
            let b = sample_boundary(cell, 0.8, &mut r);
            if simple_relation_guard(&b).is_err() {
                continue;
            }
            let rates = boundary_to_rates(&b);
            for n in 2..=6 {
                worst = worst.max(verify_simple_relation(n, &rates)?);
            }
            kept += 1;
        }
        draws += kept;
    }
    Ok(Check::new(worst <= 1e-9, format!("max residual {worst:.3e} over {draws} draws, n = 2..6 (tolerance 1e-9)")))
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn mpa_gaps<T: Real>(b: &BoundaryParams, rates: &RateParams) -> Result<[f64; 3]> {
    let mut gaps = [0.0f64; 3];
    for n in 1..=7 {
        let rep: MpaRepresentation<T> = build_representation(b, n + 3)?;
        let (s, pi) = solve_sector(n, 0, rates)?;
        for (idx, tau) in s.iter().enumerate() {
            gaps[0] = gaps[0].max((config_probability(&rep, &tau)? - pi.as_slice()[idx]).abs());
        }
        gaps[1] = gaps[1].max(max_gap(&site_densities(&s, &pi, 1)?, &site_densities_mpa(&rep, n)?));
        let (s, pi) = solve_sector(n, 1, rates)?;
        let exact = loc_marginals(&s, &pi)?.remove(0);
        for via in [LocMethod::Direct, LocMethod::Relation] {
            gaps[2] = gaps[2].max(max_gap(&exact, &loc1_distribution(&rep, n, via)?));
        }
    }
    Ok(gaps)
}

fn mpa_vs_exact(seed: u64) -> Result<Check> {
    let mut r = rng(seed, 2);
    let mut worst = [0.0f64; 3];
    let mut high = 0;
    let mut draws = 0;
    for cell in Cell::ALL {
        for _ in 0..10 {
            let b = sample_boundary(cell, 0.8, &mut r);
            let rates = boundary_to_rates(&b);
            let g = if near_guard(&b) {
                high += 1;
                mpa_gaps::<DoubleDouble>(&b, &rates)?
            } else {
                mpa_gaps::<f64>(&b, &rates)?
            };
            for (w, x) in worst.iter_mut().zip(g) {
                *w = w.max(x);
            }
            draws += 1;
        }
    }
    let pass = worst.iter().all(|&w| w <= 1e-9);
    Ok(Check::new(
        pass,
        format!(
            "max gaps: configurations {:.3e}, densities {:.3e}, loc₁ {:.3e}; {draws} draws ({high} in double-double), n ≤ 7 (tolerance 1e-9)",
            worst[0], worst[1], worst[2]
        ),
    ))
}

fn algebra(seed: u64) -> Result<Check> {
    let mut r = rng(seed, 3);
    let mut worst: f64 = 0.0;
    let mut high = 0;
    for i in 0..50 {
        let b = sample_boundary(Cell::ALL[i % Cell::ALL.len()], 0.9, &mut r);
        let res = if near_guard(&b) {
            high += 1;
            verify_dehp(&build_representation::<DoubleDouble>(&b, 20)?)?
        } else {
            verify_dehp(&build_representation::<f64>(&b, 20)?)?
        };
        worst = worst.max(res.max());
    }
    Ok(Check::new(
        worst <= 1e-10,
        format!("max residual {worst:.3e} over 50 draws ({high} in double-double) at M = 20 (tolerance 1e-10)"),
    ))
}

fn askey_wilson(seed: u64) -> Result<Check> {
    let mut r = rng(seed, 4);
    let mut parts = Vec::new();
    let mut pass = true;
    for (cell, ts) in [
        (Cell::MaxCurrent, &[0.2, 0.5, 0.9][..]),
        (Cell::HighDensityFan, &[0.99, 0.995][..]),
        (Cell::HighDensityShock, &[0.99, 0.995][..]),
    ] {
        let (mut spread, mut gap) = (0.0f64, 0.0f64);
        for _ in 0..30 {
            let b = sample_boundary(cell, 0.8, &mut r);
            let closed = limiting_densities(&b).sigma_left;
            let vals = ts.iter().map(|&t| sigma_left_via_aw(&b, t)).collect::<Result<Vec<_>>>()?;
            let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
            spread = spread.max(hi - lo);
            gap = gap.max(vals.iter().fold(0.0f64, |m, v| m.max((v - closed).abs())));
        }
        pass &= spread <= 1e-10 && gap <= 1e-10;
        parts.push(format!("{}: t-spread {spread:.2e}, vs closed form {gap:.2e}", cell_name(cell)));
    }
    Ok(Check::new(pass, format!("{} (30 draws each, tolerance 1e-10)", parts.join("; "))))
}

fn bernoulli_line() -> Result<Check> {
    let mut worst: f64 = 0.0;
    let sets = [(2.0, -0.3, -0.5, 0.4), (0.6, 0.0, 0.0, 0.0), (1.25, -0.7, -0.2, 0.7), (4.0, -0.1, -0.9, 0.2)];
    for (a, bb, d, q) in sets {
        let c = 1.0 / a;
        let b = BoundaryParams::new(a, bb, c, d, q)?;
        let target = 1.0 / (1.0 + c);
        let rates = boundary_to_rates(&b);
        for n in 1..=7 {
            let (s, pi) = solve_sector(n, 0, &rates)?;
            worst = site_densities(&s, &pi, 1)?.iter().fold(worst, |m, x| m.max((x - target).abs()));
        }
        let rep = build_representation::<f64>(&b, 103)?;
        worst = site_densities_mpa(&rep, 100)?.iter().fold(worst, |m, x| m.max((x - target).abs()));
    }
    Ok(Check::new(
        worst <= 1e-9,
        format!("max |ρ_k − 1/(1+C)| = {worst:.3e} over {} parameter sets, n ≤ 7 exact and N = 100 MPA", sets.len()),
    ))
}

fn params(a: f64, b: f64, c: f64, d: f64, q: f64) -> ExperimentConfig {
    ExperimentConfig { a: Some(a), b: Some(b), c: Some(c), d: Some(d), q: Some(q), ..Default::default() }
}

fn failed(rep: &ScalingReport, names: &[&str]) -> Vec<String> {
    rep.verdicts
        .iter()
        .filter(|v| names.is_empty() || names.contains(&v.name.as_str()))
        .filter(|v| !v.pass)
        .map(|v| format!("{}: {}", v.name, v.detail))
        .collect()
}

fn verdict_detail(rep: &ScalingReport, name: &str) -> String {
    rep.verdict(name).map(|v| v.detail.clone()).unwrap_or_else(|| format!("{name} missing"))
}

fn summarize(reports: &[(String, ScalingReport)], names: &[&str], shown: &[&str]) -> Check {
    let mut bad = Vec::new();
    let mut parts = Vec::new();
    for (label, rep) in reports {
        let f = failed(rep, names);
        if names.iter().any(|n| rep.verdict(n).is_none()) {
            bad.push(format!("{label}: verdict missing"));
        }
        bad.extend(f.into_iter().map(|x| format!("{label}: {x}")));
        let s: Vec<String> = shown.iter().map(|n| verdict_detail(rep, n)).collect();
        parts.push(format!("{label}: {}", s.join(", ")));
    }
    if bad.is_empty() {
        Check::new(true, parts.join("; "))
    } else {
        Check::new(false, bad.join("; "))
    }
}

fn boundary_densities() -> Result<Check> {
    let sets = [
        ("MC", params(0.5, -0.2, 0.3, -0.1, 0.3)),
        ("HD", params(2.0, -0.1, 0.3, 0.0, 0.2)),
        ("LD", params(0.3, 0.0, 2.0, -0.1, 0.2)),
        ("coexistence", params(2.0, 0.0, 2.0, 0.0, 0.0)),
    ];
    let mut reports = Vec::new();
    for (label, cfg) in sets {
        reports.push((label.to_string(), exp_boundary_density(&cfg)?));
    }
    Ok(summarize(&reports, &["left_nonincreasing", "left_terminal"], &["left_terminal"]))
}

fn mass_split() -> Result<Check> {
    let sets = [("A=B=C=D=0", params(0.0, 0.0, 0.0, 0.0, 0.0)), ("asymmetric MC", params(0.6, -0.2, 0.2, -0.3, 0.4))];
    let mut reports = Vec::new();
    for (label, mut cfg) in sets {
        cfg.n_list = Some(vec![50, 100, 200]);
        reports.push((label.to_string(), exp_mass_split(&cfg)?));
    }
    Ok(summarize(&reports, &["middle_decreasing", "terminal_split"], &["middle_decreasing", "terminal_split"]))
}

fn uniformity() -> Result<Check> {
    let mut cfg = params(2.0, 0.0, 2.0, 0.0, 0.0);
    cfg.n_list = Some(vec![50, 100, 200]);
    let rep = exp_uniformity(&cfg)?;
    Ok(summarize(
        &[("A=C=2".into(), rep)],
        &["distance_decreasing", "terminal_distance"],
        &["distance_decreasing", "terminal_distance"],
    ))
}

fn concentration(seed: u64) -> Result<Check> {
    let mut reports = Vec::new();
    for r in [1, 2] {
        let mut cfg = params(2.0, 0.0, 0.0, 0.0, 0.0);
        cfg.n_list = Some(vec![100]);
        cfg.r = Some(r);
        cfg.seed = Some(seed.wrapping_add(9000 + 1000 * r as u64));
        reports.push((format!("r = {r}"), exp_concentration(&cfg)?));
    }
    Ok(summarize(&reports, &["lower_ci"], &["lower_ci"]))
}

fn drift(seed: u64) -> Result<Check> {
    let mut reports = Vec::new();
    for (i, (rho, q)) in [(0.75, 0.0), (2.0 / 3.0, 0.5)].into_iter().enumerate() {
        let cfg = ExperimentConfig {
            rho: Some(rho),
            q: Some(q),
            horizon: Some(1000.0),
            replicas: Some(500),
            seed: Some(seed.wrapping_add(10_000 + 1000 * i as u64)),
            ..Default::default()
        };
        reports.push((format!("ρ = {rho:.4}, q = {q}"), exp_drift(&cfg)?));
    }
    Ok(summarize(&reports, &["speed_ci_contains_kappa"], &["speed_ci_contains_kappa"]))
}

/// Replicas per system size for the coalescence check.
pub const MIXING_REPLICAS: usize = 8000;

fn mixing(seed: u64) -> Result<Check> {
    let mut cfg = params(2.0, 0.0, 0.0, 0.0, 0.0);
    cfg.n_list = Some(vec![32, 64, 128]);
    cfg.exact_n = Some(vec![4]);
    cfg.r = Some(1);
    cfg.replicas = Some(MIXING_REPLICAS);
    cfg.seed = Some(seed.wrapping_add(11_000));
    let rep = exp_coalescence(&cfg)?;
    let names = ["ratio_32_64", "ratio_64_128", "exact_mixing_n4"];
    Ok(summarize(&[("A=2, q=0".into(), rep)], &names, &names))
}

/// Trajectories per coupling invariant.
pub const COUPLING_TRAJECTORIES: usize = 1000;

fn coupling(seed: u64) -> Result<Check> {
    let base = seed.wrapping_add(12_000);
    let attr = replicate(COUPLING_TRAJECTORIES, base, |s| {
        let mut r = init_rng(s);
        let q = r.random_range(0.0..0.9);
        if s % 2 == 0 {
            let rates = RateParams::new(
                q,
                r.random_range(0.05..2.0),
                r.random_range(0.05..2.0),
                r.random_range(0.0..1.0),
                r.random_range(0.0..1.0),
            )?;
            let n = r.random_range(2..=30usize);
            let bottom: Vec<u8> = (0..n).map(|_| r.random_bool(0.4) as u8).collect();
            let top: Vec<u8> = bottom.iter().map(|&v| v | r.random_bool(0.4) as u8).collect();
            attractivity_violations(SimState::open(top)?, SimState::open(bottom)?, Dynamics::Open(rates), 50.0, s)
        } else {
            let top = window_init(30, r.random_range(0.2..0.9), &[], s)?;
            let bottom: Vec<u8> = top.occupancy().iter().map(|&v| v & r.random_bool(0.6) as u8).collect();
            attractivity_violations(top, SimState::window(30, bottom)?, Dynamics::Line { q }, 20.0, s)
        }
    })?;
    let attr_bad: u64 = attr.iter().sum();
    let pair = replicate(COUPLING_TRAJECTORIES, base.wrapping_add(COUPLING_TRAJECTORIES as u64), |s| {
        let mut r = init_rng(s ^ 0x5A5A);
        let rho = r.random_range(0.2..0.8);
        let q = r.random_range(0.0..0.9);
        let (zeta, set, other) = random_pair_setup(25, rho, 3, s);
        pair_ordering(25, &zeta, &set, &other, q, 20.0, s, 0.25)
    })?;
    let pair_bad: usize = pair.iter().map(|p| p.violations).sum();
    let samples: usize = pair.iter().map(|p| p.samples).sum();
    Ok(Check::new(
        attr_bad == 0 && pair_bad == 0,
        format!(
            "attractivity: {attr_bad} violations in {COUPLING_TRAJECTORIES} trajectories (checked after every event); \
             pair ordering: {pair_bad} violations at {samples} samples in {COUPLING_TRAJECTORIES} trajectories"
        ),
    ))
}

fn record_bytes(rec: &TrajectoryRecord, sites: &[i64]) -> String {
    let mut out = TrajectoryRecord::csv_header(rec.init.iter().filter(|&&v| v == 2).count(), sites);
    out.push('\n');
    rec.write_csv_rows(0, &mut out);
    out.push_str(&rec.snapshot_lines());
    out
}

fn report_bytes(rep: &ScalingReport) -> Result<String> {
    Ok(format!("{}\n{}\n{}", to_json17(rep)?, rep.summary_csv(), rep.raw.to_csv()))
}

fn determinism(seed: u64) -> Result<Check> {
    type Job = Box<dyn Fn() -> Result<String>>;
    let runs: Vec<(&str, Job)> = vec![
        (
            "simulate",
            Box::new(move || {
                let rates = RateParams::new(0.3, 0.8, 0.6, 0.1, 0.2)?;
                let init = SimState::open(vec![2, 1, 0, 1, 2, 0, 0, 1, 1, 0, 1, 0])?;
                let spec = SampleSpec { sites: vec![1, 6, 12], snapshots: true };
                let (rec, _) = simulate_open(&init, &rates, 25.0, seed, 0.5, &spec)?;
                Ok(record_bytes(&rec, &spec.sites))
            }),
        ),
        (
            "concentration",
            Box::new(move || {
                let mut cfg = params(2.0, 0.0, 0.0, 0.0, 0.0);
                cfg.n_list = Some(vec![12, 24]);
                cfg.replicas = Some(20);
                cfg.seed = Some(seed);
                report_bytes(&exp_concentration(&cfg)?)
            }),
        ),
        (
            "drift",
            Box::new(move || {
                let cfg = ExperimentConfig {
                    horizon: Some(50.0),
                    replicas: Some(40),
                    seed: Some(seed),
                    ..Default::default()
                };
                report_bytes(&exp_drift(&cfg)?)
            }),
        ),
        (
            "hitting",
            Box::new(move || {
                let mut cfg = params(2.0, 0.0, 0.0, 0.0, 0.0);
                cfg.n_list = Some(vec![10, 20]);
                cfg.replicas = Some(20);
                cfg.seed = Some(seed);
                report_bytes(&exp_hitting(&cfg)?)
            }),
        ),
        (
            "coalescence",
            Box::new(move || {
                let mut cfg = params(2.0, 0.0, 0.0, 0.0, 0.0);
                cfg.n_list = Some(vec![8, 16]);
                cfg.replicas = Some(30);
                cfg.seed = Some(seed);
                report_bytes(&exp_coalescence(&cfg)?)
            }),
        ),
    ];
    let mut differing = Vec::new();
    let mut bytes = 0;
    for (name, f) in &runs {
        let (a, b) = (f()?, f()?);
        bytes += a.len();
        if a != b {
            differing.push(*name);
        }
    }
    let detail = if differing.is_empty() {
        format!("{} commands rerun with the same seed, {bytes} bytes identical", runs.len())
    } else {
        format!("outputs differ on rerun: {}", differing.join(", "))
    };
    Ok(Check::new(differing.is_empty(), detail))
}
