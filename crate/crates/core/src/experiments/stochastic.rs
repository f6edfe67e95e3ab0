//! Monte Carlo experiments: concentration, drift, hitting and coalescence.

use rand::Rng;
use rayon::prelude::*;

use super::analytic::n_list;
use super::config::ExperimentConfig;
use super::report::{median_interval, Fit, RawTable, Row, ScalingReport, Verdict};
use crate::error::{Error, Result};
use crate::exact::{mixing_time_exact, sector_size};
use crate::mpa::{loc1_with, LocMethod};
use crate::phase::{classify, drift_kappa, BoundaryParams, Phase, Region};
use crate::sim::{
    burnin_start, coalescence_time, default_burnin, init_rng, light_path, min_half_width, time_average, Dynamics,
    Engine, ExactSampler, SimState,
};

/// Sectors at most this large start from an exact stationary draw instead of a burn-in.
pub const EXACT_START_LIMIT: u128 = 5000;

/// Runs `f(base + i)` for `i < reps` in parallel, keeping replica order.
pub fn replicate<T: Send>(reps: usize, base: u64, f: impl Fn(u64) -> Result<T> + Sync) -> Result<Vec<T>> {
    (0..reps as u64).into_par_iter().map(|i| f(base.wrapping_add(i))).collect()
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

fn median(xs: &[f64]) -> f64 {
    super::report::quantile(&sorted(xs), 0.5)
}

fn positive(name: &str, v: Option<f64>, default: f64) -> Result<f64> {
    let v = v.unwrap_or(default);
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(v)
}

/// High- or low-density phase on the fan side (`AC ≤ 1`).
fn fan_side(op: &'static str, b: &BoundaryParams, allow_low: bool) -> Result<bool> {
    let label = classify(b);
    let fan = matches!(label.region, Region::Fan | Region::Boundary);
    match label.phase {
        Phase::HighDensity if fan => Ok(true),
        Phase::LowDensity if fan && allow_low => Ok(false),
        p => Err(Error::WrongPhase {
            op,
            expected: if allow_low { "HighDensity or LowDensity fan" } else { "HighDensity fan" },
            found: format!("{} {}", p.name(), label.region.name()),
        }),
    }
}

/// Stationary mass of all light particles within `w` sites of the attracting boundary.
pub fn exp_concentration(cfg: &ExperimentConfig) -> Result<ScalingReport> {
    let b = cfg.boundary()?;
    let high = fan_side("concentration", &b, true)?;
    let rates = cfg.rates()?;
    let ns = n_list(cfg, &[100])?;
    let r = cfg.r.unwrap_or(1);
    let w = cfg.window.unwrap_or(25);
    let eps = cfg.eps.unwrap_or(0.1);
    let reps = cfg.replicas.unwrap_or(100);
    let seed = cfg.seed();
    if r == 0 || reps < 2 {
        return Err(Error::Config("concentration needs r ≥ 1 and at least two replicas".into()));
    }
    let horizon = positive("horizon", cfg.horizon, 20.0 * *ns.last().unwrap() as f64)?;
    let precision = cfg.precision()?;
    let resolved = ExperimentConfig {
        n_list: Some(ns.clone()),
        r: Some(r),
        window: Some(w),
        eps: Some(eps),
        replicas: Some(reps),
        horizon: Some(horizon),
        burnin: cfg.burnin,
        seed: Some(seed),
        precision: Some(precision.name().into()),
        ..cfg.with_params(&b)
    };
    let mut raw = RawTable::new(&["n", "replica", "seed", "mass"]);
    let mut rows = Vec::new();
    let mut lower = Vec::new();
    let mut agreement = Vec::new();
    for &n in &ns {
        if r > n {
            return Err(Error::Config(format!("r = {r} exceeds N = {n}")));
        }
        let inside = |s: &SimState| -> f64 {
            let (lo, hi) = s.light_extremes().expect("r ≥ 1");
            let ok = if high { hi <= w as i64 } else { lo > (n - w.min(n)) as i64 };
            ok as u8 as f64
        };
        let sampler =
            if sector_size(n, r) <= EXACT_START_LIMIT { Some(ExactSampler::new(n, r, &rates)?) } else { None };
        let burn = cfg.burnin.unwrap_or_else(|| default_burnin(n, rates.q));
        let masses = replicate(reps, seed, |s| {
            let (start, t0) = match &sampler {
                Some(sm) => (sm.draw(&mut init_rng(s)), 0.0),
                None => (SimState::open(burnin_start(n, r))?, burn),
            };
            let mut eng = Engine::new(vec![start], Dynamics::Open(rates), s)?;
            Ok(time_average(&mut eng, t0, t0 + horizon, inside))
        })?;
        for (i, m) in masses.iter().enumerate() {
            raw.push(vec![n as f64, i as f64, seed.wrapping_add(i as u64) as f64, *m]);
        }
        let row = Row::from_samples(n as f64, "mass", &masses);
        lower.push((n, row.ci_lo));
        if r == 1 {
            if let Ok(loc) = loc1_with(&b, n, LocMethod::Direct, precision) {
                let exact: f64 = if high { loc[..w.min(n)].iter().sum() } else { loc[n - w.min(n)..].iter().sum() };
                rows.push(Row::exact(n as f64, "mpa_mass", exact));
                agreement.push((n, (row.mean - exact).abs(), row.se));
            }
        }
        rows.push(row);
    }
    let mut rep = ScalingReport::new("concentration", resolved, "n", raw);
    rep.rows = rows;
    let detail: Vec<String> = lower.iter().map(|(n, l)| format!("N = {n}: lower CI {l:.4}")).collect();
    rep.verdicts.push(Verdict::new(
        "lower_ci",
        lower.iter().all(|(_, l)| *l >= 1.0 - eps),
        format!("{} vs threshold {}", detail.join(", "), 1.0 - eps),
    ));
    if !agreement.is_empty() {
        let detail: Vec<String> =
            agreement.iter().map(|(n, d, se)| format!("N = {n}: |sim − mpa| = {d:.4}, se {se:.4}")).collect();
        rep.verdicts.push(Verdict::new(
            "mpa_agreement",
            agreement.iter().all(|(_, d, se)| *d <= 3.0 * se),
            detail.join(", "),
        ));
    }
    Ok(rep)
}

/// Speed and fluctuation exponent of a single light particle in a Bernoulli environment.
pub fn exp_drift(cfg: &ExperimentConfig) -> Result<ScalingReport> {
    let rho = cfg.rho.unwrap_or(0.75);
    let q = cfg.q.unwrap_or(0.0);
    let kappa = drift_kappa(rho, q)?;
    let horizon = positive("horizon", cfg.horizon, 1000.0)?;
    let reps = cfg.replicas.unwrap_or(500);
    if reps < 2 {
        return Err(Error::Config("drift needs at least two replicas".into()));
    }
    let times = cfg.times.clone().unwrap_or_else(|| (0..5).rev().map(|k| horizon / f64::powi(2.0, k)).collect());
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_none_or(|&t| t <= 0.0) {
        return Err(Error::Config("times must be positive and increasing".into()));
    }
    if (times.last().unwrap() - horizon).abs() > 0.0 {
        return Err(Error::Config("the last sample time must equal the horizon".into()));
    }
    let l = cfg.window.map(|w| w as i64).unwrap_or_else(|| min_half_width(horizon, 0));
    let need = min_half_width(horizon, 0);
    if l < need {
        return Err(Error::WindowTooSmall { have: l, need });
    }
    let seed = cfg.seed();
    let resolved = ExperimentConfig {
        rho: Some(rho),
        q: Some(q),
        horizon: Some(horizon),
        replicas: Some(reps),
        times: Some(times.clone()),
        window: Some(l as usize),
        seed: Some(seed),
        ..cfg.clone()
    };
    let paths = replicate(reps, seed, |s| light_path(l, rho, q, &times, s))?;
    let mut header = vec!["replica".to_string(), "seed".to_string()];
    header.extend(times.iter().map(|t| format!("z_{t}")));
    let mut raw = RawTable { header, rows: Vec::new() };
    for (i, p) in paths.iter().enumerate() {
        let mut row = vec![i as f64, seed.wrapping_add(i as u64) as f64];
        row.extend(p.iter().map(|&z| z as f64));
        raw.push(row);
    }
    let mut rep = ScalingReport::new("drift", resolved, "t", raw);
    let (mut log_t, mut log_sd) = (Vec::new(), Vec::new());
    for (k, &t) in times.iter().enumerate() {
        let z: Vec<f64> = paths.iter().map(|p| p[k] as f64).collect();
        let row = Row::from_samples(t, "position", &z);
        let sd = row.se * (reps as f64).sqrt();
        rep.rows.push(Row::exact(t, "sd", sd));
        rep.rows.push(row);
        if sd > 0.0 {
            log_t.push(t.ln());
            log_sd.push(sd.ln());
        }
    }
    let speeds: Vec<f64> = paths.iter().map(|p| *p.last().unwrap() as f64 / horizon).collect();
    let speed = Row::from_samples(horizon, "speed", &speeds);
    rep.verdicts.push(Verdict::new(
        "speed_ci_contains_kappa",
        speed.ci_lo <= kappa && kappa <= speed.ci_hi,
        format!(
            "speed {:.5} ± {:.5} (95% CI [{:.5}, {:.5}]), κ = {kappa:.5}",
            speed.mean,
            1.96 * speed.se,
            speed.ci_lo,
            speed.ci_hi
        ),
    ));
    rep.rows.push(speed);
    rep.rows.push(Row::exact(horizon, "kappa", kappa));
    if log_t.len() >= 2 {
        let fit = Fit::linear("fluctuation_exponent", &log_t, &log_sd)?;
        rep.verdicts.push(Verdict::new(
            "fluctuation_exponent",
            (0.5..=0.85).contains(&fit.slope),
            format!("exponent {:.4} (95% CI [{:.4}, {:.4}])", fit.slope, fit.ci_lo, fit.ci_hi),
        ));
        rep.fits.push(fit);
    }
    Ok(rep)
}

/// First times the rightmost light particle escapes the right end and reaches the left end.
pub fn exp_hitting(cfg: &ExperimentConfig) -> Result<ScalingReport> {
    let b = cfg.boundary()?;
    fan_side("hitting", &b, false)?;
    let rates = cfg.rates()?;
    let ns = n_list(cfg, &[64, 128, 256])?;
    let theta = cfg.theta.unwrap_or(0.5);
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Config(format!("theta must lie in (0, 1), got {theta}")));
    }
    let r = cfg.r.unwrap_or(1);
    let reps = cfg.replicas.unwrap_or(100);
    let max_factor = positive("max_time", cfg.max_time, 50.0)?;
    let seed = cfg.seed();
    if r == 0 || reps < 2 || ns.len() < 2 {
        return Err(Error::Config("hitting needs r ≥ 1, two replicas and two sizes".into()));
    }
    let resolved = ExperimentConfig {
        n_list: Some(ns.clone()),
        theta: Some(theta),
        r: Some(r),
        replicas: Some(reps),
        max_time: Some(max_factor),
        seed: Some(seed),
        ..cfg.with_params(&b)
    };
    let bulk = b.rho_right();
    let mut raw = RawTable::new(&["n", "replica", "seed", "escape", "traverse"]);
    let mut rep_rows = Vec::new();
    let (mut esc_scaled, mut trav_scaled, mut censored) = (Vec::new(), Vec::new(), 0usize);
    let mut last_medians = (0.0, 0.0);
    for &n in &ns {
        if r > n {
            return Err(Error::Config(format!("r = {r} exceeds N = {n}")));
        }
        let nt = (n as f64).powf(theta);
        let (esc_at, trav_at) = (n as f64 - nt, nt);
        let cap = max_factor * n as f64;
        let times = replicate(reps, seed, |s| {
            let mut rng = init_rng(s);
            let occ: Vec<u8> = (0..n).map(|i| if i + r >= n { 2 } else { rng.random_bool(bulk) as u8 }).collect();
            let mut eng = Engine::new(vec![SimState::open(occ)?], Dynamics::Open(rates), s)?;
            let right = |e: &Engine| e.chains()[0].light_extremes().expect("r ≥ 1").1 as f64;
            let mut esc = (right(&eng) <= esc_at).then_some(0.0);
            let mut trav = (right(&eng) <= trav_at).then_some(0.0);
            while trav.is_none() {
                let Some(ev) = eng.step_until(cap) else { break };
                if ev.changed {
                    let x = right(&eng);
                    if esc.is_none() && x <= esc_at {
                        esc = Some(ev.time);
                    }
                    if x <= trav_at {
                        trav = Some(ev.time);
                    }
                }
            }
            Ok((esc, trav))
        })?;
        let mut esc = Vec::new();
        let mut trav = Vec::new();
        for (i, (e, t)) in times.iter().enumerate() {
            censored += e.is_none() as usize + t.is_none() as usize;
            let (e, t) = (e.unwrap_or(cap), t.unwrap_or(cap));
            raw.push(vec![n as f64, i as f64, seed.wrapping_add(i as u64) as f64, e, t]);
            esc.push(e);
            trav.push(t);
        }
        let x = n as f64;
        let (me, mt) = (median(&esc), median(&trav));
        esc_scaled.push(me / (nt * x.ln()));
        trav_scaled.push(mt / x);
        last_medians = (me, mt);
        rep_rows.push(Row::from_samples(x, "escape", &esc));
        rep_rows.push(Row::from_samples(x, "traverse", &trav));
        rep_rows.push(Row::exact(x, "escape_scaled_median", *esc_scaled.last().unwrap()));
        rep_rows.push(Row::exact(x, "traverse_scaled_median", *trav_scaled.last().unwrap()));
    }
    let mut rep = ScalingReport::new("hitting", resolved, "n", raw);
    rep.rows = rep_rows;
    let ratio = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max) / v.iter().cloned().fold(f64::MAX, f64::min);
    let (re, rt) = (ratio(&esc_scaled), ratio(&trav_scaled));
    rep.verdicts.push(Verdict::new(
        "escape_scaling",
        re <= 3.0,
        format!("max/min of median T_escape/(N^θ log N) = {re:.4}"),
    ));
    rep.verdicts.push(Verdict::new("traverse_scaling", rt <= 3.0, format!("max/min of median T_traverse/N = {rt:.4}")));
    rep.verdicts.push(Verdict::new(
        "escape_before_traverse",
        last_medians.0 < last_medians.1,
        format!("medians at N = {}: escape {:.3}, traverse {:.3}", ns.last().unwrap(), last_medians.0, last_medians.1),
    ));
    rep.verdicts.push(Verdict::new(
        "no_censoring",
        censored == 0,
        format!("{censored} hitting times capped at max_time·N"),
    ));
    Ok(rep)
}

/// Extremal pair for coalescence: all 1 with lights on `1..=r`, all 0 with lights on `n−r+1..=n`.
pub fn extremal_pair(n: usize, r: usize) -> Result<(SimState, SimState)> {
    let top = (0..n).map(|i| if i < r { 2 } else { 1 }).collect();
    let bottom = (0..n).map(|i| if i + r >= n { 2 } else { 0 }).collect();
    Ok((SimState::open(top)?, SimState::open(bottom)?))
}

/// Coalescence times of the extremal pair and their growth in `N`.
pub fn exp_coalescence(cfg: &ExperimentConfig) -> Result<ScalingReport> {
    let b = cfg.boundary()?;
    fan_side("coalescence", &b, true)?;
    let rates = cfg.rates()?;
    let ns = n_list(cfg, &[32, 64, 128])?;
    let r = cfg.r.unwrap_or(1);
    let reps = cfg.replicas.unwrap_or(200);
    let max_factor = positive("max_time", cfg.max_time, 500.0)?;
    let exact_n = cfg.exact_n.clone().unwrap_or_else(|| vec![4]);
    let eps = cfg.eps.unwrap_or(0.25);
    let seed = cfg.seed();
    if reps < 2 {
        return Err(Error::Config("coalescence needs at least two replicas".into()));
    }
    if exact_n.iter().any(|&n| n > 6 || n < r.max(1)) {
        return Err(Error::Config("exact_n entries must lie in [max(r, 1), 6]".into()));
    }
    let resolved = ExperimentConfig {
        n_list: Some(ns.clone()),
        r: Some(r),
        replicas: Some(reps),
        max_time: Some(max_factor),
        exact_n: Some(exact_n.clone()),
        eps: Some(eps),
        seed: Some(seed),
        ..cfg.with_params(&b)
    };
    let mut raw = RawTable::new(&["n", "replica", "seed", "coalescence"]);
    let mut rep_rows = Vec::new();
    let mut censored = 0usize;
    let mut medians = std::collections::BTreeMap::new();
    let mut all_n: Vec<usize> = exact_n.iter().chain(&ns).copied().collect();
    all_n.sort_unstable();
    all_n.dedup();
    for &n in &all_n {
        if r > n {
            return Err(Error::Config(format!("r = {r} exceeds N = {n}")));
        }
        let cap = max_factor * n as f64;
        let times = replicate(reps, seed, |s| {
            let (top, bottom) = extremal_pair(n, r)?;
            coalescence_time(top, bottom, &rates, s, cap)
        })?;
        let vals: Vec<f64> = times.iter().map(|t| t.unwrap_or(cap)).collect();
        censored += times.iter().filter(|t| t.is_none()).count();
        for (i, v) in vals.iter().enumerate() {
            raw.push(vec![n as f64, i as f64, seed.wrapping_add(i as u64) as f64, *v]);
        }
        let x = n as f64;
        let (lo, hi) = median_interval(&sorted(&vals));
        let row = Row::from_samples(x, "coalescence", &vals);
        medians.insert(n, row.median);
        rep_rows.push(row);
        rep_rows.push(Row::exact(x, "median_ci_lo", lo));
        rep_rows.push(Row::exact(x, "median_ci_hi", hi));
    }
    let mut rep = ScalingReport::new("coalescence", resolved, "n", raw);
    rep.rows = rep_rows;
    let mut ratios = Vec::new();
    for w in ns.windows(2) {
        if w[1] == 2 * w[0] {
            let ratio = medians[&w[1]] / medians[&w[0]];
            rep.rows.push(Row::exact(w[1] as f64, "median_ratio", ratio));
            ratios.push(format!("{}→{}: {ratio:.4}", w[0], w[1]));
            rep.verdicts.push(Verdict::new(
                &format!("ratio_{}_{}", w[0], w[1]),
                (1.5..=2.5).contains(&ratio),
                format!("median coal({})/coal({}) = {ratio:.4}", w[1], w[0]),
            ));
        }
    }
    if ns.len() >= 2 {
        let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        let ys: Vec<f64> = ns.iter().map(|n| medians[n]).collect();
        let fit = Fit::linear("median_vs_n", &xs, &ys)?;
        rep.verdicts.push(Verdict::new(
            "slope_positive",
            fit.ci_lo > 0.0 || (fit.se == 0.0 && fit.slope > 0.0),
            format!("slope {:.4} (95% CI [{:.4}, {:.4}])", fit.slope, fit.ci_lo, fit.ci_hi),
        ));
        rep.fits.push(fit);
    }
    for &n in &exact_n {
        let t_mix = mixing_time_exact(n, r, &rates, eps)?;
        rep.rows.push(Row::exact(n as f64, "exact_mixing_time", t_mix));
        let med = medians[&n];
        rep.verdicts.push(Verdict::new(
            &format!("exact_mixing_n{n}"),
            t_mix <= med,
            format!("t_mix({eps}) = {t_mix:.4} vs median coalescence {med:.4} at n = {n}"),
        ));
    }
    rep.verdicts.push(Verdict::new("no_censoring", censored == 0, format!("{censored} runs capped at max_time·N")));
    Ok(rep)
}
