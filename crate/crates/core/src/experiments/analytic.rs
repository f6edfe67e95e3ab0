//! Experiments evaluated through the matrix product ansatz.

use super::config::ExperimentConfig;
use super::report::{Fit, RawTable, Row, ScalingReport, Verdict};
use crate::error::{Error, Result};
use crate::mpa::{densities_with, loc1_with, LocMethod};
use crate::phase::{bulk_profile, classify, light_mass_split, limiting_densities, Phase, Region};

/// Slack when comparing deviations that may both be at round-off level.
pub const TREND_SLACK: f64 = 1e-12;

pub(crate) fn nonincreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0] + TREND_SLACK)
}

pub(crate) fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

pub(crate) fn n_list(cfg: &ExperimentConfig, default: &[usize]) -> Result<Vec<usize>> {
    let list = cfg.n_list.clone().unwrap_or_else(|| default.to_vec());
    if list.is_empty() || list.contains(&0) {
        return Err(Error::Config("n_list must hold positive sizes".into()));
    }
    if list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("n_list must be increasing".into()));
    }
    Ok(list)
}

fn fmt_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Light-particle masses near both ends and in the middle in the maximal current phase.
pub fn exp_mass_split(cfg: &ExperimentConfig) -> Result<ScalingReport> {
    let b = cfg.boundary()?;
    let label = classify(&b);
    if label.phase != Phase::MaxCurrent {
        return Err(Error::WrongPhase { op: "mass-split", expected: "MaxCurrent", found: label.phase.name().into() });
    }
    if cfg.r.is_some_and(|r| r != 1) {
        return Err(Error::Config("mass-split uses a single light particle".into()));
    }
    let (target_l, target_r) = light_mass_split(&b)?;
    let ns = n_list(cfg, &[50, 100, 200])?;
    let tol = cfg.tolerance.unwrap_or(0.05);
    let precision = cfg.precision()?;
    let resolved = ExperimentConfig {
        n_list: Some(ns.clone()),
        r: Some(1),
        tolerance: Some(tol),
        precision: Some(precision.name().into()),
        ..cfg.with_params(&b)
    };
    let mut raw = RawTable::new(&["n", "a_n", "b_n", "left", "middle", "right"]);
    let mut rep_rows = Vec::new();
    let (mut mids, mut devs) = (Vec::new(), Vec::new());
    for &n in &ns {
        let loc = loc1_with(&b, n, LocMethod::Direct, precision)?;
        let a_n = (n as f64).sqrt().floor() as usize;
        let b_n = n - a_n;
        let left: f64 = loc[..a_n].iter().sum();
        let right: f64 = loc[b_n - 1..].iter().sum();
        let middle: f64 = loc[a_n..b_n - 1].iter().sum();
        let dev = (left - target_l).abs().max((right - target_r).abs());
        raw.push(vec![n as f64, a_n as f64, b_n as f64, left, middle, right]);
        let x = n as f64;
        rep_rows.extend([
            Row::exact(x, "left", left),
            Row::exact(x, "middle", middle),
            Row::exact(x, "right", right),
            Row::exact(x, "deviation", dev),
        ]);
        mids.push(middle);
        devs.push(dev);
    }
    let mut rep = ScalingReport::new("mass-split", resolved, "n", raw);
    rep.rows = rep_rows;
    rep.rows.push(Row::exact(0.0, "target_left", target_l));
    rep.rows.push(Row::exact(0.0, "target_right", target_r));
    rep.verdicts.push(Verdict::new("middle_decreasing", strictly_decreasing(&mids), fmt_list(&mids)));
    rep.verdicts.push(Verdict::new("deviation_nonincreasing", nonincreasing(&devs), fmt_list(&devs)));
    let last = *devs.last().unwrap();
    rep.verdicts.push(Verdict::new(
        "terminal_split",
        last <= tol,
        format!("max |mass − target| = {last:.6} at N = {}, tolerance {tol}", ns.last().unwrap()),
    ));
    Ok(rep)
}

fn coexistence_guard(op: &'static str, cfg: &ExperimentConfig) -> Result<crate::phase::BoundaryParams> {
    let b = cfg.boundary()?;
    let label = classify(&b);
    if label.phase != Phase::Coexistence {
        return Err(Error::WrongPhase { op, expected: "Coexistence", found: label.phase.name().into() });
    }
    Ok(b)
}

/// Kolmogorov distance between `loc₁/N` and the uniform law on the coexistence line.
pub fn exp_uniformity(cfg: &ExperimentConfig) -> Result<ScalingReport> {
    let b = coexistence_guard("uniformity", cfg)?;
    let ns = n_list(cfg, &[50, 100, 200])?;
    let tol = cfg.tolerance.unwrap_or(0.1);
    let precision = cfg.precision()?;
    let resolved = ExperimentConfig {
        n_list: Some(ns.clone()),
        r: Some(1),
        tolerance: Some(tol),
        precision: Some(precision.name().into()),
        ..cfg.with_params(&b)
    };
    let mut raw = RawTable::new(&["n", "k", "p"]);
    let mut rows = Vec::new();
    let mut dists = Vec::new();
    for &n in &ns {
        let loc = loc1_with(&b, n, LocMethod::Direct, precision)?;
        let mut cdf = 0.0;
        let mut dist: f64 = 0.0;
        for (i, p) in loc.iter().enumerate() {
            let k = (i + 1) as f64;
            let u = k / n as f64;
            dist = dist.max((cdf - u).abs());
            cdf += p;
            dist = dist.max((cdf - u).abs());
            raw.push(vec![n as f64, k, *p]);
        }
        let asym = (0..n).map(|i| (loc[i] - loc[n - 1 - i]).abs()).fold(0.0, f64::max);
        rows.push(Row::exact(n as f64, "kolmogorov", dist));
        rows.push(Row::exact(n as f64, "reflection_asymmetry", asym));
        dists.push(dist);
    }
    let mut rep = ScalingReport::new("uniformity", resolved, "n", raw);
    rep.rows = rows;
    rep.verdicts.push(Verdict::new("distance_decreasing", strictly_decreasing(&dists), fmt_list(&dists)));
    let last = *dists.last().unwrap();
    rep.verdicts.push(Verdict::new(
        "terminal_distance",
        last <= tol,
        format!("distance {last:.6} at N = {}, tolerance {tol}", ns.last().unwrap()),
    ));
    Ok(rep)
}

/// Density profile on the coexistence line against the linear limit.
pub fn exp_coexistence_profile(cfg: &ExperimentConfig) -> Result<ScalingReport> {
    let b = coexistence_guard("coexistence-profile", cfg)?;
    let ns = n_list(cfg, &[50, 100, 200])?;
    let thetas = cfg.thetas.clone().unwrap_or_else(|| (1..20).map(|i| i as f64 * 0.05).collect());
    if thetas.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(Error::Config("thetas must lie in (0, 1]".into()));
    }
    let tol = cfg.tolerance.unwrap_or(0.05);
    let precision = cfg.precision()?;
    let resolved = ExperimentConfig {
        n_list: Some(ns.clone()),
        thetas: Some(thetas.clone()),
        tolerance: Some(tol),
        precision: Some(precision.name().into()),
        ..cfg.with_params(&b)
    };
    let mut raw = RawTable::new(&["n", "theta", "site", "density", "limit"]);
    let mut rows = Vec::new();
    let mut sups = Vec::new();
    let (mut mid_dev, mut last_fit) = (f64::NAN, None);
    for &n in &ns {
        let rho = densities_with(&b, n, precision)?;
        let mut sup: f64 = 0.0;
        let mut ys = Vec::new();
        for &t in &thetas {
            let site = ((t * n as f64).floor() as usize).max(1);
            let limit = bulk_profile(&b, t)?;
            let d = rho[site - 1];
            sup = sup.max((d - limit).abs());
            raw.push(vec![n as f64, t, site as f64, d, limit]);
            ys.push(d);
        }
        let mid = rho[(n / 2).max(1) - 1];
        mid_dev = (mid - 0.5).abs();
        let fit = Fit::linear("density_vs_theta", &thetas, &ys)?;
        rows.push(Row::exact(n as f64, "sup_deviation", sup));
        rows.push(Row::exact(n as f64, "midpoint", mid));
        rows.push(Row::exact(n as f64, "first_site", rho[0]));
        rows.push(Row::exact(n as f64, "last_site", rho[n - 1]));
        rows.push(Row::exact(n as f64, "r_squared", fit.r_squared));
        last_fit = Some(fit);
        sups.push(sup);
    }
    let mut rep = ScalingReport::new("coexistence-profile", resolved, "n", raw);
    rep.rows = rows;
    rep.rows.push(Row::exact(0.0, "limit_left", 1.0 / (1.0 + b.a)));
    rep.rows.push(Row::exact(0.0, "limit_right", b.a / (1.0 + b.a)));
    let n_last = *ns.last().unwrap();
    rep.verdicts.push(Verdict::new("sup_deviation_nonincreasing", nonincreasing(&sups), fmt_list(&sups)));
    rep.verdicts.push(Verdict::new(
        "midpoint",
        mid_dev <= tol,
        format!("|ρ(N/2) − 1/2| = {mid_dev:.6} at N = {n_last}, tolerance {tol}"),
    ));
    let fit = last_fit.expect("n_list is nonempty");
    let r2 = fit.r_squared;
    rep.verdicts.push(Verdict::new("linear_fit", r2 >= 0.98, format!("R² = {r2:.6} at N = {n_last}")));
    rep.fits.push(fit);
    Ok(rep)
}

/// Densities at the two boundary sites against their limits.
pub fn exp_boundary_density(cfg: &ExperimentConfig) -> Result<ScalingReport> {
    let b = cfg.boundary()?;
    let ns = n_list(cfg, &[25, 50, 100, 200])?;
    let tol = cfg.tolerance.unwrap_or(0.02);
    let precision = cfg.precision()?;
    let label = classify(&b);
    let lim = limiting_densities(&b);
    let resolved = ExperimentConfig {
        n_list: Some(ns.clone()),
        tolerance: Some(tol),
        precision: Some(precision.name().into()),
        ..cfg.with_params(&b)
    };
    let mut raw = RawTable::new(&["n", "first_site", "last_site"]);
    let mut rows = Vec::new();
    let (mut dl, mut dr) = (Vec::new(), Vec::new());
    for &n in &ns {
        let rho = densities_with(&b, n, precision)?;
        let (first, last) = (rho[0], rho[n - 1]);
        raw.push(vec![n as f64, first, last]);
        dl.push((first - lim.sigma_left).abs());
        dr.push((last - lim.sigma_right).abs());
        rows.push(Row::exact(n as f64, "first_site", first));
        rows.push(Row::exact(n as f64, "last_site", last));
        rows.push(Row::exact(n as f64, "deviation_left", *dl.last().unwrap()));
        rows.push(Row::exact(n as f64, "deviation_right", *dr.last().unwrap()));
    }
    let mut rep = ScalingReport::new("boundary-density", resolved, "n", raw);
    rep.rows = rows;
    rep.rows.push(Row::exact(0.0, "sigma_left", lim.sigma_left));
    rep.rows.push(Row::exact(0.0, "sigma_right", lim.sigma_right));
    let n_last = *ns.last().unwrap();
    let phase = match (label.phase, label.region) {
        (p, Region::Boundary) => format!("{} (AC = 1)", p.name()),
        (p, _) => p.name().to_string(),
    };
    rep.verdicts.push(Verdict::new("left_nonincreasing", nonincreasing(&dl), format!("{phase}: {}", fmt_list(&dl))));
    rep.verdicts.push(Verdict::new("right_nonincreasing", nonincreasing(&dr), format!("{phase}: {}", fmt_list(&dr))));
    let (l, r) = (*dl.last().unwrap(), *dr.last().unwrap());
    rep.verdicts.push(Verdict::new(
        "left_terminal",
        l <= tol,
        format!("|μ(τ₁ = 1) − σ_ℓ| = {l:.6} at N = {n_last}, tolerance {tol}"),
    ));
    rep.verdicts.push(Verdict::new(
        "right_terminal",
        r <= tol,
        format!("|μ(τ_N = 1) − σ_r| = {r:.6} at N = {n_last}, tolerance {tol}"),
    ));
    Ok(rep)
}
