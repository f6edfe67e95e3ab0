//! Densities, light-particle location laws and the one-light relation on exact solves.

use super::generator::build_generator;
use super::sector::Sector;
use super::solve::{stationary, Distribution};
use crate::error::{Error, Result};
use crate::phase::{rates_to_boundary, BoundaryParams, RateParams};

/// Tolerance for the excluded parameter sets of the one-light relation.
pub const RELATION_GUARD: f64 = 1e-8;
/// Number of powers `ABCD·q^l` inspected by the guard.
pub const RELATION_GUARD_POWERS: i32 = 64;

fn check_dims(sector: &Sector, pi: &Distribution) -> Result<()> {
    if sector.len() != pi.len() {
        return Err(Error::Dimension(sector.len(), pi.len()));
    }
    Ok(())
}

/// `P(τ_site = species)` with `site` 1-based.
pub fn site_density(sector: &Sector, pi: &Distribution, site: usize, species: u8) -> Result<f64> {
    if site == 0 || site > sector.n() {
        return Err(Error::Index(format!("site {site} outside [1, {}]", sector.n())));
    }
    if species > 2 {
        return Err(Error::Param(format!("species must be 0, 1 or 2, got {species}")));
    }
    Ok(site_densities(sector, pi, species)?[site - 1])
}

/// Densities of `species` at every site, in one pass.
pub fn site_densities(sector: &Sector, pi: &Distribution, species: u8) -> Result<Vec<f64>> {
    check_dims(sector, pi)?;
    let n = sector.n();
    let mut out = vec![0.0; n];
    let mut tau = vec![0u8; n];
    for (idx, &p) in pi.as_slice().iter().enumerate() {
        sector.decode_into(idx, &mut tau);
        for (o, &v) in out.iter_mut().zip(&tau) {
            if v == species {
                *o += p;
            }
        }
    }
    Ok(out)
}

/// `out[i][s] = P(loc_{i+1} = s+1)`; empty when the sector has no light particles.
pub fn loc_marginals(sector: &Sector, pi: &Distribution) -> Result<Vec<Vec<f64>>> {
    check_dims(sector, pi)?;
    let (n, r) = (sector.n(), sector.r());
    let mut out = vec![vec![0.0; n]; r];
    let mut tau = vec![0u8; n];
    for (idx, &p) in pi.as_slice().iter().enumerate() {
        sector.decode_into(idx, &mut tau);
        let lights = tau.iter().enumerate().filter(|(_, &v)| v == 2).map(|(s, _)| s);
        for (i, s) in lights.enumerate() {
            out[i][s] += p;
        }
    }
    Ok(out)
}

/// Rejects parameters too close to `AC = 1` or `ABCD = q^{-l}`.
pub fn simple_relation_guard(b: &BoundaryParams) -> Result<()> {
    if (b.ac() - 1.0).abs() < RELATION_GUARD {
        return Err(Error::Guard(format!("AC = {} is within {RELATION_GUARD:e} of 1", b.ac())));
    }
    let u = b.abcd();
    let mut ql = 1.0;
    for l in 0..=RELATION_GUARD_POWERS {
        if (u * ql - 1.0).abs() < RELATION_GUARD {
            return Err(Error::Guard(format!("ABCD·q^{l} is within {RELATION_GUARD:e} of 1")));
        }
        ql *= b.q;
    }
    Ok(())
}

/// One row of the relation check: `P(k ≤ loc₁ ≤ l)` against the ratio of `N+1`-site densities.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RelationRow {
    pub k: usize,
    pub l: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// Both sides of the one-light relation for all `1 ≤ k ≤ l ≤ n`.
pub fn simple_relation_table(n: usize, rates: &RateParams) -> Result<Vec<RelationRow>> {
    simple_relation_guard(&rates_to_boundary(rates))?;
    let light = build_generator(n, 1, rates)?;
    let plain = build_generator(n + 1, 0, rates)?;
    let loc = loc_marginals(light.sector(), &stationary(&light)?)?.remove(0);
    let rho = site_densities(plain.sector(), &stationary(&plain)?, 1)?;
    let den = rho[0] - rho[n];
    if den.abs() < 1e-300 {
        return Err(Error::Degenerate("vanishing density drop across N+1 sites".into()));
    }
    let mut rows = Vec::with_capacity(n * (n + 1) / 2);
    for k in 1..=n {
        let mut lhs = 0.0;
        for l in k..=n {
            lhs += loc[l - 1];
            rows.push(RelationRow { k, l, lhs, rhs: (rho[k - 1] - rho[l]) / den });
        }
    }
    Ok(rows)
}

/// Maximal absolute residual of the one-light relation over `1 ≤ k ≤ l ≤ n`.
pub fn verify_simple_relation(n: usize, rates: &RateParams) -> Result<f64> {
    Ok(simple_relation_table(n, rates)?.iter().fold(0.0, |m, r| m.max((r.lhs - r.rhs).abs())))
}

/// Stationary law of a sector with the sector itself.
pub fn solve_sector(n: usize, r: usize, rates: &RateParams) -> Result<(Sector, Distribution)> {
    let g = build_generator(n, r, rates)?;
    let pi = stationary(&g)?;
    Ok((g.sector().clone(), pi))
}
