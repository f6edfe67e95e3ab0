use lightasep::exact::{loc_marginals, site_densities, solve_sector};
use lightasep::mpa::{
    build_representation, config_probability, guard_nonzero, loc1_distribution, partition_values, sigma_left_via_aw,
    site_densities_mpa, DoubleDouble, LocMethod,
};
use lightasep::phase::{boundary_to_rates, limiting_densities, sample_boundary, Cell};
use lightasep::{BoundaryParams, RateParams};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

fn draws(seed: u64, per_cell: usize, cells: &[Cell]) -> Vec<BoundaryParams> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut out = Vec::new();
    for &cell in cells {
        for _ in 0..per_cell {
            out.push(sample_boundary(cell, 0.8, &mut rng));
        }
    }
    out
}

fn well_conditioned(b: &BoundaryParams) -> bool {
    (1.0 - b.abcd()).abs() > 1e-2
}

#[test]
fn single_site_probability() {
    for b in draws(1, 4, &Cell::ALL) {
        let r = boundary_to_rates(&b);
        let rep = build_representation::<f64>(&b, 4).unwrap();
        let p = config_probability(&rep, &[1]).unwrap();
        let want = (r.alpha + r.delta) / (r.alpha + r.beta + r.gamma + r.delta);
        assert!((p - want).abs() < 1e-12, "{b:?}: {p} vs {want}");
    }
}

#[test]
fn configuration_probabilities_match_exact() {
    for b in draws(2, 20, &Cell::ALL).into_iter().filter(well_conditioned) {
        let rates = boundary_to_rates(&b);
        for n in 1..=6 {
            let rep = build_representation::<f64>(&b, n + 2).unwrap();
            let (sector, pi) = solve_sector(n, 0, &rates).unwrap();
            let mut total = 0.0;
            for (idx, tau) in sector.iter().enumerate() {
                let p = config_probability(&rep, &tau).unwrap();
                total += p;
                assert!((p - pi.as_slice()[idx]).abs() <= 1e-9, "{b:?} n={n} {tau:?}");
            }
            assert!((total - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn densities_and_loc_match_exact() {
    for b in draws(3, 20, &Cell::ALL).into_iter().filter(well_conditioned) {
        let rates = boundary_to_rates(&b);
        for n in 1..=7 {
            let rep = build_representation::<f64>(&b, n + 3).unwrap();
            let (s, pi) = solve_sector(n, 0, &rates).unwrap();
            let exact = site_densities(&s, &pi, 1).unwrap();
            let mpa = site_densities_mpa(&rep, n).unwrap();
            for (x, y) in exact.iter().zip(&mpa) {
                assert!((x - y).abs() <= 1e-9, "{b:?} n={n}");
            }
            if (b.ac() - 1.0).abs() < 1e-8 {
                continue;
            }
            let (s, pi) = solve_sector(n, 1, &rates).unwrap();
            let exact = loc_marginals(&s, &pi).unwrap().remove(0);
            for via in [LocMethod::Direct, LocMethod::Relation] {
                let mpa = loc1_distribution(&rep, n, via).unwrap();
                for (x, y) in exact.iter().zip(&mpa) {
                    assert!((x - y).abs() <= 1e-9, "{b:?} n={n} {via:?}");
                }
            }
        }
    }
}

#[test]
fn normalization_ratio() {
    for b in draws(4, 3, &Cell::ALL).into_iter().filter(well_conditioned) {
        let rates = boundary_to_rates(&b);
        let rep = build_representation::<f64>(&b, 10).unwrap();
        let pv = partition_values(&rep, 7).unwrap();
        assert_eq!(pv.z[0].value(), 1.0);
        for n in 1..=6 {
            let (s, pi) = solve_sector(n + 1, 0, &rates).unwrap();
            let rho = site_densities(&s, &pi, 1).unwrap();
            let ratio = pv.zhat[n - 1].ratio(&pv.z[n + 1]);
            assert!((ratio - (rho[0] - rho[n])).abs() < 1e-9, "{b:?} n={n}");
        }
    }
}

#[test]
fn tasep_two_sites_loc() {
    let b = BoundaryParams::new(0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
    let rep = build_representation::<f64>(&b, 5).unwrap();
    for via in [LocMethod::Direct, LocMethod::Relation] {
        let p = loc1_distribution(&rep, 2, via).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-14 && (p[1] - 0.5).abs() < 1e-14);
    }
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn loc_methods_agree_in_double_up_to_fifty() {
    for b in draws(5, 3, &Cell::ALL).into_iter().filter(well_conditioned) {
        for n in (2..=50).step_by(4) {
            let rep = build_representation::<f64>(&b, n + 3).unwrap();
            let d = loc1_distribution(&rep, n, LocMethod::Direct).unwrap();
            let r = loc1_distribution(&rep, n, LocMethod::Relation).unwrap();
            assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-9, "{b:?} n={n}");
            assert!(max_gap(&d, &r) <= 1e-9, "{b:?} n={n}");
        }
    }
}

#[test]
fn loc_methods_agree_in_high_precision_up_to_one_hundred() {
    for b in draws(5, 3, &Cell::ALL) {
        for n in [2, 17, 50, 100] {
            let rep = build_representation::<DoubleDouble>(&b, n + 3).unwrap();
            let d = loc1_distribution(&rep, n, LocMethod::Direct).unwrap();
            let r = loc1_distribution(&rep, n, LocMethod::Relation).unwrap();
            assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12, "{b:?} n={n}");
            assert!(max_gap(&d, &r) <= 1e-12, "{b:?} n={n}");
        }
    }
}

#[test]
fn bernoulli_line_density() {
    for (a, bb, d, q) in [(2.0, -0.3, -0.5, 0.4), (0.6, 0.0, 0.0, 0.0), (1.25, -0.7, -0.2, 0.7)] {
        let c = 1.0 / a;
        let b = BoundaryParams::new(a, bb, c, d, q).unwrap();
        let rep = build_representation::<f64>(&b, 53).unwrap();
        for rho in site_densities_mpa(&rep, 50).unwrap() {
            assert!((rho - 1.0 / (1.0 + c)).abs() < 1e-9);
        }
    }
}

#[test]
fn maximal_current_bulk() {
    let b = BoundaryParams::new(0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
    let rep = build_representation::<f64>(&b, 203).unwrap();
    let rho = site_densities_mpa(&rep, 200).unwrap();
    assert!((rho[99] - 0.5).abs() < 0.05);
}

#[test]
fn coexistence_location_is_spread() {
    let b = BoundaryParams::new(2.0, 0.0, 2.0, 0.0, 0.0).unwrap();
    let rep = build_representation::<f64>(&b, 203).unwrap();
    let p = loc1_distribution(&rep, 200, LocMethod::Direct).unwrap();
    let mut cdf = 0.0;
    let mut ks: f64 = 0.0;
    for (i, pi) in p.iter().enumerate() {
        cdf += pi;
        ks = ks.max((cdf - (i + 1) as f64 / 200.0).abs());
    }
    assert!(ks <= 0.1, "ks={ks}");
}

#[test]
fn truncation_is_exact() {
    for b in draws(6, 2, &Cell::ALL).into_iter().filter(well_conditioned) {
        for n in [5, 20, 40] {
            let small = build_representation::<f64>(&b, n + 2).unwrap();
            let big = build_representation::<f64>(&b, n + 10).unwrap();
            let a = site_densities_mpa(&small, n).unwrap();
            let c = site_densities_mpa(&big, n).unwrap();
            for (x, y) in a.iter().zip(&c) {
                assert!((x - y).abs() <= 1e-13);
            }
            let pa = partition_values(&small, n).unwrap();
            let pb = partition_values(&big, n).unwrap();
            assert!((pa.z[n].ratio(&pb.z[n]) - 1.0).abs() <= 1e-13);
            assert!((pa.zhat[n - 1].ratio(&pb.zhat[n - 1]) - 1.0).abs() <= 1e-13);
            if (b.ac() - 1.0).abs() > 1e-8 {
                let la = loc1_distribution(&small, n, LocMethod::Direct).unwrap();
                let lb = loc1_distribution(&big, n, LocMethod::Direct).unwrap();
                for (x, y) in la.iter().zip(&lb) {
                    assert!((x - y).abs() <= 1e-13);
                }
            }
        }
    }
}

#[test]
fn density_differences_keep_one_sign() {
    for b in draws(7, 3, &Cell::ALL).into_iter().filter(well_conditioned) {
        for n in [10, 30, 50] {
            let rep = build_representation::<f64>(&b, n + 2).unwrap();
            let rho = site_densities_mpa(&rep, n).unwrap();
            let diffs: Vec<f64> = rho.windows(2).map(|w| w[0] - w[1]).collect();
            let pos = diffs.iter().all(|&d| d >= -1e-12);
            let neg = diffs.iter().all(|&d| d <= 1e-12);
            assert!(pos || neg, "{b:?} n={n}");
        }
    }
}

#[test]
fn near_guard_high_precision_matches_exact() {
    // ABCD within 3e-3 of 1
    let b = BoundaryParams::new(1.9, -0.7, 1.6, -0.4705, 0.5).unwrap();
    assert!((1.0 - b.abcd()).abs() < 3e-3);
    let rates = boundary_to_rates(&b);
    let rep = build_representation::<DoubleDouble>(&b, 9).unwrap();
    let (s, pi) = solve_sector(6, 0, &rates).unwrap();
    let exact = site_densities(&s, &pi, 1).unwrap();
    for (x, y) in exact.iter().zip(site_densities_mpa(&rep, 6).unwrap()) {
        assert!((x - y).abs() <= 1e-9);
    }
}

#[test]
fn sigma_left_is_constant_in_t() {
    for (cell, ts) in [
        (Cell::MaxCurrent, [0.1, 0.3, 0.5, 0.7, 0.9]),
        (Cell::HighDensityFan, [0.99, 0.992, 0.995, 0.997, 0.999]),
        (Cell::HighDensityShock, [0.99, 0.992, 0.995, 0.997, 0.999]),
    ] {
        for b in draws(8, 30, &[cell]) {
            let closed = limiting_densities(&b).sigma_left;
            for t in ts {
                let s = sigma_left_via_aw(&b, t).unwrap();
                assert!((s - closed).abs() <= 1e-10, "{cell:?} {b:?} t={t}: {s} vs {closed}");
            }
        }
    }
}

#[test]
fn guard_examples() {
    let zero = BoundaryParams::new(0.0, 0.0, 0.0, 0.0, 0.5).unwrap();
    assert!(guard_nonzero(&zero, 64));
    let one = BoundaryParams::new(2.0, -0.5, 2.0, -0.5, 0.5).unwrap();
    assert!(!guard_nonzero(&one, 64));
    // ABCD = q^{-3} = 8
    let cubed = BoundaryParams::new(5.0, -0.8, 4.0, -0.5, 0.5).unwrap();
    assert!((cubed.abcd() - 8.0).abs() < 1e-12);
    assert!(!guard_nonzero(&cubed, 64));
    let _ = RateParams::new(0.0, 1.0, 1.0, 0.0, 0.0).unwrap();
}
