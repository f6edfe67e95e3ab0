use lightasep::exact::{build_generator, site_densities, solve_sector, stationary, transient, Distribution};
use lightasep::phase::rates_to_boundary;
use lightasep::RateParams;
use proptest::prelude::*;

fn rates() -> impl Strategy<Value = RateParams> {
    (0.0..0.9f64, 0.05..3.0f64, 0.05..3.0f64, 0.0..1.5f64, 0.0..1.5f64)
        .prop_map(|(q, a, b, g, d)| RateParams::new(q, a, b, g, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn stationary_residual_is_small(r in rates(), n in 1usize..7, lights in 0usize..3) {
        prop_assume!(lights <= n);
        let g = build_generator(n, lights, &r).unwrap();
        let pi = stationary(&g).unwrap();
        prop_assert!(g.residual(pi.as_slice()) <= 1e-10);
        prop_assert!(pi.as_slice().iter().all(|&p| p > 0.0));
    }

    #[test]
    fn densities_lie_between_reservoir_densities(r in rates(), n in 1usize..=7) {
        let b = rates_to_boundary(&r);
        let (lo, hi) = {
            let (x, y) = (b.rho_left(), b.rho_right());
            (x.min(y), x.max(y))
        };
        let (s, pi) = solve_sector(n, 0, &r).unwrap();
        for rho in site_densities(&s, &pi, 1).unwrap() {
            prop_assert!(rho >= lo - 1e-9 && rho <= hi + 1e-9, "{} not in [{}, {}]", rho, lo, hi);
        }
    }

    #[test]
    fn ordered_rates_dominate(
        r in rates(),
        bumps in (0.0..1.0f64, 0.0..0.9f64, 0.0..1.0f64, 0.0..1.0f64),
        n in 1usize..=6,
    ) {
        // r'' has more entering and less exiting than r'
        let (da, fb, fg, dd) = bumps;
        let upper = RateParams::new(r.q, r.alpha + da, r.beta * (1.0 - fb), r.gamma * (1.0 - fg), r.delta + dd).unwrap();
        let (s1, p1) = solve_sector(n, 0, &r).unwrap();
        let (s2, p2) = solve_sector(n, 0, &upper).unwrap();
        let lo = site_densities(&s1, &p1, 1).unwrap();
        let hi = site_densities(&s2, &p2, 1).unwrap();
        for (a, b) in lo.iter().zip(&hi) {
            prop_assert!(b >= &(a - 1e-10));
        }
    }

    #[test]
    fn transient_stays_a_distribution(r in rates(), t in 0.0..20.0f64) {
        let g = build_generator(4, 2, &r).unwrap();
        let p = transient(&g, &Distribution::uniform(g.dim()), t).unwrap();
        prop_assert_eq!(p.len(), g.dim());
        prop_assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
