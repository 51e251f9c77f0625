//! Rate-layer invariants on random instances.

mod common;

use common::{random_gains, rel_err, rng};
use proptest::prelude::*;
use rand::Rng;
use twr_secrecy::game::{
    source_utility, source_utility_from_coefficients, utility_coefficients, Market,
};
use twr_secrecy::rates::{
    beta_factor, secrecy_rates, secrecy_rates_without_jamming, secrecy_sum, secrecy_sum_partial,
};
use twr_secrecy::{ChannelGains, PowerAllocation, SystemConfig};

fn gain() -> impl Strategy<Value = f64> {
    (-3.0f64..1.5).prop_map(|e| 10f64.powf(e))
}

fn power() -> impl Strategy<Value = f64> {
    0.0f64..=10.0
}

fn instance() -> impl Strategy<Value = (PowerAllocation, ChannelGains, SystemConfig)> {
    (
        (1e-3f64..=10.0, 1e-3f64..=10.0, 1e-3f64..=10.0),
        prop::collection::vec((power(), gain()), 0..4),
        gain(),
        gain(),
        (-4.0f64..0.0).prop_map(|e| 10f64.powf(e)),
    )
        .prop_map(|((p1, p2, pr), jam, g1, g2, noise)| {
            let (pj, gj): (Vec<f64>, Vec<f64>) = jam.into_iter().unzip();
            let cfg = SystemConfig {
                noise_power: noise,
                ..Default::default()
            };
            (
                PowerAllocation::new(p1, p2, pr, pj),
                ChannelGains::new(g1, g2, gj).unwrap(),
                cfg,
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn beta_normalizes_relay_output((p, g, cfg) in instance()) {
        let beta = beta_factor(&p, &g, &cfg).unwrap();
        let jam: f64 = p.pj.iter().zip(&g.g_jr).map(|(a, b)| a * b).sum();
        let total = p.p1 * g.g_s1r + p.p2 * g.g_s2r + jam + cfg.noise_power;
        prop_assert!((beta * beta * total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn swapping_sources_swaps_rates((p, g, cfg) in instance()) {
        let r = secrecy_rates(&p, &g, &cfg).unwrap();
        let ps = PowerAllocation::new(p.p2, p.p1, p.pr, p.pj.clone());
        let gs = ChannelGains::new(g.g_s2r, g.g_s1r, g.g_jr.clone()).unwrap();
        let s = secrecy_rates(&ps, &gs, &cfg).unwrap();
        for (a, b) in [(r.c1, s.c2), (r.c2, s.c1), (r.c1m, s.c2m), (r.c2m, s.c1m)] {
            prop_assert!(rel_err(a, b) <= 1e-12, "{a} vs {b}");
        }
        // clipped values sit on a difference of logs; compare on the unclipped scale
        let scale = r.c1.max(r.c2).max(r.c1m).max(r.c2m).max(1e-300);
        prop_assert!((r.c1s - s.c2s).abs() <= 1e-12 * scale);
        prop_assert!((r.c2s - s.c1s).abs() <= 1e-12 * scale);
    }

    #[test]
    fn clipping_bounds((p, g, cfg) in instance()) {
        let r = secrecy_rates(&p, &g, &cfg).unwrap();
        prop_assert!(r.c1s >= 0.0 && r.c2s >= 0.0);
        prop_assert!(r.c1s <= r.c1 && r.c2s <= r.c2);
    }

    #[test]
    fn eavesdropper_capacity_falls_with_jamming(
        (p, g, cfg) in instance(),
        bump in 1e-6f64..1.0,
    ) {
        let base = secrecy_rates(&p, &g, &cfg).unwrap();
        for i in 0..p.pj.len() {
            let mut q = p.clone();
            q.pj[i] += bump;
            let r = secrecy_rates(&q, &g, &cfg).unwrap();
            prop_assert!(r.c1m <= base.c1m && r.c2m <= base.c2m);
        }
    }
}

#[test]
fn zero_jamming_matches_jammer_free_form() {
    let mut rng = rng(23);
    let cfg = SystemConfig::default();
    for _ in 0..1000 {
        let n = rng.random_range(0..4);
        let g = random_gains(&mut rng, n);
        let p = PowerAllocation::new(
            rng.random_range(0.0..=10.0),
            rng.random_range(0.0..=10.0),
            rng.random_range(1e-3..=10.0),
            vec![0.0; n],
        );
        let r = secrecy_rates(&p, &g, &cfg).unwrap();
        let (a, b) = secrecy_rates_without_jamming(p.sources(), &g, &cfg).unwrap();
        let scale = r.c1.max(r.c2).max(r.c1m).max(r.c2m);
        assert!((r.c1s - a).abs() <= 1e-12 * scale, "{} vs {a}", r.c1s);
        assert!((r.c2s - b).abs() <= 1e-12 * scale, "{} vs {b}", r.c2s);
    }
}

#[test]
fn coefficient_form_matches_direct_utility() {
    let mut rng = rng(5);
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.random_range(1..4);
        let g = random_gains(&mut rng, n);
        let cfg = SystemConfig::default().with_rate_gain(rng.random_range(0.5..100.0));
        let p = PowerAllocation::new(
            rng.random_range(0.1..=10.0),
            rng.random_range(0.1..=10.0),
            rng.random_range(0.1..=10.0),
            (0..n).map(|_| rng.random_range(0.0..=1.0)).collect(),
        );
        let r = secrecy_rates(&p, &g, &cfg).unwrap();
        if !(r.c1s > 0.0 && r.c2s > 0.0) {
            continue;
        }
        let market = Market::uniform(n, rng.random_range(0.0..1.0), 1.0).unwrap();
        let direct = source_utility(&p, &g, &market, &cfg).unwrap();
        let coeffs = utility_coefficients(&p, &g, &cfg).unwrap();
        let coef = source_utility_from_coefficients(&coeffs, &p.pj, &market, &cfg);
        let scale = cfg.rate_gain * (r.c1 + r.c2 + r.c1m + r.c2m) + market.payment(&p.pj);
        assert!((direct - coef).abs() <= 1e-10 * scale, "{direct} vs {coef}");
        checked += 1;
    }
}

#[test]
fn analytic_partial_matches_central_difference() {
    let mut rng = rng(77);
    let cfg = SystemConfig::default();
    let mut checked = 0;
    while checked < 500 {
        let n = rng.random_range(1..4);
        let g = random_gains(&mut rng, n);
        let p = PowerAllocation::new(
            10.0,
            10.0,
            10.0,
            (0..n).map(|_| rng.random_range(0.01..=9.0)).collect(),
        );
        let r = secrecy_rates(&p, &g, &cfg).unwrap();
        // stay away from the clipping kinks
        if (r.c1 - r.c1m).abs() < 1e-3 || (r.c2 - r.c2m).abs() < 1e-3 {
            continue;
        }
        for i in 0..n {
            let h = 1e-6;
            let mut lo = p.clone();
            let mut hi = p.clone();
            lo.pj[i] -= h;
            hi.pj[i] += h;
            let fd = (secrecy_sum(&hi, &g, &cfg).unwrap() - secrecy_sum(&lo, &g, &cfg).unwrap())
                / (2.0 * h);
            let an = secrecy_sum_partial(&p, &g, &cfg, i).unwrap();
            assert!((fd - an).abs() <= 1e-6 * (1.0 + an.abs()), "{fd} vs {an}");
        }
        checked += 1;
    }
}
