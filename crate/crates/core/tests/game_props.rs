//! Market layer: best-response oracle, price-update properties and traces.

mod common;

use common::{log_uniform, random_gains, rel_err, rng};
use rand::Rng;
use twr_secrecy::game::{
    high_interference_demand, price_update, run_stackelberg, source_best_response, source_utility,
    DemandModel, Market, StackelbergOptions,
};
use twr_secrecy::rates::{secrecy_rates_without_jamming, secrecy_sum};
use twr_secrecy::{ChannelGains, PowerAllocation, SourcePowers, SystemConfig};

const ORACLE_POINTS: usize = 100_000;

/// Grid argmax of the exact source utility over `[0, p_max]`.
fn grid_best(
    gains: &ChannelGains,
    market: &Market,
    sources: SourcePowers,
    cfg: &SystemConfig,
) -> (f64, f64) {
    let mut alloc = sources.with_jamming(vec![0.0]);
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 0..=ORACLE_POINTS {
        alloc.pj[0] = cfg.power_cap * k as f64 / ORACLE_POINTS as f64;
        let u = source_utility(&alloc, gains, market, cfg).unwrap();
        if u > best.1 {
            best = (alloc.pj[0], u);
        }
    }
    best
}

#[test]
fn best_response_matches_grid_oracle() {
    let cfg = SystemConfig::default();
    let step = cfg.power_cap / ORACLE_POINTS as f64;
    let mut rng = rng(101);
    let mut interior = 0;
    for _ in 0..100 {
        let g = random_gains(&mut rng, 1);
        let market = Market::uniform(1, log_uniform(&mut rng, 1e-4, 1.0), 1.0).unwrap();
        let src = SourcePowers::at_cap(&cfg);
        let fixed = src.with_jamming(vec![0.0]);
        let p = source_best_response(0, &g, &market, &fixed, &cfg).unwrap();
        assert!((0.0..=cfg.power_cap).contains(&p));
        let u = source_utility(&src.with_jamming(vec![p]), &g, &market, &cfg).unwrap();
        let (x_grid, u_grid) = grid_best(&g, &market, src, &cfg);
        assert!(u >= u_grid - 1e-8, "{g:?}: U {u} < grid {u_grid}");
        assert!(
            (p - x_grid).abs() <= step,
            "{g:?}: argmax {p} vs grid {x_grid}"
        );
        if p > 0.0 && p < cfg.power_cap {
            interior += 1;
        }
    }
    assert!(interior >= 10, "only {interior} interior instances");
}

#[test]
fn demand_vanishes_at_huge_prices() {
    let cfg = SystemConfig::default();
    let g = ChannelGains::new(1.0, 1.0, vec![4.0]).unwrap();
    let fixed = SourcePowers::at_cap(&cfg).with_jamming(vec![0.0]);
    let cheap = Market::uniform(1, 1e-3, 1.0).unwrap();
    assert!(source_best_response(0, &g, &cheap, &fixed, &cfg).unwrap() > 0.0);
    let dear = Market::uniform(1, 1e6, 1.0).unwrap();
    assert_eq!(
        source_best_response(0, &g, &dear, &fixed, &cfg).unwrap(),
        0.0
    );
}

#[test]
fn jamming_helps_when_relay_noise_is_small() {
    let cfg = SystemConfig::default();
    let mut rng = rng(202);
    let mut checked = 0;
    while checked < 200 {
        let g = random_gains(&mut rng, 1);
        let pr = cfg.power_cap;
        if cfg.noise_power / pr >= g.g_s1r.min(g.g_s2r) {
            continue;
        }
        let base = PowerAllocation::new(pr, pr, pr, vec![0.0]);
        let zero = secrecy_sum(&base, &g, &cfg).unwrap();
        let mut alloc = base.clone();
        let better = (1..=1000).any(|k| {
            alloc.pj[0] = cfg.power_cap * k as f64 / 1000.0;
            secrecy_sum(&alloc, &g, &cfg).unwrap() > zero
        });
        assert!(better, "{g:?}");
        checked += 1;
    }
}

#[test]
fn closed_form_demand_is_decreasing_and_convex() {
    let d1 = -50.0;
    let p_max = 1e9;
    let prices: Vec<f64> = (0..200).map(|k| 1e-3 * 1.05f64.powi(k)).collect();
    let p: Vec<f64> = prices
        .iter()
        .map(|m| high_interference_demand(d1, *m, p_max))
        .collect();
    for w in p.windows(2) {
        assert!(w[1] < w[0]);
    }
    for k in 1..prices.len() - 1 {
        // divided-difference slopes increase on a convex curve
        let s0 = (p[k] - p[k - 1]) / (prices[k] - prices[k - 1]);
        let s1 = (p[k + 1] - p[k]) / (prices[k + 1] - prices[k]);
        assert!(s1 > s0);
    }
    assert_eq!(high_interference_demand(4.0, 1.0, 10.0), 0.0);
}

struct Instance {
    gains: ChannelGains,
    market: Market,
    fixed: PowerAllocation,
    cfg: SystemConfig,
}

fn random_market_instance(rng: &mut rand_chacha::ChaCha8Rng) -> Instance {
    let n = rng.random_range(1..=2);
    let gains = random_gains(rng, n);
    let cfg = SystemConfig::default().with_rate_gain(log_uniform(rng, 1.0, 100.0));
    let prices = (0..n).map(|_| log_uniform(rng, 1e-3, 1.0)).collect();
    let exps = (0..n).map(|_| rng.random_range(1.0..=2.0)).collect();
    let market = Market::new(prices, exps).unwrap();
    let fixed = SourcePowers::at_cap(&cfg).with_jamming(vec![0.0; n]);
    Instance {
        gains,
        market,
        fixed,
        cfg,
    }
}

#[test]
fn price_update_is_positive() {
    let mut rng = rng(303);
    let mut derivative_based = 0;
    for _ in 0..200 {
        let inst = random_market_instance(&mut rng);
        for i in 0..inst.market.len() {
            let up = price_update(
                i,
                &inst.market,
                &inst.gains,
                &inst.fixed,
                &inst.cfg,
                DemandModel::Exact,
            )
            .unwrap();
            assert!(up.price > 0.0, "{up:?}");
            if up.fallback.is_none() {
                derivative_based += 1;
            }
        }
    }
    assert!(
        derivative_based >= 20,
        "only {derivative_based} interior updates"
    );
}

/// Standard-function diagnostics for the single-jammer update map. Positivity
/// is required; monotonicity and scalability are reported, since they are
/// only established for the closed-form demand.
#[test]
fn standard_function_diagnostics() {
    let mut rng = rng(404);
    let (mut probes, mut monotone, mut scalable) = (0, 0, 0);
    for _ in 0..100 {
        let gains = random_gains(&mut rng, 1);
        let cfg = SystemConfig::default().with_rate_gain(log_uniform(&mut rng, 1.0, 100.0));
        let fixed = SourcePowers::at_cap(&cfg).with_jamming(vec![0.0]);
        let m = log_uniform(&mut rng, 1e-3, 1.0);
        let update = |price: f64| {
            let market = Market::uniform(1, price, 1.0).unwrap();
            price_update(0, &market, &gains, &fixed, &cfg, DemandModel::Exact).unwrap()
        };
        let base = update(m);
        let higher = update(1.1 * m);
        let scaled = update(1.5 * m);
        assert!(base.price > 0.0 && higher.price > 0.0 && scaled.price > 0.0);
        if [&base, &higher, &scaled]
            .iter()
            .any(|u| u.fallback.is_some())
        {
            continue;
        }
        probes += 1;
        monotone += usize::from(higher.price >= base.price);
        scalable += usize::from(1.5 * base.price > scaled.price);
    }
    eprintln!("standard-function probes: {probes}, monotone {monotone}, scalable {scalable}");

    // closed-form demand: I(m) = 2m/c, so monotone with equality in scaling
    let cfg = SystemConfig::default();
    let gains = ChannelGains::new(1.0, 1.0, vec![400.0]).unwrap();
    let fixed = PowerAllocation::new(10.0, 10.0, 10.0, vec![0.0]);
    let at = |m: f64| {
        let market = Market::uniform(1, m, 1.0).unwrap();
        price_update(
            0,
            &market,
            &gains,
            &fixed,
            &cfg,
            DemandModel::HighInterference,
        )
        .unwrap()
        .price
    };
    for m in [50.0, 100.0, 200.0] {
        assert!(rel_err(at(m), 2.0 * m) < 1e-6);
    }
    assert!(at(100.0) > at(50.0));
}

#[test]
fn trace_utilities_recompute() {
    let mut rng = rng(505);
    for _ in 0..10 {
        let inst = random_market_instance(&mut rng);
        let src = inst.fixed.sources();
        let opts = StackelbergOptions {
            max_iter: 60,
            ..Default::default()
        };
        let trace = run_stackelberg(&inst.gains, src, &inst.cfg, &inst.market, &opts).unwrap();
        assert_eq!(trace.price_history.len(), trace.iterations + 1);
        for t in 0..=trace.iterations {
            let market =
                Market::new(trace.price_history[t].clone(), trace.cost_exponents.clone()).unwrap();
            let alloc = src.with_jamming(trace.power_history[t].clone());
            let u = source_utility(&alloc, &inst.gains, &market, &inst.cfg).unwrap();
            let recorded = trace.utility_history[t].source;
            assert!(rel_err(u, recorded) <= 1e-10, "t = {t}: {u} vs {recorded}");
        }
    }
}

#[test]
fn empty_market_needs_no_iterations() {
    let cfg = SystemConfig::default().with_rate_gain(3.0);
    let g = ChannelGains::sources_only(0.5, 0.2).unwrap();
    let src = SourcePowers::at_cap(&cfg);
    let market = Market::uniform(0, 1.0, 1.0).unwrap();
    let trace = run_stackelberg(&g, src, &cfg, &market, &StackelbergOptions::default()).unwrap();
    assert!(trace.converged);
    assert_eq!(trace.iterations, 0);
    let (a, b) = secrecy_rates_without_jamming(src, &g, &cfg).unwrap();
    assert!(rel_err(trace.final_utilities().source, 3.0 * (a + b)) < 1e-12);
}
