//! Sweep execution. Points run in parallel; rows keep sweep order.

use rayon::prelude::*;

use crate::central::{centralized_optimize, effective_against, secrecy_ceiling};
use crate::channel::{sample_gains, sub_seed, ChannelGains, Fading, SystemConfig};
use crate::error::ModelError;
use crate::game::{
    jammer_utility, run_stackelberg, source_best_response, source_purchases, source_utility, Market,
};
use crate::nojam::optimize_no_jammer_best_effort;
use crate::rates::{secrecy_rates, secrecy_rates_without_jamming, secrecy_sum, SourcePowers};

use super::spec::{ExperimentName, ExperimentSpec};
use super::table::ResultTable;
use super::ExperimentError;

/// The no-jammer plateau is searched over received jamming power up to this
/// multiple of `p_max`.
pub const CEILING_SPAN: f64 = 1e3;

type Rows = Vec<Vec<f64>>;

fn at(context: impl FnOnce() -> String) -> impl FnOnce(ModelError) -> ExperimentError {
    move |source| ExperimentError::Model {
        at: context(),
        source,
    }
}

/// Channel gains for draw `seed`, or the spec's fixed gains.
pub fn spec_gains(spec: &ExperimentSpec, seed: u64) -> Result<ChannelGains, ModelError> {
    match &spec.gains {
        Some(g) => ChannelGains::new(g.s1r, g.s2r, g.jammers.clone()),
        None => sample_gains(&spec.topology, &spec.config, seed, spec.fading),
    }
}

/// Seed of fading draw `draw` for averaged experiments.
pub fn draw_seed(spec: &ExperimentSpec, draw: usize) -> u64 {
    sub_seed(spec.seed, draw as u64)
}

/// Number of draws actually used: fixed gains and unit fading need one.
pub fn effective_draws(spec: &ExperimentSpec) -> usize {
    if spec.gains.is_some() || spec.fading == Fading::Unit {
        1
    } else {
        spec.run.draws
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

fn std_error(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mu = mean(values);
    let var = values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Runs `spec` and returns its table. Identical specs give identical tables.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ResultTable, ExperimentError> {
    spec.validate()?;
    let mut table = match spec.name {
        ExperimentName::NojamSurface => nojam_surface(spec)?,
        ExperimentName::SecrecyVsJampower => secrecy_vs_jampower(spec)?,
        ExperimentName::DemandVsPrice => demand_vs_price(spec)?,
        ExperimentName::TwoJammerPriceGrid => two_jammer_price_grid(spec)?,
        ExperimentName::RateVsNumJammers => rate_vs_num_jammers(spec)?,
        ExperimentName::CentralVsDistributed => central_vs_distributed(spec)?,
    };
    let mut meta = vec![
        (
            "tool".to_string(),
            format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        ),
        ("experiment".to_string(), spec.name.to_string()),
        ("seed".to_string(), spec.seed.to_string()),
    ];
    meta.append(&mut table.metadata);
    meta.push(("spec".to_string(), spec.to_toml()));
    table.metadata = meta;
    Ok(table)
}

fn nojam_surface(spec: &ExperimentSpec) -> Result<ResultTable, ExperimentError> {
    let cfg = spec.config;
    let gains = spec_gains(spec, spec.seed)
        .map_err(at(|| "channel draw".into()))?
        .truncated(0);
    let axis = spec.sweep.values();
    let points: Vec<(f64, f64)> = axis
        .iter()
        .flat_map(|&p1| axis.iter().map(move |&p2| (p1, p2)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(p1, p2)| {
            let src = SourcePowers::new(p1, p2, cfg.power_cap);
            let (c1, c2) = secrecy_rates_without_jamming(src, &gains, &cfg)
                .map_err(at(|| format!("p1 = {p1}, p2 = {p2}")))?;
            Ok(vec![
                gains.g_s1r,
                gains.g_s2r,
                p1,
                p2,
                src.pr,
                c1,
                c2,
                c1 + c2,
            ])
        })
        .collect::<Result<Rows, ExperimentError>>()?;

    let mut table = ResultTable::new(&[
        "g_s1r",
        "g_s2r",
        "p1",
        "p2",
        "pr",
        "c1s",
        "c2s",
        "secrecy_sum",
    ]);
    rows.into_iter().for_each(|r| table.push_row(r));
    let opt =
        optimize_no_jammer_best_effort(&gains, &cfg).map_err(at(|| "no-jammer optimum".into()))?;
    table.metadata.push((
        "optimum".into(),
        format!(
            "p1 = {:.16e}, p2 = {:.16e}, pr = {:.16e}, secrecy_sum = {:.16e}, feasible = {}",
            opt.p1_opt, opt.p2_opt, opt.pr_opt, opt.secrecy_sum, opt.feasible
        ),
    ));
    Ok(table)
}

fn secrecy_vs_jampower(spec: &ExperimentSpec) -> Result<ResultTable, ExperimentError> {
    let cfg = spec.config;
    let gains = spec_gains(spec, spec.seed).map_err(at(|| "channel draw".into()))?;
    let src = SourcePowers::at_cap(&cfg);
    let axis = spec.sweep.values();
    let points: Vec<(usize, f64)> = (0..gains.num_jammers())
        .flat_map(|j| axis.iter().map(move |&p| (j, p)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(j, pj)| {
            let ctx = || format!("jammer {j}, pj = {pj}");
            let g = gains.single_jammer(j).map_err(at(ctx))?;
            let r = secrecy_rates(&src.with_jamming(vec![pj]), &g, &cfg).map_err(at(ctx))?;
            Ok(vec![
                j as f64,
                g.g_s1r,
                g.g_s2r,
                g.g_jr[0],
                src.p1,
                src.p2,
                src.pr,
                pj,
                r.c1s,
                r.c2s,
                r.c1s + r.c2s,
            ])
        })
        .collect::<Result<Rows, ExperimentError>>()?;
    let mut table = ResultTable::new(&[
        "jammer",
        "g_s1r",
        "g_s2r",
        "g_jr",
        "p1",
        "p2",
        "pr",
        "pj",
        "c1s",
        "c2s",
        "secrecy_sum",
    ]);
    rows.into_iter().for_each(|r| table.push_row(r));
    Ok(table)
}

fn demand_vs_price(spec: &ExperimentSpec) -> Result<ResultTable, ExperimentError> {
    let cfg = spec.config;
    let gains = spec_gains(spec, spec.seed).map_err(at(|| "channel draw".into()))?;
    let src = SourcePowers::at_cap(&cfg);
    let c = spec.market.cost_exponent;
    let axis = spec.sweep.values();
    let points: Vec<(usize, f64)> = (0..gains.num_jammers())
        .flat_map(|j| axis.iter().map(move |&m| (j, m)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(j, price)| {
            let ctx = || format!("jammer {j}, price = {price}");
            let g = gains.single_jammer(j).map_err(at(ctx))?;
            let market = Market::new(vec![price], vec![c]).map_err(at(ctx))?;
            let bought = source_best_response(0, &g, &market, &src.with_jamming(vec![0.0]), &cfg)
                .map_err(at(ctx))?;
            let alloc = src.with_jamming(vec![bought]);
            let secrecy = secrecy_sum(&alloc, &g, &cfg).map_err(at(ctx))?;
            let us = source_utility(&alloc, &g, &market, &cfg).map_err(at(ctx))?;
            let uj = jammer_utility(0, &market, bought).map_err(at(ctx))?;
            Ok(vec![
                j as f64, g.g_s1r, g.g_s2r, g.g_jr[0], price, c, bought, secrecy, us, uj,
            ])
        })
        .collect::<Result<Rows, ExperimentError>>()?;
    let mut table = ResultTable::new(&[
        "jammer",
        "g_s1r",
        "g_s2r",
        "g_jr",
        "price",
        "cost_exponent",
        "bought_power",
        "secrecy_sum",
        "source_utility",
        "jammer_utility",
    ]);
    rows.into_iter().for_each(|r| table.push_row(r));
    Ok(table)
}

fn two_jammer_price_grid(spec: &ExperimentSpec) -> Result<ResultTable, ExperimentError> {
    let cfg = spec.config;
    let gains = spec_gains(spec, spec.seed).map_err(at(|| "channel draw".into()))?;
    let src = SourcePowers::at_cap(&cfg);
    let c = spec.market.cost_exponent;
    let axis = spec.sweep.values();
    let points: Vec<(f64, f64)> = axis
        .iter()
        .flat_map(|&m1| axis.iter().map(move |&m2| (m1, m2)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(m1, m2)| {
            let ctx = || format!("m1 = {m1}, m2 = {m2}");
            let market = Market::new(vec![m1, m2], vec![c, c]).map_err(at(ctx))?;
            let pj = source_purchases(&gains, &market, src, &cfg, None).map_err(at(ctx))?;
            let alloc = src.with_jamming(pj.clone());
            let secrecy = secrecy_sum(&alloc, &gains, &cfg).map_err(at(ctx))?;
            let us = source_utility(&alloc, &gains, &market, &cfg).map_err(at(ctx))?;
            let u1 = jammer_utility(0, &market, pj[0]).map_err(at(ctx))?;
            let u2 = jammer_utility(1, &market, pj[1]).map_err(at(ctx))?;
            Ok(vec![
                m1,
                m2,
                gains.g_s1r,
                gains.g_s2r,
                gains.g_jr[0],
                gains.g_jr[1],
                pj[0],
                pj[1],
                secrecy,
                us,
                u1,
                u2,
            ])
        })
        .collect::<Result<Rows, ExperimentError>>()?;
    let mut table = ResultTable::new(&[
        "m1",
        "m2",
        "g_s1r",
        "g_s2r",
        "g_j1r",
        "g_j2r",
        "pj1",
        "pj2",
        "secrecy_sum",
        "source_utility",
        "jammer1_utility",
        "jammer2_utility",
    ]);
    rows.into_iter().for_each(|r| table.push_row(r));
    Ok(table)
}

/// Per-draw outcome of the centralized problem with the first `n` jammers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralDraw {
    pub secrecy_sum: f64,
    pub nojam_secrecy: f64,
    pub ceiling: f64,
    /// At least one of the `n` jammers is sufficiently effective.
    pub has_effective: bool,
}

/// Centralized optimum, no-jammer baseline, ceiling and effectiveness for
/// the first `n` jammers of `gains`.
pub fn central_draw(
    gains: &ChannelGains,
    n: usize,
    config: &SystemConfig,
) -> Result<CentralDraw, ModelError> {
    let src = SourcePowers::at_cap(config);
    let g = gains.truncated(n);
    let opt = centralized_optimize(&g, src, config)?;
    let (c1, c2) = secrecy_rates_without_jamming(src, &g, config)?;
    let ceiling = secrecy_ceiling(&g, src, config, CEILING_SPAN * config.power_cap)?.value;
    let has_effective = effective_against(&g, src, config, opt.secrecy_sum)?
        .into_iter()
        .any(|e| e);
    Ok(CentralDraw {
        secrecy_sum: opt.secrecy_sum,
        nojam_secrecy: c1 + c2,
        ceiling,
        has_effective,
    })
}

fn rate_vs_num_jammers(spec: &ExperimentSpec) -> Result<ResultTable, ExperimentError> {
    let cfg = spec.config;
    let draws = effective_draws(spec);
    let counts: Vec<usize> = spec.sweep.values().iter().map(|v| *v as usize).collect();
    let gains = (0..draws)
        .map(|d| spec_gains(spec, draw_seed(spec, d)).map_err(at(|| format!("draw {d}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let points: Vec<(usize, usize)> = counts
        .iter()
        .flat_map(|&n| (0..draws).map(move |d| (n, d)))
        .collect();
    let results = points
        .par_iter()
        .map(|&(n, d)| {
            central_draw(&gains[d], n, &cfg).map_err(at(|| format!("num_jammers = {n}, draw {d}")))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;

    let mut table = ResultTable::new(&[
        "num_jammers",
        "draws",
        "mean_secrecy_sum",
        "stderr_secrecy_sum",
        "mean_nojam_secrecy_sum",
        "mean_ceiling",
        "frac_with_effective",
    ]);
    for (k, &n) in counts.iter().enumerate() {
        let chunk = &results[k * draws..(k + 1) * draws];
        let secrecy: Vec<f64> = chunk.iter().map(|r| r.secrecy_sum).collect();
        let nojam: Vec<f64> = chunk.iter().map(|r| r.nojam_secrecy).collect();
        let ceiling: Vec<f64> = chunk.iter().map(|r| r.ceiling).collect();
        let effective = chunk.iter().filter(|r| r.has_effective).count() as f64 / draws as f64;
        table.push_row(vec![
            n as f64,
            draws as f64,
            mean(&secrecy),
            std_error(&secrecy),
            mean(&nojam),
            mean(&ceiling),
            effective,
        ]);
    }
    Ok(table)
}

/// Outcome of one game run against the centralized optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct GameDraw {
    pub central_secrecy: f64,
    pub distributed_secrecy: f64,
    pub prices: Vec<f64>,
    pub powers: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Plays the game at rate gain `config.rate_gain` on `gains` and pairs the
/// result with the centralized secrecy sum `central_secrecy`.
pub fn game_draw(
    spec: &ExperimentSpec,
    gains: &ChannelGains,
    config: &SystemConfig,
    central_secrecy: f64,
) -> Result<GameDraw, ModelError> {
    let src = SourcePowers::at_cap(config);
    let n = gains.num_jammers();
    let market = Market::uniform(n, spec.market.initial_price, spec.market.cost_exponent)?;
    let trace = run_stackelberg(gains, src, config, &market, &spec.game.options())?;
    let distributed_secrecy = secrecy_sum(&trace.final_allocation(), gains, config)?;
    Ok(GameDraw {
        central_secrecy,
        distributed_secrecy,
        prices: trace.final_prices().to_vec(),
        powers: trace.final_powers().to_vec(),
        converged: trace.converged,
        iterations: trace.iterations,
    })
}

fn central_vs_distributed(spec: &ExperimentSpec) -> Result<ResultTable, ExperimentError> {
    let draws = effective_draws(spec);
    let rate_gains = spec.sweep.values();
    let gains = (0..draws)
        .map(|d| spec_gains(spec, draw_seed(spec, d)).map_err(at(|| format!("draw {d}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let central = gains
        .par_iter()
        .enumerate()
        .map(|(d, g)| {
            centralized_optimize(g, SourcePowers::at_cap(&spec.config), &spec.config)
                .map(|o| o.secrecy_sum)
                .map_err(at(|| format!("centralized, draw {d}")))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let points: Vec<(usize, usize)> = (0..rate_gains.len())
        .flat_map(|k| (0..draws).map(move |d| (k, d)))
        .collect();
    let results = points
        .par_iter()
        .map(|&(k, d)| {
            let cfg = spec.config.with_rate_gain(rate_gains[k]);
            game_draw(spec, &gains[d], &cfg, central[d])
                .map_err(at(|| format!("rate_gain = {}, draw {d}", rate_gains[k])))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;

    let mut table = ResultTable::new(&[
        "rate_gain",
        "draws_used",
        "draws_nonconverged",
        "mean_central_secrecy_sum",
        "mean_distributed_secrecy_sum",
        "gap",
        "relative_gap",
        "mean_total_jamming_power",
    ]);
    let mut skipped = Vec::new();
    for (k, &a) in rate_gains.iter().enumerate() {
        let chunk = &results[k * draws..(k + 1) * draws];
        let used: Vec<&GameDraw> = chunk.iter().filter(|r| r.converged).collect();
        for (d, r) in chunk.iter().enumerate().filter(|(_, r)| !r.converged) {
            skipped.push(format!(
                "rate_gain = {a:e}, draw {d} (seed {}), {} iterations",
                draw_seed(spec, d),
                r.iterations
            ));
        }
        let c: Vec<f64> = used.iter().map(|r| r.central_secrecy).collect();
        let s: Vec<f64> = used.iter().map(|r| r.distributed_secrecy).collect();
        let p: Vec<f64> = used.iter().map(|r| r.powers.iter().sum()).collect();
        let gap = mean(&c) - mean(&s);
        table.push_row(vec![
            a,
            used.len() as f64,
            (chunk.len() - used.len()) as f64,
            mean(&c),
            mean(&s),
            gap,
            gap / mean(&c),
            mean(&p),
        ]);
    }
    table.nonconverged_runs = skipped.len();
    if !skipped.is_empty() {
        table
            .metadata
            .push(("nonconverged".into(), skipped.join("\n")));
    }
    Ok(table)
}
