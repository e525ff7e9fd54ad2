//! The four subcommands as library functions.

use std::time::Instant;

use gauge_core::bridge::transfer_integrate;
use gauge_core::integrator::{integrate_char, integrate_monotone_limit, MonotoneOptions};
use gauge_core::valuation::{order_plan, way_below_plan};
use gauge_core::{
    convergence_table, integrate, Crescent, IntegrationResult, Measure, SimpleValuation, SpaceDescriptor,
    Status,
};

use crate::config::JobConfig;
use crate::registry::{self, Job};
use crate::report::{finite, PlanEntry, ResultDoc, TransferComparison, ValuationDoc, VERSION};
use crate::valspec::parse_valuation;
use crate::CliError;

fn run_job(job: &Job, m: &Measure, cfg: &JobConfig) -> Result<IntegrationResult, CliError> {
    let opts = cfg.options();
    let eps = cfg.epsilon;
    Ok(match job {
        Job::Plain(f) => integrate(f, m, &m.whole_space(), eps, &opts)?,
        Job::Monotone { family, .. } => {
            let mopts = MonotoneOptions {
                integrate: opts,
                ..MonotoneOptions::on_unit_interval()
            };
            integrate_monotone_limit(&|n| family(n as f64), m, eps, &mopts)?
        }
        Job::Characteristic { set, .. } => integrate_char(set, m, eps, &opts)?,
    })
}

fn document(task: &str, cfg: &JobConfig, space: SpaceDescriptor, m: &Measure, name: &str, r: IntegrationResult, start: Instant) -> ResultDoc {
    ResultDoc {
        task: task.into(),
        space,
        measure: m.name(),
        integrand: name.into(),
        epsilon: cfg.epsilon,
        seed: cfg.policy.seed,
        value: finite(r.value),
        error_estimate: finite(r.error_estimate),
        status: r.status,
        levels: r.levels,
        runtime_ms: start.elapsed().as_millis() as u64,
        version: VERSION.into(),
        transfer: None,
    }
}

/// Integrates the configured integrand to the configured tolerance.
pub fn cmd_integrate(cfg: &JobConfig) -> Result<ResultDoc, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let space = cfg.space();
    let m = cfg.measure()?;
    let job = registry::resolve(&cfg.integrand, &space)?;
    let r = run_job(&job, &m, cfg)?;
    Ok(document("integrate", cfg, space, &m, job.integrand().name(), r, start))
}

/// Tabulates the configured gauge levels without a stopping rule.
///
/// The status is `converged` when the last row meets the stopping rule of
/// `integrate`: replicate spread plus the change from the previous row
/// below `epsilon`.
pub fn cmd_convergence(cfg: &JobConfig) -> Result<ResultDoc, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let space = cfg.space();
    let m = cfg.measure()?;
    let job = registry::resolve(&cfg.integrand, &space)?;
    let f = job.integrand();
    let levels = convergence_table(f, &m, &m.whole_space(), cfg.epsilon, cfg.level_range()?, &cfg.options())?;
    let (value, error_estimate) = match &levels[..] {
        [] => (f64::NAN, f64::INFINITY),
        [only] => (only.sum, f64::INFINITY),
        [.., a, b] => (b.sum, b.spread + (b.sum - a.sum).abs()),
    };
    let status = if error_estimate < cfg.epsilon { Status::Converged } else { Status::BudgetExhausted };
    let r = IntegrationResult {
        value,
        error_estimate,
        levels,
        status,
        gauge: None,
    };
    Ok(document("convergence", cfg, space, &m, f.name(), r, start))
}

/// Integrates `f ∘ g` over Cantor space against the IFS measure with weight
/// `p0`, and for `p0 = 1/2` also `f` against Lebesgue measure on `[0,1]`.
pub fn cmd_transfer(cfg: &JobConfig) -> Result<ResultDoc, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let job = registry::resolve(&cfg.integrand, &SpaceDescriptor::unit_interval())?;
    let f = job.integrand();
    let opts = cfg.options();
    let cantor = transfer_integrate(f, cfg.p0, cfg.epsilon, &opts)?;
    let comparison = if cfg.p0 == 0.5 {
        let interval = run_job(&job, &Measure::Lebesgue, cfg)?;
        Some(TransferComparison {
            interval_value: finite(interval.value),
            interval_status: interval.status,
            difference: finite(cantor.value - interval.value),
        })
    } else {
        None
    };
    let status = match &comparison {
        Some(c) if c.interval_status != Status::Converged => Status::BudgetExhausted,
        _ => cantor.status,
    };
    let m = Measure::cantor_ifs(cfg.p0)?;
    let mut doc = document("transfer", cfg, SpaceDescriptor::Cantor, &m, f.name(), cantor, start);
    doc.status = status;
    doc.transfer = comparison;
    doc.runtime_ms = start.elapsed().as_millis() as u64;
    Ok(doc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Query {
    Order,
    WayBelow,
}

/// Decides `left ⊑ right` or `left ≪ right`.
pub fn cmd_valuation(
    query: Query,
    left: &str,
    right: &str,
    space: Option<&SpaceDescriptor>,
) -> Result<ValuationDoc, CliError> {
    let space = match space {
        Some(s) => s.clone(),
        None => {
            let probe = if left.trim() == "bottom" { right } else { left };
            infer_space(&parse_valuation(probe, None)?)
        }
    };
    let a = parse_valuation(left, Some(&space))?;
    let b = parse_valuation(right, Some(&space))?;
    let ans = match query {
        Query::Order => order_plan(&a, &b)?,
        Query::WayBelow => way_below_plan(&a, &b)?,
    };
    let plan = ans.plan.map(|p| {
        p.entries()
            .into_iter()
            .map(|(i, j, t)| PlanEntry { i: i + 1, j: j + 1, t })
            .collect()
    });
    Ok(ValuationDoc {
        task: "valuation".into(),
        query: match query {
            Query::Order => "order".into(),
            Query::WayBelow => "way-below".into(),
        },
        left: a.to_string(),
        right: b.to_string(),
        holds: ans.holds,
        plan,
        reason: ans.reason,
        version: VERSION.into(),
    })
}

fn infer_space(v: &SimpleValuation) -> SpaceDescriptor {
    match v.whole() {
        Crescent::Interval(_) => SpaceDescriptor::unit_interval(),
        Crescent::Box(b) => SpaceDescriptor::Box {
            bounds: b.axes.iter().map(|i| (i.lo, i.hi)).collect(),
            basis: Default::default(),
        },
        Crescent::Cantor(_) => SpaceDescriptor::Cantor,
    }
}
