//! Additivity over partitions, the Saks–Henstock defect and monotone limits.

use crate::exec;
use crate::gauge::{Gauge, GaugeKind};
use crate::measure::Measure;
use crate::partition::{Partition, TaggedCell};
use crate::space::{Crescent, Point};
use crate::sum::compensated;
use crate::{Error, Result};

use super::{
    integrate, replicate_sums_with_tags, riemann_sum_with, Integrand, IntegrateOptions, IntegrationResult,
    LevelRecord, Status,
};

/// Per-cell integrals, their sum, and the whole-domain integral computed with
/// the glued gauge.
#[derive(Debug, Clone)]
pub struct AdditivityReport {
    pub cells: Vec<IntegrationResult>,
    pub combined: f64,
    /// Sum of the tolerances requested for the cells.
    pub tolerance: f64,
    pub whole: IntegrationResult,
    /// `|whole − combined| ≤ tolerance`.
    pub agrees: bool,
}

/// Glues cell gauges: inside a single closure `R̄_i` the gauge is
/// `min(γ_i, d(x, R̄_j))` over the other cells; at points shared by several
/// closures it is the minimum of their gauges.
fn glued_gauge(cells: Vec<Crescent>, gauges: Vec<Gauge>) -> Gauge {
    Gauge::with_kind(GaugeKind::Glued, "glued", move |x| {
        let owners: Vec<usize> = (0..cells.len())
            .filter(|&i| cells[i].closure_contains(x).unwrap_or(false))
            .collect();
        match owners.as_slice() {
            [] => 1.0,
            [i] => {
                let mut r = gauges[*i].eval(x);
                for (j, c) in cells.iter().enumerate() {
                    if j != *i {
                        r = r.min(c.distance_to_closure(x).unwrap_or(f64::INFINITY));
                    }
                }
                r
            }
            many => many
                .iter()
                .map(|&i| gauges[i].eval(x))
                .fold(f64::INFINITY, f64::min),
        }
    })
}

/// Endpoints of interval cells lying inside the parent. The glued gauge
/// vanishes towards these points from either side, so a fine partition must
/// be tagged at each of them.
fn cut_points(p: &Partition) -> Vec<Point> {
    let mut cuts: Vec<f64> = p
        .cells()
        .iter()
        .filter_map(Crescent::as_interval)
        .flat_map(|i| [i.lo, i.hi])
        .collect();
    if let Some(parent) = p.parent().as_interval() {
        cuts.retain(|&x| x > parent.lo && x < parent.hi);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.into_iter().map(Point::Real).collect()
}

/// Integrates `f` over each cell of `p` with tolerance `eps/n`, sums the
/// results, and compares with the whole-domain Riemann sums under the
/// glued gauge.
pub fn integrate_over_partition(
    f: &Integrand,
    m: &Measure,
    p: &Partition,
    eps: f64,
    opts: &IntegrateOptions,
) -> Result<AdditivityReport> {
    let n = p.len().max(1);
    let cell_eps = eps / n as f64;
    let results = exec::map(opts.policy.execution, p.cells(), |c| {
        integrate(f, m, c, cell_eps, opts)
    });
    let cells: Vec<IntegrationResult> = results.into_iter().collect::<Result<_>>()?;
    let combined = compensated(cells.iter().map(|r| r.value));
    let gauges: Vec<Gauge> = cells
        .iter()
        .map(|r| r.gauge.clone().unwrap_or_else(|| Gauge::constant(1.0)))
        .collect();
    let glued = glued_gauge(p.cells().to_vec(), gauges);
    let reps = replicate_sums_with_tags(
        f,
        m,
        p.parent(),
        &[cut_points(p), f.tags_in(p.parent())].concat(),
        &glued,
        opts.replicates,
        &opts.policy,
        u64::MAX,
    )?;
    let value = reps.mean();
    let whole = IntegrationResult {
        value,
        error_estimate: reps.spread(),
        levels: vec![LevelRecord {
            gauge: glued.label().to_string(),
            cells: reps.cells,
            norm: reps.norm,
            sum: value,
            spread: reps.spread(),
        }],
        status: if cells.iter().all(IntegrationResult::converged) {
            Status::Converged
        } else {
            Status::BudgetExhausted
        },
        gauge: Some(glued),
    };
    let tolerance = cell_eps * n as f64;
    Ok(AdditivityReport {
        agrees: (whole.value - combined).abs() <= tolerance,
        cells,
        combined,
        tolerance,
        whole,
    })
}

/// `|Σ f(t_i)·μ(R_i) − reference|` over a tagged sub-partition.
pub fn subpartition_defect(
    f: &Integrand,
    m: &Measure,
    sub: &[TaggedCell],
    reference: f64,
) -> Result<f64> {
    let s = riemann_sum_with(f, sub, m, Default::default())?;
    Ok((s - reference).abs())
}

#[derive(Debug, Clone)]
pub struct MonotoneOptions {
    pub integrate: IntegrateOptions,
    /// Number of family members tried; member `k` is `fs(2^k)`.
    pub max_terms: u32,
    /// Integrals above this bound are reported as divergent.
    pub divergence_bound: f64,
    /// Points at which pointwise monotonicity is checked.
    pub probes: Vec<Point>,
}

impl MonotoneOptions {
    /// Defaults with 64 probe points spread over `[0,1]`.
    pub fn on_unit_interval() -> Self {
        let probes = (0..64)
            .map(|k| Point::Real(((k as f64) * 0.618_033_988_749_894_8).fract()))
            .chain([Point::Real(0.0), Point::Real(1.0)])
            .collect();
        MonotoneOptions {
            integrate: IntegrateOptions::default(),
            max_terms: 24,
            divergence_bound: 1e6,
            probes,
        }
    }
}

/// The limit of `∫ fs(n)` for a pointwise nondecreasing family, with
/// `n = 1, 2, 4, …`. Each member is integrated to `eps/8`; the run stops once
/// two consecutive increments are below `eps/2`.
pub fn integrate_monotone_limit(
    fs: &dyn Fn(u64) -> Integrand,
    m: &Measure,
    eps: f64,
    opts: &MonotoneOptions,
) -> Result<IntegrationResult> {
    let whole = m.whole_space();
    let mut levels: Vec<LevelRecord> = Vec::new();
    let mut prev: Option<(Integrand, f64)> = None;
    let mut small_steps = 0;
    let mut last = None;
    for k in 0..opts.max_terms {
        let n = 1u64 << k;
        let f = fs(n);
        if let Some((g, _)) = &prev {
            for p in &opts.probes {
                let (a, b) = (g.eval(p), f.eval(p));
                if b < a - 1e-12 {
                    return Err(Error::MonotonicityViolation(format!(
                        "member {n} is below its predecessor at {p} ({b} < {a})"
                    )));
                }
            }
        }
        let r = integrate(&f, m, &whole, eps / 8.0, &opts.integrate)?;
        let delta = prev.as_ref().map(|&(_, v)| r.value - v);
        levels.push(LevelRecord {
            gauge: format!("n={n}: {}", r.levels.last().map_or("", |l| l.gauge.as_str())),
            cells: r.levels.last().map_or(0, |l| l.cells),
            norm: r.levels.last().map_or(0.0, |l| l.norm),
            sum: r.value,
            spread: r.error_estimate,
        });
        if let Some(d) = delta {
            if d < -(eps / 4.0) {
                return Err(Error::MonotonicityViolation(format!(
                    "integral decreased by {} at n={n}",
                    -d
                )));
            }
        }
        if r.value > opts.divergence_bound {
            return Ok(IntegrationResult {
                value: r.value,
                error_estimate: f64::INFINITY,
                levels,
                status: Status::BudgetExhausted,
                gauge: r.gauge,
            });
        }
        match delta {
            Some(d) if d.abs() < eps / 2.0 => small_steps += 1,
            Some(_) => small_steps = 0,
            None => {}
        }
        if small_steps >= 2 {
            return Ok(IntegrationResult {
                value: r.value,
                error_estimate: delta.unwrap().abs() + r.error_estimate,
                levels,
                status: Status::Converged,
                gauge: r.gauge,
            });
        }
        last = Some(r.clone());
        prev = Some((f, r.value));
    }
    let r = last.expect("at least one term");
    Ok(IntegrationResult {
        value: r.value,
        error_estimate: f64::INFINITY,
        levels,
        status: Status::BudgetExhausted,
        gauge: r.gauge,
    })
}
