//! The integration driver.
//!
//! The integral is computed through its ε-gauge characterisation: a gauge
//! schedule produces ever smaller gauges, each level draws several fine
//! tagged partitions (one deterministic, the rest randomized), and the run
//! stops once the Riemann sums of a level agree with each other and with the
//! previous level to within the requested tolerance.

mod additivity;
mod sets;

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exec::{self, Execution};
use crate::gauge::Gauge;
use crate::measure::Measure;
use crate::partition::{Partition, TaggedCell, TaggedPartition};
use crate::partitioner::{candidates, cousin_partition, fine_partition_with_tags, mix, SubdivisionPolicy};
use crate::space::{Crescent, Point};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

pub use additivity::{
    integrate_monotone_limit, integrate_over_partition, subpartition_defect, AdditivityReport,
    MonotoneOptions,
};
pub use sets::{integrate_char, null_set_gauge, CharSets};

type Eval = dyn Fn(&Point) -> f64 + Send + Sync;
type Family = dyn Fn(f64) -> Gauge + Send + Sync;

/// A real-valued function on the closure of the integration domain.
#[derive(Clone)]
pub struct Integrand {
    eval: Arc<Eval>,
    gauge_family: Option<Arc<Family>>,
    tags: Arc<[Point]>,
    name: String,
    exact: Option<f64>,
}

impl Integrand {
    pub fn new(name: impl Into<String>, f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        Integrand {
            eval: Arc::new(f),
            gauge_family: None,
            tags: Arc::new([]),
            name: name.into(),
            exact: None,
        }
    }

    /// An integrand on `[0,1]` given as a function of one real variable.
    pub fn real(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Integrand::new(name, move |p| match p {
            Point::Real(x) => f(*x),
            _ => f64::NAN,
        })
    }

    /// Attaches a family `ε ↦ γ_ε` of gauges for which fine Riemann sums are
    /// expected to be within `ε` of the integral.
    pub fn with_gauge_family(mut self, family: impl Fn(f64) -> Gauge + Send + Sync + 'static) -> Self {
        self.gauge_family = Some(Arc::new(family));
        self
    }

    /// Points at which every partition drawn by the integrator is tagged.
    /// Gauge families that shrink to zero towards a point need that point
    /// as a tag.
    pub fn with_tags(mut self, tags: Vec<Point>) -> Self {
        self.tags = tags.into();
        self
    }

    pub fn tags(&self) -> &[Point] {
        &self.tags
    }

    /// The prescribed tags lying in the closure of `c`.
    pub fn tags_in(&self, c: &Crescent) -> Vec<Point> {
        self.tags
            .iter()
            .filter(|t| c.accepts(t) && c.closure_contains(t).unwrap_or(false))
            .cloned()
            .collect()
    }

    pub fn with_exact(mut self, value: f64) -> Self {
        self.exact = Some(value);
        self
    }

    pub fn eval(&self, p: &Point) -> f64 {
        (self.eval)(p)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn exact(&self) -> Option<f64> {
        self.exact
    }

    pub fn has_gauge_family(&self) -> bool {
        self.gauge_family.is_some()
    }

    pub fn gauge_for(&self, eps: f64) -> Option<Gauge> {
        self.gauge_family.as_ref().map(|f| f(eps))
    }

    /// `x ↦ f(x)` composed with `h`, keeping name and exact value.
    pub fn compose(&self, h: impl Fn(&Point) -> Point + Send + Sync + 'static) -> Integrand {
        let f = self.eval.clone();
        Integrand {
            eval: Arc::new(move |p| f(&h(p))),
            gauge_family: None,
            tags: Arc::new([]),
            name: self.name.clone(),
            exact: self.exact,
        }
    }

    /// `a·f + b·g`, with a gauge family when both operands have one.
    pub fn linear_combination(a: f64, f: &Integrand, b: f64, g: &Integrand) -> Integrand {
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        let mut out = Integrand::new(format!("{a}*({})+{b}*({})", f.name, g.name), move |p| {
            a * fe(p) + b * ge(p)
        });
        if let (Some(ff), Some(gf)) = (f.gauge_family.clone(), g.gauge_family.clone()) {
            out.gauge_family = Some(Arc::new(move |eps| ff(eps).min(&gf(eps))));
        }
        out.tags = f.tags.iter().chain(g.tags.iter()).cloned().collect();
        if let (Some(x), Some(y)) = (f.exact, g.exact) {
            out.exact = Some(a * x + b * y);
        }
        out
    }
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand")
            .field("name", &self.name)
            .field("exact", &self.exact)
            .field("gauge_family", &self.gauge_family.is_some())
            .field("tags", &self.tags.len())
            .finish()
    }
}

/// How the gauge shrinks from level to level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Schedule {
    /// Level `k` uses the constant gauge `c0·2^-k`.
    ShrinkingConstant { c0: f64 },
    /// Level `k` uses the integrand's gauge family at `ε·2^-k`.
    GaugeFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct IntegrateOptions {
    /// `None` uses the gauge family when the integrand has one and a
    /// shrinking constant gauge with `c0` half the domain diameter otherwise.
    pub schedule: Option<Schedule>,
    pub replicates: usize,
    pub max_levels: usize,
    pub policy: SubdivisionPolicy,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            schedule: None,
            replicates: 8,
            max_levels: 40,
            policy: SubdivisionPolicy::default(),
        }
    }
}

impl IntegrateOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.policy.seed = seed;
        self
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = Some(schedule);
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.policy.execution = execution;
        self
    }

    fn resolve(&self, f: &Integrand, c: &Crescent) -> Result<Schedule> {
        let diam = c.diameter();
        let s = self.schedule.unwrap_or(if f.has_gauge_family() {
            Schedule::GaugeFamily
        } else {
            Schedule::ShrinkingConstant {
                c0: if diam > 0.0 && diam.is_finite() { 0.5 * diam } else { 0.5 },
            }
        });
        match s {
            Schedule::GaugeFamily if !f.has_gauge_family() => Err(Error::InvalidArgument(format!(
                "integrand {} has no gauge family",
                f.name
            ))),
            Schedule::ShrinkingConstant { c0 } if !(c0 > 0.0) => {
                Err(Error::InvalidArgument(format!("c0 must be positive, got {c0}")))
            }
            s => Ok(s),
        }
    }
}

/// One row of the convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub gauge: String,
    pub cells: usize,
    pub norm: f64,
    pub sum: f64,
    pub spread: f64,
}

#[derive(Debug, Clone)]
pub struct IntegrationResult {
    pub value: f64,
    /// Replicate spread plus the last level-to-level change. A heuristic,
    /// not a rigorous bound.
    pub error_estimate: f64,
    pub levels: Vec<LevelRecord>,
    pub status: Status,
    /// The gauge of the last completed level.
    pub gauge: Option<Gauge>,
}

impl IntegrationResult {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}

/// `Σ f(t_i)·μ(R_i)` with compensated summation in fixed-size chunks, so the
/// result does not depend on the execution mode.
pub fn riemann_sum(f: &Integrand, tp: &TaggedPartition, m: &Measure) -> Result<f64> {
    riemann_sum_with(f, tp.cells(), m, Execution::default())
}

const CHUNK: usize = 1024;

pub fn riemann_sum_with(
    f: &Integrand,
    cells: &[TaggedCell],
    m: &Measure,
    exec: Execution,
) -> Result<f64> {
    let chunks: Vec<&[TaggedCell]> = cells.chunks(CHUNK).collect();
    let partials = exec::map(exec, &chunks, |chunk| -> Result<CompensatedSum> {
        let mut acc = CompensatedSum::default();
        for c in chunk.iter() {
            let w = m.measure_of(&c.cell)?;
            if w != 0.0 {
                acc.add(f.eval(&c.tag) * w);
            }
        }
        Ok(acc)
    });
    let mut total = CompensatedSum::default();
    for p in partials {
        total.merge(p?);
    }
    Ok(total.value())
}

fn level_gauge(schedule: Schedule, f: &Integrand, eps: f64, level: usize) -> Gauge {
    let scale = (-(level as f64)).exp2();
    match schedule {
        Schedule::ShrinkingConstant { c0 } => Gauge::constant(c0 * scale),
        Schedule::GaugeFamily => {
            let e = eps * scale;
            f.gauge_for(e).expect("schedule resolved").relabel(format!("family(eps={e:e})"))
        }
    }
}

pub(crate) struct Replicates {
    pub sums: Vec<f64>,
    pub cells: usize,
    pub norm: f64,
}

impl Replicates {
    pub fn mean(&self) -> f64 {
        self.sums.iter().sum::<f64>() / self.sums.len() as f64
    }

    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .sums
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &s| (a.min(s), b.max(s)));
        hi - lo
    }
}

/// Riemann sums over `replicates` fine partitions: the first with the
/// deterministic policy, the others randomized with derived seeds.
pub(crate) fn replicate_sums(
    f: &Integrand,
    m: &Measure,
    c: &Crescent,
    gauge: &Gauge,
    replicates: usize,
    policy: &SubdivisionPolicy,
    stream: u64,
) -> Result<Replicates> {
    replicate_sums_with_tags(f, m, c, &[], gauge, replicates, policy, stream)
}

/// As [`replicate_sums`], with every partition tagged at each of `tags`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn replicate_sums_with_tags(
    f: &Integrand,
    m: &Measure,
    c: &Crescent,
    tags: &[Point],
    gauge: &Gauge,
    replicates: usize,
    policy: &SubdivisionPolicy,
    stream: u64,
) -> Result<Replicates> {
    let runs = exec::map_range(policy.execution, replicates.max(1), |r| {
        let mut pol = policy.clone();
        pol.randomized = r > 0;
        pol.seed = mix(mix(policy.seed, stream), r as u64);
        let tp = if tags.is_empty() {
            cousin_partition(c, gauge, &pol)?
        } else {
            fine_partition_with_tags(&Partition::trivial(c.clone()), tags, gauge, &pol)?
        };
        let s = riemann_sum_with(f, tp.cells(), m, policy.execution)?;
        Ok::<_, Error>((s, tp.len(), tp.norm()))
    });
    let mut sums = Vec::with_capacity(runs.len());
    let (mut cells, mut norm) = (0, 0.0);
    for (r, run) in runs.into_iter().enumerate() {
        let (s, n, h) = run?;
        if r == 0 {
            cells = n;
            norm = h;
        }
        sums.push(s);
    }
    Ok(Replicates { sums, cells, norm })
}

/// Integrates `f` over `c` against `m` to tolerance `eps`.
pub fn integrate(
    f: &Integrand,
    m: &Measure,
    c: &Crescent,
    eps: f64,
    opts: &IntegrateOptions,
) -> Result<IntegrationResult> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let schedule = opts.resolve(f, c)?;
    let tags = f.tags_in(c);
    let mut levels: Vec<LevelRecord> = Vec::new();
    let mut last_gauge = None;
    let mut error_estimate = f64::INFINITY;
    for level in 0..opts.max_levels {
        let gauge = level_gauge(schedule, f, eps, level);
        let reps = match replicate_sums_with_tags(f, m, c, &tags, &gauge, opts.replicates, &opts.policy, level as u64) {
            Ok(r) => r,
            Err(Error::CellBudgetExceeded(_)) => break,
            Err(e) => return Err(e),
        };
        let sum = reps.mean();
        let spread = reps.spread();
        let delta = levels.last().map(|l| (sum - l.sum).abs());
        levels.push(LevelRecord {
            gauge: gauge.label().to_string(),
            cells: reps.cells,
            norm: reps.norm,
            sum,
            spread,
        });
        last_gauge = Some(gauge);
        if let Some(delta) = delta {
            error_estimate = spread + delta;
            if error_estimate < eps {
                return Ok(IntegrationResult {
                    value: sum,
                    error_estimate,
                    levels,
                    status: Status::Converged,
                    gauge: last_gauge,
                });
            }
        }
    }
    Ok(IntegrationResult {
        value: levels.last().map_or(f64::NAN, |l| l.sum),
        error_estimate,
        levels,
        status: Status::BudgetExhausted,
        gauge: last_gauge,
    })
}

/// The level table for the gauge levels in `levels`, without a stopping rule.
///
/// Each row is computed exactly as in [`integrate`], so the rows of a
/// converged run reappear here unchanged. Levels whose partitions exceed the
/// cell budget end the table early.
pub fn convergence_table(
    f: &Integrand,
    m: &Measure,
    c: &Crescent,
    eps: f64,
    levels: std::ops::RangeInclusive<usize>,
    opts: &IntegrateOptions,
) -> Result<Vec<LevelRecord>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let schedule = opts.resolve(f, c)?;
    let tags = f.tags_in(c);
    let mut rows = Vec::new();
    for level in levels {
        let gauge = level_gauge(schedule, f, eps, level);
        let reps = match replicate_sums_with_tags(f, m, c, &tags, &gauge, opts.replicates, &opts.policy, level as u64) {
            Ok(r) => r,
            Err(Error::CellBudgetExceeded(_)) => break,
            Err(e) => return Err(e),
        };
        rows.push(LevelRecord {
            gauge: gauge.label().to_string(),
            cells: reps.cells,
            norm: reps.norm,
            sum: reps.mean(),
            spread: reps.spread(),
        });
    }
    Ok(rows)
}

/// Sampling estimates of the lower and upper sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Per trial, builds a `γ`-fine partition of the whole space and, cell by
/// cell, picks the fineness-admissible tag candidate minimising (resp.
/// maximising) `f`. Returns the smallest lower and largest upper sum over
/// the trials. These are inner estimates of the infimum and supremum over
/// all fine partitions, not rigorous bounds.
pub fn lower_upper(
    f: &Integrand,
    m: &Measure,
    g: &Gauge,
    trials: usize,
    policy: &SubdivisionPolicy,
) -> Result<SampledBounds> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let whole = m.whole_space();
    let runs = exec::map_range(policy.execution, trials, |trial| -> Result<(f64, f64)> {
        let mut pol = policy.clone();
        pol.randomized = trial > 0;
        pol.seed = mix(policy.seed, trial as u64);
        let tp = cousin_partition(&whole, g, &pol)?;
        let mut lo = CompensatedSum::default();
        let mut hi = CompensatedSum::default();
        for (i, c) in tp.cells().iter().enumerate() {
            let w = m.measure_of(&c.cell)?;
            let mut rng = ChaCha8Rng::seed_from_u64(mix(pol.seed, i as u64));
            let mut best = (f.eval(&c.tag), f.eval(&c.tag));
            let mut pool = candidates(&c.cell, pol.probes, Some(&mut rng));
            pool.extend(candidates(&c.cell, pol.probes, None));
            for t in pool {
                if c.cell.within_ball(&t, g.radius(&t)?)? {
                    let v = f.eval(&t);
                    best = (best.0.min(v), best.1.max(v));
                }
            }
            lo.add(best.0 * w);
            hi.add(best.1 * w);
        }
        Ok((lo.value(), hi.value()))
    });
    let mut bounds = SampledBounds {
        lower: f64::INFINITY,
        upper: f64::NEG_INFINITY,
    };
    for r in runs {
        let (lo, hi) = r?;
        bounds.lower = bounds.lower.min(lo);
        bounds.upper = bounds.upper.max(hi);
    }
    Ok(bounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Interval;

    fn unit() -> Crescent {
        Crescent::Interval(Interval::unit())
    }

    #[test]
    fn riemann_sum_examples() {
        let tp = TaggedPartition::new(
            unit(),
            vec![
                TaggedCell::new(Crescent::Interval(Interval::closed_open(0.0, 0.5)), Point::Real(0.0)),
                TaggedCell::new(Crescent::Interval(Interval::closed(0.5, 1.0)), Point::Real(1.0)),
            ],
        )
        .unwrap();
        let x = Integrand::real("x", |x| x);
        assert_eq!(riemann_sum(&x, &tp, &Measure::Lebesgue).unwrap(), 0.5);
        let one = Integrand::real("1", |_| 1.0);
        assert_eq!(riemann_sum(&one, &tp, &Measure::Lebesgue).unwrap(), 1.0);
        let chi = Integrand::real("chi", |x| (x < 0.5) as u8 as f64);
        let mid = TaggedPartition::new(
            unit(),
            vec![
                TaggedCell::new(Crescent::Interval(Interval::closed_open(0.0, 0.5)), Point::Real(0.25)),
                TaggedCell::new(Crescent::Interval(Interval::closed(0.5, 1.0)), Point::Real(0.75)),
            ],
        )
        .unwrap();
        assert_eq!(riemann_sum(&chi, &mid, &Measure::Lebesgue).unwrap(), 0.5);
    }

    #[test]
    fn linear_integrand_converges() {
        let x = Integrand::real("x", |x| x);
        let r = integrate(&x, &Measure::Lebesgue, &unit(), 1e-9, &IntegrateOptions::default()).unwrap();
        assert!(r.converged());
        assert!((r.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn lower_upper_examples() {
        let pol = SubdivisionPolicy::default();
        let c = Integrand::real("c", |_| 3.0);
        let b = lower_upper(&c, &Measure::Lebesgue, &Gauge::constant(0.1), 4, &pol).unwrap();
        assert!((b.lower - 3.0).abs() < 1e-12 && (b.upper - 3.0).abs() < 1e-12);
        let x = Integrand::real("x", |x| x);
        let b = lower_upper(&x, &Measure::Lebesgue, &Gauge::constant(0.1), 4, &pol).unwrap();
        assert!(b.lower < 0.5 && 0.5 < b.upper && b.upper - b.lower <= 0.4);
        let spike = Integrand::real("chi", |x| (x == 0.5) as u8 as f64);
        let b = lower_upper(&spike, &Measure::Lebesgue, &Gauge::constant(0.25), 4, &pol).unwrap();
        assert_eq!(b.lower, 0.0);
        assert!(b.upper <= 0.5);
    }
}
