//! Simple valuations on the upper space and their order relations.
//!
//! The upper space of a compact space `X` consists of its non-empty compact
//! subsets ordered by reverse inclusion, with `X` itself as bottom. A simple
//! valuation is a finite weighted sum of point masses on it. The order and
//! the way-below relation between two simple valuations are decided as
//! transportation problems.

use std::collections::hash_map::{Entry, HashMap};
use std::fmt;

use crate::gauge::{Gauge, GaugeKind};
use crate::integrator::{riemann_sum, Integrand};
use crate::measure::Measure;
use crate::partition::{Partition, TaggedPartition};
use crate::space::{BoxCell, Crescent, CylinderSet, Interval, Point, Word};
use crate::transport;
use crate::{Error, Result};

/// A non-empty compact subset: a closed interval, a closed box, or a finite
/// union of cylinders.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperElement(Crescent);

impl UpperElement {
    /// The closure of a non-empty crescent.
    pub fn new(c: &Crescent) -> Result<UpperElement> {
        if c.is_empty() {
            return Err(Error::InvalidArgument("upper-space elements are non-empty".into()));
        }
        Ok(UpperElement(c.closure()))
    }

    pub fn set(&self) -> &Crescent {
        &self.0
    }

    /// `self ⊑ other`, i.e. `self ⊇ other`.
    pub fn leq(&self, other: &UpperElement) -> Result<bool> {
        self.0.contains(&other.0)
    }

    /// `self ≪ other`: the interior of `self` relative to `whole` contains `other`.
    pub fn way_below(&self, other: &UpperElement, whole: &Crescent) -> Result<bool> {
        match (&self.0, &other.0, whole) {
            (Crescent::Interval(a), Crescent::Interval(b), Crescent::Interval(x)) => {
                Ok(relative_interior(a, x).contains(b))
            }
            (Crescent::Box(a), Crescent::Box(b), Crescent::Box(x)) => Ok(a
                .axes
                .iter()
                .zip(&b.axes)
                .zip(&x.axes)
                .all(|((a, b), x)| relative_interior(a, x).contains(b))),
            (Crescent::Cantor(a), Crescent::Cantor(b), Crescent::Cantor(_)) => Ok(a.contains(b)),
            _ => Err(Error::SpaceMismatch(format!(
                "{} and {} in a {} space",
                self.0.kind(),
                other.0.kind(),
                whole.kind()
            ))),
        }
    }
}

fn relative_interior(a: &Interval, x: &Interval) -> Interval {
    Interval::new(a.lo, a.hi, a.lo <= x.lo, a.hi >= x.hi)
}

/// What an atom of a simple valuation sits on.
#[derive(Debug, Clone, PartialEq)]
pub enum Carrier {
    Set(UpperElement),
    Point(Point),
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Carrier::Set(u) => write!(f, "{}", u.0),
            Carrier::Point(p) => write!(f, "{{{p}}}"),
        }
    }
}

/// `Σ w_i·δ_{c_i}` over the upper space of `whole`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleValuation {
    whole: Crescent,
    atoms: Vec<(f64, Carrier)>,
}

const NORMALISATION_TOL: f64 = 1e-12;

impl SimpleValuation {
    /// Merges atoms with equal carriers and drops zero weights.
    pub fn new(whole: Crescent, atoms: Vec<(f64, Carrier)>) -> Result<SimpleValuation> {
        let mut merged: Vec<(f64, Carrier)> = Vec::with_capacity(atoms.len());
        let mut index: HashMap<String, usize> = HashMap::with_capacity(atoms.len());
        for (w, c) in atoms {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidArgument(format!("invalid weight {w}")));
            }
            let fits = match &c {
                Carrier::Set(u) => whole.contains(&u.0)?,
                Carrier::Point(p) => whole.closure_contains(p)?,
            };
            if !fits {
                return Err(Error::InvalidArgument(format!("carrier {c} is outside {whole}")));
            }
            if w == 0.0 {
                continue;
            }
            match index.entry(format!("{c:?}")) {
                Entry::Occupied(slot) => merged[*slot.get()].0 += w,
                Entry::Vacant(slot) => {
                    slot.insert(merged.len());
                    merged.push((w, c));
                }
            }
        }
        Ok(SimpleValuation { whole, atoms: merged })
    }

    pub fn dirac(whole: Crescent, carrier: Carrier) -> Result<SimpleValuation> {
        SimpleValuation::new(whole, vec![(1.0, carrier)])
    }

    /// The bottom element `δ_X`.
    pub fn bottom(whole: Crescent) -> Result<SimpleValuation> {
        let top = Carrier::Set(UpperElement::new(&whole)?);
        SimpleValuation::dirac(whole, top)
    }

    /// Convenience constructor from `(weight, set)` pairs.
    pub fn from_sets(whole: Crescent, atoms: Vec<(f64, Crescent)>) -> Result<SimpleValuation> {
        let atoms = atoms
            .into_iter()
            .map(|(w, c)| Ok((w, Carrier::Set(UpperElement::new(&c)?))))
            .collect::<Result<Vec<_>>>()?;
        SimpleValuation::new(whole, atoms)
    }

    pub fn whole(&self) -> &Crescent {
        &self.whole
    }

    pub fn atoms(&self) -> &[(f64, Carrier)] {
        &self.atoms
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|(w, _)| w).sum()
    }

    pub fn is_normalised(&self) -> bool {
        (self.total() - 1.0).abs() <= NORMALISATION_TOL
    }

    fn check_normalised(&self) -> Result<()> {
        if self.is_normalised() {
            Ok(())
        } else {
            Err(Error::NotNormalised(self.total()))
        }
    }

    fn sets(&self) -> Result<Vec<(f64, &UpperElement)>> {
        self.atoms
            .iter()
            .map(|(w, c)| match c {
                Carrier::Set(u) => Ok((*w, u)),
                Carrier::Point(_) => Err(Error::PointCarrier),
            })
            .collect()
    }

    fn bottom_index(&self) -> Option<usize> {
        self.atoms
            .iter()
            .position(|(_, c)| matches!(c, Carrier::Set(u) if u.0 == self.whole.closure()))
    }

    fn check_pair(&self, other: &SimpleValuation) -> Result<()> {
        if self.whole != other.whole {
            return Err(Error::SpaceMismatch(format!(
                "valuations over {} and {}",
                self.whole, other.whole
            )));
        }
        self.check_normalised()?;
        other.check_normalised()
    }
}

impl fmt::Display for SimpleValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (w, c)) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{w}·δ_{c}")?;
        }
        Ok(())
    }
}

/// `μ_P = Σ μ(R_i)·δ_{closure(R_i)}`.
pub fn valuation_of_partition(p: &Partition, m: &Measure) -> Result<SimpleValuation> {
    let atoms = p
        .cells()
        .iter()
        .map(|c| Ok((m.measure_of(c)?, Carrier::Set(UpperElement::new(c)?))))
        .collect::<Result<Vec<_>>>()?;
    SimpleValuation::new(m.whole_space(), atoms)
}

/// `μ_{Ṗ} = Σ μ(R_i)·δ_{t_i}`, the point-mass valuation of a tagged partition.
pub fn valuation_of_tagged(tp: &TaggedPartition, m: &Measure) -> Result<SimpleValuation> {
    let atoms = tp
        .cells()
        .iter()
        .map(|c| Ok((m.measure_of(&c.cell)?, Carrier::Point(c.tag.clone()))))
        .collect::<Result<Vec<_>>>()?;
    SimpleValuation::new(m.whole_space(), atoms)
}

/// The closed `α`-expansion of a carrier, clipped to `whole`.
fn expand(c: &Crescent, alpha: f64, whole: &Crescent) -> Result<Crescent> {
    let widen = |i: &Interval, x: &Interval| Interval::closed((i.lo - alpha).max(x.lo), (i.hi + alpha).min(x.hi));
    Ok(match (c, whole) {
        (Crescent::Interval(i), Crescent::Interval(x)) => Crescent::Interval(widen(i, x)),
        (Crescent::Box(b), Crescent::Box(x)) => Crescent::Box(BoxCell::new(
            b.axes.iter().zip(&x.axes).map(|(i, x)| widen(i, x)).collect(),
        )),
        (Crescent::Cantor(s), Crescent::Cantor(_)) => {
            let mut k = 0usize;
            while k < Word::MAX_LEN as usize && (-(k as f64)).exp2() > alpha {
                k += 1;
            }
            Crescent::Cantor(CylinderSet::new(s.words().iter().map(|w| w.truncate(k))))
        }
        _ => return Err(Error::SpaceMismatch(format!("{} carrier in {}", c.kind(), whole.kind()))),
    })
}

/// Replaces every carrier by its closed `α`-expansion.
pub fn relax(v: &SimpleValuation, alpha: f64) -> Result<SimpleValuation> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    let atoms = v
        .sets()?
        .into_iter()
        .map(|(w, u)| Ok((w, Carrier::Set(UpperElement::new(&expand(&u.0, alpha, &v.whole)?)?))))
        .collect::<Result<Vec<_>>>()?;
    SimpleValuation::new(v.whole.clone(), atoms)
}

/// `β·δ_X + (1 − β)·v`.
pub fn mix_bottom(v: &SimpleValuation, beta: f64) -> Result<SimpleValuation> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidArgument(format!("beta must lie in (0,1), got {beta}")));
    }
    v.check_normalised()?;
    let mut atoms: Vec<(f64, Carrier)> = v.atoms.iter().map(|(w, c)| ((1.0 - beta) * w, c.clone())).collect();
    atoms.push((beta, Carrier::Set(UpperElement::new(&v.whole)?)));
    SimpleValuation::new(v.whole.clone(), atoms)
}

/// A transport plan `t[i][j]` from the atoms of one valuation to another.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan(pub Vec<Vec<f64>>);

impl Plan {
    /// Non-zero entries as `(i, j, t_ij)`.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (i, row) in self.0.iter().enumerate() {
            for (j, &t) in row.iter().enumerate() {
                if t != 0.0 {
                    out.push((i, j, t));
                }
            }
        }
        out
    }
}

/// The outcome of an order query.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderAnswer {
    pub holds: bool,
    pub plan: Option<Plan>,
    pub reason: Option<String>,
}

/// Decides `a ⊑ b` by the splitting lemma, returning a witness plan.
pub fn order_plan(a: &SimpleValuation, b: &SimpleValuation) -> Result<OrderAnswer> {
    a.check_pair(b)?;
    let sa = a.sets()?;
    let sb = b.sets()?;
    let mut arcs = vec![vec![false; sb.len()]; sa.len()];
    for (i, (_, c)) in sa.iter().enumerate() {
        for (j, (_, d)) in sb.iter().enumerate() {
            arcs[i][j] = c.leq(d)?;
        }
    }
    let p: Vec<f64> = sa.iter().map(|(w, _)| *w).collect();
    let q: Vec<f64> = sb.iter().map(|(w, _)| *w).collect();
    Ok(match transport::feasible(&p, &q, |i, j| arcs[i][j]) {
        Some(plan) => OrderAnswer {
            holds: true,
            plan: Some(Plan(plan)),
            reason: None,
        },
        None => OrderAnswer {
            holds: false,
            plan: None,
            reason: Some("transportation problem is infeasible".into()),
        },
    })
}

pub fn order_leq(a: &SimpleValuation, b: &SimpleValuation) -> Result<bool> {
    Ok(order_plan(a, b)?.holds)
}

/// Decides `a ≪ b`: `a` must have a bottom atom that ships a positive amount
/// to every atom of `b`, with the rest routed along `c_i ≪ d_j` arcs.
///
/// A share `δ` is pre-routed from the bottom atom to every demand and the
/// residual problem is solved; `δ` starts at `min(min_j q_j, p_bottom/n)/2`
/// and is halved while the residual problem is infeasible.
pub fn way_below_plan(a: &SimpleValuation, b: &SimpleValuation) -> Result<OrderAnswer> {
    a.check_pair(b)?;
    let sa = a.sets()?;
    let sb = b.sets()?;
    let Some(i0) = a.bottom_index() else {
        return Ok(OrderAnswer {
            holds: false,
            plan: None,
            reason: Some("no bottom atom".into()),
        });
    };
    let mut arcs = vec![vec![false; sb.len()]; sa.len()];
    for (i, (_, c)) in sa.iter().enumerate() {
        for (j, (_, d)) in sb.iter().enumerate() {
            arcs[i][j] = c.way_below(d, &a.whole)?;
        }
    }
    let p: Vec<f64> = sa.iter().map(|(w, _)| *w).collect();
    let q: Vec<f64> = sb.iter().map(|(w, _)| *w).collect();
    let n = q.len() as f64;
    let q_min = q.iter().copied().fold(f64::INFINITY, f64::min);
    let mut delta = 0.5 * q_min.min(p[i0] / n);
    for _ in 0..60 {
        let mut pr = p.clone();
        pr[i0] -= n * delta;
        let qr: Vec<f64> = q.iter().map(|x| x - delta).collect();
        if pr[i0] >= 0.0 {
            if let Some(mut plan) = transport::feasible(&pr, &qr, |i, j| arcs[i][j]) {
                for t in plan[i0].iter_mut() {
                    *t += delta;
                }
                return Ok(OrderAnswer {
                    holds: true,
                    plan: Some(Plan(plan)),
                    reason: None,
                });
            }
        }
        delta *= 0.5;
    }
    Ok(OrderAnswer {
        holds: false,
        plan: None,
        reason: Some("no transport plan with positive bottom shares".into()),
    })
}

pub fn way_below(a: &SimpleValuation, b: &SimpleValuation) -> Result<bool> {
    Ok(way_below_plan(a, b)?.holds)
}

/// `v(□O)`: total weight of the carriers contained in `∪ opens`.
pub fn box_modal_mass(v: &SimpleValuation, opens: &[Crescent]) -> Result<f64> {
    let mut total = 0.0;
    for (w, u) in v.sets()? {
        if u.0.subtract_many(opens)?.is_empty() {
            total += w;
        }
    }
    Ok(total)
}

/// Largest `r` with the closed `r`-ball at `x`, clipped to `whole`, inside `k`.
fn inner_radius(k: &Crescent, x: &Point, whole: &Crescent, cap: f64) -> f64 {
    let axis = |k: &Interval, w: &Interval, x: f64| -> f64 {
        if !k.closure_contains(x) {
            return 0.0;
        }
        let left = if k.lo <= w.lo { cap } else { x - k.lo };
        let right = if k.hi >= w.hi { cap } else { k.hi - x };
        left.min(right)
    };
    match (k, x, whole) {
        (Crescent::Interval(k), Point::Real(x), Crescent::Interval(w)) => axis(k, w, *x),
        (Crescent::Box(k), Point::Vector(x), Crescent::Box(w)) => k
            .axes
            .iter()
            .zip(&w.axes)
            .zip(x)
            .map(|((k, w), &x)| axis(k, w, x))
            .fold(cap, f64::min),
        (Crescent::Cantor(k), Point::Cantor(x), Crescent::Cantor(_)) => (0..=Word::MAX_LEN as usize)
            .find(|&n| {
                x.word(n)
                    .is_some_and(|w| k.contains(&CylinderSet::cylinder(w)))
            })
            .map_or(0.0, |n| (-(n as f64)).exp2().min(cap)),
        _ => 0.0,
    }
}

/// A gauge `γ` such that every `γ`-fine tagged partition `P′` satisfies
/// `relax(μ_P, α) ⊑ μ_{P′}`.
///
/// The gauge is the larger of two radii, each of which is enough alone. The
/// interior radius is `d(x, X \ R_i)` for the cell `R_i` holding `x`, so a
/// fine cell tagged at `x` stays inside `R_i`. The boundary radius is
/// `min_i max(d(x, closure R_i), s_i(x))`, where `s_i(x)` is the largest
/// radius of a closed ball at `x` inside the expanded carrier `K_i`, so a
/// fine cell tagged at `x` either misses `R_i` or lies in `K_i`.
pub fn gauge_from_relaxed_valuation(p: &Partition, alpha: f64, m: &Measure) -> Result<Gauge> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    let whole = m.whole_space();
    let cap = 2.0 * whole.diameter();
    let cells: Vec<Crescent> = p.cells().to_vec();
    let complements = cells
        .iter()
        .map(|c| whole.subtract_many(std::slice::from_ref(c)))
        .collect::<Result<Vec<_>>>()?;
    let carriers = cells
        .iter()
        .map(|c| expand(&c.closure(), alpha, &whole))
        .collect::<Result<Vec<_>>>()?;
    Ok(Gauge::with_kind(
        GaugeKind::Relaxed,
        format!("relaxed(alpha={alpha})"),
        move |x| {
            let dist = |sets: &[Crescent]| {
                sets.iter()
                    .map(|s| s.distance_to_closure(x).unwrap_or(f64::INFINITY))
                    .fold(cap, f64::min)
            };
            let boundary = cells
                .iter()
                .zip(&carriers)
                .map(|(c, k)| {
                    let d = c.distance_to_closure(x).unwrap_or(f64::INFINITY).min(cap);
                    d.max(inner_radius(k, x, &whole, cap))
                })
                .fold(cap, f64::min);
            let interior = cells
                .iter()
                .position(|c| c.contains_point(x).unwrap_or(false))
                .map_or(0.0, |i| dist(&complements[i]));
            interior.max(boundary)
        },
    ))
}

/// `|Σ f(t_i)·μ(R_i) − reference|`.
pub fn weak_gap(f: &Integrand, tp: &TaggedPartition, m: &Measure, reference: f64) -> Result<f64> {
    Ok((riemann_sum(f, tp, m)? - reference).abs())
}
