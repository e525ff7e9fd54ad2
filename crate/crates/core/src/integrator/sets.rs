//! Characteristic functions of crescent unions and null-set gauges.

use std::collections::HashMap;

use crate::gauge::{Gauge, GaugeKind};
use crate::measure::Measure;
use crate::space::{ball_depth, BoxCell, Crescent, Interval, Point, PointKey};
use crate::sum::compensated;
use crate::{Error, Result};

use super::{replicate_sums, Integrand, IntegrateOptions, IntegrationResult, LevelRecord, Status};

/// An open enlargement `O ⊇ E` and a closed shrinkage `C ⊆ E` of a set `E`,
/// with their measures.
#[derive(Debug, Clone)]
pub struct CharSets {
    /// Disjoint pieces of `E`.
    pub set: Vec<Crescent>,
    pub open: Vec<Crescent>,
    pub closed: Vec<Crescent>,
    pub measure_set: f64,
    pub measure_open: f64,
    pub measure_closed: f64,
    /// The dilation that was applied to the endpoints.
    pub dilation: f64,
}

fn disjoint_pieces(e: &[Crescent]) -> Result<Vec<Crescent>> {
    let mut out = Vec::new();
    for (k, c) in e.iter().enumerate() {
        out.extend(c.subtract_many(&e[..k])?);
    }
    Ok(out)
}

fn enlarge(i: &Interval, d: f64) -> Interval {
    let lo_moved = i.lo_closed && i.lo > 0.0;
    let hi_moved = i.hi_closed && i.hi < 1.0;
    Interval::new(
        if lo_moved { (i.lo - d).max(0.0) } else { i.lo },
        if hi_moved { (i.hi + d).min(1.0) } else { i.hi },
        !lo_moved && i.lo_closed,
        !hi_moved && i.hi_closed,
    )
    .intersect(&Interval::unit())
}

fn shrink(i: &Interval, d: f64) -> Interval {
    Interval::closed(
        if i.lo_closed { i.lo } else { i.lo + d },
        if i.hi_closed { i.hi } else { i.hi - d },
    )
}

fn relative_open(i: &Interval) -> Interval {
    Interval::new(i.lo, i.hi, i.lo_closed && i.lo <= 0.0, i.hi_closed && i.hi >= 1.0)
}

impl CharSets {
    /// Builds `O` and `C` with `μ(O) − μ(E) < eps/2` and `μ(E) − μ(C) < eps/2`,
    /// halving the dilation until both hold.
    pub fn new(e: &[Crescent], m: &Measure, eps: f64) -> Result<CharSets> {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
        }
        let space = m.whole_space();
        for c in e {
            if !space.same_space(c) {
                return Err(Error::SpaceMismatch(format!(
                    "{} set under {}",
                    c.kind(),
                    m.name()
                )));
            }
        }
        let set: Vec<Crescent> = disjoint_pieces(e)?
            .into_iter()
            .map(|c| c.intersect(&space))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|c| !c.is_empty())
            .collect();
        let measure_set = compensated(set.iter().map(|c| m.measure_of(c)).collect::<Result<Vec<_>>>()?);
        match &space {
            Crescent::Cantor(_) => Ok(CharSets {
                open: set.clone(),
                closed: set.clone(),
                set,
                measure_set,
                measure_open: measure_set,
                measure_closed: measure_set,
                dilation: 0.0,
            }),
            Crescent::Interval(_) => {
                let mut d = eps / 4.0;
                for _ in 0..200 {
                    let intervals: Vec<Interval> = set.iter().map(|c| *c.as_interval().unwrap()).collect();
                    let open: Vec<Crescent> = intervals
                        .iter()
                        .map(|i| Crescent::Interval(relative_open(&enlarge(i, d))))
                        .filter(|c| !c.is_empty())
                        .collect();
                    let closed: Vec<Crescent> = intervals
                        .iter()
                        .map(|i| Crescent::Interval(shrink(i, d)))
                        .filter(|c| !c.is_empty())
                        .collect();
                    let measure_open = m.measure_of_open(&open)?;
                    let measure_closed =
                        compensated(closed.iter().map(|c| m.measure_of(c)).collect::<Result<Vec<_>>>()?);
                    if measure_open - measure_set < eps / 2.0 && measure_set - measure_closed < eps / 2.0 {
                        return Ok(CharSets {
                            set,
                            open,
                            closed,
                            measure_set,
                            measure_open,
                            measure_closed,
                            dilation: d,
                        });
                    }
                    d *= 0.5;
                    if d == 0.0 {
                        break;
                    }
                }
                Err(Error::EnlargementFailure(eps))
            }
            Crescent::Box(_) => Err(Error::InvalidArgument(
                "characteristic-function integration is available on the interval and Cantor spaces".into(),
            )),
        }
    }

    /// The gauge `d(x, Oᶜ)` on `C`, `d(x, C)` on `Oᶜ`, and the smaller of the
    /// two on `O \ C`. Distances are capped at 1.
    pub fn gauge(&self) -> Result<Gauge> {
        let Some(first) = self.open.first().or(self.set.first()) else {
            return Ok(Gauge::with_kind(GaugeKind::CharSet, "char-set(empty)", |_| 1.0));
        };
        let whole = match first {
            Crescent::Cantor(_) => crate::space::SpaceDescriptor::Cantor.whole(),
            _ => Crescent::Interval(Interval::unit()),
        };
        let outside = whole.subtract_many(&self.open)?;
        let closed = self.closed.clone();
        let open = self.open.clone();
        let dist = |sets: &[Crescent], x: &Point| {
            sets.iter()
                .map(|s| s.distance_to_closure(x).unwrap_or(f64::INFINITY))
                .fold(1.0, f64::min)
        };
        Ok(Gauge::with_kind(GaugeKind::CharSet, "char-set", move |x| {
            let in_c = closed.iter().any(|c| c.contains_point(x).unwrap_or(false));
            if in_c {
                return dist(&outside, x);
            }
            let in_o = open.iter().any(|c| c.contains_point(x).unwrap_or(false));
            if in_o {
                dist(&outside, x).min(dist(&closed, x))
            } else {
                dist(&closed, x)
            }
        }))
    }
}

/// Integrates `χ_E` for a finite union `E` of crescents using the gauge
/// built from an open enlargement and a closed shrinkage of `E`.
pub fn integrate_char(
    e: &[Crescent],
    m: &Measure,
    eps: f64,
    opts: &IntegrateOptions,
) -> Result<IntegrationResult> {
    let sets = CharSets::new(e, m, eps)?;
    let gauge = sets.gauge()?;
    let pieces = sets.set.clone();
    let chi = Integrand::new("char", move |x| {
        pieces.iter().any(|c| c.contains_point(x).unwrap_or(false)) as u8 as f64
    });
    let reps = replicate_sums(&chi, m, &m.whole_space(), &gauge, opts.replicates, &opts.policy, 0)?;
    let value = reps.mean();
    let error_estimate = (sets.measure_open - sets.measure_set).max(sets.measure_set - sets.measure_closed);
    Ok(IntegrationResult {
        value,
        error_estimate,
        levels: vec![LevelRecord {
            gauge: gauge.label().to_string(),
            cells: reps.cells,
            norm: reps.norm,
            sum: value,
            spread: reps.spread(),
        }],
        status: Status::Converged,
        gauge: Some(gauge),
    })
}

/// The closed ball of radius `r` at `q`, or a basic set containing it.
fn ball_cover(q: &Point, r: f64) -> Result<Crescent> {
    Ok(match q {
        Point::Real(x) => Crescent::Interval(Interval::closed(x - r, x + r)),
        Point::Vector(v) => Crescent::Box(BoxCell::new(
            v.iter().map(|&x| Interval::closed(x - r, x + r)).collect(),
        )),
        Point::Cantor(c) => {
            let depth = ball_depth(r).unwrap_or(crate::space::Word::MAX_LEN as usize);
            Crescent::cylinder(c.word(depth).expect("depth within word limit"))
        }
    })
}

/// A gauge equal to 1 except on the listed points, where the `γ`-ball around
/// the `k`-th point has measure below `eps·2^-(k+2)`. Any fine Riemann sum of
/// a function bounded by 1 and supported on the points is then below `eps/2`.
pub fn null_set_gauge(points: &[Point], eps: f64, m: &Measure) -> Result<Gauge> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let mut radii: HashMap<PointKey, f64> = HashMap::new();
    let mut k = 0i32;
    for q in points {
        if radii.contains_key(&q.key()) {
            continue;
        }
        let bound = eps * (-(k + 2) as f64).exp2();
        let r = match (m, q) {
            (Measure::Lebesgue, Point::Real(_)) => eps * (-(k + 4) as f64).exp2(),
            _ => {
                let mut r = 0.5;
                for _ in 0..1000 {
                    if m.measure_of(&ball_cover(q, r)?)? < bound {
                        break;
                    }
                    r *= 0.5;
                }
                r
            }
        };
        radii.insert(q.key(), r);
        k += 1;
    }
    Ok(Gauge::with_kind(
        GaugeKind::NullSet,
        format!("null-set({} points, eps={eps:e})", radii.len()),
        move |p| radii.get(&p.key()).copied().unwrap_or(1.0),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Word;

    #[test]
    fn char_of_interval() {
        let e = [Crescent::Interval(Interval::closed(0.3, 0.6))];
        let r = integrate_char(&e, &Measure::Lebesgue, 1e-3, &IntegrateOptions::default()).unwrap();
        assert!((r.value - 0.3).abs() < 1e-3, "{}", r.value);
    }

    #[test]
    fn char_of_clopen_cylinder() {
        let e = [Crescent::cylinder(Word::parse("0").unwrap())];
        let m = Measure::cantor_ifs(0.25).unwrap();
        let r = integrate_char(&e, &m, 1e-3, &IntegrateOptions::default()).unwrap();
        assert!((r.value - 0.25).abs() < 1e-12);
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn char_of_empty_set() {
        let r = integrate_char(&[], &Measure::Lebesgue, 1e-3, &IntegrateOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn null_gauge_is_one_elsewhere() {
        let g = null_set_gauge(&[Point::Real(0.5)], 1e-4, &Measure::Lebesgue).unwrap();
        assert_eq!(g.eval(&Point::Real(0.25)), 1.0);
        assert!(g.eval(&Point::Real(0.5)) < 1e-4);
        let empty = null_set_gauge(&[], 1e-2, &Measure::Lebesgue).unwrap();
        assert_eq!(empty.eval(&Point::Real(0.5)), 1.0);
    }
}
