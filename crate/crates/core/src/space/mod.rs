//! Points, crescents and the crescent algebra of the three space backends.
//!
//! A crescent is a basic open set minus another basic open set. Each backend
//! restricts its crescents to a convenient closed-under-the-algebra family:
//! single intervals with explicit endpoint flags on `[0,1]`, single boxes on a
//! product of closed intervals, and finite unions of cylinders on `{0,1}^ω`.
//! All operations are exact; endpoint comparisons never use a tolerance.

mod boxcell;
mod cantor;
mod interval;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use boxcell::BoxCell;
pub use cantor::{ball_depth, CantorPoint, CylinderSet, Word};
pub use interval::Interval;

use crate::{Error, Result};

/// Dense sets usable as endpoint bases on the interval backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DenseSet {
    /// Dyadic rationals `k/2^n`.
    Dyadic,
    /// Rationals in Stern–Brocot order.
    RationalEnumeration,
}

/// Which endpoints cells may have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    #[default]
    AllEndpoints,
    Dense(DenseSet),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceDescriptor {
    Interval {
        #[serde(default)]
        basis: Basis,
    },
    Box {
        bounds: Vec<(f64, f64)>,
        #[serde(default)]
        basis: Basis,
    },
    Cantor,
}

impl SpaceDescriptor {
    pub fn unit_interval() -> SpaceDescriptor {
        SpaceDescriptor::Interval {
            basis: Basis::AllEndpoints,
        }
    }

    pub fn unit_cube(dim: usize) -> SpaceDescriptor {
        SpaceDescriptor::Box {
            bounds: vec![(0.0, 1.0); dim],
            basis: Basis::AllEndpoints,
        }
    }

    pub fn whole(&self) -> Crescent {
        match self {
            SpaceDescriptor::Interval { .. } => Crescent::Interval(Interval::unit()),
            SpaceDescriptor::Box { bounds, .. } => Crescent::Box(BoxCell::closed(bounds)),
            SpaceDescriptor::Cantor => Crescent::Cantor(CylinderSet::whole()),
        }
    }

    pub fn basis(&self) -> Basis {
        match self {
            SpaceDescriptor::Interval { basis } | SpaceDescriptor::Box { basis, .. } => *basis,
            SpaceDescriptor::Cantor => Basis::AllEndpoints,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SpaceDescriptor::Interval { .. } => "interval",
            SpaceDescriptor::Box { .. } => "box",
            SpaceDescriptor::Cantor => "cantor",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let SpaceDescriptor::Box { bounds, .. } = self {
            if bounds.is_empty() {
                return Err(Error::InvalidArgument("box space needs at least one axis".into()));
            }
            if bounds.iter().any(|&(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
                return Err(Error::InvalidArgument(format!("invalid box bounds {bounds:?}")));
            }
        }
        Ok(())
    }
}

/// A point of one of the backends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Real(f64),
    Vector(Vec<f64>),
    Cantor(CantorPoint),
}

impl Point {
    pub fn real(&self) -> Option<f64> {
        match self {
            Point::Real(x) => Some(*x),
            _ => None,
        }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        match (self, other) {
            (Point::Real(a), Point::Real(b)) => (a - b).abs(),
            (Point::Vector(a), Point::Vector(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).powi(2))
                .sum::<f64>()
                .sqrt(),
            (Point::Cantor(a), Point::Cantor(b)) => a.distance(b),
            _ => f64::NAN,
        }
    }

    /// Largest coordinate difference; equals [`Point::distance`] except on boxes.
    pub fn sup_distance(&self, other: &Point) -> f64 {
        match (self, other) {
            (Point::Vector(a), Point::Vector(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
            _ => self.distance(other),
        }
    }
}

/// A hashable identity for points, treating `-0.0` and `0.0` as equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PointKey {
    Real(u64),
    Vector(Vec<u64>),
    Cantor(CantorPoint),
}

fn float_key(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}

impl Point {
    pub fn key(&self) -> PointKey {
        match self {
            Point::Real(x) => PointKey::Real(float_key(*x)),
            Point::Vector(v) => PointKey::Vector(v.iter().map(|&x| float_key(x)).collect()),
            Point::Cantor(c) => PointKey::Cantor(*c),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Real(x) => write!(f, "{x}"),
            Point::Vector(v) => write!(f, "{v:?}"),
            Point::Cantor(c) => write!(f, "{c}"),
        }
    }
}

/// A cell of one of the backends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Crescent {
    Interval(Interval),
    Box(BoxCell),
    Cantor(CylinderSet),
}

fn mismatch(a: &Crescent, b: &Crescent) -> Error {
    Error::SpaceMismatch(format!("{} vs {}", a.kind(), b.kind()))
}

fn point_mismatch(c: &Crescent, p: &Point) -> Error {
    Error::SpaceMismatch(format!("{} cell vs point {p}", c.kind()))
}

impl Crescent {
    pub fn kind(&self) -> &'static str {
        match self {
            Crescent::Interval(_) => "interval",
            Crescent::Box(_) => "box",
            Crescent::Cantor(_) => "cantor",
        }
    }

    pub fn cylinder(w: Word) -> Crescent {
        Crescent::Cantor(CylinderSet::cylinder(w))
    }

    pub fn empty_like(&self) -> Crescent {
        match self {
            Crescent::Interval(_) => Crescent::Interval(Interval::EMPTY),
            Crescent::Box(b) => Crescent::Box(BoxCell::empty(b.dim())),
            Crescent::Cantor(_) => Crescent::Cantor(CylinderSet::empty()),
        }
    }

    pub fn same_space(&self, other: &Crescent) -> bool {
        match (self, other) {
            (Crescent::Interval(_), Crescent::Interval(_))
            | (Crescent::Cantor(_), Crescent::Cantor(_)) => true,
            (Crescent::Box(a), Crescent::Box(b)) => a.dim() == b.dim(),
            _ => false,
        }
    }

    pub fn accepts(&self, p: &Point) -> bool {
        match (self, p) {
            (Crescent::Interval(_), Point::Real(_)) | (Crescent::Cantor(_), Point::Cantor(_)) => {
                true
            }
            (Crescent::Box(b), Point::Vector(v)) => b.dim() == v.len(),
            _ => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Crescent::Interval(i) => i.is_empty(),
            Crescent::Box(b) => b.is_empty(),
            Crescent::Cantor(c) => c.is_empty(),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Crescent::Interval(i) => i.length(),
            Crescent::Box(b) => b.diameter(),
            Crescent::Cantor(c) => c.diameter(),
        }
    }

    pub fn closure(&self) -> Crescent {
        match self {
            Crescent::Interval(i) => Crescent::Interval(i.closure()),
            Crescent::Box(b) => Crescent::Box(b.closure()),
            Crescent::Cantor(c) => Crescent::Cantor(c.clone()),
        }
    }

    pub fn intersect(&self, other: &Crescent) -> Result<Crescent> {
        match (self, other) {
            (Crescent::Interval(a), Crescent::Interval(b)) => Ok(Crescent::Interval(a.intersect(b))),
            (Crescent::Box(a), Crescent::Box(b)) if a.dim() == b.dim() => {
                Ok(Crescent::Box(a.intersect(b)))
            }
            (Crescent::Cantor(a), Crescent::Cantor(b)) => Ok(Crescent::Cantor(a.intersect(b))),
            _ => Err(mismatch(self, other)),
        }
    }

    /// `self \ other` as pairwise disjoint non-empty crescents.
    pub fn subtract(&self, other: &Crescent) -> Result<Vec<Crescent>> {
        match (self, other) {
            (Crescent::Interval(a), Crescent::Interval(b)) => {
                Ok(a.subtract(b).into_iter().map(Crescent::Interval).collect())
            }
            (Crescent::Box(a), Crescent::Box(b)) if a.dim() == b.dim() => {
                Ok(a.subtract(b).into_iter().map(Crescent::Box).collect())
            }
            (Crescent::Cantor(a), Crescent::Cantor(b)) => {
                let d = a.subtract(b);
                Ok(if d.is_empty() { Vec::new() } else { vec![Crescent::Cantor(d)] })
            }
            _ => Err(mismatch(self, other)),
        }
    }

    /// `self \ ∪ others` by repeated subtraction.
    pub fn subtract_many(&self, others: &[Crescent]) -> Result<Vec<Crescent>> {
        let mut pieces = if self.is_empty() { Vec::new() } else { vec![self.clone()] };
        for o in others {
            if !self.same_space(o) {
                return Err(mismatch(self, o));
            }
            let mut next = Vec::with_capacity(pieces.len() + 2);
            for p in &pieces {
                next.extend(p.subtract(o)?);
            }
            pieces = next;
        }
        Ok(pieces)
    }

    pub fn contains(&self, other: &Crescent) -> Result<bool> {
        match (self, other) {
            (Crescent::Interval(a), Crescent::Interval(b)) => Ok(a.contains(b)),
            (Crescent::Box(a), Crescent::Box(b)) if a.dim() == b.dim() => Ok(a.contains(b)),
            (Crescent::Cantor(a), Crescent::Cantor(b)) => Ok(a.contains(b)),
            _ => Err(mismatch(self, other)),
        }
    }

    pub fn is_disjoint(&self, other: &Crescent) -> Result<bool> {
        Ok(self.intersect(other)?.is_empty())
    }

    pub fn contains_point(&self, p: &Point) -> Result<bool> {
        match (self, p) {
            (Crescent::Interval(i), Point::Real(x)) => Ok(i.contains_point(*x)),
            (Crescent::Box(b), Point::Vector(v)) if b.dim() == v.len() => Ok(b.contains_point(v)),
            (Crescent::Cantor(c), Point::Cantor(x)) => Ok(c.contains_point(x)),
            _ => Err(point_mismatch(self, p)),
        }
    }

    pub fn closure_contains(&self, p: &Point) -> Result<bool> {
        match (self, p) {
            (Crescent::Interval(i), Point::Real(x)) => Ok(i.closure_contains(*x)),
            (Crescent::Box(b), Point::Vector(v)) if b.dim() == v.len() => {
                Ok(b.closure_contains(v))
            }
            (Crescent::Cantor(c), Point::Cantor(x)) => Ok(c.contains_point(x)),
            _ => Err(point_mismatch(self, p)),
        }
    }

    /// Distance from `p` to the closure; `+∞` for the empty crescent.
    pub fn distance_to_closure(&self, p: &Point) -> Result<f64> {
        match (self, p) {
            (Crescent::Interval(i), Point::Real(x)) => Ok(i.distance_to_closure(*x)),
            (Crescent::Box(b), Point::Vector(v)) if b.dim() == v.len() => {
                Ok(b.distance_to_closure(v))
            }
            (Crescent::Cantor(c), Point::Cantor(x)) => Ok(c.distance_to(x)),
            _ => Err(point_mismatch(self, p)),
        }
    }

    /// Whether the closure lies in the open ball of radius `r` at `centre`.
    pub fn within_ball(&self, centre: &Point, r: f64) -> Result<bool> {
        if self.is_empty() {
            return Ok(true);
        }
        match (self, centre) {
            (Crescent::Interval(i), Point::Real(t)) => Ok(i.farthest_distance(*t) < r),
            (Crescent::Box(b), Point::Vector(t)) if b.dim() == t.len() => {
                Ok(b.farthest_distance(t) < r)
            }
            (Crescent::Cantor(c), Point::Cantor(t)) => Ok(c.within_ball(t, r)),
            _ => Err(point_mismatch(self, centre)),
        }
    }

    pub fn as_interval(&self) -> Option<&Interval> {
        match self {
            Crescent::Interval(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_box(&self) -> Option<&BoxCell> {
        match self {
            Crescent::Box(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_cantor(&self) -> Option<&CylinderSet> {
        match self {
            Crescent::Cantor(c) => Some(c),
            _ => None,
        }
    }

    /// Order by position: left endpoint for intervals, lexicographic axes
    /// for boxes, first cylinder for Cantor sets.
    pub fn cmp_position(&self, other: &Crescent) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self, other) {
            (Crescent::Interval(a), Crescent::Interval(b)) => a.cmp_position(b),
            (Crescent::Box(a), Crescent::Box(b)) => a
                .axes
                .iter()
                .zip(&b.axes)
                .map(|(x, y)| x.cmp_position(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal),
            (Crescent::Cantor(a), Crescent::Cantor(b)) => {
                match (a.words().first(), b.words().first()) {
                    (Some(x), Some(y)) => x.cmp_position(*y).then(a.words().len().cmp(&b.words().len())),
                    (x, y) => x.is_some().cmp(&y.is_some()),
                }
            }
            _ => self.kind().cmp(other.kind()),
        }
    }
}

impl fmt::Display for Crescent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Crescent::Interval(i) => write!(f, "{i}"),
            Crescent::Box(b) => write!(f, "{b}"),
            Crescent::Cantor(c) => {
                if c.is_empty() {
                    return write!(f, "∅");
                }
                for (i, w) in c.words().iter().enumerate() {
                    if i > 0 {
                        write!(f, "∪")?;
                    }
                    write!(f, "B_{w}")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyl(s: &str) -> Crescent {
        Crescent::cylinder(Word::parse(s).unwrap())
    }

    #[test]
    fn subtract_many_examples() {
        let c = Crescent::Interval(Interval::unit());
        let out = c
            .subtract_many(&[
                Crescent::Interval(Interval::closed_open(0.0, 0.25)),
                Crescent::Interval(Interval::closed_open(0.5, 0.75)),
            ])
            .unwrap();
        assert_eq!(
            out,
            vec![
                Crescent::Interval(Interval::closed_open(0.25, 0.5)),
                Crescent::Interval(Interval::closed(0.75, 1.0)),
            ]
        );
        assert_eq!(c.subtract_many(&[]).unwrap(), vec![c.clone()]);
        let whole = SpaceDescriptor::Cantor.whole();
        assert_eq!(
            whole.subtract_many(&[cyl("00"), cyl("1")]).unwrap(),
            vec![cyl("01")]
        );
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let a = Crescent::Interval(Interval::unit());
        let b = cyl("0");
        assert!(matches!(a.intersect(&b), Err(Error::SpaceMismatch(_))));
        assert!(a.subtract_many(&[b]).is_err());
    }

    #[test]
    fn within_ball_is_strict() {
        let c = Crescent::Interval(Interval::unit());
        assert!(c.within_ball(&Point::Real(0.5), 0.6).unwrap());
        assert!(!c.within_ball(&Point::Real(0.5), 0.5).unwrap());
    }
}
