use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A possibly degenerate real interval with explicit endpoint inclusion.
///
/// Every empty interval is normalised to [`Interval::EMPTY`], so structural
/// equality coincides with set equality. Endpoints are compared exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub const EMPTY: Interval = Interval {
        lo: 1.0,
        hi: 0.0,
        lo_closed: false,
        hi_closed: false,
    };

    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Interval {
        let iv = Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        };
        if iv.is_empty_raw() {
            Interval::EMPTY
        } else {
            iv
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi, true, true)
    }

    pub fn open(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi, false, false)
    }

    pub fn closed_open(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi, true, false)
    }

    pub fn open_closed(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi, false, true)
    }

    pub fn point(x: f64) -> Interval {
        Interval::closed(x, x)
    }

    pub fn unit() -> Interval {
        Interval::closed(0.0, 1.0)
    }

    fn is_empty_raw(&self) -> bool {
        self.lo.is_nan()
            || self.hi.is_nan()
            || self.lo > self.hi
            || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn is_empty(&self) -> bool {
        self.is_empty_raw()
    }

    pub fn is_degenerate(&self) -> bool {
        !self.is_empty() && self.lo == self.hi
    }

    pub fn length(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn midpoint(&self) -> f64 {
        self.lo + 0.5 * (self.hi - self.lo)
    }

    pub fn closure(&self) -> Interval {
        if self.is_empty() {
            Interval::EMPTY
        } else {
            Interval::closed(self.lo, self.hi)
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::EMPTY;
        }
        let (lo, lo_closed) = match self.lo.partial_cmp(&other.lo) {
            Some(Ordering::Greater) => (self.lo, self.lo_closed),
            Some(Ordering::Less) => (other.lo, other.lo_closed),
            _ => (self.lo, self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Less) => (self.hi, self.hi_closed),
            Some(Ordering::Greater) => (other.hi, other.hi_closed),
            _ => (self.hi, self.hi_closed && other.hi_closed),
        };
        Interval::new(lo, hi, lo_closed, hi_closed)
    }

    /// `self \ other` as at most two disjoint pieces, left piece first.
    pub fn subtract(&self, other: &Interval) -> Vec<Interval> {
        if self.is_empty() {
            return Vec::new();
        }
        if self.intersect(other).is_empty() {
            return vec![*self];
        }
        let left = self.intersect(&Interval {
            lo: f64::NEG_INFINITY,
            hi: other.lo,
            lo_closed: false,
            hi_closed: !other.lo_closed,
        });
        let right = self.intersect(&Interval {
            lo: other.hi,
            hi: f64::INFINITY,
            lo_closed: !other.hi_closed,
            hi_closed: false,
        });
        [left, right].into_iter().filter(|p| !p.is_empty()).collect()
    }

    pub fn contains(&self, other: &Interval) -> bool {
        if other.is_empty() {
            return true;
        }
        if self.is_empty() {
            return false;
        }
        let lo_ok = self.lo < other.lo || (self.lo == other.lo && (self.lo_closed || !other.lo_closed));
        let hi_ok = self.hi > other.hi || (self.hi == other.hi && (self.hi_closed || !other.hi_closed));
        lo_ok && hi_ok
    }

    pub fn contains_point(&self, x: f64) -> bool {
        !self.is_empty()
            && (x > self.lo || (x == self.lo && self.lo_closed))
            && (x < self.hi || (x == self.hi && self.hi_closed))
    }

    pub fn closure_contains(&self, x: f64) -> bool {
        !self.is_empty() && self.lo <= x && x <= self.hi
    }

    pub fn distance_to_closure(&self, x: f64) -> f64 {
        if self.is_empty() {
            return f64::INFINITY;
        }
        (self.lo - x).max(x - self.hi).max(0.0)
    }

    /// Largest distance from `x` to a point of the closure.
    pub fn farthest_distance(&self, x: f64) -> f64 {
        (x - self.lo).abs().max((self.hi - x).abs())
    }

    /// Order by left endpoint (closed before open), then by right endpoint.
    pub fn cmp_position(&self, other: &Interval) -> Ordering {
        self.lo
            .total_cmp(&other.lo)
            .then_with(|| other.lo_closed.cmp(&self.lo_closed))
            .then_with(|| self.hi.total_cmp(&other.hi))
            .then_with(|| self.hi_closed.cmp(&other.hi_closed))
    }

    /// True when `self` lies entirely to the left of `other` and they share
    /// the boundary point with exactly one of them containing it.
    pub fn abuts(&self, other: &Interval) -> bool {
        self.hi == other.lo && self.hi_closed != other.lo_closed
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{},{}{r}", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intersect_examples() {
        assert_eq!(
            Interval::closed_open(0.0, 0.5).intersect(&Interval::open_closed(0.25, 1.0)),
            Interval::open(0.25, 0.5)
        );
        assert!(Interval::closed_open(0.0, 0.3)
            .intersect(&Interval::closed(0.5, 1.0))
            .is_empty());
        assert_eq!(
            Interval::closed(0.0, 0.5).intersect(&Interval::closed(0.5, 1.0)),
            Interval::point(0.5)
        );
    }

    #[test]
    fn subtract_examples() {
        assert_eq!(
            Interval::unit().subtract(&Interval::open(0.2, 0.6)),
            vec![Interval::closed(0.0, 0.2), Interval::closed(0.6, 1.0)]
        );
        assert_eq!(
            Interval::closed_open(0.0, 0.5).subtract(&Interval::closed(0.4, 0.8)),
            vec![Interval::closed_open(0.0, 0.4)]
        );
        assert_eq!(
            Interval::unit().subtract(&Interval::unit()),
            Vec::<Interval>::new()
        );
    }

    #[test]
    fn empty_is_canonical() {
        assert_eq!(Interval::open(0.3, 0.3), Interval::EMPTY);
        assert_eq!(Interval::closed(0.7, 0.2), Interval::EMPTY);
        assert!(Interval::point(0.3).is_degenerate());
    }

    #[test]
    fn containment_respects_flags() {
        let c = Interval::closed_open(0.0, 0.5);
        assert!(c.contains(&Interval::open(0.0, 0.5)));
        assert!(!c.contains(&Interval::closed(0.0, 0.5)));
        assert!(!c.contains_point(0.5));
        assert!(c.closure_contains(0.5));
    }
}
