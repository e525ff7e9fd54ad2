use std::fmt;

use serde::{Deserialize, Serialize};

use super::Interval;

/// An axis-aligned box, the product of one [`Interval`] per axis.
///
/// A box with any empty axis is empty; empty boxes are normalised so that
/// every axis is [`Interval::EMPTY`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCell {
    pub axes: Vec<Interval>,
}

impl BoxCell {
    pub fn new(axes: Vec<Interval>) -> BoxCell {
        if axes.iter().any(Interval::is_empty) {
            BoxCell::empty(axes.len())
        } else {
            BoxCell { axes }
        }
    }

    pub fn empty(dim: usize) -> BoxCell {
        BoxCell {
            axes: vec![Interval::EMPTY; dim],
        }
    }

    pub fn closed(bounds: &[(f64, f64)]) -> BoxCell {
        BoxCell::new(bounds.iter().map(|&(a, b)| Interval::closed(a, b)).collect())
    }

    pub fn unit(dim: usize) -> BoxCell {
        BoxCell::new(vec![Interval::unit(); dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty() || self.axes.iter().any(Interval::is_empty)
    }

    pub fn volume(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.axes.iter().map(Interval::length).product()
        }
    }

    pub fn diameter(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.axes.iter().map(|a| a.length().powi(2)).sum::<f64>().sqrt()
        }
    }

    pub fn center(&self) -> Vec<f64> {
        self.axes.iter().map(Interval::midpoint).collect()
    }

    pub fn closure(&self) -> BoxCell {
        BoxCell::new(self.axes.iter().map(Interval::closure).collect())
    }

    pub fn intersect(&self, other: &BoxCell) -> BoxCell {
        BoxCell::new(
            self.axes
                .iter()
                .zip(&other.axes)
                .map(|(a, b)| a.intersect(b))
                .collect(),
        )
    }

    /// `self \ other` as disjoint boxes via the axis-by-axis decomposition:
    /// piece `i` agrees with the overlap on axes `< i`, lies outside `other`
    /// on axis `i`, and is unrestricted on axes `> i`.
    pub fn subtract(&self, other: &BoxCell) -> Vec<BoxCell> {
        if self.is_empty() {
            return Vec::new();
        }
        let overlap = self.intersect(other);
        if overlap.is_empty() {
            return vec![self.clone()];
        }
        let mut out = Vec::new();
        for i in 0..self.dim() {
            for piece in self.axes[i].subtract(&other.axes[i]) {
                let mut axes = Vec::with_capacity(self.dim());
                axes.extend_from_slice(&overlap.axes[..i]);
                axes.push(piece);
                axes.extend_from_slice(&self.axes[i + 1..]);
                out.push(BoxCell::new(axes));
            }
        }
        out.retain(|b| !b.is_empty());
        out
    }

    pub fn contains(&self, other: &BoxCell) -> bool {
        other.is_empty()
            || (!self.is_empty() && self.axes.iter().zip(&other.axes).all(|(a, b)| a.contains(b)))
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        !self.is_empty() && self.axes.iter().zip(x).all(|(a, &v)| a.contains_point(v))
    }

    pub fn closure_contains(&self, x: &[f64]) -> bool {
        !self.is_empty() && self.axes.iter().zip(x).all(|(a, &v)| a.closure_contains(v))
    }

    pub fn distance_to_closure(&self, x: &[f64]) -> f64 {
        if self.is_empty() {
            return f64::INFINITY;
        }
        self.axes
            .iter()
            .zip(x)
            .map(|(a, &v)| a.distance_to_closure(v).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn farthest_distance(&self, x: &[f64]) -> f64 {
        self.axes
            .iter()
            .zip(x)
            .map(|(a, &v)| a.farthest_distance(v).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Display for BoxCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        for (i, a) in self.axes.iter().enumerate() {
            if i > 0 {
                write!(f, "×")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}
