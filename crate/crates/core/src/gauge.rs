//! Gauges: strictly positive radius functions that control cell size.

use std::fmt;
use std::sync::Arc;

use crate::space::Point;
use crate::{Error, Result};

/// How a gauge was built, kept for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeKind {
    Constant,
    Callback,
    NullSet,
    CharSet,
    Pullback,
    Min,
    Glued,
    Relaxed,
}

impl GaugeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GaugeKind::Constant => "constant",
            GaugeKind::Callback => "callback",
            GaugeKind::NullSet => "null-set",
            GaugeKind::CharSet => "char-set",
            GaugeKind::Pullback => "pullback",
            GaugeKind::Min => "min",
            GaugeKind::Glued => "glued",
            GaugeKind::Relaxed => "relaxed",
        }
    }
}

type Eval = dyn Fn(&Point) -> f64 + Send + Sync;

/// A cheaply clonable gauge `γ: X → (0, ∞)`.
#[derive(Clone)]
pub struct Gauge {
    eval: Arc<Eval>,
    kind: GaugeKind,
    label: Arc<str>,
}

impl Gauge {
    pub fn constant(r: f64) -> Gauge {
        Gauge {
            eval: Arc::new(move |_| r),
            kind: GaugeKind::Constant,
            label: format!("constant({r})").into(),
        }
    }

    pub fn from_fn(f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Gauge {
        Gauge::with_kind(GaugeKind::Callback, "callback", f)
    }

    pub fn with_kind(
        kind: GaugeKind,
        label: impl Into<String>,
        f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    ) -> Gauge {
        Gauge {
            eval: Arc::new(f),
            kind,
            label: label.into().into(),
        }
    }

    /// Pointwise minimum.
    pub fn min(&self, other: &Gauge) -> Gauge {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Gauge {
            eval: Arc::new(move |p| a(p).min(b(p))),
            kind: GaugeKind::Min,
            label: format!("min({}, {})", self.label, other.label).into(),
        }
    }

    pub fn eval(&self, p: &Point) -> f64 {
        (self.eval)(p)
    }

    /// The radius at `p`, or an error if it is not strictly positive.
    pub fn radius(&self, p: &Point) -> Result<f64> {
        let r = self.eval(p);
        if r > 0.0 {
            Ok(r)
        } else {
            Err(Error::NonPositiveGauge {
                point: p.to_string(),
                value: r,
            })
        }
    }

    pub fn kind(&self) -> GaugeKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Gauge {
        self.label = label.into().into();
        self
    }
}

impl fmt::Debug for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Gauge")
            .field("kind", &self.kind)
            .field("label", &self.label)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_is_pointwise() {
        let g = Gauge::constant(0.3).min(&Gauge::from_fn(|p| p.real().unwrap()));
        assert_eq!(g.eval(&Point::Real(0.1)), 0.1);
        assert_eq!(g.eval(&Point::Real(0.9)), 0.3);
        assert_eq!(g.kind(), GaugeKind::Min);
    }

    #[test]
    fn zero_radius_is_an_error() {
        let g = Gauge::from_fn(|p| p.real().unwrap());
        assert!(matches!(
            g.radius(&Point::Real(0.0)),
            Err(Error::NonPositiveGauge { .. })
        ));
    }
}
