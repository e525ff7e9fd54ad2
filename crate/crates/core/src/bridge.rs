//! The coding map `g : {0,1}^ω → [0,1]`, `g(x) = Σ x_n / 2^(n+1)`, and the
//! transfer of gauge integrals from `[0,1]` to Cantor space.

use crate::gauge::{Gauge, GaugeKind};
use crate::integrator::{integrate, IntegrateOptions, Integrand, IntegrationResult};
use crate::measure::Measure;
use crate::space::{CantorPoint, Crescent, Interval, Point, Word};
use crate::{Error, Result};

/// Deepest cylinder the pullback construction inspects. The open ball of
/// radius `2^-n` is a cylinder of depth `n + 1`, which must still be a word.
pub const PULLBACK_MAX_DEPTH: usize = Word::MAX_LEN as usize - 1;

/// The binary coding map.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CodingMap;

impl CodingMap {
    pub fn apply(self, x: &CantorPoint) -> f64 {
        g_map(x)
    }

    pub fn preimages(self, y: f64) -> Result<Vec<CantorPoint>> {
        preimages(y)
    }

    pub fn image_of_cylinder(self, w: Word) -> Crescent {
        cylinder_to_dyadic(w)
    }
}

/// `g(x)` for an eventually constant `x`: the prefix read as a binary
/// fraction plus the geometric tail `2^-n` when the tail bit is 1.
pub fn g_map(x: &CantorPoint) -> f64 {
    let (k, len) = x.prefix().dyadic();
    if x.tail() {
        k + len
    } else {
        k
    }
}

/// All eventually constant preimages of a dyadic rational `y ∈ [0,1]`.
///
/// `0` and `1` have the single preimages `0̄` and `1̄`; every other dyadic
/// `k/2^n` with `k` odd has the identified pair `w1·0̄` and `w0·1̄`.
pub fn preimages(y: f64) -> Result<Vec<CantorPoint>> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::InvalidArgument(format!("{y} is outside [0,1]")));
    }
    if y == 0.0 {
        return Ok(vec![CantorPoint::zeros()]);
    }
    if y == 1.0 {
        return Ok(vec![CantorPoint::ones()]);
    }
    let mut bits = Vec::new();
    let mut r = y;
    while r != 0.0 {
        if bits.len() == Word::MAX_LEN as usize {
            return Err(Error::InvalidArgument(format!(
                "{y} is not a dyadic rational with at most {} binary digits",
                Word::MAX_LEN
            )));
        }
        r *= 2.0;
        let b = r >= 1.0;
        if b {
            r -= 1.0;
        }
        bits.push(b);
    }
    let w = Word::from_bits(&bits).expect("length checked above");
    Ok(vec![
        CantorPoint::new(w, false),
        CantorPoint::new(w.flip_last(), true),
    ])
}

/// `g[B_w] = [k/2^n, (k+1)/2^n]` with `n = |w|` and `k` the value of `w` in binary.
pub fn cylinder_to_dyadic(w: Word) -> Crescent {
    let (lo, len) = w.dyadic();
    Crescent::Interval(Interval::closed(lo, lo + len))
}

/// `γ′(x) = 2^-n` for the least `n` with `g[B_{x|n}] ⊆ ball(g(x), γ(g(x)))`.
pub fn pullback_radius(gamma: &Gauge, x: &CantorPoint) -> Result<f64> {
    let y = g_map(x);
    let r = gamma.radius(&Point::Real(y))?;
    let (mut lo, mut len) = (0.0, 1.0);
    for n in 0..=PULLBACK_MAX_DEPTH {
        if n > 0 {
            len *= 0.5;
            if x.bit(n - 1) {
                lo += len;
            }
        }
        if lo > y - r && lo + len < y + r {
            return Ok((-(n as f64)).exp2());
        }
    }
    Err(Error::PullbackDepthExceeded(format!(
        "no cylinder of depth ≤ {PULLBACK_MAX_DEPTH} around {x} maps into the ball of radius {r} at {y}"
    )))
}

/// The gauge `γ′` on Cantor space induced by a gauge `γ` on `[0,1]`.
///
/// Points where no cylinder up to [`PULLBACK_MAX_DEPTH`] qualifies evaluate
/// to 0, which makes the partitioner fail with a positive-gauge error.
pub fn pullback_gauge(gamma: &Gauge) -> Gauge {
    let inner = gamma.clone();
    Gauge::with_kind(GaugeKind::Pullback, format!("pullback({})", gamma.label()), move |p| match p {
        Point::Cantor(x) => pullback_radius(&inner, x).unwrap_or(0.0),
        _ => 0.0,
    })
}

/// `f ∘ g` as an integrand on Cantor space, with the pulled-back gauge
/// family when `f` carries one.
pub fn compose_with_coding(f: &Integrand) -> Integrand {
    let inner = f.clone();
    let h = Integrand::new(format!("{}∘g", f.name()), move |p| match p {
        Point::Cantor(x) => inner.eval(&Point::Real(g_map(x))),
        _ => f64::NAN,
    });
    let h = match f.exact() {
        Some(v) => h.with_exact(v),
        None => h,
    };
    if f.has_gauge_family() {
        let f = f.clone();
        h.with_gauge_family(move |eps| {
            pullback_gauge(&f.gauge_for(eps).expect("family present"))
        })
    } else {
        h
    }
}

/// Integrates `f ∘ g` over Cantor space against the IFS measure with weight `p0`.
pub fn transfer_integrate(
    f: &Integrand,
    p0: f64,
    eps: f64,
    opts: &IntegrateOptions,
) -> Result<IntegrationResult> {
    let m = Measure::cantor_ifs(p0)?;
    integrate(&compose_with_coding(f), &m, &m.whole_space(), eps, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(prefix: &str, tail: bool) -> CantorPoint {
        CantorPoint::new(Word::parse(prefix).unwrap(), tail)
    }

    #[test]
    fn coding_map_examples() {
        assert_eq!(g_map(&pt("1", false)), 0.5);
        assert_eq!(g_map(&pt("0", true)), 0.5);
        assert_eq!(g_map(&CantorPoint::zeros()), 0.0);
        assert_eq!(g_map(&CantorPoint::ones()), 1.0);
        assert_eq!(preimages(0.5).unwrap(), vec![pt("1", false), pt("0", true)]);
        assert_eq!(preimages(0.375).unwrap(), vec![pt("011", false), pt("010", true)]);
        assert_eq!(preimages(1.0).unwrap(), vec![CantorPoint::ones()]);
        let third = preimages(1.0 / 3.0).unwrap();
        assert_eq!(third.len(), 2);
        assert!(third.iter().all(|x| g_map(x) == 1.0 / 3.0));
        assert!(preimages(1e-30).is_err());
    }

    #[test]
    fn cylinder_images() {
        let img = |s: &str| cylinder_to_dyadic(Word::parse(s).unwrap());
        assert_eq!(img("01"), Crescent::Interval(Interval::closed(0.25, 0.5)));
        assert_eq!(img("1"), Crescent::Interval(Interval::closed(0.5, 1.0)));
        assert_eq!(img(""), Crescent::Interval(Interval::unit()));
    }

    #[test]
    fn pullback_examples() {
        let g = pullback_gauge(&Gauge::constant(0.5));
        assert_eq!(g.eval(&Point::Cantor(CantorPoint::zeros())), 0.25);
        let g = pullback_gauge(&Gauge::constant(2.0));
        assert_eq!(g.eval(&Point::Cantor(pt("0110", true))), 1.0);
        let tiny = Gauge::constant(1e-30);
        assert!(matches!(
            pullback_radius(&tiny, &pt("01", false)),
            Err(Error::PullbackDepthExceeded(_))
        ));
    }

    #[test]
    fn transfer_of_constant() {
        let one = Integrand::real("one", |_| 1.0);
        let r = transfer_integrate(&one, 0.5, 1e-6, &IntegrateOptions::default()).unwrap();
        assert!(r.converged());
        assert!((r.value - 1.0).abs() < 1e-12);
    }
}
