//! Named integrands with known integrals, shared by the test suites and the
//! command-line registry.

use crate::bridge::g_map;
use crate::dense;
use crate::gauge::{Gauge, GaugeKind};
use crate::integrator::{null_set_gauge, Integrand};
use crate::measure::Measure;
use crate::space::{Interval, Point};
use crate::Result;

/// `π/6 − Si(1)/3`, the integral of `sin(x⁻³)/x` over `[0,1]`.
pub const HK_OSCILLATORY_VALUE: f64 = 0.208_237_752_142_571_2;

pub fn linear() -> Integrand {
    Integrand::real("linear", |x| x).with_exact(0.5)
}

pub fn square() -> Integrand {
    Integrand::real("square", |x| x * x).with_exact(1.0 / 3.0)
}

fn hk_value(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (x.powi(-3)).sin() / x
    }
}

/// Radius of the cell tagged at 0: the omitted tail `∫₀^δ f` is bounded by `δ³/3`.
fn hk_origin_radius(eps: f64) -> f64 {
    0.9 * (0.75 * eps).cbrt()
}

/// Scale of the local gauge `κ·x⁴`, matched to the `x⁻⁸` growth of `f''`.
fn hk_kappa(eps: f64) -> f64 {
    (0.6 * eps.sqrt()).min(0.05)
}

/// The gauge family for [`hk_oscillatory`]: a ball of radius about
/// `(3ε/4)^(1/3)` at the origin and `min(x/2, κ·x⁴)` elsewhere.
pub fn hk_gauge(eps: f64) -> Gauge {
    let d0 = hk_origin_radius(eps);
    let kappa = hk_kappa(eps);
    Gauge::with_kind(GaugeKind::Callback, format!("hk(eps={eps:e})"), move |p| {
        let x = match p {
            Point::Real(x) => x.abs(),
            _ => return f64::NAN,
        };
        if x == 0.0 {
            d0
        } else {
            (0.5 * x).min(kappa * x.powi(4)).min(0.05)
        }
    })
}

/// `f(x) = sin(x⁻³)/x` with `f(0) = 0`: integrable in the gauge sense but not
/// absolutely integrable.
pub fn hk_oscillatory() -> Integrand {
    Integrand::real("hk-oscillatory", hk_value)
        .with_exact(HK_OSCILLATORY_VALUE)
        .with_gauge_family(hk_gauge)
}

/// The characteristic function of an interval.
///
/// Its gauge family is `d(x, {a, b})` away from the endpoints and `ε/8` at
/// them, with the endpoints as prescribed tags. A fine cell tagged away from
/// the endpoints misses both, so only the two endpoint cells contribute an
/// error, each below `ε/4`.
pub fn char_interval(i: Interval) -> Integrand {
    let ends: Vec<f64> = [i.lo, i.hi].into_iter().filter(|x| (0.0..=1.0).contains(x)).collect();
    let tags = ends.iter().map(|&x| Point::Real(x)).collect();
    Integrand::real(format!("char-interval({},{})", i.lo, i.hi), move |x| {
        if i.contains_point(x) {
            1.0
        } else {
            0.0
        }
    })
    .with_exact(i.intersect(&Interval::unit()).length())
    .with_tags(tags)
    .with_gauge_family(move |eps| {
        let ends = ends.clone();
        Gauge::with_kind(GaugeKind::Callback, format!("jump(eps={eps:e})"), move |p| {
            let Point::Real(x) = p else {
                return f64::NAN;
            };
            let d = ends.iter().map(|e| (x - e).abs()).fold(1.0, f64::min);
            if d == 0.0 {
                eps / 8.0
            } else {
                d
            }
        })
    })
}

/// The indicator of the first `n` rationals of `[0,1]` in Stern–Brocot order,
/// with the null-set gauge family.
pub fn dirichlet(n: usize) -> Result<Integrand> {
    let pts: Vec<f64> = dense::first_rationals(n);
    let lookup: std::collections::HashSet<u64> = pts.iter().map(|x| x.to_bits()).collect();
    let points: Vec<Point> = pts.iter().map(|&x| Point::Real(x)).collect();
    null_set_gauge(&points, 1.0, &Measure::Lebesgue)?;
    Ok(Integrand::real(format!("dirichlet-{n}"), move |x| {
        if lookup.contains(&(x + 0.0).to_bits()) {
            1.0
        } else {
            0.0
        }
    })
    .with_exact(0.0)
    .with_gauge_family(move |eps| {
        null_set_gauge(&points, eps, &Measure::Lebesgue).expect("validated at construction")
    }))
}

/// `min(x^(-1/2), n)`, with integral `2 − 1/n`.
pub fn inv_sqrt_truncated(n: f64) -> Integrand {
    let knee = n.powi(-2);
    Integrand::real(format!("inv-sqrt-min-{n}"), move |x| {
        if x <= knee {
            n
        } else {
            x.sqrt().recip()
        }
    })
    .with_exact(2.0 - 1.0 / n)
    .with_gauge_family(move |eps| {
        let kappa = eps.sqrt();
        Gauge::with_kind(GaugeKind::Callback, format!("inv-sqrt(eps={eps:e})"), move |p| match p {
            Point::Real(x) => (kappa * x.max(knee)).min(0.25),
            _ => f64::NAN,
        })
    })
}

/// `x^(-1/2)` with value 0 at the origin.
pub fn inv_sqrt() -> Integrand {
    Integrand::real("inv-sqrt", |x| if x > 0.0 { x.sqrt().recip() } else { 0.0 }).with_exact(2.0)
}

/// `min(1/x, n)`, whose integral `1 + ln n` diverges.
pub fn inv_x_truncated(n: f64) -> Integrand {
    let knee = n.recip();
    Integrand::real(format!("inv-x-min-{n}"), move |x| if x <= knee { n } else { x.recip() })
        .with_exact(1.0 + n.ln())
        .with_gauge_family(move |eps| {
            let kappa = eps.sqrt();
            Gauge::with_kind(GaugeKind::Callback, format!("inv-x(eps={eps:e})"), move |p| match p {
                Point::Real(x) => (kappa * x.max(knee)).min(0.25),
                _ => f64::NAN,
            })
        })
}

/// The coding map `g` as an integrand on Cantor space.
pub fn coding_map() -> Integrand {
    Integrand::new("coding-map", |p| match p {
        Point::Cantor(x) => g_map(x),
        _ => f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hk_gauge_is_positive() {
        let g = hk_gauge(1e-3);
        for x in [0.0, 1e-9, 0.1, 0.5, 1.0] {
            assert!(g.eval(&Point::Real(x)) > 0.0);
        }
        assert!((g.eval(&Point::Real(0.0)) - 0.9 * 0.75e-3f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn dirichlet_support() {
        let f = dirichlet(5).unwrap();
        assert_eq!(f.eval(&Point::Real(0.5)), 1.0);
        assert_eq!(f.eval(&Point::Real(0.3)), 0.0);
    }
}
