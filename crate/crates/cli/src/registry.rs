//! Builtin integrands and expression-defined integrands.

use gauge_core::bridge::g_map;
use gauge_core::{fixtures, Crescent, Integrand, Interval, Point, SpaceDescriptor};

use crate::expr::{self, Expr};
use crate::CliError;

/// Names accepted by [`resolve`], with parameters shown as placeholders.
pub const BUILTINS: [&str; 7] = [
    "linear",
    "square",
    "hk-oscillatory",
    "char-interval(a,b)",
    "dirichlet-N",
    "inv-sqrt",
    "coding-map",
];

/// How a resolved integrand is integrated.
pub enum Job {
    /// Through the ε-gauge driver.
    Plain(Integrand),
    /// As the monotone limit of the truncations `min(f, n)`.
    Monotone {
        integrand: Integrand,
        family: fn(f64) -> Integrand,
    },
    /// As a characteristic function, with the gauge built from the set.
    Characteristic { integrand: Integrand, set: Vec<Crescent> },
}

impl Job {
    pub fn integrand(&self) -> &Integrand {
        match self {
            Job::Plain(f) => f,
            Job::Monotone { integrand, .. } | Job::Characteristic { integrand, .. } => integrand,
        }
    }
}

/// Resolves a builtin name or an arithmetic expression on `space`.
pub fn resolve(spec: &str, space: &SpaceDescriptor) -> Result<Job, CliError> {
    let spec = spec.trim();
    let needs_interval = |job: Job| match space {
        SpaceDescriptor::Interval { .. } => Ok(job),
        _ => Err(CliError::Config(format!(
            "builtin {spec} is defined on the interval, not on a {} space",
            space.kind()
        ))),
    };
    match spec {
        "linear" => return needs_interval(Job::Plain(fixtures::linear())),
        "square" => return needs_interval(Job::Plain(fixtures::square())),
        "hk-oscillatory" => return needs_interval(Job::Plain(fixtures::hk_oscillatory())),
        "inv-sqrt" => {
            return needs_interval(Job::Monotone {
                integrand: fixtures::inv_sqrt(),
                family: fixtures::inv_sqrt_truncated,
            })
        }
        "coding-map" => {
            return match space {
                SpaceDescriptor::Cantor => Ok(Job::Plain(fixtures::coding_map())),
                _ => Err(CliError::Config("coding-map is defined on the cantor space".into())),
            }
        }
        _ => {}
    }
    if let Some(n) = spec.strip_prefix("dirichlet-") {
        let n: usize = n
            .parse()
            .map_err(|_| CliError::Config(format!("dirichlet-N needs an integer N, got '{spec}'")))?;
        return needs_interval(Job::Plain(fixtures::dirichlet(n)?));
    }
    if let Some(args) = spec.strip_prefix("char-interval(").and_then(|s| s.strip_suffix(')')) {
        let bounds: Vec<f64> = args
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Config(format!("char-interval(a,b) needs two numbers, got '{spec}'")))?;
        let [a, b] = bounds[..] else {
            return Err(CliError::Config(format!("char-interval(a,b) needs two numbers, got '{spec}'")));
        };
        if !(0.0 <= a && a <= b && b <= 1.0) {
            return Err(CliError::Config(format!("char-interval needs 0 <= a <= b <= 1, got {a}, {b}")));
        }
        let i = Interval::closed(a, b);
        return needs_interval(Job::Characteristic {
            integrand: fixtures::char_interval(i),
            set: vec![Crescent::Interval(i)],
        });
    }
    let allowed = variables(space);
    let parsed = expr::parse(spec);
    let is_expression = matches!(&parsed, Ok(e) if e.variables().iter().all(|v| allowed.contains(v)));
    let looks_like_name = spec.starts_with(|c: char| c.is_ascii_alphabetic())
        && spec.chars().all(|c| c.is_ascii_alphanumeric() || "-_(),. ".contains(c));
    match parsed {
        Ok(e) if is_expression => Ok(Job::Plain(from_expression(e, space)?)),
        _ if looks_like_name => Err(CliError::Config(format!(
            "unknown builtin integrand '{spec}'; available: {}",
            BUILTINS.join(", ")
        ))),
        Ok(e) => Ok(Job::Plain(from_expression(e, space)?)),
        Err(e) => Err(CliError::Config(format!("cannot parse integrand '{spec}': {e}"))),
    }
}

/// Variables available on a space. Boxes use `x1..xd`, with `x, y, z` as
/// aliases in up to three dimensions. On the Cantor space `x` is `g(x)`.
pub fn variables(space: &SpaceDescriptor) -> Vec<String> {
    match space {
        SpaceDescriptor::Interval { .. } | SpaceDescriptor::Cantor => vec!["x".into()],
        SpaceDescriptor::Box { bounds, .. } => {
            let mut v: Vec<String> = (1..=bounds.len()).map(|i| format!("x{i}")).collect();
            if bounds.len() <= 3 {
                v.extend(["x", "y", "z"].iter().take(bounds.len()).map(|s| s.to_string()));
            }
            v
        }
    }
}

fn coordinate(name: &str) -> Option<usize> {
    match name {
        "x" => Some(0),
        "y" => Some(1),
        "z" => Some(2),
        _ => name.strip_prefix('x')?.parse::<usize>().ok()?.checked_sub(1),
    }
}

/// Sample points where an expression must evaluate to a finite number:
/// the corners, all dyadics of depth at most 10, and a golden-ratio sweep,
/// on every axis.
fn samples_1d(lo: f64, hi: f64) -> Vec<f64> {
    let mut t: Vec<f64> = (0..=1024).map(|k| k as f64 / 1024.0).collect();
    t.extend((1..256).map(|k| (k as f64 * 0.618_033_988_749_894_8).fract()));
    t.into_iter().map(|s| lo + (hi - lo) * s).collect()
}

fn point_class(v: f64, lo: f64, hi: f64) -> &'static str {
    if v == lo || v == hi {
        "domain endpoint"
    } else {
        "interior point"
    }
}

/// Checks that `e` only uses the space's variables and is finite on the
/// sample grid, then wraps it as an integrand.
pub fn from_expression(e: Expr, space: &SpaceDescriptor) -> Result<Integrand, CliError> {
    let allowed = variables(space);
    if let Some(v) = e.variables().into_iter().find(|v| !allowed.contains(v)) {
        return Err(CliError::Config(format!(
            "unknown variable '{v}' on a {} space; available: {}",
            space.kind(),
            allowed.join(", ")
        )));
    }
    let bounds: Vec<(f64, f64)> = match space {
        SpaceDescriptor::Box { bounds, .. } => bounds.clone(),
        _ => vec![(0.0, 1.0)],
    };
    let axes: Vec<Vec<f64>> = bounds.iter().map(|&(a, b)| samples_1d(a, b)).collect();
    let mut guards: Vec<Vec<f64>> = vec![Vec::new(); bounds.len()];
    for (v, at) in e.guard_points() {
        if let Some(i) = coordinate(&v).filter(|&i| i < bounds.len()) {
            guards[i].push(at);
        }
    }
    let d = bounds.len();
    let centre: Vec<f64> = bounds.iter().map(|&(a, b)| 0.5 * (a + b)).collect();
    let mut probes: Vec<Vec<f64>> = Vec::new();
    for (i, axis) in axes.iter().enumerate() {
        for &t in axis.iter().chain(&guards[i]) {
            let mut p = centre.clone();
            p[i] = t;
            probes.push(p);
        }
    }
    if d > 1 {
        for k in 0..axes[0].len() {
            probes.push(axes.iter().map(|a| a[k]).collect());
        }
        for corner in 0..(1usize << d.min(10)) {
            probes.push((0..d).map(|i| if corner >> i & 1 == 1 { bounds[i].1 } else { bounds[i].0 }).collect());
        }
    }
    for p in &probes {
        let lookup = |name: &str| coordinate(name).map_or(f64::NAN, |i| p[i]);
        if !e.eval(&lookup).is_finite() {
            let what = e.first_fault(&lookup).unwrap_or("a non-finite value");
            let at: Vec<String> = p
                .iter()
                .zip(&bounds)
                .map(|(&v, &(a, b))| format!("{v} ({})", point_class(v, a, b)))
                .collect();
            return Err(CliError::Config(format!(
                "integrand '{e}' is not finite: {what} at {}; patch the point with 'if x == a then v else ...'",
                at.join(", ")
            )));
        }
    }
    let name = e.to_string();
    Ok(Integrand::new(name, move |p| match p {
        Point::Real(x) => e.eval(&|_| *x),
        Point::Cantor(c) => {
            let x = g_map(c);
            e.eval(&|_| x)
        }
        Point::Vector(v) => e.eval(&|name| coordinate(name).and_then(|i| v.get(i).copied()).unwrap_or(f64::NAN)),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> SpaceDescriptor {
        SpaceDescriptor::unit_interval()
    }

    #[test]
    fn builtins_resolve() {
        for name in ["linear", "square", "hk-oscillatory", "inv-sqrt", "dirichlet-10", "char-interval(0.2, 0.5)"] {
            assert!(resolve(name, &unit()).is_ok(), "{name}");
        }
        assert!(resolve("coding-map", &SpaceDescriptor::Cantor).is_ok());
        assert!(resolve("coding-map", &unit()).is_err());
        assert!(resolve("square", &SpaceDescriptor::Cantor).is_err());
    }

    #[test]
    fn unknown_names_list_the_registry() {
        for name in ["cubic", "hk-oscilatory", "dirichlet-x"] {
            let Err(CliError::Config(msg)) = resolve(name, &unit()) else { panic!("{name} resolved") };
            assert!(msg.contains("available") || msg.contains("integer"), "{msg}");
        }
    }

    #[test]
    fn unguarded_singularities_are_rejected() {
        let Err(CliError::Config(msg)) = resolve("1/x", &unit()) else { panic!() };
        assert!(msg.contains("division by zero") && msg.contains("domain endpoint"), "{msg}");
        assert!(resolve("if x == 0 then 0 else (1/x)*sin(1/x^3)", &unit()).is_ok());
        assert!(resolve("log(x - 0.5)", &unit()).is_err());
        assert!(resolve("y", &unit()).is_err());
    }

    #[test]
    fn box_expressions_use_coordinates() {
        let sq = SpaceDescriptor::unit_cube(2);
        let Job::Plain(f) = resolve("x1 * y", &sq).unwrap() else { panic!() };
        assert_eq!(f.eval(&Point::Vector(vec![0.5, 0.25])), 0.125);
        assert!(resolve("x3", &sq).is_err());
    }
}
