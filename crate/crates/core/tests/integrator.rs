mod common;

use common::*;
use gauge_core::fixtures;
use gauge_core::integrator::{
    integrate_char, integrate_monotone_limit, integrate_over_partition, lower_upper,
    subpartition_defect, MonotoneOptions,
};
use gauge_core::{
    cousin_partition, integrate, Crescent, Execution, Gauge, IntegrateOptions, Integrand, Interval,
    Measure, Point, Status, SubdivisionPolicy,
};
use rand::Rng;

fn run(f: &Integrand, m: &Measure, eps: f64) -> gauge_core::IntegrationResult {
    integrate(f, m, &m.whole_space(), eps, &IntegrateOptions::default()).unwrap()
}

fn sin3() -> Integrand {
    Integrand::real("sin3x", |x| (3.0 * x).sin()).with_exact((1.0 - 3f64.cos()) / 3.0)
}

#[test]
fn lebesgue_agreement_on_smooth_fixtures() {
    for f in [fixtures::linear(), fixtures::square(), sin3()] {
        let r = run(&f, &Measure::Lebesgue, 1e-7);
        assert!(r.converged(), "{}", f.name());
        assert!((r.value - f.exact().unwrap()).abs() < 1e-7, "{}: {}", f.name(), r.value);
        assert!(r.levels.last().unwrap().spread < 1e-7);
    }
}

#[test]
fn linearity() {
    let (f1, f2) = (fixtures::square(), sin3());
    let (a, b) = (2.0, -1.5);
    let eps = 1e-6;
    let combo = run(&Integrand::linear_combination(a, &f1, b, &f2), &Measure::Lebesgue, eps);
    let i1 = run(&f1, &Measure::Lebesgue, eps).value;
    let i2 = run(&f2, &Measure::Lebesgue, eps).value;
    let tol = eps + a.abs() * eps + b.abs() * eps;
    assert!((combo.value - a * i1 - b * i2).abs() <= tol);
}

#[test]
fn positivity() {
    let fs = [
        fixtures::square(),
        Integrand::real("abs-sin", |x| (10.0 * x).sin().abs()),
        fixtures::char_interval(Interval::closed(0.2, 0.21)),
    ];
    for f in fs {
        let eps = 1e-4;
        let r = run(&f, &Measure::Lebesgue, eps);
        assert!(r.value >= -eps, "{}: {}", f.name(), r.value);
    }
}

#[test]
fn lower_upper_gap_shrinks_with_the_gauge() {
    let f = Integrand::real("wave", |x| x * x + (7.0 * x).sin());
    let mut prev = f64::INFINITY;
    for k in 2..10 {
        let g = Gauge::constant((-(k as f64)).exp2());
        let b = lower_upper(&f, &Measure::Lebesgue, &g, 4, &SubdivisionPolicy::default()).unwrap();
        let gap = b.upper - b.lower;
        assert!(gap >= 0.0);
        assert!(gap <= prev + 1e-12, "gap {gap} grew from {prev} at level {k}");
        prev = gap;
    }
    assert!(prev < 0.05);
}

#[test]
fn stieltjes_cantor_and_box_backends() {
    let x = fixtures::linear();
    let r = run(&x, &stieltjes(), 1e-5);
    let exact = 0.7 * 2.0 / 3.0 + 0.2 * 0.25 + 0.1 * 0.5;
    assert!((r.value - exact).abs() < 1e-5, "{}", r.value);

    for p0 in [0.25, 0.5, 0.75] {
        let r = run(&fixtures::coding_map(), &Measure::cantor_ifs(p0).unwrap(), 1e-4);
        assert!(r.converged());
        assert!((r.value - (1.0 - p0)).abs() < 1e-4, "p0={p0}: {}", r.value);
    }

    let xy = Integrand::new("xy", |p| match p {
        Point::Vector(v) => v[0] * v[1],
        _ => f64::NAN,
    });
    let m = Measure::lebesgue_box(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
    let r = run(&xy, &m, 1e-6);
    assert!((r.value - 0.25).abs() < 1e-6, "{}", r.value);
}

#[test]
fn characteristic_functions_and_null_sets() {
    let e = [
        Crescent::Interval(Interval::closed(0.1, 0.3)),
        Crescent::Interval(Interval::open(0.5, 0.55)),
    ];
    let r = integrate_char(&e, &Measure::Lebesgue, 1e-3, &IntegrateOptions::default()).unwrap();
    assert!((r.value - 0.25).abs() < 1e-3, "{}", r.value);

    let f = fixtures::dirichlet(100).unwrap();
    let r = run(&f, &Measure::Lebesgue, 1e-2);
    assert!(r.value.abs() < 1e-2);
}

#[test]
fn additivity_over_random_partitions() {
    let mut r = rng(7);
    let opts = IntegrateOptions::default();
    for trial in 0..10 {
        let p = interval_partition(&mut r, 6);
        for f in [fixtures::linear(), fixtures::square()] {
            let rep = integrate_over_partition(&f, &Measure::Lebesgue, &p, 1e-5, &opts).unwrap();
            assert!(rep.agrees, "trial {trial} {}: {} vs {}", f.name(), rep.whole.value, rep.combined);
            assert!((rep.combined - f.exact().unwrap()).abs() <= rep.tolerance);
        }
    }
}

#[test]
fn saks_henstock_defect() {
    let f = fixtures::square();
    let eps = 1e-5;
    let res = run(&f, &Measure::Lebesgue, eps);
    let gauge = res.gauge.clone().unwrap();
    let mut r = rng(11);
    for seed in 0..20 {
        let tp = cousin_partition(&unit(), &gauge, &SubdivisionPolicy::randomized(seed)).unwrap();
        let sub: Vec<_> = tp.cells().iter().filter(|_| r.random_bool(0.5)).cloned().collect();
        let reference: f64 = sub
            .iter()
            .map(|c| {
                let i = c.cell.as_interval().unwrap();
                (i.hi.powi(3) - i.lo.powi(3)) / 3.0
            })
            .sum();
        let d = subpartition_defect(&f, &Measure::Lebesgue, &sub, reference).unwrap();
        assert!(d <= 1.1 * eps, "defect {d}");
    }
}

#[test]
fn monotone_limits() {
    let opts = MonotoneOptions::on_unit_interval();
    let r = integrate_monotone_limit(&|n| fixtures::inv_sqrt_truncated(n as f64), &Measure::Lebesgue, 1e-3, &opts)
        .unwrap();
    assert_eq!(r.status, Status::Converged);
    assert!((r.value - 2.0).abs() < 1e-3, "{}", r.value);

    let r = integrate_monotone_limit(&|n| fixtures::inv_x_truncated(n as f64), &Measure::Lebesgue, 1e-3, &opts)
        .unwrap();
    assert_eq!(r.status, Status::BudgetExhausted);
}

#[test]
fn execution_modes_agree() {
    let f = fixtures::square();
    let seq = IntegrateOptions::default().with_execution(Execution::Sequential).with_seed(3);
    let par = IntegrateOptions::default().with_execution(Execution::Parallel).with_seed(3);
    let a = integrate(&f, &Measure::Lebesgue, &unit(), 1e-6, &seq).unwrap();
    let b = integrate(&f, &Measure::Lebesgue, &unit(), 1e-6, &par).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.levels, b.levels);
}
