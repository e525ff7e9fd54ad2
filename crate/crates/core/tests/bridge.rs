mod common;

use common::*;
use gauge_core::bridge::{
    cylinder_to_dyadic, g_map, preimages, pullback_gauge, pullback_radius, transfer_integrate,
};
use gauge_core::{
    cousin_partition, fixtures, integrate, CantorPoint, Crescent, Gauge, IntegrateOptions, Integrand,
    Measure, Point, SubdivisionPolicy, TaggedCell, Word,
};
use proptest::prelude::*;
use rand::Rng;

fn random_gauge(r: &mut rand_chacha::ChaCha8Rng) -> Gauge {
    let lo = r.random_range(0.005..0.1);
    let amp = r.random_range(0.0..0.3);
    let freq = r.random_range(1.0..20.0);
    let phase = r.random_range(0.0..6.0);
    Gauge::from_fn(move |p| match p {
        Point::Real(x) => lo + amp * (freq * x + phase).sin().abs(),
        _ => f64::NAN,
    })
}

#[test]
fn fair_coin_cylinders_have_dyadic_lengths() {
    let m = Measure::cantor_ifs(0.5).unwrap();
    let mut words = vec![Word::EMPTY];
    for depth in 0..=20 {
        let mut r = rng(depth);
        for &w in &words {
            let mu = m.measure_of(&Crescent::cylinder(w)).unwrap();
            let leb = Measure::Lebesgue.measure_of(&cylinder_to_dyadic(w)).unwrap();
            assert_eq!(mu, leb, "{w}");
            assert_eq!(leb, (-(depth as f64)).exp2());
        }
        words = if depth < 10 {
            words.iter().flat_map(|w| [w.push(false).unwrap(), w.push(true).unwrap()]).collect()
        } else {
            (0..1024)
                .map(|_| words[r.random_range(0..words.len())].push(r.random()).unwrap())
                .collect()
        };
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pulled_back_partitions_are_fine_on_the_interval(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gamma = random_gauge(&mut r);
        let tp = cousin_partition(&cantor(), &pullback_gauge(&gamma), &SubdivisionPolicy::randomized(seed)).unwrap();
        let mut covered = 0.0;
        for c in tp.cells() {
            let Point::Cantor(x) = &c.tag else { unreachable!() };
            for &w in c.cell.as_cantor().unwrap().words() {
                let image = cylinder_to_dyadic(w);
                covered += Measure::Lebesgue.measure_of(&image).unwrap();
                if x.in_cylinder(w) {
                    let cell = TaggedCell::new(image, Point::Real(g_map(x)));
                    prop_assert!(cell.is_fine(&gamma).unwrap(), "{w} tagged at {x}");
                }
            }
        }
        prop_assert_eq!(covered, 1.0);
    }

    #[test]
    fn pullback_is_monotone_in_the_gauge(seed in any::<u64>(), shrink in 0.05f64..1.0) {
        let mut r = rng(seed);
        let g1 = random_gauge(&mut r);
        let inner = g1.clone();
        let g2 = Gauge::from_fn(move |p| shrink * inner.eval(p));
        for _ in 0..32 {
            let x = cantor_point(&mut r);
            prop_assert!(pullback_radius(&g2, &x).unwrap() <= pullback_radius(&g1, &x).unwrap());
        }
    }

    #[test]
    fn coding_map_is_injective_off_the_identified_set(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = cantor_point(&mut r);
        let y = CantorPoint::new(word(&mut r, 10), r.random());
        if g_map(&x) == g_map(&y) && x != y {
            let n = x.first_difference(&y).unwrap();
            let (a, b) = if x.bit(n) { (&y, &x) } else { (&x, &y) };
            for k in n + 1..n + 70 {
                prop_assert!(a.bit(k) && !b.bit(k), "{x} and {y} collide outside A");
            }
        }
    }

    #[test]
    fn dyadic_points_have_two_preimages(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = word(&mut r, 20).push(true).unwrap();
        let y = w.dyadic().0;
        let pre = preimages(y).unwrap();
        prop_assert_eq!(pre.len(), 2);
        prop_assert!(pre[0] != pre[1]);
        for x in &pre {
            prop_assert_eq!(g_map(x), y);
        }
        let parent = w.len() - 1;
        let base = CantorPoint::new(w, false).word(parent).unwrap();
        for p0 in [0.5, r.random_range(0.0..=1.0)] {
            let m = Measure::cantor_ifs(p0).unwrap();
            let mu = |w: Word| m.measure_of(&Crescent::cylinder(w)).unwrap();
            let halves = mu(base.push(false).unwrap()) + mu(base.push(true).unwrap());
            if p0 == 0.5 {
                prop_assert_eq!(halves, mu(base));
            } else {
                prop_assert!((halves - mu(base)).abs() <= 1e-15 * mu(base).max(1e-300));
            }
        }
    }
}

#[test]
fn identified_pairs_meet_at_dyadic_points() {
    let a = CantorPoint::new(Word::parse("1").unwrap(), false);
    let b = CantorPoint::new(Word::parse("0").unwrap(), true);
    assert_eq!(g_map(&a), 0.5);
    assert_eq!(g_map(&b), 0.5);
    let pre = preimages(0.5).unwrap();
    assert!(pre.contains(&a) && pre.contains(&b));
    assert_eq!(preimages(0.0).unwrap(), vec![CantorPoint::zeros()]);
    assert_eq!(preimages(1.0).unwrap(), vec![CantorPoint::ones()]);
}

#[test]
fn transfer_agrees_with_lebesgue_on_continuous_fixtures() {
    let eps = 1e-4;
    let opts = IntegrateOptions::default();
    let fs = [
        fixtures::linear(),
        fixtures::square(),
        Integrand::real("cos2x", |x| (2.0 * x).cos()),
        Integrand::real("one", |_| 1.0),
    ];
    for f in fs {
        let t = transfer_integrate(&f, 0.5, eps, &opts).unwrap();
        let l = integrate(&f, &Measure::Lebesgue, &unit(), eps, &opts).unwrap();
        assert!(t.converged(), "{}", f.name());
        assert!((t.value - l.value).abs() <= 2.0 * eps, "{}: {} vs {}", f.name(), t.value, l.value);
    }
    let t = transfer_integrate(&Integrand::real("one", |_| 1.0), 0.3, eps, &opts).unwrap();
    assert!((t.value - 1.0).abs() <= eps);
}
