#![allow(dead_code)]

use gauge_core::measure::Stieltjes;
use gauge_core::{
    BoxCell, CantorPoint, Crescent, CylinderSet, Gauge, Interval, Measure, Partition, Point, Word,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit() -> Crescent {
    Crescent::Interval(Interval::unit())
}

pub fn cantor() -> Crescent {
    Crescent::Cantor(CylinderSet::whole())
}

pub fn square() -> Crescent {
    Crescent::Box(BoxCell::unit(2))
}

/// A point drawn from a coarse grid, so coincidences with cut points occur.
pub fn grid_point(r: &mut ChaCha8Rng) -> f64 {
    if r.random_bool(0.3) {
        r.random_range(0..=16) as f64 / 16.0
    } else {
        r.random::<f64>()
    }
}

pub fn interval(r: &mut ChaCha8Rng) -> Interval {
    let (a, b) = (grid_point(r), grid_point(r));
    Interval::new(a.min(b), a.max(b), r.random(), r.random())
}

pub fn word(r: &mut ChaCha8Rng, max_len: usize) -> Word {
    let n = r.random_range(0..=max_len);
    Word::from_bits(&(0..n).map(|_| r.random::<bool>()).collect::<Vec<_>>()).unwrap()
}

pub fn cylinder_set(r: &mut ChaCha8Rng) -> CylinderSet {
    let k = r.random_range(0..=4);
    CylinderSet::new((0..k).map(|_| word(r, 6)))
}

pub fn box_cell(r: &mut ChaCha8Rng) -> BoxCell {
    BoxCell::new((0..2).map(|_| interval(r)).collect())
}

/// A random crescent of the same backend as `like`.
pub fn crescent_like(like: &Crescent, r: &mut ChaCha8Rng) -> Crescent {
    match like {
        Crescent::Interval(_) => Crescent::Interval(interval(r)),
        Crescent::Box(_) => Crescent::Box(box_cell(r)),
        Crescent::Cantor(_) => Crescent::Cantor(cylinder_set(r)),
    }
}

/// A partition of `[0,1]` into at most `n` cells with random endpoint ownership.
pub fn interval_partition(r: &mut ChaCha8Rng, n: usize) -> Partition {
    let mut cuts: Vec<f64> = (1..n.max(1)).map(|_| grid_point(r)).collect();
    cuts.retain(|&c| c > 0.0 && c < 1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut cells = Vec::new();
    let (mut lo, mut lo_closed) = (0.0, true);
    for c in cuts {
        let right_owns = r.random::<bool>();
        if r.random_bool(0.1) {
            cells.push(Crescent::Interval(Interval::new(lo, c, lo_closed, false)));
            cells.push(Crescent::Interval(Interval::point(c)));
            lo_closed = false;
        } else {
            cells.push(Crescent::Interval(Interval::new(lo, c, lo_closed, !right_owns)));
            lo_closed = right_owns;
        }
        lo = c;
    }
    cells.push(Crescent::Interval(Interval::new(lo, 1.0, lo_closed, true)));
    Partition::new(unit(), cells).unwrap()
}

/// Leaves of a random binary splitting tree, with some leaves grouped into
/// multi-cylinder cells.
pub fn cantor_partition(r: &mut ChaCha8Rng, splits: usize) -> Partition {
    let mut leaves = vec![Word::EMPTY];
    for _ in 0..splits {
        let i = r.random_range(0..leaves.len());
        let w = leaves.swap_remove(i);
        if w.len() >= 12 {
            leaves.push(w);
            continue;
        }
        leaves.push(w.push(false).unwrap());
        leaves.push(w.push(true).unwrap());
    }
    let mut cells = Vec::new();
    while !leaves.is_empty() {
        let k = r.random_range(1..=leaves.len().min(3));
        let group: Vec<Word> = (0..k)
            .map(|_| leaves.swap_remove(r.random_range(0..leaves.len())))
            .collect();
        cells.push(Crescent::Cantor(CylinderSet::new(group)));
    }
    Partition::new(cantor(), cells).unwrap()
}

/// A partition of the unit square by recursive axis cuts.
pub fn box_partition(r: &mut ChaCha8Rng, splits: usize) -> Partition {
    let mut cells = vec![BoxCell::unit(2)];
    for _ in 0..splits {
        let i = r.random_range(0..cells.len());
        let b = cells.swap_remove(i);
        let axis = r.random_range(0..2);
        let a = b.axes[axis];
        let t = a.lo + (a.hi - a.lo) * r.random_range(0.2..0.8);
        let owns = r.random::<bool>();
        for piece in [
            Interval::new(a.lo, t, a.lo_closed, !owns),
            Interval::new(t, a.hi, owns, a.hi_closed),
        ] {
            let mut axes = b.axes.clone();
            axes[axis] = piece;
            cells.push(BoxCell::new(axes));
        }
    }
    Partition::new(square(), cells.into_iter().map(Crescent::Box).collect()).unwrap()
}

pub fn partition_of(whole: &Crescent, r: &mut ChaCha8Rng, size: usize) -> Partition {
    match whole {
        Crescent::Interval(_) => interval_partition(r, size),
        Crescent::Box(_) => box_partition(r, size),
        Crescent::Cantor(_) => cantor_partition(r, size),
    }
}

/// A continuous Stieltjes measure `F(t) = t²` with two atoms.
pub fn stieltjes() -> Measure {
    Measure::Stieltjes(
        Stieltjes::new("t^2+atoms", |t| t * t, vec![(0.25, 0.2), (0.5, 0.1)]).unwrap(),
    )
}

/// All measure backends paired with their whole space.
pub fn measures() -> Vec<Measure> {
    vec![
        Measure::Lebesgue,
        stieltjes(),
        Measure::pushforward(0.5).unwrap(),
        Measure::pushforward(0.3).unwrap(),
        Measure::cantor_ifs(0.25).unwrap(),
        Measure::cantor_ifs(0.5).unwrap(),
        Measure::lebesgue_box(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap(),
    ]
}

/// A smooth strictly positive gauge with values in `[lo, lo + amp]`.
pub fn wavy_gauge(lo: f64, amp: f64, freq: f64) -> Gauge {
    Gauge::from_fn(move |p| {
        let x = match p {
            Point::Real(x) => *x,
            Point::Vector(v) => v.iter().sum::<f64>(),
            Point::Cantor(c) => gauge_core::bridge::g_map(c),
        };
        lo + amp * (freq * x).sin().abs()
    })
}

pub fn cantor_point(r: &mut ChaCha8Rng) -> CantorPoint {
    CantorPoint::new(word(r, 10), r.random())
}

/// A random point of the closure of `c`.
pub fn point_in(c: &Crescent, r: &mut ChaCha8Rng) -> Point {
    match c {
        Crescent::Interval(i) => Point::Real(i.lo + (i.hi - i.lo) * r.random::<f64>()),
        Crescent::Box(b) => Point::Vector(
            b.axes
                .iter()
                .map(|a| a.lo + (a.hi - a.lo) * r.random::<f64>())
                .collect(),
        ),
        Crescent::Cantor(s) => {
            let w = s.words()[r.random_range(0..s.words().len())];
            let tail = word(r, 5);
            let bits: Vec<bool> = (0..w.len())
                .map(|i| w.bit(i))
                .chain((0..tail.len()).map(|i| tail.bit(i)))
                .collect();
            Point::Cantor(CantorPoint::new(Word::from_bits(&bits).unwrap(), r.random()))
        }
    }
}
