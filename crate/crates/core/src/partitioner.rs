//! Constructive fine partitions.
//!
//! [`cousin_partition`] bisects a crescent until every cell admits a tag for
//! which it is fine. Tag candidates are tried in a fixed order (centre, the
//! closure's extreme points, then low-discrepancy or random probes), so a
//! gauge that is tiny on a sparse set of points can always be escaped by
//! tagging off that set. [`common_refinement`], [`fine_partition_with_tags`]
//! and [`pg_join`] build refinements that keep prescribed tags.

use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense;
use crate::exec::{self, Execution};
use crate::gauge::Gauge;
use crate::partition::{Partition, TaggedCell, TaggedPartition};
use crate::space::{
    ball_depth, Basis, BoxCell, CantorPoint, Crescent, CylinderSet, Interval, Point, Word,
};
use crate::{Error, Result};

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const PARALLEL_DEPTH: u32 = 10;

/// Controls Cousin subdivision.
#[derive(Debug, Clone, PartialEq)]
pub struct SubdivisionPolicy {
    /// Depth cap; `None` selects 60 for interval and box cells, 48 for Cantor.
    pub max_depth: Option<u32>,
    /// Number of probe tags tried after the centre and extreme points.
    pub probes: usize,
    pub basis: Basis,
    pub seed: u64,
    /// Use random probes and jittered split points instead of the fixed ones.
    pub randomized: bool,
    pub execution: Execution,
    /// Upper bound on the number of cells in one partition.
    pub max_cells: usize,
}

impl Default for SubdivisionPolicy {
    fn default() -> Self {
        SubdivisionPolicy {
            max_depth: None,
            probes: 8,
            basis: Basis::AllEndpoints,
            seed: 0,
            randomized: false,
            execution: Execution::default(),
            max_cells: 1 << 24,
        }
    }
}

impl SubdivisionPolicy {
    pub fn randomized(seed: u64) -> Self {
        SubdivisionPolicy {
            seed,
            randomized: true,
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_basis(mut self, basis: Basis) -> Self {
        self.basis = basis;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_randomized(mut self, randomized: bool) -> Self {
        self.randomized = randomized;
        self
    }

    pub fn depth_limit(&self, c: &Crescent) -> u32 {
        self.max_depth.unwrap_or(match c {
            Crescent::Cantor(_) => 48,
            _ => 60,
        })
    }
}

/// SplitMix64 finaliser, used to derive independent per-cell streams.
pub(crate) fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

struct Subdivider<'a> {
    gauge: &'a Gauge,
    policy: &'a SubdivisionPolicy,
    max_depth: u32,
    cells: AtomicUsize,
}

impl Subdivider<'_> {
    fn rng(&self, path: u64) -> Option<ChaCha8Rng> {
        self.policy
            .randomized
            .then(|| ChaCha8Rng::seed_from_u64(mix(self.policy.seed, path)))
    }

    fn run(&self, cell: Crescent, depth: u32, path: u64, out: &mut Vec<TaggedCell>) -> Result<()> {
        let mut rng = self.rng(path);
        if let Some(tag) = self.find_tag(&cell, rng.as_mut())? {
            let n = self.cells.fetch_add(1, Ordering::Relaxed) + 1;
            if n > self.policy.max_cells {
                return Err(Error::CellBudgetExceeded(self.policy.max_cells));
            }
            out.push(TaggedCell::new(cell, tag));
            return Ok(());
        }
        if depth >= self.max_depth {
            return Err(Error::SubdivisionLimitExceeded {
                max_depth: self.max_depth,
                near: cell.to_string(),
            });
        }
        let children = self.split(&cell, depth, rng.as_mut())?;
        if self.policy.execution.is_parallel() && depth < PARALLEL_DEPTH && children.len() > 1 {
            let parts = exec::map_range(self.policy.execution, children.len(), |i| {
                let mut v = Vec::new();
                self.run(children[i].clone(), depth + 1, mix(path, i as u64), &mut v)
                    .map(|_| v)
            });
            for part in parts {
                out.extend(part?);
            }
        } else {
            for (i, child) in children.into_iter().enumerate() {
                self.run(child, depth + 1, mix(path, i as u64), out)?;
            }
        }
        Ok(())
    }

    fn accepts(&self, cell: &Crescent, tag: &Point) -> Result<bool> {
        let r = self.gauge.radius(tag)?;
        cell.within_ball(tag, r)
    }

    fn find_tag(&self, cell: &Crescent, mut rng: Option<&mut ChaCha8Rng>) -> Result<Option<Point>> {
        if let (Crescent::Cantor(s), Some(r)) = (cell, rng.as_deref_mut()) {
            if let Some(tag) = cantor_probes(s, 1, Some(r)).pop() {
                if self.accepts(cell, &tag)? {
                    return Ok(Some(tag));
                }
            }
        }
        for tag in primary_candidates(cell) {
            if self.accepts(cell, &tag)? {
                return Ok(Some(tag));
            }
        }
        for tag in probes(cell, self.policy.probes, rng) {
            if self.accepts(cell, &tag)? {
                return Ok(Some(tag));
            }
        }
        Ok(None)
    }

    fn split(
        &self,
        cell: &Crescent,
        depth: u32,
        rng: Option<&mut ChaCha8Rng>,
    ) -> Result<Vec<Crescent>> {
        let limit = || Error::SubdivisionLimitExceeded {
            max_depth: self.max_depth,
            near: cell.to_string(),
        };
        match cell {
            Crescent::Interval(i) => {
                let m = split_point(i.lo, i.hi, self.policy.basis, rng).ok_or_else(limit)?;
                Ok(split_interval(i, m)
                    .into_iter()
                    .map(Crescent::Interval)
                    .collect())
            }
            Crescent::Box(b) => {
                let d = b.dim();
                let axis = (0..d)
                    .map(|k| (depth as usize + k) % d)
                    .find(|&k| b.axes[k].length() > 0.0)
                    .ok_or_else(limit)?;
                let a = b.axes[axis];
                let m = split_point(a.lo, a.hi, self.policy.basis, rng).ok_or_else(limit)?;
                Ok(split_interval(&a, m)
                    .into_iter()
                    .map(|piece| {
                        let mut axes = b.axes.clone();
                        axes[axis] = piece;
                        Crescent::Box(BoxCell::new(axes))
                    })
                    .collect())
            }
            Crescent::Cantor(s) => {
                if s.words().len() > 1 {
                    return Ok(s.words().iter().map(|&w| Crescent::cylinder(w)).collect());
                }
                let w = s.words()[0];
                let (Some(w0), Some(w1)) = (w.push(false), w.push(true)) else {
                    return Err(limit());
                };
                Ok(vec![Crescent::cylinder(w0), Crescent::cylinder(w1)])
            }
        }
    }
}

fn split_interval(i: &Interval, m: f64) -> [Interval; 2] {
    [
        Interval::new(i.lo, m, i.lo_closed, false),
        Interval::new(m, i.hi, true, i.hi_closed),
    ]
}

/// A split point strictly inside `(lo, hi)`, inside the middle third when
/// jittered or snapped to a dense basis.
fn split_point(lo: f64, hi: f64, basis: Basis, rng: Option<&mut ChaCha8Rng>) -> Option<f64> {
    let w = hi - lo;
    let m = match (basis, rng) {
        (Basis::AllEndpoints, None) => lo + 0.5 * w,
        (Basis::AllEndpoints, Some(rng)) => lo + w * (1.0 / 3.0 + rng.random::<f64>() / 3.0),
        (Basis::Dense(set), rng) => {
            let (a, b) = match rng {
                None => (lo + w / 3.0, hi - w / 3.0),
                Some(rng) => {
                    let a = lo + w * (1.0 / 3.0 + rng.random::<f64>() / 6.0);
                    (a, a + w / 6.0)
                }
            };
            dense::snap(set, a, b).unwrap_or(lo + 0.5 * w)
        }
    };
    (lo < m && m < hi).then_some(m)
}

/// Tag candidates for a cell, in the order they are tried.
pub(crate) fn candidates(cell: &Crescent, k: usize, rng: Option<&mut ChaCha8Rng>) -> Vec<Point> {
    let mut out = primary_candidates(cell);
    out.extend(probes(cell, k, rng));
    out
}

/// Midpoint and endpoints for intervals, centre and corners for boxes, and
/// the points `w0̄`, `w1̄`, `w01̄`, `w10̄` for a cylinder `B_w`.
fn primary_candidates(cell: &Crescent) -> Vec<Point> {
    match cell {
        Crescent::Interval(i) => vec![Point::Real(i.midpoint()), Point::Real(i.lo), Point::Real(i.hi)],
        Crescent::Box(bx) => {
            let d = bx.dim();
            let mut out = vec![Point::Vector(bx.center())];
            for mask in 0..1usize << d.min(10) {
                out.push(Point::Vector(
                    bx.axes
                        .iter()
                        .enumerate()
                        .map(|(i, a)| if i < 10 && mask >> i & 1 == 1 { a.hi } else { a.lo })
                        .collect(),
                ));
            }
            out
        }
        Crescent::Cantor(s) => {
            let words = s.words();
            let Some(&w) = words.first() else {
                return Vec::new();
            };
            let pt = |prefix: Word, tail: bool| Point::Cantor(CantorPoint::new(prefix, tail));
            let mut out = vec![pt(w, false), pt(w, true)];
            if let Some(w0) = w.push(false) {
                out.push(pt(w0, true));
            }
            if let Some(w1) = w.push(true) {
                out.push(pt(w1, false));
            }
            if words.len() > 1 {
                let last = *words.last().unwrap();
                out.push(pt(last, false));
                out.push(pt(last, true));
            }
            out
        }
    }
}

/// `k` probe points: golden-ratio offsets, or uniform draws when `rng` is given.
fn probes(cell: &Crescent, k: usize, rng: Option<&mut ChaCha8Rng>) -> Vec<Point> {
    match cell {
        Crescent::Interval(i) => {
            let (a, b) = (i.lo, i.hi);
            let pts: Vec<f64> = match rng {
                None => (1..=k).map(|j| a + (b - a) * frac(j as f64 * GOLDEN)).collect(),
                Some(rng) => (0..k).map(|_| a + (b - a) * rng.random::<f64>()).collect(),
            };
            pts.into_iter().map(Point::Real).collect()
        }
        Crescent::Box(bx) => match rng {
            None => (1..=k)
                .map(|j| {
                    Point::Vector(
                        bx.axes
                            .iter()
                            .enumerate()
                            .map(|(i, a)| {
                                let alpha = ((i + 2) as f64).sqrt();
                                a.lo + a.length() * frac(j as f64 * (GOLDEN + alpha))
                            })
                            .collect(),
                    )
                })
                .collect(),
            Some(rng) => (0..k)
                .map(|_| {
                    Point::Vector(
                        bx.axes
                            .iter()
                            .map(|a| a.lo + a.length() * rng.random::<f64>())
                            .collect(),
                    )
                })
                .collect(),
        },
        Crescent::Cantor(s) => cantor_probes(s, k, rng),
    }
}

fn extend(w: Word, bits: &[bool]) -> Option<Word> {
    bits.iter().try_fold(w, |acc, &b| acc.push(b))
}

/// Points `w·b·t̄` for 8-bit extensions `b` of a single cylinder `B_w`.
fn cantor_probes(s: &CylinderSet, k: usize, mut rng: Option<&mut ChaCha8Rng>) -> Vec<Point> {
    let [w] = s.words() else {
        return Vec::new();
    };
    let mut out = Vec::with_capacity(k);
    for j in 1..=k {
        let (byte, tail) = match rng.as_deref_mut() {
            None => ((frac(j as f64 * GOLDEN) * 256.0) as u32, j % 2 == 1),
            Some(r) => (r.random::<u32>() & 0xFF, r.random::<bool>()),
        };
        let bits: Vec<bool> = (0..8).rev().map(|i| byte >> i & 1 == 1).collect();
        if let Some(p) = extend(*w, &bits) {
            out.push(Point::Cantor(CantorPoint::new(p, tail)));
        }
    }
    out
}

/// A `γ`-fine tagged partition of `c` by Cousin subdivision.
pub fn cousin_partition(
    c: &Crescent,
    gauge: &Gauge,
    policy: &SubdivisionPolicy,
) -> Result<TaggedPartition> {
    let sub = Subdivider {
        gauge,
        policy,
        max_depth: policy.depth_limit(c),
        cells: AtomicUsize::new(0),
    };
    let mut out = Vec::new();
    if !c.is_empty() {
        sub.run(c.clone(), 0, mix(policy.seed, 0x5EED), &mut out)?;
    }
    Ok(TaggedPartition::new_unchecked(c.clone(), out))
}

/// Pairs `(R ∩ S, i, j)` over all non-empty intersections of cells.
fn join_with_origin(a: &[Crescent], b: &[Crescent]) -> Result<Vec<(Crescent, usize, usize)>> {
    let mut out = Vec::new();
    if let (Some(Crescent::Interval(_)), Some(Crescent::Interval(_))) = (a.first(), b.first()) {
        let mut ia: Vec<usize> = (0..a.len()).collect();
        let mut ib: Vec<usize> = (0..b.len()).collect();
        ia.sort_by(|&x, &y| a[x].cmp_position(&a[y]));
        ib.sort_by(|&x, &y| b[x].cmp_position(&b[y]));
        for &i in &ia {
            let x = a[i].as_interval().unwrap();
            let start = ib.partition_point(|&j| b[j].as_interval().unwrap().hi < x.lo);
            for &j in &ib[start..] {
                let y = b[j].as_interval().unwrap();
                if y.lo > x.hi {
                    break;
                }
                let z = x.intersect(y);
                if !z.is_empty() {
                    out.push((Crescent::Interval(z), i, j));
                }
            }
        }
        return Ok(out);
    }
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let z = x.intersect(y)?;
            if !z.is_empty() {
                out.push((z, i, j));
            }
        }
    }
    Ok(out)
}

/// A point of the cell's closure used when no prescribed tag applies.
fn default_tag(cell: &Crescent) -> Point {
    candidates(cell, 0, None)
        .into_iter()
        .next()
        .expect("non-empty cell has a candidate")
}

/// A basic open set containing `keep` whose closure misses `other`.
fn separator(cell: &Crescent, keep: &Point, other: &Point, basis: Basis) -> Result<Crescent> {
    let snap = |lo: f64, hi: f64| -> f64 {
        let mid = 0.5 * (lo + hi);
        match basis {
            Basis::Dense(set) => {
                let w = hi - lo;
                dense::snap(set, lo + w / 3.0, hi - w / 3.0).unwrap_or(mid)
            }
            Basis::AllEndpoints => mid,
        }
    };
    match (cell, keep, other) {
        (Crescent::Interval(_), Point::Real(k), Point::Real(o)) => {
            let m = snap(k.min(*o), k.max(*o));
            Ok(Crescent::Interval(if k > o {
                Interval::open(m, f64::INFINITY)
            } else {
                Interval::open(f64::NEG_INFINITY, m)
            }))
        }
        (Crescent::Box(b), Point::Vector(k), Point::Vector(o)) => {
            let axis = (0..k.len())
                .max_by(|&i, &j| (k[i] - o[i]).abs().total_cmp(&(k[j] - o[j]).abs()))
                .unwrap_or(0);
            let m = snap(k[axis].min(o[axis]), k[axis].max(o[axis]));
            let mut axes = vec![Interval::open(f64::NEG_INFINITY, f64::INFINITY); b.dim()];
            axes[axis] = if k[axis] > o[axis] {
                Interval::open(m, f64::INFINITY)
            } else {
                Interval::open(f64::NEG_INFINITY, m)
            };
            Ok(Crescent::Box(BoxCell::new(axes)))
        }
        (Crescent::Cantor(_), Point::Cantor(k), Point::Cantor(o)) => {
            let n = k.first_difference(o).ok_or_else(|| {
                Error::InvalidArgument("cannot separate a point from itself".into())
            })?;
            let w = k.word(n + 1).ok_or_else(|| Error::SubdivisionLimitExceeded {
                max_depth: Word::MAX_LEN as u32,
                near: k.to_string(),
            })?;
            Ok(Crescent::cylinder(w))
        }
        _ => Err(Error::SpaceMismatch(format!(
            "cannot separate {keep} and {other} in a {} cell",
            cell.kind()
        ))),
    }
}

/// A common refinement of two tagged partitions keeping every tag of both.
pub fn common_refinement(a: &TaggedPartition, b: &TaggedPartition) -> Result<TaggedPartition> {
    common_refinement_in(a, b, Basis::AllEndpoints)
}

/// [`common_refinement`] with separating sets snapped to `basis`.
pub fn common_refinement_in(
    a: &TaggedPartition,
    b: &TaggedPartition,
    basis: Basis,
) -> Result<TaggedPartition> {
    if a.parent() != b.parent() {
        return Err(Error::ParentMismatch);
    }
    let ca: Vec<Crescent> = a.cells().iter().map(|c| c.cell.clone()).collect();
    let cb: Vec<Crescent> = b.cells().iter().map(|c| c.cell.clone()).collect();
    let mut out = Vec::new();
    for (cell, i, j) in join_with_origin(&ca, &cb)? {
        let t1 = &a.cells()[i].tag;
        let t2 = &b.cells()[j].tag;
        let in1 = cell.closure_contains(t1)?;
        let in2 = cell.closure_contains(t2)?;
        match (in1, in2) {
            (false, false) => {
                let tag = default_tag(&cell);
                out.push(TaggedCell::new(cell, tag));
            }
            (true, false) => out.push(TaggedCell::new(cell, t1.clone())),
            (false, true) => out.push(TaggedCell::new(cell, t2.clone())),
            (true, true) if t1 == t2 => out.push(TaggedCell::new(cell, t1.clone())),
            (true, true) => {
                let o = separator(&cell, t1, t2, basis)?;
                let inner = cell.intersect(&o)?;
                out.push(TaggedCell::new(inner, t1.clone()));
                let mut placed = false;
                for piece in cell.subtract(&o)? {
                    let tag = if !placed && piece.closure_contains(t2)? {
                        placed = true;
                        t2.clone()
                    } else {
                        default_tag(&piece)
                    };
                    out.push(TaggedCell::new(piece, tag));
                }
                debug_assert!(placed);
            }
        }
    }
    Ok(TaggedPartition::new_unchecked(a.parent().clone(), out).canonical())
}

fn dedup_points(points: &[Point]) -> Vec<Point> {
    let mut seen = HashSet::new();
    points
        .iter()
        .filter(|p| seen.insert(p.key()))
        .cloned()
        .collect()
}

/// An open basic neighbourhood of `t` whose closure has radius at most `r`
/// around `t`, with endpoints in `basis`.
fn neighbourhood(t: &Point, r: f64, basis: Basis) -> Crescent {
    let snap = |lo: f64, hi: f64| match basis {
        Basis::Dense(set) => dense::snap(set, lo, hi).unwrap_or(0.5 * (lo + hi)),
        Basis::AllEndpoints => 0.5 * (lo + hi),
    };
    let around = |x: f64, h: f64| Interval::open(snap(x - h, x - 0.5 * h), snap(x + 0.5 * h, x + h));
    match t {
        Point::Real(x) => Crescent::Interval(around(*x, r)),
        Point::Vector(v) => {
            let h = r / (v.len() as f64).sqrt();
            Crescent::Box(BoxCell::new(v.iter().map(|&x| around(x, h)).collect()))
        }
        Point::Cantor(_) => unreachable!("cantor neighbourhoods are cylinders"),
    }
}

/// A `γ`-fine tagged refinement of `q` whose tag set contains `tags`.
///
/// Each tag `t` receives a small basic neighbourhood `B_t` inside the ball of
/// radius `γ(t)` and away from the other tags. Within every cell of `q`, the
/// piece meeting `B_t` whose closure contains `t` is tagged by `t`; all other
/// pieces are Cousin-partitioned.
pub fn fine_partition_with_tags(
    q: &Partition,
    tags: &[Point],
    gauge: &Gauge,
    policy: &SubdivisionPolicy,
) -> Result<TaggedPartition> {
    let parent = q.parent();
    let tags = dedup_points(tags);
    for t in &tags {
        if !parent.closure_contains(t)? {
            return Err(Error::TagOutsideCell {
                tag: t.to_string(),
                cell: parent.to_string(),
            });
        }
    }
    let mut hoods = Vec::with_capacity(tags.len());
    for (k, t) in tags.iter().enumerate() {
        let g = gauge.radius(t)?;
        let hood = match t {
            Point::Cantor(ct) => {
                let mut m = ball_depth(g).ok_or_else(|| Error::SubdivisionLimitExceeded {
                    max_depth: Word::MAX_LEN as u32,
                    near: t.to_string(),
                })?;
                for (j, s) in tags.iter().enumerate() {
                    if let (true, Point::Cantor(cs)) = (j != k, s) {
                        if let Some(n) = ct.first_difference(cs) {
                            m = m.max(n + 1);
                        }
                    }
                }
                let w = ct.word(m).ok_or_else(|| Error::SubdivisionLimitExceeded {
                    max_depth: Word::MAX_LEN as u32,
                    near: t.to_string(),
                })?;
                Crescent::cylinder(w)
            }
            _ => {
                let sep = tags
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, s)| t.sup_distance(s))
                    .fold(f64::INFINITY, f64::min);
                neighbourhood(t, 0.5 * g.min(sep), policy.basis)
            }
        };
        hoods.push(hood);
    }

    let mut pieces: Vec<(usize, Crescent, Option<usize>)> = Vec::new();
    for (i, cell) in q.cells().iter().enumerate() {
        for (k, hood) in hoods.iter().enumerate() {
            let piece = cell.intersect(hood)?;
            if piece.is_empty() {
                continue;
            }
            let own = piece.closure_contains(&tags[k])?.then_some(k);
            pieces.push((i, piece, own));
        }
        for rest in cell.subtract_many(&hoods)? {
            pieces.push((i, rest, None));
        }
    }

    let parts = exec::map(policy.execution, &pieces, |(i, piece, own)| match own {
        Some(k) => Ok(vec![TaggedCell::new(piece.clone(), tags[*k].clone())]),
        None => {
            let mut pol = policy.clone();
            pol.seed = mix(policy.seed, *i as u64);
            cousin_partition(piece, gauge, &pol).map(TaggedPartition::into_cells)
        }
    });
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(TaggedPartition::new_unchecked(parent.clone(), out))
}

/// A tagged partition together with a gauge it is fine for.
#[derive(Debug, Clone)]
pub struct PgPair {
    pub tagged: TaggedPartition,
    pub gauge: Gauge,
}

impl PgPair {
    pub fn new(tagged: TaggedPartition, gauge: Gauge) -> Result<PgPair> {
        if !tagged.is_fine(&gauge)? {
            return Err(Error::InvalidArgument(format!(
                "tagged partition is not fine for gauge {}",
                gauge.label()
            )));
        }
        Ok(PgPair { tagged, gauge })
    }

    /// `self ⊑ other`: `other` refines `self`, keeps its tags, and has a
    /// pointwise smaller gauge on the given probe points.
    pub fn leq(&self, other: &PgPair, probes: &[Point]) -> Result<bool> {
        if !self.tagged.partition().is_refined_by(&other.tagged.partition())? {
            return Ok(false);
        }
        let theirs: HashSet<_> = other.tagged.tags().map(Point::key).collect();
        if !self.tagged.tags().all(|t| theirs.contains(&t.key())) {
            return Ok(false);
        }
        Ok(probes
            .iter()
            .all(|p| self.gauge.eval(p) >= other.gauge.eval(p)))
    }
}

/// An upper bound of two PG pairs: the join partition refined to be fine for
/// `min(γ_a, γ_b)` while keeping the tags of both.
pub fn pg_join(a: &PgPair, b: &PgPair, policy: &SubdivisionPolicy) -> Result<PgPair> {
    let gauge = a.gauge.min(&b.gauge);
    let q = a.tagged.partition().join(&b.tagged.partition())?;
    let tags: Vec<Point> = a.tagged.tags().chain(b.tagged.tags()).cloned().collect();
    let tagged = fine_partition_with_tags(&q, &tags, &gauge, policy)?;
    Ok(PgPair { tagged, gauge })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceDescriptor;

    fn unit() -> Crescent {
        Crescent::Interval(Interval::unit())
    }

    #[test]
    fn cousin_examples() {
        let pol = SubdivisionPolicy::default();
        let tp = cousin_partition(&unit(), &Gauge::constant(0.3), &pol).unwrap();
        assert_eq!(
            tp.cells(),
            &[
                TaggedCell::new(Crescent::Interval(Interval::closed_open(0.0, 0.5)), Point::Real(0.25)),
                TaggedCell::new(Crescent::Interval(Interval::closed(0.5, 1.0)), Point::Real(0.75)),
            ]
        );
        let one = cousin_partition(&unit(), &Gauge::constant(2.0), &pol).unwrap();
        assert_eq!(one.cells(), &[TaggedCell::new(unit(), Point::Real(0.5))]);

        let c = cousin_partition(&SpaceDescriptor::Cantor.whole(), &Gauge::constant(0.6), &pol)
            .unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.is_fine(&Gauge::constant(0.6)).unwrap());
    }

    #[test]
    fn zero_gauge_hits_depth_limit() {
        let g = Gauge::from_fn(|_| 1e-300);
        let err = cousin_partition(&unit(), &g, &SubdivisionPolicy::default()).unwrap_err();
        assert!(matches!(err, Error::SubdivisionLimitExceeded { .. }));
        let neg = Gauge::from_fn(|_| -1.0);
        assert!(matches!(
            cousin_partition(&unit(), &neg, &SubdivisionPolicy::default()),
            Err(Error::NonPositiveGauge { .. })
        ));
    }

    #[test]
    fn escapes_tiny_gauge_at_listed_points() {
        let g = Gauge::from_fn(|p| if p.real() == Some(0.5) { 1e-300 } else { 0.3 });
        let tp = cousin_partition(&unit(), &g, &SubdivisionPolicy::default()).unwrap();
        assert!(tp.is_fine(&g).unwrap());
    }

    #[test]
    fn common_refinement_trace() {
        let iv = |i| Crescent::Interval(i);
        let tp1 = TaggedPartition::new(
            unit(),
            vec![
                TaggedCell::new(iv(Interval::closed_open(0.0, 0.6)), Point::Real(0.3)),
                TaggedCell::new(iv(Interval::closed(0.6, 1.0)), Point::Real(0.8)),
            ],
        )
        .unwrap();
        let tp2 = TaggedPartition::new(
            unit(),
            vec![
                TaggedCell::new(iv(Interval::closed_open(0.0, 0.4)), Point::Real(0.2)),
                TaggedCell::new(iv(Interval::closed(0.4, 1.0)), Point::Real(0.8)),
            ],
        )
        .unwrap();
        let r = common_refinement(&tp1, &tp2).unwrap();
        assert!(r.partition().validate().is_ok());
        assert!(r
            .cells()
            .contains(&TaggedCell::new(iv(Interval::open(0.25, 0.4)), Point::Real(0.3))));
        assert!(r
            .cells()
            .contains(&TaggedCell::new(iv(Interval::closed(0.0, 0.25)), Point::Real(0.2))));
        assert_eq!(common_refinement(&tp1, &tp1).unwrap(), tp1.canonical());
    }

    #[test]
    fn tagged_fine_partition_keeps_tags() {
        let q = Partition::new(
            unit(),
            vec![
                Crescent::Interval(Interval::closed_open(0.0, 0.5)),
                Crescent::Interval(Interval::closed(0.5, 1.0)),
            ],
        )
        .unwrap();
        let g = Gauge::constant(0.4);
        let tags = [Point::Real(0.25), Point::Real(0.75)];
        let tp = fine_partition_with_tags(&q, &tags, &g, &SubdivisionPolicy::default()).unwrap();
        assert!(tp.partition().validate().is_ok());
        assert!(tp.is_fine(&g).unwrap());
        assert!(q.is_refined_by(&tp.partition()).unwrap());
        for t in &tags {
            assert!(tp.tags().any(|s| s == t));
        }
    }
}
