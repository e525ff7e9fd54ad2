//! Partitions and tagged partitions of a crescent.

use serde::{Deserialize, Serialize};

use crate::gauge::Gauge;
use crate::space::{Crescent, CylinderSet, Point, Word};
use crate::{Error, Result};

/// Finitely many pairwise disjoint non-empty crescents covering `parent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    parent: Crescent,
    cells: Vec<Crescent>,
}

impl Partition {
    /// Builds a partition, checking disjointness and exact cover.
    pub fn new(parent: Crescent, cells: Vec<Crescent>) -> Result<Partition> {
        let p = Partition::new_unchecked(parent, cells);
        p.validate()?;
        Ok(p)
    }

    /// Builds a partition without validation. Empty cells are still dropped.
    pub fn new_unchecked(parent: Crescent, mut cells: Vec<Crescent>) -> Partition {
        cells.retain(|c| !c.is_empty());
        Partition { parent, cells }
    }

    pub fn trivial(parent: Crescent) -> Partition {
        Partition::new_unchecked(parent.clone(), vec![parent])
    }

    pub fn parent(&self) -> &Crescent {
        &self.parent
    }

    pub fn cells(&self) -> &[Crescent] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<Crescent> {
        self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Largest cell diameter.
    pub fn norm(&self) -> f64 {
        self.cells.iter().map(Crescent::diameter).fold(0.0, f64::max)
    }

    /// Cells sorted by position.
    pub fn canonical(&self) -> Partition {
        let mut cells = self.cells.clone();
        cells.sort_by(|a, b| a.cmp_position(b));
        Partition {
            parent: self.parent.clone(),
            cells,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.cells {
            if !self.parent.same_space(c) {
                return Err(Error::SpaceMismatch(format!(
                    "cell {c} is not in the space of {}",
                    self.parent
                )));
            }
        }
        match &self.parent {
            Crescent::Interval(parent) => {
                let mut cells: Vec<_> = self.cells.iter().filter_map(Crescent::as_interval).collect();
                cells.sort_by(|a, b| a.cmp_position(b));
                let (Some(first), Some(last)) = (cells.first(), cells.last()) else {
                    return check(parent.is_empty(), "no cells for a non-empty parent");
                };
                check(
                    first.lo == parent.lo && first.lo_closed == parent.lo_closed,
                    "cells do not start at the parent's left end",
                )?;
                check(
                    last.hi == parent.hi && last.hi_closed == parent.hi_closed,
                    "cells do not end at the parent's right end",
                )?;
                for w in cells.windows(2) {
                    if !w[0].abuts(w[1]) {
                        return Err(Error::InvalidPartition(format!(
                            "cells {} and {} overlap or leave a gap",
                            w[0], w[1]
                        )));
                    }
                }
                Ok(())
            }
            Crescent::Cantor(parent) => {
                let mut words: Vec<Word> = self
                    .cells
                    .iter()
                    .filter_map(Crescent::as_cantor)
                    .flat_map(|c| c.words().iter().copied())
                    .collect();
                words.sort_by(|a, b| a.cmp_position(*b));
                for w in words.windows(2) {
                    if w[0].is_prefix_of(w[1]) {
                        return Err(Error::InvalidPartition(format!(
                            "cylinders B_{} and B_{} overlap",
                            w[0], w[1]
                        )));
                    }
                }
                check(
                    CylinderSet::new(words) == *parent,
                    "cells do not cover the parent exactly",
                )
            }
            Crescent::Box(_) => {
                for (i, a) in self.cells.iter().enumerate() {
                    check(self.parent.contains(a)?, "cell escapes the parent")?;
                    for b in &self.cells[i + 1..] {
                        if !a.is_disjoint(b)? {
                            return Err(Error::InvalidPartition(format!("cells {a} and {b} overlap")));
                        }
                    }
                }
                check(
                    self.parent.subtract_many(&self.cells)?.is_empty(),
                    "cells do not cover the parent",
                )
            }
        }
    }

    /// The coarsest common refinement: all non-empty pairwise intersections.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        if self.parent != other.parent {
            return Err(Error::ParentMismatch);
        }
        let a = self.canonical();
        let b = other.canonical();
        let cells = match &self.parent {
            Crescent::Interval(_) => sweep_intervals(&a.cells, &b.cells),
            Crescent::Cantor(_) if single_words(&a.cells) && single_words(&b.cells) => {
                sweep_words(&a.cells, &b.cells)
            }
            _ => {
                let mut cells = Vec::new();
                for x in &a.cells {
                    for y in &b.cells {
                        let z = x.intersect(y)?;
                        if !z.is_empty() {
                            cells.push(z);
                        }
                    }
                }
                cells
            }
        };
        Ok(Partition::new_unchecked(self.parent.clone(), cells).canonical())
    }

    /// True iff `finer` refines `self`: each of its cells lies in one of ours.
    pub fn is_refined_by(&self, finer: &Partition) -> Result<bool> {
        if self.parent != finer.parent {
            return Err(Error::ParentMismatch);
        }
        if let Crescent::Interval(_) = self.parent {
            let coarse = self.canonical();
            let los: Vec<f64> = coarse.cells.iter().map(|c| c.as_interval().unwrap().lo).collect();
            for q in &finer.cells {
                let lo = q.as_interval().unwrap().lo;
                let idx = los.partition_point(|&x| x <= lo);
                let lo_idx = idx.saturating_sub(3);
                let hit = coarse.cells[lo_idx..idx.min(coarse.cells.len())]
                    .iter()
                    .any(|p| p.contains(q).unwrap_or(false));
                if !hit {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        for q in &finer.cells {
            let mut hit = false;
            for p in &self.cells {
                if p.contains(q)? {
                    hit = true;
                    break;
                }
            }
            if !hit {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `refines(p, q)`: true iff `q` refines `p`.
pub fn refines(p: &Partition, q: &Partition) -> Result<bool> {
    p.is_refined_by(q)
}

/// The join of two partitions of the same parent.
pub fn partition_join(p: &Partition, q: &Partition) -> Result<Partition> {
    p.join(q)
}

fn check(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidPartition(msg.into()))
    }
}

fn single_words(cells: &[Crescent]) -> bool {
    cells
        .iter()
        .all(|c| c.as_cantor().is_some_and(|s| s.words().len() == 1))
}

fn sweep_intervals(a: &[Crescent], b: &[Crescent]) -> Vec<Crescent> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() && j < b.len() {
        let x = a[i].as_interval().unwrap();
        let y = b[j].as_interval().unwrap();
        let z = x.intersect(y);
        if !z.is_empty() {
            out.push(Crescent::Interval(z));
        }
        let x_first = x.hi < y.hi || (x.hi == y.hi && !x.hi_closed && y.hi_closed);
        let y_first = y.hi < x.hi || (x.hi == y.hi && !y.hi_closed && x.hi_closed);
        match (x_first, y_first) {
            (true, _) => i += 1,
            (_, true) => j += 1,
            _ => {
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn sweep_words(a: &[Crescent], b: &[Crescent]) -> Vec<Crescent> {
    let word = |c: &Crescent| c.as_cantor().unwrap().words()[0];
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() && j < b.len() {
        let (x, y) = (word(&a[i]), word(&b[j]));
        if x.is_prefix_of(y) {
            out.push(Crescent::cylinder(y));
            j += 1;
            if x == y {
                i += 1;
            }
        } else if y.is_prefix_of(x) {
            out.push(Crescent::cylinder(x));
            i += 1;
        } else if x.cmp_position(y).is_lt() {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// A cell together with its tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedCell {
    pub cell: Crescent,
    pub tag: Point,
}

impl TaggedCell {
    pub fn new(cell: Crescent, tag: Point) -> TaggedCell {
        TaggedCell { cell, tag }
    }

    pub fn check_tag(&self) -> Result<()> {
        if self.cell.closure_contains(&self.tag)? {
            Ok(())
        } else {
            Err(Error::TagOutsideCell {
                tag: self.tag.to_string(),
                cell: self.cell.to_string(),
            })
        }
    }

    /// Whether the closure of the cell lies in the open `γ(tag)`-ball at the tag.
    pub fn is_fine(&self, gauge: &Gauge) -> Result<bool> {
        self.check_tag()?;
        self.cell.within_ball(&self.tag, gauge.eval(&self.tag))
    }
}

/// A partition with one tag in the closure of each cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedPartition {
    parent: Crescent,
    cells: Vec<TaggedCell>,
}

impl TaggedPartition {
    pub fn new(parent: Crescent, cells: Vec<TaggedCell>) -> Result<TaggedPartition> {
        let tp = TaggedPartition::new_unchecked(parent, cells);
        tp.partition().validate()?;
        for c in &tp.cells {
            c.check_tag()?;
        }
        Ok(tp)
    }

    pub fn new_unchecked(parent: Crescent, mut cells: Vec<TaggedCell>) -> TaggedPartition {
        cells.retain(|c| !c.cell.is_empty());
        TaggedPartition { parent, cells }
    }

    pub fn parent(&self) -> &Crescent {
        &self.parent
    }

    pub fn cells(&self) -> &[TaggedCell] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<TaggedCell> {
        self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn tags(&self) -> impl Iterator<Item = &Point> {
        self.cells.iter().map(|c| &c.tag)
    }

    pub fn partition(&self) -> Partition {
        Partition::new_unchecked(
            self.parent.clone(),
            self.cells.iter().map(|c| c.cell.clone()).collect(),
        )
    }

    pub fn norm(&self) -> f64 {
        self.cells.iter().map(|c| c.cell.diameter()).fold(0.0, f64::max)
    }

    /// Whether every cell is `γ`-fine with respect to its tag.
    pub fn is_fine(&self, gauge: &Gauge) -> Result<bool> {
        for c in &self.cells {
            if !c.is_fine(gauge)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Cells sorted by position.
    pub fn canonical(&self) -> TaggedPartition {
        let mut cells = self.cells.clone();
        cells.sort_by(|a, b| a.cell.cmp_position(&b.cell));
        TaggedPartition {
            parent: self.parent.clone(),
            cells,
        }
    }
}

/// `is_fine(tp, γ)`.
pub fn is_fine(tp: &TaggedPartition, gauge: &Gauge) -> Result<bool> {
    tp.is_fine(gauge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{CantorPoint, Interval, SpaceDescriptor};

    fn iv(c: Interval) -> Crescent {
        Crescent::Interval(c)
    }

    fn halves() -> Partition {
        Partition::new(
            iv(Interval::unit()),
            vec![iv(Interval::closed_open(0.0, 0.5)), iv(Interval::closed(0.5, 1.0))],
        )
        .unwrap()
    }

    fn cyl(s: &str) -> Crescent {
        Crescent::cylinder(Word::parse(s).unwrap())
    }

    #[test]
    fn join_examples() {
        let q = Partition::new(
            iv(Interval::unit()),
            vec![iv(Interval::closed_open(0.0, 0.25)), iv(Interval::closed(0.25, 1.0))],
        )
        .unwrap();
        let j = halves().join(&q).unwrap();
        assert_eq!(
            j.cells(),
            &[
                iv(Interval::closed_open(0.0, 0.25)),
                iv(Interval::closed_open(0.25, 0.5)),
                iv(Interval::closed(0.5, 1.0)),
            ]
        );
        assert_eq!(halves().join(&halves()).unwrap(), halves().canonical());

        let whole = SpaceDescriptor::Cantor.whole();
        let a = Partition::new(whole.clone(), vec![cyl("0"), cyl("1")]).unwrap();
        let b = Partition::new(whole, vec![cyl("00"), cyl("01"), cyl("1")]).unwrap();
        assert_eq!(a.join(&b).unwrap().cells(), b.cells());
    }

    #[test]
    fn refinement_examples() {
        let p = Partition::trivial(iv(Interval::unit()));
        assert!(refines(&p, &halves()).unwrap());
        assert!(!refines(&halves(), &p).unwrap());
    }

    #[test]
    fn validation_rejects_gaps_and_overlaps() {
        let gap = Partition::new(
            iv(Interval::unit()),
            vec![iv(Interval::closed_open(0.0, 0.5)), iv(Interval::open_closed(0.5, 1.0))],
        );
        assert!(gap.is_err());
        let overlap = Partition::new(
            iv(Interval::unit()),
            vec![iv(Interval::closed(0.0, 0.5)), iv(Interval::closed(0.5, 1.0))],
        );
        assert!(overlap.is_err());
        let cantor = Partition::new(SpaceDescriptor::Cantor.whole(), vec![cyl("0"), cyl("01"), cyl("1")]);
        assert!(cantor.is_err());
    }

    #[test]
    fn fineness_examples() {
        let tp = TaggedPartition::new(
            iv(Interval::unit()),
            vec![TaggedCell::new(iv(Interval::unit()), Point::Real(0.5))],
        )
        .unwrap();
        assert!(tp.is_fine(&Gauge::constant(0.6)).unwrap());
        assert!(!tp.is_fine(&Gauge::constant(0.5)).unwrap());

        let t = Point::Cantor(CantorPoint::zeros());
        let s = Point::Cantor(CantorPoint::ones());
        let ctp = TaggedPartition::new(
            SpaceDescriptor::Cantor.whole(),
            vec![TaggedCell::new(cyl("0"), t), TaggedCell::new(cyl("1"), s)],
        )
        .unwrap();
        assert!(ctp.is_fine(&Gauge::constant(0.6)).unwrap());
        assert!(!ctp.is_fine(&Gauge::constant(0.5)).unwrap());
    }

    #[test]
    fn tag_outside_closure_is_reported() {
        let bad = TaggedCell::new(iv(Interval::closed(0.0, 0.5)), Point::Real(0.7));
        assert!(matches!(
            bad.is_fine(&Gauge::constant(1.0)),
            Err(Error::TagOutsideCell { .. })
        ));
    }
}
