use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A finite binary word of length at most [`Word::MAX_LEN`].
///
/// The bits are stored right-aligned: read as a binary numeral of `len`
/// digits, `bits` is the integer `k` of the dyadic interval
/// `[k/2^len, (k+1)/2^len]`. Bit `0` is the most significant digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word {
    pub bits: u64,
    pub len: u8,
}

impl Word {
    pub const MAX_LEN: u8 = 63;
    pub const EMPTY: Word = Word { bits: 0, len: 0 };

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Option<Word> {
        if s.len() > Word::MAX_LEN as usize {
            return None;
        }
        let mut w = Word::EMPTY;
        for c in s.chars() {
            w = w.push(match c {
                '0' => false,
                '1' => true,
                _ => return None,
            })?;
        }
        Some(w)
    }

    pub fn from_bits(bits: &[bool]) -> Option<Word> {
        bits.iter().try_fold(Word::EMPTY, |w, &b| w.push(b))
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn bit(self, i: usize) -> bool {
        debug_assert!(i < self.len());
        (self.bits >> (self.len() - 1 - i)) & 1 == 1
    }

    /// Appends one bit, or `None` if the word is already at maximum length.
    pub fn push(self, b: bool) -> Option<Word> {
        (self.len < Word::MAX_LEN).then(|| Word {
            bits: (self.bits << 1) | b as u64,
            len: self.len + 1,
        })
    }

    /// The first `n` bits.
    pub fn truncate(self, n: usize) -> Word {
        if n >= self.len() {
            return self;
        }
        Word {
            bits: self.bits >> (self.len() - n),
            len: n as u8,
        }
    }

    pub fn parent(self) -> Option<Word> {
        (self.len > 0).then(|| self.truncate(self.len() - 1))
    }

    pub fn last(self) -> Option<bool> {
        (self.len > 0).then_some(self.bits & 1 == 1)
    }

    pub fn flip_last(self) -> Word {
        debug_assert!(self.len > 0);
        Word {
            bits: self.bits ^ 1,
            len: self.len,
        }
    }

    pub fn is_prefix_of(self, other: Word) -> bool {
        self.len <= other.len && other.truncate(self.len()) == self
    }

    pub fn common_prefix_len(self, other: Word) -> usize {
        let n = self.len().min(other.len());
        let a = self.truncate(n).bits;
        let b = other.truncate(n).bits;
        let diff = a ^ b;
        if diff == 0 {
            n
        } else {
            n - (64 - diff.leading_zeros() as usize)
        }
    }

    /// Left endpoint of the dyadic interval as a 64-bit fixed-point fraction.
    fn aligned(self) -> u64 {
        if self.len == 0 {
            0
        } else {
            self.bits << (64 - self.len())
        }
    }

    /// Left-to-right order of the cylinders, ancestors before descendants.
    pub fn cmp_position(self, other: Word) -> Ordering {
        self.aligned()
            .cmp(&other.aligned())
            .then(self.len.cmp(&other.len))
    }

    /// The dyadic interval `[k/2^n, (k+1)/2^n]` as `(k/2^n, 2^-n)`.
    pub fn dyadic(self) -> (f64, f64) {
        let scale = (-(self.len() as f64)).exp2();
        (self.bits as f64 * scale, scale)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return write!(f, "ε");
        }
        for i in 0..self.len() {
            write!(f, "{}", self.bit(i) as u8)?;
        }
        Ok(())
    }
}

/// An eventually constant point of `{0,1}^ω`: `prefix` followed by the
/// constant sequence `tail, tail, ...`.
///
/// The representation is canonical: trailing prefix bits equal to `tail`
/// are stripped, so two values are equal exactly when the sequences are.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CantorPoint {
    prefix: Word,
    tail: bool,
}

impl CantorPoint {
    pub fn new(prefix: Word, tail: bool) -> CantorPoint {
        let mut prefix = prefix;
        while prefix.last() == Some(tail) {
            prefix = prefix.truncate(prefix.len() - 1);
        }
        CantorPoint { prefix, tail }
    }

    pub fn zeros() -> CantorPoint {
        CantorPoint::new(Word::EMPTY, false)
    }

    pub fn ones() -> CantorPoint {
        CantorPoint::new(Word::EMPTY, true)
    }

    pub fn prefix(&self) -> Word {
        self.prefix
    }

    pub fn tail(&self) -> bool {
        self.tail
    }

    pub fn bit(&self, i: usize) -> bool {
        if i < self.prefix.len() {
            self.prefix.bit(i)
        } else {
            self.tail
        }
    }

    /// The first `n` coordinates, if they fit in a [`Word`].
    pub fn word(&self, n: usize) -> Option<Word> {
        if n > Word::MAX_LEN as usize {
            return None;
        }
        if n <= self.prefix.len() {
            return Some(self.prefix.truncate(n));
        }
        let mut w = self.prefix;
        for _ in self.prefix.len()..n {
            w = w.push(self.tail)?;
        }
        Some(w)
    }

    pub fn in_cylinder(&self, w: Word) -> bool {
        (0..w.len()).all(|i| self.bit(i) == w.bit(i))
    }

    /// Index of the first coordinate where the sequences differ.
    pub fn first_difference(&self, other: &CantorPoint) -> Option<usize> {
        let n = self.prefix.len().max(other.prefix.len());
        (0..n)
            .find(|&i| self.bit(i) != other.bit(i))
            .or_else(|| (self.tail != other.tail).then_some(n))
    }

    pub fn distance(&self, other: &CantorPoint) -> f64 {
        match self.first_difference(other) {
            None => 0.0,
            Some(n) => (-(n as f64)).exp2(),
        }
    }

    /// Distance to the cylinder `B_w`.
    pub fn distance_to_cylinder(&self, w: Word) -> f64 {
        match (0..w.len()).find(|&i| self.bit(i) != w.bit(i)) {
            None => 0.0,
            Some(n) => (-(n as f64)).exp2(),
        }
    }
}

impl fmt::Display for CantorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.prefix.is_empty() {
            write!(f, "{}", self.prefix)?;
        }
        write!(f, "({})̄", self.tail as u8)
    }
}

/// A clopen subset of Cantor space, stored as the sorted list of maximal
/// cylinders it contains.
///
/// No word is a prefix of another and no sibling pair `w0`, `w1` is present,
/// so the representation of a set is unique.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CylinderSet {
    words: Vec<Word>,
}

impl CylinderSet {
    pub fn new(words: impl IntoIterator<Item = Word>) -> CylinderSet {
        CylinderSet {
            words: canonicalize(words.into_iter().collect()),
        }
    }

    pub fn whole() -> CylinderSet {
        CylinderSet {
            words: vec![Word::EMPTY],
        }
    }

    pub fn empty() -> CylinderSet {
        CylinderSet { words: Vec::new() }
    }

    pub fn cylinder(w: Word) -> CylinderSet {
        CylinderSet { words: vec![w] }
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.words == [Word::EMPTY]
    }

    pub fn diameter(&self) -> f64 {
        match self.words.as_slice() {
            [] => 0.0,
            [w] => (-(w.len() as f64)).exp2(),
            [first, .., last] => (-(first.common_prefix_len(*last) as f64)).exp2(),
        }
    }

    pub fn intersect(&self, other: &CylinderSet) -> CylinderSet {
        let mut out = Vec::new();
        for &a in &self.words {
            for &b in &other.words {
                if a.is_prefix_of(b) {
                    out.push(b);
                } else if b.is_prefix_of(a) {
                    out.push(a);
                }
            }
        }
        CylinderSet::new(out)
    }

    pub fn subtract(&self, other: &CylinderSet) -> CylinderSet {
        let mut current = self.words.clone();
        for &b in &other.words {
            current = current
                .into_iter()
                .flat_map(|a| word_minus(a, b))
                .collect();
        }
        CylinderSet::new(current)
    }

    pub fn union(&self, other: &CylinderSet) -> CylinderSet {
        CylinderSet::new(self.words.iter().chain(&other.words).copied())
    }

    pub fn contains(&self, other: &CylinderSet) -> bool {
        other
            .words
            .iter()
            .all(|&b| self.words.iter().any(|&a| a.is_prefix_of(b)))
    }

    pub fn contains_point(&self, x: &CantorPoint) -> bool {
        self.words.iter().any(|&w| x.in_cylinder(w))
    }

    pub fn distance_to(&self, x: &CantorPoint) -> f64 {
        self.words
            .iter()
            .map(|&w| x.distance_to_cylinder(w))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether the set lies inside the open ball of radius `r` at `t`.
    pub fn within_ball(&self, t: &CantorPoint, r: f64) -> bool {
        if self.is_empty() {
            return true;
        }
        let Some(m) = ball_depth(r) else {
            return false;
        };
        self.words.iter().all(|&w| w.len() >= m && t.in_cylinder(w.truncate(m)))
    }
}

/// Smallest `m` with `2^-m < r`, i.e. the open ball of radius `r` is the
/// cylinder of depth `m` around its centre. `None` when `m` exceeds the
/// representable word length.
pub fn ball_depth(r: f64) -> Option<usize> {
    if r > 1.0 {
        return Some(0);
    }
    if !(r > 0.0) {
        return None;
    }
    let mut m = (-r.log2()).floor().max(0.0) as usize;
    while (-(m as f64)).exp2() >= r {
        m += 1;
    }
    while m > 0 && (-((m - 1) as f64)).exp2() < r {
        m -= 1;
    }
    (m <= Word::MAX_LEN as usize).then_some(m)
}

/// `B_a \ B_b` as disjoint cylinders.
fn word_minus(a: Word, b: Word) -> Vec<Word> {
    if b.is_prefix_of(a) {
        Vec::new()
    } else if a.is_prefix_of(b) {
        (a.len() + 1..=b.len())
            .map(|i| b.truncate(i).flip_last())
            .collect()
    } else {
        vec![a]
    }
}

fn canonicalize(mut words: Vec<Word>) -> Vec<Word> {
    words.sort_by(|a, b| a.cmp_position(*b));
    let mut stack: Vec<Word> = Vec::with_capacity(words.len());
    for w in words {
        if stack.last().is_some_and(|top| top.is_prefix_of(w)) {
            continue;
        }
        let mut w = w;
        while let Some(&top) = stack.last() {
            if w.len > 0 && w.last() == Some(true) && top == w.flip_last() {
                stack.pop();
                w = w.parent().expect("non-empty word");
            } else {
                break;
            }
        }
        stack.push(w);
    }
    stack
}
