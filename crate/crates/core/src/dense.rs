//! Dense endpoint sets: dyadic rationals and the Stern–Brocot enumeration of
//! the rationals in `[0,1]`.

use crate::space::DenseSet;

/// The first `n` rationals of `[0,1]` in Stern–Brocot order as reduced
/// `(numerator, denominator)` pairs: `0, 1, 1/2, 1/3, 2/3, 1/4, 2/5, 3/5, 3/4, …`.
pub fn stern_brocot(n: usize) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = [(0, 1), (1, 1)].into_iter().take(n).collect();
    let mut row = vec![(0u64, 1u64), (1, 1)];
    while out.len() < n {
        let mut next = Vec::with_capacity(2 * row.len());
        for pair in row.windows(2) {
            let (a, b) = pair[0];
            let (c, d) = pair[1];
            let m = (a + c, b + d);
            next.push(pair[0]);
            next.push(m);
            if out.len() < n {
                out.push(m);
            }
        }
        next.push(*row.last().unwrap());
        row = next;
    }
    out
}

/// [`stern_brocot`] as floating-point values.
pub fn first_rationals(n: usize) -> Vec<f64> {
    stern_brocot(n)
        .into_iter()
        .map(|(p, q)| p as f64 / q as f64)
        .collect()
}

/// The dyadic rational of least denominator in `[lo, hi]`.
pub fn simplest_dyadic(lo: f64, hi: f64) -> Option<f64> {
    if !(lo <= hi) {
        return None;
    }
    (0..1100).find_map(|n| {
        let scale = (n as f64).exp2();
        let k = (lo * scale).ceil();
        let v = k / scale;
        (v.is_finite() && lo <= v && v <= hi).then_some(v)
    })
}

/// The rational of least denominator in `[lo, hi] ⊆ [0,1]`, found by
/// descending the Stern–Brocot tree with batched steps. `None` when the
/// range misses `[0,1]`.
pub fn simplest_rational(lo: f64, hi: f64) -> Option<f64> {
    if !(lo <= hi) || hi < 0.0 || lo > 1.0 {
        return None;
    }
    if lo <= 0.0 {
        return Some(0.0);
    }
    if hi >= 1.0 {
        return Some(1.0);
    }
    let (mut a, mut b, mut c, mut d) = (0f64, 1f64, 1f64, 1f64);
    for _ in 0..4096 {
        let (p, q) = (a + c, b + d);
        if q > 9.0e15 {
            return None;
        }
        let m = p / q;
        if m < lo {
            let k = ((lo * b - a) / (c - lo * d)).ceil() - 1.0;
            let k = k.max(1.0);
            a += k * c;
            b += k * d;
        } else if m > hi {
            let k = ((c - hi * d) / (hi * b - a)).ceil() - 1.0;
            let k = k.max(1.0);
            c += k * a;
            d += k * b;
        } else {
            return Some(m);
        }
    }
    None
}

/// Snap a split point into `[lo, hi]` using the given dense set.
pub fn snap(set: DenseSet, lo: f64, hi: f64) -> Option<f64> {
    match set {
        DenseSet::Dyadic => simplest_dyadic(lo, hi),
        DenseSet::RationalEnumeration => simplest_rational(lo, hi),
    }
}

/// Whether `x` belongs to the dense set up to binary64 representation.
pub fn contains(set: DenseSet, x: f64) -> bool {
    match set {
        DenseSet::Dyadic => x.is_finite(),
        DenseSet::RationalEnumeration => x.is_finite() && (0.0..=1.0).contains(&x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stern_brocot_prefix() {
        assert_eq!(
            stern_brocot(9),
            vec![(0, 1), (1, 1), (1, 2), (1, 3), (2, 3), (1, 4), (2, 5), (3, 5), (3, 4)]
        );
        assert_eq!(stern_brocot(100).len(), 100);
    }

    #[test]
    fn stern_brocot_is_distinct_and_reduced() {
        let v = stern_brocot(500);
        let mut seen = std::collections::HashSet::new();
        for &(p, q) in &v {
            assert!(p <= q);
            assert!(seen.insert((p, q)));
            let (mut x, mut y) = (p, q);
            while y != 0 {
                (x, y) = (y, x % y);
            }
            assert_eq!(x, 1);
        }
    }

    #[test]
    fn simplest_points() {
        assert_eq!(simplest_dyadic(0.3, 0.4), Some(0.375));
        assert_eq!(simplest_dyadic(0.2, 0.8), Some(0.5));
        assert_eq!(simplest_rational(0.3, 0.4), Some(1.0 / 3.0));
        assert_eq!(simplest_rational(0.26, 0.3), Some(2.0 / 7.0));
        let tiny = simplest_rational(1e-6, 2e-6).unwrap();
        assert!((1e-6..=2e-6).contains(&tiny));
        let near = simplest_rational(0.6180, 0.61804).unwrap();
        assert!((0.6180..=0.61804).contains(&near));
    }
}
