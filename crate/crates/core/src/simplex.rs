//! Points, metric and counting on the discrete simplex `S_{q,N}`.
//!
//! A point is an occupancy vector `(n_0, ..., n_{q-1})` of nonnegative
//! integers summing to `N`. The metric is the halved l1 distance, which is
//! always an integer on a fixed simplex; the diameter of `S_{q,N}` is `N`.
//!
//! Enumeration order is lexicographic over the coordinate vector, first
//! coordinate most significant: for `q = 2, N = 2` the order is
//! `(0,2), (1,1), (2,0)`. Every brute-force routine in the crate relies on
//! this order being fixed.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default limit on the number of points an enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimplexShape {
    pub q: usize,
    pub n: u32,
}

impl SimplexShape {
    pub fn new(q: usize, n: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::domain("number of modes q must be at least 1"));
        }
        Ok(SimplexShape { q, n })
    }

    /// Shape with `q = floor(alpha * N)` modes.
    pub fn from_alpha(alpha: f64, n: u32) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
        }
        let q = (alpha * n as f64).floor() as usize;
        SimplexShape::new(q, n)
    }
}

impl fmt::Display for SimplexShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S(q={}, N={})", self.q, self.n)
    }
}

/// Occupancy vector on a simplex, with its total excitation cached.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplexPoint {
    coords: Vec<u32>,
    total: u32,
}

impl SimplexPoint {
    pub fn from_counts(coords: Vec<u32>) -> Self {
        let total = coords.iter().sum();
        SimplexPoint { coords, total }
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn q(&self) -> usize {
        self.coords.len()
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn shape(&self) -> SimplexShape {
        SimplexShape {
            q: self.coords.len(),
            n: self.total,
        }
    }

    pub fn into_coords(self) -> Vec<u32> {
        self.coords
    }

    /// Number of nonzero coordinates.
    pub fn support_size(&self) -> usize {
        self.coords.iter().filter(|&&c| c != 0).count()
    }

    pub fn inf_norm(&self) -> u32 {
        self.coords.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for SimplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Validates a signed coordinate list and builds a point.
pub fn make_point(coords: &[i64]) -> Result<SimplexPoint> {
    if coords.is_empty() {
        return Err(Error::domain("a point needs at least one coordinate"));
    }
    let mut out = Vec::with_capacity(coords.len());
    for (index, &value) in coords.iter().enumerate() {
        if value < 0 {
            return Err(Error::NegativeEntry { index, value });
        }
        let v = u32::try_from(value)
            .map_err(|_| Error::domain(format!("entry {value} at index {index} is too large")))?;
        out.push(v);
    }
    Ok(SimplexPoint::from_counts(out))
}

/// Per-mode photon losses `r`, labelling the Kraus operator `A_r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LossPattern(SimplexPoint);

impl LossPattern {
    pub fn new(r: Vec<u32>) -> Self {
        LossPattern(SimplexPoint::from_counts(r))
    }

    pub fn zero(q: usize) -> Self {
        LossPattern::new(vec![0; q])
    }

    pub fn r(&self) -> &[u32] {
        self.0.coords()
    }

    pub fn weight(&self) -> u32 {
        self.0.total()
    }

    pub fn q(&self) -> usize {
        self.0.q()
    }

    /// Applies a coordinate permutation: entry `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> LossPattern {
        let mut r = vec![0; self.q()];
        for (i, &v) in self.r().iter().enumerate() {
            r[perm[i]] = v;
        }
        LossPattern::new(r)
    }
}

impl From<SimplexPoint> for LossPattern {
    fn from(p: SimplexPoint) -> Self {
        LossPattern(p)
    }
}

impl fmt::Display for LossPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for SimplexPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimplexPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<u32>::deserialize(d)?;
        Ok(SimplexPoint::from_counts(coords))
    }
}

/// Halved l1 distance `d(a, b) = 1/2 * sum |a_i - b_i|`.
pub fn l1_distance(a: &SimplexPoint, b: &SimplexPoint) -> Result<u32> {
    if a.q() != b.q() || a.total() != b.total() {
        return Err(Error::ShapeMismatch(format!(
            "{} vs {}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(l1_distance_unchecked(a.coords(), b.coords()))
}

/// Distance between two coordinate slices known to share a shape.
#[inline]
pub(crate) fn l1_distance_unchecked(a: &[u32], b: &[u32]) -> u32 {
    let s: u64 = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| x.abs_diff(y) as u64)
        .sum();
    (s / 2) as u32
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `|S_{q,N}| = binom(N+q-1, q-1)`.
pub fn simplex_size(shape: SimplexShape) -> BigUint {
    binomial(shape.n as u64 + shape.q as u64 - 1, shape.q as u64 - 1)
}

/// log2 of a big integer, accurate to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map(f64::log2).unwrap_or(f64::INFINITY);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.log2() + shift as f64
}

/// Lexicographic stream over all points of a simplex.
#[derive(Debug, Clone)]
pub struct SimplexIter {
    next: Option<Vec<u32>>,
}

impl SimplexIter {
    pub(crate) fn new(shape: SimplexShape) -> Self {
        let mut first = vec![0; shape.q];
        first[shape.q - 1] = shape.n;
        SimplexIter { next: Some(first) }
    }
}

impl Iterator for SimplexIter {
    type Item = SimplexPoint;

    fn next(&mut self) -> Option<SimplexPoint> {
        let current = self.next.take()?;
        let q = current.len();
        // Successor: bump the rightmost coordinate that still has mass to its
        // right, and push the remaining tail mass into the last coordinate.
        let mut tail = current[q - 1];
        let mut i = q.wrapping_sub(1);
        while i > 0 {
            i -= 1;
            if tail > 0 {
                let mut succ = current.clone();
                succ[i] += 1;
                for c in succ.iter_mut().skip(i + 1) {
                    *c = 0;
                }
                succ[q - 1] = tail - 1;
                self.next = Some(succ);
                break;
            }
            tail += current[i];
        }
        Some(SimplexPoint::from_counts(current))
    }
}

/// Enumerates `S_{q,N}` in lexicographic order, refusing when the simplex
/// holds more than `cap` points.
pub fn enumerate_simplex(shape: SimplexShape, cap: u64) -> Result<SimplexIter> {
    let size = simplex_size(shape);
    if size > BigUint::from(cap) {
        return Err(Error::CapExceeded {
            what: "simplex enumeration",
            size: size.to_string(),
            cap,
            hint: "",
        });
    }
    Ok(SimplexIter::new(shape))
}

/// Upper bound on `|B(center, radius)|`:
/// `sum_{j=0}^{radius} binom(j+m-1, m-1) * binom(j+q-1, q-1)` with `m` the
/// support size of the center.
pub fn ball_volume_bound(center: &SimplexPoint, radius: u32) -> BigUint {
    let m = center.support_size() as u64;
    let q = center.q() as u64;
    let mut acc = BigUint::zero();
    for j in 0..=radius as u64 {
        // binom(j-1, -1) is 1 at j = 0 and 0 otherwise (empty support).
        let inner = if m == 0 {
            if j == 0 {
                BigUint::one()
            } else {
                BigUint::zero()
            }
        } else {
            binomial(j + m - 1, m - 1)
        };
        acc += inner * binomial(j + q - 1, q - 1);
    }
    acc
}

/// `sum_{n in S_{q,N}} prod_i binom(n_i, r_i) = binom(N+q-1, |r|+q-1)`.
pub fn sum_prod_binom(shape: SimplexShape, r: &LossPattern) -> Result<BigUint> {
    if r.q() != shape.q {
        return Err(Error::ShapeMismatch(format!(
            "pattern has {} modes, simplex has {}",
            r.q(),
            shape.q
        )));
    }
    let q = shape.q as u64;
    Ok(binomial(
        shape.n as u64 + q - 1,
        r.weight() as u64 + q - 1,
    ))
}

/// All patterns of weight at most `t`, weight-major and lexicographic within
/// a weight.
pub fn loss_patterns(q: usize, t: u32) -> Vec<LossPattern> {
    let mut out = Vec::new();
    for w in 0..=t {
        out.extend(SimplexIter::new(SimplexShape { q, n: w }).map(LossPattern::from));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[u32]) -> SimplexPoint {
        SimplexPoint::from_counts(c.to_vec())
    }

    #[test]
    fn make_point_cases() {
        let p = make_point(&[0, 0, 0]).unwrap();
        assert_eq!(p.total(), 0);
        let p = make_point(&[2, 1, 0]).unwrap();
        assert_eq!((p.total(), p.q()), (3, 3));
        match make_point(&[-1, 2]) {
            Err(Error::NegativeEntry { index: 0, value: -1 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn distance_examples() {
        let a = pt(&[2, 1, 0]);
        assert_eq!(l1_distance(&a, &a).unwrap(), 0);
        assert_eq!(l1_distance(&pt(&[3, 0]), &pt(&[0, 3])).unwrap(), 3);
        assert_eq!(l1_distance(&a, &pt(&[0, 1, 2])).unwrap(), 2);
        assert!(l1_distance(&a, &pt(&[1, 1])).is_err());
        assert!(l1_distance(&a, &pt(&[1, 1, 0])).is_err());
    }

    #[test]
    fn sizes() {
        assert_eq!(simplex_size(SimplexShape { q: 2, n: 3 }), BigUint::from(4u32));
        for n in 0..10 {
            assert_eq!(simplex_size(SimplexShape { q: 1, n }), BigUint::one());
        }
        let s = SimplexShape { q: 3, n: 2 };
        assert_eq!(simplex_size(s), BigUint::from(6u32));
        assert_eq!(enumerate_simplex(s, 100).unwrap().count(), 6);
    }

    #[test]
    fn enumeration_order() {
        let pts: Vec<_> = enumerate_simplex(SimplexShape { q: 2, n: 2 }, 10)
            .unwrap()
            .map(SimplexPoint::into_coords)
            .collect();
        assert_eq!(pts, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        let one: Vec<_> = enumerate_simplex(SimplexShape { q: 1, n: 5 }, 10)
            .unwrap()
            .collect();
        assert_eq!(one, vec![pt(&[5])]);
        let all: Vec<_> = enumerate_simplex(SimplexShape { q: 3, n: 3 }, 100)
            .unwrap()
            .collect();
        let uniq: std::collections::BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(all.len(), 10);
        assert_eq!(uniq.len(), 10);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn enumeration_cap_refuses() {
        let err = enumerate_simplex(SimplexShape { q: 10, n: 10 }, 1000).unwrap_err();
        assert!(err.to_string().contains("92378"), "{err}");
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn support_and_norm() {
        let z = pt(&[0, 0, 0]);
        assert_eq!((z.support_size(), z.inf_norm()), (0, 0));
        let p = pt(&[2, 1, 0]);
        assert_eq!((p.support_size(), p.inf_norm()), (2, 2));
    }

    #[test]
    fn ball_bound_examples() {
        assert_eq!(ball_volume_bound(&pt(&[2, 1, 0]), 0), BigUint::one());
        let c = pt(&[1, 1]);
        let exact = enumerate_simplex(c.shape(), 10)
            .unwrap()
            .filter(|p| l1_distance(p, &c).unwrap() <= 1)
            .count();
        assert_eq!(exact, 3);
        assert!(ball_volume_bound(&c, 1) >= BigUint::from(exact));
        let c = pt(&[3, 1, 2]);
        let mut prev = BigUint::zero();
        for r in 0..=6 {
            let b = ball_volume_bound(&c, r);
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn sum_prod_binom_examples() {
        let s = SimplexShape { q: 2, n: 2 };
        assert_eq!(sum_prod_binom(s, &LossPattern::new(vec![1, 0])).unwrap(), BigUint::from(3u32));
        assert_eq!(sum_prod_binom(s, &LossPattern::new(vec![1, 1])).unwrap(), BigUint::one());
        assert_eq!(sum_prod_binom(s, &LossPattern::zero(2)).unwrap(), simplex_size(s));
    }

    #[test]
    fn pattern_order_is_weight_major() {
        let pats = loss_patterns(2, 2);
        let r: Vec<_> = pats.iter().map(|p| p.r().to_vec()).collect();
        assert_eq!(
            r,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2], vec![1, 1], vec![2, 0]]
        );
    }

    #[test]
    fn big_log2() {
        assert!((log2_big(&BigUint::from(1024u32)) - 10.0).abs() < 1e-12);
        let big = BigUint::one() << 5000u32;
        assert!((log2_big(&big) - 5000.0).abs() < 1e-9);
    }
}
