//! Finite unions of real intervals with exact endpoint bookkeeping.
//!
//! All Boolean operations go through a breakpoint decomposition: a canonical
//! set is fully described by its sorted endpoints, a membership flag for each
//! endpoint, and a membership flag for each open gap between consecutive
//! endpoints. No floating-point arithmetic happens on endpoints, so the
//! algebra is exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single interval with open/closed flags on each end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        (x > self.lo || (self.lo_closed && x == self.lo))
            && (x < self.hi || (self.hi_closed && x == self.hi))
    }

    /// Two-letter flag code used by the JSON descriptors: `oo`, `oc`, `co`, `cc`.
    pub fn flag_code(&self) -> &'static str {
        match (self.lo_closed, self.hi_closed) {
            (false, false) => "oo",
            (false, true) => "oc",
            (true, false) => "co",
            (true, true) => "cc",
        }
    }

    pub fn from_flag_code(lo: f64, hi: f64, code: &str) -> Result<Self> {
        let (lc, hc) = match code {
            "oo" => (false, false),
            "oc" => (false, true),
            "co" => (true, false),
            "cc" => (true, true),
            other => return Err(Error::Schema(format!("unknown interval flag code {other:?}"))),
        };
        Ok(Interval::new(lo, hi, lc, hc))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// Set-algebra operation selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetOp {
    Union,
    Intersect,
    Difference,
    SymmetricDifference,
}

impl SetOp {
    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            SetOp::Union => a || b,
            SetOp::Intersect => a && b,
            SetOp::Difference => a && !b,
            SetOp::SymmetricDifference => a != b,
        }
    }
}

/// Canonical finite union of real intervals plus isolated points.
///
/// Invariants: intervals are sorted, pairwise disjoint and non-touching
/// (touching pieces are merged), every interval has `lo < hi`, and isolated
/// points are disjoint from all intervals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RealIntervalSet {
    intervals: Vec<Interval>,
    points: Vec<f64>,
}

/// Breakpoint decomposition of a set. `gap_in[i]` is membership of the open
/// gap `(breaks[i], breaks[i+1])`; the two unbounded gaps are always empty.
#[derive(Debug, Clone)]
pub(crate) struct Segments {
    pub breaks: Vec<f64>,
    pub point_in: Vec<bool>,
    pub gap_in: Vec<bool>,
}

impl Segments {
    /// Membership of the open gap `(u, v)` whose ends are consecutive in some
    /// refinement of `self.breaks`.
    fn gap_member(&self, u: f64) -> bool {
        // number of own breakpoints <= u
        let j = self.breaks.partition_point(|&b| b <= u);
        if j == 0 || j == self.breaks.len() {
            false
        } else {
            self.gap_in[j - 1]
        }
    }

    fn point_member(&self, x: f64) -> bool {
        match self.breaks.binary_search_by(|b| b.total_cmp(&x)) {
            Ok(i) => self.point_in[i],
            Err(j) => {
                if j == 0 || j == self.breaks.len() {
                    false
                } else {
                    self.gap_in[j - 1]
                }
            }
        }
    }
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(x))
    }
}

impl RealIntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Canonicalizes an arbitrary list of intervals (degenerate `lo == hi`
    /// entries become isolated points when at least one end is closed).
    pub fn canonicalize(raw: &[Interval]) -> Result<Self> {
        Self::from_parts(raw, &[])
    }

    pub fn from_parts(raw: &[Interval], points: &[f64]) -> Result<Self> {
        for iv in raw {
            check_finite(iv.lo)?;
            check_finite(iv.hi)?;
            if iv.lo > iv.hi {
                return Err(Error::InvertedInterval { lo: iv.lo, hi: iv.hi });
            }
        }
        for &p in points {
            check_finite(p)?;
        }
        let mut breaks: Vec<f64> = raw
            .iter()
            .flat_map(|iv| [iv.lo, iv.hi])
            .chain(points.iter().copied())
            .collect();
        breaks.sort_by(|a, b| a.total_cmp(b));
        breaks.dedup();
        let k = breaks.len();
        let idx = |x: f64| {
            breaks
                .binary_search_by(|b| b.total_cmp(&x))
                .expect("endpoint is a breakpoint")
        };
        // difference arrays for coverage counts
        let mut point_cover = vec![0i64; k + 1];
        let mut gap_cover = vec![0i64; k.max(1)];
        for iv in raw {
            let i = idx(iv.lo);
            let j = idx(iv.hi);
            if i == j {
                if iv.lo_closed || iv.hi_closed {
                    point_cover[i] += 1;
                    point_cover[i + 1] -= 1;
                }
                continue;
            }
            gap_cover[i] += 1;
            gap_cover[j] -= 1;
            let ps = if iv.lo_closed { i } else { i + 1 };
            let pe = if iv.hi_closed { j + 1 } else { j };
            if ps < pe {
                point_cover[ps] += 1;
                point_cover[pe] -= 1;
            }
        }
        for &p in points {
            let i = idx(p);
            point_cover[i] += 1;
            point_cover[i + 1] -= 1;
        }
        let mut acc = 0;
        let point_in: Vec<bool> = (0..k)
            .map(|i| {
                acc += point_cover[i];
                acc > 0
            })
            .collect();
        let mut acc = 0;
        let gap_in: Vec<bool> = (0..k.saturating_sub(1))
            .map(|i| {
                acc += gap_cover[i];
                acc > 0
            })
            .collect();
        Ok(Self::from_segments(&Segments {
            breaks,
            point_in,
            gap_in,
        }))
    }

    /// Convenience constructor from closed intervals.
    pub fn from_closed(pairs: &[(f64, f64)]) -> Result<Self> {
        let raw: Vec<Interval> = pairs.iter().map(|&(a, b)| Interval::closed(a, b)).collect();
        Self::canonicalize(&raw)
    }

    pub fn single(iv: Interval) -> Result<Self> {
        Self::canonicalize(&[iv])
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.points.iter().any(|&p| p == x) || self.intervals.iter().any(|iv| iv.contains(x))
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(Interval::length).fold(0.0, |a, b| a + b)
    }

    /// Infimum and supremum, if non-empty.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        let lo = self
            .intervals
            .first()
            .map(|iv| iv.lo)
            .into_iter()
            .chain(self.points.first().copied())
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .intervals
            .last()
            .map(|iv| iv.hi)
            .into_iter()
            .chain(self.points.last().copied())
            .fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() {
            Some((lo, hi))
        } else {
            None
        }
    }

    pub(crate) fn segments(&self) -> Segments {
        let mut breaks: Vec<f64> = self
            .intervals
            .iter()
            .flat_map(|iv| [iv.lo, iv.hi])
            .chain(self.points.iter().copied())
            .collect();
        breaks.sort_by(|a, b| a.total_cmp(b));
        breaks.dedup();
        let point_in = breaks.iter().map(|&x| self.contains(x)).collect();
        let mut gap_in = Vec::with_capacity(breaks.len().saturating_sub(1));
        let mut cursor = 0;
        for w in breaks.windows(2) {
            while cursor < self.intervals.len() && self.intervals[cursor].hi <= w[0] {
                cursor += 1;
            }
            let inside = cursor < self.intervals.len()
                && self.intervals[cursor].lo <= w[0]
                && self.intervals[cursor].hi >= w[1];
            gap_in.push(inside);
        }
        Segments {
            breaks,
            point_in,
            gap_in,
        }
    }

    /// Rebuilds the canonical form from a breakpoint decomposition by
    /// scanning maximal runs of member elements.
    pub(crate) fn from_segments(seg: &Segments) -> Self {
        let k = seg.breaks.len();
        let mut intervals = Vec::new();
        let mut points = Vec::new();
        // element e: even 2i -> point i, odd 2i+1 -> gap i (between i, i+1)
        let n_elem = if k == 0 { 0 } else { 2 * k - 1 };
        let member = |e: usize| {
            if e % 2 == 0 {
                seg.point_in[e / 2]
            } else {
                seg.gap_in[e / 2]
            }
        };
        let mut e = 0;
        while e < n_elem {
            if !member(e) {
                e += 1;
                continue;
            }
            let start = e;
            while e + 1 < n_elem && member(e + 1) {
                e += 1;
            }
            let end = e;
            e += 1;
            if start == end && start % 2 == 0 {
                points.push(seg.breaks[start / 2]);
                continue;
            }
            let (lo, lo_closed) = if start % 2 == 0 {
                (seg.breaks[start / 2], true)
            } else {
                (seg.breaks[start / 2], false)
            };
            let (hi, hi_closed) = if end % 2 == 0 {
                (seg.breaks[end / 2], true)
            } else {
                (seg.breaks[end / 2 + 1], false)
            };
            intervals.push(Interval::new(lo, hi, lo_closed, hi_closed));
        }
        RealIntervalSet { intervals, points }
    }

    pub fn combine(&self, other: &Self, op: SetOp) -> Self {
        let sa = self.segments();
        let sb = other.segments();
        let mut breaks: Vec<f64> = sa.breaks.iter().chain(sb.breaks.iter()).copied().collect();
        breaks.sort_by(|a, b| a.total_cmp(b));
        breaks.dedup();
        let point_in = breaks
            .iter()
            .map(|&x| op.apply(sa.point_member(x), sb.point_member(x)))
            .collect();
        let gap_in = breaks
            .windows(2)
            .map(|w| op.apply(sa.gap_member(w[0]), sb.gap_member(w[0])))
            .collect();
        Self::from_segments(&Segments {
            breaks,
            point_in,
            gap_in,
        })
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, SetOp::Union)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.combine(other, SetOp::Intersect)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, SetOp::Difference)
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        self.combine(other, SetOp::SymmetricDifference)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// Topological closure.
    pub fn closure(&self) -> Self {
        let raw: Vec<Interval> = self
            .intervals
            .iter()
            .map(|iv| Interval::closed(iv.lo, iv.hi))
            .collect();
        Self::from_parts(&raw, &self.points).expect("canonical endpoints are finite")
    }

    /// Essential closure: points every neighbourhood of which meets the set in
    /// positive measure. For a finite union this is the closure of the
    /// nondegenerate intervals; isolated points drop out.
    pub fn essential_closure(&self) -> Self {
        let raw: Vec<Interval> = self
            .intervals
            .iter()
            .map(|iv| Interval::closed(iv.lo, iv.hi))
            .collect();
        Self::canonicalize(&raw).expect("canonical endpoints are finite")
    }

    /// Minkowski enlargement by `slack >= 0` (closed).
    pub fn expand(&self, slack: f64) -> Self {
        let raw: Vec<Interval> = self
            .intervals
            .iter()
            .map(|iv| Interval::closed(iv.lo - slack, iv.hi + slack))
            .chain(self.points.iter().map(|&p| Interval::closed(p - slack, p + slack)))
            .collect();
        Self::canonicalize(&raw).expect("finite")
    }

    /// `self ⊆ other` after enlarging `other` by `slack` on each side.
    pub fn is_subset_with_slack(&self, other: &Self, slack: f64) -> bool {
        self.is_subset(&other.expand(slack))
    }

    /// Distance from `x` to the closure of the set.
    pub fn distance_to(&self, x: f64) -> f64 {
        let from_iv = self
            .intervals
            .iter()
            .map(|iv| {
                if x < iv.lo {
                    iv.lo - x
                } else if x > iv.hi {
                    x - iv.hi
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min);
        let from_pts = self
            .points
            .iter()
            .map(|&p| (p - x).abs())
            .fold(f64::INFINITY, f64::min);
        from_iv.min(from_pts)
    }

    /// Hausdorff distance between the closures of two non-empty sets
    /// (infinite if exactly one is empty, zero if both are).
    pub fn hausdorff(&self, other: &Self) -> f64 {
        match (self.is_empty(), other.is_empty()) {
            (true, true) => return 0.0,
            (true, false) | (false, true) => return f64::INFINITY,
            _ => {}
        }
        self.directed_hausdorff(other).max(other.directed_hausdorff(self))
    }

    fn directed_hausdorff(&self, other: &Self) -> f64 {
        let mut candidates: Vec<f64> = self
            .intervals
            .iter()
            .flat_map(|iv| [iv.lo, iv.hi])
            .chain(self.points.iter().copied())
            .collect();
        // farthest points inside our intervals sit at midpoints of the other's gaps
        let comps = other.closure();
        let mut ends: Vec<(f64, f64)> = comps
            .intervals
            .iter()
            .map(|iv| (iv.lo, iv.hi))
            .chain(comps.points.iter().map(|&p| (p, p)))
            .collect();
        ends.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in ends.windows(2) {
            let mid = 0.5 * (w[0].1 + w[1].0);
            if self.intervals.iter().any(|iv| iv.lo <= mid && mid <= iv.hi) {
                candidates.push(mid);
            }
        }
        candidates
            .into_iter()
            .map(|x| other.distance_to(x))
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for RealIntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let mut parts: Vec<(f64, String)> = self
            .intervals
            .iter()
            .map(|iv| (iv.lo, iv.to_string()))
            .chain(self.points.iter().map(|&p| (p, format!("{{{p}}}"))))
            .collect();
        parts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let joined: Vec<String> = parts.into_iter().map(|(_, s)| s).collect();
        write!(f, "{}", joined.join("∪"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_neighbours_stay_separate() {
        let s = RealIntervalSet::canonicalize(&[Interval::open(0.0, 1.0), Interval::open(1.0, 2.0)])
            .unwrap();
        assert_eq!(s.intervals(), &[Interval::open(0.0, 1.0), Interval::open(1.0, 2.0)]);
        assert!(!s.contains(1.0));
    }

    #[test]
    fn overlapping_closed_merge() {
        let s = RealIntervalSet::from_closed(&[(0.0, 2.0), (1.0, 3.0)]).unwrap();
        assert_eq!(s.intervals(), &[Interval::closed(0.0, 3.0)]);
    }

    #[test]
    fn degenerate_interval_becomes_point() {
        let s = RealIntervalSet::from_closed(&[(5.0, 5.0)]).unwrap();
        assert!(s.intervals().is_empty());
        assert_eq!(s.points(), &[5.0]);
    }

    #[test]
    fn touching_half_open_merge() {
        let s = RealIntervalSet::canonicalize(&[
            Interval::new(0.0, 1.0, true, false),
            Interval::new(1.0, 2.0, true, false),
        ])
        .unwrap();
        assert_eq!(s.intervals(), &[Interval::new(0.0, 2.0, true, false)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            RealIntervalSet::from_closed(&[(2.0, 1.0)]),
            Err(Error::InvertedInterval { .. })
        ));
        assert!(matches!(
            RealIntervalSet::from_closed(&[(0.0, f64::INFINITY)]),
            Err(Error::NonFinite(_))
        ));
        assert!(RealIntervalSet::from_parts(&[], &[f64::NAN]).is_err());
    }

    #[test]
    fn difference_leaves_endpoint() {
        let a = RealIntervalSet::from_closed(&[(0.0, 2.0)]).unwrap();
        let b = RealIntervalSet::single(Interval::open(1.0, 2.0)).unwrap();
        let d = a.difference(&b);
        assert_eq!(d.intervals(), &[Interval::closed(0.0, 1.0)]);
        assert_eq!(d.points(), &[2.0]);
    }

    #[test]
    fn symdiff_self_is_empty() {
        let a = RealIntervalSet::from_closed(&[(0.0, 1.0)]).unwrap();
        assert!(a.symmetric_difference(&a).is_empty());
    }

    #[test]
    fn closed_meets_open_at_single_point() {
        let a = RealIntervalSet::from_closed(&[(0.0, 1.0)]).unwrap();
        let b = RealIntervalSet::single(Interval::open(1.0, 2.0)).unwrap();
        let i = a.intersect(&b);
        assert!(i.is_empty());
        assert_eq!(i.measure(), 0.0);
        let c = RealIntervalSet::from_closed(&[(1.0, 2.0)]).unwrap();
        assert_eq!(a.intersect(&c).points(), &[1.0]);
    }

    #[test]
    fn essential_closure_drops_points() {
        let mut a = RealIntervalSet::from_closed(&[(0.0, 1.0)]).unwrap();
        a = a.union(&RealIntervalSet::from_parts(&[], &[2.0]).unwrap());
        let e = a.essential_closure();
        assert_eq!(e, RealIntervalSet::from_closed(&[(0.0, 1.0)]).unwrap());
        let open_pair =
            RealIntervalSet::canonicalize(&[Interval::open(0.0, 1.0), Interval::open(1.0, 2.0)])
                .unwrap();
        assert_eq!(
            open_pair.essential_closure(),
            RealIntervalSet::from_closed(&[(0.0, 2.0)]).unwrap()
        );
    }

    #[test]
    fn hausdorff_of_shifted_intervals() {
        let a = RealIntervalSet::from_closed(&[(0.0, 1.0)]).unwrap();
        let b = RealIntervalSet::from_closed(&[(0.25, 1.5)]).unwrap();
        assert_eq!(a.hausdorff(&b), 0.5);
        let c = RealIntervalSet::from_closed(&[(0.0, 0.2), (0.8, 1.0)]).unwrap();
        assert!((a.hausdorff(&c) - 0.3).abs() < 1e-15);
    }
}
