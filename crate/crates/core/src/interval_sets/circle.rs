//! Finite unions of arcs on the unit circle.
//!
//! Internally a circle set is a line set contained in `[0, 2π)`. An arc that
//! wraps through angle 0 is split at the cut once, when it is built, so the
//! Boolean algebra reuses the exact line algebra. The presentation (`arcs()`)
//! glues the two pieces back into a single arc crossing 0.

use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Error, Result};

use super::line::{Interval, RealIntervalSet, SetOp};

/// An arc from `start` counter-clockwise to `end`, with `start ∈ [0, 2π)` and
/// `start < end ≤ start + 2π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub start: f64,
    pub end: f64,
    pub start_closed: bool,
    pub end_closed: bool,
}

impl Arc {
    pub fn new(start: f64, end: f64, start_closed: bool, end_closed: bool) -> Self {
        Arc {
            start,
            end,
            start_closed,
            end_closed,
        }
    }

    pub fn closed(start: f64, end: f64) -> Self {
        Self::new(start, end, true, true)
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Shortest angular distance between two angles.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = normalize_angle(a - b);
    d.min(TAU - d)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CircleArcSet {
    inner: RealIntervalSet,
}

impl CircleArcSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        CircleArcSet {
            inner: RealIntervalSet::single(Interval::new(0.0, TAU, true, false)).unwrap(),
        }
    }

    /// Builds a set from raw arcs `(θ₁, θ₂)` with `0 ≤ θ₂ − θ₁ ≤ 2π` plus points.
    /// Zero-length arcs are points (when some end is closed).
    pub fn from_parts(raw: &[Arc], points: &[f64]) -> Result<Self> {
        let mut pieces = Vec::new();
        let mut pts = Vec::new();
        for a in raw {
            for v in [a.start, a.end] {
                if !v.is_finite() {
                    return Err(Error::NonFinite(v));
                }
            }
            let len = a.end - a.start;
            if !(0.0..=TAU).contains(&len) {
                return Err(Error::InvalidArc(len));
            }
            let s = normalize_angle(a.start);
            if len == 0.0 {
                if a.start_closed || a.end_closed {
                    pts.push(s);
                }
                continue;
            }
            let e = s + len;
            if e < TAU {
                pieces.push(Interval::new(s, e, a.start_closed, a.end_closed));
            } else {
                pieces.push(Interval::new(s, TAU, a.start_closed, false));
                let rest = e - TAU;
                if rest > 0.0 {
                    let rest = rest.min(s);
                    pieces.push(Interval::new(0.0, rest, true, a.end_closed));
                } else if a.end_closed {
                    pts.push(0.0);
                }
            }
        }
        for &p in points {
            if !p.is_finite() {
                return Err(Error::NonFinite(p));
            }
            pts.push(normalize_angle(p));
        }
        Ok(CircleArcSet {
            inner: RealIntervalSet::from_parts(&pieces, &pts)?,
        })
    }

    pub fn from_closed_arcs(arcs: &[(f64, f64)]) -> Result<Self> {
        let raw: Vec<Arc> = arcs.iter().map(|&(a, b)| Arc::closed(a, b)).collect();
        Self::from_parts(&raw, &[])
    }

    /// The `[0, 2π)` line representation.
    pub fn as_cut_line(&self) -> &RealIntervalSet {
        &self.inner
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.inner.intervals() == [Interval::new(0.0, TAU, true, false)]
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.inner.contains(normalize_angle(theta))
    }

    pub fn measure(&self) -> f64 {
        self.inner.measure()
    }

    fn wraps(&self) -> bool {
        let ivs = self.inner.intervals();
        let tail = ivs.last().map(|iv| iv.hi == TAU).unwrap_or(false);
        let head = self.inner.contains(0.0);
        tail && head && !self.is_full()
    }

    /// Canonical arcs; an arc crossing angle 0 is reported once with
    /// `start` in `[0, 2π)` and `end > 2π`.
    pub fn arcs(&self) -> Vec<Arc> {
        if self.is_full() {
            return vec![Arc::new(0.0, TAU, true, true)];
        }
        let ivs = self.inner.intervals();
        let mut out: Vec<Arc> = ivs
            .iter()
            .map(|iv| Arc::new(iv.lo, iv.hi, iv.lo_closed, iv.hi_closed))
            .collect();
        if self.wraps() {
            let last = out.pop().unwrap();
            let head_iv = ivs.first().filter(|iv| iv.lo == 0.0 && iv.lo_closed);
            if let Some(h) = head_iv {
                if out.first().map(|a| a.start == 0.0).unwrap_or(false) {
                    out.remove(0);
                }
                out.push(Arc::new(last.start, TAU + h.hi, last.start_closed, h.hi_closed));
            } else {
                // only the point 0 glues on
                out.push(Arc::new(last.start, TAU, last.start_closed, true));
            }
        }
        out
    }

    /// Isolated points that are not the glued endpoint of a wrapping arc.
    pub fn points(&self) -> Vec<f64> {
        let wraps = self.wraps();
        self.inner
            .points()
            .iter()
            .copied()
            .filter(|&p| !(wraps && p == 0.0))
            .collect()
    }

    pub fn combine(&self, other: &Self, op: SetOp) -> Self {
        CircleArcSet {
            inner: self.inner.combine(&other.inner, op),
        }
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

    fn glue_cut(line: RealIntervalSet) -> RealIntervalSet {
        // a closed end at 2π is the point 0 on the circle
        let ivs: Vec<Interval> = line
            .intervals()
            .iter()
            .map(|iv| {
                if iv.hi == TAU {
                    Interval::new(iv.lo, iv.hi, iv.lo_closed, false)
                } else {
                    *iv
                }
            })
            .collect();
        let mut pts: Vec<f64> = line.points().iter().copied().filter(|&p| p < TAU).collect();
        if line.contains(TAU) {
            pts.push(0.0);
        }
        RealIntervalSet::from_parts(&ivs, &pts).expect("finite")
    }

    pub fn closure(&self) -> Self {
        CircleArcSet {
            inner: Self::glue_cut(self.inner.closure()),
        }
    }

    pub fn essential_closure(&self) -> Self {
        if self.is_full() {
            return self.clone();
        }
        CircleArcSet {
            inner: Self::glue_cut(self.inner.essential_closure()),
        }
    }

    /// Closed enlargement by `slack` radians on each side.
    pub fn expand(&self, slack: f64) -> Self {
        if self.is_full() {
            return self.clone();
        }
        let mut raw: Vec<Arc> = self
            .arcs()
            .iter()
            .map(|a| {
                let len = (a.length() + 2.0 * slack).min(TAU);
                Arc::closed(a.start - slack, a.start - slack + len)
            })
            .collect();
        raw.extend(
            self.points()
                .iter()
                .map(|&p| Arc::closed(p - slack, p - slack + (2.0 * slack).min(TAU))),
        );
        Self::from_parts(&raw, &[]).expect("finite")
    }

    pub fn is_subset_with_slack(&self, other: &Self, slack: f64) -> bool {
        self.is_subset(&other.expand(slack))
    }

    /// Angular distance from `theta` to the closure of the set.
    pub fn distance_to(&self, theta: f64) -> f64 {
        if self.contains(theta) {
            return 0.0;
        }
        let t = normalize_angle(theta);
        let arcs = self.arcs();
        let from_arcs = arcs
            .iter()
            .map(|a| {
                let rel = normalize_angle(t - a.start);
                if rel <= a.length() {
                    0.0
                } else {
                    (rel - a.length()).min(TAU - rel)
                }
            })
            .fold(f64::INFINITY, f64::min);
        let from_pts = self
            .points()
            .iter()
            .map(|&p| angular_distance(p, t))
            .fold(f64::INFINITY, f64::min);
        from_arcs.min(from_pts)
    }

    /// Hausdorff distance between closures in the angular metric.
    pub fn hausdorff(&self, other: &Self) -> f64 {
        match (self.is_empty(), other.is_empty()) {
            (true, true) => return 0.0,
            (true, false) | (false, true) => return f64::INFINITY,
            _ => {}
        }
        self.directed(other).max(other.directed(self))
    }

    fn directed(&self, other: &Self) -> f64 {
        let mut cands: Vec<f64> = self
            .arcs()
            .iter()
            .flat_map(|a| [a.start, a.end])
            .chain(self.points())
            .collect();
        // midpoints of the complementary arcs of `other`
        let mut comps: Vec<(f64, f64)> = other
            .arcs()
            .iter()
            .map(|a| (a.start, a.end))
            .chain(other.points().iter().map(|&p| (p, p)))
            .collect();
        comps.sort_by(|a, b| a.0.total_cmp(&b.0));
        for i in 0..comps.len() {
            let (_, e) = comps[i];
            let next = if i + 1 < comps.len() {
                comps[i + 1].0
            } else {
                comps[0].0 + TAU
            };
            if next > e {
                let mid = 0.5 * (e + next);
                if self.closure().contains(mid) {
                    cands.push(mid);
                }
            }
        }
        cands
            .into_iter()
            .map(|t| other.distance_to(t))
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for CircleArcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        if self.is_full() {
            return write!(f, "∂D");
        }
        let mut parts: Vec<String> = self
            .arcs()
            .iter()
            .map(|a| {
                let l = if a.start_closed { '[' } else { '(' };
                let r = if a.end_closed { ']' } else { ')' };
                format!("Arc{l}{:.6}, {:.6}{r}", a.start, a.end)
            })
            .collect();
        parts.extend(self.points().iter().map(|p| format!("{{{p:.6}}}")));
        write!(f, "{}", parts.join("∪"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrapping_arc_round_trips() {
        let s = CircleArcSet::from_closed_arcs(&[(5.0, 7.0)]).unwrap();
        let arcs = s.arcs();
        assert_eq!(arcs.len(), 1);
        assert_eq!(arcs[0].start, 5.0);
        assert!((arcs[0].end - 7.0).abs() < 1e-12);
        assert!(s.contains(0.0));
        assert!(s.contains(6.5));
        assert!(!s.contains(2.0));
        assert!((s.measure() - 2.0).abs() < 1e-12);
        assert!(s.points().is_empty());
    }

    #[test]
    fn negative_angles_reduce() {
        let s = CircleArcSet::from_closed_arcs(&[(-1.0, 1.0)]).unwrap();
        assert!(s.contains(0.0) && s.contains(TAU - 0.5) && s.contains(0.5));
        assert_eq!(s.arcs().len(), 1);
    }

    #[test]
    fn full_circle_from_two_halves() {
        let s = CircleArcSet::from_closed_arcs(&[(0.0, PI), (PI, TAU)]).unwrap();
        assert!(s.is_full());
        assert!((s.measure() - TAU).abs() < 1e-15);
    }

    #[test]
    fn full_minus_point() {
        let p = CircleArcSet::from_parts(&[], &[1.0]).unwrap();
        let d = CircleArcSet::full().difference(&p);
        let arcs = d.arcs();
        assert_eq!(arcs.len(), 1);
        assert_eq!(arcs[0].start, 1.0);
        assert!(!arcs[0].start_closed && !arcs[0].end_closed);
        assert!((arcs[0].length() - TAU).abs() < 1e-12);
        assert!(d.essential_closure().is_full());
    }

    #[test]
    fn rejects_overlong_arc() {
        assert!(matches!(
            CircleArcSet::from_closed_arcs(&[(0.0, 7.0)]),
            Err(Error::InvalidArc(_))
        ));
    }

    #[test]
    fn essential_closure_of_open_wrapping_arc() {
        let s = CircleArcSet::from_parts(&[Arc::new(6.0, TAU, false, false)], &[]).unwrap();
        let e = s.essential_closure();
        assert!(e.contains(0.0));
        assert!(e.contains(6.0));
        let arcs = e.arcs();
        assert_eq!(arcs.len(), 1);
        assert!(arcs[0].end_closed && arcs[0].start_closed);
    }

    #[test]
    fn hausdorff_across_cut() {
        let a = CircleArcSet::from_closed_arcs(&[(TAU - 0.1, TAU + 0.1)]).unwrap();
        let b = CircleArcSet::from_closed_arcs(&[(TAU - 0.2, TAU + 0.1)]).unwrap();
        assert!((a.hausdorff(&b) - 0.1).abs() < 1e-12);
    }
}
