//! Uniform sampling grids and the conversion of per-point flags into sets.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_sets::{Arc, CircleArcSet, Interval, RealIntervalSet};

/// Inclusive uniform grid `lo, lo + h, ..., hi` with `n ≥ 2` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || !(hi > lo) || n < 2 {
            return Err(Error::InvalidGrid(format!("{lo}:{hi}:{n}")));
        }
        Ok(Grid { lo, hi, n })
    }

    /// Parses `a:b:n`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidGrid(format!("expected a:b:n, got {spec:?}")));
        }
        let bad = || Error::InvalidGrid(format!("expected a:b:n, got {spec:?}"));
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        Self::new(lo, hi, n)
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }
}

/// `n` equally spaced angles `2πj/n`, treated cyclically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularGrid {
    pub n: usize,
}

impl AngularGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("angular grid needs >= 2 points, got {n}")));
        }
        Ok(AngularGrid { n })
    }

    pub fn step(&self) -> f64 {
        TAU / self.n as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }
}

/// Maximal runs `(start, end)` of `true` flags, inclusive indices.
pub fn runs(flags: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < flags.len() {
        if !flags[i] {
            i += 1;
            continue;
        }
        let s = i;
        while i + 1 < flags.len() && flags[i + 1] {
            i += 1;
        }
        out.push((s, i));
        i += 1;
    }
    out
}

/// Closed hull of each run; single-point runs become isolated points.
pub fn hull_line(xs: &[f64], flags: &[bool]) -> RealIntervalSet {
    let mut ivs = Vec::new();
    let mut pts = Vec::new();
    for (s, e) in runs(flags) {
        if s == e {
            pts.push(xs[s]);
        } else {
            ivs.push(Interval::closed(xs[s], xs[e]));
        }
    }
    RealIntervalSet::from_parts(&ivs, &pts).expect("grid points are finite")
}

/// Line hull with run edges moved to a bisection estimate of where `inside`
/// switches between neighbouring grid points.
pub fn hull_line_refined<F>(xs: &[f64], flags: &[bool], inside: F, iters: usize) -> RealIntervalSet
where
    F: Fn(f64) -> bool + Sync,
{
    let mut ivs = Vec::new();
    let mut pts = Vec::new();
    let edge = |a: f64, b: f64| {
        // `a` inside, `b` outside
        let (mut inn, mut out) = (a, b);
        for _ in 0..iters {
            let mid = 0.5 * (inn + out);
            if inside(mid) {
                inn = mid;
            } else {
                out = mid;
            }
        }
        0.5 * (inn + out)
    };
    for (s, e) in runs(flags) {
        if s == e {
            // one flagged sample carries no measure
            pts.push(xs[s]);
            continue;
        }
        let lo = if s > 0 { edge(xs[s], xs[s - 1]) } else { xs[s] };
        let hi = if e + 1 < xs.len() { edge(xs[e], xs[e + 1]) } else { xs[e] };
        ivs.push(Interval::closed(lo.min(hi), hi.max(lo)));
    }
    RealIntervalSet::from_parts(&ivs, &pts).expect("grid points are finite")
}

/// Cyclic runs over an angular grid; an all-true grid is the full circle.
pub fn hull_circle(grid: &AngularGrid, flags: &[bool]) -> CircleArcSet {
    let n = flags.len();
    if n == 0 || flags.iter().all(|&f| !f) {
        return CircleArcSet::empty();
    }
    if flags.iter().all(|&f| f) {
        return CircleArcSet::full();
    }
    // rotate so that index `r` is the first false
    let r = flags.iter().position(|&f| !f).unwrap();
    let mut arcs = Vec::new();
    let mut pts = Vec::new();
    let mut k = 0;
    while k < n {
        let i = (r + k) % n;
        if !flags[i] {
            k += 1;
            continue;
        }
        let s = k;
        while k + 1 < n && flags[(r + k + 1) % n] {
            k += 1;
        }
        let si = (r + s) % n;
        if s == k {
            pts.push(grid.point(si));
        } else {
            let start = grid.point(si);
            let len = (k - s) as f64 * grid.step();
            arcs.push(Arc::closed(start, start + len));
        }
        k += 1;
    }
    CircleArcSet::from_parts(&arcs, &pts).expect("finite")
}

/// Circle hull with bisected run edges, mirroring [`hull_line_refined`].
pub fn hull_circle_refined<F>(grid: &AngularGrid, flags: &[bool], inside: F, iters: usize) -> CircleArcSet
where
    F: Fn(f64) -> bool + Sync,
{
    let n = flags.len();
    if n == 0 || flags.iter().all(|&f| !f) {
        return CircleArcSet::empty();
    }
    if flags.iter().all(|&f| f) {
        return CircleArcSet::full();
    }
    let h = grid.step();
    let edge = |a: f64, b: f64| {
        let (mut inn, mut out) = (a, b);
        for _ in 0..iters {
            let mid = 0.5 * (inn + out);
            if inside(mid) {
                inn = mid;
            } else {
                out = mid;
            }
        }
        0.5 * (inn + out)
    };
    let r = flags.iter().position(|&f| !f).unwrap();
    let mut arcs = Vec::new();
    let mut pts = Vec::new();
    let mut k = 0;
    while k < n {
        if !flags[(r + k) % n] {
            k += 1;
            continue;
        }
        let s = k;
        while k + 1 < n && flags[(r + k + 1) % n] {
            k += 1;
        }
        // unwrapped angles relative to the rotation origin
        let base = grid.point(r);
        let a0 = base + s as f64 * h;
        let a1 = base + k as f64 * h;
        if s == k {
            // one flagged sample carries no measure
            pts.push(a0);
            k += 1;
            continue;
        }
        let lo = edge(a0, a0 - h);
        let hi = edge(a1, a1 + h);
        if hi > lo {
            arcs.push(Arc::closed(lo, hi.min(lo + TAU)));
        } else {
            arcs.push(Arc::closed(lo, lo));
        }
        k += 1;
    }
    CircleArcSet::from_parts(&arcs, &pts).expect("finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_grid() {
        let g = Grid::parse("-3:3:7").unwrap();
        assert_eq!(g.points(), vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert!(Grid::parse("1:0:5").is_err());
        assert!(Grid::parse("0:1").is_err());
        assert!(Grid::parse("0:x:5").is_err());
    }

    #[test]
    fn line_hull_runs() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let flags = [true, true, false, true, false, false];
        let h = hull_line(&xs, &flags);
        assert_eq!(h.intervals(), &[Interval::closed(0.0, 1.0)]);
        assert_eq!(h.points(), &[3.0]);
        assert_eq!(h.essential_closure().measure(), 1.0);
    }

    #[test]
    fn refined_edge_finds_threshold() {
        let xs: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let flags: Vec<bool> = xs.iter().map(|&x| x < 0.537).collect();
        let h = hull_line_refined(&xs, &flags, |x| x < 0.537, 30);
        assert!((h.intervals()[0].hi - 0.537).abs() < 1e-8);
        assert_eq!(h.intervals()[0].lo, 0.0);
    }

    #[test]
    fn circle_hull_wraps() {
        let g = AngularGrid::new(8).unwrap();
        let flags = [true, false, false, false, false, false, true, true];
        let s = hull_circle(&g, &flags);
        assert_eq!(s.arcs().len(), 1);
        assert!(s.contains(0.0) && s.contains(-0.5));
        assert!((s.measure() - 2.0 * g.step()).abs() < 1e-12);
        assert!(hull_circle(&g, &[true; 8]).is_full());
    }

    #[test]
    fn circle_refined_edges() {
        let g = AngularGrid::new(64).unwrap();
        let inside = |t: f64| {
            let t = crate::interval_sets::normalize_angle(t);
            t > 1.0 && t < 5.0
        };
        let flags: Vec<bool> = g.points().iter().map(|&t| inside(t)).collect();
        let s = hull_circle_refined(&g, &flags, inside, 40);
        let a = s.arcs()[0];
        assert!((a.start - 1.0).abs() < 1e-9 && (a.end - 5.0).abs() < 1e-9);
    }
}
