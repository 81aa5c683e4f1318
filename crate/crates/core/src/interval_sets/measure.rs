use serde::Serialize;

use super::circle::CircleArcSet;
use super::fat::GeneratedFatSet;
use super::line::RealIntervalSet;

/// Two-sided bound on a Lebesgue measure. Finite unions have `lower == upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureBounds {
    pub lower: f64,
    pub upper: f64,
}

pub trait LebesgueMeasure {
    fn lebesgue_measure(&self) -> MeasureBounds;
}

impl LebesgueMeasure for RealIntervalSet {
    fn lebesgue_measure(&self) -> MeasureBounds {
        let m = self.measure();
        MeasureBounds { lower: m, upper: m }
    }
}

impl LebesgueMeasure for CircleArcSet {
    fn lebesgue_measure(&self) -> MeasureBounds {
        let m = self.measure();
        MeasureBounds { lower: m, upper: m }
    }
}

impl LebesgueMeasure for GeneratedFatSet {
    fn lebesgue_measure(&self) -> MeasureBounds {
        let lower = self.truncated_union().measure();
        MeasureBounds {
            lower,
            upper: lower + self.tail_measure_bound(),
        }
    }
}

/// A measure that can be evaluated on finite unions.
pub trait SetMeasure {
    fn mass(&self, s: &RealIntervalSet) -> f64;
}

pub struct Lebesgue;

impl SetMeasure for Lebesgue {
    fn mass(&self, s: &RealIntervalSet) -> f64 {
        s.measure()
    }
}

/// `w · Lebesgue + Σ cⱼ δ_{xⱼ}`; enough to exercise null-set arguments.
#[derive(Debug, Clone, Default)]
pub struct MixedMeasure {
    pub density: f64,
    pub atoms: Vec<(f64, f64)>,
}

impl SetMeasure for MixedMeasure {
    fn mass(&self, s: &RealIntervalSet) -> f64 {
        self.density * s.measure()
            + self
                .atoms
                .iter()
                .filter(|(x, _)| s.contains(*x))
                .map(|(_, c)| c)
                .sum::<f64>()
    }
}

impl<F: Fn(&RealIntervalSet) -> f64> SetMeasure for F {
    fn mass(&self, s: &RealIntervalSet) -> f64 {
        self(s)
    }
}

/// Two supports are equivalent when their symmetric difference is null for
/// both Lebesgue measure and `mu`.
pub fn equivalent_supports(
    s: &RealIntervalSet,
    t: &RealIntervalSet,
    mu: &dyn SetMeasure,
    tol: f64,
) -> bool {
    let d = s.symmetric_difference(t);
    d.measure() <= tol && mu.mass(&d).abs() <= tol
}

/// Circle variant; `mu` sees the `[0, 2π)` cut representation.
pub fn equivalent_arc_supports(
    s: &CircleArcSet,
    t: &CircleArcSet,
    mu: &dyn SetMeasure,
    tol: f64,
) -> bool {
    let d = s.symmetric_difference(t);
    d.measure() <= tol && mu.mass(d.as_cut_line()).abs() <= tol
}
