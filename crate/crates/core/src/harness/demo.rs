//! The essential-closure examples: a point appended to an interval, the
//! rational support of a pure point measure, and the fat rational set.

use serde::Serialize;

use crate::interval_sets::fat::enumerate_rationals;
use crate::interval_sets::{GeneratedFatSet, Interval, RealIntervalSet};

#[derive(Debug, Clone, Serialize)]
pub struct SetsDemo {
    pub lines: Vec<String>,
    pub interval_with_point: RealIntervalSet,
    pub interval_with_point_closure: RealIntervalSet,
    pub rational_support_count: usize,
    pub rational_support_measure: f64,
    pub rational_support_closure: RealIntervalSet,
    pub fat_truncation: usize,
    pub fat_truncated_measure: f64,
    pub fat_tail_bound: f64,
    /// `|A|` upper bound: truncated measure plus tail.
    pub fat_measure_upper: f64,
    /// Lower bound on `|Āᵉ ∖ A|` from `[0,1] ⊆ Āᵉ`.
    pub fat_gap_lower: f64,
    pub fat_closure: RealIntervalSet,
    pub fat_grid_points: usize,
    pub fat_density_passes: usize,
    pub fat_beyond_truncation: usize,
    pub fat_outside_fails: bool,
}

/// Runs all three examples; `lines` is the human-readable transcript.
pub fn emit_sets_demo() -> SetsDemo {
    let mut lines = Vec::new();

    let a = RealIntervalSet::from_parts(&[Interval::closed(0.0, 1.0)], &[2.0]).expect("finite");
    let a_ess = a.essential_closure();
    lines.push(format!("{a} → {a_ess}"));

    let rationals: Vec<f64> = enumerate_rationals(2000).iter().map(|r| r.value()).collect();
    let support = RealIntervalSet::from_parts(&[], &rationals).expect("finite");
    let support_ess = support.essential_closure();
    lines.push(format!(
        "rational support of a pure point measure: {} atoms in [0, 1], measure {} ⇒ essential closure {}",
        rationals.len(),
        support.measure(),
        support_ess
    ));

    let fat = GeneratedFatSet::new(4.0, 20).expect("valid family");
    let truncated = fat.truncated_union().measure();
    let tail = fat.tail_measure_bound();
    let upper = truncated + tail;
    let unit = RealIntervalSet::from_closed(&[(0.0, 1.0)]).expect("finite");
    let gap_lower = unit.difference(fat.truncated_union()).measure() - tail;
    lines.push(format!(
        "fat rational set, N = {}: |A| ≤ {upper:.12} ≤ 2/3 (truncated {truncated:.12} + tail {tail:.3e})",
        fat.truncation()
    ));
    let step = 1e-3;
    let closure = fat
        .essential_closure_on_grid(0.0, 1.0, step, 1e-4)
        .expect("valid grid");
    let passes = closure.verdicts.iter().filter(|v| v.passes).count();
    let outside = fat.essential_closure_on_grid(1.5, 1.6, 0.05, 1e-4).expect("valid grid");
    let outside_fails = outside.verdicts.iter().all(|v| !v.passes);
    lines.push(format!(
        "density test at ε = 1e-4 on [0, 1] (step {step}): {passes}/{} points pass, {} via witnesses beyond the truncation; essential closure ⊇ {}",
        closure.verdicts.len(),
        closure.beyond_truncation_count,
        closure.set
    ));
    lines.push(format!(
        "|Āᵉ ∖ A| ≥ |[0, 1] ∖ A_N| − tail = {gap_lower:.12} ≥ 1/3 (within truncation bound {tail:.3e})"
    ));
    lines.push(format!(
        "points outside [0, 1] − ε: {}",
        if outside_fails { "no density" } else { "unexpected density" }
    ));

    SetsDemo {
        lines,
        interval_with_point: a,
        interval_with_point_closure: a_ess,
        rational_support_count: rationals.len(),
        rational_support_measure: support.measure(),
        rational_support_closure: support_ess,
        fat_truncation: fat.truncation(),
        fat_truncated_measure: truncated,
        fat_tail_bound: tail,
        fat_measure_upper: upper,
        fat_gap_lower: gap_lower,
        fat_closure: closure.set,
        fat_grid_points: closure.verdicts.len(),
        fat_density_passes: passes,
        fat_beyond_truncation: closure.beyond_truncation_count,
        fat_outside_fails: outside_fails,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_values() {
        let d = emit_sets_demo();
        assert_eq!(d.interval_with_point_closure, RealIntervalSet::from_closed(&[(0.0, 1.0)]).unwrap());
        assert!(d.rational_support_closure.is_empty());
        assert_eq!(d.rational_support_measure, 0.0);
        assert!(d.fat_measure_upper <= 2.0 / 3.0 + 1e-15);
        assert!(d.fat_gap_lower >= 1.0 / 3.0);
        assert_eq!(d.fat_density_passes, d.fat_grid_points);
        assert!(d.fat_outside_fails);
        assert_eq!(d.lines[0], "[0, 1]∪{2} → [0, 1]");
    }
}
