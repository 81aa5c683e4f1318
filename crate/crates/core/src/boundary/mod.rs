//! Boundary limits and support classification for Herglotz functions on the
//! upper half-plane and Carathéodory functions on the unit disk.

pub mod classify;
pub mod extrapolate;
pub mod representation;

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{hull_circle, hull_line, AngularGrid};
use crate::interval_sets::{AnySet, CircleArcSet};

pub use classify::{classify_point, PointClassification, Verdict};
pub use extrapolate::{
    approach_point, boundary_value_of, richardson, BoundaryOptions, BoundaryValue, Schedule,
};
pub use representation::{CaratheodoryRepresentation, HerglotzRepresentation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    /// Analytic on `Im z > 0` with `Im f ≥ 0`.
    Herglotz,
    /// Analytic on `|z| < 1` with `Re f ≥ 0`.
    Caratheodory,
}

/// An analytic function evaluated at interior points of its natural domain.
pub trait BoundaryFunction: Sync {
    fn kind(&self) -> BoundaryKind;
    fn evaluate(&self, z: Complex64) -> Result<Complex64>;
    fn metadata(&self) -> String {
        String::new()
    }
}

/// Closure-backed [`BoundaryFunction`].
pub struct FnBoundary<F> {
    kind: BoundaryKind,
    f: F,
    label: String,
}

impl<F> FnBoundary<F>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    pub fn new(kind: BoundaryKind, label: impl Into<String>, f: F) -> Self {
        FnBoundary {
            kind,
            f,
            label: label.into(),
        }
    }

    pub fn herglotz(label: impl Into<String>, f: F) -> Self {
        Self::new(BoundaryKind::Herglotz, label, f)
    }

    pub fn caratheodory(label: impl Into<String>, f: F) -> Self {
        Self::new(BoundaryKind::Caratheodory, label, f)
    }
}

impl<F> BoundaryFunction for FnBoundary<F>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    fn kind(&self) -> BoundaryKind {
        self.kind
    }

    fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        (self.f)(z)
    }

    fn metadata(&self) -> String {
        self.label.clone()
    }
}

/// Boundary value at `p` (a real point or an angle).
pub fn boundary_value(
    f: &dyn BoundaryFunction,
    p: f64,
    opts: &BoundaryOptions,
) -> Result<BoundaryValue> {
    boundary_value_of(&|z| f.evaluate(z), f.kind(), p, opts)
}

/// `π⁻¹ Im f(λ+i0)` on the line, `π⁻¹ Re f(ζ)` on the circle; zero at
/// points where the boundary value has vanishing positive part.
pub fn ac_density(f: &dyn BoundaryFunction, p: f64, opts: &BoundaryOptions) -> Result<f64> {
    let bv = boundary_value(f, p, opts)?;
    if bv.infinite {
        return Err(Error::NonConvergent {
            location: p,
            ratio: f64::INFINITY,
        });
    }
    let part = extrapolate::positive_part(f.kind(), bv.value);
    if part <= opts.positivity_tol {
        Ok(0.0)
    } else {
        Ok(part / PI)
    }
}

/// Value at a point outside the natural domain by reflection:
/// `conj f(conj z)` (Herglotz) or `−conj f(1/conj z)` (Carathéodory).
pub fn reflect(f: &dyn BoundaryFunction, z: Complex64) -> Result<Complex64> {
    match f.kind() {
        BoundaryKind::Herglotz => {
            if z.im == 0.0 {
                return Err(Error::OnBoundary(format!("{z} is on the real axis")));
            }
            if z.im > 0.0 {
                return Err(Error::OnBoundary(format!("{z} is inside the upper half-plane")));
            }
            Ok(f.evaluate(z.conj())?.conj())
        }
        BoundaryKind::Caratheodory => {
            let r = z.norm();
            if r == 1.0 {
                return Err(Error::OnBoundary(format!("{z} is on the unit circle")));
            }
            if r < 1.0 {
                return Err(Error::OnBoundary(format!("{z} is inside the unit disk")));
            }
            Ok(-f.evaluate(1.0 / z.conj())?.conj())
        }
    }
}

/// Evaluates anywhere off the boundary, reflecting when needed.
pub fn evaluate_extended(f: &dyn BoundaryFunction, z: Complex64) -> Result<Complex64> {
    let inside = match f.kind() {
        BoundaryKind::Herglotz => z.im > 0.0,
        BoundaryKind::Caratheodory => z.norm() < 1.0,
    };
    if inside {
        f.evaluate(z)
    } else {
        reflect(f, z)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub samples: usize,
    /// Most negative positive part found (`Im` or `Re`); positive when all pass.
    pub worst_value: f64,
    pub worst_at: Option<(f64, f64)>,
    pub errors: Vec<String>,
}

/// Checks `Im f ≥ −tol` (resp. `Re f ≥ −tol`) at every sample.
pub fn validate(f: &dyn BoundaryFunction, samples: &[Complex64], tol: f64) -> ValidationReport {
    let mut worst = f64::INFINITY;
    let mut worst_at = None;
    let mut errors = Vec::new();
    for &z in samples {
        match f.evaluate(z) {
            Ok(w) => {
                let part = extrapolate::positive_part(f.kind(), w);
                if part < worst {
                    worst = part;
                    worst_at = Some((z.re, z.im));
                }
            }
            Err(e) => errors.push(format!("{z}: {e}")),
        }
    }
    ValidationReport {
        passed: errors.is_empty() && !samples.is_empty() && worst >= -tol,
        samples: samples.len(),
        worst_value: worst,
        worst_at,
        errors,
    }
}

/// Grid hull of the ac-verdict points plus its essential closure.
#[derive(Debug, Clone)]
pub struct AcSupport {
    pub hull: AnySet,
    pub essential_closure: AnySet,
    pub verdicts: Vec<PointClassification>,
    pub undetermined: usize,
}

/// Line version: `grid` is an ordered list of real points.
pub fn essential_support_ac(
    f: &dyn BoundaryFunction,
    grid: &[f64],
    opts: &BoundaryOptions,
) -> Result<AcSupport> {
    if grid.len() < 2 {
        return Err(Error::InvalidGrid("need at least 2 grid points".into()));
    }
    let verdicts: Vec<PointClassification> =
        grid.par_iter().map(|&p| classify_point(f, p, opts)).collect();
    let flags: Vec<bool> = verdicts.iter().map(|v| v.verdict == Verdict::Ac).collect();
    let undetermined = verdicts
        .iter()
        .filter(|v| v.verdict == Verdict::Undetermined)
        .count();
    let hull = match f.kind() {
        BoundaryKind::Herglotz => AnySet::Line(hull_line(grid, &flags)),
        BoundaryKind::Caratheodory => {
            return Err(Error::InvalidGrid(
                "use essential_support_ac_circle for Carathéodory functions".into(),
            ))
        }
    };
    Ok(AcSupport {
        essential_closure: hull.essential_closure(),
        hull,
        verdicts,
        undetermined,
    })
}

/// Circle version over a uniform angular grid.
pub fn essential_support_ac_circle(
    f: &dyn BoundaryFunction,
    grid: &AngularGrid,
    opts: &BoundaryOptions,
) -> Result<AcSupport> {
    let pts = grid.points();
    let verdicts: Vec<PointClassification> =
        pts.par_iter().map(|&p| classify_point(f, p, opts)).collect();
    let flags: Vec<bool> = verdicts.iter().map(|v| v.verdict == Verdict::Ac).collect();
    let undetermined = verdicts
        .iter()
        .filter(|v| v.verdict == Verdict::Undetermined)
        .count();
    let hull: CircleArcSet = hull_circle(grid, &flags);
    let hull = AnySet::Circle(hull);
    Ok(AcSupport {
        essential_closure: hull.essential_closure(),
        hull,
        verdicts,
        undetermined,
    })
}

/// CSV rows `location,re,im,error_estimate,verdict,point_mass`.
pub fn write_classification_csv<W: Write>(
    out: &mut W,
    rows: &[PointClassification],
) -> std::io::Result<()> {
    writeln!(out, "location,re,im,error_estimate,verdict,point_mass")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.location,
            r.limit.re,
            r.limit.im,
            r.error_estimate,
            r.verdict.as_str(),
            r.point_mass
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_i() -> FnBoundary<impl Fn(Complex64) -> Result<Complex64> + Sync> {
        FnBoundary::herglotz("i", |_| Ok(Complex64::i()))
    }

    #[test]
    fn constant_boundary_value() {
        let f = constant_i();
        let bv = boundary_value(&f, 0.0, &BoundaryOptions::default()).unwrap();
        assert_eq!(bv.value, Complex64::i());
        assert_eq!(bv.error, 0.0);
        assert!((ac_density(&f, 3.0, &BoundaryOptions::default()).unwrap() - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn minus_inverse_at_one() {
        let f = FnBoundary::herglotz("-1/z", |z: Complex64| Ok(-1.0 / z));
        let bv = boundary_value(&f, 1.0, &BoundaryOptions::default()).unwrap();
        assert!((bv.value - Complex64::new(-1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn reflection_rules() {
        let f = constant_i();
        assert_eq!(reflect(&f, Complex64::new(0.0, -1.0)).unwrap(), -Complex64::i());
        assert!(matches!(reflect(&f, Complex64::new(1.0, 0.0)), Err(Error::OnBoundary(_))));
        let g = FnBoundary::caratheodory("1", |_| Ok(Complex64::new(1.0, 0.0)));
        assert_eq!(reflect(&g, Complex64::new(2.0, 0.0)).unwrap(), Complex64::new(-1.0, 0.0));
        let h = FnBoundary::herglotz("-1/z", |z: Complex64| Ok(-1.0 / z));
        let w = reflect(&h, Complex64::new(0.0, -1.0)).unwrap();
        assert!((w - (-Complex64::i())).norm() < 1e-15);
    }

    #[test]
    fn validation_catches_conjugate() {
        let ok = FnBoundary::herglotz("z", |z: Complex64| Ok(z));
        let bad = FnBoundary::herglotz("conj z", |z: Complex64| Ok(z.conj()));
        let s = [Complex64::i(), Complex64::new(0.5, 1.0)];
        assert!(validate(&ok, &s, 0.0).passed);
        let r = validate(&bad, &s, 0.0);
        assert!(!r.passed);
        assert_eq!(r.worst_value, -1.0);
    }

    #[test]
    fn pure_point_support_is_empty() {
        let f = FnBoundary::herglotz("-1/z", |z: Complex64| Ok(-1.0 / z));
        let grid: Vec<f64> = (0..201).map(|i| -1.0 + i as f64 * 0.01).collect();
        let s = essential_support_ac(&f, &grid, &BoundaryOptions::default()).unwrap();
        assert!(s.essential_closure.is_empty());
        let g = constant_i();
        let s = essential_support_ac(&g, &grid, &BoundaryOptions::default()).unwrap();
        assert_eq!(s.essential_closure.to_string(), "[-1, 1]");
    }

    #[test]
    fn csv_header_and_rows() {
        let f = constant_i();
        let row = classify_point(&f, 0.5, &BoundaryOptions::default());
        let mut buf = Vec::new();
        write_classification_csv(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("location,re,im,error_estimate,verdict,point_mass\n"));
        assert!(text.contains(",ac,"));
        assert!(!text.contains('\r'));
    }
}
