use num_complex::Complex64;
use serde::Serialize;

use super::extrapolate::{extrapolate_samples, positive_part, richardson, sample_schedule};
use super::{BoundaryFunction, BoundaryKind, BoundaryOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Finite limit with positive imaginary (line) / real (circle) part.
    Ac,
    /// Infinite limit whose scaled limit could not be resolved.
    Singular,
    /// Infinite limit with vanishing scaled limit.
    Sc,
    /// Infinite limit with positive scaled limit (a point mass).
    Pp,
    /// Finite limit with vanishing positive part.
    Regular,
    Undetermined,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Ac => "ac",
            Verdict::Singular => "singular",
            Verdict::Sc => "sc",
            Verdict::Pp => "pp",
            Verdict::Regular => "regular",
            Verdict::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointClassification {
    pub location: f64,
    pub verdict: Verdict,
    /// Extrapolated limit, or the last interior sample for infinite limits.
    pub limit: Complex64,
    pub error_estimate: f64,
    pub point_mass: f64,
    /// `(−iε) f(λ+iε)` resp. `((1−r)/2) f(rζ)` extrapolated to the boundary.
    pub scaled_limit: Option<Complex64>,
    /// `|f| → ∞` along the schedule.
    pub infinite_modulus: bool,
    /// `Im f → ∞` (line) resp. `Re f → ∞` (circle) along the schedule.
    pub infinite_positive_part: bool,
    pub diagnostics: String,
}

impl PointClassification {
    /// The two notions of an infinite limit disagree here.
    pub fn variants_disagree(&self) -> bool {
        self.infinite_modulus != self.infinite_positive_part
    }

    fn undetermined(location: f64, msg: String) -> Self {
        PointClassification {
            location,
            verdict: Verdict::Undetermined,
            limit: Complex64::new(f64::NAN, f64::NAN),
            error_estimate: f64::INFINITY,
            point_mass: 0.0,
            scaled_limit: None,
            infinite_modulus: false,
            infinite_positive_part: false,
            diagnostics: msg,
        }
    }
}

fn scale(kind: BoundaryKind, eps: f64) -> Complex64 {
    match kind {
        BoundaryKind::Herglotz => Complex64::new(0.0, -eps),
        BoundaryKind::Caratheodory => Complex64::new(0.5 * eps, 0.0),
    }
}

/// Verdict at one boundary point from the limit trichotomy.
pub fn classify_point(
    f: &dyn BoundaryFunction,
    p: f64,
    opts: &BoundaryOptions,
) -> PointClassification {
    let kind = f.kind();
    let (eps, vals) = match sample_schedule(&|z| f.evaluate(z), kind, p, opts) {
        Ok(s) => s,
        Err(e) => return PointClassification::undetermined(p, format!("evaluation failed: {e}")),
    };
    let scaled: Vec<Complex64> = eps
        .iter()
        .zip(&vals)
        .map(|(&e, &v)| scale(kind, e) * v)
        .collect();
    let bv = match extrapolate_samples(kind, p, &eps, &vals, opts) {
        Ok(bv) => bv,
        Err(e) => {
            let mut pc = PointClassification::undetermined(p, e.to_string());
            pc.limit = *vals.last().unwrap();
            return pc;
        }
    };
    if bv.infinite || bv.infinite_positive_part {
        let b = richardson(&eps, &scaled);
        let s_lim = b.last().copied().unwrap_or(*scaled.last().unwrap());
        let s_last = *scaled.last().unwrap();
        let floor = opts.convergence_floor * (1.0 + s_lim.norm());
        let settled = b.len() >= 3 && {
            let n = b.len();
            let d1 = (b[n - 1] - b[n - 2]).norm();
            let d0 = (b[n - 2] - b[n - 3]).norm();
            d1 <= floor.max(0.5 * d0)
        };
        let (verdict, mass, diag) = if settled && s_lim.re >= opts.mass_tol {
            (Verdict::Pp, s_lim.re, String::new())
        } else if s_last.norm() < opts.mass_tol {
            (Verdict::Sc, 0.0, String::new())
        } else {
            (
                Verdict::Singular,
                0.0,
                format!("scaled limit unresolved: last {s_last}, extrapolated {s_lim}"),
            )
        };
        return PointClassification {
            location: p,
            verdict,
            limit: bv.last_sample,
            error_estimate: bv.error,
            point_mass: mass,
            scaled_limit: Some(s_lim),
            infinite_modulus: bv.infinite,
            infinite_positive_part: bv.infinite_positive_part,
            diagnostics: diag,
        };
    }
    let part = positive_part(kind, bv.value);
    let (verdict, diag) = if part > opts.positivity_tol {
        (Verdict::Ac, String::new())
    } else if part >= -opts.positivity_tol {
        (Verdict::Regular, String::new())
    } else {
        (
            Verdict::Undetermined,
            format!("positive part {part:e} is negative"),
        )
    };
    PointClassification {
        location: p,
        verdict,
        limit: bv.value,
        error_estimate: bv.error,
        point_mass: 0.0,
        scaled_limit: None,
        infinite_modulus: false,
        infinite_positive_part: false,
        diagnostics: diag,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::FnBoundary;
    use crate::error::Result;

    #[test]
    fn pole_is_pp_with_unit_mass() {
        let f = FnBoundary::herglotz("-1/z", |z: Complex64| Ok(-1.0 / z));
        let c = classify_point(&f, 0.0, &BoundaryOptions::default());
        assert_eq!(c.verdict, Verdict::Pp);
        assert!((c.point_mass - 1.0).abs() < 1e-9);
        assert!(!c.variants_disagree());
    }

    #[test]
    fn weighted_pole_on_circle() {
        // 0.3 (1+z)/(1-z): mass 0.3 at ζ=1
        let f = FnBoundary::caratheodory("pole", |z: Complex64| {
            Ok(0.3 * (1.0 + z) / (1.0 - z))
        });
        let c = classify_point(&f, 0.0, &BoundaryOptions::default());
        assert_eq!(c.verdict, Verdict::Pp);
        assert!((c.point_mass - 0.3).abs() < 1e-8);
        let r = classify_point(&f, 1.0, &BoundaryOptions::default());
        assert_eq!(r.verdict, Verdict::Regular);
    }

    #[test]
    fn fractional_blowup_is_not_a_point_mass() {
        // |f| ~ ε^{-0.9}: infinite limit, scaled limit ε^{0.1} decays too slowly to resolve
        let f = FnBoundary::herglotz("frac", |z: Complex64| -> Result<Complex64> {
            Ok(Complex64::i() * (Complex64::new(0.0, -1.0) * z).powf(-0.9))
        });
        let c = classify_point(&f, 0.0, &BoundaryOptions::default());
        assert!(c.infinite_modulus, "{c:?}");
        assert_eq!(c.verdict, Verdict::Singular, "{c:?}");
    }

    #[test]
    fn constant_is_ac() {
        let f = FnBoundary::herglotz("i", |_| Ok(Complex64::i()));
        let c = classify_point(&f, 2.0, &BoundaryOptions::default());
        assert_eq!(c.verdict, Verdict::Ac);
        assert_eq!(c.limit, Complex64::i());
    }
}
