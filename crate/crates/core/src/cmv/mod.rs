//! CMV operators from Verblunsky coefficients: periodic base with a finite
//! patch, half-lattice Carathéodory functions and the diagonal Cayley entry.

pub mod analysis;
pub mod truncation;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use analysis::{
    ac_spectrum, circle_phase, m11_boundary, matrix_m_and_r, multiplicity_sets, reflectionless_on, xi11, CircleAcSpectrum,
    CircleMultiplicity, CircleReflectionReport, MatrixMeasureData, RSample,
};
pub use truncation::{build_truncation, build_truncation_with_cuts, eigen_arc_support, CmvTruncation};

pub use crate::jacobi::Side;

type C = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct VerblunskyCoefficients {
    alpha_base: Vec<C>,
    patch: BTreeMap<i64, C>,
}

/// `{"type":"cmv","period":p,"alpha":[[re,im],...],"patch":{"n":[re,im],...}}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmvDescriptor {
    #[serde(rename = "type")]
    pub kind: String,
    pub period: usize,
    pub alpha: Vec<(f64, f64)>,
    #[serde(default)]
    pub patch: BTreeMap<i64, (f64, f64)>,
}

/// Evaluation mode for `M₁,₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum M11Mode {
    /// `(1 − M_+M_−)/(M_+ − M_−)`.
    Formula,
    /// Cayley-transform diagonal of a truncation of the given (even) size.
    Oracle { window: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CmvWeylData {
    pub z: C,
    pub n0: i64,
    pub m_plus: C,
    /// `m_−(z, n₀ − 1)`, the left half-lattice function entering `M_−`.
    pub m_minus: C,
    #[serde(rename = "M_plus")]
    pub big_m_plus: C,
    #[serde(rename = "M_minus")]
    pub big_m_minus: C,
    #[serde(rename = "M11")]
    pub m11: C,
}

fn check_alpha(a: C) -> Result<()> {
    if !(a.re.is_finite() && a.im.is_finite()) {
        return Err(Error::NonFinite(if a.re.is_finite() { a.im } else { a.re }));
    }
    if a.norm() >= 1.0 {
        return Err(Error::InvalidCoefficients(format!("|alpha| = {} is not < 1", a.norm())));
    }
    Ok(())
}

impl VerblunskyCoefficients {
    pub fn new(alpha: Vec<C>, patch: BTreeMap<i64, C>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidCoefficients("empty period".into()));
        }
        for &a in alpha.iter().chain(patch.values()) {
            check_alpha(a)?;
        }
        Ok(VerblunskyCoefficients {
            alpha_base: alpha,
            patch,
        })
    }

    pub fn periodic(alpha: Vec<C>) -> Result<Self> {
        Self::new(alpha, BTreeMap::new())
    }

    pub fn constant(a: C) -> Result<Self> {
        Self::periodic(vec![a])
    }

    pub fn free() -> Self {
        Self::constant(C::new(0.0, 0.0)).expect("valid")
    }

    pub fn with_patch(mut self, n: i64, a: C) -> Result<Self> {
        self.patch.insert(n, a);
        Self::new(self.alpha_base, self.patch)
    }

    pub fn from_descriptor(d: &CmvDescriptor) -> Result<Self> {
        if d.kind != "cmv" {
            return Err(Error::Schema(format!("expected type \"cmv\", got {:?}", d.kind)));
        }
        if d.period == 0 || d.alpha.len() != d.period {
            return Err(Error::Schema(format!("period {} needs {} alpha values", d.period, d.period)));
        }
        Self::new(
            d.alpha.iter().map(|&(re, im)| C::new(re, im)).collect(),
            d.patch.iter().map(|(&n, &(re, im))| (n, C::new(re, im))).collect(),
        )
    }

    pub fn to_descriptor(&self) -> CmvDescriptor {
        CmvDescriptor {
            kind: "cmv".into(),
            period: self.period(),
            alpha: self.alpha_base.iter().map(|a| (a.re, a.im)).collect(),
            patch: self.patch.iter().map(|(&n, a)| (n, (a.re, a.im))).collect(),
        }
    }

    pub fn period(&self) -> usize {
        self.alpha_base.len()
    }

    pub fn alpha(&self, n: i64) -> C {
        self.patch
            .get(&n)
            .copied()
            .unwrap_or(self.alpha_base[n.rem_euclid(self.period() as i64) as usize])
    }

    /// `ρ_n = (1 − |α_n|²)^{1/2}`.
    pub fn rho(&self, n: i64) -> f64 {
        (1.0 - self.alpha(n).norm_sqr()).sqrt()
    }

    fn patch_range(&self) -> Option<(i64, i64)> {
        Some((*self.patch.keys().next()?, *self.patch.keys().next_back()?))
    }

    /// Carathéodory function `(1 + z f)/(1 − z f)` of the Schur function with
    /// parameters `beta(0), beta(1), …`; `beta(j)` is periodic with the base
    /// period for `j ≥ tail`.
    fn schur_caratheodory<B: Fn(i64) -> C>(&self, z: C, beta: B, tail: i64) -> Result<C> {
        let p = self.period() as i64;
        // one period of Möbius maps f ↦ (z f + β)/(β̄ z f + 1), composed left to right
        let one = C::new(1.0, 0.0);
        let mut m = [[one, C::new(0.0, 0.0)], [C::new(0.0, 0.0), one]];
        for j in tail..tail + p {
            let b = beta(j);
            let a = [[z, b], [b.conj() * z, one]];
            m = [
                [m[0][0] * a[0][0] + m[0][1] * a[1][0], m[0][0] * a[0][1] + m[0][1] * a[1][1]],
                [m[1][0] * a[0][0] + m[1][1] * a[1][0], m[1][0] * a[0][1] + m[1][1] * a[1][1]],
            ];
        }
        let mut f = mobius_fixed_point(&m)?;
        for j in (0..tail).rev() {
            let b = beta(j);
            f = (z * f + b) / (b.conj() * z * f + 1.0);
        }
        Ok((1.0 + z * f) / (1.0 - z * f))
    }

    /// `m_+(z, n₀)` on `[n₀, ∞)` resp. `m_−(z, n₀)` on `(−∞, n₀]`, the
    /// Cayley-transform diagonal entries of the half-lattice operators.
    pub fn m_half_lattice(&self, z: C, n0: i64, side: Side) -> Result<C> {
        if z.norm() >= 1.0 {
            return Err(Error::OnBoundary(format!("|z| = {} is not < 1", z.norm())));
        }
        match side {
            Side::Plus => {
                let tail = self.patch_range().map_or(0, |(_, hi)| (hi - n0).max(0));
                self.schur_caratheodory(z, |j| -self.alpha(n0 + 1 + j).conj(), tail)
            }
            Side::Minus => {
                let tail = self.patch_range().map_or(0, |(lo, _)| (n0 - lo + 1).max(0));
                self.schur_caratheodory(z, |j| -self.alpha(n0 - j), tail)
            }
        }
    }

    /// `M_+(z,n₀) = m_+(z,n₀)`; `M_−(z,n₀)` from `m_−(z, n₀−1)` and `α_{n₀}`.
    pub fn big_m(&self, z: C, n0: i64, side: Side) -> Result<C> {
        match side {
            Side::Plus => self.m_half_lattice(z, n0, Side::Plus),
            Side::Minus => {
                let m = self.m_half_lattice(z, n0 - 1, Side::Minus)?;
                big_m_minus(self.alpha(n0), m)
            }
        }
    }

    pub fn weyl_data(&self, z: C, n0: i64) -> Result<CmvWeylData> {
        let m_plus = self.m_half_lattice(z, n0, Side::Plus)?;
        let m_minus = self.m_half_lattice(z, n0 - 1, Side::Minus)?;
        let big_m_minus = big_m_minus(self.alpha(n0), m_minus)?;
        Ok(CmvWeylData {
            z,
            n0,
            m_plus,
            m_minus,
            big_m_plus: m_plus,
            big_m_minus,
            m11: m11_formula(m_plus, big_m_minus)?,
        })
    }

    pub fn m11(&self, z: C, n0: i64, mode: M11Mode) -> Result<C> {
        match mode {
            M11Mode::Formula => Ok(self.weyl_data(z, n0)?.m11),
            M11Mode::Oracle { window } => {
                let lo = n0 - (window / 2) as i64;
                let t = build_truncation(self, lo - lo.rem_euclid(2), window)?;
                t.cayley_entry(z, n0, n0)
            }
        }
    }

    /// Formula value, falling back to the oracle when `M_+ = M_−`.
    pub fn m11_with_fallback(&self, z: C, n0: i64, window: usize) -> Result<(C, bool)> {
        match self.m11(z, n0, M11Mode::Formula) {
            Err(Error::DegenerateDenominator(_)) => {
                Ok((self.m11(z, n0, M11Mode::Oracle { window })?, true))
            }
            other => other.map(|v| (v, false)),
        }
    }
}

/// `M_− = [Re(1+α) − i Im(1−α) m] / [i Im(1+α) − Re(1−α) m]` with
/// `m = m_−(z, n₀−1)`, `α = α_{n₀}`.
pub fn big_m_minus(alpha: C, m: C) -> Result<C> {
    let i = C::i();
    let num = (1.0 + alpha).re - i * (1.0 - alpha).im * m;
    let den = i * (1.0 + alpha).im - (1.0 - alpha).re * m;
    if den.norm() < 1e-14 {
        return Err(Error::DivisionByZero(den.norm()));
    }
    Ok(num / den)
}

/// `M₁,₁ = (1 − M_+ M_−)/(M_+ − M_−)`.
pub fn m11_formula(mp: C, mm: C) -> Result<C> {
    let d = mp - mm;
    if d.norm() <= 1e-12 {
        return Err(Error::DegenerateDenominator(d.norm()));
    }
    Ok((1.0 - mp * mm) / d)
}

/// Fixed point inside the unit disk of `f ↦ (m00 f + m01)/(m10 f + m11)`.
fn mobius_fixed_point(m: &[[C; 2]; 2]) -> Result<C> {
    // m10 f² + (m11 − m00) f − m01 = 0
    let (a, b, c) = (m[1][0], m[1][1] - m[0][0], -m[0][1]);
    let scale = a.norm().max(b.norm()).max(c.norm());
    if scale == 0.0 {
        return Ok(C::new(0.0, 0.0));
    }
    if a.norm() <= 1e-15 * scale {
        if b.norm() <= 1e-15 * scale {
            return Err(Error::MonodromyDegenerate { rho1: 1.0, rho2: 1.0 });
        }
        return Ok(-c / b);
    }
    let s = (b * b - 4.0 * a * c).sqrt();
    // numerically stable pair of roots
    let q = if (b.conj() * s).re >= 0.0 { -0.5 * (b + s) } else { -0.5 * (b - s) };
    let r1 = q / a;
    let r2 = if q.norm() > 0.0 { c / q } else { r1 };
    let (inside, outside) = if r1.norm() <= r2.norm() { (r1, r2) } else { (r2, r1) };
    if (outside.norm() - inside.norm()).abs() < 1e-10 {
        return Err(Error::MonodromyDegenerate {
            rho1: inside.norm(),
            rho2: outside.norm(),
        });
    }
    Ok(inside)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> VerblunskyCoefficients {
        VerblunskyCoefficients::periodic(vec![C::new(0.3, 0.2), C::new(-0.4, 0.1), C::new(0.1, -0.5)])
            .unwrap()
            .with_patch(1, C::new(0.6, 0.3))
            .unwrap()
            .with_patch(-2, C::new(-0.2, -0.7))
            .unwrap()
    }

    #[test]
    fn free_values() {
        let v = VerblunskyCoefficients::free();
        for z in [C::new(0.0, 0.0), C::new(0.5, 0.0), C::new(0.1, 0.6)] {
            let w = v.weyl_data(z, 0).unwrap();
            assert!((w.m_plus - 1.0).norm() < 1e-15);
            assert!((w.big_m_minus + 1.0).norm() < 1e-15);
            assert!((w.m11 - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn total_mass_normalization() {
        let v = VerblunskyCoefficients::constant(C::new(0.5, 0.0)).unwrap();
        let m = v.m_half_lattice(C::new(0.0, 0.0), 0, Side::Plus).unwrap();
        assert!((m - 1.0).norm() < 1e-15);
        assert!((sample().m11(C::new(0.0, 0.0), 0, M11Mode::Formula).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn half_lattice_matches_split_truncation() {
        let v = sample();
        let z = C::new(0.2, -0.55);
        for n0 in [-3i64, -2, -1, 0, 1, 2, 3] {
            // α_{n₀} = 1 splits the lattice at n₀
            let lo = -200;
            let t = build_truncation_with_cuts(&v, lo, 400, &[n0]).unwrap();
            let plus = v.m_half_lattice(z, n0, Side::Plus).unwrap();
            let o = t.cayley_entry(z, n0, n0).unwrap();
            assert!((plus - o).norm() < 1e-10, "+ {n0}: {plus} vs {o}");
            let minus = v.m_half_lattice(z, n0 - 1, Side::Minus).unwrap();
            let o = t.cayley_entry(z, n0 - 1, n0 - 1).unwrap();
            assert!((minus - o).norm() < 1e-10, "- {n0}: {minus} vs {o}");
        }
    }

    #[test]
    fn m11_formula_matches_oracle() {
        let v = sample();
        for n0 in [-2i64, 0, 1, 4] {
            for z in [C::new(0.3, 0.4), C::new(-0.8, 0.1), C::new(0.0, -0.9)] {
                let f = v.m11(z, n0, M11Mode::Formula).unwrap();
                let o = v.m11(z, n0, M11Mode::Oracle { window: 512 }).unwrap();
                assert!((f - o).norm() < 1e-8, "{n0} {z}: {f} vs {o}");
            }
        }
    }

    #[test]
    fn caratheodory_signs() {
        let v = sample();
        for z in [C::new(0.0, 0.3), C::new(0.7, -0.2), C::new(-0.5, 0.5)] {
            for n0 in [-1, 0, 2] {
                let w = v.weyl_data(z, n0).unwrap();
                assert!(w.m_plus.re > 0.0 && w.m_minus.re > 0.0);
                assert!(w.big_m_minus.re < 0.0);
                assert!(w.m11.re > 0.0);
            }
        }
    }

    #[test]
    fn free_big_m_minus_is_minus_reciprocal() {
        let m = C::new(0.7, 0.3);
        let got = big_m_minus(C::new(0.0, 0.0), m).unwrap();
        assert!((got + 1.0 / m).norm() < 1e-15);
    }

    #[test]
    fn descriptor_round_trip() {
        let text = r#"{"type":"cmv","period":1,"alpha":[[0.5,0]],"patch":{"0":[0.9,0]}}"#;
        let d: CmvDescriptor = serde_json::from_str(text).unwrap();
        let v = VerblunskyCoefficients::from_descriptor(&d).unwrap();
        assert_eq!(v.alpha(0), C::new(0.9, 0.0));
        assert_eq!(v.alpha(7), C::new(0.5, 0.0));
        assert_eq!(v.to_descriptor(), d);
        let bad = CmvDescriptor { alpha: vec![(1.0, 0.0)], ..d };
        assert!(VerblunskyCoefficients::from_descriptor(&bad).is_err());
    }
}
