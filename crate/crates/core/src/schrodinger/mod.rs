//! Schrödinger operators `L = −d²/dx² + V` on the line with a piecewise
//! constant periodic `V`, optionally overridden on one finite window.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_sets::RealIntervalSet;
use crate::jacobi::{floquet, Side};
use crate::spectral::{self, AnalysisOptions, LineOperator, LineWeyl};

type C = Complex64;
type Mat = [[C; 2]; 2];

/// Default upper end of the λ grid.
pub const DEFAULT_LAMBDA_MAX: f64 = 25.0;

const LENGTH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePotential {
    period: f64,
    pieces: Vec<(f64, f64)>,
    /// Cumulative piece ends inside one period, last equal to `period`.
    ends: Vec<f64>,
    patch_start: f64,
    patch: Vec<(f64, f64)>,
    patch_ends: Vec<f64>,
}

/// `{"type":"schrodinger","period":L,"pieces":[[len,val],...],"patch":[[len,val],...],"patch_start":x}`
///
/// The patch pieces are laid end to end from `patch_start` (default 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchrodingerDescriptor {
    #[serde(rename = "type")]
    pub kind: String,
    pub period: f64,
    pub pieces: Vec<(f64, f64)>,
    #[serde(default)]
    pub patch: Vec<(f64, f64)>,
    #[serde(default)]
    pub patch_start: f64,
}

fn cumulative(start: f64, pieces: &[(f64, f64)]) -> Vec<f64> {
    let mut x = start;
    pieces
        .iter()
        .map(|&(l, _)| {
            x += l;
            x
        })
        .collect()
}

fn check_pieces(pieces: &[(f64, f64)]) -> Result<()> {
    for &(l, v) in pieces {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidCoefficients(format!("piece length must be positive, got {l}")));
        }
        if !v.is_finite() {
            return Err(Error::NonFinite(v));
        }
    }
    Ok(())
}

impl PiecewisePotential {
    pub fn new(period: f64, pieces: Vec<(f64, f64)>, patch_start: f64, patch: Vec<(f64, f64)>) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidCoefficients(format!("period must be positive, got {period}")));
        }
        if pieces.is_empty() {
            return Err(Error::InvalidCoefficients("no pieces".into()));
        }
        if !patch_start.is_finite() {
            return Err(Error::NonFinite(patch_start));
        }
        check_pieces(&pieces)?;
        check_pieces(&patch)?;
        let total: f64 = pieces.iter().map(|p| p.0).sum();
        if (total - period).abs() > LENGTH_TOL * period.max(1.0) {
            return Err(Error::InvalidCoefficients(format!(
                "piece lengths sum to {total}, period is {period}"
            )));
        }
        let mut ends = cumulative(0.0, &pieces);
        *ends.last_mut().expect("nonempty") = period;
        let patch_ends = cumulative(patch_start, &patch);
        Ok(PiecewisePotential {
            period,
            pieces,
            ends,
            patch_start,
            patch,
            patch_ends,
        })
    }

    pub fn periodic(period: f64, pieces: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(period, pieces, 0.0, Vec::new())
    }

    /// `V ≡ 0`, written with period 1.
    pub fn free() -> Self {
        Self::periodic(1.0, vec![(1.0, 0.0)]).expect("valid")
    }

    pub fn with_patch(self, start: f64, patch: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(self.period, self.pieces, start, patch)
    }

    pub fn from_descriptor(d: &SchrodingerDescriptor) -> Result<Self> {
        if d.kind != "schrodinger" {
            return Err(Error::Schema(format!("expected type \"schrodinger\", got {:?}", d.kind)));
        }
        Self::new(d.period, d.pieces.clone(), d.patch_start, d.patch.clone())
    }

    pub fn to_descriptor(&self) -> SchrodingerDescriptor {
        SchrodingerDescriptor {
            kind: "schrodinger".into(),
            period: self.period,
            pieces: self.pieces.clone(),
            patch: self.patch.clone(),
            patch_start: self.patch_start,
        }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    fn patch_end(&self) -> f64 {
        self.patch_ends.last().copied().unwrap_or(self.patch_start)
    }

    fn in_patch(&self, x: f64) -> bool {
        !self.patch.is_empty() && x >= self.patch_start && x < self.patch_end()
    }

    /// `V(x)`, right-continuous at jumps.
    pub fn value(&self, x: f64) -> f64 {
        self.piece_at(x).1
    }

    /// `‖V‖_∞`.
    pub fn sup_norm(&self) -> f64 {
        self.pieces
            .iter()
            .chain(&self.patch)
            .fold(0.0, |m, p| m.max(p.1.abs()))
    }

    /// Value on the piece containing `x` and the next jump to the right.
    fn piece_at(&self, x: f64) -> (f64, f64) {
        let eps = LENGTH_TOL * (1.0 + x.abs());
        if self.in_patch(x) {
            let k = self.patch_ends.iter().position(|&e| e > x + eps).unwrap_or(self.patch.len() - 1);
            return (self.patch_ends[k], self.patch[k].1);
        }
        let cell = (x / self.period).floor();
        let t = x - cell * self.period;
        let k = self.ends.iter().position(|&e| e > t + eps).unwrap_or(0);
        let (base_end, val) = if t + eps >= self.period {
            ((cell + 1.0) * self.period + self.ends[0], self.pieces[0].1)
        } else {
            (cell * self.period + self.ends[k], self.pieces[k].1)
        };
        let end = if !self.patch.is_empty() && x < self.patch_start {
            base_end.min(self.patch_start)
        } else {
            base_end
        };
        (end, val)
    }

    /// `[a, b]` split at the jumps of `V`, as `(length, value)` pairs.
    pub fn segments(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut x = a;
        while b - x > LENGTH_TOL * (1.0 + b.abs()) {
            let (end, v) = self.piece_at(x);
            let next = end.min(b);
            out.push((next - x, v));
            x = next;
        }
        out
    }

    /// Propagator of `(u, u′)` across `[a, b]` for `u″ = (V − z)u`.
    pub fn propagator(&self, a: f64, b: f64, z: C) -> Mat {
        self.segments(a, b)
            .iter()
            .fold(identity(), |t, &(l, v)| mul(&piece_propagator(l, v, z), &t))
    }

    /// Monodromy over `[x, x + L]` of the periodic base, rescaled so its
    /// largest entry has modulus one; eigenvectors are unaffected.
    fn scaled_monodromy(&self, x: f64, z: C) -> Mat {
        let base = PiecewisePotential::periodic(self.period, self.pieces.clone()).expect("validated");
        base.segments(x, x + self.period).iter().fold(identity(), |t, &(l, v)| {
            let p = mul(&scaled_piece(l, v, z), &t);
            let s = p.iter().flatten().fold(0.0f64, |m, c| m.max(c.norm()));
            p.map(|row| row.map(|c| c / s))
        })
    }

    /// `Δ(λ)`, the trace of the unscaled one-period monodromy of the base.
    pub fn discriminant(&self, lambda: f64) -> f64 {
        let base = PiecewisePotential::periodic(self.period, self.pieces.clone()).expect("validated");
        let t = base.propagator(0.0, self.period, C::new(lambda, 0.0));
        (t[0][0] + t[1][1]).re
    }

    /// `m_±(z, x₀) = ψ_±′(x₀)/ψ_±(x₀)` for the solution decaying at `±∞`.
    pub fn m_half_line(&self, z: C, x0: f64, side: Side) -> Result<C> {
        if z.im == 0.0 {
            return Err(Error::OnBoundary(format!("{z} is real")));
        }
        if !x0.is_finite() {
            return Err(Error::NonFinite(x0));
        }
        let has_patch = !self.patch.is_empty();
        match side {
            Side::Plus => {
                let xr = if has_patch { x0.max(self.patch_end()) } else { x0 };
                let mut m = floquet_ratio(&self.scaled_monodromy(xr, z), false)?;
                for &(l, v) in self.segments(x0, xr).iter().rev() {
                    m = step_back(m, l, v, z);
                }
                Ok(m)
            }
            Side::Minus => {
                let xl = if has_patch { x0.min(self.patch_start) } else { x0 };
                let mut m = floquet_ratio(&self.scaled_monodromy(xl - self.period, z), true)?;
                for &(l, v) in &self.segments(xl, x0) {
                    m = step_forward(m, l, v, z);
                }
                Ok(m)
            }
        }
    }

    pub fn weyl_data(&self, z: C, x0: f64) -> Result<ContinuumWeylData> {
        let m_plus = self.m_half_line(z, x0, Side::Plus)?;
        let m_minus = self.m_half_line(z, x0, Side::Minus)?;
        let d = m_minus - m_plus;
        if d.norm() < 1e-300 {
            return Err(Error::DivisionByZero(d.norm()));
        }
        Ok(ContinuumWeylData {
            z,
            x0,
            m_plus,
            m_minus,
            g: 1.0 / d,
        })
    }

    /// `g(z, x₀) = [m_−(z,x₀) − m_+(z,x₀)]⁻¹`.
    pub fn green_diag(&self, z: C, x0: f64) -> Result<C> {
        Ok(self.weyl_data(z, x0)?.g)
    }

    /// `ψ_+(x₀)ψ_−(x₀) / (m_−(x₁) − m_+(x₁))` with `ψ_±(x₁) = 1`, the solutions
    /// carried from `x₁` to `x₀` by the propagators. Agrees with
    /// [`green_diag`](Self::green_diag) by Wronskian conservation.
    pub fn green_via(&self, z: C, x0: f64, x1: f64) -> Result<C> {
        let mp = self.m_half_line(z, x1, Side::Plus)?;
        let mm = self.m_half_line(z, x1, Side::Minus)?;
        let t = if x1 <= x0 {
            self.propagator(x1, x0, z)
        } else {
            let f = self.propagator(x0, x1, z);
            [[f[1][1], -f[0][1]], [-f[1][0], f[0][0]]]
        };
        let up = t[0][0] + t[0][1] * mp;
        let um = t[0][0] + t[0][1] * mm;
        let d = mm - mp;
        if d.norm() < 1e-300 {
            return Err(Error::DivisionByZero(d.norm()));
        }
        Ok(up * um / d)
    }

    pub fn xi(&self, lambda: f64, x: f64, opts: &AnalysisOptions) -> Result<f64> {
        spectral::xi_at(self, lambda, x, &opts.boundary)
    }

    /// Reference points `{0, L/2}`.
    pub fn default_sites(&self) -> Vec<f64> {
        vec![0.0, 0.5 * self.period]
    }

    pub fn ac_spectrum(&self, xs: &[f64], opts: &AnalysisOptions) -> Result<spectral::LineAcSpectrum<f64>> {
        spectral::ac_spectrum(self, xs, &self.default_sites(), opts)
    }

    pub fn reflectionless_on(
        &self,
        e: &RealIntervalSet,
        xs: &[f64],
        opts: &AnalysisOptions,
    ) -> spectral::ReflectionlessReport<f64> {
        spectral::reflectionless_on(self, e, xs, &self.default_sites(), opts)
    }

    pub fn multiplicity_sets(&self, xs: &[f64], opts: &AnalysisOptions) -> spectral::LineMultiplicity {
        spectral::multiplicity_sets(self, xs, 0.0, opts)
    }

    /// Central-difference section `−u″ + Vu` on `x₀ + hk`, `|hk| ≤ half_width`,
    /// Dirichlet outside. Node values of `V` average the two adjacent cells.
    pub fn finite_difference(&self, x0: f64, h: f64, half_width: f64) -> Result<FiniteDifference> {
        if !(h > 0.0 && half_width > 2.0 * h) {
            return Err(Error::InvalidWindow(format!("h = {h}, half width = {half_width}")));
        }
        let k = (half_width / h).floor() as usize;
        let n = 2 * k + 1;
        let diag = (0..n)
            .map(|i| {
                let x = x0 + (i as f64 - k as f64) * h;
                2.0 / (h * h) + 0.5 * (self.value(x - 0.5 * h) + self.value(x + 0.5 * h))
            })
            .collect();
        let off = vec![-1.0 / (h * h); n - 1];
        Ok(FiniteDifference { h, center: k, diag, off })
    }
}

/// Tridiagonal discretization; `g(z, x₀) ≈ ((T − z)⁻¹)_{cc} / h`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDifference {
    pub h: f64,
    pub center: usize,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuumWeylData {
    pub z: C,
    pub x0: f64,
    pub m_plus: C,
    pub m_minus: C,
    pub g: C,
}

impl LineOperator for PiecewisePotential {
    type Site = f64;

    fn weyl(&self, z: C, site: f64) -> Result<LineWeyl> {
        let w = self.weyl_data(z, site)?;
        Ok(LineWeyl {
            m_plus: w.m_plus,
            m_minus: w.m_minus,
            g: w.g,
        })
    }

    fn reference_sites(&self) -> Vec<f64> {
        self.default_sites()
    }

    fn spectral_window(&self) -> (f64, f64) {
        (-self.sup_norm() - 1.0, DEFAULT_LAMBDA_MAX)
    }
}

/// `κ = √(V − z)` with `Re κ > 0` off the real axis.
fn kappa(v: f64, z: C) -> C {
    (C::new(v, 0.0) - z).sqrt()
}

/// `tanh(κℓ)` through `e^{−2κℓ}`, which never overflows for `Re κ ≥ 0`.
fn tanh_stable(k: C, l: f64) -> C {
    let e = (-2.0 * k * l).exp();
    (1.0 - e) / (1.0 + e)
}

/// `[[cosh κℓ, sinh κℓ / κ], [κ sinh κℓ, cosh κℓ]]`, determinant one.
pub fn piece_propagator(l: f64, v: f64, z: C) -> Mat {
    let k = kappa(v, z);
    let kl = k * l;
    // sinh(κℓ)/κ by its series where κ vanishes (z = V on the axis)
    let sinc = if kl.norm() < 1e-4 { l * (1.0 + kl * kl / 6.0) } else { kl.sinh() / k };
    [[kl.cosh(), sinc], [k * k * sinc, kl.cosh()]]
}

/// `piece_propagator` divided by `e^{κℓ}/2`.
fn scaled_piece(l: f64, v: f64, z: C) -> Mat {
    let k = kappa(v, z);
    let e = (-2.0 * k * l).exp();
    [[1.0 + e, (1.0 - e) / k], [k * (1.0 - e), 1.0 + e]]
}

/// `m ↦ (κt + m)/(1 + (t/κ)m)` across a piece of length `ℓ`.
fn step_forward(m: C, l: f64, v: f64, z: C) -> C {
    let k = kappa(v, z);
    let t = tanh_stable(k, l);
    (k * t + m) / (1.0 + t / k * m)
}

/// Inverse of [`step_forward`].
fn step_back(m: C, l: f64, v: f64, z: C) -> C {
    let k = kappa(v, z);
    let t = tanh_stable(k, l);
    (m - k * t) / (1.0 - t / k * m)
}

/// `u′/u` along the Floquet eigenvector of `t`, growing or contracting.
fn floquet_ratio(t: &Mat, growing: bool) -> Result<C> {
    let (_, v) = floquet(t, growing)?;
    if v[0].norm() == 0.0 {
        return Err(Error::DivisionByZero(0.0));
    }
    Ok(v[1] / v[0])
}

fn identity() -> Mat {
    let (o, l) = (C::new(0.0, 0.0), C::new(1.0, 0.0));
    [[l, o], [o, l]]
}

fn mul(x: &Mat, y: &Mat) -> Mat {
    let mut r = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::tridiagonal_resolvent_diag;

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    fn well() -> PiecewisePotential {
        PiecewisePotential::periodic(1.0, vec![(0.5, 0.0), (0.5, 5.0)]).unwrap()
    }

    #[test]
    fn free_closed_forms() {
        let v = PiecewisePotential::free();
        let z = C::new(4.0, 1e-8);
        assert!(close(v.m_half_line(z, 0.0, Side::Plus).unwrap(), C::new(0.0, 2.0), 1e-7));
        let z = C::new(-4.0, 1e-8);
        assert!(close(v.m_half_line(z, 0.0, Side::Plus).unwrap(), C::new(-2.0, 0.0), 1e-7));
        assert!(close(v.green_diag(z, 0.0).unwrap(), C::new(0.25, 0.0), 1e-7));
        let o = crate::boundary::BoundaryOptions::default();
        let b = spectral::boundary_weyl(&v, 4.0, 0.3, &o).unwrap();
        assert!(close(b.m_plus.value, C::new(0.0, 2.0), 1e-6));
        assert!(close(b.m_minus.value, C::new(0.0, -2.0), 1e-6));
        assert!(close(b.g.value, C::new(0.0, 0.25), 1e-6), "{:?}", b.g);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = v.m_half_line(C::i(), 0.0, Side::Plus).unwrap();
        assert!(close(m, C::new(-s, s), 1e-12), "{m}");
        let m = v.m_half_line(C::i(), 0.0, Side::Minus).unwrap();
        assert!(close(m, C::new(s, -s), 1e-12), "{m}");
    }

    #[test]
    fn pieces_are_unimodular() {
        for (l, val, z) in [(0.5, 5.0, C::new(2.0, 0.3)), (1.7, -3.0, C::new(-1.0, 2.0)), (0.1, 0.0, C::i())] {
            let p = piece_propagator(l, val, z);
            let det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
            assert!((det - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn segments_split_at_jumps() {
        let v = well().with_patch(0.25, vec![(0.5, 2.0)]).unwrap();
        let s = v.segments(-0.5, 1.25);
        let want = [(0.5, 5.0), (0.25, 0.0), (0.5, 2.0), (0.25, 5.0), (0.25, 0.0)];
        assert_eq!(s.len(), want.len(), "{s:?}");
        for (a, b) in s.iter().zip(want) {
            assert!((a.0 - b.0).abs() < 1e-12 && a.1 == b.1, "{s:?}");
        }
        assert_eq!(v.value(0.3), 2.0);
        assert_eq!(v.value(0.8), 5.0);
        assert_eq!(v.value(-0.2), 5.0);
    }

    #[test]
    fn half_line_matches_propagated_floquet() {
        let v = well();
        let z = C::new(3.0, 0.5);
        // m_+ at 0 carried to 0.7 by the forward map equals m_+ at 0.7
        let mut m = v.m_half_line(z, 0.0, Side::Plus).unwrap();
        for &(l, val) in &v.segments(0.0, 0.7) {
            m = step_forward(m, l, val, z);
        }
        assert!(close(m, v.m_half_line(z, 0.7, Side::Plus).unwrap(), 1e-10));
        // and the monodromy maps (1, m) to a multiple of itself
        let m0 = v.m_half_line(z, 0.0, Side::Plus).unwrap();
        let t = v.propagator(0.0, 1.0, z);
        let w = [t[0][0] + t[0][1] * m0, t[1][0] + t[1][1] * m0];
        assert!(close(w[1] / w[0], m0, 1e-10));
        assert!(w[0].norm() < 1.0);
    }

    #[test]
    fn herglotz_signs() {
        let v = well().with_patch(-0.3, vec![(0.4, -2.0), (0.2, 7.0)]).unwrap();
        for z in [C::new(1.0, 0.1), C::new(-6.0, 2.0), C::new(20.0, 0.01)] {
            for x in [-0.7, 0.0, 0.25, 2.0] {
                let w = v.weyl_data(z, x).unwrap();
                assert!(w.m_plus.im > 0.0 && w.m_minus.im < 0.0 && w.g.im > 0.0, "{z} {x} {w:?}");
            }
        }
    }

    #[test]
    fn square_well_matches_finite_differences() {
        let v = well();
        let z = C::new(0.0, 2.0);
        let fd = v.finite_difference(0.0, 1e-3, 200.0).unwrap();
        let g_fd = tridiagonal_resolvent_diag(&fd.diag, &fd.off, z, fd.center) / fd.h;
        let g = v.green_diag(z, 0.0).unwrap();
        assert!((g - g_fd).norm() < 1e-4, "{g} vs {g_fd}");
    }

    #[test]
    fn green_from_carried_solutions() {
        let v = well().with_patch(0.2, vec![(0.3, -4.0)]).unwrap();
        for z in [C::new(3.0, 0.4), C::new(-2.0, 1.0), C::new(15.0, 0.2)] {
            let g = v.green_diag(z, 0.1).unwrap();
            for x1 in [0.1, 0.9, -0.45] {
                let h = v.green_via(z, 0.1, x1).unwrap();
                assert!((g - h).norm() < 1e-12 * g.norm(), "{z} {x1}: {g} vs {h}");
            }
        }
    }

    #[test]
    fn descriptor_round_trip() {
        let v = well().with_patch(2.0, vec![(1.0, -1.0)]).unwrap();
        let d = v.to_descriptor();
        let s = serde_json::to_string(&d).unwrap();
        let back: SchrodingerDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(PiecewisePotential::from_descriptor(&back).unwrap(), v);
        let bad = r#"{"type":"schrodinger","period":1.0,"pieces":[[0.4,0.0]]}"#;
        let d: SchrodingerDescriptor = serde_json::from_str(bad).unwrap();
        assert!(PiecewisePotential::from_descriptor(&d).is_err());
        assert!(v.m_half_line(C::new(1.0, 0.0), 0.0, Side::Plus).is_err());
    }
}
