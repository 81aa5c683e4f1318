//! Jacobi operators `(Hu)(n) = a(n)u(n+1) + a(n−1)u(n−1) + b(n)u(n)` with
//! periodic coefficients overridden on a finite patch.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_sets::RealIntervalSet;
use crate::spectral::{self, AnalysisOptions, LineOperator, LineWeyl};

type C = Complex64;
type Mat = [[C; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiCoefficients {
    a_base: Vec<f64>,
    b_base: Vec<f64>,
    patch: BTreeMap<i64, (f64, f64)>,
}

/// `{"type":"jacobi","period":p,"a":[...],"b":[...],"patch":{"n":[a,b],...}}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JacobiDescriptor {
    #[serde(rename = "type")]
    pub kind: String,
    pub period: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(default)]
    pub patch: BTreeMap<i64, (f64, f64)>,
}

impl JacobiCoefficients {
    pub fn new(a: Vec<f64>, b: Vec<f64>, patch: BTreeMap<i64, (f64, f64)>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::InvalidCoefficients(format!(
                "period mismatch: {} a-values, {} b-values",
                a.len(),
                b.len()
            )));
        }
        let all_a = a.iter().chain(patch.values().map(|(x, _)| x));
        let all_b = b.iter().chain(patch.values().map(|(_, y)| y));
        for &x in all_a {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::InvalidCoefficients(format!("a must be positive, got {x}")));
            }
        }
        for &y in all_b {
            if !y.is_finite() {
                return Err(Error::NonFinite(y));
            }
        }
        Ok(JacobiCoefficients {
            a_base: a,
            b_base: b,
            patch,
        })
    }

    pub fn periodic(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        Self::new(a, b, BTreeMap::new())
    }

    pub fn free() -> Self {
        Self::periodic(vec![1.0], vec![0.0]).expect("valid")
    }

    pub fn with_patch(mut self, n: i64, a: f64, b: f64) -> Result<Self> {
        self.patch.insert(n, (a, b));
        Self::new(self.a_base, self.b_base, self.patch)
    }

    pub fn from_descriptor(d: &JacobiDescriptor) -> Result<Self> {
        if d.kind != "jacobi" {
            return Err(Error::Schema(format!("expected type \"jacobi\", got {:?}", d.kind)));
        }
        if d.period == 0 || d.a.len() != d.period || d.b.len() != d.period {
            return Err(Error::Schema(format!(
                "period {} needs {} a- and b-values",
                d.period, d.period
            )));
        }
        Self::new(d.a.clone(), d.b.clone(), d.patch.clone())
    }

    pub fn to_descriptor(&self) -> JacobiDescriptor {
        JacobiDescriptor {
            kind: "jacobi".into(),
            period: self.period(),
            a: self.a_base.clone(),
            b: self.b_base.clone(),
            patch: self.patch.clone(),
        }
    }

    pub fn period(&self) -> usize {
        self.a_base.len()
    }

    fn base_index(&self, n: i64) -> usize {
        n.rem_euclid(self.period() as i64) as usize
    }

    pub fn a(&self, n: i64) -> f64 {
        self.patch
            .get(&n)
            .map(|p| p.0)
            .unwrap_or(self.a_base[self.base_index(n)])
    }

    pub fn b(&self, n: i64) -> f64 {
        self.patch
            .get(&n)
            .map(|p| p.1)
            .unwrap_or(self.b_base[self.base_index(n)])
    }

    pub fn sup_a(&self) -> f64 {
        self.a_base
            .iter()
            .chain(self.patch.values().map(|p| &p.0))
            .fold(0.0, |m, &x| m.max(x))
    }

    pub fn sup_b(&self) -> f64 {
        self.b_base
            .iter()
            .chain(self.patch.values().map(|p| &p.1))
            .fold(0.0, |m, &x| m.max(x.abs()))
    }

    fn patch_range(&self) -> Option<(i64, i64)> {
        Some((*self.patch.keys().next()?, *self.patch.keys().next_back()?))
    }

    fn step(&self, n: i64, z: C) -> Mat {
        let (a, b) = (self.a(n), self.b(n));
        [[(z - b) / a, C::new(1.0 / a, 0.0)], [C::new(-a, 0.0), C::new(0.0, 0.0)]]
    }

    fn step_inv(&self, n: i64, z: C) -> Mat {
        let (a, b) = (self.a(n), self.b(n));
        [[C::new(0.0, 0.0), C::new(-1.0 / a, 0.0)], [C::new(a, 0.0), (z - b) / a]]
    }

    /// `K(start+p−1) ⋯ K(start)`, mapping `(ψ(start), Q(start))` to the state one period later.
    pub fn monodromy(&self, start: i64, z: C) -> [[C; 2]; 2] {
        let mut t = identity();
        for k in 0..self.period() as i64 {
            t = mul(&self.step(start + k, z), &t);
        }
        t
    }

    /// `Δ(λ) = tr` of the one-period monodromy of the periodic base.
    pub fn discriminant(&self, lambda: f64) -> f64 {
        let base = JacobiCoefficients::periodic(self.a_base.clone(), self.b_base.clone())
            .expect("validated");
        let t = base.monodromy(0, C::new(lambda, 0.0));
        (t[0][0] + t[1][1]).re
    }

    /// State `(ψ_±(n₀), Q_±(n₀))` of the Weyl solution, `Q(n) = −a(n−1)ψ(n−1)`.
    pub fn weyl_solution(&self, z: C, n0: i64, side: Side) -> Result<[C; 2]> {
        if z.im == 0.0 {
            return Err(Error::OnBoundary(format!("{z} is real")));
        }
        match side {
            Side::Plus => {
                let nr = self.patch_range().map_or(n0, |(_, hi)| n0.max(hi + 1));
                let (_, v) = floquet(&self.monodromy(nr, z), false)?;
                let mut v = v;
                for n in (n0..nr).rev() {
                    v = normalize(apply(&self.step_inv(n, z), v));
                }
                Ok(v)
            }
            Side::Minus => {
                let nl = self.patch_range().map_or(n0, |(lo, _)| n0.min(lo));
                let (_, v) = floquet(&self.monodromy(nl - self.period() as i64, z), true)?;
                let mut v = v;
                for n in nl..n0 {
                    v = normalize(apply(&self.step(n, z), v));
                }
                Ok(v)
            }
        }
    }

    /// Half-lattice resolvent diagonal `m_±(z, n₀)` on `[n₀, ∞)` resp. `(−∞, n₀]`;
    /// both are Herglotz.
    pub fn m_half_line(&self, z: C, n0: i64, side: Side) -> Result<C> {
        let [psi, q] = self.weyl_solution(z, n0, side)?;
        match side {
            Side::Plus => Ok(psi / q),
            Side::Minus => Ok(-psi / ((z - self.b(n0)) * psi + q)),
        }
    }

    /// `M_+ = −1/m_+ − z + b(n₀)`, `M_− = 1/m_−`.
    pub fn big_m(&self, z: C, n0: i64, side: Side) -> Result<C> {
        let m = self.m_half_line(z, n0, side)?;
        if m.norm() < 1e-14 {
            return Err(Error::DivisionByZero(m.norm()));
        }
        Ok(match side {
            Side::Plus => -1.0 / m - z + self.b(n0),
            Side::Minus => 1.0 / m,
        })
    }

    /// `−a(n₀) ψ_±(n₀+1) / ψ_±(n₀)` computed from the Weyl solution directly.
    pub fn big_m_from_psi(&self, z: C, n0: i64, side: Side) -> Result<C> {
        let v = self.weyl_solution(z, n0, side)?;
        let next = apply(&self.step(n0, z), v);
        Ok(-self.a(n0) * next[0] / v[0])
    }

    pub fn weyl_data(&self, z: C, n0: i64) -> Result<WeylData> {
        let m_plus = self.m_half_line(z, n0, Side::Plus)?;
        let m_minus = self.m_half_line(z, n0, Side::Minus)?;
        for m in [m_plus, m_minus] {
            if m.norm() < 1e-14 {
                return Err(Error::DivisionByZero(m.norm()));
            }
        }
        let big_plus = -1.0 / m_plus - z + self.b(n0);
        let big_minus = 1.0 / m_minus;
        Ok(WeylData {
            z,
            n0,
            m_plus,
            m_minus,
            big_m_plus: big_plus,
            big_m_minus: big_minus,
            g: 1.0 / (big_minus - big_plus),
        })
    }

    /// `g(z, n₀) = [M_−(z,n₀) − M_+(z,n₀)]⁻¹`.
    pub fn green_diag(&self, z: C, n0: i64) -> Result<C> {
        Ok(self.weyl_data(z, n0)?.g)
    }

    pub fn xi(&self, lambda: f64, n: i64, opts: &AnalysisOptions) -> Result<f64> {
        spectral::xi_at(self, lambda, n, &opts.boundary)
    }

    /// Default reference sites `{0, 1, p}` (deduplicated).
    pub fn default_sites(&self) -> Vec<i64> {
        let mut s = vec![0, 1, self.period() as i64];
        s.dedup();
        s
    }

    pub fn ac_spectrum(
        &self,
        xs: &[f64],
        opts: &AnalysisOptions,
    ) -> Result<spectral::LineAcSpectrum<i64>> {
        spectral::ac_spectrum(self, xs, &self.reference_sites(), opts)
    }

    pub fn reflectionless_on(
        &self,
        e: &RealIntervalSet,
        xs: &[f64],
        opts: &AnalysisOptions,
    ) -> spectral::ReflectionlessReport<i64> {
        spectral::reflectionless_on(self, e, xs, &self.reference_sites(), opts)
    }

    pub fn multiplicity_sets(&self, xs: &[f64], opts: &AnalysisOptions) -> spectral::LineMultiplicity {
        spectral::multiplicity_sets(self, xs, 0, opts)
    }

    /// Finite section of `H`, used as an oracle.
    pub fn truncated_matrix(&self, n: usize, boundary: Truncation) -> Result<Tridiagonal> {
        if n < 4 {
            return Err(Error::InvalidWindow(format!("size {n} < 4")));
        }
        let first = match boundary {
            Truncation::HalfLine { n0 } => n0,
            Truncation::Window { center } => center - (n / 2) as i64,
        };
        let diag = (0..n).map(|k| self.b(first + k as i64)).collect();
        let off = (0..n - 1).map(|k| self.a(first + k as i64)).collect();
        Ok(Tridiagonal { first_site: first, diag, off })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// Sites `n₀, …, n₀+N−1` (Dirichlet at `n₀−1`).
    HalfLine { n0: i64 },
    /// Sites `center − N/2, …`.
    Window { center: i64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub first_site: i64,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn index_of(&self, site: i64) -> Option<usize> {
        let k = site - self.first_site;
        (k >= 0 && (k as usize) < self.diag.len()).then_some(k as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylData {
    pub z: C,
    pub n0: i64,
    pub m_plus: C,
    pub m_minus: C,
    #[serde(rename = "M_plus")]
    pub big_m_plus: C,
    #[serde(rename = "M_minus")]
    pub big_m_minus: C,
    pub g: C,
}

impl LineOperator for JacobiCoefficients {
    type Site = i64;

    fn weyl(&self, z: C, site: i64) -> Result<LineWeyl> {
        let w = self.weyl_data(z, site)?;
        Ok(LineWeyl {
            m_plus: w.big_m_plus,
            m_minus: w.big_m_minus,
            g: w.g,
        })
    }

    fn reference_sites(&self) -> Vec<i64> {
        self.default_sites()
    }

    fn spectral_window(&self) -> (f64, f64) {
        let r = self.sup_b() + 2.0 * self.sup_a() + 1.0;
        (-r, r)
    }
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

fn apply(m: &Mat, v: [C; 2]) -> [C; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn normalize(v: [C; 2]) -> [C; 2] {
    let s = v[0].norm().max(v[1].norm());
    if s > 0.0 && s.is_finite() {
        [v[0] / s, v[1] / s]
    } else {
        v
    }
}

/// Floquet multiplier and eigenvector of a 2×2 matrix with distinct
/// eigenvalue moduli; the larger one when `growing`, the smaller otherwise.
/// The discriminant is formed as `(t₀₀ − t₁₁)² + 4t₀₁t₁₀`, which keeps its
/// accuracy when `t` is close to `±I`.
pub(crate) fn floquet(t: &Mat, growing: bool) -> Result<(C, [C; 2])> {
    let tr = t[0][0] + t[1][1];
    let q = t[1][1] - t[0][0];
    let s = (q * q + 4.0 * t[0][1] * t[1][0]).sqrt();
    let (n1, n2) = ((tr + s).norm(), (tr - s).norm());
    let (big, small) = (n1.max(n2), n1.min(n2));
    if big - small <= 1e-10 * big {
        return Err(Error::MonodromyDegenerate {
            rho1: 0.5 * big,
            rho2: 0.5 * small,
        });
    }
    let s = if (n1 >= n2) == growing { s } else { -s };
    let rho = 0.5 * (tr + s);
    let v1 = [t[0][1], 0.5 * (q + s)];
    let v2 = [0.5 * (s - q), t[1][0]];
    let w1 = v1[0].norm() + v1[1].norm();
    let w2 = v2[0].norm() + v2[1].norm();
    Ok((rho, normalize(if w1 >= w2 { v1 } else { v2 })))
}
