//! Constants of the Herglotz / Carathéodory integral representations and
//! measure probes by Stieltjes (resp. Poisson) inversion.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

use super::extrapolate::richardson;
use super::{BoundaryFunction, BoundaryKind};

// 5-point Gauss–Legendre on [-1, 1]
const GL_X: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_W: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

fn integrate<F: Fn(f64) -> Result<f64>>(f: F, a: f64, b: f64, panels: usize) -> Result<f64> {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        for (x, w) in GL_X.iter().zip(GL_W.iter()) {
            total += w * f(mid + 0.5 * h * x)?;
        }
    }
    Ok(0.5 * h * total)
}

fn require(f: &dyn BoundaryFunction, kind: BoundaryKind) -> Result<()> {
    if f.kind() == kind {
        Ok(())
    } else {
        Err(Error::InvalidCoefficients(format!(
            "expected a {kind:?} function, got {:?}",
            f.kind()
        )))
    }
}

/// `m(z) = c + d z + ∫ dω(λ) (1/(λ−z) − λ/(1+λ²))`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HerglotzRepresentation {
    pub c: f64,
    pub d: f64,
    pub d_error: f64,
}

impl HerglotzRepresentation {
    /// `c = Re m(i)`, `d = lim_{η→∞} m(iη)/(iη)` extrapolated in `1/η`.
    pub fn compute(f: &dyn BoundaryFunction) -> Result<Self> {
        require(f, BoundaryKind::Herglotz)?;
        let c = f.evaluate(Complex64::i())?.re;
        let xs: Vec<f64> = (0..8).map(|k| 1e-2 * 0.5f64.powi(k)).collect();
        let vals = xs
            .iter()
            .map(|&x| {
                let z = Complex64::new(0.0, 1.0 / x);
                f.evaluate(z).map(|w| w / z)
            })
            .collect::<Result<Vec<_>>>()?;
        let b = richardson(&xs, &vals);
        let d = b.last().unwrap().re;
        let d_error = (b[b.len() - 1] - b[b.len() - 2]).norm();
        Ok(HerglotzRepresentation { c, d, d_error })
    }

    /// `ω((a,b)) + ½ω({a}) + ½ω({b})` by Stieltjes inversion,
    /// `lim_{ε↓0} π⁻¹ ∫_a^b Im m(λ+iε) dλ`.
    pub fn measure_probe(f: &dyn BoundaryFunction, a: f64, b: f64) -> Result<f64> {
        require(f, BoundaryKind::Herglotz)?;
        if !(b > a) {
            return Err(Error::InvertedInterval { lo: a, hi: b });
        }
        let eps: Vec<f64> = (0..6).map(|k| 0.05 * 0.5f64.powi(k)).collect();
        let vals = eps
            .iter()
            .map(|&e| {
                let panels = ((b - a) / (0.5 * e)).ceil().max(8.0) as usize;
                integrate(|x| Ok(f.evaluate(Complex64::new(x, e))?.im), a, b, panels)
                    .map(|v| Complex64::new(v / PI, 0.0))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(richardson(&eps, &vals).last().unwrap().re)
    }
}

/// `f(z) = ic + ∮ dω(ζ) (ζ+z)/(ζ−z)` with `∮ dω = Re f(0)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CaratheodoryRepresentation {
    pub c: f64,
    pub total_mass: f64,
}

impl CaratheodoryRepresentation {
    pub fn compute(f: &dyn BoundaryFunction) -> Result<Self> {
        require(f, BoundaryKind::Caratheodory)?;
        let w = f.evaluate(Complex64::new(0.0, 0.0))?;
        Ok(CaratheodoryRepresentation {
            c: w.im,
            total_mass: w.re,
        })
    }

    /// `ω` of the arc `(θ₁, θ₂)` plus half the endpoint masses, as
    /// `lim_{r↑1} (2π)⁻¹ ∫ Re f(re^{iθ}) dθ`. The full turn uses the
    /// trapezoid rule, which is spectrally accurate for periodic integrands.
    pub fn measure_probe(f: &dyn BoundaryFunction, theta1: f64, theta2: f64) -> Result<f64> {
        require(f, BoundaryKind::Caratheodory)?;
        let len = theta2 - theta1;
        if !(len > 0.0 && len <= TAU) {
            return Err(Error::InvalidArc(len));
        }
        let hs: Vec<f64> = (0..6).map(|k| 0.05 * 0.5f64.powi(k)).collect();
        let full = (len - TAU).abs() < 1e-15;
        let vals = hs
            .iter()
            .map(|&h| {
                let r = 1.0 - h;
                let v = if full {
                    let n = (40.0 / h).ceil() as usize;
                    let mut s = 0.0;
                    for j in 0..n {
                        s += f.evaluate(Complex64::from_polar(r, theta1 + TAU * j as f64 / n as f64))?.re;
                    }
                    s / n as f64
                } else {
                    let panels = (len / (0.5 * h)).ceil().max(8.0) as usize;
                    integrate(
                        |t| Ok(f.evaluate(Complex64::from_polar(r, t))?.re),
                        theta1,
                        theta2,
                        panels,
                    )? / TAU
                };
                Ok(Complex64::new(v, 0.0))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(richardson(&hs, &vals).last().unwrap().re)
    }
}
