//! Boundary limits `lim_{ε↓0} f(p + iε)` (line) and `lim_{r↑1} f(rζ)` (circle)
//! from a geometric schedule of interior samples.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::BoundaryKind;

/// Distances to the boundary (`ε` on the line, `1 − r` on the circle),
/// strictly decreasing and positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub eps: Vec<f64>,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::geometric(0.1, 0.5, 13)
    }
}

impl Schedule {
    pub fn geometric(first: f64, ratio: f64, stages: usize) -> Self {
        Schedule {
            eps: (0..stages).map(|k| first * ratio.powi(k as i32)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps.len() < 4 {
            return Err(Error::InvalidGrid(format!(
                "schedule needs at least 4 stages, got {}",
                self.eps.len()
            )));
        }
        let ok = self.eps.iter().all(|&e| e > 0.0 && e.is_finite())
            && self.eps.windows(2).all(|w| w[1] < w[0]);
        if !ok {
            return Err(Error::InvalidGrid(
                "schedule must be positive and strictly decreasing".into(),
            ));
        }
        Ok(())
    }
}

/// Knobs shared by boundary-value extraction and point classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundaryOptions {
    pub schedule: Schedule,
    /// Samples beyond this modulus are treated as divergent.
    pub cap: f64,
    /// Modulus beyond which monotone growth counts as an infinite limit.
    pub infinite_threshold: f64,
    /// Number of trailing stages that must grow monotonically.
    pub growth_stages: usize,
    /// Smallest boundary distance the schedule may be extended to.
    pub min_eps: f64,
    /// Relative floor below which Richardson differences count as converged.
    pub convergence_floor: f64,
    /// Smallest scaled limit that counts as a point mass.
    pub mass_tol: f64,
    /// Imaginary (line) or real (circle) parts below this are zero.
    pub positivity_tol: f64,
}

impl Default for BoundaryOptions {
    fn default() -> Self {
        BoundaryOptions {
            schedule: Schedule::default(),
            cap: 1e8,
            infinite_threshold: 1e6,
            growth_stages: 4,
            min_eps: 1e-9,
            convergence_floor: 1e-9,
            mass_tol: 1e-6,
            positivity_tol: 1e-7,
        }
    }
}

/// Interior point at boundary distance `eps` from boundary location `p`.
pub fn approach_point(kind: BoundaryKind, p: f64, eps: f64) -> Complex64 {
    match kind {
        BoundaryKind::Herglotz => Complex64::new(p, eps),
        BoundaryKind::Caratheodory => Complex64::from_polar(1.0 - eps, p),
    }
}

/// Two Neville stages (quadratic extrapolation to distance 0 through three
/// consecutive samples). For a halving schedule this is
/// `A = 2f' − f`, `B = (4A' − A)/3`.
pub fn richardson(eps: &[f64], vals: &[Complex64]) -> Vec<Complex64> {
    let n = vals.len();
    if n < 3 {
        return Vec::new();
    }
    let a: Vec<Complex64> = (0..n - 1)
        .map(|k| (vals[k + 1] * eps[k] - vals[k] * eps[k + 1]) / (eps[k] - eps[k + 1]))
        .collect();
    (0..n - 2)
        .map(|k| (a[k + 1] * eps[k] - a[k] * eps[k + 2]) / (eps[k] - eps[k + 2]))
        .collect()
}

/// Outcome of a boundary-limit computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryValue {
    pub value: Complex64,
    pub error: f64,
    /// Last sampled interior value and its distance.
    pub last_sample: Complex64,
    pub last_eps: f64,
    /// Ratio of the last two Richardson differences (small is good).
    pub contraction: f64,
    /// Trailing samples grow monotonically past the infinite threshold.
    pub infinite: bool,
    /// Same test applied to the positive part only (`Im` / `Re`).
    pub infinite_positive_part: bool,
    /// Some sample exceeded the divergence cap.
    pub capped: bool,
}

pub(crate) fn positive_part(kind: BoundaryKind, w: Complex64) -> f64 {
    match kind {
        BoundaryKind::Herglotz => w.im,
        BoundaryKind::Caratheodory => w.re,
    }
}

fn monotone_growth(vals: &[f64], stages: usize) -> bool {
    if vals.len() < stages {
        return false;
    }
    let tail = &vals[vals.len() - stages..];
    tail.windows(2).all(|w| w[1] > w[0])
}

/// Samples `f` along the schedule, extending it by halving while the
/// modulus keeps growing toward the infinite threshold.
pub fn sample_schedule<F>(
    f: &F,
    kind: BoundaryKind,
    p: f64,
    opts: &BoundaryOptions,
) -> Result<(Vec<f64>, Vec<Complex64>)>
where
    F: Fn(Complex64) -> Result<Complex64> + ?Sized,
{
    opts.schedule.validate()?;
    let mut eps = opts.schedule.eps.clone();
    let mut vals = Vec::with_capacity(eps.len() + 16);
    for &e in &eps {
        let v = f(approach_point(kind, p, e))?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite(if v.re.is_finite() { v.im } else { v.re }));
        }
        vals.push(v);
    }
    loop {
        let mods: Vec<f64> = vals.iter().map(|v| v.norm()).collect();
        let last = *mods.last().unwrap();
        let growing = monotone_growth(&mods, opts.growth_stages) && {
            let k = mods.len();
            mods[k - 1] > 1.3 * mods[k - 2]
        };
        let next = 0.5 * eps.last().unwrap();
        if !growing || last > opts.infinite_threshold || last > opts.cap || next < opts.min_eps {
            break;
        }
        let v = f(approach_point(kind, p, next))?;
        if !v.re.is_finite() || !v.im.is_finite() {
            break;
        }
        eps.push(next);
        vals.push(v);
    }
    Ok((eps, vals))
}

/// Richardson-extrapolated boundary value from precomputed samples.
pub fn extrapolate_samples(
    kind: BoundaryKind,
    p: f64,
    eps: &[f64],
    vals: &[Complex64],
    opts: &BoundaryOptions,
) -> Result<BoundaryValue> {
    let mods: Vec<f64> = vals.iter().map(|v| v.norm()).collect();
    let pos: Vec<f64> = vals.iter().map(|&v| positive_part(kind, v)).collect();
    let last = *vals.last().unwrap();
    let last_eps = *eps.last().unwrap();
    let capped = mods.iter().any(|&m| m > opts.cap);
    let infinite = monotone_growth(&mods, opts.growth_stages)
        && *mods.last().unwrap() > opts.infinite_threshold;
    let infinite_positive_part = monotone_growth(&pos, opts.growth_stages)
        && *pos.last().unwrap() > opts.infinite_threshold;
    if infinite || capped {
        return Ok(BoundaryValue {
            value: last,
            error: f64::INFINITY,
            last_sample: last,
            last_eps,
            contraction: f64::NAN,
            infinite: infinite || capped,
            infinite_positive_part,
            capped,
        });
    }
    // extrapolate over the base schedule tail only; extension stages are
    // used for growth detection
    let b = richardson(eps, vals);
    let value = *b.last().unwrap();
    let floor = opts.convergence_floor * (1.0 + value.norm());
    let (error, contraction, ok) = if b.len() >= 3 {
        let d1 = (b[b.len() - 1] - b[b.len() - 2]).norm();
        let d0 = (b[b.len() - 2] - b[b.len() - 3]).norm();
        let ratio = if d0 > 0.0 { d1 / d0 } else { 0.0 };
        (d1, ratio, d1 <= floor.max(0.5 * d0))
    } else {
        let d1 = (b[b.len() - 1] - b[0]).norm();
        (d1, 0.0, true)
    };
    if !ok {
        return Err(Error::NonConvergent {
            location: p,
            ratio: contraction,
        });
    }
    Ok(BoundaryValue {
        value,
        error,
        last_sample: last,
        last_eps,
        contraction,
        infinite: false,
        infinite_positive_part,
        capped: false,
    })
}

/// Boundary value of `f` at `p`, approached along the schedule.
pub fn boundary_value_of<F>(
    f: &F,
    kind: BoundaryKind,
    p: f64,
    opts: &BoundaryOptions,
) -> Result<BoundaryValue>
where
    F: Fn(Complex64) -> Result<Complex64> + ?Sized,
{
    let (eps, vals) = sample_schedule(f, kind, p, opts)?;
    extrapolate_samples(kind, p, &eps, &vals, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halving_richardson_matches_closed_form() {
        let eps = [0.4, 0.2, 0.1, 0.05];
        let f = |e: f64| 1.0 + 3.0 * e - 2.0 * e * e;
        let vals: Vec<Complex64> = eps.iter().map(|&e| Complex64::new(f(e), 0.0)).collect();
        let b = richardson(&eps, &vals);
        for v in b {
            assert!((v.re - 1.0).abs() < 1e-13);
        }
        let a0 = 2.0 * vals[1] - vals[0];
        let a1 = 2.0 * vals[2] - vals[1];
        let b0 = (4.0 * a1 - a0) / 3.0;
        assert!((b0 - richardson(&eps, &vals)[0]).norm() < 1e-14);
    }

    #[test]
    fn schedule_validation() {
        assert!(Schedule::default().validate().is_ok());
        assert_eq!(Schedule::default().eps.len(), 13);
        assert!(Schedule { eps: vec![0.1, 0.05, 0.02] }.validate().is_err());
        assert!(Schedule { eps: vec![0.1, 0.2, 0.05, 0.01] }.validate().is_err());
    }

    #[test]
    fn pole_is_detected_after_extension() {
        let f = |z: Complex64| Ok(-1.0 / z);
        let bv = boundary_value_of(&f, BoundaryKind::Herglotz, 0.0, &BoundaryOptions::default())
            .unwrap();
        assert!(bv.infinite);
        assert!(bv.infinite_positive_part);
        assert!(bv.last_eps >= 1e-9);
    }

    #[test]
    fn sqrt_singularity_does_not_contract() {
        // f(λ+iε) = i √(iε) near a square-root branch point
        let f = |z: Complex64| Ok(Complex64::i() * z.sqrt());
        let r = boundary_value_of(&f, BoundaryKind::Herglotz, 0.0, &BoundaryOptions::default());
        assert!(matches!(r, Err(Error::NonConvergent { .. })));
    }
}
