//! Boundary analysis on the unit circle: Ξ₁,₁, ac spectrum, reflectionless
//! test, the 2×2 density `R(ζ)` and multiplicity sets.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::{approach_point, boundary_value_of, richardson, BoundaryKind, BoundaryValue};
use crate::error::{Error, Result};
use crate::grid::{hull_circle, hull_circle_refined, AngularGrid};
use crate::interval_sets::CircleArcSet;
use crate::spectral::{AnalysisOptions, SiteSet};

use super::{build_truncation, Side, VerblunskyCoefficients};

type C = Complex64;

fn bv<F>(f: F, theta: f64, opts: &AnalysisOptions) -> Result<BoundaryValue>
where
    F: Fn(C) -> Result<C>,
{
    boundary_value_of(&f, BoundaryKind::Caratheodory, theta, &opts.boundary)
}

/// `(1/π) Arg w` with `Re w` clamped to `≥ 0`, a value in `[−½, ½]`.
pub fn circle_phase(w: C) -> f64 {
    C::new(w.re.max(0.0), w.im).arg() / PI
}

/// Boundary value of `M₁,₁(e^{iθ}, n)` from inside the disk.
pub fn m11_boundary(v: &VerblunskyCoefficients, theta: f64, n: i64, opts: &AnalysisOptions) -> Result<BoundaryValue> {
    bv(|z| v.weyl_data(z, n).map(|w| w.m11), theta, opts)
}

/// `Ξ₁,₁(ζ, n) = (1/π) Arg M₁,₁(e^{iθ}, n)`.
pub fn xi11(v: &VerblunskyCoefficients, theta: f64, n: i64, opts: &AnalysisOptions) -> Result<f64> {
    let b = m11_boundary(v, theta, n, opts)?;
    if b.infinite {
        return Err(Error::NonConvergent {
            location: theta,
            ratio: f64::INFINITY,
        });
    }
    Ok(circle_phase(b.value))
}

fn strictly_inside(x: Option<f64>, tol: f64) -> bool {
    matches!(x, Some(v) if v > -0.5 + tol && v < 0.5 - tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct CircleAcSpectrum {
    pub set: CircleArcSet,
    pub per_site: Vec<SiteSet<i64, CircleArcSet>>,
    pub site_discrepancy: f64,
    pub grid_step: f64,
    /// `(θ, Ξ₁,₁)` at the first site; `None` where the limit failed.
    pub xi: Vec<(f64, Option<f64>)>,
}

/// σ_ac as the essential closure of `{ζ | −½ < Ξ₁,₁(ζ) < ½}` at each site.
pub fn ac_spectrum(
    v: &VerblunskyCoefficients,
    grid: &AngularGrid,
    sites: &[i64],
    opts: &AnalysisOptions,
) -> Result<CircleAcSpectrum> {
    if sites.is_empty() {
        return Err(Error::InvalidGrid("no reference site".into()));
    }
    let thetas = grid.points();
    let mut first_xi = Vec::new();
    let per_site: Vec<_> = sites
        .iter()
        .map(|&n| {
            let xi: Vec<Option<f64>> = thetas.par_iter().map(|&t| xi11(v, t, n, opts).ok()).collect();
            let flags: Vec<bool> = xi.iter().map(|&x| strictly_inside(x, opts.phase_tol)).collect();
            let inside = |t: f64| strictly_inside(xi11(v, t, n, opts).ok(), opts.phase_tol);
            let set = hull_circle_refined(grid, &flags, inside, opts.refine_iters).essential_closure();
            if first_xi.is_empty() {
                first_xi = thetas.iter().copied().zip(xi.iter().copied()).collect();
            }
            SiteSet {
                site: n,
                set,
                undetermined: xi.iter().filter(|x| x.is_none()).count(),
            }
        })
        .collect();
    let mut site_discrepancy: f64 = 0.0;
    for a in &per_site {
        for b in &per_site {
            if !(a.set.is_empty() && b.set.is_empty()) {
                site_discrepancy = site_discrepancy.max(a.set.hausdorff(&b.set));
            }
        }
    }
    Ok(CircleAcSpectrum {
        set: per_site[0].set.clone(),
        per_site,
        site_discrepancy,
        grid_step: grid.step(),
        xi: first_xi,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CircleSiteReflection {
    pub site: i64,
    pub samples: usize,
    pub passing: usize,
    pub pass_fraction: f64,
    /// Maximum of `|M_+ + conj M_−|` where computed.
    pub max_residual: f64,
    pub failed_evaluations: usize,
    /// Fraction of points with `|Ξ₁,₁| < xi_half_tol`.
    pub xi_zero_fraction: f64,
    pub max_abs_xi: f64,
    /// `M₁,₁ = (1+|M_±|²)/(±2 Re M_±)`, largest relative residual on passing points.
    pub witness_max: f64,
    /// `|Im M₁,₁|` maximum on passing points.
    pub max_im_m11: f64,
    /// Fraction of passing points with `0 < Re M₁,₁ < 10⁶`.
    pub re_m11_positive_fraction: f64,
    /// Fraction of passing points with `0 < ±Re M_± < ∞`.
    pub multiplicity_witness_fraction: f64,
    /// Largest residual of the `Re M₁,₁` quotient identity over computed points.
    pub re_m11_identity_max: f64,
    pub defect_set: CircleArcSet,
}

#[derive(Debug, Clone, Serialize)]
pub struct CircleReflectionReport {
    pub verdict: bool,
    pub status: String,
    pub sites: Vec<CircleSiteReflection>,
    pub defect_set: CircleArcSet,
    pub max_residual: f64,
    pub defect_fraction: f64,
    pub witness_max: f64,
    pub re_m11_identity_max: f64,
    pub site_disagreement: bool,
}

struct Row {
    mp: C,
    mm: C,
    m11: C,
}

fn boundary_row(v: &VerblunskyCoefficients, theta: f64, n: i64, opts: &AnalysisOptions) -> Result<Row> {
    let get = |pick: fn(&super::CmvWeylData) -> C| {
        let b = bv(|z| v.weyl_data(z, n).map(|w| pick(&w)), theta, opts)?;
        if b.infinite {
            Err(Error::NonConvergent {
                location: theta,
                ratio: f64::INFINITY,
            })
        } else {
            Ok(b.value)
        }
    };
    Ok(Row {
        mp: get(|w| w.big_m_plus)?,
        mm: get(|w| w.big_m_minus)?,
        m11: get(|w| w.m11)?,
    })
}

/// `Re M₁,₁` from the quotient of boundary values of `M_±`.
pub fn re_m11_quotient(mp: C, mm: C) -> f64 {
    (mp.re * (1.0 + mm.norm_sqr()) - mm.re * (1.0 + mp.norm_sqr())) / (mp - mm).norm_sqr()
}

/// Reflectionless test `M_+(ζ) = −conj M_−(ζ)` on `grid ∩ E` at each site.
pub fn reflectionless_on(
    v: &VerblunskyCoefficients,
    e: &CircleArcSet,
    grid: &AngularGrid,
    sites: &[i64],
    opts: &AnalysisOptions,
) -> CircleReflectionReport {
    let thetas = grid.points();
    let in_e: Vec<bool> = thetas.iter().map(|&t| e.contains(t)).collect();
    let count = in_e.iter().filter(|&&b| b).count();
    if e.measure() <= 0.0 || count == 0 {
        return CircleReflectionReport {
            verdict: false,
            status: format!("E has measure {} and {} grid points", e.measure(), count),
            sites: Vec::new(),
            defect_set: e.clone(),
            max_residual: f64::NAN,
            defect_fraction: 1.0,
            witness_max: f64::NAN,
            re_m11_identity_max: f64::NAN,
            site_disagreement: false,
        };
    }
    let out: Vec<CircleSiteReflection> = sites
        .iter()
        .map(|&n| {
            let rows: Vec<Option<Result<Row>>> = thetas
                .par_iter()
                .zip(in_e.par_iter())
                .map(|(&t, &inside)| inside.then(|| boundary_row(v, t, n, opts)))
                .collect();
            let mut defect = vec![false; thetas.len()];
            let (mut passing, mut failed, mut xi_ok, mut pos, mut mw) = (0, 0, 0, 0, 0);
            let (mut max_res, mut max_xi, mut wit, mut im11, mut ident) =
                (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
            for (i, row) in rows.iter().enumerate() {
                let Some(row) = row else { continue };
                let Ok(r) = row else {
                    failed += 1;
                    defect[i] = true;
                    continue;
                };
                let res = (r.mp + r.mm.conj()).norm();
                max_res = max_res.max(res);
                let xi = circle_phase(r.m11).abs();
                max_xi = max_xi.max(xi);
                if xi < opts.xi_half_tol {
                    xi_ok += 1;
                }
                let q = re_m11_quotient(r.mp, r.mm);
                ident = ident.max((r.m11.re - q).abs() / (1.0 + q.abs()));
                if res < opts.reflect_tol {
                    passing += 1;
                    let w1 = (1.0 + r.mp.norm_sqr()) / (2.0 * r.mp.re);
                    let w2 = (1.0 + r.mm.norm_sqr()) / (-2.0 * r.mm.re);
                    let rel = (r.m11 - w1).norm().max((r.m11 - w2).norm()) / (1.0 + r.m11.norm());
                    wit = wit.max(rel);
                    im11 = im11.max(r.m11.im.abs());
                    if r.m11.re > 0.0 && r.m11.re < 1e6 {
                        pos += 1;
                    }
                    if r.mp.re > opts.nonreal_tol && -r.mm.re > opts.nonreal_tol {
                        mw += 1;
                    }
                } else {
                    defect[i] = true;
                }
            }
            let frac = |k: usize, d: usize| if d > 0 { k as f64 / d as f64 } else { 0.0 };
            CircleSiteReflection {
                site: n,
                samples: count,
                passing,
                pass_fraction: frac(passing, count),
                max_residual: max_res,
                failed_evaluations: failed,
                xi_zero_fraction: frac(xi_ok, count),
                max_abs_xi: max_xi,
                witness_max: wit,
                max_im_m11: im11,
                re_m11_positive_fraction: frac(pos, passing),
                multiplicity_witness_fraction: frac(mw, passing),
                re_m11_identity_max: ident,
                defect_set: hull_circle(grid, &defect),
            }
        })
        .collect();
    let pass: Vec<bool> = out.iter().map(|s| s.pass_fraction > opts.pass_fraction).collect();
    let verdict = !pass.is_empty() && pass.iter().all(|&p| p);
    let defect_fraction = out.iter().map(|s| 1.0 - s.pass_fraction).fold(0.0, f64::max);
    CircleReflectionReport {
        verdict,
        status: if verdict {
            "reflectionless".into()
        } else {
            format!("defect fraction {defect_fraction:.4} exceeds {:.4}", 1.0 - opts.pass_fraction)
        },
        defect_set: out
            .iter()
            .fold(CircleArcSet::empty(), |acc, s| acc.union(&s.defect_set)),
        max_residual: out.iter().map(|s| s.max_residual).fold(0.0, f64::max),
        defect_fraction,
        witness_max: out.iter().map(|s| s.witness_max).fold(0.0, f64::max),
        re_m11_identity_max: out.iter().map(|s| s.re_m11_identity_max).fold(0.0, f64::max),
        site_disagreement: pass.iter().any(|&p| p) && !verdict,
        sites: out,
    }
}

/// `R(ζ)` at one angle: Hermitian, nonnegative, trace one.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RSample {
    pub theta: f64,
    pub r00: f64,
    pub r11: f64,
    pub r01: C,
    pub trace: f64,
    /// Boundary value of `Re M^tr`; `R` carries no ac information where it vanishes.
    pub trace_density: f64,
    pub min_eigenvalue: f64,
    /// Eigenvalues of `R` above the rank tolerance; zero off the ac support.
    pub rank: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixMeasureData {
    pub n0: i64,
    pub window: usize,
    /// `Re M^tr(0)`, the total mass of `dΩ^tr`.
    pub trace_mass: f64,
    pub samples: Vec<RSample>,
    pub max_trace_error: f64,
    pub min_eigenvalue: f64,
    pub failed: usize,
}

/// Radii schedule `1 − 0.1·2^{−k}`, `k = 0..5`, short enough that the
/// section resolvent has decayed well inside the window.
const R_SCHEDULE: [f64; 6] = [0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125];

/// The 2×2 Cayley block at `(n₀−1, n₀)` from a truncation of size
/// `window`, and the density `R(ζ)` of its Hermitian boundary part
/// relative to the trace.
pub fn matrix_m_and_r(
    v: &VerblunskyCoefficients,
    n0: i64,
    grid: &AngularGrid,
    window: usize,
    rank_tol: f64,
) -> Result<MatrixMeasureData> {
    let lo = n0 - (window / 2) as i64;
    let t = build_truncation(v, lo - lo.rem_euclid(2), window)?;
    let b0 = t.cayley_block(C::new(0.0, 0.0), n0)?;
    let trace_mass = (b0[0][0] + b0[1][1]).re;
    let eps = R_SCHEDULE;
    let rows: Vec<Option<RSample>> = grid
        .points()
        .par_iter()
        .map(|&theta| {
            let mut s00 = Vec::new();
            let mut s11 = Vec::new();
            let mut s01 = Vec::new();
            let mut str = Vec::new();
            for &e in &eps {
                let z = approach_point(BoundaryKind::Caratheodory, theta, e);
                let b = t.cayley_block(z, n0).ok()?;
                let h00 = b[0][0].re;
                let h11 = b[1][1].re;
                let h01 = 0.5 * (b[0][1] + b[1][0].conj());
                let tr = h00 + h11;
                str.push(C::new(tr, 0.0));
                s00.push(C::new(h00 / tr, 0.0));
                s11.push(C::new(h11 / tr, 0.0));
                s01.push(h01 / tr);
            }
            let r00 = richardson(&eps, &s00).last()?.re;
            let r11 = richardson(&eps, &s11).last()?.re;
            let r01 = *richardson(&eps, &s01).last()?;
            let trace_density = richardson(&eps, &str).last()?.re;
            let trace = r00 + r11;
            let mean = 0.5 * trace;
            let disc = (0.25 * (r00 - r11).powi(2) + r01.norm_sqr()).sqrt();
            let min_eigenvalue = mean - disc;
            let rank = if trace_density > rank_tol {
                [mean - disc, mean + disc].iter().filter(|&&l| l > rank_tol).count()
            } else {
                0
            };
            Some(RSample {
                theta,
                r00,
                r11,
                r01,
                trace,
                trace_density,
                min_eigenvalue,
                rank,
            })
        })
        .collect();
    let failed = rows.iter().filter(|r| r.is_none()).count();
    let samples: Vec<RSample> = rows.into_iter().flatten().collect();
    Ok(MatrixMeasureData {
        n0,
        window,
        trace_mass,
        max_trace_error: samples.iter().map(|s| (s.trace - 1.0).abs()).fold(0.0, f64::max),
        min_eigenvalue: samples.iter().map(|s| s.min_eigenvalue).fold(f64::INFINITY, f64::min),
        samples,
        failed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CircleMultiplicity {
    pub m2: CircleArcSet,
    pub m1: CircleArcSet,
    /// Angles where `Im M₁,₁` changes sign `− → +` across a gap (poles).
    pub eigen_candidates: Vec<f64>,
    pub undetermined: usize,
}

#[derive(Clone, Copy)]
enum Bv {
    Imaginary(f64),
    Other,
    Infinite,
    Unknown,
}

fn grade(b: Result<BoundaryValue>, tol: f64) -> Bv {
    match b {
        Ok(b) if b.infinite => Bv::Infinite,
        Ok(b) if b.value.re.abs() < tol * (1.0 + b.value.norm()) => Bv::Imaginary(b.value.im),
        Ok(_) => Bv::Other,
        Err(_) => Bv::Unknown,
    }
}

/// Grid hulls of the multiplicity sets from boundary values of `M_±`;
/// "nonreal" becomes "not purely imaginary".
pub fn multiplicity_sets(
    v: &VerblunskyCoefficients,
    grid: &AngularGrid,
    site: i64,
    opts: &AnalysisOptions,
) -> CircleMultiplicity {
    let tol = opts.nonreal_tol;
    let thetas = grid.points();
    let rows: Vec<(Bv, Bv, Bv)> = thetas
        .par_iter()
        .map(|&t| {
            let p = grade(bv(|z| v.big_m(z, site, Side::Plus), t, opts), tol);
            let m = grade(bv(|z| v.big_m(z, site, Side::Minus), t, opts), tol);
            // a negative Re M₁,₁ is extrapolation error
            let g = match bv(|z| v.weyl_data(z, site).map(|w| w.m11), t, opts) {
                Ok(b) if !b.infinite && b.value.re <= tol * (1.0 + b.value.norm()) => {
                    Bv::Imaginary(b.value.im)
                }
                Ok(b) if b.infinite => Bv::Infinite,
                Ok(_) => Bv::Other,
                Err(_) => Bv::Unknown,
            };
            (p, m, g)
        })
        .collect();
    let n = thetas.len();
    let mut f2 = vec![false; n];
    let mut f1 = vec![false; n];
    let mut undetermined = 0;
    for (i, (p, m, _)) in rows.iter().enumerate() {
        match (p, m) {
            (Bv::Other, Bv::Other) => f2[i] = true,
            (Bv::Imaginary(_), Bv::Other) | (Bv::Other, Bv::Imaginary(_)) => f1[i] = true,
            (Bv::Infinite, Bv::Infinite) => f1[i] = true,
            (Bv::Imaginary(a), Bv::Imaginary(b)) if (a - b).abs() < tol => f1[i] = true,
            (Bv::Unknown, _) | (_, Bv::Unknown) => undetermined += 1,
            _ => {}
        }
    }
    let sign = |t: f64| {
        v.weyl_data(C::from_polar(1.0 - 1e-12, t), site)
            .ok()
            .map(|w| w.m11.im > 0.0)
    };
    let mut eigen_candidates = Vec::new();
    // cyclic scan starting after a point that is not purely imaginary, if any
    let start = rows
        .iter()
        .position(|r| matches!(r.2, Bv::Other))
        .unwrap_or(0);
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=n {
        let i = (start + k) % n;
        let t = thetas[start] + (k as f64) * grid.step();
        match rows[i].2 {
            Bv::Imaginary(y) => {
                if let Some((t0, y0)) = prev {
                    if y0 < 0.0 && y > 0.0 {
                        let (mut lo, mut hi) = (t0, t);
                        for _ in 0..opts.refine_iters + 20 {
                            let mid = 0.5 * (lo + hi);
                            match sign(mid) {
                                Some(false) => lo = mid,
                                Some(true) => hi = mid,
                                None => break,
                            }
                        }
                        eigen_candidates.push(crate::interval_sets::normalize_angle(0.5 * (lo + hi)));
                    }
                }
                prev = Some((t, y));
            }
            Bv::Other => prev = None,
            Bv::Infinite | Bv::Unknown => {}
        }
    }
    eigen_candidates.sort_by(f64::total_cmp);
    eigen_candidates.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let cand = CircleArcSet::from_parts(&[], &eigen_candidates).expect("finite angles");
    CircleMultiplicity {
        m2: hull_circle(grid, &f2),
        m1: hull_circle(grid, &f1).union(&cand),
        eigen_candidates,
        undetermined,
    }
}
