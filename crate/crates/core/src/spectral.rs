//! Boundary-value analysis shared by the self-adjoint line operators:
//! ξ phases, ac spectrum, reflectionless tests and multiplicity sets.

use std::f64::consts::PI;
use std::fmt::Debug;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{boundary_value_of, BoundaryKind, BoundaryOptions, BoundaryValue};
use crate::error::{Error, Result};
use crate::grid::{hull_line, hull_line_refined};
use crate::interval_sets::{Interval, RealIntervalSet};

/// Tolerances for the operator-level analyses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisOptions {
    pub boundary: BoundaryOptions,
    /// ξ counts as strictly inside `(0, 1)` (resp. `(−½, ½)`) beyond this margin.
    pub phase_tol: f64,
    /// `|M_+ − conj M_−|` threshold for a reflectionless grid point.
    pub reflect_tol: f64,
    /// `|ξ − ½|` threshold for the phase form of the reflectionless test.
    pub xi_half_tol: f64,
    /// `|Im M| > nonreal_tol·(1 + |M|)` counts as nonreal.
    pub nonreal_tol: f64,
    /// Fraction of passing grid points required for a reflectionless verdict.
    pub pass_fraction: f64,
    /// Bisection steps when refining band edges.
    pub refine_iters: usize,
    /// Threshold for `|−1/g ∓ 2i Im M_±|` on reflectionless points.
    pub witness_tol: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            boundary: BoundaryOptions::default(),
            phase_tol: 1e-6,
            reflect_tol: 1e-4,
            xi_half_tol: 1e-4,
            nonreal_tol: 1e-4,
            pass_fraction: 0.99,
            refine_iters: 12,
            witness_tol: 1e-3,
        }
    }
}

/// Weyl data at an interior point: `M_+` Herglotz, `M_−` anti-Herglotz,
/// `g = 1/(M_− − M_+)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineWeyl {
    pub m_plus: Complex64,
    pub m_minus: Complex64,
    pub g: Complex64,
}

/// A self-adjoint operator on ℤ or ℝ with computable Weyl data.
pub trait LineOperator: Sync {
    type Site: Copy + Debug + Serialize + PartialEq + Send + Sync;

    /// `(M_+, M_−, g)` at `z` with `Im z > 0`, relative to `site`.
    fn weyl(&self, z: Complex64, site: Self::Site) -> Result<LineWeyl>;

    /// Reference sites used for site-independence checks.
    fn reference_sites(&self) -> Vec<Self::Site>;

    /// A window containing the spectrum.
    fn spectral_window(&self) -> (f64, f64);
}

fn component<O: LineOperator>(
    op: &O,
    lambda: f64,
    site: O::Site,
    opts: &BoundaryOptions,
    pick: fn(&LineWeyl) -> Complex64,
) -> Result<BoundaryValue> {
    boundary_value_of(
        &|z| op.weyl(z, site).map(|w| pick(&w)),
        BoundaryKind::Herglotz,
        lambda,
        opts,
    )
}

/// Boundary value of `g(λ+i0)`.
pub fn boundary_green<O: LineOperator>(
    op: &O,
    lambda: f64,
    site: O::Site,
    opts: &BoundaryOptions,
) -> Result<BoundaryValue> {
    component(op, lambda, site, opts, |w| w.g)
}

/// Boundary values of `M_±(λ+i0)` and `g(λ+i0)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryWeyl {
    pub lambda: f64,
    pub m_plus: BoundaryValue,
    pub m_minus: BoundaryValue,
    pub g: BoundaryValue,
}

pub fn boundary_weyl<O: LineOperator>(
    op: &O,
    lambda: f64,
    site: O::Site,
    opts: &BoundaryOptions,
) -> Result<BoundaryWeyl> {
    Ok(BoundaryWeyl {
        lambda,
        m_plus: component(op, lambda, site, opts, |w| w.m_plus)?,
        m_minus: component(op, lambda, site, opts, |w| w.m_minus)?,
        g: component(op, lambda, site, opts, |w| w.g)?,
    })
}

/// `(1/π) Arg w` with `Im w` clamped to `≥ 0`, so the value lies in `[0, 1]`.
pub fn phase_fraction(w: Complex64) -> f64 {
    Complex64::new(w.re, w.im.max(0.0)).arg() / PI
}

/// `ξ(λ) = (1/π) Arg g(λ+i0)`.
pub fn xi_at<O: LineOperator>(
    op: &O,
    lambda: f64,
    site: O::Site,
    opts: &BoundaryOptions,
) -> Result<f64> {
    let bv = boundary_green(op, lambda, site, opts)?;
    Ok(phase_fraction(bv.value))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XiSample {
    pub lambda: f64,
    pub xi: Option<f64>,
    pub g: Option<Complex64>,
    pub error_estimate: f64,
    pub status: String,
}

impl XiSample {
    pub fn verdict(&self, phase_tol: f64) -> &'static str {
        match self.xi {
            None => "undetermined",
            Some(x) if x > phase_tol && x < 1.0 - phase_tol => "ac",
            Some(_) => "gap",
        }
    }
}

/// ξ along `xs`, in parallel, order preserved.
pub fn xi_sweep<O: LineOperator>(
    op: &O,
    xs: &[f64],
    site: O::Site,
    opts: &BoundaryOptions,
) -> Vec<XiSample> {
    xs.par_iter()
        .map(|&lambda| match boundary_green(op, lambda, site, opts) {
            Ok(bv) if bv.infinite => XiSample {
                lambda,
                xi: None,
                g: Some(bv.last_sample),
                error_estimate: f64::INFINITY,
                status: "pole".into(),
            },
            Ok(bv) => XiSample {
                lambda,
                xi: Some(phase_fraction(bv.value)),
                g: Some(bv.value),
                error_estimate: bv.error,
                status: String::new(),
            },
            Err(e) => XiSample {
                lambda,
                xi: None,
                g: None,
                error_estimate: f64::INFINITY,
                status: e.to_string(),
            },
        })
        .collect()
}

fn strictly_inside(x: Option<f64>, tol: f64) -> bool {
    matches!(x, Some(v) if v > tol && v < 1.0 - tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct SiteSet<S, T> {
    pub site: S,
    pub set: T,
    pub undetermined: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct LineAcSpectrum<S> {
    /// Essential closure of the refined grid hull of `{0 < ξ < 1}` at the first site.
    pub set: RealIntervalSet,
    pub per_site: Vec<SiteSet<S, RealIntervalSet>>,
    /// Largest Hausdorff distance between per-site sets.
    pub site_discrepancy: f64,
    pub grid_step: f64,
}

/// σ_ac as the essential closure of `{λ | 0 < ξ(λ) < 1}` for each site in `sites`.
pub fn ac_spectrum<O: LineOperator>(
    op: &O,
    xs: &[f64],
    sites: &[O::Site],
    opts: &AnalysisOptions,
) -> Result<LineAcSpectrum<O::Site>> {
    if xs.len() < 2 || sites.is_empty() {
        return Err(Error::InvalidGrid("ac spectrum needs ≥ 2 grid points and a site".into()));
    }
    let step = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    let per_site: Vec<_> = sites
        .iter()
        .map(|&site| {
            let samples = xi_sweep(op, xs, site, &opts.boundary);
            let flags: Vec<bool> = samples
                .iter()
                .map(|s| strictly_inside(s.xi, opts.phase_tol))
                .collect();
            let undetermined = samples.iter().filter(|s| s.xi.is_none()).count();
            let inside = |l: f64| strictly_inside(xi_at(op, l, site, &opts.boundary).ok(), opts.phase_tol);
            let hull = hull_line_refined(xs, &flags, inside, opts.refine_iters);
            SiteSet {
                site,
                set: hull.essential_closure(),
                undetermined,
            }
        })
        .collect();
    let mut site_discrepancy: f64 = 0.0;
    for a in &per_site {
        for b in &per_site {
            if a.set.is_empty() && b.set.is_empty() {
                continue;
            }
            site_discrepancy = site_discrepancy.max(a.set.hausdorff(&b.set));
        }
    }
    Ok(LineAcSpectrum {
        set: per_site[0].set.clone(),
        per_site,
        site_discrepancy,
        grid_step: step,
    })
}

/// Grid points of `xs` lying in `e`.
pub fn grid_points_in(xs: &[f64], e: &RealIntervalSet) -> Vec<bool> {
    xs.iter().map(|&x| e.contains(x)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SiteReflection<S> {
    pub site: S,
    pub samples: usize,
    pub passing: usize,
    pub pass_fraction: f64,
    /// Maximum of `|M_+ − conj M_−|` over points where it was computed.
    pub max_residual: f64,
    pub failed_evaluations: usize,
    /// Fraction of points with `|ξ − ½| < xi_half_tol`.
    pub xi_half_fraction: f64,
    pub max_xi_deviation: f64,
    /// Maximum of `|−1/g ∓ 2i Im M_±|` over passing points.
    pub witness_max: f64,
    /// Fraction of passing points with `0 < ±Im M_± < ∞`.
    pub multiplicity_witness_fraction: f64,
    pub defect_set: RealIntervalSet,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReflectionlessReport<S> {
    pub verdict: bool,
    pub status: String,
    pub sites: Vec<SiteReflection<S>>,
    pub defect_set: RealIntervalSet,
    pub max_residual: f64,
    /// Largest defect fraction over sites.
    pub defect_fraction: f64,
    pub witness_max: f64,
    /// Some sites pass while others fail.
    pub site_disagreement: bool,
}

/// Reflectionless test `M_+(λ+i0) = conj M_−(λ+i0)` on `grid ∩ E` at each site.
pub fn reflectionless_on<O: LineOperator>(
    op: &O,
    e: &RealIntervalSet,
    xs: &[f64],
    sites: &[O::Site],
    opts: &AnalysisOptions,
) -> ReflectionlessReport<O::Site> {
    let in_e = grid_points_in(xs, e);
    let count = in_e.iter().filter(|&&b| b).count();
    if e.measure() <= 0.0 || count == 0 {
        return ReflectionlessReport {
            verdict: false,
            status: format!("E has measure {} and {} grid points", e.measure(), count),
            sites: Vec::new(),
            defect_set: e.clone(),
            max_residual: f64::NAN,
            defect_fraction: 1.0,
            witness_max: f64::NAN,
            site_disagreement: false,
        };
    }
    let sites_out: Vec<_> = sites
        .iter()
        .map(|&site| {
            let rows: Vec<Option<Result<BoundaryWeyl>>> = xs
                .par_iter()
                .zip(in_e.par_iter())
                .map(|(&l, &inside)| inside.then(|| boundary_weyl(op, l, site, &opts.boundary)))
                .collect();
            let mut defect = vec![false; xs.len()];
            let (mut passing, mut failed, mut xi_ok, mut mw) = (0usize, 0usize, 0usize, 0usize);
            let (mut max_res, mut max_dev, mut wit): (f64, f64, f64) = (0.0, 0.0, 0.0);
            for (i, row) in rows.iter().enumerate() {
                let Some(row) = row else { continue };
                let bw = match row {
                    Ok(bw) if !(bw.m_plus.infinite || bw.m_minus.infinite || bw.g.infinite) => bw,
                    _ => {
                        failed += 1;
                        defect[i] = true;
                        continue;
                    }
                };
                let (mp, mm, g) = (bw.m_plus.value, bw.m_minus.value, bw.g.value);
                let res = (mp - mm.conj()).norm();
                max_res = max_res.max(res);
                let dev = (phase_fraction(g) - 0.5).abs();
                max_dev = max_dev.max(dev);
                if dev < opts.xi_half_tol {
                    xi_ok += 1;
                }
                if res < opts.reflect_tol {
                    passing += 1;
                    let inv = -1.0 / g;
                    let i2 = Complex64::new(0.0, 2.0);
                    let w = (inv - i2 * mp.im).norm().max((inv + i2 * mm.im).norm());
                    wit = wit.max(w);
                    if mp.im > opts.nonreal_tol && -mm.im > opts.nonreal_tol {
                        mw += 1;
                    }
                } else {
                    defect[i] = true;
                }
            }
            SiteReflection {
                site,
                samples: count,
                passing,
                pass_fraction: passing as f64 / count as f64,
                max_residual: max_res,
                failed_evaluations: failed,
                xi_half_fraction: xi_ok as f64 / count as f64,
                max_xi_deviation: max_dev,
                witness_max: wit,
                multiplicity_witness_fraction: if passing > 0 { mw as f64 / passing as f64 } else { 0.0 },
                defect_set: hull_line(xs, &defect),
            }
        })
        .collect();
    let pass: Vec<bool> = sites_out
        .iter()
        .map(|s: &SiteReflection<O::Site>| s.pass_fraction > opts.pass_fraction)
        .collect();
    let verdict = !pass.is_empty() && pass.iter().all(|&p| p);
    let site_disagreement = pass.iter().any(|&p| p) && !verdict;
    let defect_set = sites_out
        .iter()
        .fold(RealIntervalSet::empty(), |acc, s| acc.union(&s.defect_set));
    let max_residual = sites_out.iter().map(|s| s.max_residual).fold(0.0, f64::max);
    let defect_fraction = sites_out
        .iter()
        .map(|s| 1.0 - s.pass_fraction)
        .fold(0.0, f64::max);
    let witness_max = sites_out.iter().map(|s| s.witness_max).fold(0.0, f64::max);
    let status = if verdict {
        "reflectionless".to_string()
    } else {
        format!(
            "defect fraction {defect_fraction:.4} exceeds {:.4}",
            1.0 - opts.pass_fraction
        )
    };
    ReflectionlessReport {
        verdict,
        status,
        sites: sites_out,
        defect_set,
        max_residual,
        defect_fraction,
        witness_max,
        site_disagreement,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LineMultiplicity {
    pub m2: RealIntervalSet,
    pub m1: RealIntervalSet,
    /// Sign changes `+ → −` of a real `g`, refined by bisection.
    pub eigen_candidates: Vec<f64>,
    pub undetermined: usize,
}

#[derive(Clone, Copy)]
enum Bv {
    Real(f64),
    Nonreal,
    Infinite,
    Unknown,
}

/// Nonreal needs `|Im|` above both the relative tolerance and the
/// extrapolation error; near a pole both scale with `|value|`.
fn grade(bv: &Result<BoundaryValue>, tol: f64) -> Bv {
    match bv {
        Ok(b) if b.infinite => Bv::Infinite,
        Ok(b) if b.value.im.abs() > (tol * (1.0 + b.value.norm())).max(b.error) => Bv::Nonreal,
        Ok(b) => Bv::Real(b.value.re),
        Err(_) => Bv::Unknown,
    }
}

/// Grid hulls of the uniform multiplicity sets from boundary values of `M_±`.
pub fn multiplicity_sets<O: LineOperator>(
    op: &O,
    xs: &[f64],
    site: O::Site,
    opts: &AnalysisOptions,
) -> LineMultiplicity {
    let tol = opts.nonreal_tol;
    let bopts = &opts.boundary;
    let rows: Vec<(Bv, Bv, Bv)> = xs
        .par_iter()
        .map(|&l| {
            let p = component(op, l, site, bopts, |w| w.m_plus);
            let m = component(op, l, site, bopts, |w| w.m_minus);
            let g = component(op, l, site, bopts, |w| w.g);
            // near a pole the extrapolation error in Im g scales with |g|;
            // a negative Im g is pure extrapolation error
            let g = match g {
                Ok(b) if !b.infinite && b.value.im <= tol * (1.0 + b.value.norm()) => {
                    Bv::Real(b.value.re)
                }
                other => grade(&other, tol),
            };
            (grade(&p, tol), grade(&m, tol), g)
        })
        .collect();
    let mut f2 = vec![false; xs.len()];
    let mut f1 = vec![false; xs.len()];
    let mut undetermined = 0;
    for (i, (p, m, _)) in rows.iter().enumerate() {
        match (p, m) {
            (Bv::Nonreal, Bv::Nonreal) => f2[i] = true,
            (Bv::Real(_), Bv::Nonreal) | (Bv::Nonreal, Bv::Real(_)) => f1[i] = true,
            (Bv::Infinite, Bv::Infinite) => f1[i] = true,
            (Bv::Real(a), Bv::Real(b)) if (a - b).abs() < tol => f1[i] = true,
            (Bv::Unknown, _) | (_, Bv::Unknown) => undetermined += 1,
            _ => {}
        }
    }
    // sign of Re g just above the axis; adequate for bisecting a pole
    let sign_g = |l: f64| {
        op.weyl(Complex64::new(l, 1e-12), site)
            .ok()
            .map(|w| w.g.re > 0.0)
    };
    let mut eigen_candidates = Vec::new();
    let mut prev: Option<(usize, f64)> = None;
    for (i, row) in rows.iter().enumerate() {
        match row.2 {
            Bv::Real(v) => {
                if let Some((k, u)) = prev {
                    if u > 0.0 && v < 0.0 {
                        let (mut lo, mut hi) = (xs[k], xs[i]);
                        for _ in 0..opts.refine_iters + 20 {
                            let mid = 0.5 * (lo + hi);
                            match sign_g(mid) {
                                Some(true) => lo = mid,
                                Some(false) => hi = mid,
                                None => break,
                            }
                        }
                        eigen_candidates.push(0.5 * (lo + hi));
                    }
                }
                prev = Some((i, v));
            }
            Bv::Nonreal => prev = None,
            Bv::Infinite | Bv::Unknown => {}
        }
    }
    let m1 = hull_line(xs, &f1);
    let cand = RealIntervalSet::from_parts(&[] as &[Interval], &eigen_candidates)
        .expect("finite candidates");
    LineMultiplicity {
        m2: hull_line(xs, &f2),
        m1: m1.union(&cand),
        eigen_candidates,
        undetermined,
    }
}

/// `|g (M_− − M_+) − 1|` at an interior point.
pub fn green_identity_residual<O: LineOperator>(op: &O, z: Complex64, site: O::Site) -> Result<f64> {
    let w = op.weyl(z, site)?;
    Ok((w.g * (w.m_minus - w.m_plus) - 1.0).norm())
}
