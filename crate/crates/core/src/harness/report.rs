//! `SpectralReport` assembly: ac spectrum, reflectionless test, multiplicity
//! sets, identity residuals and the inclusion `essential_closure(E) ⊆ σ_ac`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::cmv::{self, M11Mode, VerblunskyCoefficients};
use crate::grid::{hull_circle, AngularGrid};
use crate::interval_sets::{AnySet, CircleArcSet, RealIntervalSet};
use crate::jacobi::{JacobiCoefficients, Side, Truncation};
use crate::linalg::tridiagonal_resolvent_diag;
use crate::schrodinger::PiecewisePotential;
use crate::spectral::{self, LineOperator};

use super::{GridSpec, Operator, Tolerances, SCHEMA_VERSION};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Failed,
}

/// One named inequality with its numeric margin (negative when violated).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub inequality: String,
    pub value: f64,
    pub threshold: f64,
    pub margin: f64,
    pub passed: bool,
}

impl Check {
    pub fn le(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            inequality: format!("{name} <= {threshold:e}"),
            value,
            threshold,
            margin: threshold - value,
            passed: value <= threshold,
        }
    }

    pub fn ge(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            inequality: format!("{name} >= {threshold:e}"),
            value,
            threshold,
            margin: value - threshold,
            passed: value >= threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SiteSummary {
    pub site: Value,
    pub set: AnySet,
    pub undetermined: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AcSummary {
    pub set: AnySet,
    pub per_site: Vec<SiteSummary>,
    pub site_discrepancy: f64,
    pub grid_step: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReflectionSummary {
    #[serde(rename = "E")]
    pub e: AnySet,
    pub verdict: bool,
    pub status: String,
    pub defect_set: AnySet,
    pub max_residual: f64,
    pub defect_fraction: f64,
    pub witness_max: f64,
    pub site_disagreement: bool,
    pub pass_fractions: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplicitySummary {
    #[serde(rename = "M1")]
    pub m1: AnySet,
    #[serde(rename = "M2")]
    pub m2: AnySet,
    pub eigen_candidates: Vec<f64>,
    pub undetermined: usize,
}

/// Summary of the 2×2 density `R(ζ)` at `n₀ = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct DensitySummary {
    pub window: usize,
    pub trace_mass: f64,
    pub max_trace_error: f64,
    pub min_eigenvalue: f64,
    pub rank2_set: AnySet,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionSummary {
    pub status: String,
    pub hypotheses_met: bool,
    pub essential_closure_e: Option<AnySet>,
    pub contained_in_ac: Option<bool>,
    /// `sup_{x ∈ closure} dist(x, σ_ac)`.
    pub excess: Option<f64>,
    /// `slack − excess`.
    pub margin: Option<f64>,
    pub slack: f64,
    pub m2_covers_e: Option<bool>,
    /// `|E ∖ (M₂ ∪ defects)|` after widening both by the slack.
    pub m2_uncovered_measure: Option<f64>,
    pub m2_allowed_measure: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub schema: &'static str,
    pub name: String,
    pub status: Status,
    pub operator: Value,
    pub grid: GridSpec,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub ac_spectrum: Option<AcSummary>,
    pub reflectionless: Option<ReflectionSummary>,
    pub multiplicity: Option<MultiplicitySummary>,
    pub identity_residuals: BTreeMap<String, f64>,
    pub herglotz_samples: usize,
    pub herglotz_violations: usize,
    pub matrix_density: Option<DensitySummary>,
    pub theorem_inclusion: InclusionSummary,
    pub checks: Vec<Check>,
    pub failures: Vec<Check>,
    pub errors: Vec<String>,
    /// Per-angle `R(ζ)` samples for the CSV table.
    #[serde(skip)]
    pub density_samples: Vec<cmv::RSample>,
}

impl SpectralReport {
    pub fn named(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    fn finish(mut self) -> Self {
        self.failures = self.checks.iter().filter(|c| !c.passed).cloned().collect();
        self.status = if self.failures.is_empty() && self.errors.is_empty() {
            Status::Pass
        } else {
            Status::Failed
        };
        self
    }
}

/// Set operations the inclusion check needs on either carrier.
trait ReportSet: Clone {
    fn wrap(&self) -> AnySet;
    fn measure(&self) -> f64;
    fn widen(&self, slack: f64) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn ess(&self) -> Self;
    fn dist(&self, x: f64) -> f64;
    fn empty_like(&self) -> bool;
    /// Components as intervals and points of a line parametrization.
    fn parts(&self) -> (Vec<(f64, f64)>, Vec<f64>);
}

impl ReportSet for RealIntervalSet {
    fn wrap(&self) -> AnySet {
        AnySet::Line(self.clone())
    }
    fn measure(&self) -> f64 {
        RealIntervalSet::measure(self)
    }
    fn widen(&self, slack: f64) -> Self {
        self.expand(slack)
    }
    fn minus(&self, other: &Self) -> Self {
        self.difference(other)
    }
    fn ess(&self) -> Self {
        self.essential_closure()
    }
    fn dist(&self, x: f64) -> f64 {
        self.distance_to(x)
    }
    fn empty_like(&self) -> bool {
        self.is_empty()
    }
    fn parts(&self) -> (Vec<(f64, f64)>, Vec<f64>) {
        (self.intervals().iter().map(|i| (i.lo, i.hi)).collect(), self.points().to_vec())
    }
}

impl ReportSet for CircleArcSet {
    fn wrap(&self) -> AnySet {
        AnySet::Circle(self.clone())
    }
    fn measure(&self) -> f64 {
        CircleArcSet::measure(self)
    }
    fn widen(&self, slack: f64) -> Self {
        self.expand(slack)
    }
    fn minus(&self, other: &Self) -> Self {
        self.difference(other)
    }
    fn ess(&self) -> Self {
        self.essential_closure()
    }
    fn dist(&self, x: f64) -> f64 {
        self.distance_to(x)
    }
    fn empty_like(&self) -> bool {
        self.is_empty()
    }
    fn parts(&self) -> (Vec<(f64, f64)>, Vec<f64>) {
        self.as_cut_line().parts()
    }
}

/// `sup_{x ∈ a} dist(x, b)`. Each component of `a ∖ b` sits in one gap of
/// `b`, where the distance is concave, so a golden-section search suffices.
fn excess<S: ReportSet>(a: &S, b: &S) -> f64 {
    if a.empty_like() {
        return 0.0;
    }
    if b.empty_like() {
        return f64::INFINITY;
    }
    let (ivs, pts) = a.minus(b).parts();
    let mut worst = pts.iter().map(|&p| b.dist(p)).fold(0.0, f64::max);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for (lo, hi) in ivs {
        let (mut l, mut r) = (lo, hi);
        for _ in 0..80 {
            let m1 = r - g * (r - l);
            let m2 = l + g * (r - l);
            if b.dist(m1) < b.dist(m2) {
                l = m1;
            } else {
                r = m2;
            }
        }
        worst = worst.max(b.dist(lo)).max(b.dist(hi)).max(b.dist(0.5 * (l + r)));
    }
    worst
}

fn ac_summary<S: ReportSet, T: Serialize>(
    set: &S,
    per_site: &[spectral::SiteSet<T, S>],
    site_discrepancy: f64,
    grid_step: f64,
) -> AcSummary {
    AcSummary {
        set: set.wrap(),
        per_site: per_site
            .iter()
            .map(|s| SiteSummary {
                site: serde_json::to_value(&s.site).expect("site serializes"),
                set: s.set.wrap(),
                undetermined: s.undetermined,
            })
            .collect(),
        site_discrepancy,
        grid_step,
    }
}

/// Inclusion and `M₂ ⊇ E` checks, gated on the reflectionless verdict.
fn inclusion<S: ReportSet>(
    e: Option<&S>,
    verdict: bool,
    ac: Option<&S>,
    m2: Option<&S>,
    defects: Option<&S>,
    slack: f64,
    pass_fraction: f64,
    checks: &mut Vec<Check>,
) -> InclusionSummary {
    let mut out = InclusionSummary {
        status: String::new(),
        hypotheses_met: false,
        essential_closure_e: None,
        contained_in_ac: None,
        excess: None,
        margin: None,
        slack,
        m2_covers_e: None,
        m2_uncovered_measure: None,
        m2_allowed_measure: None,
    };
    let Some(e) = e else {
        out.status = "skipped: no candidate set E given".into();
        return out;
    };
    let closure = e.ess();
    out.essential_closure_e = Some(closure.wrap());
    if !verdict {
        out.status = "skipped: E is not reflectionless on the grid, hypotheses unmet".into();
        return out;
    }
    out.hypotheses_met = true;
    let Some(ac) = ac else {
        out.status = "failed: ac spectrum unavailable".into();
        return out;
    };
    let x = excess(&closure, ac);
    let c = Check::le("inclusion_excess", x, slack);
    out.contained_in_ac = Some(c.passed);
    out.excess = Some(x);
    out.margin = Some(c.margin);
    checks.push(c);
    if let Some(m2) = m2 {
        let mut covered = m2.widen(slack);
        let mut uncovered = e.minus(&covered);
        if let Some(d) = defects {
            covered = d.widen(slack);
            uncovered = uncovered.minus(&covered);
        }
        let allowed = (1.0 - pass_fraction) * e.measure();
        let c = Check::le("m2_uncovered_measure", uncovered.measure(), allowed);
        out.m2_covers_e = Some(c.passed);
        out.m2_uncovered_measure = Some(uncovered.measure());
        out.m2_allowed_measure = Some(allowed);
        checks.push(c);
    }
    let ok = out.contained_in_ac == Some(true) && out.m2_covers_e != Some(false);
    out.status = if ok { "verified".into() } else { "violated".into() };
    out
}

fn blank(op: &Operator, grid: &GridSpec, tol: &Tolerances, seed: u64) -> SpectralReport {
    SpectralReport {
        schema: SCHEMA_VERSION,
        name: op.kind().into(),
        status: Status::Failed,
        operator: op.descriptor(),
        grid: *grid,
        seed,
        tolerances: tol.clone(),
        ac_spectrum: None,
        reflectionless: None,
        multiplicity: None,
        identity_residuals: BTreeMap::new(),
        herglotz_samples: 0,
        herglotz_violations: 0,
        matrix_density: None,
        theorem_inclusion: inclusion::<RealIntervalSet>(None, false, None, None, None, 0.0, 1.0, &mut Vec::new()),
        checks: Vec::new(),
        failures: Vec::new(),
        errors: Vec::new(),
        density_samples: Vec::new(),
    }
}

/// Runs the reflectionless test, ac spectrum, essential closure of `E` and
/// multiplicity sets, then checks `essential_closure(E) ⊆ σ_ac` (one grid
/// step of slack) and `M₂ ⊇ E` up to defects when `E` is reflectionless.
/// Numeric failures are recorded in the report, never raised.
pub fn verify_inclusion(
    op: &Operator,
    e: Option<&AnySet>,
    grid: &GridSpec,
    tol: &Tolerances,
    seed: u64,
) -> SpectralReport {
    let mut rep = blank(op, grid, tol, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match (op, grid) {
        (Operator::Jacobi(j), GridSpec::Line(g)) => {
            let e = line_set(e, &mut rep);
            line_analysis(j, &g.points(), &j.default_sites(), e.as_ref(), tol, &mut rep);
            jacobi_identities(j, tol, &mut rng, &mut rep);
        }
        (Operator::Schrodinger(s), GridSpec::Line(g)) => {
            let e = line_set(e, &mut rep);
            line_analysis(s, &g.points(), &s.default_sites(), e.as_ref(), tol, &mut rep);
            schrodinger_identities(s, tol, &mut rng, &mut rep);
        }
        (Operator::Cmv(v), GridSpec::Circle(g)) => {
            let e = match e {
                None => None,
                Some(AnySet::Circle(c)) => Some(c.clone()),
                Some(_) => {
                    rep.errors.push("E must be a circle set for CMV".into());
                    None
                }
            };
            cmv_analysis(v, g, e.as_ref(), tol, &mut rep);
            cmv_identities(v, tol, &mut rng, &mut rep);
        }
        _ => rep.errors.push("grid carrier does not match the operator".into()),
    }
    let counts = rep.herglotz_violations as f64;
    rep.checks.push(Check::le("herglotz_violations", counts, 0.0));
    rep.finish()
}

fn line_set(e: Option<&AnySet>, rep: &mut SpectralReport) -> Option<RealIntervalSet> {
    match e {
        None => None,
        Some(AnySet::Line(s)) => Some(s.clone()),
        Some(_) => {
            rep.errors.push("E must be a line set for this operator".into());
            None
        }
    }
}

fn line_analysis<O: LineOperator>(
    op: &O,
    xs: &[f64],
    sites: &[O::Site],
    e: Option<&RealIntervalSet>,
    tol: &Tolerances,
    rep: &mut SpectralReport,
) {
    let opts = &tol.analysis;
    let step = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    let slack = tol.slack_steps * step;
    let ac = match spectral::ac_spectrum(op, xs, sites, opts) {
        Ok(ac) => {
            rep.checks.push(Check::le("ac_site_discrepancy", ac.site_discrepancy, slack));
            rep.ac_spectrum = Some(ac_summary(&ac.set, &ac.per_site, ac.site_discrepancy, ac.grid_step));
            Some(ac.set)
        }
        Err(err) => {
            rep.errors.push(format!("ac spectrum: {err}"));
            None
        }
    };
    let mult = spectral::multiplicity_sets(op, xs, sites[0], opts);
    rep.multiplicity = Some(MultiplicitySummary {
        m1: mult.m1.wrap(),
        m2: mult.m2.wrap(),
        eigen_candidates: mult.eigen_candidates.clone(),
        undetermined: mult.undetermined,
    });
    let refl = e.map(|e| spectral::reflectionless_on(op, e, xs, sites, opts));
    if let (Some(r), Some(e)) = (&refl, e) {
        rep.reflectionless = Some(ReflectionSummary {
            e: e.wrap(),
            verdict: r.verdict,
            status: r.status.clone(),
            defect_set: r.defect_set.wrap(),
            max_residual: r.max_residual,
            defect_fraction: r.defect_fraction,
            witness_max: r.witness_max,
            site_disagreement: r.site_disagreement,
            pass_fractions: r.sites.iter().map(|s| s.pass_fraction).collect(),
        });
    }
    let verdict = refl.as_ref().is_some_and(|r| r.verdict);
    rep.theorem_inclusion = inclusion(
        e,
        verdict,
        ac.as_ref(),
        Some(&mult.m2),
        refl.as_ref().map(|r| &r.defect_set),
        slack,
        opts.pass_fraction,
        &mut rep.checks,
    );
}

fn cmv_analysis(
    v: &VerblunskyCoefficients,
    grid: &AngularGrid,
    e: Option<&CircleArcSet>,
    tol: &Tolerances,
    rep: &mut SpectralReport,
) {
    let opts = &tol.analysis;
    let sites = [0, 1];
    let slack = tol.slack_steps * grid.step();
    let ac = match cmv::ac_spectrum(v, grid, &sites, opts) {
        Ok(ac) => {
            rep.checks.push(Check::le("ac_site_discrepancy", ac.site_discrepancy, slack));
            rep.ac_spectrum = Some(ac_summary(&ac.set, &ac.per_site, ac.site_discrepancy, ac.grid_step));
            Some(ac.set)
        }
        Err(err) => {
            rep.errors.push(format!("ac spectrum: {err}"));
            None
        }
    };
    let mult = cmv::multiplicity_sets(v, grid, 0, opts);
    rep.multiplicity = Some(MultiplicitySummary {
        m1: mult.m1.wrap(),
        m2: mult.m2.wrap(),
        eigen_candidates: mult.eigen_candidates.clone(),
        undetermined: mult.undetermined,
    });
    let refl = e.map(|e| cmv::reflectionless_on(v, e, grid, &sites, opts));
    if let (Some(r), Some(e)) = (&refl, e) {
        rep.reflectionless = Some(ReflectionSummary {
            e: e.wrap(),
            verdict: r.verdict,
            status: r.status.clone(),
            defect_set: r.defect_set.wrap(),
            max_residual: r.max_residual,
            defect_fraction: r.defect_fraction,
            witness_max: r.witness_max,
            site_disagreement: r.site_disagreement,
            pass_fractions: r.sites.iter().map(|s| s.pass_fraction).collect(),
        });
        if r.verdict {
            let x = r.re_m11_identity_max;
            rep.identity_residuals.insert("re_m11_boundary".into(), x);
            rep.checks.push(Check::le("re_m11_boundary_residual", x, tol.boundary_identity_tol));
        }
    }
    match cmv::matrix_m_and_r(v, 0, grid, tol.r_window, tol.r_rank_tol) {
        Ok(r) => {
            let flags: Vec<bool> = r.samples.iter().map(|s| s.rank == 2).collect();
            rep.checks.push(Check::ge("r_min_eigenvalue", r.min_eigenvalue, -tol.r_psd_tol));
            rep.matrix_density = Some(DensitySummary {
                window: r.window,
                trace_mass: r.trace_mass,
                max_trace_error: r.max_trace_error,
                min_eigenvalue: r.min_eigenvalue,
                rank2_set: hull_circle(grid, &flags).wrap(),
                failed: r.failed,
            });
            rep.density_samples = r.samples;
        }
        Err(err) => rep.errors.push(format!("R(zeta): {err}")),
    }
    let verdict = refl.as_ref().is_some_and(|r| r.verdict);
    rep.theorem_inclusion = inclusion(
        e,
        verdict,
        ac.as_ref(),
        Some(&mult.m2),
        refl.as_ref().map(|r| &r.defect_set),
        slack,
        opts.pass_fraction,
        &mut rep.checks,
    );
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Records a residual maximum and its check; evaluation failures are errors.
fn record(rep: &mut SpectralReport, name: &str, values: Vec<Result<f64, String>>, tol: f64) {
    let mut worst: f64 = 0.0;
    let mut failed = 0;
    for v in &values {
        match v {
            Ok(x) if x.is_finite() => worst = worst.max(*x),
            Ok(_) => worst = f64::INFINITY,
            Err(_) => failed += 1,
        }
    }
    if let Some(Err(first)) = values.iter().find(|v| v.is_err()) {
        rep.errors.push(format!("{name}: {failed} of {} evaluations failed, first: {first}", values.len()));
    }
    rep.identity_residuals.insert(name.into(), worst);
    rep.checks.push(Check::le(&format!("{name}_residual"), worst, tol));
}

fn sample_upper(rng: &mut ChaCha8Rng, window: (f64, f64), im: (f64, f64)) -> C {
    C::new(rng.gen_range(window.0..window.1), rng.gen_range(im.0..im.1))
}

fn jacobi_identities(j: &JacobiCoefficients, tol: &Tolerances, rng: &mut ChaCha8Rng, rep: &mut SpectralReport) {
    let window = j.spectral_window();
    let zs: Vec<C> = (0..tol.identity_samples).map(|_| sample_upper(rng, window, (0.1, 2.0))).collect();
    let tri = j.truncated_matrix(tol.jacobi_window, Truncation::Window { center: 0 });
    let mut green = Vec::new();
    let mut psi = Vec::new();
    let mut bad = 0;
    for &z in &zs {
        let w = j.weyl_data(z, 0);
        green.push(match (&w, &tri) {
            (Ok(w), Ok(t)) => {
                let k = t.index_of(0).expect("window contains 0");
                Ok(rel(w.g, tridiagonal_resolvent_diag(&t.diag, &t.off, z, k)))
            }
            (Err(e), _) => Err(e.to_string()),
            (_, Err(e)) => Err(e.to_string()),
        });
        psi.push(match (&w, j.big_m_from_psi(z, 0, Side::Plus)) {
            (Ok(w), Ok(m)) => Ok(rel(w.big_m_plus, m)),
            (Err(e), _) => Err(e.to_string()),
            (_, Err(e)) => Err(e.to_string()),
        });
        if let Ok(w) = w {
            let ok = w.m_plus.im > 0.0
                && w.m_minus.im > 0.0
                && w.big_m_plus.im > 0.0
                && w.big_m_minus.im < 0.0
                && w.g.im > 0.0;
            bad += usize::from(!ok);
        }
    }
    record(rep, "green_function", green, tol.identity_tol);
    record(rep, "m_plus_from_solution", psi, tol.identity_tol);
    rep.herglotz_samples += zs.len();
    rep.herglotz_violations += bad;
}

fn schrodinger_identities(
    s: &PiecewisePotential,
    tol: &Tolerances,
    rng: &mut ChaCha8Rng,
    rep: &mut SpectralReport,
) {
    let window = s.spectral_window();
    let zs: Vec<C> = (0..tol.identity_samples).map(|_| sample_upper(rng, window, (0.1, 2.0))).collect();
    let x1 = 0.61 * s.period();
    let mut green = Vec::new();
    let mut bad = 0;
    for &z in &zs {
        let w = s.weyl_data(z, 0.0);
        green.push(match (&w, s.green_via(z, 0.0, x1)) {
            (Ok(w), Ok(h)) => Ok(rel(w.g, h)),
            (Err(e), _) => Err(e.to_string()),
            (_, Err(e)) => Err(e.to_string()),
        });
        if let Ok(w) = w {
            bad += usize::from(!(w.m_plus.im > 0.0 && w.m_minus.im < 0.0 && w.g.im > 0.0));
        }
    }
    record(rep, "green_function", green, tol.identity_tol);
    rep.herglotz_samples += zs.len();
    rep.herglotz_violations += bad;
}

fn cmv_identities(v: &VerblunskyCoefficients, tol: &Tolerances, rng: &mut ChaCha8Rng, rep: &mut SpectralReport) {
    let zs: Vec<C> = (0..tol.identity_samples)
        .map(|_| C::from_polar(rng.gen_range(0.15..0.85), rng.gen_range(0.0..TAU)))
        .collect();
    let mut m11 = Vec::new();
    let mut bad = 0;
    for &z in &zs {
        let w = v.weyl_data(z, 0);
        let oracle = v.m11(z, 0, M11Mode::Oracle { window: tol.cmv_window });
        m11.push(match (&w, oracle) {
            (Ok(w), Ok(o)) => Ok(rel(w.m11, o)),
            (Err(e), _) => Err(e.to_string()),
            (_, Err(e)) => Err(e.to_string()),
        });
        if let Ok(w) = w {
            let ok = w.m_plus.re > 0.0
                && w.m_minus.re > 0.0
                && w.big_m_plus.re > 0.0
                && w.big_m_minus.re < 0.0
                && w.m11.re > 0.0;
            bad += usize::from(!ok);
        }
    }
    record(rep, "m11_formula", m11, tol.identity_tol);
    rep.herglotz_samples += zs.len();
    rep.herglotz_violations += bad;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn excess_on_the_line() {
        let a = RealIntervalSet::from_closed(&[(0.0, 4.0)]).unwrap();
        let b = RealIntervalSet::from_closed(&[(0.0, 1.0), (3.0, 3.5)]).unwrap();
        assert!((excess(&a, &b) - 1.0).abs() < 1e-9);
        assert_eq!(excess(&b, &a), 0.0);
        let c = RealIntervalSet::from_closed(&[(0.0, 3.9)]).unwrap();
        assert!((excess(&a, &c) - 0.1).abs() < 1e-9);
    }

    #[test]
    fn excess_on_the_circle() {
        let a = CircleArcSet::full();
        let b = CircleArcSet::from_closed_arcs(&[(1.0, 5.0)]).unwrap();
        let gap = TAU - 4.0;
        assert!((excess(&a, &b) - gap / 2.0).abs() < 1e-9);
        assert_eq!(excess(&b, &a), 0.0);
    }

    #[test]
    fn checks_report_margins() {
        let c = Check::le("x", 2.0, 1.0);
        assert!(!c.passed && c.margin == -1.0 && c.inequality == "x <= 1e0");
        assert!(Check::ge("y", 0.5, 0.0).passed);
        assert!(!Check::le("z", f64::NAN, 1.0).passed);
    }
}
