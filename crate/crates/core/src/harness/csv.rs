//! Per-grid CSV tables (header row, LF line endings).
//!
//! - jacobi: `lambda,xi,verdict`
//! - cmv: `theta,re_m11,im_m11,xi11,verdict,r00,r11,rank`
//! - schrodinger: `lambda,xi,re_g,im_g,verdict`
//!
//! Undetermined values are left empty.

use std::fmt::Write;

use rayon::prelude::*;

use crate::cmv::{self, circle_phase, VerblunskyCoefficients};
use crate::grid::AngularGrid;
use crate::spectral::{self, LineOperator, XiSample};

use super::report::SpectralReport;
use super::{GridSpec, Operator, Tolerances};

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn line_samples<O: LineOperator>(op: &O, xs: &[f64], site: O::Site, tol: &Tolerances) -> Vec<XiSample> {
    spectral::xi_sweep(op, xs, site, &tol.analysis.boundary)
}

/// The ξ table of a line operator at its first reference site.
pub fn jacobi_table(samples: &[XiSample], phase_tol: f64) -> String {
    let mut s = String::from("lambda,xi,verdict\n");
    for r in samples {
        writeln!(s, "{},{},{}", r.lambda, opt(r.xi), r.verdict(phase_tol)).expect("string write");
    }
    s
}

pub fn schrodinger_table(samples: &[XiSample], phase_tol: f64) -> String {
    let mut s = String::from("lambda,xi,re_g,im_g,verdict\n");
    for r in samples {
        let g = if r.xi.is_some() { r.g } else { None };
        writeln!(
            s,
            "{},{},{},{},{}",
            r.lambda,
            opt(r.xi),
            opt(g.map(|g| g.re)),
            opt(g.map(|g| g.im)),
            r.verdict(phase_tol)
        )
        .expect("string write");
    }
    s
}

/// Boundary values of `M₁,₁` and `Ξ₁,₁` at site 0, with `R(ζ)` when the
/// report carries it.
pub fn cmv_table(v: &VerblunskyCoefficients, grid: &AngularGrid, tol: &Tolerances, r: &[cmv::RSample]) -> String {
    let opts = &tol.analysis;
    let thetas = grid.points();
    let vals: Vec<Option<num_complex::Complex64>> = thetas
        .par_iter()
        .map(|&t| match cmv::m11_boundary(v, t, 0, opts) {
            Ok(b) if !b.infinite => Some(b.value),
            _ => None,
        })
        .collect();
    let mut s = String::from("theta,re_m11,im_m11,xi11,verdict,r00,r11,rank\n");
    for (j, (&t, m)) in thetas.iter().zip(&vals).enumerate() {
        let xi = m.map(circle_phase);
        let verdict = match xi {
            None => "undetermined",
            Some(x) if x > -0.5 + opts.phase_tol && x < 0.5 - opts.phase_tol => "ac",
            Some(_) => "gap",
        };
        let sample = r.get(j).filter(|smp| (smp.theta - t).abs() < 1e-12);
        writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            t,
            opt(m.map(|m| m.re)),
            opt(m.map(|m| m.im)),
            opt(xi),
            verdict,
            opt(sample.map(|x| x.r00)),
            opt(sample.map(|x| x.r11)),
            sample.map(|x| x.rank.to_string()).unwrap_or_default()
        )
        .expect("string write");
    }
    s
}

/// The CSV that accompanies `report`.
pub fn table(op: &Operator, grid: &GridSpec, tol: &Tolerances, report: &SpectralReport) -> String {
    match (op, grid) {
        (Operator::Jacobi(j), GridSpec::Line(g)) => {
            jacobi_table(&line_samples(j, &g.points(), 0, tol), tol.analysis.phase_tol)
        }
        (Operator::Schrodinger(p), GridSpec::Line(g)) => {
            schrodinger_table(&line_samples(p, &g.points(), 0.0, tol), tol.analysis.phase_tol)
        }
        (Operator::Cmv(v), GridSpec::Circle(g)) => cmv_table(v, g, tol, &report.density_samples),
        _ => String::new(),
    }
}
