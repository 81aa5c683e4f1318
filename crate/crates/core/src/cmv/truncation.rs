//! Finite five-diagonal sections of `U`, decoupled by setting `α = 1` at the
//! cut sites. Used as oracles.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{hull_circle, AngularGrid};
use crate::interval_sets::CircleArcSet;
use crate::linalg::{hermitian_count_above, BandLu, BandMatrix};

use super::VerblunskyCoefficients;

type C = Complex64;

/// `U` restricted to sites `lo, …, lo+n−1`.
#[derive(Debug, Clone)]
pub struct CmvTruncation {
    pub lo: i64,
    pub u: BandMatrix,
}

/// Section on `[lo, lo+n)` with `α_lo = α_{lo+n} = 1`; `lo` even, `n` even and `≥ 6`.
pub fn build_truncation(v: &VerblunskyCoefficients, lo: i64, n: usize) -> Result<CmvTruncation> {
    build_truncation_with_cuts(v, lo, n, &[])
}

/// As [`build_truncation`], additionally splitting at each site in `cuts`.
pub fn build_truncation_with_cuts(
    v: &VerblunskyCoefficients,
    lo: i64,
    n: usize,
    cuts: &[i64],
) -> Result<CmvTruncation> {
    if n < 6 || n % 2 != 0 || lo.rem_euclid(2) != 0 {
        return Err(Error::InvalidWindow(format!(
            "window [{lo}, {lo}+{n}) must start even with even length >= 6"
        )));
    }
    let hi = lo + n as i64 - 1;
    let cut = |k: i64| k == lo || k == hi + 1 || cuts.contains(&k);
    let al = |k: i64| if cut(k) { C::new(1.0, 0.0) } else { v.alpha(k) };
    let rh = |k: i64| if cut(k) { 0.0 } else { v.rho(k) };
    let mut u = BandMatrix::zeros(n, 2, 2);
    for i in 0..n {
        let s = lo + i as i64;
        let mut put = |j: i64, val: C| {
            if j >= lo && j <= hi && val != C::new(0.0, 0.0) {
                u.set(i, (j - lo) as usize, val);
            }
        };
        put(s, -al(s).conj() * al(s + 1));
        if s.rem_euclid(2) == 0 {
            put(s - 2, C::new(rh(s - 1) * rh(s), 0.0));
            put(s - 1, al(s - 1).conj() * rh(s));
            put(s + 1, al(s).conj() * rh(s + 1));
        } else {
            put(s - 1, -al(s + 1) * rh(s));
            put(s + 1, -al(s + 2) * rh(s + 1));
            put(s + 2, C::new(rh(s + 1) * rh(s + 2), 0.0));
        }
    }
    Ok(CmvTruncation { lo, u })
}

impl CmvTruncation {
    pub fn size(&self) -> usize {
        self.u.n()
    }

    fn index(&self, site: i64) -> Result<usize> {
        let k = site - self.lo;
        if k < 0 || k as usize >= self.size() {
            return Err(Error::InvalidWindow(format!("site {site} outside the section")));
        }
        Ok(k as usize)
    }

    fn factor(&self, z: C) -> Result<BandLu> {
        let mut a = self.u.clone();
        a.add_diagonal(-z);
        let lu = a.lu();
        if lu.min_pivot() == 0.0 {
            return Err(Error::DivisionByZero(0.0));
        }
        Ok(lu)
    }

    fn unit(&self, j: usize) -> Vec<C> {
        let mut e = vec![C::new(0.0, 0.0); self.size()];
        e[j] = C::new(1.0, 0.0);
        e
    }

    /// `((U + z)(U − z)⁻¹)(i, j)`.
    pub fn cayley_entry(&self, z: C, i: i64, j: i64) -> Result<C> {
        let (ii, jj) = (self.index(i)?, self.index(j)?);
        let col = self.factor(z)?.solve(&self.unit(jj));
        let delta = if ii == jj { 1.0 } else { 0.0 };
        Ok(delta + 2.0 * z * col[ii])
    }

    /// The 2×2 block at sites `(n₀−1, n₀)` of the Cayley transform.
    pub fn cayley_block(&self, z: C, n0: i64) -> Result<[[C; 2]; 2]> {
        let (a, b) = (self.index(n0 - 1)?, self.index(n0)?);
        let lu = self.factor(z)?;
        let ca = lu.solve(&self.unit(a));
        let cb = lu.solve(&self.unit(b));
        Ok([
            [1.0 + 2.0 * z * ca[a], 2.0 * z * cb[a]],
            [2.0 * z * ca[b], 1.0 + 2.0 * z * cb[b]],
        ])
    }

    /// `max |(U*U − I)_{ij}|`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.size();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let mut e = vec![C::new(0.0, 0.0); n];
            e[j] = C::new(1.0, 0.0);
            let col = self.u.mul_vec(&e);
            let lo = j.saturating_sub(4);
            let hi = (j + 4).min(n - 1);
            for i in lo..=hi {
                let k0 = i.saturating_sub(2);
                let k1 = (i + 2).min(n - 1);
                let s: C = (k0..=k1).map(|k| self.u.get(k, i).conj() * col[k]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// Number of eigenvalues `e^{iθ}` with `|θ − φ| < δ` (mod 2π), from the
    /// inertia of `(e^{−iφ}U + e^{iφ}U*)/2 − cos δ`.
    pub fn count_in_arc(&self, phi: f64, delta: f64) -> usize {
        let w = C::from_polar(1.0, -phi);
        let entry = |i: usize, j: usize| 0.5 * (w * self.u.get(i, j) + (w * self.u.get(j, i)).conj());
        hermitian_count_above(self.size(), 2, entry, delta.cos())
    }
}

/// Eigenvalue support of the window-`n` section as an arc set: angular bins
/// of the grid containing an eigenvalue, with isolated bins removed by the
/// essential closure. Returns the set and the per-bin counts.
pub fn eigen_arc_support(
    v: &VerblunskyCoefficients,
    n: usize,
    grid: &AngularGrid,
) -> Result<(CircleArcSet, Vec<usize>)> {
    let half = (n / 2) as i64;
    let t = build_truncation(v, -half - half.rem_euclid(2), n)?;
    let delta = PI / grid.n as f64;
    let counts: Vec<usize> = grid
        .points()
        .par_iter()
        .map(|&phi| t.count_in_arc(phi, delta))
        .collect();
    let flags: Vec<bool> = counts.iter().map(|&c| c > 0).collect();
    Ok((hull_circle(grid, &flags).essential_closure(), counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn dense(t: &CmvTruncation) -> DMatrix<C> {
        let n = t.size();
        DMatrix::from_fn(n, n, |i, j| t.u.get(i, j))
    }

    #[test]
    fn free_section_is_a_signed_permutation() {
        let t = build_truncation(&VerblunskyCoefficients::free(), 0, 6).unwrap();
        let d = dense(&t);
        for v in d.iter() {
            let ok = [0.0, 1.0, -1.0].iter().any(|&c| (v - C::new(c, 0.0)).norm() < 1e-15);
            assert!(ok, "{v}");
        }
        assert!(t.unitarity_residual() < 1e-15);
    }

    #[test]
    fn constant_alpha_diagonal() {
        let v = VerblunskyCoefficients::constant(C::new(0.5, 0.0)).unwrap();
        let t = build_truncation(&v, 0, 8).unwrap();
        for i in 1..7 {
            assert!((t.u.get(i, i) - C::new(-0.25, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn random_sections_are_unitary() {
        let v = VerblunskyCoefficients::periodic(vec![C::new(0.3, -0.6), C::new(-0.7, 0.2)])
            .unwrap()
            .with_patch(3, C::new(0.9, 0.0))
            .unwrap();
        for lo in [-10, 0, 4] {
            let t = build_truncation(&v, lo, 40).unwrap();
            assert!(t.unitarity_residual() < 1e-12);
            let d = dense(&t);
            let r = (d.adjoint() * &d - DMatrix::<C>::identity(40, 40)).camax();
            assert!(r < 1e-12);
        }
        assert!(build_truncation(&v, 1, 40).is_err());
        assert!(build_truncation(&v, 0, 4).is_err());
    }

    #[test]
    fn arc_counts_match_dense_eigenvalues() {
        let v = VerblunskyCoefficients::constant(C::new(0.5, 0.2)).unwrap();
        let t = build_truncation(&v, 0, 60).unwrap();
        let eig = dense(&t).eigenvalues().expect("complex Schur eigenvalues");
        let (phi, delta) = (2.0, 0.4);
        let want = eig
            .iter()
            .filter(|l| {
                let d = (l.arg() - phi + PI).rem_euclid(2.0 * PI) - PI;
                d.abs() < delta
            })
            .count();
        assert_eq!(t.count_in_arc(phi, delta), want);
    }
}
