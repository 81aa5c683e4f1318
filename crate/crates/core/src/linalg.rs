//! Small banded linear-algebra kernels used by the truncation oracles.

use num_complex::Complex64;

/// Solves the tridiagonal system `T x = rhs` (Thomas algorithm without
/// pivoting). `sub[i]` couples rows `i+1, i`; `sup[i]` couples `i, i+1`.
pub fn thomas_solve(
    sub: &[Complex64],
    diag: &[Complex64],
    sup: &[Complex64],
    rhs: &[Complex64],
) -> Vec<Complex64> {
    let n = diag.len();
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    c[0] = if n > 1 { sup[0] / diag[0] } else { c[0] };
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i - 1] * c[i - 1];
        if i + 1 < n {
            c[i] = sup[i] / denom;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / denom;
    }
    let mut x = d;
    for i in (0..n.saturating_sub(1)).rev() {
        let next = x[i + 1];
        x[i] -= c[i] * next;
    }
    x
}

/// `((T − z)^{-1})_{kk}` for a real symmetric tridiagonal `T`.
pub fn tridiagonal_resolvent_diag(diag: &[f64], off: &[f64], z: Complex64, k: usize) -> Complex64 {
    let n = diag.len();
    let sub: Vec<Complex64> = off.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let d: Vec<Complex64> = diag.iter().map(|&v| Complex64::new(v, 0.0) - z).collect();
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    rhs[k] = Complex64::new(1.0, 0.0);
    thomas_solve(&sub, &d, &sub, &rhs)[k]
}

/// Number of eigenvalues of a real symmetric tridiagonal matrix below `x`
/// (Sturm sequence count).
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (1.0 + x.abs());
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Square complex band matrix with lower/upper bandwidths `kl`, `ku`; each
/// row keeps room for the `kl` extra super-diagonals created by pivoting.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    rows: Vec<Vec<Complex64>>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let w = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            rows: vec![vec![Complex64::new(0.0, 0.0); w]; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let off = j as isize - i as isize + self.kl as isize;
        if off < 0 || off as usize >= self.rows[i].len() {
            None
        } else {
            Some(off as usize)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.slot(i, j)
            .map(|s| self.rows[i][s])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("({i},{j}) outside the band"));
        self.rows[i][s] = v;
    }

    pub fn add_diagonal(&mut self, shift: Complex64) {
        for i in 0..self.n {
            let s = self.slot(i, i).unwrap();
            self.rows[i][s] += shift;
        }
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// In-place LU with partial pivoting.
    pub fn lu(mut self) -> BandLu {
        let n = self.n;
        let reach = self.kl + self.ku;
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let last = (k + self.kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).norm();
            for i in k + 1..=last {
                let v = self.get(i, k).norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            piv[k] = p;
            let cmax = (k + reach).min(n - 1);
            if p != k {
                for c in k..=cmax {
                    let a = self.get(k, c);
                    let b = self.get(p, c);
                    self.set(k, c, b);
                    self.set(p, c, a);
                }
            }
            let pivot = self.get(k, k);
            if pivot.norm() == 0.0 {
                continue;
            }
            for i in k + 1..=last {
                let l = self.get(i, k) / pivot;
                if l.norm() == 0.0 {
                    self.set(i, k, l);
                    continue;
                }
                self.set(i, k, l);
                for c in k + 1..=cmax {
                    let v = self.get(i, c) - l * self.get(k, c);
                    self.set(i, c, v);
                }
            }
        }
        BandLu { a: self, piv }
    }
}

pub struct BandLu {
    a: BandMatrix,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.a.n;
        let kl = self.a.kl;
        let reach = self.a.kl + self.a.ku;
        let mut x = rhs.to_vec();
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                x[i] -= self.a.get(i, k) * xk;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for c in k + 1..=(k + reach).min(n - 1) {
                s -= self.a.get(k, c) * x[c];
            }
            x[k] = s / self.a.get(k, k);
        }
        x
    }

    pub fn min_pivot(&self) -> f64 {
        (0..self.a.n)
            .map(|k| self.a.get(k, k).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Number of eigenvalues of the Hermitian band matrix `H` (lower band with
/// half-width `w`, supplied through `entry(i, j)` for `i − w ≤ j ≤ i`) that
/// are greater than `c`, from the inertia of `H − cI` (LDL* without pivoting).
pub fn hermitian_count_above<F>(n: usize, w: usize, entry: F, c: f64) -> usize
where
    F: Fn(usize, usize) -> Complex64,
{
    // lower[i][k] holds A(i, i-k)
    let mut lower: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..=w)
                .map(|k| {
                    if k <= i {
                        let v = entry(i, i - k);
                        if k == 0 {
                            v - c
                        } else {
                            v
                        }
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();
    let mut negative = 0;
    for j in 0..n {
        let mut d = lower[j][0].re;
        if d == 0.0 {
            d = f64::EPSILON * (1.0 + c.abs());
        }
        if d < 0.0 {
            negative += 1;
        }
        // L(i, j) = A(i, j) / d for i in j+1..=j+w, then Schur update
        let top = (j + w).min(n - 1);
        for i in j + 1..=top {
            lower[i][i - j] /= d;
        }
        for i in j + 1..=top {
            let lij = lower[i][i - j];
            for k in j + 1..=i {
                let lkj = lower[k][k - j];
                let upd = lij * d * lkj.conj();
                lower[i][i - k] -= upd;
            }
        }
    }
    n - negative
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn thomas_matches_dense() {
        let n = 7;
        let diag: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| 1.0 + 0.1 * i as f64).collect();
        let z = c(0.3, 0.7);
        let mut m = nalgebra::DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(diag[i], 0.0) - z;
            if i + 1 < n {
                m[(i, i + 1)] = c(off[i], 0.0);
                m[(i + 1, i)] = c(off[i], 0.0);
            }
        }
        let inv = m.try_inverse().unwrap();
        for k in 0..n {
            let g = tridiagonal_resolvent_diag(&diag, &off, z, k);
            assert!((g - inv[(k, k)]).norm() < 1e-12);
        }
    }

    #[test]
    fn sturm_matches_eigenvalues() {
        let n = 30;
        let diag: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let off = vec![1.0; n - 1];
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = 1.0;
                m[(i + 1, i)] = 1.0;
            }
        }
        let eig = SymmetricEigen::new(m).eigenvalues;
        for &x in &[-2.5, -1.2, 0.0, 0.7, 1.5, 3.0] {
            let expect = eig.iter().filter(|&&e| e < x).count();
            assert_eq!(sturm_count(&diag, &off, x), expect);
        }
    }

    #[test]
    fn band_lu_solves_pentadiagonal() {
        let n = 12;
        let mut b = BandMatrix::zeros(n, 2, 2);
        let mut dense = nalgebra::DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in i.saturating_sub(2)..=(i + 2).min(n - 1) {
                // small diagonal forces pivoting
                let v = if i == j {
                    c(1e-3 * i as f64, 0.1)
                } else {
                    c((i * 7 + j * 3) as f64 % 5.0 - 2.0, (i + 2 * j) as f64 % 3.0 - 1.0)
                };
                b.set(i, j, v);
                dense[(i, j)] = v;
            }
        }
        let rhs: Vec<Complex64> = (0..n).map(|i| c(i as f64, 1.0)).collect();
        let x = b.clone().lu().solve(&rhs);
        let y = b.mul_vec(&x);
        for i in 0..n {
            assert!((y[i] - rhs[i]).norm() < 1e-10);
        }
        let inv = dense.try_inverse().unwrap();
        let e0: Vec<Complex64> = (0..n).map(|i| if i == 3 { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect();
        let col = b.lu().solve(&e0);
        assert!((col[3] - inv[(3, 3)]).norm() < 1e-10);
    }

    #[test]
    fn inertia_count_matches_dense() {
        let n = 16;
        let entry = |i: usize, j: usize| -> Complex64 {
            if i == j {
                c((i as f64 * 0.9).cos(), 0.0)
            } else {
                c(0.3 + 0.01 * (i + j) as f64, 0.2 * (i as f64 - j as f64))
            }
        };
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in i.saturating_sub(2)..=i {
                m[(i, j)] = entry(i, j);
                m[(j, i)] = entry(i, j).conj();
            }
        }
        let eig = nalgebra::SymmetricEigen::new(m).eigenvalues;
        for &x in &[-1.5, -0.3, 0.0, 0.4, 1.1, 2.0] {
            let expect = eig.iter().filter(|&&e| e > x).count();
            assert_eq!(hermitian_count_above(n, 2, entry, x), expect, "x={x}");
        }
    }
}
