//! Countable unions of small open intervals around an enumeration of the
//! rationals in `[0, 1]`: a set of measure at most `2/3` whose essential
//! closure is all of `[0, 1]`.
//!
//! Only the first `N` intervals are materialized. Everything beyond them is
//! accounted for either by the closed-form tail bound (measure) or by an
//! explicit rational witness whose enumeration index is reported (density).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::line::{Interval, RealIntervalSet};

/// Enumeration `0/1, 1/1, 1/2, 1/3, 2/3, 1/4, 3/4, ...` (reduced fractions by
/// increasing denominator, then numerator). Indices start at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub p: u64,
    pub q: u64,
}

impl Rational {
    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// First `count` terms of the enumeration.
pub fn enumerate_rationals(count: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(Rational { p: 0, q: 1 });
    if count > 1 {
        out.push(Rational { p: 1, q: 1 });
    }
    let mut q = 2;
    while out.len() < count {
        for p in 1..q {
            if gcd(p, q) == 1 {
                out.push(Rational { p, q });
                if out.len() == count {
                    break;
                }
            }
        }
        q += 1;
    }
    out
}

/// `prefix[j] = Σ_{k ≤ j} φ(k)`, with `φ(1) = 1`.
pub fn totient_prefix(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for i in 2..=n {
        if phi[i] == i as u64 {
            let mut j = i;
            while j <= n {
                phi[j] -= phi[j] / i as u64;
                j += i;
            }
        }
    }
    let mut acc = 0;
    phi.iter()
        .enumerate()
        .map(|(i, &v)| {
            if i > 0 {
                acc += v;
            }
            acc
        })
        .collect()
}

fn distinct_primes(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Number of `1 ≤ k ≤ p` coprime to `q`.
fn coprime_count(p: u64, q: u64) -> u64 {
    let primes = distinct_primes(q);
    let mut total: i64 = 0;
    for mask in 0u32..(1 << primes.len()) {
        let mut d = 1u64;
        for (i, &pr) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                d *= pr;
            }
        }
        let term = (p / d) as i64;
        if mask.count_ones() % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total as u64
}

/// 1-based position of a reduced fraction in the enumeration, given a
/// totient prefix table covering `q − 1`.
pub fn enumeration_index(r: Rational, prefix: &[u64]) -> u64 {
    match (r.p, r.q) {
        (0, 1) => 1,
        (1, 1) => 2,
        (p, q) => {
            // φ(1) counted in prefix covers the two q = 1 terms only once
            let before = 2 + (prefix[(q - 1) as usize] - prefix[1]);
            before + coprime_count(p, q)
        }
    }
}

/// Rational with the least denominator strictly inside `(lo, hi)`,
/// assuming `0 < lo < hi < 1`. Stern–Brocot descent with run-length steps.
fn simplest_between(lo: f64, hi: f64) -> Rational {
    let (mut lp, mut lq) = (0u64, 1u64);
    let (mut rp, mut rq) = (1u64, 1u64);
    loop {
        let mp = lp + rp;
        let mq = lq + rq;
        let m = mp as f64;
        if m <= lo * mq as f64 {
            // advance the left bound as far as it stays <= lo
            let num = lo * lq as f64 - lp as f64;
            let den = rp as f64 - lo * rq as f64;
            let k = ((num / den).floor() as u64).max(1);
            let (cp, cq) = (lp + k * rp, lq + k * rq);
            if (cp as f64) <= lo * cq as f64 {
                lp = cp;
                lq = cq;
            } else {
                lp = mp;
                lq = mq;
            }
        } else if m >= hi * mq as f64 {
            let num = rp as f64 - hi * rq as f64;
            let den = hi * lq as f64 - lp as f64;
            let k = ((num / den).floor() as u64).max(1);
            let (cp, cq) = (rp + k * lp, rq + k * lq);
            if (cp as f64) >= hi * cq as f64 {
                rp = cp;
                rq = cq;
            } else {
                rp = mp;
                rq = mq;
            }
        } else {
            return Rational { p: mp, q: mq };
        }
    }
}

/// Least-denominator (hence least-index) rational in `(x−ε, x+ε) ∩ [0,1]`.
pub fn witness_rational(x: f64, eps: f64) -> Option<Rational> {
    let lo = x - eps;
    let hi = x + eps;
    if lo < 0.0 && hi > 0.0 {
        return Some(Rational { p: 0, q: 1 });
    }
    if lo < 1.0 && hi > 1.0 {
        return Some(Rational { p: 1, q: 1 });
    }
    if lo >= 1.0 || hi <= 0.0 {
        return None;
    }
    Some(simplest_between(lo, hi))
}

/// Verdict of the density test at one grid point.
#[derive(Debug, Clone, Serialize)]
pub struct DensityVerdict {
    pub x: f64,
    pub passes: bool,
    /// Witness center and its enumeration index.
    pub witness: Option<Rational>,
    pub witness_index: Option<u64>,
    /// True when the witness interval is beyond the materialized truncation;
    /// positivity then rests on the family definition, not on computed data.
    pub beyond_truncation: bool,
    /// Lower bound on log10 |A ∩ (x−ε_min, x+ε_min)| from the witness interval.
    pub log10_mass_lower: Option<f64>,
    /// Exact measure of the truncated union inside the window.
    pub truncated_mass: f64,
}

/// Grid evaluation of the essential closure of a generated set.
#[derive(Debug, Clone, Serialize)]
pub struct FatClosure {
    #[serde(skip)]
    pub set: RealIntervalSet,
    pub verdicts: Vec<DensityVerdict>,
    pub eps_min: f64,
    pub grid_step: f64,
    pub tail_measure_bound: f64,
    pub beyond_truncation_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FatSetDescriptor {
    pub family: FatFamily,
    pub radius_base: f64,
    pub truncation: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FatFamily {
    RationalFat,
}

/// `A = ⋃ₙ (rₙ − base⁻ⁿ, rₙ + base⁻ⁿ)` truncated after `N` terms.
#[derive(Debug, Clone)]
pub struct GeneratedFatSet {
    radius_base: f64,
    truncation: usize,
    centers: Vec<Rational>,
    truncated: RealIntervalSet,
}

impl GeneratedFatSet {
    pub fn new(radius_base: f64, truncation: usize) -> Result<Self> {
        if !(radius_base > 1.0) || !radius_base.is_finite() {
            return Err(Error::InvalidCoefficients(format!(
                "radius base must exceed 1, got {radius_base}"
            )));
        }
        if truncation == 0 {
            return Err(Error::InvalidCoefficients("truncation must be positive".into()));
        }
        let centers = enumerate_rationals(truncation);
        let raw: Vec<Interval> = centers
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let r = radius_base.powi(-(i as i32 + 1));
                Interval::open(c.value() - r, c.value() + r)
            })
            .collect();
        let truncated = RealIntervalSet::canonicalize(&raw)?;
        Ok(GeneratedFatSet {
            radius_base,
            truncation,
            centers,
            truncated,
        })
    }

    pub fn from_descriptor(d: &FatSetDescriptor) -> Result<Self> {
        Self::new(d.radius_base, d.truncation)
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn centers(&self) -> &[Rational] {
        &self.centers
    }

    /// Radius of the `n`-th term (1-based).
    pub fn radius(&self, n: u64) -> f64 {
        self.radius_base.powf(-(n as f64))
    }

    pub fn truncated_union(&self) -> &RealIntervalSet {
        &self.truncated
    }

    /// `2 Σ_{n>N} base⁻ⁿ = 2 base⁻ᴺ / (base − 1)`.
    pub fn tail_measure_bound(&self) -> f64 {
        2.0 * self.radius_base.powi(-(self.truncation as i32)) / (self.radius_base - 1.0)
    }

    /// `Σ_n 2 base⁻ⁿ = 2 / (base − 1)`, the bound on the full union.
    pub fn total_length_bound(&self) -> f64 {
        2.0 / (self.radius_base - 1.0)
    }

    pub fn density_test(&self, x: f64, eps_min: f64, prefix: &[u64]) -> DensityVerdict {
        let window = RealIntervalSet::single(Interval::open(x - eps_min, x + eps_min))
            .expect("finite window");
        let truncated_mass = self.truncated.intersect(&window).measure();
        let witness = witness_rational(x, eps_min);
        let (witness_index, beyond, log10_mass_lower) = match witness {
            Some(r) => {
                let idx = if (r.q as usize) < prefix.len() {
                    enumeration_index(r, prefix)
                } else {
                    enumeration_index(r, &totient_prefix(r.q))
                };
                let slack = eps_min - (x - r.value()).abs();
                let lower = (-(idx as f64) * self.radius_base.log10()).min(slack.log10());
                (Some(idx), idx as usize > self.truncation, Some(lower))
            }
            None => (None, false, None),
        };
        DensityVerdict {
            x,
            passes: witness.is_some(),
            witness,
            witness_index,
            beyond_truncation: beyond,
            log10_mass_lower,
            truncated_mass,
        }
    }

    /// Density test on the grid `lo, lo+step, ..., hi`; the returned set is
    /// the essential closure of the hull of passing runs.
    pub fn essential_closure_on_grid(
        &self,
        lo: f64,
        hi: f64,
        step: f64,
        eps_min: f64,
    ) -> Result<FatClosure> {
        if !(step > 0.0) || !(hi >= lo) || !(eps_min > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "lo={lo}, hi={hi}, step={step}, eps_min={eps_min}"
            )));
        }
        let n = ((hi - lo) / step).round() as usize + 1;
        let q_bound = (1.0 / eps_min).ceil() as u64 + 2;
        let prefix = totient_prefix(q_bound);
        let verdicts: Vec<DensityVerdict> = (0..n)
            .into_par_iter()
            .map(|i| self.density_test(lo + i as f64 * step, eps_min, &prefix))
            .collect();
        let mut runs = Vec::new();
        let mut i = 0;
        while i < n {
            if !verdicts[i].passes {
                i += 1;
                continue;
            }
            let s = i;
            while i + 1 < n && verdicts[i + 1].passes {
                i += 1;
            }
            runs.push(Interval::closed(verdicts[s].x, verdicts[i].x));
            i += 1;
        }
        let set = RealIntervalSet::canonicalize(&runs)?.essential_closure();
        let beyond = verdicts.iter().filter(|v| v.beyond_truncation).count();
        Ok(FatClosure {
            set,
            verdicts,
            eps_min,
            grid_step: step,
            tail_measure_bound: self.tail_measure_bound(),
            beyond_truncation_count: beyond,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_head() {
        let r = enumerate_rationals(7);
        let v: Vec<(u64, u64)> = r.iter().map(|r| (r.p, r.q)).collect();
        assert_eq!(v, vec![(0, 1), (1, 1), (1, 2), (1, 3), (2, 3), (1, 4), (3, 4)]);
    }

    #[test]
    fn index_matches_enumeration() {
        let list = enumerate_rationals(3000);
        let prefix = totient_prefix(200);
        for (i, r) in list.iter().enumerate() {
            assert_eq!(enumeration_index(*r, &prefix), i as u64 + 1, "{r:?}");
        }
    }

    #[test]
    fn simplest_rational_brute_force() {
        let cases = [(0.3, 0.34), (0.01, 0.011), (0.5, 0.5001), (0.61803, 0.61804), (0.2, 0.25)];
        for (lo, hi) in cases {
            let r = simplest_between(lo, hi);
            let mut best = None;
            'outer: for q in 1..2_000_000u64 {
                let p = (lo * q as f64).floor() as u64 + 1;
                if (p as f64) < hi * q as f64 {
                    best = Some(q);
                    break 'outer;
                }
            }
            assert_eq!(Some(r.q), best, "({lo},{hi})");
            assert!(r.value() > lo && r.value() < hi);
        }
    }

    #[test]
    fn tail_bound_closed_form() {
        let f = GeneratedFatSet::new(4.0, 20).unwrap();
        let direct: f64 = (21..200).map(|n| 2.0 * 4f64.powi(-n)).sum();
        assert!((f.tail_measure_bound() - direct).abs() < 1e-25);
        assert!(f.tail_measure_bound() < 2.0 * 4f64.powi(-20) * 4.0 / 3.0);
        assert!((f.total_length_bound() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn outside_unit_interval_fails() {
        let f = GeneratedFatSet::new(4.0, 20).unwrap();
        let prefix = totient_prefix(10);
        assert!(!f.density_test(1.5, 1e-6, &prefix).passes);
        assert!(f.density_test(0.0, 1e-6, &prefix).passes);
    }
}
