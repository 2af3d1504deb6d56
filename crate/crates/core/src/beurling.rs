//! Trigonometric majorants of the sawtooth `ψ(t) = {t} − 1/2` and of
//! interval indicators.
//!
//! `B_K = V_K + Δ_{K+1}/(2(K+1))`, where `V_K` is Vaaler's degree-`K`
//! approximation of `ψ` and `Δ_{K+1}` the Fejér kernel. Vaaler's bound
//! `|ψ − V_K| ≤ Δ_{K+1}/(2(K+1))` gives `−B_K(−t) ≤ ψ(t) ≤ B_K(t)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sum::ComplexSum;
use crate::torus::e;

/// `Σ_{|m|≤K} c_m e(mt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPolynomial {
    /// `coeffs[m + K]` is the coefficient of `e(mt)`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::invalid("coeffs", "need 2K + 1 coefficients"));
        }
        Ok(Self {
            degree: coeffs.len() / 2,
            coeffs,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `ĉ(m)`, zero for `|m| > K`.
    pub fn coeff(&self, m: i64) -> Complex64 {
        let k = self.degree as i64;
        if m.abs() > k {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(m + k) as usize]
        }
    }

    /// `(m, ĉ(m))` for `m = −K..=K`.
    pub fn coefficients(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let k = self.degree as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - k, c))
    }

    pub fn mean(&self) -> Complex64 {
        self.coeff(0)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = ComplexSum::new();
        for (m, c) in self.coefficients() {
            acc.add(c * e(m as f64 * t));
        }
        acc.value()
    }

    /// Real part of [`TrigPolynomial::eval`]; the polynomials built here
    /// are real-valued.
    pub fn eval_real(&self, t: f64) -> f64 {
        self.eval(t).re
    }
}

/// `ψ(t) = {t} − 1/2`.
pub fn sawtooth(t: f64) -> f64 {
    t - libm::floor(t) - 0.5
}

/// Vaaler's weight `πt(1 − t)cot(πt) + t` on `(0, 1)`.
fn vaaler_weight(t: f64) -> f64 {
    PI * t * (1.0 - t) / libm::tan(PI * t) + t
}

fn check_degree(k: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::invalid("K", "degree must be ≥ 1"));
    }
    Ok(())
}

/// `B̂_K(m)`: `1/(2(K+1))` at `m = 0`, and for `1 ≤ |m| ≤ K`
/// `−w(|m|/(K+1))/(2πim) + (1 − |m|/(K+1))/(2(K+1))`.
pub fn beurling_polynomial(k: usize) -> Result<TrigPolynomial> {
    check_degree(k)?;
    let h = (k + 1) as f64;
    let coeffs = (-(k as i64)..=k as i64)
        .map(|m| {
            let fejer = (1.0 - m.unsigned_abs() as f64 / h) / (2.0 * h);
            if m == 0 {
                Complex64::new(fejer, 0.0)
            } else {
                let w = vaaler_weight(m.unsigned_abs() as f64 / h);
                // −w/(2πim) = i·w/(2πm)
                Complex64::new(fejer, w / (2.0 * PI * m as f64))
            }
        })
        .collect();
    TrigPolynomial::new(coeffs)
}

/// A trigonometric polynomial bounding `1_{[a,b]}` from one side.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalApproximant {
    pub poly: TrigPolynomial,
    pub a: f64,
    pub b: f64,
    /// Set for minorants with `b − a ≤ 2/(K+1)`, whose mean is at most
    /// `(b − a)/2` and may be negative.
    pub degenerate: bool,
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(0.0 <= a && a < b && b < 1.0) {
        return Err(Error::invalid("interval", "need 0 ≤ a < b < 1"));
    }
    Ok(())
}

fn combine(k: usize, a: f64, b: f64, sign: f64, upper: bool) -> Result<TrigPolynomial> {
    let bk = beurling_polynomial(k)?;
    let coeffs = (-(k as i64)..=k as i64)
        .map(|m| {
            let mf = m as f64;
            let shifted = if upper {
                // B_K(t − b) + B_K(a − t)
                bk.coeff(m) * e(-mf * b) + bk.coeff(-m) * e(-mf * a)
            } else {
                // B_K(b − t) + B_K(t − a)
                bk.coeff(-m) * e(-mf * b) + bk.coeff(m) * e(-mf * a)
            };
            let base = if m == 0 { b - a } else { 0.0 };
            Complex64::new(base, 0.0) + shifted * sign
        })
        .collect();
    TrigPolynomial::new(coeffs)
}

/// `|I| + B_K(t − b) + B_K(a − t) ≥ 1_{[a,b]}(t)`.
pub fn interval_majorant(k: usize, a: f64, b: f64) -> Result<IntervalApproximant> {
    check_interval(a, b)?;
    Ok(IntervalApproximant {
        poly: combine(k, a, b, 1.0, true)?,
        a,
        b,
        degenerate: false,
    })
}

/// `|I| − B_K(b − t) − B_K(t − a) ≤ 1_{[a,b]}(t)`.
pub fn interval_minorant(k: usize, a: f64, b: f64) -> Result<IntervalApproximant> {
    check_interval(a, b)?;
    Ok(IntervalApproximant {
        poly: combine(k, a, b, -1.0, false)?,
        a,
        b,
        degenerate: b - a <= 2.0 / (k as f64 + 1.0),
    })
}

/// `1_{[a,b]}(t)` on ℝ/ℤ.
pub fn interval_indicator(a: f64, b: f64, t: f64) -> f64 {
    let t = t - libm::floor(t);
    if a <= t && t <= b {
        1.0
    } else {
        0.0
    }
}

/// Slack for equality cases in the pointwise inequalities.
pub const SANDWICH_TOLERANCE: f64 = 1e-9;

/// `n` midpoints `(j + 1/2)/n` of a uniform grid, which avoids the jump of
/// `ψ` at 0.
pub fn offset_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| (j as f64 + 0.5) / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mean_and_support() {
        for k in [1usize, 4, 9, 16, 64] {
            let b = beurling_polynomial(k).unwrap();
            assert!((b.mean().re - 1.0 / (2.0 * (k + 1) as f64)).abs() < 1e-12);
            assert_eq!(b.coeff(k as i64 + 1), Complex64::new(0.0, 0.0));
            assert_eq!(b.coeff(-(k as i64) - 7), Complex64::new(0.0, 0.0));
        }
        assert!((beurling_polynomial(9).unwrap().mean().re - 0.05).abs() < 1e-12);
        assert!(beurling_polynomial(0).is_err());
    }

    #[test]
    fn sawtooth_sandwich_on_grid() {
        for k in [1usize, 2, 4, 8, 16, 32, 64] {
            let b = beurling_polynomial(k).unwrap();
            for t in offset_grid(10_000) {
                let psi = sawtooth(t);
                assert!(b.eval_real(t) >= psi - SANDWICH_TOLERANCE, "K={k} t={t}");
                assert!(-b.eval_real(-t) <= psi + SANDWICH_TOLERANCE, "K={k} t={t}");
                assert!(b.eval(t).im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coefficient_decay() {
        let mut worst: f64 = 0.0;
        for k in 1..=64usize {
            let b = beurling_polynomial(k).unwrap();
            for m in 1..=k as i64 {
                worst = worst
                    .max(m as f64 * b.coeff(m).norm())
                    .max(m as f64 * b.coeff(-m).norm());
            }
        }
        assert!(worst <= 3.0, "{worst}");
    }

    #[test]
    fn majorant_examples() {
        assert!(beurling_polynomial(16).unwrap().eval_real(0.37) >= -0.13);
        let p = interval_majorant(16, 0.2, 0.5).unwrap();
        assert!(p.poly.eval_real(0.35) >= 1.0);
        assert!((p.poly.mean().re - (0.3 + 1.0 / 17.0)).abs() < 1e-12);
        assert_eq!(p.poly.coeff(17), Complex64::new(0.0, 0.0));
        let m = interval_minorant(16, 0.2, 0.5).unwrap();
        assert!(m.poly.eval_real(0.1) <= 0.0);
        assert!((m.poly.mean().re - (0.3 - 1.0 / 17.0)).abs() < 1e-12);
        assert!(!m.degenerate);
        let eps = 1e-3;
        let full = interval_majorant(8, 0.0, 1.0 - eps).unwrap();
        assert!((full.poly.mean().re - (1.0 + 1.0 / 9.0 - eps)).abs() < 1e-12);
        let thin = interval_minorant(8, 0.4, 0.5).unwrap();
        assert!(thin.degenerate && thin.poly.mean().re <= 0.1 - 1.0 / 9.0 + 1e-12);
        assert!(interval_majorant(8, 0.5, 0.5).is_err());
        assert!(interval_minorant(8, -0.1, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn interval_sandwich(k in prop::sample::select(alloc::vec![4usize, 8, 16, 32]), a in 0.0f64..0.98, w in 0.005f64..0.99) {
            let b = (a + w).min(0.999);
            let hi = interval_majorant(k, a, b).unwrap();
            let lo = interval_minorant(k, a, b).unwrap();
            prop_assert!((hi.poly.mean().re - lo.poly.mean().re - 2.0 / (k as f64 + 1.0)).abs() < 1e-12);
            for t in offset_grid(2_000) {
                if (t - a).abs() < 1e-12 || (t - b).abs() < 1e-12 {
                    continue;
                }
                let ind = interval_indicator(a, b, t);
                prop_assert!(lo.poly.eval_real(t) <= ind + SANDWICH_TOLERANCE);
                prop_assert!(hi.poly.eval_real(t) >= ind - SANDWICH_TOLERANCE);
            }
        }
    }
}
