//! Compensated (Neumaier) summation for long harmonic-type sums.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl core::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Componentwise compensated sum of complex terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `Σ_{n ≤ x} 1/n`, compensated.
pub fn harmonic(x: u64) -> f64 {
    (1..=x)
        .map(|n| 1.0 / n as f64)
        .collect::<KahanSum>()
        .value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let mut acc = KahanSum::new();
        acc.add(1.0);
        for _ in 0..10_000 {
            acc.add(1e-16);
        }
        assert!((acc.value() - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn harmonic_small() {
        assert!((harmonic(4) - 25.0 / 12.0).abs() < 1e-15);
        assert_eq!(harmonic(0), 0.0);
    }
}
