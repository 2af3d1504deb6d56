//! Logarithmic averages, pretentious distance, correlations and the
//! concentration diagnostic.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::arith::SpfTable;
use crate::error::{Error, Result};
use crate::multfunc::MultFnSpec;
use crate::sievecount::SieveParams;
use crate::sum::{ComplexSum, KahanSum};
use crate::torus::{circle_value, e};

/// `𝔻(f, g; N_low, x)²` over the primes in `(N_low, x]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceResult {
    pub squared_distance: f64,
    pub n_low: u64,
    pub x: u64,
    pub prime_terms: usize,
}

impl DistanceResult {
    pub fn distance(&self) -> f64 {
        libm::sqrt(self.squared_distance)
    }
}

fn check_limit(table: &SpfTable, name: &'static str, x: u64) -> Result<()> {
    if x > table.limit() {
        return Err(Error::OutOfReach {
            name,
            value: x,
            reach: table.limit(),
        });
    }
    Ok(())
}

fn log_norm(x: u64) -> Result<f64> {
    if x < 2 {
        return Err(Error::invalid("x", "logarithmic averages need x ≥ 2"));
    }
    Ok(libm::log(x as f64))
}

/// `1 − cos 2πθ`, written as `2 sin² πθ` to keep small differences exact.
#[inline]
fn one_minus_cos(theta: f64) -> f64 {
    let s = libm::sin(PI * theta);
    2.0 * s * s
}

/// `Σ_{N_low < p ≤ x} (1 − Re f(p) g(p)‾) / p`.
pub fn pretentious_distance_sq(
    f: &MultFnSpec,
    g: &MultFnSpec,
    n_low: u64,
    x: u64,
    table: &SpfTable,
) -> Result<DistanceResult> {
    if n_low >= x {
        return Err(Error::invalid("N_low", "need N_low < x"));
    }
    check_limit(table, "x", x)?;
    let primes = table.primes_between(n_low, x);
    let sum: KahanSum = primes
        .iter()
        .map(|&p| {
            let p = p as u64;
            let d = f.prime_value(p) - g.prime_value(p);
            if d.is_zero() {
                0.0
            } else {
                one_minus_cos(d.to_f64()) / p as f64
            }
        })
        .collect();
    Ok(DistanceResult {
        squared_distance: sum.value().max(0.0),
        n_low,
        x,
        prime_terms: primes.len(),
    })
}

/// Slack allowed in the inequalities of [`triangle_check`].
pub const TRIANGLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleReport {
    pub d_fg: f64,
    pub d_gh: f64,
    pub d_fh: f64,
    pub k: i64,
    /// `𝔻(f^k, g^k; x)`.
    pub d_fg_power: f64,
}

impl TriangleReport {
    /// `𝔻(f,h) ≤ 𝔻(f,g) + 𝔻(g,h)`.
    pub fn triangle_holds(&self) -> bool {
        self.d_fh <= self.d_fg + self.d_gh + TRIANGLE_TOLERANCE
    }

    /// `𝔻(f^k, g^k) ≤ k·𝔻(f, g)`.
    pub fn power_holds(&self) -> bool {
        self.k as f64 * self.d_fg >= self.d_fg_power - TRIANGLE_TOLERANCE
    }

    pub fn passes(&self) -> bool {
        self.triangle_holds() && self.power_holds()
    }
}

pub fn triangle_check(
    f: &MultFnSpec,
    g: &MultFnSpec,
    h: &MultFnSpec,
    k: i64,
    x: u64,
    table: &SpfTable,
) -> Result<TriangleReport> {
    if k < 1 {
        return Err(Error::invalid("k", "power must be ≥ 1"));
    }
    let d = |a: &MultFnSpec, b: &MultFnSpec| {
        pretentious_distance_sq(a, b, 0, x, table).map(|r| r.distance())
    };
    Ok(TriangleReport {
        d_fg: d(f, g)?,
        d_gh: d(g, h)?,
        d_fh: d(f, h)?,
        k,
        d_fg_power: d(&f.power(k), &g.power(k))?,
    })
}

/// `𝔼^{log}_{n≤x} f(n) = (1/log x) Σ_{n≤x} f(n)/n`.
pub fn log_average(f: &MultFnSpec, x: u64, table: &SpfTable) -> Result<Complex64> {
    let norm = log_norm(x)?;
    let angles = f.real_angles_up_to(table, x)?;
    let mut acc = ComplexSum::new();
    for (n, &a) in angles.iter().enumerate().skip(1) {
        acc.add(e(a) / n as f64);
    }
    Ok(acc.value() / norm)
}

/// `f(a n + b)` as floats for `n = 1..=x` (index 0 unused).
pub fn values_along(f: &MultFnSpec, a: u64, b: u64, x: u64, table: &SpfTable) -> Result<Vec<f64>> {
    let top = a as u128 * x as u128 + b as u128;
    if top > table.reach() as u128 {
        return Err(Error::OutOfReach {
            name: "x",
            value: x,
            reach: table.reach().saturating_sub(b) / a.max(1),
        });
    }
    let top = top as u64;
    if top <= table.limit() {
        let all = f.real_angles_up_to(table, top)?;
        return Ok((0..=x)
            .map(|n| {
                if n == 0 {
                    0.0
                } else {
                    all[(a * n + b) as usize]
                }
            })
            .collect());
    }
    let mut out = Vec::with_capacity(x as usize + 1);
    out.push(0.0);
    for n in 1..=x {
        out.push(f.eval(table, a * n + b)?.to_f64());
    }
    Ok(out)
}

/// A linear form `a n + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearForm {
    pub a: u64,
    pub b: u64,
}

impl LinearForm {
    pub const fn new(a: u64, b: u64) -> Self {
        Self { a, b }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    pub value: Complex64,
    pub x: u64,
    pub forms: (LinearForm, LinearForm),
    /// `a₁b₂ − a₂b₁ = 0`: the forms are proportional and nothing forces
    /// the sum to decay.
    pub degenerate: bool,
}

/// `(1/log x) Σ_{n≤x} f(a₁n+b₁) g(a₂n+b₂) / n`.
pub fn binary_correlation(
    f: &MultFnSpec,
    g: &MultFnSpec,
    first: LinearForm,
    second: LinearForm,
    x: u64,
    table: &SpfTable,
) -> Result<CorrelationResult> {
    if first.a < 1 || second.a < 1 {
        return Err(Error::invalid("a1, a2", "leading coefficients must be ≥ 1"));
    }
    let norm = log_norm(x)?;
    let fv = values_along(f, first.a, first.b, x, table)?;
    let gv = values_along(g, second.a, second.b, x, table)?;
    let mut acc = ComplexSum::new();
    for n in 1..=x as usize {
        acc.add(e(fv[n] + gv[n]) / n as f64);
    }
    let det = first.a as i128 * second.b as i128 - second.a as i128 * first.b as i128;
    Ok(CorrelationResult {
        value: acc.value() / norm,
        x,
        forms: (first, second),
        degenerate: det == 0,
    })
}

/// Raw sums `Σ_{n≤x} f(n)^{m₁} g(n+1)^{m₂} / n` for all `|m₁|, |m₂| ≤ K`.
pub fn correlation_table(
    f: &MultFnSpec,
    g: &MultFnSpec,
    k: usize,
    x: u64,
    table: &SpfTable,
) -> Result<BTreeMap<(i64, i64), Complex64>> {
    let fv = values_along(f, 1, 0, x, table)?;
    let gv = values_along(g, 1, 1, x, table)?;
    let width = 2 * k + 1;
    let mut sums = alloc::vec![ComplexSum::new(); width * width];
    let mut pf = alloc::vec![Complex64::new(0.0, 0.0); width];
    let mut pg = alloc::vec![Complex64::new(0.0, 0.0); width];
    for n in 1..=x as usize {
        powers(e(fv[n]), k, &mut pf);
        powers(e(gv[n]), k, &mut pg);
        let w = 1.0 / n as f64;
        for (i, zf) in pf.iter().enumerate() {
            let zf = zf * w;
            for (j, zg) in pg.iter().enumerate() {
                sums[i * width + j].add(zf * zg);
            }
        }
    }
    let mut out = BTreeMap::new();
    for i in 0..width {
        for j in 0..width {
            out.insert(
                (i as i64 - k as i64, j as i64 - k as i64),
                sums[i * width + j].value(),
            );
        }
    }
    Ok(out)
}

/// `out[m + K] = z^m` for `|m| ≤ K`, with `|z| = 1`.
fn powers(z: Complex64, k: usize, out: &mut [Complex64]) {
    out[k] = Complex64::new(1.0, 0.0);
    for m in 1..=k {
        out[k + m] = out[k + m - 1] * z;
        out[k - m] = out[k + m].conj();
    }
}

/// `𝔍_f(x;N) = Σ_{N<p≤x} Im f(p) / p`, in radians.
pub fn imaginary_drift(f: &MultFnSpec, n: u64, x: u64, table: &SpfTable) -> Result<f64> {
    if n >= x {
        return Err(Error::invalid("N", "need N < x"));
    }
    check_limit(table, "x", x)?;
    Ok(table
        .primes_between(n, x)
        .iter()
        .map(|&p| {
            let p = p as u64;
            circle_value(f.prime_value(p)).im / p as f64
        })
        .collect::<KahanSum>()
        .value())
}

/// Which argument of `f` the concentration sum looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcentrationArgument {
    /// `f(n)`.
    N,
    /// `f(Bn + 1)`.
    Shifted,
}

/// The two sides of the concentration estimate, term by term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationReport {
    /// `Σ_{n≤x, P⁻(n(Bn+1))>N} |f(·) − e^{i𝔍_f(x;N)}|²`.
    pub lhs: f64,
    pub phi: u64,
    /// `𝔻(f, 1; N, x)²`.
    pub distance_sq: f64,
    pub inv_n: f64,
    /// `𝔍_f(x;N)`.
    pub drift: f64,
    /// `4^{π(N)} x log log x / log x`.
    pub error_term: f64,
}

impl ConcentrationReport {
    /// `Φ (𝔻² + 1/N)`.
    pub fn main_term(&self) -> f64 {
        self.phi as f64 * (self.distance_sq + self.inv_n)
    }

    /// `LHS / (Φ(𝔻² + 1/N) + 4^{π(N)} x log log x / log x)`.
    pub fn ratio(&self) -> f64 {
        self.lhs / (self.main_term() + self.error_term)
    }

    /// `LHS / Φ(𝔻² + 1/N)`, ignoring the error term.
    pub fn main_ratio(&self) -> f64 {
        self.lhs / self.main_term()
    }
}

pub fn concentration_diagnostic(
    f: &MultFnSpec,
    n: u64,
    b: u64,
    x: u64,
    argument: ConcentrationArgument,
    table: &SpfTable,
) -> Result<ConcentrationReport> {
    if !b.is_multiple_of(2) {
        return Err(Error::invalid("B", "must be even"));
    }
    if x < 3 {
        return Err(Error::invalid("x", "need x ≥ 3"));
    }
    let params = SieveParams::unrestricted(n, b)?;
    let values = match argument {
        ConcentrationArgument::N => values_along(f, 1, 0, x, table)?,
        ConcentrationArgument::Shifted => values_along(f, b, 1, x, table)?,
    };
    let drift = imaginary_drift(f, n, x, table)?;
    let target = drift / (2.0 * PI);
    let mut lhs = KahanSum::new();
    let mut phi = 0;
    for m in 1..=x {
        if params.admits(table, m)? {
            phi += 1;
            let s = 2.0 * libm::sin(PI * (values[m as usize] - target));
            lhs.add(s * s);
        }
    }
    let pi_n = table.prime_count(n)?;
    let lx = libm::log(x as f64);
    Ok(ConcentrationReport {
        lhs: lhs.value(),
        phi,
        distance_sq: pretentious_distance_sq(f, &MultFnSpec::one(), n, x, table)?.squared_distance,
        inv_n: 1.0 / n as f64,
        drift,
        error_term: libm::pow(4.0, pi_n as f64) * x as f64 * libm::log(lx) / lx,
    })
}

/// A logarithmic grid `{0} ∪ {±t_min·10^{j/per_decade}} ∩ [−t_max, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub per_decade: u32,
}

impl TGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.t_min > 0.0 && self.t_max >= self.t_min && self.per_decade >= 1) {
            return Err(Error::invalid(
                "t-grid",
                "need 0 < t_min ≤ t_max and per_decade ≥ 1",
            ));
        }
        let mut pts = alloc::vec![0.0];
        for j in 0.. {
            let t = self.t_min * libm::pow(10.0, j as f64 / self.per_decade as f64);
            if t > self.t_max * (1.0 + 1e-12) {
                break;
            }
            pts.push(t);
            pts.push(-t);
        }
        Ok(pts)
    }
}

/// `min_t 𝔻(f, g·n^{it}; x)²` over a [`TGrid`]; returns `(t, 𝔻²)`.
pub fn min_twisted_distance(
    f: &MultFnSpec,
    g: &MultFnSpec,
    grid: &TGrid,
    x: u64,
    table: &SpfTable,
) -> Result<(f64, f64)> {
    let mut best = (0.0, f64::INFINITY);
    for t in grid.points()? {
        let twisted = g.clone().with_twist(g.twist + t);
        let d = pretentious_distance_sq(f, &twisted, 0, x, table)?.squared_distance;
        if d < best.1 {
            best = (t, d);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multfunc::{character_table, BaseRule};
    use crate::sum::harmonic;
    use crate::torus::Angle;

    fn chi4() -> MultFnSpec {
        MultFnSpec::from_base(BaseRule::Character(character_table(4).unwrap()[1].clone()))
    }

    #[test]
    fn distance_basics() {
        let t = SpfTable::new(100_000).unwrap();
        let f = chi4();
        assert_eq!(
            pretentious_distance_sq(&f, &f, 0, 100_000, &t)
                .unwrap()
                .squared_distance,
            0.0
        );
        let d = pretentious_distance_sq(&f, &MultFnSpec::one(), 0, 100_000, &t).unwrap();
        let oracle: f64 = (3..=100_000u64)
            .filter(|&p| p % 4 == 3 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0))
            .map(|p| 2.0 / p as f64)
            .sum();
        assert!((d.squared_distance - oracle).abs() < 1e-10);
        assert_eq!(d.prime_terms, 9592);
        assert!(pretentious_distance_sq(&f, &f, 10, 10, &t).is_err());
    }

    #[test]
    fn distance_additivity_and_symmetry() {
        let t = SpfTable::new(50_000).unwrap();
        let f = MultFnSpec::from_base(BaseRule::RandomPhase { seed: 3 }).with_twist(0.3);
        let g = chi4().with_twist(-1.1);
        let whole = pretentious_distance_sq(&f, &g, 2, 50_000, &t)
            .unwrap()
            .squared_distance;
        let lo = pretentious_distance_sq(&f, &g, 2, 777, &t)
            .unwrap()
            .squared_distance;
        let hi = pretentious_distance_sq(&f, &g, 777, 50_000, &t)
            .unwrap()
            .squared_distance;
        assert!((whole - lo - hi).abs() < 1e-12);
        let swapped = pretentious_distance_sq(&g, &f, 2, 50_000, &t)
            .unwrap()
            .squared_distance;
        assert!((whole - swapped).abs() < 1e-12);
        let one = MultFnSpec::one();
        let a = pretentious_distance_sq(&g.conj().product(&f), &one, 2, 50_000, &t)
            .unwrap()
            .squared_distance;
        let b = pretentious_distance_sq(&one, &f.conj().product(&g), 2, 50_000, &t)
            .unwrap()
            .squared_distance;
        assert!((whole - a).abs() < 1e-12 && (whole - b).abs() < 1e-12);
    }

    #[test]
    fn triangle_examples() {
        let t = SpfTable::new(100_000).unwrap();
        let f = chi4();
        let r = triangle_check(&f, &f, &f, 1, 100_000, &t).unwrap();
        assert!(r.passes() && r.d_fh == 0.0);
        let r = triangle_check(&f, &MultFnSpec::one(), &f.power(2), 2, 100_000, &t).unwrap();
        assert!(r.passes(), "{r:?}");
    }

    #[test]
    fn log_average_examples() {
        let t = SpfTable::new(100_000).unwrap();
        let one = log_average(&MultFnSpec::one(), 100_000, &t).unwrap();
        let lx = libm::log(100_000.0);
        assert_eq!(one.im, 0.0);
        assert!(one.re >= 1.0 && one.re <= 1.0 + 2.0 / lx);
        assert!((one.re - harmonic(100_000) / lx).abs() < 1e-12);
        // χ̃₄ is 1 at 2, so Σ χ̃₄(n)/n tends to 2·L(1, χ₄) = π/2
        let chi = log_average(&chi4(), 100_000, &t).unwrap();
        let oracle: f64 = (1..=100_000u64)
            .map(|n| {
                let odd = n >> n.trailing_zeros();
                if odd % 4 == 1 {
                    1.0 / n as f64
                } else {
                    -1.0 / n as f64
                }
            })
            .sum();
        assert!((chi.re * lx - oracle).abs() < 1e-10);
        assert!((oracle - PI / 2.0).abs() < 1e-4);
        assert!(chi.norm() <= 2.0 / lx);
    }

    #[test]
    fn correlation_of_ones_is_log_average() {
        let t = SpfTable::new(20_001).unwrap();
        let one = MultFnSpec::one();
        let c = binary_correlation(
            &one,
            &one,
            LinearForm::new(1, 0),
            LinearForm::new(1, 1),
            20_000,
            &t,
        )
        .unwrap();
        assert_eq!(c.value, log_average(&one, 20_000, &t).unwrap());
        assert!(!c.degenerate);
        let d = binary_correlation(
            &one,
            &one,
            LinearForm::new(2, 2),
            LinearForm::new(1, 1),
            1000,
            &t,
        )
        .unwrap();
        assert!(d.degenerate);
    }

    #[test]
    fn archimedean_pair_telescopes() {
        let t = SpfTable::new(100_001).unwrap();
        let f = MultFnSpec::archimedean(2.0);
        let g = MultFnSpec::archimedean(-2.0);
        let c = binary_correlation(
            &f,
            &g,
            LinearForm::new(1, 0),
            LinearForm::new(1, 1),
            100_000,
            &t,
        )
        .unwrap();
        assert!(
            (c.value - Complex64::new(1.0, 0.0)).norm() < 0.2,
            "{:?}",
            c.value
        );
    }

    #[test]
    fn correlation_table_matches_direct() {
        let t = SpfTable::new(5001).unwrap();
        let f = MultFnSpec::from_base(BaseRule::RandomPhase { seed: 1 });
        let g = chi4().with_twist(0.4);
        let tab = correlation_table(&f, &g, 3, 5000, &t).unwrap();
        assert_eq!(tab.len(), 49);
        for m1 in -3..=3i64 {
            for m2 in -3..=3i64 {
                let c = binary_correlation(
                    &f.power(m1),
                    &g.power(m2),
                    LinearForm::new(1, 0),
                    LinearForm::new(1, 1),
                    5000,
                    &t,
                )
                .unwrap();
                let direct = c.value * libm::log(5000.0);
                assert!((tab[&(m1, m2)] - direct).norm() < 1e-9, "{m1} {m2}");
            }
        }
    }

    #[test]
    fn drift_examples() {
        let t = SpfTable::new(10_000).unwrap();
        assert_eq!(imaginary_drift(&chi4(), 2, 10_000, &t).unwrap(), 0.0);
        let f = MultFnSpec::one().with_exception(5, Angle::rational(1, 4));
        assert!((imaginary_drift(&f, 2, 10_000, &t).unwrap() - 0.2).abs() < 1e-15);
        let g = MultFnSpec::from_base(BaseRule::RandomPhase { seed: 9 });
        let a = imaginary_drift(&g, 2, 10_000, &t).unwrap();
        let b = imaginary_drift(&g.conj(), 2, 10_000, &t).unwrap();
        assert!((a + b).abs() < 1e-12);
        let lo = imaginary_drift(&g, 2, 300, &t).unwrap();
        let hi = imaginary_drift(&g, 300, 10_000, &t).unwrap();
        assert!((a - lo - hi).abs() < 1e-12);
    }

    #[test]
    fn concentration_trivial() {
        let t = SpfTable::new(20_001).unwrap();
        let r = concentration_diagnostic(
            &MultFnSpec::one(),
            5,
            2,
            10_000,
            ConcentrationArgument::N,
            &t,
        )
        .unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.distance_sq, 0.0);
        assert!(r.phi > 0);
        assert!(concentration_diagnostic(
            &MultFnSpec::one(),
            5,
            3,
            100,
            ConcentrationArgument::N,
            &t
        )
        .is_err());
    }

    #[test]
    fn t_grid_finds_twist() {
        let t = SpfTable::new(20_000).unwrap();
        let f = chi4().with_twist(1.0);
        let grid = TGrid {
            t_min: 0.01,
            t_max: 10.0,
            per_decade: 20,
        };
        let (tb, d) = min_twisted_distance(&f, &chi4(), &grid, 20_000, &t).unwrap();
        assert!((tb - 1.0).abs() < 1e-9, "{tb}");
        assert!(d < 1e-20);
        assert!(TGrid { t_min: 0.0, ..grid }.points().is_err());
    }
}
