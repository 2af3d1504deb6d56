//! Constructions and end-to-end experiments: the two counterexample
//! families, rational-ratio families, Kronecker searches and orbit scans.

use alloc::vec::Vec;

use crate::analysis::values_along;
use crate::arith::{trial_factorize, SpfTable};
use crate::discrepancy::WeightedSample;
use crate::error::{Error, Result};
use crate::multfunc::{
    character_table, BaseRule, DirichletCharacter, MultFnSpec, MAX_CHARACTER_MODULUS,
};
use crate::sum::KahanSum;
use crate::torus::{archimedean_unchecked, chord, in_arc, Angle, Arc};

pub const SQRT2_MINUS_1: f64 = core::f64::consts::SQRT_2 - 1.0;
pub const SQRT3_MINUS_1: f64 = 0.732_050_807_568_877_2;
pub const GOLDEN_MINUS_1: f64 = 0.618_033_988_749_894_9;

/// The primitive character of exact order `k` with the least modulus, and
/// least index within it, skipping the moduli in `avoid`.
pub fn primitive_character_of_order(k: u64, avoid: &[u64]) -> Result<DirichletCharacter> {
    if k < 1 {
        return Err(Error::invalid("order", "must be ≥ 1"));
    }
    for q in 1..=MAX_CHARACTER_MODULUS {
        if avoid.contains(&q) {
            continue;
        }
        // the group mod q has an element of order k only if k | φ(q)
        if !crate::arith::euler_phi(q).is_multiple_of(k) {
            continue;
        }
        if let Some(chi) = character_table(q)?
            .into_iter()
            .find(|c| c.order() == k && c.is_primitive())
        {
            return Ok(chi);
        }
    }
    Err(Error::invalid(
        "order",
        "no primitive character of that order below the modulus cap",
    ))
}

/// `f = h₁(n)n^{it}`, `g = h₂(n)n^{it}` with `h₁`, `h₂` primitive characters
/// of exact orders `k` and `l` and distinct moduli, so `f^k = n^{ikt}` and
/// `g^l = n^{ilt}`.
pub fn counterexample_i(order_k: u64, order_l: u64, t: f64) -> Result<(MultFnSpec, MultFnSpec)> {
    if order_k < 2 {
        return Err(Error::invalid("order_k", "must be ≥ 2"));
    }
    if order_l < 2 {
        return Err(Error::invalid("order_l", "must be ≥ 2"));
    }
    if t == 0.0 || !t.is_finite() {
        return Err(Error::invalid("t", "must be finite and nonzero"));
    }
    let h1 = primitive_character_of_order(order_k, &[])?;
    let h2 = primitive_character_of_order(order_l, &[h1.modulus()])?;
    Ok((
        MultFnSpec::from_base(BaseRule::Character(h1)).with_twist(t),
        MultFnSpec::from_base(BaseRule::Character(h2)).with_twist(t),
    ))
}

/// `f(p) = e(α)`, `g(p) = e(β)` at the one prime `p`, and 1 at every other
/// prime.
pub fn counterexample_ii(p: u64, alpha: Angle, beta: Angle) -> Result<(MultFnSpec, MultFnSpec)> {
    if p < 2 || trial_factorize(p).pairs() != [(p, 1)] {
        return Err(Error::invalid("p", "must be prime"));
    }
    if alpha.is_rational() {
        return Err(Error::invalid("alpha", "must be a real (irrational) angle"));
    }
    if beta.is_rational() {
        return Err(Error::invalid("beta", "must be a real (irrational) angle"));
    }
    Ok((
        MultFnSpec::one().with_exception(p, alpha),
        MultFnSpec::one().with_exception(p, beta),
    ))
}

/// Number of `n ≤ x` with `f(n) ≠ 1` and `g(n+1) ≠ 1`; needs
/// `x + 1 ≤ table.limit()`.
pub fn cross_violations(f: &MultFnSpec, g: &MultFnSpec, x: u64, table: &SpfTable) -> Result<u64> {
    let fv = f.angles_up_to(table, x)?;
    let gv = g.angles_up_to(table, x + 1)?;
    Ok((1..=x as usize)
        .filter(|&n| !fv[n].is_zero() && !gv[n + 1].is_zero())
        .count() as u64)
}

/// `f` with `f^k = n^{it}` and `g` with `g^l = n^{it′}`, and the exponents
/// that take the orbit `(f(n), g(n+1))` to `(n^{iu}, (n+1)^{iu′})`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioFamily {
    pub f: MultFnSpec,
    pub g: MultFnSpec,
    pub t: f64,
    pub t_prime: f64,
    pub exponents: (i64, i64),
}

impl RatioFamily {
    /// Twists of the powered pair.
    pub fn powered_twists(&self) -> (f64, f64) {
        (
            self.t * self.exponents.0 as f64 / self.k() as f64,
            self.t_prime * self.exponents.1 as f64 / self.l() as f64,
        )
    }

    pub fn powered(&self) -> (MultFnSpec, MultFnSpec) {
        (
            self.f.power(self.exponents.0),
            self.g.power(self.exponents.1),
        )
    }

    fn k(&self) -> i64 {
        order_of(&self.f)
    }

    fn l(&self) -> i64 {
        order_of(&self.g)
    }
}

fn order_of(f: &MultFnSpec) -> i64 {
    match &f.base {
        BaseRule::Character(chi) => chi.order() as i64,
        _ => 1,
    }
}

/// `h·n^{it/k}` with `h` of exact order `k`; plain `n^{it}` for `k = 1`.
fn root_of_twist(k: u64, t: f64, avoid: &[u64]) -> Result<MultFnSpec> {
    if k == 1 {
        return Ok(MultFnSpec::archimedean(t));
    }
    let chi = primitive_character_of_order(k, avoid)?;
    Ok(MultFnSpec::from_base(BaseRule::Character(chi)).with_twist(t / k as f64))
}

fn family(k: u64, l: u64, t: f64, t_prime: f64, exponents: (i64, i64)) -> Result<RatioFamily> {
    if k < 1 {
        return Err(Error::invalid("k", "must be ≥ 1"));
    }
    if l < 1 {
        return Err(Error::invalid("l", "must be ≥ 1"));
    }
    if t_prime == 0.0 || !t_prime.is_finite() {
        return Err(Error::invalid("t_prime", "must be finite and nonzero"));
    }
    let f = root_of_twist(k, t, &[])?;
    let avoid: Vec<u64> = match &f.base {
        BaseRule::Character(chi) => alloc::vec![chi.modulus()],
        _ => Vec::new(),
    };
    let g = root_of_twist(l, t_prime, &avoid)?;
    Ok(RatioFamily {
        f,
        g,
        t,
        t_prime,
        exponents,
    })
}

/// `t = (r₁/s₁)t′`; the powered orbit `(f^{ks₁}(n), g^{lr₁}(n+1))` equals
/// `(n^{iu}, (n+1)^{iu})` with `u = s₁t = r₁t′` and hugs the diagonal.
pub fn ratratio_family(k: u64, l: u64, r1: i64, s1: i64, t_prime: f64) -> Result<RatioFamily> {
    if r1 == 0 {
        return Err(Error::invalid("r1", "must be nonzero"));
    }
    if s1 == 0 {
        return Err(Error::invalid("s1", "must be nonzero"));
    }
    let t = r1 as f64 / s1 as f64 * t_prime;
    family(k, l, t, t_prime, (k as i64 * s1, l as i64 * r1))
}

/// The same construction with `t = √2·t′`; the powered orbit is
/// `(n^{it}, (n+1)^{it′})`.
pub fn ratratio_irrational(k: u64, l: u64, t_prime: f64) -> Result<RatioFamily> {
    family(
        k,
        l,
        core::f64::consts::SQRT_2 * t_prime,
        t_prime,
        (k as i64, l as i64),
    )
}

/// `|e(u log n/2π) − e(u log(n+1)/2π)|`, the chord between the two
/// coordinates of the powered point at `n`.
pub fn diagonal_gap(family: &RatioFamily, n: u64, table: &SpfTable) -> Result<f64> {
    let (pf, pg) = family.powered();
    Ok(chord(pf.eval(table, n)?, pg.eval(table, n + 1)?))
}

/// Sampled `n` where [`diagonal_gap`] exceeds `|u|/n`.
pub fn diagonal_violations(
    family: &RatioFamily,
    samples: impl IntoIterator<Item = u64>,
    table: &SpfTable,
) -> Result<Vec<u64>> {
    let u = family.powered_twists().0.abs();
    let mut out = Vec::new();
    for n in samples {
        if diagonal_gap(family, n, table)? > u / n as f64 {
            out.push(n);
        }
    }
    Ok(out)
}

/// Target for [`kronecker_search`]: the least `m ≤ M` with `k | m` and
/// `‖mαⱼ − γⱼ‖ < η` for every `j`.
///
/// Angles are compared in 64-bit fixed point, so rational and real inputs
/// are treated alike.
#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerQuery {
    pub alphas: Vec<Angle>,
    pub targets: Vec<Angle>,
    pub eta: f64,
    pub m_max: u64,
    pub k: u64,
}

const ONE: u128 = 1 << 64;

fn fixed(a: Angle) -> u128 {
    match a {
        Angle::Rational { num, den } => ((num as u128) * ONE + den as u128 / 2) / den as u128 % ONE,
        Angle::Real(x) => libm::round(x * ONE as f64) as u128 % ONE,
    }
}

impl KroneckerQuery {
    pub fn new(
        alphas: Vec<Angle>,
        targets: Vec<Angle>,
        eta: f64,
        m_max: u64,
        k: u64,
    ) -> Result<Self> {
        let q = Self {
            alphas,
            targets,
            eta,
            m_max,
            k,
        };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.alphas.len() > 2 {
            return Err(Error::invalid("alphas", "need one or two angles"));
        }
        if self.targets.len() != self.alphas.len() {
            return Err(Error::invalid("targets", "need one target per angle"));
        }
        if self.eta.is_nan() || self.eta <= 0.0 {
            return Err(Error::invalid("eta", "must be positive"));
        }
        if self.m_max < 1 {
            return Err(Error::invalid("M", "must be ≥ 1"));
        }
        if self.k < 1 {
            return Err(Error::invalid("k", "must be ≥ 1"));
        }
        Ok(())
    }

    /// Largest admissible fixed-point distance, `None` when every angle
    /// qualifies.
    fn radius(&self) -> Option<u128> {
        let r = libm::ceil(self.eta * ONE as f64);
        if r > (ONE / 2) as f64 {
            None
        } else {
            Some(r as u128 - 1)
        }
    }

    /// Whether `m` meets every target.
    pub fn accepts(&self, m: u64) -> bool {
        let Some(radius) = self.radius() else {
            return true;
        };
        self.alphas.iter().zip(&self.targets).all(|(&a, &g)| {
            let y = fixed(a) * (m as u128 % ONE) % ONE;
            let d = (y + ONE - fixed(g)) % ONE;
            d.min(ONE - d) <= radius
        })
    }
}

/// Exhaustive scan over `m = k, 2k, …, ≤ M`.
pub fn kronecker_search(query: &KroneckerQuery) -> Result<Option<u64>> {
    query.validate()?;
    Ok((1..=query.m_max / query.k)
        .map(|j| j * query.k)
        .find(|&m| query.accepts(m)))
}

/// Least `x ≥ 0` with `l ≤ (a·x mod m) ≤ r`, for `0 ≤ l ≤ r < m`.
fn least_in_range(a: u128, m: u128, l: u128, r: u128) -> Option<u128> {
    if l == 0 {
        return Some(0);
    }
    let a = a % m;
    if a == 0 {
        return None;
    }
    let k = l.div_ceil(a);
    if a.checked_mul(k)? <= r {
        return Some(k);
    }
    // no multiple of a in [l, r]; recurse on the residues of −m·y mod a
    let y = least_in_range(m % a, a, (a - r % a) % a, (a - l % a) % a)?;
    m.checked_mul(y)?
        .checked_add(l)?
        .checked_add(a - 1)
        .map(|v| v / a)
}

/// Least `x ≥ 1` with `a·x mod m` in the closed arc `[lo, lo + width]`.
fn least_in_arc(a: u128, m: u128, lo: u128, width: u128) -> Option<u128> {
    let hi = lo + width;
    let mut best: Option<u128> = None;
    let mut offer = |x: Option<u128>| {
        if let Some(x) = x {
            best = Some(best.map_or(x, |b: u128| b.min(x)));
        }
    };
    let mut pieces: Vec<(u128, u128)> = Vec::new();
    if hi < m {
        pieces.push((lo, hi));
    } else {
        pieces.push((lo, m - 1));
        pieces.push((0, hi - m));
    }
    for (l, r) in pieces {
        if l == 0 {
            // x ≥ 1 with a·x ≡ 0, or landing in [1, r]
            let g = gcd(a % m, m);
            offer(Some(m / g));
            if r >= 1 {
                offer(least_in_range(a, m, 1, r));
            }
        } else {
            offer(least_in_range(a, m, l, r));
        }
    }
    best
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Single-angle search by the Euclid-style recursion for the first
/// multiple of `kα` in the target arc. Agrees with [`kronecker_search`].
pub fn kronecker_search_fast(query: &KroneckerQuery) -> Result<Option<u64>> {
    query.validate()?;
    if query.alphas.len() != 1 {
        return Err(Error::invalid(
            "alphas",
            "the accelerated search takes a single angle",
        ));
    }
    let Some(radius) = query.radius() else {
        return Ok(Some(query.k).filter(|&m| m <= query.m_max));
    };
    let step = fixed(query.alphas[0]) * (query.k as u128 % ONE) % ONE;
    let lo = (fixed(query.targets[0]) + ONE - radius % ONE) % ONE;
    let width = (2 * radius).min(ONE - 1);
    Ok(least_in_arc(step, ONE, lo, width)
        .and_then(|x| x.checked_mul(query.k as u128))
        .filter(|&m| m <= query.m_max as u128)
        .map(|m| m as u64))
}

/// Inputs of [`ppower_search`]: find a prime `p ∈ (N, P]` and `m ≤ M` with
/// `|f(p)^m − z| < η`, `p^{ium}` within `δ` of 1, and `k | m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PPowerQuery {
    pub f: MultFnSpec,
    pub z: Angle,
    pub u: f64,
    pub delta: f64,
    pub eta: f64,
    pub k: u64,
    pub n: u64,
    pub prime_bound: u64,
    pub m_max: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PPowerHit {
    pub p: u64,
    pub m: u64,
    /// `|f(p)^m − z|`.
    pub value_gap: f64,
    /// `‖u·m·log p/2π‖`.
    pub arc_gap: f64,
}

impl PPowerQuery {
    fn validate(&self) -> Result<()> {
        if self.eta.is_nan() || self.eta <= 0.0 {
            return Err(Error::invalid("eta", "must be positive"));
        }
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return Err(Error::invalid("delta", "need 0 < δ ≤ 1/2"));
        }
        if self.k < 1 {
            return Err(Error::invalid("k", "must be ≥ 1"));
        }
        if self.m_max < 1 {
            return Err(Error::invalid("M", "must be ≥ 1"));
        }
        if !self.u.is_finite() {
            return Err(Error::invalid("u", "must be finite"));
        }
        Ok(())
    }

    fn measure(&self, p: u64, m: u64) -> PPowerHit {
        let value = self.f.prime_value(p).scale(m as i64);
        let arc = archimedean_unchecked(p, self.u * m as f64);
        PPowerHit {
            p,
            m,
            value_gap: chord(value, self.z),
            arc_gap: arc.circular_distance(Angle::ZERO),
        }
    }

    /// Re-derives the three conditions for `hit` from scratch.
    pub fn certify(&self, hit: &PPowerHit, table: &SpfTable) -> Result<bool> {
        let arc = Arc::new(Angle::ZERO, self.delta)?;
        let fresh = self.measure(hit.p, hit.m);
        Ok(hit.p > self.n
            && hit.p <= self.prime_bound
            && table.is_prime(hit.p)?
            && hit.m <= self.m_max
            && hit.m.is_multiple_of(self.k)
            && fresh.value_gap < self.eta
            && in_arc(archimedean_unchecked(hit.p, self.u * hit.m as f64), &arc))
    }
}

/// First hit in `(p, m)` lexicographic order.
pub fn ppower_search(query: &PPowerQuery, table: &SpfTable) -> Result<Option<PPowerHit>> {
    query.validate()?;
    if query.prime_bound > table.limit() {
        return Err(Error::OutOfReach {
            name: "prime_bound",
            value: query.prime_bound,
            reach: table.limit(),
        });
    }
    let arc = Arc::new(Angle::ZERO, query.delta)?;
    for &p in table.primes_between(query.n, query.prime_bound) {
        let p = p as u64;
        for j in 1..=query.m_max / query.k {
            let m = j * query.k;
            let hit = query.measure(p, m);
            if hit.value_gap < query.eta
                && in_arc(archimedean_unchecked(p, query.u * m as f64), &arc)
            {
                return Ok(Some(hit));
            }
        }
    }
    Ok(None)
}

/// Which pair an orbit scan records at index `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `(f(n), g(n+1))`.
    Forward,
    /// `(f(n−1), g(n))`.
    Backward,
}

/// Feeds `(n, point)` for `n = 2..=x` to `visit`, in increasing `n`.
pub fn orbit_for_each(
    f: &MultFnSpec,
    g: &MultFnSpec,
    x: u64,
    direction: Direction,
    table: &SpfTable,
    mut visit: impl FnMut(u64, [f64; 2]),
) -> Result<()> {
    if x < 2 {
        return Err(Error::invalid("x", "orbit needs x ≥ 2"));
    }
    let (fv, gv) = match direction {
        Direction::Forward => (
            values_along(f, 1, 0, x, table)?,
            values_along(g, 1, 1, x, table)?,
        ),
        Direction::Backward => (
            values_along(f, 1, 0, x, table)?,
            values_along(g, 1, 0, x, table)?,
        ),
    };
    for n in 2..=x as usize {
        let point = match direction {
            Direction::Forward => [fv[n], gv[n]],
            Direction::Backward => [fv[n - 1], gv[n]],
        };
        visit(n as u64, point);
    }
    Ok(())
}

/// The orbit on `𝕋²` with weights `1/n`, `n = 2..=x`, normalized by
/// `log x`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitScan {
    pub f: MultFnSpec,
    pub g: MultFnSpec,
    pub x: u64,
    pub direction: Direction,
    pub sample: WeightedSample<2>,
}

pub fn orbit_scan(
    f: &MultFnSpec,
    g: &MultFnSpec,
    x: u64,
    direction: Direction,
    table: &SpfTable,
) -> Result<OrbitScan> {
    let mut points = Vec::with_capacity(x.saturating_sub(1) as usize);
    orbit_for_each(f, g, x, direction, table, |_, p| points.push(p))?;
    Ok(OrbitScan {
        f: f.clone(),
        g: g.clone(),
        x,
        direction,
        sample: WeightedSample::logarithmic(points, 2)?,
    })
}

/// `Σ_{2≤n≤x} 1/n / log x`, the total mass of an orbit scan.
pub fn harmonic_logmass(x: u64) -> f64 {
    (2..=x)
        .map(|n| 1.0 / n as f64)
        .collect::<KahanSum>()
        .value()
        / libm::log(x as f64)
}

/// Named constructions shipped with the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    CounterexampleI,
    CounterexampleII,
    RatratioRational,
    RatratioIrrational,
    RandomPhase,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::CounterexampleI,
        Preset::CounterexampleII,
        Preset::RatratioRational,
        Preset::RatratioIrrational,
        Preset::RandomPhase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::CounterexampleI => "counterexample-i",
            Preset::CounterexampleII => "counterexample-ii",
            Preset::RatratioRational => "ratratio-rational",
            Preset::RatratioIrrational => "ratratio-irrational",
            Preset::RandomPhase => "random-phase",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == name)
    }

    /// The pair `(f, g)`. For the ratio presets this is the powered pair,
    /// whose orbit is the one the dichotomy is about.
    pub fn functions(self) -> Result<(MultFnSpec, MultFnSpec)> {
        match self {
            Preset::CounterexampleI => counterexample_i(2, 2, 1.0),
            Preset::CounterexampleII => {
                counterexample_ii(2, Angle::real(SQRT2_MINUS_1), Angle::real(SQRT3_MINUS_1))
            }
            Preset::RatratioRational => Ok(ratratio_rational_preset()?.powered()),
            Preset::RatratioIrrational => Ok(ratratio_irrational_preset()?.powered()),
            Preset::RandomPhase => Ok((
                MultFnSpec::from_base(BaseRule::RandomPhase { seed: 1 }),
                MultFnSpec::from_base(BaseRule::RandomPhase { seed: 2 }),
            )),
        }
    }
}

/// `k = 2`, `l = 3`, `t = (2/3)·1`: exponents `(6, 6)`, `u = 2`.
pub fn ratratio_rational_preset() -> Result<RatioFamily> {
    ratratio_family(2, 3, 2, 3, 1.0)
}

/// `k = 2`, `l = 3`, `t′ = 5`, `t = 5√2`.
pub fn ratratio_irrational_preset() -> Result<RatioFamily> {
    ratratio_irrational(2, 3, 5.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::{grid_coverage, star_discrepancy};
    use crate::torus::archimedean_angle;
    use proptest::prelude::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table(x: u64) -> SpfTable {
        SpfTable::new(x).unwrap()
    }

    #[test]
    fn counterexample_i_power_identity() {
        let t = table(10_001);
        for (k, l, tw) in [(2, 2, 1.0), (3, 4, 0.7), (5, 2, -2.5)] {
            let (f, g) = counterexample_i(k, l, tw).unwrap();
            let (BaseRule::Character(h1), BaseRule::Character(h2)) = (&f.base, &g.base) else {
                panic!("character bases expected");
            };
            assert_eq!((h1.order(), h2.order()), (k, l));
            assert!(h1.is_primitive() && h2.is_primitive());
            assert_ne!(h1.modulus(), h2.modulus());
            for n in 1..=10_000 {
                let lhs = f.eval(&t, n).unwrap().scale(k as i64);
                let rhs = archimedean_angle(n, k as f64 * tw).unwrap();
                assert!(lhs.circular_distance(rhs) <= 1e-9, "n={n}");
            }
        }
        assert!(counterexample_i(1, 2, 1.0).is_err());
        assert!(counterexample_i(2, 0, 1.0).is_err());
        assert!(counterexample_i(2, 2, 0.0).is_err());
    }

    #[test]
    fn smallest_characters() {
        assert_eq!(primitive_character_of_order(2, &[]).unwrap().modulus(), 3);
        assert_eq!(primitive_character_of_order(2, &[3]).unwrap().modulus(), 4);
        assert_eq!(primitive_character_of_order(3, &[]).unwrap().modulus(), 7);
        assert_eq!(primitive_character_of_order(4, &[]).unwrap().modulus(), 5);
    }

    #[test]
    fn counterexample_ii_cross() {
        let t = table(100_001);
        let (f, g) =
            counterexample_ii(2, Angle::real(SQRT2_MINUS_1), Angle::real(SQRT3_MINUS_1)).unwrap();
        assert_eq!(cross_violations(&f, &g, 100_000, &t).unwrap(), 0);
        // the same exception at 2 for both breaks nothing; at 3 for g it does
        let g3 = MultFnSpec::one().with_exception(3, Angle::real(0.25));
        assert!(cross_violations(&f, &g3, 1000, &t).unwrap() > 0);
        assert!(counterexample_ii(4, Angle::real(0.1), Angle::real(0.2)).is_err());
        assert!(counterexample_ii(2, Angle::rational(1, 3), Angle::real(0.2)).is_err());
    }

    #[test]
    fn prime_power_marginal_fills_grid() {
        let mut cells = [false; 16];
        for m in 1..=1000u64 {
            let a = Angle::real(SQRT2_MINUS_1).scale(m as i64).to_f64();
            cells[(a * 16.0) as usize] = true;
        }
        assert!(cells.iter().all(|&c| c));
    }

    #[test]
    fn orbit_of_constants() {
        let t = table(1001);
        let one = MultFnSpec::one();
        let scan = orbit_scan(&one, &one, 1000, Direction::Forward, &t).unwrap();
        assert_eq!(scan.sample.len(), 999);
        assert!(scan.sample.points().iter().all(|p| *p == [0.0, 0.0]));
        assert!((star_discrepancy(&scan.sample.clone().normalized()).unwrap() - 1.0).abs() < 1e-12);
        assert!((scan.sample.total_mass() - harmonic_logmass(1000)).abs() < 1e-9);
    }

    #[test]
    fn orbit_directions_agree_up_to_shift() {
        let t = table(2001);
        let f = MultFnSpec::from_base(BaseRule::RandomPhase { seed: 4 });
        let g = MultFnSpec::archimedean(0.3);
        let fwd = orbit_scan(&f, &g, 2000, Direction::Forward, &t).unwrap();
        let bwd = orbit_scan(&f, &g, 2000, Direction::Backward, &t).unwrap();
        // forward point at n is the backward point at n + 1
        assert_eq!(&fwd.sample.points()[..1998], &bwd.sample.points()[1..]);
        assert_eq!(bwd.sample.points()[0][0], 0.0);
        for (i, p) in fwd.sample.points().iter().enumerate() {
            let n = i as u64 + 2;
            assert!(Angle::real(p[0]).circular_distance(f.eval(&t, n).unwrap()) < 1e-12);
            assert!(Angle::real(p[1]).circular_distance(g.eval(&t, n + 1).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn cross_orbit_coverage_small() {
        let t = table(100_001);
        let (f, g) =
            counterexample_ii(2, Angle::real(SQRT2_MINUS_1), Angle::real(SQRT3_MINUS_1)).unwrap();
        let scan = orbit_scan(&f, &g, 100_000, Direction::Forward, &t).unwrap();
        let cov = grid_coverage(&scan.sample, 8).unwrap();
        for cell in &cov.empty_cells {
            // the first row and column can only be fed along the axes
            assert!(cell[0] != 0 || cell[1] != 0);
        }
        let off_cross = cov
            .empty_cells
            .iter()
            .filter(|c| c[0] != 0 && c[1] != 0)
            .count();
        assert_eq!(off_cross, 49);
    }

    #[test]
    fn ratratio_diagonal() {
        let t = table(100_001);
        let fam = ratratio_family(2, 3, 2, 3, 1.0).unwrap();
        assert_eq!(fam.exponents, (6, 6));
        let (u, v) = fam.powered_twists();
        assert!((u - 2.0).abs() < 1e-12 && (v - 2.0).abs() < 1e-12);
        let bad = diagonal_violations(&fam, (1000..100_000).step_by(97), &t).unwrap();
        assert!(bad.is_empty(), "{bad:?}");
        for n in [1000u64, 5000, 99_999] {
            let gap = diagonal_gap(&fam, n, &t).unwrap();
            assert!(gap <= 2.0 * libm::log1p(1.0 / n as f64) + 1e-12);
        }
        let same = ratratio_family(1, 1, 1, 1, 1.0).unwrap();
        assert_eq!(same.f, same.g);
        assert!(ratratio_family(1, 1, 0, 1, 1.0).is_err());
        assert!(ratratio_family(1, 1, 1, 0, 1.0).is_err());
        let irr = ratratio_irrational(2, 3, 5.0).unwrap();
        assert!((irr.t - 5.0 * core::f64::consts::SQRT_2).abs() < 1e-12);
        let (pf, _) = irr.powered();
        let n = 12_345;
        assert!(
            pf.eval(&t, n)
                .unwrap()
                .circular_distance(archimedean_angle(n, irr.t).unwrap())
                < 1e-9
        );
    }

    fn scan_oracle(alphas: &[f64], targets: &[f64], eta: f64, m_max: u64, k: u64) -> Option<u64> {
        (1..=m_max).filter(|m| m % k == 0).find(|&m| {
            alphas.iter().zip(targets).all(|(&a, &g)| {
                let y = (m as f64 * a).rem_euclid(1.0);
                let d = (y - g).rem_euclid(1.0);
                d.min(1.0 - d) < eta
            })
        })
    }

    #[test]
    fn kronecker_examples() {
        let q = KroneckerQuery::new(
            alloc::vec![Angle::rational(1, 2)],
            alloc::vec![Angle::rational(1, 2)],
            1e-6,
            10,
            1,
        )
        .unwrap();
        assert_eq!(kronecker_search(&q).unwrap(), Some(1));
        assert_eq!(kronecker_search_fast(&q).unwrap(), Some(1));
        let q = KroneckerQuery::new(
            alloc::vec![Angle::real(SQRT2_MINUS_1)],
            alloc::vec![Angle::real(0.3)],
            0.02,
            1000,
            1,
        )
        .unwrap();
        let want = scan_oracle(&[SQRT2_MINUS_1], &[0.3], 0.02, 1000, 1);
        assert!(want.is_some());
        assert_eq!(kronecker_search(&q).unwrap(), want);
        assert_eq!(kronecker_search_fast(&q).unwrap(), want);
        let q = KroneckerQuery::new(
            alloc::vec![Angle::real(SQRT2_MINUS_1), Angle::real(SQRT3_MINUS_1)],
            alloc::vec![Angle::real(0.7), Angle::real(0.1)],
            0.05,
            100_000,
            1,
        )
        .unwrap();
        let want = scan_oracle(
            &[SQRT2_MINUS_1, SQRT3_MINUS_1],
            &[0.7, 0.1],
            0.05,
            100_000,
            1,
        );
        assert!(want.is_some());
        assert_eq!(kronecker_search(&q).unwrap(), want);
        assert!(kronecker_search_fast(&q).is_err());
        assert!(KroneckerQuery::new(alloc::vec![], alloc::vec![], 0.1, 10, 1).is_err());
        assert!(KroneckerQuery::new(
            alloc::vec![Angle::ZERO],
            alloc::vec![Angle::ZERO],
            0.0,
            10,
            1
        )
        .is_err());
        assert!(KroneckerQuery::new(
            alloc::vec![Angle::ZERO],
            alloc::vec![Angle::ZERO],
            0.1,
            10,
            0
        )
        .is_err());
    }

    #[test]
    fn kronecker_unreachable_targets() {
        // multiples of 1/4 never come near 1/8
        let q = KroneckerQuery::new(
            alloc::vec![Angle::rational(1, 4)],
            alloc::vec![Angle::rational(1, 8)],
            0.01,
            1000,
            1,
        )
        .unwrap();
        assert_eq!(kronecker_search(&q).unwrap(), None);
        assert_eq!(kronecker_search_fast(&q).unwrap(), None);
        // hit exists but only beyond M
        let q = KroneckerQuery::new(
            alloc::vec![Angle::real(SQRT2_MINUS_1)],
            alloc::vec![Angle::real(0.3)],
            1e-4,
            50,
            1,
        )
        .unwrap();
        assert_eq!(kronecker_search(&q).unwrap(), None);
        assert_eq!(kronecker_search_fast(&q).unwrap(), None);
    }

    #[test]
    fn least_in_range_small_moduli() {
        for m in 1u128..=40 {
            for a in 0..m {
                for l in 0..m {
                    for r in l..m {
                        let want = (0..m).find(|&x| (l..=r).contains(&(a * x % m)));
                        assert_eq!(least_in_range(a, m, l, r), want, "a={a} m={m} [{l},{r}]");
                    }
                }
            }
        }
    }

    #[test]
    fn fast_matches_scan_on_seeded_queries() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut unit = || rng.next_u64() as f64 / 18_446_744_073_709_551_616.0;
        for _ in 0..200 {
            let alpha = Angle::real(unit());
            let target = Angle::real(unit());
            let eta = 1e-4 + 0.05 * unit();
            let k = 1 + (unit() * 6.0) as u64;
            let q = KroneckerQuery::new(alloc::vec![alpha], alloc::vec![target], eta, 20_000, k)
                .unwrap();
            assert_eq!(
                kronecker_search_fast(&q).unwrap(),
                kronecker_search(&q).unwrap(),
                "{q:?}"
            );
        }
    }

    #[test]
    fn ppower_examples() {
        let t = table(10_000);
        let q = PPowerQuery {
            f: MultFnSpec::one(),
            z: Angle::ZERO,
            u: 0.0,
            delta: 0.1,
            eta: 0.01,
            k: 3,
            n: 10,
            prime_bound: 1000,
            m_max: 100,
        };
        let hit = ppower_search(&q, &t).unwrap().unwrap();
        assert_eq!((hit.p, hit.m), (11, 3));
        assert!(q.certify(&hit, &t).unwrap());

        let f = MultFnSpec::from_base(BaseRule::Constant(Angle::real(SQRT3_MINUS_1)));
        let q = PPowerQuery {
            f: f.clone(),
            z: Angle::real(0.55),
            u: 0.0,
            delta: 0.1,
            eta: 0.05,
            k: 1,
            n: 2,
            prime_bound: 100,
            m_max: 1000,
        };
        let hit = ppower_search(&q, &t).unwrap().unwrap();
        assert_eq!(hit.p, 3);
        let oracle = (1..=1000u64)
            .find(|&m| {
                let a = (m as f64 * SQRT3_MINUS_1).rem_euclid(1.0);
                let c = crate::torus::e(a) - crate::torus::e(0.55);
                c.norm() < 0.05
            })
            .unwrap();
        assert_eq!(hit.m, oracle);
        assert!(q.certify(&hit, &t).unwrap());

        // with a twist both conditions interact
        let q = PPowerQuery {
            f: f.with_twist(0.8),
            z: Angle::real(0.2),
            u: 0.8,
            delta: 0.05,
            eta: 0.1,
            k: 2,
            n: 50,
            prime_bound: 5000,
            m_max: 500,
        };
        if let Some(hit) = ppower_search(&q, &t).unwrap() {
            assert!(q.certify(&hit, &t).unwrap());
            assert!(hit.value_gap < 0.1 && hit.arc_gap <= 0.05 && hit.m % 2 == 0);
        }
    }

    #[test]
    fn ppower_rejects_bad_input() {
        let t = table(100);
        let mut q = PPowerQuery {
            f: MultFnSpec::one(),
            z: Angle::ZERO,
            u: 0.0,
            delta: 0.1,
            eta: 0.01,
            k: 1,
            n: 1,
            prime_bound: 1000,
            m_max: 1,
        };
        assert!(ppower_search(&q, &t).unwrap_err().is_reach());
        q.prime_bound = 50;
        q.eta = 0.0;
        assert!(ppower_search(&q, &t).is_err());
    }

    #[test]
    fn presets_round_trip() {
        for p in Preset::ALL {
            assert_eq!(Preset::from_name(p.name()), Some(p));
            p.functions().unwrap();
        }
        assert_eq!(Preset::from_name("nope"), None);
    }

    proptest! {
        #[test]
        fn diagonal_bound(u in -20.0f64..20.0, n in 2u64..10_000_000) {
            let a = archimedean_angle(n, u).unwrap();
            let b = archimedean_angle(n + 1, u).unwrap();
            prop_assert!(chord(a, b) <= u.abs() / n as f64 + 1e-12);
        }

        #[test]
        fn accelerated_equals_scan(a in 0.0f64..1.0, g in 0.0f64..1.0, eta in 1e-3f64..0.2, k in 1u64..5) {
            let q = KroneckerQuery::new(alloc::vec![Angle::real(a)], alloc::vec![Angle::real(g)], eta, 5000, k).unwrap();
            prop_assert_eq!(kronecker_search_fast(&q).unwrap(), kronecker_search(&q).unwrap());
        }
    }
}
