//! Completely multiplicative functions `ℕ → 𝕋`.
//!
//! A [`MultFnSpec`] fixes the angle at every prime (a finite exception
//! table over a [`BaseRule`]) plus an Archimedean twist `n^{it}`. Values at
//! composite `n` follow from the factorization.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc as Shared;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{trial_factorize, SpfTable};
use crate::error::{Error, Result};
use crate::torus::{archimedean_f64, archimedean_unchecked, Angle};

/// Largest modulus for which [`character_table`] enumerates characters.
pub const MAX_CHARACTER_MODULUS: u64 = 10_000;

/// Marks residues not coprime to the modulus in discrete-log tables.
const NOT_COPRIME: u32 = u32::MAX;

/// One cyclic factor of `(ℤ/q)*` with its discrete-log table over all
/// residues mod `q`.
#[derive(Debug)]
struct CyclicFactor {
    order: u64,
    dlog: Vec<u32>,
}

/// `(ℤ/q)*` as a product of cyclic factors, one per odd prime power and
/// one or two for the 2-part.
#[derive(Debug)]
pub struct CharacterGroup {
    modulus: u64,
    factors: Vec<CyclicFactor>,
}

impl CharacterGroup {
    fn new(q: u64) -> Result<Self> {
        if q == 0 || q > MAX_CHARACTER_MODULUS {
            return Err(Error::invalid(
                "q",
                format!("modulus {q} must lie in [1, {MAX_CHARACTER_MODULUS}]"),
            ));
        }
        let mut factors = Vec::new();
        for &(p, e) in trial_factorize(q).pairs() {
            let pe = p.pow(e);
            // local tables over residues mod p^e, lifted to residues mod q below
            let locals: Vec<(u64, Vec<u32>)> = if p == 2 {
                two_power_tables(e)
            } else {
                vec![odd_prime_power_table(p, pe)]
            };
            for (order, local) in locals {
                let dlog = (0..q).map(|a| local[(a % pe) as usize]).collect();
                factors.push(CyclicFactor { order, dlog });
            }
        }
        Ok(Self {
            modulus: q,
            factors,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `φ(q)`.
    pub fn size(&self) -> u64 {
        self.factors.iter().map(|f| f.order).product()
    }

    fn angle(&self, exps: &[u64], a: u64) -> Option<Angle> {
        let r = (a % self.modulus) as usize;
        let mut acc = Angle::ZERO;
        for (f, &e) in self.factors.iter().zip(exps) {
            let d = f.dlog[r];
            if d == NOT_COPRIME {
                return None;
            }
            if e != 0 {
                acc = acc + Angle::rational(((e * d as u64) % f.order) as i64, f.order);
            }
        }
        Some(acc)
    }
}

fn odd_prime_power_table(p: u64, pe: u64) -> (u64, Vec<u32>) {
    let order = pe / p * (p - 1);
    let g = (2..pe)
        .find(|&g| g % p != 0 && multiplicative_order(g, pe) == order)
        .expect("odd prime powers have primitive roots");
    (order, powers_table(g, order, pe))
}

fn multiplicative_order(g: u64, m: u64) -> u64 {
    let mut x = g % m;
    let mut k = 1;
    while x != 1 {
        x = x * g % m;
        k += 1;
    }
    k
}

fn powers_table(g: u64, order: u64, m: u64) -> Vec<u32> {
    let mut t = vec![NOT_COPRIME; m as usize];
    let mut x = 1 % m;
    for j in 0..order {
        t[x as usize] = j as u32;
        x = x * g % m;
    }
    t
}

/// `(ℤ/2^e)*`: trivial for `e = 1`, `⟨3⟩` for `e = 2`, `⟨−1⟩ × ⟨5⟩` beyond.
fn two_power_tables(e: u32) -> Vec<(u64, Vec<u32>)> {
    let m = 1u64 << e;
    match e {
        1 => vec![(1, vec![NOT_COPRIME, 0])],
        2 => vec![(2, powers_table(3, 2, 4))],
        _ => {
            let h = m / 4;
            let mut sign = vec![NOT_COPRIME; m as usize];
            let mut five = vec![NOT_COPRIME; m as usize];
            let mut x = 1u64;
            for j in 0..h {
                sign[x as usize] = 0;
                five[x as usize] = j as u32;
                sign[(m - x) as usize] = 1;
                five[(m - x) as usize] = j as u32;
                x = x * 5 % m;
            }
            vec![(2, sign), (h, five)]
        }
    }
}

/// A Dirichlet character mod `q`, stored as exponents on the cyclic
/// factors of `(ℤ/q)*`.
#[derive(Clone)]
pub struct DirichletCharacter {
    group: Shared<CharacterGroup>,
    exps: Vec<u64>,
    index: u64,
    order: u64,
    primitive: bool,
}

impl DirichletCharacter {
    fn build(group: Shared<CharacterGroup>, index: u64) -> Self {
        let mut exps = Vec::with_capacity(group.factors.len());
        let mut rest = index;
        for f in group.factors.iter().rev() {
            exps.push(rest % f.order);
            rest /= f.order;
        }
        exps.reverse();
        let order = group
            .factors
            .iter()
            .zip(&exps)
            .map(|(f, &e)| f.order / e.gcd(&f.order))
            .fold(1, |acc: u64, r| acc.lcm(&r));
        let mut chi = Self {
            group,
            exps,
            index,
            order,
            primitive: false,
        };
        let q = chi.modulus();
        chi.primitive = trial_factorize(q)
            .primes()
            .all(|p| !chi.trivial_on_kernel(q / p));
        chi
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    /// Position in [`character_table`]; index 0 is principal.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Exact multiplicative order.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    /// `χ(a)` as an angle, `None` when `gcd(a, q) > 1`.
    pub fn value(&self, a: u64) -> Option<Angle> {
        self.group.angle(&self.exps, a)
    }

    /// The extension `χ̃`: `χ` off the modulus, angle 0 at `p | q`.
    pub fn extended_value(&self, a: u64) -> Angle {
        self.value(a).unwrap_or(Angle::ZERO)
    }

    /// Smallest `d | q` such that `χ` is trivial on units `≡ 1 (mod d)`.
    pub fn conductor(&self) -> u64 {
        let q = self.modulus();
        (1..=q)
            .filter(|d| q.is_multiple_of(*d))
            .find(|&d| self.trivial_on_kernel(d))
            .unwrap_or(q)
    }

    fn trivial_on_kernel(&self, d: u64) -> bool {
        let q = self.modulus();
        (0..q / d)
            .map(|j| 1 + d * j)
            .filter_map(|a| self.value(a))
            .all(Angle::is_zero)
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.index == other.index
    }
}

impl Eq for DirichletCharacter {}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "χ[{} mod {}; order {}{}]",
            self.index,
            self.modulus(),
            self.order,
            if self.primitive { ", primitive" } else { "" }
        )
    }
}

/// All `φ(q)` characters mod `q`, principal first.
pub fn character_table(q: u64) -> Result<Vec<DirichletCharacter>> {
    let group = Shared::new(CharacterGroup::new(q)?);
    Ok((0..group.size())
        .map(|i| DirichletCharacter::build(group.clone(), i))
        .collect())
}

pub fn character_by_index(q: u64, index: u64) -> Result<DirichletCharacter> {
    let group = Shared::new(CharacterGroup::new(q)?);
    if index >= group.size() {
        return Err(Error::invalid(
            "index",
            format!("there are only {} characters mod {q}", group.size()),
        ));
    }
    Ok(DirichletCharacter::build(group, index))
}

/// The branch used for `k`-th roots of character values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootBranch {
    /// `h(p) = θ/k` with `θ ∈ [0, 1)` the canonical angle of `χ(p)`.
    #[default]
    Principal,
}

/// Completely multiplicative `h` with `h(p)^k = χ̃(p)` at every prime.
#[derive(Debug, Clone, PartialEq)]
pub struct Pseudocharacter {
    chi: DirichletCharacter,
    k: u64,
    branch: RootBranch,
}

impl Pseudocharacter {
    pub fn new(chi: DirichletCharacter, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k", "root order must be ≥ 1"));
        }
        Ok(Self {
            chi,
            k,
            branch: RootBranch::Principal,
        })
    }

    pub fn chi(&self) -> &DirichletCharacter {
        &self.chi
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn branch(&self) -> RootBranch {
        self.branch
    }

    /// `h(p)`; 0 at primes dividing the modulus.
    pub fn prime_angle(&self, p: u64) -> Angle {
        match self.chi.value(p) {
            Some(Angle::Rational { num, den }) => Angle::rational(num as i64, den * self.k),
            _ => Angle::ZERO,
        }
    }
}

pub fn make_pseudocharacter(chi: DirichletCharacter, k: u64) -> Result<Pseudocharacter> {
    Pseudocharacter::new(chi, k)
}

/// How a [`MultFnSpec`] assigns angles to primes outside its exception
/// table.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseRule {
    /// The same angle at every prime.
    Constant(Angle),
    /// `χ̃(p)`.
    Character(DirichletCharacter),
    Pseudocharacter(Pseudocharacter),
    /// Independent uniform angles drawn from a ChaCha8 stream per prime.
    RandomPhase {
        seed: u64,
    },
    /// Independent uniform signs `±1`.
    RandomSign {
        seed: u64,
    },
    /// `e(1/p)`.
    InversePrime,
    Product(Vec<BaseRule>),
    Power(i64, alloc::boxed::Box<BaseRule>),
}

impl BaseRule {
    pub fn prime_angle(&self, p: u64) -> Angle {
        match self {
            BaseRule::Constant(a) => *a,
            BaseRule::Character(chi) => chi.extended_value(p),
            BaseRule::Pseudocharacter(h) => h.prime_angle(p),
            BaseRule::RandomPhase { seed } => {
                Angle::real(random_word(*seed, p) as f64 / 18_446_744_073_709_551_616.0)
            }
            BaseRule::RandomSign { seed } => {
                Angle::rational((random_word(*seed, p) >> 63) as i64, 2)
            }
            BaseRule::InversePrime => Angle::rational(1, p),
            BaseRule::Product(rules) => rules.iter().map(|r| r.prime_angle(p)).sum(),
            BaseRule::Power(k, rule) => rule.prime_angle(p).scale(*k),
        }
    }

    pub fn is_rational_valued(&self) -> bool {
        match self {
            BaseRule::Constant(a) => a.is_rational(),
            BaseRule::RandomPhase { .. } => false,
            BaseRule::Product(rules) => rules.iter().all(BaseRule::is_rational_valued),
            BaseRule::Power(_, rule) => rule.is_rational_valued(),
            _ => true,
        }
    }
}

fn random_word(seed: u64, p: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(p);
    rng.next_u64()
}

/// A completely multiplicative `f(n) = f₀(n)·n^{it}`, with `f₀` fixed on
/// primes by `exceptions` and then `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultFnSpec {
    pub exceptions: BTreeMap<u64, Angle>,
    pub base: BaseRule,
    pub twist: f64,
}

impl Default for MultFnSpec {
    fn default() -> Self {
        Self::one()
    }
}

impl MultFnSpec {
    /// The constant function 1.
    pub fn one() -> Self {
        Self::from_base(BaseRule::Constant(Angle::ZERO))
    }

    pub fn from_base(base: BaseRule) -> Self {
        Self {
            exceptions: BTreeMap::new(),
            base,
            twist: 0.0,
        }
    }

    /// `n^{it}`.
    pub fn archimedean(t: f64) -> Self {
        Self::one().with_twist(t)
    }

    pub fn with_twist(mut self, t: f64) -> Self {
        self.twist = t;
        self
    }

    pub fn with_exception(mut self, p: u64, angle: Angle) -> Self {
        self.exceptions.insert(p, angle);
        self
    }

    /// `f₀(p)`, the prime angle without the Archimedean twist.
    pub fn prime_angle(&self, p: u64) -> Angle {
        match self.exceptions.get(&p) {
            Some(a) => *a,
            None => self.base.prime_angle(p),
        }
    }

    /// `f(p)` including the twist.
    pub fn prime_value(&self, p: u64) -> Angle {
        self.prime_angle(p) + archimedean_unchecked(p, self.twist)
    }

    /// `f(n)` for `1 ≤ n ≤ table.reach()`.
    pub fn eval(&self, table: &SpfTable, n: u64) -> Result<Angle> {
        let fac = table.factorize(n)?;
        let base: Angle = fac
            .pairs()
            .iter()
            .map(|&(p, e)| self.prime_angle(p).scale(e as i64))
            .sum();
        Ok(base + archimedean_unchecked(n, self.twist))
    }

    /// `f(n)` for every `n ≤ x` (index 0 is a placeholder zero), by the
    /// recurrence `f(n) = f(n/p) + f(p)` over the sieve.
    pub fn angles_up_to(&self, table: &SpfTable, x: u64) -> Result<Vec<Angle>> {
        check_table(table, x)?;
        let mut out = vec![Angle::ZERO; x as usize + 1];
        for n in 2..=x as usize {
            let p = table.spf(n as u64).unwrap_or(n as u64) as usize;
            out[n] = if p == n {
                self.prime_angle(n as u64)
            } else {
                out[n / p] + out[p]
            };
        }
        if self.twist != 0.0 {
            for (n, a) in out.iter_mut().enumerate().skip(2) {
                *a = *a + archimedean_unchecked(n as u64, self.twist);
            }
        }
        Ok(out)
    }

    /// Float form of [`MultFnSpec::angles_up_to`], in `[0, 1)`.
    pub fn real_angles_up_to(&self, table: &SpfTable, x: u64) -> Result<Vec<f64>> {
        check_table(table, x)?;
        let mut out = vec![0.0f64; x as usize + 1];
        for n in 2..=x as usize {
            let p = table.spf(n as u64).unwrap_or(n as u64) as usize;
            out[n] = if p == n {
                self.prime_angle(n as u64).to_f64()
            } else {
                reduce(out[n / p] + out[p])
            };
        }
        if self.twist != 0.0 {
            for (n, a) in out.iter_mut().enumerate().skip(2) {
                *a = reduce(*a + archimedean_f64(n as u64, self.twist));
            }
        }
        Ok(out)
    }

    /// `f^k`; negative `k` conjugates.
    pub fn power(&self, k: i64) -> Self {
        Self {
            exceptions: self
                .exceptions
                .iter()
                .map(|(&p, &a)| (p, a.scale(k)))
                .collect(),
            base: match k {
                1 => self.base.clone(),
                _ => BaseRule::Power(k, alloc::boxed::Box::new(self.base.clone())),
            },
            twist: self.twist * k as f64,
        }
    }

    pub fn conj(&self) -> Self {
        self.power(-1)
    }

    /// Pointwise product `f·g`.
    pub fn product(&self, other: &Self) -> Self {
        let exceptions = self
            .exceptions
            .keys()
            .chain(other.exceptions.keys())
            .map(|&p| (p, self.prime_angle(p) + other.prime_angle(p)))
            .collect();
        Self {
            exceptions,
            base: BaseRule::Product(vec![self.base.clone(), other.base.clone()]),
            twist: self.twist + other.twist,
        }
    }

    /// True when every value is an exact root of unity.
    pub fn is_rational_valued(&self) -> bool {
        self.twist == 0.0
            && self.base.is_rational_valued()
            && self.exceptions.values().all(|a| a.is_rational())
    }
}

#[inline]
fn reduce(x: f64) -> f64 {
    let r = x - libm::floor(x);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

fn check_table(table: &SpfTable, x: u64) -> Result<()> {
    if x > table.limit() {
        return Err(Error::OutOfReach {
            name: "x",
            value: x,
            reach: table.limit(),
        });
    }
    Ok(())
}

/// Tolerance for deciding that a real angle is 0 in [`support_set`].
pub const SUPPORT_TOLERANCE: f64 = 1e-12;

/// `T_{f^m}`: primes `p ≤ bound` with `f(p)^m ≠ 1`.
pub fn support_set(f: &MultFnSpec, m: i64, table: &SpfTable, bound: u64) -> Result<Vec<u64>> {
    if m < 1 {
        return Err(Error::invalid("m", "power must be ≥ 1"));
    }
    check_table(table, bound)?;
    Ok(table
        .primes_up_to(bound)
        .iter()
        .map(|&p| p as u64)
        .filter(|&p| {
            let a = f.prime_value(p).scale(m);
            if a.is_rational() {
                !a.is_zero()
            } else {
                a.circular_distance(Angle::ZERO) > SUPPORT_TOLERANCE
            }
        })
        .collect())
}

/// Whether `f(p)^k = 1` exactly at every prime in `(n0, bound]`. This only
/// certifies the range it scans.
pub fn eventually_rational_test(
    f: &MultFnSpec,
    k: i64,
    n0: u64,
    table: &SpfTable,
    bound: u64,
) -> Result<bool> {
    if k < 1 {
        return Err(Error::invalid("k", "power must be ≥ 1"));
    }
    if n0 > bound {
        return Err(Error::invalid("n0", "must not exceed bound"));
    }
    check_table(table, bound)?;
    Ok(table
        .primes_between(n0, bound)
        .iter()
        .all(|&p| f.prime_value(p as u64).scale(k).is_zero()))
}

/// Tolerance for real-valued comparisons in [`ekc_structural_check`].
pub const EKC_TOLERANCE: f64 = 1e-9;

/// Prime-by-prime verification of the two structural alternatives
/// `f^k = g^l` and `f^k = n^{ikt_f}, g^l = n^{ilt_g}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EkcReport {
    pub k: i64,
    pub l: i64,
    pub bound: u64,
    /// First prime where `k·f(p) ≠ l·g(p)`.
    pub powers_mismatch: Option<u64>,
    /// First prime where `k·f(p) ≠ archimedean_angle(p, k·t_f)`.
    pub f_archimedean_mismatch: Option<u64>,
    /// First prime where `l·g(p) ≠ archimedean_angle(p, l·t_g)`.
    pub g_archimedean_mismatch: Option<u64>,
}

impl EkcReport {
    pub fn powers_equal(&self) -> bool {
        self.powers_mismatch.is_none()
    }

    pub fn both_archimedean(&self) -> bool {
        self.f_archimedean_mismatch.is_none() && self.g_archimedean_mismatch.is_none()
    }

    /// Either structural alternative holds on the scanned primes.
    pub fn passes(&self) -> bool {
        self.powers_equal() || self.both_archimedean()
    }
}

pub fn ekc_structural_check(
    f: &MultFnSpec,
    g: &MultFnSpec,
    k: i64,
    l: i64,
    table: &SpfTable,
    bound: u64,
) -> Result<EkcReport> {
    if k < 1 || l < 1 {
        return Err(Error::invalid("k, l", "powers must be ≥ 1"));
    }
    check_table(table, bound)?;
    let close = |a: Angle, b: Angle| a.approx_eq(b, EKC_TOLERANCE);
    let mut report = EkcReport {
        k,
        l,
        bound,
        powers_mismatch: None,
        f_archimedean_mismatch: None,
        g_archimedean_mismatch: None,
    };
    for &p in table.primes_up_to(bound) {
        let p = p as u64;
        let fk = f.prime_value(p).scale(k);
        let gl = g.prime_value(p).scale(l);
        if report.powers_mismatch.is_none() && !close(fk, gl) {
            report.powers_mismatch = Some(p);
        }
        if report.f_archimedean_mismatch.is_none()
            && !close(fk, archimedean_unchecked(p, k as f64 * f.twist))
        {
            report.f_archimedean_mismatch = Some(p);
        }
        if report.g_archimedean_mismatch.is_none()
            && !close(gl, archimedean_unchecked(p, l as f64 * g.twist))
        {
            report.g_archimedean_mismatch = Some(p);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::euler_phi;
    use crate::torus::circle_value;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    /// Brute-force homomorphisms of `(ℤ/q)*`: every assignment on the
    /// generators found by search, checked multiplicatively on all pairs.
    fn brute_characters(q: u64) -> Vec<Vec<Option<Angle>>> {
        let units: Vec<u64> = (1..q).filter(|a| a.gcd(&q) == 1).collect();
        let phi = units.len() as u64;
        let mut found = Vec::new();
        // candidate values are φ(q)-th roots of unity; try all assignments on
        // units via a generator set built greedily
        let mut gens: Vec<u64> = Vec::new();
        let mut span: Vec<u64> = vec![1 % q.max(1)];
        for &u in &units {
            if !span.contains(&u) {
                gens.push(u);
                let mut next = span.clone();
                loop {
                    let mut grew = false;
                    for &s in &next.clone() {
                        let v = s * u % q;
                        if !next.contains(&v) {
                            next.push(v);
                            grew = true;
                        }
                    }
                    if !grew {
                        break;
                    }
                }
                span = next;
            }
        }
        let total = phi.pow(gens.len() as u32);
        for code in 0..total {
            let mut c = code;
            let assign: Vec<Angle> = gens
                .iter()
                .map(|_| {
                    let a = Angle::rational((c % phi) as i64, phi);
                    c /= phi;
                    a
                })
                .collect();
            // propagate over the span by BFS
            let mut val: Vec<Option<Angle>> = vec![None; q as usize];
            val[(1 % q) as usize] = Some(Angle::ZERO);
            let mut ok = true;
            let mut changed = true;
            while changed && ok {
                changed = false;
                for a in 0..q {
                    let Some(va) = val[a as usize] else { continue };
                    for (g, &vg) in gens.iter().zip(&assign) {
                        let b = (a * g % q) as usize;
                        let v = va + vg;
                        match val[b] {
                            None => {
                                val[b] = Some(v);
                                changed = true;
                            }
                            Some(w) if w != v => ok = false,
                            _ => {}
                        }
                    }
                }
            }
            if ok {
                found.push(val);
            }
        }
        found
    }

    #[test]
    fn small_tables_match_brute_force() {
        for q in 2..=40u64 {
            let table = character_table(q).unwrap();
            assert_eq!(table.len() as u64, euler_phi(q), "q = {q}");
            let mut ours: Vec<Vec<Option<Angle>>> = table
                .iter()
                .map(|chi| (0..q).map(|a| chi.value(a)).collect())
                .collect();
            let mut brute = brute_characters(q);
            let key = |v: &Vec<Option<Angle>>| {
                v.iter()
                    .map(|a| a.map(|a| (a.denominator().unwrap(), (a.to_f64() * 1e6) as u64)))
                    .collect::<Vec<_>>()
            };
            ours.sort_by_key(key);
            brute.sort_by_key(key);
            assert_eq!(ours, brute, "q = {q}");
        }
    }

    #[test]
    fn trivial_modulus() {
        let t = character_table(1).unwrap();
        assert_eq!(t.len(), 1);
        for n in 0..20 {
            assert_eq!(t[0].value(n), Some(Angle::ZERO));
        }
        assert!(t[0].is_primitive());
    }

    #[test]
    fn modulus_four() {
        let t = character_table(4).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t[0].is_principal());
        assert_eq!(t[1].value(3), Some(Angle::rational(1, 2)));
        assert_eq!(t[1].value(2), None);
        assert!(t[1].is_primitive());
        assert!(!t[0].is_primitive());
    }

    #[test]
    fn modulus_five_orders() {
        let mut orders: Vec<u64> = character_table(5)
            .unwrap()
            .iter()
            .map(|c| c.order())
            .collect();
        orders.sort_unstable();
        assert_eq!(orders, [1, 2, 4, 4]);
    }

    #[test]
    fn orders_are_exact() {
        for q in [7u64, 8, 12, 16, 24, 63, 100] {
            for chi in character_table(q).unwrap() {
                let units: Vec<u64> = (1..q).filter(|a| a.gcd(&q) == 1).collect();
                let kills = |r: u64| {
                    units
                        .iter()
                        .all(|&a| chi.value(a).unwrap().scale(r as i64).is_zero())
                };
                assert!(kills(chi.order()));
                let minimal = (1..=chi.order()).find(|&r| kills(r)).unwrap();
                assert_eq!(minimal, chi.order());
            }
        }
    }

    #[test]
    fn orthogonality() {
        for q in [3u64, 8, 9, 15, 16, 20, 45] {
            for chi in character_table(q).unwrap() {
                let s: crate::Complex64 =
                    (0..q).filter_map(|a| chi.value(a)).map(circle_value).sum();
                if chi.is_principal() {
                    assert!((s.re - euler_phi(q) as f64).abs() < 1e-10);
                } else {
                    assert!(s.norm() < 1e-10, "q = {q}, {chi:?}");
                }
            }
        }
    }

    /// A character is imprimitive iff it agrees with a character of some
    /// proper divisor on all units mod q.
    #[test]
    fn primitivity_against_induced_characters() {
        for q in 2..=60u64 {
            let table = character_table(q).unwrap();
            let divisors: Vec<u64> = (1..q).filter(|d| q % d == 0).collect();
            let induced: Vec<DirichletCharacter> = divisors
                .iter()
                .flat_map(|&d| character_table(d).unwrap())
                .collect();
            for chi in &table {
                let is_induced = induced.iter().any(|psi| {
                    (1..q)
                        .filter(|a| a.gcd(&q) == 1)
                        .all(|a| chi.value(a) == psi.value(a))
                });
                assert_eq!(chi.is_primitive(), !is_induced, "q = {q}, {chi:?}");
            }
        }
    }

    #[test]
    fn modulus_cap() {
        assert!(character_table(0).is_err());
        assert!(character_table(10_001).is_err());
        assert_eq!(character_by_index(10_000, 5).unwrap().modulus(), 10_000);
        assert!(character_by_index(5, 4).is_err());
    }

    #[test]
    fn pseudocharacter_branch() {
        let chi = character_table(4).unwrap()[1].clone();
        let h = make_pseudocharacter(chi.clone(), 2).unwrap();
        assert_eq!(h.prime_angle(3), Angle::rational(1, 4));
        assert_eq!(h.prime_angle(5), Angle::ZERO);
        assert_eq!(h.prime_angle(2), Angle::ZERO);
        let h1 = make_pseudocharacter(chi.clone(), 1).unwrap();
        for p in [3u64, 5, 7, 11, 13] {
            assert_eq!(h1.prime_angle(p), chi.value(p).unwrap());
        }
        assert!(make_pseudocharacter(chi, 0).is_err());
    }

    #[test]
    fn pseudocharacter_law_exhaustive() {
        let table = SpfTable::new(10_000).unwrap();
        for q in [5u64, 12, 7] {
            for chi in character_table(q).unwrap() {
                for k in 1..=4u64 {
                    let h = make_pseudocharacter(chi.clone(), k).unwrap();
                    let bound = if q == 5 && k == 3 { 10_000 } else { 1_000 };
                    for &p in table.primes_up_to(bound) {
                        let p = p as u64;
                        let v = h.prime_angle(p);
                        assert_eq!(v.scale(k as i64), chi.extended_value(p));
                        assert_eq!((chi.order() * k) % v.denominator().unwrap(), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn eval_examples() {
        let table = SpfTable::new(1000).unwrap();
        let f = MultFnSpec::one().with_exception(2, Angle::rational(1, 3));
        assert_eq!(f.eval(&table, 1).unwrap(), Angle::ZERO);
        assert_eq!(f.eval(&table, 8).unwrap(), Angle::ZERO);
        assert_eq!(f.eval(&table, 4).unwrap(), Angle::rational(2, 3));
        let a = MultFnSpec::archimedean(1.0)
            .eval(&table, 10)
            .unwrap()
            .to_f64();
        assert!((a - 0.366_467_799_439_713_9).abs() < 1e-9);
        assert!(f.eval(&table, 0).is_err());
        assert!(f.eval(&table, 1_000_001).unwrap_err().is_reach());
    }

    #[test]
    fn bulk_matches_pointwise() {
        let table = SpfTable::new(5000).unwrap();
        let chi = character_table(12).unwrap()[3].clone();
        let f = MultFnSpec::from_base(BaseRule::Product(vec![
            BaseRule::Character(chi),
            BaseRule::InversePrime,
        ]))
        .with_exception(7, Angle::rational(2, 9));
        let bulk = f.angles_up_to(&table, 5000).unwrap();
        let g = f.clone().with_twist(0.7);
        let bulk_real = g.real_angles_up_to(&table, 5000).unwrap();
        for n in 1..=5000u64 {
            assert_eq!(bulk[n as usize], f.eval(&table, n).unwrap());
            let e = g.eval(&table, n).unwrap();
            assert!(e.approx_eq(Angle::Real(bulk_real[n as usize]), 1e-12));
        }
    }

    #[test]
    fn support_set_examples() {
        let table = SpfTable::new(1000).unwrap();
        assert!(support_set(&MultFnSpec::one(), 3, &table, 1000)
            .unwrap()
            .is_empty());
        let f = MultFnSpec::one().with_exception(5, Angle::real(2f64.sqrt() - 1.0));
        assert_eq!(support_set(&f, 1, &table, 1000).unwrap(), [5]);
        let legendre = character_table(7)
            .unwrap()
            .into_iter()
            .find(|c| c.order() == 2)
            .unwrap();
        let l = MultFnSpec::from_base(BaseRule::Character(legendre));
        assert!(support_set(&l, 2, &table, 1000).unwrap().is_empty());
        assert!(!support_set(&l, 1, &table, 1000).unwrap().is_empty());
    }

    #[test]
    fn eventually_rational_examples() {
        let table = SpfTable::new(2000).unwrap();
        for chi in character_table(15).unwrap() {
            let k = chi.order() as i64;
            let f = MultFnSpec::from_base(BaseRule::Character(chi));
            assert!(eventually_rational_test(&f, k, 0, &table, 2000).unwrap());
        }
        let inv = MultFnSpec::from_base(BaseRule::InversePrime);
        for k in 1..50 {
            assert!(!eventually_rational_test(&inv, k, 0, &table, 100).unwrap());
        }
        let arch = MultFnSpec::archimedean(1.3);
        for k in 1..20 {
            assert!(!eventually_rational_test(&arch, k, 0, &table, 3).unwrap());
        }
    }

    #[test]
    fn ekc_examples() {
        let table = SpfTable::new(2000).unwrap();
        let f = MultFnSpec::from_base(BaseRule::InversePrime).with_twist(0.4);
        assert!(ekc_structural_check(&f, &f, 3, 3, &table, 2000)
            .unwrap()
            .passes());

        let h1 = character_table(3).unwrap()[1].clone();
        let h2 = character_table(7)
            .unwrap()
            .into_iter()
            .find(|c| c.order() == 3)
            .unwrap();
        let t = 1.5;
        let f = MultFnSpec::from_base(BaseRule::Character(h1)).with_twist(t);
        let g = MultFnSpec::from_base(BaseRule::Character(h2)).with_twist(t);
        let r = ekc_structural_check(&f, &g, 2, 3, &table, 2000).unwrap();
        assert!(r.both_archimedean() && r.passes());
        assert!(!r.powers_equal());

        let f = MultFnSpec::one().with_exception(5, Angle::real(2f64.sqrt() - 1.0));
        let g = MultFnSpec::one().with_exception(5, Angle::real(3f64.sqrt() - 1.0));
        let r = ekc_structural_check(&f, &g, 1, 1, &table, 2000).unwrap();
        assert!(!r.passes());
        assert_eq!(r.powers_mismatch, Some(5));
    }

    fn rational_spec() -> impl Strategy<Value = MultFnSpec> {
        (
            1u64..30,
            0u64..30,
            prop::collection::btree_map(2u64..50, (0i64..12, 1u64..12), 0..4),
        )
            .prop_map(|(q, idx, ex)| {
                let chi = character_by_index(q, idx % euler_phi(q)).unwrap();
                let mut f = MultFnSpec::from_base(BaseRule::Product(vec![
                    BaseRule::Character(chi),
                    BaseRule::RandomSign { seed: idx },
                ]));
                for (p, (a, b)) in ex {
                    f = f.with_exception(p, Angle::rational(a, b));
                }
                f
            })
    }

    proptest! {
        #[test]
        fn complete_multiplicativity_exact(f in rational_spec(), m in 1u64..3000, n in 1u64..3000) {
            let table = SpfTable::new(3000).unwrap();
            prop_assert_eq!(
                f.eval(&table, m * n).unwrap(),
                f.eval(&table, m).unwrap() + f.eval(&table, n).unwrap()
            );
        }

        #[test]
        fn complete_multiplicativity_twisted(
            f in rational_spec(), t in -5.0f64..5.0, seed in 0u64..100,
            m in 1u64..3000, n in 1u64..3000,
        ) {
            let table = SpfTable::new(3000).unwrap();
            let f = f.product(&MultFnSpec::from_base(BaseRule::RandomPhase { seed })).with_twist(t);
            let lhs = f.eval(&table, m * n).unwrap();
            let rhs = f.eval(&table, m).unwrap() + f.eval(&table, n).unwrap();
            prop_assert!(lhs.approx_eq(rhs, 1e-12));
        }

        #[test]
        fn power_shrinks_support(f in rational_spec(), m in 1i64..6) {
            let table = SpfTable::new(500).unwrap();
            let base = support_set(&f, 1, &table, 500).unwrap();
            let pow = support_set(&f, m, &table, 500).unwrap();
            prop_assert!(pow.iter().all(|p| base.contains(p)));
            let via_power = support_set(&f.power(m), 1, &table, 500).unwrap();
            prop_assert_eq!(pow, via_power);
        }
    }
}
