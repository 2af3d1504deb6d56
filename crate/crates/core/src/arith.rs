//! Exact integer substrate: smallest-prime-factor sieve, factorization and
//! the smallest-prime-factor function `P⁻`.
//!
//! The table stores one `u32` per integer up to its limit. Integers beyond
//! the limit (such as `Bn + 1` for large `B`) are handled by trial division
//! with the sieved primes, so the factorization reach is `limit²`.

use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Largest sieve limit accepted by [`SpfTable::new`] (about 400 MB of table).
pub const MAX_SIEVE_LIMIT: u64 = 100_000_000;

/// Smallest prime factor of an integer, with `P⁻(1) = +∞`.
///
/// The derived ordering puts every finite prime below `Infinity`, so
/// `p_minus > PMinus::Prime(N)` reads like the `P⁻(n) > N` conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PMinus {
    Prime(u64),
    Infinity,
}

impl PMinus {
    /// `P⁻ > bound`.
    pub fn exceeds(self, bound: u64) -> bool {
        match self {
            PMinus::Prime(p) => p > bound,
            PMinus::Infinity => true,
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            PMinus::Prime(p) => Some(p),
            PMinus::Infinity => None,
        }
    }
}

impl fmt::Display for PMinus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PMinus::Prime(p) => write!(f, "{p}"),
            PMinus::Infinity => f.write_str("inf"),
        }
    }
}

/// Prime factorization as `(prime, exponent)` pairs with strictly
/// increasing primes. The factorization of 1 is empty.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pairs: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.pairs.iter().map(|&(p, _)| p)
    }

    /// The factored integer, `∏ p^e`.
    pub fn value(&self) -> u128 {
        self.pairs
            .iter()
            .map(|&(p, e)| (p as u128).pow(e))
            .product()
    }

    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    fn push(&mut self, p: u64) {
        match self.pairs.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => self.pairs.push((p, 1)),
        }
    }
}

/// Smallest-prime-factor table over `[1, limit]`, immutable after
/// construction.
#[derive(Clone)]
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl fmt::Debug for SpfTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpfTable")
            .field("limit", &self.limit)
            .field("primes", &self.primes.len())
            .finish()
    }
}

impl SpfTable {
    /// Linear sieve up to `x_max`; requires `2 ≤ x_max ≤ MAX_SIEVE_LIMIT`.
    pub fn new(x_max: u64) -> Result<Self> {
        if x_max < 2 {
            return Err(Error::invalid("x_max", "sieve limit must be at least 2"));
        }
        if x_max > MAX_SIEVE_LIMIT {
            return Err(Error::OutOfReach {
                name: "x_max",
                value: x_max,
                reach: MAX_SIEVE_LIMIT,
            });
        }
        let n = x_max as usize;
        let mut spf = alloc::vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m > n {
                    break;
                }
                spf[m] = p;
            }
        }
        Ok(Self {
            limit: x_max,
            spf,
            primes,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Largest integer this table can factor (by trial division past the
    /// sieve): `limit²`.
    pub fn reach(&self) -> u64 {
        self.limit.saturating_mul(self.limit)
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Sieved primes `≤ x` (all of them when `x` exceeds the limit).
    pub fn primes_up_to(&self, x: u64) -> &[u32] {
        let end = self.primes.partition_point(|&p| (p as u64) <= x);
        &self.primes[..end]
    }

    /// Sieved primes in `(lo, hi]`.
    pub fn primes_between(&self, lo: u64, hi: u64) -> &[u32] {
        let start = self.primes.partition_point(|&p| (p as u64) <= lo);
        let end = self.primes.partition_point(|&p| (p as u64) <= hi);
        &self.primes[start..end.max(start)]
    }

    /// `π(n)` by counting sieved primes; `n` must lie within the table.
    pub fn prime_count(&self, n: u64) -> Result<usize> {
        self.check_in_table("n", n)?;
        Ok(self.primes_up_to(n).len())
    }

    /// Smallest prime factor for `2 ≤ n ≤ limit`.
    #[inline]
    pub fn spf(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.limit {
            None
        } else {
            Some(self.spf[n as usize] as u64)
        }
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        Ok(n >= 2 && self.p_minus(n)? == PMinus::Prime(n))
    }

    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        self.check_reach("n", n)?;
        let mut out = Factorization::default();
        let mut m = n;
        if m > self.limit {
            for &p in &self.primes {
                let p = p as u64;
                if p * p > m || m <= self.limit {
                    break;
                }
                while m.is_multiple_of(p) {
                    out.push(p);
                    m /= p;
                }
            }
            if m > self.limit {
                // no prime ≤ √m divides m
                out.push(m);
                return Ok(out);
            }
        }
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            out.push(p);
            m /= p;
        }
        Ok(out)
    }

    /// `P⁻(n)`, with `P⁻(1) = +∞`.
    pub fn p_minus(&self, n: u64) -> Result<PMinus> {
        self.check_reach("n", n)?;
        if n == 1 {
            return Ok(PMinus::Infinity);
        }
        if let Some(p) = self.spf(n) {
            return Ok(PMinus::Prime(p));
        }
        for &p in &self.primes {
            let p = p as u64;
            if p * p > n {
                break;
            }
            if n.is_multiple_of(p) {
                return Ok(PMinus::Prime(p));
            }
        }
        Ok(PMinus::Prime(n))
    }

    /// `P⁻(n) > bound`. Beyond the table this only trial-divides by primes
    /// up to `min(bound, √n)`, which is all the sieved counts need.
    #[inline]
    pub fn is_rough(&self, n: u64, bound: u64) -> Result<bool> {
        if n == 1 {
            return Ok(true);
        }
        if n <= self.limit {
            return Ok(self.spf[n as usize] as u64 > bound);
        }
        for &p in &self.primes {
            let p = p as u64;
            if p > bound {
                return Ok(true);
            }
            if p * p > n {
                // n is prime
                return Ok(n > bound);
            }
            if n.is_multiple_of(p) {
                return Ok(false);
            }
        }
        Err(Error::OutOfReach {
            name: "n",
            value: n,
            reach: self.reach(),
        })
    }

    fn check_reach(&self, name: &'static str, n: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::invalid(name, "must be a positive integer"));
        }
        if n > self.reach() {
            return Err(Error::OutOfReach {
                name,
                value: n,
                reach: self.reach(),
            });
        }
        Ok(())
    }

    fn check_in_table(&self, name: &'static str, n: u64) -> Result<()> {
        if n > self.limit {
            return Err(Error::OutOfReach {
                name,
                value: n,
                reach: self.limit,
            });
        }
        Ok(())
    }
}

/// Factorization by plain trial division, for small integers that do not
/// warrant a sieve (moduli, radicals).
pub fn trial_factorize(n: u64) -> Factorization {
    let mut out = Factorization::default();
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        while m.is_multiple_of(p) {
            out.push(p);
            m /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m);
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    trial_factorize(n)
        .pairs()
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

pub fn radical(n: u64) -> u64 {
    trial_factorize(n).radical()
}

/// `(a, b^∞) = ∏_{p | b} p^{ν_p(a)}`, the part of `a` supported on the
/// primes of `b`.
pub fn smooth_part(a: u64, b: u64) -> u64 {
    let mut part = 1;
    let mut rest = a;
    for p in trial_factorize(b).primes() {
        while rest.is_multiple_of(p) {
            rest /= p;
            part *= p;
        }
    }
    part
}

/// `a / (a, b^∞)`: `a` with every prime power supported on `b` removed.
pub fn strip_part(a: u64, b: u64) -> u64 {
    a / smooth_part(a, b)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let egcd = (a as i128 % m as i128).extended_gcd(&(m as i128));
    if egcd.gcd != 1 {
        return None;
    }
    Some(egcd.x.rem_euclid(m as i128) as u64)
}

/// Product of the primes `≤ n`.
pub fn primorial(n: u64) -> u128 {
    (2..=n)
        .filter(|&p| trial_factorize(p).pairs() == [(p, 1)])
        .map(|p| p as u128)
        .product()
}
