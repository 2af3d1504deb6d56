//! Sieved counts `Φ_{N,B}(x;q,a)`, the main-term density `δ_{N,B,q}`, and
//! level sets of pairs of pseudocharacters.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;

use crate::arith::{euler_phi, mod_inverse, primorial, radical, trial_factorize, SpfTable};
use crate::error::{Error, Result};
use crate::multfunc::{MultFnSpec, Pseudocharacter};
use crate::sum::{ComplexSum, KahanSum};
use crate::torus::{archimedean_unchecked, circle_value, in_arc, Angle, Arc};

/// `N`, `B`, `q`, `a` of `Φ_{N,B}(x;q,a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveParams {
    pub n: u64,
    pub b: u64,
    pub q: u64,
    pub a: u64,
}

impl SieveParams {
    pub fn new(n: u64, b: u64, q: u64, a: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("N", "sieve threshold must be ≥ 2"));
        }
        if b < 1 {
            return Err(Error::invalid("B", "linear coefficient must be ≥ 1"));
        }
        if q < 1 {
            return Err(Error::invalid("q", "modulus must be ≥ 1"));
        }
        Ok(Self { n, b, q, a: a % q })
    }

    /// `q = 1`, `a = 0`.
    pub fn unrestricted(n: u64, b: u64) -> Result<Self> {
        Self::new(n, b, 1, 0)
    }

    /// Whether `gcd(a(Ba+1), q) = 1`, the coprimality the main term
    /// assumes.
    pub fn is_admissible(&self) -> bool {
        let a = self.a as u128;
        (a * (self.b as u128 * a + 1)).gcd(&(self.q as u128)) == 1
    }

    /// `P⁻(n(Bn+1)) > N` and `n ≡ a (mod q)`.
    #[inline]
    pub fn admits(&self, table: &SpfTable, n: u64) -> Result<bool> {
        Ok(n % self.q == self.a
            && table.is_rough(n, self.n)?
            && table.is_rough(self.b * n + 1, self.n)?)
    }

    fn check_reach(&self, table: &SpfTable, x: u64) -> Result<()> {
        let top = (self.b as u128) * (x as u128) + 1;
        if x > table.limit() || top > table.reach() as u128 {
            return Err(Error::OutOfReach {
                name: "x",
                value: x,
                reach: table.limit().min((table.reach() - 1) / self.b),
            });
        }
        Ok(())
    }

    /// Members of the residue class in `[1, x]`.
    fn class(&self, x: u64) -> impl Iterator<Item = u64> {
        let start = if self.a == 0 { self.q } else { self.a };
        (start..=x).step_by(self.q as usize)
    }
}

/// `Φ_{N,B}(x;q,a)`.
pub fn phi_count(params: &SieveParams, x: u64, table: &SpfTable) -> Result<u64> {
    params.check_reach(table, x)?;
    let mut count = 0;
    for n in params.class(x) {
        if params.admits(table, n)? {
            count += 1;
        }
    }
    Ok(count)
}

/// `δ_{N,B,q} = (1/q) ∏_{p | B/(B,q)} (1 − 1/p) ∏_{3 ≤ p ≤ N, p ∤ q} (1 − 2/p)`,
/// evaluated literally.
pub fn delta_density(params: &SieveParams) -> Ratio<u128> {
    let mut d = Ratio::new(1u128, params.q as u128);
    let b_part = params.b / params.b.gcd(&params.q);
    for p in trial_factorize(b_part).primes() {
        d *= Ratio::new(p as u128 - 1, p as u128);
    }
    for p in 3..=params.n {
        if trial_factorize(p).pairs() == [(p, 1)] && !params.q.is_multiple_of(p) {
            d *= Ratio::new(p as u128 - 2, p as u128);
        }
    }
    d
}

pub fn ratio_to_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `(Φ − δ·x) / 4^{π(N)}`.
pub fn triv_residual(params: &SieveParams, x: u64, table: &SpfTable) -> Result<f64> {
    let phi = phi_count(params, x, table)?;
    let delta = ratio_to_f64(&delta_density(params));
    let pi_n = table.prime_count(params.n)?;
    Ok((phi as f64 - delta * x as f64) / libm::pow(4.0, pi_n as f64))
}

/// `𝒜_{N,B}(h₁,h₂;α,β)` within the residue class of `params`, optionally
/// cut down by `n^{iu} ∈ I` and `n^{iv} ∈ J`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetQuery {
    pub params: SieveParams,
    pub h1: MultFnSpec,
    pub h2: MultFnSpec,
    pub alpha: Angle,
    pub beta: Angle,
    pub arc_i: Option<(Arc, f64)>,
    pub arc_j: Option<(Arc, f64)>,
}

impl LevelSetQuery {
    pub fn new(
        params: SieveParams,
        h1: MultFnSpec,
        h2: MultFnSpec,
        alpha: Angle,
        beta: Angle,
    ) -> Self {
        Self {
            params,
            h1,
            h2,
            alpha,
            beta,
            arc_i: None,
            arc_j: None,
        }
    }

    /// Both level conditions vacuous: `h₁ = h₂ ≡ 1`, `α = β = 0`.
    pub fn vacuous(params: SieveParams) -> Self {
        Self::new(
            params,
            MultFnSpec::one(),
            MultFnSpec::one(),
            Angle::ZERO,
            Angle::ZERO,
        )
    }

    pub fn with_arc_i(mut self, arc: Arc, u: f64) -> Self {
        self.arc_i = Some((arc, u));
        self
    }

    pub fn with_arc_j(mut self, arc: Arc, v: f64) -> Self {
        self.arc_j = Some((arc, v));
        self
    }

    fn validate(&self) -> Result<()> {
        if !self.h1.is_rational_valued() {
            return Err(Error::invalid(
                "h1",
                "level sets need a rational-valued function",
            ));
        }
        if !self.h2.is_rational_valued() {
            return Err(Error::invalid(
                "h2",
                "level sets need a rational-valued function",
            ));
        }
        if !self.alpha.is_rational() {
            return Err(Error::invalid("alpha", "level must be a root of unity"));
        }
        if !self.beta.is_rational() {
            return Err(Error::invalid("beta", "level must be a root of unity"));
        }
        Ok(())
    }

    fn contains(&self, table: &SpfTable, n: u64) -> Result<bool> {
        if !self.params.admits(table, n)? {
            return Ok(false);
        }
        let arc_ok = |arc: &Option<(Arc, f64)>| match arc {
            Some((arc, u)) => in_arc(archimedean_unchecked(n, *u), arc),
            None => true,
        };
        Ok(arc_ok(&self.arc_i)
            && arc_ok(&self.arc_j)
            && self.h1.eval(table, n)? == self.alpha
            && self.h2.eval(table, self.params.b * n + 1)? == self.beta)
    }
}

/// Members of the level set in `[1, x]`, ascending.
pub fn levelset_members(query: &LevelSetQuery, x: u64, table: &SpfTable) -> Result<Vec<u64>> {
    query.validate()?;
    query.params.check_reach(table, x)?;
    let mut out = Vec::new();
    for n in query.params.class(x) {
        if query.contains(table, n)? {
            out.push(n);
        }
    }
    Ok(out)
}

fn log_norm(x: u64) -> Result<f64> {
    if x < 2 {
        return Err(Error::invalid("x", "logarithmic averages need x ≥ 2"));
    }
    Ok(libm::log(x as f64))
}

/// `𝔼^{log}_{n≤x} 1_𝒜(n)`.
pub fn levelset_logmass(query: &LevelSetQuery, x: u64, table: &SpfTable) -> Result<f64> {
    let norm = log_norm(x)?;
    let members = levelset_members(query, x, table)?;
    Ok(members
        .iter()
        .map(|&n| 1.0 / n as f64)
        .collect::<KahanSum>()
        .value()
        / norm)
}

/// `Σ_{n≤x} 1_𝒜(n) / n^{1+iu}`.
pub fn twisted_levelset_sum(
    query: &LevelSetQuery,
    u: f64,
    x: u64,
    table: &SpfTable,
) -> Result<Complex64> {
    let mut acc = ComplexSum::new();
    for n in levelset_members(query, x, table)? {
        acc.add(circle_value(-archimedean_unchecked(n, u)) / n as f64);
    }
    Ok(acc.value())
}

/// Congruence data for the restricted logarithmic sums: `n ≤ x` with
/// `M | n`, `n ≡ −M̄ (mod M′)`, `gcd(n(n+1), M″) = 1`, `h₁(n) = h₂(n+1) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtConfig {
    pub m: u64,
    pub m_prime: u64,
    pub m_double: u64,
    /// The `N` with `P_N = rad(M/2q₁q₂)·rad(M′)·rad(M″)`.
    pub n: u64,
    pub h1: Pseudocharacter,
    pub h2: Pseudocharacter,
}

impl ExtConfig {
    /// Checks every hypothesis and names the first one that fails.
    pub fn validate(&self) -> Result<()> {
        let q1 = self.h1.chi().modulus();
        let q2 = self.h2.chi().modulus();
        let base = 2 * q1 * q2;
        if self.n <= base {
            return Err(Error::precondition(
                "N > 2q1q2",
                format!("N = {}, 2q1q2 = {base}", self.n),
            ));
        }
        if self.m == 0 || !self.m.is_multiple_of(base) {
            return Err(Error::precondition(
                "2q1q2 | M",
                format!("M = {}, 2q1q2 = {base}", self.m),
            ));
        }
        if self.m_prime == 0 || self.m_double == 0 {
            return Err(Error::precondition(
                "M', M'' ≥ 1",
                "moduli must be positive",
            ));
        }
        if self.m_double.is_multiple_of(2) {
            return Err(Error::precondition(
                "M'' odd",
                format!("M'' = {}", self.m_double),
            ));
        }
        let (m, m1, m2) = (
            radical(self.m / base),
            radical(self.m_prime),
            radical(self.m_double),
        );
        if m.gcd(&m1) != 1 || m.gcd(&m2) != 1 || m1.gcd(&m2) != 1 {
            return Err(Error::precondition(
                "m, m', m'' coprime",
                format!("radicals {m}, {m1}, {m2}"),
            ));
        }
        if m1.gcd(&base) != 1 {
            return Err(Error::precondition(
                "(m', 2q1q2) = 1",
                format!("m' = {m1}, 2q1q2 = {base}"),
            ));
        }
        let product = m as u128 * m1 as u128 * m2 as u128;
        let p_n = primorial(self.n);
        if product != p_n {
            return Err(Error::precondition(
                "P_N = m m' m''",
                format!("m m' m'' = {product}, P_N = {p_n}"),
            ));
        }
        Ok(())
    }

    fn k_l_r_s(&self) -> f64 {
        (self.h1.k() * self.h1.chi().order() * self.h2.k() * self.h2.chi().order()) as f64
    }

    fn sieve_product(&self) -> f64 {
        trial_factorize(self.m_double)
            .primes()
            .map(|p| 1.0 - 2.0 / p as f64)
            .product()
    }

    /// The limit stated with the restricted sum:
    /// `1/(M φ(M′) klrs) ∏_{p|M″} (1 − 2/p)`.
    pub fn lemma_density(&self) -> f64 {
        self.sieve_product() / (self.m as f64 * euler_phi(self.m_prime) as f64 * self.k_l_r_s())
    }

    /// The density the restricted sum converges to when all level
    /// conditions are equidistributed: a single class mod `M′` has relative
    /// density `1/M′`, not `1/φ(M′)`.
    pub fn progression_density(&self) -> f64 {
        self.sieve_product() / (self.m as f64 * self.m_prime as f64 * self.k_l_r_s())
    }
}

/// `(1/log x) Σ 1/n` over the `n ≤ x` selected by `cfg`.
pub fn ext_congruence_logmass(cfg: &ExtConfig, x: u64, table: &SpfTable) -> Result<f64> {
    cfg.validate()?;
    let norm = log_norm(x)?;
    if x + 1 > table.reach() {
        return Err(Error::OutOfReach {
            name: "x",
            value: x,
            reach: table.reach() - 1,
        });
    }
    let residue = if cfg.m_prime == 1 {
        0
    } else {
        let inv = mod_inverse(cfg.m % cfg.m_prime, cfg.m_prime).ok_or_else(|| {
            Error::precondition(
                "gcd(M, M') = 1",
                format!("M = {}, M' = {}", cfg.m, cfg.m_prime),
            )
        })?;
        (cfg.m_prime - inv) % cfg.m_prime
    };
    let h1 = MultFnSpec::from_base(crate::BaseRule::Pseudocharacter(cfg.h1.clone()));
    let h2 = MultFnSpec::from_base(crate::BaseRule::Pseudocharacter(cfg.h2.clone()));
    let mut acc = KahanSum::new();
    for n in (cfg.m..=x).step_by(cfg.m as usize) {
        if n % cfg.m_prime != residue
            || n.gcd(&cfg.m_double) != 1
            || (n + 1).gcd(&cfg.m_double) != 1
            || !h1.eval(table, n)?.is_zero()
            || !h2.eval(table, n + 1)?.is_zero()
        {
            continue;
        }
        acc.add(1.0 / n as f64);
    }
    Ok(acc.value() / norm)
}
