//! Numerical laboratory for completely multiplicative functions `f: ℕ → 𝕋`.
//!
//! Values on the unit circle are carried as [`Angle`]s in ℝ/ℤ: exact
//! reduced fractions for roots of unity, floats for everything else. On top
//! of that substrate the crate builds
//!
//! * [`arith`]: smallest-prime-factor sieve, factorization, `P⁻(n)`;
//! * [`torus`]: angle arithmetic, arcs and distances on 𝕋 and 𝕋²;
//! * [`multfunc`]: Dirichlet characters, pseudocharacters, Archimedean
//!   twists and the completely multiplicative functions built from them;
//! * [`sievecount`]: sieved counts `Φ_{N,B}(x;q,a)`, the main-term density
//!   and level sets of pairs of pseudocharacters;
//! * [`analysis`]: logarithmic averages, pretentious distance, binary
//!   correlations and the concentration diagnostic;
//! * [`beurling`]: extremal trigonometric majorants of the sawtooth and of
//!   interval indicators;
//! * [`discrepancy`]: weighted star/full discrepancy, the Erdős–Turán style
//!   bound and grid coverage;
//! * [`scenarios`]: counterexample families, rational-ratio families,
//!   Kronecker searches and orbit scans.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod arith;
pub mod beurling;
pub mod discrepancy;
mod error;
pub mod multfunc;
pub mod scenarios;
pub mod sievecount;
pub mod sum;
pub mod torus;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use arith::{Factorization, PMinus, SpfTable};
pub use multfunc::{BaseRule, DirichletCharacter, MultFnSpec, Pseudocharacter};
pub use torus::{Angle, Arc, TorusPoint2};
