//! Angles in ℝ/ℤ, arcs, and points of 𝕋².
//!
//! An [`Angle`] is either an exact reduced fraction `a/b` with `0 ≤ a < b`
//! or a float in `[0, 1)`. Sums of exact angles stay exact, so level-set
//! conditions such as `h(n) = α` are decided without tolerance. A rational
//! and a real angle never compare equal; use [`Angle::approx_eq`] for
//! closeness.

use core::f64::consts::PI;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};

const TAU: f64 = 2.0 * PI;

#[derive(Clone, Copy)]
pub enum Angle {
    Rational { num: u64, den: u64 },
    Real(f64),
}

impl Angle {
    pub const ZERO: Angle = Angle::Rational { num: 0, den: 1 };

    /// `num/den mod 1`, reduced. Panics if `den == 0`.
    pub fn rational(num: i64, den: u64) -> Angle {
        Self::from_i128(num as i128, den as u128)
    }

    fn from_i128(num: i128, den: u128) -> Angle {
        assert!(den != 0, "angle with zero denominator");
        let d = den as i128;
        let r = num.rem_euclid(d) as u128;
        let g = r.gcd(&den);
        let (n, d) = (r / g, den / g);
        match (u64::try_from(n), u64::try_from(d)) {
            (Ok(num), Ok(den)) => Angle::Rational { num, den },
            // denominators past u64 only arise from pathological products
            _ => Angle::real(n as f64 / d as f64),
        }
    }

    /// A real angle, reduced into `[0, 1)`.
    pub fn real(x: f64) -> Angle {
        let mut r = x - libm::floor(x);
        if r >= 1.0 {
            r = 0.0;
        }
        Angle::Real(r)
    }

    pub fn is_rational(self) -> bool {
        matches!(self, Angle::Rational { .. })
    }

    pub fn denominator(self) -> Option<u64> {
        match self {
            Angle::Rational { den, .. } => Some(den),
            Angle::Real(_) => None,
        }
    }

    /// Exact test for the identity `e(θ) = 1`.
    pub fn is_zero(self) -> bool {
        match self {
            Angle::Rational { num, .. } => num == 0,
            Angle::Real(x) => x == 0.0,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Angle::Rational { num, den } => num as f64 / den as f64,
            Angle::Real(x) => x,
        }
    }

    /// `k·θ mod 1`; exact for rational angles.
    pub fn scale(self, k: i64) -> Angle {
        match self {
            Angle::Rational { num, den } => {
                let n = (num as i128 * k as i128).rem_euclid(den as i128);
                Self::from_i128(n, den as u128)
            }
            Angle::Real(x) => Angle::real(x * k as f64),
        }
    }

    /// `‖θ − φ‖`, the circular distance, in `[0, 1/2]`.
    pub fn circular_distance(self, other: Angle) -> f64 {
        match (self, other) {
            (Angle::Rational { .. }, Angle::Rational { .. }) => match self - other {
                Angle::Rational { num, den } => num.min(den - num) as f64 / den as f64,
                d => d.to_f64().min(1.0 - d.to_f64()),
            },
            _ => {
                let d = libm::fabs(self.to_f64() - other.to_f64());
                d.min(1.0 - d)
            }
        }
    }

    /// Exact equality when both are rational, `‖θ − φ‖ ≤ tol` otherwise.
    pub fn approx_eq(self, other: Angle, tol: f64) -> bool {
        match (self, other) {
            (Angle::Rational { .. }, Angle::Rational { .. }) => self == other,
            _ => self.circular_distance(other) <= tol,
        }
    }

    /// `e(θ) = exp(2πiθ)`.
    pub fn circle_value(self) -> Complex64 {
        circle_value(self)
    }
}

impl Default for Angle {
    fn default() -> Self {
        Angle::ZERO
    }
}

impl PartialEq for Angle {
    fn eq(&self, other: &Self) -> bool {
        match (*self, *other) {
            (Angle::Rational { num: a, den: b }, Angle::Rational { num: c, den: d }) => {
                a == c && b == d
            }
            (Angle::Real(x), Angle::Real(y)) => x == y,
            _ => false,
        }
    }
}

impl Add for Angle {
    type Output = Angle;

    fn add(self, rhs: Angle) -> Angle {
        match (self, rhs) {
            (Angle::Rational { num: a, den: b }, Angle::Rational { num: c, den: d }) => {
                if b == d {
                    return Self::from_i128(a as i128 + c as i128, b as u128);
                }
                let g = b.gcd(&d) as u128;
                let den = (b as u128 / g) * d as u128;
                let num = a as u128 * (d as u128 / g) + c as u128 * (b as u128 / g);
                Self::from_i128((num % den) as i128, den)
            }
            _ => Angle::real(self.to_f64() + rhs.to_f64()),
        }
    }
}

impl Neg for Angle {
    type Output = Angle;

    fn neg(self) -> Angle {
        match self {
            Angle::Rational { num, den } => Self::from_i128(-(num as i128), den as u128),
            Angle::Real(x) => Angle::real(-x),
        }
    }
}

impl Sub for Angle {
    type Output = Angle;

    fn sub(self, rhs: Angle) -> Angle {
        self + (-rhs)
    }
}

impl core::iter::Sum for Angle {
    fn sum<I: Iterator<Item = Angle>>(iter: I) -> Angle {
        iter.fold(Angle::ZERO, Add::add)
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Rational { num, den } => write!(f, "{num}/{den}"),
            Angle::Real(x) => write!(f, "{x:?}"),
        }
    }
}

/// `e(θ)`.
pub fn circle_value(angle: Angle) -> Complex64 {
    match angle {
        Angle::Rational { num: 0, .. } => Complex64::new(1.0, 0.0),
        Angle::Rational { num, den } if 2 * num == den => Complex64::new(-1.0, 0.0),
        Angle::Rational { num, den } if 4 * num == den => Complex64::new(0.0, 1.0),
        Angle::Rational { num, den } if 4 * num == 3 * den => Complex64::new(0.0, -1.0),
        _ => {
            let (s, c) = libm::sincos(TAU * angle.to_f64());
            Complex64::new(c, s)
        }
    }
}

/// `e(x) = exp(2πix)` for a raw real `x`.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let (s, c) = libm::sincos(TAU * x);
    Complex64::new(c, s)
}

/// `|e(θ) − e(φ)| = 2 sin(π‖θ − φ‖)`.
pub fn chord(a: Angle, b: Angle) -> f64 {
    2.0 * libm::sin(PI * a.circular_distance(b))
}

/// Closed arc `{θ : ‖θ − center‖ ≤ half_length}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    center: Angle,
    half_length: f64,
}

impl Arc {
    pub fn new(center: Angle, half_length: f64) -> Result<Arc> {
        if !(half_length > 0.0 && half_length <= 0.5) {
            return Err(Error::invalid(
                "half_length",
                alloc::format!("{half_length} is outside (0, 1/2]"),
            ));
        }
        Ok(Arc {
            center,
            half_length,
        })
    }

    /// The image of `[a, b]` under `t ↦ e(t)`, for `a < b ≤ a + 1`.
    pub fn from_interval(a: f64, b: f64) -> Result<Arc> {
        if !(b > a && b - a <= 1.0) {
            return Err(Error::invalid("interval", "need a < b ≤ a + 1"));
        }
        Arc::new(Angle::real((a + b) / 2.0), (b - a) / 2.0)
    }

    pub fn center(&self) -> Angle {
        self.center
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn length(&self) -> f64 {
        2.0 * self.half_length
    }

    pub fn contains(&self, x: Angle) -> bool {
        in_arc(x, self)
    }
}

pub fn in_arc(x: Angle, arc: &Arc) -> bool {
    x.circular_distance(arc.center) <= arc.half_length
}

/// The angle of `n^{it}`: `t·log n / 2π mod 1`.
pub fn archimedean_angle(n: u64, t: f64) -> Result<Angle> {
    if n < 1 {
        return Err(Error::invalid("n", "Archimedean character needs n ≥ 1"));
    }
    Ok(archimedean_unchecked(n, t))
}

#[inline]
pub(crate) fn archimedean_unchecked(n: u64, t: f64) -> Angle {
    if t == 0.0 || n == 1 {
        Angle::ZERO
    } else {
        Angle::real(t * libm::log(n as f64) / TAU)
    }
}

/// Raw `t·log n / 2π mod 1` as a float; hot-loop form of
/// [`archimedean_angle`].
#[inline]
pub fn archimedean_f64(n: u64, t: f64) -> f64 {
    if t == 0.0 || n == 1 {
        0.0
    } else {
        let x = t * libm::log(n as f64) / TAU;
        let r = x - libm::floor(x);
        if r >= 1.0 {
            0.0
        } else {
            r
        }
    }
}

/// A point of 𝕋².
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TorusPoint2 {
    pub first: Angle,
    pub second: Angle,
}

impl TorusPoint2 {
    pub fn new(first: Angle, second: Angle) -> Self {
        Self { first, second }
    }
}

/// `|e(p₁) − e(q₁)| + |e(p₂) − e(q₂)|`.
pub fn ell1_distance(p: TorusPoint2, q: TorusPoint2) -> f64 {
    chord(p.first, q.first) + chord(p.second, q.second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rational_reduction() {
        assert_eq!(Angle::rational(2, 4), Angle::rational(1, 2));
        assert_eq!(Angle::rational(-1, 3), Angle::rational(2, 3));
        assert_eq!(Angle::rational(7, 7), Angle::ZERO);
        assert_eq!(Angle::rational(1, 3).scale(3), Angle::ZERO);
        assert_eq!(Angle::rational(1, 3).scale(8), Angle::rational(2, 3));
        assert_eq!(Angle::rational(1, 3).scale(-1), Angle::rational(2, 3));
    }

    #[test]
    fn mixed_equality_is_false() {
        assert_ne!(Angle::rational(1, 2), Angle::Real(0.5));
        assert!(Angle::rational(1, 2).approx_eq(Angle::Real(0.5), 1e-15));
        assert!(!(Angle::rational(1, 2) + Angle::Real(0.0)).is_rational());
    }

    #[test]
    fn real_reduction() {
        assert_eq!(Angle::real(1.25), Angle::Real(0.25));
        assert_eq!(Angle::real(-0.25), Angle::Real(0.75));
        assert_eq!(Angle::real(-1e-18), Angle::Real(0.0));
    }

    #[test]
    fn circle_values() {
        let one = circle_value(Angle::ZERO);
        assert_eq!(one, Complex64::new(1.0, 0.0));
        assert_eq!(
            circle_value(Angle::rational(1, 2)),
            Complex64::new(-1.0, 0.0)
        );
        let w = circle_value(Angle::rational(1, 3));
        assert!((w.re + 0.5).abs() < 1e-12);
        assert!((w.im - 3f64.sqrt() / 2.0).abs() < 1e-12);
        for k in 0..50 {
            let z = circle_value(Angle::real(k as f64 * 0.137));
            assert!((z.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ell1_examples() {
        let o = TorusPoint2::default();
        assert_eq!(ell1_distance(o, o), 0.0);
        let anti = TorusPoint2::new(Angle::rational(1, 2), Angle::rational(1, 2));
        assert!((ell1_distance(o, anti) - 4.0).abs() < 1e-15);
        let quarter = TorusPoint2::new(Angle::rational(1, 4), Angle::ZERO);
        assert!((ell1_distance(o, quarter) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn arc_membership() {
        let arc = Arc::new(Angle::Real(0.25), 0.04).unwrap();
        assert!(in_arc(Angle::Real(0.25), &arc));
        assert!(!in_arc(Angle::Real(0.30), &arc));
        let full = Arc::new(Angle::Real(0.9), 0.5).unwrap();
        assert!(in_arc(Angle::Real(0.4), &full));
        let wrap = Arc::new(Angle::ZERO, 0.1).unwrap();
        assert!(in_arc(Angle::Real(0.95), &wrap));
        assert!(in_arc(Angle::rational(1, 10), &wrap));
        assert!(Arc::new(Angle::ZERO, 0.0).is_err());
        assert!(Arc::new(Angle::ZERO, 0.6).is_err());
    }

    #[test]
    fn archimedean_examples() {
        assert_eq!(archimedean_angle(12, 0.0).unwrap(), Angle::ZERO);
        assert_eq!(archimedean_angle(1, 3.5).unwrap(), Angle::ZERO);
        // log(10)/(2π) = 0.3664677994...
        let a = archimedean_angle(10, 1.0).unwrap().to_f64();
        assert!((a - 0.366_467_799_439_713_9).abs() < 1e-9, "{a}");
        assert!(archimedean_angle(0, 1.0).is_err());
    }

    #[test]
    fn exact_addition_small_denominators() {
        for b in 1..=24u64 {
            for d in 1..=24u64 {
                for a in 0..b {
                    for c in 0..d {
                        let s = Angle::rational(a as i64, b) + Angle::rational(c as i64, d);
                        let Angle::Rational { num, den } = s else {
                            panic!("rational sum became real");
                        };
                        assert!(num < den);
                        assert_eq!(num.gcd(&den), 1);
                        // cross-multiplied check of a/b + c/d ≡ num/den mod 1
                        let lhs = (a * d + c * b) as i128 * den as i128;
                        let rhs = num as i128 * (b * d) as i128;
                        assert_eq!((lhs - rhs).rem_euclid((b * d * den) as i128), 0);
                    }
                }
            }
        }
    }

    fn rational_angle() -> impl Strategy<Value = Angle> {
        (1u64..200, any::<i64>()).prop_map(|(d, n)| Angle::rational(n % 1000, d))
    }

    proptest! {
        #[test]
        fn addition_is_associative_and_commutative(
            a in rational_angle(), b in rational_angle(), c in rational_angle()
        ) {
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!(a - a, Angle::ZERO);
        }

        #[test]
        fn scaling_by_denominator_vanishes(a in rational_angle(), k in -50i64..50) {
            let d = a.denominator().unwrap() as i64;
            prop_assert!(a.scale(d).is_zero());
            let direct = match a {
                Angle::Rational { num, den } => Angle::rational(
                    ((num as i128 * k as i128).rem_euclid(den as i128)) as i64, den),
                _ => unreachable!(),
            };
            prop_assert_eq!(a.scale(k), direct);
        }

        #[test]
        fn ell1_triangle_inequality(
            v in proptest::collection::vec(0.0f64..1.0, 6)
        ) {
            let p = TorusPoint2::new(Angle::real(v[0]), Angle::real(v[1]));
            let q = TorusPoint2::new(Angle::real(v[2]), Angle::real(v[3]));
            let r = TorusPoint2::new(Angle::real(v[4]), Angle::real(v[5]));
            prop_assert!(ell1_distance(p, r) <= ell1_distance(p, q) + ell1_distance(q, r) + 1e-12);
            prop_assert!((ell1_distance(p, q) - ell1_distance(q, p)).abs() < 1e-15);
        }

        #[test]
        fn arc_invariant_under_integer_shift(x in -3.0f64..3.0, c in 0.0f64..1.0, h in 0.001f64..0.5) {
            let arc = Arc::new(Angle::real(c), h).unwrap();
            prop_assert_eq!(in_arc(Angle::real(x), &arc), in_arc(Angle::real(x + 1.0), &arc));
        }
    }
}
