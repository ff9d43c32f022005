//! Gaussian rationals: complex numbers `a + b*i` with arbitrary-precision
//! rational parts. The coefficient field for every exact computation here.
//!
//! Values are always canonical because `BigRational` keeps numerator and
//! denominator reduced with a positive denominator.

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Exact complex number with rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

/// Shorthand used throughout the crate.
pub type Gq = GaussianRational;

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// Exact rational `n/d`. Panics if `d == 0`.
    pub fn from_ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "GaussianRational::from_ratio: zero denominator");
        Self::new(
            BigRational::new(BigInt::from(n), BigInt::from(d)),
            BigRational::zero(),
        )
    }

    /// Exact Gaussian value `nr/dr + ni/di * i`.
    pub fn from_parts(nr: i64, dr: i64, ni: i64, di: i64) -> Self {
        assert!(dr != 0 && di != 0, "GaussianRational::from_parts: zero denominator");
        Self::new(
            BigRational::new(BigInt::from(nr), BigInt::from(dr)),
            BigRational::new(BigInt::from(ni), BigInt::from(di)),
        )
    }

    pub fn from_rational(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// True when both parts are integers.
    pub fn is_gaussian_integer(&self) -> bool {
        self.re.is_integer() && self.im.is_integer()
    }

    /// True when the value is a rational integer (no imaginary part).
    pub fn is_integer(&self) -> bool {
        self.im.is_zero() && self.re.is_integer()
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.re.to_integer().to_i64()
        } else {
            None
        }
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `re^2 + im^2`, an exact nonnegative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "GaussianRational::inv: division by zero");
        let n = self.norm_sqr();
        Self::new(&self.re / &n, -&self.im / &n)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact square root in Q(i), when one exists.
    ///
    /// Solves `(c + d*i)^2 = self` over the rationals: requires both
    /// `norm_sqr` and `(re + sqrt(norm))/2` to be rational squares.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.im.is_zero() {
            if self.re.is_positive() {
                if let Some(c) = rational_sqrt(&self.re) {
                    return Some(Self::new(c, BigRational::zero()));
                }
                return None;
            }
            // Negative real: root is purely imaginary.
            if let Some(d) = rational_sqrt(&(-self.re.clone())) {
                return Some(Self::new(BigRational::zero(), d));
            }
            return None;
        }
        let r = rational_sqrt(&self.norm_sqr())?;
        let two = BigRational::from_integer(BigInt::from(2));
        let c2 = (&self.re + &r) / &two;
        let c = rational_sqrt(&c2)?;
        if c.is_zero() {
            return None;
        }
        let d = &self.im / (&c * &two);
        Some(Self::new(c, d))
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Deterministic total order by (re, im); used only for canonical sorting.
    pub fn cmp_re_im(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

/// Exact square root of a nonnegative rational, when it is a perfect square.
pub fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    if x.is_zero() {
        return Some(BigRational::zero());
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

// ---- Arithmetic ----

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self * &rhs.inv()
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: Self) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -(&self)
    }
}

// ---- Printing & parsing ----

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    /// Canonical form `a/b+c/d*i`, omitting zero parts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        if self.re.is_zero() {
            return write!(f, "{}*i", fmt_rational(&self.im));
        }
        if self.im.is_negative() {
            write!(
                f,
                "{}-{}*i",
                fmt_rational(&self.re),
                fmt_rational(&-self.im.clone())
            )
        } else {
            write!(f, "{}+{}*i", fmt_rational(&self.re), fmt_rational(&self.im))
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Parse the canonical `a/b+c/d*i` form (also accepts `i`, `-i`, `3*i`, plain rationals).
pub fn parse_gaussian(text: &str) -> Option<GaussianRational> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return None;
    }
    // Split at the last top-level +/- that is not the leading sign.
    let bytes = t.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'/' && bytes[k - 1] != b'*' {
            split = Some(k);
            break;
        }
    }
    match split {
        Some(k) => {
            let (a, b) = (&t[..k], &t[k..]);
            let re = parse_real(a)?;
            let im = parse_imag(b)?;
            Some(GaussianRational::new(re, im))
        }
        None => {
            if t.contains('i') {
                Some(GaussianRational::new(BigRational::zero(), parse_imag(&t)?))
            } else {
                Some(GaussianRational::new(parse_real(&t)?, BigRational::zero()))
            }
        }
    }
}

fn parse_real(t: &str) -> Option<BigRational> {
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.sign() == Sign::NoSign {
        return None;
    }
    Some(BigRational::new(n, d))
}

fn parse_imag(t: &str) -> Option<BigRational> {
    let t = t.strip_suffix('i')?;
    let t = t.strip_suffix('*').unwrap_or(t);
    match t {
        "" | "+" => Some(BigRational::one()),
        "-" => Some(-BigRational::one()),
        _ => parse_real(t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(nr: i64, dr: i64, ni: i64, di: i64) -> Gq {
        Gq::from_parts(nr, dr, ni, di)
    }

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(&Gq::i() * &Gq::i(), Gq::from_int(-1));
    }

    #[test]
    fn field_inverse() {
        let x = g(3, 2, -5, 7);
        assert!((&x * &x.inv()).is_one());
    }

    #[test]
    fn sqrt_exact_cases() {
        assert_eq!(Gq::from_int(-4).sqrt_exact(), Some(g(0, 1, 2, 1)));
        assert_eq!(g(9, 4, 0, 1).sqrt_exact(), Some(g(3, 2, 0, 1)));
        // (1+i)^2 = 2i
        assert_eq!(g(0, 1, 2, 1).sqrt_exact(), Some(g(1, 1, 1, 1)));
        assert_eq!(Gq::from_int(2).sqrt_exact(), None);
    }

    #[test]
    fn display_roundtrip() {
        for v in [
            Gq::zero(),
            Gq::i(),
            g(-1, 2, 0, 1),
            g(3, 2, -5, 7),
            g(0, 1, -1, 1),
            Gq::from_int(42),
        ] {
            let s = v.to_string();
            assert_eq!(parse_gaussian(&s), Some(v), "roundtrip of {s}");
        }
    }
}
