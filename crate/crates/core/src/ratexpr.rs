//! Normalized quotients of multivariate polynomials, with exact
//! differentiation and substitution.
//!
//! Invariants after construction: numerator and denominator are coprime,
//! the denominator is nonzero with lex-leading coefficient 1, and zero is
//! represented as 0/1. Equality is structural equality.

use crate::error::AlgebraError;
use crate::gauss::Gq;
use crate::poly::MultiPoly;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Normalized rational expression num/den over Q(i).
#[derive(Clone, PartialEq, Eq)]
pub struct RatExpr {
    num: MultiPoly,
    den: MultiPoly,
}

impl RatExpr {
    // ---- Constructors ----

    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            return Self { num: MultiPoly::zero(), den: MultiPoly::one() };
        }
        let g = MultiPoly::gcd(&num, &den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides numerator"),
                den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coeff().expect("nonzero denominator").clone();
        if !lc.is_one() {
            let inv = lc.inv();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Self { num, den }
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        Self { num: p, den: MultiPoly::one() }
    }

    pub fn zero() -> Self {
        Self::from_poly(MultiPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(MultiPoly::one())
    }

    pub fn constant(c: Gq) -> Self {
        Self::from_poly(MultiPoly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        Self::from_poly(MultiPoly::int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::from_poly(MultiPoly::ratio(n, d))
    }

    pub fn i() -> Self {
        Self::from_poly(MultiPoly::i())
    }

    pub fn var(name: &str) -> Self {
        Self::from_poly(MultiPoly::var(name))
    }

    // ---- Queries ----

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<Gq> {
        if self.is_constant() {
            let n = self.num.constant_value()?;
            let d = self.den.constant_value()?;
            Some(&n / &d)
        } else {
            None
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        self.num.contains_var(name) || self.den.contains_var(name)
    }

    /// All variables appearing in numerator or denominator.
    pub fn variables(&self) -> Vec<String> {
        let mut vs: Vec<String> = self.num.vars().to_vec();
        for v in self.den.vars() {
            if !vs.contains(v) {
                vs.push(v.clone());
            }
        }
        vs.sort();
        vs
    }

    // ---- Arithmetic ----

    pub fn add_ref(&self, rhs: &Self) -> Self {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        Self::normalized(num, &self.den * &rhs.den)
    }

    pub fn sub_ref(&self, rhs: &Self) -> Self {
        self.add_ref(&rhs.neg_ref())
    }

    pub fn neg_ref(&self) -> Self {
        Self { num: self.num.neg_ref(), den: self.den.clone() }
    }

    pub fn mul_ref(&self, rhs: &Self) -> Self {
        Self::normalized(&self.num * &rhs.num, &self.den * &rhs.den)
    }

    pub fn div_ref(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        if rhs.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::normalized(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        Self::one().div_ref(self)
    }

    pub fn scale(&self, c: &Gq) -> Self {
        Self::normalized(self.num.scale(c), self.den.clone())
    }

    pub fn pow(&self, e: i32) -> Result<Self, AlgebraError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul_ref(&base);
        }
        Ok(acc)
    }

    pub fn conj(&self) -> Self {
        Self::normalized(self.num.conj(), self.den.conj())
    }

    // ---- Calculus ----

    /// Partial derivative by the quotient rule, exact.
    pub fn derivative(&self, name: &str) -> Self {
        let dn = self.num.derivative(name);
        let dd = self.den.derivative(name);
        if dd.is_zero() {
            return Self::normalized(dn, self.den.clone());
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        Self::normalized(num, &self.den * &self.den)
    }

    /// Explicit time derivative: each exponential symbol `E` with rate `r`
    /// contributes `r * E * df/dE`; all other symbols are held fixed.
    pub fn time_derivative(&self, rates: &BTreeMap<String, Gq>) -> Self {
        let mut acc = Self::zero();
        for (name, rate) in rates {
            if !self.contains_var(name) {
                continue;
            }
            let term = self
                .derivative(name)
                .mul_ref(&Self::var(name))
                .scale(rate);
            acc = acc.add_ref(&term);
        }
        acc
    }

    // ---- Substitution & evaluation ----

    /// Substitute rational expressions for variables, exactly.
    ///
    /// Errors with `DivisionByZeroIdentically` when the composed
    /// denominator vanishes as a polynomial.
    pub fn substitute(&self, binds: &BTreeMap<String, RatExpr>) -> Result<Self, AlgebraError> {
        let num = poly_substitute(&self.num, binds)?;
        let den = poly_substitute(&self.den, binds)?;
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZeroIdentically);
        }
        num.div_ref(&den)
    }

    /// Exact evaluation at a point; unbound variables are an error.
    pub fn eval(&self, binds: &BTreeMap<String, Gq>) -> Result<Gq, AlgebraError> {
        let d = self.den.eval(binds)?;
        if d.is_zero() {
            return Err(AlgebraError::DenominatorVanishesAtPoint);
        }
        let n = self.num.eval(binds)?;
        Ok(&n / &d)
    }

    /// Exact partial evaluation, keeping unbound variables symbolic.
    pub fn eval_partial(&self, binds: &BTreeMap<String, Gq>) -> Result<Self, AlgebraError> {
        let den = self.den.eval_partial(binds);
        if den.is_zero() {
            return Err(AlgebraError::DenominatorVanishesAtPoint);
        }
        Ok(Self::normalized(self.num.eval_partial(binds), den))
    }

    /// Floating-point evaluation.
    pub fn eval_complex(&self, binds: &BTreeMap<String, Complex64>) -> Result<Complex64, AlgebraError> {
        let d = self.den.eval_complex(binds)?;
        if d.norm_sqr() == 0.0 {
            return Err(AlgebraError::DenominatorVanishesAtPoint);
        }
        Ok(self.num.eval_complex(binds)? / d)
    }

    // ---- Laurent structure in a boundary variable ----

    /// Minimal `k >= 0` with `boundary^k * self` polynomial, or an error if
    /// the denominator has a factor coprime to the boundary or `k` exceeds
    /// the cap.
    pub fn pole_order(&self, boundary: &MultiPoly, cap: u32) -> Result<u32, AlgebraError> {
        if self.den.is_one() {
            return Ok(0);
        }
        let mut pow = MultiPoly::one();
        for k in 0..=cap {
            if self.den.divides(&pow) {
                return Ok(k);
            }
            pow = pow.mul_ref(boundary);
        }
        Err(AlgebraError::PoleOrderExceeded(cap))
    }

    /// Split into exact Laurent coefficients in `var`: pairs `(k, p_k)` with
    /// `self = sum p_k * var^k`, each `p_k` free of `var`.
    ///
    /// Requires the denominator to be a monomial in `var` (times a constant).
    pub fn laurent_in(&self, var: &str) -> Result<Vec<(i64, MultiPoly)>, AlgebraError> {
        if self.is_zero() {
            return Ok(Vec::new());
        }
        let den_uni = self.den.to_univariate(var);
        let dk = den_uni.len() as i64 - 1;
        // All lower coefficients must vanish for a pure power.
        if den_uni[..den_uni.len() - 1].iter().any(|c| !c.is_zero()) {
            return Err(AlgebraError::NonMonomialDenominator);
        }
        let lead = den_uni.last().unwrap();
        let Some(c) = lead.constant_value() else {
            return Err(AlgebraError::NonMonomialDenominator);
        };
        let inv = c.inv();
        let mut out: BTreeMap<i64, MultiPoly> = BTreeMap::new();
        for (e, coeff) in self.num.to_univariate(var).into_iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let k = e as i64 - dk;
            let entry = out.entry(k).or_insert_with(MultiPoly::zero);
            *entry = entry.add_ref(&coeff.scale(&inv));
        }
        Ok(out.into_iter().collect())
    }
}

/// Evaluate a polynomial with rational-expression values for its variables.
pub fn poly_substitute(
    p: &MultiPoly,
    binds: &BTreeMap<String, RatExpr>,
) -> Result<RatExpr, AlgebraError> {
    if p.vars().iter().all(|v| !binds.contains_key(v)) {
        return Ok(RatExpr::from_poly(p.clone()));
    }
    // Memoize powers of each bound replacement.
    let mut pows: BTreeMap<(usize, u32), RatExpr> = BTreeMap::new();
    let vars = p.vars().to_vec();
    let power = |k: usize, e: u32, base: &RatExpr, memo: &mut BTreeMap<(usize, u32), RatExpr>| {
        if let Some(v) = memo.get(&(k, e)) {
            return v.clone();
        }
        let mut acc = base.clone();
        for _ in 1..e {
            acc = acc.mul_ref(base);
        }
        memo.insert((k, e), acc.clone());
        acc
    };
    let mut out = RatExpr::zero();
    for (m, c) in p.terms() {
        let mut term = RatExpr::constant(c.clone());
        for (k, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let factor = match binds.get(&vars[k]) {
                Some(repl) => power(k, e, repl, &mut pows),
                None => RatExpr::from_poly(MultiPoly::monomial(Gq::one(), &vars[k], e)),
            };
            term = term.mul_ref(&factor);
        }
        out = out.add_ref(&term);
    }
    Ok(out)
}

// ---- Operator sugar ----

impl Add for &RatExpr {
    type Output = RatExpr;
    fn add(self, rhs: Self) -> RatExpr {
        self.add_ref(rhs)
    }
}
impl Sub for &RatExpr {
    type Output = RatExpr;
    fn sub(self, rhs: Self) -> RatExpr {
        self.sub_ref(rhs)
    }
}
impl Mul for &RatExpr {
    type Output = RatExpr;
    fn mul(self, rhs: Self) -> RatExpr {
        self.mul_ref(rhs)
    }
}
impl Div for &RatExpr {
    type Output = RatExpr;
    fn div(self, rhs: Self) -> RatExpr {
        self.div_ref(rhs).expect("division by zero RatExpr")
    }
}
impl Neg for &RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        self.neg_ref()
    }
}

impl fmt::Display for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> RatExpr {
        RatExpr::var("x")
    }

    fn binds(pairs: &[(&str, RatExpr)]) -> BTreeMap<String, RatExpr> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn normalization_is_idempotent_and_coprime() {
        // (x^2 - 1) / (2x - 2) normalizes to (x + 1)/2 with monic denominator.
        let num = &(&x() * &x()) - &RatExpr::one();
        let den = x().scale(&Gq::from_int(2)).sub_ref(&RatExpr::int(2));
        let r = num.div_ref(&den).unwrap();
        assert!(r.den().is_one());
        assert_eq!(r, x().add_ref(&RatExpr::one()).scale(&Gq::from_ratio(1, 2)));
        assert!(MultiPoly::gcd(r.num(), r.den()).is_one());
    }

    #[test]
    fn derivative_quotient_rule() {
        // d/dx (x^2 - 2z) = 2x
        let f = (&x() * &x()).sub_ref(&RatExpr::var("z").scale(&Gq::from_int(2)));
        assert_eq!(f.derivative("x"), x().scale(&Gq::from_int(2)));
        // d/dx (1/x) = -1/x^2
        let inv = x().inv().unwrap();
        let expect = RatExpr::int(-1).div_ref(&(&x() * &x())).unwrap();
        assert_eq!(inv.derivative("x"), expect);
    }

    #[test]
    fn time_derivative_uses_rates() {
        // d/dt [E*(x^2 - 2z)] with rate(E) = -6 is -6 E (x^2 - 2z)
        let e = RatExpr::var("E");
        let core = (&x() * &x()).sub_ref(&RatExpr::var("z").scale(&Gq::from_int(2)));
        let f = e.mul_ref(&core);
        let rates = BTreeMap::from([("E".to_string(), Gq::from_int(-6))]);
        assert_eq!(f.time_derivative(&rates), f.scale(&Gq::from_int(-6)));
    }

    #[test]
    fn substitute_weighted_chart() {
        // x*y under (x,y,z) -> (1/X, Y/X^2, Z/X^2) becomes Y/X^3
        let xx = RatExpr::var("X");
        let map = binds(&[
            ("x", xx.inv().unwrap()),
            ("y", RatExpr::var("Y").div_ref(&xx.pow(2).unwrap()).unwrap()),
            ("z", RatExpr::var("Z").div_ref(&xx.pow(2).unwrap()).unwrap()),
        ]);
        let f = x().mul_ref(&RatExpr::var("y"));
        let got = f.substitute(&map).unwrap();
        let expect = RatExpr::var("Y").div_ref(&xx.pow(3).unwrap()).unwrap();
        assert_eq!(got, expect);
        // identity substitution
        assert_eq!(f.substitute(&binds(&[("x", x())])).unwrap(), f);
    }

    #[test]
    fn substitution_into_a_vanishing_denominator_errors() {
        // 1/(x - y) with x -> y kills the denominator identically.
        let f = RatExpr::one()
            .div_ref(&x().sub_ref(&RatExpr::var("y")))
            .unwrap();
        let err = f.substitute(&binds(&[("x", RatExpr::var("y"))])).unwrap_err();
        assert_eq!(err, AlgebraError::DivisionByZeroIdentically);
    }

    #[test]
    fn laurent_split() {
        // (Y + X^2*Z + X^3) / X^2 -> { -2: Y, 0: Z, 1: 1 }
        let xv = MultiPoly::var("X");
        let num = MultiPoly::var("Y")
            .add_ref(&xv.pow(2).mul_ref(&MultiPoly::var("Z")))
            .add_ref(&xv.pow(3));
        let r = RatExpr::new(num, xv.pow(2)).unwrap();
        let parts = r.laurent_in("X").unwrap();
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0], (-2, MultiPoly::var("Y")));
        assert_eq!(parts[1], (0, MultiPoly::var("Z")));
        assert_eq!(parts[2], (1, MultiPoly::one()));
    }

    #[test]
    fn pole_order_detection() {
        let xv = MultiPoly::var("X");
        let r = RatExpr::new(MultiPoly::var("Y"), xv.pow(3)).unwrap();
        assert_eq!(r.pole_order(&xv, 16).unwrap(), 3);
        assert_eq!(RatExpr::one().pole_order(&xv, 16).unwrap(), 0);
        let off = RatExpr::new(MultiPoly::one(), MultiPoly::var("Y")).unwrap();
        assert!(off.pole_order(&xv, 16).is_err());
    }
}
