//! Sparse multivariate polynomials over the Gaussian rationals.
//!
//! Representation: a sorted variable list plus a `BTreeMap` from dense
//! exponent vectors (aligned with the variable list) to nonzero
//! coefficients. The form is canonical: variables are sorted, unused
//! variables are pruned, no zero coefficients are stored. Equality is
//! therefore structural equality.
//!
//! Variable universes merge by name when two polynomials meet in a
//! binary operation.

use crate::error::AlgebraError;
use crate::gauss::Gq;
use num_complex::Complex64;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent vector aligned with a polynomial's variable list.
pub type Mono = Vec<u32>;

/// Sparse multivariate polynomial over Q(i).
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Mono, Gq>,
}

impl MultiPoly {
    // ---- Constructors ----

    pub fn zero() -> Self {
        Self { vars: Vec::new(), terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Gq::one())
    }

    pub fn constant(c: Gq) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Self { vars: Vec::new(), terms }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Gq::from_int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::constant(Gq::from_ratio(n, d))
    }

    /// The imaginary unit as a constant polynomial.
    pub fn i() -> Self {
        Self::constant(Gq::i())
    }

    /// The variable `name` with exponent 1.
    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], Gq::one());
        Self { vars: vec![name.to_string()], terms }
    }

    /// `c * name^e`.
    pub fn monomial(c: Gq, name: &str, e: u32) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        if e == 0 {
            return Self::constant(c);
        }
        let mut terms = BTreeMap::new();
        terms.insert(vec![e], c);
        Self { vars: vec![name.to_string()], terms }
    }

    /// Build from raw parts; normalizes (drops zeros, prunes unused vars).
    pub fn from_terms(vars: Vec<String>, terms: BTreeMap<Mono, Gq>) -> Self {
        let mut p = Self { vars, terms };
        p.prune();
        p
    }

    // ---- Queries ----

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().next().map_or(false, |(m, c)| {
                m.iter().all(|&e| e == 0) && c.is_one()
            })
    }

    pub fn is_constant(&self) -> bool {
        self.vars.is_empty()
    }

    /// The constant value, if this polynomial is constant (zero included).
    pub fn constant_value(&self) -> Option<Gq> {
        if self.is_zero() {
            Some(Gq::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    /// Single-term test.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Gq)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn contains_var(&self, name: &str) -> bool {
        self.vars.iter().any(|v| v == name)
    }

    pub fn degree_in(&self, name: &str) -> u32 {
        match self.vars.iter().position(|v| v == name) {
            None => 0,
            Some(k) => self.terms.keys().map(|m| m[k]).max().unwrap_or(0),
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Leading (lexicographically greatest) term.
    pub fn leading_term(&self) -> Option<(&Mono, &Gq)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Option<&Gq> {
        self.leading_term().map(|(_, c)| c)
    }

    // ---- Normalization ----

    fn prune(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
        if self.terms.is_empty() {
            self.vars.clear();
            return;
        }
        let arity = self.vars.len();
        let mut used = vec![false; arity];
        for m in self.terms.keys() {
            debug_assert_eq!(m.len(), arity, "exponent arity mismatch");
            for (k, &e) in m.iter().enumerate() {
                if e > 0 {
                    used[k] = true;
                }
            }
        }
        if used.iter().all(|&u| u) {
            return;
        }
        let keep: Vec<usize> = (0..arity).filter(|&k| used[k]).collect();
        self.vars = keep.iter().map(|&k| self.vars[k].clone()).collect();
        let old = std::mem::take(&mut self.terms);
        for (m, c) in old {
            let nm: Mono = keep.iter().map(|&k| m[k]).collect();
            self.terms.insert(nm, c);
        }
    }

    /// Re-express `self` over the given superset variable list (sorted).
    fn align_to(&self, vars: &[String]) -> Self {
        if self.vars == vars {
            return self.clone();
        }
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                vars.iter()
                    .position(|w| w == v)
                    .expect("align_to: variable missing from target universe")
            })
            .collect();
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut nm = vec![0u32; vars.len()];
            for (k, &e) in m.iter().enumerate() {
                nm[map[k]] = e;
            }
            terms.insert(nm, c.clone());
        }
        Self { vars: vars.to_vec(), terms }
    }

    /// Merge two variable universes by name and align both operands.
    pub fn unify(a: &Self, b: &Self) -> (Self, Self, Vec<String>) {
        if a.vars == b.vars {
            return (a.clone(), b.clone(), a.vars.clone());
        }
        let set: BTreeSet<String> = a.vars.iter().chain(b.vars.iter()).cloned().collect();
        let vars: Vec<String> = set.into_iter().collect();
        (a.align_to(&vars), b.align_to(&vars), vars)
    }

    // ---- Arithmetic ----

    pub fn add_ref(&self, rhs: &Self) -> Self {
        let (a, b, vars) = Self::unify(self, rhs);
        let mut terms = a.terms;
        for (m, c) in b.terms {
            let e = terms.entry(m).or_insert_with(Gq::zero);
            *e = &*e + &c;
        }
        Self::from_terms(vars, terms)
    }

    pub fn sub_ref(&self, rhs: &Self) -> Self {
        self.add_ref(&rhs.neg_ref())
    }

    pub fn neg_ref(&self) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        Self { vars: self.vars.clone(), terms }
    }

    pub fn mul_ref(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let (a, b, vars) = Self::unify(self, rhs);
        let mut terms: BTreeMap<Mono, Gq> = BTreeMap::new();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let m: Mono = ma.iter().zip(mb.iter()).map(|(x, y)| x + y).collect();
                let e = terms.entry(m).or_insert_with(Gq::zero);
                *e = &*e + &(ca * cb);
            }
        }
        Self::from_terms(vars, terms)
    }

    pub fn scale(&self, c: &Gq) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let terms = self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect();
        Self { vars: self.vars.clone(), terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.mul_ref(&base);
            e >>= 1;
        }
        acc
    }

    pub fn conj(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.conj()))
            .collect();
        Self { vars: self.vars.clone(), terms }
    }

    /// Partial derivative with respect to `name`.
    pub fn derivative(&self, name: &str) -> Self {
        let Some(k) = self.vars.iter().position(|v| v == name) else {
            return Self::zero();
        };
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m[k];
            if e == 0 {
                continue;
            }
            let mut nm = m.clone();
            nm[k] = e - 1;
            let nc = c * &Gq::from_int(e as i64);
            let slot = terms.entry(nm).or_insert_with(Gq::zero);
            *slot = &*slot + &nc;
        }
        Self::from_terms(self.vars.clone(), terms)
    }

    // ---- Division ----

    /// Exact division. Errors with `NotDivisible` when a remainder is left.
    pub fn exact_div(&self, b: &Self) -> Result<Self, AlgebraError> {
        if b.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        if let Some(c) = b.constant_value() {
            return Ok(self.scale(&c.inv()));
        }
        let (mut rem, div, vars) = Self::unify(self, b);
        let (lm, lc) = {
            let (m, c) = div.terms.iter().next_back().unwrap();
            (m.clone(), c.clone())
        };
        let mut quo: BTreeMap<Mono, Gq> = BTreeMap::new();
        while !rem.terms.is_empty() {
            let (rm, rc) = {
                let (m, c) = rem.terms.iter().next_back().unwrap();
                (m.clone(), c.clone())
            };
            if rm.len() != lm.len() || rm.iter().zip(lm.iter()).any(|(a, b)| a < b) {
                return Err(AlgebraError::NotDivisible);
            }
            let qm: Mono = rm.iter().zip(lm.iter()).map(|(a, b)| a - b).collect();
            let qc = &rc / &lc;
            for (dm, dc) in &div.terms {
                let m: Mono = dm.iter().zip(qm.iter()).map(|(a, b)| a + b).collect();
                let e = rem.terms.entry(m).or_insert_with(Gq::zero);
                *e = &*e - &(dc * &qc);
            }
            rem.terms.retain(|_, c| !c.is_zero());
            let e = quo.entry(qm).or_insert_with(Gq::zero);
            *e = &*e + &qc;
        }
        Ok(Self::from_terms(vars, quo))
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.exact_div(self).is_ok()
    }

    // ---- GCD ----

    /// Greatest common divisor, normalized to leading (lex) coefficient 1.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let g = Self::gcd_raw(a, b);
        g.monic()
    }

    /// Scale so the lex-leading coefficient is 1.
    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            None => Self::zero(),
            Some(c) => {
                if c.is_one() {
                    self.clone()
                } else {
                    self.scale(&c.inv())
                }
            }
        }
    }

    fn gcd_raw(a: &Self, b: &Self) -> Self {
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        if a.is_constant() || b.is_constant() {
            return Self::one();
        }
        // Monomial fast path: variable-wise minimum exponents.
        if a.is_monomial() || b.is_monomial() {
            return Self::monomial_gcd(a, b);
        }
        let (ua, ub, vars) = Self::unify(a, b);
        // Main variable: the shared variable of highest degree keeps the
        // coefficient ring small; if none is shared, the polynomials are
        // coprime up to contents in disjoint variables.
        let shared: Vec<usize> = (0..vars.len())
            .filter(|&k| {
                ua.terms.keys().any(|m| m[k] > 0) && ub.terms.keys().any(|m| m[k] > 0)
            })
            .collect();
        let main = shared.iter().copied().max_by_key(|&k| {
            ua.degree_in(&vars[k]).max(ub.degree_in(&vars[k]))
        });
        let Some(main) = main else {
            return Self::one();
        };
        let main_name = vars[main].clone();
        let ca = ua.content_in(&main_name);
        let cb = ub.content_in(&main_name);
        let cont = Self::gcd_raw(&ca, &cb);
        let pa = ua.exact_div(&ca).expect("content divides");
        let pb = ub.exact_div(&cb).expect("content divides");
        let prim = Self::primitive_prs(&pa, &pb, &main_name);
        cont.mul_ref(&prim)
    }

    fn monomial_gcd(a: &Self, b: &Self) -> Self {
        let (ua, ub, vars) = Self::unify(a, b);
        let min_exp = |p: &Self, k: usize| p.terms.keys().map(|m| m[k]).min().unwrap_or(0);
        let mut mono = vec![0u32; vars.len()];
        for k in 0..vars.len() {
            mono[k] = min_exp(&ua, k).min(min_exp(&ub, k));
        }
        let mut terms = BTreeMap::new();
        terms.insert(mono, Gq::one());
        Self::from_terms(vars, terms)
    }

    /// GCD of the coefficients of `self` viewed as univariate in `name`.
    fn content_in(&self, name: &str) -> Self {
        let coeffs = self.to_univariate(name);
        let mut g = Self::zero();
        for c in coeffs {
            if !c.is_zero() {
                g = Self::gcd_raw(&g, &c);
                if g.is_constant() && !g.is_zero() {
                    return Self::one();
                }
            }
        }
        g
    }

    /// Subresultant polynomial remainder sequence: pseudo-remainders are
    /// divided by the Collins factors, which bounds coefficient growth
    /// without content extraction at every step.
    fn primitive_prs(a: &Self, b: &Self, main: &str) -> Self {
        let primitive = |p: &Self| -> Self {
            let c = p.content_in(main);
            p.exact_div(&c).expect("content divides")
        };
        let mut f = primitive(a);
        let mut g = primitive(b);
        if f.degree_in(main) < g.degree_in(main) {
            std::mem::swap(&mut f, &mut g);
        }
        let mut gamma = Self::one();
        let mut h = Self::one();
        loop {
            let d = f.degree_in(main) - g.degree_in(main);
            let r = Self::pseudo_rem(&f, &g, main);
            if r.is_zero() {
                return primitive(&g);
            }
            if r.degree_in(main) == 0 {
                return Self::one();
            }
            let beta = gamma.mul_ref(&h.pow(d));
            f = g;
            g = r.exact_div(&beta).expect("subresultant division is exact");
            gamma = f.to_univariate(main).last().expect("nonzero").clone();
            h = if d == 0 {
                h
            } else {
                gamma
                    .pow(d)
                    .exact_div(&h.pow(d - 1))
                    .expect("subresultant h-update is exact")
            };
        }
    }

    /// Pseudo-remainder of `f` by `g` in the variable `main`:
    /// exactly `lc(g)^(deg f - deg g + 1) * f mod g`. The fixed power
    /// matters for the subresultant divisions, so skipped reduction steps
    /// (from cancelling leading terms) are compensated at the end.
    fn pseudo_rem(f: &Self, g: &Self, main: &str) -> Self {
        let df = f.degree_in(main);
        let dg = g.degree_in(main);
        debug_assert!(dg > 0 && df >= dg);
        let gc = g.to_univariate(main);
        let lc = gc.last().unwrap().clone();
        let mut r = f.clone();
        let mut steps = 0;
        loop {
            let dr = r.degree_in(main);
            if r.is_zero() || dr < dg {
                break;
            }
            let rc = r.to_univariate(main);
            let lr = rc.last().unwrap().clone();
            // r := lc*r - lr*x^(dr-dg)*g
            let shift = Self::monomial(Gq::one(), main, dr - dg);
            r = r.mul_ref(&lc).sub_ref(&g.mul_ref(&lr).mul_ref(&shift));
            steps += 1;
        }
        for _ in steps..=df - dg {
            r = r.mul_ref(&lc);
        }
        r
    }

    // ---- Views ----

    /// Coefficients of `self` as a univariate polynomial in `name`,
    /// ascending degree order; length is `degree + 1` (empty for zero).
    pub fn to_univariate(&self, name: &str) -> Vec<Self> {
        if self.is_zero() {
            return Vec::new();
        }
        let Some(k) = self.vars.iter().position(|v| v == name) else {
            return vec![self.clone()];
        };
        let deg = self.degree_in(name) as usize;
        let mut out = vec![Self::zero(); deg + 1];
        for (m, c) in &self.terms {
            let e = m[k] as usize;
            let mut nm = m.clone();
            nm[k] = 0;
            let t = Self::from_terms(self.vars.clone(), BTreeMap::from([(nm, c.clone())]));
            out[e] = out[e].add_ref(&t);
        }
        out
    }

    /// Substitute exact values for some variables, keeping the rest symbolic.
    pub fn eval_partial(&self, binds: &BTreeMap<String, Gq>) -> Self {
        if self.vars.iter().all(|v| !binds.contains_key(v)) {
            return self.clone();
        }
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut mono_vars = Vec::new();
            for (k, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match binds.get(&self.vars[k]) {
                    Some(v) => coeff = &coeff * &v.pow(e),
                    None => mono_vars.push((self.vars[k].clone(), e)),
                }
            }
            let mut term = Self::constant(coeff);
            for (v, e) in mono_vars {
                term = term.mul_ref(&Self::monomial(Gq::one(), &v, e));
            }
            out = out.add_ref(&term);
        }
        out
    }

    /// Full exact evaluation; every variable must be bound.
    pub fn eval(&self, binds: &BTreeMap<String, Gq>) -> Result<Gq, AlgebraError> {
        let mut acc = Gq::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (k, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = binds
                    .get(&self.vars[k])
                    .ok_or_else(|| AlgebraError::UnboundSymbol(self.vars[k].clone()))?;
                t = &t * &v.pow(e);
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Floating-point evaluation; every variable must be bound.
    pub fn eval_complex(&self, binds: &BTreeMap<String, Complex64>) -> Result<Complex64, AlgebraError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex64();
            for (k, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = binds
                    .get(&self.vars[k])
                    .ok_or_else(|| AlgebraError::UnboundSymbol(self.vars[k].clone()))?;
                t *= v.powu(e);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Order of vanishing at a point: minimal total degree in the Taylor
    /// expansion centered there. Returns `None` for the zero polynomial.
    pub fn vanishing_order_at(&self, binds: &BTreeMap<String, Gq>) -> Option<u32> {
        // Shift each bound variable v -> v + value and read the minimal degree.
        let mut shifted = self.clone();
        for (v, val) in binds {
            if !shifted.contains_var(v) {
                continue;
            }
            let repl = Self::var(v).add_ref(&Self::constant(val.clone()));
            shifted = shifted.substitute_poly(v, &repl);
        }
        shifted
            .terms
            .keys()
            .map(|m| m.iter().sum::<u32>())
            .min()
    }

    /// Substitute a polynomial for a single variable.
    pub fn substitute_poly(&self, name: &str, value: &Self) -> Self {
        let Some(k) = self.vars.iter().position(|v| v == name) else {
            return self.clone();
        };
        let deg = self.degree_in(name);
        // Precompute powers of the replacement.
        let mut pows = Vec::with_capacity(deg as usize + 1);
        pows.push(Self::one());
        for e in 1..=deg {
            pows.push(pows[(e - 1) as usize].mul_ref(value));
        }
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m[k];
            let mut nm = m.clone();
            nm[k] = 0;
            let rest = Self::from_terms(self.vars.clone(), BTreeMap::from([(nm, c.clone())]));
            out = out.add_ref(&rest.mul_ref(&pows[e as usize]));
        }
        out
    }
}

// ---- Resultant ----

/// Sylvester resultant of `a` and `b` with respect to `var`, exact.
pub fn resultant(a: &MultiPoly, b: &MultiPoly, var: &str) -> MultiPoly {
    let fa = a.to_univariate(var);
    let fb = b.to_univariate(var);
    if fa.is_empty() || fb.is_empty() {
        return MultiPoly::zero();
    }
    let m = fa.len() - 1;
    let n = fb.len() - 1;
    if m == 0 {
        return fa[0].pow(n as u32);
    }
    if n == 0 {
        return fb[0].pow(m as u32);
    }
    // Sylvester matrix in descending-coefficient convention.
    let size = m + n;
    let mut rows: Vec<Vec<MultiPoly>> = vec![vec![MultiPoly::zero(); size]; size];
    for i in 0..n {
        for (j, c) in fa.iter().rev().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in fb.iter().rev().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    bareiss_det(rows)
}

/// Fraction-free determinant of a matrix of polynomials.
fn bareiss_det(mut m: Vec<Vec<MultiPoly>>) -> MultiPoly {
    let n = m.len();
    if n == 0 {
        return MultiPoly::one();
    }
    let mut sign = false;
    let mut prev = MultiPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return MultiPoly::zero();
            };
            m.swap(k, p);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j]
                    .mul_ref(&m[k][k])
                    .sub_ref(&m[i][k].mul_ref(&m[k][j]));
                m[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = MultiPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        det.neg_ref()
    } else {
        det
    }
}

// ---- Operator sugar ----

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: Self) -> MultiPoly {
        self.add_ref(rhs)
    }
}
impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: Self) -> MultiPoly {
        self.sub_ref(rhs)
    }
}
impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: Self) -> MultiPoly {
        self.mul_ref(rhs)
    }
}
impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.neg_ref()
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let mono: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(k, &e)| {
                    if e == 1 {
                        self.vars[k].clone()
                    } else {
                        format!("{}^{}", self.vars[k], e)
                    }
                })
                .collect();
            let coeff = c.to_string();
            // A mixed-sign coefficient needs parentheses to bind to its
            // monomial on reparse.
            let needs_parens = coeff[1..].contains(['+', '-']);
            let body = if mono.is_empty() {
                coeff
            } else if c.is_one() {
                mono.join("*")
            } else if (-c).is_one() {
                format!("-{}", mono.join("*"))
            } else if needs_parens {
                format!("({})*{}", coeff, mono.join("*"))
            } else {
                format!("{}*{}", coeff, mono.join("*"))
            };
            if first {
                write!(f, "{body}")?;
                first = false;
            } else if let Some(rest) = body.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
