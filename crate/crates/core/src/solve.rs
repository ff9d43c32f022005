//! Exact solving of small polynomial systems over Q(i).
//!
//! Strategy: strip common factors, eliminate variables with Sylvester
//! resultants, enumerate Gaussian-rational roots of the univariate
//! eliminants (rational-root search over Z[i]), back-substitute, and
//! verify every candidate exactly. Roots outside Q(i) fall back to a
//! Durand-Kerner complex solver and are flagged as approximate.

use crate::gauss::Gq;
use crate::poly::{resultant, MultiPoly};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeMap;

/// One coordinate of a solution point.
#[derive(Clone, Debug, PartialEq)]
pub enum Coord {
    Exact(Gq),
    Approx(Complex64),
}

impl Coord {
    pub fn is_exact(&self) -> bool {
        matches!(self, Coord::Exact(_))
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Coord::Exact(g) => g.to_complex64(),
            Coord::Approx(c) => *c,
        }
    }

    pub fn exact(&self) -> Option<&Gq> {
        match self {
            Coord::Exact(g) => Some(g),
            Coord::Approx(_) => None,
        }
    }
}

/// A solution point in the order of the variable list passed to the solver.
pub type Point = Vec<Coord>;

/// Numeric verification tolerance for approximate roots.
pub const NUMERIC_TOL: f64 = 1e-12;

/// Outcome of solving a square-ish system in up to 3 variables.
#[derive(Clone, Debug)]
pub enum Solutions {
    Finite(Vec<Point>),
    /// The solution set has a component of positive dimension.
    PositiveDimensional(String),
}

/// Solve `eqs = 0` in the given variables. All equations must be
/// polynomials in (a subset of) `vars`; other symbols are not allowed.
pub fn solve_system(eqs: &[MultiPoly], vars: &[String]) -> Solutions {
    let live: Vec<MultiPoly> = eqs.iter().filter(|p| !p.is_zero()).cloned().collect();
    if live.iter().any(|p| p.is_constant()) {
        return Solutions::Finite(Vec::new());
    }
    if live.is_empty() {
        return Solutions::PositiveDimensional("all equations vanish identically".into());
    }
    let raw = match solve_rec(&live, vars) {
        Ok(pts) => pts,
        Err(msg) => return Solutions::PositiveDimensional(msg),
    };
    // Exact verification against the full system; approximate points are
    // verified numerically.
    let mut out: Vec<Point> = Vec::new();
    'cand: for pt in raw {
        for eq in &live {
            if !point_satisfies(eq, vars, &pt) {
                continue 'cand;
            }
        }
        if !out.iter().any(|q| points_equal(q, &pt)) {
            out.push(pt);
        }
    }
    sort_points(&mut out);
    Solutions::Finite(out)
}

fn sort_points(pts: &mut [Point]) {
    pts.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b.iter()) {
            let (cx, cy) = (x.to_complex(), y.to_complex());
            let ord = cx
                .re
                .partial_cmp(&cy.re)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(cx.im.partial_cmp(&cy.im).unwrap_or(std::cmp::Ordering::Equal));
            if ord != std::cmp::Ordering::Equal {
                return ord;
            }
        }
        std::cmp::Ordering::Equal
    });
}

fn points_equal(a: &Point, b: &Point) -> bool {
    a.len() == b.len()
        && a.iter().zip(b.iter()).all(|(x, y)| match (x, y) {
            (Coord::Exact(p), Coord::Exact(q)) => p == q,
            _ => (x.to_complex() - y.to_complex()).norm() < NUMERIC_TOL,
        })
}

/// Exact (or toleranced) check that a point kills a polynomial.
pub fn point_satisfies(eq: &MultiPoly, vars: &[String], pt: &Point) -> bool {
    if pt.iter().all(|c| c.is_exact()) {
        let binds: BTreeMap<String, Gq> = vars
            .iter()
            .cloned()
            .zip(pt.iter().map(|c| c.exact().unwrap().clone()))
            .collect();
        eq.eval(&binds).map_or(false, |v| v.is_zero())
    } else {
        let binds: BTreeMap<String, Complex64> = vars
            .iter()
            .cloned()
            .zip(pt.iter().map(Coord::to_complex))
            .collect();
        eq.eval_complex(&binds)
            .map_or(false, |v| v.norm() < NUMERIC_TOL)
    }
}

fn solve_rec(eqs: &[MultiPoly], vars: &[String]) -> Result<Vec<Point>, String> {
    debug_assert!(!vars.is_empty());
    if vars.len() == 1 {
        let mut g = MultiPoly::zero();
        for e in eqs {
            g = MultiPoly::gcd(&g, e);
        }
        if g.is_constant() && !g.is_zero() {
            return Ok(Vec::new());
        }
        if g.is_zero() {
            return Err("equations all vanish".into());
        }
        let coeffs = univariate_coeffs(&g, &vars[0])?;
        return Ok(all_roots(&coeffs).into_iter().map(|r| vec![r]).collect());
    }

    let v = vars.last().unwrap();
    let rest = &vars[..vars.len() - 1];
    let with_v: Vec<&MultiPoly> = eqs.iter().filter(|p| p.degree_in(v) > 0).collect();
    let without_v: Vec<MultiPoly> = eqs
        .iter()
        .filter(|p| p.degree_in(v) == 0)
        .cloned()
        .collect();
    if with_v.is_empty() {
        return Err(format!("no equation constrains `{v}`"));
    }

    // Eliminate v against the first equation that contains it.
    let mut reduced: Vec<MultiPoly> = without_v;
    let p0 = with_v[0];
    for q in &with_v[1..] {
        let r = resultant(p0, q, v);
        if r.is_zero() {
            // A common factor in v survived; strip it and retry once.
            let g = MultiPoly::gcd(p0, q);
            if g.is_constant() {
                return Err(format!("vanishing resultant while eliminating `{v}`"));
            }
            let p0r = p0.exact_div(&g).expect("gcd divides");
            let qr = q.exact_div(&g).expect("gcd divides");
            let r2 = resultant(&p0r, &qr, v);
            if r2.is_zero() {
                return Err(format!(
                    "positive-dimensional component while eliminating `{v}`"
                ));
            }
            reduced.push(r2);
            continue;
        }
        reduced.push(r);
    }
    if reduced.is_empty() {
        return Err(format!(
            "under-determined system: only one equation involves `{v}`"
        ));
    }
    if reduced.iter().any(|p| p.is_constant() && !p.is_zero()) {
        return Ok(Vec::new());
    }
    let partials = solve_rec(&reduced, rest)?;

    // Back-substitute each partial solution and solve for v.
    let mut out = Vec::new();
    for part in partials {
        let vals = extend_roots(&with_v, rest, &part, v)?;
        for r in vals {
            let mut pt = part.clone();
            pt.push(r);
            out.push(pt);
        }
    }
    Ok(out)
}

/// Common roots in `v` of all equations after fixing the partial solution.
fn extend_roots(
    eqs: &[&MultiPoly],
    rest: &[String],
    part: &Point,
    v: &str,
) -> Result<Vec<Coord>, String> {
    if part.iter().all(|c| c.is_exact()) {
        let binds: BTreeMap<String, Gq> = rest
            .iter()
            .cloned()
            .zip(part.iter().map(|c| c.exact().unwrap().clone()))
            .collect();
        let mut g = MultiPoly::zero();
        for eq in eqs {
            let sub = eq.eval_partial(&binds);
            g = MultiPoly::gcd(&g, &sub);
        }
        if g.is_zero() {
            return Err("back-substitution vanishes identically".into());
        }
        if g.is_constant() {
            return Ok(Vec::new());
        }
        let coeffs = univariate_coeffs(&g, v)?;
        Ok(all_roots(&coeffs))
    } else {
        // Numeric partial: work with complex coefficient vectors.
        let binds: BTreeMap<String, Complex64> = rest
            .iter()
            .cloned()
            .zip(part.iter().map(Coord::to_complex))
            .collect();
        let mut cands: Option<Vec<Complex64>> = None;
        for eq in eqs {
            let coeffs = complex_univariate(eq, v, &binds)?;
            if coeffs.iter().all(|c| c.norm() < NUMERIC_TOL) {
                continue;
            }
            let roots = durand_kerner(&coeffs);
            cands = Some(match cands {
                None => roots,
                Some(prev) => prev
                    .into_iter()
                    .filter(|r| roots.iter().any(|s| (r - s).norm() < 1e-8))
                    .collect(),
            });
        }
        Ok(cands
            .unwrap_or_default()
            .into_iter()
            .map(Coord::Approx)
            .collect())
    }
}

fn complex_univariate(
    p: &MultiPoly,
    v: &str,
    binds: &BTreeMap<String, Complex64>,
) -> Result<Vec<Complex64>, String> {
    let coeffs = p.to_univariate(v);
    coeffs
        .iter()
        .map(|c| c.eval_complex(binds).map_err(|e| e.to_string()))
        .collect()
}

/// Remove the monomial content (common variable powers) of a polynomial.
/// Zero sets agree away from the coordinate hyperplanes.
pub fn strip_monomial_content(p: &MultiPoly) -> MultiPoly {
    if p.is_zero() || p.is_constant() {
        return p.clone();
    }
    let mono = MultiPoly::gcd(p, &monomial_part(p));
    if mono.is_one() {
        p.clone()
    } else {
        p.exact_div(&mono).expect("monomial content divides")
    }
}

fn monomial_part(p: &MultiPoly) -> MultiPoly {
    // gcd(p, p) restricted to a single term: min exponents across terms.
    let vars = p.vars().to_vec();
    let mut mins: Vec<u32> = vec![u32::MAX; vars.len()];
    for (m, _) in p.terms() {
        for (k, &e) in m.iter().enumerate() {
            mins[k] = mins[k].min(e);
        }
    }
    let mut out = MultiPoly::one();
    for (k, &e) in mins.iter().enumerate() {
        if e > 0 && e != u32::MAX {
            out = out.mul_ref(&MultiPoly::monomial(Gq::one(), &vars[k], e));
        }
    }
    out
}

/// Ascending coefficient vector of a univariate polynomial; errors when
/// other symbols remain.
pub fn univariate_coeffs(p: &MultiPoly, var: &str) -> Result<Vec<Gq>, String> {
    p.to_univariate(var)
        .into_iter()
        .map(|c| {
            c.constant_value()
                .ok_or_else(|| format!("eliminant coefficients involve symbols: {c}"))
        })
        .collect()
}

// ---- Univariate roots over Q(i) ----

/// All roots of an ascending-coefficient polynomial: exact Gaussian-rational
/// roots where possible, Durand-Kerner approximations for the rest.
pub fn all_roots(coeffs: &[Gq]) -> Vec<Coord> {
    let mut c = coeffs.to_vec();
    while c.last().map_or(false, Gq::is_zero) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    // Zero roots.
    let shift = c.iter().take_while(|x| x.is_zero()).count();
    if shift > 0 {
        roots.push(Coord::Exact(Gq::zero()));
        c.drain(..shift);
    }
    if c.len() <= 1 {
        return roots;
    }
    let exact = exact_roots(&c);
    let mut reduced = c;
    for r in &exact {
        loop {
            match deflate(&reduced, r) {
                Some(q) => reduced = q,
                None => break,
            }
        }
        roots.push(Coord::Exact(r.clone()));
    }
    if reduced.len() > 1 {
        // Quadratics still split exactly when the discriminant is a square.
        if reduced.len() == 3 {
            if let Some((r1, r2)) = quadratic_exact(&reduced) {
                roots.push(Coord::Exact(r1));
                roots.push(Coord::Exact(r2));
                return dedup_coords(roots);
            }
        }
        for r in durand_kerner(&reduced.iter().map(Gq::to_complex64).collect::<Vec<_>>()) {
            roots.push(Coord::Approx(r));
        }
    }
    dedup_coords(roots)
}

fn dedup_coords(mut roots: Vec<Coord>) -> Vec<Coord> {
    let mut out: Vec<Coord> = Vec::new();
    roots.retain(|r| {
        let dup = out.iter().any(|s| match (s, r) {
            (Coord::Exact(a), Coord::Exact(b)) => a == b,
            _ => (s.to_complex() - r.to_complex()).norm() < NUMERIC_TOL,
        });
        if !dup {
            out.push(r.clone());
        }
        false
    });
    out
}

/// Exact roots of a quadratic over Q(i), when the discriminant is a square.
pub fn quadratic_exact(c: &[Gq]) -> Option<(Gq, Gq)> {
    debug_assert_eq!(c.len(), 3);
    let (a, b, c0) = (&c[2], &c[1], &c[0]);
    let disc = &(b * b) - &(&(a * c0) * &Gq::from_int(4));
    let s = disc.sqrt_exact()?;
    let two_a = &Gq::from_int(2) * a;
    let r1 = &(&-b + &s) / &two_a;
    let r2 = &(&-b - &s) / &two_a;
    Some((r1, r2))
}

/// Gaussian-rational roots by the rational root theorem over Z[i].
fn exact_roots(coeffs: &[Gq]) -> Vec<Gq> {
    // Clear denominators to land in Z[i].
    let mut lcm = BigInt::from(1);
    for c in coeffs {
        for part in [c.re(), c.im()] {
            let d = part.denom();
            let g = num_integer::Integer::gcd(&lcm, d);
            lcm = &lcm * d / g;
        }
    }
    let scale = BigRational::from_integer(lcm);
    let zi: Vec<(BigInt, BigInt)> = coeffs
        .iter()
        .map(|c| {
            let re = c.re() * &scale;
            let im = c.im() * &scale;
            debug_assert!(re.is_integer() && im.is_integer());
            (re.to_integer(), im.to_integer())
        })
        .collect();
    let a0 = zi.first().unwrap();
    let an = zi.last().unwrap();
    debug_assert!(!(a0.0.is_zero() && a0.1.is_zero()), "zero roots stripped first");
    let Some(ps) = gaussian_divisors(a0) else {
        return Vec::new();
    };
    let Some(qs) = gaussian_divisors(an) else {
        return Vec::new();
    };
    let units = [
        Gq::one(),
        -&Gq::one(),
        Gq::i(),
        -&Gq::i(),
    ];
    let mut found = Vec::new();
    for p in &ps {
        for q in &qs {
            let base = p / q;
            for u in &units {
                let cand = &base * u;
                if found.contains(&cand) {
                    continue;
                }
                if eval_uni(coeffs, &cand).is_zero() {
                    found.push(cand);
                }
            }
        }
    }
    found.sort_by(|a, b| a.cmp_re_im(b));
    found
}

fn eval_uni(coeffs: &[Gq], x: &Gq) -> Gq {
    let mut acc = Gq::zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// Divide by (x - r) when the division is exact.
fn deflate(coeffs: &[Gq], r: &Gq) -> Option<Vec<Gq>> {
    if coeffs.len() < 2 || !eval_uni(coeffs, r).is_zero() {
        return None;
    }
    let mut q = vec![Gq::zero(); coeffs.len() - 1];
    let mut carry = Gq::zero();
    for k in (1..coeffs.len()).rev() {
        carry = &coeffs[k] + &(&carry * r);
        q[k - 1] = carry.clone();
    }
    Some(q)
}

/// First-quadrant divisors of a nonzero Gaussian integer, or `None` when
/// the norm is too large to enumerate.
fn gaussian_divisors(g: &(BigInt, BigInt)) -> Option<Vec<Gq>> {
    const NORM_CAP: u64 = 4_000_000;
    let norm_big = &g.0 * &g.0 + &g.1 * &g.1;
    let norm = norm_big.to_u64()?;
    if norm == 0 || norm > NORM_CAP {
        return None;
    }
    let bound = (norm as f64).sqrt() as i64 + 1;
    let gre = g.0.to_i64()?;
    let gim = g.1.to_i64()?;
    let mut out = Vec::new();
    for x in 0..=bound {
        for y in 0..=bound {
            if x == 0 && y == 0 {
                continue;
            }
            let nd = (x * x + y * y) as u64;
            if nd > norm || norm % nd != 0 {
                continue;
            }
            // d | g in Z[i] iff g * conj(d) / N(d) has integer parts.
            let re = gre * x + gim * y;
            let im = gim * x - gre * y;
            if re % nd as i64 == 0 && im % nd as i64 == 0 {
                out.push(Gq::from_parts(x, 1, y, 1));
            }
        }
    }
    Some(out)
}

// ---- Numeric fallback ----

/// Durand-Kerner simultaneous iteration for all complex roots.
pub fn durand_kerner(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.last().map_or(false, |x| x.norm() < 1e-300) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..=n).rev() {
            acc = acc * z + monic[k];
        }
        acc
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..500 {
        let mut delta: f64 = 0.0;
        for k in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != k {
                    den *= roots[k] - roots[j];
                }
            }
            let step = eval(roots[k]) / den;
            roots[k] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64, d: i64) -> Gq {
        Gq::from_ratio(n, d)
    }

    #[test]
    fn roots_of_eliminant_with_gaussian_roots() {
        // 4Y^3 + Y = Y (2Y - i)(2Y + i): roots 0, ±i/2
        let coeffs = vec![Gq::zero(), Gq::from_int(1), Gq::zero(), Gq::from_int(4)];
        let roots = all_roots(&coeffs);
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().all(Coord::is_exact));
        let set: Vec<Gq> = roots.iter().map(|r| r.exact().unwrap().clone()).collect();
        assert!(set.contains(&Gq::zero()));
        assert!(set.contains(&Gq::from_parts(0, 1, 1, 2)));
        assert!(set.contains(&Gq::from_parts(0, 1, -1, 2)));
    }

    #[test]
    fn irrational_roots_fall_back_to_numeric() {
        // x^2 - 2: roots ±sqrt(2), not in Q(i)
        let coeffs = vec![Gq::from_int(-2), Gq::zero(), Gq::from_int(1)];
        let roots = all_roots(&coeffs);
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| !r.is_exact()));
        for r in &roots {
            assert!((r.to_complex().re.abs() - 2f64.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn solve_2var_system_exact() {
        // { -Z - 2Y^2, Y(1 - 2Z) } -> (0,0), (±i/2, 1/2)
        let y = MultiPoly::var("Y");
        let z = MultiPoly::var("Z");
        let p1 = z.neg_ref().sub_ref(&y.pow(2).scale(&Gq::from_int(2)));
        let p2 = y.mul_ref(&MultiPoly::one().sub_ref(&z.scale(&Gq::from_int(2))));
        let vars = vec!["Y".to_string(), "Z".to_string()];
        let Solutions::Finite(pts) = solve_system(&[p1, p2], &vars) else {
            panic!("expected finite solution set");
        };
        assert_eq!(pts.len(), 3);
        let expect = [
            vec![Gq::zero(), Gq::zero()],
            vec![Gq::from_parts(0, 1, 1, 2), g(1, 2)],
            vec![Gq::from_parts(0, 1, -1, 2), g(1, 2)],
        ];
        for e in expect {
            assert!(pts.iter().any(|p| p
                .iter()
                .zip(e.iter())
                .all(|(c, v)| c.exact() == Some(v))));
        }
    }

    #[test]
    fn solve_3var_balance_system() {
        // Balance system for the classic quadratic 3D model:
        // a + b = 0, -ac + 2b = 0, ab + 2c = 0 -> a=±2i, b=∓2i, c=-2
        let (a, b, c) = (MultiPoly::var("a"), MultiPoly::var("b"), MultiPoly::var("c"));
        let e1 = a.add_ref(&b);
        let e2 = a.mul_ref(&c).neg_ref().add_ref(&b.scale(&Gq::from_int(2)));
        let e3 = a.mul_ref(&b).add_ref(&c.scale(&Gq::from_int(2)));
        let vars: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let Solutions::Finite(pts) = solve_system(&[e1, e2, e3], &vars) else {
            panic!("expected finite");
        };
        let nonzero: Vec<&Point> = pts
            .iter()
            .filter(|p| p.iter().all(|c| c.exact().map_or(false, |g| !g.is_zero())))
            .collect();
        assert_eq!(nonzero.len(), 2);
        let two_i = Gq::from_parts(0, 1, 2, 1);
        assert!(nonzero.iter().any(|p| p[0].exact() == Some(&two_i)
            && p[1].exact() == Some(&(-&two_i))
            && p[2].exact() == Some(&Gq::from_int(-2))));
    }

    #[test]
    fn positive_dimensional_is_reported() {
        // Single equation in two variables.
        let p = MultiPoly::var("u").mul_ref(&MultiPoly::var("w"));
        let vars = vec!["u".to_string(), "w".to_string()];
        assert!(matches!(
            solve_system(&[p], &vars),
            Solutions::PositiveDimensional(_)
        ));
    }
}
