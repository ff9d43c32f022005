//! Leading-order pole test: enumerate dominant balances
//! `x_i ~ a_i (t - t1)^(-m_i)` of a polynomial autonomous system and turn
//! their exponents into weighted compactification charts.

use crate::charts::{weighted_chart, weighted_chart_2d, Chart};
use crate::error::FieldError;
use crate::field::VField;
use crate::gauss::Gq;
use crate::poly::MultiPoly;
use crate::solve::{self, Solutions};
use std::collections::BTreeMap;

/// One consistent leading-order behaviour: exponents `m` and the exact
/// nonzero leading coefficients solving the balance equations.
#[derive(Clone, Debug, PartialEq)]
pub struct Balance {
    pub exponents: Vec<u32>,
    pub coefficients: Vec<Gq>,
    pub branch: usize,
}

/// Diagnostics for one exponent vector that was considered.
#[derive(Clone, Debug)]
pub enum BalanceNote {
    /// A dominant coefficient equation involves symbolic parameters.
    SymbolicDominantTerms(Vec<u32>),
    /// The coefficient system has a positive-dimensional solution set.
    NonIsolated(Vec<u32>),
}

#[derive(Clone, Debug, Default)]
pub struct BalanceScan {
    pub balances: Vec<Balance>,
    pub notes: Vec<BalanceNote>,
}

/// Default bound on the exponent search; every case in scope needs 2.
pub const DEFAULT_MAX_EXP: u32 = 6;

/// Enumerate all dominant balances with positive integer exponents up to
/// `max_exp`.
///
/// For each candidate exponent vector, each equation's most singular
/// order must be achieved by at least two terms (the time derivative
/// counts as one); the resulting coefficient system is solved exactly
/// over Q(i) and only fully nonzero solutions are kept.
pub fn dominant_balances(v: &VField, max_exp: u32) -> Result<BalanceScan, FieldError> {
    let n = v.dim();
    if !(2..=3).contains(&n) {
        return Err(FieldError::UnsupportedDimension(n));
    }
    for c in &v.components {
        if !c.is_polynomial() {
            return Err(FieldError::DegenerateChart);
        }
        if v.expsyms.iter().any(|e| c.contains_var(&e.name)) {
            // Exponential symbols are regular (order-0) factors near a
            // movable singularity, so terms carrying them never become
            // dominant; treat them as frozen constants by ignoring the
            // exponent they do not contribute. They are handled below by
            // giving them weight zero in the pole order.
        }
    }
    let coeff_vars: Vec<String> = (0..n).map(|k| format!("_a{k}")).collect();
    let mut scan = BalanceScan::default();
    let mut stack = vec![Vec::<u32>::new()];
    while let Some(prefix) = stack.pop() {
        if prefix.len() == n {
            try_exponents(v, &prefix, &coeff_vars, &mut scan);
            continue;
        }
        for m in 1..=max_exp {
            let mut next = prefix.clone();
            next.push(m);
            stack.push(next);
        }
    }
    // Deterministic order: by exponents, then coefficients.
    scan.balances.sort_by(|a, b| {
        a.exponents.cmp(&b.exponents).then_with(|| {
            for (x, y) in a.coefficients.iter().zip(b.coefficients.iter()) {
                let ord = y.cmp_re_im(x);
                if ord != std::cmp::Ordering::Equal {
                    return ord;
                }
            }
            std::cmp::Ordering::Equal
        })
    });
    for (k, b) in scan.balances.iter_mut().enumerate() {
        b.branch = k;
    }
    Ok(scan)
}

fn try_exponents(v: &VField, m: &[u32], coeff_vars: &[String], scan: &mut BalanceScan) {
    let n = v.dim();
    let statevars = &v.statevars;
    // Pole order of a monomial under the ansatz; exponential symbols and
    // parameters are order 0.
    let order_of = |mono: &[u32], vars: &[String]| -> i64 {
        let mut total = 0i64;
        for (k, &e) in mono.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if let Some(j) = statevars.iter().position(|s| *s == vars[k]) {
                total += e as i64 * m[j] as i64;
            }
        }
        total
    };

    let mut equations = Vec::with_capacity(n);
    for (i, comp) in v.components.iter().enumerate() {
        let poly = comp.num();
        let lhs_order = m[i] as i64 + 1;
        let rhs_order = poly
            .terms()
            .map(|(mono, _)| order_of(mono, poly.vars()))
            .max()
            .unwrap_or(i64::MIN);
        let dominant = lhs_order.max(rhs_order);
        let mut terms_at_dominant = 0usize;
        // Coefficient equation at the dominant order: RHS contributions
        // plus m_i * a_i from the derivative when it participates.
        let mut eq = MultiPoly::zero();
        if lhs_order == dominant {
            terms_at_dominant += 1;
            eq = eq.add_ref(&MultiPoly::monomial(
                Gq::from_int(m[i] as i64),
                &coeff_vars[i],
                1,
            ));
        }
        for (mono, c) in poly.terms() {
            if order_of(mono, poly.vars()) != dominant {
                continue;
            }
            terms_at_dominant += 1;
            // Translate the state monomial into coefficient variables;
            // non-state symbols (parameters) would make the dominant
            // equation symbolic.
            let mut term = MultiPoly::constant(c.clone());
            let mut symbolic = false;
            for (k, &e) in mono.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match statevars.iter().position(|s| *s == poly.vars()[k]) {
                    Some(j) => {
                        term = term.mul_ref(&MultiPoly::monomial(Gq::one(), &coeff_vars[j], e))
                    }
                    None => symbolic = true,
                }
            }
            if symbolic {
                scan.notes.push(BalanceNote::SymbolicDominantTerms(m.to_vec()));
                return;
            }
            eq = eq.add_ref(&term);
        }
        if terms_at_dominant < 2 {
            return; // no balance: the dominant order is a lone term
        }
        equations.push(eq);
    }

    match solve::solve_system(&equations, coeff_vars) {
        Solutions::Finite(points) => {
            for p in points {
                let Some(coeffs) = p
                    .iter()
                    .map(|c| c.exact().cloned())
                    .collect::<Option<Vec<Gq>>>()
                else {
                    continue;
                };
                if coeffs.iter().any(Gq::is_zero) {
                    continue;
                }
                // Exact resubstitution: every dominant equation vanishes.
                let binds: BTreeMap<String, Gq> = coeff_vars
                    .iter()
                    .cloned()
                    .zip(coeffs.iter().cloned())
                    .collect();
                debug_assert!(equations
                    .iter()
                    .all(|e| e.eval(&binds).map_or(false, |v| v.is_zero())));
                scan.balances.push(Balance {
                    exponents: m.to_vec(),
                    coefficients: coeffs,
                    branch: 0,
                });
            }
        }
        Solutions::PositiveDimensional(_) => {
            scan.notes.push(BalanceNote::NonIsolated(m.to_vec()));
        }
    }
}

/// The weighted chart suggested by a balance's pole orders.
pub fn balance_to_chart(bal: &Balance, statevars: &[String]) -> Result<Chart, FieldError> {
    match bal.exponents.len() {
        3 => weighted_chart(
            (bal.exponents[0], bal.exponents[1], bal.exponents[2]),
            statevars,
        ),
        2 => weighted_chart_2d((bal.exponents[0], bal.exponents[1]), statevars),
        n => Err(FieldError::UnsupportedDimension(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratexpr::RatExpr;
    use crate::systems;
    use std::collections::BTreeSet;

    fn gi(n: i64) -> Gq {
        &Gq::from_int(n) * &Gq::i()
    }

    #[test]
    fn quadratic_model_balance() {
        let scan = dominant_balances(&systems::lorenz(), DEFAULT_MAX_EXP).unwrap();
        assert_eq!(scan.balances.len(), 2, "balances: {:?}", scan.balances);
        for b in &scan.balances {
            assert_eq!(b.exponents, vec![1, 2, 2]);
        }
        // Branches a = ±2i, b = ∓2i, c = -2, and the consistency.
        let plus = scan
            .balances
            .iter()
            .find(|b| b.coefficients[0] == gi(2))
            .unwrap();
        assert_eq!(plus.coefficients, vec![gi(2), gi(-2), Gq::from_int(-2)]);
        let minus = scan
            .balances
            .iter()
            .find(|b| b.coefficients[0] == gi(-2))
            .unwrap();
        assert_eq!(minus.coefficients, vec![gi(-2), gi(2), Gq::from_int(-2)]);
        // Conjugate pairing for a real-coefficient field.
        for b in &scan.balances {
            let conj: Vec<Gq> = b.coefficients.iter().map(Gq::conj).collect();
            assert!(scan.balances.iter().any(|c| c.coefficients == conj));
        }
        // Balance identities, re-verified exactly: b = -a, a c = 2b, a^2 = -4.
        for b in &scan.balances {
            let (a, bb, c) = (&b.coefficients[0], &b.coefficients[1], &b.coefficients[2]);
            assert_eq!(bb, &-a);
            assert_eq!(&(a * c), &(&Gq::from_int(2) * bb));
            assert_eq!(&(a * a), &Gq::from_int(-4));
        }
    }

    #[test]
    fn linear_field_has_no_balance() {
        let v = crate::field::VField::new(
            "linear",
            systems::lorenz().statevars.clone(),
            vec![
                RatExpr::var("y"),
                RatExpr::var("x").neg_ref(),
                RatExpr::var("z"),
            ],
            BTreeSet::new(),
            Vec::new(),
        )
        .unwrap();
        let scan = dominant_balances(&v, DEFAULT_MAX_EXP).unwrap();
        assert!(scan.balances.is_empty());
    }

    #[test]
    fn planar_quadratic_balance() {
        // Oracle: brute-force the (1,1) balance of the planar system by
        // hand. a(1 + a - b) = 0 and b(1 + b - 3a) = 0 give the nonzero
        // branch (1, 2).
        let scan = dominant_balances(&systems::xy41(), DEFAULT_MAX_EXP).unwrap();
        assert_eq!(scan.balances.len(), 1);
        let b = &scan.balances[0];
        assert_eq!(b.exponents, vec![1, 1]);
        assert_eq!(b.coefficients, vec![Gq::from_int(1), Gq::from_int(2)]);
    }

    #[test]
    fn balance_chart_matches_weighted() {
        let sv = systems::lorenz().statevars.clone();
        let bal = Balance {
            exponents: vec![1, 2, 2],
            coefficients: vec![gi(2), gi(-2), Gq::from_int(-2)],
            branch: 0,
        };
        let chart = balance_to_chart(&bal, &sv).unwrap();
        let expect = weighted_chart((1, 2, 2), &sv).unwrap();
        assert_eq!(chart.map.forward, expect.map.forward);
        // (1,1,1) gives the standard first chart shape; (2,4,4) reduces.
        let b2 = Balance { exponents: vec![2, 4, 4], ..bal.clone() };
        assert_eq!(
            balance_to_chart(&b2, &sv).unwrap().map.forward,
            expect.map.forward
        );
        let b3 = Balance { exponents: vec![1, 1, 1], ..bal };
        let u1ish = balance_to_chart(&b3, &sv).unwrap();
        assert_eq!(
            u1ish.map.forward[1],
            RatExpr::var("y").div_ref(&RatExpr::var("x")).unwrap()
        );
    }
}
