//! Property tests for the algebraic core: ring axioms, normalization,
//! calculus identities, and chart round-trips on randomized inputs.

use polyatlas::charts::{standard_p3_atlas, weighted_chart};
use polyatlas::field::{jacobian_det, pushforward, RationalMap};
use polyatlas::gauss::Gq;
use polyatlas::poly::MultiPoly;
use polyatlas::ratexpr::RatExpr;
use polyatlas::sample::Sampler;
use polyatlas::systems;
use proptest::prelude::*;
use std::collections::BTreeMap;

// ---- Generators ----

fn arb_gq() -> impl Strategy<Value = Gq> {
    (-9i64..=9, 1i64..=4, -9i64..=9, 1i64..=4)
        .prop_map(|(nr, dr, ni, di)| Gq::from_parts(nr, dr, ni, di))
}

fn arb_poly() -> impl Strategy<Value = MultiPoly> {
    let vars = ["x", "y", "z"];
    proptest::collection::vec((arb_gq(), 0u32..3, 0u32..3, 0u32..3), 0..5).prop_map(move |terms| {
        let mut p = MultiPoly::zero();
        for (c, ex, ey, ez) in terms {
            let mut t = MultiPoly::constant(c);
            for (v, e) in vars.iter().zip([ex, ey, ez]) {
                if e > 0 {
                    t = t.mul_ref(&MultiPoly::monomial(Gq::one(), v, e));
                }
            }
            p = p.add_ref(&t);
        }
        p
    })
}

fn arb_nonzero_poly() -> impl Strategy<Value = MultiPoly> {
    arb_poly().prop_filter("nonzero", |p| !p.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    // Ring axioms on random triples.
    #[test]
    fn poly_ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        prop_assert_eq!(a.add_ref(&b), b.add_ref(&a));
        prop_assert_eq!(a.mul_ref(&b), b.mul_ref(&a));
        prop_assert_eq!(
            a.add_ref(&b).add_ref(&c),
            a.add_ref(&b.add_ref(&c))
        );
        prop_assert_eq!(
            a.mul_ref(&b).mul_ref(&c),
            a.mul_ref(&b.mul_ref(&c))
        );
        prop_assert_eq!(
            a.mul_ref(&b.add_ref(&c)),
            a.mul_ref(&b).add_ref(&a.mul_ref(&c))
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    // Exact division undoes multiplication.
    #[test]
    fn exact_div_roundtrip(a in arb_poly(), b in arb_nonzero_poly()) {
        let prod = a.mul_ref(&b);
        prop_assert_eq!(prod.exact_div(&b).unwrap(), a);
    }
}

proptest! {
    // Dense random products make the worst case for the subresultant
    // sequence; a smaller case budget keeps the run short.
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Normalization is idempotent and leaves coprime parts.
    #[test]
    fn ratexpr_normalization(a in arb_poly(), b in arb_nonzero_poly(), c in arb_nonzero_poly()) {
        // Build (a c)/(b c); normalization must cancel the common factor.
        let r = RatExpr::new(a.mul_ref(&c), b.mul_ref(&c)).unwrap();
        prop_assert!(MultiPoly::gcd(r.num(), r.den()).is_one());
        let renorm = RatExpr::new(r.num().clone(), r.den().clone()).unwrap();
        prop_assert_eq!(&renorm, &r);
        // Denominator is monic in the lex-leading coefficient.
        prop_assert!(r.den().leading_coeff().unwrap().is_one());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    // Chain rule: d/dx of f(x -> g) equals (df ∘ g) * dg for univariate
    // substitution targets.
    #[test]
    fn derivative_chain_rule(f in arb_poly(), g in arb_poly()) {
        let fr = RatExpr::from_poly(f.substitute_poly("y", &MultiPoly::int(1)).substitute_poly("z", &MultiPoly::int(2)));
        let gr = RatExpr::from_poly(g.substitute_poly("y", &MultiPoly::int(0)).substitute_poly("z", &MultiPoly::int(1)));
        let binds: BTreeMap<String, RatExpr> = [("x".to_string(), gr.clone())].into_iter().collect();
        let composed = fr.substitute(&binds).unwrap();
        let lhs = composed.derivative("x");
        let rhs = fr.derivative("x").substitute(&binds).unwrap().mul_ref(&gr.derivative("x"));
        prop_assert_eq!(lhs, rhs);
    }
}

// ---- Chart and field properties (seeded sampler; heavier per case) ----

#[test]
fn pushforward_round_trips_on_random_fields() {
    let mut sampler = Sampler::new(31);
    let sv: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let atlas = standard_p3_atlas(&systems::lorenz()).unwrap();
    let weighted = weighted_chart((1, 2, 2), &sv).unwrap();
    let maps: Vec<&RationalMap> = atlas.charts[1..]
        .iter()
        .map(|c| &c.map)
        .chain(std::iter::once(&weighted.map))
        .collect();
    for _ in 0..5 {
        let f = sampler.random_poly_field(&sv, 2, 3);
        for m in &maps {
            let pushed = pushforward(&f, m).unwrap();
            let back = pushforward(&pushed, &m.invert()).unwrap();
            assert_eq!(back.components, f.components, "map {}", m.note);
        }
    }
}

#[test]
fn lie_derivative_is_a_derivation_on_random_inputs() {
    let mut sampler = Sampler::new(47);
    let sv: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    for _ in 0..10 {
        let v = sampler.random_poly_field(&sv, 2, 3);
        let f = RatExpr::from_poly(sampler.random_poly(&sv, 2, 3));
        let g = RatExpr::from_poly(sampler.random_poly(&sv, 2, 3));
        let lhs = v.lie_derivative(&f.mul_ref(&g));
        let rhs = f
            .mul_ref(&v.lie_derivative(&g))
            .add_ref(&g.mul_ref(&v.lie_derivative(&f)));
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn jacobian_of_map_composed_with_inverse_is_one() {
    let sv: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let atlas = standard_p3_atlas(&systems::lorenz()).unwrap();
    let weighted = weighted_chart((1, 2, 2), &sv).unwrap();
    for map in atlas.charts[1..]
        .iter()
        .map(|c| &c.map)
        .chain(std::iter::once(&weighted.map))
    {
        let round = map.compose(&map.invert()).unwrap();
        assert!(jacobian_det(&round).is_one(), "map {}", map.note);
    }
}

#[test]
fn resultant_vanishes_iff_common_factor_on_samples() {
    let mut sampler = Sampler::new(91);
    for _ in 0..20 {
        let a = sampler.random_poly(&["x".to_string()], 3, 3);
        let b = sampler.random_poly(&["x".to_string()], 3, 3);
        if a.is_zero() || b.is_zero() || a.is_constant() || b.is_constant() {
            continue;
        }
        let res = polyatlas::poly::resultant(&a, &b, "x");
        let gcd = MultiPoly::gcd(&a, &b);
        assert_eq!(res.is_zero(), !gcd.is_constant(), "a = {a}, b = {b}");
    }
}
