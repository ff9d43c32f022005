//! Built-in catalog of the analyzed systems and their stated first
//! integrals, constructed directly in exact arithmetic. The text files
//! under `systems/` carry the same definitions through the parser; tests
//! cross-check the two routes against each other.

use crate::field::{ExpSymbol, VField};
use crate::gauss::Gq;
use crate::ratexpr::RatExpr;
use std::collections::BTreeSet;

fn v(name: &str) -> RatExpr {
    RatExpr::var(name)
}

fn params(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn statevars() -> Vec<String> {
    vec!["x".into(), "y".into(), "z".into()]
}

/// The three-parameter quadratic model `(sigma, epsilon, b)`:
/// `x' = y - sigma*epsilon*x, y' = -xz + x - epsilon*y, z' = xy - epsilon*b*z`.
pub fn lorenz() -> VField {
    let (x, y, z) = (v("x"), v("y"), v("z"));
    let (s, e, b) = (v("sigma"), v("epsilon"), v("b"));
    VField::new(
        "lorenz",
        statevars(),
        vec![
            (&y - &(&(&s * &e) * &x)),
            (&(&(&x.neg_ref() * &z) + &x) - &(&e * &y)),
            (&(&x * &y) - &(&(&e * &b) * &z)),
        ],
        params(&["sigma", "epsilon", "b"]),
        Vec::new(),
    )
    .expect("catalog system is well formed")
}

/// The `(1/3, epsilon, 0)` member, with `epsilon` symbolic.
pub fn system21() -> VField {
    let (x, y, z) = (v("x"), v("y"), v("z"));
    let e = v("epsilon");
    VField::new(
        "system21",
        statevars(),
        vec![
            (&y - &(&e * &x).scale(&Gq::from_ratio(1, 3))),
            (&(&(&x.neg_ref() * &z) + &x) - &(&e * &y)),
            (&x * &y),
        ],
        params(&["epsilon"]),
        Vec::new(),
    )
    .expect("catalog system is well formed")
}

/// The four-parameter modification of `system21` with constant drifts.
pub fn m21() -> VField {
    let (x, y, z) = (v("x"), v("y"), v("z"));
    let (a1, a2, a3, e) = (v("alpha1"), v("alpha2"), v("alpha3"), v("epsilon"));
    let i = RatExpr::i();
    let e2 = (&e * &e).clone();
    let a3sq = (&a3 * &a3).clone();

    // 8(9 a1 - e a3) + i(24 a2 + a3^2 - 16 e^2), all over 72
    let cx = (&(&a1.scale(&Gq::from_int(9)) - &(&e * &a3)).scale(&Gq::from_int(8))
        + &(&i
            * &(&(&a2.scale(&Gq::from_int(24)) + &a3sq) - &e2.scale(&Gq::from_int(16)))))
        .scale(&Gq::from_ratio(1, 72));
    let fx = (&(&y - &(&e * &x).scale(&Gq::from_ratio(1, 3))) + &cx).clone();

    // y' = -xz - (24 a2 + a3^2 - 8 e^2)/72 x - e y + (a3 - 4ie)/6 z + const
    let ylin = a2
        .scale(&Gq::from_int(24))
        .add_ref(&a3sq)
        .sub_ref(&e2.scale(&Gq::from_int(8)))
        .scale(&Gq::from_ratio(1, 72));
    let a3m4ie = a3.sub_ref(&i.mul_ref(&e).scale(&Gq::from_int(4)));
    // 24 a2 a3 + a3^3 - 432 a1 e + 64 a3 e^2 - 2ie(120 a2 + 5 a3^2 - 16 e^2)
    let cy = a2
        .mul_ref(&a3)
        .scale(&Gq::from_int(24))
        .add_ref(&a3sq.mul_ref(&a3))
        .sub_ref(&a1.mul_ref(&e).scale(&Gq::from_int(432)))
        .add_ref(&a3.mul_ref(&e2).scale(&Gq::from_int(64)))
        .sub_ref(
            &i.mul_ref(&e).scale(&Gq::from_int(2)).mul_ref(
                &a2.scale(&Gq::from_int(120))
                    .add_ref(&a3sq.scale(&Gq::from_int(5)))
                    .sub_ref(&e2.scale(&Gq::from_int(16))),
            ),
        )
        .scale(&Gq::from_ratio(1, 432));
    let fy = x
        .neg_ref()
        .mul_ref(&z)
        .sub_ref(&ylin.mul_ref(&x))
        .sub_ref(&e.mul_ref(&y))
        .add_ref(&a3m4ie.mul_ref(&z).scale(&Gq::from_ratio(1, 6)))
        .add_ref(&cy);

    // z' = xy + (12(6 a1 - e a3) + i(24 a2 + a3^2))/72 x - (a3-4ie)/6 y - const
    let inner = a1
        .scale(&Gq::from_int(6))
        .sub_ref(&e.mul_ref(&a3))
        .scale(&Gq::from_int(12))
        .add_ref(&i.mul_ref(&a2.scale(&Gq::from_int(24)).add_ref(&a3sq)));
    let zlin = inner.scale(&Gq::from_ratio(1, 72));
    let cz = a3m4ie.mul_ref(&inner).scale(&Gq::from_ratio(1, 432));
    let fz = x
        .mul_ref(&y)
        .add_ref(&zlin.mul_ref(&x))
        .sub_ref(&a3m4ie.mul_ref(&y).scale(&Gq::from_ratio(1, 6)))
        .sub_ref(&cz);

    VField::new(
        "m21",
        statevars(),
        vec![fx, fy, fz],
        params(&["alpha1", "alpha2", "alpha3", "epsilon"]),
        Vec::new(),
    )
    .expect("catalog system is well formed")
}

/// The `(2, 0, 1)` member: `x' = y, y' = -xz + x, z' = xy`.
pub fn system31() -> VField {
    let (x, y, z) = (v("x"), v("y"), v("z"));
    VField::new(
        "system31",
        statevars(),
        vec![y.clone(), (&(&x.neg_ref() * &z) + &x), (&x * &y)],
        BTreeSet::new(),
        Vec::new(),
    )
    .expect("catalog system is well formed")
}

/// The `(1, 3, 2)` member: `x' = y - 3x, y' = -xz + x - 3y, z' = xy - 6z`.
pub fn system41() -> VField {
    let (x, y, z) = (v("x"), v("y"), v("z"));
    VField::new(
        "system41",
        statevars(),
        vec![
            (&y - &x.scale(&Gq::from_int(3))),
            (&(&(&x.neg_ref() * &z) + &x) - &y.scale(&Gq::from_int(3))),
            (&(&x * &y) - &z.scale(&Gq::from_int(6))),
        ],
        BTreeSet::new(),
        Vec::new(),
    )
    .expect("catalog system is well formed")
}

/// The `(1, -3, 2)` member: `x' = y + 3x, y' = -xz + x + 3y, z' = xy + 6z`.
pub fn system51() -> VField {
    let (x, y, z) = (v("x"), v("y"), v("z"));
    VField::new(
        "system51",
        statevars(),
        vec![
            (&y + &x.scale(&Gq::from_int(3))),
            (&(&(&x.neg_ref() * &z) + &x) + &y.scale(&Gq::from_int(3))),
            (&(&x * &y) + &z.scale(&Gq::from_int(6))),
        ],
        BTreeSet::new(),
        Vec::new(),
    )
    .expect("catalog system is well formed")
}

/// The planar quadratic system obtained from `system41` by its integral
/// reduction and change of variables, with integral constant `I` and
/// exponential symbol `E = e^{-6t}`:
/// `x' = x^2 - xy - 2x, y' = y^2 - 3xy - 2y - (I/2) E`.
pub fn xy41() -> VField {
    let (x, y) = (v("x"), v("y"));
    let half_ie = (&v("I") * &v("E")).scale(&Gq::from_ratio(1, 2));
    VField::new(
        "xy41",
        vec!["x".into(), "y".into()],
        vec![
            (&(&(&x * &x) - &(&x * &y)) - &x.scale(&Gq::from_int(2))),
            (&(&(&(&y * &y) - &(&x * &y).scale(&Gq::from_int(3))) - &y.scale(&Gq::from_int(2)))
                - &half_ie),
        ],
        params(&["I"]),
        vec![ExpSymbol { name: "E".into(), rate: Gq::from_int(-6) }],
    )
    .expect("catalog system is well formed")
}

/// `x^2 - 2z`, conserved by `system31`.
pub fn integral_31() -> RatExpr {
    (&(&v("x") * &v("x"))) - &v("z").scale(&Gq::from_int(2))
}

/// `E (x^2 - 2z)` with `rate(E) = 6`, conserved by `system41`.
pub fn integral_41() -> RatExpr {
    v("E").mul_ref(&integral_31())
}

/// `E (x^2 - 2z)` with `rate(E) = -6`, conserved by `system51`.
pub fn integral_51() -> RatExpr {
    v("E").mul_ref(&integral_31())
}

/// `system41` extended with the rate-6 exponential symbol so that
/// `integral_41` lives in its symbol universe.
pub fn system41_with_exp() -> VField {
    let mut f = system41();
    f.expsyms.push(ExpSymbol { name: "E".into(), rate: Gq::from_int(6) });
    f
}

/// `system51` extended with the rate(-6) exponential symbol.
pub fn system51_with_exp() -> VField {
    let mut f = system51();
    f.expsyms.push(ExpSymbol { name: "E".into(), rate: Gq::from_int(-6) });
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn special_members_are_parameter_instances() {
        let bind = |s: i64, sd: i64, e: i64, b: i64| -> BTreeMap<String, Gq> {
            [
                ("sigma".to_string(), Gq::from_ratio(s, sd)),
                ("epsilon".to_string(), Gq::from_int(e)),
                ("b".to_string(), Gq::from_int(b)),
            ]
            .into_iter()
            .collect()
        };
        let l = lorenz();
        assert_eq!(
            l.bind_params(&bind(2, 1, 0, 1)).unwrap().components,
            system31().components
        );
        assert_eq!(
            l.bind_params(&bind(1, 1, 3, 2)).unwrap().components,
            system41().components
        );
        assert_eq!(
            l.bind_params(&bind(1, 1, -3, 2)).unwrap().components,
            system51().components
        );
    }

    #[test]
    fn exponential_integrals_are_conserved() {
        assert!(system41_with_exp().lie_derivative(&integral_41()).is_zero());
        assert!(system51_with_exp().lie_derivative(&integral_51()).is_zero());
    }

    #[test]
    fn bundled_files_match_the_catalog() {
        let cases: [(&str, VField); 7] = [
            (
                include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../systems/lorenz.sys")),
                lorenz(),
            ),
            (
                include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../systems/system21.sys")),
                system21(),
            ),
            (
                include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../systems/system31.sys")),
                system31(),
            ),
            (
                include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../systems/system41.sys")),
                system41_with_exp(),
            ),
            (
                include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../systems/system51.sys")),
                system51_with_exp(),
            ),
            (
                include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../systems/xy41.sys")),
                xy41(),
            ),
            (
                include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../systems/m21.sys")),
                m21(),
            ),
        ];
        for (text, want) in cases {
            let doc = crate::sysdef::parse(text).unwrap();
            let got = doc.to_field().unwrap();
            assert_eq!(got.statevars, want.statevars, "{}", want.name);
            assert_eq!(got.components, want.components, "{}", want.name);
            assert_eq!(got.params, want.params, "{}", want.name);
            for (g, w) in got.expsyms.iter().zip(want.expsyms.iter()) {
                assert_eq!((&g.name, &g.rate), (&w.name, &w.rate));
            }
        }
    }

    #[test]
    fn declared_integrals_are_conserved_by_their_files() {
        for text in [
            include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../systems/system31.sys")),
            include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../systems/system41.sys")),
            include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../systems/system51.sys")),
        ] {
            let doc = crate::sysdef::parse(text).unwrap();
            let field = doc.to_field().unwrap();
            let integral = doc.integral("I").unwrap();
            assert!(field.lie_derivative(integral).is_zero(), "{}", doc.name);
        }
    }
}
