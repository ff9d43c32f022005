//! The explicit six-step resolution of the resolvable boundary pair of the
//! quadratic model: centering, a linear shear, and four blow-ups, ending in
//! coordinates `(u, v, w)` where the right-hand sides split into pole parts
//! plus polynomials. The vanishing of the pole coefficients yields four
//! polynomial conditions on `(sigma, epsilon, b)`, solved exactly into
//! parameter families.

use crate::charts::weighted_chart;
use crate::error::FieldError;
use crate::field::{pushforward, RationalMap, VField};
use crate::gauss::Gq;
use crate::poly::MultiPoly;
use crate::ratexpr::RatExpr;
use std::collections::BTreeMap;

/// One step of the resolution sequence.
#[derive(Clone, Debug)]
pub struct ResolutionStep {
    pub label: String,
    pub map: RationalMap,
    pub center: String,
}

fn v(name: &str) -> RatExpr {
    RatExpr::var(name)
}

fn half_i() -> RatExpr {
    RatExpr::i().scale(&Gq::from_ratio(1, 2))
}

/// `epsilon (b-1) / 3`
fn step3_center_q() -> RatExpr {
    v("epsilon")
        .mul_ref(&v("b").sub_ref(&RatExpr::one()))
        .scale(&Gq::from_ratio(1, 3))
}

/// `i epsilon (b - 2 sigma)`
fn step3_center_r() -> RatExpr {
    RatExpr::i()
        .mul_ref(&v("epsilon"))
        .mul_ref(&v("b").sub_ref(&v("sigma").scale(&Gq::from_int(2))))
}

/// `epsilon^2 (b-1)(7b - 15 sigma + 2) - 9`
fn inner_k() -> RatExpr {
    v("epsilon")
        .pow(2)
        .expect("positive power")
        .mul_ref(&v("b").sub_ref(&RatExpr::one()))
        .mul_ref(
            &v("b")
                .scale(&Gq::from_int(7))
                .sub_ref(&v("sigma").scale(&Gq::from_int(15)))
                .add_ref(&RatExpr::int(2)),
        )
        .sub_ref(&RatExpr::int(9))
}

/// `(i/9) K`
fn step4_center_q() -> RatExpr {
    RatExpr::i().scale(&Gq::from_ratio(1, 9)).mul_ref(&inner_k())
}

/// `(4/3) epsilon (b-1) r - (2/27) epsilon (b+2) K`, the curve the last
/// blow-up is centered on (with `r` the surviving third coordinate).
fn step5_center_q(r: &RatExpr) -> RatExpr {
    v("epsilon")
        .mul_ref(&v("b").sub_ref(&RatExpr::one()))
        .scale(&Gq::from_ratio(4, 3))
        .mul_ref(r)
        .sub_ref(
            &v("epsilon")
                .mul_ref(&v("b").add_ref(&RatExpr::int(2)))
                .scale(&Gq::from_ratio(2, 27))
                .mul_ref(&inner_k()),
        )
}

fn shift_map(
    old: [&str; 3],
    new: [&str; 3],
    centers: [RatExpr; 3],
    label: &str,
) -> Result<RationalMap, FieldError> {
    let forward: Vec<RatExpr> = old
        .iter()
        .zip(centers.iter())
        .map(|(o, c)| v(o).sub_ref(c))
        .collect();
    let inverse: Vec<RatExpr> = new
        .iter()
        .zip(centers.iter())
        .map(|(n, c)| v(n).add_ref(c))
        .collect();
    RationalMap::new(
        old.iter().map(|s| s.to_string()).collect(),
        new.iter().map(|s| s.to_string()).collect(),
        forward,
        inverse,
        label,
    )
}

/// Blow-up style map: keep the first coordinate, shift the selected
/// others by their centers and divide by the first.
fn blowup_map(
    old: [&str; 3],
    new: [&str; 3],
    q_center: RatExpr,
    divide_q: bool,
    r_center: RatExpr,
    divide_r: bool,
    label: &str,
) -> Result<RationalMap, FieldError> {
    let p = v(old[0]);
    let q_shift = v(old[1]).sub_ref(&q_center);
    let r_shift = v(old[2]).sub_ref(&r_center);
    let forward = vec![
        p.clone(),
        if divide_q {
            q_shift.div_ref(&p).map_err(FieldError::Algebra)?
        } else {
            q_shift
        },
        if divide_r {
            r_shift.div_ref(&p).map_err(FieldError::Algebra)?
        } else {
            r_shift
        },
    ];
    let np = v(new[0]);
    // Centers may reference the old third coordinate (a curve center); the
    // inverse substitutes the new variables into it.
    let renames: BTreeMap<String, RatExpr> = [(old[2].to_string(), rebuild_r(new, &r_center, divide_r))]
        .into_iter()
        .collect();
    let q_center_new = q_center
        .substitute(&renames)
        .map_err(FieldError::Algebra)?;
    let r_center_new = r_center.clone();
    let inverse = vec![
        np.clone(),
        if divide_q {
            v(new[1]).mul_ref(&np).add_ref(&q_center_new)
        } else {
            v(new[1]).add_ref(&q_center_new)
        },
        if divide_r {
            v(new[2]).mul_ref(&np).add_ref(&r_center_new)
        } else {
            v(new[2]).add_ref(&r_center_new)
        },
    ];
    RationalMap::new(
        old.iter().map(|s| s.to_string()).collect(),
        new.iter().map(|s| s.to_string()).collect(),
        forward,
        inverse,
        label,
    )
}

fn rebuild_r(new: [&str; 3], r_center: &RatExpr, divide_r: bool) -> RatExpr {
    if divide_r {
        v(new[2]).mul_ref(&v(new[0])).add_ref(r_center)
    } else {
        v(new[2]).add_ref(r_center)
    }
}

/// The six maps of the resolution at the `Y = +i/2` point of the weighted
/// chart, with symbolic parameters in the later centers.
pub fn resolution_sequence_p4() -> Result<Vec<ResolutionStep>, FieldError> {
    let mut steps = Vec::with_capacity(6);
    steps.push(ResolutionStep {
        label: "Step 0".into(),
        map: shift_map(
            ["X", "Y", "Z"],
            ["p0", "q0", "r0"],
            [RatExpr::zero(), half_i(), RatExpr::ratio(1, 2)],
            "center at the weighted-chart point (0, i/2, 1/2)",
        )?,
        center: "(X, Y, Z) = (0, i/2, 1/2)".into(),
    });
    // Linear shear q -> q - i r.
    let fwd = vec![v("p0"), v("q0").sub_ref(&RatExpr::i().mul_ref(&v("r0"))), v("r0")];
    let inv = vec![v("p1"), v("q1").add_ref(&RatExpr::i().mul_ref(&v("r1"))), v("r1")];
    steps.push(ResolutionStep {
        label: "Step 1".into(),
        map: RationalMap::new(
            vec!["p0".into(), "q0".into(), "r0".into()],
            vec!["p1".into(), "q1".into(), "r1".into()],
            fwd,
            inv,
            "diagonalizing shear",
        )?,
        center: "linear transformation q -> q - i r".into(),
    });
    steps.push(ResolutionStep {
        label: "Step 2".into(),
        map: blowup_map(
            ["p1", "q1", "r1"],
            ["p2", "q2", "r2"],
            RatExpr::zero(),
            true,
            RatExpr::zero(),
            true,
            "blow-up at the origin",
        )?,
        center: "(p1, q1, r1) = (0, 0, 0)".into(),
    });
    steps.push(ResolutionStep {
        label: "Step 3".into(),
        map: blowup_map(
            ["p2", "q2", "r2"],
            ["p3", "q3", "r3"],
            step3_center_q(),
            true,
            step3_center_r(),
            true,
            "blow-up at the parameter-dependent point",
        )?,
        center: "(p2, q2, r2) = (0, epsilon(b-1)/3, i epsilon(b-2 sigma))".into(),
    });
    steps.push(ResolutionStep {
        label: "Step 4".into(),
        map: blowup_map(
            ["p3", "q3", "r3"],
            ["p4", "q4", "r4"],
            step4_center_q(),
            true,
            RatExpr::zero(),
            false,
            "blow-up along a curve",
        )?,
        center: "p3 = 0, q3 = (i/9)(epsilon^2(b-1)(7b-15 sigma+2)-9)".into(),
    });
    steps.push(ResolutionStep {
        label: "Step 5".into(),
        map: blowup_map(
            ["p4", "q4", "r4"],
            ["u", "v", "w"],
            step5_center_q(&v("r4")),
            true,
            RatExpr::zero(),
            false,
            "blow-up along a curve",
        )?,
        center: "p4 = 0, q4 = (4/3) eps (b-1) r4 - (2/27) eps (b+2) (eps^2(b-1)(7b-15 sigma+2)-9)"
            .into(),
    });
    Ok(steps)
}

/// The conjugate sequence, centered at the `Y = -i/2` point.
pub fn resolution_sequence_p5() -> Result<Vec<ResolutionStep>, FieldError> {
    Ok(resolution_sequence_p4()?
        .into_iter()
        .map(|s| ResolutionStep {
            label: s.label,
            map: s.map.conj(),
            center: format!("conjugate of: {}", s.center),
        })
        .collect())
}

/// The system after the full resolution pipeline, with its Laurent data.
#[derive(Clone, Debug)]
pub struct ResolvedSystem {
    pub field: VField,
    /// Laurent coefficients in `u` of each component: `(power, coefficient)`.
    pub laurent: Vec<Vec<(i64, MultiPoly)>>,
    /// Coefficient of `u^-2` in `dv/dt`.
    pub pole_v2: MultiPoly,
    /// `w`-linear coefficient of `u^-1` in `dv/dt`.
    pub pole_v1_w: MultiPoly,
    /// `w`-free part of `u^-1` in `dv/dt`.
    pub pole_v1_const: MultiPoly,
    /// Coefficient of `u^-1` in `dw/dt`.
    pub pole_w1: MultiPoly,
    /// Polynomial remainders of the three components.
    pub polynomial_parts: Vec<MultiPoly>,
}

/// Push the quadratic model (or a parameter instance of it) through the
/// weighted chart and the six resolution steps, then split each component
/// into exact pole coefficients plus a polynomial remainder.
///
/// `params` binds any of `sigma`, `epsilon`, `b` in both the field and the
/// parameter-dependent blow-up centers; leave it empty for the fully
/// symbolic resolution.
pub fn apply_resolution(
    base: &VField,
    params: &BTreeMap<String, Gq>,
    conjugate: bool,
) -> Result<ResolvedSystem, FieldError> {
    let base = if params.is_empty() {
        base.clone()
    } else {
        base.bind_params(params)?
    };
    let chart = weighted_chart((1, 2, 2), &base.statevars)?;
    let chart_map = if conjugate { chart.map.conj() } else { chart.map };
    let mut field = pushforward(&base, &chart_map)?;
    let steps = if conjugate {
        resolution_sequence_p5()?
    } else {
        resolution_sequence_p4()?
    };
    for s in &steps {
        let map = if params.is_empty() {
            s.map.clone()
        } else {
            s.map.bind_params(params)?
        };
        field = pushforward(&field, &map)?;
    }
    let mut laurent = Vec::with_capacity(3);
    let mut polynomial_parts = Vec::with_capacity(3);
    for c in &field.components {
        let parts = c.laurent_in("u").map_err(FieldError::Algebra)?;
        let mut poly_part = MultiPoly::zero();
        for (k, coeff) in &parts {
            if *k >= 0 {
                poly_part = poly_part
                    .add_ref(&coeff.mul_ref(&MultiPoly::monomial(Gq::one(), "u", *k as u32)));
            }
        }
        polynomial_parts.push(poly_part);
        laurent.push(parts);
    }
    let grab = |comp: usize, pow: i64| -> MultiPoly {
        laurent[comp]
            .iter()
            .find(|(k, _)| *k == pow)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(MultiPoly::zero)
    };
    let v1 = grab(1, -1);
    let v1_uni = v1.to_univariate("w");
    let pole_v1_const = v1_uni.first().cloned().unwrap_or_else(MultiPoly::zero);
    let pole_v1_w = v1_uni.get(1).cloned().unwrap_or_else(MultiPoly::zero);
    Ok(ResolvedSystem {
        pole_v2: grab(1, -2),
        pole_v1_w,
        pole_v1_const,
        pole_w1: grab(2, -1),
        field,
        laurent,
        polynomial_parts,
    })
}

/// The four published polynomial conditions on `(sigma, epsilon, b)`.
pub fn condition_polynomials() -> [MultiPoly; 4] {
    let e = MultiPoly::var("epsilon");
    let s = MultiPoly::var("sigma");
    let b = MultiPoly::var("b");
    let one = MultiPoly::one();
    let b1 = b.sub_ref(&one);
    let b2s = b.sub_ref(&s.scale(&Gq::from_int(2)));
    let b3s1 = b.add_ref(&s.scale(&Gq::from_int(3))).sub_ref(&one);
    let bm3s1 = b.sub_ref(&s.scale(&Gq::from_int(3))).add_ref(&one);
    // b^2 - 5b - 2 - 3(b-2) sigma
    let q1 = b
        .pow(2)
        .sub_ref(&b.scale(&Gq::from_int(5)))
        .sub_ref(&MultiPoly::int(2))
        .sub_ref(&b.sub_ref(&MultiPoly::int(2)).scale(&Gq::from_int(3)).mul_ref(&s));
    // epsilon^2 (b-1)(7b - 15 sigma + 2) - 9
    let q2 = e
        .pow(2)
        .mul_ref(&b1)
        .mul_ref(
            &b.scale(&Gq::from_int(7))
                .sub_ref(&s.scale(&Gq::from_int(15)))
                .add_ref(&MultiPoly::int(2)),
        )
        .sub_ref(&MultiPoly::int(9));
    [
        e.mul_ref(&b1).mul_ref(&b2s).mul_ref(&b3s1),
        b1.mul_ref(&bm3s1),
        q1.mul_ref(&q2),
        e.mul_ref(&b2s).mul_ref(&b3s1),
    ]
}

/// Human-readable factored display of the four conditions.
pub fn condition_display() -> [&'static str; 4] {
    [
        "epsilon*(b - 1)*(b - 2*sigma)*(b + 3*sigma - 1)",
        "(b - 1)*(b - 3*sigma + 1)",
        "(b^2 - 5*b - 2 - 3*(b - 2)*sigma)*(epsilon^2*(b - 1)*(7*b - 15*sigma + 2) - 9)",
        "epsilon*(b - 2*sigma)*(b + 3*sigma - 1)",
    ]
}

/// How one computed pole coefficient relates to its published condition.
#[derive(Clone, Debug)]
pub struct ConditionMatch {
    pub condition: usize,
    /// `pole = constant * epsilon^eps_power * condition` when `matches`.
    pub matches: bool,
    pub constant: Option<Gq>,
    pub eps_power: u32,
}

/// Compare the symbolic pole coefficients against the published condition
/// polynomials, recording the constant (and any stray `epsilon` power).
pub fn compare_conditions(rs: &ResolvedSystem) -> Vec<ConditionMatch> {
    let conds = condition_polynomials();
    let poles = [&rs.pole_v2, &rs.pole_v1_w, &rs.pole_v1_const, &rs.pole_w1];
    let eps = MultiPoly::var("epsilon");
    poles
        .iter()
        .zip(conds.iter())
        .enumerate()
        .map(|(k, (pole, cond))| {
            let mut q = match pole.exact_div(cond) {
                Ok(q) => q,
                Err(_) => {
                    return ConditionMatch {
                        condition: k + 1,
                        matches: false,
                        constant: None,
                        eps_power: 0,
                    }
                }
            };
            let mut eps_power = 0;
            while let Some(c) = q.constant_value() {
                return ConditionMatch {
                    condition: k + 1,
                    matches: !c.is_zero(),
                    constant: Some(c),
                    eps_power,
                };
            }
            loop {
                match q.exact_div(&eps) {
                    Ok(next) => {
                        eps_power += 1;
                        q = next;
                        if let Some(c) = q.constant_value() {
                            return ConditionMatch {
                                condition: k + 1,
                                matches: !c.is_zero(),
                                constant: Some(c),
                                eps_power,
                            };
                        }
                    }
                    Err(_) => {
                        return ConditionMatch {
                            condition: k + 1,
                            matches: false,
                            constant: None,
                            eps_power,
                        }
                    }
                }
            }
        })
        .collect()
}

/// Exact membership test against the four published conditions.
pub fn check_resolvable(sigma: &Gq, epsilon: &Gq, b: &Gq) -> bool {
    let binds: BTreeMap<String, Gq> = [
        ("sigma".to_string(), sigma.clone()),
        ("epsilon".to_string(), epsilon.clone()),
        ("b".to_string(), b.clone()),
    ]
    .into_iter()
    .collect();
    condition_polynomials()
        .iter()
        .all(|c| c.eval(&binds).map_or(false, |v| v.is_zero()))
}

// ---- Exact solution of the conditions ----

/// `epsilon` slot of a parameter family.
#[derive(Clone, Debug, PartialEq)]
pub enum EpsilonValue {
    Fixed(Gq),
    Free,
}

/// One solution family of the four conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterFamily {
    pub sigma: Gq,
    pub epsilon: EpsilonValue,
    pub b: Gq,
}

impl ParameterFamily {
    /// A concrete member, with `eps` substituted when the slot is free.
    pub fn member(&self, eps: &Gq) -> (Gq, Gq, Gq) {
        let e = match &self.epsilon {
            EpsilonValue::Fixed(v) => v.clone(),
            EpsilonValue::Free => eps.clone(),
        };
        (self.sigma.clone(), e, self.b.clone())
    }
}

/// Solve the four conditions by a finite case split over their factors,
/// verifying every candidate family by exact substitution.
pub fn solve_conditions() -> Vec<ParameterFamily> {
    // Factor lists of the four conditions, as (name, poly) in (sigma, b)
    // or the epsilon-bearing markers.
    #[derive(Clone, Copy, PartialEq)]
    enum F {
        Eps,
        B1,     // b - 1
        B2S,    // b - 2 sigma
        B3S1,   // b + 3 sigma - 1
        BM3S1,  // b - 3 sigma + 1
        Q1,     // b^2 - 5b - 2 - 3(b-2) sigma
        Q2,     // eps^2 (b-1)(7b-15 sigma+2) - 9
    }
    let choices: [&[F]; 4] = [
        &[F::Eps, F::B1, F::B2S, F::B3S1],
        &[F::B1, F::BM3S1],
        &[F::Q1, F::Q2],
        &[F::Eps, F::B2S, F::B3S1],
    ];

    let sb_poly = |f: &F| -> Option<MultiPoly> {
        let s = MultiPoly::var("sigma");
        let b = MultiPoly::var("b");
        let one = MultiPoly::one();
        match f {
            F::B1 => Some(b.sub_ref(&one)),
            F::B2S => Some(b.sub_ref(&s.scale(&Gq::from_int(2)))),
            F::B3S1 => Some(b.add_ref(&s.scale(&Gq::from_int(3))).sub_ref(&one)),
            F::BM3S1 => Some(b.sub_ref(&s.scale(&Gq::from_int(3))).add_ref(&one)),
            F::Q1 => Some(
                b.pow(2)
                    .sub_ref(&b.scale(&Gq::from_int(5)))
                    .sub_ref(&MultiPoly::int(2))
                    .sub_ref(&b.sub_ref(&MultiPoly::int(2)).scale(&Gq::from_int(3)).mul_ref(&s)),
            ),
            _ => None,
        }
    };

    let mut families: Vec<ParameterFamily> = Vec::new();
    let mut push = |fam: ParameterFamily| {
        if !families.contains(&fam) {
            families.push(fam);
        }
    };

    for c1 in choices[0] {
        for c2 in choices[1] {
            for c3 in choices[2] {
                for c4 in choices[3] {
                    let picked = [c1, c2, c3, c4];
                    let sb: Vec<MultiPoly> =
                        picked.iter().filter_map(|f| sb_poly(f)).collect();
                    let eps_zero = picked.iter().any(|f| **f == F::Eps);
                    let q2 = picked.iter().any(|f| **f == F::Q2);
                    if eps_zero && q2 {
                        continue; // eps = 0 makes Q2 = -9
                    }
                    for (sigma, b) in solve_sigma_b(&sb) {
                        let eps = if eps_zero {
                            vec![EpsilonValue::Fixed(Gq::zero())]
                        } else if q2 {
                            solve_q2(&sigma, &b)
                        } else {
                            vec![EpsilonValue::Free]
                        };
                        for e in eps {
                            let fam = ParameterFamily { sigma: sigma.clone(), epsilon: e, b: b.clone() };
                            if family_satisfies_all(&fam) {
                                push(fam);
                            }
                        }
                    }
                }
            }
        }
    }

    // Absorb fixed-epsilon members into a free-epsilon family at the same
    // (sigma, b).
    let frees: Vec<(Gq, Gq)> = families
        .iter()
        .filter(|f| f.epsilon == EpsilonValue::Free)
        .map(|f| (f.sigma.clone(), f.b.clone()))
        .collect();
    families.retain(|f| {
        f.epsilon == EpsilonValue::Free
            || !frees.iter().any(|(s, b)| s == &f.sigma && b == &f.b)
    });
    families.sort_by(|a, b| {
        a.sigma.cmp_re_im(&b.sigma).then_with(|| {
            let ea = match &a.epsilon {
                EpsilonValue::Fixed(v) => v.clone(),
                EpsilonValue::Free => Gq::zero(),
            };
            let eb = match &b.epsilon {
                EpsilonValue::Fixed(v) => v.clone(),
                EpsilonValue::Free => Gq::zero(),
            };
            ea.cmp_re_im(&eb)
        })
    });
    families
}

/// Exact solutions of a set of sigma/b factor equations. Every factor in
/// scope is linear in sigma or univariate in b, so branching substitution
/// terminates.
fn solve_sigma_b(factors: &[MultiPoly]) -> Vec<(Gq, Gq)> {
    fn rec(factors: Vec<MultiPoly>, acc: &mut Vec<(Option<Gq>, Option<Gq>)>) {
        let live: Vec<&MultiPoly> = factors.iter().filter(|f| !f.is_zero()).collect();
        if live.iter().any(|f| f.is_constant()) {
            return; // contradiction
        }
        if live.is_empty() {
            acc.push((None, None));
            return;
        }
        // Prefer a univariate factor.
        if let Some(pos) = live.iter().position(|f| f.vars().len() == 1) {
            let f = live[pos];
            let var = f.vars()[0].clone();
            let Ok(coeffs) = crate::solve::univariate_coeffs(f, &var) else {
                return;
            };
            for root in crate::solve::all_roots(&coeffs) {
                let Some(r) = root.exact() else { continue };
                let binds = BTreeMap::from([(var.clone(), r.clone())]);
                let rest: Vec<MultiPoly> = live
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != pos)
                    .map(|(_, g)| g.eval_partial(&binds))
                    .collect();
                let mut sub = Vec::new();
                rec(rest, &mut sub);
                for (s, b) in sub {
                    let (mut s, mut b) = (s, b);
                    if var == "sigma" {
                        s = Some(r.clone());
                    } else {
                        b = Some(r.clone());
                    }
                    acc.push((s, b));
                }
            }
            return;
        }
        // Otherwise every factor is bivariate and linear in sigma: solve the
        // first for sigma as a rational function of b and substitute.
        let f = live[0];
        debug_assert_eq!(f.degree_in("sigma"), 1);
        let coeffs = f.to_univariate("sigma");
        let c0 = RatExpr::from_poly(coeffs[0].clone());
        let c1 = RatExpr::from_poly(coeffs[1].clone());
        let sigma_expr = c0.neg_ref().div_ref(&c1).expect("linear coefficient nonzero");
        let binds = BTreeMap::from([("sigma".to_string(), sigma_expr.clone())]);
        let rest: Vec<MultiPoly> = live[1..]
            .iter()
            .map(|g| {
                RatExpr::from_poly((*g).clone())
                    .substitute(&binds)
                    .expect("substitution is polynomial-safe")
                    .num()
                    .clone()
            })
            .collect();
        if rest.is_empty() {
            // A curve of (sigma, b) solutions: outside the solvable scope;
            // recorded as no isolated solution.
            return;
        }
        let mut sub = Vec::new();
        rec(rest, &mut sub);
        for (_, b) in sub {
            let Some(bv) = b else { continue };
            let sb = BTreeMap::from([("b".to_string(), bv.clone())]);
            if let Ok(sv) = sigma_expr.eval(&sb) {
                acc.push((Some(sv), Some(bv)));
            }
        }
    }

    let mut raw = Vec::new();
    rec(factors.to_vec(), &mut raw);
    // Free slots remain only when no factor touched the variable; such
    // selections never satisfy all four conditions and are dropped by the
    // final verification, so pin them to nothing here.
    raw.into_iter()
        .filter_map(|(s, b)| Some((s?, b?)))
        .collect()
}

/// Exact epsilon solutions of `eps^2 (b-1)(7b-15 sigma+2) = 9`.
fn solve_q2(sigma: &Gq, b: &Gq) -> Vec<EpsilonValue> {
    let factor = &(b - &Gq::one())
        * &(&(&(&Gq::from_int(7) * b) - &(&Gq::from_int(15) * sigma)) + &Gq::from_int(2));
    if factor.is_zero() {
        return Vec::new();
    }
    let esq = &Gq::from_int(9) / &factor;
    match esq.sqrt_exact() {
        Some(r) => vec![
            EpsilonValue::Fixed(r.clone()),
            EpsilonValue::Fixed(-&r),
        ],
        None => Vec::new(), // irrational epsilon: outside Q(i), dropped
    }
}

/// Verify a family against all four conditions: exactly for fixed epsilon,
/// as polynomial identities in epsilon when the slot is free.
fn family_satisfies_all(fam: &ParameterFamily) -> bool {
    let mut binds: BTreeMap<String, Gq> = [
        ("sigma".to_string(), fam.sigma.clone()),
        ("b".to_string(), fam.b.clone()),
    ]
    .into_iter()
    .collect();
    match &fam.epsilon {
        EpsilonValue::Fixed(e) => {
            binds.insert("epsilon".to_string(), e.clone());
            condition_polynomials()
                .iter()
                .all(|c| c.eval(&binds).map_or(false, |v| v.is_zero()))
        }
        EpsilonValue::Free => condition_polynomials()
            .iter()
            .all(|c| c.eval_partial(&binds).is_zero()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems;

    fn gq(n: i64, d: i64) -> Gq {
        Gq::from_ratio(n, d)
    }

    #[test]
    fn step_geometry() {
        let steps = resolution_sequence_p4().unwrap();
        // Step 0 sends the centered point to the origin.
        let pt: BTreeMap<String, Gq> = [
            ("X".to_string(), Gq::zero()),
            ("Y".to_string(), &gq(1, 2) * &Gq::i()),
            ("Z".to_string(), gq(1, 2)),
        ]
        .into_iter()
        .collect();
        let img = steps[0].map.apply_forward(&pt).unwrap();
        assert!(img.iter().all(Gq::is_zero));
        // Step 1 is linear with determinant exactly 1 (3x3 oracle).
        let det = crate::field::jacobian_det(&steps[1].map);
        assert!(det.is_one());
        // Step 2 at p1 = 1 acts as the identity on the (q, r) ratios.
        let pt: BTreeMap<String, Gq> = [
            ("p1".to_string(), Gq::one()),
            ("q1".to_string(), gq(3, 7)),
            ("r1".to_string(), gq(-2, 5)),
        ]
        .into_iter()
        .collect();
        let img = steps[2].map.apply_forward(&pt).unwrap();
        assert_eq!(img, vec![Gq::one(), gq(3, 7), gq(-2, 5)]);
    }

    #[test]
    fn pole_coefficients_factor_through_the_conditions() {
        let rs = apply_resolution(&systems::lorenz(), &BTreeMap::new(), false).unwrap();
        // The first component is already polynomial; the pole orders of the
        // other two are exactly 2 and 1.
        assert!(rs.laurent[0].iter().all(|(k, _)| *k >= 0));
        assert_eq!(rs.laurent[1].iter().map(|(k, _)| *k).min(), Some(-2));
        assert_eq!(rs.laurent[2].iter().map(|(k, _)| *k).min(), Some(-1));
        // No pole coefficient involves v, and the u^-1 layer of dv/dt is
        // linear in w.
        for p in [&rs.pole_v2, &rs.pole_v1_w, &rs.pole_v1_const, &rs.pole_w1] {
            assert!(!p.contains_var("v"));
            assert!(!p.contains_var("w"));
        }
        // Exact factorizations: constant * epsilon^k * condition.
        let matches = compare_conditions(&rs);
        let expect = [
            (Gq::from_parts(0, 1, 4, 9), 2u32),
            (Gq::from_ratio(-4, 3), 2),
            (Gq::from_ratio(-2, 27), 2),
            (Gq::from_parts(0, 1, -1, 3), 1),
        ];
        for (m, (c, k)) in matches.iter().zip(expect.iter()) {
            assert!(m.matches, "condition {} does not factor", m.condition);
            assert_eq!(m.constant.as_ref(), Some(c));
            assert_eq!(m.eps_power, *k);
        }
    }

    #[test]
    fn conjugate_sequence_gives_conjugate_conditions() {
        let p4 = apply_resolution(&systems::lorenz(), &BTreeMap::new(), false).unwrap();
        let p5 = apply_resolution(&systems::lorenz(), &BTreeMap::new(), true).unwrap();
        assert_eq!(p5.pole_v2, p4.pole_v2.conj());
        assert_eq!(p5.pole_v1_w, p4.pole_v1_w.conj());
        assert_eq!(p5.pole_v1_const, p4.pole_v1_const.conj());
        assert_eq!(p5.pole_w1, p4.pole_w1.conj());
    }

    #[test]
    fn resolvable_members_give_polynomial_systems() {
        let binds = |s: (i64, i64), e: i64, b: i64| -> BTreeMap<String, Gq> {
            [
                ("sigma".to_string(), gq(s.0, s.1)),
                ("epsilon".to_string(), Gq::from_int(e)),
                ("b".to_string(), Gq::from_int(b)),
            ]
            .into_iter()
            .collect()
        };
        let rs = apply_resolution(&systems::lorenz(), &binds((2, 1), 0, 1), false).unwrap();
        assert!(rs.laurent.iter().flatten().all(|(k, _)| *k >= 0));
        // Control: a generic member keeps its poles.
        let rs = apply_resolution(&systems::lorenz(), &binds((1, 1), 1, 1), false).unwrap();
        assert!(rs.laurent.iter().flatten().any(|(k, _)| *k < 0));
    }

    #[test]
    fn check_resolvable_examples() {
        assert!(check_resolvable(&gq(1, 3), &Gq::from_int(7), &Gq::zero()));
        assert!(check_resolvable(&Gq::one(), &Gq::from_int(-3), &Gq::from_int(2)));
        assert!(check_resolvable(&Gq::from_int(2), &Gq::zero(), &Gq::one()));
        // Direct evaluation oracle: at (1,1,1) the third condition is
        // (-3)(-9) = 27, nonzero.
        assert!(!check_resolvable(&Gq::one(), &Gq::one(), &Gq::one()));
        let binds: BTreeMap<String, Gq> = [
            ("sigma".to_string(), Gq::one()),
            ("epsilon".to_string(), Gq::one()),
            ("b".to_string(), Gq::one()),
        ]
        .into_iter()
        .collect();
        assert_eq!(
            condition_polynomials()[2].eval(&binds).unwrap(),
            Gq::from_int(27)
        );
    }

    #[test]
    fn solve_conditions_returns_the_four_families() {
        let fams = solve_conditions();
        assert_eq!(fams.len(), 4, "families: {fams:?}");
        assert_eq!(
            fams[0],
            ParameterFamily { sigma: gq(1, 3), epsilon: EpsilonValue::Free, b: Gq::zero() }
        );
        assert_eq!(
            fams[1],
            ParameterFamily {
                sigma: Gq::one(),
                epsilon: EpsilonValue::Fixed(Gq::from_int(-3)),
                b: Gq::from_int(2)
            }
        );
        assert_eq!(
            fams[2],
            ParameterFamily {
                sigma: Gq::one(),
                epsilon: EpsilonValue::Fixed(Gq::from_int(3)),
                b: Gq::from_int(2)
            }
        );
        assert_eq!(
            fams[3],
            ParameterFamily {
                sigma: Gq::from_int(2),
                epsilon: EpsilonValue::Fixed(Gq::zero()),
                b: Gq::one()
            }
        );
        // No family pins b = 5.
        assert!(fams.iter().all(|f| f.b != Gq::from_int(5)));
        // Every family passes the membership check at random members.
        let mut sampler = crate::sample::Sampler::new(11);
        for f in &fams {
            for _ in 0..3 {
                let (s, e, b) = f.member(&sampler.rational());
                assert!(check_resolvable(&s, &e, &b));
            }
        }
    }

    #[test]
    fn membership_matches_polynomiality_on_a_grid() {
        // For nonzero epsilon the published conditions coincide exactly
        // with polynomiality of the resolved system; the epsilon = 0 slice
        // is polynomial for every (sigma, b) because the model degenerates
        // there to the integrable epsilon-free member.
        let vals = [
            Gq::from_int(-1),
            Gq::zero(),
            Gq::one(),
            Gq::from_int(2),
            Gq::from_ratio(1, 3),
        ];
        for s in &vals {
            for e in &vals {
                for b in &vals {
                    let binds: BTreeMap<String, Gq> = [
                        ("sigma".to_string(), s.clone()),
                        ("epsilon".to_string(), e.clone()),
                        ("b".to_string(), b.clone()),
                    ]
                    .into_iter()
                    .collect();
                    let rs = apply_resolution(&systems::lorenz(), &binds, false).unwrap();
                    let poly = rs.laurent.iter().flatten().all(|(k, _)| *k >= 0);
                    let member = check_resolvable(s, e, b);
                    if e.is_zero() {
                        assert!(poly, "epsilon = 0 slice must be polynomial");
                    } else {
                        assert_eq!(poly, member, "mismatch at ({s}, {e}, {b})");
                    }
                }
            }
        }
    }
}
