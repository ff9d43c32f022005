//! Compactification atlases: the standard projective-space charts and the
//! weighted charts suggested by dominant-balance exponents, plus the
//! transformation of a system into any chart.

use crate::error::FieldError;
use crate::field::{pushforward, ChartedSystem, RationalMap, VField};
use crate::gauss::Gq;
use crate::poly::MultiPoly;
use crate::ratexpr::RatExpr;
use crate::sample::Sampler;
use std::collections::BTreeMap;

/// One chart of an atlas: a coordinate change from the base chart plus
/// the local equation of the boundary divisor (1 when there is none).
#[derive(Clone, Debug)]
pub struct Chart {
    pub name: String,
    pub map: RationalMap,
    pub boundary: MultiPoly,
}

/// A compactification atlas over a base system.
#[derive(Clone, Debug)]
pub struct Atlas {
    pub charts: Vec<Chart>,
    pub base: VField,
}

impl Atlas {
    /// Spot-check pairwise compatibility: composing chart i -> base -> chart j
    /// must agree with itself on random rational points away from the
    /// degeneracy loci. Returns the number of verified point pairs.
    pub fn spot_check_overlaps(&self, seed: u64, points: usize) -> Result<usize, FieldError> {
        let mut sampler = Sampler::new(seed);
        let mut verified = 0;
        for ci in &self.charts {
            for cj in &self.charts {
                if ci.name == cj.name {
                    continue;
                }
                let mut tried = 0;
                while tried < points {
                    let pt: BTreeMap<String, Gq> = ci
                        .map
                        .newvars
                        .iter()
                        .map(|v| (v.clone(), sampler.gaussian_rational()))
                        .collect();
                    // chart i -> base
                    let Ok(base_pt) = eval_map(&ci.map.inverse, &ci.map.oldvars, &pt) else {
                        continue;
                    };
                    // base -> chart j, twice through different routes:
                    // directly, and through the composed transition map.
                    let Ok(out1) = eval_map(&cj.map.forward, &cj.map.newvars, &base_pt) else {
                        continue;
                    };
                    let Ok(transition) = ci.map.invert().compose(&cj.map) else {
                        continue;
                    };
                    let Ok(out2) = eval_map(&transition.forward, &transition.newvars, &pt) else {
                        continue;
                    };
                    if out1 != out2 {
                        return Err(FieldError::DegenerateChart);
                    }
                    verified += 1;
                    tried += 1;
                }
            }
        }
        Ok(verified)
    }
}

fn eval_map(
    exprs: &[RatExpr],
    names: &[String],
    point: &BTreeMap<String, Gq>,
) -> Result<BTreeMap<String, Gq>, FieldError> {
    let mut out = BTreeMap::new();
    for (name, e) in names.iter().zip(exprs.iter()) {
        out.insert(name.clone(), e.eval(point).map_err(FieldError::Algebra)?);
    }
    Ok(out)
}

/// The four standard charts of projective 3-space over the state variables
/// `(x, y, z)`: the identity chart `U0` plus `U1: (1/x, y/x, z/x)`,
/// `U2: (x/y, 1/y, z/y)`, `U3: (x/z, y/z, 1/z)`, with boundary equations
/// 1 (none), `X1`, `Y2`, `Z3`.
pub fn standard_p3_atlas(base: &VField) -> Result<Atlas, FieldError> {
    if base.dim() != 3 {
        return Err(FieldError::UnsupportedDimension(base.dim()));
    }
    let sv = base.statevars.clone();
    let (x, y, z) = (
        RatExpr::var(&sv[0]),
        RatExpr::var(&sv[1]),
        RatExpr::var(&sv[2]),
    );
    let mut charts = vec![Chart {
        name: "U0".into(),
        map: RationalMap::identity(&sv),
        boundary: MultiPoly::one(),
    }];
    let specs: [(&str, [&str; 3], usize); 3] = [
        ("U1", ["X1", "Y1", "Z1"], 0),
        ("U2", ["X2", "Y2", "Z2"], 1),
        ("U3", ["X3", "Y3", "Z3"], 2),
    ];
    for (name, newnames, inv_idx) in specs {
        let old = [&x, &y, &z];
        let pivot = old[inv_idx];
        // Forward: pivot coordinate inverted, others divided by it.
        let mut forward = Vec::with_capacity(3);
        for (k, o) in old.iter().enumerate() {
            if k == inv_idx {
                forward.push(pivot.inv().map_err(FieldError::Algebra)?);
            } else {
                forward.push(o.div_ref(pivot).map_err(FieldError::Algebra)?);
            }
        }
        // Inverse mirrors the same shape in the new variables.
        let pivot_new = RatExpr::var(newnames[inv_idx]);
        let mut inverse = Vec::with_capacity(3);
        for (k, nn) in newnames.iter().enumerate() {
            if k == inv_idx {
                inverse.push(pivot_new.inv().map_err(FieldError::Algebra)?);
            } else {
                inverse.push(
                    RatExpr::var(nn)
                        .div_ref(&pivot_new)
                        .map_err(FieldError::Algebra)?,
                );
            }
        }
        let map = RationalMap::new(
            sv.clone(),
            newnames.iter().map(|s| s.to_string()).collect(),
            forward,
            inverse,
            name,
        )?;
        charts.push(Chart {
            name: name.into(),
            map,
            boundary: MultiPoly::var(newnames[inv_idx]),
        });
    }
    Ok(Atlas { charts, base: base.clone() })
}

/// The weighted chart `(X, Y, Z) = (1/x, y/x^(n/m), z/x^(p/m))` attached to
/// pole orders `(m, n, p)`; the leading weight must divide the others.
pub fn weighted_chart(
    weights: (u32, u32, u32),
    statevars: &[String],
) -> Result<Chart, FieldError> {
    weighted_chart_oriented(weights, statevars, 0)
}

/// Weighted chart with a chosen inverted axis: the variable at `axis` is
/// replaced by its reciprocal and the others are divided by its powers.
/// The weight at `axis` must divide the other two.
pub fn weighted_chart_oriented(
    weights: (u32, u32, u32),
    statevars: &[String],
    axis: usize,
) -> Result<Chart, FieldError> {
    let w = [weights.0, weights.1, weights.2];
    let (m, n, p) = weights;
    if axis > 2 || w[axis] == 0 || w.iter().any(|&k| k == 0 || k % w[axis] != 0) {
        return Err(FieldError::IncompatibleWeights(m, n, p));
    }
    let newnames = ["X", "Y", "Z"];
    let pivot = RatExpr::var(&statevars[axis]);
    let mut forward = Vec::with_capacity(3);
    let mut inverse = Vec::with_capacity(3);
    let pivot_back = RatExpr::var(newnames[axis])
        .inv()
        .map_err(FieldError::Algebra)?;
    for k in 0..3 {
        if k == axis {
            forward.push(pivot.inv().map_err(FieldError::Algebra)?);
            inverse.push(pivot_back.clone());
        } else {
            let e = (w[k] / w[axis]) as i32;
            forward.push(
                RatExpr::var(&statevars[k])
                    .div_ref(&pivot.pow(e).map_err(FieldError::Algebra)?)
                    .map_err(FieldError::Algebra)?,
            );
            inverse.push(
                RatExpr::var(newnames[k])
                    .mul_ref(&pivot_back.pow(e).map_err(FieldError::Algebra)?),
            );
        }
    }
    let name = if axis == 0 {
        format!("W({m},{n},{p})")
    } else {
        format!("W({m},{n},{p};{})", statevars[axis])
    };
    let map = RationalMap::new(
        statevars.to_vec(),
        newnames.iter().map(|s| s.to_string()).collect(),
        forward,
        inverse,
        &name,
    )?;
    Ok(Chart { name, map, boundary: MultiPoly::var(newnames[axis]) })
}

/// Planar weighted chart `(X, Y) = (1/x, y/x^(n/m))` for two-dimensional
/// systems.
pub fn weighted_chart_2d(weights: (u32, u32), statevars: &[String]) -> Result<Chart, FieldError> {
    let (m, n) = weights;
    if m == 0 || n == 0 || n % m != 0 {
        return Err(FieldError::IncompatibleWeights(m, n, 1));
    }
    let wy = n / m;
    let x = RatExpr::var(&statevars[0]);
    let forward = vec![
        x.inv().map_err(FieldError::Algebra)?,
        RatExpr::var(&statevars[1])
            .div_ref(&x.pow(wy as i32).map_err(FieldError::Algebra)?)
            .map_err(FieldError::Algebra)?,
    ];
    let x_back = RatExpr::var("X").inv().map_err(FieldError::Algebra)?;
    let inverse = vec![
        x_back.clone(),
        RatExpr::var("Y").mul_ref(&x_back.pow(wy as i32).map_err(FieldError::Algebra)?),
    ];
    let name = format!("W({m},{n})");
    let map = RationalMap::new(
        statevars.to_vec(),
        vec!["X".into(), "Y".into()],
        forward,
        inverse,
        &name,
    )?;
    Ok(Chart { name, map, boundary: MultiPoly::var("X") })
}

/// Transform a system into a chart, recording boundary and pole order.
pub fn to_chart(v: &VField, chart: &Chart) -> Result<ChartedSystem, FieldError> {
    let transformed = pushforward(v, &chart.map)?;
    ChartedSystem::new(transformed, chart.boundary.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems;

    #[test]
    fn chart_u1_forward_of_sample_point() {
        let atlas = standard_p3_atlas(&systems::lorenz()).unwrap();
        let u1 = &atlas.charts[1];
        let pt: BTreeMap<String, Gq> = [
            ("x".to_string(), Gq::from_int(2)),
            ("y".to_string(), Gq::from_int(4)),
            ("z".to_string(), Gq::from_int(6)),
        ]
        .into_iter()
        .collect();
        let img = u1.map.apply_forward(&pt).unwrap();
        assert_eq!(img, vec![Gq::from_ratio(1, 2), Gq::from_int(2), Gq::from_int(3)]);
    }

    #[test]
    fn chart_u2_is_x_over_y() {
        let atlas = standard_p3_atlas(&systems::lorenz()).unwrap();
        let u2 = &atlas.charts[2];
        let x = RatExpr::var("x");
        let y = RatExpr::var("y");
        let z = RatExpr::var("z");
        assert_eq!(u2.map.forward[0], x.div_ref(&y).unwrap());
        assert_eq!(u2.map.forward[1], y.inv().unwrap());
        assert_eq!(u2.map.forward[2], z.div_ref(&y).unwrap());
    }

    #[test]
    fn transition_through_base_matches_direct() {
        // U1 -> U0 -> U2 composition equals the hand-derived direct
        // transition (1/Y1, X1/Y1, Z1/Y1) at a sample point.
        let atlas = standard_p3_atlas(&systems::lorenz()).unwrap();
        let u1 = &atlas.charts[1];
        let u2 = &atlas.charts[2];
        let trans = u1.map.invert().compose(&u2.map).unwrap();
        let pt: BTreeMap<String, Gq> = [
            ("X1".to_string(), Gq::from_ratio(1, 3)),
            ("Y1".to_string(), Gq::from_int(5)),
            ("Z1".to_string(), Gq::from_ratio(-2, 7)),
        ]
        .into_iter()
        .collect();
        let got = trans.apply_forward(&pt).unwrap();
        let y1 = Gq::from_int(5);
        let expect = vec![
            &Gq::one() / &y1,
            &Gq::from_ratio(1, 3) / &y1,
            &Gq::from_ratio(-2, 7) / &y1,
        ];
        assert_eq!(got, expect);
    }

    #[test]
    fn weighted_chart_forms() {
        let sv: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let w = weighted_chart((1, 2, 2), &sv).unwrap();
        let x = RatExpr::var("x");
        assert_eq!(w.map.forward[0], x.inv().unwrap());
        assert_eq!(
            w.map.forward[1],
            RatExpr::var("y").div_ref(&x.pow(2).unwrap()).unwrap()
        );
        // (2,4,4) normalizes to the same chart.
        let w2 = weighted_chart((2, 4, 4), &sv).unwrap();
        assert_eq!(w.map.forward, w2.map.forward);
        // Divisibility violations are rejected.
        assert!(matches!(
            weighted_chart((2, 1, 1), &sv),
            Err(FieldError::IncompatibleWeights(2, 1, 1))
        ));
    }

    #[test]
    fn oriented_weighted_chart_inverts_other_axes() {
        let sv: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        // Invert the y-axis with weights (2, 1, 2): X = x/y^2, Y = 1/y, Z = z/y^2.
        let c = weighted_chart_oriented((2, 1, 2), &sv, 1).unwrap();
        let y = RatExpr::var("y");
        assert_eq!(c.map.forward[1], y.inv().unwrap());
        assert_eq!(
            c.map.forward[0],
            RatExpr::var("x").div_ref(&y.pow(2).unwrap()).unwrap()
        );
        assert_eq!(c.boundary, MultiPoly::var("Y"));
        // Divisibility is checked against the inverted axis.
        assert!(weighted_chart_oriented((1, 2, 2), &sv, 1).is_err());
    }

    #[test]
    fn to_chart_clears_denominators_at_the_pole_order() {
        let v = systems::lorenz();
        let atlas = standard_p3_atlas(&v).unwrap();
        let w = weighted_chart((1, 2, 2), &v.statevars).unwrap();
        for chart in atlas.charts[1..].iter().chain(std::iter::once(&w)) {
            let cs = to_chart(&v, chart).unwrap();
            let clear = RatExpr::from_poly(cs.boundary.pow(cs.pole_order));
            for comp in &cs.field.components {
                assert!(
                    comp.mul_ref(&clear).is_polynomial(),
                    "chart {} does not clear at order {}",
                    chart.name,
                    cs.pole_order
                );
            }
        }
    }

    #[test]
    fn weighted_111_matches_standard_u1_on_random_cubics() {
        let sv: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let w = weighted_chart((1, 1, 1), &sv).unwrap();
        let mut sampler = Sampler::new(7);
        for _ in 0..5 {
            let f = sampler.random_poly_field(&sv, 3, 4);
            let atlas = standard_p3_atlas(&f).unwrap();
            let via_std = to_chart(&f, &atlas.charts[1]).unwrap();
            let via_w = to_chart(&f, &w).unwrap();
            // Same transformed components up to the variable renaming.
            let renames: BTreeMap<String, RatExpr> = [
                ("X".to_string(), RatExpr::var("X1")),
                ("Y".to_string(), RatExpr::var("Y1")),
                ("Z".to_string(), RatExpr::var("Z1")),
            ]
            .into_iter()
            .collect();
            for (a, b) in via_w.field.components.iter().zip(via_std.field.components.iter()) {
                assert_eq!(&a.substitute(&renames).unwrap(), b);
            }
            assert_eq!(via_w.pole_order, via_std.pole_order);
        }
    }

    #[test]
    fn to_chart_pole_orders() {
        let v = systems::lorenz();
        let atlas = standard_p3_atlas(&v).unwrap();
        let u1 = to_chart(&v, &atlas.charts[1]).unwrap();
        assert!(u1.pole_order >= 1);
        // A constant field becomes polynomial in U1: no poles at all.
        let c = VField::new(
            "const",
            v.statevars.clone(),
            vec![RatExpr::one(), RatExpr::zero(), RatExpr::zero()],
            Default::default(),
            Vec::new(),
        )
        .unwrap();
        let cs = to_chart(&c, &atlas.charts[1]).unwrap();
        assert_eq!(cs.pole_order, 0);
    }

    #[test]
    fn atlas_overlap_spot_check() {
        let atlas = standard_p3_atlas(&systems::lorenz()).unwrap();
        let n = atlas.spot_check_overlaps(42, 5).unwrap();
        assert!(n > 0);
    }
}
