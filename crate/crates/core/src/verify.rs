//! Exact verification layer: first integrals, the published reduction
//! identities, polynomiality and volume preservation of the birational
//! atlases, and the degree-2 uniqueness search over those atlases.

use crate::charts::Chart;
use crate::error::FieldError;
use crate::field::{jacobian_det, pushforward, RationalMap, VField};
use crate::gauss::Gq;
use crate::linalg::QiMatrix;
use crate::poly::MultiPoly;
use crate::ratexpr::RatExpr;
use crate::systems;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("identity failed with residual {0}")]
    IdentityFailed(String),
}

/// True iff the Lie derivative of `f` along `v` normalizes to zero.
pub fn verify_first_integral(v: &VField, f: &RatExpr) -> bool {
    v.lie_derivative(f).is_zero()
}

fn v(name: &str) -> RatExpr {
    RatExpr::var(name)
}

// ---- Reduction identities ----

/// The four published reduction identities, each checked as an exact
/// symbolic identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    /// Eliminating y, z from the epsilon-family member turns it into the
    /// displayed third-order scalar equation.
    ThirdOrder21,
    /// Substituting the integral level into the integrable member gives
    /// the displayed second-order equation.
    InceViii31,
    /// Substituting the exponential integral level reduces the
    /// contracting member to the displayed planar system.
    Reduced41,
    /// The displayed change of variables carries that planar system onto
    /// the quadratic system in (X, Y).
    ChangeOfVars41,
}

/// Check one reduction identity; the residual is reported on failure.
pub fn verify_reduction(kind: Reduction) -> Result<(), VerifyError> {
    match kind {
        Reduction::ThirdOrder21 => third_order_21(&Gq::zero()),
        Reduction::InceViii31 => ince_viii_31(&Gq::zero()),
        Reduction::Reduced41 => reduced_41(),
        Reduction::ChangeOfVars41 => change_of_vars_41(),
    }
}

/// Residual control: the same identities with a coefficient deliberately
/// shifted by `perturb` must fail for nonzero perturbations.
pub fn verify_reduction_perturbed(kind: Reduction, perturb: &Gq) -> Result<(), VerifyError> {
    match kind {
        Reduction::ThirdOrder21 => third_order_21(perturb),
        Reduction::InceViii31 => ince_viii_31(perturb),
        _ => verify_reduction(kind),
    }
}

fn ensure_zero(residual: RatExpr) -> Result<(), VerifyError> {
    if residual.is_zero() {
        Ok(())
    } else {
        Err(VerifyError::IdentityFailed(residual.to_string()))
    }
}

/// Jet-space elimination: with `j0 = x, j1 = x', j2 = x''`, solve the
/// system for `x'''` and compare with the displayed right-hand side.
fn third_order_21(perturb: &Gq) -> Result<(), VerifyError> {
    let (j0, j1, j2, j3) = (v("j0"), v("j1"), v("j2"), v("j3"));
    let eps = v("epsilon");
    // y and y' from the first equation, z from the second.
    let y = j1.add_ref(&eps.mul_ref(&j0).scale(&Gq::from_ratio(1, 3)));
    let ydot = j2.add_ref(&eps.mul_ref(&j1).scale(&Gq::from_ratio(1, 3)));
    let z = j0
        .sub_ref(&eps.mul_ref(&y))
        .sub_ref(&ydot)
        .div_ref(&j0)
        .map_err(FieldError::Algebra)?;
    // d/dt of z through the jet variables must equal x*y.
    let zdot = z
        .derivative("j0")
        .mul_ref(&j1)
        .add_ref(&z.derivative("j1").mul_ref(&j2))
        .add_ref(&z.derivative("j2").mul_ref(&j3));
    let constraint = zdot.sub_ref(&j0.mul_ref(&y));
    // The constraint is linear in j3: solve exactly.
    let c1 = constraint.derivative("j3");
    let c0 = constraint
        .substitute(&BTreeMap::from([("j3".to_string(), RatExpr::zero())]))
        .map_err(FieldError::Algebra)?;
    let solved_j3 = c0.neg_ref().div_ref(&c1).map_err(FieldError::Algebra)?;
    // Displayed right-hand side of the third-order equation.
    let displayed = eps
        .mul_ref(&j0.pow(3).map_err(FieldError::Algebra)?)
        .scale(&Gq::from_ratio(-1, 3))
        .sub_ref(&j0.pow(2).map_err(FieldError::Algebra)?.mul_ref(&j1))
        .add_ref(
            &eps.mul_ref(&j1.pow(2).map_err(FieldError::Algebra)?)
                .div_ref(&j0)
                .map_err(FieldError::Algebra)?
                .scale(&Gq::from_ratio(4, 3)),
        )
        .add_ref(&j1.mul_ref(&j2).div_ref(&j0).map_err(FieldError::Algebra)?)
        .sub_ref(&eps.mul_ref(&j2).scale(&Gq::from_ratio(4, 3)))
        .add_ref(&RatExpr::constant(perturb.clone()).mul_ref(&j2));
    ensure_zero(solved_j3.sub_ref(&displayed))
}

/// Substitute `z = (x^2 - I)/2` into the integrable member and compare
/// with `x'' = -x^3/2 + (1 + I/2) x`.
fn ince_viii_31(perturb: &Gq) -> Result<(), VerifyError> {
    let sys = systems::system31();
    let (x, i) = (v("x"), v("I"));
    let z_level = x
        .pow(2)
        .map_err(FieldError::Algebra)?
        .sub_ref(&i)
        .scale(&Gq::from_ratio(1, 2));
    let subs = BTreeMap::from([("z".to_string(), z_level.clone())]);
    // Consistency: the z-equation is implied by the level set.
    let z_eq = sys.components[2]
        .substitute(&subs)
        .map_err(FieldError::Algebra)?;
    let level_dot = z_level.derivative("x").mul_ref(&sys.components[0]);
    ensure_zero(level_dot.sub_ref(&z_eq))?;
    // The y-equation becomes the displayed scalar equation.
    let reduced = sys.components[1]
        .substitute(&subs)
        .map_err(FieldError::Algebra)?;
    let displayed = x
        .pow(3)
        .map_err(FieldError::Algebra)?
        .scale(&Gq::from_ratio(-1, 2))
        .add_ref(
            &RatExpr::one()
                .add_ref(&i.scale(&Gq::from_ratio(1, 2)))
                .add_ref(&RatExpr::constant(perturb.clone()))
                .mul_ref(&x),
        );
    ensure_zero(reduced.sub_ref(&displayed))
}

/// The reduced planar form of the contracting member with `E = e^{-6t}`:
/// `x' = y - 3x, y' = -x^3/2 - 3y + (1 + (I/2) E) x`, checked against the
/// substitution `z = (x^2 - I E)/2` and its own consistency.
pub fn reduced_41_field() -> VField {
    let (x, y) = (v("x"), v("y"));
    let rhs_y = x
        .pow(3)
        .expect("positive power")
        .scale(&Gq::from_ratio(-1, 2))
        .sub_ref(&y.scale(&Gq::from_int(3)))
        .add_ref(
            &RatExpr::one()
                .add_ref(&v("I").mul_ref(&v("E")).scale(&Gq::from_ratio(1, 2)))
                .mul_ref(&x),
        );
    VField::new(
        "reduced41",
        vec!["x".into(), "y".into()],
        vec![y.sub_ref(&x.scale(&Gq::from_int(3))), rhs_y],
        ["I".to_string()].into_iter().collect(),
        vec![crate::field::ExpSymbol { name: "E".into(), rate: Gq::from_int(-6) }],
    )
    .expect("reduced system is well formed")
}

fn reduced_41() -> Result<(), VerifyError> {
    let sys = systems::system41();
    let (x, _y) = (v("x"), v("y"));
    let level = x
        .pow(2)
        .map_err(FieldError::Algebra)?
        .sub_ref(&v("I").mul_ref(&v("E")))
        .scale(&Gq::from_ratio(1, 2));
    let subs = BTreeMap::from([("z".to_string(), level.clone())]);
    let reduced = reduced_41_field();
    // The substituted y-equation matches the displayed planar one.
    let got = sys.components[1]
        .substitute(&subs)
        .map_err(FieldError::Algebra)?;
    ensure_zero(got.sub_ref(&reduced.components[1]))?;
    // Consistency: the level's total derivative along the planar system
    // equals the substituted z-equation.
    let level_dot = reduced.lie_derivative(&level);
    let z_eq = sys.components[2]
        .substitute(&subs)
        .map_err(FieldError::Algebra)?;
    ensure_zero(level_dot.sub_ref(&z_eq))
}

/// Push the reduced planar system through `X = (i/2) x,
/// Y = (2x + i x^2 - 2y)/(2x)` and compare with the quadratic system.
fn change_of_vars_41() -> Result<(), VerifyError> {
    let (x, y) = (v("x"), v("y"));
    let half_i = RatExpr::i().scale(&Gq::from_ratio(1, 2));
    let fwd_x = half_i.mul_ref(&x);
    let fwd_y = x
        .scale(&Gq::from_int(2))
        .add_ref(&RatExpr::i().mul_ref(&x.pow(2).map_err(FieldError::Algebra)?))
        .sub_ref(&y.scale(&Gq::from_int(2)))
        .div_ref(&x.scale(&Gq::from_int(2)))
        .map_err(FieldError::Algebra)?;
    // Inverse: x = -2i X, y = x + (i/2) x^2 - x Y at that x.
    let big_x = v("X");
    let big_y = v("Y");
    let x_back = big_x.scale(&Gq::from_parts(0, 1, -2, 1));
    let y_back = x_back
        .add_ref(&half_i.mul_ref(&x_back.pow(2).map_err(FieldError::Algebra)?))
        .sub_ref(&x_back.mul_ref(&big_y));
    let map = RationalMap::new(
        vec!["x".into(), "y".into()],
        vec!["X".into(), "Y".into()],
        vec![fwd_x, fwd_y],
        vec![x_back, y_back],
        "planar change of variables",
    )?;
    let pushed = pushforward(&reduced_41_field(), &map)?;
    let target = systems::xy41();
    // Rename the target's state variables (x, y) to (X, Y) for comparison.
    let renames: BTreeMap<String, RatExpr> = [
        ("x".to_string(), v("X")),
        ("y".to_string(), v("Y")),
    ]
    .into_iter()
    .collect();
    for (got, want) in pushed.components.iter().zip(target.components.iter()) {
        let want = want.substitute(&renames).map_err(FieldError::Algebra)?;
        ensure_zero(got.sub_ref(&want))?;
    }
    Ok(())
}

// ---- Atlas catalogs ----

/// An atlas to verify: charts over a base system plus the volume-form
/// expectation per chart.
#[derive(Clone, Debug)]
pub struct AtlasSpec {
    pub name: String,
    pub base: VField,
    pub charts: Vec<Chart>,
    /// Expect `jacobian_det = 1` for the chart at the same position.
    pub expect_volume: Vec<bool>,
}

/// Shared shape of the three-chart gluings: `x_j = 1/x`,
/// `y_j = -((y - (eps/3)x + w z + K) x + lin (3z + C2)) x`,
/// `z_j = z - (1/6)(3x - c3) x`, inverted in closed form.
fn triangular_chart(
    name: &str,
    newvars: [&str; 3],
    eps: &RatExpr,
    w: &RatExpr,
    k: &RatExpr,
    c2: &RatExpr,
    c3: &RatExpr,
) -> Result<Chart, FieldError> {
    let (x, y, z) = (v("x"), v("y"), v("z"));
    let lin = eps.scale(&Gq::from_ratio(4, 9));
    let a = y
        .sub_ref(&eps.mul_ref(&x).scale(&Gq::from_ratio(1, 3)))
        .add_ref(&w.mul_ref(&z))
        .add_ref(k);
    let b = lin.mul_ref(&z.scale(&Gq::from_int(3)).add_ref(c2));
    let fwd = vec![
        x.inv().map_err(FieldError::Algebra)?,
        a.mul_ref(&x).add_ref(&b).mul_ref(&x).neg_ref(),
        z.sub_ref(
            &x.scale(&Gq::from_int(3))
                .sub_ref(c3)
                .mul_ref(&x)
                .scale(&Gq::from_ratio(1, 6)),
        ),
    ];
    let (nx, ny, nz) = (v(newvars[0]), v(newvars[1]), v(newvars[2]));
    let x_back = nx.inv().map_err(FieldError::Algebra)?;
    let z_back = nz.add_ref(
        &x_back
            .scale(&Gq::from_int(3))
            .sub_ref(c3)
            .mul_ref(&x_back)
            .scale(&Gq::from_ratio(1, 6)),
    );
    let b_back = lin.mul_ref(&z_back.scale(&Gq::from_int(3)).add_ref(c2));
    let y_back = ny
        .neg_ref()
        .mul_ref(&nx.pow(2).map_err(FieldError::Algebra)?)
        .sub_ref(&b_back.mul_ref(&nx))
        .add_ref(&eps.mul_ref(&x_back).scale(&Gq::from_ratio(1, 3)))
        .sub_ref(&w.mul_ref(&z_back))
        .sub_ref(k);
    let map = RationalMap::new(
        vec!["x".into(), "y".into(), "z".into()],
        newvars.iter().map(|s| s.to_string()).collect(),
        fwd,
        vec![x_back, y_back, z_back],
        name,
    )?;
    Ok(Chart {
        name: name.to_string(),
        map,
        boundary: MultiPoly::var(newvars[0]),
    })
}

/// The three-chart gluing of the epsilon-family member, with symbolic
/// `epsilon`.
pub fn atlas_for_system21() -> Result<AtlasSpec, FieldError> {
    let eps = v("epsilon");
    let i = RatExpr::i();
    // K = i(5 eps^2 + 9)/9, C2 = eps^2 - 3, c3 = 4 i eps; chart 2 is the
    // i -> -i mirror.
    let k1 = i
        .mul_ref(
            &eps.pow(2)
                .map_err(FieldError::Algebra)?
                .scale(&Gq::from_int(5))
                .add_ref(&RatExpr::int(9)),
        )
        .scale(&Gq::from_ratio(1, 9));
    let c2 = eps
        .pow(2)
        .map_err(FieldError::Algebra)?
        .sub_ref(&RatExpr::int(3));
    let c3 = i.mul_ref(&eps).scale(&Gq::from_int(4));
    let base = systems::system21();
    let charts = vec![
        Chart {
            name: "chart0".into(),
            map: RationalMap::identity(&base.statevars),
            boundary: MultiPoly::one(),
        },
        triangular_chart(
            "chart1",
            ["x1", "y1", "z1"],
            &eps,
            &i.neg_ref(),
            &k1,
            &c2,
            &c3,
        )?,
        triangular_chart(
            "chart2",
            ["x2", "y2", "z2"],
            &eps,
            &i,
            &k1.neg_ref(),
            &c2,
            &c3.neg_ref(),
        )?,
    ];
    Ok(AtlasSpec {
        name: "system21".into(),
        base,
        expect_volume: vec![true; charts.len()],
        charts,
    })
}

/// The three-chart gluing of the four-parameter family, with all
/// parameters symbolic. The second chart follows the reading that mirrors
/// the first chart's structure; it specializes exactly to the
/// epsilon-family atlas.
pub fn atlas_for_m21() -> Result<AtlasSpec, FieldError> {
    let eps = v("epsilon");
    let i = RatExpr::i();
    let (a1, a2, a3) = (v("alpha1"), v("alpha2"), v("alpha3"));
    let base = systems::m21();
    // Chart 1: K = alpha1, C2 = alpha2, c3 = alpha3.
    let chart1 = triangular_chart(
        "chart1",
        ["x1", "y1", "z1"],
        &eps,
        &i.neg_ref(),
        &a1,
        &a2,
        &a3,
    )?;
    // Chart 2: K = alpha1 + (i/36)(24 alpha2 + alpha3^2 - 48 eps^2),
    // C2 = (1/3)(3 alpha2 + 2 i alpha3 eps + 8 eps^2), c3 = alpha3 - 8 i eps.
    let k2 = a1.add_ref(
        &i.scale(&Gq::from_ratio(1, 36)).mul_ref(
            &a2.scale(&Gq::from_int(24))
                .add_ref(&a3.pow(2).map_err(FieldError::Algebra)?)
                .sub_ref(
                    &eps.pow(2)
                        .map_err(FieldError::Algebra)?
                        .scale(&Gq::from_int(48)),
                ),
        ),
    );
    let c2_2 = a2
        .add_ref(
            &i.mul_ref(&a3)
                .mul_ref(&eps)
                .scale(&Gq::from_ratio(2, 3)),
        )
        .add_ref(
            &eps.pow(2)
                .map_err(FieldError::Algebra)?
                .scale(&Gq::from_ratio(8, 3)),
        );
    let c3_2 = a3.sub_ref(&i.mul_ref(&eps).scale(&Gq::from_int(8)));
    let chart2 = triangular_chart("chart2", ["x2", "y2", "z2"], &eps, &i, &k2, &c2_2, &c3_2)?;
    let charts = vec![
        Chart {
            name: "chart0".into(),
            map: RationalMap::identity(&base.statevars),
            boundary: MultiPoly::one(),
        },
        chart1,
        chart2,
    ];
    Ok(AtlasSpec {
        name: "m21".into(),
        base,
        expect_volume: vec![true; charts.len()],
        charts,
    })
}

/// The four-chart planar gluing of the quadratic (X, Y) system over the
/// coefficient ring generated by the integral constant and `E = e^{-6t}`.
pub fn atlas_for_xy41() -> Result<AtlasSpec, FieldError> {
    let (x, y) = (v("x"), v("y"));
    let base = systems::xy41();
    let quarter = v("I").mul_ref(&v("E")).scale(&Gq::from_ratio(1, 4));
    let half = v("I").mul_ref(&v("E")).scale(&Gq::from_ratio(1, 2));
    let x_inv = x.inv().map_err(FieldError::Algebra)?;

    // Chart 1: y1 = ((y x + IE/4) x + IE/2) x.
    let y1 = y
        .mul_ref(&x)
        .add_ref(&quarter)
        .mul_ref(&x)
        .add_ref(&half)
        .mul_ref(&x);
    let nx = v("x1");
    let ny = v("y1");
    let y1_back = ny
        .mul_ref(&nx.pow(3).map_err(FieldError::Algebra)?)
        .sub_ref(&quarter.mul_ref(&nx))
        .sub_ref(&half.mul_ref(&nx.pow(2).map_err(FieldError::Algebra)?));
    let chart1 = Chart {
        name: "chart1".into(),
        map: RationalMap::new(
            vec!["x".into(), "y".into()],
            vec!["x1".into(), "y1".into()],
            vec![x_inv.clone(), y1],
            vec![nx.inv().map_err(FieldError::Algebra)?, y1_back],
            "chart1",
        )?,
        boundary: MultiPoly::var("x1"),
    };

    // Chart 2: y2 = (((y - 2x) x - IE/4) x + IE/2) x.
    let y2 = y
        .sub_ref(&x.scale(&Gq::from_int(2)))
        .mul_ref(&x)
        .sub_ref(&quarter)
        .mul_ref(&x)
        .add_ref(&half)
        .mul_ref(&x);
    let nx2 = v("x2");
    let ny2 = v("y2");
    let y2_back = nx2
        .inv()
        .map_err(FieldError::Algebra)?
        .scale(&Gq::from_int(2))
        .add_ref(&ny2.mul_ref(&nx2.pow(3).map_err(FieldError::Algebra)?))
        .add_ref(&quarter.mul_ref(&nx2))
        .sub_ref(&half.mul_ref(&nx2.pow(2).map_err(FieldError::Algebra)?));
    let chart2 = Chart {
        name: "chart2".into(),
        map: RationalMap::new(
            vec!["x".into(), "y".into()],
            vec!["x2".into(), "y2".into()],
            vec![x_inv, y2],
            vec![nx2.inv().map_err(FieldError::Algebra)?, y2_back],
            "chart2",
        )?,
        boundary: MultiPoly::var("x2"),
    };

    // Chart 3: (x3, y3) = (x y, 1/y).
    let chart3 = Chart {
        name: "chart3".into(),
        map: RationalMap::new(
            vec!["x".into(), "y".into()],
            vec!["x3".into(), "y3".into()],
            vec![x.mul_ref(&y), y.inv().map_err(FieldError::Algebra)?],
            vec![
                v("x3").mul_ref(&v("y3")),
                v("y3").inv().map_err(FieldError::Algebra)?,
            ],
            "chart3",
        )?,
        boundary: MultiPoly::var("y3"),
    };

    let charts = vec![
        Chart {
            name: "chart0".into(),
            map: RationalMap::identity(&base.statevars),
            boundary: MultiPoly::one(),
        },
        chart1,
        chart2,
        chart3,
    ];
    Ok(AtlasSpec {
        name: "xy41".into(),
        base,
        // No volume claim is made for the planar gluing.
        expect_volume: vec![false; charts.len()],
        charts,
    })
}

/// Bind exact parameter values in both the base system and every chart.
pub fn bind_atlas(spec: &AtlasSpec, binds: &BTreeMap<String, Gq>) -> Result<AtlasSpec, FieldError> {
    Ok(AtlasSpec {
        name: spec.name.clone(),
        base: spec.base.bind_params(binds)?,
        charts: spec
            .charts
            .iter()
            .map(|c| {
                Ok(Chart {
                    name: c.name.clone(),
                    map: c.map.bind_params(binds)?,
                    boundary: c.boundary.clone(),
                })
            })
            .collect::<Result<Vec<_>, FieldError>>()?,
        expect_volume: spec.expect_volume.clone(),
    })
}

/// Per-chart verdicts of an atlas verification.
#[derive(Clone, Debug)]
pub struct ChartVerdict {
    pub chart: String,
    pub polynomial: bool,
    /// Pole part left over when not polynomial.
    pub residual: Option<String>,
    pub det_expected: bool,
    pub det_is_one: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct AtlasReport {
    pub name: String,
    pub verdicts: Vec<ChartVerdict>,
    pub all_pass: bool,
}

/// Verify an atlas: the transformed system must be polynomial in every
/// chart, and the Jacobian determinant must be exactly 1 where claimed.
pub fn verify_atlas(spec: &AtlasSpec) -> Result<AtlasReport, VerifyError> {
    let mut verdicts = Vec::new();
    let mut all_pass = true;
    for (chart, expect_vol) in spec.charts.iter().zip(spec.expect_volume.iter()) {
        let transformed = pushforward(&spec.base, &chart.map)?;
        let bad: Vec<String> = transformed
            .components
            .iter()
            .filter(|c| !c.is_polynomial())
            .map(|c| c.to_string())
            .collect();
        let polynomial = bad.is_empty();
        let det_is_one = if *expect_vol {
            Some(jacobian_det(&chart.map).is_one())
        } else {
            None
        };
        all_pass &= polynomial && det_is_one.unwrap_or(true);
        verdicts.push(ChartVerdict {
            chart: chart.name.clone(),
            polynomial,
            residual: if polynomial { None } else { Some(bad.join(" ; ")) },
            det_expected: *expect_vol,
            det_is_one,
        });
    }
    Ok(AtlasReport { name: spec.name.clone(), verdicts, all_pass })
}

// ---- Degree-2 uniqueness search ----

/// The ten degree-at-most-2 monomials in (x, y, z), fixed order.
pub fn quadratic_monomials() -> Vec<MultiPoly> {
    let (x, y, z) = (
        MultiPoly::var("x"),
        MultiPoly::var("y"),
        MultiPoly::var("z"),
    );
    vec![
        MultiPoly::one(),
        x.clone(),
        y.clone(),
        z.clone(),
        x.pow(2),
        x.mul_ref(&y),
        x.mul_ref(&z),
        y.pow(2),
        y.mul_ref(&z),
        z.pow(2),
    ]
}

/// Result of the 30-coefficient ansatz search: an exact basis of the
/// space of quadratic systems polynomial in every chart.
#[derive(Clone, Debug)]
pub struct UniquenessResult {
    /// Nullspace dimension (solution systems up to scale when 1).
    pub dim: usize,
    pub basis: Vec<Vec<Gq>>,
}

impl UniquenessResult {
    /// True when the solution space is exactly the line spanned by the
    /// target system's coefficient vector.
    pub fn is_span_of(&self, target: &[Gq]) -> bool {
        if self.dim != 1 || self.basis.len() != 1 {
            return false;
        }
        let b = &self.basis[0];
        let Some(k) = target.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        if b[k].is_zero() {
            return false;
        }
        let scale = &target[k] / &b[k];
        b.iter()
            .zip(target.iter())
            .all(|(bi, ti)| &(bi * &scale) == ti)
    }
}

/// Coefficient vector of a polynomial 3-field in the 30-slot quadratic
/// basis, or `None` when a component has degree above 2 or free symbols.
pub fn field_to_quadratic_coeffs(v: &VField) -> Option<Vec<Gq>> {
    let monos = quadratic_monomials();
    let mut out = Vec::with_capacity(30);
    for comp in &v.components {
        if !comp.is_polynomial() {
            return None;
        }
        let p = comp.num();
        let mut remaining = p.clone();
        for m in &monos {
            // Exact coefficient of the monomial by residual subtraction.
            let c = coefficient_of(&remaining, m)?;
            remaining = remaining.sub_ref(&m.scale(&c));
            out.push(c);
        }
        if !remaining.is_zero() {
            return None; // degree above 2
        }
    }
    Some(out)
}

fn coefficient_of(p: &MultiPoly, mono: &MultiPoly) -> Option<Gq> {
    let (target_mono, _) = mono.leading_term()?;
    let mvars = mono.vars();
    for (m, c) in p.terms() {
        let pvars = p.vars();
        // Compare exponent maps by name.
        let mut matches = true;
        for (k, &e) in m.iter().enumerate() {
            let name = &pvars[k];
            let want = mvars
                .iter()
                .position(|v| v == name)
                .map(|j| target_mono[j])
                .unwrap_or(0);
            if e != want {
                matches = false;
                break;
            }
        }
        if matches {
            // All monomial variables must be present in the term.
            let covers = mvars.iter().enumerate().all(|(j, name)| {
                target_mono[j] == 0
                    || pvars
                        .iter()
                        .position(|v| v == name)
                        .map(|k| m[k] == target_mono[j])
                        .unwrap_or(false)
            });
            if covers {
                return Some(c.clone());
            }
        }
    }
    Some(Gq::zero())
}

/// Impose polynomiality of the transformed quadratic ansatz in every
/// non-identity chart and return the exact nullspace.
///
/// The negative boundary powers of each transformed component are linear
/// in the 30 unknown coefficients; their full Laurent tails are extracted
/// exactly and stacked into one linear system over Q(i).
pub fn uniqueness_search(charts: &[Chart]) -> Result<UniquenessResult, VerifyError> {
    let monos = quadratic_monomials();
    let statevars = ["x", "y", "z"];
    // Row key: (chart, component, boundary power, monomial by name).
    type RowKey = (usize, usize, i64, Vec<(String, u32)>);
    let mut rows: BTreeMap<RowKey, Vec<Gq>> = BTreeMap::new();
    let ncols = 3 * monos.len();

    for (chart_idx, chart) in charts.iter().enumerate() {
        if chart.boundary.is_constant() {
            continue;
        }
        let boundary_var = chart.boundary.vars()[0].clone();
        let inv_binds: BTreeMap<String, RatExpr> = chart
            .map
            .oldvars
            .iter()
            .cloned()
            .zip(chart.map.inverse.iter().cloned())
            .collect();
        for (i, sv) in statevars.iter().enumerate() {
            for (a, mono) in monos.iter().enumerate() {
                let col = i * monos.len() + a;
                // Pushforward of the basis field mono * d/d(sv): component j
                // is (dF_j/d sv * mono) composed with the inverse.
                for (j, fwd) in chart.map.forward.iter().enumerate() {
                    let contrib = fwd
                        .derivative(sv)
                        .mul_ref(&RatExpr::from_poly(mono.clone()));
                    if contrib.is_zero() {
                        continue;
                    }
                    let in_chart = contrib
                        .substitute(&inv_binds)
                        .map_err(FieldError::Algebra)?;
                    for (pow, coeff) in in_chart
                        .laurent_in(&boundary_var)
                        .map_err(FieldError::Algebra)?
                    {
                        if pow >= 0 {
                            continue;
                        }
                        for (m, c) in coeff.terms() {
                            let named: Vec<(String, u32)> = m
                                .iter()
                                .enumerate()
                                .filter(|(_, &e)| e > 0)
                                .map(|(k, &e)| (coeff.vars()[k].clone(), e))
                                .collect();
                            let key = (chart_idx, j, pow, named);
                            let row = rows
                                .entry(key)
                                .or_insert_with(|| vec![Gq::zero(); ncols]);
                            row[col] = &row[col] + c;
                        }
                    }
                }
            }
        }
    }

    if rows.is_empty() {
        // No constraints: the whole space.
        let basis: Vec<Vec<Gq>> = (0..ncols)
            .map(|k| {
                let mut v = vec![Gq::zero(); ncols];
                v[k] = Gq::one();
                v
            })
            .collect();
        return Ok(UniquenessResult { dim: ncols, basis });
    }
    let matrix = QiMatrix::from_rows(rows.into_values().collect());
    let basis = matrix.nullspace();
    Ok(UniquenessResult { dim: basis.len(), basis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Sampler;

    #[test]
    fn first_integrals_of_the_catalog() {
        assert!(verify_first_integral(
            &systems::system31(),
            &systems::integral_31()
        ));
        assert!(verify_first_integral(
            &systems::system41_with_exp(),
            &systems::integral_41()
        ));
        assert!(verify_first_integral(
            &systems::system51_with_exp(),
            &systems::integral_51()
        ));
        // Expansion oracle: x^2 + 2z is not conserved.
        let wrong = v("x")
            .pow(2)
            .unwrap()
            .add_ref(&v("z").scale(&Gq::from_int(2)));
        assert!(!verify_first_integral(&systems::system31(), &wrong));
    }

    #[test]
    fn reduction_identities_hold() {
        for kind in [
            Reduction::ThirdOrder21,
            Reduction::InceViii31,
            Reduction::Reduced41,
            Reduction::ChangeOfVars41,
        ] {
            verify_reduction(kind).unwrap_or_else(|e| panic!("{kind:?}: {e}"));
        }
    }

    #[test]
    fn perturbed_reductions_fail() {
        let eps = Gq::from_ratio(1, 7);
        assert!(matches!(
            verify_reduction_perturbed(Reduction::InceViii31, &eps),
            Err(VerifyError::IdentityFailed(_))
        ));
        assert!(matches!(
            verify_reduction_perturbed(Reduction::ThirdOrder21, &eps),
            Err(VerifyError::IdentityFailed(_))
        ));
    }

    #[test]
    fn atlas_21_is_polynomial_and_volume_preserving() {
        let spec = atlas_for_system21().unwrap();
        let report = verify_atlas(&spec).unwrap();
        assert!(report.all_pass, "report: {report:#?}");
    }

    #[test]
    fn atlas_m21_at_random_exact_parameters() {
        let spec = atlas_for_m21().unwrap();
        let mut sampler = Sampler::new(17);
        for _ in 0..3 {
            let binds: BTreeMap<String, Gq> = [
                ("alpha1".to_string(), sampler.gaussian_rational()),
                ("alpha2".to_string(), sampler.gaussian_rational()),
                ("alpha3".to_string(), sampler.gaussian_rational()),
                ("epsilon".to_string(), sampler.nonzero_rational()),
            ]
            .into_iter()
            .collect();
            let bound = bind_atlas(&spec, &binds).unwrap();
            let report = verify_atlas(&bound).unwrap();
            assert!(report.all_pass, "binds {binds:?}: {report:#?}");
        }
    }

    #[test]
    fn atlas_xy41_is_polynomial_over_the_exponential_ring() {
        let spec = atlas_for_xy41().unwrap();
        let report = verify_atlas(&spec).unwrap();
        assert!(report.all_pass, "report: {report:#?}");
        // The planar third chart has determinant -1/y, not 1 (2x2 oracle).
        let det = jacobian_det(&spec.charts[3].map);
        let expect = RatExpr::int(-1).div_ref(&v("y")).unwrap();
        assert_eq!(det, expect);
    }

    #[test]
    fn uniqueness_pins_the_epsilon_family_member() {
        for eps in [Gq::from_int(3), Gq::from_int(1), Gq::from_int(-2)] {
            let binds: BTreeMap<String, Gq> =
                [("epsilon".to_string(), eps.clone())].into_iter().collect();
            let spec = bind_atlas(&atlas_for_system21().unwrap(), &binds).unwrap();
            let result = uniqueness_search(&spec.charts).unwrap();
            assert_eq!(result.dim, 1, "eps = {eps}");
            let target = field_to_quadratic_coeffs(&spec.base).unwrap();
            assert!(result.is_span_of(&target), "eps = {eps}");
        }
    }

    #[test]
    fn uniqueness_pins_the_four_parameter_member() {
        let mut sampler = Sampler::new(23);
        let binds: BTreeMap<String, Gq> = [
            ("alpha1".to_string(), sampler.gaussian_rational()),
            ("alpha2".to_string(), sampler.gaussian_rational()),
            ("alpha3".to_string(), sampler.gaussian_rational()),
            ("epsilon".to_string(), sampler.nonzero_rational()),
        ]
        .into_iter()
        .collect();
        let spec = bind_atlas(&atlas_for_m21().unwrap(), &binds).unwrap();
        let result = uniqueness_search(&spec.charts).unwrap();
        assert_eq!(result.dim, 1, "binds {binds:?}");
        let target = field_to_quadratic_coeffs(&spec.base).unwrap();
        assert!(result.is_span_of(&target));
    }

    #[test]
    fn uniqueness_with_no_charts_is_unconstrained() {
        let result = uniqueness_search(&[]).unwrap();
        assert_eq!(result.dim, 30);
    }

    #[test]
    fn uniqueness_is_independent_of_assembly_order() {
        let binds: BTreeMap<String, Gq> =
            [("epsilon".to_string(), Gq::from_int(3))].into_iter().collect();
        let spec = bind_atlas(&atlas_for_system21().unwrap(), &binds).unwrap();
        let forward = uniqueness_search(&spec.charts).unwrap();
        let mut reversed = spec.charts.clone();
        reversed.reverse();
        let backward = uniqueness_search(&reversed).unwrap();
        assert_eq!(forward.dim, backward.dim);
        let target = field_to_quadratic_coeffs(&spec.base).unwrap();
        assert!(forward.is_span_of(&target));
        assert!(backward.is_span_of(&target));
    }
}
