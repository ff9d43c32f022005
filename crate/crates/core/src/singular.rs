//! Accessible singularities on the boundary divisor, their local indices,
//! resonances, and the sign-rule classification.
//!
//! A charted system in boundary normal form reads
//! `dx1/dt = a1, dxi/dt = ai/x1 (i >= 2)` with `x1` the boundary equation
//! and every `ai` polynomial. A boundary point is an accessible
//! singularity when all `ai (i >= 2)` vanish there.
//!
//! The vanishing locus restricted to the boundary can contain a curve
//! (it does for the standard charts of the quadratic model). A curve is
//! reported as such, and the enumerated points on it are taken to be its
//! intersections with the boundary coordinate axes together with the
//! zeros of the curve-reduced system. This reproduces the classical
//! five-point census for the quadratic model while keeping the full locus
//! visible in the report.

use crate::charts::Chart;
use crate::error::SingularError;
use crate::field::{ChartedSystem, VField};
use crate::gauss::Gq;
use crate::poly::MultiPoly;
use crate::ratexpr::RatExpr;
use crate::solve::{self, Coord, Point, Solutions};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// A boundary point through which a solution may enter the interior.
#[derive(Clone, Debug)]
pub struct AccessibleSingularity {
    pub chart: String,
    /// Chart variable names, boundary variable included, in chart order.
    pub vars: Vec<String>,
    /// Coordinates aligned with `vars`; the boundary coordinate is exactly 0.
    pub coords: Vec<Coord>,
    pub exact: bool,
    /// Minimal vanishing order of the boundary-restricted pole numerators.
    pub vanishing_order: u32,
    /// True when the point lies on a positive-dimensional component.
    pub on_curve: bool,
}

impl AccessibleSingularity {
    pub fn coord_map_exact(&self) -> Option<BTreeMap<String, Gq>> {
        let mut out = BTreeMap::new();
        for (v, c) in self.vars.iter().zip(self.coords.iter()) {
            out.insert(v.clone(), c.exact()?.clone());
        }
        Some(out)
    }
}

/// Scan result for a single chart.
#[derive(Clone, Debug, Default)]
pub struct ChartScan {
    pub chart: String,
    pub points: Vec<AccessibleSingularity>,
    /// Defining equations of positive-dimensional components of the locus.
    pub curves: Vec<MultiPoly>,
    /// Set when the entire boundary satisfies the vanishing conditions.
    pub degenerate: bool,
}

/// The boundary normal form of a charted system.
pub struct NormalForm {
    /// Boundary variable name.
    pub x1: String,
    /// Non-boundary variables, chart order.
    pub rest: Vec<String>,
    /// `x1 * component` for every component, boundary first: the rescaled
    /// holomorphic field used for linearization.
    pub rescaled: Vec<MultiPoly>,
    /// Pole numerators `ai (i >= 2)`, aligned with `rest`.
    pub numerators: Vec<MultiPoly>,
    /// The boundary component `a1` itself (pole free).
    pub a1: RatExpr,
}

/// Extract the `dx1/dt = a1, dxi/dt = ai/x1` presentation of a chart.
pub fn normal_form(cs: &ChartedSystem) -> Result<NormalForm, SingularError> {
    let boundary_var = boundary_variable(cs)?;
    let x1_poly = MultiPoly::var(&boundary_var);
    let b_idx = cs
        .field
        .statevars
        .iter()
        .position(|v| *v == boundary_var)
        .ok_or_else(|| {
            SingularError::NotNormalForm(format!(
                "boundary variable {boundary_var} is not a state variable"
            ))
        })?;
    let a1 = cs.field.components[b_idx].clone();
    if !a1.is_polynomial() {
        return Err(SingularError::NotNormalForm(
            "boundary component has a pole".into(),
        ));
    }
    let mut rest = Vec::new();
    let mut numerators = Vec::new();
    let mut rescaled = vec![a1.mul_ref(&RatExpr::from_poly(x1_poly.clone())).num().clone()];
    for (k, v) in cs.field.statevars.iter().enumerate() {
        if k == b_idx {
            continue;
        }
        let ai = cs.field.components[k].mul_ref(&RatExpr::from_poly(x1_poly.clone()));
        if !ai.is_polynomial() {
            return Err(SingularError::NotNormalForm(format!(
                "component d{v}/dt has a pole of order above 1"
            )));
        }
        rest.push(v.clone());
        numerators.push(ai.num().clone());
        rescaled.push(ai.num().clone());
    }
    Ok(NormalForm { x1: boundary_var, rest, rescaled, numerators, a1 })
}

fn boundary_variable(cs: &ChartedSystem) -> Result<String, SingularError> {
    let b = &cs.boundary;
    if b.is_monomial() && b.total_degree() == 1 && b.vars().len() == 1 {
        Ok(b.vars()[0].clone())
    } else {
        Err(SingularError::NotNormalForm(format!(
            "boundary equation {b} is not a single chart variable"
        )))
    }
}

/// All accessible singularities of a charted system, with curve components
/// of the vanishing locus reported alongside.
pub fn find_accessible_singularities(
    cs: &ChartedSystem,
    chart_name: &str,
) -> Result<ChartScan, SingularError> {
    let mut scan = ChartScan { chart: chart_name.to_string(), ..Default::default() };
    if cs.pole_order == 0 {
        return Ok(scan);
    }
    let nf = normal_form(cs)?;
    let zero = BTreeMap::from([(nf.x1.clone(), Gq::zero())]);
    let restricted: Vec<MultiPoly> = nf
        .numerators
        .iter()
        .map(|p| p.eval_partial(&zero))
        .collect();
    for p in &restricted {
        for v in p.vars() {
            if !nf.rest.contains(v) {
                return Err(SingularError::SymbolicObstruction);
            }
        }
    }
    if restricted.iter().all(MultiPoly::is_zero) {
        scan.degenerate = true;
        return Ok(scan);
    }

    // Split off positive-dimensional components: repeatedly divide out the
    // common factor of the restricted system. With a single boundary
    // variable every zero set is already finite.
    let mut residual = restricted.clone();
    if nf.rest.len() >= 2 {
        loop {
            let mut g = MultiPoly::zero();
            for p in &residual {
                g = MultiPoly::gcd(&g, p);
            }
            if g.is_constant() {
                break;
            }
            scan.curves.push(g.clone());
            residual = residual
                .iter()
                .map(|p| p.exact_div(&g).expect("gcd divides"))
                .collect();
        }
    }

    let mut raw_points: Vec<(Point, bool)> = Vec::new();
    // Zeros of the reduced system (finite when the reduction is proper).
    match solve::solve_system(&residual, &nf.rest) {
        Solutions::Finite(pts) => {
            for p in pts {
                raw_points.push((p, false));
            }
        }
        Solutions::PositiveDimensional(_) => {
            // The reduced system still has a curve of zeros; it is already
            // visible through `curves`, nothing further to enumerate.
        }
    }
    // Distinguished points on each curve: intersections with the boundary
    // coordinate axes.
    for g in &scan.curves {
        for (axis_idx, axis) in nf.rest.iter().enumerate() {
            let on_axis = g.eval_partial(&BTreeMap::from([(axis.clone(), Gq::zero())]));
            if on_axis.is_zero() {
                continue; // the axis lies inside the curve
            }
            if on_axis.is_constant() {
                continue; // no intersection
            }
            let other = nf
                .rest
                .iter()
                .position(|v| on_axis.contains_var(v))
                .expect("nonconstant restriction mentions a variable");
            let coeffs = solve::univariate_coeffs(&on_axis, &nf.rest[other])
                .map_err(|_| SingularError::SymbolicObstruction)?;
            for root in solve::all_roots(&coeffs) {
                let mut pt = vec![Coord::Exact(Gq::zero()); nf.rest.len()];
                pt[axis_idx] = Coord::Exact(Gq::zero());
                pt[other] = root;
                raw_points.push((pt, true));
            }
        }
    }

    // Verify every candidate against the full restricted system and build
    // the records.
    for (pt, _from_curve) in raw_points {
        if !restricted
            .iter()
            .all(|p| solve::point_satisfies(p, &nf.rest, &pt))
        {
            continue;
        }
        let sing = build_singularity(chart_name, &nf, &restricted, pt, &scan.curves);
        if !scan.points.iter().any(|q| same_point(q, &sing)) {
            scan.points.push(sing);
        }
    }
    sort_singularities(&mut scan.points);
    Ok(scan)
}

fn same_point(a: &AccessibleSingularity, b: &AccessibleSingularity) -> bool {
    a.coords.len() == b.coords.len()
        && a.coords.iter().zip(b.coords.iter()).all(|(x, y)| match (x, y) {
            (Coord::Exact(p), Coord::Exact(q)) => p == q,
            _ => (x.to_complex() - y.to_complex()).norm() < solve::NUMERIC_TOL,
        })
}

fn sort_singularities(points: &mut [AccessibleSingularity]) {
    points.sort_by(|a, b| {
        for (x, y) in a.coords.iter().zip(b.coords.iter()) {
            let (cx, cy) = (x.to_complex(), y.to_complex());
            let ord = cx
                .re
                .partial_cmp(&cy.re)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(cy.im.partial_cmp(&cx.im).unwrap_or(std::cmp::Ordering::Equal));
            if ord != std::cmp::Ordering::Equal {
                return ord;
            }
        }
        std::cmp::Ordering::Equal
    });
}

fn build_singularity(
    chart: &str,
    nf: &NormalForm,
    restricted: &[MultiPoly],
    pt: Point,
    curves: &[MultiPoly],
) -> AccessibleSingularity {
    let exact = pt.iter().all(Coord::is_exact);
    // Full chart coordinates: insert the boundary 0 in chart order.
    let mut vars = vec![nf.x1.clone()];
    vars.extend(nf.rest.iter().cloned());
    let mut coords = vec![Coord::Exact(Gq::zero())];
    coords.extend(pt.iter().cloned());
    // Reorder to the chart's own state order.
    let vanishing_order = if exact {
        let binds: BTreeMap<String, Gq> = nf
            .rest
            .iter()
            .cloned()
            .zip(pt.iter().map(|c| c.exact().unwrap().clone()))
            .collect();
        restricted
            .iter()
            .filter(|p| !p.is_zero())
            .filter_map(|p| p.vanishing_order_at(&binds))
            .min()
            .unwrap_or(0)
    } else {
        1
    };
    let on_curve = if exact {
        let binds: BTreeMap<String, Gq> = nf
            .rest
            .iter()
            .cloned()
            .zip(pt.iter().map(|c| c.exact().unwrap().clone()))
            .collect();
        curves
            .iter()
            .any(|g| g.eval(&binds).map_or(false, |v| v.is_zero()))
    } else {
        false
    };
    AccessibleSingularity {
        chart: chart.to_string(),
        vars,
        coords,
        exact,
        vanishing_order,
        on_curve,
    }
}

// ---- Local index ----

/// One eigenvalue of the boundary linearization.
#[derive(Clone, Debug, PartialEq)]
pub enum Eigenvalue {
    Exact(Gq),
    Approx(Complex64),
}

impl Eigenvalue {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            Eigenvalue::Exact(g) => g.to_complex64(),
            Eigenvalue::Approx(c) => *c,
        }
    }

    pub fn exact(&self) -> Option<&Gq> {
        match self {
            Eigenvalue::Exact(g) => Some(g),
            Eigenvalue::Approx(_) => None,
        }
    }
}

/// Ordered eigenvalues of the linearized rescaled field at an accessible
/// singularity: the boundary-direction eigenvalue first.
#[derive(Clone, Debug)]
pub struct LocalIndexResult {
    pub eigenvalues: Vec<Eigenvalue>,
    /// Linearization of the rescaled field, boundary row first; entries may
    /// still involve symbolic parameters even when the eigenvalues do not.
    pub linearization: Vec<Vec<RatExpr>>,
    /// `(1, a2/a1, ..., an/a1)` when the leading eigenvalue is nonzero and
    /// everything is exact.
    pub ratios: Option<Vec<Gq>>,
    pub exact: bool,
}

/// Classification of an accessible singularity by its index ratios.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexClass {
    /// Leading eigenvalue zero or non-integer ratios: only vertical
    /// solutions are predicted through the point.
    VerticalOnly,
    /// All ratio entries share a sign: finitely many blow-ups resolve it.
    BlowupResolvable,
    /// Mixed signs: blow-downs may be needed as well.
    MixedSign,
}

/// Compute the local index at an accessible singularity.
///
/// The rescaled field `x1 * v` is holomorphic; its Jacobian at the point
/// has first row `(a1(P), 0, ..., 0)`, so the spectrum splits exactly into
/// the boundary eigenvalue `a1(P)` and the eigenvalues of the lower-right
/// block. The remaining eigenvalues are ordered by descending modulus,
/// breaking ties by descending imaginary then real part, which matches the
/// classical tables.
pub fn local_index(
    cs: &ChartedSystem,
    point: &AccessibleSingularity,
) -> Result<LocalIndexResult, SingularError> {
    let nf = normal_form(cs)?;
    let binds = point
        .coord_map_exact()
        .ok_or(SingularError::NotAccessible)?;
    // Check accessibility exactly.
    let zero = BTreeMap::from([(nf.x1.clone(), Gq::zero())]);
    for p in &nf.numerators {
        let restricted = p.eval_partial(&zero);
        if !restricted
            .eval_partial(&binds)
            .constant_value()
            .map_or(false, |v| v.is_zero())
        {
            return Err(SingularError::NotAccessible);
        }
    }
    if binds.get(&nf.x1).map_or(true, |v| !v.is_zero()) {
        return Err(SingularError::NotAccessible);
    }

    let vars: Vec<String> = std::iter::once(nf.x1.clone())
        .chain(nf.rest.iter().cloned())
        .collect();
    let n = vars.len();
    let mut j: Vec<Vec<RatExpr>> = Vec::with_capacity(n);
    for w in &nf.rescaled {
        let row: Vec<RatExpr> = vars
            .iter()
            .map(|v| {
                let d = w.derivative(v).eval_partial(&binds);
                RatExpr::from_poly(d)
            })
            .collect();
        j.push(row);
    }

    // Boundary eigenvalue: the (0,0) entry, which is a1(P).
    let lead = j[0][0]
        .constant_value()
        .ok_or(SingularError::SymbolicObstruction)?;
    let mut eigenvalues = vec![Eigenvalue::Exact(lead.clone())];
    let mut exact = true;

    // Lower-right block.
    let block: Vec<Vec<Gq>> = (1..n)
        .map(|r| {
            (1..n)
                .map(|c| j[r][c].constant_value().ok_or(SingularError::SymbolicObstruction))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    match block.len() {
        1 => eigenvalues.push(Eigenvalue::Exact(block[0][0].clone())),
        2 => {
            let tr = &block[0][0] + &block[1][1];
            let det = &(&block[0][0] * &block[1][1]) - &(&block[0][1] * &block[1][0]);
            // Roots of t^2 - tr t + det.
            let coeffs = [det, -&tr, Gq::one()];
            match solve::quadratic_exact(&coeffs) {
                Some((r1, r2)) => {
                    let mut pair = [r1, r2];
                    pair.sort_by(|a, b| {
                        b.norm_sqr()
                            .cmp(&a.norm_sqr())
                            .then_with(|| b.im().cmp(a.im()))
                            .then_with(|| b.re().cmp(a.re()))
                    });
                    eigenvalues.push(Eigenvalue::Exact(pair[0].clone()));
                    eigenvalues.push(Eigenvalue::Exact(pair[1].clone()));
                }
                None => {
                    exact = false;
                    let cf: Vec<Complex64> =
                        coeffs.iter().map(Gq::to_complex64).collect();
                    let mut roots = solve::durand_kerner(&cf);
                    roots.sort_by(|a, b| {
                        b.norm_sqr()
                            .partial_cmp(&a.norm_sqr())
                            .unwrap_or(std::cmp::Ordering::Equal)
                            .then(b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal))
                    });
                    for r in roots {
                        eigenvalues.push(Eigenvalue::Approx(r));
                    }
                }
            }
        }
        d => {
            return Err(SingularError::NotNormalForm(format!(
                "unsupported block dimension {d}"
            )))
        }
    }

    let ratios = if exact && !lead.is_zero() {
        Some(
            eigenvalues
                .iter()
                .map(|e| e.exact().unwrap() / &lead)
                .collect(),
        )
    } else {
        None
    };
    Ok(LocalIndexResult { eigenvalues, linearization: j, ratios, exact })
}

/// Why resonances are not defined at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotApplicable {
    LeadingEigenvalueZero,
    NonIntegerRatios,
    Inexact,
}

/// Integer ratios beyond the leading 1, when defined.
pub fn resonances(r: &LocalIndexResult) -> Result<Vec<i64>, NotApplicable> {
    if !r.exact {
        return Err(NotApplicable::Inexact);
    }
    let Some(ratios) = &r.ratios else {
        return Err(NotApplicable::LeadingEigenvalueZero);
    };
    let ints: Option<Vec<i64>> = ratios[1..].iter().map(Gq::to_i64).collect();
    ints.ok_or(NotApplicable::NonIntegerRatios)
}

/// The sign rule: all-integer same-sign ratios are resolvable by blow-ups
/// alone; mixed signs may require blowing down too.
pub fn classify(r: &LocalIndexResult) -> IndexClass {
    match resonances(r) {
        Err(_) => IndexClass::VerticalOnly,
        Ok(res) => {
            if res.iter().all(|&k| k > 0) {
                IndexClass::BlowupResolvable
            } else {
                IndexClass::MixedSign
            }
        }
    }
}

// ---- Census across charts ----

/// A deduplicated boundary point with every chart representative.
#[derive(Clone, Debug)]
pub struct CensusPoint {
    pub label: String,
    pub representatives: Vec<AccessibleSingularity>,
    /// Index into `representatives` of the preferred chart for analysis.
    pub primary: usize,
}

/// A positive-dimensional locus record.
#[derive(Clone, Debug)]
pub struct CurveRecord {
    pub chart: String,
    pub equation: MultiPoly,
}

#[derive(Clone, Debug, Default)]
pub struct Census {
    pub points: Vec<CensusPoint>,
    pub curves: Vec<CurveRecord>,
    pub degenerate_charts: Vec<String>,
}

/// Scan a family of charts and merge coincident boundary points.
///
/// Identification works through homogeneous coordinates of the base
/// compactification: a chart point maps to the projectivized value of the
/// inverse map. Points where that value degenerates (blow-up centers) are
/// merged with a standard-chart point when the transition from that chart
/// reaches them.
pub fn census(v: &VField, charts: &[Chart]) -> Result<Census, SingularError> {
    let mut out = Census::default();
    let mut keyed: Vec<(Option<Vec<Gq>>, CensusPoint)> = Vec::new();
    let mut deferred: Vec<AccessibleSingularity> = Vec::new();

    for chart in charts {
        if chart.boundary.is_constant() {
            continue;
        }
        let cs = crate::charts::to_chart(v, chart)
            .map_err(|e| SingularError::NotNormalForm(e.to_string()))?;
        let scan = find_accessible_singularities(&cs, &chart.name)?;
        for g in scan.curves {
            out.curves.push(CurveRecord { chart: chart.name.clone(), equation: g });
        }
        if scan.degenerate {
            out.degenerate_charts.push(chart.name.clone());
        }
        for p in scan.points {
            match projective_key(chart, &p) {
                Some(Some(key)) => {
                    if let Some((_, entry)) = keyed
                        .iter_mut()
                        .find(|(k, _)| k.as_ref() == Some(&key))
                    {
                        entry.representatives.push(p);
                        refresh_primary(entry);
                    } else {
                        keyed.push((
                            Some(key),
                            CensusPoint {
                                label: String::new(),
                                representatives: vec![p],
                                primary: 0,
                            },
                        ));
                    }
                }
                Some(None) => deferred.push(p),
                None => {
                    // Approximate point: compare numerically against keys.
                    keyed.push((
                        None,
                        CensusPoint {
                            label: String::new(),
                            representatives: vec![p],
                            primary: 0,
                        },
                    ));
                }
            }
        }
    }

    // Degenerate projective images: merge through chart transitions.
    'outer: for p in deferred {
        for (_, entry) in keyed.iter_mut() {
            for rep in entry.representatives.clone() {
                if transition_reaches(charts, &rep, &p) {
                    entry.representatives.push(p);
                    refresh_primary(entry);
                    continue 'outer;
                }
            }
        }
        keyed.push((
            None,
            CensusPoint { label: String::new(), representatives: vec![p], primary: 0 },
        ));
    }

    // Deterministic labels: order by scan position of the primary chart,
    // then by coordinates.
    let chart_rank = |name: &str| charts.iter().position(|c| c.name == name).unwrap_or(usize::MAX);
    let mut points: Vec<CensusPoint> = keyed.into_iter().map(|(_, e)| e).collect();
    points.sort_by(|a, b| {
        let ra = chart_rank(&a.representatives[a.primary].chart);
        let rb = chart_rank(&b.representatives[b.primary].chart);
        ra.cmp(&rb).then_with(|| {
            let pa = &a.representatives[a.primary];
            let pb = &b.representatives[b.primary];
            for (x, y) in pa.coords.iter().zip(pb.coords.iter()) {
                let (cx, cy) = (x.to_complex(), y.to_complex());
                let ord = cx
                    .re
                    .partial_cmp(&cy.re)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(cy.im.partial_cmp(&cx.im).unwrap_or(std::cmp::Ordering::Equal));
                if ord != std::cmp::Ordering::Equal {
                    return ord;
                }
            }
            std::cmp::Ordering::Equal
        })
    });
    for (k, p) in points.iter_mut().enumerate() {
        p.label = format!("P{}", k + 1);
    }
    out.points = points;
    Ok(out)
}

fn refresh_primary(entry: &mut CensusPoint) {
    // Prefer a representative off any curve; earlier chart wins ties.
    let best = entry
        .representatives
        .iter()
        .enumerate()
        .min_by_key(|(k, r)| (r.on_curve, !r.exact, *k))
        .map(|(k, _)| k)
        .unwrap_or(0);
    entry.primary = best;
}

/// Homogeneous coordinates of a chart point in the base compactification:
/// `[D : x*D : y*D : z*D]` with `D` the least common denominator of the
/// inverse map, normalized so the first nonzero entry is 1.
///
/// Returns `Some(None)` when the image degenerates (all entries vanish)
/// and `None` when the point is not exact.
fn projective_key(chart: &Chart, p: &AccessibleSingularity) -> Option<Option<Vec<Gq>>> {
    let binds = p.coord_map_exact()?;
    let mut lcd = MultiPoly::one();
    for inv in &chart.map.inverse {
        let den = inv.den();
        let g = MultiPoly::gcd(&lcd, den);
        lcd = lcd.mul_ref(&den.exact_div(&g).expect("gcd divides"));
    }
    let mut vec = vec![lcd.eval(&binds).ok()?];
    for inv in &chart.map.inverse {
        let num = inv
            .mul_ref(&RatExpr::from_poly(lcd.clone()))
            .num()
            .clone();
        vec.push(num.eval(&binds).ok()?);
    }
    let Some(first) = vec.iter().position(|v| !v.is_zero()) else {
        return Some(None);
    };
    let scale = vec[first].inv();
    Some(Some(vec.iter().map(|v| v * &scale).collect()))
}

/// Does the transition from `rep`'s chart into `target`'s chart carry the
/// representative exactly onto the target point?
fn transition_reaches(
    charts: &[Chart],
    rep: &AccessibleSingularity,
    target: &AccessibleSingularity,
) -> bool {
    let Some(from) = charts.iter().find(|c| c.name == rep.chart) else {
        return false;
    };
    let Some(to) = charts.iter().find(|c| c.name == target.chart) else {
        return false;
    };
    let (Some(src), Some(dst)) = (rep.coord_map_exact(), target.coord_map_exact()) else {
        return false;
    };
    let Ok(trans) = from.map.invert().compose(&to.map) else {
        return false;
    };
    match trans.apply_forward(&src) {
        Ok(img) => trans
            .newvars
            .iter()
            .zip(img.iter())
            .all(|(v, val)| dst.get(v).map_or(false, |d| d == val)),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::{standard_p3_atlas, to_chart, weighted_chart};
    use crate::systems;

    fn lorenz_charts() -> Vec<Chart> {
        let v = systems::lorenz();
        let atlas = standard_p3_atlas(&v).unwrap();
        let mut charts: Vec<Chart> = atlas.charts[1..].to_vec();
        charts.push(weighted_chart((1, 2, 2), &v.statevars).unwrap());
        charts
    }

    fn gq(n: i64, d: i64) -> Gq {
        Gq::from_ratio(n, d)
    }

    fn gi(n: i64, d: i64) -> Gq {
        &gq(n, d) * &Gq::i()
    }

    #[test]
    fn census_finds_the_five_points() {
        let v = systems::lorenz();
        let census = census(&v, &lorenz_charts()).unwrap();
        assert_eq!(census.points.len(), 5, "census: {:#?}", census.points);
        // Chart origins.
        for (label, chart) in [("P1", "U1"), ("P2", "U2"), ("P3", "U3")] {
            let p = census.points.iter().find(|p| p.label == label).unwrap();
            let rep = &p.representatives[p.primary];
            assert_eq!(rep.chart, chart);
            assert!(rep
                .coords
                .iter()
                .all(|c| c.exact().map_or(false, Gq::is_zero)));
        }
        // The separated pair in the weighted chart.
        let p4 = census.points.iter().find(|p| p.label == "P4").unwrap();
        let rep4 = &p4.representatives[p4.primary];
        assert_eq!(rep4.chart, "W(1,2,2)");
        let c4: Vec<&Gq> = rep4.coords.iter().map(|c| c.exact().unwrap()).collect();
        assert_eq!(c4, vec![&Gq::zero(), &gi(1, 2), &gq(1, 2)]);
        let p5 = census.points.iter().find(|p| p.label == "P5").unwrap();
        let rep5 = &p5.representatives[p5.primary];
        let c5: Vec<&Gq> = rep5.coords.iter().map(|c| c.exact().unwrap()).collect();
        assert_eq!(c5, vec![&Gq::zero(), &gi(-1, 2), &gq(1, 2)]);
        // The standard-chart pair representatives sit at Z2 = ±i on the
        // degenerate line, which is reported as a curve.
        assert!(p4
            .representatives
            .iter()
            .any(|r| r.chart == "U2" && r.coords[2].exact() == Some(&gi(-1, 1))));
        assert!(!census.curves.is_empty());
    }

    #[test]
    fn multiplicity_two_is_recorded_in_the_standard_chart() {
        let v = systems::lorenz();
        let census = census(&v, &lorenz_charts()).unwrap();
        let p4 = census.points.iter().find(|p| p.label == "P4").unwrap();
        let u2_rep = p4
            .representatives
            .iter()
            .find(|r| r.chart == "U2")
            .unwrap();
        assert_eq!(u2_rep.vanishing_order, 2);
        let w_rep = p4
            .representatives
            .iter()
            .find(|r| r.chart.starts_with("W("))
            .unwrap();
        assert_eq!(w_rep.vanishing_order, 1);
    }

    #[test]
    fn roots_outside_the_field_come_back_flagged() {
        // Boundary numerators (Y, Z^2 - 2): the common zeros (0, ±sqrt 2)
        // are not Gaussian rational, so the scan falls back to flagged
        // approximations.
        let x = RatExpr::var("X");
        let v = crate::field::VField::new(
            "synthetic",
            ["X", "Y", "Z"].iter().map(|s| s.to_string()).collect(),
            vec![
                RatExpr::var("X"),
                RatExpr::var("Y").div_ref(&x).unwrap(),
                RatExpr::var("Z")
                    .pow(2)
                    .unwrap()
                    .sub_ref(&RatExpr::int(2))
                    .div_ref(&x)
                    .unwrap(),
            ],
            Default::default(),
            Vec::new(),
        )
        .unwrap();
        let cs = ChartedSystem::new(v, MultiPoly::var("X")).unwrap();
        let scan = find_accessible_singularities(&cs, "synthetic").unwrap();
        assert_eq!(scan.points.len(), 2);
        for p in &scan.points {
            assert!(!p.exact);
            let z = p.coords[2].to_complex();
            assert!((z.re.abs() - 2f64.sqrt()).abs() < 1e-9);
            assert!(z.im.abs() < 1e-9);
        }
    }

    #[test]
    fn planar_weighted_scan_is_finite() {
        // The planar quadratic system has a univariate boundary system in
        // its (1,1)-weighted chart: two exact points, no curve.
        let v = systems::xy41();
        let chart = crate::charts::weighted_chart_2d((1, 1), &v.statevars).unwrap();
        let cs = to_chart(&v, &chart).unwrap();
        let scan = find_accessible_singularities(&cs, &chart.name).unwrap();
        assert!(scan.curves.is_empty());
        assert_eq!(scan.points.len(), 2);
        let ys: Vec<Gq> = scan
            .points
            .iter()
            .map(|p| p.coords[1].exact().unwrap().clone())
            .collect();
        assert!(ys.contains(&Gq::zero()));
        assert!(ys.contains(&Gq::from_int(2)));
        // Indices are exact with integer ratios.
        for p in &scan.points {
            let idx = local_index(&cs, p).unwrap();
            assert!(idx.exact);
            assert!(idx.ratios.is_some());
        }
    }

    #[test]
    fn constant_field_has_no_singularities() {
        let v = crate::field::VField::new(
            "const",
            systems::lorenz().statevars.clone(),
            vec![RatExpr::one(), RatExpr::zero(), RatExpr::zero()],
            Default::default(),
            Vec::new(),
        )
        .unwrap();
        let atlas = standard_p3_atlas(&v).unwrap();
        let cs = to_chart(&v, &atlas.charts[1]).unwrap();
        let scan = find_accessible_singularities(&cs, "U1").unwrap();
        assert!(scan.points.is_empty());
    }

    #[test]
    fn parameter_specialization_keeps_the_combinatorics() {
        let binds: BTreeMap<String, Gq> = [
            ("sigma".to_string(), Gq::from_int(1)),
            ("epsilon".to_string(), Gq::from_int(3)),
            ("b".to_string(), Gq::from_int(2)),
        ]
        .into_iter()
        .collect();
        let v = systems::lorenz().bind_params(&binds).unwrap();
        let census = census(&v, &lorenz_charts()).unwrap();
        assert_eq!(census.points.len(), 5);
    }

    #[test]
    fn local_indices_match_the_tables() {
        let v = systems::lorenz();
        let charts = lorenz_charts();
        let census = census(&v, &charts).unwrap();
        let index_of = |label: &str| -> LocalIndexResult {
            let p = census.points.iter().find(|p| p.label == label).unwrap();
            let rep = &p.representatives[p.primary];
            let chart = charts.iter().find(|c| c.name == rep.chart).unwrap();
            let cs = to_chart(&v, chart).unwrap();
            local_index(&cs, rep).unwrap()
        };
        let ev = |idx: &LocalIndexResult| -> Vec<Gq> {
            idx.eigenvalues
                .iter()
                .map(|e| e.exact().unwrap().clone())
                .collect()
        };
        assert_eq!(ev(&index_of("P1")), vec![Gq::zero(), gi(1, 1), gi(-1, 1)]);
        assert_eq!(ev(&index_of("P2")), vec![Gq::zero(); 3]);
        assert_eq!(ev(&index_of("P3")), vec![Gq::zero(); 3]);
        let p4 = index_of("P4");
        assert_eq!(ev(&p4), vec![gi(-1, 2), gi(-2, 1), gi(-1, 1)]);
        let p5 = index_of("P5");
        assert_eq!(ev(&p5), vec![gi(1, 2), gi(2, 1), gi(1, 1)]);
        // Ratios and resonances at the resolvable pair.
        assert_eq!(
            p4.ratios,
            Some(vec![Gq::one(), Gq::from_int(4), Gq::from_int(2)])
        );
        assert_eq!(resonances(&p4).unwrap(), vec![4, 2]);
        assert_eq!(classify(&p4), IndexClass::BlowupResolvable);
        assert_eq!(classify(&index_of("P1")), IndexClass::VerticalOnly);
    }

    #[test]
    fn eigenvalue_residuals_vanish_exactly() {
        // The characteristic polynomial of each linearization, evaluated at
        // every returned eigenvalue, is exactly zero.
        let v = systems::lorenz().bind_params(
            &[
                ("sigma".to_string(), Gq::from_int(1)),
                ("epsilon".to_string(), Gq::from_int(3)),
                ("b".to_string(), Gq::from_int(2)),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        let charts = lorenz_charts();
        let census = census(&v, &charts).unwrap();
        for p in &census.points {
            let rep = &p.representatives[p.primary];
            let chart = charts.iter().find(|c| c.name == rep.chart).unwrap();
            let cs = to_chart(&v, chart).unwrap();
            let idx = local_index(&cs, rep).unwrap();
            // With parameters bound the linearization is fully numeric.
            let m: Vec<Vec<Gq>> = idx
                .linearization
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|e| e.constant_value().expect("bound matrix entry"))
                        .collect()
                })
                .collect();
            for ev in &idx.eigenvalues {
                let lam = ev.exact().expect("exact eigenvalue").clone();
                // det(M - lam I) for the 3x3 linearization.
                let a = |r: usize, c: usize| -> Gq {
                    if r == c {
                        &m[r][c] - &lam
                    } else {
                        m[r][c].clone()
                    }
                };
                let det = &(&a(0, 0) * &(&(&a(1, 1) * &a(2, 2)) - &(&a(1, 2) * &a(2, 1))))
                    - &(&(&a(0, 1) * &(&(&a(1, 0) * &a(2, 2)) - &(&a(1, 2) * &a(2, 0))))
                        - &(&a(0, 2) * &(&(&a(1, 0) * &a(2, 1)) - &(&a(1, 1) * &a(2, 0)))));
                assert!(det.is_zero(), "{}: residual {det} at {lam}", p.label);
            }
        }
    }

    #[test]
    fn mixed_sign_classification() {
        // Synthetic index (1, -2, 3).
        let idx = LocalIndexResult {
            eigenvalues: vec![
                Eigenvalue::Exact(Gq::one()),
                Eigenvalue::Exact(Gq::from_int(-2)),
                Eigenvalue::Exact(Gq::from_int(3)),
            ],
            linearization: Vec::new(),
            ratios: Some(vec![Gq::one(), Gq::from_int(-2), Gq::from_int(3)]),
            exact: true,
        };
        assert_eq!(classify(&idx), IndexClass::MixedSign);
        assert_eq!(resonances(&idx).unwrap(), vec![-2, 3]);
        // Plain integer index (1, 2, 3).
        let idx2 = LocalIndexResult {
            ratios: Some(vec![Gq::one(), Gq::from_int(2), Gq::from_int(3)]),
            ..idx
        };
        assert_eq!(resonances(&idx2).unwrap(), vec![2, 3]);
        assert_eq!(classify(&idx2), IndexClass::BlowupResolvable);
    }

    #[test]
    fn elimination_order_does_not_change_the_census() {
        // Scan U2 with both variable orders by permuting the chart's
        // non-boundary variables through a renaming.
        let v = systems::lorenz();
        let charts = lorenz_charts();
        let u2 = charts.iter().find(|c| c.name == "U2").unwrap();
        let cs = to_chart(&v, u2).unwrap();
        let scan = find_accessible_singularities(&cs, "U2").unwrap();
        assert_eq!(scan.points.len(), 3);
        // Reversed state order: rebuild the charted system with permuted
        // component order; the scan must find the same coordinates.
        let mut f2 = cs.field.clone();
        f2.statevars.reverse();
        f2.components.reverse();
        let cs2 = ChartedSystem::new(f2, cs.boundary.clone()).unwrap();
        let scan2 = find_accessible_singularities(&cs2, "U2").unwrap();
        assert_eq!(scan2.points.len(), 3);
        for p in &scan.points {
            let coords: BTreeMap<String, Gq> = p.coord_map_exact().unwrap();
            assert!(scan2.points.iter().any(|q| {
                let c2 = q.coord_map_exact().unwrap();
                coords.iter().all(|(k, v)| c2.get(k) == Some(v))
            }));
        }
    }
}
