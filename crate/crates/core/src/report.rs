//! Machine-readable analysis reports. The JSON layout is versioned and
//! deterministic: ordered maps everywhere, exact values as canonical
//! strings, floating-point fallbacks at 15 significant digits with an
//! explicit `exact: false` marker.

use crate::gauss::Gq;
use crate::painleve::{Balance, BalanceScan};
use crate::resolve::{ConditionMatch, EpsilonValue, ParameterFamily, ResolvedSystem};
use crate::singular::{Census, Eigenvalue, IndexClass, LocalIndexResult};
use crate::solve::Coord;
use crate::verify::AtlasReport;
use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeMap;

/// Version of the JSON layout documented in `schemas/report.schema.json`.
pub const SCHEMA_VERSION: u32 = 1;

/// One exact-or-approximate scalar.
#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(untagged)]
pub enum ValueJson {
    Exact { exact: bool, value: String },
    Approx { exact: bool, re: String, im: String },
}

impl ValueJson {
    pub fn from_gq(g: &Gq) -> Self {
        ValueJson::Exact { exact: true, value: g.to_string() }
    }

    pub fn from_complex(c: Complex64) -> Self {
        ValueJson::Approx {
            exact: false,
            re: format!("{:.14e}", c.re),
            im: format!("{:.14e}", c.im),
        }
    }

    pub fn from_coord(c: &Coord) -> Self {
        match c {
            Coord::Exact(g) => Self::from_gq(g),
            Coord::Approx(z) => Self::from_complex(*z),
        }
    }

    pub fn from_eigenvalue(e: &Eigenvalue) -> Self {
        match e {
            Eigenvalue::Exact(g) => Self::from_gq(g),
            Eigenvalue::Approx(z) => Self::from_complex(*z),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularityJson {
    pub label: String,
    pub chart: String,
    pub vars: Vec<String>,
    pub coords: Vec<ValueJson>,
    pub exact: bool,
    pub vanishing_order: u32,
    pub on_curve: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<IndexJson>,
    /// Other charts where the same point was detected.
    pub also_seen_in: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexJson {
    pub eigenvalues: Vec<ValueJson>,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<ValueJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resonances: Option<Vec<i64>>,
    pub class: IndexClass,
}

impl IndexJson {
    pub fn from_result(idx: &LocalIndexResult) -> Self {
        let resonances = crate::singular::resonances(idx).ok();
        Self {
            eigenvalues: idx.eigenvalues.iter().map(ValueJson::from_eigenvalue).collect(),
            exact: idx.exact,
            ratios: idx
                .ratios
                .as_ref()
                .map(|r| r.iter().map(ValueJson::from_gq).collect()),
            resonances,
            class: crate::singular::classify(idx),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveJson {
    pub chart: String,
    pub equation: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceJson {
    pub exponents: Vec<u32>,
    pub coefficients: Vec<ValueJson>,
    pub branch: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionJson {
    pub condition: usize,
    pub published: String,
    pub computed_pole: String,
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
    pub eps_power: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyJson {
    pub sigma: ValueJson,
    pub epsilon: Option<ValueJson>,
    pub epsilon_free: bool,
    pub b: ValueJson,
}

impl FamilyJson {
    pub fn from_family(f: &ParameterFamily) -> Self {
        let (epsilon, epsilon_free) = match &f.epsilon {
            EpsilonValue::Fixed(v) => (Some(ValueJson::from_gq(v)), false),
            EpsilonValue::Free => (None, true),
        };
        Self {
            sigma: ValueJson::from_gq(&f.sigma),
            epsilon,
            epsilon_free,
            b: ValueJson::from_gq(&f.b),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolutionJson {
    pub pole_orders: Vec<i64>,
    pub conditions: Vec<ConditionJson>,
    pub families: Vec<FamilyJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolvable_at_params: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralJson {
    pub name: String,
    pub expression: String,
    pub conserved: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AtlasChartJson {
    pub chart: String,
    pub polynomial: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    pub volume_claimed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub determinant_is_one: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AtlasJson {
    pub name: String,
    pub all_pass: bool,
    pub charts: Vec<AtlasChartJson>,
}

impl AtlasJson {
    pub fn from_report(r: &AtlasReport) -> Self {
        Self {
            name: r.name.clone(),
            all_pass: r.all_pass,
            charts: r
                .verdicts
                .iter()
                .map(|v| AtlasChartJson {
                    chart: v.chart.clone(),
                    polynomial: v.polynomial,
                    residual: v.residual.clone(),
                    volume_claimed: v.det_expected,
                    determinant_is_one: v.det_is_one,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessJson {
    pub atlas: String,
    pub dimension: usize,
    pub matches_base_system: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftJson {
    pub integral: String,
    pub t_span: [f64; 2],
    pub step: f64,
    pub max_drift: String,
    pub blew_up: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NumericJson {
    pub drifts: Vec<DriftJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_order: Option<String>,
}

/// The full analysis report.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool: String,
    pub system: String,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
    pub charts_used: Vec<String>,
    pub singularities: Vec<SingularityJson>,
    pub curves: Vec<CurveJson>,
    pub balances: Vec<BalanceJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<ResolutionJson>,
    pub integrals: Vec<IntegralJson>,
    pub atlases: Vec<AtlasJson>,
    pub uniqueness: Vec<UniquenessJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<NumericJson>,
    pub notes: Vec<String>,
    pub failures: Vec<String>,
}

impl AnalysisReport {
    pub fn new(system: &str, seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: format!("polyatlas {}", env!("CARGO_PKG_VERSION")),
            system: system.to_string(),
            seed,
            params: BTreeMap::new(),
            charts_used: Vec::new(),
            singularities: Vec::new(),
            curves: Vec::new(),
            balances: Vec::new(),
            resolution: None,
            integrals: Vec::new(),
            atlases: Vec::new(),
            uniqueness: Vec::new(),
            numeric: None,
            notes: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Fill the singularity section from a census, attaching indices computed
/// in each point's primary chart.
pub fn census_section(
    report: &mut AnalysisReport,
    census: &Census,
    indices: &BTreeMap<String, LocalIndexResult>,
) {
    for p in &census.points {
        let rep = &p.representatives[p.primary];
        report.singularities.push(SingularityJson {
            label: p.label.clone(),
            chart: rep.chart.clone(),
            vars: rep.vars.clone(),
            coords: rep.coords.iter().map(ValueJson::from_coord).collect(),
            exact: rep.exact,
            vanishing_order: rep.vanishing_order,
            on_curve: rep.on_curve,
            index: indices.get(&p.label).map(IndexJson::from_result),
            also_seen_in: p
                .representatives
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != p.primary)
                .map(|(_, r)| r.chart.clone())
                .collect(),
        });
    }
    for c in &census.curves {
        report.curves.push(CurveJson {
            chart: c.chart.clone(),
            equation: c.equation.to_string(),
        });
    }
}

pub fn balance_section(report: &mut AnalysisReport, scan: &BalanceScan) {
    for b in &scan.balances {
        report.balances.push(balance_json(b));
    }
    for n in &scan.notes {
        report.notes.push(format!("balance scan: {n:?}"));
    }
}

pub fn balance_json(b: &Balance) -> BalanceJson {
    BalanceJson {
        exponents: b.exponents.clone(),
        coefficients: b.coefficients.iter().map(ValueJson::from_gq).collect(),
        branch: b.branch,
    }
}

/// Fill the resolution section from the symbolic resolved system.
pub fn resolution_section(
    rs: &ResolvedSystem,
    matches: &[ConditionMatch],
    families: &[ParameterFamily],
    resolvable_at_params: Option<bool>,
) -> ResolutionJson {
    let published = crate::resolve::condition_display();
    let poles = [&rs.pole_v2, &rs.pole_v1_w, &rs.pole_v1_const, &rs.pole_w1];
    ResolutionJson {
        pole_orders: rs
            .laurent
            .iter()
            .map(|l| l.iter().map(|(k, _)| -k).max().unwrap_or(0).max(0))
            .collect(),
        conditions: matches
            .iter()
            .zip(published.iter())
            .zip(poles.iter())
            .map(|((m, pubp), pole)| ConditionJson {
                condition: m.condition,
                published: (*pubp).to_string(),
                computed_pole: pole.to_string(),
                matches: m.matches,
                constant: m.constant.as_ref().map(Gq::to_string),
                eps_power: m.eps_power,
            })
            .collect(),
        families: families.iter().map(FamilyJson::from_family).collect(),
        resolvable_at_params,
    }
}

/// Standing notes about readings of the source material that the
/// implementation had to fix or interpret; carried on every report.
pub fn standing_notes() -> Vec<String> {
    vec![
        "leading-order coefficient display reuses the exponent letters n, p for the second and third coefficients; they are read as b and c (forced by the balance equations)".to_string(),
        "the final blow-up center is read with the third coordinate (not the second) inside the linear term, as the displayed substitution requires".to_string(),
        "the second chart of the four-parameter gluing is read as the conjugate-symmetric counterpart of the first chart; the printed display has unbalanced parentheses".to_string(),
        "computed pole coefficients carry the published constant prefactors including epsilon powers; the printed condition list drops those powers, so the equivalence between polynomiality and the conditions holds for nonzero epsilon (the epsilon = 0 slice degenerates to the integrable member for every sigma, b)".to_string(),
        "the two multiplicity-2 points appear with opposite imaginary signs in the first-chart census and the weighted-chart table; labels follow the weighted chart".to_string(),
    ]
}

/// Quick structural validation of a serialized report against the
/// documented layout (field presence and types). Used by tests and the
/// strict mode of the command line tool.
pub fn validate_report_json(value: &serde_json::Value) -> Result<(), String> {
    let obj = value.as_object().ok_or("report must be an object")?;
    let required: [(&str, fn(&serde_json::Value) -> bool); 12] = [
        ("schema_version", |v| v.is_u64()),
        ("tool", |v| v.is_string()),
        ("system", |v| v.is_string()),
        ("seed", |v| v.is_u64()),
        ("params", |v| v.is_object()),
        ("charts_used", |v| v.is_array()),
        ("singularities", |v| v.is_array()),
        ("curves", |v| v.is_array()),
        ("balances", |v| v.is_array()),
        ("integrals", |v| v.is_array()),
        ("notes", |v| v.is_array()),
        ("failures", |v| v.is_array()),
    ];
    for (k, check) in required {
        let v = obj.get(k).ok_or_else(|| format!("missing field `{k}`"))?;
        if !check(v) {
            return Err(format!("field `{k}` has the wrong type"));
        }
    }
    for s in obj["singularities"].as_array().unwrap() {
        let s = s.as_object().ok_or("singularity must be an object")?;
        for k in ["label", "chart", "coords", "exact", "vanishing_order", "on_curve"] {
            if !s.contains_key(k) {
                return Err(format!("singularity missing `{k}`"));
            }
        }
        for c in s["coords"].as_array().ok_or("coords must be an array")? {
            let c = c.as_object().ok_or("coord must be an object")?;
            let exact = c
                .get("exact")
                .and_then(serde_json::Value::as_bool)
                .ok_or("coord missing `exact`")?;
            if exact && !c.contains_key("value") {
                return Err("exact coord missing `value`".to_string());
            }
            if !exact && !(c.contains_key("re") && c.contains_key("im")) {
                return Err("approximate coord missing `re`/`im`".to_string());
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_json_shapes() {
        let e = ValueJson::from_gq(&Gq::from_parts(1, 2, -3, 4));
        assert_eq!(
            serde_json::to_string(&e).unwrap(),
            r#"{"exact":true,"value":"1/2-3/4*i"}"#
        );
        let a = ValueJson::from_complex(Complex64::new(1.0, -2.5));
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.contains(r#""exact":false"#));
        assert!(s.contains("1.00000000000000e0"));
    }

    #[test]
    fn empty_report_validates() {
        let r = AnalysisReport::new("demo", 7);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        validate_report_json(&v).unwrap();
    }
}
