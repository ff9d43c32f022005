//! End-to-end analysis pipeline: charts, singularity census, local
//! indices, dominant balances, resolution conditions, integral and atlas
//! verification, and numeric cross-checks, assembled into one report.

use crate::charts::{standard_p3_atlas, Chart};
use crate::error::FieldError;
use crate::field::VField;
use crate::gauss::Gq;
use crate::numeric::{self, CompiledField, CompiledObservable};
use crate::painleve::{self, DEFAULT_MAX_EXP};
use crate::report::{self, AnalysisReport, AtlasJson, DriftJson, IntegralJson, NumericJson, UniquenessJson, ValueJson};
use crate::resolve;
use crate::singular::{self, LocalIndexResult};
use crate::sysdef::{SysdefError, SystemDoc};
use crate::systems;
use crate::verify::{self, AtlasSpec};
use num_complex::Complex64;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("parse error: {0}")]
    Parse(#[from] SysdefError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<FieldError> for PipelineError {
    fn from(e: FieldError) -> Self {
        PipelineError::Internal(e.to_string())
    }
}

/// Chart families to scan in the census.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartChoice {
    Standard,
    Weighted,
    All,
}

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub charts: ChartChoice,
    pub params: BTreeMap<String, Gq>,
    pub skip_numeric: bool,
    pub seed: u64,
    pub x0: Option<Vec<Complex64>>,
    pub t_end: Option<f64>,
    pub step: Option<f64>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            charts: ChartChoice::All,
            params: BTreeMap::new(),
            skip_numeric: false,
            seed: 0,
            x0: None,
            t_end: None,
            step: None,
        }
    }
}

/// Chart set used in a census: the standard atlas and/or the weighted
/// charts suggested by the system's dominant balances.
pub fn census_charts(
    field: &VField,
    choice: ChartChoice,
    balances: &painleve::BalanceScan,
) -> Result<Vec<Chart>, FieldError> {
    let mut charts = Vec::new();
    if field.dim() == 3 && matches!(choice, ChartChoice::Standard | ChartChoice::All) {
        let atlas = standard_p3_atlas(field)?;
        charts.extend(atlas.charts.into_iter().skip(1));
    }
    if matches!(choice, ChartChoice::Weighted | ChartChoice::All) {
        for b in &balances.balances {
            let chart = painleve::balance_to_chart(b, &field.statevars)?;
            if !charts.iter().any(|c| c.name == chart.name) {
                charts.push(chart);
            }
        }
    }
    Ok(charts)
}

/// Members of the quadratic three-parameter model recognized by name, as
/// `(sigma, epsilon or None for symbolic, b)`.
fn known_member(name: &str) -> Option<(Gq, Option<Gq>, Gq)> {
    match name {
        "system21" => Some((Gq::from_ratio(1, 3), None, Gq::zero())),
        "system31" => Some((Gq::from_int(2), Some(Gq::zero()), Gq::one())),
        "system41" => Some((Gq::one(), Some(Gq::from_int(3)), Gq::from_int(2))),
        "system51" => Some((Gq::one(), Some(Gq::from_int(-3)), Gq::from_int(2))),
        _ => None,
    }
}

/// Run the full pipeline on a parsed document.
pub fn analyze(doc: &SystemDoc, opts: &AnalyzeOptions) -> Result<AnalysisReport, PipelineError> {
    let field_full = doc
        .to_field()
        .map_err(|e| PipelineError::Internal(e.to_string()))?;
    let field = field_full
        .bind_params(&opts.params)
        .map_err(|e| PipelineError::Internal(e.to_string()))?;
    let mut report = AnalysisReport::new(&doc.name, opts.seed);
    report.notes = report::standing_notes();
    for (k, v) in &opts.params {
        report.params.insert(k.clone(), v.to_string());
    }

    // Dominant balances (polynomial autonomous systems only).
    let balances = match painleve::dominant_balances(&field, DEFAULT_MAX_EXP) {
        Ok(scan) => {
            report::balance_section(&mut report, &scan);
            scan
        }
        Err(e) => {
            report
                .notes
                .push(format!("dominant balances skipped: {e}"));
            painleve::BalanceScan::default()
        }
    };

    // Census and local indices. Two-dimensional systems are scanned over
    // the weighted charts their balances suggest.
    if field.dim() == 3 || field.dim() == 2 {
        let charts = census_charts(&field, opts.charts, &balances)?;
        report.charts_used = charts.iter().map(|c| c.name.clone()).collect();
        match singular::census(&field, &charts) {
            Ok(census) => {
                let mut indices: BTreeMap<String, LocalIndexResult> = BTreeMap::new();
                for p in &census.points {
                    let rep = &p.representatives[p.primary];
                    let Some(chart) = charts.iter().find(|c| c.name == rep.chart) else {
                        continue;
                    };
                    let cs = crate::charts::to_chart(&field, chart)?;
                    match singular::local_index(&cs, rep) {
                        Ok(idx) => {
                            indices.insert(p.label.clone(), idx);
                        }
                        Err(e) => report
                            .notes
                            .push(format!("local index at {}: {e}", p.label)),
                    }
                }
                report::census_section(&mut report, &census, &indices);
            }
            Err(e) => report.failures.push(format!("singularity census: {e}")),
        }
    } else {
        report
            .notes
            .push("census supports two or three state variables; skipped".to_string());
    }

    // Resolution conditions for the quadratic model and its members.
    resolution_stage(doc, &opts.params, &mut report)?;

    // Declared first integrals.
    for (name, expr) in &doc.integrals {
        let residual = field.lie_derivative(expr);
        report.integrals.push(IntegralJson {
            name: name.clone(),
            expression: expr.to_string(),
            conserved: residual.is_zero(),
            residual: if residual.is_zero() {
                None
            } else {
                Some(residual.to_string())
            },
        });
        if !residual.is_zero() {
            report
                .failures
                .push(format!("declared integral {name} is not conserved"));
        }
    }

    // Atlas and uniqueness verdicts for systems with a published gluing.
    atlas_stage(doc, opts, &mut report)?;

    // Numeric cross-checks of the declared integrals.
    if !opts.skip_numeric && !doc.integrals.is_empty() {
        numeric_stage(doc, &field, opts, &mut report)?;
    }

    Ok(report)
}

fn resolution_stage(
    doc: &SystemDoc,
    params: &BTreeMap<String, Gq>,
    report: &mut AnalysisReport,
) -> Result<(), PipelineError> {
    let catalog = systems::lorenz();
    let is_model = doc.vars == catalog.statevars
        && doc
            .to_field()
            .map(|f| f.components == catalog.components)
            .unwrap_or(false);
    if is_model {
        let rs = resolve::apply_resolution(&catalog, &BTreeMap::new(), false)?;
        let matches = resolve::compare_conditions(&rs);
        let families = resolve::solve_conditions();
        let resolvable = full_triple(params)
            .map(|(s, e, b)| resolve::check_resolvable(&s, &e, &b));
        report.resolution = Some(report::resolution_section(
            &rs,
            &matches,
            &families,
            resolvable,
        ));
        return Ok(());
    }
    if let Some((s, e, b)) = known_member(&doc.name) {
        let resolvable = match &e {
            Some(e) => resolve::check_resolvable(&s, e, &b),
            // Symbolic epsilon: conditions must vanish identically.
            None => {
                let binds: BTreeMap<String, Gq> =
                    [("sigma".to_string(), s.clone()), ("b".to_string(), b.clone())]
                        .into_iter()
                        .collect();
                resolve::condition_polynomials()
                    .iter()
                    .all(|c| c.eval_partial(&binds).is_zero())
            }
        };
        report.notes.push(format!(
            "recognized member of the quadratic model at (sigma, epsilon, b) = ({s}, {}, {b}); resolvable: {resolvable}",
            e.as_ref().map_or("free".to_string(), Gq::to_string)
        ));
    }
    Ok(())
}

fn full_triple(params: &BTreeMap<String, Gq>) -> Option<(Gq, Gq, Gq)> {
    Some((
        params.get("sigma")?.clone(),
        params.get("epsilon")?.clone(),
        params.get("b")?.clone(),
    ))
}

fn atlas_stage(
    doc: &SystemDoc,
    opts: &AnalyzeOptions,
    report: &mut AnalysisReport,
) -> Result<(), PipelineError> {
    let Some(spec) = atlas_spec_for(&doc.name)? else {
        return Ok(());
    };
    // Bind whatever parameters the caller supplied; remaining free
    // parameters stay symbolic for the polynomiality check, except for the
    // uniqueness search which needs fixed exact values.
    let bound = verify::bind_atlas(&spec, &opts.params)?;
    let atlas_report = verify::verify_atlas(&bound)
        .map_err(|e| PipelineError::Internal(e.to_string()))?;
    if !atlas_report.all_pass {
        report
            .failures
            .push(format!("atlas verification failed for {}", spec.name));
    }
    report.atlases.push(AtlasJson::from_report(&atlas_report));

    if spec.name == "system21" || spec.name == "m21" {
        let mut sampler = crate::sample::Sampler::new(opts.seed ^ 0xA71A5);
        let mut binds = opts.params.clone();
        for p in spec.base.params.iter() {
            binds
                .entry(p.clone())
                .or_insert_with(|| sampler.nonzero_rational());
        }
        let fixed = verify::bind_atlas(&spec, &binds)?;
        let result = verify::uniqueness_search(&fixed.charts)
            .map_err(|e| PipelineError::Internal(e.to_string()))?;
        let target = verify::field_to_quadratic_coeffs(&fixed.base);
        let matches = target
            .as_ref()
            .map(|t| result.is_span_of(t))
            .unwrap_or(false);
        if !matches {
            report.failures.push(format!(
                "uniqueness search over {} did not pin the base system",
                spec.name
            ));
        }
        report.uniqueness.push(UniquenessJson {
            atlas: spec.name.clone(),
            dimension: result.dim,
            matches_base_system: matches,
        });
    }
    Ok(())
}

/// The published atlas attached to a catalog system name.
pub fn atlas_spec_for(name: &str) -> Result<Option<AtlasSpec>, PipelineError> {
    let spec = match name {
        "system21" => Some(verify::atlas_for_system21()?),
        "m21" => Some(verify::atlas_for_m21()?),
        "xy41" => Some(verify::atlas_for_xy41()?),
        _ => None,
    };
    Ok(spec)
}

fn numeric_stage(
    doc: &SystemDoc,
    field: &VField,
    opts: &AnalyzeOptions,
    report: &mut AnalysisReport,
) -> Result<(), PipelineError> {
    let has_exp = !field.expsyms.is_empty();
    let t_end = opts.t_end.unwrap_or(if has_exp { 2.0 } else { 10.0 });
    let step = opts.step.unwrap_or(if has_exp { 1e-4 } else { 1e-3 });
    let x0: Vec<Complex64> = opts.x0.clone().unwrap_or_else(|| {
        let mut v = vec![Complex64::new(0.0, 0.0); field.dim()];
        v[0] = Complex64::new(1.0, 0.0);
        v
    });
    let compiled = match CompiledField::new(field, &BTreeMap::new()) {
        Ok(c) => c,
        Err(e) => {
            report
                .notes
                .push(format!("numeric checks skipped: {e}"));
            return Ok(());
        }
    };
    let traj = numeric::integrate(&compiled, &x0, 0.0, t_end, step)
        .map_err(|e| PipelineError::Internal(e.to_string()))?;
    let mut drifts = Vec::new();
    let expsyms: Vec<(String, Gq)> = field
        .expsyms
        .iter()
        .map(|e| (e.name.clone(), e.rate.clone()))
        .collect();
    for (name, expr) in &doc.integrals {
        let obs = match CompiledObservable::new(expr, &field.statevars, &expsyms, &opts.params) {
            Ok(o) => o,
            Err(e) => {
                report
                    .notes
                    .push(format!("numeric drift for {name} skipped: {e}"));
                continue;
            }
        };
        let drift = numeric::drift_check(&traj, &obs);
        drifts.push(DriftJson {
            integral: name.clone(),
            t_span: [0.0, t_end],
            step,
            max_drift: format!("{drift:.14e}"),
            blew_up: traj.blew_up.is_some(),
        });
    }
    let order = if doc.integrals.is_empty() {
        None
    } else {
        let (name, expr) = &doc.integrals[0];
        CompiledObservable::new(expr, &field.statevars, &expsyms, &opts.params)
            .ok()
            .and_then(|obs| {
                let steps = [8.0 * step, 4.0 * step, 2.0 * step, step];
                numeric::convergence_order(&compiled, &obs, &x0, 0.0, t_end, &steps)
                    .ok()
                    .map(|o| (name, o))
            })
            .map(|(_, o)| format!("{o:.3}"))
    };
    report.numeric = Some(NumericJson { drifts, convergence_order: order });
    Ok(())
}

/// Exact-value rendering used by the CLI for points and indices.
pub fn render_value(v: &ValueJson) -> String {
    match v {
        ValueJson::Exact { value, .. } => value.clone(),
        ValueJson::Approx { re, im, .. } => format!("{re}+{im}i (approx)"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysdef;

    fn lorenz_doc() -> SystemDoc {
        sysdef::parse(include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../systems/lorenz.sys"
        )))
        .unwrap()
    }

    #[test]
    fn analyze_the_quadratic_model() {
        let report = analyze(&lorenz_doc(), &AnalyzeOptions::default()).unwrap();
        assert_eq!(report.singularities.len(), 5);
        assert_eq!(report.balances.len(), 2);
        let res = report.resolution.as_ref().unwrap();
        assert_eq!(res.families.len(), 4);
        assert!(res.conditions.iter().all(|c| c.matches));
        assert!(report.failures.is_empty(), "failures: {:?}", report.failures);
    }

    #[test]
    fn analyze_with_member_parameters() {
        let params: BTreeMap<String, Gq> = [
            ("sigma".to_string(), Gq::from_int(2)),
            ("epsilon".to_string(), Gq::zero()),
            ("b".to_string(), Gq::one()),
        ]
        .into_iter()
        .collect();
        let opts = AnalyzeOptions { params, ..Default::default() };
        let report = analyze(&lorenz_doc(), &opts).unwrap();
        assert_eq!(report.resolution.unwrap().resolvable_at_params, Some(true));
    }

    #[test]
    fn analyze_integrable_member_file() {
        let doc = sysdef::parse(include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../systems/system31.sys"
        )))
        .unwrap();
        let report = analyze(&doc, &AnalyzeOptions::default()).unwrap();
        assert!(report.integrals[0].conserved);
        let n = report.numeric.unwrap();
        let drift: f64 = n.drifts[0].max_drift.parse().unwrap();
        assert!(drift <= 1e-8);
        assert!(report
            .notes
            .iter()
            .any(|n| n.contains("resolvable: true")));
    }

    #[test]
    fn json_report_is_deterministic_and_valid() {
        let doc = lorenz_doc();
        let r1 = analyze(&doc, &AnalyzeOptions::default()).unwrap().to_json();
        let r2 = analyze(&doc, &AnalyzeOptions::default()).unwrap().to_json();
        assert_eq!(r1, r2);
        let v: serde_json::Value = serde_json::from_str(&r1).unwrap();
        crate::report::validate_report_json(&v).unwrap();
    }
}
