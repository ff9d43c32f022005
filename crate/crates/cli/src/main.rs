//! Command line front end: parse a system definition, run the analysis
//! stages, and emit human-readable text plus optional JSON reports.
//!
//! Exit codes: 0 success, 1 input/parse error, 2 internal error,
//! 3 verification failure under `--strict`.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use polyatlas::charts::to_chart;
use polyatlas::gauss::{parse_gaussian, Gq};
use polyatlas::numeric::{self, CompiledField, CompiledObservable};
use polyatlas::painleve;
use polyatlas::pipeline::{self, AnalyzeOptions, ChartChoice};
use polyatlas::report::{self, AnalysisReport, ValueJson};
use polyatlas::resolve;
use polyatlas::singular;
use polyatlas::suite;
use polyatlas::sysdef::{self, SystemDoc};
use polyatlas::verify;
use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "polyatlas",
    about = "Exact analysis of polynomial ODE systems: boundary singularities, local indices, dominant balances, blow-up resolution, first integrals, and birational atlases",
    version
)]
struct Cli {
    /// Run the complete verification suite and exit.
    #[arg(long, global = true)]
    paper_suite: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Bind parameters exactly, e.g. `--params sigma=2,epsilon=0,b=1`.
    #[arg(long, value_name = "K=V,...")]
    params: Option<String>,
    /// Write the JSON report to this path (`-` for stdout).
    #[arg(long, value_name = "PATH")]
    json: Option<String>,
    /// Seed for the deterministic random draws.
    #[arg(long, default_value_t = suite::DEFAULT_SEED)]
    seed: u64,
    /// Turn report-level failures into a nonzero exit.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: charts, census, indices, balances, resolution,
    /// integrals, atlases, numeric cross-checks.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
        /// Chart families for the census.
        #[arg(long, value_parser = ["standard", "weighted", "all"], default_value = "all")]
        charts: String,
        /// Skip the numeric cross-checks.
        #[arg(long)]
        skip_numeric: bool,
        /// Export the numeric trajectory as CSV.
        #[arg(long, value_name = "PATH")]
        traj: Option<PathBuf>,
    },
    /// Dominant balances of the system.
    Painleve {
        file: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
        /// Bound on the exponent search.
        #[arg(long, default_value_t = painleve::DEFAULT_MAX_EXP)]
        max_exp: u32,
    },
    /// Local index at an accessible singularity.
    Index {
        file: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
        /// Chart name, e.g. `U1` or `W(1,2,2)`.
        #[arg(long)]
        chart: String,
        /// Chart coordinates of the point, e.g. `0,0,0` or `0,1/2*i,1/2`.
        #[arg(long)]
        point: String,
    },
    /// Resolution conditions and parameter families.
    Resolve {
        file: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Check the declared first integrals exactly.
    VerifyIntegrals {
        file: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Verify the published atlas of a catalog system.
    Atlas {
        file: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
        /// Atlas name (defaults to the system name).
        #[arg(long)]
        atlas: Option<String>,
    },
    /// Degree-2 uniqueness search over a published atlas.
    Uniqueness {
        #[command(flatten)]
        common: CommonOpts,
        /// Atlas name: `system21` or `m21`.
        #[arg(long)]
        atlas: String,
    },
    /// Numeric integration and integral drift.
    Numeric {
        file: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
        /// Initial state, comma-separated (supports `a/b+c/d*i`).
        #[arg(long, default_value = "1,0,0")]
        x0: String,
        /// End time.
        #[arg(long, default_value_t = 10.0)]
        t: f64,
        /// Fixed step size.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Export the trajectory as CSV.
        #[arg(long, value_name = "PATH")]
        traj: Option<PathBuf>,
    },
    /// Run the complete verification suite.
    Suite {
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.paper_suite {
        return run_suite(&CommonOpts {
            params: None,
            json: None,
            seed: suite::DEFAULT_SEED,
            strict: true,
        });
    }
    let Some(cmd) = cli.command else {
        eprintln!("error: no subcommand given (try `polyatlas suite` or `--help`)");
        return ExitCode::from(1);
    };
    match dispatch(cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    msg: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.msg)
    }
}

fn input_err(msg: impl Into<String>) -> CliError {
    CliError { code: 1, msg: msg.into() }
}

fn internal_err(msg: impl Into<String>) -> CliError {
    CliError { code: 2, msg: msg.into() }
}

fn load_doc(path: &PathBuf) -> Result<SystemDoc, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
    sysdef::parse(&text).map_err(|e| input_err(e.to_string()))
}

fn parse_params(spec: &Option<String>) -> Result<BTreeMap<String, Gq>, CliError> {
    let mut out = BTreeMap::new();
    let Some(spec) = spec else {
        return Ok(out);
    };
    for pair in spec.split(',') {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| input_err(format!("bad parameter binding `{pair}`")))?;
        let g = parse_gaussian(v)
            .ok_or_else(|| input_err(format!("bad parameter value `{v}`")))?;
        out.insert(k.trim().to_string(), g);
    }
    Ok(out)
}

fn parse_point(spec: &str) -> Result<Vec<Gq>, CliError> {
    spec.split(',')
        .map(|s| parse_gaussian(s).ok_or_else(|| input_err(format!("bad coordinate `{s}`"))))
        .collect()
}

fn write_json(common: &CommonOpts, report: &AnalysisReport) -> Result<(), CliError> {
    let Some(path) = &common.json else {
        return Ok(());
    };
    let text = report.to_json();
    if path == "-" {
        println!("{text}");
    } else {
        fs::write(path, text).map_err(|e| internal_err(format!("cannot write {path}: {e}")))?;
    }
    Ok(())
}

fn finish(report: &AnalysisReport, common: &CommonOpts) -> Result<ExitCode, CliError> {
    write_json(common, report)?;
    if common.strict && !report.failures.is_empty() {
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cmd: Command) -> Result<ExitCode, CliError> {
    match cmd {
        Command::Analyze { file, common, charts, skip_numeric, traj } => {
            let doc = load_doc(&file)?;
            let opts = AnalyzeOptions {
                charts: match charts.as_str() {
                    "standard" => ChartChoice::Standard,
                    "weighted" => ChartChoice::Weighted,
                    _ => ChartChoice::All,
                },
                params: parse_params(&common.params)?,
                skip_numeric,
                seed: common.seed,
                ..Default::default()
            };
            let report = pipeline::analyze(&doc, &opts)
                .map_err(|e| match e {
                    pipeline::PipelineError::Parse(p) => input_err(p.to_string()),
                    pipeline::PipelineError::Internal(m) => internal_err(m),
                })?;
            print_analysis(&report);
            if let Some(path) = traj {
                export_trajectory(&doc, &opts.params, "1,0,0", 10.0, 1e-3, &path)?;
            }
            finish(&report, &common)
        }
        Command::Painleve { file, common, max_exp } => {
            let doc = load_doc(&file)?;
            let params = parse_params(&common.params)?;
            let field = doc
                .to_field()
                .and_then(|f| f.bind_params(&params))
                .map_err(|e| input_err(e.to_string()))?;
            let scan = painleve::dominant_balances(&field, max_exp)
                .map_err(|e| internal_err(e.to_string()))?;
            let mut report = AnalysisReport::new(&doc.name, common.seed);
            report::balance_section(&mut report, &scan);
            if scan.balances.is_empty() {
                println!("no dominant balance with integer exponents up to {max_exp}");
            }
            for b in &scan.balances {
                let coeffs: Vec<String> =
                    b.coefficients.iter().map(|c| c.to_string()).collect();
                println!(
                    "balance {}: exponents ({}) coefficients ({})",
                    b.branch,
                    b.exponents
                        .iter()
                        .map(u32::to_string)
                        .collect::<Vec<_>>()
                        .join(","),
                    coeffs.join(", ")
                );
            }
            finish(&report, &common)
        }
        Command::Index { file, common, chart, point } => {
            let doc = load_doc(&file)?;
            let params = parse_params(&common.params)?;
            let field = doc
                .to_field()
                .and_then(|f| f.bind_params(&params))
                .map_err(|e| input_err(e.to_string()))?;
            let balances = painleve::dominant_balances(&field, painleve::DEFAULT_MAX_EXP)
                .unwrap_or_default();
            let charts = pipeline::census_charts(&field, ChartChoice::All, &balances)
                .map_err(|e| internal_err(e.to_string()))?;
            let target = charts
                .iter()
                .find(|c| c.name == chart)
                .ok_or_else(|| input_err(format!("unknown chart `{chart}`")))?;
            let cs = to_chart(&field, target).map_err(|e| internal_err(e.to_string()))?;
            let coords = parse_point(&point)?;
            let scan = singular::find_accessible_singularities(&cs, &target.name)
                .map_err(|e| internal_err(e.to_string()))?;
            let hit = scan
                .points
                .iter()
                .find(|p| {
                    p.coords.len() == coords.len()
                        && p.coords
                            .iter()
                            .zip(coords.iter())
                            .all(|(c, w)| c.exact() == Some(w))
                })
                .ok_or_else(|| {
                    input_err("the point is not an accessible singularity of that chart")
                })?;
            let idx =
                singular::local_index(&cs, hit).map_err(|e| internal_err(e.to_string()))?;
            let evs: Vec<String> = idx
                .eigenvalues
                .iter()
                .map(|e| {
                    pipeline::render_value(&ValueJson::from_eigenvalue(e))
                })
                .collect();
            println!("local index at {chart} {point}: ({})", evs.join(", "));
            if let Some(r) = &idx.ratios {
                let rs: Vec<String> = r.iter().map(Gq::to_string).collect();
                println!("ratios: ({})", rs.join(", "));
            }
            match singular::resonances(&idx) {
                Ok(res) => println!(
                    "resonances: ({})",
                    res.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
                ),
                Err(why) => println!("resonances: not applicable ({why:?})"),
            }
            println!("classification: {:?}", singular::classify(&idx));
            Ok(ExitCode::SUCCESS)
        }
        Command::Resolve { file, common } => {
            let doc = load_doc(&file)?;
            let params = parse_params(&common.params)?;
            let mut report = AnalysisReport::new(&doc.name, common.seed);
            report.notes = report::standing_notes();
            let rs = resolve::apply_resolution(
                &doc.to_field().map_err(|e| input_err(e.to_string()))?,
                &BTreeMap::new(),
                false,
            )
            .map_err(|e| {
                input_err(format!(
                    "resolution runs on the three-parameter quadratic model: {e}"
                ))
            })?;
            let matches = resolve::compare_conditions(&rs);
            let families = resolve::solve_conditions();
            let at_params = if params.is_empty() {
                None
            } else {
                let (s, e, b) = (
                    params.get("sigma"),
                    params.get("epsilon"),
                    params.get("b"),
                );
                match (s, e, b) {
                    (Some(s), Some(e), Some(b)) => Some(resolve::check_resolvable(s, e, b)),
                    _ => None,
                }
            };
            let section = report::resolution_section(&rs, &matches, &families, at_params);
            for c in &section.conditions {
                println!(
                    "condition {}: {} | computed pole = {} | constant {} x eps^{}",
                    c.condition,
                    c.published,
                    c.computed_pole,
                    c.constant.as_deref().unwrap_or("-"),
                    c.eps_power
                );
            }
            for f in &section.families {
                let eps = if f.epsilon_free {
                    "epsilon free".to_string()
                } else {
                    format!(
                        "epsilon = {}",
                        f.epsilon.as_ref().map(pipeline::render_value).unwrap_or_default()
                    )
                };
                println!(
                    "family: sigma = {}, {eps}, b = {}",
                    pipeline::render_value(&f.sigma),
                    pipeline::render_value(&f.b)
                );
            }
            if let Some(r) = section.resolvable_at_params {
                println!("resolvable at the given parameters: {r}");
            }
            report.resolution = Some(section);
            finish(&report, &common)
        }
        Command::VerifyIntegrals { file, common } => {
            let doc = load_doc(&file)?;
            let params = parse_params(&common.params)?;
            let field = doc
                .to_field()
                .and_then(|f| f.bind_params(&params))
                .map_err(|e| input_err(e.to_string()))?;
            let mut report = AnalysisReport::new(&doc.name, common.seed);
            if doc.integrals.is_empty() {
                println!("no integrals declared in {}", file.display());
            }
            for (name, expr) in &doc.integrals {
                let conserved = verify::verify_first_integral(&field, expr);
                println!("integral {name} = {expr}: {}", if conserved { "conserved (exact)" } else { "NOT conserved" });
                if !conserved {
                    report.failures.push(format!("integral {name} not conserved"));
                }
            }
            finish(&report, &common)
        }
        Command::Atlas { file, common, atlas } => {
            let doc = load_doc(&file)?;
            let name = atlas.unwrap_or_else(|| doc.name.clone());
            let spec = pipeline::atlas_spec_for(&name)
                .map_err(|e| internal_err(e.to_string()))?
                .ok_or_else(|| {
                    input_err(format!(
                        "no published atlas registered for `{name}` (known: system21, m21, xy41)"
                    ))
                })?;
            let params = parse_params(&common.params)?;
            let bound =
                verify::bind_atlas(&spec, &params).map_err(|e| internal_err(e.to_string()))?;
            let r = verify::verify_atlas(&bound).map_err(|e| internal_err(e.to_string()))?;
            let mut report = AnalysisReport::new(&doc.name, common.seed);
            for v in &r.verdicts {
                println!(
                    "{}: polynomial = {}{}",
                    v.chart,
                    v.polynomial,
                    match v.det_is_one {
                        Some(d) => format!(", jacobian determinant = 1: {d}"),
                        None => String::new(),
                    }
                );
            }
            println!("atlas {}: {}", r.name, if r.all_pass { "all-pass" } else { "FAILED" });
            if !r.all_pass {
                report.failures.push(format!("atlas {} failed", r.name));
            }
            report.atlases.push(report::AtlasJson::from_report(&r));
            finish(&report, &common)
        }
        Command::Uniqueness { common, atlas } => {
            let spec = pipeline::atlas_spec_for(&atlas)
                .map_err(|e| internal_err(e.to_string()))?
                .filter(|s| s.name != "xy41")
                .ok_or_else(|| {
                    input_err(format!("no quadratic ansatz registered for `{atlas}`"))
                })?;
            let mut binds = parse_params(&common.params)?;
            let mut sampler = polyatlas::sample::Sampler::new(common.seed ^ 0xA71A5);
            for p in spec.base.params.iter() {
                binds
                    .entry(p.clone())
                    .or_insert_with(|| sampler.nonzero_rational());
            }
            let fixed =
                verify::bind_atlas(&spec, &binds).map_err(|e| internal_err(e.to_string()))?;
            let result = verify::uniqueness_search(&fixed.charts)
                .map_err(|e| internal_err(e.to_string()))?;
            let target = verify::field_to_quadratic_coeffs(&fixed.base);
            let matches = target.as_ref().map(|t| result.is_span_of(t)).unwrap_or(false);
            let shown: Vec<String> = binds.iter().map(|(k, v)| format!("{k} = {v}")).collect();
            println!("parameters: {}", shown.join(", "));
            println!(
                "solution space dimension: {} (up to scale); equals the base system: {matches}",
                result.dim
            );
            let mut report = AnalysisReport::new(&atlas, common.seed);
            if !matches {
                report.failures.push("uniqueness search failed".into());
            }
            finish(&report, &common)
        }
        Command::Numeric { file, common, x0, t, step, traj } => {
            let doc = load_doc(&file)?;
            let params = parse_params(&common.params)?;
            let field = doc
                .to_field()
                .and_then(|f| f.bind_params(&params))
                .map_err(|e| input_err(e.to_string()))?;
            let x0 = parse_point(&x0)?;
            if x0.len() != field.dim() {
                return Err(input_err(format!(
                    "x0 has {} coordinates, system has {}",
                    x0.len(),
                    field.dim()
                )));
            }
            let x0c: Vec<Complex64> = x0.iter().map(Gq::to_complex64).collect();
            let compiled = CompiledField::new(&field, &BTreeMap::new())
                .map_err(|e| input_err(e.to_string()))?;
            let trajectory = numeric::integrate(&compiled, &x0c, 0.0, t, step)
                .map_err(|e| internal_err(e.to_string()))?;
            println!(
                "integrated {} steps with h = {step:e}{}",
                trajectory.times.len() - 1,
                match trajectory.blew_up {
                    Some(tb) => format!(", blow-up flagged at t = {tb:.6}"),
                    None => String::new(),
                }
            );
            let mut report = AnalysisReport::new(&doc.name, common.seed);
            let expsyms: Vec<(String, Gq)> = field
                .expsyms
                .iter()
                .map(|e| (e.name.clone(), e.rate.clone()))
                .collect();
            let mut drifts = Vec::new();
            for (name, expr) in &doc.integrals {
                let obs = CompiledObservable::new(expr, &field.statevars, &expsyms, &params)
                    .map_err(|e| input_err(e.to_string()))?;
                let d = numeric::drift_check(&trajectory, &obs);
                println!("max drift of {name}: {d:.3e}");
                drifts.push(report::DriftJson {
                    integral: name.clone(),
                    t_span: [0.0, t],
                    step,
                    max_drift: format!("{d:.14e}"),
                    blew_up: trajectory.blew_up.is_some(),
                });
            }
            report.numeric = Some(report::NumericJson { drifts, convergence_order: None });
            if let Some(path) = traj {
                let f = fs::File::create(&path)
                    .map_err(|e| internal_err(format!("cannot write {}: {e}", path.display())))?;
                numeric::write_csv(&trajectory, &field.statevars, f)
                    .map_err(|e| internal_err(e.to_string()))?;
                println!("trajectory written to {}", path.display());
            }
            finish(&report, &common)
        }
        Command::Suite { common } => Ok(run_suite(&common)),
    }
}

fn run_suite(common: &CommonOpts) -> ExitCode {
    let results = suite::run_all(common.seed);
    for r in &results {
        println!("{}", suite::render_line(r));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if let Some(path) = &common.json {
        let text = serde_json::to_string_pretty(&results).expect("results serialize");
        if path == "-" {
            println!("{text}");
        } else if let Err(e) = fs::write(path, text) {
            eprintln!("error: cannot write {path}: {e}");
            return ExitCode::from(2);
        }
    }
    if failed > 0 {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

fn export_trajectory(
    doc: &SystemDoc,
    params: &BTreeMap<String, Gq>,
    x0: &str,
    t: f64,
    step: f64,
    path: &PathBuf,
) -> Result<(), CliError> {
    let field = doc
        .to_field()
        .and_then(|f| f.bind_params(params))
        .map_err(|e| input_err(e.to_string()))?;
    let x0 = parse_point(x0)?;
    let x0c: Vec<Complex64> = x0
        .iter()
        .map(Gq::to_complex64)
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(field.dim())
        .collect();
    let compiled =
        CompiledField::new(&field, &BTreeMap::new()).map_err(|e| input_err(e.to_string()))?;
    let trajectory = numeric::integrate(&compiled, &x0c, 0.0, t, step)
        .map_err(|e| internal_err(e.to_string()))?;
    let f = fs::File::create(path)
        .map_err(|e| internal_err(format!("cannot write {}: {e}", path.display())))?;
    numeric::write_csv(&trajectory, &field.statevars, f).map_err(|e| internal_err(e.to_string()))
}

fn print_analysis(report: &AnalysisReport) {
    println!("system {}", report.system);
    if !report.params.is_empty() {
        let shown: Vec<String> = report
            .params
            .iter()
            .map(|(k, v)| format!("{k} = {v}"))
            .collect();
        println!("parameters: {}", shown.join(", "));
    }
    println!("charts: {}", report.charts_used.join(", "));
    println!("accessible singularities: {}", report.singularities.len());
    for s in &report.singularities {
        let coords: Vec<String> = s.coords.iter().map(pipeline::render_value).collect();
        let idx = s
            .index
            .as_ref()
            .map(|i| {
                let evs: Vec<String> =
                    i.eigenvalues.iter().map(pipeline::render_value).collect();
                format!("; index ({})", evs.join(", "))
            })
            .unwrap_or_default();
        println!(
            "  {} at {} ({}){}{}",
            s.label,
            s.chart,
            coords.join(", "),
            idx,
            if s.on_curve { " [on a boundary curve]" } else { "" }
        );
    }
    for c in &report.curves {
        println!("  boundary curve in {}: {} = 0", c.chart, c.equation);
    }
    for b in &report.balances {
        let coeffs: Vec<String> = b.coefficients.iter().map(pipeline::render_value).collect();
        println!(
            "balance: exponents ({}), coefficients ({})",
            b.exponents
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(","),
            coeffs.join(", ")
        );
    }
    if let Some(res) = &report.resolution {
        println!("resolution conditions:");
        for c in &res.conditions {
            println!(
                "  condition {}: {} (constant {} x eps^{}, matches: {})",
                c.condition,
                c.published,
                c.constant.as_deref().unwrap_or("-"),
                c.eps_power,
                c.matches
            );
        }
        for f in &res.families {
            let eps = if f.epsilon_free {
                "epsilon free".to_string()
            } else {
                format!(
                    "epsilon = {}",
                    f.epsilon.as_ref().map(pipeline::render_value).unwrap_or_default()
                )
            };
            println!(
                "  family: sigma = {}, {eps}, b = {}",
                pipeline::render_value(&f.sigma),
                pipeline::render_value(&f.b)
            );
        }
        if let Some(r) = res.resolvable_at_params {
            println!("  resolvable at the given parameters: {r}");
        }
    }
    for i in &report.integrals {
        println!(
            "integral {}: {}",
            i.name,
            if i.conserved { "conserved (exact)" } else { "NOT conserved" }
        );
    }
    for a in &report.atlases {
        println!("atlas {}: {}", a.name, if a.all_pass { "all-pass" } else { "FAILED" });
    }
    for u in &report.uniqueness {
        println!(
            "uniqueness over {}: dimension {}, equals base system: {}",
            u.atlas, u.dimension, u.matches_base_system
        );
    }
    if let Some(n) = &report.numeric {
        for d in &n.drifts {
            println!(
                "numeric drift of {} over [0, {}] at h = {:e}: {}",
                d.integral, d.t_span[1], d.step, d.max_drift
            );
        }
        if let Some(o) = &n.convergence_order {
            println!("observed convergence order: {o}");
        }
    }
    if !report.failures.is_empty() {
        println!("failures:");
        for f in &report.failures {
            println!("  {f}");
        }
    }
}
