//! Fixed-step complex-valued numerical integration for cross-checking the
//! symbolic results: integral drift, convergence order, and
//! movable-singularity exponents. The classical fourth-order one-step
//! scheme is used throughout; determinism matters more than efficiency at
//! this scale.

use crate::error::AlgebraError;
use crate::field::VField;
use crate::gauss::Gq;
use crate::ratexpr::RatExpr;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("state became non-finite at t = {0}")]
    NonFiniteState(f64),
    #[error("field still contains symbolic parameters: {0}")]
    SymbolicParameters(String),
    #[error("io error: {0}")]
    Io(String),
}

/// Norm threshold beyond which integration halts with a blow-up flag.
pub const BLOWUP_NORM: f64 = 1e8;

/// A fixed-step trajectory of a complex state.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub step: f64,
    pub method: &'static str,
    /// Time at which the norm threshold was crossed, when it was.
    pub blew_up: Option<f64>,
}

/// A component compiled to complex coefficients for fast evaluation.
struct CompiledRat {
    num: Vec<(Complex64, Vec<u32>)>,
    den: Vec<(Complex64, Vec<u32>)>,
}

/// A field compiled for numeric integration: polynomial (or rational)
/// components over the state variables plus exponential prefactors.
pub struct CompiledField {
    comps: Vec<CompiledRat>,
    /// (state index used in monomials) is positional; exponential symbols
    /// are evaluated as exp(rate * t).
    exp_rates: Vec<Complex64>,
    nstate: usize,
}

fn compile_expr(
    e: &RatExpr,
    statevars: &[String],
    expnames: &[String],
) -> Result<CompiledRat, NumericError> {
    let slot = |name: &str| -> Result<usize, NumericError> {
        statevars
            .iter()
            .position(|v| v == name)
            .map(Ok)
            .unwrap_or_else(|| {
                expnames
                    .iter()
                    .position(|v| v == name)
                    .map(|k| Ok(statevars.len() + k))
                    .unwrap_or_else(|| Err(NumericError::SymbolicParameters(name.to_string())))
            })
    };
    let pack = |p: &crate::poly::MultiPoly| -> Result<Vec<(Complex64, Vec<u32>)>, NumericError> {
        let nslots = statevars.len() + expnames.len();
        let mut out = Vec::new();
        for (m, c) in p.terms() {
            let mut exps = vec![0u32; nslots];
            for (k, &e) in m.iter().enumerate() {
                if e > 0 {
                    exps[slot(&p.vars()[k])?] = e;
                }
            }
            out.push((c.to_complex64(), exps));
        }
        if out.is_empty() {
            out.push((Complex64::new(0.0, 0.0), vec![0; nslots]));
        }
        Ok(out)
    };
    Ok(CompiledRat { num: pack(e.num())?, den: pack(e.den())? })
}

fn eval_terms(terms: &[(Complex64, Vec<u32>)], vals: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (c, exps) in terms {
        let mut t = *c;
        for (k, &e) in exps.iter().enumerate() {
            if e > 0 {
                t *= vals[k].powu(e);
            }
        }
        acc += t;
    }
    acc
}

impl CompiledField {
    /// Compile a field whose parameters are all bound.
    pub fn new(v: &VField, params: &BTreeMap<String, Gq>) -> Result<Self, NumericError> {
        let bound = v
            .bind_params(params)
            .map_err(|e| NumericError::SymbolicParameters(e.to_string()))?;
        if let Some(p) = bound.params.iter().next() {
            return Err(NumericError::SymbolicParameters(p.clone()));
        }
        let expnames: Vec<String> = bound.expsyms.iter().map(|e| e.name.clone()).collect();
        let comps = bound
            .components
            .iter()
            .map(|c| compile_expr(c, &bound.statevars, &expnames))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            comps,
            exp_rates: bound.expsyms.iter().map(|e| e.rate.to_complex64()).collect(),
            nstate: bound.statevars.len(),
        })
    }

    fn rhs(&self, t: f64, state: &[Complex64], out: &mut [Complex64]) {
        let mut vals = Vec::with_capacity(self.nstate + self.exp_rates.len());
        vals.extend_from_slice(state);
        for r in &self.exp_rates {
            vals.push((r * t).exp());
        }
        for (k, comp) in self.comps.iter().enumerate() {
            let den = eval_terms(&comp.den, &vals);
            out[k] = eval_terms(&comp.num, &vals) / den;
        }
    }
}

/// Integrate with the classical fourth-order scheme at a fixed step.
/// Halts early (with the flag set) when the state norm passes the
/// blow-up threshold.
pub fn integrate(
    field: &CompiledField,
    x0: &[Complex64],
    t0: f64,
    t1: f64,
    step: f64,
) -> Result<Trajectory, NumericError> {
    assert!(step > 0.0, "step must be positive");
    let n = field.nstate;
    assert_eq!(x0.len(), n, "initial state arity mismatch");
    let steps = ((t1 - t0) / step).round() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut t = t0;
    let mut s = x0.to_vec();
    times.push(t);
    states.push(s.clone());
    let mut k1 = vec![Complex64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    let mut blew_up = None;
    for _ in 0..steps {
        field.rhs(t, &s, &mut k1);
        for j in 0..n {
            tmp[j] = s[j] + k1[j] * (step / 2.0);
        }
        field.rhs(t + step / 2.0, &tmp, &mut k2);
        for j in 0..n {
            tmp[j] = s[j] + k2[j] * (step / 2.0);
        }
        field.rhs(t + step / 2.0, &tmp, &mut k3);
        for j in 0..n {
            tmp[j] = s[j] + k3[j] * step;
        }
        field.rhs(t + step, &tmp, &mut k4);
        for j in 0..n {
            s[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (step / 6.0);
        }
        t += step;
        if s.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(NumericError::NonFiniteState(t));
        }
        times.push(t);
        states.push(s.clone());
        if s.iter().map(|c| c.norm()).fold(0.0, f64::max) > BLOWUP_NORM {
            blew_up = Some(t);
            break;
        }
    }
    Ok(Trajectory { times, states, step, method: "rk4", blew_up })
}

/// A scalar observable `f(state, t)` compiled from a rational expression,
/// with exponential symbols evaluated as `exp(rate t)`.
pub struct CompiledObservable {
    expr: CompiledRat,
    exp_rates: Vec<Complex64>,
    nstate: usize,
}

impl CompiledObservable {
    pub fn new(
        f: &RatExpr,
        statevars: &[String],
        expsyms: &[(String, Gq)],
        params: &BTreeMap<String, Gq>,
    ) -> Result<Self, NumericError> {
        let bound = f.eval_partial(params).map_err(NumericError::Algebra)?;
        let expnames: Vec<String> = expsyms.iter().map(|(n, _)| n.clone()).collect();
        for var in bound.variables() {
            if !statevars.contains(&var) && !expnames.contains(&var) {
                return Err(NumericError::SymbolicParameters(var));
            }
        }
        Ok(Self {
            expr: compile_expr(&bound, statevars, &expnames)?,
            exp_rates: expsyms.iter().map(|(_, r)| r.to_complex64()).collect(),
            nstate: statevars.len(),
        })
    }

    pub fn eval(&self, t: f64, state: &[Complex64]) -> Complex64 {
        let mut vals = Vec::with_capacity(self.nstate + self.exp_rates.len());
        vals.extend_from_slice(state);
        for r in &self.exp_rates {
            vals.push((r * t).exp());
        }
        eval_terms(&self.expr.num, &vals) / eval_terms(&self.expr.den, &vals)
    }
}

/// Maximum absolute drift of an observable along a trajectory:
/// `max_k |f(s_k, t_k) - f(s_0, t_0)|`.
pub fn drift_check(traj: &Trajectory, f: &CompiledObservable) -> f64 {
    let f0 = f.eval(traj.times[0], &traj.states[0]);
    traj.times
        .iter()
        .zip(traj.states.iter())
        .map(|(t, s)| (f.eval(*t, s) - f0).norm())
        .fold(0.0, f64::max)
}

/// Observed convergence order from drift at successively halved steps:
/// the mean of `log2(d(h) / d(h/2))`.
pub fn convergence_order(
    field: &CompiledField,
    observable: &CompiledObservable,
    x0: &[Complex64],
    t0: f64,
    t1: f64,
    steps: &[f64],
) -> Result<f64, NumericError> {
    let mut drifts = Vec::with_capacity(steps.len());
    for &h in steps {
        let traj = integrate(field, x0, t0, t1, h)?;
        drifts.push(drift_check(&traj, observable));
    }
    let mut orders = Vec::new();
    for w in drifts.windows(2) {
        if w[0] > 0.0 && w[1] > 0.0 {
            orders.push((w[0] / w[1]).log2());
        }
    }
    if orders.is_empty() {
        return Err(NumericError::NonFiniteState(0.0));
    }
    Ok(orders.iter().sum::<f64>() / orders.len() as f64)
}

/// Estimate the movable-singularity time from the pole-dominated tail of
/// a component with a simple pole: `1/|x|` is affine in `t` there, so a
/// least-squares line through it crosses zero at the blow-up time.
pub fn estimate_blowup_time(traj: &Trajectory, component: usize, threshold: f64) -> Option<f64> {
    let mut ts = Vec::new();
    let mut us = Vec::new();
    for (t, s) in traj.times.iter().zip(traj.states.iter()) {
        let m = s[component].norm();
        if m >= threshold {
            ts.push(*t);
            us.push(1.0 / m);
        }
    }
    if ts.len() < 8 {
        return None;
    }
    let n = ts.len() as f64;
    let sx: f64 = ts.iter().sum();
    let sy: f64 = us.iter().sum();
    let sxx: f64 = ts.iter().map(|v| v * v).sum();
    let sxy: f64 = ts.iter().zip(us.iter()).map(|(a, b)| a * b).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    if slope >= 0.0 {
        return None;
    }
    Some(-intercept / slope)
}

/// Least-squares slope of `log|x_k(t)|` against `log(t_blow - t)` over the
/// window where `|x_k|` lies in `[lo, hi]`; estimates the pole exponent of
/// a movable singularity (-1 for a simple pole).
pub fn blowup_slope(
    traj: &Trajectory,
    component: usize,
    t_blow: f64,
    lo: f64,
    hi: f64,
) -> Option<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (t, s) in traj.times.iter().zip(traj.states.iter()) {
        let m = s[component].norm();
        let tau = t_blow - t;
        if m >= lo && m <= hi && tau > 0.0 {
            xs.push(tau.ln());
            ys.push(m.ln());
        }
    }
    if xs.len() < 8 {
        return None;
    }
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|v| v * v).sum();
    let sxy: f64 = xs.iter().zip(ys.iter()).map(|(a, b)| a * b).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// Write a trajectory as CSV: `t, re/im of each state component`.
pub fn write_csv<W: Write>(traj: &Trajectory, names: &[String], mut out: W) -> Result<(), NumericError> {
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain(names.iter().flat_map(|n| [format!("re_{n}"), format!("im_{n}")]))
        .collect();
    writeln!(out, "{}", header.join(",")).map_err(|e| NumericError::Io(e.to_string()))?;
    for (t, s) in traj.times.iter().zip(traj.states.iter()) {
        let mut row = vec![format!("{t:.15e}")];
        for c in s {
            row.push(format!("{:.15e}", c.re));
            row.push(format!("{:.15e}", c.im));
        }
        writeln!(out, "{}", row.join(",")).map_err(|e| NumericError::Io(e.to_string()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn no_params() -> BTreeMap<String, Gq> {
        BTreeMap::new()
    }

    #[test]
    fn zero_field_constant_trajectory() {
        let v = crate::field::VField::new(
            "zero",
            vec!["x".into(), "y".into(), "z".into()],
            vec![RatExpr::zero(), RatExpr::zero(), RatExpr::zero()],
            Default::default(),
            Vec::new(),
        )
        .unwrap();
        let f = CompiledField::new(&v, &no_params()).unwrap();
        let traj = integrate(&f, &[c(1.0), c(2.0), c(3.0)], 0.0, 1.0, 0.01).unwrap();
        assert!(traj.blew_up.is_none());
        for s in &traj.states {
            assert_eq!(s[0], c(1.0));
            assert_eq!(s[2], c(3.0));
        }
        // Constant trajectory: every observable has zero drift.
        let obs = CompiledObservable::new(
            &systems::integral_31(),
            &["x".into(), "y".into(), "z".into()],
            &[],
            &no_params(),
        )
        .unwrap();
        assert_eq!(drift_check(&traj, &obs), 0.0);
    }

    #[test]
    fn integral_drift_is_tiny_for_the_integrable_member() {
        let v = systems::system31();
        let f = CompiledField::new(&v, &no_params()).unwrap();
        let traj = integrate(&f, &[c(1.0), c(0.0), c(0.0)], 0.0, 10.0, 1e-3).unwrap();
        let obs = CompiledObservable::new(
            &systems::integral_31(),
            &v.statevars,
            &[],
            &no_params(),
        )
        .unwrap();
        // Conservation oracle: the exact value of x^2 - 2z at the start is 1.
        let drift = drift_check(&traj, &obs);
        assert!(drift <= 1e-8, "drift = {drift:e}");
    }

    #[test]
    fn exponential_integral_drift() {
        for (sys, rate) in [(systems::system41(), 6), (systems::system51(), -6)] {
            let f = CompiledField::new(&sys, &no_params()).unwrap();
            let traj = integrate(&f, &[c(1.0), c(0.0), c(0.0)], 0.0, 2.0, 1e-4).unwrap();
            let obs = CompiledObservable::new(
                &systems::integral_41(),
                &sys.statevars,
                &[("E".to_string(), Gq::from_int(rate))],
                &no_params(),
            )
            .unwrap();
            let drift = drift_check(&traj, &obs);
            assert!(drift <= 1e-7, "rate {rate}: drift = {drift:e}");
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let v = systems::system31();
        let f = CompiledField::new(&v, &no_params()).unwrap();
        let obs = CompiledObservable::new(
            &systems::integral_31(),
            &v.statevars,
            &[],
            &no_params(),
        )
        .unwrap();
        let steps = [0.02, 0.01, 0.005, 0.0025];
        let order = convergence_order(&f, &obs, &[c(1.0), c(0.0), c(0.0)], 0.0, 10.0, &steps)
            .unwrap();
        assert!((order - 4.0).abs() <= 0.3, "order = {order}");
    }

    #[test]
    fn blowup_exponent_of_the_balance_branch() {
        // Start on the leading-order branch at tau = -delta and integrate
        // into the movable singularity at t = delta; the pole exponent of x
        // (fitted on a log-log window) is the balance exponent -1.
        let binds: BTreeMap<String, Gq> = [
            ("sigma".to_string(), Gq::from_int(10)),
            ("epsilon".to_string(), Gq::from_int(1)),
            ("b".to_string(), Gq::from_ratio(8, 3)),
        ]
        .into_iter()
        .collect();
        let v = systems::lorenz();
        let f = CompiledField::new(&v, &binds).unwrap();
        let delta = 0.1;
        let tau = Complex64::new(-delta, 0.0);
        let a = Complex64::new(0.0, 2.0);
        let b = Complex64::new(0.0, -2.0);
        let cc = Complex64::new(-2.0, 0.0);
        let x0 = [a / tau, b / (tau * tau), cc / (tau * tau)];
        let traj = integrate(&f, &x0, 0.0, 2.0 * delta, 1e-6).unwrap();
        assert!(traj.blew_up.is_some());
        let t_blow = estimate_blowup_time(&traj, 0, 1e3).unwrap();
        let slope = blowup_slope(&traj, 0, t_blow, 1e2, 1e4).unwrap();
        assert!((slope - (-1.0)).abs() <= 0.05, "slope = {slope}");
    }

    #[test]
    fn csv_export_shape() {
        let v = systems::system31();
        let f = CompiledField::new(&v, &no_params()).unwrap();
        let traj = integrate(&f, &[c(1.0), c(0.0), c(0.0)], 0.0, 0.1, 0.01).unwrap();
        let mut buf = Vec::new();
        write_csv(&traj, &v.statevars, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,re_x,im_x,re_y,im_y,re_z,im_z");
        assert_eq!(lines.count(), 11);
    }
}
