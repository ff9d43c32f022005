//! Vector fields with symbolic parameters and exponential symbols,
//! rational coordinate changes with verified inverses, pushforwards,
//! Lie derivatives, divergence, and Jacobian determinants.

use crate::error::FieldError;
use crate::gauss::Gq;
use crate::poly::MultiPoly;
use crate::ratexpr::RatExpr;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A symbol whose time derivative is `rate * itself` (an exponential
/// `e^{rate*t}` treated as an ordinary algebra variable).
#[derive(Clone, Debug, PartialEq)]
pub struct ExpSymbol {
    pub name: String,
    pub rate: Gq,
}

/// A named dynamical system: `d(statevars)/dt = components`.
#[derive(Clone, Debug, PartialEq)]
pub struct VField {
    pub name: String,
    pub statevars: Vec<String>,
    pub components: Vec<RatExpr>,
    pub params: BTreeSet<String>,
    pub expsyms: Vec<ExpSymbol>,
}

impl VField {
    pub fn new(
        name: &str,
        statevars: Vec<String>,
        components: Vec<RatExpr>,
        params: BTreeSet<String>,
        expsyms: Vec<ExpSymbol>,
    ) -> Result<Self, FieldError> {
        if components.len() != statevars.len() {
            return Err(FieldError::ArityMismatch {
                expected: statevars.len(),
                found: components.len(),
            });
        }
        let f = Self { name: name.to_string(), statevars, components, params, expsyms };
        for c in &f.components {
            for v in c.variables() {
                if !f.declares(&v) {
                    return Err(FieldError::UndeclaredSymbol(v));
                }
            }
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.statevars.len()
    }

    pub fn declares(&self, symbol: &str) -> bool {
        self.statevars.iter().any(|v| v == symbol)
            || self.params.contains(symbol)
            || self.expsyms.iter().any(|e| e.name == symbol)
    }

    pub fn rates(&self) -> BTreeMap<String, Gq> {
        self.expsyms
            .iter()
            .map(|e| (e.name.clone(), e.rate.clone()))
            .collect()
    }

    /// Total time derivative of `f` along the flow: state advection plus
    /// the explicit exponential-symbol term.
    pub fn lie_derivative(&self, f: &RatExpr) -> RatExpr {
        let mut acc = f.time_derivative(&self.rates());
        for (v, comp) in self.statevars.iter().zip(self.components.iter()) {
            let df = f.derivative(v);
            if !df.is_zero() {
                acc = acc.add_ref(&df.mul_ref(comp));
            }
        }
        acc
    }

    /// Sum of the diagonal state derivatives.
    pub fn divergence(&self) -> RatExpr {
        let mut acc = RatExpr::zero();
        for (v, comp) in self.statevars.iter().zip(self.components.iter()) {
            acc = acc.add_ref(&comp.derivative(v));
        }
        acc
    }

    /// Substitute exact values for (some) parameters.
    pub fn bind_params(&self, binds: &BTreeMap<String, Gq>) -> Result<Self, FieldError> {
        let components = self
            .components
            .iter()
            .map(|c| c.eval_partial(binds))
            .collect::<Result<Vec<_>, _>>()
            .map_err(FieldError::Algebra)?;
        let params = self
            .params
            .iter()
            .filter(|p| !binds.contains_key(*p))
            .cloned()
            .collect();
        Ok(Self { components, params, ..self.clone() })
    }

    /// Global conjugation i -> -i of every coefficient.
    pub fn conj(&self) -> Self {
        Self {
            components: self.components.iter().map(RatExpr::conj).collect(),
            expsyms: self
                .expsyms
                .iter()
                .map(|e| ExpSymbol { name: e.name.clone(), rate: e.rate.conj() })
                .collect(),
            ..self.clone()
        }
    }
}

impl fmt::Display for VField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "system {}", self.name)?;
        for (v, c) in self.statevars.iter().zip(self.components.iter()) {
            writeln!(f, "  d{v}/dt = {c}")?;
        }
        Ok(())
    }
}

/// A birational coordinate change with both directions supplied and the
/// inverse identity verified exactly at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap {
    /// New coordinates expressed in the old ones.
    pub forward: Vec<RatExpr>,
    /// Old coordinates expressed in the new ones.
    pub inverse: Vec<RatExpr>,
    pub oldvars: Vec<String>,
    pub newvars: Vec<String>,
    pub note: String,
}

impl RationalMap {
    pub fn new(
        oldvars: Vec<String>,
        newvars: Vec<String>,
        forward: Vec<RatExpr>,
        inverse: Vec<RatExpr>,
        note: &str,
    ) -> Result<Self, FieldError> {
        if forward.len() != newvars.len() || inverse.len() != oldvars.len() {
            return Err(FieldError::ArityMismatch {
                expected: newvars.len(),
                found: forward.len(),
            });
        }
        let m = Self {
            forward,
            inverse,
            oldvars,
            newvars,
            note: note.to_string(),
        };
        m.check_inverse()?;
        Ok(m)
    }

    /// `inverse(forward(x)) = x`, exactly, for every old coordinate.
    fn check_inverse(&self) -> Result<(), FieldError> {
        let binds: BTreeMap<String, RatExpr> = self
            .newvars
            .iter()
            .cloned()
            .zip(self.forward.iter().cloned())
            .collect();
        for (v, inv) in self.oldvars.iter().zip(self.inverse.iter()) {
            let composed = inv
                .substitute(&binds)
                .map_err(FieldError::Algebra)?;
            if composed != RatExpr::var(v) {
                return Err(FieldError::NotInverse {
                    var: v.clone(),
                    got: composed.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn identity(vars: &[String]) -> Self {
        let exprs: Vec<RatExpr> = vars.iter().map(|v| RatExpr::var(v)).collect();
        Self {
            forward: exprs.clone(),
            inverse: exprs,
            oldvars: vars.to_vec(),
            newvars: vars.to_vec(),
            note: "identity".to_string(),
        }
    }

    /// Swap directions.
    pub fn invert(&self) -> Self {
        Self {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
            oldvars: self.newvars.clone(),
            newvars: self.oldvars.clone(),
            note: format!("inverse of {}", self.note),
        }
    }

    /// `other` after `self` (self: A->B, other: B->C, result: A->C).
    pub fn compose(&self, other: &Self) -> Result<Self, FieldError> {
        let fwd_binds: BTreeMap<String, RatExpr> = self
            .newvars
            .iter()
            .cloned()
            .zip(self.forward.iter().cloned())
            .collect();
        let forward = other
            .forward
            .iter()
            .map(|f| f.substitute(&fwd_binds))
            .collect::<Result<Vec<_>, _>>()
            .map_err(FieldError::Algebra)?;
        let inv_binds: BTreeMap<String, RatExpr> = other
            .oldvars
            .iter()
            .cloned()
            .zip(other.inverse.iter().cloned())
            .collect();
        let inverse = self
            .inverse
            .iter()
            .map(|f| f.substitute(&inv_binds))
            .collect::<Result<Vec<_>, _>>()
            .map_err(FieldError::Algebra)?;
        RationalMap::new(
            self.oldvars.clone(),
            other.newvars.clone(),
            forward,
            inverse,
            &format!("{} ; {}", self.note, other.note),
        )
    }

    pub fn conj(&self) -> Self {
        Self {
            forward: self.forward.iter().map(RatExpr::conj).collect(),
            inverse: self.inverse.iter().map(RatExpr::conj).collect(),
            oldvars: self.oldvars.clone(),
            newvars: self.newvars.clone(),
            note: format!("conjugate of {}", self.note),
        }
    }

    /// Substitute exact parameter values in both directions.
    pub fn bind_params(&self, binds: &BTreeMap<String, Gq>) -> Result<Self, FieldError> {
        let forward = self
            .forward
            .iter()
            .map(|c| c.eval_partial(binds))
            .collect::<Result<Vec<_>, _>>()
            .map_err(FieldError::Algebra)?;
        let inverse = self
            .inverse
            .iter()
            .map(|c| c.eval_partial(binds))
            .collect::<Result<Vec<_>, _>>()
            .map_err(FieldError::Algebra)?;
        Ok(Self { forward, inverse, ..self.clone() })
    }

    /// Exact image of a point under the forward map.
    pub fn apply_forward(&self, point: &BTreeMap<String, Gq>) -> Result<Vec<Gq>, FieldError> {
        self.forward
            .iter()
            .map(|f| f.eval(point).map_err(FieldError::Algebra))
            .collect()
    }
}

/// Determinant of the forward Jacobian matrix, exact.
pub fn jacobian_det(m: &RationalMap) -> RatExpr {
    let n = m.oldvars.len();
    let rows: Vec<Vec<RatExpr>> = m
        .forward
        .iter()
        .map(|f| m.oldvars.iter().map(|v| f.derivative(v)).collect())
        .collect();
    det_ratexpr(&rows, n)
}

fn det_ratexpr(rows: &[Vec<RatExpr>], n: usize) -> RatExpr {
    match n {
        0 => RatExpr::one(),
        1 => rows[0][0].clone(),
        2 => (&(&rows[0][0] * &rows[1][1])) - &(&rows[0][1] * &rows[1][0]),
        3 => {
            let minor = |r: usize, c: usize| -> RatExpr {
                let (r1, r2) = match r {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                let (c1, c2) = match c {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                (&(&rows[r1][c1] * &rows[r2][c2])) - &(&rows[r1][c2] * &rows[r2][c1])
            };
            let mut acc = rows[0][0].mul_ref(&minor(0, 0));
            acc = acc.sub_ref(&rows[0][1].mul_ref(&minor(0, 1)));
            acc.add_ref(&rows[0][2].mul_ref(&minor(0, 2)))
        }
        _ => panic!("jacobian_det supports n <= 3"),
    }
}

/// Push a vector field through a rational coordinate change: new-variable
/// time derivatives by the chain rule (including exponential-symbol
/// rates), re-expressed in the new variables.
pub fn pushforward(v: &VField, m: &RationalMap) -> Result<VField, FieldError> {
    assert_eq!(
        v.statevars, m.oldvars,
        "pushforward: map domain must match the field's state variables"
    );
    let inv_binds: BTreeMap<String, RatExpr> = m
        .oldvars
        .iter()
        .cloned()
        .zip(m.inverse.iter().cloned())
        .collect();
    let mut components = Vec::with_capacity(m.newvars.len());
    for f in &m.forward {
        let total = v.lie_derivative(f);
        let expr = total
            .substitute(&inv_binds)
            .map_err(|_| FieldError::DegenerateChart)?;
        components.push(expr);
    }
    VField::new(
        &v.name,
        m.newvars.clone(),
        components,
        v.params.clone(),
        v.expsyms.clone(),
    )
}

/// A system written in a chart with a distinguished boundary equation.
#[derive(Clone, Debug)]
pub struct ChartedSystem {
    pub field: VField,
    pub boundary: MultiPoly,
    pub pole_order: u32,
}

/// Cap on pole orders; nothing in scope exceeds 3.
pub const POLE_ORDER_CAP: u32 = 16;

impl ChartedSystem {
    pub fn new(field: VField, boundary: MultiPoly) -> Result<Self, FieldError> {
        let mut pole_order = 0;
        if !boundary.is_constant() {
            for c in &field.components {
                pole_order = pole_order.max(
                    c.pole_order(&boundary, POLE_ORDER_CAP)
                        .map_err(FieldError::Algebra)?,
                );
            }
        }
        Ok(Self { field, boundary, pole_order })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn divergence_of_catalog_systems() {
        // Hand oracle: sum of diagonal partials of the classic model is
        // -epsilon(sigma + 1 + b).
        let v = systems::lorenz();
        let eps = RatExpr::var("epsilon");
        let sum = RatExpr::var("sigma")
            .add_ref(&RatExpr::one())
            .add_ref(&RatExpr::var("b"));
        assert_eq!(v.divergence(), eps.neg_ref().mul_ref(&sum));
        // Hand oracle: the conservative cubic case has zero divergence.
        assert!(systems::system31().divergence().is_zero());
        // Zero field.
        let zero = VField::new(
            "zero",
            vars(&["x", "y", "z"]),
            vec![RatExpr::zero(), RatExpr::zero(), RatExpr::zero()],
            BTreeSet::new(),
            Vec::new(),
        )
        .unwrap();
        assert!(zero.divergence().is_zero());
    }

    #[test]
    fn lie_derivative_first_integrals() {
        let i31 = systems::integral_31();
        assert!(systems::system31().lie_derivative(&i31).is_zero());
        // Control: generic parameters do not conserve x^2 - 2z.
        let binds: BTreeMap<String, Gq> = [
            ("sigma", Gq::from_int(10)),
            ("epsilon", Gq::from_int(1)),
            ("b", Gq::from_ratio(8, 3)),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        let v = systems::lorenz().bind_params(&binds).unwrap();
        assert!(!v.lie_derivative(&i31).is_zero());
    }

    #[test]
    fn lie_derivative_is_a_derivation() {
        let v = systems::system31();
        let f = RatExpr::var("x").mul_ref(&RatExpr::var("y"));
        let g = RatExpr::var("z").add_ref(&RatExpr::one());
        let lhs = v.lie_derivative(&f.mul_ref(&g));
        let rhs = f
            .mul_ref(&v.lie_derivative(&g))
            .add_ref(&g.mul_ref(&v.lie_derivative(&f)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn pushforward_identity_and_roundtrip() {
        let v = systems::system31();
        let id = RationalMap::identity(&v.statevars);
        assert_eq!(pushforward(&v, &id).unwrap(), v);
    }

    #[test]
    fn jacobian_det_identity() {
        let id = RationalMap::identity(&vars(&["x", "y", "z"]));
        assert!(jacobian_det(&id).is_one());
    }

    #[test]
    fn map_inverse_is_checked() {
        let bad = RationalMap::new(
            vars(&["x"]),
            vars(&["X"]),
            vec![RatExpr::var("x").pow(2).unwrap()],
            vec![RatExpr::var("X")],
            "not invertible",
        );
        assert!(matches!(bad, Err(FieldError::NotInverse { .. })));
    }
}
