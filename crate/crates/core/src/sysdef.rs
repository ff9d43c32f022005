//! Line-oriented text format for system definitions, the canonical input
//! path of the command line tool.
//!
//! ```text
//! # comment
//! system lorenz
//! params sigma epsilon b
//! vars x y z
//! dx/dt = y - sigma*epsilon*x
//! dy/dt = -x*z + x - epsilon*y
//! dz/dt = x*y - epsilon*b*z
//! exp E rate -6
//! integral I = E*(x^2 - 2*z)
//! chart U1: X = 1/x, Y = y/x, Z = z/x
//! ```
//!
//! Expressions admit rationals, `i`, declared identifiers, `+ - * / ^`,
//! and parentheses. Exponents are nonnegative integer literals. Division
//! in component and integral expressions is restricted to nonzero
//! constant divisors (input stays polynomial); chart expressions may
//! divide freely.

use crate::error::FieldError;
use crate::field::{ExpSymbol, VField};
use crate::gauss::Gq;
use crate::ratexpr::RatExpr;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// A parsed system document.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemDoc {
    pub name: String,
    pub params: Vec<String>,
    pub vars: Vec<String>,
    /// One component per state variable, aligned with `vars`.
    pub components: Vec<RatExpr>,
    pub expsyms: Vec<(String, Gq)>,
    pub integrals: Vec<(String, RatExpr)>,
    pub charts: Vec<(String, Vec<(String, RatExpr)>)>,
}

impl SystemDoc {
    pub fn to_field(&self) -> Result<VField, FieldError> {
        VField::new(
            &self.name,
            self.vars.clone(),
            self.components.clone(),
            self.params.iter().cloned().collect(),
            self.expsyms
                .iter()
                .map(|(n, r)| ExpSymbol { name: n.clone(), rate: r.clone() })
                .collect(),
        )
    }

    /// The named integral expression, when declared.
    pub fn integral(&self, name: &str) -> Option<&RatExpr> {
        self.integrals
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
#[error("{kind} at line {line}, column {col}")]
pub struct SysdefError {
    pub line: usize,
    pub col: usize,
    pub kind: SysdefErrorKind,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SysdefErrorKind {
    #[error("unexpected character `{0}`")]
    Lex(char),
    #[error("{0}")]
    Parse(String),
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("component count {found} does not match variable count {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
}

fn err<T>(line: usize, col: usize, kind: SysdefErrorKind) -> Result<T, SysdefError> {
    Err(SysdefError { line, col, kind })
}

// ---- Lexer ----

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    col: usize,
}

fn lex_line(line: &str, lineno: usize) -> Result<Vec<Spanned>, SysdefError> {
    let mut out = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let col = k + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            out.push(Spanned {
                tok: Tok::Ident(chars[start..k].iter().collect()),
                col,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let text: String = chars[start..k].iter().collect();
            out.push(Spanned {
                tok: Tok::Int(text.parse().expect("digit run parses")),
                col,
            });
            continue;
        }
        if "+-*/^()=,:".contains(c) {
            out.push(Spanned { tok: Tok::Sym(c), col });
            k += 1;
            continue;
        }
        return err(lineno, col, SysdefErrorKind::Lex(c));
    }
    Ok(out)
}

// ---- Expression parser ----

struct ExprParser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    declared: &'a BTreeSet<String>,
    allow_rational_division: bool,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn col(&self) -> usize {
        self.peek().map_or_else(
            || self.toks.last().map_or(1, |t| t.col + 1),
            |t| t.col,
        )
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn parse_expr(&mut self) -> Result<RatExpr, SysdefError> {
        let mut acc = self.parse_term()?;
        while let Some(Spanned { tok: Tok::Sym(c @ ('+' | '-')), .. }) = self.peek() {
            let c = *c;
            self.bump();
            let rhs = self.parse_term()?;
            acc = if c == '+' { acc.add_ref(&rhs) } else { acc.sub_ref(&rhs) };
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<RatExpr, SysdefError> {
        let mut acc = self.parse_unary()?;
        while let Some(Spanned { tok: Tok::Sym(c @ ('*' | '/')), col }) = self.peek() {
            let (c, op_col) = (*c, *col);
            self.bump();
            let rhs = self.parse_unary()?;
            if c == '*' {
                acc = acc.mul_ref(&rhs);
            } else {
                if rhs.is_zero() {
                    return err(
                        self.line,
                        op_col,
                        SysdefErrorKind::Parse("division by zero".into()),
                    );
                }
                if !self.allow_rational_division && !rhs.is_constant() {
                    return err(
                        self.line,
                        op_col,
                        SysdefErrorKind::Parse(
                            "division is only allowed by nonzero constants".into(),
                        ),
                    );
                }
                acc = acc.div_ref(&rhs).expect("nonzero divisor");
            }
        }
        Ok(acc)
    }

    fn parse_unary(&mut self) -> Result<RatExpr, SysdefError> {
        if let Some(Spanned { tok: Tok::Sym('-'), .. }) = self.peek() {
            self.bump();
            return Ok(self.parse_unary()?.neg_ref());
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<RatExpr, SysdefError> {
        let base = self.parse_atom()?;
        if let Some(Spanned { tok: Tok::Sym('^'), .. }) = self.peek() {
            self.bump();
            let col = self.col();
            match self.bump() {
                Some(Spanned { tok: Tok::Int(n), .. }) => {
                    let Some(e) = n.to_u32() else {
                        return err(
                            self.line,
                            col,
                            SysdefErrorKind::Parse("exponent too large".into()),
                        );
                    };
                    return base.pow(e as i32).map_err(|_| SysdefError {
                        line: self.line,
                        col,
                        kind: SysdefErrorKind::Parse("bad exponent".into()),
                    });
                }
                _ => {
                    return err(
                        self.line,
                        col,
                        SysdefErrorKind::Parse(
                            "exponents must be nonnegative integer literals".into(),
                        ),
                    )
                }
            }
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<RatExpr, SysdefError> {
        let col = self.col();
        match self.bump() {
            Some(Spanned { tok: Tok::Int(n), .. }) => Ok(RatExpr::constant(Gq::from_rational(
                BigRational::from_integer(n),
            ))),
            Some(Spanned { tok: Tok::Ident(name), .. }) => {
                if name == "i" {
                    return Ok(RatExpr::i());
                }
                if !self.declared.contains(&name) {
                    return err(self.line, col, SysdefErrorKind::UndeclaredSymbol(name));
                }
                Ok(RatExpr::var(&name))
            }
            Some(Spanned { tok: Tok::Sym('('), .. }) => {
                let inner = self.parse_expr()?;
                match self.bump() {
                    Some(Spanned { tok: Tok::Sym(')'), .. }) => Ok(inner),
                    _ => err(
                        self.line,
                        col,
                        SysdefErrorKind::Parse("unbalanced parenthesis".into()),
                    ),
                }
            }
            Some(Spanned { tok, col }) => err(
                self.line,
                col,
                SysdefErrorKind::Parse(format!("unexpected token {tok:?}")),
            ),
            None => err(
                self.line,
                col,
                SysdefErrorKind::Parse("unexpected end of line".into()),
            ),
        }
    }
}

fn parse_full_expr(
    toks: &[Spanned],
    line: usize,
    declared: &BTreeSet<String>,
    allow_rational_division: bool,
) -> Result<RatExpr, SysdefError> {
    let mut p = ExprParser { toks, pos: 0, line, declared, allow_rational_division };
    let e = p.parse_expr()?;
    if let Some(t) = p.peek() {
        return err(
            line,
            t.col,
            SysdefErrorKind::Parse(format!("trailing input {:?}", t.tok)),
        );
    }
    Ok(e)
}

// ---- Document parser ----

/// Parse a system document.
pub fn parse(text: &str) -> Result<SystemDoc, SysdefError> {
    let mut name: Option<String> = None;
    let mut params: Vec<String> = Vec::new();
    let mut vars: Vec<String> = Vec::new();
    let mut components: Vec<Option<RatExpr>> = Vec::new();
    let mut expsyms: Vec<(String, Gq)> = Vec::new();
    let mut integrals: Vec<(String, RatExpr)> = Vec::new();
    let mut charts: Vec<(String, Vec<(String, RatExpr)>)> = Vec::new();
    let mut declared: BTreeSet<String> = BTreeSet::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let toks = lex_line(raw, line)?;
        if toks.is_empty() {
            continue;
        }
        let Tok::Ident(head) = &toks[0].tok else {
            return err(line, toks[0].col, SysdefErrorKind::Parse("expected a keyword".into()));
        };
        match head.as_str() {
            "system" => {
                let Some(Spanned { tok: Tok::Ident(n), .. }) = toks.get(1) else {
                    return err(line, toks[0].col, SysdefErrorKind::Parse("expected a system name".into()));
                };
                if name.is_some() {
                    return err(line, toks[0].col, SysdefErrorKind::Duplicate("system".into()));
                }
                name = Some(n.clone());
            }
            "params" => {
                for t in &toks[1..] {
                    let Tok::Ident(p) = &t.tok else {
                        return err(line, t.col, SysdefErrorKind::Parse("expected an identifier".into()));
                    };
                    declare(p, t.col, line, &mut declared)?;
                    params.push(p.clone());
                }
            }
            "vars" => {
                for t in &toks[1..] {
                    let Tok::Ident(v) = &t.tok else {
                        return err(line, t.col, SysdefErrorKind::Parse("expected an identifier".into()));
                    };
                    declare(v, t.col, line, &mut declared)?;
                    vars.push(v.clone());
                    components.push(None);
                }
            }
            "exp" => {
                let Some(Spanned { tok: Tok::Ident(e), col }) = toks.get(1) else {
                    return err(line, toks[0].col, SysdefErrorKind::Parse("expected a symbol name".into()));
                };
                match toks.get(2) {
                    Some(Spanned { tok: Tok::Ident(kw), .. }) if kw == "rate" => {}
                    other => {
                        let c = other.map_or(toks[0].col, |t| t.col);
                        return err(line, c, SysdefErrorKind::Parse("expected `rate`".into()));
                    }
                }
                let rate = parse_rate(&toks[3..], line)?;
                declare(e, *col, line, &mut declared)?;
                expsyms.push((e.clone(), rate));
            }
            "integral" => {
                let Some(Spanned { tok: Tok::Ident(iname), .. }) = toks.get(1) else {
                    return err(line, toks[0].col, SysdefErrorKind::Parse("expected an integral name".into()));
                };
                expect_sym(&toks, 2, '=', line)?;
                let e = parse_full_expr(&toks[3..], line, &declared, false)?;
                integrals.push((iname.clone(), e));
            }
            "chart" => {
                let Some(Spanned { tok: Tok::Ident(cname), .. }) = toks.get(1) else {
                    return err(line, toks[0].col, SysdefErrorKind::Parse("expected a chart name".into()));
                };
                expect_sym(&toks, 2, ':', line)?;
                let mut defs = Vec::new();
                let mut rest = &toks[3..];
                loop {
                    let Some(Spanned { tok: Tok::Ident(lhs), .. }) = rest.first() else {
                        return err(line, toks[0].col, SysdefErrorKind::Parse("expected a chart variable".into()));
                    };
                    let Some(Spanned { tok: Tok::Sym('='), .. }) = rest.get(1) else {
                        return err(line, rest[0].col, SysdefErrorKind::Parse("expected `=`".into()));
                    };
                    // The expression runs to the next top-level comma.
                    let mut depth = 0usize;
                    let mut stop = rest.len();
                    for (k, t) in rest.iter().enumerate().skip(2) {
                        match t.tok {
                            Tok::Sym('(') => depth += 1,
                            Tok::Sym(')') => depth = depth.saturating_sub(1),
                            Tok::Sym(',') if depth == 0 => {
                                stop = k;
                                break;
                            }
                            _ => {}
                        }
                    }
                    let e = parse_full_expr(&rest[2..stop], line, &declared, true)?;
                    defs.push((lhs.clone(), e));
                    if stop == rest.len() {
                        break;
                    }
                    rest = &rest[stop + 1..];
                }
                charts.push((cname.clone(), defs));
            }
            other if other.starts_with('d') && other.len() > 1 => {
                // d<var>/dt = expr
                let var = &other[1..];
                let ok_shape = matches!(
                    (&toks.get(1).map(|t| &t.tok), &toks.get(2).map(|t| &t.tok)),
                    (Some(Tok::Sym('/')), Some(Tok::Ident(dt))) if dt == "dt"
                );
                if !ok_shape {
                    return err(line, toks[0].col, SysdefErrorKind::Parse(format!("unrecognized line `{head} ...`")));
                }
                expect_sym(&toks, 3, '=', line)?;
                let Some(slot) = vars.iter().position(|v| v == var) else {
                    return err(line, toks[0].col, SysdefErrorKind::UndeclaredSymbol(var.to_string()));
                };
                if components[slot].is_some() {
                    return err(line, toks[0].col, SysdefErrorKind::Duplicate(format!("d{var}/dt")));
                }
                let e = parse_full_expr(&toks[4..], line, &declared, false)?;
                components[slot] = Some(e);
            }
            _ => {
                return err(line, toks[0].col, SysdefErrorKind::Parse(format!("unknown keyword `{head}`")));
            }
        }
    }

    let Some(name) = name else {
        return err(1, 1, SysdefErrorKind::Parse("missing `system` line".into()));
    };
    let filled: Vec<RatExpr> = components.iter().flatten().cloned().collect();
    if filled.len() != vars.len() {
        return err(
            1,
            1,
            SysdefErrorKind::ArityMismatch { expected: vars.len(), found: filled.len() },
        );
    }
    Ok(SystemDoc {
        name,
        params,
        vars,
        components: filled,
        expsyms,
        integrals,
        charts,
    })
}

fn declare(
    name: &str,
    col: usize,
    line: usize,
    declared: &mut BTreeSet<String>,
) -> Result<(), SysdefError> {
    if name == "i" || name == "dt" {
        return err(line, col, SysdefErrorKind::Parse(format!("`{name}` is reserved")));
    }
    if !declared.insert(name.to_string()) {
        return err(line, col, SysdefErrorKind::Duplicate(name.to_string()));
    }
    Ok(())
}

fn expect_sym(toks: &[Spanned], pos: usize, sym: char, line: usize) -> Result<(), SysdefError> {
    match toks.get(pos) {
        Some(Spanned { tok: Tok::Sym(c), .. }) if *c == sym => Ok(()),
        other => {
            let col = other.map_or_else(|| toks.last().map_or(1, |t| t.col + 1), |t| t.col);
            err(line, col, SysdefErrorKind::Parse(format!("expected `{sym}`")))
        }
    }
}

/// `rate <int>[/<int>]` with optional leading sign.
fn parse_rate(toks: &[Spanned], line: usize) -> Result<Gq, SysdefError> {
    let mut pos = 0;
    let mut sign = BigInt::one();
    if let Some(Spanned { tok: Tok::Sym('-'), .. }) = toks.get(pos) {
        sign = -sign;
        pos += 1;
    }
    let Some(Spanned { tok: Tok::Int(n), col }) = toks.get(pos) else {
        let col = toks.first().map_or(1, |t| t.col);
        return err(line, col, SysdefErrorKind::Parse("expected a rational rate".into()));
    };
    let num = sign * n;
    let mut den = BigInt::one();
    pos += 1;
    if let Some(Spanned { tok: Tok::Sym('/'), .. }) = toks.get(pos) {
        pos += 1;
        let Some(Spanned { tok: Tok::Int(d), col: dcol }) = toks.get(pos) else {
            return err(line, *col, SysdefErrorKind::Parse("expected a denominator".into()));
        };
        if d.is_zero() {
            return err(line, *dcol, SysdefErrorKind::Parse("zero denominator".into()));
        }
        den = d.clone();
        pos += 1;
    }
    if pos != toks.len() {
        return err(line, toks[pos].col, SysdefErrorKind::Parse("trailing input".into()));
    }
    Ok(Gq::from_rational(BigRational::new(num, den)))
}

// ---- Canonical printer ----

fn print_expr(e: &RatExpr) -> String {
    if e.is_polynomial() {
        format!("{}", e.num())
    } else {
        format!("({}) / ({})", e.num(), e.den())
    }
}

/// Canonical text for a document; `parse(roundtrip(doc))` equals `doc`
/// structurally, and printing a reparsed document is byte-stable.
pub fn roundtrip(doc: &SystemDoc) -> String {
    let mut out = String::new();
    out.push_str(&format!("system {}\n", doc.name));
    if !doc.params.is_empty() {
        out.push_str(&format!("params {}\n", doc.params.join(" ")));
    }
    out.push_str(&format!("vars {}\n", doc.vars.join(" ")));
    for (n, r) in &doc.expsyms {
        let mut rate = String::new();
        let re = r.re();
        if re.is_integer() {
            rate.push_str(&re.numer().to_string());
        } else {
            rate.push_str(&format!("{}/{}", re.numer(), re.denom()));
        }
        out.push_str(&format!("exp {n} rate {rate}\n"));
    }
    for (v, c) in doc.vars.iter().zip(doc.components.iter()) {
        out.push_str(&format!("d{v}/dt = {}\n", print_expr(c)));
    }
    for (n, e) in &doc.integrals {
        out.push_str(&format!("integral {n} = {}\n", print_expr(e)));
    }
    for (n, defs) in &doc.charts {
        let body: Vec<String> = defs
            .iter()
            .map(|(lhs, e)| format!("{lhs} = {}", print_expr(e)))
            .collect();
        out.push_str(&format!("chart {n}: {}\n", body.join(", ")));
    }
    out
}

impl fmt::Display for SystemDoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", roundtrip(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems;

    const LORENZ_DOC: &str = "\
# the quadratic three-parameter model
system lorenz
params sigma epsilon b
vars x y z
dx/dt = y - sigma*epsilon*x
dy/dt = -x*z + x - epsilon*y
dz/dt = x*y - epsilon*b*z
";

    #[test]
    fn lorenz_document_matches_the_catalog() {
        let doc = parse(LORENZ_DOC).unwrap();
        let field = doc.to_field().unwrap();
        assert_eq!(field.components, systems::lorenz().components);
        assert_eq!(field.statevars, systems::lorenz().statevars);
    }

    #[test]
    fn lex_error_position_points_into_the_token() {
        let text = "system s\nvars x\ndx/dt = x $\n";
        let e = parse(text).unwrap_err();
        assert_eq!(e.line, 3);
        assert_eq!(e.col, 11);
        assert!(matches!(e.kind, SysdefErrorKind::Lex('$')));
    }

    #[test]
    fn undeclared_symbol_is_rejected() {
        let text = "system s\nvars x\ndx/dt = x + q\n";
        let e = parse(text).unwrap_err();
        assert!(matches!(e.kind, SysdefErrorKind::UndeclaredSymbol(ref n) if n == "q"));
        assert_eq!((e.line, e.col), (3, 13));
    }

    #[test]
    fn division_by_non_literal_is_rejected_in_components() {
        let text = "system s\nvars x\ndx/dt = x/x\n";
        let e = parse(text).unwrap_err();
        assert!(matches!(e.kind, SysdefErrorKind::Parse(_)));
        // but x/3 is fine
        let ok = parse("system s\nvars x\ndx/dt = x/3\n").unwrap();
        assert_eq!(
            ok.components[0],
            RatExpr::var("x").scale(&Gq::from_ratio(1, 3))
        );
    }

    #[test]
    fn exponential_and_integral_lines() {
        let text = "\
system s41
vars x y z
exp E rate 6
dx/dt = y - 3*x
dy/dt = -x*z + x - 3*y
dz/dt = x*y - 6*z
integral I = E*(x^2 - 2*z)
";
        let doc = parse(text).unwrap();
        assert_eq!(doc.expsyms, vec![("E".to_string(), Gq::from_int(6))]);
        let i = doc.integral("I").unwrap();
        let want = RatExpr::var("E").mul_ref(
            &RatExpr::var("x")
                .pow(2)
                .unwrap()
                .sub_ref(&RatExpr::var("z").scale(&Gq::from_int(2))),
        );
        assert_eq!(i, &want);
    }

    #[test]
    fn gaussian_coefficients_roundtrip() {
        let text = "system s\nvars x\ndx/dt = (3/2 + i)*x\n";
        let doc = parse(text).unwrap();
        let printed = roundtrip(&doc);
        let again = parse(&printed).unwrap();
        assert_eq!(doc, again);
    }

    #[test]
    fn chart_lines_allow_rational_expressions() {
        let text = "\
system s
vars x y z
dx/dt = y
dy/dt = -x
dz/dt = 0
chart U1: X = 1/x, Y = y/x, Z = z/x
";
        let doc = parse(text).unwrap();
        assert_eq!(doc.charts.len(), 1);
        let (name, defs) = &doc.charts[0];
        assert_eq!(name, "U1");
        assert_eq!(defs[0].1, RatExpr::var("x").inv().unwrap());
        // And the whole document survives a round trip.
        assert_eq!(parse(&roundtrip(&doc)).unwrap(), doc);
    }

    #[test]
    fn byte_stable_double_roundtrip() {
        let doc = parse(LORENZ_DOC).unwrap();
        let once = roundtrip(&doc);
        let twice = roundtrip(&parse(&once).unwrap());
        assert_eq!(once, twice);
    }

    #[test]
    fn missing_component_is_an_arity_mismatch() {
        let text = "system s\nvars x y\ndx/dt = y\n";
        let e = parse(text).unwrap_err();
        assert!(matches!(
            e.kind,
            SysdefErrorKind::ArityMismatch { expected: 2, found: 1 }
        ));
    }

    #[test]
    fn exponent_must_be_literal() {
        let text = "system s\nvars x\ndx/dt = x^(2)\n";
        assert!(parse(text).is_err());
        let neg = "system s\nvars x\ndx/dt = -x^2\n";
        // ^ binds tighter than unary minus.
        let doc = parse(neg).unwrap();
        assert_eq!(
            doc.components[0],
            RatExpr::var("x").pow(2).unwrap().neg_ref()
        );
    }
}
