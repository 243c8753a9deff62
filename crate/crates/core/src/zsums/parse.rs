//! ```text
//! tsum    := 'tsum' NAME ['(' NAME (',' NAME)* ')'] ':=' sum ('on' '{' formula '}' | ';' | EOF)
//! sum     := ['-'] product (('+' | '-') product)*
//! product := factor ('*' factor)*
//! factor  := 'q' ['^' qexp] | INT ['/' INT] | INT NAME ['^' INT] | NAME ['^' INT]
//!          | '(' lin ')' ['^' INT] | '-' factor
//! qexp    := ['-'] (INT | NAME) | '(' lin ')'
//! lin     := ['-'] latom (('+' | '-') latom)*
//! latom   := INT ['*'] [NAME] | NAME
//! ```

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::presburger::{presburger_qe, PresburgerSet};
use crate::syntax::lexer::Tok;
use crate::syntax::{Cursor, Decls, Sort, SyntaxError};

use super::{LinForm, TermSum, TsTerm, ZsumError};

#[derive(Clone, Default)]
struct RawLin {
    coeffs: BTreeMap<String, i64>,
    constant: i64,
}

impl RawLin {
    fn add(&mut self, o: &RawLin, sign: i64) {
        for (v, c) in &o.coeffs {
            *self.coeffs.entry(v.clone()).or_insert(0) += sign * c;
        }
        self.constant += sign * o.constant;
    }
}

struct RawTerm {
    coeff: BigRational,
    factors: Vec<RawLin>,
    exponent: RawLin,
}

struct P<'c, 's> {
    c: &'c mut Cursor<'s>,
    seen: Vec<String>,
}

fn perr(e: SyntaxError) -> ZsumError {
    ZsumError::Parse(e.to_string())
}

impl P<'_, '_> {
    fn note(&mut self, v: &str) {
        if !self.seen.iter().any(|s| s == v) {
            self.seen.push(v.to_string());
        }
    }

    fn var_name(&self) -> Option<String> {
        match self.c.peek() {
            Tok::Ident(s) if s != "q" && s != "on" => Some(s.clone()),
            _ => None,
        }
    }

    fn int(&mut self) -> Result<i64, ZsumError> {
        let n = self.c.expect_int().map_err(perr)?;
        i64::try_from(n).map_err(|_| ZsumError::Parse(format!("integer {n} out of range")))
    }

    fn latom(&mut self) -> Result<RawLin, ZsumError> {
        let mut out = RawLin::default();
        if let Tok::Int(_) = self.c.peek() {
            let k = self.int()?;
            let starred = self.c.is_sym("*") && matches!(self.c.peek_at(1), Tok::Ident(s) if s != "q");
            if starred {
                self.c.bump();
            }
            if let Some(v) = self.var_name() {
                self.c.bump();
                self.note(&v);
                out.coeffs.insert(v, k);
            } else {
                out.constant = k;
            }
            return Ok(out);
        }
        match self.var_name() {
            Some(v) => {
                self.c.bump();
                self.note(&v);
                out.coeffs.insert(v, 1);
                Ok(out)
            }
            None => Err(perr(self.c.error("expected an integer or a variable"))),
        }
    }

    fn lin(&mut self) -> Result<RawLin, ZsumError> {
        let mut sign = if self.c.eat_sym("-") { -1 } else { 1 };
        let mut out = RawLin::default();
        loop {
            let a = self.latom()?;
            out.add(&a, sign);
            if self.c.eat_sym("+") {
                sign = 1;
            } else if self.c.eat_sym("-") {
                sign = -1;
            } else {
                return Ok(out);
            }
        }
    }

    fn qexp(&mut self) -> Result<RawLin, ZsumError> {
        if self.c.eat_sym("(") {
            let l = self.lin()?;
            self.c.expect_sym(")").map_err(perr)?;
            return Ok(l);
        }
        let sign = if self.c.eat_sym("-") { -1 } else { 1 };
        let mut out = RawLin::default();
        if let Tok::Int(_) = self.c.peek() {
            out.constant = sign * self.int()?;
        } else if let Some(v) = self.var_name() {
            self.c.bump();
            self.note(&v);
            out.coeffs.insert(v, sign);
        } else {
            return Err(perr(self.c.error("expected an exponent")));
        }
        Ok(out)
    }

    fn power(&mut self) -> Result<usize, ZsumError> {
        if self.c.eat_sym("^") {
            let n = self.int()?;
            if !(0..=64).contains(&n) {
                return Err(ZsumError::Parse(format!("power {n} outside 0..=64")));
            }
            Ok(n as usize)
        } else {
            Ok(1)
        }
    }

    fn factor(&mut self, t: &mut RawTerm) -> Result<(), ZsumError> {
        if self.c.eat_sym("-") {
            t.coeff = -t.coeff.clone();
            return self.factor(t);
        }
        if self.c.eat_kw("q") {
            let e = if self.c.eat_sym("^") {
                self.qexp()?
            } else {
                RawLin {
                    constant: 1,
                    ..RawLin::default()
                }
            };
            t.exponent.add(&e, 1);
            return Ok(());
        }
        if self.c.eat_sym("(") {
            let l = self.lin()?;
            self.c.expect_sym(")").map_err(perr)?;
            let n = self.power()?;
            t.factors.extend(std::iter::repeat(l).take(n));
            return Ok(());
        }
        if let Tok::Int(_) = self.c.peek() {
            let k = self.int()?;
            if self.c.eat_sym("/") {
                let d = self.int()?;
                if d == 0 {
                    return Err(ZsumError::Parse("zero denominator".into()));
                }
                t.coeff *= BigRational::new(k.into(), d.into());
                return Ok(());
            }
            if let Some(v) = self.var_name() {
                self.c.bump();
                self.note(&v);
                let mut l = RawLin::default();
                l.coeffs.insert(v, k);
                let n = self.power()?;
                t.factors.extend(std::iter::repeat(l).take(n));
            } else {
                t.coeff *= BigRational::from_integer(k.into());
            }
            return Ok(());
        }
        if let Some(v) = self.var_name() {
            self.c.bump();
            self.note(&v);
            let mut l = RawLin::default();
            l.coeffs.insert(v, 1);
            let n = self.power()?;
            t.factors.extend(std::iter::repeat(l).take(n));
            return Ok(());
        }
        Err(perr(self.c.error("expected a factor")))
    }

    fn product(&mut self, sign: i64) -> Result<RawTerm, ZsumError> {
        let mut t = RawTerm {
            coeff: BigRational::from_integer(sign.into()),
            factors: Vec::new(),
            exponent: RawLin::default(),
        };
        self.factor(&mut t)?;
        while self.c.eat_sym("*") {
            self.factor(&mut t)?;
        }
        Ok(t)
    }

    fn sum(&mut self) -> Result<Vec<RawTerm>, ZsumError> {
        let mut sign = if self.c.eat_sym("-") { -1 } else { 1 };
        let mut out = Vec::new();
        loop {
            out.push(self.product(sign)?);
            if self.c.eat_sym("+") {
                sign = 1;
            } else if self.c.eat_sym("-") {
                sign = -1;
            } else {
                return Ok(out);
            }
        }
    }
}

fn finish(l: &RawLin, vars: &[String]) -> LinForm {
    LinForm {
        coeffs: vars.iter().map(|v| l.coeffs.get(v).copied().unwrap_or(0)).collect(),
        constant: l.constant,
    }
}

/// Parses one `tsum` item at the cursor.
pub fn parse_tsum_at(c: &mut Cursor) -> Result<TermSum, ZsumError> {
    c.expect_kw("tsum").map_err(perr)?;
    let name = c.expect_ident().map_err(perr)?;
    let mut header: Option<Vec<String>> = None;
    if c.eat_sym("(") {
        let mut vs = Vec::new();
        if !c.is_sym(")") {
            loop {
                let v = c.expect_ident().map_err(perr)?;
                if v == "q" {
                    return Err(ZsumError::Parse("`q` is reserved".into()));
                }
                vs.push(v);
                if !c.eat_sym(",") {
                    break;
                }
            }
        }
        c.expect_sym(")").map_err(perr)?;
        header = Some(vs);
    }
    c.expect_sym(":=").map_err(perr)?;
    let mut p = P { c, seen: Vec::new() };
    let raw = p.sum()?;
    let seen = p.seen;
    let vars = match header {
        Some(h) => {
            if let Some(v) = seen.iter().find(|v| !h.contains(v)) {
                return Err(ZsumError::Parse(format!("variable `{v}` is not in the header")));
            }
            h
        }
        None => seen,
    };
    let domain = if c.eat_kw("on") {
        c.expect_sym("{").map_err(perr)?;
        let decls: Decls = vars.iter().map(|v| (v.clone(), Sort::ZZ)).collect();
        let f = c.typed_formula(&decls).map_err(perr)?;
        c.expect_sym("}").map_err(perr)?;
        let names: Vec<&str> = vars.iter().map(String::as_str).collect();
        let s = presburger_qe(&f)?;
        if let Some(v) = s.vars.iter().find(|v| !vars.contains(v)) {
            return Err(ZsumError::Parse(format!("domain mentions unknown variable `{v}`")));
        }
        s.with_vars(&names)
    } else {
        if !c.eat_sym(";") && !c.at_eof() {
            return Err(perr(c.error("expected `on`, `;` or end of input")));
        }
        PresburgerSet {
            vars: vars.clone(),
            dnf: vec![Vec::new()],
        }
    };
    let terms = raw
        .into_iter()
        .map(|t| TsTerm {
            coeff: t.coeff,
            factors: t.factors.iter().map(|f| finish(f, &vars)).collect(),
            exponent: finish(&t.exponent, &vars),
        })
        .collect();
    Ok(TermSum {
        name,
        vars,
        terms,
        domain,
    })
}

/// Parses a whole text holding one `tsum` item.
pub fn parse_tsum(text: &str) -> Result<TermSum, ZsumError> {
    let mut c = Cursor::new(text).map_err(perr)?;
    let h = parse_tsum_at(&mut c)?;
    c.expect_eof().map_err(perr)?;
    Ok(h)
}
