//! Recursive-descent parser for the concrete formula grammar.
//!
//! Parsing happens in two passes. The first builds a raw tree in which free
//! variables have no sort yet. The second resolves sorts (from declarations,
//! binders, and inference through `ord`, `ac` and the relation symbols),
//! expands literal multiples in the value group into iterated addition, and
//! produces the typed [`Formula`].

use std::collections::BTreeMap;

use super::ast::{Formula, Quantifier, Sort, Term, Var};
use super::lexer::{line_col, tokenize, Spanned, Tok};
use super::SyntaxError;

/// Declared sorts of free variables.
pub type Decls = BTreeMap<String, Sort>;

const KEYWORDS: &[&str] = &["exists", "forall", "mod", "ord", "ac", "t", "true", "false"];

#[derive(Clone, Debug)]
pub(crate) enum RawTermKind {
    Var(String),
    Lit(u64),
    Uniformizer,
    Add(Box<RawTerm>, Box<RawTerm>),
    Sub(Box<RawTerm>, Box<RawTerm>),
    Mul(Box<RawTerm>, Box<RawTerm>),
    Neg(Box<RawTerm>),
    Ord(Box<RawTerm>),
    Ac(Box<RawTerm>),
}

#[derive(Clone, Debug)]
pub(crate) struct RawTerm {
    kind: RawTermKind,
    pos: usize,
}

#[derive(Clone, Debug)]
pub(crate) enum RawFormula {
    True,
    False,
    Eq(RawTerm, RawTerm),
    Le(RawTerm, RawTerm),
    Cong(RawTerm, RawTerm, u64),
    And(Box<RawFormula>, Box<RawFormula>),
    Or(Box<RawFormula>, Box<RawFormula>),
    Not(Box<RawFormula>),
    Quant(Quantifier, String, Sort, Box<RawFormula>),
}

/// Token cursor shared by the formula parser and the file-format parsers.
pub struct Cursor<'s> {
    src: &'s str,
    toks: Vec<Spanned>,
    at: usize,
}

impl<'s> Cursor<'s> {
    pub fn new(src: &'s str) -> Result<Cursor<'s>, SyntaxError> {
        let toks = tokenize(src).map_err(|e| {
            let (line, col) = line_col(src, e.pos);
            SyntaxError::Syntax {
                line,
                col,
                msg: e.msg,
            }
        })?;
        Ok(Cursor { src, toks, at: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn pos(&self) -> usize {
        self.toks[self.at].pos
    }

    pub fn save(&self) -> usize {
        self.at
    }

    pub fn restore(&mut self, at: usize) {
        self.at = at;
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == kw)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn error_at(&self, pos: usize, msg: impl Into<String>) -> SyntaxError {
        let (line, col) = line_col(self.src, pos);
        SyntaxError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> SyntaxError {
        self.error_at(self.pos(), msg)
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<(), SyntaxError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`, found {}", self.peek())))
        }
    }

    pub fn expect_kw(&mut self, kw: &str) -> Result<(), SyntaxError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`, found {}", self.peek())))
        }
    }

    pub fn expect_ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {other}"))),
        }
    }

    pub fn expect_int(&mut self) -> Result<u64, SyntaxError> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            ref other => Err(self.error(format!("expected integer, found {other}"))),
        }
    }

    /// Signed integer literal.
    pub fn expect_signed(&mut self) -> Result<i64, SyntaxError> {
        let neg = self.eat_sym("-");
        let pos = self.pos();
        let n = self.expect_int()?;
        let n = i64::try_from(n).map_err(|_| self.error_at(pos, "integer out of range"))?;
        Ok(if neg { -n } else { n })
    }

    pub fn expect_sort(&mut self) -> Result<Sort, SyntaxError> {
        let pos = self.pos();
        let name = self.expect_ident()?;
        Sort::from_name(&name)
            .ok_or_else(|| self.error_at(pos, format!("unknown sort `{name}` (expected VF, RF or ZZ)")))
    }

    pub fn expect_eof(&self) -> Result<(), SyntaxError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {} after end of formula", self.peek())))
        }
    }

    /// Source text between two byte offsets.
    pub fn slice(&self, from: usize, to: usize) -> &'s str {
        &self.src[from.min(self.src.len())..to.min(self.src.len())]
    }

    pub fn src(&self) -> &'s str {
        self.src
    }

    // ---- formula grammar ----

    pub(crate) fn formula(&mut self) -> Result<RawFormula, SyntaxError> {
        let mut lhs = self.conj()?;
        while self.eat_sym("\\/") {
            let rhs = self.conj()?;
            lhs = RawFormula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<RawFormula, SyntaxError> {
        let mut lhs = self.unary()?;
        while self.eat_sym("/\\") {
            let rhs = self.unary()?;
            lhs = RawFormula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<RawFormula, SyntaxError> {
        if self.eat_sym("~") {
            return Ok(RawFormula::Not(Box::new(self.unary()?)));
        }
        for (kw, q) in [("exists", Quantifier::Exists), ("forall", Quantifier::Forall)] {
            if self.eat_kw(kw) {
                let pos = self.pos();
                let name = self.expect_ident()?;
                if KEYWORDS.contains(&name.as_str()) {
                    return Err(self.error_at(pos, format!("`{name}` is reserved")));
                }
                self.expect_sym(":")?;
                let sort = self.expect_sort()?;
                let body = self.unary()?;
                return Ok(RawFormula::Quant(q, name, sort, Box::new(body)));
            }
        }
        if self.eat_kw("true") {
            return Ok(RawFormula::True);
        }
        if self.eat_kw("false") {
            return Ok(RawFormula::False);
        }
        if self.is_sym("(") {
            let save = self.save();
            self.bump();
            let first_err = match self.formula() {
                Ok(f) if self.eat_sym(")") => return Ok(f),
                Ok(_) => self.error(format!("expected `)`, found {}", self.peek())),
                Err(e) => e,
            };
            self.restore(save);
            // Not a parenthesized formula; try an atom whose left term starts
            // with `(`. Report whichever attempt got further.
            return self.atom().map_err(|e| furthest(first_err, e));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<RawFormula, SyntaxError> {
        let lhs = self.term()?;
        let pos = self.pos();
        let op = match self.bump() {
            Tok::Sym(s @ ("=" | "<=" | ">=" | "<" | ">" | "===" | "!=")) => s,
            other => return Err(self.error_at(pos, format!("expected a relation, found {other}"))),
        };
        let rhs = self.term()?;
        let one = |p| RawTerm {
            kind: RawTermKind::Lit(1),
            pos: p,
        };
        let add = |a: RawTerm, b: RawTerm| RawTerm {
            pos: a.pos,
            kind: RawTermKind::Add(Box::new(a), Box::new(b)),
        };
        Ok(match op {
            "=" => RawFormula::Eq(lhs, rhs),
            "!=" => RawFormula::Not(Box::new(RawFormula::Eq(lhs, rhs))),
            "<=" => RawFormula::Le(lhs, rhs),
            ">=" => RawFormula::Le(rhs, lhs),
            "<" => RawFormula::Le(add(lhs, one(pos)), rhs),
            ">" => RawFormula::Le(add(rhs, one(pos)), lhs),
            "===" => {
                self.expect_kw("mod")?;
                let mpos = self.pos();
                let d = self.expect_int()?;
                if d < 2 {
                    return Err(self.error_at(mpos, format!("congruence modulus must be at least 2, got {d}")));
                }
                RawFormula::Cong(lhs, rhs, d)
            }
            _ => unreachable!(),
        })
    }

    pub(crate) fn term(&mut self) -> Result<RawTerm, SyntaxError> {
        let mut lhs = self.product()?;
        loop {
            if self.eat_sym("+") {
                let rhs = self.product()?;
                lhs = RawTerm {
                    pos: lhs.pos,
                    kind: RawTermKind::Add(Box::new(lhs), Box::new(rhs)),
                };
            } else if self.eat_sym("-") {
                let rhs = self.product()?;
                lhs = RawTerm {
                    pos: lhs.pos,
                    kind: RawTermKind::Sub(Box::new(lhs), Box::new(rhs)),
                };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<RawTerm, SyntaxError> {
        let mut lhs = self.neg_term()?;
        while self.eat_sym("*") {
            let rhs = self.neg_term()?;
            lhs = RawTerm {
                pos: lhs.pos,
                kind: RawTermKind::Mul(Box::new(lhs), Box::new(rhs)),
            };
        }
        Ok(lhs)
    }

    fn neg_term(&mut self) -> Result<RawTerm, SyntaxError> {
        let pos = self.pos();
        if self.eat_sym("-") {
            let inner = self.neg_term()?;
            return Ok(RawTerm {
                pos,
                kind: RawTermKind::Neg(Box::new(inner)),
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<RawTerm, SyntaxError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(RawTerm {
                pos,
                kind: RawTermKind::Lit(n),
            }),
            Tok::Sym("(") => {
                let inner = self.term()?;
                self.expect_sym(")")?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "t" => Ok(RawTerm {
                    pos,
                    kind: RawTermKind::Uniformizer,
                }),
                "ord" | "ac" => {
                    self.expect_sym("(")?;
                    let inner = Box::new(self.term()?);
                    self.expect_sym(")")?;
                    let kind = if name == "ord" {
                        RawTermKind::Ord(inner)
                    } else {
                        RawTermKind::Ac(inner)
                    };
                    Ok(RawTerm { pos, kind })
                }
                kw if KEYWORDS.contains(&kw) => {
                    Err(self.error_at(pos, format!("unexpected keyword `{kw}`")))
                }
                _ => Ok(RawTerm {
                    pos,
                    kind: RawTermKind::Var(name),
                }),
            },
            other => Err(self.error_at(pos, format!("expected a term, found {other}"))),
        }
    }
}

/// Sort environment used while resolving a raw tree.
struct Resolver<'a> {
    decls: &'a Decls,
    inferred: BTreeMap<String, Sort>,
    bound: Vec<(String, Sort)>,
    changed: bool,
    src: &'a str,
}

impl<'a> Resolver<'a> {
    fn lookup(&self, name: &str) -> Option<Sort> {
        self.bound
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, s)| *s)
            .or_else(|| self.decls.get(name).copied())
            .or_else(|| self.inferred.get(name).copied())
    }

    fn text(&self, t: &RawTerm) -> String {
        describe(t)
    }

    fn sort_err(&self, t: &RawTerm, msg: String) -> SyntaxError {
        let (line, col) = line_col(self.src, t.pos);
        SyntaxError::Sort {
            line,
            col,
            subterm: self.text(t),
            msg,
        }
    }

    /// Infers the sort of `t`, pushing `expected` down into free variables of
    /// unknown sort. Returns `None` when the term is a pure literal expression.
    fn infer(&mut self, t: &RawTerm, expected: Option<Sort>) -> Result<Option<Sort>, SyntaxError> {
        match &t.kind {
            RawTermKind::Var(name) => match self.lookup(name) {
                Some(s) => {
                    if let Some(e) = expected {
                        if e != s {
                            return Err(self.sort_err(t, format!("variable `{name}` has sort {s}, expected {e}")));
                        }
                    }
                    Ok(Some(s))
                }
                None => {
                    if let Some(e) = expected {
                        self.inferred.insert(name.clone(), e);
                        self.changed = true;
                    }
                    Ok(expected)
                }
            },
            RawTermKind::Lit(_) => Ok(expected),
            RawTermKind::Uniformizer => {
                if let Some(e) = expected {
                    if e != Sort::VF {
                        return Err(self.sort_err(t, format!("the uniformizer `t` has sort VF, expected {e}")));
                    }
                }
                Ok(Some(Sort::VF))
            }
            RawTermKind::Add(a, b) | RawTermKind::Sub(a, b) | RawTermKind::Mul(a, b) => {
                let sa = self.infer(a, expected)?;
                let sb = self.infer(b, expected.or(sa))?;
                match (sa, sb) {
                    (Some(x), Some(y)) if x != y => Err(self.sort_err(
                        t,
                        format!("operands have different sorts ({x} and {y})"),
                    )),
                    (None, Some(y)) => {
                        if self.infer(a, Some(y)).is_err() {
                            let sa = self.infer(a, None)?;
                            let sa = sa.map_or_else(|| "?".to_string(), |s| s.to_string());
                            return Err(self.sort_err(t, format!("operands have different sorts ({sa} and {y})")));
                        }
                        Ok(Some(y))
                    }
                    (x, y) => Ok(x.or(y)),
                }
            }
            RawTermKind::Neg(a) => self.infer(a, expected),
            RawTermKind::Ord(a) => {
                self.infer(a, Some(Sort::VF))?;
                self.check_expected(t, expected, Sort::ZZ, "ord")
            }
            RawTermKind::Ac(a) => {
                self.infer(a, Some(Sort::VF))?;
                self.check_expected(t, expected, Sort::RF, "ac")
            }
        }
    }

    fn check_expected(
        &self,
        t: &RawTerm,
        expected: Option<Sort>,
        actual: Sort,
        what: &str,
    ) -> Result<Option<Sort>, SyntaxError> {
        match expected {
            Some(e) if e != actual => Err(self.sort_err(t, format!("`{what}` produces sort {actual}, expected {e}"))),
            _ => Ok(Some(actual)),
        }
    }

    fn infer_formula(&mut self, f: &RawFormula) -> Result<(), SyntaxError> {
        match f {
            RawFormula::True | RawFormula::False => Ok(()),
            RawFormula::Eq(a, b) => {
                let sa = self.infer(a, None)?;
                let sb = self.infer(b, sa)?;
                if sa.is_none() {
                    if let Some(s) = sb {
                        self.infer(a, Some(s))?;
                    }
                }
                Ok(())
            }
            RawFormula::Le(a, b) | RawFormula::Cong(a, b, _) => {
                self.infer(a, Some(Sort::ZZ))?;
                self.infer(b, Some(Sort::ZZ))?;
                Ok(())
            }
            RawFormula::And(a, b) | RawFormula::Or(a, b) => {
                self.infer_formula(a)?;
                self.infer_formula(b)
            }
            RawFormula::Not(a) => self.infer_formula(a),
            RawFormula::Quant(_, name, sort, body) => {
                self.bound.push((name.clone(), *sort));
                let r = self.infer_formula(body);
                self.bound.pop();
                r
            }
        }
    }

    fn build_term(&self, t: &RawTerm, sort: Sort) -> Result<Term, SyntaxError> {
        Ok(match &t.kind {
            RawTermKind::Var(name) => {
                let s = self
                    .lookup(name)
                    .ok_or_else(|| self.sort_err(t, format!("cannot infer the sort of `{name}`")))?;
                if s != sort {
                    return Err(self.sort_err(t, format!("variable `{name}` has sort {s}, expected {sort}")));
                }
                Term::Var(Var::new(name.clone(), s))
            }
            RawTermKind::Lit(n) => Term::Lit { value: *n, sort },
            RawTermKind::Uniformizer => {
                if sort != Sort::VF {
                    return Err(self.sort_err(t, format!("the uniformizer `t` has sort VF, expected {sort}")));
                }
                Term::Uniformizer
            }
            RawTermKind::Add(a, b) => Term::add(self.build_term(a, sort)?, self.build_term(b, sort)?),
            RawTermKind::Sub(a, b) => Term::sub(self.build_term(a, sort)?, self.build_term(b, sort)?),
            RawTermKind::Mul(a, b) => {
                if sort == Sort::ZZ {
                    return self.expand_multiple(t, a, b);
                }
                Term::mul(self.build_term(a, sort)?, self.build_term(b, sort)?)
            }
            RawTermKind::Neg(a) => Term::neg(self.build_term(a, sort)?),
            RawTermKind::Ord(a) => {
                if sort != Sort::ZZ {
                    return Err(self.sort_err(t, format!("`ord` produces sort ZZ, expected {sort}")));
                }
                Term::ord(self.build_term(a, Sort::VF)?)
            }
            RawTermKind::Ac(a) => {
                if sort != Sort::RF {
                    return Err(self.sort_err(t, format!("`ac` produces sort RF, expected {sort}")));
                }
                Term::ac(self.build_term(a, Sort::VF)?)
            }
        })
    }

    /// `n * x` in the value group becomes `x + x + ... + x`.
    fn expand_multiple(&self, whole: &RawTerm, a: &RawTerm, b: &RawTerm) -> Result<Term, SyntaxError> {
        let lit = |t: &RawTerm| match &t.kind {
            RawTermKind::Lit(n) => Some((*n, false)),
            RawTermKind::Neg(inner) => match inner.kind {
                RawTermKind::Lit(n) => Some((n, true)),
                _ => None,
            },
            _ => None,
        };
        let ((n, negative), other) = match (lit(a), lit(b)) {
            (Some(n), _) => (n, b),
            (_, Some(n)) => (n, a),
            _ => {
                return Err(self.sort_err(
                    whole,
                    "multiplication in the ZZ sort is only allowed by an integer literal".into(),
                ))
            }
        };
        if n > 1 << 16 {
            return Err(self.sort_err(whole, format!("literal multiple {n} is too large to expand")));
        }
        if n == 0 {
            return Ok(Term::lit(0, Sort::ZZ));
        }
        let unit = self.build_term(other, Sort::ZZ)?;
        let mut acc = unit.clone();
        for _ in 1..n {
            acc = Term::add(acc, unit.clone());
        }
        Ok(if negative { Term::neg(acc) } else { acc })
    }

    fn term_sort(&mut self, t: &RawTerm) -> Result<Option<Sort>, SyntaxError> {
        self.infer(t, None)
    }

    fn build(&mut self, f: &RawFormula) -> Result<Formula, SyntaxError> {
        Ok(match f {
            RawFormula::True => Formula::True,
            RawFormula::False => Formula::False,
            RawFormula::Eq(a, b) => {
                let sort = match self.term_sort(a)? {
                    Some(s) => s,
                    None => self.term_sort(b)?.unwrap_or(Sort::ZZ),
                };
                Formula::Eq(self.build_term(a, sort)?, self.build_term(b, sort)?)
            }
            RawFormula::Le(a, b) => Formula::Le(self.build_term(a, Sort::ZZ)?, self.build_term(b, Sort::ZZ)?),
            RawFormula::Cong(a, b, d) => Formula::Cong {
                lhs: self.build_term(a, Sort::ZZ)?,
                rhs: self.build_term(b, Sort::ZZ)?,
                modulus: *d,
            },
            RawFormula::And(a, b) => Formula::and(self.build(a)?, self.build(b)?),
            RawFormula::Or(a, b) => Formula::or(self.build(a)?, self.build(b)?),
            RawFormula::Not(a) => Formula::not(self.build(a)?),
            RawFormula::Quant(q, name, sort, body) => {
                self.bound.push((name.clone(), *sort));
                let body = self.build(body);
                self.bound.pop();
                Formula::Quant {
                    q: *q,
                    var: Var::new(name.clone(), *sort),
                    body: Box::new(body?),
                }
            }
        })
    }
}

fn furthest(a: SyntaxError, b: SyntaxError) -> SyntaxError {
    fn key(e: &SyntaxError) -> (usize, usize) {
        match e {
            SyntaxError::Syntax { line, col, .. } | SyntaxError::Sort { line, col, .. } => (*line, *col),
            _ => (0, 0),
        }
    }
    if key(&b) >= key(&a) {
        b
    } else {
        a
    }
}

/// Renders a raw term for diagnostics (spans only record start offsets).
fn describe(t: &RawTerm) -> String {
    fn go(t: &RawTerm, out: &mut String) {
        match &t.kind {
            RawTermKind::Var(n) => out.push_str(n),
            RawTermKind::Lit(n) => out.push_str(&n.to_string()),
            RawTermKind::Uniformizer => out.push('t'),
            RawTermKind::Add(a, b) | RawTermKind::Sub(a, b) | RawTermKind::Mul(a, b) => {
                let op = match t.kind {
                    RawTermKind::Add(..) => " + ",
                    RawTermKind::Sub(..) => " - ",
                    _ => " * ",
                };
                out.push('(');
                go(a, out);
                out.push_str(op);
                go(b, out);
                out.push(')');
            }
            RawTermKind::Neg(a) => {
                out.push('-');
                go(a, out);
            }
            RawTermKind::Ord(a) | RawTermKind::Ac(a) => {
                out.push_str(if matches!(t.kind, RawTermKind::Ord(_)) { "ord(" } else { "ac(" });
                go(a, out);
                out.push(')');
            }
        }
    }
    let mut s = String::new();
    go(t, &mut s);
    s
}

pub(crate) fn resolve_formula(raw: &RawFormula, decls: &Decls, src: &str) -> Result<Formula, SyntaxError> {
    let mut r = Resolver {
        decls,
        inferred: BTreeMap::new(),
        bound: Vec::new(),
        changed: true,
        src,
    };
    // Sort information can flow across atoms, so iterate to a fixpoint.
    let mut rounds = 0;
    while r.changed {
        r.changed = false;
        r.infer_formula(raw)?;
        rounds += 1;
        if rounds > 64 {
            break;
        }
    }
    r.build(raw)
}

pub(crate) fn resolve_term(
    raw: &RawTerm,
    decls: &Decls,
    sort: Sort,
    src: &str,
) -> Result<Term, SyntaxError> {
    let mut r = Resolver {
        decls,
        inferred: BTreeMap::new(),
        bound: Vec::new(),
        changed: true,
        src,
    };
    let mut rounds = 0;
    while r.changed && rounds < 64 {
        r.changed = false;
        r.infer(raw, Some(sort))?;
        rounds += 1;
    }
    r.build_term(raw, sort)
}

/// Parses a formula, resolving free-variable sorts from `decls` and by
/// inference.
pub fn parse_formula_with(text: &str, decls: &Decls) -> Result<Formula, SyntaxError> {
    let mut c = Cursor::new(text)?;
    let raw = c.formula()?;
    c.expect_eof()?;
    resolve_formula(&raw, decls, text)
}

/// Parses a formula with no declared free variables; their sorts are inferred.
pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    parse_formula_with(text, &Decls::new())
}

/// Parses a single term of the given sort.
pub fn parse_term_with(text: &str, decls: &Decls, sort: Sort) -> Result<Term, SyntaxError> {
    let mut c = Cursor::new(text)?;
    let raw = c.term()?;
    c.expect_eof()?;
    resolve_term(&raw, decls, sort, text)
}

impl Cursor<'_> {
    /// Parses a formula at the cursor and resolves it against `decls`.
    pub fn typed_formula(&mut self, decls: &Decls) -> Result<Formula, SyntaxError> {
        let raw = self.formula()?;
        resolve_formula(&raw, decls, self.src)
    }

    /// Parses a term of the given sort at the cursor.
    pub fn typed_term(&mut self, decls: &Decls, sort: Sort) -> Result<Term, SyntaxError> {
        let raw = self.term()?;
        resolve_term(&raw, decls, sort, self.src)
    }
}
