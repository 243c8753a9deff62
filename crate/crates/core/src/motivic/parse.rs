//! Text blocks for motivic and exponential functions.
//!
//! ```text
//! motivic f(x:VF) {
//!   term { alpha: ord(x); beta: 1; fiber(r=1): y1 * y1 = ac(x); geom: [-2] }
//! }
//! exp gauss {
//!   term { fiber(y:RF): true; g: 0; e: y * y }
//! }
//! ```
//!
//! Inside a term: `alpha`, any number of `beta`, one `fiber`, `geom`, and in
//! exponential blocks `g` and `e`. All fields are optional (defaults: `alpha:
//! 0`, the one-point fiber, `g: 0`, `e: 0`). `fiber(r=K)` names its variables
//! `y1..yK`; `fiber(u, v)` names them explicitly; a bare `fiber:` is an
//! indicator. A definable function may be given by its graph:
//! `alpha: graph(z, -5, 5): <formula>`, `g: graph(w): <formula>`,
//! `e: graph(u): <formula>`. The base signature in parentheses is optional;
//! without it the base is every free variable, in order of appearance.

use crate::eval::DefinableSet;
use crate::syntax::{Cursor, Decls, Formula, Sort, SyntaxError, Term, Var};

use super::{ExpTerm, Fiber, MotivicError, MotivicExpFunction, MotivicFunction, MotivicTerm, RFFunction, VFFunction, ZFunction};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    Motivic(String, MotivicFunction),
    Exp(String, MotivicExpFunction),
}

impl Block {
    pub fn name(&self) -> &str {
        match self {
            Block::Motivic(n, _) | Block::Exp(n, _) => n,
        }
    }
}

fn syn(e: SyntaxError) -> MotivicError {
    MotivicError::Parse(e.to_string())
}

/// Free variables seen so far, with the sorts they were resolved to.
struct Scope {
    decls: Decls,
    order: Vec<Var>,
    /// Fixed base from the header, if any.
    fixed: Option<Vec<Var>>,
}

impl Scope {
    fn note(&mut self, vars: impl IntoIterator<Item = Var>, local: &[Var]) {
        for v in vars {
            if local.iter().any(|l| l.name == v.name) {
                continue;
            }
            if !self.order.iter().any(|o| o.name == v.name) {
                self.decls.insert(v.name.clone(), v.sort);
                self.order.push(v);
            }
        }
    }

    fn with_local(&self, local: &[Var]) -> Decls {
        let mut d = self.decls.clone();
        for v in local {
            d.insert(v.name.clone(), v.sort);
        }
        d
    }

    fn base(&self) -> Vec<Var> {
        self.fixed.clone().unwrap_or_else(|| self.order.clone())
    }
}

fn term_vars(t: &Term) -> Vec<Var> {
    let mut out = Vec::new();
    t.visit_vars(&mut |v| out.push(v.clone()));
    out
}

fn formula_at(c: &mut Cursor, scope: &mut Scope, local: &[Var]) -> Result<Formula, MotivicError> {
    let f = c.typed_formula(&scope.with_local(local)).map_err(syn)?;
    scope.note(f.free_vars(), local);
    Ok(f)
}

fn term_at(c: &mut Cursor, scope: &mut Scope, local: &[Var], sort: Sort) -> Result<Term, MotivicError> {
    let t = c.typed_term(&scope.with_local(local), sort).map_err(syn)?;
    scope.note(term_vars(&t), local);
    Ok(t)
}

/// `graph(name[, lo, hi]): formula` with `name` of the given sort.
fn graph_at(
    c: &mut Cursor,
    scope: &mut Scope,
    local: &[Var],
    sort: Sort,
    window: bool,
) -> Result<(DefinableSet, String, i64, i64), MotivicError> {
    c.expect_sym("(").map_err(syn)?;
    let var = c.expect_ident().map_err(syn)?;
    let (mut lo, mut hi) = (-64, 64);
    if window && c.eat_sym(",") {
        lo = c.expect_signed().map_err(syn)?;
        c.expect_sym(",").map_err(syn)?;
        hi = c.expect_signed().map_err(syn)?;
        if lo > hi {
            return Err(MotivicError::Parse(format!("empty graph window [{lo}, {hi}]")));
        }
    }
    c.expect_sym(")").map_err(syn)?;
    c.expect_sym(":").map_err(syn)?;
    let mut inner = local.to_vec();
    inner.push(Var::new(var.clone(), sort));
    let f = formula_at(c, scope, &inner)?;
    Ok((DefinableSet::new(f)?, var, lo, hi))
}

fn is_graph(c: &Cursor) -> bool {
    c.is_kw("graph") && matches!(c.peek_at(1), crate::syntax::lexer::Tok::Sym("("))
}

fn zfunction_at(c: &mut Cursor, scope: &mut Scope, local: &[Var]) -> Result<ZFunction, MotivicError> {
    if is_graph(c) {
        c.bump();
        let (set, var, lo, hi) = graph_at(c, scope, local, Sort::ZZ, true)?;
        return Ok(ZFunction::Graph { set, var, lo, hi });
    }
    Ok(ZFunction::Term(term_at(c, scope, local, Sort::ZZ)?))
}

/// `fiber(r=K)`, `fiber(a, b)` or `fiber`, up to the colon.
fn fiber_vars(c: &mut Cursor) -> Result<Vec<Var>, MotivicError> {
    if !c.eat_sym("(") {
        return Ok(Vec::new());
    }
    let mut vars = Vec::new();
    if c.is_kw("r") && matches!(c.peek_at(1), crate::syntax::lexer::Tok::Sym("=")) {
        c.bump();
        c.bump();
        let k = c.expect_int().map_err(syn)?;
        if k > 8 {
            return Err(MotivicError::Parse(format!("fiber arity {k} is too large (limit 8)")));
        }
        vars = (1..=k).map(|i| Var::new(format!("y{i}"), Sort::RF)).collect();
    } else if !c.is_sym(")") {
        loop {
            let name = c.expect_ident().map_err(syn)?;
            if c.eat_sym(":") {
                let pos = c.pos();
                if c.expect_sort().map_err(syn)? != Sort::RF {
                    return Err(syn(c.error_at(pos, "fiber variables have sort RF")));
                }
            }
            vars.push(Var::new(name, Sort::RF));
            if !c.eat_sym(",") {
                break;
            }
        }
    }
    c.expect_sym(")").map_err(syn)?;
    Ok(vars)
}

struct RawTerm {
    alpha: Option<ZFunction>,
    betas: Vec<ZFunction>,
    fiber: Option<Fiber>,
    geom: Vec<i64>,
    g: Option<VFFunction>,
    e: Option<RFFunction>,
}

fn term_block(c: &mut Cursor, scope: &mut Scope, exp: bool) -> Result<RawTerm, MotivicError> {
    c.expect_kw("term").map_err(syn)?;
    c.expect_sym("{").map_err(syn)?;
    let mut t = RawTerm {
        alpha: None,
        betas: Vec::new(),
        fiber: None,
        geom: Vec::new(),
        g: None,
        e: None,
    };
    // The fiber comes first in scope terms even when written last, so the
    // fields are parsed in two passes: locate the fiber, then the rest.
    let start = c.save();
    let mut local = Vec::new();
    loop {
        if c.is_sym("}") || c.at_eof() {
            break;
        }
        if c.eat_kw("fiber") {
            local = fiber_vars(c)?;
            break;
        }
        c.bump();
    }
    c.restore(start);
    loop {
        if c.eat_sym("}") {
            break;
        }
        let pos = c.pos();
        let field = c.expect_ident().map_err(syn)?;
        match field.as_str() {
            "alpha" => {
                c.expect_sym(":").map_err(syn)?;
                if t.alpha.is_some() {
                    return Err(syn(c.error_at(pos, "duplicate `alpha`")));
                }
                t.alpha = Some(zfunction_at(c, scope, &local)?);
            }
            "beta" => {
                c.expect_sym(":").map_err(syn)?;
                t.betas.push(zfunction_at(c, scope, &local)?);
            }
            "fiber" => {
                if t.fiber.is_some() {
                    return Err(syn(c.error_at(pos, "duplicate `fiber`")));
                }
                let vars = fiber_vars(c)?;
                c.expect_sym(":").map_err(syn)?;
                let f = formula_at(c, scope, &vars)?;
                t.fiber = Some(Fiber::new(vars, f)?);
            }
            "geom" => {
                c.expect_sym(":").map_err(syn)?;
                c.expect_sym("[").map_err(syn)?;
                if !c.is_sym("]") {
                    loop {
                        let apos = c.pos();
                        let a = c.expect_signed().map_err(syn)?;
                        if a == 0 {
                            return Err(syn(c.error_at(apos, "geometric exponents must be nonzero")));
                        }
                        t.geom.push(a);
                        if !c.eat_sym(",") {
                            break;
                        }
                    }
                }
                c.expect_sym("]").map_err(syn)?;
            }
            "g" if exp => {
                c.expect_sym(":").map_err(syn)?;
                t.g = Some(if is_graph(c) {
                    c.bump();
                    let (set, var, ..) = graph_at(c, scope, &local, Sort::VF, false)?;
                    VFFunction::Graph { set, var }
                } else {
                    VFFunction::Term(term_at(c, scope, &local, Sort::VF)?)
                });
            }
            "e" if exp => {
                c.expect_sym(":").map_err(syn)?;
                t.e = Some(if is_graph(c) {
                    c.bump();
                    let (set, var, ..) = graph_at(c, scope, &local, Sort::RF, false)?;
                    RFFunction::Graph { set, var }
                } else {
                    RFFunction::Term(term_at(c, scope, &local, Sort::RF)?)
                });
            }
            other => return Err(syn(c.error_at(pos, format!("unknown term field `{other}`")))),
        }
        if !c.eat_sym(";") {
            c.expect_sym("}").map_err(syn)?;
            break;
        }
    }
    Ok(t)
}

fn header(c: &mut Cursor) -> Result<(String, Option<Vec<Var>>), MotivicError> {
    let name = c.expect_ident().map_err(syn)?;
    let mut fixed = None;
    if c.eat_sym("(") {
        let mut vars = Vec::new();
        if !c.is_sym(")") {
            loop {
                let v = c.expect_ident().map_err(syn)?;
                c.expect_sym(":").map_err(syn)?;
                vars.push(Var::new(v, c.expect_sort().map_err(syn)?));
                if !c.eat_sym(",") {
                    break;
                }
            }
        }
        c.expect_sym(")").map_err(syn)?;
        fixed = Some(vars);
    }
    Ok((name, fixed))
}

/// Parses one `motivic` or `exp` block at the cursor. `outer` declares the
/// sorts of variables defined elsewhere in the file.
pub fn parse_block_at(c: &mut Cursor, outer: &Decls) -> Result<Block, MotivicError> {
    let exp = if c.eat_kw("motivic") {
        false
    } else if c.eat_kw("exp") {
        true
    } else {
        return Err(syn(c.error(format!("expected `motivic` or `exp`, found {}", c.peek()))));
    };
    let (name, fixed) = header(c)?;
    let mut scope = Scope {
        decls: outer.clone(),
        order: Vec::new(),
        fixed: fixed.clone(),
    };
    if let Some(vars) = &fixed {
        scope.note(vars.iter().cloned(), &[]);
    }
    c.expect_sym("{").map_err(syn)?;
    let mut raws = Vec::new();
    while !c.eat_sym("}") {
        raws.push(term_block(c, &mut scope, exp)?);
        c.eat_sym(";");
    }
    let base = scope.base();
    if let Some(fixed) = &fixed {
        if let Some(v) = scope.order.iter().find(|v| !fixed.contains(v)) {
            return Err(MotivicError::Parse(format!(
                "`{}` is used in `{name}` but is not in its signature",
                v.name
            )));
        }
    }
    let zero_z = || ZFunction::Term(Term::lit(0, Sort::ZZ));
    if !exp {
        let terms = raws
            .into_iter()
            .map(|r| MotivicTerm {
                alpha: r.alpha.unwrap_or_else(zero_z),
                betas: r.betas,
                fiber: r.fiber.unwrap_or_else(Fiber::point),
                geom: r.geom,
            })
            .collect();
        return Ok(Block::Motivic(name, MotivicFunction { base, terms }));
    }
    let terms = raws
        .into_iter()
        .map(|r| ExpTerm {
            f: MotivicFunction {
                base: base.clone(),
                terms: vec![MotivicTerm {
                    alpha: r.alpha.unwrap_or_else(zero_z),
                    betas: r.betas,
                    fiber: Fiber::point(),
                    geom: r.geom,
                }],
            },
            fiber: r.fiber.unwrap_or_else(Fiber::point),
            g: r.g.unwrap_or(VFFunction::Term(Term::lit(0, Sort::VF))),
            e: r.e.unwrap_or(RFFunction::Term(Term::lit(0, Sort::RF))),
        })
        .collect();
    Ok(Block::Exp(name, MotivicExpFunction { base, terms }))
}

/// Parses a text holding exactly one block.
pub fn parse_block(text: &str) -> Result<Block, MotivicError> {
    let mut c = Cursor::new(text).map_err(syn)?;
    let b = parse_block_at(&mut c, &Decls::new())?;
    c.expect_eof().map_err(syn)?;
    Ok(b)
}

pub fn parse_motivic_block(text: &str) -> Result<(String, MotivicFunction), MotivicError> {
    match parse_block(text)? {
        Block::Motivic(n, f) => Ok((n, f)),
        Block::Exp(n, _) => Err(MotivicError::Parse(format!("`{n}` is an exponential block"))),
    }
}

pub fn parse_exp_block(text: &str) -> Result<(String, MotivicExpFunction), MotivicError> {
    match parse_block(text)? {
        Block::Exp(n, f) => Ok((n, f)),
        Block::Motivic(n, f) => Ok((n, super::lift_to_exp(f))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{Assignment, SearchBox, Value};
    use crate::localfield::FieldDesc;
    use crate::motivic::{eval_exp, eval_motivic, Twist};
    use num_rational::BigRational;

    #[test]
    fn worked_block() {
        let (name, f) = parse_motivic_block(
            "motivic f(x:VF) { term { alpha: ord(x); beta: 1; fiber(r=1): y1 * y1 = ac(x); geom: [-2] } }",
        )
        .unwrap();
        assert_eq!(name, "f");
        assert_eq!(f.base, vec![Var::new("x", Sort::VF)]);
        let fd = FieldDesc::qp(5, 10).unwrap();
        let x = Assignment::new().with("x", Value::VF(fd.embed_int(5)));
        let v = eval_motivic(&fd, &SearchBox::default(), &f, &x).unwrap();
        assert_eq!(v, BigRational::new(125.into(), 12.into()));
    }

    #[test]
    fn inferred_base_and_graphs() {
        let (_, f) = parse_motivic_block(
            "motivic h {
               term { fiber: ord(x) >= 0; alpha: graph(z, -3, 3): z + z = ord(x) }
               term { beta: 2 }
             }",
        )
        .unwrap();
        assert_eq!(f.base, vec![Var::new("x", Sort::VF)]);
        assert_eq!(f.terms.len(), 2);
        assert!(matches!(f.terms[0].alpha, ZFunction::Graph { .. }));
    }

    #[test]
    fn exponential_block() {
        let (_, g) = parse_exp_block("exp gauss { term { fiber(y:RF): true; e: y * y } }").unwrap();
        let fd = FieldDesc::qp(7, 8).unwrap();
        let v = eval_exp(&fd, &SearchBox::default(), &g, &Assignment::new(), &Twist::canonical(7)).unwrap();
        assert!((v.abs() - 7f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn errors_are_reported() {
        assert!(parse_block("motivic f { term { geom: [0] } }").is_err());
        assert!(parse_block("motivic f(x:VF) { term { alpha: ord(w) } }").is_err());
        assert!(parse_block("motivic f { term { g: x } }").is_err());
        assert!(parse_block("motivic f { term { fiber(x:VF): true } }").is_err());
    }
}
