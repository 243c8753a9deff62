//! Workbook files: named formulas, motivic and exponential blocks, term
//! sums and transfer statements, in any order (names must be defined
//! before use).
//!
//! ```text
//! formula units := ord(x) = 0;
//! motivic qinvord(x:VF) { term { alpha: -ord(x) } }
//! statement int_qinvord {
//!   kind: integrability;      # or boundedness, bound(a, b), truth
//!   function: qinvord;
//!   domain: O;                # or a formula; default: everything
//!   twists: 1, 2;             # default: 1
//! }
//! statement sq2 { kind: truth; formula: exists xi:RF (xi * xi = 2); }
//! ```
//!
//! A `formula:` field may also be `@name` for a named formula.

use crate::eval::DefinableSet;
use crate::integrate::unit_polydisc;
use crate::motivic::{parse_block_at, Block, Integrand};
use crate::syntax::{Cursor, Decls, Formula, SyntaxError};
use crate::zsums::{parse_tsum_at, TermSum};

use super::{Payload, StatementKind, StatementSpec, TransferError};

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Formula(String, Formula),
    Block(Block),
    TermSum(TermSum),
    Statement(StatementSpec),
}

impl Item {
    pub fn name(&self) -> &str {
        match self {
            Item::Formula(n, _) => n,
            Item::Block(b) => b.name(),
            Item::TermSum(t) => &t.name,
            Item::Statement(s) => &s.name,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Workbook {
    pub items: Vec<Item>,
}

impl Workbook {
    pub fn formula(&self, name: &str) -> Option<&Formula> {
        self.items.iter().find_map(|i| match i {
            Item::Formula(n, f) if n == name => Some(f),
            _ => None,
        })
    }

    pub fn block(&self, name: &str) -> Option<&Block> {
        self.items.iter().find_map(|i| match i {
            Item::Block(b) if b.name() == name => Some(b),
            _ => None,
        })
    }

    pub fn formulas(&self) -> impl Iterator<Item = (&str, &Formula)> {
        self.items.iter().filter_map(|i| match i {
            Item::Formula(n, f) => Some((n.as_str(), f)),
            _ => None,
        })
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.items.iter().filter_map(|i| match i {
            Item::Block(b) => Some(b),
            _ => None,
        })
    }

    pub fn tsums(&self) -> impl Iterator<Item = &TermSum> {
        self.items.iter().filter_map(|i| match i {
            Item::TermSum(t) => Some(t),
            _ => None,
        })
    }

    pub fn statements(&self) -> impl Iterator<Item = &StatementSpec> {
        self.items.iter().filter_map(|i| match i {
            Item::Statement(s) => Some(s),
            _ => None,
        })
    }
}

fn syn(e: SyntaxError) -> TransferError {
    TransferError::Parse(e.to_string())
}

pub fn integrand_of(b: &Block) -> Integrand {
    match b {
        Block::Motivic(_, f) => Integrand::Motivic(f.clone()),
        Block::Exp(_, f) => Integrand::Exp(f.clone()),
    }
}

fn formula_field(c: &mut Cursor, wb: &Workbook, decls: &Decls) -> Result<Formula, TransferError> {
    if c.eat_sym("@") {
        let n = c.expect_ident().map_err(syn)?;
        return wb
            .formula(&n)
            .cloned()
            .ok_or_else(|| TransferError::Parse(format!("unknown formula `{n}`")));
    }
    c.typed_formula(decls).map_err(syn)
}

enum DomainSpec {
    Polydisc,
    Formula(Formula),
}

fn statement_at(c: &mut Cursor, wb: &Workbook) -> Result<StatementSpec, TransferError> {
    let name = c.expect_ident().map_err(syn)?;
    c.expect_sym("{").map_err(syn)?;
    let mut kind = None;
    let mut function: Option<(String, Integrand)> = None;
    let mut domain: Option<DomainSpec> = None;
    let mut formula = None;
    let mut twists = Vec::new();
    while !c.eat_sym("}") {
        let field = c.expect_ident().map_err(syn)?;
        c.expect_sym(":").map_err(syn)?;
        match field.as_str() {
            "kind" => {
                let k = c.expect_ident().map_err(syn)?;
                kind = Some(match k.as_str() {
                    "integrability" => StatementKind::Integrability,
                    "boundedness" => StatementKind::Boundedness,
                    "truth" => StatementKind::FormulaTruth,
                    "bound" => {
                        c.expect_sym("(").map_err(syn)?;
                        let a = c.expect_signed().map_err(syn)?;
                        c.expect_sym(",").map_err(syn)?;
                        let b = c.expect_signed().map_err(syn)?;
                        c.expect_sym(")").map_err(syn)?;
                        StatementKind::BoundWithExponents { a, b }
                    }
                    other => return Err(TransferError::Parse(format!("unknown statement kind `{other}`"))),
                });
            }
            "function" => {
                let n = c.expect_ident().map_err(syn)?;
                let b = wb.block(&n).ok_or_else(|| TransferError::Parse(format!("unknown function `{n}`")))?;
                function = Some((n, integrand_of(b)));
            }
            "domain" => {
                let decls: Decls = function
                    .as_ref()
                    .map(|(_, f)| f.base().iter().map(|v| (v.name.clone(), v.sort)).collect())
                    .unwrap_or_default();
                domain = Some(if c.eat_kw("O") {
                    DomainSpec::Polydisc
                } else {
                    DomainSpec::Formula(formula_field(c, wb, &decls)?)
                });
            }
            "formula" => formula = Some(formula_field(c, wb, &Decls::new())?),
            "twists" => loop {
                twists.push(c.expect_signed().map_err(syn)?);
                if !c.eat_sym(",") {
                    break;
                }
            },
            other => return Err(TransferError::Parse(format!("unknown statement field `{other}`"))),
        }
        c.expect_sym(";").map_err(syn)?;
    }
    let kind = kind.ok_or_else(|| TransferError::Parse(format!("statement `{name}` has no kind")))?;
    let payload = match (kind, function, formula) {
        (StatementKind::FormulaTruth, None, Some(f)) => Payload::Formula(f),
        (StatementKind::FormulaTruth, _, _) => {
            return Err(TransferError::Parse(format!("statement `{name}` needs exactly a formula")));
        }
        (_, Some((fname, integrand)), None) => {
            let domain = match domain {
                Some(DomainSpec::Polydisc) => unit_polydisc(integrand.base())?,
                Some(DomainSpec::Formula(f)) => DefinableSet::new(f)?,
                None => DefinableSet::new(Formula::True)?,
            };
            Payload::Function {
                name: fname,
                integrand,
                domain,
            }
        }
        _ => return Err(TransferError::Parse(format!("statement `{name}` needs exactly a function"))),
    };
    let s = StatementSpec {
        name,
        kind,
        payload,
        twists,
    };
    s.check()?;
    Ok(s)
}

/// Parses a workbook.
pub fn parse_workbook(text: &str) -> Result<Workbook, TransferError> {
    let mut c = Cursor::new(text).map_err(syn)?;
    let mut wb = Workbook::default();
    while !c.at_eof() {
        let item = if c.is_kw("motivic") || c.is_kw("exp") {
            Item::Block(parse_block_at(&mut c, &Decls::new())?)
        } else if c.is_kw("tsum") {
            Item::TermSum(parse_tsum_at(&mut c).map_err(|e| TransferError::Parse(e.to_string()))?)
        } else if c.eat_kw("formula") {
            let n = c.expect_ident().map_err(syn)?;
            c.expect_sym(":=").map_err(syn)?;
            let f = formula_field(&mut c, &wb, &Decls::new())?;
            c.expect_sym(";").map_err(syn)?;
            Item::Formula(n, f)
        } else if c.eat_kw("statement") {
            Item::Statement(statement_at(&mut c, &wb)?)
        } else {
            return Err(syn(c.error("expected `formula`, `motivic`, `exp`, `tsum` or `statement`")));
        };
        if wb.items.iter().any(|i| i.name() == item.name()) {
            return Err(TransferError::Parse(format!("`{}` is defined twice", item.name())));
        }
        wb.items.push(item);
    }
    Ok(wb)
}
