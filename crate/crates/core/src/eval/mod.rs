//! Three-valued model checking over a truncated local field.
//!
//! Residue-field quantifiers range over all of `F_p` and are exact.
//! Valued-field quantifiers range over the cell representatives of a
//! [`SearchBox`] plus exact zero, and value-group quantifiers over a window,
//! so a missing witness (or counterexample) only yields `Unknown`. Value-group
//! quantifiers whose body becomes a pure Presburger formula once the assigned
//! variables are substituted are decided exactly by quantifier elimination.
//!
//! `ord(0)` is `+∞`: `ord(0) = ord(0)` holds, `ord(0) >= z` holds for every
//! integer `z`, and any atom that would need `∞ - ∞` or a congruence of `∞`
//! is false.

mod value;

use std::collections::BTreeMap;
use std::rc::Rc;

use thiserror::Error;

use crate::localfield::{FieldDesc, FieldError, RFElem, VFElem};
use crate::presburger::{presburger_qe_with, Leaves, LinTerm, PresburgerError};
use crate::syntax::{typecheck, Formula, Quantifier, Signature, Sort, SyntaxError, Term, Var};

pub use value::{parse_assignment, parse_value, Assignment, Value};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("variable `{0}` is not assigned")]
    Unassigned(String),
    #[error("variable `{name}` has sort {expected} but was assigned a {found} value")]
    SortMismatch { name: String, expected: Sort, found: Sort },
    #[error("enumeration needs {needed} tuples, over the budget of {cap}")]
    Budget { needed: u128, cap: u128 },
    #[error("fiber variable `{0}` is not of sort RF")]
    FiberNotResidue(String),
    #[error("membership undetermined: {0}")]
    Undetermined(String),
    #[error("invalid search box: {0}")]
    InvalidBox(String),
    #[error("bad assignment `{text}`: {msg}")]
    Assignment { text: String, msg: String },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum TruthVal {
    True,
    False,
    Unknown,
}

impl TruthVal {
    pub fn from_bool(b: bool) -> TruthVal {
        if b {
            TruthVal::True
        } else {
            TruthVal::False
        }
    }

    pub fn and(self, o: TruthVal) -> TruthVal {
        use TruthVal::*;
        match (self, o) {
            (False, _) | (_, False) => False,
            (True, True) => True,
            _ => Unknown,
        }
    }

    pub fn or(self, o: TruthVal) -> TruthVal {
        self.not().and(o.not()).not()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> TruthVal {
        match self {
            TruthVal::True => TruthVal::False,
            TruthVal::False => TruthVal::True,
            TruthVal::Unknown => TruthVal::Unknown,
        }
    }

    pub fn is_definite(self) -> bool {
        self != TruthVal::Unknown
    }

    pub fn name(self) -> &'static str {
        match self {
            TruthVal::True => "True",
            TruthVal::False => "False",
            TruthVal::Unknown => "Unknown",
        }
    }
}

/// Finite windows for the unbounded quantifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SearchBox {
    pub vmin: i64,
    pub vmax: i64,
    pub depth: usize,
    pub zmin: i64,
    pub zmax: i64,
}

impl SearchBox {
    pub fn new(vmin: i64, vmax: i64, depth: usize, zmin: i64, zmax: i64) -> Result<SearchBox, EvalError> {
        let b = SearchBox { vmin, vmax, depth, zmin, zmax };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if self.vmin > self.vmax {
            return Err(EvalError::InvalidBox(format!("vmin {} > vmax {}", self.vmin, self.vmax)));
        }
        if self.zmin > self.zmax {
            return Err(EvalError::InvalidBox(format!("zmin {} > zmax {}", self.zmin, self.zmax)));
        }
        if self.depth == 0 {
            return Err(EvalError::InvalidBox("depth must be at least 1".into()));
        }
        Ok(())
    }

    /// Whether `self` contains `other` (every window at least as large).
    pub fn contains(&self, other: &SearchBox) -> bool {
        self.vmin <= other.vmin
            && self.vmax >= other.vmax
            && self.depth >= other.depth
            && self.zmin <= other.zmin
            && self.zmax >= other.zmax
    }
}

impl Default for SearchBox {
    fn default() -> SearchBox {
        SearchBox {
            vmin: -2,
            vmax: 4,
            depth: 2,
            zmin: -10,
            zmax: 10,
        }
    }
}

/// A formula together with its free-variable signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefinableSet {
    pub formula: Formula,
    pub signature: Signature,
}

impl DefinableSet {
    pub fn new(formula: Formula) -> Result<DefinableSet, EvalError> {
        let signature = typecheck(&formula)?;
        Ok(DefinableSet { formula, signature })
    }
}

/// Value-group values: integers, or `±∞` coming from `ord(0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZVal {
    Fin(i64),
    PosInf,
    NegInf,
    /// `∞ - ∞` and the like.
    Undefined,
}

impl ZVal {
    fn add(self, o: ZVal) -> ZVal {
        use ZVal::*;
        match (self, o) {
            (Fin(a), Fin(b)) => a.checked_add(b).map_or(Undefined, Fin),
            (Undefined, _) | (_, Undefined) | (PosInf, NegInf) | (NegInf, PosInf) => Undefined,
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
        }
    }

    fn neg(self) -> ZVal {
        match self {
            ZVal::Fin(a) => ZVal::Fin(-a),
            ZVal::PosInf => ZVal::NegInf,
            ZVal::NegInf => ZVal::PosInf,
            ZVal::Undefined => ZVal::Undefined,
        }
    }

    fn rank(self) -> Option<(i8, i64)> {
        match self {
            ZVal::NegInf => Some((-1, 0)),
            ZVal::Fin(a) => Some((0, a)),
            ZVal::PosInf => Some((1, 0)),
            ZVal::Undefined => None,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            ZVal::Fin(a) => Some(a),
            _ => None,
        }
    }
}

/// Evaluation context: a field, a box, and the cached representatives of the
/// valued-field window. Diagnostics (precision losses) are collected rather
/// than raised.
pub struct Evaluator {
    pub fd: FieldDesc,
    pub search: SearchBox,
    /// Decide value-group quantifiers by elimination when possible.
    pub use_qe: bool,
    ball: Option<Rc<Vec<VFElem>>>,
    diagnostics: Vec<String>,
}

type Env = Vec<(String, Value)>;

impl Evaluator {
    pub fn new(fd: FieldDesc, search: SearchBox) -> Evaluator {
        Evaluator {
            fd,
            search,
            use_qe: true,
            ball: None,
            diagnostics: Vec::new(),
        }
    }

    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    pub fn take_diagnostics(&mut self) -> Vec<String> {
        std::mem::take(&mut self.diagnostics)
    }

    fn note(&mut self, msg: String) {
        if self.diagnostics.len() < 32 && !self.diagnostics.contains(&msg) {
            self.diagnostics.push(msg);
        }
    }

    /// The valued-field quantifier domain: exact zero, then the box's cells.
    pub fn ball(&mut self) -> Rc<Vec<VFElem>> {
        let (fd, b) = (self.fd, self.search);
        self.ball
            .get_or_insert_with(|| Rc::new(fd.enumerate_ball(b.vmin, b.vmax, b.depth.min(fd.precision))))
            .clone()
    }

    fn lookup<'e>(env: &'e Env, v: &Var) -> Result<&'e Value, EvalError> {
        let (_, val) = env
            .iter()
            .rev()
            .find(|(n, _)| *n == v.name)
            .ok_or_else(|| EvalError::Unassigned(v.name.clone()))?;
        if val.sort() != v.sort {
            return Err(EvalError::SortMismatch {
                name: v.name.clone(),
                expected: v.sort,
                found: val.sort(),
            });
        }
        Ok(val)
    }

    /// A valued-field term; `None` when the computation lost all precision.
    pub fn vf_term(&mut self, t: &Term, env: &Env) -> Result<Option<VFElem>, EvalError> {
        let fd = self.fd;
        let bin = |this: &mut Evaluator, a: &Term, b: &Term| -> Result<Option<(VFElem, VFElem)>, EvalError> {
            let x = this.vf_term(a, env)?;
            let y = this.vf_term(b, env)?;
            Ok(x.zip(y))
        };
        let lift = |this: &mut Evaluator, r: Result<VFElem, FieldError>| match r {
            Ok(x) => Ok(Some(x)),
            Err(e @ FieldError::PrecisionExhausted { .. }) => {
                this.note(e.to_string());
                Ok(None)
            }
            Err(e) => Err(EvalError::Field(e)),
        };
        match t {
            Term::Var(v) => match Self::lookup(env, v)? {
                Value::VF(x) => Ok(Some(x.clone())),
                _ => unreachable!("sort checked in lookup"),
            },
            Term::Lit { value, .. } => Ok(Some(fd.embed_constant(&[(*value).into()]))),
            Term::Uniformizer => Ok(Some(fd.uniformizer())),
            Term::Add(a, b) => match bin(self, a, b)? {
                Some((x, y)) => lift(self, fd.add(&x, &y)),
                None => Ok(None),
            },
            Term::Sub(a, b) => match bin(self, a, b)? {
                Some((x, y)) => lift(self, fd.sub(&x, &y)),
                None => Ok(None),
            },
            Term::Mul(a, b) => match bin(self, a, b)? {
                Some((x, y)) => lift(self, fd.mul(&x, &y)),
                None => Ok(None),
            },
            Term::Neg(a) => Ok(self.vf_term(a, env)?.map(|x| fd.neg(&x))),
            Term::Ord(_) | Term::Ac(_) => Err(EvalError::Syntax(SyntaxError::IllSorted {
                subterm: t.to_string(),
                msg: "not a valued-field term".into(),
            })),
        }
    }

    /// A residue-field term; `None` when an underlying valued-field term lost
    /// all precision.
    pub fn rf_term(&mut self, t: &Term, env: &Env) -> Result<Option<RFElem>, EvalError> {
        let fd = self.fd;
        Ok(match t {
            Term::Var(v) => match Self::lookup(env, v)? {
                Value::RF(a) => Some(*a),
                _ => unreachable!("sort checked in lookup"),
            },
            Term::Lit { value, .. } => Some(RFElem((*value % fd.p as u64) as u32)),
            Term::Add(a, b) => self.rf_term(a, env)?.zip(self.rf_term(b, env)?).map(|(x, y)| fd.rf_add(x, y)),
            Term::Sub(a, b) => self.rf_term(a, env)?.zip(self.rf_term(b, env)?).map(|(x, y)| fd.rf_sub(x, y)),
            Term::Mul(a, b) => self.rf_term(a, env)?.zip(self.rf_term(b, env)?).map(|(x, y)| fd.rf_mul(x, y)),
            Term::Neg(a) => self.rf_term(a, env)?.map(|x| fd.rf_neg(x)),
            Term::Ac(a) => self.vf_term(a, env)?.map(|x| fd.ac(&x)),
            Term::Uniformizer | Term::Ord(_) => {
                return Err(EvalError::Syntax(SyntaxError::IllSorted {
                    subterm: t.to_string(),
                    msg: "not a residue-field term".into(),
                }))
            }
        })
    }

    /// A value-group term; `None` when an underlying valued-field term lost
    /// all precision.
    pub fn zz_term(&mut self, t: &Term, env: &Env) -> Result<Option<ZVal>, EvalError> {
        Ok(match t {
            Term::Var(v) => match Self::lookup(env, v)? {
                Value::ZZ(z) => Some(ZVal::Fin(*z)),
                _ => unreachable!("sort checked in lookup"),
            },
            Term::Lit { value, .. } => Some(i64::try_from(*value).map_or(ZVal::Undefined, ZVal::Fin)),
            Term::Add(a, b) => self.zz_term(a, env)?.zip(self.zz_term(b, env)?).map(|(x, y)| x.add(y)),
            Term::Sub(a, b) => self.zz_term(a, env)?.zip(self.zz_term(b, env)?).map(|(x, y)| x.add(y.neg())),
            Term::Neg(a) => self.zz_term(a, env)?.map(ZVal::neg),
            Term::Ord(a) => self.vf_term(a, env)?.map(|x| match x.valuation() {
                Some(v) => ZVal::Fin(v),
                None => ZVal::PosInf,
            }),
            Term::Mul(..) | Term::Uniformizer | Term::Ac(_) => {
                return Err(EvalError::Syntax(SyntaxError::IllSorted {
                    subterm: t.to_string(),
                    msg: "not a value-group term".into(),
                }))
            }
        })
    }

    fn atom_eq(&mut self, a: &Term, b: &Term, env: &Env) -> Result<TruthVal, EvalError> {
        let sort = crate::syntax::term_sort(a)?;
        Ok(match sort {
            Sort::VF => match (self.vf_term(a, env)?, self.vf_term(b, env)?) {
                (Some(x), Some(y)) => match self.fd.compare(&x, &y) {
                    Some(b) => TruthVal::from_bool(b),
                    None => {
                        self.note(format!("equality `{a} = {b}` undecided at working precision"));
                        TruthVal::Unknown
                    }
                },
                _ => TruthVal::Unknown,
            },
            Sort::RF => match (self.rf_term(a, env)?, self.rf_term(b, env)?) {
                (Some(x), Some(y)) => TruthVal::from_bool(x == y),
                _ => TruthVal::Unknown,
            },
            Sort::ZZ => match (self.zz_term(a, env)?, self.zz_term(b, env)?) {
                (Some(x), Some(y)) => match (x.rank(), y.rank()) {
                    (Some(rx), Some(ry)) => TruthVal::from_bool(rx == ry),
                    _ => TruthVal::False,
                },
                _ => TruthVal::Unknown,
            },
        })
    }

    /// Truth value of `f` under `env` (innermost bindings last).
    pub fn eval(&mut self, f: &Formula, env: &mut Env) -> Result<TruthVal, EvalError> {
        Ok(match f {
            Formula::True => TruthVal::True,
            Formula::False => TruthVal::False,
            Formula::Eq(a, b) => self.atom_eq(a, b, env)?,
            Formula::Le(a, b) => match (self.zz_term(a, env)?, self.zz_term(b, env)?) {
                (Some(x), Some(y)) => match (x.rank(), y.rank()) {
                    (Some(rx), Some(ry)) => TruthVal::from_bool(rx <= ry),
                    _ => TruthVal::False,
                },
                _ => TruthVal::Unknown,
            },
            Formula::Cong { lhs, rhs, modulus } => match (self.zz_term(lhs, env)?, self.zz_term(rhs, env)?) {
                (Some(ZVal::Fin(x)), Some(ZVal::Fin(y))) => {
                    TruthVal::from_bool((x as i128 - y as i128).rem_euclid(*modulus as i128) == 0)
                }
                (Some(_), Some(_)) => TruthVal::False,
                _ => TruthVal::Unknown,
            },
            Formula::And(a, b) => {
                let x = self.eval(a, env)?;
                if x == TruthVal::False {
                    return Ok(x);
                }
                x.and(self.eval(b, env)?)
            }
            Formula::Or(a, b) => {
                let x = self.eval(a, env)?;
                if x == TruthVal::True {
                    return Ok(x);
                }
                x.or(self.eval(b, env)?)
            }
            Formula::Not(a) => self.eval(a, env)?.not(),
            Formula::Quant { q, var, body } => self.quant(*q, var, body, f, env)?,
        })
    }

    fn quant(&mut self, q: Quantifier, var: &Var, body: &Formula, whole: &Formula, env: &mut Env) -> Result<TruthVal, EvalError> {
        let exists = q == Quantifier::Exists;
        if var.sort == Sort::ZZ && self.use_qe {
            if let Some(t) = self.decide_by_qe(whole, env)? {
                return Ok(t);
            }
        }
        let ball = if var.sort == Sort::VF { Some(self.ball()) } else { None };
        let size = match var.sort {
            Sort::RF => self.fd.p as usize,
            Sort::VF => ball.as_ref().map_or(0, |b| b.len()),
            Sort::ZZ => (self.search.zmax - self.search.zmin + 1) as usize,
        };
        let zmin = self.search.zmin;
        let value_at = |i: usize| match var.sort {
            Sort::RF => Value::RF(RFElem(i as u32)),
            Sort::VF => Value::VF(ball.as_ref().expect("ball")[i].clone()),
            Sort::ZZ => Value::ZZ(zmin + i as i64),
        };
        let vacuous = !body.free_vars().iter().any(|v| v.name == var.name);
        if vacuous {
            // Every domain is nonempty, so the body decides.
            env.push((var.name.clone(), value_at(0)));
            let t = self.eval(body, env);
            env.pop();
            return t;
        }
        let mut unknown = false;
        for i in 0..size {
            env.push((var.name.clone(), value_at(i)));
            let t = self.eval(body, env);
            env.pop();
            match t? {
                TruthVal::True if exists => return Ok(TruthVal::True),
                TruthVal::False if !exists => return Ok(TruthVal::False),
                TruthVal::Unknown => unknown = true,
                _ => {}
            }
        }
        // The residue field is searched exhaustively; other sorts are not.
        Ok(if var.sort == Sort::RF && !unknown {
            TruthVal::from_bool(!exists)
        } else {
            TruthVal::Unknown
        })
    }

    /// Exact verdict for a value-group quantifier whose body is Presburger
    /// after substitution; `None` when it is not.
    fn decide_by_qe(&mut self, f: &Formula, env: &Env) -> Result<Option<TruthVal>, EvalError> {
        struct Subst<'a> {
            ev: &'a mut Evaluator,
            env: &'a Env,
            err: Option<EvalError>,
        }
        impl Leaves for Subst<'_> {
            fn term(&mut self, t: &Term) -> Result<LinTerm, PresburgerError> {
                match self.ev.zz_term(t, self.env) {
                    Ok(Some(ZVal::Fin(z))) => Ok(LinTerm::constant(z as i128)),
                    Ok(_) => Err(PresburgerError::NotPresburger("infinite or unknown value".into())),
                    Err(e) => {
                        self.err = Some(e);
                        Err(PresburgerError::NotPresburger("evaluation error".into()))
                    }
                }
            }
            fn constant_atom(&mut self, f: &Formula) -> Result<Option<bool>, PresburgerError> {
                let (a, b) = match f {
                    Formula::Le(a, b) | Formula::Eq(a, b) => (a, b),
                    Formula::Cong { lhs, rhs, .. } => (lhs, rhs),
                    _ => return Ok(None),
                };
                if crate::syntax::term_sort(a).ok() != Some(Sort::ZZ) {
                    return Ok(None);
                }
                // Finite variables cannot change whether a side is infinite.
                let mut env = self.env.clone();
                for v in f.free_vars() {
                    if v.sort == Sort::ZZ {
                        env.push((v.name, Value::ZZ(0)));
                    }
                }
                let sides = self.ev.zz_term(a, &env).and_then(|x| Ok(x.zip(self.ev.zz_term(b, &env)?)));
                match sides {
                    Ok(Some((ZVal::Fin(_), ZVal::Fin(_)))) => Ok(None),
                    Ok(Some(_)) => self.atom(f).map(Some),
                    Ok(None) => Err(PresburgerError::NotPresburger("unknown value".into())),
                    Err(e) => {
                        self.err = Some(e);
                        Err(PresburgerError::NotPresburger("evaluation error".into()))
                    }
                }
            }
            fn atom(&mut self, f: &Formula) -> Result<bool, PresburgerError> {
                let mut env = self.env.clone();
                for v in f.free_vars() {
                    if v.sort == Sort::ZZ && !env.iter().any(|(n, _)| *n == v.name) {
                        env.push((v.name, Value::ZZ(0)));
                    }
                }
                match self.ev.eval(f, &mut env) {
                    Ok(TruthVal::True) => Ok(true),
                    Ok(TruthVal::False) => Ok(false),
                    Ok(TruthVal::Unknown) => Err(PresburgerError::NotPresburger("unknown atom".into())),
                    Err(e) => {
                        self.err = Some(e);
                        Err(PresburgerError::NotPresburger("evaluation error".into()))
                    }
                }
            }
        }
        let mut leaves = Subst { ev: self, env, err: None };
        let set = match presburger_qe_with(f, &mut leaves) {
            Ok(s) => s,
            Err(_) => {
                return match leaves.err {
                    Some(e) => Err(e),
                    None => Ok(None),
                }
            }
        };
        let mut point = BTreeMap::new();
        for name in &set.vars {
            match env.iter().rev().find(|(n, _)| n == name) {
                Some((_, Value::ZZ(z))) => {
                    point.insert(name.clone(), *z as i128);
                }
                _ => return Ok(None),
            }
        }
        Ok(Some(TruthVal::from_bool(set.contains_map(&point))))
    }
}

/// Evaluates `f` with the free variables taken from `a`.
pub fn eval_formula(fd: &FieldDesc, search: &SearchBox, a: &Assignment, f: &Formula) -> Result<TruthVal, EvalError> {
    search.validate()?;
    let mut ev = Evaluator::new(*fd, *search);
    eval_with(&mut ev, a, f)
}

pub fn eval_with(ev: &mut Evaluator, a: &Assignment, f: &Formula) -> Result<TruthVal, EvalError> {
    let mut env = Vec::new();
    for v in f.free_vars() {
        let val = a.get(&v.name).ok_or_else(|| EvalError::Unassigned(v.name.clone()))?;
        if val.sort() != v.sort {
            return Err(EvalError::SortMismatch {
                name: v.name.clone(),
                expected: v.sort,
                found: val.sort(),
            });
        }
        env.push((v.name.clone(), val.clone()));
    }
    ev.eval(f, &mut env)
}

/// Tuples (in the order of `vars`) whose verdict is `True`, and those whose
/// verdict is `Unknown`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub vars: Vec<Var>,
    pub true_tuples: Vec<Vec<Value>>,
    pub unknown_tuples: Vec<Vec<Value>>,
    pub examined: u128,
}

/// Default cap on enumerated tuples.
pub const DEFAULT_BUDGET: u128 = 2_000_000;

fn domain_of(ev: &mut Evaluator, sort: Sort) -> Vec<Value> {
    match sort {
        Sort::VF => ev.ball().iter().cloned().map(Value::VF).collect(),
        Sort::RF => (0..ev.fd.p).map(|a| Value::RF(RFElem(a))).collect(),
        Sort::ZZ => (ev.search.zmin..=ev.search.zmax).map(Value::ZZ).collect(),
    }
}

/// Enumerates the free variables of `s` not fixed by `fixed`: valued-field
/// ones over the box (valuations ascending, digits lexicographic), residue
/// ones over `F_p`, value-group ones over the window.
pub fn enumerate_set(
    fd: &FieldDesc,
    search: &SearchBox,
    s: &DefinableSet,
    fixed: &Assignment,
    budget: u128,
) -> Result<Enumeration, EvalError> {
    search.validate()?;
    let mut ev = Evaluator::new(*fd, *search);
    enumerate_with(&mut ev, s, fixed, budget)
}

pub fn enumerate_with(ev: &mut Evaluator, s: &DefinableSet, fixed: &Assignment, budget: u128) -> Result<Enumeration, EvalError> {
    let open: Vec<Var> = s.signature.vars.iter().filter(|v| fixed.get(&v.name).is_none()).cloned().collect();
    let domains: Vec<Vec<Value>> = open.iter().map(|v| domain_of(ev, v.sort)).collect();
    let needed = domains.iter().fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128));
    if needed > budget {
        return Err(EvalError::Budget { needed, cap: budget });
    }
    let mut out = Enumeration {
        vars: open.clone(),
        true_tuples: Vec::new(),
        unknown_tuples: Vec::new(),
        examined: 0,
    };
    let mut idx = vec![0usize; open.len()];
    if domains.iter().any(|d| d.is_empty()) {
        return Ok(out);
    }
    let mut a = fixed.clone();
    loop {
        let tuple: Vec<Value> = idx.iter().zip(&domains).map(|(&i, d)| d[i].clone()).collect();
        for (v, val) in open.iter().zip(&tuple) {
            a.insert(&v.name, val.clone());
        }
        out.examined += 1;
        match eval_with(ev, &a, &s.formula)? {
            TruthVal::True => out.true_tuples.push(tuple),
            TruthVal::Unknown => out.unknown_tuples.push(tuple),
            TruthVal::False => {}
        }
        // Odometer, last variable fastest.
        let mut k = idx.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < domains[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// `#{y ∈ F_p^r : (x, y) ∈ Y}` for residue-field fiber variables `fiber`.
pub fn count_rf_fiber(fd: &FieldDesc, search: &SearchBox, y: &DefinableSet, fiber: &[Var], x: &Assignment) -> Result<u64, EvalError> {
    let mut ev = Evaluator::new(*fd, *search);
    count_rf_fiber_with(&mut ev, y, fiber, x)
}

pub fn count_rf_fiber_with(ev: &mut Evaluator, y: &DefinableSet, fiber: &[Var], x: &Assignment) -> Result<u64, EvalError> {
    for v in fiber {
        if v.sort != Sort::RF {
            return Err(EvalError::FiberNotResidue(v.name.clone()));
        }
    }
    let p = ev.fd.p as u64;
    let total = p.checked_pow(fiber.len() as u32).filter(|&n| n <= 50_000_000).ok_or(EvalError::Budget {
        needed: (p as u128).saturating_pow(fiber.len() as u32),
        cap: 50_000_000,
    })?;
    let mut a = x.clone();
    let mut count = 0u64;
    for k in 0..total {
        let mut rest = k;
        for v in fiber.iter().rev() {
            a.insert(&v.name, Value::RF(RFElem((rest % p) as u32)));
            rest /= p;
        }
        match eval_with(ev, &a, &y.formula)? {
            TruthVal::True => count += 1,
            TruthVal::False => {}
            TruthVal::Unknown => {
                let pt: Vec<String> = fiber.iter().map(|v| format!("{}={}", v.name, a.get(&v.name).unwrap().render(&ev.fd))).collect();
                return Err(EvalError::Undetermined(format!("fiber membership at {}", pt.join(", "))));
            }
        }
    }
    Ok(count)
}
