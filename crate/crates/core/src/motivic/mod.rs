//! Motivic functions `Σ_i q^{α_i} · #(Y_i)_x · Π_j β_ij · Π_l 1/(1 - q^{a_il})`
//! and motivic exponential functions `Σ_i f_i · Σ_{y ∈ (Y_i)_x} Λ(g_i)·Λ̄(e_i)`,
//! evaluated field by field with exact arithmetic.

mod character;
mod cyclo;
mod parse;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::eval::{count_rf_fiber_with, eval_with, Assignment, DefinableSet, EvalError, Evaluator, TruthVal, Value, ZVal};
use crate::localfield::{FieldDesc, RFElem, VFElem};
use crate::syntax::{Formula, Sort, Term, Var};

pub use character::{canonical_character, residue_character, twisted_character, CharacterValue, Twist};
pub use cyclo::{rat, rational_to_f64, Cyclo, RootOfUnity};
pub use parse::{parse_block, parse_block_at, parse_exp_block, parse_motivic_block, Block};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum MotivicError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    /// A definable function did not produce exactly one value.
    #[error("unresolved {what}: {msg}")]
    Unresolved { what: String, msg: String },
    #[error("insufficient precision for the character: {0}")]
    Precision(String),
    #[error("geometric factor exponent must be nonzero")]
    ZeroGeom,
    #[error("{0}")]
    Parse(String),
}

/// A `Z`-valued definable function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZFunction {
    Term(Term),
    /// `{(x, z) : φ}`, with `z` searched in `[lo, hi]`.
    Graph { set: DefinableSet, var: String, lo: i64, hi: i64 },
}

/// A valued-field-valued definable function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VFFunction {
    Term(Term),
    /// `{(x, w) : φ}` with `w` searched among the box's cells.
    Graph { set: DefinableSet, var: String },
}

/// A residue-field-valued definable function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RFFunction {
    Term(Term),
    /// `{(x, u) : φ}`, searched over all of `F_p`.
    Graph { set: DefinableSet, var: String },
}

/// A finite residue-field fiber `{y ∈ F_p^r : φ(x, y)}`. With no variables
/// the fiber is a point or empty, which encodes indicator functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fiber {
    pub vars: Vec<Var>,
    pub set: DefinableSet,
}

impl Fiber {
    /// `F_p^0`, a single point.
    pub fn point() -> Fiber {
        Fiber {
            vars: Vec::new(),
            set: DefinableSet::new(Formula::True).expect("true is well-sorted"),
        }
    }

    pub fn new(vars: Vec<Var>, formula: Formula) -> Result<Fiber, MotivicError> {
        for v in &vars {
            if v.sort != Sort::RF {
                return Err(EvalError::FiberNotResidue(v.name.clone()).into());
            }
        }
        Ok(Fiber {
            vars,
            set: DefinableSet::new(formula)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotivicTerm {
    pub alpha: ZFunction,
    pub betas: Vec<ZFunction>,
    pub fiber: Fiber,
    /// Nonzero integers `a_l` of the factors `1/(1 - q^{a_l})`.
    pub geom: Vec<i64>,
}

impl MotivicTerm {
    /// `q^0 · 1`: the constant function 1.
    pub fn one() -> MotivicTerm {
        MotivicTerm {
            alpha: ZFunction::Term(Term::lit(0, Sort::ZZ)),
            betas: Vec::new(),
            fiber: Fiber::point(),
            geom: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotivicFunction {
    /// Variables of the base `X`.
    pub base: Vec<Var>,
    pub terms: Vec<MotivicTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpTerm {
    pub f: MotivicFunction,
    pub fiber: Fiber,
    pub g: VFFunction,
    pub e: RFFunction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotivicExpFunction {
    pub base: Vec<Var>,
    pub terms: Vec<ExpTerm>,
}

/// Either kind of integrand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Integrand {
    Motivic(MotivicFunction),
    Exp(MotivicExpFunction),
}

impl Integrand {
    pub fn base(&self) -> &[Var] {
        match self {
            Integrand::Motivic(f) => &f.base,
            Integrand::Exp(f) => &f.base,
        }
    }
}

/// A motivic function as an exponential one with trivial character sums.
pub fn lift_to_exp(f: MotivicFunction) -> MotivicExpFunction {
    MotivicExpFunction {
        base: f.base.clone(),
        terms: vec![ExpTerm {
            f,
            fiber: Fiber::point(),
            g: VFFunction::Term(Term::lit(0, Sort::VF)),
            e: RFFunction::Term(Term::lit(0, Sort::RF)),
        }],
    }
}

fn q_pow(p: u32, e: i64) -> BigRational {
    let b = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(b)
    } else {
        BigRational::new(BigInt::one(), b)
    }
}

/// `1 / (1 - p^a)`.
fn geom_factor(p: u32, a: i64) -> Result<BigRational, MotivicError> {
    if a == 0 {
        return Err(MotivicError::ZeroGeom);
    }
    Ok((BigRational::one() - q_pow(p, a)).recip())
}

/// Evaluation of motivic data in one field under one box.
pub struct MotivicEval<'a> {
    pub ev: &'a mut Evaluator,
    pub twist: Twist,
}

impl<'a> MotivicEval<'a> {
    pub fn new(ev: &'a mut Evaluator) -> MotivicEval<'a> {
        let p = ev.fd.p;
        MotivicEval { ev, twist: Twist::canonical(p) }
    }

    pub fn with_twist(ev: &'a mut Evaluator, twist: Twist) -> MotivicEval<'a> {
        MotivicEval { ev, twist }
    }

    fn env_of(a: &Assignment) -> Vec<(String, Value)> {
        a.iter().map(|(n, v)| (n.clone(), v.clone())).collect()
    }

    pub fn zfunction(&mut self, z: &ZFunction, x: &Assignment) -> Result<i64, MotivicError> {
        match z {
            ZFunction::Term(t) => match self.ev.zz_term(t, &Self::env_of(x))? {
                Some(ZVal::Fin(v)) => Ok(v),
                Some(other) => Err(MotivicError::Unresolved {
                    what: format!("`{t}`"),
                    msg: format!("value {other:?} is not an integer (ord of 0?)"),
                }),
                None => Err(MotivicError::Unresolved {
                    what: format!("`{t}`"),
                    msg: "precision exhausted".into(),
                }),
            },
            ZFunction::Graph { set, var, lo, hi } => {
                let mut found = Vec::new();
                let mut a = x.clone();
                for z in *lo..=*hi {
                    a.insert(var, Value::ZZ(z));
                    match eval_with(self.ev, &a, &set.formula)? {
                        TruthVal::True => found.push(z),
                        TruthVal::False => {}
                        TruthVal::Unknown => {
                            return Err(MotivicError::Unresolved {
                                what: format!("graph of `{var}`"),
                                msg: format!("membership unknown at {var}={z}"),
                            })
                        }
                    }
                    if found.len() > 1 {
                        break;
                    }
                }
                match found.as_slice() {
                    [z] => Ok(*z),
                    [] => Err(MotivicError::Unresolved {
                        what: format!("graph of `{var}`"),
                        msg: format!("no value in [{lo}, {hi}]"),
                    }),
                    _ => Err(MotivicError::Unresolved {
                        what: format!("graph of `{var}`"),
                        msg: format!("several values in [{lo}, {hi}]: {found:?}"),
                    }),
                }
            }
        }
    }

    fn vffunction(&mut self, g: &VFFunction, x: &Assignment) -> Result<VFElem, MotivicError> {
        match g {
            VFFunction::Term(t) => self.ev.vf_term(t, &Self::env_of(x))?.ok_or_else(|| MotivicError::Unresolved {
                what: format!("`{t}`"),
                msg: "precision exhausted".into(),
            }),
            VFFunction::Graph { set, var } => {
                if let Some(w) = self.solve_product(&set.formula, var, x)? {
                    return Ok(w);
                }
                let ball = self.ev.ball();
                let mut found: Option<VFElem> = None;
                let mut a = x.clone();
                for w in ball.iter() {
                    a.insert(var, Value::VF(w.clone()));
                    match eval_with(self.ev, &a, &set.formula)? {
                        TruthVal::True if found.is_some() => {
                            return Err(MotivicError::Unresolved {
                                what: format!("graph of `{var}`"),
                                msg: "several values in the box".into(),
                            })
                        }
                        TruthVal::True => found = Some(w.clone()),
                        TruthVal::False => {}
                        TruthVal::Unknown => {
                            return Err(MotivicError::Unresolved {
                                what: format!("graph of `{var}`"),
                                msg: "membership unknown".into(),
                            })
                        }
                    }
                }
                found.ok_or_else(|| MotivicError::Unresolved {
                    what: format!("graph of `{var}`"),
                    msg: "no value in the box".into(),
                })
            }
        }
    }

    /// Solves a graph `c·w = s` (with `w` a single factor of one side and
    /// `c` provably nonzero) by division; the solution is unique in the
    /// field, so no search is needed.
    fn solve_product(&mut self, f: &Formula, var: &str, x: &Assignment) -> Result<Option<VFElem>, MotivicError> {
        fn factors<'t>(t: &'t Term, out: &mut Vec<&'t Term>) {
            match t {
                Term::Mul(a, b) => {
                    factors(a, out);
                    factors(b, out);
                }
                _ => out.push(t),
            }
        }
        let Formula::Eq(l, r) = f else {
            return Ok(None);
        };
        let (side, other) = match (l.mentions(var), r.mentions(var)) {
            (true, false) => (l, r),
            (false, true) => (r, l),
            _ => return Ok(None),
        };
        let mut fs = Vec::new();
        factors(side, &mut fs);
        let is_var = |t: &&Term| matches!(t, Term::Var(v) if v.name == var);
        if fs.iter().filter(|t| is_var(t)).count() != 1 || fs.iter().any(|t| !is_var(t) && t.mentions(var)) {
            return Ok(None);
        }
        let env = Self::env_of(x);
        let fd = self.ev.fd;
        let mut c = fd.one();
        for t in fs.iter().filter(|t| !is_var(t)) {
            let Some(v) = self.ev.vf_term(t, &env)? else {
                return Ok(None);
            };
            c = match fd.mul(&c, &v) {
                Ok(c) => c,
                Err(_) => return Ok(None),
            };
        }
        if c.is_zero() {
            return Ok(None);
        }
        let Some(s) = self.ev.vf_term(other, &env)? else {
            return Ok(None);
        };
        let Ok(w) = fd.inv(&c).and_then(|ci| fd.mul(&s, &ci)) else {
            return Ok(None);
        };
        let a = x.clone().with(var, Value::VF(w.clone()));
        Ok((eval_with(self.ev, &a, f)? == TruthVal::True).then_some(w))
    }

    fn rffunction(&mut self, e: &RFFunction, x: &Assignment) -> Result<RFElem, MotivicError> {
        match e {
            RFFunction::Term(t) => self.ev.rf_term(t, &Self::env_of(x))?.ok_or_else(|| MotivicError::Unresolved {
                what: format!("`{t}`"),
                msg: "precision exhausted".into(),
            }),
            RFFunction::Graph { set, var } => {
                let mut found = Vec::new();
                let mut a = x.clone();
                for u in 0..self.ev.fd.p {
                    a.insert(var, Value::RF(RFElem(u)));
                    match eval_with(self.ev, &a, &set.formula)? {
                        TruthVal::True => found.push(u),
                        TruthVal::False => {}
                        TruthVal::Unknown => {
                            return Err(MotivicError::Unresolved {
                                what: format!("graph of `{var}`"),
                                msg: "membership unknown".into(),
                            })
                        }
                    }
                }
                match found.as_slice() {
                    [u] => Ok(RFElem(*u)),
                    _ => Err(MotivicError::Unresolved {
                        what: format!("graph of `{var}`"),
                        msg: format!("{} values in F_p", found.len()),
                    }),
                }
            }
        }
    }

    pub fn term(&mut self, t: &MotivicTerm, x: &Assignment) -> Result<BigRational, MotivicError> {
        let p = self.ev.fd.p;
        let count = count_rf_fiber_with(self.ev, &t.fiber.set, &t.fiber.vars, x)?;
        if count == 0 {
            return Ok(BigRational::zero());
        }
        let mut v = q_pow(p, self.zfunction(&t.alpha, x)?) * rat(count as i64);
        for b in &t.betas {
            v *= rat(self.zfunction(b, x)?);
            if v.is_zero() {
                return Ok(v);
            }
        }
        for a in &t.geom {
            v *= geom_factor(p, *a)?;
        }
        Ok(v)
    }

    pub fn motivic(&mut self, f: &MotivicFunction, x: &Assignment) -> Result<BigRational, MotivicError> {
        let mut sum = BigRational::zero();
        for t in &f.terms {
            sum += self.term(t, x)?;
        }
        Ok(sum)
    }

    /// `Σ_{y ∈ fiber} Λ(g)·Λ̄(e)`.
    pub fn character_sum(&mut self, t: &ExpTerm, x: &Assignment) -> Result<Cyclo, MotivicError> {
        let fd = self.ev.fd;
        let p = fd.p as u64;
        let r = t.fiber.vars.len() as u32;
        let total = p.checked_pow(r).filter(|&n| n <= 50_000_000).ok_or(EvalError::Budget {
            needed: (p as u128).saturating_pow(r),
            cap: 50_000_000,
        })?;
        let mut sum = Cyclo::zero(fd.p);
        let one = BigRational::one();
        let mut a = x.clone();
        for k in 0..total {
            let mut rest = k;
            for v in t.fiber.vars.iter().rev() {
                a.insert(&v.name, Value::RF(RFElem((rest % p) as u32)));
                rest /= p;
            }
            match eval_with(self.ev, &a, &t.fiber.set.formula)? {
                TruthVal::True => {}
                TruthVal::False => continue,
                TruthVal::Unknown => {
                    return Err(EvalError::Undetermined("character-sum fiber membership".into()).into());
                }
            }
            let g = self.vffunction(&t.g, &a)?;
            let e = self.rffunction(&t.e, &a)?;
            let lam = twisted_character(&fd, &self.twist, &g)?;
            let lam_bar = self.twist.residue(&fd, e).conj();
            sum.add_root(&lam.root.mul(&lam_bar), &one);
        }
        Ok(sum)
    }

    pub fn exp(&mut self, f: &MotivicExpFunction, x: &Assignment) -> Result<Cyclo, MotivicError> {
        let mut sum = Cyclo::zero(self.ev.fd.p);
        for t in &f.terms {
            let c = self.motivic(&t.f, x)?;
            if c.is_zero() {
                continue;
            }
            sum = sum.add(&self.character_sum(t, x)?.scale(&c));
        }
        Ok(sum)
    }

    /// Either kind of function, as a cyclotomic number.
    pub fn integrand(&mut self, f: &Integrand, x: &Assignment) -> Result<Cyclo, MotivicError> {
        match f {
            Integrand::Motivic(m) => Ok(Cyclo::rational(self.ev.fd.p, self.motivic(m, x)?)),
            Integrand::Exp(e) => self.exp(e, x),
        }
    }
}

pub fn eval_motivic(fd: &FieldDesc, search: &crate::eval::SearchBox, f: &MotivicFunction, x: &Assignment) -> Result<BigRational, MotivicError> {
    let mut ev = Evaluator::new(*fd, *search);
    MotivicEval::new(&mut ev).motivic(f, x)
}

/// Exponential function value; the float rendering is
/// [`Cyclo::to_complex`].
pub fn eval_exp(
    fd: &FieldDesc,
    search: &crate::eval::SearchBox,
    f: &MotivicExpFunction,
    x: &Assignment,
    twist: &Twist,
) -> Result<Cyclo, MotivicError> {
    let mut ev = Evaluator::new(*fd, *search);
    MotivicEval::with_twist(&mut ev, twist.clone()).exp(f, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::SearchBox;
    use crate::syntax::{parse_formula_with, parse_term_with, Decls};

    fn decls() -> Decls {
        [("x".to_string(), Sort::VF), ("y".to_string(), Sort::RF)].into_iter().collect()
    }

    fn worked() -> MotivicFunction {
        let d = decls();
        MotivicFunction {
            base: vec![Var::new("x", Sort::VF)],
            terms: vec![MotivicTerm {
                alpha: ZFunction::Term(parse_term_with("ord(x)", &d, Sort::ZZ).unwrap()),
                betas: vec![ZFunction::Term(Term::lit(1, Sort::ZZ))],
                fiber: Fiber::new(vec![Var::new("y", Sort::RF)], parse_formula_with("y * y = ac(x)", &d).unwrap()).unwrap(),
                geom: vec![-2],
            }],
        }
    }

    #[test]
    fn worked_instance() {
        let fd = FieldDesc::qp(5, 10).unwrap();
        let x = Assignment::new().with("x", Value::VF(fd.embed_int(5)));
        let v = eval_motivic(&fd, &SearchBox::default(), &worked(), &x).unwrap();
        assert_eq!(v, BigRational::new(125.into(), 12.into()));
    }

    #[test]
    fn full_residue_count_and_cancellation() {
        let fd = FieldDesc::fpt(7, 8).unwrap();
        let d = decls();
        let all = MotivicTerm {
            fiber: Fiber::new(vec![Var::new("y", Sort::RF)], Formula::True).unwrap(),
            ..MotivicTerm::one()
        };
        let f = MotivicFunction {
            base: vec![],
            terms: vec![all],
        };
        let x = Assignment::new();
        assert_eq!(eval_motivic(&fd, &SearchBox::default(), &f, &x).unwrap(), rat(7));

        let mut neg = worked().terms[0].clone();
        neg.betas.push(ZFunction::Term(parse_term_with("-1", &d, Sort::ZZ).unwrap()));
        let diff = MotivicFunction {
            base: vec![Var::new("x", Sort::VF)],
            terms: vec![worked().terms[0].clone(), neg],
        };
        for n in [1, 3, 10, 25] {
            let x = Assignment::new().with("x", Value::VF(fd.embed_int(n)));
            assert!(eval_motivic(&fd, &SearchBox::default(), &diff, &x).unwrap().is_zero());
        }
    }

    #[test]
    fn exponential_examples() {
        let fd = FieldDesc::qp(5, 10).unwrap();
        let d = decls();
        let b = SearchBox::default();
        let one = MotivicFunction {
            base: vec![],
            terms: vec![MotivicTerm::one()],
        };
        // Degenerate fiber: Λ(x) itself.
        let lam = MotivicExpFunction {
            base: vec![Var::new("x", Sort::VF)],
            terms: vec![ExpTerm {
                f: one.clone(),
                fiber: Fiber::point(),
                g: VFFunction::Term(parse_term_with("x", &d, Sort::VF).unwrap()),
                e: RFFunction::Term(Term::lit(0, Sort::RF)),
            }],
        };
        let x = fd.inv(&fd.uniformizer()).unwrap();
        let v = eval_exp(&fd, &b, &lam, &Assignment::new().with("x", Value::VF(x.clone())), &Twist::canonical(5)).unwrap();
        assert_eq!(v, Cyclo::root(canonical_character(&fd, &x).unwrap().root));

        // Gauss sum Σ_y Λ̄(y²) has absolute value √5; Σ_y Λ̄(y) = 0.
        let gauss = |e: &str| MotivicExpFunction {
            base: vec![],
            terms: vec![ExpTerm {
                f: one.clone(),
                fiber: Fiber::new(vec![Var::new("y", Sort::RF)], Formula::True).unwrap(),
                g: VFFunction::Term(Term::lit(0, Sort::VF)),
                e: RFFunction::Term(parse_term_with(e, &d, Sort::RF).unwrap()),
            }],
        };
        let g = eval_exp(&fd, &b, &gauss("y * y"), &Assignment::new(), &Twist::canonical(5)).unwrap();
        assert!((g.abs() - 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(g.norm_sq().as_rational(), Some(rat(5)));
        let z = eval_exp(&fd, &b, &gauss("y"), &Assignment::new(), &Twist::canonical(5)).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn graph_functions_need_a_unique_value() {
        let fd = FieldDesc::qp(5, 10).unwrap();
        let d: Decls = [("x".to_string(), Sort::VF), ("z".to_string(), Sort::ZZ)].into_iter().collect();
        let mut ev = Evaluator::new(fd, SearchBox::default());
        let mut m = MotivicEval::new(&mut ev);
        let x = Assignment::new().with("x", Value::VF(fd.embed_int(25)));
        let g = ZFunction::Graph {
            set: DefinableSet::new(parse_formula_with("z + z = ord(x)", &d).unwrap()).unwrap(),
            var: "z".into(),
            lo: -5,
            hi: 5,
        };
        assert_eq!(m.zfunction(&g, &x).unwrap(), 1);
        let several = ZFunction::Graph {
            set: DefinableSet::new(parse_formula_with("z <= ord(x)", &d).unwrap()).unwrap(),
            var: "z".into(),
            lo: -5,
            hi: 5,
        };
        assert!(matches!(m.zfunction(&several, &x), Err(MotivicError::Unresolved { .. })));
        let x3 = Assignment::new().with("x", Value::VF(fd.embed_int(125)));
        assert!(matches!(m.zfunction(&g, &x3), Err(MotivicError::Unresolved { .. })));
    }
}
