use std::fmt;

use serde::{Deserialize, Serialize};

/// The three sorts of the Denef-Pas language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sort {
    /// Valued field.
    VF,
    /// Residue field.
    RF,
    /// Value group.
    ZZ,
}

impl Sort {
    pub const ALL: [Sort; 3] = [Sort::VF, Sort::RF, Sort::ZZ];

    pub fn name(self) -> &'static str {
        match self {
            Sort::VF => "VF",
            Sort::RF => "RF",
            Sort::ZZ => "ZZ",
        }
    }

    pub fn from_name(s: &str) -> Option<Sort> {
        match s {
            "VF" => Some(Sort::VF),
            "RF" => Some(Sort::RF),
            "ZZ" => Some(Sort::ZZ),
            _ => None,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A sorted variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var {
    pub name: String,
    pub sort: Sort,
}

impl Var {
    pub fn new(name: impl Into<String>, sort: Sort) -> Var {
        Var {
            name: name.into(),
            sort,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.sort)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    /// A nonnegative integer literal, interpreted in the given sort
    /// (through the constant embedding for VF, reduction for RF).
    Lit { value: u64, sort: Sort },
    /// The uniformizer constant `t` (VF sort).
    Uniformizer,
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    /// Ring multiplication; never valid in the ZZ sort.
    Mul(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    Ord(Box<Term>),
    Ac(Box<Term>),
}

impl Term {
    pub fn var(name: &str, sort: Sort) -> Term {
        Term::Var(Var::new(name, sort))
    }

    pub fn lit(value: u64, sort: Sort) -> Term {
        Term::Lit { value, sort }
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Term) -> Term {
        Term::Neg(Box::new(a))
    }

    pub fn ord(a: Term) -> Term {
        Term::Ord(Box::new(a))
    }

    pub fn ac(a: Term) -> Term {
        Term::Ac(Box::new(a))
    }

    /// Sort of the term as read off its head symbol. This does not check the
    /// children; see [`crate::syntax::typecheck`] for that.
    pub fn head_sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort,
            Term::Lit { sort, .. } => *sort,
            Term::Uniformizer => Sort::VF,
            Term::Add(a, _) | Term::Sub(a, _) | Term::Mul(a, _) | Term::Neg(a) => a.head_sort(),
            Term::Ord(_) => Sort::ZZ,
            Term::Ac(_) => Sort::RF,
        }
    }

    pub fn visit_vars<'a>(&'a self, f: &mut impl FnMut(&'a Var)) {
        match self {
            Term::Var(v) => f(v),
            Term::Lit { .. } | Term::Uniformizer => {}
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            Term::Neg(a) | Term::Ord(a) | Term::Ac(a) => a.visit_vars(f),
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        let mut hit = false;
        self.visit_vars(&mut |v| hit |= v.name == name);
        hit
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Exists => "exists",
            Quantifier::Forall => "forall",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    /// ZZ-sort `<=`.
    Le(Term, Term),
    /// ZZ-sort congruence modulo a literal `d >= 2`.
    Cong { lhs: Term, rhs: Term, modulus: u64 },
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Quant {
        q: Quantifier,
        var: Var,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn exists(var: Var, body: Formula) -> Formula {
        Formula::Quant {
            q: Quantifier::Exists,
            var,
            body: Box::new(body),
        }
    }

    pub fn forall(var: Var, body: Formula) -> Formula {
        Formula::Quant {
            q: Quantifier::Forall,
            var,
            body: Box::new(body),
        }
    }

    /// Conjunction of a list; `True` when empty.
    pub fn all(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut Vec<Var>) {
        let push_term = |t: &Term, bound: &Vec<&str>, out: &mut Vec<Var>| {
            t.visit_vars(&mut |v| {
                if !bound.contains(&v.name.as_str()) && !out.contains(v) {
                    out.push(v.clone());
                }
            })
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::Le(a, b) => {
                push_term(a, bound, out);
                push_term(b, bound, out);
            }
            Formula::Cong { lhs, rhs, .. } => {
                push_term(lhs, bound, out);
                push_term(rhs, bound, out);
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::Quant { var, body, .. } => {
                bound.push(&var.name);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// True when the formula contains a quantifier over the given sort.
    pub fn quantifies_over(&self, sort: Sort) -> bool {
        match self {
            Formula::True
            | Formula::False
            | Formula::Eq(..)
            | Formula::Le(..)
            | Formula::Cong { .. } => false,
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.quantifies_over(sort) || b.quantifies_over(sort)
            }
            Formula::Not(a) => a.quantifies_over(sort),
            Formula::Quant { var, body, .. } => var.sort == sort || body.quantifies_over(sort),
        }
    }

    pub fn quantifier_count(&self) -> usize {
        match self {
            Formula::True
            | Formula::False
            | Formula::Eq(..)
            | Formula::Le(..)
            | Formula::Cong { .. } => 0,
            Formula::And(a, b) | Formula::Or(a, b) => a.quantifier_count() + b.quantifier_count(),
            Formula::Not(a) => a.quantifier_count(),
            Formula::Quant { body, .. } => 1 + body.quantifier_count(),
        }
    }
}
