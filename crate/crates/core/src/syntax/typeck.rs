use std::collections::BTreeMap;

use serde::Serialize;

use super::ast::{Formula, Sort, Term, Var};
use super::SyntaxError;

/// Free-variable signature `(n, m, r)` of a formula: counts of free VF, RF
/// and ZZ variables, plus the variables in order of first occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub vars: Vec<Var>,
}

impl Signature {
    pub fn new(vars: Vec<Var>) -> Signature {
        Signature { vars }
    }

    pub fn count(&self, sort: Sort) -> usize {
        self.vars.iter().filter(|v| v.sort == sort).count()
    }

    /// `(n, m, r)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.count(Sort::VF), self.count(Sort::RF), self.count(Sort::ZZ))
    }

    pub fn get(&self, name: &str) -> Option<&Var> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn of_sort(&self, sort: Sort) -> impl Iterator<Item = &Var> {
        self.vars.iter().filter(move |v| v.sort == sort)
    }
}

fn ill(t: &Term, msg: impl Into<String>) -> SyntaxError {
    SyntaxError::IllSorted {
        subterm: t.to_string(),
        msg: msg.into(),
    }
}

/// Sort of a term, or an error naming the first ill-sorted subterm.
pub fn term_sort(t: &Term) -> Result<Sort, SyntaxError> {
    match t {
        Term::Var(v) => Ok(v.sort),
        Term::Lit { sort, .. } => Ok(*sort),
        Term::Uniformizer => Ok(Sort::VF),
        Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
            let sa = term_sort(a)?;
            let sb = term_sort(b)?;
            if sa != sb {
                return Err(ill(t, format!("operands have different sorts ({sa} and {sb})")));
            }
            if sa == Sort::ZZ && matches!(t, Term::Mul(..)) {
                return Err(ill(t, "the value group has no multiplication"));
            }
            Ok(sa)
        }
        Term::Neg(a) => term_sort(a),
        Term::Ord(a) => match term_sort(a)? {
            Sort::VF => Ok(Sort::ZZ),
            s => Err(ill(t, format!("`ord` expects a VF argument, got {s}"))),
        },
        Term::Ac(a) => match term_sort(a)? {
            Sort::VF => Ok(Sort::RF),
            s => Err(ill(t, format!("`ac` expects a VF argument, got {s}"))),
        },
    }
}

fn check_formula(f: &Formula, bound: &mut Vec<Var>, free: &mut BTreeMap<String, Sort>) -> Result<(), SyntaxError> {
    let mut check_vars = |t: &Term, bound: &Vec<Var>| -> Result<(), SyntaxError> {
        let mut err = None;
        t.visit_vars(&mut |v| {
            if err.is_some() {
                return;
            }
            if let Some(b) = bound.iter().rev().find(|b| b.name == v.name) {
                if b.sort != v.sort {
                    err = Some(ill(t, format!("`{}` is bound with sort {} but used with sort {}", v.name, b.sort, v.sort)));
                }
            } else if let Some(s) = free.get(&v.name) {
                if *s != v.sort {
                    err = Some(ill(t, format!("free variable `{}` used with sorts {} and {}", v.name, s, v.sort)));
                }
            } else {
                free.insert(v.name.clone(), v.sort);
            }
        });
        err.map_or(Ok(()), Err)
    };
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Eq(a, b) => {
            let (sa, sb) = (term_sort(a)?, term_sort(b)?);
            if sa != sb {
                return Err(SyntaxError::IllSorted {
                    subterm: f.to_string(),
                    msg: format!("equality between sorts {sa} and {sb}"),
                });
            }
            check_vars(a, bound)?;
            check_vars(b, bound)
        }
        Formula::Le(a, b) | Formula::Cong { lhs: a, rhs: b, .. } => {
            for t in [a, b] {
                let s = term_sort(t)?;
                if s != Sort::ZZ {
                    return Err(ill(t, format!("order and congruence relations live in ZZ, got {s}")));
                }
            }
            if let Formula::Cong { modulus, .. } = f {
                if *modulus < 2 {
                    return Err(SyntaxError::IllSorted {
                        subterm: f.to_string(),
                        msg: format!("congruence modulus must be a literal >= 2, got {modulus}"),
                    });
                }
            }
            check_vars(a, bound)?;
            check_vars(b, bound)
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            check_formula(a, bound, free)?;
            check_formula(b, bound, free)
        }
        Formula::Not(a) => check_formula(a, bound, free),
        Formula::Quant { var, body, .. } => {
            bound.push(var.clone());
            let r = check_formula(body, bound, free);
            bound.pop();
            r
        }
    }
}

/// Checks that every operator receives children of the sorts it requires and
/// returns the free-variable signature.
pub fn typecheck(f: &Formula) -> Result<Signature, SyntaxError> {
    check_formula(f, &mut Vec::new(), &mut BTreeMap::new())?;
    Ok(Signature::new(f.free_vars()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    #[test]
    fn units_signature() {
        let f = parse_formula("exists y:VF (y*x = 1)").unwrap();
        assert_eq!(typecheck(&f).unwrap().counts(), (1, 0, 0));
    }

    #[test]
    fn one_variable_per_sort() {
        let f = parse_formula("ord(x) = z").unwrap();
        let sig = typecheck(&f).unwrap();
        assert_eq!(sig.counts(), (1, 0, 1));
        assert_eq!(sig.vars, vec![Var::new("x", Sort::VF), Var::new("z", Sort::ZZ)]);
    }

    #[test]
    fn hand_built_cross_sort_sum_rejected() {
        let x = Term::var("x", Sort::VF);
        let f = Formula::Eq(Term::add(x.clone(), Term::ord(x)), Term::lit(0, Sort::VF));
        assert!(typecheck(&f).is_err());
    }

    #[test]
    fn zz_multiplication_rejected() {
        let z = Term::var("z", Sort::ZZ);
        let f = Formula::Le(Term::mul(z.clone(), z), Term::lit(0, Sort::ZZ));
        assert!(matches!(typecheck(&f), Err(SyntaxError::IllSorted { .. })));
    }

    #[test]
    fn congruence_needs_modulus_two_or_more() {
        let z = Term::var("z", Sort::ZZ);
        let f = Formula::Cong {
            lhs: z,
            rhs: Term::lit(0, Sort::ZZ),
            modulus: 1,
        };
        assert!(typecheck(&f).is_err());
    }

    #[test]
    fn binder_sort_mismatch_rejected() {
        let f = Formula::exists(
            Var::new("y", Sort::VF),
            Formula::Le(Term::var("y", Sort::ZZ), Term::lit(0, Sort::ZZ)),
        );
        assert!(typecheck(&f).is_err());
    }

    #[test]
    fn bound_variables_excluded() {
        let f = parse_formula("exists y:ZZ (x = y + y) /\\ ac(w) = 1").unwrap();
        let sig = typecheck(&f).unwrap();
        assert_eq!(sig.vars, vec![Var::new("x", Sort::ZZ), Var::new("w", Sort::VF)]);
    }
}
